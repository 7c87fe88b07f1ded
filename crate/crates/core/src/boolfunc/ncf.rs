use super::expr::BoolExpr;
use super::BoolFunc;
use crate::error::{Error, Result};

/// Largest arity accepted by [`detect_nested_canalizing`].
pub const MAX_NCF_ARITY: usize = 16;

/// One step of a canalizing cascade: if input `input` equals `canalizing`,
/// the output is `canalized` and the rest of the cascade is skipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Layer {
    pub input: usize,
    pub canalizing: bool,
    pub canalized: bool,
}

/// A nested canalizing representation: layers in cascade order, followed by
/// the output taken when no layer fires.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NestedCanalizingForm {
    layers: Vec<Layer>,
    default: bool,
}

impl NestedCanalizingForm {
    /// Checks that the layer inputs are a permutation of `0..layers.len()`.
    pub fn new(layers: Vec<Layer>, default: bool) -> Result<Self> {
        let d = layers.len();
        let mut seen = vec![false; d];
        for layer in &layers {
            if layer.input >= d || seen[layer.input] {
                return Err(Error::Domain(format!(
                    "cascade order is not a permutation of 0..{d} (input {})",
                    layer.input
                )));
            }
            seen[layer.input] = true;
        }
        Ok(NestedCanalizingForm { layers, default })
    }

    pub fn arity(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn default_output(&self) -> bool {
        self.default
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.layers
            .iter()
            .find(|l| x[l.input] == l.canalizing)
            .map_or(self.default, |l| l.canalized)
    }

    /// Emits the cascade as a circuit with at most three nodes per layer plus
    /// the final constant: `b = 1` layers become `lit | rest`, `b = 0` layers
    /// become `!lit & rest`.
    pub fn to_expr(&self) -> BoolExpr {
        let mut rest = BoolExpr::Const(self.default);
        for layer in self.layers.iter().rev() {
            let fires = if layer.canalizing {
                BoolExpr::var(layer.input)
            } else {
                BoolExpr::not(BoolExpr::var(layer.input))
            };
            let misses = if layer.canalizing {
                BoolExpr::not(BoolExpr::var(layer.input))
            } else {
                BoolExpr::var(layer.input)
            };
            // Nest explicitly rather than through the flattening constructors
            // so that the layer structure survives in the tree.
            rest = if layer.canalized {
                BoolExpr::Or(vec![fires, rest])
            } else {
                BoolExpr::And(vec![misses, rest])
            };
        }
        rest
    }
}

/// Finds a nested canalizing form of `f`, or `None` when `f` has none.
///
/// At each layer the smallest remaining input admitting a canalizing value is
/// chosen, trying the value `0` before `1`. Any canalizing choice keeps the
/// remainder nested canalizing whenever the whole function is, so the greedy
/// search is complete. A constant function of arity 0 yields the empty
/// cascade.
pub fn detect_nested_canalizing(f: &BoolFunc) -> Result<Option<NestedCanalizingForm>> {
    let d = f.arity();
    if d > MAX_NCF_ARITY {
        return Err(Error::capacity("nested canalizing detection arity", MAX_NCF_ARITY, d));
    }
    let table = f.truth_table()?;
    let mut points: Vec<u32> = (0..(1u32 << d)).collect();
    let mut remaining: Vec<usize> = (0..d).collect();
    let mut layers = Vec::with_capacity(d);

    while !remaining.is_empty() {
        let mut chosen = None;
        'search: for (slot, &input) in remaining.iter().enumerate() {
            for value in [false, true] {
                let mut out = None;
                let mut constant = true;
                for &p in &points {
                    if ((p >> input) & 1 == 1) != value {
                        continue;
                    }
                    let y = table.get(p as usize);
                    match out {
                        None => out = Some(y),
                        Some(o) if o != y => {
                            constant = false;
                            break;
                        }
                        _ => {}
                    }
                }
                if constant {
                    if let Some(b) = out {
                        chosen = Some((slot, input, value, b));
                        break 'search;
                    }
                }
            }
        }
        let Some((slot, input, value, b)) = chosen else {
            return Ok(None);
        };
        layers.push(Layer {
            input,
            canalizing: value,
            canalized: b,
        });
        remaining.remove(slot);
        points.retain(|&p| ((p >> input) & 1 == 1) != value);
    }
    debug_assert_eq!(points.len(), 1);
    let default = table.get(points[0] as usize);
    NestedCanalizingForm::new(layers, default).map(Some)
}
