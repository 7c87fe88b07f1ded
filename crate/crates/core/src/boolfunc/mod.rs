//! Boolean functions over positional inputs.
//!
//! A [`BoolFunc`] is held as an expression tree, an explicit truth table or a
//! nested canalizing cascade. All three evaluate identically; the network
//! layer maps input positions to vertex indices (sorted ascending).

mod expr;
mod ncf;
mod parse;
mod table;

pub use expr::BoolExpr;
pub use ncf::{detect_nested_canalizing, Layer, NestedCanalizingForm, MAX_NCF_ARITY};
pub use parse::{ParsedExpr, Symbol};
pub use table::{TruthTable, MAX_TABLE_ARITY};

pub(crate) use parse::parse as parse_with_mode;

use crate::error::{Error, Result};

/// Parses an expression in the model-file grammar; `Var(i)` in the result
/// refers to the `i`-th distinct identifier in order of appearance.
pub fn parse_expression(text: &str) -> Result<ParsedExpr> {
    parse::parse(text, false).map_err(|message| Error::Parse { line: 1, message })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoolFunc {
    Expr { arity: usize, expr: BoolExpr },
    Table(TruthTable),
    Canalizing(NestedCanalizingForm),
}

impl BoolFunc {
    /// Wraps an expression, checking that every variable is below `arity`
    /// and that gates are well formed.
    pub fn from_expr(arity: usize, expr: BoolExpr) -> Result<Self> {
        if let Some(max) = expr.max_var() {
            if max >= arity {
                return Err(Error::UnknownInput { position: max, arity });
            }
        }
        if !expr.is_well_formed() {
            return Err(Error::Domain("And/Or gates need at least two children".into()));
        }
        Ok(BoolFunc::Expr { arity, expr })
    }

    pub fn constant(arity: usize, value: bool) -> Self {
        BoolFunc::Expr {
            arity,
            expr: BoolExpr::Const(value),
        }
    }

    /// The identity on input `position` of an `arity`-input function.
    pub fn projection(arity: usize, position: usize) -> Result<Self> {
        Self::from_expr(arity, BoolExpr::var(position))
    }

    pub fn arity(&self) -> usize {
        match self {
            BoolFunc::Expr { arity, .. } => *arity,
            BoolFunc::Table(t) => t.arity(),
            BoolFunc::Canalizing(n) => n.arity(),
        }
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.arity() {
            return Err(Error::Arity {
                expected: self.arity(),
                actual: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[bool]) -> bool {
        match self {
            BoolFunc::Expr { expr, .. } => expr.eval(x),
            BoolFunc::Table(t) => t.eval(x),
            BoolFunc::Canalizing(n) => n.eval(x),
        }
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        if let BoolFunc::Table(t) = self {
            return Ok(t.clone());
        }
        let d = self.arity();
        let mut x = vec![false; d];
        TruthTable::from_fn(d, |p| {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = (p >> i) & 1 == 1;
            }
            self.eval_unchecked(&x)
        })
    }

    /// Expression form: tables become minterm sums, cascades become their
    /// linear circuit.
    pub fn to_expr(&self) -> BoolExpr {
        match self {
            BoolFunc::Expr { expr, .. } => expr.clone(),
            BoolFunc::Canalizing(n) => n.to_expr(),
            BoolFunc::Table(t) => {
                let d = t.arity();
                let minterms = (0..t.len()).filter(|&p| t.get(p)).map(|p| {
                    BoolExpr::and((0..d).map(|i| {
                        if (p >> i) & 1 == 1 {
                            BoolExpr::var(i)
                        } else {
                            BoolExpr::not(BoolExpr::var(i))
                        }
                    }))
                });
                BoolExpr::or(minterms)
            }
        }
    }

    /// Partial evaluation: fixes the listed input positions and returns the
    /// function of the remaining inputs, in their original relative order.
    /// Inputs that become irrelevant are kept.
    pub fn cofactor(&self, fixed: &[(usize, bool)]) -> Result<BoolFunc> {
        let d = self.arity();
        let mut slots: Vec<Option<bool>> = vec![None; d];
        for &(position, value) in fixed {
            if position >= d {
                return Err(Error::UnknownInput { position, arity: d });
            }
            match slots[position] {
                Some(prev) if prev != value => {
                    return Err(Error::Domain(format!("input {position} fixed to both 0 and 1")));
                }
                _ => slots[position] = Some(value),
            }
        }
        let mut renumber = vec![usize::MAX; d];
        let mut next = 0;
        for (i, slot) in slots.iter().enumerate() {
            if slot.is_none() {
                renumber[i] = next;
                next += 1;
            }
        }
        let arity = next;
        match self {
            BoolFunc::Table(t) => {
                let free: Vec<usize> = (0..d).filter(|&i| slots[i].is_none()).collect();
                let base = slots
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (i, s)| acc | (usize::from(*s == Some(true)) << i));
                let table = TruthTable::from_fn(arity, |q| {
                    let p = free
                        .iter()
                        .enumerate()
                        .fold(base, |acc, (j, &i)| acc | (((q >> j) & 1) << i));
                    t.get(p)
                })?;
                Ok(BoolFunc::Table(table))
            }
            _ => {
                let expr = self.to_expr().substitute(&slots, &renumber);
                Ok(BoolFunc::Expr { arity, expr })
            }
        }
    }

    /// Inserts an unused input at `position`, shifting later inputs up.
    pub fn with_extra_input(&self, position: usize) -> Result<BoolFunc> {
        let d = self.arity();
        if position > d {
            return Err(Error::UnknownInput { position, arity: d + 1 });
        }
        let expr = self.to_expr().remap(&|i| if i >= position { i + 1 } else { i });
        Ok(BoolFunc::Expr { arity: d + 1, expr })
    }

    /// Pointwise equality over all inputs.
    pub fn equivalent(&self, other: &BoolFunc) -> Result<bool> {
        if self.arity() != other.arity() {
            return Ok(false);
        }
        Ok(self.truth_table()? == other.truth_table()?)
    }

    /// Drops inputs the function does not depend on. Never applied
    /// implicitly; returns the reduced function and the kept positions.
    pub fn prune_support(&self) -> Result<(BoolFunc, Vec<usize>)> {
        let t = self.truth_table()?;
        let d = t.arity();
        let kept: Vec<usize> = (0..d)
            .filter(|&i| (0..t.len()).any(|p| p & (1 << i) == 0 && t.get(p) != t.get(p | (1 << i))))
            .collect();
        let dropped: Vec<(usize, bool)> = (0..d).filter(|i| !kept.contains(i)).map(|i| (i, false)).collect();
        Ok((self.cofactor(&dropped)?, kept))
    }

    /// Size of the expression form, counted in nodes.
    pub fn expr_size(&self) -> usize {
        self.to_expr().size()
    }
}

/// Combines two local functions of the same vertex so that the resulting
/// update enables a flip exactly where either operand does:
/// `h(x) xor x_v = (f(x) xor x_v) | (g(x) xor x_v)`, with `x_v` the input at
/// `self_index`.
pub fn union_combine(f: &BoolFunc, g: &BoolFunc, self_index: usize) -> Result<BoolFunc> {
    if f.arity() != g.arity() {
        return Err(Error::Arity {
            expected: f.arity(),
            actual: g.arity(),
        });
    }
    if self_index >= f.arity() {
        return Err(Error::UnknownInput {
            position: self_index,
            arity: f.arity(),
        });
    }
    let own = || BoolExpr::var(self_index);
    let expr = BoolExpr::xor(
        own(),
        BoolExpr::or([BoolExpr::xor(f.to_expr(), own()), BoolExpr::xor(g.to_expr(), own())]),
    );
    Ok(BoolFunc::Expr { arity: f.arity(), expr })
}

/// Brute-force cascade check used by tests: does the form reproduce `f`?
#[cfg(test)]
pub(crate) fn reproduces(form: &NestedCanalizingForm, f: &BoolFunc) -> bool {
    let d = f.arity();
    (0..(1usize << d)).all(|p| {
        let x: Vec<bool> = (0..d).map(|i| (p >> i) & 1 == 1).collect();
        form.eval(&x) == f.eval_unchecked(&x)
    })
}
