//! Brute-force attractors over the whole state space.
//!
//! Shares nothing with the modular engine: it tabulates, per vertex, whether
//! the vertex can be driven up or down, and runs its own Tarjan over all
//! `2^n` states with a per-state "escapes" flag to spot terminal SCCs.

use std::time::{Duration, Instant};

use crate::astg::{AttractorSet, StateSet};
use crate::decomposition::validate_decomposition;
use crate::engine::{attractor_tree, EngineConfig, DEFAULT_MAX_EXPAND};
use crate::error::{Error, Result};
use crate::network::BooleanNetwork;

pub const DEFAULT_ORACLE_DIMENSION: usize = 24;
const TABLE_INPUT_LIMIT: usize = 20;

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub attractors: AttractorSet,
    pub states_explored: u64,
    pub elapsed: Duration,
}

/// What each vertex can do as a function of its internal inputs.
struct Mover {
    bit: u32,
    /// Bit positions (in the packed state) of the internal inputs.
    reads: Vec<u32>,
    /// `up[i]`: some admissible control gives `f_v = 1` at input pattern `i`.
    up: Vec<bool>,
    down: Vec<bool>,
}

fn movers(net: &BooleanNetwork) -> Result<Vec<Mover>> {
    let ids = net.vertex_ids();
    let mut out = Vec::new();
    for (bit, v) in net.vertices().iter().enumerate() {
        let reads: Vec<u32> = v
            .inputs
            .iter()
            .filter_map(|u| ids.binary_search(u).ok().map(|r| r as u32))
            .collect();
        if reads.len() > TABLE_INPUT_LIMIT {
            return Err(Error::capacity(
                format!("oracle input table of vertex {} ({})", v.id, v.name),
                TABLE_INPUT_LIMIT,
                reads.len(),
            ));
        }
        let size = 1usize << reads.len();
        let mut up = vec![false; size];
        let mut down = vec![false; size];
        let mut args = vec![false; v.inputs.len()];
        for (pattern, (u, d)) in up.iter_mut().zip(down.iter_mut()).enumerate() {
            for z in v.control.admissible() {
                let mut internal = 0;
                for (slot, input) in v.inputs.iter().enumerate() {
                    args[slot] = if ids.binary_search(input).is_ok() {
                        let b = (pattern >> internal) & 1 == 1;
                        internal += 1;
                        b
                    } else {
                        let k = v.control.external().iter().position(|e| e == input).expect("control covers input");
                        z[k]
                    };
                }
                if v.function.eval(&args)? {
                    *u = true;
                } else {
                    *d = true;
                }
            }
        }
        out.push(Mover {
            bit: bit as u32,
            reads,
            up,
            down,
        });
    }
    Ok(out)
}

impl Mover {
    #[inline]
    fn can_flip(&self, state: u64) -> bool {
        let mut pattern = 0usize;
        for (k, &b) in self.reads.iter().enumerate() {
            pattern |= (((state >> b) & 1) as usize) << k;
        }
        if (state >> self.bit) & 1 == 1 {
            self.down[pattern]
        } else {
            self.up[pattern]
        }
    }
}

/// Terminal SCCs of the full state transition graph.
pub fn oracle_attractors(net: &BooleanNetwork, max_dimension: usize) -> Result<OracleResult> {
    let start = Instant::now();
    let n = net.dimension();
    if n > max_dimension || n > 30 {
        return Err(Error::capacity("oracle dimension", max_dimension.min(30), n));
    }
    let movers = movers(net)?;
    let total: u64 = 1 << n;
    const NEW: u8 = 0;
    const OPEN: u8 = 1;
    const CLOSED: u8 = 2;
    let mut status = vec![NEW; total as usize];
    let mut order = vec![0u32; total as usize];
    let mut low = vec![0u32; total as usize];
    let mut escapes = vec![false; total as usize];
    let mut pending: Vec<u32> = Vec::new();
    // (state, next vertex to try flipping)
    let mut path: Vec<(u32, u32)> = Vec::new();
    let mut counter = 0u32;
    let mut found = Vec::new();

    for root in 0..total as u32 {
        if status[root as usize] != NEW {
            continue;
        }
        status[root as usize] = OPEN;
        order[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        pending.push(root);
        path.push((root, 0));
        while let Some(top) = path.len().checked_sub(1) {
            let (s, next) = path[top];
            if (next as usize) < movers.len() {
                path[top].1 += 1;
                let m = &movers[next as usize];
                if !m.can_flip(u64::from(s)) {
                    continue;
                }
                let t = s ^ (1 << m.bit);
                match status[t as usize] {
                    NEW => {
                        status[t as usize] = OPEN;
                        order[t as usize] = counter;
                        low[t as usize] = counter;
                        counter += 1;
                        pending.push(t);
                        path.push((t, 0));
                    }
                    OPEN => low[s as usize] = low[s as usize].min(order[t as usize]),
                    _ => escapes[s as usize] = true,
                }
                continue;
            }
            path.pop();
            if low[s as usize] == order[s as usize] {
                let mut members = Vec::new();
                loop {
                    let t = pending.pop().expect("component root is pending");
                    status[t as usize] = CLOSED;
                    members.push(u64::from(t));
                    if t == s {
                        break;
                    }
                }
                if !escapes[s as usize] {
                    found.push(members);
                }
                if let Some(&(p, _)) = path.last() {
                    escapes[p as usize] = true;
                }
            } else if let Some(&(p, _)) = path.last() {
                low[p as usize] = low[p as usize].min(low[s as usize]);
                escapes[p as usize] |= escapes[s as usize];
            }
        }
    }

    let vertices = net.vertex_ids();
    let mut attractors = found
        .into_iter()
        .map(|m| StateSet::new(vertices.clone(), m))
        .collect::<Result<Vec<_>>>()?;
    attractors.sort_by_key(|a| a.smallest());
    Ok(OracleResult {
        attractors: AttractorSet { vertices, attractors },
        states_explored: total,
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug)]
pub struct CompareConfig {
    pub engine: EngineConfig,
    pub max_dimension: usize,
    pub max_expand: u64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            engine: EngineConfig::default(),
            max_dimension: DEFAULT_ORACLE_DIMENSION,
            max_expand: DEFAULT_MAX_EXPAND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass { attractors: usize },
    Mismatch { engine_only: Vec<StateSet>, oracle_only: Vec<StateSet> },
    /// A cap was hit; never counted as a pass.
    Inconclusive { reason: String },
}

/// Expands the engine's attractors and compares them with the oracle's as
/// sets of state sets. An invalid decomposition is an error, not a verdict.
pub fn compare(net: &BooleanNetwork, parts: Option<&[Vec<usize>]>, cfg: &CompareConfig) -> Result<Verdict> {
    if let Some(p) = parts {
        validate_decomposition(net, p)?;
    }
    let inconclusive = |e: Error| -> Result<Verdict> {
        if e.is_capacity() {
            Ok(Verdict::Inconclusive { reason: e.to_string() })
        } else {
            Err(e)
        }
    };
    let oracle = match oracle_attractors(net, cfg.max_dimension) {
        Ok(o) => o,
        Err(e) => return inconclusive(e),
    };
    let tree = match attractor_tree(net, parts, &cfg.engine) {
        Ok(t) => t,
        Err(e) => return inconclusive(e),
    };
    let mut engine = Vec::new();
    for leaf in tree.leaves() {
        match leaf.to_state_set(cfg.max_expand) {
            Ok(s) => engine.push(s),
            Err(e) => return inconclusive(e),
        }
    }
    engine.sort();
    let mut expected = oracle.attractors.attractors;
    expected.sort();
    if engine == expected {
        return Ok(Verdict::Pass { attractors: engine.len() });
    }
    Ok(Verdict::Mismatch {
        engine_only: engine.iter().filter(|a| expected.binary_search(a).is_err()).cloned().collect(),
        oracle_only: expected.iter().filter(|a| engine.binary_search(a).is_err()).cloned().collect(),
    })
}
