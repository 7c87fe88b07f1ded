//! Asynchronous state transition graphs and their terminal SCCs.
//!
//! States are packed integers: the vertex of rank `r` (in ascending index
//! order) sits at bit `r`. A transition flips one coordinate `v`, and exists
//! exactly when some admissible control assignment makes `f_v` disagree with
//! the current value of `v`.

use std::collections::{BTreeSet, VecDeque};
use std::io;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{BooleanNetwork, GlobalState};

pub const DEFAULT_MAX_DIMENSION: usize = 24;
/// Graphs up to this dimension keep an explicit adjacency.
pub const EXPLICIT_ADJACENCY_LIMIT: usize = 20;
const FLIP_TABLE_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug)]
enum Source {
    Internal(usize),
    External(usize),
}

#[derive(Clone, Debug)]
struct FlipRule {
    rank: usize,
    sources: Vec<Source>,
    /// Ranks read by the rule (internal inputs plus the vertex itself) and
    /// the tabulated flip predicate over them, when small enough.
    table: Option<(Vec<usize>, Vec<u64>)>,
}

/// Per-vertex flip predicates of a network, compiled once.
#[derive(Clone, Debug)]
pub(crate) struct Dynamics {
    vertices: Arc<[usize]>,
    rules: Vec<FlipRule>,
    net: BooleanNetwork,
}

impl Dynamics {
    pub(crate) fn compile(net: &BooleanNetwork) -> Result<Dynamics> {
        let m = net.dimension();
        if m >= 64 {
            return Err(Error::capacity("packed state width", 63, m));
        }
        let vertices: Arc<[usize]> = net.vertex_ids().into();
        let mut rules = Vec::with_capacity(m);
        for (rank, v) in net.vertices().iter().enumerate() {
            let sources: Vec<Source> = v
                .inputs
                .iter()
                .map(|&u| match net.position(u) {
                    Some(r) => Source::Internal(r),
                    None => Source::External(v.control.external().binary_search(&u).expect("validated network")),
                })
                .collect();
            let mut rule = FlipRule {
                rank,
                sources,
                table: None,
            };
            let read: BTreeSet<usize> = rule
                .sources
                .iter()
                .filter_map(|s| match s {
                    Source::Internal(r) => Some(*r),
                    Source::External(_) => None,
                })
                .chain([rank])
                .collect();
            if read.len() <= FLIP_TABLE_LIMIT {
                let ranks: Vec<usize> = read.into_iter().collect();
                let mut words = vec![0u64; (1usize << ranks.len()).div_ceil(64)];
                let mut buf = Vec::with_capacity(rule.sources.len());
                for idx in 0..(1usize << ranks.len()) {
                    let state = ranks
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &r)| acc | (((idx >> k) & 1) as u64) << r);
                    if direct_flip(net, &rule, state, &mut buf) {
                        words[idx / 64] |= 1 << (idx % 64);
                    }
                }
                rule.table = Some((ranks, words));
            }
            rules.push(rule);
        }
        Ok(Dynamics {
            vertices,
            rules,
            net: net.clone(),
        })
    }

    pub(crate) fn dimension(&self) -> usize {
        self.rules.len()
    }

    pub(crate) fn vertices(&self) -> &Arc<[usize]> {
        &self.vertices
    }

    #[inline]
    pub(crate) fn flips(&self, rank: usize, state: u64, buf: &mut Vec<bool>) -> bool {
        let rule = &self.rules[rank];
        match &rule.table {
            Some((ranks, words)) => {
                let idx = ranks
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (k, &r)| acc | (((state >> r) & 1) as usize) << k);
                (words[idx / 64] >> (idx % 64)) & 1 == 1
            }
            None => direct_flip(&self.net, rule, state, buf),
        }
    }

    /// Successors in ascending order of the flipped vertex.
    pub(crate) fn successors_into(&self, state: u64, out: &mut Vec<u64>, buf: &mut Vec<bool>) {
        out.clear();
        for r in 0..self.rules.len() {
            if self.flips(r, state, buf) {
                out.push(state ^ (1 << r));
            }
        }
    }
}

fn direct_flip(net: &BooleanNetwork, rule: &FlipRule, state: u64, buf: &mut Vec<bool>) -> bool {
    let v = &net.vertices()[rule.rank];
    let current = (state >> rule.rank) & 1 == 1;
    v.control.admissible().iter().any(|z| {
        buf.clear();
        buf.extend(rule.sources.iter().map(|s| match *s {
            Source::Internal(r) => (state >> r) & 1 == 1,
            Source::External(k) => z[k],
        }));
        v.function.eval_unchecked(buf) != current
    })
}

/// Direct successor enumeration for one state, `x` indexed by `V(N)`.
pub fn successors(net: &BooleanNetwork, x: &GlobalState) -> Result<Vec<GlobalState>> {
    if x.vertices() != net.vertex_ids().as_slice() {
        return Err(Error::Domain("state is not indexed by the network's vertices".into()));
    }
    let mut out = Vec::new();
    let mut buf = Vec::new();
    for v in net.vertices() {
        let current = x.get(v.id).expect("same vertices");
        let enabled = v.control.admissible().iter().any(|z| {
            buf.clear();
            buf.extend(v.inputs.iter().map(|&u| match x.get(u) {
                Some(b) => b,
                None => z[v.control.external().binary_search(&u).expect("validated network")],
            }));
            v.function.eval_unchecked(&buf) != current
        });
        if enabled {
            out.push(x.flip(v.id)?);
        }
    }
    Ok(out)
}

/// The state transition graph of a network over `2^m` packed states.
#[derive(Clone, Debug)]
pub struct StateGraph {
    dynamics: Dynamics,
    /// CSR adjacency, present when `m ≤ EXPLICIT_ADJACENCY_LIMIT`.
    explicit: Option<(Vec<u32>, Vec<u32>)>,
}

/// Builds the state transition graph; refuses dimensions above `cap`.
pub fn build_astg(net: &BooleanNetwork, cap: usize) -> Result<StateGraph> {
    let m = net.dimension();
    if m > cap {
        return Err(Error::capacity("state space dimension", cap, m));
    }
    let dynamics = Dynamics::compile(net)?;
    let explicit = (m <= EXPLICIT_ADJACENCY_LIMIT).then(|| {
        let mut offsets = Vec::with_capacity((1 << m) + 1);
        let mut targets = Vec::new();
        let (mut out, mut buf) = (Vec::new(), Vec::new());
        offsets.push(0u32);
        for s in 0..(1u64 << m) {
            dynamics.successors_into(s, &mut out, &mut buf);
            targets.extend(out.iter().map(|&t| t as u32));
            offsets.push(targets.len() as u32);
        }
        (offsets, targets)
    });
    Ok(StateGraph { dynamics, explicit })
}

impl StateGraph {
    pub fn dimension(&self) -> usize {
        self.dynamics.dimension()
    }

    pub fn vertices(&self) -> &[usize] {
        self.dynamics.vertices()
    }

    pub fn state_count(&self) -> u64 {
        1 << self.dimension()
    }

    pub fn is_explicit(&self) -> bool {
        self.explicit.is_some()
    }

    pub fn successors(&self, state: u64) -> Vec<u64> {
        let mut out = Vec::new();
        self.successors_into(state, &mut out, &mut Vec::new());
        out
    }

    fn successors_into(&self, state: u64, out: &mut Vec<u64>, buf: &mut Vec<bool>) {
        match &self.explicit {
            Some((offsets, targets)) => {
                let (lo, hi) = (offsets[state as usize] as usize, offsets[state as usize + 1] as usize);
                out.clear();
                out.extend(targets[lo..hi].iter().map(|&t| u64::from(t)));
            }
            None => self.dynamics.successors_into(state, out, buf),
        }
    }

    pub fn has_edge(&self, from: u64, to: u64) -> bool {
        self.successors(from).contains(&to)
    }

    /// Every edge, sorted by source then target.
    pub fn edges(&self) -> Vec<(u64, u64)> {
        let mut edges = Vec::new();
        let (mut out, mut buf) = (Vec::new(), Vec::new());
        for s in 0..self.state_count() {
            self.successors_into(s, &mut out, &mut buf);
            out.sort_unstable();
            edges.extend(out.iter().map(|&t| (s, t)));
        }
        edges
    }

    pub fn edge_count(&self) -> usize {
        match &self.explicit {
            Some((_, targets)) => targets.len(),
            None => self.edges().len(),
        }
    }

    pub fn state(&self, packed: u64) -> GlobalState {
        GlobalState::from_packed(self.dynamics.vertices().clone(), packed)
    }

    /// Text dump, one `x -> y` line per edge with states in binary
    /// (leftmost character = lowest vertex index).
    pub fn write_edge_list(&self, out: &mut impl io::Write) -> io::Result<()> {
        for (s, t) in self.edges() {
            writeln!(out, "{} -> {}", self.state(s).to_bit_string(), self.state(t).to_bit_string())?;
        }
        Ok(())
    }
}

/// A set of packed states over a fixed vertex list, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    vertices: Arc<[usize]>,
    states: Vec<u64>,
}

impl StateSet {
    pub fn new(vertices: impl Into<Arc<[usize]>>, mut states: Vec<u64>) -> Result<StateSet> {
        let vertices = vertices.into();
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("state-set vertices must be sorted and distinct".into()));
        }
        if vertices.len() < 64 && states.iter().any(|&s| s >> vertices.len() != 0) {
            return Err(Error::Domain("packed state wider than its vertex set".into()));
        }
        states.sort_unstable();
        states.dedup();
        Ok(StateSet { vertices, states })
    }

    pub fn from_states(states: &[GlobalState]) -> Result<StateSet> {
        let Some(first) = states.first() else {
            return Err(Error::Domain("cannot infer the vertex set of an empty state list".into()));
        };
        let vertices = first.shared_vertices();
        let packed = states
            .iter()
            .map(|x| {
                if x.vertices() != &*vertices {
                    return Err(Error::Domain("states over different vertex sets".into()));
                }
                x.packed()
            })
            .collect::<Result<Vec<_>>>()?;
        StateSet::new(vertices, packed)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn packed(&self) -> &[u64] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn smallest(&self) -> Option<u64> {
        self.states.first().copied()
    }

    pub fn contains_packed(&self, s: u64) -> bool {
        self.states.binary_search(&s).is_ok()
    }

    /// Membership of `x↾vertices`; `x` must cover the set's vertices.
    pub fn contains(&self, x: &GlobalState) -> Result<bool> {
        let packed = x.restrict(&self.vertices)?.packed()?;
        Ok(self.contains_packed(packed))
    }

    pub fn states(&self) -> Vec<GlobalState> {
        self.states
            .iter()
            .map(|&s| GlobalState::from_packed(self.vertices.clone(), s))
            .collect()
    }

    pub fn bit_strings(&self) -> Vec<String> {
        self.states().iter().map(GlobalState::to_bit_string).collect()
    }

    /// Projection onto `subset ⊆ vertices`.
    pub fn project(&self, subset: &[usize]) -> Result<StateSet> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let ranks = keep
            .iter()
            .map(|v| self.vertices.binary_search(v).map_err(|_| Error::UnknownVertex(*v)))
            .collect::<Result<Vec<_>>>()?;
        let states = self
            .states
            .iter()
            .map(|&s| {
                ranks
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (k, &r)| acc | ((s >> r) & 1) << k)
            })
            .collect();
        StateSet::new(keep, states)
    }
}

impl Serialize for StateSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.bit_strings())
    }
}

/// Terminal SCCs of a graph, sorted by smallest state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractorSet {
    pub vertices: Vec<usize>,
    pub attractors: Vec<StateSet>,
}

impl AttractorSet {
    pub fn len(&self) -> usize {
        self.attractors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attractors.is_empty()
    }
}

pub fn attractors(g: &StateGraph) -> AttractorSet {
    attractors_from_roots(g, 0..g.state_count())
}

/// Terminal SCCs reachable from `roots`, explored in the given order. The
/// result is sorted, so it does not depend on the order.
pub fn attractors_from_roots(g: &StateGraph, roots: impl IntoIterator<Item = u64>) -> AttractorSet {
    const UNSEEN: u32 = u32::MAX;
    let n = g.state_count() as usize;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u64> = Vec::new();
    let mut frames: Vec<(u64, Vec<u64>, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut found: Vec<StateSet> = Vec::new();
    let (mut out, mut buf) = (Vec::new(), Vec::new());

    for root in roots {
        if index[root as usize] != UNSEEN {
            continue;
        }
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        g.successors_into(root, &mut out, &mut buf);
        frames.push((root, out.clone(), 0));

        while let Some((s, succ, cursor)) = frames.last_mut() {
            let s = *s;
            if *cursor < succ.len() {
                let t = succ[*cursor];
                *cursor += 1;
                let ti = t as usize;
                if index[ti] == UNSEEN {
                    index[ti] = next_index;
                    low[ti] = next_index;
                    next_index += 1;
                    stack.push(t);
                    on_stack[ti] = true;
                    g.successors_into(t, &mut out, &mut buf);
                    frames.push((t, out.clone(), 0));
                } else if on_stack[ti] {
                    low[s as usize] = low[s as usize].min(index[ti]);
                }
                continue;
            }
            frames.pop();
            if let Some((parent, _, _)) = frames.last() {
                let p = *parent as usize;
                low[p] = low[p].min(low[s as usize]);
            }
            if low[s as usize] == index[s as usize] {
                let mut members = Vec::new();
                loop {
                    let t = stack.pop().expect("root is on the stack");
                    on_stack[t as usize] = false;
                    members.push(t);
                    if t == s {
                        break;
                    }
                }
                members.sort_unstable();
                let terminal = members.iter().all(|&m| {
                    g.successors_into(m, &mut out, &mut buf);
                    out.iter().all(|t| members.binary_search(t).is_ok())
                });
                if terminal {
                    found.push(StateSet {
                        vertices: g.dynamics.vertices().clone(),
                        states: members,
                    });
                }
            }
        }
    }
    found.sort_by_key(|a| a.smallest());
    AttractorSet {
        vertices: g.vertices().to_vec(),
        attractors: found,
    }
}

/// Which states the reachability check visits.
#[derive(Clone, Copy, Debug)]
pub enum Sampling {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReachabilityReport {
    pub states_checked: usize,
    pub paths_checked: usize,
    pub counterexample: Option<String>,
}

impl ReachabilityReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks transition factorization and path projection for the
/// decomposition `(upstream, V ∖ upstream)` on the network's own dynamics.
pub fn reachability_check(net: &BooleanNetwork, upstream: &[usize], sampling: Sampling) -> Result<ReachabilityReport> {
    reachability_check_with(net, upstream, sampling, &|x| successors(net, x))
}

/// Same as [`reachability_check`] with the full network's successor
/// function supplied by the caller.
///
/// Every step `(x, y) → (x', y')` must be either an upstream move
/// (`x → x'` in `N[I]`, `y' = y`) or a downstream move (`x' = x`,
/// `y → y'` in `N(I, x)`), and both kinds must all be present. Along
/// every path from a sampled state, the upstream projection must stay
/// reachable from `x` in `N[I]`.
pub fn reachability_check_with(
    net: &BooleanNetwork,
    upstream: &[usize],
    sampling: Sampling,
    full_successors: &dyn Fn(&GlobalState) -> Result<Vec<GlobalState>>,
) -> Result<ReachabilityReport> {
    let mut up: Vec<usize> = upstream.to_vec();
    up.sort_unstable();
    up.dedup();
    let down: Vec<usize> = net.vertex_ids().into_iter().filter(|v| up.binary_search(v).is_err()).collect();
    let top = net.induced(&up)?;
    let n = net.dimension();
    if n > 30 {
        return Err(Error::capacity("reachability check dimension", 30, n));
    }
    let vertices: Arc<[usize]> = net.vertex_ids().into();
    let starts: Vec<u64> = match sampling {
        Sampling::Exhaustive => (0..(1u64 << n)).collect(),
        Sampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| rng.gen_range(0..(1u64 << n))).collect()
        }
    };
    let mut report = ReachabilityReport::default();
    let mut cache: std::collections::HashMap<Vec<bool>, BooleanNetwork> = Default::default();

    let factored = |x: &GlobalState,
                    cache: &mut std::collections::HashMap<Vec<bool>, BooleanNetwork>|
     -> Result<BTreeSet<GlobalState>> {
        let xi = x.restrict(&up)?;
        let yi = x.restrict(&down)?;
        let mut expected = BTreeSet::new();
        for x2 in successors(&top, &xi)? {
            expected.insert(x2.merge(&yi)?);
        }
        if !down.is_empty() {
            if !cache.contains_key(xi.bits()) {
                let lower = net.controlled_restrict(&up, std::slice::from_ref(&xi))?;
                cache.insert(xi.bits().to_vec(), lower);
            }
            let lower = &cache[xi.bits()];
            for y2 in successors(lower, &yi)? {
                expected.insert(xi.merge(&y2)?);
            }
        }
        Ok(expected)
    };

    for &s in &starts {
        let x = GlobalState::from_packed(vertices.clone(), s);
        report.states_checked += 1;
        let actual: BTreeSet<GlobalState> = full_successors(&x)?.into_iter().collect();
        let expected = factored(&x, &mut cache)?;
        if actual != expected {
            let show = |set: &BTreeSet<GlobalState>| set.iter().map(GlobalState::to_bit_string).collect::<Vec<_>>().join(",");
            report.counterexample = Some(format!(
                "transitions from {} do not factor: got {{{}}}, expected {{{}}}",
                x.to_bit_string(),
                show(&actual),
                show(&expected)
            ));
            return Ok(report);
        }
    }

    // Path projection: BFS in the full dynamics from each start.
    let top_vertices: Arc<[usize]> = up.clone().into();
    for &s in &starts {
        let x = GlobalState::from_packed(vertices.clone(), s);
        let top_reach = reach(&x.restrict(&up)?, &|z| successors(&top, z))?;
        let full_reach = reach(&x, full_successors)?;
        report.paths_checked += full_reach.len();
        for z in &full_reach {
            let proj = z.restrict(&top_vertices)?;
            if !top_reach.contains(&proj) {
                report.counterexample = Some(format!(
                    "{} reaches {} but {} does not reach {} upstream",
                    x.to_bit_string(),
                    z.to_bit_string(),
                    x.restrict(&up)?.to_bit_string(),
                    proj.to_bit_string()
                ));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

fn reach(
    start: &GlobalState,
    next: &dyn Fn(&GlobalState) -> Result<Vec<GlobalState>>,
) -> Result<BTreeSet<GlobalState>> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(x) = queue.pop_front() {
        for y in next(&x)? {
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}
