//! Boolean networks: an interaction graph with one local function per vertex.
//!
//! Vertices carry global indices that survive restriction, so a module cut
//! out of a larger network still talks about the same vertices. A vertex's
//! function is always over its full in-neighbor list `G⁻(v)` (sorted by
//! index). In-neighbors that lie outside the network are *external*: their
//! values range over the vertex's [`ControlSet`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::boolfunc::{self, BoolExpr, BoolFunc, Symbol};
use crate::error::{Error, Result};

/// Values an external input group may take, as an explicit set.
///
/// An empty `external` list means the vertex is uncontrolled. Otherwise
/// `admissible` is a non-empty, sorted, duplicate-free list of assignments
/// over `external` (ascending vertex index).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ControlSet {
    external: Vec<usize>,
    admissible: Vec<Vec<bool>>,
}

impl ControlSet {
    pub fn none() -> Self {
        ControlSet::default()
    }

    pub fn new(external: Vec<usize>, mut admissible: Vec<Vec<bool>>) -> Result<Self> {
        if external.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("external inputs must be sorted and distinct".into()));
        }
        if external.is_empty() {
            return Ok(ControlSet::none());
        }
        if admissible.is_empty() {
            return Err(Error::Domain("a control set needs at least one admissible assignment".into()));
        }
        if let Some(bad) = admissible.iter().find(|z| z.len() != external.len()) {
            return Err(Error::Arity {
                expected: external.len(),
                actual: bad.len(),
            });
        }
        admissible.sort();
        admissible.dedup();
        Ok(ControlSet { external, admissible })
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    pub fn external(&self) -> &[usize] {
        &self.external
    }

    /// Admissible assignments; a single empty assignment when uncontrolled.
    pub fn admissible(&self) -> &[Vec<bool>] {
        const UNCONTROLLED: &[Vec<bool>] = &[Vec::new()];
        if self.external.is_empty() {
            UNCONTROLLED
        } else {
            &self.admissible
        }
    }

    pub fn len(&self) -> usize {
        self.admissible().len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    pub name: String,
    /// `G⁻(v)`, sorted ascending; the function's input order.
    pub inputs: Vec<usize>,
    pub function: BoolFunc,
    pub control: ControlSet,
}

impl Vertex {
    /// Plain vertex with no external inputs.
    pub fn new(id: usize, name: impl Into<String>, inputs: Vec<usize>, function: BoolFunc) -> Self {
        Vertex {
            id,
            name: name.into(),
            inputs,
            function,
            control: ControlSet::none(),
        }
    }
}

/// State over an explicit vertex-index set, stored in ascending index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GlobalState {
    vertices: Arc<[usize]>,
    bits: Vec<bool>,
}

impl GlobalState {
    pub fn new(vertices: impl Into<Arc<[usize]>>, bits: Vec<bool>) -> Result<Self> {
        let vertices = vertices.into();
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("state vertices must be sorted and distinct".into()));
        }
        if vertices.len() != bits.len() {
            return Err(Error::Arity {
                expected: vertices.len(),
                actual: bits.len(),
            });
        }
        Ok(GlobalState { vertices, bits })
    }

    /// Builds a state from `(vertex, bit)` pairs in any order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, bool)>) -> Result<Self> {
        let map: BTreeMap<usize, bool> = pairs.into_iter().collect();
        let vertices: Vec<usize> = map.keys().copied().collect();
        let bits = map.values().copied().collect();
        Self::new(vertices, bits)
    }

    /// Unpacks `packed`, whose bit `r` holds the vertex of rank `r`.
    pub fn from_packed(vertices: Arc<[usize]>, packed: u64) -> Self {
        let bits = (0..vertices.len()).map(|r| (packed >> r) & 1 == 1).collect();
        GlobalState { vertices, bits }
    }

    /// Parses a binary string, leftmost character = lowest vertex index.
    pub fn from_bit_string(vertices: impl Into<Arc<[usize]>>, text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Domain(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, bits)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub(crate) fn shared_vertices(&self) -> Arc<[usize]> {
        self.vertices.clone()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, vertex: usize) -> Option<bool> {
        self.vertices.binary_search(&vertex).ok().map(|r| self.bits[r])
    }

    /// `x↾J` for `J ⊆ I`.
    pub fn restrict(&self, subset: &[usize]) -> Result<GlobalState> {
        let mut vs: Vec<usize> = subset.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let bits = vs
            .iter()
            .map(|&v| self.get(v).ok_or(Error::UnknownVertex(v)))
            .collect::<Result<Vec<_>>>()?;
        GlobalState::new(vs, bits)
    }

    /// `x^u`: the state with coordinate `u` flipped.
    pub fn flip(&self, vertex: usize) -> Result<GlobalState> {
        let r = self.vertices.binary_search(&vertex).map_err(|_| Error::UnknownVertex(vertex))?;
        let mut out = self.clone();
        out.bits[r] = !out.bits[r];
        Ok(out)
    }

    pub fn hamming(&self, other: &GlobalState) -> Result<usize> {
        if self.vertices != other.vertices {
            return Err(Error::Domain("states are over different vertex sets".into()));
        }
        Ok(self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count())
    }

    /// Packs into an integer with the vertex of rank `r` at bit `r`.
    pub fn packed(&self) -> Result<u64> {
        if self.bits.len() > 64 {
            return Err(Error::capacity("packed state width", 64, self.bits.len()));
        }
        Ok(self
            .bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (r, &b)| acc | (u64::from(b) << r)))
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Concatenates two states over disjoint vertex sets.
    pub fn merge(&self, other: &GlobalState) -> Result<GlobalState> {
        let pairs = self
            .vertices
            .iter()
            .copied()
            .zip(self.bits.iter().copied())
            .chain(other.vertices.iter().copied().zip(other.bits.iter().copied()));
        let state = Self::from_pairs(pairs)?;
        if state.len() != self.len() + other.len() {
            return Err(Error::Domain("merged states overlap".into()));
        }
        Ok(state)
    }
}

impl PartialOrd for GlobalState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Same-vertex states compare as their packed integers: the highest-index
/// vertex is the most significant bit.
impl Ord for GlobalState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices
            .cmp(&other.vertices)
            .then_with(|| self.bits.iter().rev().cmp(other.bits.iter().rev()))
    }
}

/// Edges of the interaction graph restricted to a network's own vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    pub vertices: Vec<usize>,
    /// `(u, v)` with `u ∈ G⁻(v)`, in lexicographic order.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanNetwork {
    vertices: Vec<Vertex>,
}

impl BooleanNetwork {
    /// Validates and wraps a vertex list (sorted by id on the way in).
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Self> {
        vertices.sort_by_key(|v| v.id);
        if let Some(w) = vertices.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::Domain(format!("vertex {} declared twice", w[0].id)));
        }
        let ids: BTreeSet<usize> = vertices.iter().map(|v| v.id).collect();
        for v in &vertices {
            if v.inputs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Domain(format!("inputs of vertex {} are not sorted and distinct", v.id)));
            }
            if v.function.arity() != v.inputs.len() {
                return Err(Error::Arity {
                    expected: v.inputs.len(),
                    actual: v.function.arity(),
                });
            }
            for &u in &v.inputs {
                let external = v.control.external().binary_search(&u).is_ok();
                if ids.contains(&u) == external {
                    return Err(Error::Domain(format!(
                        "input {u} of vertex {} must be either internal or listed as external, not {}",
                        v.id,
                        if external { "both" } else { "neither" }
                    )));
                }
            }
            if v.control.external().iter().any(|u| v.inputs.binary_search(u).is_err()) {
                return Err(Error::Domain(format!("vertex {} lists an external input it does not read", v.id)));
            }
        }
        Ok(BooleanNetwork { vertices })
    }

    /// Plain network from names and `(inputs, function)` per vertex, with
    /// vertex `i` getting index `i`.
    pub fn from_rules(rules: Vec<(String, Vec<usize>, BoolFunc)>) -> Result<Self> {
        let vertices = rules
            .into_iter()
            .enumerate()
            .map(|(id, (name, inputs, function))| Vertex::new(id, name, inputs, function))
            .collect();
        Self::new(vertices)
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_ids(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.id).collect()
    }

    /// Rank of `id` among this network's vertices.
    pub fn position(&self, id: usize) -> Option<usize> {
        self.vertices.binary_search_by_key(&id, |v| v.id).ok()
    }

    pub fn vertex(&self, id: usize) -> Option<&Vertex> {
        self.position(id).map(|r| &self.vertices[r])
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.vertices.iter().find(|v| v.name == name).map(|v| v.id)
    }

    pub fn names(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.name.clone()).collect()
    }

    /// True when no vertex has external inputs.
    pub fn is_plain(&self) -> bool {
        self.vertices.iter().all(|v| v.control.is_empty())
    }

    pub fn interaction_graph(&self) -> InteractionGraph {
        let mut edges: Vec<(usize, usize)> = self
            .vertices
            .iter()
            .flat_map(|v| {
                v.inputs
                    .iter()
                    .filter(|&&u| self.position(u).is_some())
                    .map(move |&u| (u, v.id))
            })
            .collect();
        edges.sort_unstable();
        InteractionGraph {
            vertices: self.vertex_ids(),
            edges,
        }
    }

    /// `N[I]`: keeps the vertices of `subset` with their functions. Inputs
    /// leaving `subset` are only allowed if they are already external.
    pub fn induced(&self, subset: &[usize]) -> Result<BooleanNetwork> {
        let keep = self.check_subset(subset)?;
        let mut vertices = Vec::with_capacity(keep.len());
        for &id in &keep {
            let v = self.vertex(id).expect("checked subset");
            for &u in &v.inputs {
                if keep.binary_search(&u).is_err() && v.control.external().binary_search(&u).is_err() {
                    return Err(Error::DanglingInput { vertex: id, input: u });
                }
            }
            vertices.push(v.clone());
        }
        Ok(BooleanNetwork { vertices })
    }

    /// `N(I, a)`: the network on `V ∖ I` whose transitions are the edge union
    /// of the cofactored networks `N(I, x)` for `x ∈ a`.
    ///
    /// Each downstream vertex reads its `I`-inputs from the projection of `a`
    /// onto `G⁻(v) ∩ I`. Coordinates that are constant over the resulting
    /// control set are cofactored into the function, so `|a| = 1` gives the
    /// plain network `N(I, x)`.
    pub fn controlled_restrict(&self, upstream: &[usize], admissible: &[GlobalState]) -> Result<BooleanNetwork> {
        let upstream = self.check_subset(upstream)?;
        if admissible.is_empty() {
            return Err(Error::Domain("the controlling set must not be empty".into()));
        }
        if let Some(x) = admissible.iter().find(|x| x.vertices() != upstream.as_slice()) {
            return Err(Error::Domain(format!(
                "controlling state over {:?}, expected {:?}",
                x.vertices(),
                upstream
            )));
        }
        for &id in &upstream {
            let v = self.vertex(id).expect("checked subset");
            if let Some(&u) = v
                .inputs
                .iter()
                .find(|&&u| self.position(u).is_some() && upstream.binary_search(&u).is_err())
            {
                return Err(Error::Decomposition { from: u, to: id });
            }
        }
        let mut vertices = Vec::with_capacity(self.dimension() - upstream.len());
        for v in self.vertices.iter().filter(|v| upstream.binary_search(&v.id).is_err()) {
            let controlled: Vec<usize> = v
                .inputs
                .iter()
                .copied()
                .filter(|u| upstream.binary_search(u).is_ok())
                .collect();
            if controlled.is_empty() {
                vertices.push(v.clone());
                continue;
            }
            let projection: BTreeSet<Vec<bool>> = admissible
                .iter()
                .map(|x| controlled.iter().map(|&u| x.get(u).expect("state covers I")).collect())
                .collect();
            let group = ControlGroup {
                inputs: controlled,
                values: projection.into_iter().collect(),
            };
            vertices.push(attach_controls(v, &[group], usize::MAX)?);
        }
        Ok(BooleanNetwork { vertices })
    }

    /// Pointwise comparison: same vertices, inputs and control sets, and
    /// functions equal on every input.
    pub fn equivalent(&self, other: &BooleanNetwork) -> Result<bool> {
        if self.dimension() != other.dimension() {
            return Ok(false);
        }
        for (a, b) in self.vertices.iter().zip(&other.vertices) {
            if a.id != b.id || a.name != b.name || a.inputs != b.inputs || a.control != b.control {
                return Ok(false);
            }
            if !a.function.equivalent(&b.function)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&bad) = s.iter().find(|&&v| self.position(v).is_none()) {
            return Err(Error::UnknownVertex(bad));
        }
        Ok(s)
    }

    /// Model-file text: a `targets, factors` header and one rule per vertex
    /// in index order. Only plain networks can be written.
    pub fn serialize(&self) -> Result<String> {
        if !self.is_plain() {
            return Err(Error::Domain("controlled networks have no model-file form".into()));
        }
        let mut out = String::from("targets, factors\n");
        for v in &self.vertices {
            let names = |i: usize| self.vertex(v.inputs[i]).expect("plain network").name.clone();
            out.push_str(&v.name);
            out.push_str(", ");
            v.function
                .to_expr()
                .write_with(&mut out, &names)
                .expect("writing to a String");
            out.push('\n');
        }
        Ok(out)
    }
}

/// Inputs of one vertex that share a source, with the values they may take.
pub(crate) struct ControlGroup {
    pub inputs: Vec<usize>,
    pub values: Vec<Vec<bool>>,
}

/// Adds control groups to `v` and canonicalizes: the combined control set is
/// the product of the existing one with every group, and coordinates that are
/// constant across it are cofactored away.
pub(crate) fn attach_controls(v: &Vertex, groups: &[ControlGroup], cap: usize) -> Result<Vertex> {
    let mut external: Vec<usize> = v.control.external().to_vec();
    for g in groups {
        external.extend(&g.inputs);
    }
    external.sort_unstable();
    if external.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain(format!("vertex {} is controlled twice through the same input", v.id)));
    }

    let mut size: u128 = v.control.len() as u128;
    for g in groups {
        size = size.saturating_mul(g.values.len() as u128);
    }
    if size > cap as u128 {
        return Err(Error::capacity(
            format!("admissible control assignments of vertex {} ({})", v.id, v.name),
            cap,
            size,
        ));
    }

    let slot = |u: usize| external.binary_search(&u).expect("collected above");
    let mut combined: Vec<Vec<bool>> = Vec::new();
    for z in v.control.admissible() {
        let mut base = vec![false; external.len()];
        for (k, &u) in v.control.external().iter().enumerate() {
            base[slot(u)] = z[k];
        }
        combined.push(base);
    }
    for g in groups {
        let slots: Vec<usize> = g.inputs.iter().map(|&u| slot(u)).collect();
        let mut next = Vec::with_capacity(combined.len() * g.values.len());
        for base in &combined {
            for val in &g.values {
                let mut z = base.clone();
                for (k, &s) in slots.iter().enumerate() {
                    z[s] = val[k];
                }
                next.push(z);
            }
        }
        combined = next;
    }
    canonical_vertex(v, external, combined)
}

fn canonical_vertex(v: &Vertex, external: Vec<usize>, admissible: Vec<Vec<bool>>) -> Result<Vertex> {
    let constant: Vec<Option<bool>> = (0..external.len())
        .map(|k| {
            let first = admissible[0][k];
            admissible.iter().all(|z| z[k] == first).then_some(first)
        })
        .collect();
    let fixed: Vec<(usize, bool)> = external
        .iter()
        .zip(&constant)
        .filter_map(|(&u, c)| c.map(|b| (v.inputs.binary_search(&u).expect("external is an input"), b)))
        .collect();
    let function = if fixed.is_empty() {
        v.function.clone()
    } else {
        v.function.cofactor(&fixed)?
    };
    let dropped: BTreeSet<usize> = external
        .iter()
        .zip(&constant)
        .filter(|(_, c)| c.is_some())
        .map(|(&u, _)| u)
        .collect();
    let inputs = v.inputs.iter().copied().filter(|u| !dropped.contains(u)).collect();
    let kept: Vec<usize> = (0..external.len()).filter(|&k| constant[k].is_none()).collect();
    let control = ControlSet::new(
        kept.iter().map(|&k| external[k]).collect(),
        admissible
            .iter()
            .map(|z| kept.iter().map(|&k| z[k]).collect())
            .collect(),
    )?;
    Ok(Vertex {
        id: v.id,
        name: v.name.clone(),
        inputs,
        function,
        control,
    })
}

/// Parses the `target, expression` model format.
///
/// Vertices are numbered by the order of their rule lines. `#` starts a
/// comment; a leading `targets, factors` header is skipped; a rule with an
/// empty expression declares an input and is read as `X, X`. The comment
/// directive `#!numbered` switches integer literals to vertex aliases
/// (`k` is the `k`-th rule), in which case `0` and `1` are no longer
/// constants.
pub fn parse_network(text: &str) -> Result<BooleanNetwork> {
    let mut numbered = false;
    let mut rules: Vec<(usize, String, &str)> = Vec::new();
    let mut seen_rule = false;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let trimmed = raw.trim();
        if let Some(directive) = trimmed.strip_prefix("#!") {
            match directive.trim() {
                "numbered" => numbered = true,
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown directive '{other}'"),
                    })
                }
            }
            continue;
        }
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((target, expr)) = content.split_once(',') else {
            return Err(Error::Parse {
                line: line_no,
                message: "expected 'target, expression'".into(),
            });
        };
        let target = target.trim();
        if !seen_rule && target.eq_ignore_ascii_case("targets") && expr.trim().eq_ignore_ascii_case("factors") {
            seen_rule = true;
            continue;
        }
        seen_rule = true;
        if !is_identifier(target) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("'{target}' is not a valid identifier"),
            });
        }
        if let Some((first, _, _)) = rules.iter().find(|(_, t, _)| t == target) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate rule for '{target}' (first defined on line {first})"),
            });
        }
        rules.push((line_no, target.to_string(), expr.trim()));
    }
    if rules.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "the model contains no rules".into(),
        });
    }

    let index: BTreeMap<&str, usize> = rules.iter().enumerate().map(|(i, (_, t, _))| (t.as_str(), i)).collect();
    let mut vertices = Vec::with_capacity(rules.len());
    for (id, (line, target, text)) in rules.iter().enumerate() {
        let (expr, symbols) = if text.is_empty() {
            (BoolExpr::var(0), vec![Symbol::Name(target.clone())])
        } else {
            let parsed = boolfunc::parse_with_mode(text, numbered).map_err(|message| Error::Parse { line: *line, message })?;
            (parsed.expr, parsed.symbols)
        };
        let refs = symbols
            .iter()
            .map(|s| match s {
                Symbol::Name(n) => index.get(n.as_str()).copied().ok_or_else(|| Error::Parse {
                    line: *line,
                    message: format!("undeclared variable '{n}'"),
                }),
                Symbol::Alias(a) if *a < rules.len() => Ok(*a),
                Symbol::Alias(a) => Err(Error::Parse {
                    line: *line,
                    message: format!("vertex alias {a} is out of range"),
                }),
            })
            .collect::<Result<Vec<usize>>>()?;
        let mut inputs = refs.clone();
        inputs.sort_unstable();
        inputs.dedup();
        let expr = expr.remap(&|i| inputs.binary_search(&refs[i]).expect("collected above"));
        let function = BoolFunc::from_expr(inputs.len(), expr)?;
        vertices.push(Vertex::new(id, target.clone(), inputs, function));
    }
    BooleanNetwork::new(vertices)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Renders a state as `name=bit` pairs, for diagnostics.
pub fn describe_state(net: &BooleanNetwork, x: &GlobalState) -> String {
    let mut s = String::new();
    for (&v, &b) in x.vertices().iter().zip(x.bits()) {
        if !s.is_empty() {
            s.push(' ');
        }
        let name = net.vertex(v).map_or_else(|| v.to_string(), |vx| vx.name.clone());
        let _ = write!(s, "{name}={}", u8::from(b));
    }
    s
}
