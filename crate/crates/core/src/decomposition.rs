//! Strong modules, the condensation DAG, and ordered vertex partitions with
//! no backward edges.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use serde_json::json;

use crate::error::{Error, Result};
use crate::network::{BooleanNetwork, GlobalState, InteractionGraph};

/// Strongly connected components of a graph and the DAG between them.
///
/// Modules are sorted by their smallest vertex, so module `i` is also the
/// `i`-th module in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condensation {
    pub modules: Vec<Vec<usize>>,
    /// Module-index edges, deduplicated and sorted, without self-loops.
    pub dag: Vec<(usize, usize)>,
    /// Linear extension: among ready modules, the one with the smallest
    /// vertex goes first.
    pub topo_order: Vec<usize>,
}

impl Condensation {
    pub fn module_of(&self, vertex: usize) -> Option<usize> {
        self.modules.iter().position(|m| m.binary_search(&vertex).is_ok())
    }

    /// The modules in `topo_order`.
    pub fn to_generalized_decomposition(&self) -> GeneralizedDecomposition {
        GeneralizedDecomposition {
            parts: self.topo_order.iter().map(|&i| self.modules[i].clone()).collect(),
        }
    }

    /// `{modules: [[names]], edges: [[i, j]], order: [..]}` with module
    /// indices referring to `modules`.
    pub fn to_json(&self, net: &BooleanNetwork) -> serde_json::Value {
        json!({
            "modules": self.named_modules(net),
            "edges": self.dag.iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
            "order": self.topo_order,
        })
    }

    pub fn to_dot(&self, net: &BooleanNetwork) -> String {
        let mut s = String::from("digraph condensation {\n");
        for (i, names) in self.named_modules(net).iter().enumerate() {
            let _ = writeln!(s, "  m{i} [label=\"{}\"];", names.join(", "));
        }
        for &(i, j) in &self.dag {
            let _ = writeln!(s, "  m{i} -> m{j};");
        }
        s.push_str("}\n");
        s
    }

    fn named_modules(&self, net: &BooleanNetwork) -> Vec<Vec<String>> {
        self.modules.iter().map(|m| names(net, m)).collect()
    }
}

pub(crate) fn names(net: &BooleanNetwork, vertices: &[usize]) -> Vec<String> {
    vertices
        .iter()
        .map(|&v| net.vertex(v).map_or_else(|| v.to_string(), |x| x.name.clone()))
        .collect()
}

/// Ordered parts `I_1, …, I_k`, each a sorted vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedDecomposition {
    pub parts: Vec<Vec<usize>>,
}

impl GeneralizedDecomposition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// SCCs via an iterative Tarjan, condensed and ordered.
pub fn strong_modules(g: &InteractionGraph) -> Condensation {
    let n = g.vertices.len();
    let rank = |v: usize| g.vertices.binary_search(&v).expect("edge endpoints are vertices");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &g.edges {
        adj[rank(u)].push(rank(v));
    }

    let mut comp = vec![usize::MAX; n];
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut frames = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut cursor)) = frames.last_mut() {
            if let Some(&w) = adj[v].get(*cursor) {
                *cursor += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(p, _)) = frames.last() {
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("v is on the stack");
                    on_stack[w] = false;
                    members.push(g.vertices[w]);
                    if w == v {
                        break;
                    }
                }
                members.sort_unstable();
                components.push(members);
            }
        }
    }
    components.sort();
    for (i, m) in components.iter().enumerate() {
        for &v in m {
            comp[rank(v)] = i;
        }
    }

    let dag: Vec<(usize, usize)> = g
        .edges
        .iter()
        .map(|&(u, v)| (comp[rank(u)], comp[rank(v)]))
        .filter(|(a, b)| a != b)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let k = components.len();
    let mut indegree = vec![0usize; k];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(a, b) in &dag {
        indegree[b] += 1;
        out[a].push(b);
    }
    // Module index order is smallest-vertex order.
    let mut ready: BinaryHeap<Reverse<usize>> = (0..k).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut topo_order = Vec::with_capacity(k);
    while let Some(Reverse(i)) = ready.pop() {
        topo_order.push(i);
        for &j in &out[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    Condensation {
        modules: components,
        dag,
        topo_order,
    }
}

/// The strong-module decomposition of a network.
pub fn default_decomposition(net: &BooleanNetwork) -> GeneralizedDecomposition {
    strong_modules(&net.interaction_graph()).to_generalized_decomposition()
}

/// Checks that `parts` partition the vertices and that no edge points from
/// a later part to an earlier one. A path can only run backwards if one of
/// its edges does, so the per-edge check decides the path condition. The
/// first backward edge in lexicographic order is reported.
pub fn validate_decomposition(net: &BooleanNetwork, parts: &[Vec<usize>]) -> Result<GeneralizedDecomposition> {
    let ids = net.vertex_ids();
    let mut part_of = vec![usize::MAX; ids.len()];
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Partition(format!("part {i} is empty")));
        }
        for &v in part {
            let r = net.position(v).ok_or_else(|| Error::Partition(format!("vertex {v} is not in the network")))?;
            if part_of[r] != usize::MAX {
                return Err(Error::Partition(format!("vertex {v} appears in more than one place")));
            }
            part_of[r] = i;
        }
    }
    if let Some(r) = part_of.iter().position(|&p| p == usize::MAX) {
        return Err(Error::Partition(format!("vertex {} is not covered", ids[r])));
    }
    for (u, v) in net.interaction_graph().edges {
        let (pu, pv) = (part_of[net.position(u).unwrap()], part_of[net.position(v).unwrap()]);
        if pu > pv {
            return Err(Error::Decomposition { from: u, to: v });
        }
    }
    Ok(GeneralizedDecomposition {
        parts: parts
            .iter()
            .map(|p| {
                let mut p = p.clone();
                p.sort_unstable();
                p
            })
            .collect(),
    })
}

/// The induced networks `N_1, …, N_k` of a decomposition under control:
/// `R_1 = N`, `R_{j+1} = R_j(I_j, a_j)` and `N_j = R_j[I_j]`.
///
/// `controls[j]` is the admissible set `a_j` over `I_j`; entries beyond
/// `k - 1` are not needed and may be omitted.
pub fn induced_sequence(
    net: &BooleanNetwork,
    parts: &[Vec<usize>],
    controls: &[Vec<GlobalState>],
) -> Result<Vec<BooleanNetwork>> {
    let d = validate_decomposition(net, parts)?;
    if controls.len() + 1 < d.len() {
        return Err(Error::Domain(format!(
            "{} parts need at least {} control sets, got {}",
            d.len(),
            d.len() - 1,
            controls.len()
        )));
    }
    let mut rest = net.clone();
    let mut out = Vec::with_capacity(d.len());
    for (j, part) in d.parts.iter().enumerate() {
        out.push(rest.induced(part)?);
        if j + 1 < d.len() {
            rest = rest.controlled_restrict(part, &controls[j])?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CommutativityReport {
    pub swapped_parts: Vec<Vec<usize>>,
    pub original: Vec<BooleanNetwork>,
    pub swapped: Vec<BooleanNetwork>,
    /// `N_i = N'_{i+1}`, `N_{i+1} = N'_i`, all others unchanged.
    pub equal: bool,
}

/// Swaps parts `i` and `i + 1` (0-based) together with their controls and
/// compares the induced sequences. Requires that no edge goes from part `i`
/// to part `i + 1`, and one control set per part (the last one only matters
/// when it moves forward).
pub fn commutativity_witness(
    net: &BooleanNetwork,
    parts: &[Vec<usize>],
    i: usize,
    controls: &[Vec<GlobalState>],
) -> Result<CommutativityReport> {
    let d = validate_decomposition(net, parts)?;
    if i + 1 >= d.len() {
        return Err(Error::Precondition(format!("no part follows part {i}")));
    }
    if controls.len() != d.len() {
        return Err(Error::Domain(format!("expected {} control sets, got {}", d.len(), controls.len())));
    }
    let (a, b) = (&d.parts[i], &d.parts[i + 1]);
    if let Some((u, v)) = net
        .interaction_graph()
        .edges
        .into_iter()
        .find(|(u, v)| a.binary_search(u).is_ok() && b.binary_search(v).is_ok())
    {
        return Err(Error::Precondition(format!("edge {u} -> {v} joins the parts to swap")));
    }
    let original = induced_sequence(net, &d.parts, controls)?;
    let mut swapped_parts = d.parts.clone();
    swapped_parts.swap(i, i + 1);
    let mut swapped_controls = controls.to_vec();
    swapped_controls.swap(i, i + 1);
    let swapped = induced_sequence(net, &swapped_parts, &swapped_controls)?;
    let mut equal = true;
    for (j, net_j) in original.iter().enumerate() {
        let k = if j == i {
            i + 1
        } else if j == i + 1 {
            i
        } else {
            j
        };
        equal &= net_j.equivalent(&swapped[k])?;
    }
    Ok(CommutativityReport {
        swapped_parts,
        original,
        swapped,
        equal,
    })
}
