//! Modular attractor computation over an ordered decomposition.
//!
//! For parts `I_1, …, I_k`, the attractors of `N` are exactly the products
//! `a_1 × ⋯ × a_k` where each `a_i` is an attractor of the module network
//! on `I_i` controlled by `a_1, …, a_{i-1}`. The tree of these choices is
//! built depth-first; each leaf is one global attractor in factored form.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde_json::{json, Value};

use crate::astg::{attractors, build_astg, StateSet};
use crate::decomposition::{default_decomposition, names, validate_decomposition, GeneralizedDecomposition};
use crate::error::{Error, Result};
use crate::network::{attach_controls, BooleanNetwork, ControlGroup, GlobalState};

pub const DEFAULT_MAX_MODULE: usize = 24;
pub const DEFAULT_MAX_CONTROL: usize = 1 << 16;
pub const DEFAULT_MAX_EXPAND: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest part dimension whose state graph is built.
    pub max_module: usize,
    /// Largest admissible control set per vertex.
    pub max_control: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_module: DEFAULT_MAX_MODULE,
            max_control: DEFAULT_MAX_CONTROL,
        }
    }
}

/// The module network on `parts[i]` controlled by `prefix[j]` over
/// `parts[j]` for every `j < i`.
///
/// Each vertex `v` gets the admissible set `∏_j π_{G⁻(v) ∩ I_j}(a_j)`
/// directly; no global product of the prefix is formed.
pub fn controlled_module(
    net: &BooleanNetwork,
    parts: &[Vec<usize>],
    prefix: &[StateSet],
    i: usize,
    cfg: &EngineConfig,
) -> Result<BooleanNetwork> {
    if i >= parts.len() || prefix.len() != i {
        return Err(Error::Domain(format!(
            "module {i} needs {i} prefix attractors over {} parts, got {}",
            parts.len(),
            prefix.len()
        )));
    }
    for (j, a) in prefix.iter().enumerate() {
        let mut part = parts[j].clone();
        part.sort_unstable();
        if a.vertices() != part.as_slice() {
            return Err(Error::Domain(format!("prefix attractor {j} is not over part {j}")));
        }
    }
    let mut vertices = Vec::with_capacity(parts[i].len());
    for &id in &parts[i] {
        let v = net.vertex(id).ok_or(Error::UnknownVertex(id))?;
        let mut groups = Vec::new();
        for a in prefix {
            let inputs: Vec<usize> = v.inputs.iter().copied().filter(|u| a.vertices().binary_search(u).is_ok()).collect();
            if inputs.is_empty() {
                continue;
            }
            let projection = a.project(&inputs)?;
            let values = projection.states().iter().map(|x| x.bits().to_vec()).collect();
            groups.push(ControlGroup { inputs, values });
        }
        vertices.push(attach_controls(v, &groups, cfg.max_control)?);
    }
    BooleanNetwork::new(vertices)
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    /// Part index, 0-based.
    pub depth: usize,
    pub attractor: StateSet,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Dependent-sum tree of module attractors.
#[derive(Clone, Debug)]
pub struct AttractorTree {
    pub decomposition: GeneralizedDecomposition,
    nodes: Vec<TreeNode>,
    roots: Vec<usize>,
}

/// Builds the tree over `parts`, or over the strong-module decomposition
/// when `parts` is `None`. The decomposition is validated first.
pub fn attractor_tree(net: &BooleanNetwork, parts: Option<&[Vec<usize>]>, cfg: &EngineConfig) -> Result<AttractorTree> {
    let decomposition = match parts {
        Some(p) => validate_decomposition(net, p)?,
        None => default_decomposition(net),
    };
    if let Some(p) = decomposition.parts.iter().find(|p| p.len() > cfg.max_module) {
        return Err(Error::capacity(
            format!("dimension of module {:?}", names(net, p)),
            cfg.max_module,
            p.len(),
        ));
    }
    let parts = &decomposition.parts;
    let k = parts.len();

    // Inputs of each part coming from each earlier part; only these
    // projections of the prefix affect the controlled module.
    let feeds: Vec<Vec<(usize, Vec<usize>)>> = (0..k)
        .map(|i| {
            (0..i)
                .filter_map(|j| {
                    let inputs: Vec<usize> = parts[i]
                        .iter()
                        .flat_map(|&v| net.vertex(v).expect("validated").inputs.iter().copied())
                        .filter(|u| parts[j].binary_search(u).is_ok())
                        .collect::<std::collections::BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    (!inputs.is_empty()).then_some((j, inputs))
                })
                .collect()
        })
        .collect();

    let mut memo: HashMap<(usize, Vec<StateSet>), Arc<Vec<StateSet>>> = HashMap::new();
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut roots = Vec::new();
    if k == 0 {
        return Ok(AttractorTree {
            decomposition,
            nodes,
            roots,
        });
    }

    let mut module_attractors = |i: usize, prefix: &[StateSet], path: &[usize]| -> Result<Arc<Vec<StateSet>>> {
        let key: Vec<StateSet> = feeds[i]
            .iter()
            .map(|(j, inputs)| prefix[*j].project(inputs))
            .collect::<Result<_>>()?;
        if let Some(hit) = memo.get(&(i, key.clone())) {
            return Ok(hit.clone());
        }
        let computed = controlled_module(net, parts, prefix, i, cfg)
            .and_then(|m| build_astg(&m, cfg.max_module))
            .map(|g| Arc::new(attractors(&g).attractors))
            .map_err(|e| annotate(e, i, path))?;
        memo.insert((i, key), computed.clone());
        Ok(computed)
    };

    for a in module_attractors(0, &[], &[])?.iter() {
        nodes.push(TreeNode {
            depth: 0,
            attractor: a.clone(),
            parent: None,
            children: Vec::new(),
        });
        roots.push(nodes.len() - 1);
    }
    // Each stack entry is a node whose children are still to be built.
    let mut stack: Vec<usize> = roots.iter().rev().copied().collect();
    while let Some(id) = stack.pop() {
        let depth = nodes[id].depth;
        if depth + 1 == k {
            continue;
        }
        let chain = ancestry(&nodes, id);
        let prefix: Vec<StateSet> = chain.iter().map(|&n| nodes[n].attractor.clone()).collect();
        let path: Vec<usize> = chain.iter().map(|&n| sibling_index(&nodes, &roots, n)).collect();
        let children = module_attractors(depth + 1, &prefix, &path)?;
        let mut ids = Vec::with_capacity(children.len());
        for a in children.iter() {
            nodes.push(TreeNode {
                depth: depth + 1,
                attractor: a.clone(),
                parent: Some(id),
                children: Vec::new(),
            });
            ids.push(nodes.len() - 1);
        }
        nodes[id].children = ids.clone();
        stack.extend(ids.into_iter().rev());
    }
    Ok(AttractorTree {
        decomposition,
        nodes,
        roots,
    })
}

fn ancestry(nodes: &[TreeNode], mut id: usize) -> Vec<usize> {
    let mut chain = vec![id];
    while let Some(p) = nodes[id].parent {
        chain.push(p);
        id = p;
    }
    chain.reverse();
    chain
}

fn sibling_index(nodes: &[TreeNode], roots: &[usize], id: usize) -> usize {
    let siblings = match nodes[id].parent {
        Some(p) => &nodes[p].children,
        None => roots,
    };
    siblings.iter().position(|&s| s == id).unwrap_or(0)
}

fn annotate(e: Error, module: usize, path: &[usize]) -> Error {
    match e {
        Error::Capacity { what, limit, actual } => Error::Capacity {
            what: format!("{what}, in module {module} under attractor path {path:?}"),
            limit,
            actual,
        },
        other => other,
    }
}

impl AttractorTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Attractors on the path from the first part down to `node`.
    pub fn prefix(&self, node: usize) -> Vec<StateSet> {
        ancestry(&self.nodes, node)
            .into_iter()
            .map(|n| self.nodes[n].attractor.clone())
            .collect()
    }

    /// One product per root-to-leaf path, in tree order.
    pub fn leaves(&self) -> Vec<FactorizedAttractor> {
        let k = self.decomposition.len();
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.roots.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.depth + 1 == k {
                out.push(FactorizedAttractor { factors: self.prefix(id) });
            } else {
                stack.extend(node.children.iter().rev());
            }
        }
        out
    }
}

/// A global attractor as a product of per-part state sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizedAttractor {
    pub factors: Vec<StateSet>,
}

impl FactorizedAttractor {
    pub fn count_states(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, f| acc * BigUint::from(f.len()))
    }

    pub fn is_fixed_point(&self) -> bool {
        self.factors.iter().all(|f| f.len() == 1)
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.factors.iter().flat_map(|f| f.vertices().iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// True when every restriction `x↾I_i` lies in the `i`-th factor.
    pub fn contains(&self, x: &GlobalState) -> Result<bool> {
        for f in &self.factors {
            if !f.contains(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Explicit states of the product, sorted.
    pub fn expand(&self, cap: u64) -> Result<Vec<GlobalState>> {
        let count = self.count_states();
        if count > BigUint::from(cap) {
            return Err(Error::capacity("attractor expansion size", cap, count));
        }
        let mut states: Vec<GlobalState> = vec![GlobalState::new(Vec::new(), Vec::new())?];
        for f in &self.factors {
            let factor_states = f.states();
            let mut next = Vec::with_capacity(states.len() * factor_states.len());
            for s in &states {
                for t in &factor_states {
                    next.push(s.merge(t)?);
                }
            }
            states = next;
        }
        states.sort();
        Ok(states)
    }

    /// Expansion as packed states over all vertices.
    pub fn to_state_set(&self, cap: u64) -> Result<StateSet> {
        let vertices = self.vertices();
        let states = self.expand(cap)?;
        let packed = states.iter().map(GlobalState::packed).collect::<Result<Vec<_>>>()?;
        StateSet::new(vertices, packed)
    }
}

/// Convenience: the factored attractors of `net` over its strong modules.
pub fn modular_attractors(net: &BooleanNetwork, cfg: &EngineConfig) -> Result<Vec<FactorizedAttractor>> {
    Ok(attractor_tree(net, None, cfg)?.leaves())
}

fn bit_rows(states: &[GlobalState]) -> Vec<Vec<u8>> {
    states.iter().map(|x| x.bits().iter().map(|&b| u8::from(b)).collect()).collect()
}

/// JSON report of a tree's leaves. With `expand`, every attractor also
/// lists its explicit states; an attractor larger than the cap is an error.
pub fn report_json(net: &BooleanNetwork, tree: &AttractorTree, expand: Option<u64>) -> Result<Value> {
    let mut attractors = Vec::new();
    for leaf in tree.leaves() {
        let factors: Vec<Value> = leaf
            .factors
            .iter()
            .map(|f| {
                json!({
                    "module": names(net, f.vertices()),
                    "states": bit_rows(&f.states()),
                })
            })
            .collect();
        let mut entry = json!({
            "factors": factors,
            "state_count": leaf.count_states().to_string(),
            "fixed_point": leaf.is_fixed_point(),
        });
        if let Some(cap) = expand {
            entry["expanded"] = json!(bit_rows(&leaf.expand(cap)?));
        }
        attractors.push(entry);
    }
    Ok(json!({
        "decomposition": tree.decomposition.parts.iter().map(|p| names(net, p)).collect::<Vec<_>>(),
        "attractors": attractors,
    }))
}
