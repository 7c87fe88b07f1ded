#![allow(dead_code)]

use modattr::bench::{generate, GeneratorConfig, Regime};
use modattr::boolfunc::{BoolFunc, TruthTable};
use modattr::network::{BooleanNetwork, GlobalState, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_table(arity: usize, rng: &mut ChaCha8Rng) -> BoolFunc {
    let bits: Vec<bool> = (0..1usize << arity).map(|_| rng.gen_bool(0.5)).collect();
    BoolFunc::Table(TruthTable::from_bits(arity, &bits).unwrap())
}

/// Network with a Hamiltonian cycle through every vertex, so a single
/// strong module, plus random extra edges and random tables.
pub fn single_scc(n: usize, seed: u64) -> BooleanNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = (0..n)
        .map(|v| {
            let mut inputs = vec![(v + n - 1) % n];
            for u in 0..n {
                if u != inputs[0] && rng.gen_bool(0.25) {
                    inputs.push(u);
                }
            }
            inputs.truncate(4);
            inputs.sort_unstable();
            inputs.dedup();
            let f = random_table(inputs.len(), &mut rng);
            Vertex::new(v, format!("s{v}"), inputs, f)
        })
        .collect();
    BooleanNetwork::new(vertices).unwrap()
}

/// Layers of the given sizes; vertices read from their own and earlier
/// layers only, with at most `max_in` inputs. With `skip` set, the layer
/// at that index does not feed the next one.
pub fn layered(sizes: &[usize], max_in: usize, skip: Option<usize>, seed: u64) -> (BooleanNetwork, Vec<Vec<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::new();
    let mut next = 0;
    for &s in sizes {
        parts.push((next..next + s).collect::<Vec<usize>>());
        next += s;
    }
    let mut vertices = Vec::new();
    for (li, part) in parts.iter().enumerate() {
        for &v in part {
            let mut pool: Vec<usize> = (0..part[0] + part.len()).collect();
            if let Some(s) = skip {
                if li == s + 1 {
                    pool.retain(|u| !parts[s].contains(u));
                }
            }
            let mut inputs: Vec<usize> = pool.into_iter().filter(|_| rng.gen_bool(0.4)).collect();
            while inputs.len() > max_in {
                inputs.remove(rng.gen_range(0..inputs.len()));
            }
            let f = random_table(inputs.len(), &mut rng);
            vertices.push(Vertex::new(v, format!("v{v}"), inputs, f));
        }
    }
    (BooleanNetwork::new(vertices).unwrap(), parts)
}

/// Mixed corpus with `n ≤ 12`: acyclic, layered, nested canalizing and
/// single-module networks.
pub fn corpus(count: usize, seed: u64) -> Vec<(String, BooleanNetwork)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let s = rng.gen::<u64>();
            match i % 4 {
                0 => {
                    let n = rng.gen_range(2..=10);
                    let cfg = GeneratorConfig { n, module_bound: 1, degree_bound: 3, regime: Regime::SparseRandom, seed: s };
                    (format!("acyclic n={n} seed={s}"), generate(&cfg).unwrap())
                }
                1 => {
                    let n = rng.gen_range(4..=12);
                    let cfg = GeneratorConfig { n, module_bound: 4, degree_bound: 3, regime: Regime::SparseRandom, seed: s };
                    (format!("layered n={n} seed={s}"), generate(&cfg).unwrap())
                }
                2 => {
                    let n = rng.gen_range(4..=12);
                    let cfg = GeneratorConfig { n, module_bound: 4, degree_bound: 4, regime: Regime::NestedCanalizing, seed: s };
                    (format!("nc n={n} seed={s}"), generate(&cfg).unwrap())
                }
                _ => {
                    let n = rng.gen_range(2..=9);
                    (format!("single-scc n={n} seed={s}"), single_scc(n, s))
                }
            }
        })
        .collect()
}

pub fn state(vertices: &[usize], packed: u64) -> GlobalState {
    GlobalState::from_packed(vertices.to_vec().into(), packed)
}
