//! Random networks with bounded strong modules, and timing runs.

use std::io;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfunc::{BoolExpr, BoolFunc, Layer, NestedCanalizingForm};
use crate::decomposition::strong_modules;
use crate::engine::{attractor_tree, EngineConfig};
use crate::error::{Error, Result};
use crate::network::{BooleanNetwork, Vertex};
use crate::oracle::{oracle_attractors, DEFAULT_ORACLE_DIMENSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Read-once random formulas over at most `d` inputs per vertex.
    SparseRandom,
    /// Random nested canalizing cascades over at most `d` inputs per vertex.
    NestedCanalizing,
    /// Stacked 2-cycles alternating negative and positive, each layer fed
    /// by the previous one through an AND.
    Chain,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Regime> {
        match s {
            "sparse" | "sparse-random" => Ok(Regime::SparseRandom),
            "nc" | "nested-canalizing" => Ok(Regime::NestedCanalizing),
            "chain" => Ok(Regime::Chain),
            other => Err(Error::Config(format!("unknown regime '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub module_bound: usize,
    pub degree_bound: usize,
    pub regime: Regime,
    pub seed: u64,
}

pub fn generate(cfg: &GeneratorConfig) -> Result<BooleanNetwork> {
    if cfg.n == 0 {
        return Err(Error::Config("n must be positive".into()));
    }
    if cfg.module_bound == 0 {
        return Err(Error::Config("module bound must be positive".into()));
    }
    match cfg.regime {
        Regime::Chain => chain(cfg),
        Regime::SparseRandom | Regime::NestedCanalizing => random_modular(cfg),
    }
}

fn chain(cfg: &GeneratorConfig) -> Result<BooleanNetwork> {
    if !cfg.n.is_multiple_of(2) {
        return Err(Error::Config(format!("chain needs an even n, got {}", cfg.n)));
    }
    if cfg.module_bound < 2 || cfg.degree_bound < 2 {
        return Err(Error::Config("chain layers are 2-cycles with in-degree 2: need c >= 2 and d >= 2".into()));
    }
    let var = BoolExpr::var;
    let mut rules = Vec::with_capacity(cfg.n);
    // Vertex 2l is x_{2l+1}, vertex 2l+1 is x_{2l+2}.
    rules.push(("x1".to_string(), vec![1], BoolFunc::from_expr(1, var(0))?));
    rules.push(("x2".to_string(), vec![0], BoolFunc::from_expr(1, var(0))?));
    for l in 1..cfg.n / 2 {
        let (a, b) = (2 * l, 2 * l + 1);
        rules.push((format!("x{}", a + 1), vec![a - 2, b], BoolFunc::from_expr(2, BoolExpr::and([var(0), var(1)]))?));
        let back = if l % 2 == 1 { BoolExpr::not(var(0)) } else { var(0) };
        rules.push((format!("x{}", b + 1), vec![a], BoolFunc::from_expr(1, back)?));
    }
    BooleanNetwork::from_rules(rules)
}

fn random_modular(cfg: &GeneratorConfig) -> Result<BooleanNetwork> {
    let (n, c, d) = (cfg.n, cfg.module_bound, cfg.degree_bound);
    if d == 0 && c >= 2 {
        return Err(Error::Config("modules larger than 1 need in-degree at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut modules: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    while next < n {
        let size = rng.gen_range(1..=c).min(n - next);
        modules.push((next..next + size).collect());
        next += size;
    }

    // Inputs per structural vertex; modules come in topological order.
    let mut inputs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for m in &modules {
        if m.len() == 1 {
            if d >= 1 && rng.gen_bool(0.5) {
                inputs[m[0]].push(m[0]);
            }
        } else {
            let mut cycle = m.clone();
            cycle.shuffle(&mut rng);
            for k in 0..cycle.len() {
                inputs[cycle[(k + 1) % cycle.len()]].push(cycle[k]);
            }
        }
    }
    for m in &modules {
        let earlier = m[0];
        for &v in m {
            let room = d - inputs[v].len();
            let extra_internal = rng.gen_range(0..=room.min(m.len()));
            for _ in 0..extra_internal {
                let u = m[rng.gen_range(0..m.len())];
                if !inputs[v].contains(&u) {
                    inputs[v].push(u);
                }
            }
            if earlier > 0 {
                let room = d - inputs[v].len();
                let cross = rng.gen_range(0..=room.min(2));
                for _ in 0..cross {
                    let u = rng.gen_range(0..earlier);
                    if !inputs[v].contains(&u) {
                        inputs[v].push(u);
                    }
                }
            }
        }
    }

    let mut relabel: Vec<usize> = (0..n).collect();
    relabel.shuffle(&mut rng);
    let mut vertices = Vec::with_capacity(n);
    for s in 0..n {
        let mut ins: Vec<usize> = inputs[s].iter().map(|&u| relabel[u]).collect();
        ins.sort_unstable();
        let function = match cfg.regime {
            Regime::NestedCanalizing => BoolFunc::Canalizing(random_cascade(ins.len(), &mut rng)?),
            _ => {
                let mut slots: Vec<usize> = (0..ins.len()).collect();
                slots.shuffle(&mut rng);
                BoolFunc::from_expr(ins.len(), read_once(&slots, &mut rng))?
            }
        };
        vertices.push(Vertex::new(relabel[s], format!("v{}", relabel[s]), ins, function));
    }
    BooleanNetwork::new(vertices)
}

/// A formula reading every listed input exactly once.
fn read_once(slots: &[usize], rng: &mut ChaCha8Rng) -> BoolExpr {
    let e = match slots.len() {
        0 => return BoolExpr::Const(rng.gen_bool(0.5)),
        1 => BoolExpr::var(slots[0]),
        len => {
            let cut = rng.gen_range(1..len);
            let (l, r) = (read_once(&slots[..cut], rng), read_once(&slots[cut..], rng));
            match rng.gen_range(0..5) {
                0 | 1 => BoolExpr::and([l, r]),
                2 | 3 => BoolExpr::or([l, r]),
                _ => BoolExpr::xor(l, r),
            }
        }
    };
    if rng.gen_bool(0.3) {
        BoolExpr::not(e)
    } else {
        e
    }
}

fn random_cascade(arity: usize, rng: &mut ChaCha8Rng) -> Result<NestedCanalizingForm> {
    let mut order: Vec<usize> = (0..arity).collect();
    order.shuffle(rng);
    let layers = order
        .into_iter()
        .map(|input| Layer {
            input,
            canalizing: rng.gen_bool(0.5),
            canalized: rng.gen_bool(0.5),
        })
        .collect();
    NestedCanalizingForm::new(layers, rng.gen_bool(0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub largest_module: usize,
    pub largest_in_degree: usize,
}

/// Measures module sizes and in-degrees and checks them against `cfg`.
pub fn verify_bounds(net: &BooleanNetwork, cfg: &GeneratorConfig) -> Result<Bounds> {
    let c = strong_modules(&net.interaction_graph());
    let bounds = Bounds {
        largest_module: c.modules.iter().map(Vec::len).max().unwrap_or(0),
        largest_in_degree: net.vertices().iter().map(|v| v.inputs.len()).max().unwrap_or(0),
    };
    if bounds.largest_module > cfg.module_bound {
        return Err(Error::Config(format!(
            "module of size {} exceeds the bound {}",
            bounds.largest_module, cfg.module_bound
        )));
    }
    if bounds.largest_in_degree > cfg.degree_bound {
        return Err(Error::Config(format!(
            "in-degree {} exceeds the bound {}",
            bounds.largest_in_degree, cfg.degree_bound
        )));
    }
    Ok(bounds)
}

#[derive(Clone, Debug)]
pub struct ScalingPlan {
    pub regime: Regime,
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub module_bound: usize,
    pub degree_bound: usize,
    /// The oracle runs only for `n` up to this dimension.
    pub oracle_limit: usize,
    pub engine: EngineConfig,
}

impl ScalingPlan {
    pub fn new(regime: Regime, sizes: Vec<usize>) -> ScalingPlan {
        ScalingPlan {
            regime,
            sizes,
            repetitions: 3,
            seed: 1,
            module_bound: if regime == Regime::Chain { 2 } else { 3 },
            degree_bound: if regime == Regime::Chain { 2 } else { 3 },
            oracle_limit: DEFAULT_ORACLE_DIMENSION,
            engine: EngineConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScalingRow {
    pub n: usize,
    pub repetitions: usize,
    pub engine_median: Duration,
    /// Attractor count of the first repetition's network.
    pub attractors: BigUint,
    pub oracle: Option<Duration>,
}

/// Times the engine on generated networks; one seed per repetition.
pub fn scaling_run(plan: &ScalingPlan) -> Result<Vec<ScalingRow>> {
    let reps = plan.repetitions.max(1);
    let mut rows = Vec::with_capacity(plan.sizes.len());
    for &n in &plan.sizes {
        let mut times = Vec::with_capacity(reps);
        let mut count = None;
        let mut oracle = None;
        for r in 0..reps {
            let cfg = GeneratorConfig {
                n,
                module_bound: plan.module_bound,
                degree_bound: plan.degree_bound,
                regime: plan.regime,
                seed: plan.seed.wrapping_add(r as u64),
            };
            let net = generate(&cfg)?;
            let start = Instant::now();
            let tree = attractor_tree(&net, None, &plan.engine)?;
            let leaves = tree.leaves().len();
            times.push(start.elapsed());
            count.get_or_insert(BigUint::from(leaves));
            if r == 0 && n <= plan.oracle_limit {
                oracle = Some(oracle_attractors(&net, plan.oracle_limit)?.elapsed);
            }
        }
        times.sort();
        rows.push(ScalingRow {
            n,
            repetitions: reps,
            engine_median: times[times.len() / 2],
            attractors: count.expect("at least one repetition"),
            oracle,
        });
    }
    Ok(rows)
}

pub fn write_csv(rows: &[ScalingRow], out: &mut impl io::Write) -> io::Result<()> {
    writeln!(out, "n,repetitions,engine_median_ms,attractors,oracle_ms")?;
    for r in rows {
        let oracle = r.oracle.map_or_else(String::new, |d| format!("{:.3}", d.as_secs_f64() * 1e3));
        writeln!(
            out,
            "{},{},{:.3},{},{}",
            r.n,
            r.repetitions,
            r.engine_median.as_secs_f64() * 1e3,
            r.attractors,
            oracle
        )?;
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
