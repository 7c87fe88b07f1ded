use std::collections::BTreeSet;

use modattr::astg::{attractors, build_astg, StateSet};
use modattr::boolfunc::{detect_nested_canalizing, parse_expression, BoolFunc};
use modattr::engine::{attractor_tree, controlled_module, EngineConfig};
use modattr::fixtures;
use modattr::network::{parse_network, BooleanNetwork};

fn net(name: &str) -> BooleanNetwork {
    parse_network(fixtures::find(name).unwrap().text).unwrap()
}

fn expanded_strings(n: &BooleanNetwork) -> BTreeSet<BTreeSet<String>> {
    attractor_tree(n, None, &EngineConfig::default())
        .unwrap()
        .leaves()
        .iter()
        .map(|l| l.expand(1 << 20).unwrap().iter().map(|x| x.to_bit_string()).collect())
        .collect()
}

fn digest(name: &str) -> BTreeSet<BTreeSet<String>> {
    fixtures::find(name)
        .unwrap()
        .attractors
        .iter()
        .map(|a| a.iter().map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn fixtures_reproduce_their_digests() {
    for f in fixtures::ALL {
        assert_eq!(expanded_strings(&net(f.name)), digest(f.name), "{}", f.name);
    }
}

#[test]
fn two_layer_attractors() {
    let and = expanded_strings(&net("sec33-and"));
    let cyclic: BTreeSet<String> = ["1100", "1101", "1110", "1111"].iter().map(|s| s.to_string()).collect();
    assert!(and.contains(&cyclic));
    assert!(and.contains(&BTreeSet::from(["0001".to_string()])));
    assert_eq!(and.len(), 2);

    let xor = expanded_strings(&net("sec33-xor"));
    assert_eq!(xor.len(), 3);
    assert!(xor.contains(&BTreeSet::from(["1101".to_string()])));
    assert!(xor.contains(&BTreeSet::from(["1110".to_string()])));
}

#[test]
fn three_layer_variants() {
    let a = attractor_tree(&net("sec43-a"), None, &EngineConfig::default()).unwrap().leaves();
    // the oracle-confirmed count is 2: (1, 1) on {x5, x6} is not a trap
    // while x3 may still drop to 0
    assert_eq!(a.len(), 2);
    assert_eq!(a[0].expand(1).unwrap()[0].to_bit_string(), "000100");
    assert_eq!(a[1].factors[2].bit_strings(), vec!["00"]);

    let b = attractor_tree(&net("sec43-b"), None, &EngineConfig::default()).unwrap().leaves();
    assert_eq!(b.len(), 2);
    assert_eq!(b[0].expand(1).unwrap()[0].to_bit_string(), "000101");
    assert_eq!(b[1].factors[2].bit_strings(), vec!["00", "01", "11"]);
    assert_eq!(b[1].count_states(), 12u32.into());
}

#[test]
fn g1s_fixed_points() {
    let n = net("g1s");
    let leaves = attractor_tree(&n, None, &EngineConfig::default()).unwrap().leaves();
    assert_eq!(leaves.len(), 3);
    assert!(leaves.iter().all(|l| l.is_fixed_point()));
    let got: BTreeSet<String> = leaves.iter().map(|l| l.expand(1).unwrap()[0].to_bit_string()).collect();
    let expected: BTreeSet<String> = ["00000000000000000000", "00000001111111111001", "11111110111111111001"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn g1s_module_a_under_both_inputs() {
    let n = net("g1s");
    let tree = attractor_tree(&n, None, &EngineConfig::default()).unwrap();
    let parts = &tree.decomposition.parts;
    let a_index = parts.iter().position(|p| p.iter().map(|v| n.vertex(*v).unwrap().name.as_str()).collect::<Vec<_>>() == ["IGF1R", "ERa", "AKT1", "MEK1"]).unwrap();
    let mut seen = Vec::new();
    for (id, node) in tree.nodes().iter().enumerate() {
        if node.depth + 1 != a_index {
            continue;
        }
        let prefix = tree.prefix(id);
        let egf = prefix[0].bit_strings()[0].clone();
        let m = controlled_module(&n, parts, &prefix, a_index, &EngineConfig::default()).unwrap();
        let atts: Vec<Vec<String>> = attractors(&build_astg(&m, 24).unwrap()).attractors.iter().map(StateSet::bit_strings).collect();
        seen.push((egf, atts));
    }
    // EGF = 0: A is a positive loop with fixed points all-0 and all-1;
    // EGF = 1: ERBB23 switches IGF1R off and the receptors keep AKT1, MEK1 on.
    assert_eq!(
        seen,
        vec![
            ("0".to_string(), vec![vec!["0000".to_string()], vec!["1111".to_string()]]),
            ("1".to_string(), vec![vec!["0111".to_string()]]),
        ]
    );
}

#[test]
fn f7_cascade_evaluation() {
    let p = parse_expression("(ERa | AKT1) & !ERBB23").unwrap();
    let f = BoolFunc::from_expr(3, p.expr).unwrap();
    let form = detect_nested_canalizing(&f).unwrap().unwrap();
    // inputs in first-appearance order: ERa, AKT1, ERBB23
    assert!(!form.eval(&[true, true, true]));
    assert!(form.eval(&[true, false, false]));
}
