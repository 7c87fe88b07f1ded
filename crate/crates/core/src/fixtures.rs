//! Bundled example models with their known attractor sets.
//!
//! Expected attractors are written as bit strings over all vertices,
//! leftmost character = vertex 0.

pub const SEC33_AND: &str = include_str!("../fixtures/sec33-and.bnet");
pub const SEC33_XOR: &str = include_str!("../fixtures/sec33-xor.bnet");
pub const SEC43_A: &str = include_str!("../fixtures/sec43-a.bnet");
pub const SEC43_B: &str = include_str!("../fixtures/sec43-b.bnet");
pub const G1S: &str = include_str!("../fixtures/g1s.bnet");

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
    /// Attractor digest: one entry per attractor, each a list of states.
    pub attractors: &'static [&'static [&'static str]],
}

pub const ALL: &[Fixture] = &[
    Fixture {
        name: "sec33-and",
        text: SEC33_AND,
        attractors: &[&["1100", "1110", "1101", "1111"], &["0001"]],
    },
    Fixture {
        name: "sec33-xor",
        text: SEC33_XOR,
        attractors: &[&["0000", "0010", "0001", "0011"], &["1110"], &["1101"]],
    },
    Fixture {
        name: "sec43-a",
        text: SEC43_A,
        attractors: &[&["110000", "111000", "110100", "111100"], &["000100"]],
    },
    Fixture {
        name: "sec43-b",
        text: SEC43_B,
        attractors: &[
            &[
                "110000", "111000", "110100", "111100", "110001", "111001", "110101", "111101", "110011", "111011",
                "110111", "111111",
            ],
            &["000101"],
        ],
    },
    Fixture {
        name: "g1s",
        text: G1S,
        attractors: &[
            &["00000000000000000000"],
            &["11111110111111111001"],
            &["00000001111111111001"],
        ],
    },
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}
