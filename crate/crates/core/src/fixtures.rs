//! Small hand-specified networks used by tests, examples and the CLI docs.

use crate::model::{format::parse_network, Network};

/// A → B with Pr(a1)=0.3, Pr(b1|a1)=0.9, Pr(b1|a0)=0.2.
pub const NET_A: &str = "\
var A 2 a1 a0
var B 2 b1 b0
cpt A |
0.3 0.7
cpt B | A
0.9 0.1
0.2 0.8
";

/// The diamond A → {B, C} → D.
pub const NET_D: &str = "\
var A 2 a1 a0
var B 2 b1 b0
var C 2 c1 c0
var D 2 d1 d0
cpt A |
0.5 0.5
cpt B | A
0.8 0.2
0.3 0.7
cpt C | A
0.6 0.4
0.4 0.6
cpt D | B C
0.99 0.01
0.9 0.1
0.9 0.1
0.05 0.95
";

pub fn net_a() -> Network {
    parse_network(NET_A).expect("fixture parses")
}

pub fn net_d() -> Network {
    parse_network(NET_D).expect("fixture parses")
}

/// The diamond with Pr(a1) lowered to 0.05.
pub fn net_d_rare_a() -> Network {
    net_d().with_cpt_table(0, vec![0.05, 0.95]).expect("valid prior")
}
