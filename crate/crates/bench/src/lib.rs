//! Inputs shared by the benchmarks.

use skeincert_core::corpus::{showcase, torus_word};
use skeincert_core::Diagram;

pub fn cases() -> Vec<(String, Diagram)> {
    let mut out: Vec<(String, Diagram)> = showcase().into_iter().map(|i| (i.name, i.diagram)).collect();
    for (p, q) in [(2, 7), (3, 5), (4, 5)] {
        let w = torus_word(p, q).expect("valid torus pair");
        out.push((format!("torus-{p}-{q}"), Diagram::from_braid(&w)));
    }
    out
}
