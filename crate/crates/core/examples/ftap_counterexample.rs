//! Nonzero mass on a model does not rule out arbitrage.
//!
//! One model with ΔS ∈ {1, 0}. Buying the asset never loses and sometimes
//! wins, but Q = (0, 1) still makes S a martingale. Only a system that
//! charges every outcome excludes arbitrage.

use robustftap::arbitrage::check_nra;
use robustftap::pricing::{find_pricing_system, find_positive_pricing_system};
use robustftap::rational::{int, rat};
use robustftap::toy::{build_toy, ToyParams};

fn main() {
    let params = ToyParams::one_period(int(1), &[(rat(1, 2), rat(1, 2))]);
    let fam = build_toy(&params).unwrap();
    let v = check_nra(&fam, &[]).unwrap();
    let w = v.witness.unwrap();
    println!("NRA {}: H = {}", v.holds, w.strategy.position(1, 0)[0]);

    let q = find_pricing_system(&fam, 0, &[]).unwrap().unwrap();
    println!("nonzero-mass system {q}");
    let p = find_positive_pricing_system(&fam, 0, &[]).unwrap();
    match p {
        Some(p) => println!("full-support system {p}"),
        None => println!("no full-support system"),
    }
}
