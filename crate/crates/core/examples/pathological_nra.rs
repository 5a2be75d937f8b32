//! Every model admits arbitrage, yet the family does not.
//!
//! σ = 1 and μ = ±2: model 1 only goes up, model 2 only goes down.

use robustftap::arbitrage::{check_classical_na, check_nra};
use robustftap::pricing::{verify_pricing_system, RobustPricingSystem};
use robustftap::rational::{int, rat};
use robustftap::toy::{build_toy, ToyParams};

fn main() {
    let params = ToyParams::one_period(int(1), &[(int(2), int(1)), (int(-2), int(1))]);
    let fam = build_toy(&params).unwrap();
    for th in 0..2 {
        let v = check_classical_na(&fam, th).unwrap();
        let h = v.witness.unwrap();
        println!("{}: NA {} (arbitrage H = {})", fam.thetas()[th], v.holds, h.position(1, 0)[0]);
    }
    let v = check_nra(&fam, &[]).unwrap();
    println!("NRA {}", v.holds);
    for q in &v.certificates {
        println!("  certificate {q}");
    }
    let q = RobustPricingSystem::new(&fam, vec![vec![rat(1, 4); 2]; 2]).unwrap();
    verify_pricing_system(&fam, &q, &[]).unwrap();
    println!("uniform q = 1/4 verifies");
}
