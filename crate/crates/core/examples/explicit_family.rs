//! Sweep the two-parameter family of pricing systems of the one-period,
//! two-model toy market and check each point.

use robustftap::pricing::verify_pricing_system;
use robustftap::rational::{int, rat, zero};
use robustftap::toy::{build_toy, explicit_family, region_beta_bounds, toy_emm, FamilyPoint, ToyParams};

fn main() {
    let params = ToyParams::one_period(int(1), &[(rat(1, 2), int(1)), (rat(-1, 3), int(2))]);
    let fam = build_toy(&params).unwrap();
    for (th, m) in params.models.iter().enumerate() {
        let (up, down) = toy_emm(&m.mu[0], &m.sigma[0]).unwrap();
        println!("Q^{}: up {up}, down {down}", th + 1);
    }
    for a in 0..=4 {
        let alpha = rat(a, 4);
        let Some((lo, hi)) = region_beta_bounds(&params, &alpha) else {
            println!("alpha {alpha}: empty");
            continue;
        };
        println!("alpha {alpha}: beta in [{lo}, {hi}]");
        for beta in [lo.clone(), (&lo + &hi) / int(2), hi] {
            let q = explicit_family(&params, &FamilyPoint::new(alpha.clone(), beta.clone())).unwrap();
            verify_pricing_system(&fam, &q, &[]).unwrap();
            assert!(q.weights().iter().flatten().all(|x| *x >= zero()));
            println!("  beta {beta}: {q}");
        }
    }
}
