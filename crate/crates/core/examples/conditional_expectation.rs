//! Generalized conditional expectation is an affine set, not a point.
//!
//! Two-period toy market with two models under the product system.

use robustftap::calculus::{check_deflated_martingale, density_process, gen_cond_expectation, GeneralizedCondExp};
use robustftap::market::Claim;
use robustftap::rational::{int, rat, show};
use robustftap::toy::{build_toy, product_system, ToyModel, ToyParams};

fn rows(v: &[Vec<robustftap::Rational>]) -> String {
    v.iter().map(|r| show(r)).collect::<Vec<_>>().join(" ")
}

fn main() {
    let params = ToyParams::new(
        2,
        int(1),
        vec![
            ToyModel::constant("theta1", 2, rat(1, 2), int(1)),
            ToyModel::constant("theta2", 2, rat(-1, 3), int(2)),
        ],
    );
    let fam = build_toy(&params).unwrap();
    let q = product_system(&params).unwrap();
    println!("product system {q}");

    let claim = Claim::from_fn(&fam, |th, w| fam.price(th, 2, w)[0].clone());
    let ce = gen_cond_expectation(&fam, &q, &claim, 2, 1).unwrap();
    println!("particular {}", rows(&ce.particular));
    println!("kernel dimension {}", ce.kernel_dimension());
    for b in &ce.kernel_basis {
        println!("  direction {}", rows(b));
    }
    let s1 = Claim::from_fn(&fam, |th, w| fam.price(th, 1, w)[0].clone());
    let candidate = GeneralizedCondExp::candidate_from_claim(&fam, 1, &s1);
    println!("S_1 is a member: {}", ce.contains(&candidate));

    let z = density_process(&fam, &q);
    println!("Z_1 for theta1 {}", show(&z.values()[0][1]));
    check_deflated_martingale(&fam, &q).unwrap();
    println!("Z S is a P-martingale");
}
