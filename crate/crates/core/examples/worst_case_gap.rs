//! Robust superhedging costs more than the worst single model.
//!
//! One period, S_0 = 1, two volatilities and no drift. The claim pays the
//! larger of the two terminal prices: 1 + σ2 if up, 1 - σ1 if down.

use robustftap::hedging::{superhedge, worst_case_superhedge};
use robustftap::market::Claim;
use robustftap::pricing::pricing_bounds;
use robustftap::rational::{int, rat, zero};
use robustftap::toy::{build_toy, ToyParams};

fn main() {
    for (s1, s2) in [(int(1), int(2)), (rat(1, 2), int(3)), (int(2), rat(5, 2))] {
        let params = ToyParams::one_period(int(1), &[(zero(), s1.clone()), (zero(), s2.clone())]);
        let fam = build_toy(&params).unwrap();
        let claim = Claim::from_fn(&fam, |_, w| if w == 0 { int(1) + &s2 } else { int(1) - &s1 });

        let worst = worst_case_superhedge(&fam, &claim).unwrap();
        let robust = superhedge(&fam, &claim, &[]).unwrap();
        let bounds = pricing_bounds(&fam, &claim, &[]).unwrap();
        println!("sigma = ({s1}, {s2})");
        for (th, h) in worst.per_model.iter().enumerate() {
            println!("  model {}: price {}, H = {}", th + 1, h.price, h.strategy.position(1, 0)[0]);
        }
        println!("  worst case {}", worst.price);
        println!("  robust     {} with H = {}", robust.price, robust.strategy.position(1, 0)[0]);
        println!("  dual max   {} at q = {}", bounds.hi, bounds.hi_system);
        assert_eq!(robust.price, bounds.hi);
    }
}
