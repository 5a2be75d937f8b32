//! Calibrating to a quoted option pins down the price.
//!
//! The toy market of the worst-case example, plus an option that pays the
//! claim and is quoted at 3/2.

use robustftap::hedging::calibrate;
use robustftap::market::{Claim, StaticOption};
use robustftap::rational::{int, rat, zero};
use robustftap::toy::{build_toy, ToyParams};

fn main() {
    let params = ToyParams::one_period(int(1), &[(zero(), int(1)), (zero(), int(2))]);
    let fam = build_toy(&params).unwrap();
    let claim = Claim::from_fn(&fam, |_, w| if w == 0 { int(3) } else { zero() });
    for quote in [rat(3, 2), rat(5, 4), rat(7, 4)] {
        let options = [StaticOption::new(claim.clone(), quote.clone())];
        let c = calibrate(&fam, &claim, &options).unwrap();
        println!(
            "quote {quote}: uncalibrated [{}, {}], calibrated [{}, {}], static position {}",
            c.uncalibrated.lo,
            c.uncalibrated.hi,
            c.calibrated.lo,
            c.calibrated.hi,
            c.superhedge.static_positions[0]
        );
    }
}
