//! A binomial model is complete; two volatilities make the market
//! incomplete.

use robustftap::hedging::{market_complete, replicable};
use robustftap::market::{build_space, AdaptedProcess, Claim, ModelFamily};
use robustftap::rational::{int, rat, zero};
use robustftap::toy::{build_toy, ToyParams};

fn main() {
    let space = build_space(
        vec!["+".into(), "-".into()],
        1,
        vec![vec![vec![0, 1]], vec![vec![0], vec![1]]],
        vec![rat(1, 3), rat(2, 3)],
    )
    .unwrap();
    let s = AdaptedProcess::new(1, vec![vec![vec![int(1)]; 2], vec![vec![int(2)], vec![zero()]]]).unwrap();
    let binomial = ModelFamily::new(space, vec!["theta".into()], vec![s]).unwrap();
    println!("binomial complete: {}", market_complete(&binomial).unwrap().complete);
    let call = Claim::from_fn(&binomial, |_, w| if w == 0 { int(1) } else { zero() });
    let r = replicable(&binomial, &call).unwrap().unwrap();
    println!("call = {} + {} (S_1 - S_0)", r.initial, r.strategy.position(1, 0)[0]);

    let params = ToyParams::one_period(int(1), &[(zero(), int(1)), (zero(), int(2))]);
    let fam = build_toy(&params).unwrap();
    let c = market_complete(&fam).unwrap();
    let w = c.witness.unwrap();
    println!(
        "two volatilities complete: {}; indicator of atom {} of F_{} under {} is not replicable",
        c.complete,
        w.atom,
        w.t,
        fam.thetas()[w.theta]
    );
}
