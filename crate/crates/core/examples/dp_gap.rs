//! Backward one-period superhedging overprices in the robust setting.
//!
//! Two periods, two models, no drift. The claim pays each model's own
//! terminal price. Holding one share hedges it for 1 in every model, but
//! the dynamic-programming recursion takes a supremum per node.

use robustftap::hedging::{dp_superhedge, superhedge};
use robustftap::market::Claim;
use robustftap::rational::{int, rat, zero};
use robustftap::toy::{build_toy, ToyModel, ToyParams};

fn main() {
    let grid = [rat(1, 2), int(1), int(2)];
    for a in &grid {
        for b in &grid {
            for c in &grid {
                for d in &grid {
                    let params = ToyParams::new(
                        2,
                        int(1),
                        vec![
                            ToyModel::new("theta1", vec![zero(), zero()], vec![a.clone(), b.clone()]),
                            ToyModel::new("theta2", vec![zero(), zero()], vec![c.clone(), d.clone()]),
                        ],
                    );
                    let fam = build_toy(&params).unwrap();
                    let claim = Claim::from_fn(&fam, |th, w| fam.price(th, 2, w)[0].clone());
                    let global = superhedge(&fam, &claim, &[]).unwrap().price;
                    let dp = dp_superhedge(&fam, &claim).unwrap();
                    if dp > global {
                        println!("sigma1 = ({a}, {b}), sigma2 = ({c}, {d}): global {global}, dp {dp}");
                    }
                }
            }
        }
    }
}
