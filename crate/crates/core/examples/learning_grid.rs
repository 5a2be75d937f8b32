//! Parameters chosen predictably from a finite grid, one choice per node.

use robustftap::arbitrage::check_nra;
use robustftap::hedging::superhedge;
use robustftap::market::Claim;
use robustftap::rational::{int, rat, zero};
use robustftap::toy::learning_grid;

fn main() {
    let grid = vec![(zero(), int(1)), (zero(), rat(1, 2))];
    let g = learning_grid(2, &int(1), &[grid.clone(), grid], 64).unwrap();
    println!("{} models (total {}, truncated {})", g.family.num_thetas(), g.total, g.truncated);
    for (name, sel) in g.family.thetas().iter().zip(&g.selections).take(4) {
        println!("  {name}: grid indices {sel:?}");
    }
    println!("NRA {}", check_nra(&g.family, &[]).unwrap().holds);
    let call = Claim::from_fn(&g.family, |th, w| {
        let s = &g.family.price(th, 2, w)[0];
        if *s > int(1) { s - int(1) } else { zero() }
    });
    println!("call superhedge {}", superhedge(&g.family, &call, &[]).unwrap().price);

    let small = learning_grid(3, &int(1), &vec![vec![(zero(), int(1)), (zero(), int(2))]; 3], 10).unwrap();
    println!("three periods: {} of {} models kept", small.family.num_thetas(), small.total);
}
