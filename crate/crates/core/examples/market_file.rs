//! Load a market file and print its no-arbitrage verdict and price bounds.
//!
//!     cargo run --example market_file -- fixtures/instance_a.json maxstock

use robustftap::arbitrage::check_nra;
use robustftap::format::load_market_file;
use robustftap::pricing::pricing_bounds;

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "crates/core/fixtures/instance_a.json".into());
    let market = match load_market_file(std::path::Path::new(&path)) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let fam = &market.family;
    println!("{} models, {} outcomes, T = {}", fam.num_thetas(), fam.space().num_outcomes(), fam.horizon());
    let v = check_nra(fam, &[]).unwrap();
    println!("NRA {}", v.holds);
    if !v.holds {
        return;
    }
    let names: Vec<String> = match args.next() {
        Some(n) => vec![n],
        None => market.claims.keys().cloned().collect(),
    };
    for name in names {
        let b = pricing_bounds(fam, market.claim(&name).unwrap(), &[]).unwrap();
        println!("{name}: [{}, {}]", b.lo, b.hi);
    }
}
