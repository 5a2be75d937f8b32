mod common;

use proptest::prelude::*;
use rand::Rng;

use common::{random_claim, random_family, random_strategy, rng, vertex_optimum};
use robustftap::arbitrage::{check_classical_na, check_nra, is_robust_arbitrage, ArbitrageWitness};
use robustftap::calculus::{gen_cond_expectation, is_gen_martingale, GeneralizedCondExp};
use robustftap::hedging::{dp_superhedge, semi_static_value, subhedge, superhedge, worst_case_superhedge};
use robustftap::lp::{lp_solve, Bound, LinearProgram, LpStatus, Relation, Sense};
use robustftap::market::{gain, gain_processes, terminal_gains, validate_adapted, AdaptedProcess, Claim, ModelFamily, StaticOption};
use robustftap::pricing::{evaluate, find_pricing_system, find_positive_pricing_system, pricing_bounds, verify_pricing_system, RobustPricingSystem};
use robustftap::rational::{int, rat, zero};
use robustftap::toy::{build_toy, explicit_family, region_beta_bounds, toy_emm, FamilyPoint, ToyParams};
use robustftap::Rational;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// A random family that satisfies NRA, with one certificate per model.
fn nra_family(seed: u64) -> Option<(ModelFamily, Vec<RobustPricingSystem>)> {
    let mut r = rng(seed);
    let fam = random_family(&mut r);
    let v = check_nra(&fam, &[]).unwrap();
    v.holds.then_some((fam, v.certificates))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn atoms_refine(seed in any::<u64>()) {
        let fam = random_family(&mut rng(seed));
        let space = fam.space();
        for t in 0..space.horizon() {
            for child in space.atoms(t + 1) {
                let parent = space.atom_of(t, child[0]);
                prop_assert!(child.iter().all(|&w| space.atom_of(t, w) == parent));
            }
        }
    }

    #[test]
    fn gain_is_linear_and_adapted(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fam = random_family(&mut r);
        let h1 = random_strategy(&mut r, &fam);
        let h2 = random_strategy(&mut r, &fam);
        let sum = h1.add(&h2);
        for th in 0..fam.num_thetas() {
            for t in 0..=fam.horizon() {
                let g1 = gain(&fam, &h1, th, t).unwrap();
                let g2 = gain(&fam, &h2, th, t).unwrap();
                let g = gain(&fam, &sum, th, t).unwrap();
                for w in 0..g.len() {
                    prop_assert_eq!(&g[w], &(&g1[w] + &g2[w]));
                }
            }
        }
        for p in gain_processes(&fam, &h1).unwrap() {
            prop_assert!(validate_adapted(fam.space(), &p).is_ok());
        }
    }

    #[test]
    fn witnesses_are_arbitrages(seed in any::<u64>()) {
        let fam = random_family(&mut rng(seed));
        let v = check_nra(&fam, &[]).unwrap();
        if let Some(w) = &v.witness {
            let gains = terminal_gains(&fam, &w.strategy).unwrap();
            prop_assert!(gains.is_nonnegative());
            prop_assert!(gains.payoffs().iter().flatten().any(|g| *g > zero()));
        }
        prop_assert_eq!(v.holds, v.witness.is_none());
    }

    #[test]
    fn classical_na_everywhere_implies_nra(seed in any::<u64>()) {
        let fam = random_family(&mut rng(seed));
        let per_model: Vec<_> = (0..fam.num_thetas()).map(|th| check_classical_na(&fam, th).unwrap()).collect();
        for (th, v) in per_model.iter().enumerate() {
            if let Some(m) = &v.martingale_measure {
                let q = RobustPricingSystem::embed(&fam, th, m);
                prop_assert!(verify_pricing_system(&fam, &q, &[]).is_ok());
            }
        }
        if per_model.iter().all(|v| v.holds) {
            prop_assert!(check_nra(&fam, &[]).unwrap().holds);
        }
    }

    #[test]
    fn nra_certificates_verify(seed in any::<u64>()) {
        if let Some((fam, certs)) = nra_family(seed) {
            prop_assert_eq!(certs.len(), fam.num_thetas());
            for (th, q) in certs.iter().enumerate() {
                prop_assert!(verify_pricing_system(&fam, q, &[]).is_ok());
                prop_assert!(q.mass(th) > zero());
                prop_assert!(is_gen_martingale(&fam, q, fam.processes()).is_ok());
            }
        }
    }

    #[test]
    fn gains_price_to_zero(seed in any::<u64>()) {
        if let Some((fam, certs)) = nra_family(seed) {
            let mut r = rng(seed ^ 1);
            let h = random_strategy(&mut r, &fam);
            let gains = terminal_gains(&fam, &h).unwrap();
            for q in &certs {
                prop_assert_eq!(evaluate(q, &gains).unwrap(), zero());
            }
        }
    }

    #[test]
    fn any_system_found_verifies(seed in any::<u64>()) {
        let fam = random_family(&mut rng(seed));
        for th in 0..fam.num_thetas() {
            if let Some(q) = find_pricing_system(&fam, th, &[]).unwrap() {
                prop_assert!(verify_pricing_system(&fam, &q, &[]).is_ok());
                prop_assert!(q.mass(th) > zero());
            }
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn hedging_duality_and_residuals(seed in any::<u64>()) {
        let Some((fam, _)) = nra_family(seed) else { return Ok(()) };
        let claim = random_claim(&mut rng(seed ^ 2), &fam);
        let b = pricing_bounds(&fam, &claim, &[]).unwrap();
        let sup = superhedge(&fam, &claim, &[]).unwrap();
        let sub = subhedge(&fam, &claim, &[]).unwrap();
        prop_assert_eq!(&sup.price, &b.hi);
        prop_assert_eq!(&sub.price, &b.lo);
        prop_assert!(sub.price <= sup.price);
        prop_assert_eq!(evaluate(&b.hi_system, &claim).unwrap(), b.hi.clone());
        prop_assert_eq!(evaluate(&b.lo_system, &claim).unwrap(), b.lo.clone());

        let wealth = semi_static_value(&fam, &sup.price, &sup.strategy, &[], &[]).unwrap();
        for (th, row) in wealth.iter().enumerate() {
            for (w, x) in row.iter().enumerate() {
                prop_assert!(x >= claim.payoff(th, w));
                prop_assert_eq!(&(x - claim.payoff(th, w)), &sup.residuals[th][w]);
            }
        }
        prop_assert!(dp_superhedge(&fam, &claim).unwrap() >= sup.price);
        if (0..fam.num_thetas()).all(|th| check_classical_na(&fam, th).unwrap().holds) {
            prop_assert!(worst_case_superhedge(&fam, &claim).unwrap().price <= sup.price);
        }
    }

    #[test]
    fn superhedge_is_cash_additive_and_homogeneous(seed in any::<u64>(), c in small_rational(), l in 0i64..=5) {
        let Some((fam, _)) = nra_family(seed) else { return Ok(()) };
        let claim = random_claim(&mut rng(seed ^ 3), &fam);
        let base = superhedge(&fam, &claim, &[]).unwrap().price;
        prop_assert_eq!(superhedge(&fam, &claim.shift(&c), &[]).unwrap().price, &base + &c);
        let lambda = rat(l, 2);
        prop_assert_eq!(superhedge(&fam, &claim.scale(&lambda), &[]).unwrap().price, &base * &lambda);
    }

    #[test]
    fn options_shrink_the_bounds(seed in any::<u64>()) {
        let Some((fam, _)) = nra_family(seed) else { return Ok(()) };
        let mut r = rng(seed ^ 4);
        let claim = random_claim(&mut r, &fam);
        let payoff = random_claim(&mut r, &fam);
        // Quoted under a strictly positive system, so NRA survives.
        let k = fam.num_thetas();
        let mut positive = find_positive_pricing_system(&fam, 0, &[]).unwrap().unwrap();
        for th in 1..k {
            let q = find_positive_pricing_system(&fam, th, &[]).unwrap().unwrap();
            positive = positive.mix(&q, &rat(th as i64, th as i64 + 1));
        }
        prop_assert!(positive.weights().iter().flatten().all(|x| *x > zero()));
        let quote = evaluate(&positive, &payoff).unwrap();
        let options = [StaticOption::new(payoff, quote)];
        let free = pricing_bounds(&fam, &claim, &[]).unwrap();
        let cal = pricing_bounds(&fam, &claim, &options).unwrap();
        prop_assert!(free.lo <= cal.lo && cal.hi <= free.hi);
        prop_assert!(verify_pricing_system(&fam, &cal.hi_system, &options).is_ok());
        prop_assert_eq!(superhedge(&fam, &claim, &options).unwrap().price, cal.hi);
    }

    #[test]
    fn strategies_keep_martingales(seed in any::<u64>()) {
        let Some((fam, certs)) = nra_family(seed) else { return Ok(()) };
        let h = random_strategy(&mut rng(seed ^ 5), &fam);
        let gains = gain_processes(&fam, &h).unwrap();
        for q in &certs {
            prop_assert!(is_gen_martingale(&fam, q, &gains).is_ok());
        }
    }

    #[test]
    fn conditional_expectation_laws(seed in any::<u64>()) {
        let Some((fam, certs)) = nra_family(seed) else { return Ok(()) };
        let mut r = rng(seed ^ 6);
        let q = &certs[0];
        let big_t = fam.horizon();
        let f1 = random_claim(&mut r, &fam);
        let f2 = random_claim(&mut r, &fam);
        let s = r.gen_range(0..big_t);

        // Total mass.
        let ce = gen_cond_expectation(&fam, q, &f1, big_t, s).unwrap();
        let lifted = GeneralizedCondExp::to_claim(&fam, s, &ce.particular);
        prop_assert_eq!(evaluate(q, &lifted).unwrap(), evaluate(q, &f1).unwrap());
        for b in &ce.kernel_basis {
            let shifted: Vec<Vec<Rational>> = ce.particular.iter().zip(b)
                .map(|(p, k)| p.iter().zip(k).map(|(p, k)| p + k).collect()).collect();
            prop_assert!(ce.contains(&shifted));
        }

        // Sums of members are members for the sum.
        let ce2 = gen_cond_expectation(&fam, q, &f2, big_t, s).unwrap();
        let ce_sum = gen_cond_expectation(&fam, q, &f1.add(&f2), big_t, s).unwrap();
        let sum: Vec<Vec<Rational>> = ce.particular.iter().zip(&ce2.particular)
            .map(|(a, b)| a.iter().zip(b).map(|(a, b)| a + b).collect()).collect();
        prop_assert!(ce_sum.contains(&sum));

        // Tower through an intermediate date.
        if s + 1 < big_t {
            let t = r.gen_range(s + 1..big_t);
            let inner = gen_cond_expectation(&fam, q, &f1, big_t, t).unwrap();
            let g = GeneralizedCondExp::to_claim(&fam, t, &inner.particular);
            let outer = gen_cond_expectation(&fam, q, &g, t, s).unwrap();
            prop_assert!(ce.contains(&outer.particular));
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn toy_emm_is_a_martingale_measure(sigma in 1i64..=6, m in -5i64..=5, d in 1i64..=3) {
        let sigma = rat(sigma, d);
        let mu = &sigma * rat(m, 6);
        let params = ToyParams::one_period(int(1), &[(mu.clone(), sigma.clone())]);
        let fam = build_toy(&params).unwrap();
        for p in fam.processes() {
            prop_assert!(validate_adapted(fam.space(), p).is_ok());
        }
        let (up, down) = toy_emm(&mu, &sigma).unwrap();
        prop_assert_eq!(&up + &down, int(1));
        prop_assert_eq!(&up * (&mu + &sigma) + &down * (&mu - &sigma), zero());
        let q = RobustPricingSystem::embed(&fam, 0, &[up, down]);
        prop_assert!(is_gen_martingale(&fam, &q, fam.processes()).is_ok());
    }

    #[test]
    fn explicit_family_points_verify(
        s1 in 1i64..=6, s2 in 1i64..=6, m1 in -4i64..=4, m2 in -4i64..=4, a in 0i64..=12, b in 0i64..=10,
    ) {
        let (s1, s2) = (int(s1), int(s2));
        let (mu1, mu2) = (&s1 * rat(m1, 5), &s2 * rat(m2, 5));
        let params = ToyParams::one_period(int(1), &[(mu1, s1), (mu2, s2)]);
        let fam = build_toy(&params).unwrap();
        let alpha = rat(a, 12);
        let Some((lo, hi)) = region_beta_bounds(&params, &alpha) else { return Ok(()) };
        let beta = &lo + (&hi - &lo) * rat(b, 10);
        let q = explicit_family(&params, &FamilyPoint::new(alpha.clone(), beta)).unwrap();
        prop_assert!(q.weights().iter().flatten().all(|x| *x >= zero()));
        prop_assert_eq!(q.total_mass(), int(1));
        prop_assert!(verify_pricing_system(&fam, &q, &[]).is_ok());
        prop_assert_eq!(q.mass(0), alpha.clone());
        if alpha > zero() {
            prop_assert!(find_pricing_system(&fam, 0, &[]).unwrap().is_some());
        }
    }

    #[test]
    fn lp_matches_vertex_enumeration(seed in any::<u64>()) {
        let tiny = common::random_tiny_lp(&mut rng(seed));
        let sol = lp_solve(&tiny.lp);
        prop_assert!(sol.verify(&tiny.lp).is_ok());
        match (sol.status, vertex_optimum(&tiny.c, &tiny.rows, tiny.maximize)) {
            (LpStatus::Optimal, Some((v, _))) => prop_assert_eq!(sol.value.unwrap(), v),
            (LpStatus::Infeasible, None) => {}
            (s, o) => prop_assert!(false, "{:?} vs {:?}", s, o.map(|o| o.0)),
        }
    }

    #[test]
    fn every_lp_status_is_certified(seed in any::<u64>()) {
        let lp = common::random_open_lp(&mut rng(seed));
        let sol = lp_solve(&lp);
        prop_assert!(sol.verify(&lp).is_ok(), "{}", lp);
    }

    #[test]
    fn duplicated_rows_terminate(seed in any::<u64>()) {
        // Degenerate programs: every row appears three times.
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let mut lp = LinearProgram::new(Sense::Maximize);
        let vars: Vec<usize> = (0..n).map(|j| lp.add_var(format!("x{j}"), Bound::NonNegative)).collect();
        for v in &vars {
            lp.add_objective_term(*v, int(r.gen_range(-2..=3)));
        }
        for _ in 0..r.gen_range(1..=2) {
            let a: Vec<Rational> = (0..n).map(|_| int(r.gen_range(0..=3))).collect();
            for _ in 0..3 {
                lp.add_constraint(vars.iter().map(|v| (*v, a[*v].clone())).collect(), Relation::Le, zero());
            }
        }
        let sol = lp_solve(&lp);
        prop_assert!(sol.verify(&lp).is_ok());
    }
}

#[test]
fn witness_check_rejects_non_arbitrage() {
    let params = ToyParams::one_period(int(1), &[(zero(), int(1)), (zero(), int(2))]);
    let fam = build_toy(&params).unwrap();
    let h = robustftap::market::PredictableStrategy::constant(fam.space(), 1, int(1));
    let w = ArbitrageWitness { strategy: h, static_positions: vec![] };
    assert!(!is_robust_arbitrage(&fam, &w, &[]).unwrap());
    let unit = AdaptedProcess::from_fn(fam.space(), 1, |_, _| vec![int(1)]).unwrap();
    assert!(validate_adapted(fam.space(), &unit).is_ok());
    let claim = Claim::constant(&fam, int(3));
    assert_eq!(superhedge(&fam, &claim, &[]).unwrap().price, int(3));
}
