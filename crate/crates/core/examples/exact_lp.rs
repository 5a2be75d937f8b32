//! Solve a small LP exactly and re-check its certificate.
//!
//! Runs one optimal, one infeasible and one unbounded program.

use robustftap::lp::{lp_solve, Bound, Certificate, LinearProgram, Relation, Sense};
use robustftap::rational::{int, rat, show};

fn describe(c: &Certificate) -> String {
    match c {
        Certificate::Dual { multipliers } => format!("dual {}", show(multipliers)),
        Certificate::Farkas { multipliers } => format!("Farkas {}", show(multipliers)),
        Certificate::Ray { point, direction } => format!("ray from {} along {}", show(point), show(direction)),
    }
}

fn main() {
    // max 3x + 2y  s.t.  x + y <= 4,  x + 3y <= 6,  x <= 3
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var("x", Bound::NonNegative);
    let y = lp.add_var("y", Bound::NonNegative);
    lp.add_objective_term(x, int(3));
    lp.add_objective_term(y, int(2));
    lp.add_constraint(vec![(x, int(1)), (y, int(1))], Relation::Le, int(4));
    lp.add_constraint(vec![(x, int(1)), (y, int(3))], Relation::Le, int(6));
    lp.add_constraint(vec![(x, int(1))], Relation::Le, int(3));
    print!("{lp}");
    let sol = lp_solve(&lp);
    println!("status {:?}, value {}", sol.status, sol.value.as_ref().unwrap());
    println!("x = {}, y = {}", sol.assignment[x], sol.assignment[y]);
    println!("{}", describe(&sol.certificate));
    sol.verify(&lp).expect("dual certificate");

    // x + y >= 5 with both variables in [0, 2] has no solution.
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_var("x", Bound::Boxed { lo: int(0), hi: int(2) });
    let y = lp.add_var("y", Bound::Boxed { lo: int(0), hi: int(2) });
    lp.add_constraint(vec![(x, int(1)), (y, int(1))], Relation::Ge, int(5));
    let sol = lp_solve(&lp);
    println!("\nstatus {:?}, {}", sol.status, describe(&sol.certificate));
    sol.verify(&lp).expect("Farkas certificate");

    // max x - y with x - y/2 >= 1/2 and both free.
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_var("x", Bound::Free);
    let y = lp.add_var("y", Bound::Free);
    lp.add_objective_term(x, int(1));
    lp.add_objective_term(y, int(-1));
    lp.add_constraint(vec![(x, int(1)), (y, rat(-1, 2))], Relation::Ge, rat(1, 2));
    let sol = lp_solve(&lp);
    println!("\nstatus {:?}, {}", sol.status, describe(&sol.certificate));
    sol.verify(&lp).expect("ray certificate");
}
