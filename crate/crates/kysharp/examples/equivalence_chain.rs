//! Verifies the chain linking the three constants of one problem
//! family: the first-order block constant sits between half the scalar
//! constant and the full scalar constant, reduction to the parabolic
//! problem is consistent, and a positive mass attains the upper end.

use kysharp::optimum::{equivalence_check, SearchPolicy};
use kysharp::problem::{ProblemSpec, WeightSpec};

fn main() {
    let policy = SearchPolicy {
        k_max: 8,
        points_per_decade: 16,
        golden_iterations: 24,
        ..SearchPolicy::default()
    };

    for (d, s) in [(2u32, 1.5f64), (3, 2.0)] {
        for m in [0.0f64, 1.0] {
            let spec = ProblemSpec::dirac_family(d, WeightSpec::type_b(s), s, m).unwrap();
            let eq = equivalence_check(&spec, &policy).unwrap();
            println!("power-law weight, d = {d}, s = {s}, m = {m}:");
            println!(
                "  scalar constant      {:.10}  (err {:.1e})",
                eq.c_rel, eq.c_rel_err
            );
            println!(
                "  block constant       {:.10}  (err {:.1e})",
                eq.c_tilde, eq.c_tilde_err
            );
            println!(
                "  reduced (parabolic)  {:.10}  (err {:.1e})",
                eq.c_schrodinger_base, eq.c_base_err
            );
            println!(
                "  ordering {}, reduction {}, upper bound attained {}",
                verdict(eq.ordering_ok),
                verdict(eq.reduction_consistent),
                verdict(eq.upper_attained),
            );
            println!();
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "no"
    }
}
