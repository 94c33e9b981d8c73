//! Computes the sharp smoothing constants for the parabolic problem at
//! d = 3, s = 2 across the three weight families and prints where each
//! supremum is attained.

use kysharp::optimum::{schrodinger_constant, SearchPolicy};
use kysharp::problem::{ProblemSpec, WeightSpec};
use std::f64::consts::PI;

fn main() {
    let policy = SearchPolicy {
        k_max: 16,
        points_per_decade: 32,
        ..SearchPolicy::default()
    };

    for (label, weight, reference) in [
        ("inverse-square-root", WeightSpec::type_a(2.0), PI),
        ("power-law", WeightSpec::type_b(2.0), PI),
        ("bounded", WeightSpec::type_c(2.0), PI / 2.0),
    ] {
        let spec = ProblemSpec::schrodinger_family(3, weight, 2.0).unwrap();
        let report = schrodinger_constant(&spec, &policy).unwrap();
        println!("{label} weight:");
        println!("  constant   {:.12}  (reference {:.12})", report.value, reference);
        let k_label = report
            .attaining_k
            .map_or("any".to_string(), |k| k.to_string());
        println!("  attained   k = {k_label}, {}", attained(&report));
        println!("  method     {}", report.method.as_str());
        println!("  extremiser {}", report.extremiser.as_str());
        println!();
    }
}

fn attained(report: &kysharp::optimum::ConstantReport) -> String {
    match (&report.boundary, report.attaining_r) {
        (Some(end), _) => format!("limit {}", end.as_str()),
        (None, Some(r)) => format!("r = {r:.6}"),
        (None, None) => "flat in r".to_string(),
    }
}
