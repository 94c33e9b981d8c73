//! Tabulates the mode profiles lambda_k(r) for the three weight
//! families at d = 3, s = 2.  The power-law family is flat in r; the
//! other two rise or fall toward their boundary suprema.

use kysharp::lambda::{lambda_k, ProfileKind};
use kysharp::lambda::sample_profile;
use kysharp::problem::{ProblemSpec, WeightSpec};
use std::f64::consts::PI;

fn main() {
    let nf = (2.0 * PI).powi(2);
    let radii = [0.05, 0.2, 1.0, 5.0, 25.0, 125.0];

    for (label, weight) in [
        ("inverse-square-root", WeightSpec::type_a(2.0)),
        ("power-law", WeightSpec::type_b(2.0)),
        ("bounded", WeightSpec::type_c(2.0)),
    ] {
        let spec = ProblemSpec::schrodinger_family(3, weight, 2.0).unwrap();
        println!("{label} weight, d = 3, s = 2  (values divided by (2 pi)^2)");
        print!("{:>6}", "k\\r");
        for r in radii {
            print!("{r:>12.2}");
        }
        println!();
        for k in 0..4 {
            print!("{k:>6}");
            for r in radii {
                let (v, _) = lambda_k(&spec, k, r).unwrap();
                print!("{:>12.6}", v / nf);
            }
            println!();
        }
        println!();
    }

    // The same data is available in bulk, with one CSV row per sample.
    let spec = ProblemSpec::schrodinger_family(3, WeightSpec::type_a(2.0), 2.0).unwrap();
    let grid: Vec<f64> = (0..5).map(|i| 10f64.powf(-1.0 + i as f64 * 0.5)).collect();
    let profile = sample_profile(&spec, 0, ProfileKind::Schrodinger, &grid).unwrap();
    println!("CSV form of the k = 0 inverse-square-root profile:");
    println!("{}", profile.to_csv());
}
