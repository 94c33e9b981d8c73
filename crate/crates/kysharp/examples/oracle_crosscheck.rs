//! Cross-checks the spectral norm formula against a direct space-time
//! quadrature of the smoothed evolution for every bundled scenario.
//! The two computations share no code path beyond the problem data.

use kysharp::oracle::{bundled_scenario, bundled_scenario_names, parse_scenario, run_scenario};
use std::time::Instant;

fn main() {
    println!(
        "{:<10} {:>16} {:>16} {:>10} {:>10} {:>8}",
        "scenario", "spectral", "direct", "rel diff", "tail", "secs"
    );
    for name in bundled_scenario_names() {
        let sc = parse_scenario(name, bundled_scenario(name).unwrap()).unwrap();
        let start = Instant::now();
        let run = run_scenario(&sc).unwrap();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{:<10} {:>16.9e} {:>16.9e} {:>10.2e} {:>10.2e} {:>8.2}",
            name, run.spectral, run.direct, run.rel_diff, run.trace.tail_fraction, secs
        );
    }
}
