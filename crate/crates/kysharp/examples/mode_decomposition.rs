//! Expands a spinor field on R^3 into matrix-harmonic modes, checks the
//! expansion preserves energy, and reconstructs the field at off-grid
//! angles.

use kysharp::harmonics::{decompose_3d, matrix_harmonic_3d, parseval_gap, synthesize_3d};
use kysharp::linalg::{cr, CVec, C64};

fn main() {
    // A band-limited field: three modes with Gaussian radial envelopes.
    let field = |x: &[f64; 3]| -> CVec {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
        let phi = x[1].atan2(x[0]);
        let envelope = (-(r - 2.0) * (r - 2.0)).exp() / r;
        let mut acc = CVec::zero(4);
        for (k, n, weights) in [
            (0i64, 0i64, [1.0, 0.0, 0.5, 0.0]),
            (1, -1, [0.0, 0.8, 0.0, 0.3]),
            (2, 0, [0.4, 0.0, 0.0, 0.6]),
        ] {
            let e = matrix_harmonic_3d(k, n, theta, phi).unwrap();
            let mut c = CVec::zero(4);
            for (i, w) in weights.iter().enumerate() {
                c[i] = C64::new(*w, 0.0);
            }
            acc = acc + (e * c).scale(cr(envelope));
        }
        acc
    };

    let r_grid: Vec<f64> = (0..=120).map(|i| 0.5 + 3.0 * i as f64 / 120.0).collect();
    let coeffs = decompose_3d(&field, 4, &r_grid).unwrap();

    println!("mode energies (sum of |coefficient|^2 over the radial grid):");
    for ((k, n), series) in &coeffs.coeffs {
        let energy: f64 = series.iter().map(|c| c.norm_sq()).sum();
        if energy > 1e-20 {
            println!("  (k, n) = ({k:>2}, {n:>2})   {energy:.10e}");
        }
    }

    let gap = parseval_gap(&field, 4, &r_grid).unwrap();
    println!("\nParseval gap: {gap:.2e}");

    let (theta, phi) = (1.234f64, 0.567f64);
    let idx = 60;
    let r = r_grid[idx];
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let direct = field(&[r * st * cp, r * st * sp, r * ct]);
    let synth = synthesize_3d(&coeffs, idx, theta, phi).unwrap();
    println!(
        "reconstruction at r = {r:.3}, angles ({theta}, {phi}): error {:.2e}",
        (direct - synth).max_abs()
    );
    println!(
        "first component there: {:+.8} {:+.8}i",
        synth[0].re, synth[0].im
    );
}
