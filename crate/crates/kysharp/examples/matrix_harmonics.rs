//! Demonstrates the matrix spherical harmonics: column orthonormality
//! under the sphere average, the coupling identities relating adjacent
//! degrees, and the intertwining relation with the momentum direction.

use kysharp::harmonics::{
    basis_pair_residual, coupling_matrix, intertwining_residual_3d, lemma2_residual,
    lemma3_residual, lemma4_residual, matrix_harmonic_3d, sphere_quadrature,
};

fn main() {
    let (k, n) = (2i64, 1i64);

    // Columns of E_{k,n} average to an orthonormal frame over the sphere.
    let grid = sphere_quadrature(k + 2).unwrap();
    let mut gram = kysharp::linalg::CMat::zero(4);
    for p in &grid {
        let e = matrix_harmonic_3d(k, n, p.theta, p.phi).unwrap();
        gram = gram + (e.adjoint() * e).scale(kysharp::linalg::cr(p.weight));
    }
    println!("sphere-averaged Gram matrix for E_{{k={k},n={n}}}:");
    for i in 0..4 {
        print!("   ");
        for j in 0..4 {
            print!(" {:+.6}", gram[(i, j)].re);
        }
        println!();
    }

    // The coupling coefficients satisfy three exact identities linking
    // degree k to degree k + 1.
    println!("\ncoupling matrix A_{{k={k},n={n}}}:");
    let a = coupling_matrix(k, n).unwrap();
    for row in &a {
        println!("    {:+.6} {:+.6}", row[0], row[1]);
    }
    println!(
        "identity residuals: annihilation {:.1e}, partition {:.1e}, singularity {:.1e}, basis {:.1e}",
        lemma2_residual(k, n).unwrap(),
        lemma3_residual(k, n).unwrap(),
        lemma4_residual(k, n).unwrap(),
        basis_pair_residual(k, n).unwrap(),
    );

    // The harmonics conjugate the radial symbol direction into a
    // constant matrix; the residual measures how exactly.
    let mut worst = 0f64;
    for i in 0..6 {
        let theta = 0.3 + 0.4 * i as f64;
        let phi = 0.7 * i as f64;
        worst = worst.max(intertwining_residual_3d(k, n, theta, phi).unwrap());
    }
    println!("worst intertwining residual over sample angles: {worst:.1e}");
}
