//! Walks through the block reduction behind the first-order constants.
//! A pair of adjacent scalar mode values (lambda_k, lambda_{k+1})
//! combines with the mass coupling into a small Hermitian block whose
//! top eigenvalue is the first-order mode profile.

use kysharp::dirac::{
    anticommutation_residual, dirac_lambda_matrix, extremiser_space, gamma_set, symbol,
};
use kysharp::lambda::dirac_combination;

fn main() {
    for d in [2u32, 3] {
        let gs = gamma_set(d).unwrap();
        println!(
            "d = {d}: {} generators of size {dim}x{dim}, anticommutation residual {:.1e}",
            gs.alphas.len(),
            anticommutation_residual(&gs),
            dim = gs.dim(),
        );

        // The symbol squares to (|xi|^2 + m^2) I; its spectrum is +/- phi.
        let xi = vec![0.3; d as usize];
        let a = symbol(&gs, &xi, 1.0).unwrap();
        let sq = a * a;
        println!("  symbol squared, diagonal entry: {:.12}", sq[(0, 0)].re);

        let (lk, lk1, m, r) = (2.0, 1.25, 1.0, 0.8);
        let block = dirac_lambda_matrix(d, lk, lk1, m, r).unwrap();
        println!("  block for (lambda_k, lambda_k+1, m, r) = ({lk}, {lk1}, {m}, {r}):");
        for i in 0..block.dim() {
            print!("   ");
            for j in 0..block.dim() {
                let z = block[(i, j)];
                print!(" {:+.4}{:+.4}i", z.re, z.im);
            }
            println!();
        }

        let es = extremiser_space(d, lk, lk1, m, r).unwrap();
        let scalar = dirac_combination(lk, lk1, m, r);
        println!(
            "  top eigenvalue {:.12} vs scalar combination {:.12}",
            es.max_eigenvalue, scalar
        );
        println!(
            "  eigenspace dimension {}, full spectrum {:?}",
            es.max_eigenspace_basis.len(),
            es.full_spectrum
                .iter()
                .map(|v| (v * 1e6).round() / 1e6)
                .collect::<Vec<_>>()
        );
        println!();
    }
}
