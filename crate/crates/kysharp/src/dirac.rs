//! Finite-dimensional Dirac algebra for d = 2, 3.
//!
//! Provides the gamma matrices, the symbol `A_xi = m beta + sum_j xi_j
//! alpha_j`, its closed-form propagator `e^{-it A_xi}`, the spectral
//! projections onto the +/- branches of the dispersion, and the block
//! matrices `Lambda_tilde_k(r)` whose maximal eigenvalue is the Dirac
//! mode profile. Since every symbol here squares to a multiple of the
//! identity, all eigen-structure is computed in closed form.

use crate::linalg::{anticommutator, ci, cr, kron, pauli, CMat, CVec};
use crate::{Error, Result};

/// A concrete gamma representation: `d` Hermitian anchor matrices and
/// `beta`, mutually anti-commuting with squares equal to the identity.
#[derive(Clone, Debug)]
pub struct GammaSet {
    pub d: u32,
    pub alphas: Vec<CMat>,
    pub beta: CMat,
}

impl GammaSet {
    /// Spinor dimension: 2 for d = 2, 4 for d = 3.
    pub fn dim(&self) -> usize {
        self.beta.dim()
    }
}

/// The representation used throughout: d = 2 takes `alpha = (sigma_1,
/// sigma_2)`, `beta = sigma_3`; d = 3 takes `alpha_j = sigma_1 (x)
/// sigma_j`, `beta = sigma_3 (x) I`.
pub fn gamma_set(d: u32) -> Result<GammaSet> {
    match d {
        2 => Ok(GammaSet {
            d,
            alphas: vec![pauli(1), pauli(2)],
            beta: pauli(3),
        }),
        3 => Ok(GammaSet {
            d,
            alphas: (1..=3).map(|j| kron(&pauli(1), &pauli(j))).collect(),
            beta: kron(&pauli(3), &CMat::identity(2)),
        }),
        _ => Err(Error::InvalidParameter(format!(
            "gamma matrices are provided for d in {{2, 3}}, got d = {d}"
        ))),
    }
}

/// Largest entry of `alpha_j alpha_l + alpha_l alpha_j - 2 delta_jl I`
/// over all pairs, with `beta` included as the (d+1)-th matrix.
pub fn anticommutation_residual(gs: &GammaSet) -> f64 {
    let n = gs.dim();
    let mut mats: Vec<&CMat> = gs.alphas.iter().collect();
    mats.push(&gs.beta);
    let mut worst = 0.0f64;
    for (j, a) in mats.iter().enumerate() {
        for (l, b) in mats.iter().enumerate() {
            let mut res = anticommutator(a, b);
            if j == l {
                res = res - CMat::identity(n).scale(cr(2.0));
            }
            worst = worst.max(res.max_abs());
        }
    }
    worst
}

/// The symbol `A_xi = m beta + sum_j xi_j alpha_j`; Hermitian with
/// `A_xi^2 = (|xi|^2 + m^2) I`.
pub fn symbol(gs: &GammaSet, xi: &[f64], m: f64) -> Result<CMat> {
    if xi.len() != gs.d as usize {
        return Err(Error::InvalidParameter(format!(
            "symbol needs a frequency vector of length d = {}, got {}",
            gs.d,
            xi.len()
        )));
    }
    if !(m >= 0.0) {
        return Err(Error::InvalidParameter(format!("mass m = {m} must be >= 0")));
    }
    let mut a = gs.beta.scale(cr(m));
    for (alpha, &x) in gs.alphas.iter().zip(xi) {
        a = a + alpha.scale(cr(x));
    }
    Ok(a)
}

fn phi_of(xi: &[f64], m: f64) -> f64 {
    (xi.iter().map(|x| x * x).sum::<f64>() + m * m).sqrt()
}

/// The unitary propagator
/// `e^{-it A_xi} = cos(t phi_m) I - i (sin(t phi_m)/phi_m) A_xi`,
/// with the factor `sin(t phi)/phi` continued by `t` at `phi = 0`.
pub fn propagator(gs: &GammaSet, xi: &[f64], m: f64, t: f64) -> Result<CMat> {
    let a = symbol(gs, xi, m)?;
    let phi = phi_of(xi, m);
    let sinc = if phi > 0.0 { (t * phi).sin() / phi } else { t };
    Ok(CMat::identity(gs.dim()).scale(cr((t * phi).cos())) + a.scale(ci(-sinc)))
}

/// Spectral projections of `value` onto the +/- phi_m eigenspaces of
/// the symbol: `f_pm = (1/2)(f +/- (1/phi_m) A_xi f)`.
pub fn pm_projection(gs: &GammaSet, value: &CVec, xi: &[f64], m: f64) -> Result<(CVec, CVec)> {
    let phi = phi_of(xi, m);
    if phi == 0.0 {
        return Err(Error::DegenerateSymbol(
            "pm_projection needs (|xi|, m) != (0, 0)".into(),
        ));
    }
    let a = symbol(gs, xi, m)?;
    if value.dim() != gs.dim() {
        return Err(Error::InvalidParameter(format!(
            "spinor dimension {} does not match the representation ({})",
            value.dim(),
            gs.dim()
        )));
    }
    let af = (a * *value).scale(cr(1.0 / phi));
    let plus = (*value + af).scale(cr(0.5));
    let minus = (*value - af).scale(cr(0.5));
    Ok((plus, minus))
}

fn check_lambda_args(d: u32, lk: f64, lk1: f64, m: f64, r: f64) -> Result<()> {
    if d != 2 && d != 3 {
        return Err(Error::InvalidParameter(format!(
            "block matrices are provided for d in {{2, 3}}, got d = {d}"
        )));
    }
    if !(lk >= 0.0) || !(lk1 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mode values must be >= 0, got ({lk}, {lk1})"
        )));
    }
    if !(m >= 0.0) {
        return Err(Error::InvalidParameter(format!("mass m = {m} must be >= 0")));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius r = {r} must be > 0")));
    }
    Ok(())
}

/// The mass-coupling involution `X` with `X^2 = (r^2 + m^2) I`:
/// `m sigma_3 + r sigma_1` for d = 2 and
/// `m sigma_3 (x) I + r sigma_1 (x) sigma_3` for d = 3.
fn coupling_involution(d: u32, m: f64, r: f64) -> CMat {
    if d == 2 {
        pauli(3).scale(cr(m)) + pauli(1).scale(cr(r))
    } else {
        kron(&pauli(3), &CMat::identity(2)).scale(cr(m))
            + kron(&pauli(1), &pauli(3)).scale(cr(r))
    }
}

/// The Hermitian block matrix
/// `Lambda_tilde_k(r) = (1/2)(lk + lk1) I + (m (lk - lk1) / (2 phi_m^2)) X`
/// whose maximal eigenvalue is the Dirac mode profile.
pub fn dirac_lambda_matrix(d: u32, lk: f64, lk1: f64, m: f64, r: f64) -> Result<CMat> {
    check_lambda_args(d, lk, lk1, m, r)?;
    let n = if d == 2 { 2 } else { 4 };
    let phi_sq = r * r + m * m;
    let mean = 0.5 * (lk + lk1);
    let c = m * (lk - lk1) / (2.0 * phi_sq);
    Ok(CMat::identity(n).scale(cr(mean)) + coupling_involution(d, m, r).scale(cr(c)))
}

/// Eigen-structure of a Hermitian matrix: the maximal eigenvalue, an
/// orthonormal basis of its eigenspace, and the full spectrum sorted in
/// decreasing order.
#[derive(Clone, Debug)]
pub struct EigenStructure {
    pub max_eigenvalue: f64,
    pub max_eigenspace_basis: Vec<CVec>,
    pub full_spectrum: Vec<f64>,
}

/// Maximal eigenspace `W_k(r)` of `Lambda_tilde_k(r)`: the full spinor
/// space when `m (lk - lk1) = 0`, otherwise the +/- phi_m eigenspace of
/// the coupling involution per the sign of `m (lk - lk1)`.
pub fn extremiser_space(d: u32, lk: f64, lk1: f64, m: f64, r: f64) -> Result<EigenStructure> {
    check_lambda_args(d, lk, lk1, m, r)?;
    let n = if d == 2 { 2usize } else { 4 };
    let phi = (r * r + m * m).sqrt();
    let mean = 0.5 * (lk + lk1);
    let c = m * (lk - lk1) / (2.0 * phi * phi);
    let mult = n / 2;

    if c == 0.0 {
        return Ok(EigenStructure {
            max_eigenvalue: mean,
            max_eigenspace_basis: (0..n).map(|i| CVec::basis(n, i)).collect(),
            full_spectrum: vec![mean; n],
        });
    }

    let hi = mean + c.abs() * phi;
    let lo = mean - c.abs() * phi;
    let mut full_spectrum = Vec::with_capacity(n);
    for _ in 0..mult {
        full_spectrum.push(hi);
    }
    for _ in 0..mult {
        full_spectrum.push(lo);
    }

    // Eigenvectors of X = m sigma_3 + r sigma_1 in each 2 x 2 block:
    // +phi has (phi + m, r), -phi has (phi - m, -r), both nonzero
    // because r > 0. The d = 3 involution splits into the index blocks
    // {e1, e3} and {e2, e4}, the latter with r replaced by -r.
    let want_plus = c > 0.0;
    let block = |r_eff: f64| -> (f64, f64) {
        if want_plus {
            (phi + m, r_eff)
        } else {
            (phi - m, -r_eff)
        }
    };
    let basis = if d == 2 {
        let (x, y) = block(r);
        vec![CVec::from_real(&[x, y]).normalize()]
    } else {
        let (x13, y13) = block(r);
        let (x24, y24) = block(-r);
        vec![
            CVec::from_real(&[x13, 0.0, y13, 0.0]).normalize(),
            CVec::from_real(&[0.0, x24, 0.0, y24]).normalize(),
        ]
    };
    Ok(EigenStructure {
        max_eigenvalue: hi,
        max_eigenspace_basis: basis,
        full_spectrum,
    })
}
