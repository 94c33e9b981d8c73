//! Block spherical harmonics for the Dirac reduction.
//!
//! In two dimensions the diagonal harmonics `E_k(theta)` commute the
//! angular part of the Dirac symbol into the constant matrix
//! `sigma_1`. In three dimensions the analogous 4 x 4 matrix harmonics
//! `E_k^n(theta, phi)` are built from scalar spherical harmonics
//! `Y_k^n` and a family of real 2 x 2 coupling matrices `A_k^n` that
//! shift the degree by one. The coupling matrices satisfy
//!
//! ```text
//! (sigma . omega) Y-block_k = Y-block_{k+1} A_k^n
//!                           + Y-block_{k-1} (A_{k-1}^n)^T     (1)
//! A_{k+1}^n A_k^n = 0                                         (2)
//! (A_k^n)^T A_k^n + A_{k-1}^n (A_{k-1}^n)^T = I               (3)
//! det A_k^n = 0                                               (4)
//! ```
//!
//! where `Y-block_j = diag(Y_j^n, Y_j^{n+1})`. Identity (3) holds on
//! the interior index range `-k <= n <= k - 1`; at the extreme indices
//! the `A_{k-1}^n` term has no in-range counterpart. All residuals of
//! these identities are exposed as functions so they can be checked
//! numerically at any index.

use crate::linalg::{cr, CMat, CVec, C64};
use crate::quad::{node_weight_pairs, Rule};
use crate::special::{normalizing_constant, spherical_harmonic_or_zero};
use crate::{Error, Result};
use once_cell::sync::Lazy;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

/// A coupling matrix together with its kernel vector and transfer
/// vector: `A u = 0`, `v = A^T u_next` where `u_next` is the kernel
/// vector one degree up, and `A = u_next v^T`.
#[derive(Clone, Debug)]
pub struct CouplingTriple {
    pub k: i64,
    pub n: i64,
    pub a: [[f64; 2]; 2],
    pub u: CVec,
    pub v: CVec,
}

fn index_check(k: i64, n: i64) -> Result<()> {
    if k < 0 || n < -k - 1 || n > k {
        return Err(Error::IndexOutOfRange(format!(
            "coupling index (k, n) = ({k}, {n}) outside 0 <= k, -k-1 <= n <= k"
        )));
    }
    Ok(())
}

fn raw_coupling(k: i64, n: i64) -> Result<[[f64; 2]; 2]> {
    index_check(k, n)?;
    if n < 0 {
        // Reflection rule A_k^n = -sigma_1 A_k^{-(n+1)} sigma_1.
        let b = raw_coupling(k, -(n + 1))?;
        return Ok([[-b[1][1], -b[1][0]], [-b[0][1], -b[0][0]]]);
    }
    let (kf, nf) = (k as f64, n as f64);
    let nk_n = normalizing_constant(k, n)?;
    let nk1_n = normalizing_constant(k + 1, n)?;
    let nk1_n1 = normalizing_constant(k + 1, n + 1)?;
    let a11 = (kf - nf + 1.0) * nk_n / ((2.0 * kf + 1.0) * nk1_n);
    let a21 = -(2.0 * nf + 1.0) * nk_n / ((2.0 * kf + 1.0) * nk1_n1);
    // The (k - n) prefactor vanishes at n = k, where N_k^{n+1} is not
    // defined; the entry is zero before that constant is ever needed.
    let (a12, a22) = if n == k {
        (0.0, 0.0)
    } else {
        let nk_n1 = normalizing_constant(k, n + 1)?;
        (
            (kf - nf) * (kf - nf + 1.0) * nk_n1 / ((2.0 * nf + 1.0) * (2.0 * kf + 1.0) * nk1_n),
            -(kf - nf) * nk_n1 / ((2.0 * kf + 1.0) * nk1_n1),
        )
    };
    Ok([[a11, a12], [a21, a22]])
}

/// The real 2 x 2 degree-shift matrix `A_k^n`, `-k-1 <= n <= k`.
pub fn coupling_matrix(k: i64, n: i64) -> Result<[[f64; 2]; 2]> {
    raw_coupling(k, n)
}

fn coupling_or_zero(k: i64, n: i64) -> [[f64; 2]; 2] {
    raw_coupling(k, n).unwrap_or([[0.0; 2]; 2])
}

/// Unit kernel vector of a singular 2 x 2 matrix with a deterministic
/// phase: components below 1e-12 are snapped to zero and the first
/// nonvanishing component is made positive.
fn kernel_unit(a: &[[f64; 2]; 2]) -> CVec {
    let n0 = a[0][0].hypot(a[0][1]);
    let n1 = a[1][0].hypot(a[1][1]);
    let row = if n0 >= n1 { a[0] } else { a[1] };
    let scale = n0.max(n1);
    assert!(scale > 0.0, "coupling matrices never vanish identically");
    let mut x = -row[1] / scale;
    let mut y = row[0] / scale;
    let norm = x.hypot(y);
    x /= norm;
    y /= norm;
    if x.abs() < 1e-12 {
        x = 0.0;
    }
    if y.abs() < 1e-12 {
        y = 0.0;
    }
    let norm = x.hypot(y);
    x /= norm;
    y /= norm;
    let lead = if x != 0.0 { x } else { y };
    if lead < 0.0 {
        x = -x;
        y = -y;
    }
    CVec::from_real(&[x, y])
}

fn transfer_vector(a: &[[f64; 2]; 2], u_next: &CVec) -> CVec {
    // v = A^T u_next; entries of A are real.
    CVec::from_slice(&[
        cr(a[0][0]) * u_next[0] + cr(a[1][0]) * u_next[1],
        cr(a[0][1]) * u_next[0] + cr(a[1][1]) * u_next[1],
    ])
}

static TRIPLES: Lazy<RwLock<HashMap<(i64, i64), Arc<CouplingTriple>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Memoized coupling data for `(k, n)`.
pub fn coupling_triple(k: i64, n: i64) -> Result<Arc<CouplingTriple>> {
    index_check(k, n)?;
    if let Some(hit) = TRIPLES.read().unwrap().get(&(k, n)) {
        return Ok(hit.clone());
    }
    let a = raw_coupling(k, n)?;
    let u = kernel_unit(&a);
    let u_next = kernel_unit(&raw_coupling(k + 1, n)?);
    let v = transfer_vector(&a, &u_next);
    let triple = Arc::new(CouplingTriple { k, n, a, u, v });
    let mut map = TRIPLES.write().unwrap();
    Ok(map.entry((k, n)).or_insert(triple).clone())
}

/// The kernel vector `u_k^n` and transfer vector `v_k^n`.
pub fn basis_pair(k: i64, n: i64) -> Result<(CVec, CVec)> {
    let t = coupling_triple(k, n)?;
    Ok((t.u, t.v))
}

/// The 2D matrix harmonic
/// `E_k(theta) = diag(e^{ik theta}, e^{i(k+1) theta}) / sqrt(2 pi)`.
pub fn matrix_harmonic_2d(k: i64, theta: f64) -> CMat {
    let norm = 1.0 / (2.0 * PI).sqrt();
    let mut e = CMat::zero(2);
    e[(0, 0)] = C64::from_polar(norm, k as f64 * theta);
    e[(1, 1)] = C64::from_polar(norm, (k + 1) as f64 * theta);
    e
}

/// `diag(Y_k^n, Y_k^{n+1})` with out-of-range harmonics set to zero.
pub fn matrix_y(k: i64, n: i64, theta: f64, phi: f64) -> CMat {
    let mut m = CMat::zero(2);
    m[(0, 0)] = spherical_harmonic_or_zero(k, n, theta, phi);
    m[(1, 1)] = spherical_harmonic_or_zero(k, n + 1, theta, phi);
    m
}

/// The angular Pauli symbol
/// `sigma_1 sin(theta) cos(phi) + sigma_2 sin(theta) sin(phi) + sigma_3 cos(theta)`.
pub fn sigma_omega(theta: f64, phi: f64) -> CMat {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    CMat::from_rows(&[
        &[cr(ct), C64::new(st * cp, -st * sp)],
        &[C64::new(st * cp, st * sp), cr(-ct)],
    ])
}

/// The 4 x 4 matrix harmonic `E_k^n(theta, phi)` with columns
/// `(Yb_k v, 0; 0, Yb_k v; 0, Yb_{k+1} u; Yb_{k+1} u, 0)` where
/// `Yb_j = diag(Y_j^n, Y_j^{n+1})`, `v = v_k^n` and `u = u_{k+1}^n`.
pub fn matrix_harmonic_3d(k: i64, n: i64, theta: f64, phi: f64) -> Result<CMat> {
    let v = coupling_triple(k, n)?.v;
    let u = coupling_triple(k + 1, n)?.u;
    let yk = matrix_y(k, n, theta, phi);
    let yk1 = matrix_y(k + 1, n, theta, phi);
    let lower = CVec::from_slice(&[yk[(0, 0)] * v[0], yk[(1, 1)] * v[1]]);
    let upper = CVec::from_slice(&[yk1[(0, 0)] * u[0], yk1[(1, 1)] * u[1]]);
    let mut e = CMat::zero(4);
    for i in 0..2 {
        e[(i, 0)] = lower[i];
        e[(i + 2, 1)] = lower[i];
        e[(i + 2, 2)] = upper[i];
        e[(i, 3)] = upper[i];
    }
    Ok(e)
}

fn mat2_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn mat2_transpose(a: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn mat2_max_abs(a: &[[f64; 2]; 2]) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn mat2_to_cmat(a: &[[f64; 2]; 2]) -> CMat {
    CMat::from_real_rows(&[&a[0], &a[1]])
}

/// Residual of the degree-shift identity (1) at one angle.
pub fn lemma1_residual(k: i64, n: i64, theta: f64, phi: f64) -> Result<f64> {
    index_check(k, n)?;
    let lhs = sigma_omega(theta, phi) * matrix_y(k, n, theta, phi);
    let up = matrix_y(k + 1, n, theta, phi) * mat2_to_cmat(&coupling_or_zero(k, n));
    let down =
        matrix_y(k - 1, n, theta, phi) * mat2_to_cmat(&mat2_transpose(&coupling_or_zero(k - 1, n)));
    Ok((lhs - up - down).max_abs())
}

/// Residual of the annihilation identity (2): `|A_{k+1}^n A_k^n|`.
pub fn lemma2_residual(k: i64, n: i64) -> Result<f64> {
    let a_k = coupling_matrix(k, n)?;
    let a_k1 = coupling_matrix(k + 1, n)?;
    Ok(mat2_max_abs(&mat2_mul(&a_k1, &a_k)))
}

/// Residual of the partition identity (3); defined on the interior
/// range `-k <= n <= k - 1`.
pub fn lemma3_residual(k: i64, n: i64) -> Result<f64> {
    if k < 1 || n < -k || n > k - 1 {
        return Err(Error::IndexOutOfRange(format!(
            "partition identity needs 1 <= k and -k <= n <= k-1, got ({k}, {n})"
        )));
    }
    let a_k = coupling_matrix(k, n)?;
    let a_km1 = coupling_matrix(k - 1, n)?;
    let mut s = mat2_mul(&mat2_transpose(&a_k), &a_k);
    let t = mat2_mul(&a_km1, &mat2_transpose(&a_km1));
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] += t[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    Ok(mat2_max_abs(&s))
}

/// Residual of the singularity identity (4): `|det A_k^n|`.
pub fn lemma4_residual(k: i64, n: i64) -> Result<f64> {
    let a = coupling_matrix(k, n)?;
    Ok((a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs())
}

/// Largest residual among the basis-pair identities: unit norms,
/// orthogonality, `A u = 0`, `A v = u_next`, `(A_{k-1})^T v = 0` (when
/// in range) and the rank-one factorization `A = u_next v^T`.
pub fn basis_pair_residual(k: i64, n: i64) -> Result<f64> {
    let t = coupling_triple(k, n)?;
    let u_next = coupling_triple(k + 1, n)?.u;
    let a = mat2_to_cmat(&t.a);
    let mut worst = (t.u.norm() - 1.0).abs();
    worst = worst.max((t.v.norm() - 1.0).abs());
    worst = worst.max(t.u.dot(&t.v).norm());
    worst = worst.max((a * t.u).max_abs());
    worst = worst.max((a * t.v - u_next).max_abs());
    if n >= -(k - 1) - 1 && n <= k - 1 {
        let prev = coupling_triple(k - 1, n)?;
        let a_prev_t = mat2_to_cmat(&mat2_transpose(&prev.a));
        worst = worst.max((a_prev_t * t.v).max_abs());
    }
    let rank1 = CMat::from_fn(2, |i, j| u_next[i] * t.v[j].conj());
    worst = worst.max((a - rank1).max_abs());
    Ok(worst)
}

/// Residual of the 2D commutation identities
/// `(sigma_1 cos + sigma_2 sin) E_k = E_k sigma_1`, `sigma_3 E_k = E_k sigma_3`.
pub fn intertwining_residual_2d(k: i64, theta: f64) -> f64 {
    let e = matrix_harmonic_2d(k, theta);
    let omega = sigma_omega(std::f64::consts::FRAC_PI_2, theta);
    let r1 = (omega * e - e * crate::linalg::pauli(1)).max_abs();
    let r3 = (crate::linalg::pauli(3) * e - e * crate::linalg::pauli(3)).max_abs();
    r1.max(r3)
}

/// Residual of the 3D commutation identities
/// `(alpha . omega) E = E (sigma_1 (x) I)` and `beta E = E (sigma_3 (x) sigma_3)`.
pub fn intertwining_residual_3d(k: i64, n: i64, theta: f64, phi: f64) -> Result<f64> {
    use crate::linalg::{kron, pauli};
    let e = matrix_harmonic_3d(k, n, theta, phi)?;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let omega = [st * cp, st * sp, ct];
    let gs = crate::dirac::gamma_set(3)?;
    let mut alpha_omega = CMat::zero(4);
    for (aj, &w) in gs.alphas.iter().zip(&omega) {
        alpha_omega = alpha_omega + aj.scale(cr(w));
    }
    let r_alpha = (alpha_omega * e - e * kron(&pauli(1), &CMat::identity(2))).max_abs();
    let r_beta = (gs.beta * e - e * kron(&pauli(3), &pauli(3))).max_abs();
    Ok(r_alpha.max(r_beta))
}

/// One node of a product quadrature on the unit sphere.
#[derive(Clone, Copy, Debug)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Product quadrature on S^2: Gauss-Legendre in cos(theta) with
/// `2 k_max + 2` nodes times a uniform trapezoid in phi with
/// `4 k_max + 4` points. Exact for harmonic products up to degree
/// `2 k_max + 1`, hence for all inner products of `E_k^n` columns with
/// `k <= k_max - 1`.
pub fn sphere_quadrature(k_max: i64) -> Result<Vec<SpherePoint>> {
    if k_max < 0 {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} must be >= 0"
        )));
    }
    let n_theta = (2 * k_max + 2) as usize;
    let n_phi = (4 * k_max + 4) as usize;
    let pairs = node_weight_pairs(Rule::Legendre, n_theta)?;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut points = Vec::with_capacity(n_theta * n_phi);
    for &(x, w) in pairs.iter() {
        let theta = x.acos();
        for j in 0..n_phi {
            points.push(SpherePoint {
                theta,
                phi: j as f64 * dphi,
                weight: w * dphi,
            });
        }
    }
    Ok(points)
}

/// Mode coefficients of a spinor field on a radial grid: the map
/// `(k, n) -> f_k^n(r_i)` with `f_k^n(r) = r <columns of E_k^n, f(r .)>`.
#[derive(Clone, Debug)]
pub struct ModeCoefficients {
    pub k_max: i64,
    pub r_grid: Vec<f64>,
    pub coeffs: BTreeMap<(i64, i64), Vec<CVec>>,
}

impl ModeCoefficients {
    /// Sum of `|f_k^n(r_i)|^2` over modes, per grid index.
    pub fn energy_by_radius(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.r_grid.len()];
        for series in self.coeffs.values() {
            for (slot, c) in acc.iter_mut().zip(series) {
                *slot += c.norm_sq();
            }
        }
        acc
    }

    /// CSV export with one row per `(k, n, r)` and eight real columns
    /// for the C^4 coefficient value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,n,r,c1_re,c1_im,c2_re,c2_im,c3_re,c3_im,c4_re,c4_im\n");
        for ((k, n), series) in &self.coeffs {
            for (r, c) in self.r_grid.iter().zip(series) {
                out.push_str(&format!("{k},{n},{r:.16e}"));
                for i in 0..4 {
                    out.push_str(&format!(",{:.16e},{:.16e}", c[i].re, c[i].im));
                }
                out.push('\n');
            }
        }
        out
    }
}

fn check_r_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::InvalidParameter("empty radial grid".into()));
    }
    for pair in r_grid.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidParameter(
                "radial grid must be strictly increasing".into(),
            ));
        }
    }
    if !(r_grid[0] > 0.0) {
        return Err(Error::InvalidParameter("radial grid must be positive".into()));
    }
    Ok(())
}

/// Decomposes a spinor field into matrix-harmonic modes up to `k_max`.
/// The field is sampled at Cartesian points `xi = r omega(theta, phi)`.
pub fn decompose_3d<F: Fn(&[f64; 3]) -> CVec>(
    f: F,
    k_max: i64,
    r_grid: &[f64],
) -> Result<ModeCoefficients> {
    check_r_grid(r_grid)?;
    let grid = sphere_quadrature(k_max + 1)?;
    // Samples of f at every (radius, sphere node) pair.
    let mut samples: Vec<Vec<CVec>> = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let per_node: Vec<CVec> = grid
            .iter()
            .map(|p| {
                let (st, ct) = p.theta.sin_cos();
                let (sp, cp) = p.phi.sin_cos();
                f(&[r * st * cp, r * st * sp, r * ct])
            })
            .collect();
        for v in &per_node {
            for i in 0..4 {
                if !v[i].re.is_finite() || !v[i].im.is_finite() {
                    return Err(Error::QuadratureFailure(format!(
                        "field sample at r = {r} is not finite"
                    )));
                }
            }
        }
        samples.push(per_node);
    }
    let mut coeffs = BTreeMap::new();
    for k in 0..=k_max {
        for n in -k - 1..=k {
            let adjoints: Vec<CMat> = grid
                .iter()
                .map(|p| matrix_harmonic_3d(k, n, p.theta, p.phi).map(|e| e.adjoint()))
                .collect::<Result<_>>()?;
            let series: Vec<CVec> = r_grid
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    let mut acc = CVec::zero(4);
                    for (q, p) in grid.iter().enumerate() {
                        acc = acc + (adjoints[q] * samples[i][q]).scale(cr(p.weight));
                    }
                    acc.scale(cr(r))
                })
                .collect();
            coeffs.insert((k, n), series);
        }
    }
    Ok(ModeCoefficients {
        k_max,
        r_grid: r_grid.to_vec(),
        coeffs,
    })
}

/// Evaluates the synthesized field
/// `f(xi) = r^{-1} sum_{k, n} E_k^n(theta, phi) f_k^n(r)` at the grid
/// radius `r_grid[r_index]` and the given angles.
pub fn synthesize_3d(
    coeffs: &ModeCoefficients,
    r_index: usize,
    theta: f64,
    phi: f64,
) -> Result<CVec> {
    if r_index >= coeffs.r_grid.len() {
        return Err(Error::InvalidParameter(format!(
            "radial index {r_index} outside the grid"
        )));
    }
    let r = coeffs.r_grid[r_index];
    let mut acc = CVec::zero(4);
    for ((k, n), series) in &coeffs.coeffs {
        let e = matrix_harmonic_3d(*k, *n, theta, phi)?;
        acc = acc + e * series[r_index];
    }
    Ok(acc.scale(cr(1.0 / r)))
}

/// Relative Parseval gap between `||f||^2` on the annulus spanned by
/// the grid and the mode-energy sum, both integrated radially by the
/// trapezoid rule on the same grid.
pub fn parseval_gap<F: Fn(&[f64; 3]) -> CVec>(f: F, k_max: i64, r_grid: &[f64]) -> Result<f64> {
    check_r_grid(r_grid)?;
    let grid = sphere_quadrature(k_max + 1)?;
    let coeffs = decompose_3d(&f, k_max, r_grid)?;
    let mode_energy = coeffs.energy_by_radius();
    let direct: Vec<f64> = r_grid
        .iter()
        .map(|&r| {
            let mut acc = 0.0;
            for p in &grid {
                let (st, ct) = p.theta.sin_cos();
                let (sp, cp) = p.phi.sin_cos();
                let v = f(&[r * st * cp, r * st * sp, r * ct]);
                acc += p.weight * v.norm_sq();
            }
            acc * r * r
        })
        .collect();
    let trapezoid = |ys: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 1..r_grid.len() {
            acc += 0.5 * (ys[i] + ys[i - 1]) * (r_grid[i] - r_grid[i - 1]);
        }
        acc
    };
    let lhs = trapezoid(&direct);
    let rhs = trapezoid(&mode_energy);
    if lhs == 0.0 {
        return Ok(rhs.abs());
    }
    Ok((lhs - rhs).abs() / lhs)
}
