//! Gegenbauer polynomials, Legendre polynomials of general dimension,
//! sphere measures, harmonic normalizing constants and scalar spherical
//! harmonics.
//!
//! All polynomial evaluation is iterative forward recurrence; Gamma
//! ratios go through log-Gamma so degrees up to a few hundred stay in
//! range.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Gegenbauer polynomial C_n^p(x) by the three-term recurrence
/// (n+1) C_{n+1} = 2(n+p) x C_n - (n+2p-1) C_{n-1}, with C_{-1} = 0 and
/// C_0 = 1. Requires p > 0; n = -1 is allowed and gives 0.
pub fn gegenbauer(p: f64, n: i64, x: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gegenbauer parameter p = {p} must be positive"
        )));
    }
    if n < -1 {
        return Err(Error::InvalidParameter(format!(
            "gegenbauer degree n = {n} must be >= -1"
        )));
    }
    if n == -1 {
        return Ok(0.0);
    }
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..n {
        let jf = j as f64;
        let next = (2.0 * (jf + p) * x * cur - (jf + 2.0 * p - 1.0) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// C_n^p(1) = Gamma(n + 2p) / (Gamma(2p) n!), evaluated in log space.
pub fn gegenbauer_at_one(p: f64, n: i64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gegenbauer parameter p = {p} must be positive"
        )));
    }
    if n < -1 {
        return Err(Error::InvalidParameter(format!(
            "gegenbauer degree n = {n} must be >= -1"
        )));
    }
    if n == -1 {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    Ok((ln_gamma(nf + 2.0 * p) - ln_gamma(2.0 * p) - ln_gamma(nf + 1.0)).exp())
}

/// Chebyshev polynomial T_k(x), the degree-k Legendre polynomial in
/// dimension two.
pub fn chebyshev_t(k: i64, x: f64) -> f64 {
    if k <= 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = x;
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Legendre polynomial of dimension d, normalized so p_{d,k}(1) = 1.
///
/// d = 2 is the Chebyshev polynomial T_k; d >= 3 is the Gegenbauer
/// ratio C_k^{(d-2)/2}(t) / C_k^{(d-2)/2}(1).
pub fn legendre_d(d: u32, k: i64, t: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension d = {d} must be >= 2"
        )));
    }
    if k < 0 {
        return Err(Error::InvalidParameter(format!(
            "degree k = {k} must be >= 0"
        )));
    }
    if d == 2 {
        return Ok(chebyshev_t(k, t));
    }
    let p = (d as f64 - 2.0) / 2.0;
    Ok(gegenbauer(p, k, t)? / gegenbauer_at_one(p, k)?)
}

/// Surface measure of the unit j-sphere: 2 pi^{(j+1)/2} / Gamma((j+1)/2).
pub fn sphere_measure(j: u32) -> f64 {
    let half = (j as f64 + 1.0) / 2.0;
    2.0 * (half * std::f64::consts::PI.ln() - ln_gamma(half)).exp()
}

/// Double factorial (2n - 1)!! with the (-1)!! = 1 convention.
/// Overflows f64 past n of roughly 150; the normalizing constant below
/// avoids it by staying in log space.
pub fn odd_double_factorial(n: u32) -> f64 {
    let mut acc = 1.0;
    let mut j = 1;
    while j <= 2 * n as i64 - 1 {
        acc *= j as f64;
        j += 2;
    }
    acc
}

/// ln (2n - 1)!! through the Gamma function.
fn ln_odd_double_factorial(n: f64) -> f64 {
    n * std::f64::consts::LN_2 + ln_gamma(n + 0.5) - 0.5 * std::f64::consts::PI.ln()
}

/// Normalizing constant N_k^n = (2n-1)!! ((k + 1/2)(k-n)!/(k+n)!)^{1/2}
/// of the scalar spherical harmonics, for 0 <= n <= k.
pub fn normalizing_constant(k: i64, n: i64) -> Result<f64> {
    if n < 0 || n > k {
        return Err(Error::InvalidParameter(format!(
            "normalizing constant needs 0 <= n <= k, got k = {k}, n = {n}"
        )));
    }
    let (kf, nf) = (k as f64, n as f64);
    let ln = ln_odd_double_factorial(nf)
        + 0.5 * ((kf + 0.5).ln() + ln_gamma(kf - nf + 1.0) - ln_gamma(kf + nf + 1.0));
    Ok(ln.exp())
}

/// Scalar spherical harmonic
/// Y_k^n(theta, phi) = (2 pi)^{-1/2} (-1)^{(n+|n|)/2} N_k^{|n|}
///     (sin theta)^{|n|} C_{k-|n|}^{|n|+1/2}(cos theta) e^{i n phi}
/// for |n| <= k, theta in [0, pi].
pub fn spherical_harmonic(k: i64, n: i64, theta: f64, phi: f64) -> Result<Complex64> {
    if n.abs() > k {
        return Err(Error::InvalidParameter(format!(
            "harmonic order |n| = {} exceeds degree k = {k}",
            n.abs()
        )));
    }
    let nu = n.abs();
    // (-1)^{(n+|n|)/2} is (-1)^n for n >= 0 and 1 for n < 0.
    let phase = if n >= 0 && n % 2 != 0 { -1.0 } else { 1.0 };
    let nn = normalizing_constant(k, nu)?;
    let body = phase
        * nn
        * theta.sin().powi(nu as i32)
        * gegenbauer(nu as f64 + 0.5, k - nu, theta.cos())?
        / (2.0 * std::f64::consts::PI).sqrt();
    Ok(Complex64::from_polar(1.0, n as f64 * phi) * body)
}

/// Like [`spherical_harmonic`] but identically zero when |n| > k, the
/// convention used inside block-matrix assembly.
pub(crate) fn spherical_harmonic_or_zero(k: i64, n: i64, theta: f64, phi: f64) -> Complex64 {
    if n.abs() > k {
        Complex64::new(0.0, 0.0)
    } else {
        spherical_harmonic(k, n, theta, phi).expect("|n| <= k")
    }
}

/// Relative residuals |L - R| / max(|L|, |R|, 1) of the three
/// contiguous-parameter Gegenbauer identities at (p, n, x):
///
/// 1. (n + p) C_n^p = p (C_n^{p+1} - C_{n-2}^{p+1}),        n >= 1
/// 2. 4p(n+p)(1-x^2) C_{n-1}^{p+1}
///        = (n+2p-1)(n+2p) C_{n-1}^p - n(n+1) C_{n+1}^p,    n >= 0
/// 3. 2(n+p) x C_n^p = (n+1) C_{n+1}^p + (n+2p-1) C_{n-1}^p, n >= 0
///
/// The first identity is vacuous at n = 0 and its slot is reported as 0.
pub fn gegenbauer_identity_residuals(p: f64, n: i64, x: f64) -> Result<[f64; 3]> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!(
            "identity degree n = {n} must be >= 0"
        )));
    }
    let nf = n as f64;
    let rel = |l: f64, r: f64| (l - r).abs() / l.abs().max(r.abs()).max(1.0);

    let r1 = if n >= 1 {
        let l = (nf + p) * gegenbauer(p, n, x)?;
        let r = p * (gegenbauer(p + 1.0, n, x)? - gegenbauer(p + 1.0, n - 2, x)?);
        rel(l, r)
    } else {
        0.0
    };
    let r2 = {
        let l = 4.0 * p * (nf + p) * (1.0 - x * x) * gegenbauer(p + 1.0, n - 1, x)?;
        let r = (nf + 2.0 * p - 1.0) * (nf + 2.0 * p) * gegenbauer(p, n - 1, x)?
            - nf * (nf + 1.0) * gegenbauer(p, n + 1, x)?;
        rel(l, r)
    };
    let r3 = {
        let l = 2.0 * (nf + p) * x * gegenbauer(p, n, x)?;
        let r = (nf + 1.0) * gegenbauer(p, n + 1, x)?
            + (nf + 2.0 * p - 1.0) * gegenbauer(p, n - 1, x)?;
        rel(l, r)
    };
    Ok([r1, r2, r3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{node_weight_pairs, Rule};
    use std::f64::consts::PI;

    // Double-double helpers for the Rodrigues oracle below: the series
    // cancels up to ~9 decimal digits near k = 20, so plain f64 terms
    // cannot certify a 1e-8 agreement.
    #[derive(Clone, Copy)]
    struct Dd {
        hi: f64,
        lo: f64,
    }
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }
    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd { hi: p, lo: a.mul_add(b, -p) }
    }
    fn dd_add(a: Dd, b: Dd) -> Dd {
        let s = two_sum(a.hi, b.hi);
        two_sum(s.hi, s.lo + a.lo + b.lo)
    }
    fn dd_mul_f64(a: Dd, b: f64) -> Dd {
        let p = two_prod(a.hi, b);
        two_sum(p.hi, p.lo + a.lo * b)
    }
    fn dd_mul(a: Dd, b: Dd) -> Dd {
        let p = two_prod(a.hi, b.hi);
        two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi)
    }
    fn dd_div_f64(a: Dd, b: f64) -> Dd {
        let q0 = a.hi / b;
        let p = two_prod(q0, b);
        let rem = (a.hi - p.hi) - p.lo + a.lo;
        two_sum(q0, rem / b)
    }

    // Rodrigues evaluation of p_{d,k}(t):
    //   (1-t^2)^{(d-3)/2} p_{d,k}(t)
    //       = (-1)^k Gamma((d-1)/2) / (2^k Gamma(k + (d-1)/2))
    //         d^k/dt^k (1-t^2)^{k + (d-3)/2},
    // with the derivative taken termwise in the binomial series of
    // (1-t^2)^a, a = k + (d-3)/2. Valid for |t| < 1; the endpoints use
    // the parity values forced by the normalization.
    fn rodrigues_legendre(d: u32, k: i64, t: f64) -> f64 {
        if t == 1.0 {
            return 1.0;
        }
        if t == -1.0 {
            return if k % 2 == 0 { 1.0 } else { -1.0 };
        }
        let a = k as f64 + (d as f64 - 3.0) / 2.0;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let half = (d as f64 - 1.0) / 2.0;
        let pref = sign
            * (ln_gamma(half) - k as f64 * std::f64::consts::LN_2 - ln_gamma(k as f64 + half))
                .exp();

        // Series coefficients of (1-t^2)^a: gamma_0 = 1,
        // gamma_{j+1} = gamma_j (j - a) / (j + 1); term j contributes
        // gamma_j * (2j)(2j-1)...(2j-k+1) * t^{2j-k} after k derivatives.
        let mut gamma = Dd { hi: 1.0, lo: 0.0 };
        let mut acc = Dd { hi: 0.0, lo: 0.0 };
        // Running power t^{2j - k}, advanced by t^2 per step once 2j >= k.
        let mut tpow = Dd { hi: if k % 2 == 0 { 1.0 } else { t }, lo: 0.0 };
        let mut quiet = 0;
        for j in 0..200_000i64 {
            if 2 * j >= k {
                let mut term = dd_mul(gamma, tpow);
                for i in 0..k {
                    term = dd_mul_f64(term, (2 * j - i) as f64);
                }
                acc = dd_add(acc, term);
                if j as f64 > a + k as f64
                    && term.hi.abs() <= 1e-20 * acc.hi.abs().max(1e-300)
                {
                    quiet += 1;
                    if quiet >= 3 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                tpow = dd_mul_f64(dd_mul_f64(tpow, t), t);
            }
            gamma = dd_div_f64(dd_mul_f64(gamma, j as f64 - a), j as f64 + 1.0);
        }
        pref * (1.0 - t * t).powf((3.0 - d as f64) / 2.0) * (acc.hi + acc.lo)
    }

    #[test]
    fn gegenbauer_base_cases() {
        assert_eq!(gegenbauer(0.5, 0, 0.3).unwrap(), 1.0);
        assert!((gegenbauer(0.5, 1, 0.3).unwrap() - 0.3).abs() <= 1e-15);
        assert!((gegenbauer(0.5, 2, 0.5).unwrap() - (-0.125)).abs() <= 1e-15);
        assert_eq!(gegenbauer(1.5, -1, 0.7).unwrap(), 0.0);
        assert!(gegenbauer(0.0, 3, 0.5).is_err());
        assert!(gegenbauer(-1.0, 3, 0.5).is_err());
        assert!(gegenbauer(1.0, -2, 0.5).is_err());
    }

    #[test]
    fn gegenbauer_recurrence_consistency() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p: f64 = rng.gen_range(0.1..4.0);
            let n: i64 = rng.gen_range(1..40);
            let x: f64 = rng.gen_range(-1.0..1.0);
            let c_next = gegenbauer(p, n + 1, x).unwrap();
            let c = gegenbauer(p, n, x).unwrap();
            let c_prev = gegenbauer(p, n - 1, x).unwrap();
            let nf = n as f64;
            let resid = (nf + 1.0) * c_next - 2.0 * (nf + p) * x * c + (nf + 2.0 * p - 1.0) * c_prev;
            let scale = c_next.abs().max(c.abs()).max(1.0);
            assert!(resid.abs() / scale <= 1e-12, "p={p} n={n} x={x}");
        }
    }

    #[test]
    fn gegenbauer_at_one_matches_recurrence() {
        for &(p, n) in &[(0.5, 7), (1.0, 12), (1.5, 20), (2.0, 35), (2.5, 8)] {
            let via_rec = gegenbauer(p, n, 1.0).unwrap();
            let via_gamma = gegenbauer_at_one(p, n).unwrap();
            assert!(
                ((via_rec - via_gamma) / via_gamma).abs() <= 1e-12,
                "p={p} n={n}: {via_rec} vs {via_gamma}"
            );
        }
    }

    #[test]
    fn legendre_d_agrees_with_rodrigues_series() {
        for d in 2..=6u32 {
            for k in 0..=20i64 {
                let mut worst = 0.0f64;
                for i in 0..=200 {
                    let t = -1.0 + i as f64 / 100.0;
                    let via_ratio = legendre_d(d, k, t).unwrap();
                    let via_rodrigues = rodrigues_legendre(d, k, t);
                    worst = worst.max((via_ratio - via_rodrigues).abs());
                }
                assert!(worst <= 1e-8, "d={d} k={k}: worst |diff| = {worst:.3e}");
            }
        }
    }

    #[test]
    fn legendre_d_low_degrees() {
        for d in 2..=6u32 {
            for &t in &[-1.0, -0.4, 0.0, 0.7, 1.0] {
                assert_eq!(legendre_d(d, 0, t).unwrap(), 1.0);
                assert!((legendre_d(d, 1, t).unwrap() - t).abs() <= 1e-14, "d={d} t={t}");
            }
        }
        assert!((legendre_d(3, 2, 0.5).unwrap() + 0.125).abs() <= 1e-14);
    }

    #[test]
    fn legendre_d_is_one_at_the_right_endpoint() {
        for d in 2..=6u32 {
            for k in 0..=20i64 {
                assert!(
                    (legendre_d(d, k, 1.0).unwrap() - 1.0).abs() <= 1e-12,
                    "d={d} k={k}"
                );
            }
        }
    }

    #[test]
    fn legendre_d_orthogonality() {
        // Weight (1-t^2)^{(d-3)/2} is a symmetric Jacobi weight; 64 nodes
        // integrate the degree <= 20 products exactly.
        for d in 2..=5u32 {
            let e = (d as f64 - 3.0) / 2.0;
            let pairs = node_weight_pairs(Rule::Jacobi { alpha: e, beta: e }, 64).unwrap();
            for k in 0..=10i64 {
                for j in 0..k {
                    let dot: f64 = pairs
                        .iter()
                        .map(|&(t, w)| {
                            w * legendre_d(d, k, t).unwrap() * legendre_d(d, j, t).unwrap()
                        })
                        .sum();
                    assert!(dot.abs() <= 1e-10, "d={d} k={k} j={j}: {dot:.3e}");
                }
            }
        }
    }

    #[test]
    fn sphere_measures() {
        assert!((sphere_measure(0) - 2.0).abs() <= 1e-14);
        assert!((sphere_measure(1) - 2.0 * PI).abs() <= 1e-14);
        assert!((sphere_measure(2) - 4.0 * PI).abs() <= 1e-13);
        assert!((sphere_measure(3) - 2.0 * PI * PI).abs() <= 1e-13);
    }

    #[test]
    fn double_factorials() {
        assert_eq!(odd_double_factorial(0), 1.0);
        assert_eq!(odd_double_factorial(1), 1.0);
        assert_eq!(odd_double_factorial(2), 3.0);
        assert_eq!(odd_double_factorial(3), 15.0);
        assert_eq!(odd_double_factorial(5), 945.0);
        for n in 0..20u32 {
            let via_ln = ln_odd_double_factorial(n as f64).exp();
            let direct = odd_double_factorial(n);
            assert!(((via_ln - direct) / direct).abs() <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn normalizing_constant_anchors() {
        assert!((normalizing_constant(0, 0).unwrap() - 0.5f64.sqrt()).abs() <= 1e-14);
        assert!((normalizing_constant(1, 0).unwrap() - 1.5f64.sqrt()).abs() <= 1e-14);
        assert!((normalizing_constant(1, 1).unwrap() - 3f64.sqrt() / 2.0).abs() <= 1e-14);
        assert!((normalizing_constant(2, 0).unwrap() - 2.5f64.sqrt()).abs() <= 1e-14);
        assert!((normalizing_constant(2, 1).unwrap() - (5.0f64 / 12.0).sqrt()).abs() <= 1e-14);
        assert!((normalizing_constant(2, 2).unwrap() - 3.0 * (5.0f64 / 48.0).sqrt()).abs() <= 1e-14);
        assert!(normalizing_constant(2, 3).is_err());
        assert!(normalizing_constant(2, -1).is_err());
    }

    #[test]
    fn constant_harmonic() {
        for &(theta, phi) in &[(0.3, 1.0), (1.2, 4.4), (2.9, 0.0)] {
            let y = spherical_harmonic(0, 0, theta, phi).unwrap();
            assert!((y.re - 1.0 / (4.0 * PI).sqrt()).abs() <= 1e-14);
            assert!(y.im.abs() <= 1e-16);
        }
    }

    #[test]
    fn polar_value_of_y10() {
        let y = spherical_harmonic(1, 0, 0.0, 0.0).unwrap();
        assert!((y.re - (3.0 / (4.0 * PI)).sqrt()).abs() <= 1e-14);
    }

    #[test]
    fn harmonic_orthonormality_on_the_sphere() {
        // Gauss-Legendre in cos(theta) times trapezoid in phi integrates
        // band-limited products exactly.
        let kmax = 4i64;
        let gl = node_weight_pairs(Rule::Legendre, 2 * kmax as usize + 2).unwrap();
        let nphi = 4 * kmax as usize + 4;
        let mut worst = 0.0f64;
        for k1 in 0..=kmax {
            for n1 in -k1..=k1 {
                for k2 in 0..=kmax {
                    for n2 in -k2..=k2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for &(c, w) in gl.iter() {
                            let theta = c.acos();
                            for q in 0..nphi {
                                let phi = 2.0 * PI * q as f64 / nphi as f64;
                                let a = spherical_harmonic(k1, n1, theta, phi).unwrap();
                                let b = spherical_harmonic(k2, n2, theta, phi).unwrap();
                                acc += w * (2.0 * PI / nphi as f64) * a * b.conj();
                            }
                        }
                        let expect = if k1 == k2 && n1 == n2 { 1.0 } else { 0.0 };
                        worst = worst.max((acc.re - expect).abs().max(acc.im.abs()));
                    }
                }
            }
        }
        assert!(worst <= 1e-10, "worst orthonormality defect {worst:.3e}");
    }

    #[test]
    fn negative_theta_reflection_identity() {
        // The printed formula evaluated at (-theta, -phi) with order -n
        // reproduces Y_k^n(theta, phi).
        for k in 0..=5i64 {
            for n in -k..=k {
                for &(theta, phi) in &[(0.4, 0.9), (1.3, 2.2), (2.8, 5.1)] {
                    let lhs = spherical_harmonic(k, n, theta, phi).unwrap();
                    // sin(-theta)^{|n|} with the recurrence in cos(-theta)
                    // is exactly the printed body at -theta.
                    let nu = n.abs();
                    let phase = if -n >= 0 && n % 2 != 0 { -1.0 } else { 1.0 };
                    let body = phase
                        * normalizing_constant(k, nu).unwrap()
                        * (-theta).sin().powi(nu as i32)
                        * gegenbauer(nu as f64 + 0.5, k - nu, (-theta).cos()).unwrap()
                        / (2.0 * PI).sqrt();
                    let rhs = Complex64::from_polar(1.0, -(n as f64) * -phi) * body;
                    assert!((lhs - rhs).norm() <= 1e-12, "k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn identity_residuals_are_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let p: f64 = rng.gen_range(0.3..3.5);
            let n: i64 = rng.gen_range(0..30);
            let x: f64 = rng.gen_range(-1.0..1.0);
            let r = gegenbauer_identity_residuals(p, n, x).unwrap();
            for (i, &ri) in r.iter().enumerate() {
                assert!(ri <= 1e-10, "identity {} at p={p} n={n} x={x}: {ri:.3e}", i + 1);
            }
        }
    }
}
