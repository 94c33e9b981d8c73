//! Mode profiles: the Funk-Hecke coefficients mu_k\[F\], the curves
//! lambda_k(r) whose supremum over k and r gives the sharp constant,
//! and the half-sum profiles of the Dirac problem.
//!
//! lambda_k(r) = (r^{d-1} psi(r)^2 / phi'(r)) * mu_k[F_w(r^2(1 - .))]
//! where mu_k includes the |S^{d-2}| surface factor.

use rayon::prelude::*;

use crate::problem::{fw_eval, DispersionKind, Family, ProblemSpec};
use crate::quad::{node_weight_pairs, Rule};
use crate::special::{legendre_d, sphere_measure};
use crate::{Error, Result};

#[cfg(test)]
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Quadrature rule choices for the angular integral on [-1, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchemeRule {
    GaussLegendre,
    GaussJacobi { alpha: f64, beta: f64 },
    GaussChebyshev,
    /// Recursive bisection to the given absolute tolerance.
    Adaptive { tol: f64 },
}

/// How to integrate against (1-t^2)^{(d-3)/2} on [-1, 1]. The
/// exponent fields record which (1-t) and (1+t) powers of the full
/// integrand the rule absorbs into its weight.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureScheme {
    pub rule: SchemeRule,
    pub node_count: usize,
    pub exponent_plus: f64,
    pub exponent_minus: f64,
}

impl QuadratureScheme {
    pub fn legendre(node_count: usize) -> Self {
        QuadratureScheme {
            rule: SchemeRule::GaussLegendre,
            node_count,
            exponent_plus: 0.0,
            exponent_minus: 0.0,
        }
    }
    pub fn jacobi(alpha: f64, beta: f64, node_count: usize) -> Self {
        QuadratureScheme {
            rule: SchemeRule::GaussJacobi { alpha, beta },
            node_count,
            exponent_plus: alpha,
            exponent_minus: beta,
        }
    }
    pub fn chebyshev(node_count: usize) -> Self {
        QuadratureScheme {
            rule: SchemeRule::GaussChebyshev,
            node_count,
            exponent_plus: -0.5,
            exponent_minus: -0.5,
        }
    }
    pub fn adaptive(tol: f64) -> Self {
        QuadratureScheme {
            rule: SchemeRule::Adaptive { tol },
            node_count: 16,
            exponent_plus: 0.0,
            exponent_minus: 0.0,
        }
    }

    /// Folds the surface measure (1-t^2)^{(d-3)/2} alone; the right
    /// default for integrands smooth up to the endpoints.
    pub fn for_measure(d: u32) -> Self {
        let e = (d as f64 - 3.0) / 2.0;
        Self::jacobi(e, e, BASE_NODES)
    }

    fn absorbed(&self) -> (f64, f64) {
        match self.rule {
            SchemeRule::GaussLegendre | SchemeRule::Adaptive { .. } => (0.0, 0.0),
            SchemeRule::GaussJacobi { alpha, beta } => (alpha, beta),
            SchemeRule::GaussChebyshev => (-0.5, -0.5),
        }
    }

    fn table_rule(&self) -> Rule {
        match self.rule {
            SchemeRule::GaussLegendre | SchemeRule::Adaptive { .. } => Rule::Legendre,
            SchemeRule::GaussJacobi { alpha, beta } => Rule::Jacobi { alpha, beta },
            SchemeRule::GaussChebyshev => Rule::Jacobi { alpha: -0.5, beta: -0.5 },
        }
    }
}

/// Default node count; error estimates come from a doubled-node rerun.
pub const BASE_NODES: usize = 128;

/// |S^{d-2}| Int F(t) p_{d,k}(t) (1-t^2)^{(d-3)/2} dt with an estimated
/// absolute error. The rule's absorbed exponents are compensated, so
/// any scheme integrates the same quantity.
pub fn mu_k<F: Fn(f64) -> f64>(
    f: F,
    d: u32,
    k: u32,
    scheme: &QuadratureScheme,
) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("mu_k needs d >= 2, got {d}")));
    }
    let measure = (d as f64 - 3.0) / 2.0;
    let surface = sphere_measure(d - 2);
    if let SchemeRule::Adaptive { tol } = scheme.rule {
        let g = |t: f64| -> Result<f64> {
            Ok(f(t) * legendre_d(d, k.into(), t)? * (1.0 - t * t).powf(measure))
        };
        let value = adaptive_bisect(&g, -1.0, 1.0, tol, 0)?;
        return Ok((surface * value, tol * surface));
    }

    let (alpha, beta) = scheme.absorbed();
    let e_plus = measure - alpha;
    let e_minus = measure - beta;
    let eval = |n: usize| -> Result<f64> {
        let pairs = node_weight_pairs(scheme.table_rule(), n)?;
        let mut acc = 0.0;
        for &(t, w) in pairs.iter() {
            acc += w
                * f(t)
                * legendre_d(d, k.into(), t)?
                * (1.0 - t).powf(e_plus)
                * (1.0 + t).powf(e_minus);
        }
        Ok(acc)
    };
    let coarse = eval(scheme.node_count)?;
    let fine = eval(2 * scheme.node_count)?;
    Ok((surface * fine, surface * (fine - coarse).abs()))
}

fn adaptive_bisect(
    g: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    if depth > 24 {
        return Err(Error::QuadratureFailure(format!(
            "adaptive refinement stalled on [{a}, {b}] before reaching tolerance {tol}"
        )));
    }
    let pairs = node_weight_pairs(Rule::Legendre, 16)?;
    let panel = |lo: f64, hi: f64| -> Result<f64> {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for &(x, w) in pairs.iter() {
            acc += w * g(mid + half * x)?;
        }
        Ok(acc * half)
    };
    let whole = panel(a, b)?;
    let m = 0.5 * (a + b);
    let split = panel(a, m)? + panel(m, b)?;
    if (whole - split).abs() <= tol.max(1e-300) {
        return Ok(split);
    }
    let half_tol = 0.5 * tol;
    Ok(adaptive_bisect(g, a, m, half_tol, depth + 1)?
        + adaptive_bisect(g, m, b, half_tol, depth + 1)?)
}

// ---------------------------------------------------------------------
// The two integral representations of the mode integral.

// Angular route: integrate in t with a Jacobi weight matched to the
// endpoint behaviour of F_w(r^2(1-t)) times the surface measure.
fn angular_alpha(spec: &ProblemSpec) -> f64 {
    let d = spec.d as f64;
    let s = spec.weight.s;
    match spec.weight.family {
        Family::TypeB => (s - 3.0) / 2.0,
        Family::TypeA | Family::TypeC if s < d => (s - 3.0) / 2.0,
        _ => (d - 3.0) / 2.0,
    }
}

fn mode_integral_angular(spec: &ProblemSpec, k: u32, r: f64, nodes: usize) -> Result<f64> {
    let d = spec.d;
    let df = d as f64;
    let measure = (df - 3.0) / 2.0;
    let alpha = angular_alpha(spec);
    let beta = measure;
    let pairs = node_weight_pairs(Rule::Jacobi { alpha, beta }, nodes)?;
    let e_plus = measure - alpha;
    let mut acc = 0.0;
    for &(t, w) in pairs.iter() {
        let u = r * r * (1.0 - t);
        acc += w * fw_eval(&spec.weight, d, u)? * legendre_d(d, k.into(), t)? * (1.0 - t).powf(e_plus);
    }
    Ok(sphere_measure(d - 2) * acc)
}

// Frequency route: substitute v = sqrt(2 u) = r sqrt(2(1-t)), turning
// the integral into one against w_hat(v) on [0, 2r]. Used at large r,
// where the angular integrand concentrates at t = 1 faster than a
// fixed-node rule resolves.
const FREQ_PANEL: f64 = 4.0;
const FREQ_CUTOFF: f64 = 760.0;

fn mode_integral_frequency(spec: &ProblemSpec, k: u32, r: f64, nodes: usize) -> Result<f64> {
    let d = spec.d;
    let df = d as f64;
    let s = spec.weight.s;
    let measure = (df - 3.0) / 2.0;
    let v_hi = (2.0 * r).min(FREQ_CUTOFF);
    let hard_edge = 2.0 * r <= FREQ_CUTOFF;

    // w_hat(v) v^{d-2} ~ v^{beta0} at the origin.
    let beta0 = match spec.weight.family {
        Family::TypeA | Family::TypeC => s.min(df) - 2.0,
        _ => df - 2.0,
    };
    let gl = node_weight_pairs(Rule::Legendre, nodes)?;
    let first = node_weight_pairs(Rule::Jacobi { alpha: 0.0, beta: beta0 }, nodes)?;
    let last = node_weight_pairs(Rule::Jacobi { alpha: measure, beta: 0.0 }, nodes)?;

    // Integrand without its origin/edge singular factors:
    // w_hat(v) p_{d,k}(1 - v^2/(2 r^2)) (v^2/2)^{(d-3)/2}
    //   (2 - v^2/(2 r^2))^{(d-3)/2} v.
    let smooth = |v: f64, strip_origin: bool, strip_edge: bool| -> Result<f64> {
        let t = 1.0 - v * v / (2.0 * r * r);
        let mut val = fw_eval(&spec.weight, d, v * v / 2.0)? * legendre_d(d, k.into(), t)?;
        val *= (v * v / 2.0).powf(measure) * v;
        if strip_origin {
            val /= v.powf(beta0);
        }
        let edge = 2.0 - v * v / (2.0 * r * r);
        if strip_edge {
            // edge = (2r - v)(2r + v)/(2 r^2); the vanishing factor is
            // carried by the Jacobi weight.
            val *= ((2.0 * r + v) / (2.0 * r * r)).powf(measure);
        } else {
            val *= edge.powf(measure);
        }
        Ok(val)
    };

    let n_panels = (v_hi / FREQ_PANEL).ceil().max(1.0) as usize;
    let mut acc = 0.0;
    for j in 0..n_panels {
        let lo = FREQ_PANEL * j as f64;
        let hi = (lo + FREQ_PANEL).min(v_hi);
        let is_first = j == 0;
        let is_last = hard_edge && j + 1 == n_panels;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (lo + hi);
        let panel = if is_first && is_last {
            // Single panel with singular behaviour at both ends; only
            // reachable for r <= 2, which the route choice avoids.
            return Err(Error::QuadratureFailure(format!(
                "frequency route invoked at r = {r}, below its validity range"
            )));
        } else if is_first {
            let mut p = 0.0;
            for &(x, w) in first.iter() {
                let v = half * (1.0 + x);
                p += w * smooth(v, true, false)?;
            }
            p * half.powf(beta0 + 1.0)
        } else if is_last {
            let mut p = 0.0;
            for &(x, w) in last.iter() {
                let v = mid + half * x;
                p += w * smooth(v, false, true)?;
            }
            // (2r - v) = (hi - v) here since hi = 2r.
            p * half * half.powf(measure)
        } else {
            let mut p = 0.0;
            for &(x, w) in gl.iter() {
                let v = mid + half * x;
                p += w * smooth(v, false, false)?;
            }
            p * half
        };
        acc += panel;
        if !is_first && panel.abs() <= 1e-18 * acc.abs() {
            break;
        }
    }
    Ok(sphere_measure(d - 2) * acc / r.powf(df - 1.0))
}

/// Which representation evaluates the mode integral at radius r.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Angular,
    Frequency,
}

pub fn route_for(spec: &ProblemSpec, r: f64) -> Route {
    match spec.weight.family {
        Family::TypeB => Route::Angular,
        _ if r <= 20.0 => Route::Angular,
        _ => Route::Frequency,
    }
}

pub(crate) fn mode_integral_via(
    spec: &ProblemSpec,
    k: u32,
    r: f64,
    route: Route,
) -> Result<(f64, f64)> {
    let (coarse, fine) = match route {
        Route::Angular => (
            mode_integral_angular(spec, k, r, BASE_NODES)?,
            mode_integral_angular(spec, k, r, 2 * BASE_NODES)?,
        ),
        Route::Frequency => (
            mode_integral_frequency(spec, k, r, 16)?,
            mode_integral_frequency(spec, k, r, 32)?,
        ),
    };
    Ok((fine, (fine - coarse).abs()))
}

fn resolve_k(spec: &ProblemSpec, k: i32) -> Result<u32> {
    if k >= 0 {
        Ok(k as u32)
    } else if spec.d == 2 {
        Ok((-k) as u32)
    } else {
        Err(Error::IndexOutOfRange(format!(
            "mode index k = {k} is negative; only d = 2 aliases negative modes"
        )))
    }
}

/// lambda_k(r) with an estimated absolute error. For d = 2 a negative k
/// aliases to |k|; elsewhere negative k is an error.
pub fn lambda_k(spec: &ProblemSpec, k: i32, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda_k needs r > 0, got {r}"
        )));
    }
    let k = resolve_k(spec, k)?;
    let front = r.powf(spec.d as f64 - 1.0) * spec.smoothing.eval(r).powi(2)
        / spec.dispersion.dphi(r);
    let (mode, err) = mode_integral_via(spec, k, r, route_for(spec, r))?;
    Ok((front * mode, front.abs() * err))
}

/// The Dirac mode profile
/// (1/2)(lambda_k + lambda_{k+1}) + (m/(2 phi_m(r))) |lambda_k - lambda_{k+1}|.
/// For d = 2 a negative k aliases through lambda_tilde_{-k-1} = lambda_tilde_k.
pub fn dirac_lambda_k(spec: &ProblemSpec, k: i32, r: f64) -> Result<(f64, f64)> {
    if spec.dispersion.kind != DispersionKind::Relativistic {
        return Err(Error::InvalidParameter(
            "the Dirac profiles need the relativistic dispersion sqrt(r^2 + m^2)".into(),
        ));
    }
    let k = if k >= 0 {
        k
    } else if spec.d == 2 {
        -k - 1
    } else {
        return Err(Error::IndexOutOfRange(format!(
            "mode index k = {k} is negative; only d = 2 aliases negative modes"
        )));
    };
    let (lo, e_lo) = lambda_k(spec, k, r)?;
    let (hi, e_hi) = lambda_k(spec, k + 1, r)?;
    let m = spec.dispersion.m;
    Ok((dirac_combination(lo, hi, m, r), e_lo + e_hi))
}

/// Scalar combination behind [`dirac_lambda_k`]:
/// (1/2)(lk + lk1) + (m/(2 sqrt(r^2 + m^2))) |lk - lk1|.
pub fn dirac_combination(lk: f64, lk1: f64, m: f64, r: f64) -> f64 {
    let phi = (r * r + m * m).sqrt();
    0.5 * (lk + lk1) + m / (2.0 * phi) * (lk - lk1).abs()
}

/// The radial Dirac profile
/// (1/2)(lambda_0 + lambda_1 + (m^2/(r^2 + m^2))(lambda_0 - lambda_1)).
pub fn dirac_lambda_rad(spec: &ProblemSpec, r: f64) -> Result<(f64, f64)> {
    if spec.dispersion.kind != DispersionKind::Relativistic {
        return Err(Error::InvalidParameter(
            "the Dirac profiles need the relativistic dispersion sqrt(r^2 + m^2)".into(),
        ));
    }
    let (l0, e0) = lambda_k(spec, 0, r)?;
    let (l1, e1) = lambda_k(spec, 1, r)?;
    let m = spec.dispersion.m;
    let w = m * m / (r * r + m * m);
    Ok((0.5 * (l0 + l1 + w * (l0 - l1)), e0 + e1))
}

/// Closed-form TypeB mode constant
/// c_k = 2^{2-s} pi Gamma(s-1) Gamma((d-s)/2 + k)
///       / (Gamma(s/2)^2 Gamma((d+s)/2 + k - 1)),
/// with lambda_k/(2 pi)^{d-1} = a c_k whenever psi^2 = a r^{1-s} phi'.
pub fn type_b_mode_constant(d: u32, s: f64, k: u32) -> Result<f64> {
    let df = d as f64;
    if !(s > 1.0 && s < df) {
        return Err(Error::InvalidParameter(format!(
            "typeB mode constant needs 1 < s < d, got s = {s} in d = {d}"
        )));
    }
    use statrs::function::gamma::ln_gamma;
    let kf = k as f64;
    Ok(((2.0 - s) * std::f64::consts::LN_2
        + std::f64::consts::PI.ln()
        + ln_gamma(s - 1.0)
        + ln_gamma((df - s) / 2.0 + kf)
        - 2.0 * ln_gamma(s / 2.0)
        - ln_gamma((df + s) / 2.0 + kf - 1.0))
    .exp())
}

/// The coefficient a with psi(r)^2 = a r^{1-s} phi'(r), probed at two
/// radii; errors if the triple is not of that shape.
pub fn type_b_psi_coefficient(spec: &ProblemSpec) -> Result<f64> {
    let s = spec.weight.s;
    let probe = |r: f64| {
        spec.smoothing.eval(r).powi(2) / (r.powf(1.0 - s) * spec.dispersion.dphi(r))
    };
    let a1 = probe(0.7);
    let a2 = probe(1.3);
    if !((a1 - a2).abs() <= 1e-10 * a1.abs().max(a2.abs())) {
        return Err(Error::InvalidParameter(
            "psi^2 is not proportional to r^{1-s} phi'; no closed-form mode constant".into(),
        ));
    }
    Ok(a1)
}

// ---------------------------------------------------------------------
// Profile sampling.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Schrodinger,
    Dirac,
    DiracRadial,
}

impl ProfileKind {
    pub fn label(&self) -> &'static str {
        match self {
            ProfileKind::Schrodinger => "schrodinger",
            ProfileKind::Dirac => "dirac",
            ProfileKind::DiracRadial => "dirac_radial",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LambdaProfile {
    pub k: i32,
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub kind: ProfileKind,
}

impl LambdaProfile {
    pub const CSV_HEADER: &'static str = "k,r,value,err_estimate,kind";

    /// CSV rows k, r, value, err_estimate, kind with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        self.append_csv_rows(&mut out);
        out
    }

    /// Appends the data rows only, for multi-profile exports that share
    /// one header.
    pub fn append_csv_rows(&self, out: &mut String) {
        for i in 0..self.r_grid.len() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{}\n",
                self.k,
                self.r_grid[i],
                self.values[i],
                self.errors[i],
                self.kind.label()
            ));
        }
    }
}

/// Evaluates one profile over a grid, in parallel across grid points.
/// The F_w cache inside the spec is shared by all evaluations.
pub fn sample_profile(
    spec: &ProblemSpec,
    k: i32,
    kind: ProfileKind,
    r_grid: &[f64],
) -> Result<LambdaProfile> {
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "profile grid must be strictly increasing".into(),
        ));
    }
    if r_grid.first().is_some_and(|&r| r <= 0.0) {
        return Err(Error::InvalidParameter(
            "profile grid must be positive".into(),
        ));
    }
    // Warm the transform cache once before fanning out.
    if let Some(&r0) = r_grid.first() {
        fw_eval(&spec.weight, spec.d, r0 * r0 * 1e-3)?;
    }
    let rows: Vec<(f64, f64)> = r_grid
        .par_iter()
        .map(|&r| match kind {
            ProfileKind::Schrodinger => lambda_k(spec, k, r),
            ProfileKind::Dirac => dirac_lambda_k(spec, k, r),
            ProfileKind::DiracRadial => dirac_lambda_rad(spec, r),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LambdaProfile {
        k,
        r_grid: r_grid.to_vec(),
        values: rows.iter().map(|&(v, _)| v).collect(),
        errors: rows.iter().map(|&(_, e)| e).collect(),
        kind,
    })
}
