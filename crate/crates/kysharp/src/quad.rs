//! Gauss-Legendre and Gauss-Jacobi node tables on [-1, 1].
//!
//! Node generation is delegated to `gauss_quad` (Golub-Welsch); tables
//! are cached per (rule, size) because profile scans request the same
//! rule at every radius.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::{Error, Result};

/// Weight family for quadrature on [-1, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rule {
    /// Unit weight.
    Legendre,
    /// Weight (1 - x)^alpha (1 + x)^beta with alpha, beta > -1.
    Jacobi { alpha: f64, beta: f64 },
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Key {
    tag: u8,
    n: usize,
    a: u64,
    b: u64,
}

fn cache_key(rule: Rule, n: usize) -> Key {
    match rule {
        Rule::Legendre => Key { tag: 0, n, a: 0, b: 0 },
        Rule::Jacobi { alpha, beta } => Key {
            tag: 1,
            n,
            a: alpha.to_bits(),
            b: beta.to_bits(),
        },
    }
}

static TABLES: Lazy<Mutex<HashMap<Key, Arc<[(f64, f64)]>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Nodes and weights of the n-point rule.
///
/// For [`Rule::Jacobi`] the weights absorb the factor
/// (1 - x)^alpha (1 + x)^beta, so the integrand handed to the rule must
/// not include it.
pub fn node_weight_pairs(rule: Rule, n: usize) -> Result<Arc<[(f64, f64)]>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "quadrature size must be positive".into(),
        ));
    }
    let key = cache_key(rule, n);
    if let Some(t) = TABLES.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let pairs: Vec<(f64, f64)> = match rule {
        Rule::Legendre => gauss_quad::GaussLegendre::new(n.try_into().unwrap())
            .as_node_weight_pairs()
            .to_vec(),
        Rule::Jacobi { alpha, beta } => {
            let a = alpha.try_into().map_err(|_| {
                Error::InvalidParameter(format!(
                    "jacobi exponent alpha = {alpha} must be finite and > -1"
                ))
            })?;
            let b = beta.try_into().map_err(|_| {
                Error::InvalidParameter(format!(
                    "jacobi exponent beta = {beta} must be finite and > -1"
                ))
            })?;
            gauss_quad::GaussJacobi::new(n.try_into().unwrap(), a, b)
                .as_node_weight_pairs()
                .to_vec()
        }
    };
    let arc: Arc<[(f64, f64)]> = pairs.into();
    TABLES.lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
pub fn integrate_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let pairs = node_weight_pairs(Rule::Legendre, n).expect("positive size");
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in pairs.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Pairwise (cascade) summation. Deterministic for a fixed input order
/// and more accurate than sequential accumulation on long vectors.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}
