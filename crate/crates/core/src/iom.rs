//! Eigenvalues of the lattice integrals of motion, their trigonometric
//! closed forms and the large-L expansion.
//!
//! For a state `P` with momenta `t_k`,
//!
//! ```text
//! A_{2n-1} = (2n-2)! 2^{2n-1} (2 sum_{k in P} sin^{2n-1} t_k - sum_k sin^{2n-1} t_k)
//! A_{2n}   = -(2n-1)! 2^{2n} sum_k sin^{2n} t_k
//! ```
//!
//! The vacuum sum of odd sine powers has a closed form in `1/sin((2k-1)pi/2L)`
//! whose Laurent expansion in `1/L` separates a term linear in `L` (the
//! divergent part) from a finite part. The coefficient of the leading power
//! `(pi/2L)^{2n-1}` of the finite part is proportional to
//! `alpha_n I_{2n-1}(P) = 2n sum_{j in P} (j - delta/2)^{2n-1} + B_{2n}(1 - delta/2)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    bernoulli_polynomial, binomial, factorial, format_rational, int, rat, rat_int, to_f64,
    ExactCache, Rational,
};
use crate::operator::{multiset_deviation, real_spectrum};
use crate::spectrum::{enumerate_states, t_nodes, SpectrumState};
use crate::tl::IomTower;

fn odd_prefactor(n: usize) -> f64 {
    to_f64(&rat_int(factorial(2 * n as u64 - 2) << (2 * n - 1)))
}

/// Eigenvalue of `A_{2n-1}` on `state`.
pub fn a_odd_eigen(state: &SpectrumState, n: usize) -> f64 {
    assert!(n >= 1, "order starts at 1");
    let p = 2 * n as i32 - 1;
    let t = state.t_nodes();
    let all: f64 = t.iter().map(|t| t.sin().powi(p)).sum();
    let excited: f64 = state
        .partition()
        .iter()
        .map(|&k| t[k - 1].sin().powi(p))
        .sum();
    odd_prefactor(n) * (2.0 * excited - all)
}

/// Eigenvalue of `A_{2n}` on `state` from the trigonometric sum.
pub fn a_even_eigen(state: &SpectrumState, n: usize) -> f64 {
    assert!(n >= 1, "order starts at 1");
    let sum: f64 = state
        .t_nodes()
        .iter()
        .map(|t| t.sin().powi(2 * n as i32))
        .sum();
    -to_f64(&rat_int(factorial(2 * n as u64 - 1) << (2 * n))) * sum
}

/// `sum_j sin^{2n-1} t_j`, summed directly.
pub fn sin_odd_sum_direct(sites: usize, delta: u8, n: usize) -> f64 {
    t_nodes(sites, delta)
        .iter()
        .map(|t| t.sin().powi(2 * n as i32 - 1))
        .sum()
}

/// Closed form of `sum_j sin^{2n-1} t_j`:
/// `2^{2-2n} sum_{k=1}^{n} (-1)^{k+1} C(2n-1, n-k) cos((delta-1) theta_k) / sin theta_k`
/// with `theta_k = (2k-1) pi / 2L`.
pub fn sin_odd_sum_closed(sites: usize, delta: u8, n: usize) -> f64 {
    assert!(n >= 1, "order starts at 1");
    let n64 = n as u64;
    let shift = f64::from(delta) - 1.0;
    let sum: f64 = (1..=n64)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let theta = (2 * k - 1) as f64 * PI / (2 * sites) as f64;
            sign * to_f64(&rat_int(binomial(2 * n64 - 1, n64 - k))) * (shift * theta).cos()
                / theta.sin()
        })
        .sum();
    sum / 4f64.powi(n as i32 - 1)
}

/// Exact `sum_k sin^{2n} t_k = L C(2n, n) / 4^n`, valid for `L > n`.
pub fn sin_even_sum_exact(sites: usize, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidArgument("order n starts at 1".into()));
    }
    if sites <= n {
        return Err(Error::BelowThreshold {
            order: 2 * n,
            threshold: n,
            l: sites,
        });
    }
    let n64 = n as u64;
    Ok(rat_int(int(sites as i64) * binomial(2 * n64, n64)) / rat_int(int(1) << (2 * n)))
}

pub fn sin_even_sum_direct(sites: usize, delta: u8, n: usize) -> f64 {
    t_nodes(sites, delta)
        .iter()
        .map(|t| t.sin().powi(2 * n as i32))
        .sum()
}

/// `sum_{k=1}^{n} (-1)^{k+1} C(2n-1, n-k) (2k-1)^{2m-1}`; zero for `m < n`.
pub fn moment_sum(n: usize, m: usize) -> BigInt {
    static CACHE: std::sync::OnceLock<ExactCache<(usize, usize), BigInt>> =
        std::sync::OnceLock::new();
    CACHE
        .get_or_init(ExactCache::new)
        .get_or_insert_with((n, m), || {
            let (n64, m64) = (n as u64, m as u32);
            (1..=n64).fold(BigInt::zero(), |acc, k| {
                let term = binomial(2 * n64 - 1, n64 - k) * int(2 * k as i64 - 1).pow(2 * m64 - 1);
                if k % 2 == 1 {
                    acc + term
                } else {
                    acc - term
                }
            })
        })
}

/// `2^{3-2n} sum_{k=1}^{n} (-1)^{k+1} C(2n-1, n-k) / (2k-1)`.
pub fn divergent_bracket(n: usize) -> Rational {
    let n64 = n as u64;
    let sum = (1..=n64).fold(Rational::zero(), |acc, k| {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc + rat_int(binomial(2 * n64 - 1, n64 - k) * sign) / rat_int(int(2 * k as i64 - 1))
    });
    // 2^{3-2n}: 2 for n = 1, 1/2^{2n-3} afterwards
    if n == 1 {
        sum * rat(2, 1)
    } else {
        sum / rat_int(int(1) << (2 * n - 3))
    }
}

/// Part of the `A_{2n-1}` eigenvalue linear in `L`:
/// `-(2n-2)! 2^{2n-1} (L/pi) * divergent_bracket(n)`. Independent of the state.
pub fn a_odd_divergent(sites: usize, n: usize) -> f64 {
    -odd_prefactor(n) * (sites as f64 / PI) * to_f64(&divergent_bracket(n))
}

/// Largest deviation between the sorted spectrum of the operator
/// `A_{2k-1}` and the analytic eigenvalues over all states, relative to the
/// largest analytic eigenvalue.
pub fn odd_spectrum_deviation(tower: &IomTower, k: usize) -> Result<f64> {
    if k == 0 || k > tower.max_odd_order() {
        return Err(Error::BellOrder {
            n: 2 * k.max(1) - 1,
            available: 2 * tower.max_odd_order() - 1,
        });
    }
    let a = tower.odd(k);
    let numeric = real_spectrum(a, 1e-8 * a.frobenius_norm().max(1.0))?;
    let mut analytic: Vec<f64> = enumerate_states(tower.sites())?
        .iter()
        .map(|s| a_odd_eigen(s, k))
        .collect();
    analytic.sort_by(f64::total_cmp);
    let scale = analytic.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    Ok(multiset_deviation(&numeric, &analytic) / scale)
}

#[derive(Debug, Clone, Serialize)]
pub struct IomEigenRecord {
    pub state: SpectrumState,
    pub order: usize,
    pub a_odd: f64,
    pub a_even: f64,
    pub divergent: f64,
    pub finite: f64,
}

pub fn iom_record(state: &SpectrumState, n: usize) -> IomEigenRecord {
    let a_odd = a_odd_eigen(state, n);
    let divergent = a_odd_divergent(state.sites(), n);
    IomEigenRecord {
        state: state.clone(),
        order: n,
        a_odd,
        a_even: a_even_eigen(state, n),
        divergent,
        finite: a_odd - divergent,
    }
}

/// `alpha_n = -sqrt(pi) n (2n-1) 3^n Gamma(4n-1) / (2^{2n-2} n! Gamma(3n-1/2))`,
/// exact: the half-integer Gamma cancels the `sqrt(pi)`.
pub fn alpha(n: usize) -> Rational {
    assert!(n >= 1, "order starts at 1");
    let n64 = n as u64;
    // Gamma(3n - 1/2) = (6n-2)! sqrt(pi) / (4^{3n-1} (3n-1)!)
    let numer = int(n as i64)
        * int(2 * n as i64 - 1)
        * int(3).pow(n as u32)
        * factorial(4 * n64 - 2)
        * (int(1) << (2 * (3 * n - 1)))
        * factorial(3 * n64 - 1);
    let denom = (int(1) << (2 * n - 2)) * factorial(n64) * factorial(6 * n64 - 2);
    -(rat_int(numer) / rat_int(denom))
}

/// `alpha_m I_{2m-1}(P) = 2m sum_{j in P} (j - delta/2)^{2m-1} + B_{2m}(1 - delta/2)`.
pub fn alpha_times_i(partition: &[usize], delta: u8, m: usize) -> Rational {
    assert!(m >= 1, "order starts at 1");
    let half_delta = rat(i64::from(delta), 2);
    let power = 2 * m as i32 - 1;
    let sum = partition.iter().fold(Rational::zero(), |acc, &j| {
        let base = rat(j as i64, 1) - &half_delta;
        acc + num_traits::pow::Pow::pow(base, power)
    });
    rat(2 * m as i64, 1) * sum + bernoulli_polynomial(2 * m, &(Rational::one() - half_delta))
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuumIom {
    /// Exact `alpha_m I_{2m-1}` as `p/q`.
    pub alpha_times_i: String,
    /// Exact `alpha_m` as `p/q`.
    pub alpha: String,
    pub i_estimate: f64,
    #[serde(skip)]
    pub alpha_times_i_exact: Rational,
    #[serde(skip)]
    pub alpha_exact: Rational,
}

pub fn continuum_iom(partition: &[usize], delta: u8, m: usize) -> ContinuumIom {
    let ai = alpha_times_i(partition, delta, m);
    let a = alpha(m);
    let i_estimate = to_f64(&(&ai / &a));
    ContinuumIom {
        alpha_times_i: format_rational(&ai),
        alpha: format_rational(&a),
        i_estimate,
        alpha_times_i_exact: ai,
        alpha_exact: a,
    }
}

/// Large-L limit of `(A_{2n-1} - A^div_{2n-1}) (2L/pi)^{2n-1}` predicted by
/// the leading term of the expansion:
/// `-(2n-2)! 2^{2n-1} (-1)^n 4^n alpha_n I_{2n-1} / ((2n)! 2^{2n-2}) * moment_sum(n, n)`.
pub fn leading_finite_prediction(partition: &[usize], delta: u8, n: usize) -> Rational {
    let n64 = n as u64;
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let numer =
        factorial(2 * n64 - 2) * (int(1) << (2 * n - 1)) * (int(1) << (2 * n)) * moment_sum(n, n);
    let denom = factorial(2 * n64) * (int(1) << (2 * n - 2));
    -(rat_int(numer * sign) / rat_int(denom)) * alpha_times_i(partition, delta, n)
}

/// Extrapolates `f(h) = c0 + c1 h^2 + c2 h^4 + ...` to `h = 0` by
/// repeated Richardson elimination over the given samples.
pub fn richardson(samples: &[(f64, f64)]) -> f64 {
    assert!(!samples.is_empty());
    let hs: Vec<f64> = samples.iter().map(|(h, _)| h * h).collect();
    let mut table: Vec<f64> = samples.iter().map(|(_, f)| *f).collect();
    // Neville on the variable h^2, evaluated at zero.
    for level in 1..table.len() {
        for i in (level..table.len()).rev() {
            let (a, b) = (hs[i - level], hs[i]);
            table[i] = (a * table[i] - b * table[i - 1]) / (a - b);
        }
    }
    *table.last().expect("non-empty")
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuumCheck {
    pub partition: Vec<usize>,
    pub order: usize,
    pub delta: u8,
    pub levels: Vec<usize>,
    /// `(A - A^div) (2L/pi)^{2n-1}` at each level.
    pub scaled_finite: Vec<f64>,
    pub extrapolated: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

/// Richardson-extrapolates the scaled finite part over `levels` (all of the
/// same parity, so the state keeps its `delta`) and compares with
/// [`leading_finite_prediction`].
pub fn continuum_consistency(
    partition: &[usize],
    n: usize,
    levels: &[usize],
) -> Result<ContinuumCheck> {
    if levels.is_empty() || levels.iter().any(|&l| l % 2 != levels[0] % 2) {
        return Err(Error::InvalidArgument(
            "extrapolation levels must share parity".into(),
        ));
    }
    let mut delta = None;
    let mut samples = Vec::with_capacity(levels.len());
    let mut scaled_finite = Vec::with_capacity(levels.len());
    for &l in levels {
        let state = large_state(l, partition)?;
        delta.get_or_insert(state.delta());
        let finite = a_odd_eigen(&state, n) - a_odd_divergent(l, n);
        let scaled = finite * (2.0 * l as f64 / PI).powi(2 * n as i32 - 1);
        samples.push((PI / (2 * l) as f64, scaled));
        scaled_finite.push(scaled);
    }
    let delta = delta.expect("non-empty levels");
    let extrapolated = richardson(&samples);
    let predicted = to_f64(&leading_finite_prediction(partition, delta, n));
    Ok(ContinuumCheck {
        partition: partition.to_vec(),
        order: n,
        delta,
        levels: levels.to_vec(),
        scaled_finite,
        extrapolated,
        relative_error: (extrapolated - predicted).abs() / predicted.abs(),
        predicted,
    })
}

/// State on many sites without the small-L cap on enumeration.
fn large_state(sites: usize, partition: &[usize]) -> Result<SpectrumState> {
    SpectrumState::new_unbounded(sites, partition.to_vec())
}

/// `x^n` coefficients `c_1 .. c_N` of `log(x^L Lambda / 2^{2L})`:
/// odd `n`: `(2 sum_P - sum) sin^n t / n`, even `n`: `-sum sin^n t / n`.
pub fn log_eigenvalue_series(state: &SpectrumState, order: usize) -> Result<Vec<f64>> {
    if order > 12 {
        return Err(Error::InvalidArgument(format!(
            "series order {order} above 12"
        )));
    }
    Ok((1..=order)
        .map(|n| {
            if n % 2 == 1 {
                let k = n.div_ceil(2);
                a_odd_eigen(state, k) / (odd_prefactor(k) * n as f64)
            } else {
                let k = n / 2;
                a_even_eigen(state, k) / to_f64(&rat_int(factorial(n as u64) << n))
            }
        })
        .collect())
}

/// Partial sums of
/// `cos((delta-1) theta)/sin theta = 1/theta + sum_m (-1)^m 4^m B_{2m}(1-delta/2) theta^{2m-1} / (2m)!`
/// for `m = 0 ..= terms`.
pub fn reciprocal_sine_partial_sums(delta: u8, theta: f64, terms: usize) -> Vec<f64> {
    let z = Rational::one() - rat(i64::from(delta), 2);
    let mut out = Vec::with_capacity(terms + 1);
    let mut acc = 1.0 / theta;
    out.push(acc);
    for m in 1..=terms {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let coeff = rat_int(int(sign) << (2 * m)) * bernoulli_polynomial(2 * m, &z)
            / rat_int(factorial(2 * m as u64));
        acc += to_f64(&coeff) * theta.powi(2 * m as i32 - 1);
        out.push(acc);
    }
    out
}
