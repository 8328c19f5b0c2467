//! Exact integer and rational helpers: factorials, binomials, Bernoulli
//! numbers and polynomials.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar (reduced, positive denominator).
pub type Rational = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Huge operands: shift both down to keep the ratio.
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `p/q` or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

fn bernoulli_cache() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

/// Bernoulli number `B_m` with the `B_1 = -1/2` convention, from
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0`.
pub fn bernoulli_number(m: usize) -> Rational {
    if let Some(b) = bernoulli_cache().read().expect("cache lock").get(m) {
        return b.clone();
    }
    let mut cache = bernoulli_cache().write().expect("cache lock");
    while cache.len() <= m {
        let k = cache.len();
        let sum = cache
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (j, bj)| {
                acc + rat_int(binomial(k as u64 + 1, j as u64)) * bj
            });
        let next = -sum / rat_int(int(k as i64 + 1));
        cache.push(next);
    }
    cache[m].clone()
}

/// `B_m(z) = sum_k C(m, k) B_k z^{m-k}`.
pub fn bernoulli_polynomial(m: usize, z: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut power = Rational::one();
    // accumulate from the highest power of z downward: k = m .. 0
    let mut terms = Vec::with_capacity(m + 1);
    for _ in 0..=m {
        terms.push(power.clone());
        power *= z;
    }
    for k in 0..=m {
        acc += rat_int(binomial(m as u64, k as u64)) * bernoulli_number(k) * &terms[m - k];
    }
    acc
}

/// Memo for exact values keyed by small integer tuples; safe to share
/// between threads.
#[derive(Default)]
pub struct ExactCache<K, V> {
    map: RwLock<HashMap<K, V>>,
}

impl<K: std::hash::Hash + Eq + Clone, V: Clone> ExactCache<K, V> {
    pub fn new() -> Self {
        Self {
            map: RwLock::new(HashMap::new()),
        }
    }

    pub fn get_or_insert_with(&self, key: K, f: impl FnOnce() -> V) -> V {
        if let Some(v) = self.map.read().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = f();
        self.map
            .write()
            .expect("cache lock")
            .entry(key)
            .or_insert(v)
            .clone()
    }
}
