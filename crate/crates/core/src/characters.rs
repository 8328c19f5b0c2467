//! Finitized characters as exact q-series.
//!
//! Exponents are stored doubled (`q^{e/2}` lives at index `e`), so both
//! `delta = 0` and the half-integer `delta = 1` series use integer keys.
//! The `+` sector sums over partitions with an even number of parts,
//! the `-` sector over odd ones:
//!
//! ```text
//! chi_+ = sum_m q^{2m^2 + m - m delta} [L, 2m]_q
//! chi_- = sum_m q^{2m^2 - m - (2m - 1) delta / 2} [L, 2m - 1]_q
//!       = (prod_k (1 + q^{k - delta/2}) -+ prod_k (1 - q^{k - delta/2})) / 2
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{factorial, rat_int, to_f64};
use crate::iom::a_odd_divergent;
use crate::operator::Operator;
use crate::par;
use crate::spectrum::{delta_for, enumerate_states, t_nodes};
use crate::transfer::{build_transfer_x, extract_involution, transfer_polynomial};

pub const MAX_BRUTEFORCE_SITES: usize = 24;
/// Largest doubled exponent accepted by [`char_limit`].
pub const MAX_LIMIT_CUTOFF: u32 = 60;

/// Truncated power series in `q^{1/2}` with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    cutoff: u32,
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn zero(cutoff: u32) -> Self {
        Self {
            cutoff,
            coeffs: vec![BigInt::zero(); cutoff as usize + 1],
        }
    }

    pub fn one(cutoff: u32) -> Self {
        Self::monomial(0, BigInt::one(), cutoff)
    }

    /// `c q^{doubled/2}`, dropped when beyond the cutoff.
    pub fn monomial(doubled: u32, c: BigInt, cutoff: u32) -> Self {
        let mut s = Self::zero(cutoff);
        if doubled <= cutoff {
            s.coeffs[doubled as usize] = c;
        }
        s
    }

    /// Series from `(doubled exponent, coefficient)` pairs; entries beyond
    /// the cutoff are dropped, repeated exponents add up.
    pub fn from_terms(terms: &[(u32, i64)], cutoff: u32) -> Self {
        let mut s = Self::zero(cutoff);
        for &(e, c) in terms {
            if e <= cutoff {
                s.coeffs[e as usize] += c;
            }
        }
        s
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Coefficient of `q^{doubled/2}`; zero beyond the cutoff.
    pub fn coeff(&self, doubled: u32) -> BigInt {
        self.coeffs
            .get(doubled as usize)
            .cloned()
            .unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Non-zero `(doubled exponent, coefficient)` pairs in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e as u32, c))
    }

    pub fn truncate(&self, cutoff: u32) -> Self {
        let cutoff = cutoff.min(self.cutoff);
        Self {
            cutoff,
            coeffs: self.coeffs[..=cutoff as usize].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let cutoff = self.cutoff.min(other.cutoff);
        let coeffs = (0..=cutoff as usize)
            .map(|i| &self.coeffs[i] + &other.coeffs[i])
            .collect();
        Self { cutoff, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            cutoff: self.cutoff,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Product truncated at the smaller cutoff.
    pub fn mul(&self, other: &Self) -> Self {
        let cutoff = self.cutoff.min(other.cutoff);
        let n = cutoff as usize;
        let mut out = Self::zero(cutoff);
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    /// Multiplies by `1 + sign q^{doubled/2}` in place.
    pub fn mul_binomial(&mut self, doubled: u32, sign: i8) {
        let d = doubled as usize;
        for i in (d..self.coeffs.len()).rev() {
            let lower = self.coeffs[i - d].clone();
            if sign >= 0 {
                self.coeffs[i] += lower;
            } else {
                self.coeffs[i] -= lower;
            }
        }
    }

    /// Multiplies by `q^{doubled/2}`.
    pub fn shift(&self, doubled: u32) -> Self {
        let mut out = Self::zero(self.cutoff);
        let d = doubled as usize;
        for i in d..self.coeffs.len() {
            out.coeffs[i] = self.coeffs[i - d].clone();
        }
        out
    }

    /// Exact division by two; fails if any coefficient is odd.
    pub fn halve(&self) -> Result<Self> {
        let two = BigInt::from(2);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (e, c) in self.coeffs.iter().enumerate() {
            if !(c % &two).is_zero() {
                return Err(Error::InvalidArgument(format!(
                    "odd coefficient {c} at doubled exponent {e}"
                )));
            }
            coeffs.push(c / &two);
        }
        Ok(Self {
            cutoff: self.cutoff,
            coeffs,
        })
    }

    /// Smallest doubled exponent where the two series differ, up to the
    /// smaller cutoff.
    pub fn first_difference(&self, other: &Self) -> Option<u32> {
        let n = self.cutoff.min(other.cutoff) as usize;
        (0..=n)
            .find(|&i| self.coeffs[i] != other.coeffs[i])
            .map(|i| i as u32)
    }

    /// Value at a real `q > 0`.
    pub fn eval(&self, q: f64) -> f64 {
        let root = q.sqrt();
        self.terms()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * root.powi(e as i32))
            .sum()
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, doubled: u32) -> fmt::Result {
    match doubled {
        0 => Ok(()),
        2 => write!(f, "q"),
        e if e % 2 == 0 => write!(f, "q^{}", e / 2),
        e => write!(f, "q^({e}/2)"),
    }
}

impl fmt::Display for QSeries {
    /// `1 + q^2 + q^(5/2) + 2q^3`; `0` for the zero series.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if e == 0 {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write_power(f, e)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for QSeries {
    /// `[[doubled exponent, "coefficient"], ...]` over non-zero terms.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<(u32, String)> = self.terms().map(|(e, c)| (e, c.to_string())).collect();
        let mut seq = serializer.serialize_seq(Some(terms.len()))?;
        for t in &terms {
            seq.serialize_element(t)?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// Even number of parts.
    Plus,
    /// Odd number of parts.
    Minus,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Plus, Sector::Minus];

    pub fn sign(self) -> i8 {
        match self {
            Sector::Plus => 1,
            Sector::Minus => -1,
        }
    }

    /// Sector of partitions with `parts` parts.
    pub fn of_parts(parts: usize) -> Self {
        if parts.is_multiple_of(2) {
            Sector::Plus
        } else {
            Sector::Minus
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sector::Plus => "plus",
            Sector::Minus => "minus",
        }
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sector::Plus),
            "minus" | "-" => Ok(Sector::Minus),
            _ => Err(Error::InvalidArgument(format!(
                "unknown sector {s:?}, expected plus or minus"
            ))),
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_delta(delta: u8) -> Result<()> {
    if delta > 1 {
        return Err(Error::InvalidArgument(format!(
            "delta must be 0 or 1, got {delta}"
        )));
    }
    Ok(())
}

/// Gaussian binomial `[n, m]_q` truncated at `cutoff` (doubled exponents),
/// built with `[n, m] = [n-1, m-1] + q^m [n-1, m]`. Zero when `m > n`.
pub fn qbinomial(n: usize, m: usize, cutoff: u32) -> QSeries {
    if m > n {
        return QSeries::zero(cutoff);
    }
    // row[j] = [i, j] for the current i
    let mut row = vec![QSeries::one(cutoff)];
    for i in 1..=n {
        let top = m.min(i);
        let mut next = Vec::with_capacity(top + 1);
        for j in 0..=top {
            if j == 0 {
                next.push(QSeries::one(cutoff));
                continue;
            }
            let mut entry = row[j - 1].clone();
            if j < row.len() {
                entry = entry.add(&row[j].shift(2 * j as u32));
            }
            next.push(entry);
        }
        row = next;
    }
    row.pop().expect("m <= n")
}

/// Fermionic sum over `m` of monomials times Gaussian binomials.
pub fn char_fermionic(sites: usize, delta: u8, sector: Sector, cutoff: u32) -> Result<QSeries> {
    check_delta(delta)?;
    let d = i64::from(delta);
    let mut out = QSeries::zero(cutoff);
    let terms: Vec<(i64, usize)> = match sector {
        Sector::Plus => (0..=sites / 2)
            .map(|m| {
                let m = m as i64;
                (2 * (2 * m * m + m - m * d), 2 * m as usize)
            })
            .collect(),
        Sector::Minus => (1..=sites / 2 + 1)
            .filter(|m| 2 * m - 1 <= sites)
            .map(|m| {
                let m = m as i64;
                (4 * m * m - 2 * m - (2 * m - 1) * d, 2 * m as usize - 1)
            })
            .collect(),
    };
    for (doubled, k) in terms {
        let doubled = u32::try_from(doubled).expect("non-negative exponent");
        if doubled > cutoff {
            continue;
        }
        let b = qbinomial(sites, k, cutoff - doubled);
        let mut shifted = QSeries::zero(cutoff);
        for (e, c) in b.terms() {
            shifted.coeffs[(e + doubled) as usize] = c.clone();
        }
        out = out.add(&shifted);
    }
    Ok(out)
}

fn half_products(sites: usize, delta: u8, cutoff: u32) -> (QSeries, QSeries) {
    let mut plus = QSeries::one(cutoff);
    let mut minus = QSeries::one(cutoff);
    for k in 1..=sites as u32 {
        let e = 2 * k - u32::from(delta);
        plus.mul_binomial(e, 1);
        minus.mul_binomial(e, -1);
    }
    (plus, minus)
}

/// `(prod_k (1 + q^{k - delta/2}) +- prod_k (1 - q^{k - delta/2})) / 2`.
pub fn char_bosonic(sites: usize, delta: u8, sector: Sector, cutoff: u32) -> Result<QSeries> {
    check_delta(delta)?;
    let (plus, minus) = half_products(sites, delta, cutoff);
    match sector {
        Sector::Plus => plus.add(&minus),
        Sector::Minus => plus.sub(&minus),
    }
    .halve()
}

/// `prod_k (1 + q^{k - delta/2})`, the sum of both sectors.
pub fn full_product(sites: usize, delta: u8, cutoff: u32) -> Result<QSeries> {
    check_delta(delta)?;
    Ok(half_products(sites, delta, cutoff).0)
}

/// Generating function `sum_P q^{sum_{j in P} (j - delta/2)}` over subsets
/// of `{1..L}` whose size has the parity of `sector`.
pub fn char_bruteforce(sites: usize, delta: u8, sector: Sector, cutoff: u32) -> Result<QSeries> {
    check_delta(delta)?;
    if sites > MAX_BRUTEFORCE_SITES {
        return Err(Error::SitesOutOfRange {
            l: sites,
            min: 0,
            max: MAX_BRUTEFORCE_SITES,
        });
    }
    const CHUNK_BITS: usize = 12;
    let total = 1usize << sites;
    let chunk = 1usize << CHUNK_BITS.min(sites);
    let weights: Vec<u32> = (1..=sites as u32)
        .map(|k| 2 * k - u32::from(delta))
        .collect();
    let width = cutoff as usize + 1;
    let partial: Vec<Vec<u64>> = par::map_range(total / chunk, |c| {
        let mut counts = vec![0u64; width];
        for mask in c * chunk..(c + 1) * chunk {
            if Sector::of_parts(mask.count_ones() as usize) != sector {
                continue;
            }
            let e: u32 = weights
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, w)| w)
                .sum();
            if e <= cutoff {
                counts[e as usize] += 1;
            }
        }
        counts
    });
    let mut out = QSeries::zero(cutoff);
    for counts in partial {
        for (e, c) in counts.into_iter().enumerate() {
            if c > 0 {
                out.coeffs[e] += c;
            }
        }
    }
    Ok(out)
}

/// Infinite-size character truncated at `cutoff`, from `L = cutoff + 1`
/// sites; every part `k` with `2k - delta <= cutoff` is then present.
pub fn char_limit(delta: u8, sector: Sector, cutoff: u32) -> Result<QSeries> {
    if cutoff > MAX_LIMIT_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} above {MAX_LIMIT_CUTOFF} half-steps"
        )));
    }
    char_bosonic(cutoff as usize + 1, delta, sector, cutoff)
}

/// Published low-order coefficients of the four infinite-size series,
/// kept verbatim as reference data. The cutoff is the last listed term.
pub fn listed_limit(delta: u8, sector: Sector) -> Result<QSeries> {
    check_delta(delta)?;
    let (start, step, coeffs): (u32, u32, &[i64]) = match (sector, delta) {
        (Sector::Plus, 0) => (0, 2, &[1, 0, 0, 1, 1, 2, 2, 3, 3, 4, 5, 6, 7, 9, 11]),
        (Sector::Plus, _) => (0, 2, &[1, 0, 1, 1, 2, 3, 3, 5, 5, 7, 8, 11, 12, 16]),
        (Sector::Minus, 0) => (0, 2, &[0, 1, 1, 1, 1, 1, 2, 2, 3, 4, 5, 6, 8, 9, 11]),
        (Sector::Minus, _) => (1, 2, &[1, 1, 1, 1, 2, 2, 3, 4, 5, 6, 8, 9]),
    };
    let terms: Vec<(u32, i64)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| (start + step * i as u32, c))
        .collect();
    let cutoff = terms.last().expect("non-empty table").0;
    Ok(QSeries::from_terms(&terms, cutoff))
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitComparison {
    pub delta: u8,
    pub sector: Sector,
    pub cutoff: u32,
    pub computed: QSeries,
    pub reference: QSeries,
    /// Doubled exponent of the first mismatch.
    pub first_difference: Option<u32>,
    pub matches: bool,
}

pub fn compare_limit(delta: u8, sector: Sector) -> Result<LimitComparison> {
    let reference = listed_limit(delta, sector)?;
    let cutoff = reference.cutoff();
    let computed = char_limit(delta, sector, cutoff)?;
    let first_difference = computed.first_difference(&reference);
    Ok(LimitComparison {
        delta,
        sector,
        cutoff,
        computed,
        reference,
        matches: first_difference.is_none(),
        first_difference,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FormComparison {
    pub sites: usize,
    pub delta: u8,
    pub sector: Sector,
    pub fermionic: QSeries,
    pub bosonic: QSeries,
    pub bruteforce: QSeries,
    /// First doubled exponent where any two forms disagree.
    pub first_difference: Option<u32>,
}

pub fn compare_forms(
    sites: usize,
    delta: u8,
    sector: Sector,
    cutoff: u32,
) -> Result<FormComparison> {
    let fermionic = char_fermionic(sites, delta, sector, cutoff)?;
    let bosonic = char_bosonic(sites, delta, sector, cutoff)?;
    let bruteforce = char_bruteforce(sites, delta, sector, cutoff)?;
    let first_difference = [
        fermionic.first_difference(&bosonic),
        fermionic.first_difference(&bruteforce),
    ]
    .into_iter()
    .flatten()
    .min();
    Ok(FormComparison {
        sites,
        delta,
        sector,
        fermionic,
        bosonic,
        bruteforce,
        first_difference,
    })
}

/// Highest doubled exponent of a finite-size character, `sum_k (2k - delta)`.
pub fn max_doubled_exponent(sites: usize, delta: u8) -> u32 {
    let l = sites as u32;
    l * (l + 1) - l * u32::from(delta)
}

/// Number of partitions of each `n <= max` into distinct positive parts,
/// split by the parity of the number of parts: `(even, odd)`.
pub fn distinct_partition_counts(max: usize) -> (Vec<u64>, Vec<u64>) {
    // table[parity][n] over parts 1..=k, adding one part at a time
    let mut even = vec![0u64; max + 1];
    let mut odd = vec![0u64; max + 1];
    even[0] = 1;
    for k in 1..=max {
        for n in (k..=max).rev() {
            let (e, o) = (even[n - k], odd[n - k]);
            even[n] += o;
            odd[n] += e;
        }
    }
    (even, odd)
}

pub const MAX_DIAGNOSTIC_SITES: usize = 8;
pub const MAX_DIAGNOSTIC_ROWS: usize = 12;
pub const MAX_DIAGNOSTIC_X: f64 = 0.2;
/// Odd orders kept in the divergent part of the exponent.
pub const DIVERGENT_ORDERS: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct SectorDiagnostic {
    /// Involution eigenvalue of the projector.
    pub r: i8,
    /// Parity sector of the partitions it holds.
    pub sector: Sector,
    pub delta: u8,
    /// `Tr(Pi T^M)`.
    pub trace: f64,
    /// `sum Lambda^M` over the states with this `r`.
    pub spectral_sum: f64,
    pub relative_deviation: f64,
    pub z_div: f64,
    pub q: f64,
    pub chi: f64,
    /// `z_div * chi / trace`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticReport {
    pub sites: usize,
    pub rows: usize,
    pub x: f64,
    pub columns: f64,
    /// `|Tr(Pi_+ T^M) + Tr(Pi_- T^M) - Tr(T^M)| / |Tr(T^M)|`
    pub completeness_residual: f64,
    pub sectors: Vec<SectorDiagnostic>,
}

/// Transfer matrix and involution at fixed `(L, x)`, reused over `M` and `N`.
#[derive(Debug, Clone)]
pub struct DiagnosticContext {
    sites: usize,
    x: f64,
    transfer: Operator,
    involution: Operator,
}

impl DiagnosticContext {
    pub fn new(sites: usize, x: f64) -> Result<Self> {
        if !(2..=MAX_DIAGNOSTIC_SITES).contains(&sites) {
            return Err(Error::SitesOutOfRange {
                l: sites,
                min: 2,
                max: MAX_DIAGNOSTIC_SITES,
            });
        }
        if !(x > 0.0 && x <= MAX_DIAGNOSTIC_X) {
            return Err(Error::InvalidArgument(format!(
                "x = {x} outside (0, {MAX_DIAGNOSTIC_X}]"
            )));
        }
        let tp = transfer_polynomial(sites)?;
        Ok(Self {
            sites,
            x,
            transfer: build_transfer_x(sites, x)?,
            involution: extract_involution(&tp)?,
        })
    }

    /// Diagnostic for `M` rows with `N = columns` in `q = exp(4 pi M x / N)`.
    pub fn evaluate(&self, rows: usize, columns: f64) -> Result<DiagnosticReport> {
        if !(1..=MAX_DIAGNOSTIC_ROWS).contains(&rows) {
            return Err(Error::InvalidArgument(format!(
                "rows M = {rows} outside 1..={MAX_DIAGNOSTIC_ROWS}"
            )));
        }
        if columns.is_nan() || columns <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "N = {columns} must be positive"
            )));
        }
        let (l, x) = (self.sites, self.x);
        let power = self.transfer.pow(rows as u32);
        let total = power.trace();
        let states = enumerate_states(l)?;
        let q = (4.0 * std::f64::consts::PI * rows as f64 * x / columns).exp();
        let mut sectors = Vec::with_capacity(2);
        let mut traced = 0.0;
        for r in [1i8, -1] {
            let mut proj = self.involution.scaled(0.5 * f64::from(r));
            proj.add_identity_mut(0.5);
            let trace = proj.matmul(&power)?.trace();
            traced += trace;
            let values: Vec<f64> = states
                .iter()
                .filter(|s| s.r() == r)
                .map(|s| s.eigenvalue(x).map(|v| v.powi(rows as i32)))
                .collect::<Result<_>>()?;
            let spectral_sum: f64 = values.iter().sum();
            let parts_parity = (l + usize::from(r == -1)) % 2;
            let sector = Sector::of_parts(parts_parity);
            let delta = delta_for(l, r);
            let chi = char_bosonic(l, delta, sector, max_doubled_exponent(l, delta))?.eval(q);
            let z_div = z_div(l, delta, rows, x);
            sectors.push(SectorDiagnostic {
                r,
                sector,
                delta,
                trace,
                relative_deviation: (trace - spectral_sum).abs() / spectral_sum.abs(),
                spectral_sum,
                z_div,
                q,
                chi,
                ratio: z_div * chi / trace,
            });
        }
        Ok(DiagnosticReport {
            sites: l,
            rows,
            x,
            columns,
            completeness_residual: (traced - total).abs() / total.abs(),
            sectors,
        })
    }
}

/// `(2^{2L} x^{-L})^M exp(M [sum_n A_{2n} x^{2n} / (2^{2n} (2n)!) + sum_n A^div_{2n-1} x^{2n-1} / (2^{2n-1} (2n-1)!)])`
/// with the even series summed in closed form, `(1/2) sum_k log(1 - x^2 sin^2 t_k)`,
/// and the odd series cut after [`DIVERGENT_ORDERS`] terms.
pub fn z_div(sites: usize, delta: u8, rows: usize, x: f64) -> f64 {
    let even: f64 = t_nodes(sites, delta)
        .iter()
        .map(|t| 0.5 * (1.0 - (x * t.sin()).powi(2)).ln())
        .sum();
    let odd: f64 = (1..=DIVERGENT_ORDERS)
        .map(|n| {
            let k = 2 * n - 1;
            let scale = to_f64(&rat_int(factorial(k as u64) << k));
            a_odd_divergent(sites, n) * x.powi(k as i32) / scale
        })
        .sum();
    let l = sites as i32;
    let log_pre = f64::from(l) * (4.0f64.ln() - x.ln());
    (rows as f64 * (log_pre + even + odd)).exp()
}

pub fn partition_diagnostic(
    sites: usize,
    rows: usize,
    x: f64,
    columns: Option<f64>,
) -> Result<DiagnosticReport> {
    DiagnosticContext::new(sites, x)?.evaluate(rows, columns.unwrap_or(2.0 * sites as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(terms: &[(u32, i64)], cutoff: u32) -> QSeries {
        QSeries::from_terms(terms, cutoff)
    }

    #[test]
    fn display_and_json() {
        let s = series(&[(0, 1), (4, 1), (6, 2), (5, 1)], 10);
        assert_eq!(s.to_string(), "1 + q^2 + q^(5/2) + 2q^3");
        assert_eq!(series(&[(2, -3), (3, 1)], 4).to_string(), "-3q + q^(3/2)");
        assert_eq!(QSeries::zero(3).to_string(), "0");
        let json = serde_json::to_string(&series(&[(1, 1), (3, 12)], 5)).unwrap();
        assert_eq!(json, r#"[[1,"1"],[3,"12"]]"#);
    }

    #[test]
    fn multiplication_truncates_to_smaller_cutoff() {
        let a = series(&[(0, 1), (2, 1)], 10);
        let b = series(&[(0, 1), (3, -1)], 4);
        let p = a.mul(&b);
        assert_eq!(p.cutoff(), 4);
        assert_eq!(p, series(&[(0, 1), (2, 1), (3, -1)], 4));
        let mut c = a.clone();
        c.mul_binomial(3, -1);
        assert_eq!(c, a.mul(&series(&[(0, 1), (3, -1)], 10)));
    }

    #[test]
    fn halve_requires_even_coefficients() {
        assert!(series(&[(1, 3)], 2).halve().is_err());
        assert_eq!(series(&[(1, 4)], 2).halve().unwrap(), series(&[(1, 2)], 2));
    }

    #[test]
    fn qbinomial_values() {
        assert_eq!(qbinomial(2, 1, 20), series(&[(0, 1), (2, 1)], 20));
        assert_eq!(
            qbinomial(4, 2, 20),
            series(&[(0, 1), (2, 1), (4, 2), (6, 1), (8, 1)], 20)
        );
        assert!(qbinomial(3, 4, 20).is_zero());
        for n in 0..=8 {
            for m in 0..=n {
                assert_eq!(qbinomial(n, m, 80), qbinomial(n, n - m, 80));
            }
            // q = 1 gives the ordinary binomial
            let sum: BigInt = (0..=n)
                .map(|m| qbinomial(n, m, 80).coeffs().iter().sum::<BigInt>())
                .sum();
            assert_eq!(sum, BigInt::from(1u64 << n));
        }
    }

    #[test]
    fn two_site_characters() {
        let plus = series(&[(0, 1), (4, 1)], 40);
        let minus = series(&[(1, 1), (3, 1)], 40);
        for f in [char_fermionic, char_bosonic, char_bruteforce] {
            assert_eq!(f(2, 1, Sector::Plus, 40).unwrap(), plus);
            assert_eq!(f(2, 1, Sector::Minus, 40).unwrap(), minus);
        }
        assert_eq!(plus.to_string(), "1 + q^2");
    }

    #[test]
    fn three_site_even_subsets() {
        let want = series(&[(0, 1), (6, 1), (8, 1), (10, 1)], 40);
        assert_eq!(char_bruteforce(3, 0, Sector::Plus, 40).unwrap(), want);
    }

    #[test]
    fn forms_agree() {
        for l in 0..=12 {
            for delta in 0..=1 {
                let total = full_product(l, delta, 40).unwrap();
                let mut sum = QSeries::zero(40);
                for sector in Sector::BOTH {
                    let c = compare_forms(l, delta, sector, 40).unwrap();
                    assert_eq!(c.first_difference, None, "L={l} d={delta} {sector}");
                    sum = sum.add(&c.fermionic);
                }
                assert_eq!(sum, total);
            }
        }
    }

    #[test]
    fn half_integer_exponents_only_for_delta_one_minus() {
        for l in 1..=8 {
            for (delta, sector) in [(0, Sector::Plus), (0, Sector::Minus), (1, Sector::Plus)] {
                let s = char_fermionic(l, delta, sector, 60).unwrap();
                assert!(s.terms().all(|(e, _)| e % 2 == 0));
            }
            let s = char_fermionic(l, 1, Sector::Minus, 60).unwrap();
            assert!(s.terms().all(|(e, _)| e % 2 == 1));
        }
    }

    #[test]
    fn stabilization_in_sites() {
        for delta in 0..=1 {
            for sector in Sector::BOTH {
                for l in 1..=14 {
                    let a = char_bosonic(l, delta, sector, 60).unwrap();
                    let b = char_bosonic(l + 1, delta, sector, 60).unwrap();
                    // part L + 1 first contributes at doubled exponent 2(L+1) - delta
                    let diff = a.first_difference(&b).unwrap_or(u32::MAX);
                    assert!(diff >= 2 * (l as u32 + 1) - u32::from(delta));
                }
            }
        }
    }

    #[test]
    fn delta_zero_limits_count_distinct_partitions() {
        let (even, odd) = distinct_partition_counts(20);
        let plus = char_limit(0, Sector::Plus, 40).unwrap();
        let minus = char_limit(0, Sector::Minus, 40).unwrap();
        for n in 0..=20 {
            assert_eq!(plus.coeff(2 * n), BigInt::from(even[n as usize]), "n={n}");
            assert_eq!(minus.coeff(2 * n), BigInt::from(odd[n as usize]), "n={n}");
        }
        assert_eq!(even[13], 9);
    }

    #[test]
    fn limit_series() {
        for (delta, sector) in [(0, Sector::Plus), (0, Sector::Minus), (1, Sector::Minus)] {
            let c = compare_limit(delta, sector).unwrap();
            assert!(c.matches, "{c:?}");
        }
        // the reference list for delta = 1, plus skips the q^5 coefficient 2
        let c = compare_limit(1, Sector::Plus).unwrap();
        assert_eq!(c.first_difference, Some(10));
        assert_eq!(c.computed.coeff(10), BigInt::from(2));
        let full = char_limit(1, Sector::Plus, 28).unwrap();
        let want = [1, 0, 1, 1, 2, 2, 3, 3, 5, 5, 7, 8, 11, 12, 16];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(full.coeff(2 * n as u32), BigInt::from(*w));
        }
        assert!(char_limit(1, Sector::Plus, 61).is_err());
    }

    #[test]
    fn sector_parsing() {
        assert_eq!("plus".parse::<Sector>().unwrap(), Sector::Plus);
        assert_eq!("-".parse::<Sector>().unwrap(), Sector::Minus);
        assert!("up".parse::<Sector>().is_err());
    }

    #[test]
    fn diagnostic_traces() {
        let ctx = DiagnosticContext::new(4, 0.15).unwrap();
        for m in [1, 3, 8] {
            let rep = ctx.evaluate(m, 8.0).unwrap();
            assert!(rep.completeness_residual < 1e-10);
            for s in &rep.sectors {
                assert!(s.relative_deviation < 1e-6, "{s:?}");
                assert!(s.ratio.is_finite() && s.ratio > 0.0);
            }
        }
        assert!(DiagnosticContext::new(4, 0.3).is_err());
        assert!(ctx.evaluate(13, 8.0).is_err());
    }

    #[test]
    fn z_div_even_part_matches_series() {
        // sum_n A_{2n} x^{2n} / (2^{2n} (2n)!) = -sum_n sum_k (x sin t_k)^{2n} / (2n)
        let (l, x) = (6, 0.15);
        let series: f64 = (1..=20)
            .map(|n| {
                t_nodes(l, 1)
                    .iter()
                    .map(|t| -(x * t.sin()).powi(2 * n) / (2 * n) as f64)
                    .sum::<f64>()
            })
            .sum();
        let closed: f64 = t_nodes(l, 1)
            .iter()
            .map(|t| 0.5 * (1.0 - (x * t.sin()).powi(2)).ln())
            .sum();
        assert!((series - closed).abs() < 1e-15);
    }
}
