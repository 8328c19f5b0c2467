//! Verification suites: each check records a residual against a tolerance
//! and the report passes iff every check does.
//!
//! Floats in a report are rounded to 12 significant digits when serialized
//! and reports carry no timestamp, so repeated runs serialize identically.

use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::characters::{
    char_limit, compare_forms, compare_limit, distinct_partition_counts, partition_diagnostic,
    Sector,
};
use crate::error::{Error, Result};
use crate::exact::{int, rat, Rational};
use crate::iom::{
    alpha, continuum_consistency, moment_sum, odd_spectrum_deviation, sin_even_sum_direct,
    sin_even_sum_exact, sin_odd_sum_closed, sin_odd_sum_direct,
};
use crate::operator::{commutator, relative_distance, Operator};
use crate::spectrum::match_scaled_spectrum;
use crate::tl::{
    build_d_all, iom_even_per_site, projectors_with, recursion_coefficients, tl_residuals, IomTower,
};
use crate::transfer::{
    build_transfer, build_transfer_x, crossing_residual, extract_involution, transfer_polynomial,
    verify_inversion_with,
};

/// Operator identities.
pub const DEFAULT_OPERATOR_RTOL: f64 = 1e-9;
/// Spectrum matching and the inversion identity.
pub const DEFAULT_SPECTRUM_RTOL: f64 = 1e-8;
pub const DECOMPOSITION_RTOL: f64 = 1e-7;
pub const CROSSING_TOL: f64 = 1e-13;
pub const TRIG_SUM_RTOL: f64 = 1e-10;
pub const CONTINUUM_RTOL: f64 = 0.01;
pub const DIAGNOSTIC_RTOL: f64 = 1e-6;
pub const DEFAULT_CUTOFF: u32 = 40;
/// Diagnostic trace check parameters.
pub const DIAGNOSTIC_ROWS: usize = 3;
pub const DIAGNOSTIC_X: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Weights,
    Tl,
    Inversion,
    Decomposition,
    Iom,
    Characters,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 6] = [
        Suite::Weights,
        Suite::Tl,
        Suite::Inversion,
        Suite::Decomposition,
        Suite::Iom,
        Suite::Characters,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Weights => "weights",
            Suite::Tl => "tl",
            Suite::Inversion => "inversion",
            Suite::Decomposition => "decomposition",
            Suite::Iom => "iom",
            Suite::Characters => "characters",
            Suite::All => "all",
        }
    }

    /// Admissible number of sites.
    pub fn site_range(self) -> (usize, usize) {
        match self {
            Suite::Weights => (1, 10),
            Suite::Tl => (2, 10),
            Suite::Inversion => (2, 9),
            Suite::Decomposition => (2, 8),
            Suite::Iom => (2, 8),
            Suite::Characters => (0, 16),
            Suite::All => (2, 8),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::PARTS
            .iter()
            .chain(&[Suite::All])
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

fn sig12<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*v))
}

fn sig12_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&round_sig(*v)),
        None => s.serialize_none(),
    }
}

/// `v` rounded to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(serialize_with = "sig12")]
    pub x: f64,
    /// Highest order for the integral-of-motion checks.
    pub n: usize,
    /// Restricts the character checks to one `delta`.
    pub delta: Option<u8>,
    /// Restricts the character checks to one sector.
    pub sector: Option<Sector>,
    pub cutoff: u32,
    /// Overrides every floating-point tolerance.
    #[serde(serialize_with = "sig12_opt")]
    pub rtol: Option<f64>,
    /// `N` in the modular parameter of the diagnostic.
    #[serde(rename = "N", serialize_with = "sig12_opt")]
    pub columns: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            sites: 4,
            x: 0.5,
            n: 6,
            delta: None,
            sector: None,
            cutoff: DEFAULT_CUTOFF,
            rtol: None,
            columns: None,
        }
    }
}

impl Params {
    fn tol(&self, default: f64) -> f64 {
        self.rtol.unwrap_or(default)
    }

    fn deltas(&self) -> Vec<u8> {
        self.delta.map_or(vec![0, 1], |d| vec![d])
    }

    fn sectors(&self) -> Vec<Sector> {
        self.sector.map_or(Sector::BOTH.to_vec(), |s| vec![s])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    /// Identity being checked.
    pub paper_ref: String,
    #[serde(serialize_with = "sig12")]
    pub residual: f64,
    #[serde(serialize_with = "sig12")]
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(
        id: impl Into<String>,
        paper_ref: impl Into<String>,
        residual: f64,
        tol: f64,
    ) -> Self {
        Self {
            id: id.into(),
            paper_ref: paper_ref.into(),
            pass: residual <= tol,
            residual,
            tol,
        }
    }

    /// Exact comparison: residual is the number of mismatches.
    pub fn exact(id: impl Into<String>, paper_ref: impl Into<String>, mismatches: usize) -> Self {
        Self::new(id, paper_ref, mismatches as f64, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub params: Params,
    pub checks: Vec<Check>,
    /// Conventions the checks rely on.
    pub conventions: Vec<String>,
    pub status: Status,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

const CONVENTIONS: [&str; 3] = [
    "eigenvalues: Lambda = 2^{2L} x^{-L} prod_k (1 + mu_k x sin t_k), mu_k = +1 for k in P",
    "character sectors: plus sums over partitions with an even number of parts, minus over odd",
    "A_{2k-1} recursion runs over the lower integrals A_{2(k-m)-1}",
];

pub fn run(suite: Suite, params: &Params) -> Result<VerificationReport> {
    let (min, max) = suite.site_range();
    if !(min..=max).contains(&params.sites) {
        return Err(Error::SitesOutOfRange {
            l: params.sites,
            min,
            max,
        });
    }
    if !(params.x > 0.0 && params.x <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "x = {} outside (0, 1]",
            params.x
        )));
    }
    if params.delta.is_some_and(|d| d > 1) {
        return Err(Error::InvalidArgument("delta must be 0 or 1".into()));
    }
    if !(1..=6).contains(&params.n) {
        return Err(Error::InvalidArgument(format!(
            "n = {} outside 1..=6",
            params.n
        )));
    }
    let mut checks = Vec::new();
    let parts: Vec<Suite> = match suite {
        Suite::All => Suite::PARTS.to_vec(),
        one => vec![one],
    };
    for part in parts {
        checks.extend(match part {
            Suite::Weights => weights(params)?,
            Suite::Tl => tl(params)?,
            Suite::Inversion => inversion(params)?,
            Suite::Decomposition => decomposition(params)?,
            Suite::Iom => iom(params)?,
            Suite::Characters => characters(params)?,
            Suite::All => unreachable!("expanded above"),
        });
    }
    let status = if checks.iter().all(|c| c.pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        suite,
        params: params.clone(),
        checks,
        conventions: CONVENTIONS.iter().map(|s| s.to_string()).collect(),
        status,
    })
}

fn weights(p: &Params) -> Result<Vec<Check>> {
    let tol = p.tol(DEFAULT_OPERATOR_RTOL);
    let u = crate::transfer::u_of_x(p.x)?;
    let t = build_transfer(p.sites, u)?;
    let mirrored = build_transfer(p.sites, std::f64::consts::FRAC_PI_4 - u)?;
    let two_site = build_transfer_x(2, 0.5)?.trace();
    Ok(vec![
        Check::new(
            "weights.crossing",
            "crossing symmetry W_R(u') = W_L(pi/4 - u') with the vertical spin flipped",
            crossing_residual(20)?,
            p.rtol.unwrap_or(CROSSING_TOL),
        ),
        Check::new(
            "weights.transfer_symmetric",
            "transfer matrix is symmetric",
            t.asymmetry() / t.max_abs(),
            tol,
        ),
        Check::new(
            "weights.depends_on_x",
            "T(u) = T(pi/4 - u), a function of x = sin 4u",
            relative_distance(&mirrored, &t)?,
            tol,
        ),
        Check::new(
            "weights.two_site_trace",
            "tr T = 272 at L = 2, x = 1/2",
            (two_site - 272.0).abs() / 272.0,
            tol,
        ),
    ])
}

fn tl(p: &Params) -> Result<Vec<Check>> {
    let tol = p.tol(DEFAULT_OPERATOR_RTOL);
    let r = tl_residuals(p.sites)?;
    Ok(vec![
        Check::new("tl.square", "e_i^2 = sqrt2 e_i", r.square, tol),
        Check::new("tl.braid", "e_i e_{i+-1} e_i = e_i", r.braid, tol),
        Check::new(
            "tl.commuting",
            "[e_i, e_j] = 0 for |i - j| >= 2",
            r.commuting,
            tol,
        ),
    ])
}

fn inversion(p: &Params) -> Result<Vec<Check>> {
    let tol = p.tol(DEFAULT_SPECTRUM_RTOL);
    let tp = transfer_polynomial(p.sites)?;
    let r = extract_involution(&tp)?;
    let rep = verify_inversion_with(&tp, &r, p.x)?;
    let id = Operator::identity(p.sites)?;
    let mut scaled = tp.eval_scaled(p.x);
    // the polynomial form is x^L T / 2^{2L}; symmetrize rounding noise
    scaled = scaled.add(&scaled.transpose())?.scaled(0.5);
    let spectrum = match_scaled_spectrum(&scaled, p.x)?;
    Ok(vec![
        Check::new(
            "inversion.interpolation",
            "x^L T(x) / 2^{2L} is a polynomial of degree 2L (held-out node)",
            tp.validation_residual(),
            tol,
        ),
        Check::new(
            "inversion.identity",
            "T(x) T(-x) = (-1)^L 2^{2L+1} (T_{2L}(1/x) + R)",
            rep.residual,
            tol,
        ),
        Check::new(
            "inversion.involution",
            "R^2 = 1",
            relative_distance(&r.matmul(&r)?, &id)?,
            tol,
        ),
        Check::new(
            "inversion.commutes",
            "[R, T(x)] = 0",
            rep.commutator_residual,
            tol,
        ),
        Check::new(
            "spectrum.factorized",
            "spectrum of T equals 2^{2L} x^{-L} prod_k (1 + mu_k x sin t_k)",
            spectrum.max_deviation,
            tol,
        ),
        Check::new(
            "spectrum.trace",
            "tr T equals the sum of the factorized eigenvalues",
            spectrum.trace_discrepancy,
            tol,
        ),
    ])
}

/// Listed recursion coefficients: `(k, tower coefficient, lower coefficients)`.
const RECURSION_TABLE: [(usize, i64, &[i64]); 5] = [
    (2, 1, &[6]),
    (3, 6, &[60, -120]),
    (4, 90, &[210, -5040, 5040]),
    (5, 2520, &[504, -45360, 604800, -362880]),
    (6, 113400, &[990, -221760, 11642400, -99792000, 39916800]),
];

fn recursion_mismatches() -> usize {
    RECURSION_TABLE
        .iter()
        .map(|(k, tower, lower)| {
            let c = recursion_coefficients(*k);
            let mut bad = usize::from(c.tower != rat(*tower, 1));
            bad += lower
                .iter()
                .zip(&c.lower)
                .filter(|(want, (_, got))| rat(**want, 1) != *got)
                .count();
            bad + lower.len().abs_diff(c.lower.len())
        })
        .sum()
}

fn decomposition(p: &Params) -> Result<Vec<Check>> {
    let l = p.sites;
    let tol = p.tol(DECOMPOSITION_RTOL);
    let tp = transfer_polynomial(l)?;
    let r = extract_involution(&tp)?;
    let tower = IomTower::for_order(l, l)?;
    let ds = build_d_all(&tower, l)?;
    let mut checks = vec![Check::exact(
        "decomposition.recursion_coefficients",
        "exact coefficients of the A_{2k-1} recursion, k = 2..6",
        recursion_mismatches(),
    )];
    for (n, d) in ds.iter().enumerate().skip(1) {
        checks.push(Check::new(
            format!("decomposition.d{n}"),
            "D_n = B_n(A_1, .., A_n) / (2^n n!) against the interpolated coefficient",
            relative_distance(d, tp.coeff(n))?,
            tol,
        ));
    }
    let mut comm = 0.0f64;
    for i in 1..=tower.max_odd_order() {
        for j in i + 1..=tower.max_odd_order() {
            let (a, b) = (tower.odd(i), tower.odd(j));
            let c = commutator(a, b)?.frobenius_norm();
            comm = comm.max(c / (a.frobenius_norm() * b.frobenius_norm()));
        }
    }
    let t = tp.eval_scaled(p.x);
    let a1 = tower.odd(1);
    let comm_t = commutator(a1, &t)?.frobenius_norm() / (a1.frobenius_norm() * t.frobenius_norm());
    checks.push(Check::new(
        "decomposition.iom_commute",
        "[A_{2i-1}, A_{2j-1}] = 0",
        comm,
        p.tol(DEFAULT_SPECTRUM_RTOL),
    ));
    checks.push(Check::new(
        "decomposition.a1_commutes_with_t",
        "[A_1, T(x)] = 0",
        comm_t,
        p.tol(DEFAULT_SPECTRUM_RTOL),
    ));
    let proj = projectors_with(&tower, &r)?;
    checks.push(Check::new(
        "decomposition.projector_bell",
        "B_L(A_1, .., A_L) / (2 L!) = ((-1)^L + R) / 2",
        proj.bell_residual,
        p.tol(DEFAULT_SPECTRUM_RTOL),
    ));
    let diag = partition_diagnostic(l, DIAGNOSTIC_ROWS, DIAGNOSTIC_X, p.columns)?;
    checks.push(Check::new(
        "decomposition.projector_completeness",
        "tr(Pi_+ T^M) + tr(Pi_- T^M) = tr T^M",
        diag.completeness_residual,
        p.tol(DIAGNOSTIC_RTOL),
    ));
    for s in &diag.sectors {
        checks.push(Check::new(
            format!(
                "decomposition.sector_trace_{}",
                if s.r > 0 { "plus" } else { "minus" }
            ),
            "tr(Pi_r T^M) equals the sum of Lambda^M over the states with eigenvalue r of R",
            s.relative_deviation,
            p.tol(DIAGNOSTIC_RTOL),
        ));
    }
    Ok(checks)
}

/// `A_{2n} / L` for `n = 1..5`.
const EVEN_IOM_TABLE: [i64; 5] = [-2, -36, -2400, -352_800, -91_445_760];

fn iom(p: &Params) -> Result<Vec<Check>> {
    let l = p.sites;
    let mut checks = Vec::new();
    let mut trig = 0.0f64;
    for n in 1..=p.n {
        for delta in 0..=1 {
            let direct = sin_odd_sum_direct(l, delta, n);
            let closed = sin_odd_sum_closed(l, delta, n);
            trig = trig.max((direct - closed).abs() / direct.abs().max(1.0));
        }
    }
    checks.push(Check::new(
        "iom.odd_sum_closed_form",
        "closed form of sum_k sin^{2n-1} t_k",
        trig,
        p.tol(TRIG_SUM_RTOL),
    ));
    let max_k = 4.min(l).min(p.n);
    let tower = IomTower::build(l, max_k)?;
    for k in 1..=max_k {
        checks.push(Check::new(
            format!("iom.a{}_spectrum", 2 * k - 1),
            "spectrum of A_{2k-1} equals (2k-2)! 2^{2k-1} (2 sum_P - sum) sin^{2k-1} t_k",
            odd_spectrum_deviation(&tower, k)?,
            p.tol(DEFAULT_SPECTRUM_RTOL),
        ));
    }
    let table_mismatches = EVEN_IOM_TABLE
        .iter()
        .enumerate()
        .filter(|(i, &v)| iom_even_per_site(i + 1) != rat(v, 1))
        .count();
    checks.push(Check::exact(
        "iom.even_values",
        "A_{2n} = -2n ((2n-1)!/n!)^2 L",
        table_mismatches,
    ));
    let mut even = 0.0f64;
    for n in (1..=p.n).filter(|&n| l > n) {
        let exact = crate::exact::to_f64(&sin_even_sum_exact(l, n)?);
        for delta in 0..=1 {
            even = even.max((sin_even_sum_direct(l, delta, n) - exact).abs() / exact);
        }
    }
    checks.push(Check::new(
        "iom.even_sum",
        "sum_k sin^{2n} t_k = L C(2n, n) / 4^n for L > n",
        even,
        p.tol(TRIG_SUM_RTOL),
    ));
    let moments = (1..=8usize)
        .flat_map(|n| (1..n).map(move |m| (n, m)))
        .filter(|&(n, m)| moment_sum(n, m) != int(0))
        .count();
    checks.push(Check::exact(
        "iom.vanishing_moments",
        "sum_k (-1)^{k+1} C(2n-1, n-k) (2k-1)^{2m-1} = 0 for m < n",
        moments,
    ));
    checks.push(Check::exact(
        "iom.alpha1",
        "alpha_1 = -8",
        usize::from(alpha(1) != Rational::from(int(-8))),
    ));
    for (name, partition) in [("ground", vec![]), ("one_particle", vec![1])] {
        let c = continuum_consistency(&partition, 1, &[32, 64, 128])?;
        checks.push(Check::new(
            format!("iom.continuum_{name}"),
            "Richardson limit of (2L/pi)(A_1 - A_1^div) against alpha_1 I_1",
            c.relative_error,
            p.rtol.unwrap_or(CONTINUUM_RTOL),
        ));
    }
    Ok(checks)
}

fn characters(p: &Params) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for delta in p.deltas() {
        for sector in p.sectors() {
            let c = compare_forms(p.sites, delta, sector, p.cutoff)?;
            checks.push(Check::exact(
                format!("characters.forms_d{delta}_{sector}"),
                "fermionic = bosonic = subset enumeration",
                usize::from(c.first_difference.is_some()),
            ));
        }
    }
    for delta in p.deltas() {
        for sector in p.sectors() {
            let c = compare_limit(delta, sector)?;
            checks.push(Check::exact(
                format!("characters.limit_d{delta}_{sector}"),
                "infinite-size character against its listed low-order coefficients",
                usize::from(!c.matches),
            ));
        }
    }
    if p.delta.is_none_or(|d| d == 0) {
        let (even, odd) = distinct_partition_counts(20);
        let mut bad = 0;
        for sector in p.sectors() {
            let series = char_limit(0, sector, 40)?;
            let want = if sector == Sector::Plus { &even } else { &odd };
            bad += (0..=20u32)
                .filter(|&n| series.coeff(2 * n) != want[n as usize].into())
                .count();
        }
        checks.push(Check::exact(
            "characters.distinct_partitions",
            "delta = 0 limits count partitions into distinct parts by parity of the part count",
            bad,
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(sites: usize) -> Params {
        Params {
            sites,
            ..Params::default()
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(0.0), 0.0);
        assert!(round_sig(f64::NAN).is_nan());
        assert_eq!(round_sig(-2.5e-17), -2.5e-17);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::PARTS.iter().chain(&[Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for suite in [
            Suite::Weights,
            Suite::Tl,
            Suite::Inversion,
            Suite::Decomposition,
            Suite::Iom,
        ] {
            let rep = run(suite, &params(3)).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn character_suite_flags_only_the_misprinted_series() {
        let rep = run(Suite::Characters, &params(4)).unwrap();
        let failed: Vec<&str> = rep.failures().map(|c| c.id.as_str()).collect();
        assert_eq!(failed, vec!["characters.limit_d1_plus"]);
        let p = Params {
            delta: Some(0),
            ..params(4)
        };
        assert!(run(Suite::Characters, &p).unwrap().passed());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(run(Suite::Decomposition, &params(9)).is_err());
        let p = Params {
            x: 0.0,
            ..params(3)
        };
        assert!(run(Suite::Tl, &p).is_err());
    }

    #[test]
    fn tolerance_override_applies() {
        let p = Params {
            rtol: Some(0.0),
            ..params(3)
        };
        let rep = run(Suite::Tl, &p).unwrap();
        assert!(rep.checks.iter().all(|c| c.tol == 0.0));
    }
}
