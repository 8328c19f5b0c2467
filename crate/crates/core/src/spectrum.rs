//! Eigenstates labelled by fermionic partitions and the factorized
//! eigenvalues of the transfer matrix.
//!
//! A state is a subset `P` of `{1..L}`; `mu_k = +1` for `k` in `P` and `-1`
//! otherwise. The involution eigenvalue is `r = (-1)^{L-p}` and the momenta
//! are `t_k = (2k - delta) pi / 2L` with `delta = 1` exactly when
//! `(L even, r = +1)` or `(L odd, r = -1)`. The eigenvalue is
//!
//! ```text
//! Lambda(x) = 2^{2L} x^{-L} prod_k (1 + mu_k x sin t_k)
//! ```
//!
//! so that adding `k` to `P` multiplies the eigenvalue by
//! `(1 + x sin t_k) / (1 - x sin t_k)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{multiset_deviation, real_spectrum, Operator};
use crate::par;
use crate::transfer::{build_transfer_x, chebyshev_t, parity_sign};

/// Tolerance on the scaled eigenvalues `x^L Lambda / 2^{2L}`.
pub const SPECTRUM_TOL: f64 = 1e-8;
pub const MAX_STATE_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SpectrumState {
    sites: usize,
    partition: Vec<usize>,
    r: i8,
    delta: u8,
}

/// `delta` for a given sector.
pub fn delta_for(sites: usize, r: i8) -> u8 {
    let even = sites.is_multiple_of(2);
    u8::from((even && r == 1) || (!even && r == -1))
}

impl SpectrumState {
    /// State for a strictly increasing partition with parts in `1..=sites`.
    pub fn new(sites: usize, partition: Vec<usize>) -> Result<Self> {
        if sites == 0 || sites > MAX_STATE_SITES {
            return Err(Error::SitesOutOfRange {
                l: sites,
                min: 1,
                max: MAX_STATE_SITES,
            });
        }
        Self::new_unbounded(sites, partition)
    }

    /// Like [`SpectrumState::new`] without the cap on `sites`; for
    /// eigenvalue formulas that never touch a matrix.
    pub fn new_unbounded(sites: usize, partition: Vec<usize>) -> Result<Self> {
        if sites == 0 {
            return Err(Error::SitesOutOfRange {
                l: sites,
                min: 1,
                max: usize::MAX,
            });
        }
        let increasing = partition.windows(2).all(|w| w[0] < w[1]);
        let in_range = partition.iter().all(|&k| (1..=sites).contains(&k));
        if !increasing || !in_range {
            return Err(Error::InvalidArgument(format!(
                "partition {partition:?} is not a strictly increasing subset of 1..={sites}"
            )));
        }
        let r = parity_sign(sites - partition.len()) as i8;
        Ok(Self {
            sites,
            delta: delta_for(sites, r),
            partition,
            r,
        })
    }

    /// State for the subset whose bit `k-1` marks part `k`.
    pub fn from_mask(sites: usize, mask: usize) -> Result<Self> {
        let partition = (1..=sites).filter(|k| mask >> (k - 1) & 1 == 1).collect();
        Self::new(sites, partition)
    }

    /// State for a sign vector `mu`.
    pub fn from_mu(mu: &[i8]) -> Result<Self> {
        if mu.iter().any(|m| m.abs() != 1) {
            return Err(Error::InvalidArgument("mu_k must be +-1".into()));
        }
        let partition = mu
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == 1)
            .map(|(k, _)| k + 1)
            .collect();
        Self::new(mu.len(), partition)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    /// Number of parts `p`.
    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    pub fn r(&self) -> i8 {
        self.r
    }

    pub fn delta(&self) -> u8 {
        self.delta
    }

    pub fn mu(&self) -> Vec<i8> {
        (1..=self.sites)
            .map(|k| if self.partition.contains(&k) { 1 } else { -1 })
            .collect()
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        t_nodes(self.sites, self.delta)
    }

    /// `prod_k (1 + mu_k x sin t_k)`.
    pub fn scaled_eigenvalue(&self, x: f64) -> f64 {
        self.t_nodes()
            .iter()
            .zip(self.mu())
            .map(|(t, m)| 1.0 + f64::from(m) * x * t.sin())
            .product()
    }

    /// Transfer-matrix eigenvalue `Lambda(x)`.
    pub fn eigenvalue(&self, x: f64) -> Result<f64> {
        eigenvalue(self, x)
    }
}

/// All `2^L` states, subsets counted as binary numbers.
pub fn enumerate_states(sites: usize) -> Result<Vec<SpectrumState>> {
    if sites == 0 || sites > MAX_STATE_SITES {
        return Err(Error::SitesOutOfRange {
            l: sites,
            min: 1,
            max: MAX_STATE_SITES,
        });
    }
    Ok(par::map_range(1 << sites, |mask| {
        SpectrumState::from_mask(sites, mask).expect("valid mask")
    }))
}

/// `t_k = (2k - delta) pi / 2L`, `k = 1..L`.
pub fn t_nodes(sites: usize, delta: u8) -> Vec<f64> {
    (1..=sites)
        .map(|k| (2 * k) as f64 - f64::from(delta))
        .map(|a| a * PI / (2 * sites) as f64)
        .collect()
}

pub fn eigenvalue(state: &SpectrumState, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::ZeroX);
    }
    let l = state.sites as i32;
    Ok(4f64.powi(l) / x.powi(l) * state.scaled_eigenvalue(x))
}

/// Scaled eigenvalue of the empty partition in sector `r`, `prod_k (1 - x sin t_k)`.
pub fn vacuum_scaled_eigenvalue(sites: usize, r: i8, x: f64) -> f64 {
    t_nodes(sites, delta_for(sites, r))
        .iter()
        .map(|t| 1.0 - x * t.sin())
        .product()
}

/// `(1 + x sin t_k) / (1 - x sin t_k)` in sector `r`.
pub fn excitation_factor(sites: usize, r: i8, k: usize, x: f64) -> f64 {
    let t = t_nodes(sites, delta_for(sites, r))[k - 1];
    (1.0 + x * t.sin()) / (1.0 - x * t.sin())
}

/// `(-1)^L 2^{2L+1} (T_{2L}(1/x) + r)`.
pub fn inversion_rhs(sites: usize, r: i8, x: f64) -> f64 {
    parity_sign(sites)
        * 2f64.powi(2 * sites as i32 + 1)
        * (chebyshev_t(2 * sites, 1.0 / x) + f64::from(r))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOffender {
    pub rank: usize,
    pub numeric: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub sites: usize,
    pub x: f64,
    /// Largest deviation between sorted scaled spectra.
    pub max_deviation: f64,
    /// `|tr T - sum Lambda| / |tr T|`
    pub trace_discrepancy: f64,
    pub max_imaginary: f64,
    pub offenders: Vec<SpectrumOffender>,
    pub passed: bool,
}

/// Compares the numeric spectrum of `T(x)` with the factorized eigenvalues.
pub fn match_spectrum(sites: usize, x: f64) -> Result<MatchReport> {
    if !(2..=9).contains(&sites) {
        return Err(Error::SitesOutOfRange {
            l: sites,
            min: 2,
            max: 9,
        });
    }
    let mut t = build_transfer_x(sites, x)?;
    t.scale_mut(x.powi(sites as i32) / 4f64.powi(sites as i32));
    match_scaled_spectrum(&t, x)
}

/// Same as [`match_spectrum`] for an already scaled `x^L T(x) / 2^{2L}`.
pub fn match_scaled_spectrum(scaled: &Operator, x: f64) -> Result<MatchReport> {
    let sites = scaled.sites();
    let values = crate::operator::eigenvalue_multiset(scaled)?;
    let max_imaginary = values.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let numeric = real_spectrum(scaled, SPECTRUM_TOL * scaled.frobenius_norm())?;
    let states = enumerate_states(sites)?;
    let mut analytic: Vec<f64> = par::map_slice(&states, |s| s.scaled_eigenvalue(x));
    let analytic_sum: f64 = analytic.iter().sum();
    analytic.sort_by(f64::total_cmp);
    let offenders: Vec<SpectrumOffender> = numeric
        .iter()
        .zip(&analytic)
        .enumerate()
        .filter(|(_, (a, b))| (*a - *b).abs() > SPECTRUM_TOL)
        .map(|(rank, (&numeric, &analytic))| SpectrumOffender {
            rank,
            numeric,
            analytic,
        })
        .collect();
    let trace = scaled.trace();
    let trace_discrepancy = (trace - analytic_sum).abs() / trace.abs().max(f64::MIN_POSITIVE);
    let max_deviation = multiset_deviation(&numeric, &analytic);
    Ok(MatchReport {
        sites,
        x,
        max_deviation,
        trace_discrepancy,
        max_imaginary,
        passed: offenders.is_empty() && trace_discrepancy <= SPECTRUM_TOL,
        offenders,
    })
}

/// Number of states with `r = +1` and `r = -1`.
pub fn sector_counts(sites: usize) -> Result<(usize, usize)> {
    let states = enumerate_states(sites)?;
    let plus = states.iter().filter(|s| s.r == 1).count();
    Ok((plus, states.len() - plus))
}
