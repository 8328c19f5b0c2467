//! Boltzmann weights, the row-to-row transfer matrix with periodic spatial
//! boundary, its polynomial coefficients in `x = sin 4u`, and the inversion
//! identity.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{commutator, relative_distance, Operator};
use crate::par;

/// Largest L accepted by [`build_transfer`].
pub const MAX_TRANSFER_SITES: usize = 12;
/// Largest L accepted by [`transfer_polynomial`].
pub const MAX_POLYNOMIAL_SITES: usize = 10;
/// Interpolation window for the coefficients `D_n`. Nodes with `x < 0`
/// are sampled at `u in (-pi/8, 0)`, where the weights are the same
/// rational functions of `tan u`.
pub const NODE_INTERVAL: (f64, f64) = (-0.95, 1.0);
/// Relative tolerance of the held-out interpolation check.
pub const INTERPOLATION_RTOL: f64 = 1e-8;
/// Relative tolerance for `R^2 = 1`.
pub const INVOLUTION_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn value(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    fn from_bit(bit: usize) -> Spin {
        if bit == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    fn bit(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// A row of `sites` spins packed into the bits of an index; bit `k` holds
/// site `k + 1` (0 = up, 1 = down).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    sites: usize,
    bits: usize,
}

impl SpinConfig {
    pub fn from_index(sites: usize, bits: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_TRANSFER_SITES {
            return Err(Error::SitesOutOfRange {
                l: sites,
                min: 1,
                max: MAX_TRANSFER_SITES,
            });
        }
        if bits >> sites != 0 {
            return Err(Error::InvalidArgument(format!(
                "index {bits} out of range for L={sites}"
            )));
        }
        Ok(Self { sites, bits })
    }

    pub fn from_spins(spins: &[Spin]) -> Result<Self> {
        let bits = spins
            .iter()
            .enumerate()
            .fold(0, |acc, (k, s)| acc | (s.bit() << k));
        Self::from_index(spins.len(), bits)
    }

    pub fn index(&self) -> usize {
        self.bits
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Spin at 1-based `site`, read periodically (site `n + L` is site `n`).
    pub fn spin(&self, site: isize) -> Spin {
        let l = self.sites as isize;
        let k = (site - 1).rem_euclid(l) as usize;
        Spin::from_bit((self.bits >> k) & 1)
    }

    pub fn spins(&self) -> Vec<Spin> {
        (1..=self.sites as isize).map(|n| self.spin(n)).collect()
    }
}

fn check_u(u: f64) -> Result<()> {
    if !(u > 0.0 && u < FRAC_PI_4) {
        return Err(Error::SpectralParameter { u });
    }
    Ok(())
}

fn kron(a: Spin, b: Spin) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Right face weight. `rho` is the upper spin, `sigma` the lower one and
/// `tau` the spin on the vertical edge.
pub fn weight_right(rho: Spin, tau: Spin, sigma: Spin, u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(weight_right_raw(rho, tau, sigma, u))
}

fn weight_right_raw(rho: Spin, tau: Spin, sigma: Spin, u: f64) -> f64 {
    let t = (FRAC_PI_4 - u).tan();
    let same = kron(sigma, rho);
    let opposite = kron(sigma, rho.flip());
    (t * same + opposite) * kron(sigma, tau) + (same / t + opposite) * kron(sigma, tau.flip())
}

/// Left face weight, same argument convention as [`weight_right`].
pub fn weight_left(rho: Spin, tau: Spin, sigma: Spin, u: f64) -> Result<f64> {
    check_u(u)?;
    Ok(weight_left_raw(rho, tau, sigma, u))
}

fn weight_left_raw(rho: Spin, tau: Spin, sigma: Spin, u: f64) -> f64 {
    let t = u.tan();
    let same = kron(sigma, rho);
    let opposite = kron(sigma, rho.flip());
    (same / t + opposite) * kron(sigma, tau) + (t * same + opposite) * kron(sigma, tau.flip())
}

/// Largest `|W_R(rho, tau, sigma; pi/4 - u) - W_L(rho, -tau, sigma; u)|`
/// relative to `max(|W_L|, 1)`, over all spin triples and `samples` values
/// of `u` spread over `(0, pi/4)`.
pub fn crossing_residual(samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 0..samples {
        let u = (j as f64 + 0.5) / samples as f64 * FRAC_PI_4;
        for rho in Spin::BOTH {
            for tau in Spin::BOTH {
                for sigma in Spin::BOTH {
                    let lhs = weight_right(rho, tau, sigma, FRAC_PI_4 - u)?;
                    let rhs = weight_left(rho, tau.flip(), sigma, u)?;
                    worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
                }
            }
        }
    }
    Ok(worst)
}

/// `x = sin 4u`.
pub fn x_of_u(u: f64) -> f64 {
    (4.0 * u).sin()
}

/// The branch `u in (0, pi/8]` with `sin 4u = x`, for `x in (0, 1]`.
pub fn u_of_x(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "x={x} has no spectral parameter in (0, pi/4); use the polynomial form"
        )));
    }
    Ok(x.asin() / 4.0)
}

fn check_transfer_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > MAX_TRANSFER_SITES {
        return Err(Error::SitesOutOfRange {
            l: sites,
            min: 1,
            max: MAX_TRANSFER_SITES,
        });
    }
    Ok(())
}

type Mat2 = [[f64; 2]; 2];

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Periodic-row transfer matrix `T_{sigma, rho}(u)`.
///
/// Each entry is the trace over the periodic vertical spins of an ordered
/// product of site blocks `M_n[tau_n][tau_{n+1}] = W_L(rho_n, tau_n, sigma_n)
/// W_R(rho_n, tau_{n+1}, sigma_n)`, which costs O(L) per entry.
pub fn build_transfer(sites: usize, u: f64) -> Result<Operator> {
    check_transfer_sites(sites)?;
    check_u(u)?;
    Ok(contract(sites, u))
}

fn contract(sites: usize, u: f64) -> Operator {
    // wl[rho][tau][sigma], bit-indexed
    let mut wl = [[[0.0; 2]; 2]; 2];
    let mut wr = [[[0.0; 2]; 2]; 2];
    for rho in Spin::BOTH {
        for tau in Spin::BOTH {
            for sigma in Spin::BOTH {
                wl[rho.bit()][tau.bit()][sigma.bit()] = weight_left_raw(rho, tau, sigma, u);
                wr[rho.bit()][tau.bit()][sigma.bit()] = weight_right_raw(rho, tau, sigma, u);
            }
        }
    }
    Operator::from_fn(sites, |sigma, rho| {
        let mut acc: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
        for n in 0..sites {
            let s = (sigma >> n) & 1;
            let r = (rho >> n) & 1;
            let mut block = [[0.0; 2]; 2];
            for (a, row) in block.iter_mut().enumerate() {
                for (b, v) in row.iter_mut().enumerate() {
                    *v = wl[r][a][s] * wr[r][b][s];
                }
            }
            acc = mul2(&acc, &block);
        }
        acc[0][0] + acc[1][1]
    })
    .expect("sites already checked")
}

/// Transfer matrix at `x in (0, 1]`.
pub fn build_transfer_x(sites: usize, x: f64) -> Result<Operator> {
    build_transfer(sites, u_of_x(x)?)
}

/// Chebyshev polynomial of the first kind by the three-term recurrence;
/// valid for any real `z`.
pub fn chebyshev_t(n: usize, z: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => z,
        _ => {
            let (mut prev, mut cur) = (1.0, z);
            for _ in 1..n {
                let next = 2.0 * z * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Coefficients of `T(x) = 2^{2L} x^{-L} sum_n D_n x^n`.
#[derive(Debug, Clone)]
pub struct TransferPolynomial {
    sites: usize,
    coeffs: Vec<Operator>,
    nodes: Vec<f64>,
    validation_node: f64,
    validation_residual: f64,
}

impl TransferPolynomial {
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `D_0 .. D_L`.
    pub fn coeffs(&self) -> &[Operator] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Operator {
        &self.coeffs[n]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn validation_node(&self) -> f64 {
        self.validation_node
    }

    /// Relative residual of the interpolant at the held-out node.
    pub fn validation_residual(&self) -> f64 {
        self.validation_residual
    }

    /// `sum_n D_n x^n`, i.e. `x^L T(x) / 2^{2L}`. Valid for any real `x`.
    pub fn eval_scaled(&self, x: f64) -> Operator {
        let mut out = self.coeffs[self.sites].clone();
        for c in self.coeffs[..self.sites].iter().rev() {
            out.scale_mut(x);
            out.add_scaled_mut(1.0, c).expect("same sites");
        }
        out
    }

    /// `T(x)` from the polynomial form; the only route to negative `x`.
    pub fn eval(&self, x: f64) -> Result<Operator> {
        if x == 0.0 {
            return Err(Error::ZeroX);
        }
        let l = self.sites as i32;
        Ok(self.eval_scaled(x).scaled(4f64.powi(l) / x.powi(l)))
    }
}

/// `x^L T(x) / 2^{2L}` sampled directly, for `x in [-1, 1]`, `x != 0`.
fn sample_scaled(sites: usize, x: f64) -> Result<Operator> {
    if !(x.abs() <= 1.0 && x != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "interpolation node x={x} outside [-1, 1] or zero"
        )));
    }
    let mut t = contract(sites, x.asin() / 4.0);
    t.scale_mut(x.powi(sites as i32) / 4f64.powi(sites as i32));
    Ok(t)
}

/// Chebyshev points on [`NODE_INTERVAL`].
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    let (a, b) = NODE_INTERVAL;
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    (0..count)
        .map(|j| {
            let theta = (2 * j + 1) as f64 * std::f64::consts::PI / (2 * count) as f64;
            mid + half * theta.cos()
        })
        .collect()
}

fn pick_validation_node(nodes: &[f64]) -> f64 {
    let preferred = 0.55;
    if nodes.iter().all(|n| (n - preferred).abs() > 0.01) {
        return preferred;
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let i = sorted
        .iter()
        .position(|n| (n - preferred).abs() <= 0.01)
        .expect("node near 0.55");
    let j = if i + 1 < sorted.len() { i + 1 } else { i - 1 };
    (sorted[i] + sorted[j]) / 2.0
}

/// Monomial coefficients of the polynomial through `(nodes[i], values[i])`
/// by the Bjorck-Pereyra recurrences: Newton divided differences over the
/// nodes in increasing order, then conversion to the monomial basis. Far
/// more accurate than inverting the Vandermonde matrix.
fn solve_vandermonde(nodes: &[f64], values: Vec<Operator>) -> Result<Vec<Operator>> {
    let mut pairs: Vec<(f64, Operator)> = nodes.iter().copied().zip(values).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidArgument(
            "interpolation nodes are not distinct".into(),
        ));
    }
    let (x, mut c): (Vec<f64>, Vec<Operator>) = pairs.into_iter().unzip();
    let n = x.len() - 1;
    for k in 0..n {
        for i in (k + 1..=n).rev() {
            let mut d = c[i].sub(&c[i - 1])?;
            d.scale_mut(1.0 / (x[i] - x[i - k - 1]));
            c[i] = d;
        }
    }
    for k in (0..n).rev() {
        for i in k..n {
            let next = c[i + 1].clone();
            c[i].add_scaled_mut(-x[k], &next)?;
        }
    }
    Ok(c)
}

/// Interpolates the `D_n` from Chebyshev nodes on [`NODE_INTERVAL`].
pub fn transfer_polynomial(sites: usize) -> Result<TransferPolynomial> {
    transfer_polynomial_with_nodes(sites, &chebyshev_nodes(sites + 1))
}

/// Interpolates the `D_n` from `sites + 1` distinct non-zero nodes in
/// `[-1, 1]`.
pub fn transfer_polynomial_with_nodes(sites: usize, nodes: &[f64]) -> Result<TransferPolynomial> {
    if sites == 0 || sites > MAX_POLYNOMIAL_SITES {
        return Err(Error::SitesOutOfRange {
            l: sites,
            min: 1,
            max: MAX_POLYNOMIAL_SITES,
        });
    }
    let m = sites + 1;
    if nodes.len() != m {
        return Err(Error::InvalidArgument(format!(
            "need {m} interpolation nodes, got {}",
            nodes.len()
        )));
    }
    let samples: Vec<Result<Operator>> = par::map_slice(nodes, |&x| sample_scaled(sites, x));
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;

    let coeffs = solve_vandermonde(nodes, samples)?;

    let validation_node = pick_validation_node(nodes);
    let direct = sample_scaled(sites, validation_node)?;
    let mut tp = TransferPolynomial {
        sites,
        coeffs,
        nodes: nodes.to_vec(),
        validation_node,
        validation_residual: 0.0,
    };
    let residual = relative_distance(&tp.eval_scaled(validation_node), &direct)?;
    if residual > INTERPOLATION_RTOL {
        return Err(Error::InterpolationResidual {
            node: validation_node,
            residual,
            tol: INTERPOLATION_RTOL,
        });
    }
    tp.validation_residual = residual;
    Ok(tp)
}

/// `R = 2^L D_L - (-1)^L 1`, checked to square to the identity.
pub fn extract_involution(tp: &TransferPolynomial) -> Result<Operator> {
    let l = tp.sites;
    let mut r = tp.coeffs[l].scaled(2f64.powi(l as i32));
    r.add_identity_mut(-parity_sign(l));
    let id = Operator::identity(l)?;
    let residual = relative_distance(&r.matmul(&r)?, &id)?;
    if residual > INVOLUTION_RTOL {
        return Err(Error::NotInvolution {
            residual,
            tol: INVOLUTION_RTOL,
        });
    }
    Ok(r)
}

/// `(-1)^n`.
pub fn parity_sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InversionReport {
    pub sites: usize,
    pub x: f64,
    /// `|T(x)T(-x) - rhs| / |rhs|`
    pub residual: f64,
    /// Scalar coefficient `(-1)^L 2^{2L+1} T_{2L}(1/x)` of the identity.
    pub rhs_scalar: f64,
    /// `|[R, T(x)]| / (|R| |T(x)|)`
    pub commutator_residual: f64,
}

/// Checks `T(x) T(-x) = (-1)^L 2^{2L+1} (T_{2L}(1/x) 1 + R)`.
///
/// `T(x)` is built directly from the weights, `T(-x)` from the polynomial.
pub fn verify_inversion_with(
    tp: &TransferPolynomial,
    r: &Operator,
    x: f64,
) -> Result<InversionReport> {
    let l = tp.sites;
    let t_plus = build_transfer_x(l, x)?;
    let t_minus = tp.eval(-x)?;
    let lhs = t_plus.matmul(&t_minus)?;
    let prefactor = parity_sign(l) * 2f64.powi(2 * l as i32 + 1);
    let rhs_scalar = prefactor * chebyshev_t(2 * l, 1.0 / x);
    let mut rhs = r.scaled(prefactor);
    rhs.add_identity_mut(rhs_scalar);
    let comm = commutator(r, &t_plus)?;
    Ok(InversionReport {
        sites: l,
        x,
        residual: relative_distance(&lhs, &rhs)?,
        rhs_scalar,
        commutator_residual: comm.frobenius_norm() / (r.frobenius_norm() * t_plus.frobenius_norm()),
    })
}

pub fn verify_inversion(sites: usize, x: f64) -> Result<InversionReport> {
    let tp = transfer_polynomial(sites)?;
    let r = extract_involution(&tp)?;
    verify_inversion_with(&tp, &r, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::frobenius_distance;
    use std::f64::consts::PI;

    fn triples() -> Vec<(Spin, Spin, Spin)> {
        let mut out = Vec::new();
        for a in Spin::BOTH {
            for b in Spin::BOTH {
                for c in Spin::BOTH {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    #[test]
    fn spin_config_round_trip_and_periodicity() {
        for bits in 0..32 {
            let c = SpinConfig::from_index(5, bits).unwrap();
            assert_eq!(SpinConfig::from_spins(&c.spins()).unwrap(), c);
            assert_eq!(c.spin(0), c.spin(5));
            assert_eq!(c.spin(6), c.spin(1));
        }
        let c = SpinConfig::from_index(3, 0b010).unwrap();
        assert_eq!(c.spins(), vec![Spin::Up, Spin::Down, Spin::Up]);
        assert!(SpinConfig::from_index(3, 8).is_err());
    }

    #[test]
    fn weights_at_small_u_and_pi_over_8() {
        for (r, t, s) in triples() {
            assert!((weight_right(r, t, s, 1e-12).unwrap() - 1.0).abs() < 1e-10);
        }
        let up = Spin::Up;
        let w = weight_right(up, up, up, PI / 8.0).unwrap();
        assert!((w - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let w = weight_left(up, up, up, PI / 8.0).unwrap();
        assert!((w - (2f64.sqrt() + 1.0)).abs() < 1e-14);
        // sigma = -rho, sigma = tau
        let w = weight_left(Spin::Down, Spin::Up, Spin::Up, 0.37).unwrap();
        assert_eq!(w, 1.0);
    }

    #[test]
    fn crossing_relation() {
        for u in [0.2, 0.3] {
            for (r, t, s) in triples() {
                let lhs = weight_right(r, t, s, FRAC_PI_4 - u).unwrap();
                let rhs = weight_left(r, t.flip(), s, u).unwrap();
                assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn crossing_over_samples() {
        assert!(crossing_residual(20).unwrap() < 1e-14);
    }

    #[test]
    fn weights_reject_poles() {
        for u in [0.0, FRAC_PI_4, -0.1, 1.0, f64::NAN] {
            assert!(weight_right(Spin::Up, Spin::Up, Spin::Up, u).is_err());
            assert!(weight_left(Spin::Up, Spin::Up, Spin::Up, u).is_err());
        }
        assert!(build_transfer(0, 0.1).is_err());
        assert!(build_transfer(13, 0.1).is_err());
    }

    /// Literal sum over all 2^L vertical configurations.
    fn brute_transfer(sites: usize, u: f64) -> Operator {
        Operator::from_fn(sites, |s, r| {
            let sigma = SpinConfig::from_index(sites, s).unwrap();
            let rho = SpinConfig::from_index(sites, r).unwrap();
            (0..1usize << sites)
                .map(|t| {
                    let tau = SpinConfig::from_index(sites, t).unwrap();
                    (1..=sites as isize)
                        .map(|n| {
                            weight_left(rho.spin(n), tau.spin(n), sigma.spin(n), u).unwrap()
                                * weight_right(rho.spin(n), tau.spin(n + 1), sigma.spin(n), u)
                                    .unwrap()
                        })
                        .product::<f64>()
                })
                .sum()
        })
        .unwrap()
    }

    #[test]
    fn contraction_matches_brute_force() {
        for sites in 1..=4 {
            let fast = build_transfer(sites, 0.13).unwrap();
            let slow = brute_transfer(sites, 0.13);
            assert!(relative_distance(&fast, &slow).unwrap() < 1e-14);
        }
    }

    #[test]
    fn trace_at_two_sites() {
        let t = build_transfer_x(2, 0.5).unwrap();
        assert!((t.trace() - 272.0).abs() < 1e-10);
    }

    #[test]
    fn depends_on_u_only_through_x() {
        let a = build_transfer(3, 0.1).unwrap();
        let b = build_transfer(3, FRAC_PI_4 - 0.1).unwrap();
        assert!(relative_distance(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev_t(0, 7.3), 1.0);
        assert_eq!(chebyshev_t(4, 2.0), 97.0);
        assert!((chebyshev_t(6, 0.3f64.cos()) - 1.8f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn polynomial_basics() {
        let tp = transfer_polynomial(3).unwrap();
        let id = Operator::identity(3).unwrap();
        assert!(relative_distance(tp.coeff(0), &id).unwrap() < 1e-9);
        assert_eq!(tp.validation_node(), 0.55);
        assert!(tp.validation_residual() < 1e-8);
        let direct = build_transfer_x(3, 0.55).unwrap();
        assert!(relative_distance(&tp.eval(0.55).unwrap(), &direct).unwrap() < 1e-8);
    }

    #[test]
    fn validation_node_avoids_interpolation_nodes() {
        // odd node count puts a node at the centre
        let nodes = chebyshev_nodes(5);
        let v = pick_validation_node(&nodes);
        assert!(nodes.iter().all(|n| (n - v).abs() > 0.01));
    }

    #[test]
    fn involution_at_two_sites() {
        let tp = transfer_polynomial(2).unwrap();
        let r = extract_involution(&tp).unwrap();
        assert!(r.trace().abs() < 1e-10);
        let t = build_transfer_x(2, 0.4).unwrap();
        let c = commutator(&r, &t).unwrap();
        assert!(c.frobenius_norm() < 1e-9 * t.frobenius_norm());
    }

    #[test]
    fn inversion_rhs_scalar_at_two_sites() {
        let rep = verify_inversion(2, 0.5).unwrap();
        assert!((rep.rhs_scalar - 3104.0).abs() < 1e-9);
        assert!(rep.residual < 1e-8);
    }

    #[test]
    fn node_independence() {
        let a = transfer_polynomial(4).unwrap();
        let b = transfer_polynomial_with_nodes(4, &[0.21, 0.35, 0.5, 0.72, 0.88]).unwrap();
        for n in 0..=4 {
            let d = frobenius_distance(a.coeff(n), b.coeff(n)).unwrap();
            assert!(d <= 1e-8 * a.coeff(n).frobenius_norm().max(1.0), "n={n}");
        }
    }
}
