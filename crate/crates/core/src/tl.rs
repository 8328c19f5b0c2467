//! Periodic Temperley-Lieb generators and the lattice integrals of motion.
//!
//! The generators `e_1 .. e_{2L}` live on a 2L-cycle. Even generators are
//! diagonal, odd ones mix a single spin, so products with a generator are
//! applied in O(dim^2) without materializing it. The towers
//! `H_{2k-1} = sqrt2 sum_n [e_n, [e_{n+1}, ... e_{n+2k-2}]]` are built from
//! those sparse products; the integrals of motion `A_{2k-1}` follow by a
//! linear recursion in the towers, and the transfer-matrix coefficients are
//! `D_n = B_n(A_1, .., A_n) / (2^n n!)` with `B_n` the complete Bell
//! polynomial.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, int, rat_int, to_f64, Rational};
use crate::operator::{commutator, relative_distance, Operator};
use crate::par;
use crate::transfer::parity_sign;

/// Relative commutator tolerance used to accept Bell-polynomial arguments.
pub const COMMUTE_RTOL: f64 = 1e-8;

/// One generator `e_i` of the periodic TL algebra on `sites` spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TlGenerator {
    sites: usize,
    index: usize,
}

impl TlGenerator {
    /// `index` is reduced mod 2L into `1..=2L`.
    pub fn new(sites: usize, index: isize) -> Result<Self> {
        if sites < 2 {
            return Err(Error::SitesOutOfRange {
                l: sites,
                min: 2,
                max: crate::operator::MAX_SITES,
            });
        }
        let n = 2 * sites as isize;
        Ok(Self {
            sites,
            index: ((index - 1).rem_euclid(n) + 1) as usize,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Bit of the spin that an odd generator acts on.
    fn site_bit(&self) -> usize {
        1 << (self.index.div_ceil(2) - 1)
    }

    /// Diagonal of an even generator: sqrt2 where neighbouring spins differ.
    fn diagonal(&self) -> Vec<f64> {
        let i = self.index / 2 - 1;
        let j = (i + 1) % self.sites;
        (0..1usize << self.sites)
            .map(|a| {
                if ((a >> i) & 1) != ((a >> j) & 1) {
                    SQRT_2
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn to_operator(&self) -> Operator {
        if self.index.is_multiple_of(2) {
            Operator::diagonal(self.sites, &self.diagonal()).expect("valid sites")
        } else {
            let bit = self.site_bit();
            Operator::from_fn(self.sites, |a, b| {
                if a == b || a == b ^ bit {
                    FRAC_1_SQRT_2
                } else {
                    0.0
                }
            })
            .expect("valid sites")
        }
    }

    /// `e * m`.
    pub fn left_mul(&self, m: &Operator) -> Operator {
        let dim = m.dim();
        let mut out = m.clone();
        if self.index.is_multiple_of(2) {
            let d = self.diagonal();
            for (a, &da) in d.iter().enumerate() {
                for c in 0..dim {
                    out.set(a, c, da * m.get(a, c));
                }
            }
        } else {
            let bit = self.site_bit();
            for a in 0..dim {
                let (row, partner) = (m.row(a), m.row(a ^ bit));
                for c in 0..dim {
                    out.set(a, c, FRAC_1_SQRT_2 * (row[c] + partner[c]));
                }
            }
        }
        out
    }

    /// `m * e`.
    pub fn right_mul(&self, m: &Operator) -> Operator {
        let dim = m.dim();
        let mut out = m.clone();
        if self.index.is_multiple_of(2) {
            let d = self.diagonal();
            for a in 0..dim {
                for (c, &dc) in d.iter().enumerate() {
                    out.set(a, c, m.get(a, c) * dc);
                }
            }
        } else {
            let bit = self.site_bit();
            for a in 0..dim {
                let row = m.row(a);
                for c in 0..dim {
                    out.set(a, c, FRAC_1_SQRT_2 * (row[c] + row[c ^ bit]));
                }
            }
        }
        out
    }

    /// `[e, m]`.
    pub fn commutator_with(&self, m: &Operator) -> Operator {
        let mut out = self.left_mul(m);
        out.add_scaled_mut(-1.0, &self.right_mul(m))
            .expect("same sites");
        out
    }
}

/// Dense matrix of `e_i`, index read mod 2L.
pub fn tl_generator(sites: usize, index: isize) -> Result<Operator> {
    Ok(TlGenerator::new(sites, index)?.to_operator())
}

/// Largest relative residuals of the periodic TL relations over all
/// generators: `e_i^2 = sqrt2 e_i`, `e_i e_{i+-1} e_i = e_i` and
/// `[e_i, e_j] = 0` for `|i - j| >= 2` on the 2L-cycle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TlResiduals {
    pub square: f64,
    pub braid: f64,
    pub commuting: f64,
}

pub fn tl_residuals(sites: usize) -> Result<TlResiduals> {
    TlGenerator::new(sites, 1)?;
    let n = 2 * sites as isize;
    let per_generator = par::map_range(n as usize, |offset| {
        let i = offset as isize + 1;
        let e = TlGenerator::new(sites, i).expect("valid sites");
        let dense = e.to_operator();
        let norm = dense.frobenius_norm();
        let sq = e.left_mul(&dense);
        let square = relative_distance(&sq, &dense.scaled(SQRT_2)).expect("same sites");
        let braid = [-1isize, 1]
            .iter()
            .map(|step| {
                let f = TlGenerator::new(sites, i + step).expect("valid sites");
                let efe = e.left_mul(&f.left_mul(&dense));
                relative_distance(&efe, &dense).expect("same sites")
            })
            .fold(0.0, f64::max);
        let commuting = (1..=n)
            .filter(|j| {
                let d = (i - j).rem_euclid(n);
                d >= 2 && d <= n - 2
            })
            .map(|j| {
                let f = TlGenerator::new(sites, j).expect("valid sites");
                f.commutator_with(&dense).frobenius_norm() / (norm * norm)
            })
            .fold(0.0, f64::max);
        (square, braid, commuting)
    });
    Ok(per_generator.into_iter().fold(
        TlResiduals {
            square: 0.0,
            braid: 0.0,
            commuting: 0.0,
        },
        |acc, (s, b, c)| TlResiduals {
            square: acc.square.max(s),
            braid: acc.braid.max(b),
            commuting: acc.commuting.max(c),
        },
    ))
}

/// `H_{2k-1}`; for `k = 1` the nest is the bare generator.
pub fn hamiltonian_tower(sites: usize, k: usize) -> Result<Operator> {
    if k == 0 {
        return Err(Error::InvalidArgument("tower order k starts at 1".into()));
    }
    TlGenerator::new(sites, 1)?;
    let depth = 2 * k - 1;
    let terms = par::map_range(2 * sites, |offset| {
        let n = offset as isize + 1;
        let innermost = TlGenerator::new(sites, n + depth as isize - 1).expect("valid sites");
        let mut acc = innermost.to_operator();
        for j in (0..depth - 1).rev() {
            let e = TlGenerator::new(sites, n + j as isize).expect("valid sites");
            acc = e.commutator_with(&acc);
        }
        acc
    });
    let mut total = Operator::zeros(sites)?;
    for t in &terms {
        total.add_scaled_mut(SQRT_2, t)?;
    }
    Ok(total)
}

/// Exact coefficients of
/// `A_{2k-1} = c_H H_{2k-1} + sum_{m=1}^{k-1} c_m A_{2k-2m-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionCoefficients {
    pub tower: Rational,
    /// `(j, c)` pairs meaning `c * A_{2j-1}`, highest `j` first.
    pub lower: Vec<(usize, Rational)>,
}

pub fn recursion_coefficients(k: usize) -> RecursionCoefficients {
    assert!(k >= 1, "order starts at 1");
    let k64 = k as u64;
    let tower = rat_int(factorial(2 * k64 - 2)) / rat_int(int(1) << (k - 1));
    let lower = (1..k64)
        .map(|m| {
            let sign = if m % 2 == 1 { 1 } else { -1 };
            let c = rat_int(int(sign)) / rat_int(int(m as i64))
                * rat_int(binomial(2 * k64 - m - 2, m - 1))
                * rat_int(factorial(2 * k64 - 1))
                / rat_int(factorial(2 * k64 - 2 * m - 2));
            ((k64 - m) as usize, c)
        })
        .collect();
    RecursionCoefficients { tower, lower }
}

/// Exact even integral of motion `A_{2n} / L = -2n ((2n-1)!/n!)^2`.
pub fn iom_even_per_site(n: usize) -> Rational {
    let n64 = n as u64;
    let ratio = rat_int(factorial(2 * n64 - 1)) / rat_int(factorial(n64));
    -(rat_int(int(2 * n as i64)) * &ratio * &ratio)
}

/// Scalar value of `A_{2n}` (the operator is this times the identity).
pub fn iom_even(sites: usize, n: usize) -> Result<f64> {
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
    Ok(to_f64(&iom_even_per_site(n)) * sites as f64)
}

/// The integrals of motion `A_1 .. A_{2K}` on `sites` spins.
#[derive(Debug, Clone)]
pub struct IomTower {
    sites: usize,
    odd: Vec<Operator>,
    even: Vec<f64>,
}

impl IomTower {
    /// Builds `A_1, A_3, .., A_{2K-1}` and the even scalars up to `A_{2K'}`
    /// with `K' = min(K, L-1)`. Requires `L > K - 1`.
    pub fn build(sites: usize, max_k: usize) -> Result<Self> {
        if max_k == 0 {
            return Err(Error::InvalidArgument("tower needs at least A_1".into()));
        }
        if sites < max_k {
            return Err(Error::BelowThreshold {
                order: 2 * max_k - 1,
                threshold: max_k - 1,
                l: sites,
            });
        }
        TlGenerator::new(sites, 1)?;
        let mut odd: Vec<Operator> = Vec::with_capacity(max_k);
        for k in 1..=max_k {
            let coeffs = recursion_coefficients(k);
            let mut a = hamiltonian_tower(sites, k)?;
            a.scale_mut(to_f64(&coeffs.tower));
            if k == 1 {
                a.add_identity_mut(-2.0 * sites as f64);
            }
            for (j, c) in &coeffs.lower {
                a.add_scaled_mut(to_f64(c), &odd[j - 1])?;
            }
            odd.push(a);
        }
        let even = (1..=max_k.min(sites - 1))
            .map(|n| iom_even(sites, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sites, odd, even })
    }

    /// Tower sufficient for `D_0 .. D_n`.
    pub fn for_order(sites: usize, n: usize) -> Result<Self> {
        Self::build(sites, n.div_ceil(2).max(1))
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `A_{2k-1}`, `k >= 1`.
    pub fn odd(&self, k: usize) -> &Operator {
        &self.odd[k - 1]
    }

    pub fn max_odd_order(&self) -> usize {
        self.odd.len()
    }

    /// Scalar `A_{2n}`, `n >= 1`.
    pub fn even(&self, n: usize) -> f64 {
        self.even[n - 1]
    }

    /// `A_n` as a Bell argument.
    pub fn arg(&self, n: usize) -> Result<BellArg<'_>> {
        if n % 2 == 1 {
            self.odd
                .get(n / 2)
                .map(BellArg::Dense)
                .ok_or(Error::BellOrder {
                    n,
                    available: 2 * self.odd.len() - 1,
                })
        } else {
            self.even
                .get(n / 2 - 1)
                .map(|&c| BellArg::Scalar(c))
                .ok_or(Error::BelowThreshold {
                    order: n,
                    threshold: n / 2,
                    l: self.sites,
                })
        }
    }

    /// `A_1, .., A_n`.
    pub fn args(&self, n: usize) -> Result<Vec<BellArg<'_>>> {
        (1..=n).map(|j| self.arg(j)).collect()
    }
}

/// Argument of a Bell polynomial: a dense operator or a multiple of the
/// identity.
#[derive(Debug, Clone)]
pub enum BellArg<'a> {
    Dense(&'a Operator),
    Scalar(f64),
}

impl BellArg<'_> {
    fn times(&self, m: &Operator) -> Result<Operator> {
        match self {
            BellArg::Dense(a) => m.matmul(a),
            BellArg::Scalar(c) => Ok(m.scaled(*c)),
        }
    }
}

fn check_commuting(args: &[BellArg<'_>]) -> Result<()> {
    let dense: Vec<(usize, &Operator)> = args
        .iter()
        .enumerate()
        .filter_map(|(i, a)| match a {
            BellArg::Dense(op) => Some((i, *op)),
            BellArg::Scalar(_) => None,
        })
        .collect();
    for (p, &(i, a)) in dense.iter().enumerate() {
        for &(j, b) in &dense[p + 1..] {
            let c = commutator(a, b)?;
            let scale = a.frobenius_norm() * b.frobenius_norm();
            let residual = if scale > 0.0 {
                c.frobenius_norm() / scale
            } else {
                0.0
            };
            if residual > COMMUTE_RTOL {
                return Err(Error::NonCommuting {
                    i: i + 1,
                    j: j + 1,
                    residual,
                });
            }
        }
    }
    Ok(())
}

/// `B_0 .. B_n` of commuting arguments by
/// `B_{m+1} = sum_{j=0}^{m} C(m, j) B_{m-j} x_{j+1}`.
pub fn bell_sequence(sites: usize, args: &[BellArg<'_>], n: usize) -> Result<Vec<Operator>> {
    if n > args.len() {
        return Err(Error::BellOrder {
            n,
            available: args.len(),
        });
    }
    check_commuting(&args[..n])?;
    let mut seq = vec![Operator::identity(sites)?];
    for m in 0..n {
        let mut next = Operator::zeros(sites)?;
        for j in 0..=m {
            let c = to_f64(&rat_int(binomial(m as u64, j as u64)));
            next.add_scaled_mut(c, &args[j].times(&seq[m - j])?)?;
        }
        seq.push(next);
    }
    Ok(seq)
}

/// Complete Bell polynomial `B_n(x_1, .., x_n)` of commuting operators.
pub fn bell_polynomial(args: &[Operator], n: usize) -> Result<Operator> {
    let sites = args
        .first()
        .map(Operator::sites)
        .ok_or_else(|| Error::InvalidArgument("no Bell arguments".into()))?;
    let wrapped: Vec<BellArg<'_>> = args.iter().map(BellArg::Dense).collect();
    Ok(bell_sequence(sites, &wrapped, n)?.pop().expect("non-empty"))
}

/// Scalar complete Bell polynomials `B_0 .. B_n`.
pub fn bell_scalar_sequence(args: &[f64], n: usize) -> Vec<f64> {
    let mut seq = vec![1.0];
    for m in 0..n {
        let next = (0..=m)
            .map(|j| to_f64(&rat_int(binomial(m as u64, j as u64))) * seq[m - j] * args[j])
            .sum();
        seq.push(next);
    }
    seq
}

/// `1 / (2^n n!)`.
fn d_normalization(n: usize) -> f64 {
    let denom = (int(1) << n) * factorial(n as u64);
    to_f64(&(Rational::one() / rat_int(denom)))
}

/// `D_0 .. D_n` assembled from the integrals of motion.
pub fn build_d_all(tower: &IomTower, n: usize) -> Result<Vec<Operator>> {
    let args = tower.args(n)?;
    let seq = bell_sequence(tower.sites, &args, n)?;
    Ok(seq
        .into_iter()
        .enumerate()
        .map(|(m, b)| b.scaled(d_normalization(m)))
        .collect())
}

/// `D_n = B_n(A_1, .., A_n) / (2^n n!)`.
pub fn build_d(sites: usize, n: usize) -> Result<Operator> {
    if n > sites {
        return Err(Error::InvalidArgument(format!(
            "D_n exists for n <= L only (n={n}, L={sites})"
        )));
    }
    let tower = IomTower::for_order(sites, n)?;
    Ok(build_d_all(&tower, n)?.pop().expect("non-empty"))
}

/// `Pi_+ = (1 + R)/2`, `Pi_- = (1 - R)/2` and their Bell-polynomial form.
#[derive(Debug, Clone)]
pub struct Projectors {
    pub plus: Operator,
    pub minus: Operator,
    /// `|B_L / (2 L!) - ((-1)^L 1 + R)/2| / |((-1)^L 1 + R)/2|`
    pub bell_residual: f64,
}

pub fn projectors_with(tower: &IomTower, r: &Operator) -> Result<Projectors> {
    let l = r.sites();
    let id = Operator::identity(l)?;
    let square_residual = relative_distance(&r.matmul(r)?, &id)?;
    if square_residual > crate::transfer::INVOLUTION_RTOL {
        return Err(Error::NotInvolution {
            residual: square_residual,
            tol: crate::transfer::INVOLUTION_RTOL,
        });
    }
    let mut plus = r.scaled(0.5);
    plus.add_identity_mut(0.5);
    let mut minus = r.scaled(-0.5);
    minus.add_identity_mut(0.5);

    let args = tower.args(l)?;
    let b = bell_sequence(l, &args, l)?.pop().expect("non-empty");
    let bell = b.scaled(0.5 / to_f64(&rat_int(factorial(l as u64))));
    // even L: Pi_+ = bell; odd L: Pi_- = -bell
    let target = if l.is_multiple_of(2) {
        plus.clone()
    } else {
        minus.scaled(-1.0)
    };
    debug_assert_eq!(parity_sign(l) > 0.0, l.is_multiple_of(2));
    Ok(Projectors {
        bell_residual: relative_distance(&bell, &target)?,
        plus,
        minus,
    })
}

pub fn projectors(sites: usize, r: &Operator) -> Result<Projectors> {
    let tower = IomTower::for_order(sites, sites)?;
    projectors_with(&tower, r)
}

/// True when `c` is an integer; used for the exact coefficient tables.
pub fn is_integer(c: &Rational) -> bool {
    c.denom().is_one() || c.numer().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::operator::frobenius_distance;

    fn rel(a: &Operator, b: &Operator) -> f64 {
        frobenius_distance(a, b).unwrap() / b.frobenius_norm().max(1.0)
    }

    #[test]
    fn even_generator_diagonal_at_two_sites() {
        let e2 = tl_generator(2, 2).unwrap();
        // configurations (+,+)=0, (-,+)=1, (+,-)=2, (-,-)=3
        assert_eq!(e2.get(0, 0), 0.0);
        assert_eq!(e2.get(1, 1), SQRT_2);
        assert_eq!(e2.get(2, 2), SQRT_2);
        assert_eq!(e2.get(3, 3), 0.0);
    }

    #[test]
    fn odd_generator_norm_at_two_sites() {
        let e1 = tl_generator(2, 1).unwrap();
        let zero = Operator::zeros(2).unwrap();
        // 8 entries of 1/sqrt2
        assert!((frobenius_distance(&e1, &zero).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn generators_need_two_sites() {
        assert!(tl_generator(1, 1).is_err());
        assert_eq!(TlGenerator::new(3, 0).unwrap().index(), 6);
        assert_eq!(TlGenerator::new(3, 7).unwrap().index(), 1);
    }

    #[test]
    fn sparse_products_match_dense() {
        let m = Operator::from_fn(3, |i, j| ((i * 5 + j * 3) % 7) as f64 - 3.0).unwrap();
        for i in 1..=6 {
            let g = TlGenerator::new(3, i).unwrap();
            let e = g.to_operator();
            assert!(rel(&g.left_mul(&m), &e.matmul(&m).unwrap()) < 1e-15);
            assert!(rel(&g.right_mul(&m), &m.matmul(&e).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn tl_relations_with_wrap() {
        for l in 2..=5 {
            let n = 2 * l as isize;
            for i in 1..=n {
                let e = tl_generator(l, i).unwrap();
                let sq = e.matmul(&e).unwrap();
                assert!(rel(&sq, &e.scaled(SQRT_2)) < 1e-14);
                for step in [-1, 1] {
                    let f = tl_generator(l, i + step).unwrap();
                    let efe = e.matmul(&f).unwrap().matmul(&e).unwrap();
                    assert!(rel(&efe, &e) < 1e-14, "L={l} i={i} step={step}");
                }
                for j in 1..=n {
                    let d = (i - j).rem_euclid(n);
                    if d >= 2 && d <= n - 2 {
                        let f = tl_generator(l, j).unwrap();
                        assert!(commutator(&e, &f).unwrap().max_abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn sparse_relation_residuals() {
        for l in 2..=6 {
            let r = tl_residuals(l).unwrap();
            assert!(
                r.square < 1e-14 && r.braid < 1e-14 && r.commuting < 1e-14,
                "{r:?}"
            );
        }
    }

    #[test]
    fn first_tower_trace() {
        let h1 = hamiltonian_tower(2, 1).unwrap();
        assert!((h1.trace() - 16.0).abs() < 1e-12);
        for k in 2..=3 {
            assert!(hamiltonian_tower(4, k).unwrap().trace().abs() < 1e-9);
        }
    }

    #[test]
    fn recursion_reproduces_listed_coefficients() {
        let table: [(usize, i64, &[i64]); 5] = [
            (2, 1, &[6]),
            (3, 6, &[60, -120]),
            (4, 90, &[210, -5040, 5040]),
            (5, 2520, &[504, -45360, 604800, -362880]),
            (6, 113400, &[990, -221760, 11642400, -99792000, 39916800]),
        ];
        for (k, tower, lower) in table {
            let c = recursion_coefficients(k);
            assert_eq!(c.tower, rat(tower, 1), "k={k}");
            let got: Vec<Rational> = c.lower.iter().map(|(_, v)| v.clone()).collect();
            let want: Vec<Rational> = lower.iter().map(|&v| rat(v, 1)).collect();
            assert_eq!(got, want, "k={k}");
            let idx: Vec<usize> = c.lower.iter().map(|(j, _)| *j).collect();
            assert_eq!(idx, (1..k).rev().collect::<Vec<_>>());
        }
        assert_eq!(recursion_coefficients(1).tower, rat(1, 1));
    }

    #[test]
    fn even_iom_values() {
        let per_site = [-2, -36, -2400, -352800, -91445760];
        for (n, v) in per_site.iter().enumerate() {
            assert_eq!(iom_even_per_site(n + 1), rat(*v, 1));
        }
        assert_eq!(iom_even(5, 3).unwrap(), -12000.0);
        assert!(iom_even(3, 3).is_err());
    }

    #[test]
    fn tower_threshold() {
        assert!(IomTower::build(2, 3).is_err());
        assert!(IomTower::build(3, 3).is_ok());
    }

    #[test]
    fn first_integrals() {
        let l = 3;
        let t = IomTower::build(l, 2).unwrap();
        let mut a1 = hamiltonian_tower(l, 1).unwrap();
        a1.add_identity_mut(-2.0 * l as f64);
        assert!(rel(t.odd(1), &a1) < 1e-15);
        let mut a3 = hamiltonian_tower(l, 2).unwrap();
        a3.add_scaled_mut(6.0, &a1).unwrap();
        assert!(rel(t.odd(2), &a3) < 1e-14);
    }

    /// Complete Bell polynomial by summing over set partitions of {1..n}.
    fn bell_by_set_partitions(x: &[f64], n: usize) -> f64 {
        fn go(i: usize, n: usize, blocks: &mut Vec<usize>, x: &[f64]) -> f64 {
            if i == n {
                return blocks.iter().map(|&s| x[s - 1]).product();
            }
            let mut total = 0.0;
            for b in 0..blocks.len() {
                blocks[b] += 1;
                total += go(i + 1, n, blocks, x);
                blocks[b] -= 1;
            }
            blocks.push(1);
            total += go(i + 1, n, blocks, x);
            blocks.pop();
            total
        }
        go(0, n, &mut Vec::new(), x)
    }

    #[test]
    fn bell_recurrence_matches_set_partitions() {
        let x = [0.7, -1.3, 0.4, 2.1, -0.6, 1.1, 0.9];
        let seq = bell_scalar_sequence(&x, 7);
        for (n, b) in seq.iter().enumerate() {
            let oracle = bell_by_set_partitions(&x, n);
            assert!((b - oracle).abs() < 1e-12 * oracle.abs().max(1.0), "n={n}");
        }
        // B_1 = x1, B_3 = x1^3 + 3 x1 x2 + x3
        assert_eq!(seq[1], x[0]);
        let b3 = x[0].powi(3) + 3.0 * x[0] * x[1] + x[2];
        assert!((seq[3] - b3).abs() < 1e-14);
        // seven-term expansion of B_5
        let (a, b, c, d, e) = (x[0], x[1], x[2], x[3], x[4]);
        let b5 = a.powi(5)
            + 10.0 * a.powi(3) * b
            + 15.0 * a * b * b
            + 10.0 * a * a * c
            + 10.0 * b * c
            + 5.0 * a * d
            + e;
        assert!((seq[5] - b5).abs() < 1e-12);
    }

    #[test]
    fn bell_of_operators_matches_scalar_on_diagonals() {
        let diags = [
            [0.5, -1.0, 2.0, 0.25],
            [1.5, 0.5, -0.5, 1.0],
            [0.1, 0.2, 0.3, 0.4],
        ];
        let ops: Vec<Operator> = diags
            .iter()
            .map(|d| Operator::diagonal(2, d).unwrap())
            .collect();
        let b3 = bell_polynomial(&ops, 3).unwrap();
        for i in 0..4 {
            let col: Vec<f64> = diags.iter().map(|d| d[i]).collect();
            let want = bell_scalar_sequence(&col, 3)[3];
            assert!((b3.get(i, i) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn bell_rejects_non_commuting() {
        let a = tl_generator(2, 1).unwrap();
        let b = tl_generator(2, 2).unwrap();
        assert!(matches!(
            bell_polynomial(&[a, b], 2),
            Err(Error::NonCommuting { i: 1, j: 2, .. })
        ));
    }

    #[test]
    fn low_order_d_formulas() {
        let l = 4;
        let t = IomTower::for_order(l, 3).unwrap();
        let d = build_d_all(&t, 3).unwrap();
        let a1 = t.odd(1);
        assert!(rel(&d[1], &a1.scaled(0.5)) < 1e-15);
        let mut d2 = a1.matmul(a1).unwrap();
        d2.add_identity_mut(t.even(1));
        assert!(rel(&d[2], &d2.scaled(1.0 / 8.0)) < 1e-14);
        let mut d3 = t.odd(2).clone();
        d3.add_scaled_mut(1.0, &a1.matmul(a1).unwrap().matmul(a1).unwrap())
            .unwrap();
        d3.add_scaled_mut(3.0 * t.even(1), a1).unwrap();
        assert!(rel(&d[3], &d3.scaled(1.0 / 48.0)) < 1e-14);
    }
}
