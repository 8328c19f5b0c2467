//! Dense real operators on the 2^L dimensional spin space.
//!
//! Everything that is a matrix in this crate (transfer matrices, TL
//! generators, integrals of motion, projectors) is an [`Operator`]. Storage
//! is dense row-major `f64`; the sizes of interest stop at L = 10.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{Complex, DMatrix, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::par;

/// Largest number of sites for which an operator may be allocated.
pub const MAX_SITES: usize = 12;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Dense real square matrix of dimension `2^sites`.
#[derive(Clone, PartialEq)]
pub struct Operator {
    sites: usize,
    dim: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("sites", &self.sites)
            .field("dim", &self.dim)
            .field("norm", &self.frobenius_norm())
            .finish()
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::SitesOutOfRange {
            l: sites,
            min: 1,
            max: MAX_SITES,
        });
    }
    Ok(())
}

impl Operator {
    pub fn zeros(sites: usize) -> Result<Self> {
        check_sites(sites)?;
        let dim = 1usize << sites;
        Ok(Self {
            sites,
            dim,
            data: vec![0.0; dim * dim],
        })
    }

    pub fn identity(sites: usize) -> Result<Self> {
        Self::scalar(sites, 1.0)
    }

    /// `c` times the identity.
    pub fn scalar(sites: usize, c: f64) -> Result<Self> {
        let mut m = Self::zeros(sites)?;
        for i in 0..m.dim {
            m.data[i * m.dim + i] = c;
        }
        Ok(m)
    }

    /// Builds the operator entry by entry; rows are filled in parallel.
    pub fn from_fn<F>(sites: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let mut m = Self::zeros(sites)?;
        let dim = m.dim;
        par::for_each_row(&mut m.data, dim, |i, row| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        });
        Ok(m)
    }

    /// Wraps row-major data. `data.len()` must be `4^sites`.
    pub fn from_row_major(sites: usize, data: Vec<f64>) -> Result<Self> {
        check_sites(sites)?;
        let dim = 1usize << sites;
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for L={sites}, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        Ok(Self { sites, dim, data })
    }

    pub fn diagonal(sites: usize, diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(sites)?;
        if diag.len() != m.dim {
            return Err(Error::InvalidArgument(format!(
                "diagonal of length {} for dim {}",
                diag.len(),
                m.dim
            )));
        }
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = d;
        }
        Ok(m)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.sites != other.sites {
            return Err(Error::SizeMismatch {
                left: self.sites,
                right: other.sites,
            });
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let dim = self.dim;
        let mut out = vec![0.0; dim * dim];
        par::for_each_row(&mut out, dim, |i, acc| {
            let lhs = &self.data[i * dim..(i + 1) * dim];
            for (k, &a) in lhs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let rhs = &other.data[k * dim..(k + 1) * dim];
                for (o, &b) in acc.iter_mut().zip(rhs) {
                    *o += a * b;
                }
            }
        });
        Ok(Self {
            sites: self.sites,
            dim,
            data: out,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled_mut(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled_mut(-1.0, other)?;
        Ok(out)
    }

    /// `self += c * other`.
    pub fn add_scaled_mut(&mut self, c: f64, other: &Self) -> Result<()> {
        self.check_same(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    /// `self += c * 1`.
    pub fn add_identity_mut(&mut self, c: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += c;
        }
    }

    pub fn scale_mut(&mut self, c: f64) {
        self.data.iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale_mut(c);
        out
    }

    pub fn transpose(&self) -> Self {
        let dim = self.dim;
        let mut out = self.clone();
        for i in 0..dim {
            for j in 0..dim {
                out.data[j * dim + i] = self.data[i * dim + j];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest |a_ij - a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let dim = self.dim;
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                worst = worst.max((self.data[i * dim + j] - self.data[j * dim + i]).abs());
            }
        }
        worst
    }

    /// Returns `Some(c)` when the operator is exactly `c` times the identity.
    pub fn as_scalar(&self) -> Option<f64> {
        let c = self.data[0];
        let dim = self.dim;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j { c } else { 0.0 };
                if self.data[i * dim + j] != expected {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, exponent: u32) -> Self {
        let mut result = Self::identity(self.sites).expect("valid sites");
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base).expect("same sites");
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base).expect("same sites");
            }
        }
        result
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

/// `ab - ba`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    let mut ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    ab.add_scaled_mut(-1.0, &ba)?;
    Ok(ab)
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &Operator, b: &Operator) -> Result<f64> {
    a.check_same(b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// `|a - b| / max(|b|, tiny)`; the usual residual metric for identity checks.
pub fn relative_distance(a: &Operator, b: &Operator) -> Result<f64> {
    let d = frobenius_distance(a, b)?;
    let scale = b.frobenius_norm();
    Ok(if scale > 0.0 { d / scale } else { d })
}

/// Orders complex numbers by real part, then imaginary part.
pub fn cmp_complex(a: &Complex<f64>, b: &Complex<f64>) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All `dim` eigenvalues with multiplicity, sorted by (Re, Im).
///
/// Operators that are symmetric up to rounding go through the symmetric
/// solver and come back with zero imaginary parts; the rest use a real Schur
/// decomposition.
pub fn eigenvalue_multiset(m: &Operator) -> Result<Vec<Complex<f64>>> {
    if !m.is_finite() {
        return Err(Error::InvalidArgument("non-finite operator".into()));
    }
    let dim = m.dim;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mat = m.to_nalgebra();
    let mut values: Vec<Complex<f64>> = if m.asymmetry() <= 1e-12 * scale {
        let sym = (&mat + mat.transpose()) * 0.5;
        let eig = SymmetricEigen::try_new(sym, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(
            Error::EigenNoConvergence {
                dim,
                max_iterations: EIGEN_MAX_ITER,
                eps: EIGEN_EPS,
            },
        )?;
        eig.eigenvalues
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .collect()
    } else {
        let schur =
            Schur::try_new(mat, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::EigenNoConvergence {
                dim,
                max_iterations: EIGEN_MAX_ITER,
                eps: EIGEN_EPS,
            })?;
        schur.complex_eigenvalues().iter().copied().collect()
    };
    values.sort_by(cmp_complex);
    Ok(values)
}

/// Real parts of [`eigenvalue_multiset`], sorted ascending. Fails when some
/// imaginary part exceeds `imag_tol`.
pub fn real_spectrum(m: &Operator, imag_tol: f64) -> Result<Vec<f64>> {
    let values = eigenvalue_multiset(m)?;
    if let Some(bad) = values.iter().find(|z| z.im.abs() > imag_tol) {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue {bad} has imaginary part above {imag_tol:e}"
        )));
    }
    let mut re: Vec<f64> = values.into_iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    Ok(re)
}

/// Largest pointwise deviation between two sorted real multisets, or
/// infinity when the sizes differ.
pub fn multiset_deviation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
