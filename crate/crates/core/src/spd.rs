//! Symmetric positive definite matrix calculus.
//!
//! Log/exp maps are computed through the symmetric eigendecomposition
//! `A = V diag(λ) Vᵀ`, so `log A = V diag(ln λ) Vᵀ` and `exp S = V diag(e^λ) Vᵀ`.
//! Log-Euclidean interpolation blends two SPD matrices linearly in the log
//! domain, which keeps the result on the manifold and interpolates the
//! determinant geometrically.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute eigenvalue floor for SPD admission.
pub const EPS_SPD: f64 = 1e-8;
/// Smallest singular value treated as nonzero by [`condition_number`].
pub const EPS_SV: f64 = 1e-12;
/// Relative asymmetry tolerated by the matrix constructors.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Condition number above which the modulation ratio starts to shrink.
pub const CONDITION_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    /// N/m
    TranslationalStiffness,
    /// Nm/rad
    RotationalStiffness,
    /// m/N
    TranslationalCompliance,
    /// rad/Nm
    RotationalCompliance,
    /// Ns/m or Nms/rad
    Damping,
    /// kg m²
    Inertia,
    Dimensionless,
}

impl Unit {
    /// Unit of the inverse quantity (stiffness <-> compliance).
    pub fn inverse(self) -> Unit {
        match self {
            Unit::TranslationalStiffness => Unit::TranslationalCompliance,
            Unit::TranslationalCompliance => Unit::TranslationalStiffness,
            Unit::RotationalStiffness => Unit::RotationalCompliance,
            Unit::RotationalCompliance => Unit::RotationalStiffness,
            other => other,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Unit::TranslationalStiffness => "N/m",
            Unit::RotationalStiffness => "Nm/rad",
            Unit::TranslationalCompliance => "m/N",
            Unit::RotationalCompliance => "rad/Nm",
            Unit::Damping => "damping",
            Unit::Inertia => "kg m^2",
            Unit::Dimensionless => "1",
        };
        f.write_str(s)
    }
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::dims(
            "non-empty square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::OutOfRange("matrix has non-finite entries".into()));
    }
    let scale = m.amax();
    let asym = asymmetry(m);
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok((m + m.transpose()) * 0.5)
}

/// Applies `f` to the eigenvalues of a symmetric matrix.
pub(crate) fn map_eigenvalues(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let mapped = eig.eigenvalues.map(f);
    let v = &eig.eigenvectors;
    let out = v * DMatrix::from_diagonal(&mapped) * v.transpose();
    (&out + out.transpose()) * 0.5
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

/// Symmetric matrix; the tangent space of the SPD manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    entries: DMatrix<f64>,
}

impl SymmetricMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Ok(Self {
            entries: check_symmetric(&entries)?,
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self {
            entries: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// Positive-definite view of this matrix, if it qualifies.
    pub fn to_spd(&self, unit: Unit) -> Result<SpdMatrix> {
        SpdMatrix::new(self.entries.clone(), unit)
    }
}

/// Symmetric positive definite matrix tagged with a physical unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    entries: DMatrix<f64>,
    unit: Unit,
}

impl SpdMatrix {
    /// Validates symmetry and the `EPS_SPD` eigenvalue floor.
    pub fn new(entries: DMatrix<f64>, unit: Unit) -> Result<Self> {
        let entries = check_symmetric(&entries)?;
        let min = min_eigenvalue(&entries);
        if min <= EPS_SPD {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self { entries, unit })
    }

    pub fn from_diagonal(diag: &[f64], unit: Unit) -> Result<Self> {
        Self::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
            unit,
        )
    }

    pub fn identity(dim: usize, unit: Unit) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
            unit,
        }
    }

    /// Skips validation. Only for matrices that are SPD by construction.
    pub(crate) fn from_trusted(entries: DMatrix<f64>, unit: Unit) -> Self {
        Self { entries, unit }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        self.entries.clone().symmetric_eigen().eigenvalues
    }

    /// Inverse, tagged with the dual unit (stiffness <-> compliance).
    pub fn inverse(&self) -> Self {
        let inv = match self.entries.clone().cholesky() {
            Some(ch) => ch.inverse(),
            None => map_eigenvalues(&self.entries, |l| 1.0 / l),
        };
        Self {
            entries: (&inv + inv.transpose()) * 0.5,
            unit: self.unit.inverse(),
        }
    }

    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    pub fn log_det(&self) -> f64 {
        self.eigenvalues().iter().map(|l| l.ln()).sum()
    }
}

/// Matrix logarithm of an SPD matrix.
pub fn spd_log(k: &SpdMatrix) -> Result<SymmetricMatrix> {
    let eig = k.entries.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min <= EPS_SPD {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    let v = &eig.eigenvectors;
    let out = v * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::ln)) * v.transpose();
    Ok(SymmetricMatrix {
        entries: (&out + out.transpose()) * 0.5,
    })
}

/// Matrix exponential of a symmetric matrix. Positive by construction,
/// though eigenvalues below `EPS_SPD` are possible for very negative input.
pub fn spd_exp(s: &SymmetricMatrix, unit: Unit) -> SpdMatrix {
    SpdMatrix::from_trusted(map_eigenvalues(&s.entries, f64::exp), unit)
}

/// `exp(α log A + (1 − α) log B)`.
///
/// The endpoints return clones of `A` (α = 1) and `B` (α = 0), so blending
/// with α = 0 leaves the baseline bit-for-bit unchanged.
pub fn log_euclidean_interpolate(a: &SpdMatrix, b: &SpdMatrix, alpha: f64) -> Result<SpdMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::dims(
            format!("{0}x{0}", a.dim()),
            format!("{0}x{0}", b.dim()),
        ));
    }
    if a.unit != b.unit {
        return Err(Error::UnitMismatch {
            left: a.unit.to_string(),
            right: b.unit.to_string(),
        });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!("alpha = {alpha} not in [0, 1]")));
    }
    if alpha == 1.0 {
        return Ok(a.clone());
    }
    if alpha == 0.0 {
        return Ok(b.clone());
    }
    let la = spd_log(a)?;
    let lb = spd_log(b)?;
    let blended = SymmetricMatrix {
        entries: la.entries * alpha + lb.entries * (1.0 - alpha),
    };
    Ok(spd_exp(&blended, a.unit))
}

/// Ratio of extreme singular values; `+inf` when the smallest one is below `EPS_SV`.
pub fn condition_number(m: &DMatrix<f64>) -> Result<f64> {
    if m.is_empty() || m.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min < EPS_SV {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

/// Commanded (`raw`) and posture-regularized (`processed`) modulation ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationRatio {
    pub raw: f64,
    pub processed: f64,
}

/// `α̂ = α / (1 + max(0, cond − 10))`; an infinite condition number gives `α̂ = 0`.
pub fn regularize_alpha(alpha: f64, cond_num: f64) -> ModulationRatio {
    let raw = alpha.clamp(0.0, 1.0);
    let processed = if cond_num.is_infinite() || cond_num.is_nan() {
        0.0
    } else {
        raw / (1.0 + (cond_num - CONDITION_THRESHOLD).max(0.0))
    };
    ModulationRatio { raw, processed }
}
