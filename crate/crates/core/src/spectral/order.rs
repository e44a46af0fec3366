use serde::{Deserialize, Serialize};
use std::fmt;

use super::{spectral_decompose, HermitianMatrix, Scalar, SpectralError};

/// Outcome of a Löwner comparison of `P` against `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Relation {
    /// `P ⪰ Q`
    Ge,
    /// `P ⪯ Q`
    Le,
    /// both
    Eq,
    Incomparable,
}

impl Relation {
    pub fn is_ge(self) -> bool {
        matches!(self, Relation::Ge | Relation::Eq)
    }

    pub fn is_le(self) -> bool {
        matches!(self, Relation::Le | Relation::Eq)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Ge => "GE",
            Relation::Le => "LE",
            Relation::Eq => "EQ",
            Relation::Incomparable => "INCOMPARABLE",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub relation: Relation,
    /// `λ_min(P-Q)` for GE, `λ_min(Q-P)` for LE, the smaller of the two for EQ
    /// and the larger (both negative) for INCOMPARABLE.
    pub margin: f64,
    pub tol: f64,
    /// `λ_min(P - Q)`
    pub ge_margin: f64,
    /// `λ_min(Q - P) = -λ_max(P - Q)`
    pub le_margin: f64,
}

impl Verdict {
    pub fn is_ge(&self) -> bool {
        self.relation.is_ge()
    }

    pub fn is_le(&self) -> bool {
        self.relation.is_le()
    }
}

/// Compares `P` and `Q` in the Löwner order with absolute tolerance `tol`.
pub fn loewner_compare<T: Scalar>(
    p: &HermitianMatrix<T>,
    q: &HermitianMatrix<T>,
    tol: f64,
) -> Result<Verdict, SpectralError> {
    let diff = p.checked_sub(q)?;
    let d = spectral_decompose(&diff)?;
    let ge_margin = d.min_eigenvalue();
    let le_margin = -d.max_eigenvalue();
    let ge = ge_margin >= -tol;
    let le = le_margin >= -tol;
    let (relation, margin) = match (ge, le) {
        (true, true) => (Relation::Eq, ge_margin.min(le_margin)),
        (true, false) => (Relation::Ge, ge_margin),
        (false, true) => (Relation::Le, le_margin),
        (false, false) => (Relation::Incomparable, ge_margin.max(le_margin)),
    };
    Ok(Verdict {
        relation,
        margin,
        tol,
        ge_margin,
        le_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::matrix_power;

    fn m(entries: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_row_slice(2, entries).unwrap()
    }

    #[test]
    fn identity_is_eq() {
        let i = HermitianMatrix::<f64>::identity(2);
        let v = loewner_compare(&i, &i, 1e-9).unwrap();
        assert_eq!(v.relation, Relation::Eq);
        assert_eq!(v.margin, 0.0);
    }

    #[test]
    fn scaled_identity_is_ge() {
        let v = loewner_compare(
            &HermitianMatrix::<f64>::scaled_identity(3, 2.0),
            &HermitianMatrix::identity(3),
            1e-9,
        )
        .unwrap();
        assert_eq!(v.relation, Relation::Ge);
        assert!((v.margin - 1.0).abs() < 1e-14);
    }

    /// Closed-form eigenvalues of a symmetric 2×2 `[[a, b], [b, c]]`.
    fn eig2(a: f64, b: f64, c: f64) -> (f64, f64) {
        let mid = (a + c) / 2.0;
        let rad = (((a - c) / 2.0).powi(2) + b * b).sqrt();
        (mid - rad, mid + rad)
    }

    #[test]
    fn squaring_breaks_the_order() {
        let p = m(&[2.0, 1.0, 1.0, 1.0]);
        let q = m(&[1.0, 1.0, 1.0, 1.0]);
        let v = loewner_compare(&p, &q, 1e-9).unwrap();
        assert_eq!(v.relation, Relation::Ge);
        assert!(v.margin.abs() < 1e-12);

        let p2 = matrix_power(&p, 2.0).unwrap();
        let q2 = matrix_power(&q, 2.0).unwrap();
        let v2 = loewner_compare(&p2, &q2, 1e-9).unwrap();
        assert_eq!(v2.relation, Relation::Incomparable);
        // P² - Q² = [[3, 1], [1, 0]]
        let (lo, hi) = eig2(3.0, 1.0, 0.0);
        assert!((v2.ge_margin - lo).abs() < 1e-12);
        assert!((v2.le_margin + hi).abs() < 1e-12);
        assert!(lo < 0.0);
    }

    #[test]
    fn swap_symmetry() {
        let p = m(&[3.0, 0.5, 0.5, 2.0]);
        let q = m(&[1.0, 0.2, 0.2, 1.0]);
        let a = loewner_compare(&p, &q, 1e-9).unwrap();
        let b = loewner_compare(&q, &p, 1e-9).unwrap();
        assert_eq!(a.relation, Relation::Ge);
        assert_eq!(b.relation, Relation::Le);
        assert_eq!(a.margin, b.margin);
    }

    #[test]
    fn dimension_mismatch() {
        let err = loewner_compare(
            &HermitianMatrix::<f64>::identity(2),
            &HermitianMatrix::identity(3),
            1e-9,
        );
        assert_eq!(
            err,
            Err(SpectralError::DimensionMismatch { left: 2, right: 3 })
        );
    }
}
