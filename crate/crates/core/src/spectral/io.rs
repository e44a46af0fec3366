use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Field, HermitianMatrix, Scalar, SpectralError};

/// JSON matrix file: `{"dim": d, "field": "real"|"complex", "entries": [...]}`
/// with row-major entries; complex entries are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub field: Field,
    pub entries: Entries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

impl<T: Scalar> HermitianMatrix<T> {
    pub fn to_file(&self) -> MatrixFile {
        let entries = row_major(self.as_matrix());
        let entries = match T::FIELD {
            Field::Real => Entries::Real(entries.iter().map(|x| x.parts().0).collect()),
            Field::Complex => Entries::Complex(
                entries
                    .iter()
                    .map(|x| {
                        let (re, im) = x.parts();
                        [re, im]
                    })
                    .collect(),
            ),
        };
        MatrixFile {
            dim: self.dim(),
            field: T::FIELD,
            entries,
        }
    }

    /// Reads a matrix file. A real file may be loaded into a complex matrix;
    /// the reverse is rejected.
    pub fn from_file(file: &MatrixFile) -> Result<Self, SpectralError> {
        if file.field == Field::Complex && T::FIELD == Field::Real {
            return Err(SpectralError::Format(
                "complex matrix file cannot be loaded in real mode".into(),
            ));
        }
        let pairs: Vec<(f64, f64)> = match &file.entries {
            Entries::Real(v) => v.iter().map(|&x| (x, 0.0)).collect(),
            Entries::Complex(v) => v.iter().map(|&[re, im]| (re, im)).collect(),
        };
        let values = pairs
            .into_iter()
            .map(|(re, im)| {
                T::from_parts(re, im).ok_or_else(|| {
                    SpectralError::Format("imaginary part in a real matrix".into())
                })
            })
            .collect::<Result<Vec<T>, _>>()?;
        Self::from_row_slice(file.dim, &values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("matrix file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SpectralError> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| SpectralError::Format(e.to_string()))?;
        Self::from_file(&file)
    }
}

fn row_major<T: Scalar>(m: &DMatrix<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn real_json_shape() {
        let h = HermitianMatrix::<f64>::from_row_slice(2, &[2.0, 1.0, 1.0, 3.0]).unwrap();
        let text = h.to_json();
        assert_eq!(text, r#"{"dim":2,"field":"real","entries":[2.0,1.0,1.0,3.0]}"#);
        assert_eq!(HermitianMatrix::<f64>::from_json(&text).unwrap(), h);
    }

    #[test]
    fn complex_json_round_trip() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let h = HermitianMatrix::<Complex64>::from_row_slice(2, &[one * 2.0, i, -i, one]).unwrap();
        let text = h.to_json();
        assert!(text.contains(r#""field":"complex""#));
        assert_eq!(HermitianMatrix::<Complex64>::from_json(&text).unwrap(), h);
        assert!(HermitianMatrix::<f64>::from_json(&text).is_err());
    }

    #[test]
    fn wrong_entry_count() {
        let text = r#"{"dim":2,"field":"real","entries":[1.0,0.0,0.0]}"#;
        assert!(matches!(
            HermitianMatrix::<f64>::from_json(text),
            Err(SpectralError::Format(_))
        ));
    }
}
