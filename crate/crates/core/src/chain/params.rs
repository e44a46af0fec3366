use serde::{Deserialize, Serialize};

use super::ChainError;

/// Number of operators `k` and the nesting depth `n` (`k ∈ {2n, 2n+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainShape {
    pub n: usize,
    pub k: usize,
}

impl ChainShape {
    pub fn from_k(k: usize) -> Result<Self, ChainError> {
        if k < 2 {
            return Err(ChainError::InvalidK(k));
        }
        Ok(Self { n: k / 2, k })
    }

    pub fn new(n: usize, k: usize) -> Result<Self, ChainError> {
        if n == 0 || (k != 2 * n && k != 2 * n + 1) {
            return Err(ChainError::ShapeMismatch { n, k });
        }
        Ok(Self { n, k })
    }

    pub fn is_odd(&self) -> bool {
        self.k % 2 == 1
    }

    pub fn ascending_members(&self) -> usize {
        self.n
    }

    pub fn descending_members(&self) -> usize {
        if self.is_odd() {
            self.n
        } else {
            self.n - 1
        }
    }

    /// Number of hypothesis inequalities, `k - 1`.
    pub fn members(&self) -> usize {
        self.k - 1
    }

    /// Number of layers between the base symbol and the outer sandwich.
    pub fn layers(&self) -> usize {
        2 * self.n - 1
    }
}

/// Every scalar of a chain instance: `t₁..t_n ∈ [0,1]`, `p₁..p_{2n} ≥ 1`,
/// `r > t_n` and one weight per hypothesis, `w₁..w_{k-1} ∈ [0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub n: usize,
    pub k: usize,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub r: f64,
    pub w: Vec<f64>,
}

impl ParamSet {
    pub fn new(
        n: usize,
        k: usize,
        t: Vec<f64>,
        p: Vec<f64>,
        r: f64,
        w: Vec<f64>,
    ) -> Result<Self, ChainError> {
        let params = Self { n, k, t, p, r, w };
        params.validate()?;
        Ok(params)
    }

    pub fn shape(&self) -> ChainShape {
        ChainShape {
            n: self.n,
            k: self.k,
        }
    }

    pub fn t_n(&self) -> f64 {
        self.t[self.n - 1]
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        let shape = ChainShape::new(self.n, self.k)?;
        check_len("t", self.n, self.t.len())?;
        check_len("p", 2 * self.n, self.p.len())?;
        check_len("w", shape.members(), self.w.len())?;
        for (i, &t) in self.t.iter().enumerate() {
            check_unit(format!("t{}", i + 1), t)?;
        }
        for (i, &w) in self.w.iter().enumerate() {
            check_unit(format!("w{}", i + 1), w)?;
        }
        for (i, &p) in self.p.iter().enumerate() {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(ChainError::OutOfRange {
                    what: format!("p{}", i + 1),
                    value: p,
                    range: "[1, ∞)",
                });
            }
        }
        if !self.r.is_finite() || !(self.r > self.t_n()) {
            return Err(ChainError::RNotAboveT {
                r: self.r,
                t_n: self.t_n(),
            });
        }
        Ok(())
    }

    /// Scalar bindings `t_i`, `p_i`, `r`, `w_m` by name.
    pub fn lookup(&self, name: super::Name) -> Option<f64> {
        use super::Name;
        match name {
            Name::T(i) => i.checked_sub(1).and_then(|i| self.t.get(i)).copied(),
            Name::P(i) => i.checked_sub(1).and_then(|i| self.p.get(i)).copied(),
            Name::R => Some(self.r),
            Name::W(i) => i.checked_sub(1).and_then(|i| self.w.get(i)).copied(),
        }
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), ChainError> {
    if expected != got {
        return Err(ChainError::LengthMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}

fn check_unit(what: String, value: f64) -> Result<(), ChainError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(ChainError::OutOfRange {
            what,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// ψ[2n] through the recurrence `b₀ = 1`,
/// `b_j = (b_{j-1} p_{2j-1} - t_j) p_{2j} + t_j`.
pub fn psi_exponent(t: &[f64], p: &[f64]) -> Result<f64, ChainError> {
    if t.is_empty() {
        return Err(ChainError::LengthMismatch {
            what: "t",
            expected: 1,
            got: 0,
        });
    }
    check_len("p", 2 * t.len(), p.len())?;
    Ok(t
        .iter()
        .zip(p.chunks_exact(2))
        .fold(1.0, |b, (&tj, pp)| (b * pp[0] - tj) * pp[1] + tj))
}

/// `(r - t_n) / (ψ[2n] - t_n + r)` for the parameters' own `p`.
pub fn necessity_weight(params: &ParamSet) -> Result<f64, ChainError> {
    necessity_weight_for(&params.t, &params.p, params.r)
}

pub fn necessity_weight_for(t: &[f64], p: &[f64], r: f64) -> Result<f64, ChainError> {
    let psi = psi_exponent(t, p)?;
    let t_n = t[t.len() - 1];
    if !(r > t_n) {
        return Err(ChainError::RNotAboveT { r, t_n });
    }
    let denom = psi - t_n + r;
    if !(denom > 0.0) {
        return Err(ChainError::DegenerateWeight(denom));
    }
    Ok((r - t_n) / denom)
}
