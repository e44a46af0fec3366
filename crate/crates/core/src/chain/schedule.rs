use super::{ChainError, ChainShape, Name, ScalarExpr};

fn check(what: &'static str, value: usize, lo: usize, hi: usize) -> Result<(), ChainError> {
    if value < lo || value > hi {
        return Err(ChainError::IndexOutOfRange { what, value, lo, hi });
    }
    Ok(())
}

/// Symbol index of layer `j` (0 = innermost base) in ascending member `m`:
/// `min(m + j, k)`.
pub fn ascending_index(m: usize, j: usize, shape: ChainShape) -> Result<usize, ChainError> {
    check("member", m, 1, shape.ascending_members())?;
    check("layer", j, 0, shape.layers())?;
    Ok((m + j).min(shape.k))
}

/// Symbol index of layer `j` in descending member `q`: `max(n+1+q - j, 1)`.
pub fn descending_index(q: usize, j: usize, shape: ChainShape) -> Result<usize, ChainError> {
    check("member", q, 1, shape.descending_members())?;
    check("layer", j, 0, shape.layers())?;
    Ok((shape.n + 1 + q).saturating_sub(j).max(1))
}

/// Exponent of the sandwich at layer `j ≥ 1`: `-t_i/2` for `j = 2i-1`,
/// `+t_i/2` for `j = 2i`.
pub fn layer_exponent(j: usize, shape: ChainShape) -> Result<ScalarExpr, ChainError> {
    check("layer", j, 1, shape.layers())?;
    let i = j.div_ceil(2);
    Ok(if j % 2 == 1 {
        ScalarExpr::neg_half(Name::T(i))
    } else {
        ScalarExpr::half(Name::T(i))
    })
}
