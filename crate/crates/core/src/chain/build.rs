use serde::{Deserialize, Serialize};
use std::fmt;

use super::{
    ascending_index, descending_index, layer_exponent, ChainError, ChainShape, Name, OperatorWord,
    ScalarExpr,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Outer symbol `A_k`, layer indices saturating upward at `k`.
    Ascending,
    /// Outer symbol `A_1`, layer indices saturating downward at 1.
    Descending,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ascending => "asc",
            Family::Descending => "desc",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Claimed order between the two sides of an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// `lhs ⪰ rhs`
    Ge,
    /// `lhs ⪯ rhs`
    Le,
}

impl Direction {
    pub fn token(self) -> &'static str {
        match self {
            Direction::Ge => ">=",
            Direction::Le => "<=",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainInequality {
    pub shape: ChainShape,
    pub family: Family,
    pub member: usize,
    /// `A_outer^{r - t_n}`
    pub lhs: OperatorWord,
    /// `(A_outer^{r/2} core A_outer^{r/2})^{w_m}`
    pub rhs: OperatorWord,
    pub direction: Direction,
}

impl ChainInequality {
    /// Position of this member in the hypothesis list, 1-based; also the
    /// index of its weight `w_m`.
    pub fn weight_index(&self) -> usize {
        match self.family {
            Family::Ascending => self.member,
            Family::Descending => self.shape.n + self.member,
        }
    }

    pub fn outer_index(&self) -> usize {
        outer_index(self.family, self.shape)
    }

    /// The word between the two outer `A^{r/2}` factors of the right side.
    pub fn core(&self) -> &OperatorWord {
        match &self.rhs {
            OperatorWord::Power(inner, _) => match inner.as_ref() {
                OperatorWord::Product(fs) if fs.len() == 3 => &fs[1],
                _ => unreachable!("built chains wrap a three-factor sandwich"),
            },
            _ => unreachable!("built chains end with an outer weight"),
        }
    }
}

fn outer_index(family: Family, shape: ChainShape) -> usize {
    match family {
        Family::Ascending => shape.k,
        Family::Descending => 1,
    }
}

/// Builds member `member` of `family` for the shape `(n, k)`.
///
/// The base is `A_idx(0)^{p1}`; layer `j = 1..2n-1` wraps the core as
/// `(A_idx(j)^{e_j} core A_idx(j)^{e_j})^{p_{j+1}}`, and the right side closes
/// with `(A_c^{r/2} core A_c^{r/2})^{w_m}` for the outer index `c`.
pub fn build_chain(
    family: Family,
    member: usize,
    shape: ChainShape,
) -> Result<ChainInequality, ChainError> {
    let index = |j: usize| match family {
        Family::Ascending => ascending_index(member, j, shape),
        Family::Descending => descending_index(member, j, shape),
    };
    let mut core = OperatorWord::symbol(index(0)?, ScalarExpr::name(Name::P(1)));
    for j in 1..=shape.layers() {
        let layer = OperatorWord::symbol(index(j)?, layer_exponent(j, shape)?);
        core = OperatorWord::power(
            OperatorWord::sandwich(layer, core),
            ScalarExpr::name(Name::P(j + 1)),
        );
    }
    let outer = outer_index(family, shape);
    let mut ineq = ChainInequality {
        shape,
        family,
        member,
        lhs: OperatorWord::symbol(outer, ScalarExpr::difference(Name::R, Name::T(shape.n))),
        rhs: OperatorWord::Product(vec![]),
        direction: match family {
            Family::Ascending => Direction::Ge,
            Family::Descending => Direction::Le,
        },
    };
    let weight = Name::W(ineq.weight_index());
    ineq.rhs = OperatorWord::power(
        OperatorWord::sandwich(
            OperatorWord::symbol(outer, ScalarExpr::half(Name::R)),
            core,
        ),
        ScalarExpr::name(weight),
    );
    Ok(ineq)
}

/// All `k - 1` hypotheses: the ascending members followed by the descending
/// ones.
pub fn hypothesis_set(shape: ChainShape) -> Vec<ChainInequality> {
    let asc = (1..=shape.ascending_members()).map(|m| (Family::Ascending, m));
    let desc = (1..=shape.descending_members()).map(|q| (Family::Descending, q));
    asc.chain(desc)
        .map(|(f, m)| build_chain(f, m, shape).expect("members in range"))
        .collect()
}
