use rand::Rng;

use crate::chain::{Literal, Name, OperatorWord, ScalarExpr, SignedTerm, Term};

/// Shape limits for [`random_word`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordShape {
    pub max_depth: usize,
    pub max_index: usize,
    pub max_factors: usize,
    /// Largest index of `t_i`, `p_i` and `w_i` names.
    pub max_name_index: usize,
}

impl Default for WordShape {
    fn default() -> Self {
        Self {
            max_depth: 3,
            max_index: 4,
            max_factors: 3,
            max_name_index: 3,
        }
    }
}

const LITERALS: [f64; 7] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 0.125];
const DENOMINATORS: [f64; 3] = [2.0, 3.0, 4.0];

fn random_name(rng: &mut impl Rng, shape: &WordShape) -> Name {
    let i = rng.random_range(1..=shape.max_name_index);
    match rng.random_range(0..4) {
        0 => Name::T(i),
        1 => Name::P(i),
        2 => Name::W(i),
        _ => Name::R,
    }
}

fn pick(rng: &mut impl Rng, values: &[f64]) -> Literal {
    Literal(values[rng.random_range(0..values.len())])
}

/// Random exponent with one to three signed terms.
pub fn random_scalar_expr(rng: &mut impl Rng, shape: &WordShape) -> ScalarExpr {
    let count = rng.random_range(1..=3);
    let terms = (0..count)
        .map(|_| SignedTerm {
            negative: rng.random_bool(0.3),
            term: match rng.random_range(0..4) {
                0 => Term::Name(random_name(rng, shape)),
                1 => Term::Number(pick(rng, &LITERALS)),
                2 => Term::NameOver(random_name(rng, shape), pick(rng, &DENOMINATORS)),
                _ => Term::Ratio(pick(rng, &LITERALS), pick(rng, &DENOMINATORS)),
            },
        })
        .collect();
    ScalarExpr::from_terms(terms)
}

/// Random word over `A_1..A_{max_index}`, used for round-trip and
/// evaluation fuzzing.
pub fn random_word(rng: &mut impl Rng, shape: &WordShape) -> OperatorWord {
    word_at(rng, shape, shape.max_depth)
}

fn word_at(rng: &mut impl Rng, shape: &WordShape, depth: usize) -> OperatorWord {
    if depth == 0 || rng.random_bool(0.35) {
        return OperatorWord::symbol(
            rng.random_range(1..=shape.max_index),
            random_scalar_expr(rng, shape),
        );
    }
    if rng.random_bool(0.5) {
        let n = rng.random_range(2..=shape.max_factors.max(2));
        OperatorWord::product((0..n).map(|_| word_at(rng, shape, depth - 1)).collect())
    } else {
        OperatorWord::power(word_at(rng, shape, depth - 1), random_scalar_expr(rng, shape))
    }
}
