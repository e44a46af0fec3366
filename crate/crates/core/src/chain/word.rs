use std::fmt;

/// Scalar names that may appear in exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Name {
    T(usize),
    P(usize),
    R,
    W(usize),
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::T(i) => write!(f, "t{i}"),
            Name::P(i) => write!(f, "p{i}"),
            Name::R => f.write_str("r"),
            Name::W(i) => write!(f, "w{i}"),
        }
    }
}

/// Non-negative numeric literal. Printed with the shortest round-trip
/// representation, so print/parse is lossless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Literal(pub f64);

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Name(Name),
    Number(Literal),
    NameOver(Name, Literal),
    Ratio(Literal, Literal),
}

impl Term {
    fn eval(&self, lookup: &impl Fn(Name) -> Option<f64>) -> Result<f64, Name> {
        let name = |n: Name| lookup(n).ok_or(n);
        Ok(match *self {
            Term::Name(n) => name(n)?,
            Term::Number(x) => x.0,
            Term::NameOver(n, d) => name(n)? / d.0,
            Term::Ratio(a, b) => a.0 / b.0,
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(n) => write!(f, "{n}"),
            Term::Number(x) => write!(f, "{x}"),
            Term::NameOver(n, d) => write!(f, "{n}/{d}"),
            Term::Ratio(a, b) => write!(f, "{a}/{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedTerm {
    pub negative: bool,
    pub term: Term,
}

/// Signed sum of terms: `-t1/2`, `r-t2`, `p3`, `1/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpr {
    pub terms: Vec<SignedTerm>,
}

impl ScalarExpr {
    pub fn from_terms(terms: Vec<SignedTerm>) -> Self {
        assert!(!terms.is_empty(), "scalar expression needs a term");
        Self { terms }
    }

    fn single(negative: bool, term: Term) -> Self {
        Self {
            terms: vec![SignedTerm { negative, term }],
        }
    }

    pub fn name(n: Name) -> Self {
        Self::single(false, Term::Name(n))
    }

    pub fn literal(x: f64) -> Self {
        assert!(x.is_finite(), "literal must be finite");
        Self::single(x < 0.0, Term::Number(Literal(x.abs())))
    }

    /// `n/2`
    pub fn half(n: Name) -> Self {
        Self::single(false, Term::NameOver(n, Literal(2.0)))
    }

    /// `-n/2`
    pub fn neg_half(n: Name) -> Self {
        Self::single(true, Term::NameOver(n, Literal(2.0)))
    }

    /// `a-b`
    pub fn difference(a: Name, b: Name) -> Self {
        Self {
            terms: vec![
                SignedTerm {
                    negative: false,
                    term: Term::Name(a),
                },
                SignedTerm {
                    negative: true,
                    term: Term::Name(b),
                },
            ],
        }
    }

    pub fn names(&self) -> impl Iterator<Item = Name> + '_ {
        self.terms.iter().filter_map(|t| match t.term {
            Term::Name(n) | Term::NameOver(n, _) => Some(n),
            _ => None,
        })
    }

    /// Numeric value; the error carries the first unbound name.
    pub fn eval(&self, lookup: impl Fn(Name) -> Option<f64>) -> Result<f64, Name> {
        self.terms.iter().try_fold(0.0, |acc, st| {
            let v = st.term.eval(&lookup)?;
            Ok(if st.negative { acc - v } else { acc + v })
        })
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, st) in self.terms.iter().enumerate() {
            match (i, st.negative) {
                (_, true) => f.write_str("-")?,
                (0, false) => {}
                (_, false) => f.write_str("+")?,
            }
            write!(f, "{}", st.term)?;
        }
        Ok(())
    }
}

/// Product/power word over the symbols `A_1..A_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorWord {
    /// `A_index^{exponent}`
    Symbol { index: usize, exponent: ScalarExpr },
    /// Ordered product; never fewer than two factors.
    Product(Vec<OperatorWord>),
    /// `(child)^{exponent}`
    Power(Box<OperatorWord>, ScalarExpr),
}

impl OperatorWord {
    pub fn symbol(index: usize, exponent: ScalarExpr) -> Self {
        OperatorWord::Symbol { index, exponent }
    }

    pub fn product(factors: Vec<OperatorWord>) -> Self {
        assert!(factors.len() >= 2, "a product needs at least two factors");
        OperatorWord::Product(factors)
    }

    pub fn power(child: OperatorWord, exponent: ScalarExpr) -> Self {
        OperatorWord::Power(Box::new(child), exponent)
    }

    /// `outer · core · outer`
    pub fn sandwich(outer: OperatorWord, core: OperatorWord) -> Self {
        OperatorWord::Product(vec![outer.clone(), core, outer])
    }

    /// Every symbol index, in reading order.
    pub fn symbol_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(&mut |w| {
            if let OperatorWord::Symbol { index, .. } = w {
                out.push(*index);
            }
        });
        out
    }

    /// Every scalar name used by an exponent.
    pub fn names(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit(&mut |w| match w {
            OperatorWord::Symbol { exponent, .. } | OperatorWord::Power(_, exponent) => {
                out.extend(exponent.names())
            }
            OperatorWord::Product(_) => {}
        });
        out.sort();
        out.dedup();
        out
    }

    /// True when every product reads the same forwards and backwards, the
    /// shape that guarantees a self-adjoint value.
    pub fn is_palindromic(&self) -> bool {
        match self {
            OperatorWord::Symbol { .. } => true,
            OperatorWord::Power(child, _) => child.is_palindromic(),
            OperatorWord::Product(fs) => {
                fs.iter().zip(fs.iter().rev()).all(|(a, b)| a == b)
                    && fs.iter().all(OperatorWord::is_palindromic)
            }
        }
    }

    fn visit(&self, f: &mut impl FnMut(&OperatorWord)) {
        f(self);
        match self {
            OperatorWord::Symbol { .. } => {}
            OperatorWord::Product(fs) => fs.iter().for_each(|c| c.visit(f)),
            OperatorWord::Power(c, _) => c.visit(f),
        }
    }
}
