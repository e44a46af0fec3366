use std::fmt;

use crate::chain::{ChainInequality, OperatorWord};

/// Canonical text of a word; `parse_word(&pretty_print(w)) == w`.
pub fn pretty_print(word: &OperatorWord) -> String {
    word.to_string()
}

fn write_factors(f: &mut fmt::Formatter<'_>, factors: &[OperatorWord]) -> fmt::Result {
    for (i, factor) in factors.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        match factor {
            OperatorWord::Product(_) => write!(f, "({factor})")?,
            _ => write!(f, "{factor}")?,
        }
    }
    Ok(())
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorWord::Symbol { index, exponent } => write!(f, "A{index}^{{{exponent}}}"),
            OperatorWord::Product(fs) => write_factors(f, fs),
            OperatorWord::Power(child, exponent) => write!(f, "({child})^{{{exponent}}}"),
        }
    }
}

impl fmt::Display for ChainInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.direction, self.rhs)
    }
}

/// Collapses whitespace runs to single spaces and trims the ends.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Non-empty lines of a golden file with `#` comments removed and whitespace
/// normalized.
pub fn golden_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| normalize_whitespace(l.split('#').next().unwrap_or("")))
        .filter(|l| !l.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_chain, ChainShape, Family};
    use crate::dsl::parse_word;

    #[test]
    fn canonical_forms() {
        for src in [
            "A1^{1}",
            "A1^{p1} A2^{-t1/2}",
            "(A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2}",
            "A1^{1} (A2^{1} A3^{1})",
            "(A1^{1} A2^{1})^{r-t2+0.5}",
            "A3^{1/3-w2}",
        ] {
            assert_eq!(pretty_print(&parse_word(src).unwrap()), src);
        }
    }

    #[test]
    fn normalizes_sloppy_input() {
        let w = parse_word("  ( A2^{ -t1 / 2 }A1^{p1}\n A2^{-t1/2} ) ^ {p2}").unwrap();
        assert_eq!(pretty_print(&w), "(A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2}");
    }

    #[test]
    fn chain_display() {
        let ineq = build_chain(Family::Ascending, 1, ChainShape::from_k(3).unwrap()).unwrap();
        assert_eq!(
            ineq.to_string(),
            "A3^{r-t1} >= (A3^{r/2} (A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2} A3^{r/2})^{w1}"
        );
    }

    #[test]
    fn golden_line_filter() {
        let text = "# header\n\nA1^{1}  >=   A2^{1} # trailing\n   # only comment\n";
        assert_eq!(golden_lines(text), vec!["A1^{1} >= A2^{1}".to_string()]);
    }
}
