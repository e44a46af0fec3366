use std::fmt;

use super::lexer::{tokenize, Position, Token, TokenKind};
use crate::chain::{Direction, Literal, Name, OperatorWord, ScalarExpr, SignedTerm, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(pos: Position, message: impl Into<String>) -> Self {
        Self {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// `lhs rel rhs`
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub lhs: OperatorWord,
    pub direction: Direction,
    pub rhs: OperatorWord,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.direction, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Word(OperatorWord),
    Inequality(Inequality),
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Word(w) => write!(f, "{w}"),
            Statement::Inequality(i) => write!(f, "{i}"),
        }
    }
}

/// Parses either a bare word or a chain inequality.
pub fn parse(src: &str) -> Result<Statement, ParseError> {
    let mut p = Parser::new(src)?;
    let lhs = p.word()?;
    let stmt = match p.peek().kind {
        TokenKind::Ge | TokenKind::Le => {
            let direction = p.relation()?;
            let rhs = p.word()?;
            Statement::Inequality(Inequality { lhs, direction, rhs })
        }
        _ => Statement::Word(lhs),
    };
    p.expect_eof()?;
    Ok(stmt)
}

pub fn parse_word(src: &str) -> Result<OperatorWord, ParseError> {
    let mut p = Parser::new(src)?;
    let w = p.word()?;
    p.expect_eof()?;
    Ok(w)
}

pub fn parse_inequality(src: &str) -> Result<Inequality, ParseError> {
    match parse(src)? {
        Statement::Inequality(i) => Ok(i),
        Statement::Word(_) => {
            let end = Parser::new(src)?.tokens.last().map(|t| t.pos).unwrap();
            Err(ParseError::new(end, "expected `>=` or `<=`"))
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Self {
            tokens: tokenize(src)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.pos, format!("expected {wanted}, found {}", t.kind.describe()))
    }

    fn expect(&mut self, kind: TokenKind, wanted: &str) -> Result<(), ParseError> {
        if self.peek().kind == kind {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn relation(&mut self) -> Result<Direction, ParseError> {
        match self.peek().kind {
            TokenKind::Ge => {
                self.bump();
                Ok(Direction::Ge)
            }
            TokenKind::Le => {
                self.bump();
                Ok(Direction::Le)
            }
            _ => Err(self.unexpected("`>=` or `<=`")),
        }
    }

    fn word(&mut self) -> Result<OperatorWord, ParseError> {
        let mut factors = vec![self.factor()?];
        while matches!(self.peek().kind, TokenKind::Symbol(_) | TokenKind::LParen) {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            OperatorWord::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<OperatorWord, ParseError> {
        match self.peek().kind {
            TokenKind::Symbol(index) => {
                self.bump();
                let exponent = match self.exponent()? {
                    Some(e) => e,
                    None => ScalarExpr::literal(1.0),
                };
                Ok(OperatorWord::Symbol { index, exponent })
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.word()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(match self.exponent()? {
                    Some(e) => OperatorWord::power(inner, e),
                    None => inner,
                })
            }
            _ => Err(self.unexpected("`A<i>` or `(`")),
        }
    }

    fn exponent(&mut self) -> Result<Option<ScalarExpr>, ParseError> {
        if self.peek().kind != TokenKind::Caret {
            return Ok(None);
        }
        self.bump();
        self.expect(TokenKind::LBrace, "`{` after `^`")?;
        let e = self.sexpr()?;
        self.expect(TokenKind::RBrace, "`}`")?;
        Ok(Some(e))
    }

    fn sexpr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.peek().kind == TokenKind::Minus {
            self.bump();
            negative = true;
        }
        terms.push(SignedTerm {
            negative,
            term: self.sterm()?,
        });
        loop {
            negative = match self.peek().kind {
                TokenKind::Plus => false,
                TokenKind::Minus => true,
                _ => break,
            };
            self.bump();
            terms.push(SignedTerm {
                negative,
                term: self.sterm()?,
            });
        }
        Ok(ScalarExpr::from_terms(terms))
    }

    fn sterm(&mut self) -> Result<Term, ParseError> {
        let tok = self.bump();
        let head = match tok.kind {
            TokenKind::Ident(ref s) => Head::Name(name_of(s, tok.pos)?),
            TokenKind::Number(x) => Head::Number(Literal(x)),
            ref other => {
                return Err(ParseError::new(
                    tok.pos,
                    format!("expected a name or number, found {}", other.describe()),
                ))
            }
        };
        if self.peek().kind != TokenKind::Slash {
            return Ok(match head {
                Head::Name(n) => Term::Name(n),
                Head::Number(x) => Term::Number(x),
            });
        }
        self.bump();
        let den = self.bump();
        let d = match den.kind {
            TokenKind::Number(x) if x != 0.0 => Literal(x),
            TokenKind::Number(_) => return Err(ParseError::new(den.pos, "division by zero")),
            ref other => {
                return Err(ParseError::new(
                    den.pos,
                    format!("expected a numeric denominator, found {}", other.describe()),
                ))
            }
        };
        Ok(match head {
            Head::Name(n) => Term::NameOver(n, d),
            Head::Number(x) => Term::Ratio(x, d),
        })
    }
}

enum Head {
    Name(Name),
    Number(Literal),
}

fn name_of(s: &str, pos: Position) -> Result<Name, ParseError> {
    if s == "r" {
        return Ok(Name::R);
    }
    let unknown = || ParseError::new(pos, format!("unknown name `{s}`"));
    let (head, digits) = s.split_at(1);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(unknown());
    }
    let i: usize = digits.parse().map_err(|_| unknown())?;
    if i == 0 {
        return Err(ParseError::new(pos, format!("name `{s}` must have index ≥ 1")));
    }
    match head {
        "t" => Ok(Name::T(i)),
        "p" => Ok(Name::P(i)),
        "w" => Ok(Name::W(i)),
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(i: usize, e: ScalarExpr) -> OperatorWord {
        OperatorWord::symbol(i, e)
    }

    #[test]
    fn bare_symbol_has_unit_exponent() {
        assert_eq!(parse_word("A1").unwrap(), sym(1, ScalarExpr::literal(1.0)));
    }

    #[test]
    fn sandwich_structure() {
        let w = parse_word("(A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2}").unwrap();
        let side = sym(2, ScalarExpr::neg_half(Name::T(1)));
        let expected = OperatorWord::power(
            OperatorWord::sandwich(side, sym(1, ScalarExpr::name(Name::P(1)))),
            ScalarExpr::name(Name::P(2)),
        );
        assert_eq!(w, expected);
    }

    #[test]
    fn parenthesized_word_without_exponent() {
        let w = parse_word("A1 (A2 A3)").unwrap();
        match w {
            OperatorWord::Product(fs) => {
                assert_eq!(fs.len(), 2);
                assert!(matches!(&fs[1], OperatorWord::Product(inner) if inner.len() == 2));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse_word("(A1)").unwrap(), parse_word("A1").unwrap());
    }

    #[test]
    fn inequality() {
        let i = parse_inequality("A3^{r-t1} >= (A3^{r/2} A1 A3^{r/2})^{w1}").unwrap();
        assert_eq!(i.direction, Direction::Ge);
        assert_eq!(i.lhs, sym(3, ScalarExpr::difference(Name::R, Name::T(1))));
        assert!(parse_inequality("A1").is_err());
        assert!(matches!(parse("A1 <= A2").unwrap(), Statement::Inequality(_)));
    }

    #[test]
    fn scalar_forms() {
        for src in ["A1^{1/3}", "A1^{-p2+t1/2-0.5}", "A1^{r}", "A1^{w12}"] {
            parse_word(src).unwrap();
        }
    }

    #[test]
    fn errors_carry_positions() {
        let cases = [
            ("A1^{q1}", 1, 5),
            ("A1^{t0}", 1, 5),
            ("A1 A2)", 1, 6),
            ("(A1 A2", 1, 7),
            ("A1^{t1/x}", 1, 8),
            ("A1^{1/0}", 1, 7),
            ("A1^p1", 1, 4),
            ("A1 >=\n  ", 2, 3),
            ("A1 >= A2 <= A3", 1, 10),
            ("", 1, 1),
        ];
        for (src, line, column) in cases {
            let err = parse(src).unwrap_err();
            assert_eq!((err.line, err.column), (line, column), "{src}: {err}");
        }
    }
}
