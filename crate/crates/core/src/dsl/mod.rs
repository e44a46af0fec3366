//! Textual syntax for operator words and chain inequalities.
//!
//! ```text
//! chain  := word rel word            rel := '>=' | '<='
//! word   := factor+                  (juxtaposition is the product)
//! factor := atom ['^' '{' sexpr '}']
//! atom   := 'A' int | '(' word ')'
//! sexpr  := ['-'] sterm (('+' | '-') sterm)*
//! sterm  := name | number | name '/' number | number '/' number
//! ```
//!
//! Names are `t<i>`, `p<i>`, `w<i>` (`i ≥ 1`) and `r`. The canonical printer
//! puts single spaces between product factors and braces around every
//! exponent, e.g. `(A3^{r/2} (A2^{-t1/2} A1^{p1} A2^{-t1/2})^{p2} A3^{r/2})^{w1}`.

mod env;
mod eval;
mod generate;
mod lexer;
mod parser;
mod printer;

pub use env::Environment;
pub use eval::{evaluate, evaluate_general, EvalError};
pub use generate::{random_scalar_expr, random_word, WordShape};
pub use lexer::{Position, Token, TokenKind};
pub use parser::{parse, parse_inequality, parse_word, Inequality, ParseError, Statement};
pub use printer::{golden_lines, normalize_whitespace, pretty_print};
