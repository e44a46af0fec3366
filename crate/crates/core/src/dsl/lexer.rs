use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// `A<i>`
    Symbol(usize),
    Ident(String),
    Number(f64),
    Caret,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Plus,
    Minus,
    Slash,
    Ge,
    Le,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Symbol(i) => format!("symbol A{i}"),
            TokenKind::Ident(s) => format!("name `{s}`"),
            TokenKind::Number(x) => format!("number {x}"),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Ge => "`>=`".into(),
            TokenKind::Le => "`<=`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, column: col };
        let single = |kind| Token { kind, pos };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '^' => tokens.push(single(TokenKind::Caret)),
            '{' => tokens.push(single(TokenKind::LBrace)),
            '}' => tokens.push(single(TokenKind::RBrace)),
            '(' => tokens.push(single(TokenKind::LParen)),
            ')' => tokens.push(single(TokenKind::RParen)),
            '+' => tokens.push(single(TokenKind::Plus)),
            '-' => tokens.push(single(TokenKind::Minus)),
            '/' => tokens.push(single(TokenKind::Slash)),
            '>' | '<' => {
                if chars.get(i + 1) != Some(&'=') {
                    return Err(ParseError::new(pos, format!("expected `{c}=`")));
                }
                let kind = if c == '>' { TokenKind::Ge } else { TokenKind::Le };
                tokens.push(single(kind));
                i += 2;
                col += 2;
                continue;
            }
            'A' => {
                let start = i + 1;
                let mut end = start;
                while end < chars.len() && chars[end].is_ascii_digit() {
                    end += 1;
                }
                if end == start {
                    return Err(ParseError::new(pos, "expected an index after `A`"));
                }
                let digits: String = chars[start..end].iter().collect();
                let index: usize = digits
                    .parse()
                    .map_err(|_| ParseError::new(pos, format!("index `{digits}` is too large")))?;
                if index == 0 {
                    return Err(ParseError::new(pos, "symbol indices start at 1"));
                }
                tokens.push(single(TokenKind::Symbol(index)));
                col += end - i;
                i = end;
                continue;
            }
            c if c.is_ascii_lowercase() => {
                let mut end = i + 1;
                while end < chars.len() && chars[end].is_ascii_alphanumeric() {
                    end += 1;
                }
                let ident: String = chars[i..end].iter().collect();
                tokens.push(single(TokenKind::Ident(ident)));
                col += end - i;
                i = end;
                continue;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut end = i;
                while end < chars.len() && (chars[end].is_ascii_digit() || chars[end] == '.') {
                    end += 1;
                }
                let text: String = chars[i..end].iter().collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError::new(pos, format!("malformed number `{text}`")))?;
                tokens.push(single(TokenKind::Number(value)));
                col += end - i;
                i = end;
                continue;
            }
            other => {
                return Err(ParseError::new(pos, format!("unexpected character `{other}`")));
            }
        }
        i += 1;
        col += 1;
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        pos: Position { line, column: col },
    });
    Ok(tokens)
}
