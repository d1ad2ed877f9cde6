use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(String),
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Pipe,
    Amp,
    Bang,
    Comma,
    Slash,
    Dot,
    Question,
    Ge,
    Le,
    EqEq,
    Eq,
    Gt,
    Lt,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Question => "`?`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Lt => "`<`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut emit = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
            *i += width;
            *col += width;
        };
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '[' => emit(Tok::LBracket, 1, &mut i, &mut col),
            ']' => emit(Tok::RBracket, 1, &mut i, &mut col),
            '{' => emit(Tok::LBrace, 1, &mut i, &mut col),
            '}' => emit(Tok::RBrace, 1, &mut i, &mut col),
            '(' => emit(Tok::LParen, 1, &mut i, &mut col),
            ')' => emit(Tok::RParen, 1, &mut i, &mut col),
            '|' => emit(Tok::Pipe, 1, &mut i, &mut col),
            '&' => emit(Tok::Amp, 1, &mut i, &mut col),
            '!' => emit(Tok::Bang, 1, &mut i, &mut col),
            ',' => emit(Tok::Comma, 1, &mut i, &mut col),
            '/' => emit(Tok::Slash, 1, &mut i, &mut col),
            '?' => emit(Tok::Question, 1, &mut i, &mut col),
            '>' if next == Some('=') => emit(Tok::Ge, 2, &mut i, &mut col),
            '<' if next == Some('=') => emit(Tok::Le, 2, &mut i, &mut col),
            '=' if next == Some('=') => emit(Tok::EqEq, 2, &mut i, &mut col),
            '>' => emit(Tok::Gt, 1, &mut i, &mut col),
            '<' => emit(Tok::Lt, 1, &mut i, &mut col),
            '=' => emit(Tok::Eq, 1, &mut i, &mut col),
            '.' if !next.is_some_and(|d| d.is_ascii_digit()) => {
                emit(Tok::Dot, 1, &mut i, &mut col)
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                let mut seen_dot = false;
                while i < chars.len()
                    && (chars[i].is_ascii_digit() || (chars[i] == '.' && !seen_dot))
                {
                    if chars[i] == '.' {
                        // `1.` followed by a non-digit is a number and a dot
                        if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                            break;
                        }
                        seen_dot = true;
                    }
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Number(s),
                    line: l0,
                    col: c0,
                });
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Ident(s),
                    line: l0,
                    col: c0,
                });
            }
            other => {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("unexpected character {other:?}"),
                ))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_numbers() {
        assert_eq!(
            toks("[P(v)]{v} >= 0.25 # note"),
            vec![
                Tok::LBracket,
                Tok::Ident("P".into()),
                Tok::LParen,
                Tok::Ident("v".into()),
                Tok::RParen,
                Tok::RBracket,
                Tok::LBrace,
                Tok::Ident("v".into()),
                Tok::RBrace,
                Tok::Ge,
                Tok::Number("0.25".into()),
            ]
        );
        assert_eq!(
            toks("a == b = 1/3"),
            vec![
                Tok::Ident("a".into()),
                Tok::EqEq,
                Tok::Ident("b".into()),
                Tok::Eq,
                Tok::Number("1".into()),
                Tok::Slash,
                Tok::Number("3".into()),
            ]
        );
    }

    #[test]
    fn positions_track_lines() {
        let t = tokenize("pred P/1\n  const a").unwrap();
        let c = t.iter().find(|s| s.tok == Tok::Ident("const".into())).unwrap();
        assert_eq!((c.line, c.col), (2, 3));
    }

    #[test]
    fn rejects_stray_characters() {
        let e = tokenize("P(a) $").unwrap_err();
        assert_eq!((e.line, e.col), (1, 6));
    }
}
