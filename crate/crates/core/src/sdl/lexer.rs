use super::{DiagClass, Diagnostic};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    /// `d/dNAME`: coordinate vector field.
    Deriv(String),
    Semi,
    Colon,
    Comma,
    Eq,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(s) => format!("number `{s}`"),
            Tok::Deriv(s) => format!("`d/d{s}`"),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let single = |t: Tok| Token { tok: t, line: tl, col: tc };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(single(Tok::Int(s)));
                continue;
            }
            c if is_ident_start(c) => {
                // `d/dNAME`
                if c == 'd'
                    && chars.get(i + 1) == Some(&'/')
                    && chars.get(i + 2) == Some(&'d')
                    && chars.get(i + 3).is_some_and(|&c| is_ident_start(c))
                {
                    let start = i + 3;
                    let mut j = start;
                    while j < chars.len() && is_ident_char(chars[j]) {
                        j += 1;
                    }
                    let s: String = chars[start..j].iter().collect();
                    col += j - i;
                    i = j;
                    out.push(single(Tok::Deriv(s)));
                    continue;
                }
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(single(Tok::Ident(s)));
                continue;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 2;
                col += 2;
                out.push(single(Tok::Arrow));
                continue;
            }
            _ => {}
        }
        let t = match c {
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            other => {
                return Err(Diagnostic {
                    class: DiagClass::Lexical,
                    line,
                    col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        i += 1;
        col += 1;
        out.push(single(t));
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_derivations() {
        let toks = lex("anchor g:\n  e1 = x1*d/dx2; # c\n").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(kinds[5], Tok::Ident("x1".into()));
        assert_eq!(kinds[7], Tok::Deriv("x2".into()));
        assert_eq!((toks[3].line, toks[3].col), (2, 3));
        assert_eq!(kinds.last(), Some(&Tok::Eof));
    }

    #[test]
    fn lexical_error_has_position() {
        let d = lex("base x1;\nbundle g rank 2 @;").unwrap_err();
        assert_eq!(d.class, DiagClass::Lexical);
        assert_eq!((d.line, d.col), (2, 17));
    }
}
