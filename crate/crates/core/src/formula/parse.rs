use thiserror::Error;

use super::{Formula, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Exists,
    Forall,
    In,
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Dot,
    Comma,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Exists => "`exists`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::In => "`in`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let starts = |s: &str| chars[i..].iter().take(s.len()).copied().eq(s.chars());
        let (tok, len) = if starts("<->") {
            (Tok::Iff, 3)
        } else if starts("->") {
            (Tok::Implies, 2)
        } else {
            match c {
                '!' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '=' => (Tok::Eq, 1),
                '.' => (Tok::Dot, 1),
                ',' => (Tok::Comma, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let word: String = chars[i..]
                        .iter()
                        .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                        .collect();
                    let n = word.chars().count();
                    let tok = match word.as_str() {
                        "exists" => Tok::Exists,
                        "forall" => Tok::Forall,
                        "in" => Tok::In,
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word),
                    };
                    (tok, n)
                }
                other => return Err(err(line, col, format!("unexpected character `{other}`"))),
            }
        };
        out.push((tok, pos));
        i += len;
        col += len;
    }
    out.push((Tok::End, Pos { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let pos = self.toks[self.at].1;
        ParseError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Var::new(&name))
            }
            other => Err(self.error_here(format!("expected variable, found {}", other.describe()))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Exists | Tok::Forall => self.quant(),
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Const(true))
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Const(false))
            }
            Tok::Ident(_) => {
                let x = self.var()?;
                match self.peek() {
                    Tok::In => {
                        self.bump();
                        Ok(Formula::mem(x, self.var()?))
                    }
                    Tok::Eq => {
                        self.bump();
                        Ok(Formula::eq(x, self.var()?))
                    }
                    other => Err(self
                        .error_here(format!("expected `in` or `=`, found {}", other.describe()))),
                }
            }
            other => Err(self.error_here(format!("expected formula, found {}", other.describe()))),
        }
    }

    fn quant(&mut self) -> Result<Formula, ParseError> {
        let existential = self.bump() == Tok::Exists;
        let mut vars = vec![self.var()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push(self.var()?);
        }
        let bound = if *self.peek() == Tok::In {
            if vars.len() > 1 {
                return Err(self.error_here("bounded quantifier takes a single variable"));
            }
            self.bump();
            let b = self.var()?;
            if b == vars[0] {
                return Err(self.error_here(format!(
                    "bounded quantifier variable `{b}` must differ from its bound"
                )));
            }
            Some(b)
        } else {
            None
        };
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(match bound {
            Some(b) if existential => Formula::bounded_exists(vars.pop().unwrap(), b, body),
            Some(b) => Formula::bounded_forall(vars.pop().unwrap(), b, body),
            None => vars.into_iter().rev().fold(body, |acc, v| {
                if existential {
                    Formula::exists(v, acc)
                } else {
                    Formula::forall(v, acc)
                }
            }),
        })
    }
}

/// Parses formula source text.
///
/// Unbound variables are allowed and become free variables.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error_here(format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_quantifiers() {
        let f = parse("exists x. forall t. !(t in x)").unwrap();
        assert_eq!(
            f,
            Formula::exists(
                "x",
                Formula::forall("t", Formula::not(Formula::mem("t", "x")))
            )
        );
    }

    #[test]
    fn parses_bounded_sugar() {
        let f = parse("exists y in x. y = y").unwrap();
        assert_eq!(f, Formula::bounded_exists("y", "x", Formula::eq("y", "y")));
    }

    #[test]
    fn multi_var_quantifier_nests() {
        let f = parse("forall x, y . x = y").unwrap();
        assert_eq!(
            f,
            Formula::forall("x", Formula::forall("y", Formula::eq("x", "y")))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("a in b & b in c | c = a -> a = a -> b = b <-> true").unwrap();
        let expected = Formula::iff(
            Formula::implies(
                Formula::or(
                    Formula::and(Formula::mem("a", "b"), Formula::mem("b", "c")),
                    Formula::eq("c", "a"),
                ),
                Formula::implies(Formula::eq("a", "a"), Formula::eq("b", "b")),
            ),
            Formula::Const(true),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn malformed_atom_reports_position() {
        let e = parse("x in").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        let e = parse("forall x.\n  (x in y").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse("exists x, y in z. x = y").is_err());
        assert!(parse("exists x in x. true").is_err());
        assert!(parse("x = y )").is_err());
        assert!(parse("x # y").is_err());
        assert!(parse("exists in. true").is_err());
    }
}
