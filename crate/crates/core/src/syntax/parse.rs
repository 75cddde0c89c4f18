//! Recursive-descent parser for formulas and rules.
//!
//! ```text
//! formula := cmp
//! cmp     := imp (("<=" | "=") imp)?      -- t <= s reads as t -> s,
//!                                         -- t = s as (t -> s) & (s -> t)
//! imp     := or ("->" imp)?               -- right-associative
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | atom ("/" atom)?
//! atom    := ident | "0" | "1" | "(" formula ")"
//! rule    := ("forall" ident+ ".")? (formula ("," formula)*)? "=>" formula
//! ```
//!
//! `forall` is reserved; identifiers match `[a-zA-Z][a-zA-Z0-9_]*`.

use std::fmt;

use super::{Formula, Pi2Rule, RuleShapeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    Rule(RuleShapeError),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax {
                line,
                col,
                expected,
                found,
            } => {
                write!(
                    f,
                    "syntax error at {line}:{col}: expected {}, found {found}",
                    expected.join(" or ")
                )
            }
            ParseError::Rule(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ParseError {}

impl From<RuleShapeError> for ParseError {
    fn from(e: RuleShapeError) -> Self {
        ParseError::Rule(e)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    s != "forall" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Amp,
    Pipe,
    Arrow,
    Tilde,
    Slash,
    LParen,
    RParen,
    Comma,
    Dot,
    FatArrow,
    Leq,
    Eq,
    Forall,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier '{name}'"),
            Tok::Zero => "'0'".into(),
            Tok::One => "'1'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Tilde => "'~'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::FatArrow => "'=>'".into(),
            Tok::Leq => "'<='".into(),
            Tok::Eq => "'='".into(),
            Tok::Forall => "'forall'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    loop {
        let (tline, tcol) = (line, col);
        let Some(&c) = chars.peek() else {
            out.push(Spanned {
                tok: Tok::Eof,
                line,
                col,
            });
            return Ok(out);
        };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '0' => {
                bump(&mut chars);
                Tok::Zero
            }
            '1' => {
                bump(&mut chars);
                Tok::One
            }
            '&' => {
                bump(&mut chars);
                Tok::Amp
            }
            '|' => {
                bump(&mut chars);
                Tok::Pipe
            }
            '~' => {
                bump(&mut chars);
                Tok::Tilde
            }
            '/' => {
                bump(&mut chars);
                Tok::Slash
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            '.' => {
                bump(&mut chars);
                Tok::Dot
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Arrow
                } else {
                    return Err(ParseError::Syntax {
                        line: tline,
                        col: tcol,
                        expected: vec!["'->'".into()],
                        found: "'-'".into(),
                    });
                }
            }
            '=' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::FatArrow
                } else {
                    Tok::Eq
                }
            }
            '<' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    Tok::Leq
                } else {
                    return Err(ParseError::Syntax {
                        line: tline,
                        col: tcol,
                        expected: vec!["'<='".into()],
                        found: "'<'".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                if name == "forall" {
                    Tok::Forall
                } else {
                    Tok::Ident(name)
                }
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    expected: vec!["a formula token".into()],
                    found: format!("{other:?}"),
                });
            }
        };
        out.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError::Syntax {
            line: here.line,
            col: here.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.describe(),
        }
    }

    fn expect(&mut self, want: Tok, expected: &[&str]) -> Result<(), ParseError> {
        if self.peek() == &want {
            self.next();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    // cmp := imp (("<=" | "=") imp)?
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.imp()?;
        match self.peek() {
            Tok::Leq => {
                self.next();
                let rhs = self.imp()?;
                Ok(Formula::imp(lhs, rhs))
            }
            Tok::Eq => {
                self.next();
                let rhs = self.imp()?;
                Ok(Formula::and(
                    Formula::imp(lhs.clone(), rhs.clone()),
                    Formula::imp(rhs, lhs),
                ))
            }
            _ => Ok(lhs),
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == &Tok::Arrow {
            self.next();
            let rhs = self.imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == &Tok::Pipe {
            self.next();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == &Tok::Amp {
            self.next();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.peek() == &Tok::Tilde {
            self.next();
            return Ok(Formula::neg(self.unary()?));
        }
        let lhs = self.atom()?;
        if self.peek() == &Tok::Slash {
            self.next();
            let rhs = self.atom()?;
            return Ok(Formula::slash(lhs, rhs));
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.next();
                Ok(Formula::Var(name))
            }
            Tok::Zero => {
                self.next();
                Ok(Formula::Bot)
            }
            Tok::One => {
                self.next();
                Ok(Formula::Top)
            }
            Tok::LParen => {
                self.next();
                let inner = self.formula()?;
                self.expect(Tok::RParen, &["')'"])?;
                Ok(inner)
            }
            _ => Err(self.error(&["identifier", "'0'", "'1'", "'('", "'~'"])),
        }
    }

    fn rule(&mut self) -> Result<Pi2Rule, ParseError> {
        let mut bound = Vec::new();
        if self.peek() == &Tok::Forall {
            self.next();
            loop {
                match self.peek().clone() {
                    Tok::Ident(name) => {
                        self.next();
                        bound.push(name);
                    }
                    Tok::Dot if !bound.is_empty() => break,
                    _ => {
                        let want: &[&str] = if bound.is_empty() {
                            &["identifier"]
                        } else {
                            &["identifier", "'.'"]
                        };
                        return Err(self.error(want));
                    }
                }
            }
            self.expect(Tok::Dot, &["'.'"])?;
        }
        let mut premises = Vec::new();
        if self.peek() != &Tok::FatArrow {
            premises.push(self.formula()?);
            while self.peek() == &Tok::Comma {
                self.next();
                premises.push(self.formula()?);
            }
        }
        self.expect(Tok::FatArrow, &["'=>'", "','"])?;
        let conclusion = self.formula()?;
        Ok(Pi2Rule::new(premises, conclusion, bound)?)
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

/// Parse a formula; the returned tree is fully desugared.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let formula = parser.formula()?;
    parser.end()?;
    Ok(formula)
}

/// Parse a rule of the form `forall vars . f1, ..., fk => g`.
///
/// Omitting the `forall` prefix leaves the bound set empty; omitting the
/// premises (`=> g`) yields an axiom.
pub fn parse_rule(text: &str) -> Result<Pi2Rule, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let rule = parser.rule()?;
    parser.end()?;
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Formula {
        Formula::var(name)
    }

    #[test]
    fn precedence_and_desugaring() {
        assert_eq!(
            parse_formula("p -> (q | 0)").unwrap(),
            Formula::imp(v("p"), Formula::or(v("q"), Formula::Bot))
        );
        assert_eq!(
            parse_formula("~~q").unwrap(),
            Formula::imp(Formula::imp(v("q"), Formula::Bot), Formula::Bot)
        );
        assert_eq!(
            parse_formula("a / b").unwrap(),
            Formula::imp(Formula::imp(v("b"), v("a")), v("b"))
        );
    }

    #[test]
    fn imp_right_associative_and_or_binds_tighter_than_imp() {
        assert_eq!(
            parse_formula("a -> b -> c").unwrap(),
            Formula::imp(v("a"), Formula::imp(v("b"), v("c")))
        );
        assert_eq!(
            parse_formula("a & b | c").unwrap(),
            Formula::or(Formula::and(v("a"), v("b")), v("c"))
        );
    }

    #[test]
    fn leq_and_eq_sugar() {
        assert_eq!(
            parse_formula("a <= b").unwrap(),
            Formula::imp(v("a"), v("b"))
        );
        assert_eq!(
            parse_formula("p = 1").unwrap(),
            Formula::and(
                Formula::imp(v("p"), Formula::Top),
                Formula::imp(Formula::Top, v("p"))
            )
        );
    }

    #[test]
    fn rule_forms() {
        let density = parse_rule("forall r . g -> ((p->r)|(r->q)|c) => g -> ((p->q)|c)").unwrap();
        assert_eq!(density.bound(), ["r".to_string()]);
        assert_eq!(density.premises().len(), 1);

        let mp = parse_rule("p, p->q => q").unwrap();
        assert!(mp.bound().is_empty());
        assert_eq!(mp.premises().len(), 2);

        let axiom = parse_rule("=> (p->q)|(q->p)").unwrap();
        assert!(axiom.is_axiom());
    }

    #[test]
    fn rule_rejects_bound_in_conclusion() {
        let err = parse_rule("forall p . x => p").unwrap_err();
        assert!(
            matches!(err, ParseError::Rule(RuleShapeError::BoundInConclusion(ref n)) if n == "p")
        );
    }

    #[test]
    fn syntax_error_carries_position_and_expectations() {
        let err = parse_formula("p ->").unwrap_err();
        match err {
            ParseError::Syntax {
                line,
                col,
                expected,
                ..
            } => {
                assert_eq!(line, 1);
                assert_eq!(col, 5);
                assert!(!expected.is_empty());
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn roundtrip_spot_checks() {
        for text in [
            "p -> q -> p",
            "(p -> q) -> p",
            "a & (b | c) -> 0",
            "a | b | c",
            "a | (b | c)",
            "~(a / b)",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "text: {text}");
        }
    }
}
