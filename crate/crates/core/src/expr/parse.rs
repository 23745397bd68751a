use super::{SetExpr, ShiftBy, KEYWORDS};
use crate::error::{Error, Result};
use crate::free::{Letter, ReducedWord};

/// Parses one expression; trailing input is an error.
pub fn parse_set_expr(text: &str) -> Result<SetExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl Parser<'_> {
    fn error(&self, expected: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            expected: expected.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{want}`")))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('-' | '+')) {
            self.pos += 1;
        }
        self.take_while(|c| c.is_ascii_digit());
        self.src[start..self.pos].parse().map_err(|_| {
            self.pos = start;
            self.error("an integer")
        })
    }

    fn expr(&mut self) -> Result<SetExpr> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(is_ident_start) {
            return Err(self.error("a primitive, combinator or set name"));
        }
        let ident = self.take_while(is_ident_char).to_string();
        Ok(match ident.as_str() {
            "evens" => SetExpr::Evens,
            "triangular" => SetExpr::Triangular,
            "all" => SetExpr::All,
            "empty" => SetExpr::Empty,
            "ap" => {
                self.eat('(')?;
                let a = self.int()?;
                self.eat(',')?;
                let at = self.pos;
                let d = self.int()?;
                self.eat(')')?;
                if d == 0 {
                    self.pos = at;
                    return Err(self.error("a non-zero step"));
                }
                SetExpr::Ap { a, d }
            }
            "powers" => {
                self.eat('(')?;
                let at = self.pos;
                let k = self.int()?;
                self.eat(')')?;
                if k < 2 {
                    self.pos = at;
                    return Err(self.error("a base >= 2"));
                }
                SetExpr::Powers(k as u64)
            }
            "list" => {
                self.eat('{')?;
                let mut xs = vec![self.int()?];
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => {
                            self.pos += 1;
                            xs.push(self.int()?);
                        }
                        Some('}') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("`,` or `}`")),
                    }
                }
                SetExpr::List(xs)
            }
            "interval" => {
                self.eat('(')?;
                let a = self.int()?;
                self.eat(',')?;
                let b = self.int()?;
                self.eat(')')?;
                SetExpr::Interval(a, b)
            }
            "f2start" => {
                self.eat('(')?;
                self.skip_ws();
                let l = self
                    .peek()
                    .and_then(Letter::from_char)
                    .ok_or_else(|| self.error("one of a, A, b, B"))?;
                self.pos += 1;
                self.eat(')')?;
                SetExpr::F2Start(l)
            }
            "union" | "inter" | "diff" => {
                self.eat('(')?;
                let a = self.expr()?;
                self.eat(',')?;
                let b = self.expr()?;
                self.eat(')')?;
                match ident.as_str() {
                    "union" => SetExpr::union(a, b),
                    "inter" => SetExpr::inter(a, b),
                    _ => SetExpr::diff(a, b),
                }
            }
            "compl" => {
                self.eat('(')?;
                let a = self.expr()?;
                self.eat(')')?;
                SetExpr::compl(a)
            }
            "shift" => {
                self.eat('(')?;
                let a = self.expr()?;
                self.eat(',')?;
                self.skip_ws();
                let by = if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '-' || c == '+')
                {
                    ShiftBy::Int(self.int()?)
                } else {
                    let at = self.pos;
                    let text = self.take_while(|c| "aAbBe^-".contains(c) || c.is_ascii_digit());
                    if text.is_empty() {
                        return Err(self.error("an integer or a word"));
                    }
                    let w: ReducedWord = text.parse().map_err(|e| match e {
                        Error::Syntax { pos, expected } => Error::Syntax {
                            pos: at + pos,
                            expected,
                        },
                        other => other,
                    })?;
                    ShiftBy::Word(w)
                };
                self.eat(')')?;
                SetExpr::Shift(Box::new(a), by)
            }
            _ => {
                debug_assert!(!KEYWORDS.contains(&ident.as_str()));
                self.skip_ws();
                if matches!(self.peek(), Some('(' | '{')) {
                    self.pos = start;
                    return Err(Error::UnknownPrimitive(ident));
                }
                SetExpr::Name(ident)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let e = parse_set_expr("union(evens, shift(triangular, 5))").unwrap();
        assert_eq!(e.children().len(), 2);
        assert_eq!(
            parse_set_expr("ap(1, 3)").unwrap(),
            SetExpr::Ap { a: 1, d: 3 }
        );
        let err = parse_set_expr("inter(evens").unwrap_err();
        assert!(matches!(err, Error::Syntax { pos: 11, .. }), "{err}");
    }

    #[test]
    fn whitespace_and_words() {
        let e = parse_set_expr(" shift ( f2start( a ) , b^3 ) ").unwrap();
        assert_eq!(e.to_string(), "shift(f2start(a), bbb)");
        let e = parse_set_expr("list{ -1 ,2,3 }").unwrap();
        assert_eq!(e, SetExpr::List(vec![-1, 2, 3]));
        assert_eq!(
            parse_set_expr("shift(all, e)").unwrap().to_string(),
            "shift(all, e)"
        );
    }

    #[test]
    fn diagnostics() {
        assert!(
            matches!(parse_set_expr("primes(3)"), Err(Error::UnknownPrimitive(n)) if n == "primes")
        );
        assert!(matches!(parse_set_expr("odds"), Ok(SetExpr::Name(n)) if n == "odds"));
        assert!(matches!(parse_set_expr("Evens"), Ok(SetExpr::Name(_))));
        assert!(matches!(
            parse_set_expr("evens evens"),
            Err(Error::Syntax { pos: 6, .. })
        ));
        assert!(matches!(
            parse_set_expr("ap(1, 0)"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_set_expr("powers(1)"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_set_expr("list{}"),
            Err(Error::Syntax { pos: 5, .. })
        ));
        assert!(matches!(
            parse_set_expr(""),
            Err(Error::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse_set_expr("shift(all, ax)"),
            Err(Error::Syntax { .. })
        ));
    }
}
