//! ASCII concrete syntax for formulae and bunched sequents.
//!
//! ```text
//! formula  := impterm
//! impterm  := orterm (("->" | "-*") impterm)?
//! orterm   := andterm ("|" andterm)*
//! andterm  := starterm ("&" starterm)*
//! starterm := atom ("*" atom)*
//! atom     := ident | "top" | "bot" | "1" | "(" formula ")"
//! bunch    := comma (";" comma)*
//! comma    := bitem ("," bitem)*
//! bitem    := "Em" | "Ea" | formula | "(" bunch ")"
//! sequent  := bunch "|-" formula
//! ```
//!
//! Implications are right-associative; an unparenthesized chain may not mix
//! `->` and `-*`.

use thiserror::Error;

use crate::bunch::{Bunch, RawSequent};
use crate::formula::{Connective, Formula};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
}

impl ParseError {
    fn new(message: impl Into<String>, offset: usize) -> ParseError {
        ParseError { message: message.into(), offset }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Top,
    Bot,
    One,
    EmptyM,
    EmptyA,
    LParen,
    RParen,
    Amp,
    Bar,
    Arrow,
    Star,
    Wand,
    Comma,
    Semi,
    Turnstile,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Top => "'top'".into(),
            Tok::Bot => "'bot'".into(),
            Tok::One => "'1'".into(),
            Tok::EmptyM => "'Em'".into(),
            Tok::EmptyA => "'Ea'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Star => "'*'".into(),
            Tok::Wand => "'-*'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Turnstile => "'|-'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |s: &str| text[i..].starts_with(s);
        let tok = if two("|-") {
            i += 2;
            Tok::Turnstile
        } else if two("->") {
            i += 2;
            Tok::Arrow
        } else if two("-*") {
            i += 2;
            Tok::Wand
        } else {
            match c {
                b'(' => {
                    i += 1;
                    Tok::LParen
                }
                b')' => {
                    i += 1;
                    Tok::RParen
                }
                b'&' => {
                    i += 1;
                    Tok::Amp
                }
                b'|' => {
                    i += 1;
                    Tok::Bar
                }
                b'*' => {
                    i += 1;
                    Tok::Star
                }
                b',' => {
                    i += 1;
                    Tok::Comma
                }
                b';' => {
                    i += 1;
                    Tok::Semi
                }
                b'1' if !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric()) => {
                    i += 1;
                    Tok::One
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                    {
                        i += 1;
                    }
                    match &text[start..i] {
                        "top" => Tok::Top,
                        "bot" => Tok::Bot,
                        "Em" => Tok::EmptyM,
                        "Ea" => Tok::EmptyA,
                        name => Tok::Ident(name.to_string()),
                    }
                }
                _ => {
                    let ch = text[i..].chars().next().unwrap();
                    return Err(ParseError::new(format!("unknown token '{ch}'"), start));
                }
            }
        };
        toks.push((tok, start));
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Tok::Eof => ParseError::new("unexpected end of input", self.offset()),
            Tok::RParen => ParseError::new("unbalanced parenthesis", self.offset()),
            t => ParseError::new(format!("unexpected token {}", t.describe()), self.offset()),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else if *self.peek() == Tok::Eof {
            Err(ParseError::new("unbalanced parenthesis", self.offset()))
        } else {
            Err(self.unexpected())
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.imp().map(|(f, _)| f)
    }

    /// Returns the formula and, when its top level is an unparenthesized
    /// implication, which one.
    fn imp(&mut self) -> Result<(Formula, Option<Connective>), ParseError> {
        let lhs = self.or()?;
        let conn = match self.peek() {
            Tok::Arrow => Connective::Imp,
            Tok::Wand => Connective::Wand,
            _ => return Ok((lhs, None)),
        };
        self.bump();
        let at = self.offset();
        let (rhs, rhs_conn) = self.imp()?;
        if rhs_conn.is_some_and(|c| c != conn) {
            return Err(ParseError::new("mixed '->' and '-*' chain needs parentheses", at));
        }
        Ok((Formula::binary(conn, lhs, rhs), Some(conn)))
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.star()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.star()?);
        }
        Ok(f)
    }

    fn star(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.atom()?;
        while *self.peek() == Tok::Star {
            self.bump();
            f = Formula::tensor(f, self.atom()?);
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::var(&name))
            }
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::One => {
                self.bump();
                Ok(Formula::One)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect_close()?;
                Ok(f)
            }
            Tok::EmptyM | Tok::EmptyA => Err(ParseError::new(
                format!("structural unit {} is not a formula", self.peek().describe()),
                at,
            )),
            _ => Err(self.unexpected()),
        }
    }

    fn bunch(&mut self) -> Result<Bunch, ParseError> {
        let mut b = self.comma()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            b = Bunch::semi(b, self.comma()?);
        }
        Ok(b)
    }

    fn comma(&mut self) -> Result<Bunch, ParseError> {
        let mut b = self.bitem()?;
        while *self.peek() == Tok::Comma {
            self.bump();
            b = Bunch::comma(b, self.bitem()?);
        }
        Ok(b)
    }

    fn bitem(&mut self) -> Result<Bunch, ParseError> {
        match self.peek() {
            Tok::EmptyM => {
                self.bump();
                return Ok(Bunch::EmptyM);
            }
            Tok::EmptyA => {
                self.bump();
                return Ok(Bunch::EmptyA);
            }
            _ => {}
        }
        let start = self.pos;
        let attempt = self.formula();
        let ends_item = matches!(self.peek(), Tok::Comma | Tok::Semi | Tok::RParen | Tok::Eof);
        match attempt {
            Ok(f) if ends_item => Ok(Bunch::Leaf(f)),
            _ if self.toks[start].0 == Tok::LParen => {
                // not a formula: a parenthesized sub-bunch
                self.pos = start + 1;
                let b = self.bunch()?;
                self.expect_close()?;
                Ok(b)
            }
            Ok(_) => Err(self.unexpected()),
            Err(e) => Err(e),
        }
    }
}

/// Parses a formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses a bunch on its own (no turnstile).
pub fn parse_bunch(text: &str) -> Result<Bunch, ParseError> {
    let toks = tokenize(text)?;
    if toks.len() == 1 {
        return Err(ParseError::new("empty bunch (write Em or Ea explicitly)", 0));
    }
    let mut p = Parser { toks, pos: 0 };
    let b = p.bunch()?;
    p.expect_eof()?;
    Ok(b)
}

/// Parses `bunch |- formula`.
pub fn parse_sequent(text: &str) -> Result<RawSequent, ParseError> {
    let toks = tokenize(text)?;
    let turnstiles: Vec<usize> = toks
        .iter()
        .enumerate()
        .filter(|(_, (t, _))| *t == Tok::Turnstile)
        .map(|(i, _)| i)
        .collect();
    let split = match turnstiles.as_slice() {
        [] => return Err(ParseError::new("missing turnstile '|-'", text.len())),
        [one] => *one,
        [_, second, ..] => {
            return Err(ParseError::new("duplicate turnstile '|-'", toks[*second].1));
        }
    };
    let turnstile_at = toks[split].1;
    if split == 0 {
        return Err(ParseError::new(
            "empty antecedent (write Em or Ea explicitly)",
            turnstile_at,
        ));
    }
    let mut left: Vec<(Tok, usize)> = toks[..split].to_vec();
    left.push((Tok::Eof, turnstile_at));
    let right: Vec<(Tok, usize)> = toks[split + 1..].to_vec();
    if right.len() == 1 {
        return Err(ParseError::new("missing succedent formula", right[0].1));
    }

    let mut lp = Parser { toks: left, pos: 0 };
    let antecedent = lp.bunch()?;
    lp.expect_eof()?;
    let mut rp = Parser { toks: right, pos: 0 };
    let succedent = rp.formula()?;
    rp.expect_eof()?;
    Ok(RawSequent { antecedent, succedent })
}
