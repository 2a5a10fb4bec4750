//! Text format for identities.
//!
//! ```text
//! file       := header? expr ("=" "0")?
//! header     := "n" "=" integer ";"
//! expr       := term (("+" | "-") term)*
//! term       := "-"? (rational "*")? atom
//! atom       := "N" "{" signed_idx ("," signed_idx)* "}"
//! signed_idx := "-"? positive_integer
//! rational   := digits ("/" digits)?
//! ```
//!
//! `N{1,-2,3}` stands for `‖x_1 − x_2 + x_3‖²`. Whitespace may appear between
//! any two tokens. Without a header, `n` is the largest index mentioned.

use std::fmt;

use num_bigint::BigInt;
use serde_json::json;

use crate::rational::Rational;
use crate::signed::{SignedIdentity, SignedTerm};
use crate::subset::{Subset, MAX_INDEX};

/// A parse failure at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Input text together with where it came from (a path or `<stdin>`).
#[derive(Clone, Debug)]
pub struct SourceText {
    pub name: String,
    pub text: String,
}

impl SourceText {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        SourceText {
            name: name.into(),
            text: text.into(),
        }
    }

    pub fn parse(&self) -> Result<SignedIdentity, ParseError> {
        parse(&self.text)
    }
}

pub fn parse(text: &str) -> Result<SignedIdentity, ParseError> {
    Parser::new(text).file()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

struct RawTerm {
    plus: Subset,
    minus: Subset,
    coeff: Rational,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn describe(c: Option<char>) -> String {
        match c {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            other => Err(self.error_at(
                self.pos,
                format!("expected `{want}`, found {}", Self::describe(other)),
            )),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// A run of ASCII digits, or an error naming `what`.
    fn digits(&mut self, what: &str) -> Result<(usize, String), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            let found = self.chars.get(self.pos).copied();
            return Err(self.error_at(
                start,
                format!("expected {what}, found {}", Self::describe(found)),
            ));
        }
        Ok((start, self.chars[start..self.pos].iter().collect()))
    }

    fn file(mut self) -> Result<SignedIdentity, ParseError> {
        let header = if self.peek() == Some('n') {
            Some(self.header()?)
        } else {
            None
        };
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    let mut t = self.term()?;
                    t.coeff = -t.coeff;
                    terms.push(t);
                }
                _ => break,
            }
        }
        if self.eat('=') {
            let (at, zero) = self.digits("`0`")?;
            if zero.bytes().any(|b| b != b'0') {
                return Err(self.error_at(at, "right-hand side must be 0"));
            }
        }
        if let Some(c) = self.peek() {
            return Err(self.error_at(
                self.pos,
                format!("expected `+`, `-`, `=` or end of input, found `{c}`"),
            ));
        }

        let top = terms
            .iter()
            .map(|t| t.plus.union(t.minus).max_index())
            .max()
            .unwrap_or(1);
        let n = match header {
            Some((at, n)) if n < top => {
                return Err(self.error_at(
                    at,
                    format!("header declares n = {n} but index {top} is used"),
                ));
            }
            Some((_, n)) => n,
            None => top,
        };
        let mut sid = SignedIdentity::new(n).map_err(|e| self.error_at(0, e.to_string()))?;
        for t in terms {
            let term = SignedTerm::new(t.plus, t.minus, t.coeff)
                .map_err(|e| self.error_at(0, e.to_string()))?;
            sid.push(term).map_err(|e| self.error_at(0, e.to_string()))?;
        }
        Ok(sid)
    }

    fn header(&mut self) -> Result<(usize, usize), ParseError> {
        self.expect('n')?;
        self.expect('=')?;
        let (at, text) = self.digits("an index count")?;
        let n = text
            .parse::<usize>()
            .ok()
            .filter(|n| (1..=MAX_INDEX).contains(n))
            .ok_or_else(|| self.error_at(at, format!("n must be between 1 and {MAX_INDEX}")))?;
        self.expect(';')?;
        Ok((at, n))
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let negate = self.eat('-');
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let c = self.rational()?;
                self.expect('*')?;
                c
            }
            Some('N') => Rational::one(),
            other => {
                return Err(self.error_at(
                    self.pos,
                    format!("expected a coefficient or `N`, found {}", Self::describe(other)),
                ))
            }
        };
        let (plus, minus) = self.atom()?;
        Ok(RawTerm {
            plus,
            minus,
            coeff: if negate { -coeff } else { coeff },
        })
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let (_, numer) = self.digits("a coefficient")?;
        let numer: BigInt = numer.parse().expect("digit string");
        let denom: BigInt = if self.eat('/') {
            let (at, d) = self.digits("a denominator")?;
            let d: BigInt = d.parse().expect("digit string");
            if d == BigInt::from(0) {
                return Err(self.error_at(at, "denominator must be nonzero"));
            }
            d
        } else {
            BigInt::from(1)
        };
        Ok(Rational::new(numer, denom).expect("nonzero denominator checked"))
    }

    fn atom(&mut self) -> Result<(Subset, Subset), ParseError> {
        self.expect('N')?;
        self.expect('{')?;
        let mut plus = Subset::EMPTY;
        let mut minus = Subset::EMPTY;
        loop {
            let negative = self.eat('-');
            let (at, text) = self.digits("an index")?;
            let index = text
                .parse::<usize>()
                .ok()
                .filter(|i| (1..=MAX_INDEX).contains(i))
                .ok_or_else(|| {
                    self.error_at(at, format!("index must be between 1 and {MAX_INDEX}"))
                })?;
            let single = Subset::singleton(index).expect("range checked");
            if !plus.union(minus).is_disjoint(single) {
                return Err(self.error_at(at, format!("duplicate index {index}")));
            }
            if negative {
                minus = minus.union(single);
            } else {
                plus = plus.union(single);
            }
            if !self.eat(',') {
                break;
            }
        }
        self.expect('}')?;
        Ok((plus, minus))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Dsl,
    Latex,
    Json,
}

/// Renders the canonical form of `sid`; see [`SignedIdentity::canonical`].
pub fn serialize(sid: &SignedIdentity, format: Format) -> String {
    let canon = sid.canonical();
    match format {
        Format::Dsl => to_dsl(&canon),
        Format::Latex => to_latex(&canon),
        Format::Json => serde_json::to_string_pretty(&to_json(&canon)).expect("plain JSON value"),
    }
}

fn signed_coeff(out: &mut String, coeff: &Rational, first: bool, render: impl Fn(&Rational) -> String) {
    let magnitude = coeff.abs();
    match (first, coeff.is_negative()) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
    if !magnitude.is_one() {
        out.push_str(&render(&magnitude));
    }
}

fn to_dsl(canon: &SignedIdentity) -> String {
    let mut out = String::new();
    let top = canon
        .terms()
        .iter()
        .map(|t| t.support().max_index())
        .max()
        .unwrap_or(0);
    if canon.terms().is_empty() {
        return format!("n = {}; 0*N{{1}} = 0", canon.n());
    }
    if top != canon.n() {
        out.push_str(&format!("n = {}; ", canon.n()));
    }
    for (k, t) in canon.terms().iter().enumerate() {
        signed_coeff(&mut out, t.coeff(), k == 0, |m| format!("{m}*"));
        out.push_str("N{");
        for (j, i) in t.support().indices().enumerate() {
            if j > 0 {
                out.push(',');
            }
            if t.minus().contains(i) {
                out.push('-');
            }
            out.push_str(&i.to_string());
        }
        out.push('}');
    }
    out.push_str(" = 0");
    out
}

fn latex_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn to_latex(canon: &SignedIdentity) -> String {
    if canon.terms().is_empty() {
        return "0 = 0".to_string();
    }
    let mut out = String::new();
    for (k, t) in canon.terms().iter().enumerate() {
        signed_coeff(&mut out, t.coeff(), k == 0, latex_rational);
        out.push_str("\\|");
        for (j, i) in t.support().indices().enumerate() {
            let negative = t.minus().contains(i);
            match (j, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if i < 10 {
                out.push_str(&format!("x_{i}"));
            } else {
                out.push_str(&format!("x_{{{i}}}"));
            }
        }
        out.push_str("\\|^2");
    }
    out.push_str(" = 0");
    out
}

/// `{"n": n, "terms": [{"coeff": "p/q", "plus": [..], "minus": [..]}, ..]}`.
pub fn to_json(sid: &SignedIdentity) -> serde_json::Value {
    let canon = sid.canonical();
    let terms: Vec<_> = canon
        .terms()
        .iter()
        .map(|t| {
            json!({
                "coeff": t.coeff().to_string(),
                "plus": t.plus().indices().collect::<Vec<_>>(),
                "minus": t.minus().indices().collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "n": canon.n(), "terms": terms })
}

impl fmt::Display for SignedIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self, Format::Dsl))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::rational::ratio;
    use crate::signed::SignedIdentity;

    fn err(text: &str) -> ParseError {
        parse(text).expect_err(text)
    }

    #[test]
    fn parses_the_parallelogram_law() {
        let sid = parse("N{1,2} + N{1,-2} - 2*N{1} - 2*N{2} = 0").unwrap();
        assert_eq!(sid, families::parallelogram());
    }

    #[test]
    fn header_sets_n() {
        let sid = parse("n = 5; N{1,2,3}").unwrap();
        assert_eq!(sid.n(), 5);
        assert_eq!(sid.terms().len(), 1);
        assert_eq!(sid.terms()[0].coeff(), &Rational::one());
        assert_eq!(sid.terms()[0].plus(), Subset::from_indices([1, 2, 3]).unwrap());
        assert!(sid.terms()[0].minus().is_empty());
    }

    #[test]
    fn duplicate_index_is_positioned() {
        let e = err("1/2*N{1,1}");
        assert_eq!((e.line, e.column), (1, 9));
        assert!(e.message.contains("duplicate index 1"));
        assert!(err("N{1,-1}").message.contains("duplicate"));
    }

    #[test]
    fn coefficients_and_signs() {
        let sid = parse("-N{1} + 3/6*N{2} - -2*N{1,2}").unwrap();
        let coeffs: Vec<_> = sid.terms().iter().map(|t| t.coeff().clone()).collect();
        assert_eq!(coeffs, vec![ratio(-1, 1), ratio(1, 2), ratio(2, 1)]);
        let sid = parse("\n  N { 1 ,\n -2 }\n=\n0\n").unwrap();
        assert_eq!(sid.terms()[0].minus(), Subset::singleton(2).unwrap());
    }

    #[test]
    fn error_positions() {
        let e = err("N{1}\n+ N{0}");
        assert_eq!((e.line, e.column), (2, 5));
        assert!(e.message.contains("between 1 and 63"));
        let e = err("N{64}");
        assert_eq!((e.line, e.column), (1, 3));
        let e = err("N{1} + ");
        assert_eq!((e.line, e.column), (1, 8));
        assert!(e.message.contains("end of input"));
        let e = err("1/0*N{1}");
        assert_eq!((e.line, e.column), (1, 3));
        assert!(err("1.5*N{1}").message.contains("expected `*`"));
        assert!(err("N{1} = 1").message.contains("must be 0"));
        assert!(err("n = 2; N{3}").message.contains("header declares n = 2"));
        assert!(err("n = 0; N{1}").message.contains("n must be"));
        assert!(err("N{}").message.contains("expected an index"));
        assert!(err("").message.contains("end of input"));
        assert!(err("N{1} N{2}").message.contains("found `N`"));
        assert!(err("N{99999999999999999999999}").message.contains("index must be"));
    }

    #[test]
    fn frechet_renders_term_by_term() {
        let text = serialize(&SignedIdentity::from_plain(&families::frechet()), Format::Dsl);
        assert_eq!(text, "N{1,2,3} - N{1,2} - N{1,3} - N{2,3} + N{1} + N{2} + N{3} = 0");
    }

    #[test]
    fn parallelogram_renders() {
        let sid = families::parallelogram();
        assert_eq!(
            serialize(&sid, Format::Dsl),
            "N{1,2} + N{1,-2} - 2*N{1} - 2*N{2} = 0"
        );
        assert_eq!(
            serialize(&sid, Format::Latex),
            "\\|x_1 + x_2\\|^2 + \\|x_1 - x_2\\|^2 - 2\\|x_1\\|^2 - 2\\|x_2\\|^2 = 0"
        );
    }

    #[test]
    fn header_emitted_when_needed() {
        let sid = parse("n = 4; -1/3*N{-1,2}").unwrap();
        let text = serialize(&sid, Format::Dsl);
        assert_eq!(text, "n = 4; -1/3*N{-1,2} = 0");
        assert_eq!(parse(&text).unwrap().canonical(), sid.canonical());
        let empty = parse("n = 3; N{1} - N{1}").unwrap();
        let text = serialize(&empty, Format::Dsl);
        assert_eq!(text, "n = 3; 0*N{1} = 0");
        assert_eq!(parse(&text).unwrap().canonical(), empty.canonical());
    }

    #[test]
    fn latex_fractions_and_wide_indices() {
        let sid = parse("1/2*N{-3,12}").unwrap();
        assert_eq!(serialize(&sid, Format::Latex), "\\frac{1}{2}\\|-x_3 + x_{12}\\|^2 = 0");
    }

    #[test]
    fn json_shape() {
        let v = to_json(&parse("N{1,-2} - 1/2*N{2}").unwrap());
        assert_eq!(
            v,
            json!({"n": 2, "terms": [
                {"coeff": "1", "plus": [1], "minus": [2]},
                {"coeff": "-1/2", "plus": [2], "minus": []},
            ]})
        );
    }
}
