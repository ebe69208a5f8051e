//! Text format for ground normal programs (`.gnp`).
//!
//! ```text
//! program   := { statement }
//! statement := (atom [ ":-" body ] | ":-" body) "."
//! body      := literal { "," literal }
//! literal   := ["not" ws] atom
//! atom      := ident [ "(" balanced-args ")" ]
//! comment   := "%" ... end-of-line
//! ```
//!
//! Whitespace between tokens is insignificant, including inside the argument
//! list of an atom, so `edge(1, 2)` and `edge(1,2)` name the same atom.

use std::fmt;
use std::fmt::Write as _;

use crate::program::{AtomId, Body, Constraint, Program, Rule};

/// Location and reason for rejected input. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            src: text.as_bytes(),
            text,
            pos: 0,
        }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let before = &self.text[..pos.min(self.text.len())];
        let line = before.bytes().filter(|&b| b == b'\n').count() + 1;
        let col_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = self.text[col_start..pos.min(self.text.len())]
            .chars()
            .count()
            + 1;
        (line, column)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseDiagnostic {
        // Point at the last character rather than one past the end.
        let pos = if pos >= self.text.len() && !self.text.is_empty() {
            let mut p = self.text.len() - 1;
            while !self.text.is_char_boundary(p) {
                p -= 1;
            }
            p
        } else {
            pos
        };
        let (line, column) = self.location(pos);
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'%' {
                while let Some(c) = self.peek() {
                    if c == b'\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.pos += 1,
            _ => return None,
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(&self.text[start..self.pos])
    }

    /// Parses `ident [ "(" balanced-args ")" ]` and returns its normalized text.
    fn atom(&mut self) -> Result<String, ParseDiagnostic> {
        self.skip_ws();
        let start = self.pos;
        let name = self
            .ident()
            .ok_or_else(|| self.error_at(start, "expected an atom"))?;
        let mut out = name.to_owned();
        let save = self.pos;
        self.skip_ws();
        if self.peek() != Some(b'(') {
            self.pos = save;
            return Ok(out);
        }
        let open = self.pos;
        self.pos += 1;
        out.push('(');
        let mut depth = 1usize;
        loop {
            let Some(c) = self.peek() else {
                return Err(self.error_at(open, "unbalanced parenthesis in atom arguments"));
            };
            match c {
                b'(' => {
                    depth += 1;
                    out.push('(');
                }
                b')' => {
                    depth -= 1;
                    out.push(')');
                    if depth == 0 {
                        self.pos += 1;
                        break;
                    }
                }
                c if c.is_ascii_whitespace() => {}
                c if c.is_ascii_alphanumeric() || b"_,+-'\"".contains(&c) => out.push(c as char),
                _ => {
                    let ch = self.text[self.pos..].chars().next().unwrap_or('?');
                    return Err(
                        self.error_at(self.pos, format!("unexpected `{ch}` in atom arguments"))
                    );
                }
            }
            self.pos += 1;
        }
        if out.ends_with("()") && depth == 0 && out.len() == name.len() + 2 {
            return Err(self.error_at(open, "empty argument list"));
        }
        Ok(out)
    }

    /// `["not" ws] atom`; returns (negated, symbol).
    fn literal(&mut self) -> Result<(bool, String), ParseDiagnostic> {
        self.skip_ws();
        let start = self.pos;
        if self.is_not_keyword() {
            self.pos += 3;
            self.skip_ws();
            if self.is_not_keyword() {
                return Err(self.error_at(self.pos, "`not` may not be applied twice"));
            }
            let atom = self.atom().map_err(|mut e| {
                if e.message == "expected an atom" {
                    let at = self.error_at(start, "expected an atom after `not`");
                    e.message = at.message;
                }
                e
            })?;
            return Ok((true, atom));
        }
        Ok((false, self.atom()?))
    }

    /// `not` followed by whitespace and then an identifier start.
    fn is_not_keyword(&self) -> bool {
        let rest = &self.src[self.pos..];
        if !rest.starts_with(b"not") || rest.len() < 4 || !rest[3].is_ascii_whitespace() {
            return false;
        }
        let mut i = 3;
        while i < rest.len() && rest[i].is_ascii_whitespace() {
            i += 1;
        }
        i < rest.len() && (rest[i].is_ascii_alphabetic() || rest[i] == b'_')
    }

    fn body(&mut self) -> Result<Vec<(bool, String)>, ParseDiagnostic> {
        let mut lits = vec![self.literal()?];
        while self.eat(",") {
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn expect_period(&mut self, stmt_start: usize) -> Result<(), ParseDiagnostic> {
        self.skip_ws();
        if self.eat(".") {
            return Ok(());
        }
        if self.pos >= self.src.len() {
            return Err(self.error_at(stmt_start, "unterminated statement, expected `.`"));
        }
        let ch = self.text[self.pos..].chars().next().unwrap_or('?');
        Err(self.error_at(self.pos, format!("unexpected `{ch}`, expected `.`")))
    }
}

/// Parses the ground-program text format. Duplicate statements collapse.
pub fn parse_program(text: &str) -> Result<Program, ParseDiagnostic> {
    let mut lx = Lexer::new(text);
    let mut program = Program::new();
    while !lx.at_end() {
        let stmt_start = lx.pos;
        if lx.eat(":-") {
            let body = lx.body()?;
            lx.expect_period(stmt_start)?;
            let (pos, neg) = split_body(&mut program, body);
            program.add_constraint(Constraint::new(pos, neg));
        } else {
            let head = lx.atom()?;
            let head = program.intern(&head);
            let body = if lx.eat(":-") { lx.body()? } else { Vec::new() };
            lx.expect_period(stmt_start)?;
            let (pos, neg) = split_body(&mut program, body);
            program.add_rule(Rule::new(head, pos, neg));
        }
    }
    Ok(program)
}

fn split_body(program: &mut Program, body: Vec<(bool, String)>) -> (Vec<AtomId>, Vec<AtomId>) {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (negated, sym) in body {
        let id = program.intern(&sym);
        if negated {
            neg.push(id);
        } else {
            pos.push(id);
        }
    }
    (pos, neg)
}

fn write_body(out: &mut String, program: &Program, body: &Body) {
    let mut first = true;
    for &a in &body.pos {
        if !first {
            out.push_str(", ");
        }
        first = false;
        out.push_str(program.name(a));
    }
    for &a in &body.neg {
        if !first {
            out.push_str(", ");
        }
        first = false;
        let _ = write!(out, "not {}", program.name(a));
    }
}

/// Renders one statement per line; `parse_program` reads it back.
pub fn render_program(program: &Program) -> String {
    let mut out = String::new();
    for r in program.rules() {
        out.push_str(program.name(r.head));
        if !r.body.is_empty() {
            out.push_str(" :- ");
            write_body(&mut out, program, &r.body);
        }
        out.push_str(".\n");
    }
    for c in program.constraints() {
        out.push_str(":- ");
        write_body(&mut out, program, &c.body);
        out.push_str(".\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str =
        "a :- not b.\nb :- not a.\nc :- a, b.\nc :- d.\nd :- a.\nd :- b, c.\ne :- not a, not b.";

    #[test]
    fn parses_example_program() {
        let p = parse_program(SAMPLE).unwrap();
        assert_eq!(p.rules().len(), 7);
        assert_eq!(p.num_atoms(), 5);
        assert!(p.constraints().is_empty());
        let c = p.atoms().lookup("c").unwrap();
        assert_eq!(p.rules().iter().filter(|r| r.head == c).count(), 2);
    }

    #[test]
    fn fact_has_empty_body() {
        let p = parse_program("a.").unwrap();
        assert_eq!(p.rules().len(), 1);
        assert!(p.rules()[0].is_fact());
    }

    #[test]
    fn headless_statement_is_a_constraint() {
        let p = parse_program(":- a, not b.").unwrap();
        assert!(p.rules().is_empty());
        assert_eq!(p.constraints().len(), 1);
        let c = &p.constraints()[0];
        assert_eq!(c.body.pos, vec![p.atoms().lookup("a").unwrap()]);
        assert_eq!(c.body.neg, vec![p.atoms().lookup("b").unwrap()]);
    }

    #[test]
    fn ground_terms_are_opaque_and_whitespace_normalized() {
        let p = parse_program("edge(1, 2). r(x) :- edge(1,2), not in(f(1),2).").unwrap();
        assert_eq!(p.num_atoms(), 3);
        assert!(p.atoms().lookup("edge(1,2)").is_some());
        assert!(p.atoms().lookup("in(f(1),2)").is_some());
    }

    #[test]
    fn comments_and_duplicates() {
        let p = parse_program("% header\na :- b. % trailing\na :- b.\n").unwrap();
        assert_eq!(p.rules().len(), 1);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_program("a :- b").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        assert!(e.message.contains("unterminated"));

        let e = parse_program("a.\nb :- not not c.").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("twice"));

        let e = parse_program("a :- 1b.").unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));

        let e = parse_program("p(1.").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_program(":- .").is_err());
        assert!(parse_program("a :- b,.").is_err());
        assert!(parse_program("a b.").is_err());
        assert!(parse_program("p().").is_err());
    }

    #[test]
    fn atom_may_be_named_not() {
        let p = parse_program("not. a :- not.").unwrap();
        assert_eq!(p.num_atoms(), 2);
        assert!(p.rules()[1].body.neg.is_empty());
    }

    #[test]
    fn render_roundtrip_example() {
        let p = parse_program(SAMPLE).unwrap();
        let text = render_program(&p);
        assert_eq!(text.lines().count(), 7);
        assert!(text.lines().all(|l| l.ends_with('.')));
        let q = parse_program(&text).unwrap();
        assert_eq!(render_program(&q), text);
    }

    #[test]
    fn render_empty_and_constraint_only() {
        assert_eq!(render_program(&Program::new()), "");
        let p = parse_program(":- a. :- b, not a.").unwrap();
        let text = render_program(&p);
        assert!(text.lines().all(|l| l.starts_with(":-")));
        assert_eq!(text.lines().count(), 2);
    }
}
