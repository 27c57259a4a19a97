//! Program text: `1 {s1; s2} 1 :- a3, s0.`, `:- a5, s0.`, `:- a7.` and `%`
//! comment lines. A comment of the form `% s<N> ...` names the state a
//! program belongs to, so rule-less programs still parse.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::{ActionAtom, AspError, AtomRegistry, StateAtom, StateProgram};

fn header(out: &mut String, s: StateAtom, reg: Option<&AtomRegistry>) {
    match reg.and_then(|r| r.state_key(s)) {
        Some(key) => writeln!(out, "% {s} {key}").unwrap(),
        None => writeln!(out, "% {s}").unwrap(),
    }
}

fn action_comment(out: &mut String, a: ActionAtom, reg: Option<&AtomRegistry>) {
    if let Some(label) = reg.and_then(|r| r.action_label(a)) {
        writeln!(out, "% {a} {label}").unwrap();
    }
}

fn rule_lines(out: &mut String, p: &StateProgram, reg: Option<&AtomRegistry>) {
    for (a, succ) in &p.rules {
        action_comment(out, *a, reg);
        let head: Vec<String> = succ.iter().map(ToString::to_string).collect();
        writeln!(out, "1 {{{}}} 1 :- {a}, {}.", head.join("; "), p.state).unwrap();
    }
}

fn constraint_lines(out: &mut String, p: &StateProgram, reg: Option<&AtomRegistry>) {
    for a in &p.constraints {
        action_comment(out, *a, reg);
        writeln!(out, ":- {a}, {}.", p.state).unwrap();
    }
}

pub(super) fn print_rules(p: &StateProgram, reg: Option<&AtomRegistry>) -> String {
    let mut out = String::new();
    header(&mut out, p.state, reg);
    rule_lines(&mut out, p, reg);
    out
}

pub(super) fn print_constraints(p: &StateProgram, reg: Option<&AtomRegistry>) -> String {
    let mut out = String::new();
    header(&mut out, p.state, reg);
    constraint_lines(&mut out, p, reg);
    out
}

/// Rules then constraints under a single header.
pub(super) fn print_program(p: &StateProgram, reg: Option<&AtomRegistry>) -> String {
    let mut out = String::new();
    header(&mut out, p.state, reg);
    rule_lines(&mut out, p, reg);
    constraint_lines(&mut out, p, reg);
    out
}

pub(super) fn print_global(global: &BTreeSet<ActionAtom>, reg: Option<&AtomRegistry>) -> String {
    let mut out = String::from("% global\n");
    for &a in global {
        action_comment(&mut out, a, reg);
        writeln!(out, ":- {a}.").unwrap();
    }
    out
}

impl StateProgram {
    /// Text without comments.
    pub fn to_text(&self) -> String {
        print_program(self, None)
    }
}

struct Line<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Line<'a> {
    fn err(&self, message: impl Into<String>) -> AspError {
        AspError::Parse {
            line: self.line,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.text[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), AspError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{tok}`")))
        }
    }

    fn atom(&mut self, prefix: char) -> Result<u32, AspError> {
        self.ws();
        let rest = &self.text[self.pos..];
        if !rest.starts_with(prefix) {
            return Err(self.err(format!("expected a `{prefix}<N>` atom")));
        }
        let digits = rest[1..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len() - 1);
        if digits == 0 {
            return Err(self.err(format!("expected a `{prefix}<N>` atom")));
        }
        let n = rest[1..1 + digits]
            .parse()
            .map_err(|_| self.err("atom index out of range"))?;
        self.pos += 1 + digits;
        Ok(n)
    }

    fn state(&mut self) -> Result<StateAtom, AspError> {
        self.atom('s').map(StateAtom)
    }

    fn action(&mut self) -> Result<ActionAtom, AspError> {
        let n = self.atom('a')?;
        u16::try_from(n)
            .map(ActionAtom)
            .map_err(|_| self.err("action index out of range"))
    }

    fn end(&mut self) -> Result<(), AspError> {
        self.ws();
        if self.pos == self.text.len() {
            Ok(())
        } else {
            Err(self.err("trailing text"))
        }
    }
}

enum Stmt {
    Rule(ActionAtom, Vec<StateAtom>, StateAtom),
    Constraint(ActionAtom, StateAtom),
    Global(ActionAtom),
    Header(StateAtom),
}

fn statements(text: &str) -> Result<Vec<(usize, Stmt)>, AspError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut l = Line {
            text: raw,
            pos: 0,
            line: i + 1,
        };
        l.ws();
        if l.pos == raw.len() {
            continue;
        }
        if l.eat("%") {
            l.ws();
            let word = raw[l.pos..].split_whitespace().next().unwrap_or("");
            if word.len() > 1
                && word.starts_with('s')
                && word[1..].bytes().all(|b| b.is_ascii_digit())
            {
                out.push((i + 1, Stmt::Header(l.state()?)));
            }
            continue;
        }
        if l.eat(":-") {
            let a = l.action()?;
            let stmt = if l.eat(",") {
                let s = l.state()?;
                Stmt::Constraint(a, s)
            } else {
                Stmt::Global(a)
            };
            l.expect(".")?;
            l.end()?;
            out.push((i + 1, stmt));
            continue;
        }
        l.expect("1")?;
        l.expect("{")?;
        let mut head = vec![l.state()?];
        while l.eat(";") {
            head.push(l.state()?);
        }
        l.expect("}")?;
        l.expect("1")?;
        l.expect(":-")?;
        let a = l.action()?;
        l.expect(",")?;
        let s = l.state()?;
        l.expect(".")?;
        l.end()?;
        out.push((i + 1, Stmt::Rule(a, head, s)));
    }
    Ok(out)
}

fn at(line: usize, message: impl Into<String>) -> AspError {
    AspError::Parse {
        line,
        column: 1,
        message: message.into(),
    }
}

/// Parses one state's rules and constraints (either file or both joined).
pub fn parse_program(text: &str) -> Result<StateProgram, AspError> {
    let stmts = statements(text)?;
    let mut state: Option<StateAtom> = None;
    let mut same_state = |line: usize, s: StateAtom| match state {
        Some(prev) if prev != s => Err(at(line, format!("expected state {prev}, found {s}"))),
        _ => {
            state = Some(s);
            Ok(())
        }
    };
    for (line, stmt) in &stmts {
        match stmt {
            Stmt::Rule(_, _, s) | Stmt::Constraint(_, s) | Stmt::Header(s) => {
                same_state(*line, *s)?
            }
            Stmt::Global(_) => return Err(at(*line, "global constraint in a state program")),
        }
    }
    let state = state.ok_or_else(|| at(1, "no state atom in program"))?;
    let mut p = StateProgram::new(state);
    for (line, stmt) in &stmts {
        if let Stmt::Constraint(a, _) = stmt {
            p.constraints.insert(*a);
            if p.rules.contains_key(a) {
                return Err(at(*line, format!("{a} has both a rule and a constraint")));
            }
        }
    }
    for (line, stmt) in stmts {
        if let Stmt::Rule(a, head, _) = stmt {
            if p.constraints.contains(&a) {
                return Err(at(line, format!("{a} has both a rule and a constraint")));
            }
            if p.rules.contains_key(&a) {
                return Err(at(line, format!("second rule for {a}")));
            }
            let mut head = head;
            head.sort();
            head.dedup();
            p.rules.insert(a, head);
        }
    }
    Ok(p)
}

/// Parses a `global.constraints` file.
pub fn parse_global(text: &str) -> Result<BTreeSet<ActionAtom>, AspError> {
    let mut out = BTreeSet::new();
    for (line, stmt) in statements(text)? {
        match stmt {
            Stmt::Global(a) => {
                out.insert(a);
            }
            Stmt::Header(_) => {}
            _ => return Err(at(line, "only `:- a<K>.` lines belong in the global file")),
        }
    }
    Ok(out)
}
