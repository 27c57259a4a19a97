//! Text form of states: `chain(Post)=[+Ring];chain(String)=[+Sphere1,+Post,+Sphere2]`.

use std::fmt;

use super::spec::{HoleFace, ObjectClass, PuzzleSpec};
use super::state::{Chain, Crossing, PuzzleState};
use super::PuzzleError;

/// Printed state, chains in owner-name order. Equal keys mean equal states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Box<str>);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Wraps text that is already in canonical form (e.g. read back from a
    /// snapshot); no validation happens here.
    pub fn from_canonical(text: &str) -> Self {
        CanonicalKey(text.into())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PuzzleSpec {
    pub fn print_state(&self, state: &PuzzleState) -> String {
        let mut out = String::with_capacity(16 * state.crossing_count() + 32);
        for (i, chain) in state.chains.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str("chain(");
            out.push_str(self.name_of(chain.owner));
            out.push_str(")=[");
            for (j, c) in chain.crossings.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push(c.face.sign());
                out.push_str(self.object(c.hole).chain_label());
            }
            out.push(']');
        }
        out
    }

    pub fn canonical_key(&self, state: &PuzzleState) -> CanonicalKey {
        CanonicalKey(self.print_state(state).into_boxed_str())
    }

    /// Parses chain notation. Whitespace is free; chain clauses may be
    /// separated by `;` or newlines and may come in any order.
    pub fn parse_state(&self, text: &str) -> Result<PuzzleState, PuzzleError> {
        let mut p = Parser::new(text);
        let mut chains: Vec<Option<Chain>> = vec![None; self.longs.len()];
        loop {
            p.skip_separators();
            if p.at_end() {
                break;
            }
            let (line, column) = p.position();
            p.expect_word("chain")?;
            p.expect('(')?;
            let (oline, ocol) = p.position();
            let owner_name = p.ident()?;
            let owner = self
                .lookup(owner_name)
                .filter(|&id| self.class_of(id) == ObjectClass::Long)
                .ok_or_else(|| PuzzleError::UnknownObject {
                    name: owner_name.to_string(),
                    line: oline,
                    column: ocol,
                })?;
            p.expect(')')?;
            p.expect('=')?;
            p.expect('[')?;
            let mut chain = Chain::new(owner);
            p.skip_ws();
            if !p.eat(']') {
                loop {
                    p.skip_ws();
                    let (hline, hcol) = p.position();
                    let face = match p.next_char() {
                        Some(c) => HoleFace::from_sign(c).ok_or_else(|| {
                            p.error_at(hline, hcol, format!("expected '+' or '-', found {c:?}"))
                        })?,
                        None => return Err(p.error_at(hline, hcol, "unexpected end of input".into())),
                    };
                    let (nline, ncol) = p.position();
                    let label = p.ident()?;
                    let hole = self.lookup_hole(label).ok_or_else(|| PuzzleError::UnknownObject {
                        name: label.to_string(),
                        line: nline,
                        column: ncol,
                    })?;
                    chain.crossings.push(Crossing::new(face, hole));
                    p.skip_ws();
                    if p.eat(']') {
                        break;
                    }
                    p.expect(',')?;
                }
            }
            let slot = self.chain_slot(owner).expect("long object has a slot");
            if chains[slot].is_some() {
                return Err(p.error_at(
                    line,
                    column,
                    format!("duplicate chain for {owner_name}"),
                ));
            }
            chains[slot] = Some(chain);
        }
        let mut state = PuzzleState::empty(self.longs.len());
        for (slot, chain) in chains.into_iter().enumerate() {
            match chain {
                Some(c) => state.chains.push(c),
                None => {
                    return Err(PuzzleError::InvalidState(format!(
                        "missing chain for {}",
                        self.name_of(self.longs[slot])
                    )))
                }
            }
        }
        self.validate_state(&state)?;
        Ok(state)
    }

    /// Checks chain invariants of a state built outside `apply`.
    pub fn validate_state(&self, state: &PuzzleState) -> Result<(), PuzzleError> {
        if state.chains.len() != self.longs.len()
            || state.chains.iter().zip(&self.longs).any(|(c, &l)| c.owner != l)
        {
            return Err(PuzzleError::InvalidState(
                "expected exactly one chain per long object".into(),
            ));
        }
        for chain in &state.chains {
            if chain.crossings.windows(2).any(|w| w[0] == w[1].inverse()) {
                return Err(PuzzleError::InvalidState(format!(
                    "chain({}) holds an adjacent cancelling pair",
                    self.name_of(chain.owner)
                )));
            }
        }
        self.check_chains(state)
            .map_err(|reason| PuzzleError::InvalidState(reason.to_string()))
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn position(&self) -> (usize, usize) {
        let before = &self.text[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn error_at(&self, line: usize, column: usize, message: String) -> PuzzleError {
        PuzzleError::Parse {
            line,
            column,
            message,
        }
    }

    fn error(&self, message: String) -> PuzzleError {
        let (line, column) = self.position();
        self.error_at(line, column, message)
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn next_char(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.next_char();
        }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace() || c == ';') {
            self.next_char();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), PuzzleError> {
        self.skip_ws();
        if self.eat(c) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or_else(|| "end of input".to_string(), |f| format!("{f:?}"));
            Err(self.error(format!("expected {c:?}, found {found}")))
        }
    }

    fn ident(&mut self) -> Result<&'a str, PuzzleError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.next_char();
        }
        if self.pos == start {
            return Err(self.error("expected an object name".into()));
        }
        Ok(&self.text[start..self.pos])
    }

    fn expect_word(&mut self, word: &str) -> Result<(), PuzzleError> {
        let ident = self.ident()?;
        if ident == word {
            Ok(())
        } else {
            Err(self.error(format!("expected `{word}`, found `{ident}`")))
        }
    }
}
