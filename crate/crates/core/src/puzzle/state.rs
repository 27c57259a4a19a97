use super::spec::{HoleFace, ObjectId};

/// A long object passing through a hole, signed by the exit face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Crossing {
    pub face: HoleFace,
    pub hole: ObjectId,
}

impl Crossing {
    pub fn new(face: HoleFace, hole: ObjectId) -> Self {
        Crossing { face, hole }
    }

    pub fn inverse(self) -> Self {
        Crossing {
            face: self.face.opposite(),
            hole: self.hole,
        }
    }
}

/// Tail-to-head crossings of one long object.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chain {
    pub owner: ObjectId,
    pub crossings: Vec<Crossing>,
}

impl Chain {
    pub fn new(owner: ObjectId) -> Self {
        Chain {
            owner,
            crossings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Longest run of identical adjacent crossings of `hole`.
    pub fn max_run(&self, hole: ObjectId) -> usize {
        let mut best = 0;
        let mut run = 0;
        let mut prev: Option<Crossing> = None;
        for &c in &self.crossings {
            if c.hole == hole && prev == Some(c) {
                run += 1;
            } else if c.hole == hole {
                run = 1;
            } else {
                run = 0;
            }
            best = best.max(run);
            prev = Some(c);
        }
        best
    }

    /// Cancels adjacent pairs of opposite crossings of the same hole.
    pub(crate) fn reduce(&mut self) {
        let mut out: Vec<Crossing> = Vec::with_capacity(self.crossings.len());
        for &c in &self.crossings {
            match out.last() {
                Some(&top) if top == c.inverse() => {
                    out.pop();
                }
                _ => out.push(c),
            }
        }
        self.crossings = out;
    }
}

/// One chain per long object, ordered by owner name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PuzzleState {
    pub(crate) chains: Vec<Chain>,
}

impl PuzzleState {
    pub(crate) fn empty(n: usize) -> Self {
        PuzzleState {
            chains: Vec::with_capacity(n),
        }
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn chain(&self, owner: ObjectId) -> Option<&Chain> {
        self.chains.iter().find(|c| c.owner == owner)
    }

    pub(crate) fn chain_mut(&mut self, owner: ObjectId) -> Option<&mut Chain> {
        self.chains.iter_mut().find(|c| c.owner == owner)
    }

    /// Total number of crossings over all chains.
    pub fn crossing_count(&self) -> usize {
        self.chains.iter().map(Chain::len).sum()
    }

    /// Compact byte encoding: one byte per crossing, `0xFF` between chains.
    /// Injective for states of one spec.
    pub fn pack(&self) -> Box<[u8]> {
        let mut out = Vec::with_capacity(self.crossing_count() + self.chains.len());
        for (i, chain) in self.chains.iter().enumerate() {
            if i > 0 {
                out.push(0xFF);
            }
            out.extend(chain.crossings.iter().map(|c| {
                c.hole.0 << 1 | u8::from(c.face == HoleFace::Negative)
            }));
        }
        out.into_boxed_slice()
    }

    /// Inverse of [`PuzzleState::pack`] given the chain owners in slot order.
    pub fn unpack(owners: &[ObjectId], bytes: &[u8]) -> Self {
        let mut chains: Vec<Chain> = owners.iter().map(|&o| Chain::new(o)).collect();
        let mut slot = 0;
        for &b in bytes {
            if b == 0xFF {
                slot += 1;
                continue;
            }
            let face = if b & 1 == 1 {
                HoleFace::Negative
            } else {
                HoleFace::Positive
            };
            chains[slot].crossings.push(Crossing::new(face, ObjectId(b >> 1)));
        }
        PuzzleState { chains }
    }

    pub fn crosses(&self, hole: ObjectId) -> bool {
        self.chains
            .iter()
            .any(|ch| ch.crossings.iter().any(|c| c.hole == hole))
    }
}
