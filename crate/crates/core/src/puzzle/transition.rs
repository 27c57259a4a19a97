//! Pass-through semantics.
//!
//! A chain is read as a word over signed hole crossings and every pass is
//! one of three rewrites of those words:
//!
//! * **tip drag** – a long object's head, or a regular object fixed to an end
//!   of a long object, goes through hole `h`: the crossing `(hf, h)` is added
//!   at that end of the chain, or cancels an end-most `(-hf, h)`.
//! * **carried segment** – a holed object goes through `h`: every crossing of
//!   its hole is wrapped as `(hf, h) c (-hf, h)`.
//! * **head-hole coupling** – a long object with a hole at its head goes
//!   through `h`: tip drag on its own chain plus a carried-segment wrap of
//!   that head hole in every other chain.
//!
//! After each rewrite adjacent opposite crossings of the same hole cancel,
//! so chains are always fully reduced. Every rewrite is then undone exactly
//! by the same pass through the opposite face.

use std::fmt;

use super::spec::{HoleFace, ObjectClass, ObjectId, PuzzleSpec};
use super::state::{Chain, Crossing, PuzzleState};

/// ⟨crossing element, host element, hole face⟩
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionTriple {
    pub ce: ObjectId,
    pub he: ObjectId,
    pub hf: HoleFace,
}

impl ActionTriple {
    pub fn new(ce: ObjectId, he: ObjectId, hf: HoleFace) -> Self {
        ActionTriple { ce, he, hf }
    }

    /// Same elements, opposite face.
    pub fn inverse(self) -> Self {
        ActionTriple {
            hf: self.hf.opposite(),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Impossibility {
    /// Size or shape rules this pair out in every state.
    DoesNotFit,
    WindingLimit,
    /// A chain would exceed the length cap.
    TooLong,
    SelfCrossing,
    /// The pass would leave the configuration unchanged.
    NoEffect,
}

impl Impossibility {
    /// Whether the pair is impossible regardless of state.
    pub fn is_global(self) -> bool {
        matches!(self, Impossibility::DoesNotFit)
    }
}

impl fmt::Display for Impossibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Impossibility::DoesNotFit => "does not fit",
            Impossibility::WindingLimit => "winding limit exceeded",
            Impossibility::TooLong => "not enough length left",
            Impossibility::SelfCrossing => "object would cross its own hole",
            Impossibility::NoEffect => "no effect",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitionResult {
    Moved(PuzzleState),
    Impossible(Impossibility),
}

impl TransitionResult {
    pub fn moved(self) -> Option<PuzzleState> {
        match self {
            TransitionResult::Moved(s) => Some(s),
            TransitionResult::Impossible(_) => None,
        }
    }
}

fn tip_drag(chain: &mut Chain, at_head: bool, crossing: Crossing) {
    let cs = &mut chain.crossings;
    if at_head {
        if cs.last() == Some(&crossing.inverse()) {
            cs.pop();
        } else {
            cs.push(crossing);
        }
    } else if cs.first() == Some(&crossing.inverse()) {
        cs.remove(0);
    } else {
        cs.insert(0, crossing);
    }
}

/// Wraps each crossing of `target` as `(hf,h) c (-hf,h)` and reduces.
fn carry(chain: &mut Chain, target: ObjectId, wrap: Crossing) -> bool {
    if !chain.crossings.iter().any(|c| c.hole == target) {
        return false;
    }
    let mut out = Vec::with_capacity(chain.crossings.len() + 4);
    for &c in &chain.crossings {
        if c.hole == target {
            out.push(wrap);
            out.push(c);
            out.push(wrap.inverse());
        } else {
            out.push(c);
        }
    }
    chain.crossings = out;
    chain.reduce();
    true
}

impl PuzzleSpec {
    /// All actions in CE, HE, HF order. Physically impossible size
    /// combinations stay in; only self pairs and a-priori exclusions go.
    pub fn enumerate_actions(&self) -> Vec<ActionTriple> {
        let mut out = Vec::new();
        for &ce in &self.crossers {
            for &he in &self.hosts {
                if ce == he || self.hole_owner(he) == Some(ce) {
                    continue;
                }
                if self.forbidden_pairs.contains(&(ce, he)) {
                    continue;
                }
                for hf in [HoleFace::Positive, HoleFace::Negative] {
                    out.push(ActionTriple { ce, he, hf });
                }
            }
        }
        out
    }

    pub fn apply(&self, state: &PuzzleState, action: ActionTriple) -> TransitionResult {
        let ActionTriple { ce, he, hf } = action;
        if !self.fits(ce, he) {
            return TransitionResult::Impossible(Impossibility::DoesNotFit);
        }
        let crossing = Crossing::new(hf, he);
        let mut next = state.clone();
        match self.class_of(ce) {
            ObjectClass::Long => {
                if let Some(chain) = next.chain_mut(ce) {
                    tip_drag(chain, true, crossing);
                }
                let head_holes: Vec<ObjectId> = self
                    .objects()
                    .filter(|&(id, _)| self.hole_owner(id) == Some(ce))
                    .map(|(id, _)| id)
                    .collect();
                for g in head_holes {
                    for chain in next.chains.iter_mut().filter(|c| c.owner != ce) {
                        carry(chain, g, crossing);
                    }
                }
            }
            ObjectClass::Regular => match self.attachment(ce) {
                Some((owner, end)) => {
                    if let Some(chain) = next.chain_mut(owner) {
                        tip_drag(chain, end == super::End::Head, crossing);
                    }
                }
                None => return TransitionResult::Impossible(Impossibility::NoEffect),
            },
            ObjectClass::Holed => {
                for chain in next.chains.iter_mut() {
                    carry(chain, ce, crossing);
                }
            }
        }
        if next == *state {
            return TransitionResult::Impossible(Impossibility::NoEffect);
        }
        if let Err(reason) = self.check_chains(&next) {
            return TransitionResult::Impossible(reason);
        }
        TransitionResult::Moved(next)
    }

    /// Chain invariants: no self crossing, winding caps respected.
    pub(crate) fn check_chains(&self, state: &PuzzleState) -> Result<(), Impossibility> {
        for chain in &state.chains {
            if chain
                .crossings
                .iter()
                .any(|c| c.hole == chain.owner || self.hole_owner(c.hole) == Some(chain.owner))
            {
                return Err(Impossibility::SelfCrossing);
            }
        }
        if let Some(cap) = self.max_chain_len {
            if state.chains.iter().any(|c| c.len() > cap) {
                return Err(Impossibility::TooLong);
            }
        }
        for chain in &state.chains {
            let mut run = 0usize;
            let mut prev: Option<Crossing> = None;
            for &c in &chain.crossings {
                run = if prev == Some(c) { run + 1 } else { 1 };
                prev = Some(c);
                if run > self.winding_limit_for(chain.owner, c.hole) as usize {
                    return Err(Impossibility::WindingLimit);
                }
            }
        }
        Ok(())
    }

    /// The goal hole (the Ring) is crossed by nothing.
    pub fn is_goal(&self, state: &PuzzleState) -> bool {
        !state.crosses(self.goal_hole)
    }

    /// `pass(<CE>,<HE>,<+|->)`
    pub fn format_action(&self, action: ActionTriple) -> String {
        format!(
            "pass({},{},{})",
            self.name_of(action.ce),
            self.name_of(action.he),
            action.hf.sign()
        )
    }

    pub fn parse_action(&self, text: &str) -> Option<ActionTriple> {
        let inner = text.trim().strip_prefix("pass(")?.strip_suffix(')')?;
        let mut parts = inner.split(',').map(str::trim);
        let ce = self.lookup(parts.next()?)?;
        let he = self.lookup(parts.next()?)?;
        let sign = parts.next()?;
        if parts.next().is_some() || sign.chars().count() != 1 {
            return None;
        }
        let hf = HoleFace::from_sign(sign.chars().next()?)?;
        let action = ActionTriple { ce, he, hf };
        self.enumerate_actions().contains(&action).then_some(action)
    }
}
