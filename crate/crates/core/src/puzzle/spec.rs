//! Static description of a puzzle variant: the object table, which
//! combinations fit through which holes, and the starting configuration.

use std::fmt;
use std::str::FromStr;

use super::state::PuzzleState;
use super::PuzzleError;

/// Index of an object inside its [`PuzzleSpec`] object table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId(pub(crate) u8);

impl ObjectId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectClass {
    Regular,
    Holed,
    Long,
}

/// The face of a hole a crossing exits through. Positive is left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HoleFace {
    Positive,
    Negative,
}

impl HoleFace {
    pub fn opposite(self) -> Self {
        match self {
            HoleFace::Positive => HoleFace::Negative,
            HoleFace::Negative => HoleFace::Positive,
        }
    }

    pub fn sign(self) -> char {
        match self {
            HoleFace::Positive => '+',
            HoleFace::Negative => '-',
        }
    }

    pub fn from_sign(c: char) -> Option<Self> {
        match c {
            '+' => Some(HoleFace::Positive),
            '-' => Some(HoleFace::Negative),
            _ => None,
        }
    }
}

/// Ends of a long object. Chains are listed tail to head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    Tail,
    Head,
}

/// Where the hole of a holed object lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HoleLocation {
    FreeStanding,
    ThreadedOn(ObjectId),
    AtHeadOf(ObjectId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectDef {
    pub name: String,
    pub class: ObjectClass,
    /// Alias used for the hole in chain notation (`Post` for `PostHole1`).
    pub label: Option<String>,
}

impl ObjectDef {
    pub fn chain_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Puzzle {
    Fishermans,
    RopeLadder,
}

impl Puzzle {
    pub fn as_str(self) -> &'static str {
        match self {
            Puzzle::Fishermans => "fishermans",
            Puzzle::RopeLadder => "ropeladder",
        }
    }
}

impl fmt::Display for Puzzle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Puzzle {
    type Err = PuzzleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fishermans" => Ok(Puzzle::Fishermans),
            "ropeladder" => Ok(Puzzle::RopeLadder),
            other => Err(PuzzleError::UnknownPuzzle(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Simplified,
    Original,
    NonDeterministic,
    NonStationaryDisk,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Simplified => "simplified",
            Variant::Original => "original",
            Variant::NonDeterministic => "nondeterministic",
            Variant::NonStationaryDisk => "nonstationary-disk",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = PuzzleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simplified" => Ok(Variant::Simplified),
            "original" => Ok(Variant::Original),
            "nondeterministic" => Ok(Variant::NonDeterministic),
            "nonstationary-disk" => Ok(Variant::NonStationaryDisk),
            other => Err(PuzzleError::UnknownVariant(other.to_string())),
        }
    }
}

/// Per (chain owner, hole) cap on consecutive same-sign crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindingOverride {
    pub owner: ObjectId,
    pub hole: ObjectId,
    pub limit: u8,
}

#[derive(Debug, Clone)]
pub struct PuzzleSpec {
    pub(crate) puzzle: Puzzle,
    pub(crate) variant: Variant,
    pub(crate) objects: Vec<ObjectDef>,
    pub(crate) crossers: Vec<ObjectId>,
    pub(crate) hosts: Vec<ObjectId>,
    pub(crate) attachments: Vec<Option<(ObjectId, End)>>,
    pub(crate) hole_location: Vec<Option<HoleLocation>>,
    pub(crate) fits: Vec<bool>,
    pub(crate) forbidden_pairs: Vec<(ObjectId, ObjectId)>,
    pub(crate) winding_limit: u8,
    /// Crossings one chain can hold before the object runs out of length.
    pub(crate) max_chain_len: Option<usize>,
    pub(crate) winding_overrides: Vec<WindingOverride>,
    pub(crate) goal_hole: ObjectId,
    /// Long objects sorted by name; chain `i` of a state belongs to `longs[i]`.
    pub(crate) longs: Vec<ObjectId>,
    pub(crate) initial: PuzzleState,
}

impl PuzzleSpec {
    pub fn puzzle(&self) -> Puzzle {
        self.puzzle
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `<puzzle>/<variant>`
    pub fn name(&self) -> String {
        format!("{}/{}", self.puzzle, self.variant)
    }

    pub fn objects(&self) -> impl Iterator<Item = (ObjectId, &ObjectDef)> {
        self.objects
            .iter()
            .enumerate()
            .map(|(i, def)| (ObjectId(i as u8), def))
    }

    pub fn object(&self, id: ObjectId) -> &ObjectDef {
        &self.objects[id.index()]
    }

    pub fn name_of(&self, id: ObjectId) -> &str {
        &self.objects[id.index()].name
    }

    pub fn class_of(&self, id: ObjectId) -> ObjectClass {
        self.objects[id.index()].class
    }

    pub fn lookup(&self, name: &str) -> Option<ObjectId> {
        self.objects
            .iter()
            .position(|o| o.name == name)
            .map(|i| ObjectId(i as u8))
    }

    /// Resolves a hole by its chain label or object name.
    pub fn lookup_hole(&self, label: &str) -> Option<ObjectId> {
        self.objects
            .iter()
            .position(|o| o.class == ObjectClass::Holed && o.chain_label() == label)
            .or_else(|| {
                self.objects
                    .iter()
                    .position(|o| o.class == ObjectClass::Holed && o.name == label)
            })
            .map(|i| ObjectId(i as u8))
    }

    pub fn crossers(&self) -> &[ObjectId] {
        &self.crossers
    }

    pub fn hosts(&self) -> &[ObjectId] {
        &self.hosts
    }

    pub fn long_objects(&self) -> &[ObjectId] {
        &self.longs
    }

    pub fn attachment(&self, id: ObjectId) -> Option<(ObjectId, End)> {
        self.attachments[id.index()]
    }

    pub fn hole_location(&self, id: ObjectId) -> Option<HoleLocation> {
        self.hole_location[id.index()]
    }

    /// The long object carrying `hole` at its head, if any.
    pub fn hole_owner(&self, hole: ObjectId) -> Option<ObjectId> {
        match self.hole_location(hole) {
            Some(HoleLocation::AtHeadOf(owner)) => Some(owner),
            _ => None,
        }
    }

    pub fn fits(&self, ce: ObjectId, he: ObjectId) -> bool {
        self.fits[ce.index() * self.objects.len() + he.index()]
    }

    pub fn set_fits(&mut self, ce: ObjectId, he: ObjectId, value: bool) {
        let n = self.objects.len();
        self.fits[ce.index() * n + he.index()] = value;
    }

    pub fn forbidden_pairs(&self) -> &[(ObjectId, ObjectId)] {
        &self.forbidden_pairs
    }

    pub fn winding_limit(&self) -> u8 {
        self.winding_limit
    }

    /// Replaces the global winding cap. Per-hole overrides are kept unless
    /// they exceed the new cap.
    pub fn set_winding_limit(&mut self, limit: u8) {
        assert!(limit >= 1, "winding limit must be positive");
        self.winding_limit = limit;
        for o in &mut self.winding_overrides {
            o.limit = o.limit.min(limit);
        }
    }

    pub fn max_chain_len(&self) -> Option<usize> {
        self.max_chain_len
    }

    pub fn set_max_chain_len(&mut self, cap: Option<usize>) {
        self.max_chain_len = cap;
    }

    pub fn winding_overrides(&self) -> &[WindingOverride] {
        &self.winding_overrides
    }

    /// Sets (or replaces) the cap for one chain owner and hole.
    pub fn set_winding_override(&mut self, owner: ObjectId, hole: ObjectId, limit: u8) {
        assert!(limit >= 1, "winding limit must be positive");
        match self
            .winding_overrides
            .iter_mut()
            .find(|o| o.owner == owner && o.hole == hole)
        {
            Some(o) => o.limit = limit,
            None => self.winding_overrides.push(WindingOverride { owner, hole, limit }),
        }
    }

    pub fn winding_limit_for(&self, owner: ObjectId, hole: ObjectId) -> u8 {
        self.winding_overrides
            .iter()
            .find(|o| o.owner == owner && o.hole == hole)
            .map_or(self.winding_limit, |o| o.limit)
    }

    pub fn goal_hole(&self) -> ObjectId {
        self.goal_hole
    }

    pub fn initial(&self) -> &PuzzleState {
        &self.initial
    }

    pub(crate) fn chain_slot(&self, owner: ObjectId) -> Option<usize> {
        self.longs.iter().position(|&l| l == owner)
    }
}

/// Incremental construction of a spec; used by the built-in puzzle table.
pub(crate) struct SpecBuilder {
    objects: Vec<ObjectDef>,
    attachments: Vec<Option<(ObjectId, End)>>,
    hole_location: Vec<Option<HoleLocation>>,
}

impl SpecBuilder {
    pub fn new() -> Self {
        SpecBuilder {
            objects: Vec::new(),
            attachments: Vec::new(),
            hole_location: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, class: ObjectClass, label: Option<&str>) -> ObjectId {
        assert!(
            self.objects.iter().all(|o| o.name != name),
            "duplicate object {name}"
        );
        let id = ObjectId(self.objects.len() as u8);
        self.objects.push(ObjectDef {
            name: name.to_string(),
            class,
            label: label.map(str::to_string),
        });
        self.attachments.push(None);
        self.hole_location.push(None);
        id
    }

    pub fn long(&mut self, name: &str) -> ObjectId {
        self.push(name, ObjectClass::Long, None)
    }

    pub fn regular(&mut self, name: &str, on: ObjectId, end: End) -> ObjectId {
        let id = self.push(name, ObjectClass::Regular, None);
        self.attachments[id.index()] = Some((on, end));
        id
    }

    pub fn holed(&mut self, name: &str, label: Option<&str>, location: HoleLocation) -> ObjectId {
        let id = self.push(name, ObjectClass::Holed, label);
        self.hole_location[id.index()] = Some(location);
        id
    }

    #[allow(clippy::too_many_arguments)]
    pub fn finish(
        self,
        puzzle: Puzzle,
        variant: Variant,
        crossers: Vec<ObjectId>,
        hosts: Vec<ObjectId>,
        no_fit: &[(ObjectId, ObjectId)],
        forbidden_pairs: Vec<(ObjectId, ObjectId)>,
        winding_limit: u8,
        winding_overrides: Vec<WindingOverride>,
        goal_hole: ObjectId,
        initial: &str,
    ) -> Result<PuzzleSpec, PuzzleError> {
        let n = self.objects.len();
        let mut fits = vec![true; n * n];
        for i in 0..n {
            fits[i * n + i] = false;
        }
        for &(ce, he) in no_fit {
            fits[ce.index() * n + he.index()] = false;
        }
        let mut longs: Vec<ObjectId> = (0..n)
            .filter(|&i| self.objects[i].class == ObjectClass::Long)
            .map(|i| ObjectId(i as u8))
            .collect();
        longs.sort_by(|a, b| self.objects[a.index()].name.cmp(&self.objects[b.index()].name));
        let mut spec = PuzzleSpec {
            puzzle,
            variant,
            objects: self.objects,
            crossers,
            hosts,
            attachments: self.attachments,
            hole_location: self.hole_location,
            fits,
            forbidden_pairs,
            winding_limit,
            max_chain_len: None,
            winding_overrides,
            goal_hole,
            longs,
            initial: PuzzleState::empty(0),
        };
        spec.initial = spec.parse_state(initial)?;
        Ok(spec)
    }
}
