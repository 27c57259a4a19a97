//! The built-in puzzles and their variants.

use super::spec::{
    End, HoleLocation, ObjectId, Puzzle, PuzzleSpec, SpecBuilder, Variant, WindingOverride,
};
use super::PuzzleError;

/// Global cap on consecutive same-sign crossings used by every variant.
pub const DEFAULT_WINDING_LIMIT: u8 = 2;

/// Most crossings a single chain can hold, per built-in puzzle.
pub const DEFAULT_MAX_CHAIN_LEN: usize = 8;

/// The original ladder starts with eight crossings on the String already.
pub const ROPELADDER_MAX_CHAIN_LEN: usize = 11;

pub const FISHERMANS_INITIAL: &str = "chain(Post)=[+Ring];chain(String)=[+Sphere1,+Post,+Sphere2]";

pub const ROPELADDER_INITIAL: &str = "chain(Post1)=[+Ring];chain(Post2)=[+Ring];chain(String)=[+Sphere1,+Post1,+Ring,+Post2,+Post1,+Post2,-Ring,+Sphere2]";

pub const ROPELADDER_SIMPLIFIED_INITIAL: &str =
    "chain(Post1)=[+Ring];chain(Post2)=[+Ring];chain(String)=[+Sphere1,+Post1,+Ring,+Post2,-Ring,+Sphere2]";

pub fn build_spec(puzzle: Puzzle, variant: Variant) -> Result<PuzzleSpec, PuzzleError> {
    let mut spec = match puzzle {
        Puzzle::Fishermans => fishermans(variant)?,
        Puzzle::RopeLadder => ropeladder(variant)?,
    };
    let cap = match (puzzle, variant) {
        (Puzzle::RopeLadder, Variant::Simplified) | (Puzzle::Fishermans, _) => {
            DEFAULT_MAX_CHAIN_LEN
        }
        (Puzzle::RopeLadder, _) => ROPELADDER_MAX_CHAIN_LEN,
    };
    spec.set_max_chain_len(Some(cap));
    Ok(spec)
}

/// Parses both identifiers, then builds.
pub fn build_spec_named(puzzle: &str, variant: &str) -> Result<PuzzleSpec, PuzzleError> {
    build_spec(puzzle.parse()?, variant.parse()?)
}

fn fishermans(variant: Variant) -> Result<PuzzleSpec, PuzzleError> {
    let mut b = SpecBuilder::new();
    let string = b.long("String");
    let post = b.long("Post");
    let sphere1 = b.holed("Sphere1", None, HoleLocation::ThreadedOn(string));
    let sphere2 = b.holed("Sphere2", None, HoleLocation::ThreadedOn(string));
    let post_hole = b.holed("PostHole1", Some("Post"), HoleLocation::AtHeadOf(post));
    let ring = b.holed("Ring", None, HoleLocation::FreeStanding);
    let disk1 = b.regular("Disk1", string, End::Tail);
    let disk2 = b.regular("Disk2", string, End::Head);
    let base = b.regular("Base", post, End::Tail);

    let crossers = vec![sphere1, sphere2, post, disk1, disk2, ring];
    let hosts = vec![post_hole, ring];

    let mut no_fit = vec![(sphere1, post_hole), (sphere2, post_hole)];
    no_fit.extend([post_hole, ring, sphere1, sphere2].map(|h| (base, h)));
    match variant {
        Variant::NonStationaryDisk => no_fit.extend([(disk1, post_hole), (disk2, post_hole)]),
        _ => no_fit.extend([(disk1, ring), (disk2, ring)]),
    }

    let overrides = match variant {
        Variant::Simplified => vec![WindingOverride {
            owner: string,
            hole: post_hole,
            limit: 1,
        }],
        _ => vec![],
    };

    b.finish(
        Puzzle::Fishermans,
        variant,
        crossers,
        hosts,
        &no_fit,
        vec![],
        DEFAULT_WINDING_LIMIT,
        overrides,
        ring,
        FISHERMANS_INITIAL,
    )
}

fn ropeladder(variant: Variant) -> Result<PuzzleSpec, PuzzleError> {
    if variant == Variant::NonStationaryDisk {
        return Err(PuzzleError::InvalidCombination(
            "nonstationary-disk is only defined for fishermans".into(),
        ));
    }
    let mut b = SpecBuilder::new();
    let string = b.long("String");
    let post1 = b.long("Post1");
    let post2 = b.long("Post2");
    let sphere1 = b.holed("Sphere1", None, HoleLocation::ThreadedOn(string));
    let sphere2 = b.holed("Sphere2", None, HoleLocation::ThreadedOn(string));
    let hole1 = b.holed("PostHole1", Some("Post1"), HoleLocation::AtHeadOf(post1));
    let hole2 = b.holed("PostHole2", Some("Post2"), HoleLocation::AtHeadOf(post2));
    let ring = b.holed("Ring", None, HoleLocation::FreeStanding);
    let disk1 = b.regular("Disk1", string, End::Tail);
    let disk2 = b.regular("Disk2", string, End::Head);

    let crossers = vec![sphere1, sphere2, post1, post2, disk1, disk2, ring];
    let hosts = vec![hole1, hole2, ring];
    let no_fit: Vec<(ObjectId, ObjectId)> = vec![
        (sphere1, hole1),
        (sphere1, hole2),
        (sphere2, hole1),
        (sphere2, hole2),
        (disk1, ring),
        (disk2, ring),
    ];
    let forbidden = vec![(disk1, hole2), (disk2, hole1), (post1, hole2), (post2, hole1)];
    let overrides = [hole1, hole2]
        .map(|hole| WindingOverride {
            owner: string,
            hole,
            limit: 1,
        })
        .to_vec();
    let initial = match variant {
        Variant::Simplified => ROPELADDER_SIMPLIFIED_INITIAL,
        _ => ROPELADDER_INITIAL,
    };
    b.finish(
        Puzzle::RopeLadder,
        variant,
        crossers,
        hosts,
        &no_fit,
        forbidden,
        DEFAULT_WINDING_LIMIT,
        overrides,
        ring,
        initial,
    )
}

/// The Disk/Ring and Disk/PostHole fits that flip in the non-stationary
/// variant, as `(disk, hole, fits_after_switch)`.
pub fn nonstationary_switch(spec: &PuzzleSpec) -> Vec<(ObjectId, ObjectId, bool)> {
    let id = |n: &str| spec.lookup(n).expect("fishermans object");
    let mut out = Vec::new();
    for disk in ["Disk1", "Disk2"] {
        out.push((id(disk), id("Ring"), false));
        out.push((id(disk), id("PostHole1"), true));
    }
    out
}
