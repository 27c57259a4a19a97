use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tangle_core::asp::*;
use tangle_core::puzzle::CanonicalKey;
use tangle_core::QTable64;

fn registry(states: usize, actions: usize) -> GlobalProgram {
    let labels = (0..actions).map(|i| format!("act{i}")).collect();
    let mut gp = GlobalProgram::new(AtomRegistry::new(labels));
    for i in 0..states {
        gp.register(&CanonicalKey::from_canonical(&format!("state-{i}")));
    }
    gp
}

const S0: StateAtom = StateAtom(0);

fn a(i: u16) -> ActionAtom {
    ActionAtom(i)
}

fn s(i: u32) -> StateAtom {
    StateAtom(i)
}

#[test]
fn record_transition_builds_choice_heads() {
    let mut gp = registry(3, 4);
    gp.record_transition(S0, a(1), s(1));
    assert_eq!(gp.program(S0).unwrap().to_text(), "% s0\n1 {s1} 1 :- a1, s0.\n");
    gp.record_transition(S0, a(1), s(2));
    let text = gp.program(S0).unwrap().to_text();
    assert_eq!(text, "% s0\n1 {s1; s2} 1 :- a1, s0.\n");
    gp.record_transition(S0, a(1), s(1));
    assert_eq!(gp.program(S0).unwrap().to_text(), text);
    // heads stay sorted whatever the discovery order
    gp.record_transition(s(1), a(0), s(2));
    gp.record_transition(s(1), a(0), s(0));
    assert_eq!(gp.program(s(1)).unwrap().successors(a(0)), Some(&[s(0), s(2)][..]));
}

#[test]
fn record_forbidden_scopes() {
    let mut gp = registry(2, 8);
    gp.record_transition(S0, a(5), s(1));
    gp.record_forbidden(Scope::PerState(S0), a(5));
    let p = gp.program(S0).unwrap();
    assert_eq!(p.to_text(), "% s0\n:- a5, s0.\n");
    assert!(gp.answer_sets(S0).unwrap().is_empty());

    gp.record_transition(s(1), a(7), s(0));
    gp.record_forbidden(Scope::Global, a(7));
    assert!(gp.program(s(1)).unwrap().successors(a(7)).is_none());
    assert!(gp.is_forbidden(s(1), a(7)) && gp.is_forbidden(S0, a(7)));
    let dir = tempfile::tempdir().unwrap();
    gp.save(dir.path()).unwrap();
    let global = std::fs::read_to_string(dir.path().join("global.constraints")).unwrap();
    assert!(global.lines().any(|l| l == ":- a7."));
}

#[test]
#[should_panic(expected = "constrained")]
fn transition_on_constrained_pair_panics() {
    let mut gp = registry(2, 3);
    gp.record_forbidden(Scope::PerState(S0), a(2));
    gp.record_transition(S0, a(2), s(1));
}

#[test]
fn answer_set_examples() {
    let mut gp = registry(4, 3);
    gp.record_transition(S0, a(1), s(1));
    gp.record_transition(S0, a(1), s(2));
    gp.record_transition(S0, a(2), s(3));
    assert_eq!(
        gp.answer_sets(S0).unwrap(),
        vec![(a(1), s(1)), (a(1), s(2)), (a(2), s(3))]
    );
    gp.record_forbidden(Scope::PerState(S0), a(1));
    assert_eq!(gp.answer_sets(S0).unwrap(), vec![(a(2), s(3))]);
    assert!(gp.answer_sets(s(3)).unwrap().is_empty());
    assert!(matches!(
        gp.answer_sets(s(9)),
        Err(AspError::UnregisteredState(9))
    ));
}

/// Stable models by brute force: with facts `a` and `s`, a candidate model
/// is any subset of the rule's head; it is stable when the cardinality
/// bounds hold and no constraint body is satisfied.
fn brute_force(
    heads: &[(ActionAtom, Vec<StateAtom>)],
    constrained: &BTreeSet<ActionAtom>,
    global: &BTreeSet<ActionAtom>,
) -> Vec<(ActionAtom, StateAtom)> {
    let mut out = Vec::new();
    for (act, head) in heads {
        if constrained.contains(act) || global.contains(act) {
            continue;
        }
        for mask in 0u32..(1 << head.len()) {
            if mask.count_ones() == 1 {
                let pick = head[mask.trailing_zeros() as usize];
                out.push((*act, pick));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn answer_sets_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let n_actions = rng.gen_range(1..=28u16);
        let mut p = StateProgram::new(S0);
        let mut heads = Vec::new();
        for act in 0..n_actions {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let mut head: Vec<StateAtom> = (0..rng.gen_range(1..=5))
                .map(|_| s(rng.gen_range(0..12)))
                .collect();
            for &h in &head {
                p.add_transition(a(act), h);
            }
            head.sort();
            head.dedup();
            heads.push((a(act), head));
        }
        let mut constrained = BTreeSet::new();
        for act in 0..n_actions {
            if rng.gen_bool(0.15) {
                p.add_constraint(a(act));
                constrained.insert(a(act));
            }
        }
        let global: BTreeSet<_> = (0..n_actions)
            .filter(|_| rng.gen_bool(0.1))
            .map(a)
            .collect();
        assert!(p.rule_count() <= 28);
        let mut got = p.answer_sets(&global);
        got.sort();
        assert_eq!(got, brute_force(&heads, &constrained, &global));
        // constraint semantics survive a print/parse cycle too
        let back = parse_program(&p.to_text()).unwrap();
        assert_eq!(back, p);
    }
}

#[test]
fn revision_is_permanent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut gp = registry(10, 20);
    let mut forbidden: Vec<(Option<StateAtom>, ActionAtom)> = Vec::new();
    for _ in 0..2000 {
        let st = s(rng.gen_range(0..10));
        let act = a(rng.gen_range(0..20));
        if rng.gen_bool(0.05) {
            let scope = if rng.gen_bool(0.3) {
                Scope::Global
            } else {
                Scope::PerState(st)
            };
            gp.record_forbidden(scope, act);
            forbidden.push((matches!(scope, Scope::PerState(_)).then_some(st), act));
        } else if !gp.is_forbidden(st, act) {
            gp.record_transition(st, act, s(rng.gen_range(0..10)));
        }
        for &(scope, act) in &forbidden {
            for i in 0..10 {
                if scope.is_none() || scope == Some(s(i)) {
                    assert!(gp.answer_sets(s(i)).unwrap().iter().all(|(x, _)| *x != act));
                }
            }
        }
    }
}

#[test]
fn printed_text_format() {
    let labels = vec!["pass(A,B,+)".to_string(), "pass(A,B,-)".to_string()];
    let mut gp = GlobalProgram::new(AtomRegistry::new(labels));
    let s0 = gp.register(&CanonicalKey::from_canonical("chain(X)=[]"));
    let s1 = gp.register(&CanonicalKey::from_canonical("chain(X)=[+B]"));
    gp.record_transition(s0, a(0), s1);
    gp.record_forbidden(Scope::PerState(s0), a(1));
    assert_eq!(
        gp.print_program(s0).unwrap(),
        "% s0 chain(X)=[]\n% a0 pass(A,B,+)\n1 {s1} 1 :- a0, s0.\n% a1 pass(A,B,-)\n:- a1, s0.\n"
    );
    let parsed = parse_program(&gp.print_program(s0).unwrap()).unwrap();
    assert_eq!(&parsed, gp.program(s0).unwrap());
    gp.check_atoms(&parsed).unwrap();
}

#[test]
fn parse_errors() {
    let err = parse_program("% s0\n1 {s1 s2} 1 :- a0, s0.\n").unwrap_err();
    assert!(matches!(err, AspError::Parse { line: 2, .. }), "{err}");
    assert!(parse_program("% s0\n1 {s1} 1 :- a0, s3.\n").is_err());
    assert!(parse_program("% s0\n1 {s1} 1 :- a0, s0.\n:- a0, s0.\n").is_err());
    assert!(parse_program("% s0\n:- a0.\n").is_err());
    assert_eq!(
        parse_global("% global\n:- a3.\n:- a1.\n").unwrap(),
        [a(1), a(3)].into_iter().collect()
    );
    let gp = registry(2, 2);
    let p = parse_program("% s0\n1 {s7} 1 :- a0, s0.\n").unwrap();
    assert!(matches!(gp.check_atoms(&p), Err(AspError::UnknownAtom(_))));
}

#[test]
fn save_and_load_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut gp = registry(30, 20);
    for _ in 0..400 {
        let st = s(rng.gen_range(0..30));
        let act = a(rng.gen_range(0..20));
        if rng.gen_bool(0.1) {
            gp.record_forbidden(
                if rng.gen_bool(0.2) { Scope::Global } else { Scope::PerState(st) },
                act,
            );
        } else if !gp.is_forbidden(st, act) {
            gp.record_transition(st, act, s(rng.gen_range(0..30)));
        }
    }
    let dir = tempfile::tempdir().unwrap();
    gp.save(dir.path()).unwrap();
    for f in ["s0.rules", "s0.constraints", "s29.rules", "global.constraints", "atoms.tsv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let atoms = std::fs::read_to_string(dir.path().join("atoms.tsv")).unwrap();
    assert!(atoms.starts_with("kind\tindex\tlabel\n"));
    assert_eq!(GlobalProgram::load(dir.path()).unwrap(), gp);
}

#[test]
fn seed_q_rows_respects_constraints_and_values() {
    let mut gp = registry(4, 5);
    gp.record_transition(S0, a(0), s(1));
    gp.record_transition(S0, a(2), s(2));
    gp.record_transition(S0, a(4), s(3));
    let mut q = QTable64::new(5);
    gp.seed_q_rows(S0, &mut q).unwrap();
    let key = gp.registry().state_key(S0).unwrap().clone();
    let row = q.row(&key).unwrap();
    assert_eq!(q.entries(row).count(), 3);

    q.set(row, 2, 7.5);
    gp.record_forbidden(Scope::Global, a(4));
    gp.record_transition(S0, a(1), s(1));
    gp.seed_q_rows(S0, &mut q).unwrap();
    assert_eq!(q.get(row, 2), Some(7.5));
    assert!(q.has(row, 1));
    // the agent drops constrained entries itself; seeding never adds them
    q.remove(row, 4);
    gp.seed_q_rows(S0, &mut q).unwrap();
    assert!(!q.has(row, 4));
}
