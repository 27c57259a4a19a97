use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tangle_core::env::*;
use tangle_core::puzzle::*;
use tangle_core::{EnvConfig64, Environment64};

fn env_for(puzzle: &str, variant: &str, seed: u64) -> Environment64 {
    let spec = build_spec_named(puzzle, variant).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    Environment64::new(EnvConfig64::for_spec(spec), rng)
}

fn act(spec: &PuzzleSpec, text: &str) -> ActionTriple {
    spec.parse_action(text).unwrap()
}

#[test]
fn reset_returns_initial_state() {
    for (p, v) in [("fishermans", "original"), ("ropeladder", "original")] {
        let mut env = env_for(p, v, 1);
        let spec = env.spec().clone();
        let a = spec.enumerate_actions()[3];
        env.step(a);
        let first = spec.canonical_key(env.reset());
        assert_eq!(env.steps(), 0);
        let second = spec.canonical_key(env.reset());
        assert_eq!(first, second);
        assert_eq!(first, spec.canonical_key(spec.initial()));
    }
}

#[test]
fn perturb_thresholds() {
    let spec = build_spec_named("fishermans", "original").unwrap();
    let a = act(&spec, "pass(Disk1,PostHole1,-)");
    let noisy = Determinism::noisy();
    assert_eq!(perturb(a, noisy, 0.42), Realized::Action(a));
    assert_eq!(perturb(a, noisy, 0.85), Realized::Action(a.inverse()));
    assert_eq!(perturb(a, noisy, 0.95), Realized::NoOp);
    assert_eq!(perturb(a, noisy, 0.0), Realized::Action(a));
    assert_eq!(perturb(a, noisy, 0.8), Realized::Action(a.inverse()));
    assert_eq!(perturb(a, noisy, 0.9), Realized::NoOp);
    assert_eq!(perturb(a, Determinism::Deterministic, 0.95), Realized::Action(a));
}

#[test]
fn perturb_frequencies() {
    let spec = build_spec_named("fishermans", "original").unwrap();
    let a = act(&spec, "pass(Disk1,PostHole1,-)");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 100_000;
    let mut counts = [0usize; 3];
    for _ in 0..n {
        match perturb(a, Determinism::noisy(), rng.gen::<f64>()) {
            Realized::Action(x) if x == a => counts[0] += 1,
            Realized::Action(_) => counts[1] += 1,
            Realized::NoOp => counts[2] += 1,
        }
    }
    for (c, p) in counts.iter().zip([0.8, 0.1, 0.1]) {
        let freq = *c as f64 / n as f64;
        assert!((freq - p).abs() < 0.01, "{freq} vs {p}");
    }
}

#[test]
fn step_rewards() {
    let mut env = env_for("fishermans", "original", 3);
    let spec = env.spec().clone();
    let out = env.step(act(&spec, "pass(Sphere1,PostHole1,+)"));
    assert_eq!(out.reward, -100.0);
    assert!(out.impossible && !out.terminal);
    assert_eq!(out.reason, Some(Impossibility::DoesNotFit));
    assert_eq!(&out.next_state, spec.initial());

    let out = env.step(act(&spec, "pass(Post,Ring,-)"));
    assert_eq!(out.reward, -1.0);
    assert!(!out.impossible && !out.terminal && !out.goal);

    // walk the optimal plan from the start
    env.reset();
    let plan = spec.bfs_solve(10).unwrap().plan;
    let mut last = None;
    for &a in &plan.actions {
        last = Some(env.step(a));
    }
    let last = last.unwrap();
    assert_eq!(last.reward, 1000.0);
    assert!(last.goal && last.terminal);
}

#[test]
#[should_panic(expected = "finished episode")]
fn stepping_a_finished_episode_panics() {
    let mut env = env_for("fishermans", "original", 3);
    let spec = env.spec().clone();
    let plan = spec.bfs_solve(10).unwrap().plan;
    for &a in &plan.actions {
        env.step(a);
    }
    env.step(plan.actions[0]);
}

#[test]
fn step_budget_and_reward_partition() {
    for (p, v) in [
        ("fishermans", "nondeterministic"),
        ("ropeladder", "nondeterministic"),
        ("fishermans", "simplified"),
    ] {
        let mut env = env_for(p, v, 11);
        let actions = env.spec().enumerate_actions();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            env.reset();
            let mut n = 0;
            loop {
                let out = env.step(actions[rng.gen_range(0..actions.len())]);
                n += 1;
                assert!([-100.0, -1.0, 1000.0].contains(&out.reward));
                assert_eq!(out.impossible, out.reward == -100.0);
                if out.terminal {
                    assert!(out.goal || n == 500);
                    break;
                }
            }
            assert!(n <= 500);
        }
    }
}

#[test]
fn noop_reward_is_configurable() {
    let spec = build_spec_named("fishermans", "nondeterministic").unwrap();
    let a = act(&spec, "pass(Post,Ring,-)");
    let mut cfg = EnvConfig64::for_spec(spec);
    cfg.noop_is_impossible = false;
    let mut env = Environment64::new(cfg, ChaCha8Rng::seed_from_u64(2));
    let mut seen = false;
    for _ in 0..200 {
        let out = env.step(a);
        if out.realized == Realized::NoOp {
            assert_eq!(out.reward, -1.0);
            seen = true;
            break;
        }
        env.reset();
    }
    assert!(seen);
}

#[test]
fn nonstationary_switch_happens_once() {
    let mut env = env_for("fishermans", "nonstationary-disk", 1);
    let (d1, d2, ring) = {
        let s = env.spec();
        (
            s.lookup("Disk1").unwrap(),
            s.lookup("Disk2").unwrap(),
            s.lookup("Ring").unwrap(),
        )
    };
    assert!(!env.schedule_tick(1999));
    assert!(env.spec().fits(d1, ring) && env.spec().fits(d2, ring));
    assert!(!env.schedule_tick(2000));
    assert!(env.schedule_tick(2001));
    assert!(!env.spec().fits(d1, ring) && !env.spec().fits(d2, ring));
    assert!(env.switched());
    assert!(!env.schedule_tick(2002));

    let mut plain = env_for("fishermans", "original", 1);
    let before = plain.spec().clone();
    for ep in [1, 2000, 2001, 5000] {
        assert!(!plain.schedule_tick(ep));
    }
    assert_eq!(plain.spec().fits(d1, ring), before.fits(d1, ring));
}

#[test]
fn custom_switch_episode() {
    let spec = build_spec_named("fishermans", "nonstationary-disk").unwrap();
    let mut env = Environment64::new(
        EnvConfig64::for_spec(spec).with_switch_after(10),
        ChaCha8Rng::seed_from_u64(0),
    );
    assert!(!env.schedule_tick(10));
    assert!(env.schedule_tick(11));
}

#[test]
fn seeded_episodes_are_reproducible() {
    let run = || {
        let mut env = env_for("fishermans", "nondeterministic", 42);
        let actions = env.spec().enumerate_actions();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut trace = Vec::new();
        env.reset();
        loop {
            let out = env.step(actions[rng.gen_range(0..actions.len())]);
            trace.push((out.realized, out.reward.to_bits(), out.next_state.clone()));
            if out.terminal {
                break;
            }
        }
        trace
    };
    assert_eq!(run(), run());
}
