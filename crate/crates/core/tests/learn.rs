use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tangle_core::asp::{ActionAtom, StateAtom};
use tangle_core::env::EnvConfig;
use tangle_core::learn::*;
use tangle_core::puzzle::*;
use tangle_core::{Agent64, EnvConfig64, Environment64, LearnerConfig64, QTable32, QTable64};

fn key(text: &str) -> CanonicalKey {
    CanonicalKey::from_canonical(text)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn table(values: &[(usize, f64)]) -> (QTable64, RowId) {
    let mut q = QTable64::new(4);
    let row = q.intern(&key("s"));
    for &(a, v) in values {
        q.set(row, a, v);
    }
    (q, row)
}

#[test]
fn epsilon_schedule() {
    let c = LearnerConfig64::default();
    let cases = [
        (1, 0.1),
        (3999, 0.1),
        (4000, 0.1),
        (4249, 0.1),
        (4250, 0.09),
        (4500, 0.08),
        (5500, 0.04),
        (5750, 0.03),
        (6000, 0.03),
    ];
    for (ep, want) in cases {
        assert!((c.epsilon_at(ep) - want).abs() < 1e-12, "episode {ep}");
    }
}

#[test]
fn q_update_examples() {
    assert_eq!(q_target(0.0f64, 1000.0, 0.0, 0.2, 0.9), 200.0);
    assert!((q_target(10.0f64, -1.0, 20.0, 0.2, 0.9) - 11.4).abs() < 1e-12);
    assert!((q_target(5.0f64, -1.0, 5.0, 0.2, 0.9) - 4.7).abs() < 1e-12);
}

#[test]
fn q_update_matches_direct_formula() {
    let mut r = rng(1);
    for _ in 0..10_000 {
        let q: f64 = r.gen_range(-1000.0..1000.0);
        let reward = [-100.0, -1.0, 1000.0][r.gen_range(0..3)];
        let m: f64 = r.gen_range(-1000.0..1000.0);
        let alpha: f64 = r.gen_range(0.01..=1.0);
        let gamma: f64 = r.gen_range(0.0..0.99);
        let direct = (1.0 - alpha) * q + alpha * reward + alpha * gamma * m;
        let got = q_target(q, reward, m, alpha, gamma);
        assert!((got - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{got} {direct}");
    }
}

#[test]
fn heuristic_examples() {
    let all = [0, 1, 2, 3];
    let (q, row) = table(&[(1, 5.0), (2, 4.0)]);
    assert_eq!(heuristic_h(&q, Some(row), &all, Some(2), 2, 0.25), 1.25);
    assert_eq!(heuristic_h(&q, Some(row), &all, Some(2), 1, 0.25), 0.0);
    assert_eq!(heuristic_h(&q, Some(row), &all, None, 2, 0.25), 0.0);
    let (fresh, row) = table(&[]);
    assert_eq!(heuristic_h(&fresh, Some(row), &all, Some(3), 3, 0.25), 0.25);
    assert_eq!(heuristic_h(&fresh, None, &all, Some(3), 3, 0.25), 0.25);
}

#[test]
fn select_action_examples() {
    let c = LearnerConfig64::default();
    let all = [0, 1, 2, 3];
    let (q, row) = table(&[(0, 0.0), (1, 5.0), (2, 4.0), (3, 0.0)]);
    let mut r = rng(3);
    assert_eq!(select_action(&q, Some(row), &all, 0.0, Some(2), &c, &mut r), 2);
    assert_eq!(select_action(&q, Some(row), &all, 0.0, None, &c, &mut r), 1);
    // an unfiltered argmax outside the admissible set is never picked
    assert_eq!(select_action(&q, Some(row), &[0, 2, 3], 0.0, None, &c, &mut r), 2);
}

#[test]
fn ties_are_uniform() {
    let c = LearnerConfig64::default();
    let (q, row) = table(&[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)]);
    let mut r = rng(4);
    let mut counts = [0usize; 4];
    let n = 40_000;
    for _ in 0..n {
        counts[select_action(&q, Some(row), &[0, 1, 2, 3], 0.0, None, &c, &mut r)] += 1;
    }
    for c in counts {
        assert!((c as f64 / n as f64 - 0.25).abs() < 0.01, "{counts:?}");
    }
}

#[test]
fn exploration_rate_is_respected() {
    let c = LearnerConfig64::default();
    let (q, row) = table(&[(0, 9.0), (1, 0.0), (2, 0.0), (3, 0.0)]);
    let mut r = rng(8);
    let n = 40_000;
    let greedy = (0..n)
        .filter(|_| select_action(&q, Some(row), &[0, 1, 2, 3], 0.1, None, &c, &mut r) == 0)
        .count();
    // 0.9 greedy plus a quarter of the random draws
    assert!((greedy as f64 / n as f64 - 0.925).abs() < 0.01);
}

#[test]
fn zero_weight_heuristic_keeps_argmax() {
    let mut c = LearnerConfig64::default();
    c.xi = 0.0;
    let mut r = rng(5);
    for _ in 0..2000 {
        let mut q = QTable64::new(6);
        let row = q.intern(&key("s"));
        for a in 0..6 {
            q.set(row, a, r.gen_range(-3..3) as f64);
        }
        let best = q.max_value(row).unwrap();
        let suggested = Some(r.gen_range(0..6));
        let mut rs = rng(r.gen());
        let pick = select_action(&q, Some(row), &[0, 1, 2, 3, 4, 5], 0.0, suggested, &c, &mut rs);
        assert_eq!(q.get(row, pick), Some(best));
    }
}

#[test]
fn trace_mapper_examples() {
    let source = build_spec_named("ropeladder", "simplified").unwrap();
    let target = build_spec_named("ropeladder", "original").unwrap();
    let mut m = TraceMapper::new(source.clone(), &target);
    let source_start = source.canonical_key(source.initial());
    assert_eq!(m.replay(&[]), Some(source_start.clone()));
    let t0 = target.canonical_key(target.initial());
    assert_eq!(m.map(&t0), Some(source_start.clone()));

    let actions = target.enumerate_actions();
    let blocked = (0..actions.len())
        .find(|&a| {
            let sa = source.parse_action(&target.format_action(actions[a])).unwrap();
            source.apply(source.initial(), sa).moved().is_none()
        })
        .expect("an action that fails in the source");
    assert_eq!(m.replay(&[blocked]), None);

    // memoized: the first answer for a target key sticks
    m.observe(blocked);
    assert_eq!(m.map(&t0), Some(source_start));
    let t1 = key("somewhere-else");
    assert_eq!(m.map(&t1), None);
    m.reset();
    assert_eq!(m.map(&t1), None);
    assert!(m.trace().is_empty());

    let mut id = StateMapper::Identity;
    assert_eq!(id.map(&t0), Some(t0.clone()));
}

#[test]
fn heuristic_source_suggests_source_argmax() {
    let spec = build_spec_named("fishermans", "original").unwrap();
    let s0 = spec.canonical_key(spec.initial());
    let mut q = QTable64::new(20);
    let row = q.intern(&s0);
    q.set(row, 3, 2.0);
    q.set(row, 7, 9.0);
    q.set(row, 9, 9.0);
    let mut h = HeuristicSource::new(q, StateMapper::Identity);
    assert_eq!(h.suggest(&s0), Some(7));
    assert_eq!(h.suggest(&key("unknown")), None);
}

#[test]
fn snapshot_round_trip() {
    let spec = build_spec_named("fishermans", "simplified").unwrap();
    let agent = trained(AlgorithmKind::Oasp, &spec, 40, 17);
    let text = agent.qtable().to_snapshot(&spec);
    assert!(text.starts_with("# puzzle=fishermans variant=simplified\n"));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), agent.qtable().entry_count());
    let back = QTable64::from_snapshot(&spec, &text).unwrap();
    assert_eq!(back.to_snapshot(&spec), text);
    // values survive bit for bit
    for line in rows {
        let cols: Vec<&str> = line.split('\t').collect();
        let a = spec.enumerate_actions().iter().position(|&x| Some(x) == spec.parse_action(cols[1])).unwrap();
        let want = agent.qtable().get_by_key(&key(cols[0]), a).unwrap();
        assert_eq!(back.get_by_key(&key(cols[0]), a).unwrap().to_bits(), want.to_bits());
    }
    // the same file reads into a narrower scalar too
    let narrow = QTable32::from_snapshot(&spec, &text).unwrap();
    assert_eq!(narrow.entry_count(), back.entry_count());

    assert!(matches!(
        QTable64::from_snapshot(&spec, "x\tpass(Nope,Ring,+)\t1\n"),
        Err(LearnError::Snapshot { line: 1, .. })
    ));
    assert!(QTable64::from_snapshot(&spec, "x\tpass(Post,Ring,+)\tNaN\n").is_err());
}

fn env(spec: &PuzzleSpec, seed: u64) -> Environment64 {
    let mut r = rng(seed);
    r.set_stream(1);
    Environment64::new(EnvConfig64::for_spec(spec.clone()), r)
}

fn trained(kind: AlgorithmKind, spec: &PuzzleSpec, episodes: usize, seed: u64) -> Agent64 {
    let mut agent = Agent64::new(kind, LearnerConfig64::default(), spec, None, rng(seed));
    let mut e = env(spec, seed);
    let mut last = 0;
    for ep in 1..=episodes {
        let m = agent.run_episode(&mut e, ep);
        assert!(m.visited_states >= last, "visited count went down");
        assert!(m.steps >= 1 && m.steps <= 500);
        last = m.visited_states;
    }
    agent
}

#[test]
fn program_learner_never_keeps_constrained_entries() {
    let spec = build_spec_named("fishermans", "simplified").unwrap();
    let agent = trained(AlgorithmKind::Oasp, &spec, 60, 21);
    let p = agent.program().unwrap();
    let q = agent.qtable();
    assert!(!p.global_constraints().is_empty());
    let mut checked = 0;
    for prog in p.programs() {
        let k = p.registry().state_key(prog.state).unwrap();
        let Some(row) = q.row(k) else { continue };
        for a in 0..20 {
            if p.is_forbidden(prog.state, ActionAtom(a as u16)) {
                assert!(!q.has(row, a), "entry for constrained pair");
                checked += 1;
            }
        }
        // every entry comes from an answer set
        let answer: Vec<usize> = p
            .answer_sets(prog.state)
            .unwrap()
            .into_iter()
            .map(|(a, _)| a.0 as usize)
            .collect();
        for (a, _) in q.entries(row) {
            assert!(answer.contains(&a));
        }
        assert!(prog.rule_count() <= 20);
    }
    assert!(checked > 0);

    let ql = trained(AlgorithmKind::QLearning, &spec, 5, 21);
    let row = ql.qtable().row(&spec.canonical_key(spec.initial())).unwrap();
    let sphere = spec
        .enumerate_actions()
        .iter()
        .position(|&a| a == spec.parse_action("pass(Sphere1,PostHole1,+)").unwrap())
        .unwrap();
    assert!(ql.qtable().has(row, sphere), "plain learner keeps impossible pairs");
}

#[test]
fn global_constraint_from_size_violation() {
    let spec = build_spec_named("fishermans", "original").unwrap();
    let agent = trained(AlgorithmKind::Oasp, &spec, 30, 2);
    let p = agent.program().unwrap();
    let actions = spec.enumerate_actions();
    for a in p.global_constraints() {
        let act = actions[a.0 as usize];
        assert!(!spec.fits(act.ce, act.he), "{}", spec.format_action(act));
    }
    for prog in p.programs() {
        for c in prog.constraints() {
            let act = actions[c.action.0 as usize];
            assert!(spec.fits(act.ce, act.he));
        }
    }
}

#[test]
fn first_action_is_uniform() {
    let spec = build_spec_named("fishermans", "original").unwrap();
    let mut counts = vec![0usize; 20];
    let n = 4000;
    for seed in 0..n {
        let mut agent = Agent64::new(AlgorithmKind::Oasp, LearnerConfig64::default(), &spec, None, rng(seed));
        let mut cfg: EnvConfig<f64> = EnvConfig64::for_spec(spec.clone());
        cfg.max_steps = 1;
        let mut e = Environment64::new(cfg, rng(seed));
        agent.run_episode(&mut e, 1);
        let p = agent.program().unwrap();
        let s0 = p.program(StateAtom(0)).unwrap();
        let mut acts: Vec<u16> = s0.rules().map(|r| r.action.0).collect();
        acts.extend(s0.constraints().map(|c| c.action.0));
        acts.extend(p.global_constraints().iter().map(|a| a.0));
        assert_eq!(acts.len(), 1);
        counts[acts[0] as usize] += 1;
    }
    let expected = n as f64 / 20.0;
    for c in counts {
        assert!((c as f64 - expected).abs() < 0.25 * expected, "{c}");
    }
}

#[test]
fn switch_reinitializes_plain_learner_only() {
    let spec = build_spec_named("fishermans", "nonstationary-disk").unwrap();
    for kind in [AlgorithmKind::QLearning, AlgorithmKind::Oasp] {
        let mut agent = Agent64::new(kind, LearnerConfig64::default(), &spec, None, rng(1));
        let mut e = Environment64::new(EnvConfig64::for_spec(spec.clone()).with_switch_after(20), rng(1));
        for ep in 1..=20 {
            e.schedule_tick(ep);
            agent.run_episode(&mut e, ep);
        }
        let entries = agent.qtable().entry_count();
        let visited = agent.qtable().visited_count();
        let before = agent.qtable().to_snapshot(&spec);
        assert!(e.schedule_tick(21));
        agent.on_switch();
        let q = agent.qtable();
        assert_eq!(q.entry_count(), entries);
        assert_eq!(q.visited_count(), visited);
        let after = q.to_snapshot(&spec);
        match kind {
            AlgorithmKind::QLearning => {
                assert!(after.lines().skip(1).all(|l| l.ends_with("\t0")));
                assert_ne!(before, after);
            }
            _ => assert_eq!(before, after),
        }
    }
}

#[test]
#[should_panic(expected = "needs a heuristic")]
fn heuristic_learner_requires_source() {
    let spec = build_spec_named("fishermans", "original").unwrap();
    Agent64::new(AlgorithmKind::Hoasp, LearnerConfig64::default(), &spec, None, rng(0));
}

#[test]
fn identity_heuristic_follows_source_policy() {
    // a source that is simply the optimal plan, encoded as a table
    let spec = build_spec_named("fishermans", "original").unwrap();
    let plan = spec.bfs_solve(10).unwrap().plan;
    let actions = spec.enumerate_actions();
    let mut src = QTable64::new(actions.len());
    let mut s = spec.initial().clone();
    for &a in &plan.actions {
        let row = src.intern(&spec.canonical_key(&s));
        src.set(row, actions.iter().position(|&x| x == a).unwrap(), 1.0);
        s = spec.apply(&s, a).moved().unwrap();
    }
    let h = HeuristicSource::new(src, StateMapper::Identity);
    let mut agent = Agent64::new(AlgorithmKind::Haql, LearnerConfig64::default(), &spec, Some(h), rng(6));
    let mut e = env(&spec, 6);
    let mut steps: Vec<usize> = (1..=30).map(|ep| agent.run_episode(&mut e, ep).steps).collect();
    steps.sort();
    // exploration can leave the source's states, but a typical episode follows the plan
    assert!(steps[15] <= plan.len() + 1, "{steps:?}");
    assert_eq!(agent.greedy_rollout(&spec, 500), Some(plan.len()));
}

#[test]
fn greedy_rollout_follows_argmax() {
    let spec = build_spec_named("fishermans", "original").unwrap();
    let empty = QTable64::new(20);
    assert_eq!(greedy_rollout(&empty, &spec, 500), None);
    let plan = spec.bfs_solve(10).unwrap().plan;
    let actions = spec.enumerate_actions();
    let mut q = QTable64::new(20);
    let mut s = spec.initial().clone();
    for &a in &plan.actions {
        let row = q.intern(&spec.canonical_key(&s));
        for b in 0..20 {
            q.set(row, b, 0.0);
        }
        q.set(row, actions.iter().position(|&x| x == a).unwrap(), 5.0);
        s = spec.apply(&s, a).moved().unwrap();
    }
    assert_eq!(greedy_rollout(&q, &spec, 500), Some(plan.len()));
    assert_eq!(greedy_rollout(&q, &spec, plan.len() - 1), None);
}
