//! Shared helpers for the integration tests: seeded random generators for
//! formulas, requirements and traces, and an independent reference
//! evaluator for lassos.

#![allow(dead_code)]

use fret2mtl::fretish::{BoolExpr, Condition, Requirement, Scope, Timing};
use fret2mtl::mtl::{Interval, MtlFormula};
use fret2mtl::traces::{LassoTrace, State, Trace};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {path}: {e}"))
}

/// The formula body of a fixture file (comment lines stripped).
pub fn fixture_formula(name: &str) -> MtlFormula {
    let text = fixture(name);
    let body: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    fret2mtl::parse_formula(&body.join(" ")).expect("fixture parses")
}

pub struct GenOptions {
    pub allow_future: bool,
    pub allow_past: bool,
    pub allow_last: bool,
    pub max_bound: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { allow_future: true, allow_past: true, allow_last: true, max_bound: 3 }
    }
}

pub fn random_formula(
    rng: &mut ChaCha8Rng,
    depth: usize,
    props: &[&str],
    opts: &GenOptions,
) -> MtlFormula {
    use MtlFormula as F;
    let leaf = |rng: &mut ChaCha8Rng| {
        let n = props.len() + if opts.allow_last { 2 } else { 1 };
        match rng.gen_range(0..n + 1) {
            0 => F::True,
            1 => F::False,
            i if i - 2 < props.len() => F::atom(props[i - 2]),
            _ => {
                if opts.allow_last {
                    F::Last
                } else {
                    F::atom(props[0])
                }
            }
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let interval = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            Interval::Unbounded
        } else {
            let lo = rng.gen_range(0..=opts.max_bound);
            Interval::bounded(lo, lo + rng.gen_range(0..=opts.max_bound))
        }
    };
    let mut choices: Vec<u8> = vec![0, 0, 1, 2, 3, 4, 15];
    if opts.allow_past {
        choices.extend([5, 6, 7, 8, 9]);
    }
    if opts.allow_future {
        choices.extend([10, 11, 12, 13, 14]);
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula(rng, depth - 1, props, opts);
    match choices[rng.gen_range(0..choices.len())] {
        0 => leaf(rng),
        1 => sub(rng).not(),
        2 => sub(rng).and(sub(rng)),
        3 => sub(rng).or(sub(rng)),
        4 => sub(rng).implies(sub(rng)),
        15 => sub(rng).iff(sub(rng)),
        5 => sub(rng).yesterday(),
        6 => sub(rng).weak_yesterday(),
        7 => F::once(interval(rng), sub(rng)),
        8 => F::historically(interval(rng), sub(rng)),
        9 => F::since(interval(rng), sub(rng), sub(rng)),
        10 => sub(rng).next(),
        11 => F::eventually(interval(rng), sub(rng)),
        12 => F::globally(interval(rng), sub(rng)),
        13 => F::until(interval(rng), sub(rng), sub(rng)),
        _ => F::release(interval(rng), sub(rng), sub(rng)),
    }
}

pub fn random_state(rng: &mut ChaCha8Rng, props: &[&str]) -> State {
    props.iter().filter(|_| rng.gen_bool(0.5)).map(|p| p.to_string()).collect()
}

pub fn random_trace(rng: &mut ChaCha8Rng, props: &[&str], max_len: usize) -> Trace {
    let len = rng.gen_range(1..=max_len);
    Trace::new((0..len).map(|_| random_state(rng, props)).collect())
}

pub fn random_lasso(
    rng: &mut ChaCha8Rng,
    props: &[&str],
    max_prefix: usize,
    max_loop: usize,
) -> LassoTrace {
    let prefix_len = rng.gen_range(0..=max_prefix);
    let cycle_len = rng.gen_range(1..=max_loop);
    LassoTrace::new(
        (0..prefix_len).map(|_| random_state(rng, props)).collect(),
        (0..cycle_len).map(|_| random_state(rng, props)).collect(),
    )
}

pub fn random_boolexpr(rng: &mut ChaCha8Rng, depth: usize, atoms: &[&str]) -> BoolExpr {
    if depth == 0 || rng.gen_bool(0.4) {
        return BoolExpr::atom(atoms[rng.gen_range(0..atoms.len())]);
    }
    match rng.gen_range(0..3) {
        0 => random_boolexpr(rng, depth - 1, atoms).not(),
        1 => random_boolexpr(rng, depth - 1, atoms).and(random_boolexpr(rng, depth - 1, atoms)),
        _ => random_boolexpr(rng, depth - 1, atoms).or(random_boolexpr(rng, depth - 1, atoms)),
    }
}

pub fn random_requirement(rng: &mut ChaCha8Rng) -> Requirement {
    let atoms = ["alpha", "beta_2", "Gamma", "x_le_10"];
    let mode = ["ModeA", "landing", "m1"][rng.gen_range(0..3)].to_string();
    let scope = match rng.gen_range(0..8) {
        0 => Scope::Global,
        1 => Scope::In(mode),
        2 => Scope::NotIn(mode),
        3 => Scope::OnlyIn(mode),
        4 => Scope::Before(mode),
        5 => Scope::OnlyBefore(mode),
        6 => Scope::After(mode),
        _ => Scope::OnlyAfter(mode),
    };
    let condition = match rng.gen_range(0..3) {
        0 => Condition::None,
        1 => Condition::Trigger(random_boolexpr(rng, 2, &atoms)),
        _ => Condition::Continual(random_boolexpr(rng, 2, &atoms)),
    };
    let k = rng.gen_range(1..=4);
    let timing = match rng.gen_range(0..10) {
        0 => Timing::Immediately,
        1 => Timing::Eventually,
        2 => Timing::Next,
        3 => Timing::Always,
        4 => Timing::Never,
        5 => Timing::Within(k),
        6 => Timing::For(k),
        7 => Timing::After(k),
        8 => Timing::Until(random_boolexpr(rng, 2, &atoms)),
        _ => Timing::Before(random_boolexpr(rng, 2, &atoms)),
    };
    Requirement {
        scope,
        condition,
        component: ["MyComponent", "the_sys", "Pump3"][rng.gen_range(0..3)].to_string(),
        timing,
        response: random_boolexpr(rng, 2, &atoms),
    }
}

/// How far into the past a formula can look: positions earlier than
/// `t - horizon` can no longer influence the value at `t` through past
/// operators. Unbounded past operators scan everything, which on a lasso
/// stabilizes within one loop round; they are charged one round each.
pub fn past_reach(f: &MtlFormula, cycle_len: usize) -> usize {
    use MtlFormula::*;
    let kids: Vec<&MtlFormula> = match f {
        Atom(_) | Last | True | False => vec![],
        Not(a) | Yesterday(a) | WeakYesterday(a) | Next(a) | Once(_, a) | Historically(_, a)
        | Eventually(_, a) | Globally(_, a) => vec![a],
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Since(_, a, b) | Until(_, a, b)
        | Release(_, a, b) => vec![a, b],
    };
    let inner = kids.into_iter().map(|k| past_reach(k, cycle_len)).max().unwrap_or(0);
    let own = match f {
        Yesterday(_) | WeakYesterday(_) => 1,
        Once(i, _) | Historically(i, _) | Since(i, ..) => match i {
            Interval::Bounded(_, hi) => *hi,
            Interval::Unbounded => cycle_len,
        },
        _ => 0,
    };
    inner + own
}

/// Independent reference evaluation on a lasso: straightforward recursion
/// over the infinite unrolling, with unbounded future quantifiers scanned up
/// to a horizon far past the point where truth values stabilize for the
/// sizes generated in these tests.
pub fn naive_eval_lasso(f: &MtlFormula, lasso: &LassoTrace, t: usize) -> bool {
    const HORIZON: usize = 160;
    fn holds(s: &State, name: &str) -> bool {
        s.contains(name)
    }
    fn go(f: &MtlFormula, lam: &LassoTrace, x: usize) -> bool {
        use MtlFormula::*;
        match f {
            True => true,
            False | Last => false,
            Atom(name) => holds(lam.state(x), name),
            Not(a) => !go(a, lam, x),
            And(a, b) => go(a, lam, x) && go(b, lam, x),
            Or(a, b) => go(a, lam, x) || go(b, lam, x),
            Implies(a, b) => !go(a, lam, x) || go(b, lam, x),
            Iff(a, b) => go(a, lam, x) == go(b, lam, x),
            Yesterday(a) => x > 0 && go(a, lam, x - 1),
            WeakYesterday(a) => x == 0 || go(a, lam, x - 1),
            Once(i, a) => (0..=x).any(|t0| i.contains(x - t0) && go(a, lam, t0)),
            Historically(i, a) => (0..=x).all(|t0| !i.contains(x - t0) || go(a, lam, t0)),
            Since(i, a, b) => (0..=x).any(|t0| {
                i.contains(x - t0) && go(b, lam, t0) && (t0 + 1..=x).all(|t1| go(a, lam, t1))
            }),
            Next(a) => go(a, lam, x + 1),
            Eventually(i, a) => {
                future_range(i, x).any(|t0| go(a, lam, t0))
            }
            Globally(i, a) => future_range(i, x).all(|t0| go(a, lam, t0)),
            Until(i, a, b) => future_range(i, x)
                .any(|t0| go(b, lam, t0) && (x..t0).all(|t1| go(a, lam, t1))),
            Release(i, a, b) => {
                future_range(i, x).all(|t0| go(b, lam, t0))
                    || future_range(i, x).any(|t0| {
                        go(a, lam, t0)
                            && (x..=t0).all(|t1| !i.contains(t1 - x) || go(b, lam, t1))
                    })
            }
        }
    }
    fn future_range(i: &Interval, x: usize) -> std::ops::RangeInclusive<usize> {
        match i {
            Interval::Bounded(lo, hi) => x + lo..=x + hi,
            Interval::Unbounded => x..=x + HORIZON,
        }
    }
    go(f, lasso, t)
}
