//! Finite and ultimately-periodic traces and the forcing relation over them.
//!
//! A [`Trace`] is a nonempty sequence of proposition sets. A [`LassoTrace`]
//! is a finite prefix plus a nonempty loop and denotes the infinite trace
//! `prefix · loop^ω`. [`eval`] decides satisfaction at a position of a
//! finite trace; [`eval_lasso`] decides exact satisfaction on the infinite
//! unrolling.

use crate::mtl::{Interval, MtlFormula};
use std::collections::BTreeSet;
use thiserror::Error;

pub type State = BTreeSet<String>;

/// A finite trace of positive length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    states: Vec<State>,
}

impl Trace {
    /// Panics if `states` is empty.
    pub fn new(states: Vec<State>) -> Self {
        assert!(!states.is_empty(), "a trace needs at least one position");
        Trace { states }
    }

    pub fn from_names<S: AsRef<str>>(states: &[&[S]]) -> Self {
        Trace::new(
            states
                .iter()
                .map(|s| s.iter().map(|p| p.as_ref().to_string()).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    fn holds(&self, name: &str, t: usize) -> bool {
        self.states[t].contains(name)
    }
}

/// An ultimately periodic trace: `prefix · cycle^ω`, cycle nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoTrace {
    prefix: Vec<State>,
    cycle: Vec<State>,
}

impl LassoTrace {
    /// Panics if `cycle` is empty.
    pub fn new(prefix: Vec<State>, cycle: Vec<State>) -> Self {
        assert!(!cycle.is_empty(), "a lasso needs a nonempty loop");
        LassoTrace { prefix, cycle }
    }

    pub fn prefix(&self) -> &[State] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[State] {
        &self.cycle
    }

    /// The state at an arbitrary position of the infinite unrolling.
    pub fn state(&self, t: usize) -> &State {
        if t < self.prefix.len() {
            &self.prefix[t]
        } else {
            &self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The lasso with the loop unrolled once into the prefix; denotes the
    /// same infinite trace.
    pub fn unrolled(&self) -> LassoTrace {
        let mut prefix = self.prefix.clone();
        prefix.extend(self.cycle.iter().cloned());
        LassoTrace { prefix, cycle: self.cycle.clone() }
    }
}

/// Either kind of trace, as read from or written to trace files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceData {
    Finite(Trace),
    Lasso(LassoTrace),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("position {t} out of range for trace of length {len}")]
pub struct EvalError {
    pub t: usize,
    pub len: usize,
}

/// Decides `ρ, t ⊩ f` on a finite trace.
///
/// `X` requires a successor position, `Y` a predecessor; `Z` is true at the
/// first position; `LAST` holds exactly at the final position. Bounded
/// operators restrict the witness offset to their interval.
pub fn eval(f: &MtlFormula, trace: &Trace, t: usize) -> Result<bool, EvalError> {
    if t >= trace.len() {
        return Err(EvalError { t, len: trace.len() });
    }
    Ok(eval_at(f, trace, t))
}

fn eval_at(f: &MtlFormula, trace: &Trace, t: usize) -> bool {
    use MtlFormula::*;
    let n = trace.len();
    match f {
        True => true,
        False => false,
        Atom(name) => trace.holds(name, t),
        Last => t == n - 1,
        Not(a) => !eval_at(a, trace, t),
        And(a, b) => eval_at(a, trace, t) && eval_at(b, trace, t),
        Or(a, b) => eval_at(a, trace, t) || eval_at(b, trace, t),
        Implies(a, b) => !eval_at(a, trace, t) || eval_at(b, trace, t),
        Iff(a, b) => eval_at(a, trace, t) == eval_at(b, trace, t),
        Yesterday(a) => t > 0 && eval_at(a, trace, t - 1),
        WeakYesterday(a) => t == 0 || eval_at(a, trace, t - 1),
        Once(i, a) => (0..=t).any(|t0| i.contains(t - t0) && eval_at(a, trace, t0)),
        Historically(i, a) => (0..=t).all(|t0| !i.contains(t - t0) || eval_at(a, trace, t0)),
        Since(i, a, b) => (0..=t).any(|t0| {
            i.contains(t - t0)
                && eval_at(b, trace, t0)
                && (t0 + 1..=t).all(|t1| eval_at(a, trace, t1))
        }),
        Next(a) => t + 1 < n && eval_at(a, trace, t + 1),
        Eventually(i, a) => (t..n).any(|t0| i.contains(t0 - t) && eval_at(a, trace, t0)),
        Globally(i, a) => (t..n).all(|t0| !i.contains(t0 - t) || eval_at(a, trace, t0)),
        Until(i, a, b) => (t..n).any(|t0| {
            i.contains(t0 - t)
                && eval_at(b, trace, t0)
                && (t..t0).all(|t1| eval_at(a, trace, t1))
        }),
        Release(i, a, b) => {
            (t..n).all(|t0| !i.contains(t0 - t) || eval_at(b, trace, t0))
                || (t..n).any(|t0| {
                    i.contains(t0 - t)
                        && eval_at(a, trace, t0)
                        && (t..=t0).all(|t1| !i.contains(t1 - t) || eval_at(b, trace, t1))
                })
        }
    }
}

/// `ρ ⊨ f`: satisfaction at every position of a finite trace.
pub fn holds_globally(f: &MtlFormula, trace: &Trace) -> bool {
    (0..trace.len()).all(|t| eval_at(f, trace, t))
}

/// Decides satisfaction at position `t` of the infinite trace denoted by a
/// lasso. `t` is unrestricted; `LAST` is identically false.
///
/// Satisfaction of every subformula is ultimately periodic along the
/// unrolling, so the evaluation tabulates a finite window (prefix, the
/// formula's past horizon, and two loop rounds) and resolves positions
/// beyond it through the loop period.
pub fn eval_lasso(f: &MtlFormula, lasso: &LassoTrace, t: usize) -> bool {
    let table = LassoTable::build(f, lasso);
    table.root[table.reduce(t)]
}

/// Stable-onset bound: from position `prefix_len + past_horizon` on, every
/// subformula's truth value repeats with the loop period.
fn past_horizon(f: &MtlFormula, cycle_len: usize) -> usize {
    use MtlFormula::*;
    let kids: &[&MtlFormula] = &match f {
        Atom(_) | Last | True | False => vec![],
        Not(a) | Yesterday(a) | WeakYesterday(a) | Next(a) | Once(_, a) | Historically(_, a)
        | Eventually(_, a) | Globally(_, a) => vec![a.as_ref()],
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Since(_, a, b) | Until(_, a, b)
        | Release(_, a, b) => vec![a.as_ref(), b.as_ref()],
    };
    let inner = kids.iter().map(|k| past_horizon(k, cycle_len)).max().unwrap_or(0);
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

struct LassoTable {
    root: Vec<bool>,
    stable: usize,
    cycle_len: usize,
}

impl LassoTable {
    fn build(f: &MtlFormula, lasso: &LassoTrace) -> LassoTable {
        let p = lasso.prefix().len();
        let l = lasso.cycle().len();
        let stable = p + past_horizon(f, l);
        let len = stable + 2 * l;
        let ctx = TableCtx { lasso, stable, cycle_len: l, len };
        let root = ctx.fill(f);
        LassoTable { root, stable, cycle_len: l }
    }

    fn reduce(&self, t: usize) -> usize {
        if t < self.stable {
            t
        } else {
            self.stable + (t - self.stable) % self.cycle_len
        }
    }
}

struct TableCtx<'a> {
    lasso: &'a LassoTrace,
    stable: usize,
    cycle_len: usize,
    len: usize,
}

impl TableCtx<'_> {
    fn reduce(&self, t: usize) -> usize {
        if t < self.len {
            t
        } else {
            self.stable + (t - self.stable) % self.cycle_len
        }
    }

    fn get(&self, table: &[bool], t: usize) -> bool {
        table[self.reduce(t)]
    }

    /// Last offset worth scanning for a window starting at `from`: one loop
    /// round past the stable zone covers every reachable position class.
    fn scan_end(&self, from: usize, hi: usize) -> usize {
        let cap = from.max(self.stable) + self.cycle_len - 1;
        cap.min(from.saturating_add(hi))
    }

    fn fill(&self, f: &MtlFormula) -> Vec<bool> {
        use MtlFormula::*;
        let n = self.len;
        match f {
            True => vec![true; n],
            False | Last => vec![false; n],
            Atom(name) => (0..n).map(|x| self.lasso.state(x).contains(name)).collect(),
            Not(a) => self.fill(a).into_iter().map(|v| !v).collect(),
            And(a, b) => zip_with(self.fill(a), self.fill(b), |x, y| x && y),
            Or(a, b) => zip_with(self.fill(a), self.fill(b), |x, y| x || y),
            Implies(a, b) => zip_with(self.fill(a), self.fill(b), |x, y| !x || y),
            Iff(a, b) => zip_with(self.fill(a), self.fill(b), |x, y| x == y),
            Yesterday(a) => {
                let ta = self.fill(a);
                (0..n).map(|x| x > 0 && ta[x - 1]).collect()
            }
            WeakYesterday(a) => {
                let ta = self.fill(a);
                (0..n).map(|x| x == 0 || ta[x - 1]).collect()
            }
            Next(a) => {
                let ta = self.fill(a);
                (0..n).map(|x| self.get(&ta, x + 1)).collect()
            }
            Once(i, a) => {
                let ta = self.fill(a);
                match i {
                    Interval::Unbounded => running_or(&ta),
                    Interval::Bounded(lo, hi) => (0..n)
                        .map(|x| {
                            window_back(x, *lo, *hi).any(|t0| ta[t0])
                        })
                        .collect(),
                }
            }
            Historically(i, a) => {
                let ta = self.fill(a);
                match i {
                    Interval::Unbounded => running_and(&ta),
                    Interval::Bounded(lo, hi) => (0..n)
                        .map(|x| window_back(x, *lo, *hi).all(|t0| ta[t0]))
                        .collect(),
                }
            }
            Since(i, a, b) => {
                let ta = self.fill(a);
                let tb = self.fill(b);
                match i {
                    Interval::Unbounded => {
                        let mut out = Vec::with_capacity(n);
                        let mut prev = false;
                        for x in 0..n {
                            let cur = tb[x] || (ta[x] && prev);
                            out.push(cur);
                            prev = cur;
                        }
                        out
                    }
                    Interval::Bounded(lo, hi) => (0..n)
                        .map(|x| {
                            window_back(x, *lo, *hi).any(|t0| {
                                tb[t0] && (t0 + 1..=x).all(|t1| ta[t1])
                            })
                        })
                        .collect(),
                }
            }
            Eventually(i, a) => {
                let ta = self.fill(a);
                let (lo, hi) = offsets(i);
                (0..n)
                    .map(|x| {
                        let start = x.saturating_add(lo);
                        (start..=self.scan_end(start, hi - lo)).any(|y| self.get(&ta, y))
                    })
                    .collect()
            }
            Globally(i, a) => {
                let ta = self.fill(a);
                let (lo, hi) = offsets(i);
                (0..n)
                    .map(|x| {
                        let start = x.saturating_add(lo);
                        (start..=self.scan_end(start, hi - lo)).all(|y| self.get(&ta, y))
                    })
                    .collect()
            }
            Until(i, a, b) => {
                let ta = self.fill(a);
                let tb = self.fill(b);
                let (lo, hi) = offsets(i);
                (0..n)
                    .map(|x| {
                        let start = x.saturating_add(lo);
                        let last = self.scan_end(start, hi - lo);
                        let mut chain = true; // a holds on [x, y)
                        for y in x..=last {
                            if y >= start && chain && self.get(&tb, y) {
                                return true;
                            }
                            chain = chain && self.get(&ta, y);
                            if !chain {
                                return false;
                            }
                        }
                        false
                    })
                    .collect()
            }
            Release(i, a, b) => {
                let ta = self.fill(a);
                let tb = self.fill(b);
                let (lo, hi) = offsets(i);
                (0..n)
                    .map(|x| {
                        let start = x.saturating_add(lo);
                        let last = self.scan_end(start, hi - lo);
                        let all_b = (start..=last).all(|y| self.get(&tb, y));
                        if all_b {
                            return true;
                        }
                        let mut b_held = true; // b holds on interval positions up to y
                        for y in start..=last {
                            b_held = b_held && self.get(&tb, y);
                            if b_held && self.get(&ta, y) {
                                return true;
                            }
                            if !b_held {
                                return false;
                            }
                        }
                        false
                    })
                    .collect()
            }
        }
    }
}

fn offsets(i: &Interval) -> (usize, usize) {
    match i {
        Interval::Bounded(lo, hi) => (*lo, *hi),
        Interval::Unbounded => (0, usize::MAX),
    }
}

fn window_back(x: usize, lo: usize, hi: usize) -> impl Iterator<Item = usize> {
    let top = x.saturating_sub(lo);
    let bottom = x.saturating_sub(hi);
    (bottom..=top).filter(move |t0| x - t0 >= lo)
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

fn running_or(a: &[bool]) -> Vec<bool> {
    let mut seen = false;
    a.iter()
        .map(|&v| {
            seen = seen || v;
            seen
        })
        .collect()
}

fn running_and(a: &[bool]) -> Vec<bool> {
    let mut all = true;
    a.iter()
        .map(|&v| {
            all = all && v;
            all
        })
        .collect()
}

// --- trace file format -----------------------------------------------------
//
// One position per line: comma-separated names of the true propositions,
// "-" for the empty set. A "---loop---" line separates prefix from loop;
// without it the trace is finite. An optional trailing "t=<n>" line carries
// an evaluation position (used for counterexamples). "#" lines are comments.

pub const LOOP_MARKER: &str = "---loop---";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace format error on line {line}: {message}")]
pub struct TraceFormatError {
    pub line: usize,
    pub message: String,
}

pub fn parse_trace_text(text: &str) -> Result<(TraceData, Option<usize>), TraceFormatError> {
    let mut before_loop: Vec<State> = Vec::new();
    let mut after_loop: Vec<State> = Vec::new();
    let mut saw_marker = false;
    let mut t: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if t.is_some() {
            return Err(TraceFormatError {
                line: lineno,
                message: "content after the t= trailer".into(),
            });
        }
        if line == LOOP_MARKER {
            if saw_marker {
                return Err(TraceFormatError { line: lineno, message: "duplicate loop marker".into() });
            }
            saw_marker = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("t=") {
            t = Some(rest.trim().parse().map_err(|_| TraceFormatError {
                line: lineno,
                message: format!("bad position '{rest}'"),
            })?);
            continue;
        }
        let state: State = if line == "-" {
            State::new()
        } else {
            line.split(',')
                .map(|name| {
                    let name = name.trim();
                    if name.is_empty() {
                        Err(TraceFormatError { line: lineno, message: "empty proposition name".into() })
                    } else {
                        Ok(name.to_string())
                    }
                })
                .collect::<Result<_, _>>()?
        };
        if saw_marker {
            after_loop.push(state);
        } else {
            before_loop.push(state);
        }
    }
    let data = if saw_marker {
        if after_loop.is_empty() {
            return Err(TraceFormatError { line: 0, message: "loop section is empty".into() });
        }
        TraceData::Lasso(LassoTrace::new(before_loop, after_loop))
    } else {
        if before_loop.is_empty() {
            return Err(TraceFormatError { line: 0, message: "trace has no positions".into() });
        }
        TraceData::Finite(Trace::new(before_loop))
    };
    Ok((data, t))
}

pub fn format_trace(data: &TraceData, t: Option<usize>) -> String {
    fn state_line(s: &State) -> String {
        if s.is_empty() {
            "-".to_string()
        } else {
            s.iter().cloned().collect::<Vec<_>>().join(",")
        }
    }
    let mut out = String::new();
    match data {
        TraceData::Finite(trace) => {
            for s in trace.states() {
                out.push_str(&state_line(s));
                out.push('\n');
            }
        }
        TraceData::Lasso(lasso) => {
            for s in lasso.prefix() {
                out.push_str(&state_line(s));
                out.push('\n');
            }
            out.push_str(LOOP_MARKER);
            out.push('\n');
            for s in lasso.cycle() {
                out.push_str(&state_line(s));
                out.push('\n');
            }
        }
    }
    if let Some(t) = t {
        out.push_str(&format!("t={t}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtl::MtlFormula as F;
    use crate::mtl::Interval as I;

    fn tr(states: &[&[&str]]) -> Trace {
        Trace::from_names(states)
    }

    fn lasso(prefix: &[&[&str]], cycle: &[&[&str]]) -> LassoTrace {
        let conv = |xs: &[&[&str]]| {
            xs.iter()
                .map(|s| s.iter().map(|p| p.to_string()).collect::<State>())
                .collect::<Vec<_>>()
        };
        LassoTrace::new(conv(prefix), conv(cycle))
    }

    #[test]
    fn not_yesterday_top_marks_start() {
        let f = F::True.yesterday().not();
        let rho = tr(&[&["p"], &[], &["q"]]);
        for t in 0..rho.len() {
            assert_eq!(eval(&f, &rho, t).unwrap(), t == 0);
        }
    }

    #[test]
    fn weak_yesterday_of_true_holds_globally() {
        let rho = tr(&[&[], &["p"]]);
        assert!(holds_globally(&F::True.weak_yesterday(), &rho));
        assert!(!holds_globally(&F::True.yesterday(), &rho));
        assert!(!eval(&F::True.yesterday(), &rho, 0).unwrap());
        assert!(eval(&F::True.yesterday(), &rho, 1).unwrap());
    }

    #[test]
    fn bounded_once_example() {
        let rho = tr(&[&[], &["p"], &[]]);
        assert!(eval(&F::once(I::bounded(1, 2), F::atom("p")), &rho, 2).unwrap());
        assert!(!eval(&F::once(I::bounded(0, 0), F::atom("p")), &rho, 2).unwrap());
    }

    #[test]
    fn next_requires_successor() {
        let rho = tr(&[&["p"], &["p"]]);
        assert!(eval(&F::atom("p").next(), &rho, 0).unwrap());
        assert!(!eval(&F::atom("p").next(), &rho, 1).unwrap());
        assert!(!eval(&F::True.next(), &rho, 1).unwrap());
    }

    #[test]
    fn last_marks_final_position_only() {
        let rho = tr(&[&[], &[], &[]]);
        let vals: Vec<bool> = (0..3).map(|t| eval(&F::Last, &rho, t).unwrap()).collect();
        assert_eq!(vals, vec![false, false, true]);
    }

    #[test]
    fn eval_rejects_out_of_range_position() {
        let rho = tr(&[&[]]);
        let err = eval(&F::True, &rho, 1).unwrap_err();
        assert_eq!(err, EvalError { t: 1, len: 1 });
    }

    #[test]
    fn until_needs_left_operand_up_to_witness() {
        // witness at 2 requires a at 0 and 1 but not at 2
        let rho = tr(&[&["a"], &["a"], &["b"]]);
        let f = F::until(I::Unbounded, F::atom("a"), F::atom("b"));
        assert!(eval(&f, &rho, 0).unwrap());
        let rho2 = tr(&[&[], &["a"], &["b"]]);
        assert!(!eval(&f, &rho2, 0).unwrap());
    }

    #[test]
    fn holds_globally_on_plain_atom() {
        let rho = tr(&[&["p"], &["p"]]);
        assert!(holds_globally(&F::atom("p"), &rho));
    }

    #[test]
    fn lasso_globally_after_prefix() {
        let lam = lasso(&[&[]], &[&["p"]]);
        let g = F::globally(I::Unbounded, F::atom("p"));
        assert!(!eval_lasso(&g, &lam, 0));
        assert!(eval_lasso(&g, &lam, 1));
    }

    #[test]
    fn lasso_eventually_fails_when_prop_never_recurs() {
        let lam = lasso(&[&["p"]], &[&[]]);
        let f = F::eventually(I::Unbounded, F::atom("p"));
        assert!(eval_lasso(&f, &lam, 0));
        assert!(!eval_lasso(&f, &lam, 1));
    }

    #[test]
    fn lasso_infinitely_often() {
        let lam = lasso(&[], &[&[], &["p"]]);
        let f = F::globally(I::Unbounded, F::eventually(I::Unbounded, F::atom("p")));
        assert!(eval_lasso(&f, &lam, 0));
    }

    #[test]
    fn lasso_last_is_false() {
        let lam = lasso(&[], &[&["p"]]);
        assert!(!eval_lasso(&F::Last, &lam, 5));
    }

    #[test]
    fn lasso_positions_far_into_the_loop() {
        let lam = lasso(&[&["p"]], &[&[], &["q"]]);
        let f = F::atom("q");
        assert!(!eval_lasso(&f, &lam, 1));
        assert!(eval_lasso(&f, &lam, 2));
        assert!(eval_lasso(&f, &lam, 100));
        assert!(!eval_lasso(&f, &lam, 101));
    }

    #[test]
    fn trace_format_round_trip() {
        let data = TraceData::Lasso(lasso(&[&["a", "b"], &[]], &[&["c"]]));
        let text = format_trace(&data, Some(3));
        let (parsed, t) = parse_trace_text(&text).unwrap();
        assert_eq!(parsed, data);
        assert_eq!(t, Some(3));

        let finite = TraceData::Finite(tr(&[&[], &["x"]]));
        let text = format_trace(&finite, None);
        assert_eq!(text, "-\nx\n");
        let (parsed, t) = parse_trace_text(&text).unwrap();
        assert_eq!(parsed, finite);
        assert_eq!(t, None);
    }

    #[test]
    fn trace_format_rejects_garbage() {
        assert!(parse_trace_text("").is_err());
        assert!(parse_trace_text("---loop---\n").is_err());
        assert!(parse_trace_text("a\nt=x\n").is_err());
        assert!(parse_trace_text("a,\n").is_err());
    }
}
