//! Bounded equivalence and implication checking between MTL formulas by
//! exhaustive trace enumeration.
//!
//! Under past and finite-future semantics every finite trace over the
//! configured propositions up to `max_len` is enumerated and the formulas
//! are compared at every position. Under infinite-future semantics every
//! lasso with prefix up to `max_prefix` and loop up to `max_loop` is
//! enumerated and the formulas are compared at the initial position, which
//! is how a model checker decides `f ↔ g` over all infinite paths.
//!
//! Verdicts are bounded: `Equivalent` means no difference up to the
//! configured bounds. The enumeration is fanned out across worker threads;
//! the reported counterexample is always the first one in canonical order
//! (shortest trace, lexicographic states, smallest position), independent
//! of the worker count.

use crate::mtl::{atoms, Interval, MtlFormula};
use crate::traces::{eval_lasso, LassoTrace, State, Trace, TraceData};
use crate::translator::Semantics;
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

/// Bounds and proposition universe for a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    pub semantics: Semantics,
    /// Ordered proposition universe; traces are enumerated over exactly
    /// these names and the order fixes the enumeration order.
    pub props: Vec<String>,
    /// Finite/past semantics: trace lengths 1..=max_len.
    pub max_len: usize,
    /// Infinite semantics: lasso prefix lengths 0..=max_prefix.
    pub max_prefix: usize,
    /// Infinite semantics: lasso loop lengths 1..=max_loop.
    pub max_loop: usize,
    /// Guard on the enumeration size, in bits of trace space.
    pub trace_bits_limit: usize,
}

pub const DEFAULT_TRACE_BITS_LIMIT: usize = 24;

impl CheckConfig {
    pub fn new(semantics: Semantics, props: Vec<String>) -> Self {
        CheckConfig {
            semantics,
            props,
            max_len: 6,
            max_prefix: 4,
            max_loop: 2,
            trace_bits_limit: DEFAULT_TRACE_BITS_LIMIT,
        }
    }
}

/// Outcome of a bounded check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    Counterexample { witness: TraceData, t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("formulas use propositions outside the configured set: {missing:?}")]
    PropsMismatch { missing: Vec<String> },
    #[error("trace space of {bits} bits exceeds the limit of {limit} bits")]
    BoundOverflow { bits: usize, limit: usize },
    #[error("invalid check configuration: {reason}")]
    InvalidConfig { reason: String },
}

/// Checks bounded equivalence: `eval(f) = eval(g)` at every compared
/// position of every enumerated trace.
pub fn check_equiv(f: &MtlFormula, g: &MtlFormula, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    run_check(f, g, cfg, Mode::Equivalence)
}

/// Checks bounded implication: `eval(f) → eval(g)` everywhere. The
/// `Equivalent` verdict then reads "valid up to bounds".
pub fn check_implication(
    f: &MtlFormula,
    g: &MtlFormula,
    cfg: &CheckConfig,
) -> Result<Verdict, CheckError> {
    run_check(f, g, cfg, Mode::Implication)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Equivalence,
    Implication,
}

fn run_check(
    f: &MtlFormula,
    g: &MtlFormula,
    cfg: &CheckConfig,
    mode: Mode,
) -> Result<Verdict, CheckError> {
    validate(f, g, cfg)?;
    let cf = Compiled::build(f, &cfg.props);
    let cg = Compiled::build(g, &cfg.props);
    match cfg.semantics {
        Semantics::Past | Semantics::FutureFinite => finite_check(&cf, &cg, cfg, mode),
        Semantics::FutureInfinite => lasso_check(f, g, &cf, &cg, cfg, mode),
    }
}

fn validate(f: &MtlFormula, g: &MtlFormula, cfg: &CheckConfig) -> Result<(), CheckError> {
    if cfg.props.is_empty() {
        return Err(CheckError::InvalidConfig { reason: "empty proposition set".into() });
    }
    let bits = cfg.props.len();
    let (space, what) = match cfg.semantics {
        Semantics::Past | Semantics::FutureFinite => {
            if cfg.max_len < 1 {
                return Err(CheckError::InvalidConfig { reason: "max_len must be at least 1".into() });
            }
            (bits * cfg.max_len, "max_len")
        }
        Semantics::FutureInfinite => {
            if cfg.max_loop < 1 {
                return Err(CheckError::InvalidConfig { reason: "max_loop must be at least 1".into() });
            }
            (bits * (cfg.max_prefix + cfg.max_loop), what_lasso())
        }
    };
    if space > cfg.trace_bits_limit {
        return Err(CheckError::BoundOverflow { bits: space, limit: cfg.trace_bits_limit });
    }
    if space > 62 {
        return Err(CheckError::InvalidConfig {
            reason: format!("{what} bounds need {space} enumeration bits; at most 62 are supported"),
        });
    }
    let mut missing: Vec<String> = atoms(f)
        .union(&atoms(g))
        .filter(|a| !cfg.props.contains(a))
        .cloned()
        .collect();
    missing.sort();
    missing.dedup();
    if !missing.is_empty() {
        return Err(CheckError::PropsMismatch { missing });
    }
    Ok(())
}

fn what_lasso() -> &'static str {
    "max_prefix/max_loop"
}

// --- compiled formulas ------------------------------------------------------
//
// Formulas are flattened into a node table with structural sharing, atoms
// resolved to proposition indices. Truth values over all positions of one
// trace are computed bottom-up as u64 bitmasks, one bit per position.

const NONE: u32 = u32::MAX;
const UNBOUNDED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    op: Op,
    a: u32,
    b: u32,
    lo: u32,
    hi: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    Atom(u32),
    Last,
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Yesterday,
    WeakYesterday,
    Once,
    Historically,
    Since,
    Next,
    Eventually,
    Globally,
    Until,
    Release,
}

struct Compiled {
    nodes: Vec<Node>,
    root: u32,
}

impl Compiled {
    fn build(f: &MtlFormula, props: &[String]) -> Compiled {
        let mut nodes = Vec::new();
        let mut dedup = HashMap::new();
        let mut index: HashMap<&str, u32> = HashMap::new();
        for (i, p) in props.iter().enumerate() {
            index.insert(p.as_str(), i as u32);
        }
        let root = compile_into(f, &index, &mut nodes, &mut dedup);
        Compiled { nodes, root }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Stable-onset horizon per node for a given loop length: past
    /// operators delay the position from which truth values repeat with
    /// the loop period.
    fn past_horizon(&self, cycle_len: usize) -> usize {
        let mut cost = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            let inherited = [n.a, n.b]
                .into_iter()
                .filter(|&c| c != NONE)
                .map(|c| cost[c as usize])
                .max()
                .unwrap_or(0);
            let own = match n.op {
                Op::Yesterday | Op::WeakYesterday => 1,
                Op::Once | Op::Historically | Op::Since => {
                    if n.hi == UNBOUNDED { cycle_len } else { n.hi as usize }
                }
                _ => 0,
            };
            cost[i] = inherited + own;
        }
        cost[self.root as usize]
    }
}

fn compile_into(
    f: &MtlFormula,
    props: &HashMap<&str, u32>,
    nodes: &mut Vec<Node>,
    dedup: &mut HashMap<Node, u32>,
) -> u32 {
    use MtlFormula as F;
    let interval = |i: &Interval| match i {
        Interval::Bounded(lo, hi) => (*lo as u32, *hi as u32),
        Interval::Unbounded => (0, UNBOUNDED),
    };
    let node = match f {
        F::Atom(name) => Node {
            op: Op::Atom(*props.get(name.as_str()).expect("atom validated against props")),
            a: NONE,
            b: NONE,
            lo: 0,
            hi: 0,
        },
        F::Last => Node { op: Op::Last, a: NONE, b: NONE, lo: 0, hi: 0 },
        F::True => Node { op: Op::True, a: NONE, b: NONE, lo: 0, hi: 0 },
        F::False => Node { op: Op::False, a: NONE, b: NONE, lo: 0, hi: 0 },
        F::Not(x) => unary(Op::Not, x, props, nodes, dedup),
        F::Yesterday(x) => unary(Op::Yesterday, x, props, nodes, dedup),
        F::WeakYesterday(x) => unary(Op::WeakYesterday, x, props, nodes, dedup),
        F::Next(x) => unary(Op::Next, x, props, nodes, dedup),
        F::And(x, y) => binary(Op::And, x, y, props, nodes, dedup),
        F::Or(x, y) => binary(Op::Or, x, y, props, nodes, dedup),
        F::Implies(x, y) => binary(Op::Implies, x, y, props, nodes, dedup),
        F::Iff(x, y) => binary(Op::Iff, x, y, props, nodes, dedup),
        F::Once(i, x) => {
            let (lo, hi) = interval(i);
            let a = compile_into(x, props, nodes, dedup);
            Node { op: Op::Once, a, b: NONE, lo, hi }
        }
        F::Historically(i, x) => {
            let (lo, hi) = interval(i);
            let a = compile_into(x, props, nodes, dedup);
            Node { op: Op::Historically, a, b: NONE, lo, hi }
        }
        F::Eventually(i, x) => {
            let (lo, hi) = interval(i);
            let a = compile_into(x, props, nodes, dedup);
            Node { op: Op::Eventually, a, b: NONE, lo, hi }
        }
        F::Globally(i, x) => {
            let (lo, hi) = interval(i);
            let a = compile_into(x, props, nodes, dedup);
            Node { op: Op::Globally, a, b: NONE, lo, hi }
        }
        F::Since(i, x, y) => {
            let (lo, hi) = interval(i);
            let a = compile_into(x, props, nodes, dedup);
            let b = compile_into(y, props, nodes, dedup);
            Node { op: Op::Since, a, b, lo, hi }
        }
        F::Until(i, x, y) => {
            let (lo, hi) = interval(i);
            let a = compile_into(x, props, nodes, dedup);
            let b = compile_into(y, props, nodes, dedup);
            Node { op: Op::Until, a, b, lo, hi }
        }
        F::Release(i, x, y) => {
            let (lo, hi) = interval(i);
            let a = compile_into(x, props, nodes, dedup);
            let b = compile_into(y, props, nodes, dedup);
            Node { op: Op::Release, a, b, lo, hi }
        }
    };
    intern(node, nodes, dedup)
}

fn unary(
    op: Op,
    x: &MtlFormula,
    props: &HashMap<&str, u32>,
    nodes: &mut Vec<Node>,
    dedup: &mut HashMap<Node, u32>,
) -> Node {
    let a = compile_into(x, props, nodes, dedup);
    Node { op, a, b: NONE, lo: 0, hi: 0 }
}

fn binary(
    op: Op,
    x: &MtlFormula,
    y: &MtlFormula,
    props: &HashMap<&str, u32>,
    nodes: &mut Vec<Node>,
    dedup: &mut HashMap<Node, u32>,
) -> Node {
    let a = compile_into(x, props, nodes, dedup);
    let b = compile_into(y, props, nodes, dedup);
    Node { op, a, b, lo: 0, hi: 0 }
}

fn intern(node: Node, nodes: &mut Vec<Node>, dedup: &mut HashMap<Node, u32>) -> u32 {
    if let Some(&i) = dedup.get(&node) {
        return i;
    }
    let i = nodes.len() as u32;
    nodes.push(node);
    dedup.insert(node, i);
    i
}

// --- finite-trace evaluation -------------------------------------------------

/// Fills `vals[i]` with node i's truth bitmask over positions `0..n` of the
/// finite trace given by per-proposition position masks.
fn eval_finite(c: &Compiled, prop_masks: &[u64], n: usize, vals: &mut [u64]) {
    let full: u64 = (1u64 << n) - 1;
    for (i, node) in c.nodes.iter().enumerate() {
        let a = node.a;
        let b = node.b;
        let va = if a == NONE { 0 } else { vals[a as usize] };
        let vb = if b == NONE { 0 } else { vals[b as usize] };
        let lo = node.lo as usize;
        let hi = node.hi;
        vals[i] = match node.op {
            Op::Atom(p) => prop_masks[p as usize],
            Op::Last => 1u64 << (n - 1),
            Op::True => full,
            Op::False => 0,
            Op::Not => !va & full,
            Op::And => va & vb,
            Op::Or => va | vb,
            Op::Implies => (!va | vb) & full,
            Op::Iff => !(va ^ vb) & full,
            Op::Yesterday => (va << 1) & full,
            Op::WeakYesterday => ((va << 1) | 1) & full,
            Op::Next => va >> 1,
            Op::Once => {
                let hi = if hi == UNBOUNDED { n - 1 } else { (hi as usize).min(n - 1) };
                let mut out = 0u64;
                for d in lo..=hi.max(lo) {
                    if d > hi {
                        break;
                    }
                    out |= (va << d) & full;
                }
                out
            }
            Op::Historically => {
                let hi = if hi == UNBOUNDED { n - 1 } else { (hi as usize).min(n - 1) };
                let mut out = full;
                let mut d = lo;
                while d <= hi {
                    out &= (va << d) | ((1u64 << d) - 1);
                    d += 1;
                }
                out
            }
            Op::Since => {
                let mut out = 0u64;
                if hi == UNBOUNDED && lo == 0 {
                    let mut prev = false;
                    for t in 0..n {
                        let cur = bit(vb, t) || (bit(va, t) && prev);
                        if cur {
                            out |= 1 << t;
                        }
                        prev = cur;
                    }
                } else {
                    let hi = if hi == UNBOUNDED { n - 1 } else { hi as usize };
                    for t in 0..n {
                        let mut chain = true; // left operand on (t0, t]
                        for back in 0..=t.min(hi) {
                            let t0 = t - back;
                            if back >= lo && chain && bit(vb, t0) {
                                out |= 1 << t;
                                break;
                            }
                            chain = chain && bit(va, t0);
                            if !chain {
                                break;
                            }
                        }
                    }
                }
                out
            }
            Op::Eventually => {
                let hi = if hi == UNBOUNDED { n - 1 } else { (hi as usize).min(n - 1) };
                let mut out = 0u64;
                let mut d = lo;
                while d <= hi {
                    out |= va >> d;
                    d += 1;
                }
                out & full
            }
            Op::Globally => {
                let hi = if hi == UNBOUNDED { n - 1 } else { (hi as usize).min(n - 1) };
                let mut out = full;
                let mut d = lo;
                while d <= hi {
                    // vacuous past the end of the trace
                    let vacuous = if d >= n { full } else { !((1u64 << (n - d)) - 1) & full };
                    out &= (va >> d) | vacuous;
                    d += 1;
                }
                out
            }
            Op::Until => {
                let mut out = 0u64;
                if hi == UNBOUNDED && lo == 0 {
                    let mut next = false;
                    for t in (0..n).rev() {
                        let cur = bit(vb, t) || (bit(va, t) && next);
                        if cur {
                            out |= 1 << t;
                        }
                        next = cur;
                    }
                } else {
                    let hi_c = if hi == UNBOUNDED { n } else { hi as usize };
                    for t in 0..n {
                        let mut chain = true; // left operand on [t, t0)
                        for t0 in t..n.min(t + hi_c + 1) {
                            if t0 - t >= lo && chain && bit(vb, t0) {
                                out |= 1 << t;
                                break;
                            }
                            chain = chain && bit(va, t0);
                            if !chain {
                                break;
                            }
                        }
                    }
                }
                out
            }
            Op::Release => {
                let mut out = 0u64;
                let hi_c = if hi == UNBOUNDED { n } else { hi as usize };
                for t in 0..n {
                    let end = n.min(t + hi_c + 1);
                    let mut all_b = true;
                    for t0 in t + lo..end {
                        if !bit(vb, t0) {
                            all_b = false;
                            break;
                        }
                    }
                    if all_b {
                        out |= 1 << t;
                        continue;
                    }
                    // release witness: left holds at an interval position and
                    // the right held at every interval position up to it
                    let mut held = true;
                    for t0 in t + lo..end {
                        held = held && bit(vb, t0);
                        if held && bit(va, t0) {
                            out |= 1 << t;
                            break;
                        }
                        if !held {
                            break;
                        }
                    }
                }
                out
            }
        };
    }
}

#[inline]
fn bit(mask: u64, i: usize) -> bool {
    (mask >> i) & 1 == 1
}

// --- lasso evaluation ---------------------------------------------------------

struct LassoShape {
    cycle_len: usize,
    /// first position of the stable zone
    stable: usize,
    /// table length: stable + 2 * cycle_len
    len: usize,
}

impl LassoShape {
    fn new(c: &Compiled, prefix_len: usize, cycle_len: usize) -> LassoShape {
        let stable = prefix_len + c.past_horizon(cycle_len);
        LassoShape { cycle_len, stable, len: stable + 2 * cycle_len }
    }

    #[inline]
    fn reduce(&self, t: usize) -> usize {
        if t < self.len {
            t
        } else {
            self.stable + (t - self.stable) % self.cycle_len
        }
    }

    #[inline]
    fn get(&self, mask: u64, t: usize) -> bool {
        bit(mask, self.reduce(t))
    }

    /// Last position worth scanning for a window starting at `from`: one
    /// loop round past the stable zone reaches every position class.
    #[inline]
    fn scan_end(&self, from: usize, span: usize) -> usize {
        let cap = from.max(self.stable) + self.cycle_len - 1;
        cap.min(from.saturating_add(span))
    }
}

/// Fills `vals[i]` with node i's truth bitmask over table positions
/// `0..shape.len` of the infinite trace `prefix · cycle^ω`.
fn eval_lasso_masks(c: &Compiled, prop_masks: &[u64], shape: &LassoShape, vals: &mut [u64]) {
    let n = shape.len;
    let full: u64 = (1u64 << n) - 1;
    for (i, node) in c.nodes.iter().enumerate() {
        let va = if node.a == NONE { 0 } else { vals[node.a as usize] };
        let vb = if node.b == NONE { 0 } else { vals[node.b as usize] };
        let lo = node.lo as usize;
        let hi = node.hi;
        let span = |lo: usize| if hi == UNBOUNDED { usize::MAX } else { (hi as usize) - lo };
        vals[i] = match node.op {
            Op::Atom(p) => prop_masks[p as usize],
            Op::Last | Op::False => 0,
            Op::True => full,
            Op::Not => !va & full,
            Op::And => va & vb,
            Op::Or => va | vb,
            Op::Implies => (!va | vb) & full,
            Op::Iff => !(va ^ vb) & full,
            Op::Yesterday => (va << 1) & full,
            Op::WeakYesterday => ((va << 1) | 1) & full,
            Op::Next => {
                let mut out = (va >> 1) & full;
                if shape.get(va, n) {
                    out |= 1 << (n - 1);
                }
                out
            }
            Op::Once => {
                let hi_c = if hi == UNBOUNDED { n } else { hi as usize };
                let mut out = 0u64;
                if lo == 0 && hi == UNBOUNDED {
                    let mut seen = false;
                    for t in 0..n {
                        seen = seen || bit(va, t);
                        if seen {
                            out |= 1 << t;
                        }
                    }
                } else {
                    for t in 0..n {
                        for back in lo..=t.min(hi_c) {
                            if bit(va, t - back) {
                                out |= 1 << t;
                                break;
                            }
                        }
                    }
                }
                out
            }
            Op::Historically => {
                let hi_c = if hi == UNBOUNDED { n } else { hi as usize };
                let mut out = 0u64;
                if lo == 0 && hi == UNBOUNDED {
                    let mut all = true;
                    for t in 0..n {
                        all = all && bit(va, t);
                        if all {
                            out |= 1 << t;
                        }
                    }
                } else {
                    for t in 0..n {
                        let ok = (lo..=t.min(hi_c)).all(|back| bit(va, t - back));
                        if ok {
                            out |= 1 << t;
                        }
                    }
                }
                out
            }
            Op::Since => {
                let mut out = 0u64;
                if lo == 0 && hi == UNBOUNDED {
                    let mut prev = false;
                    for t in 0..n {
                        let cur = bit(vb, t) || (bit(va, t) && prev);
                        if cur {
                            out |= 1 << t;
                        }
                        prev = cur;
                    }
                } else {
                    let hi_c = if hi == UNBOUNDED { n } else { hi as usize };
                    for t in 0..n {
                        let mut chain = true;
                        for back in 0..=t.min(hi_c) {
                            let t0 = t - back;
                            if back >= lo && chain && bit(vb, t0) {
                                out |= 1 << t;
                                break;
                            }
                            chain = chain && bit(va, t0);
                            if !chain {
                                break;
                            }
                        }
                    }
                }
                out
            }
            Op::Eventually => {
                let mut out = 0u64;
                for t in 0..n {
                    let start = t.saturating_add(lo);
                    let end = shape.scan_end(start, span(lo));
                    if (start..=end).any(|y| shape.get(va, y)) {
                        out |= 1 << t;
                    }
                }
                out
            }
            Op::Globally => {
                let mut out = 0u64;
                for t in 0..n {
                    let start = t.saturating_add(lo);
                    let end = shape.scan_end(start, span(lo));
                    if (start..=end).all(|y| shape.get(va, y)) {
                        out |= 1 << t;
                    }
                }
                out
            }
            Op::Until => {
                let mut out = 0u64;
                for t in 0..n {
                    let start = t.saturating_add(lo);
                    let end = shape.scan_end(start, span(lo));
                    let mut chain = true;
                    for y in t..=end {
                        if y >= start && chain && shape.get(vb, y) {
                            out |= 1 << t;
                            break;
                        }
                        chain = chain && shape.get(va, y);
                        if !chain {
                            break;
                        }
                    }
                }
                out
            }
            Op::Release => {
                let mut out = 0u64;
                for t in 0..n {
                    let start = t.saturating_add(lo);
                    let end = shape.scan_end(start, span(lo));
                    if (start..=end).all(|y| shape.get(vb, y)) {
                        out |= 1 << t;
                        continue;
                    }
                    let mut held = true;
                    for y in start..=end {
                        held = held && shape.get(vb, y);
                        if held && shape.get(va, y) {
                            out |= 1 << t;
                            break;
                        }
                        if !held {
                            break;
                        }
                    }
                }
                out
            }
        };
    }
}

// --- enumeration ---------------------------------------------------------------

fn finite_check(
    cf: &Compiled,
    cg: &Compiled,
    cfg: &CheckConfig,
    mode: Mode,
) -> Result<Verdict, CheckError> {
    let bits = cfg.props.len();
    for n in 1..=cfg.max_len {
        let total: u64 = 1u64 << (bits * n);
        let hit = (0..total)
            .into_par_iter()
            .map_init(
                || (vec![0u64; cf.len()], vec![0u64; cg.len()], vec![0u64; bits]),
                |(vf, vg, masks), code| {
                    decode_finite(code, bits, n, masks);
                    eval_finite(cf, masks, n, vf);
                    eval_finite(cg, masks, n, vg);
                    let full = (1u64 << n) - 1;
                    let froot = vf[cf.root as usize];
                    let groot = vg[cg.root as usize];
                    let diff = match mode {
                        Mode::Equivalence => (froot ^ groot) & full,
                        Mode::Implication => froot & !groot & full,
                    };
                    if diff != 0 {
                        Some((code, diff.trailing_zeros() as usize))
                    } else {
                        None
                    }
                },
            )
            .find_first(Option::is_some)
            .flatten();
        if let Some((code, t)) = hit {
            let states = decode_states(code, bits, n, &cfg.props);
            return Ok(Verdict::Counterexample {
                witness: TraceData::Finite(Trace::new(states)),
                t,
            });
        }
    }
    Ok(Verdict::Equivalent)
}

fn lasso_check(
    f: &MtlFormula,
    g: &MtlFormula,
    cf: &Compiled,
    cg: &Compiled,
    cfg: &CheckConfig,
    mode: Mode,
) -> Result<Verdict, CheckError> {
    let bits = cfg.props.len();
    for total_len in 1..=(cfg.max_prefix + cfg.max_loop) {
        for cycle_len in 1..=total_len.min(cfg.max_loop) {
            let prefix_len = total_len - cycle_len;
            if prefix_len > cfg.max_prefix {
                continue;
            }
            let sf = LassoShape::new(cf, prefix_len, cycle_len);
            let sg = LassoShape::new(cg, prefix_len, cycle_len);
            let total: u64 = 1u64 << (bits * total_len);
            let hit = if sf.len > 62 || sg.len > 62 {
                // very deep past horizons fall back to the reference evaluator
                slow_lasso_scan(f, g, cfg, mode, prefix_len, cycle_len, total, bits)
            } else {
                (0..total)
                    .into_par_iter()
                    .map_init(
                        || {
                            (
                                vec![0u64; cf.len()],
                                vec![0u64; cg.len()],
                                vec![0u64; bits],
                                vec![0u64; bits],
                            )
                        },
                        |(vf, vg, mf, mg), code| {
                            decode_lasso(code, bits, prefix_len, cycle_len, sf.len, mf);
                            decode_lasso(code, bits, prefix_len, cycle_len, sg.len, mg);
                            eval_lasso_masks(cf, mf, &sf, vf);
                            eval_lasso_masks(cg, mg, &sg, vg);
                            // compared at the initial position, as a model
                            // checker compares specs over all paths
                            let fv = bit(vf[cf.root as usize], 0);
                            let gv = bit(vg[cg.root as usize], 0);
                            let differs = match mode {
                                Mode::Equivalence => fv != gv,
                                Mode::Implication => fv && !gv,
                            };
                            if differs {
                                Some(code)
                            } else {
                                None
                            }
                        },
                    )
                    .find_first(Option::is_some)
                    .flatten()
            };
            if let Some(code) = hit {
                let states = decode_states(code, bits, total_len, &cfg.props);
                let (prefix, cycle) = split_states(states, prefix_len);
                return Ok(Verdict::Counterexample {
                    witness: TraceData::Lasso(LassoTrace::new(prefix, cycle)),
                    t: 0,
                });
            }
        }
    }
    Ok(Verdict::Equivalent)
}

#[allow(clippy::too_many_arguments)]
fn slow_lasso_scan(
    f: &MtlFormula,
    g: &MtlFormula,
    cfg: &CheckConfig,
    mode: Mode,
    prefix_len: usize,
    cycle_len: usize,
    total: u64,
    bits: usize,
) -> Option<u64> {
    (0..total)
        .into_par_iter()
        .map(|code| {
            let states = decode_states(code, bits, prefix_len + cycle_len, &cfg.props);
            let (prefix, cycle) = split_states(states, prefix_len);
            let lasso = LassoTrace::new(prefix, cycle);
            let fv = eval_lasso(f, &lasso, 0);
            let gv = eval_lasso(g, &lasso, 0);
            let differs = match mode {
                Mode::Equivalence => fv != gv,
                Mode::Implication => fv && !gv,
            };
            if differs {
                Some(code)
            } else {
                None
            }
        })
        .find_first(Option::is_some)
        .flatten()
}

/// Position-major decoding: position 0 occupies the most significant bit
/// group, so ascending codes enumerate state sequences lexicographically.
#[inline]
fn state_code(code: u64, bits: usize, positions: usize, t: usize) -> u64 {
    (code >> ((positions - 1 - t) * bits)) & ((1u64 << bits) - 1)
}

fn decode_finite(code: u64, bits: usize, n: usize, masks: &mut [u64]) {
    for m in masks.iter_mut() {
        *m = 0;
    }
    for t in 0..n {
        let s = state_code(code, bits, n, t);
        for (i, m) in masks.iter_mut().enumerate() {
            *m |= ((s >> i) & 1) << t;
        }
    }
}

fn decode_lasso(code: u64, bits: usize, prefix_len: usize, cycle_len: usize, table_len: usize, masks: &mut [u64]) {
    let positions = prefix_len + cycle_len;
    for m in masks.iter_mut() {
        *m = 0;
    }
    for x in 0..table_len {
        let t = if x < prefix_len { x } else { prefix_len + (x - prefix_len) % cycle_len };
        let s = state_code(code, bits, positions, t);
        for (i, m) in masks.iter_mut().enumerate() {
            *m |= ((s >> i) & 1) << x;
        }
    }
}

fn decode_states(code: u64, bits: usize, positions: usize, props: &[String]) -> Vec<State> {
    (0..positions)
        .map(|t| {
            let s = state_code(code, bits, positions, t);
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| (s >> i) & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

fn split_states(mut states: Vec<State>, prefix_len: usize) -> (Vec<State>, Vec<State>) {
    let cycle = states.split_off(prefix_len);
    (states, cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtl::MtlFormula as F;
    use crate::text::parse_formula;

    fn cfg_fin(props: &[&str], max_len: usize) -> CheckConfig {
        let mut c = CheckConfig::new(
            Semantics::FutureFinite,
            props.iter().map(|s| s.to_string()).collect(),
        );
        c.max_len = max_len;
        c
    }

    fn cfg_inf(props: &[&str], max_prefix: usize, max_loop: usize) -> CheckConfig {
        let mut c = CheckConfig::new(
            Semantics::FutureInfinite,
            props.iter().map(|s| s.to_string()).collect(),
        );
        c.max_prefix = max_prefix;
        c.max_loop = max_loop;
        c
    }

    #[test]
    fn reflexivity() {
        let f = parse_formula("G (p -> F[0,2] q)").unwrap();
        for cfg in [cfg_fin(&["p", "q"], 4), cfg_inf(&["p", "q"], 2, 2)] {
            assert_eq!(check_equiv(&f, &f, &cfg).unwrap(), Verdict::Equivalent);
        }
    }

    #[test]
    fn next_vs_now_counterexample_in_canonical_order() {
        let f = parse_formula("X p").unwrap();
        let g = parse_formula("p").unwrap();
        let verdict = check_equiv(&f, &g, &cfg_fin(&["p"], 2)).unwrap();
        match verdict {
            Verdict::Counterexample { witness: TraceData::Finite(trace), t } => {
                assert_eq!(t, 0);
                assert_eq!(trace.len(), 1);
                assert!(trace.states()[0].contains("p"));
            }
            other => panic!("unexpected verdict: {other:?}"),
        }
    }

    #[test]
    fn vacuous_implication_is_valid() {
        let f = F::False;
        let g = parse_formula("G (p U q)").unwrap();
        for cfg in [cfg_fin(&["p", "q"], 3), cfg_inf(&["p", "q"], 2, 2)] {
            assert_eq!(check_implication(&f, &g, &cfg).unwrap(), Verdict::Equivalent);
        }
    }

    #[test]
    fn props_mismatch_is_reported() {
        let f = parse_formula("p & zz").unwrap();
        let g = parse_formula("p").unwrap();
        let err = check_equiv(&f, &g, &cfg_fin(&["p"], 2)).unwrap_err();
        assert_eq!(err, CheckError::PropsMismatch { missing: vec!["zz".to_string()] });
    }

    #[test]
    fn bound_overflow_guard() {
        let f = parse_formula("p").unwrap();
        let cfg = cfg_fin(&["p", "q", "r", "s", "t5"], 6);
        assert!(matches!(
            check_equiv(&f, &f, &cfg).unwrap_err(),
            CheckError::BoundOverflow { bits: 30, limit: 24 }
        ));
        // a raised limit admits the same bit count
        let mut small = cfg_fin(&["p", "q"], 5);
        small.trace_bits_limit = 9;
        assert!(matches!(
            check_equiv(&f, &f, &small).unwrap_err(),
            CheckError::BoundOverflow { bits: 10, limit: 9 }
        ));
        small.trace_bits_limit = 10;
        assert_eq!(check_equiv(&f, &f, &small).unwrap(), Verdict::Equivalent);
    }

    #[test]
    fn empty_props_rejected() {
        let f = F::True;
        let cfg = CheckConfig::new(Semantics::FutureFinite, vec![]);
        assert!(matches!(check_equiv(&f, &f, &cfg), Err(CheckError::InvalidConfig { .. })));
    }

    #[test]
    fn lasso_counterexample_distinguishes_infinitary_formulas() {
        // "eventually p" differs from "always eventually p" on a lasso where
        // p happens only in the prefix
        let f = parse_formula("F p").unwrap();
        let g = parse_formula("G F p").unwrap();
        let verdict = check_equiv(&f, &g, &cfg_inf(&["p"], 2, 2)).unwrap();
        match verdict {
            Verdict::Counterexample { witness: TraceData::Lasso(lasso), t } => {
                assert_eq!(t, 0);
                assert!(eval_lasso(&f, &lasso, 0) != eval_lasso(&g, &lasso, 0));
            }
            other => panic!("unexpected verdict: {other:?}"),
        }
    }

    #[test]
    fn shifted_until_window_reaches_past_the_loop() {
        // TRUE U[lo,hi] b coincides with F[lo,hi] b; the witness window sits
        // beyond one loop round from the evaluation position
        for (lo, hi) in [(3, 3), (2, 4), (4, 6)] {
            let f = MtlFormula::until(
                Interval::bounded(lo, hi),
                MtlFormula::True,
                MtlFormula::atom("b"),
            );
            let g = MtlFormula::eventually(Interval::bounded(lo, hi), MtlFormula::atom("b"));
            for cfg in [cfg_fin(&["b"], 6), cfg_inf(&["b"], 3, 2)] {
                assert_eq!(
                    check_equiv(&f, &g, &cfg).unwrap(),
                    Verdict::Equivalent,
                    "window [{lo},{hi}] under {:?}",
                    cfg.semantics
                );
            }
        }
    }

    #[test]
    fn until_release_duality_checked_exhaustively() {
        let f = parse_formula("p U q").unwrap();
        let g = parse_formula("! (! p V ! q)").unwrap();
        for cfg in [cfg_fin(&["p", "q"], 5), cfg_inf(&["p", "q"], 3, 2)] {
            assert_eq!(check_equiv(&f, &g, &cfg).unwrap(), Verdict::Equivalent);
        }
    }
}
