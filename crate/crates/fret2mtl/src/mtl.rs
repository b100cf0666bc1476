//! Abstract syntax of metric temporal logic with both past and future
//! operators, discrete-time intervals, and structural formula metrics.

use std::collections::BTreeSet;
use std::fmt;

/// A discrete-time interval: either `[lo, hi]` over the naturals or `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interval {
    Bounded(usize, usize),
    Unbounded,
}

impl Interval {
    /// Builds `[lo, hi]`. Panics if `lo > hi`.
    pub fn bounded(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{lo},{hi}]");
        Interval::Bounded(lo, hi)
    }

    pub fn contains(&self, d: usize) -> bool {
        match *self {
            Interval::Bounded(lo, hi) => lo <= d && d <= hi,
            Interval::Unbounded => true,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Interval::Unbounded)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Interval::Bounded(lo, hi) => write!(f, "[{lo},{hi}]"),
            Interval::Unbounded => Ok(()),
        }
    }
}

/// An MTL formula over named propositions.
///
/// `Last` is a distinguished atom (printed `LAST`) that marks the final
/// position of a finite trace; ordinary identifiers may not shadow it.
/// Temporal operators carrying an [`Interval`] are interpreted relative to
/// the current position; `Interval::Unbounded` gives the plain LTL operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MtlFormula {
    Atom(String),
    Last,
    True,
    False,
    Not(Box<MtlFormula>),
    And(Box<MtlFormula>, Box<MtlFormula>),
    Or(Box<MtlFormula>, Box<MtlFormula>),
    Implies(Box<MtlFormula>, Box<MtlFormula>),
    Iff(Box<MtlFormula>, Box<MtlFormula>),
    /// Previous instant, strict: false at the first position.
    Yesterday(Box<MtlFormula>),
    /// Previous instant, weak: true at the first position.
    WeakYesterday(Box<MtlFormula>),
    /// Once: the operand held at some past instant within the interval.
    Once(Interval, Box<MtlFormula>),
    /// Historically: the operand held at every past instant within the interval.
    Historically(Interval, Box<MtlFormula>),
    /// Since: the right operand held at a past instant within the interval and
    /// the left operand has held ever since (exclusive of that instant).
    Since(Interval, Box<MtlFormula>, Box<MtlFormula>),
    /// Next instant, strict: requires a successor position.
    Next(Box<MtlFormula>),
    Eventually(Interval, Box<MtlFormula>),
    Globally(Interval, Box<MtlFormula>),
    Until(Interval, Box<MtlFormula>, Box<MtlFormula>),
    Release(Interval, Box<MtlFormula>, Box<MtlFormula>),
}

impl MtlFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        MtlFormula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        MtlFormula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Self) -> Self {
        MtlFormula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Self) -> Self {
        MtlFormula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Self) -> Self {
        MtlFormula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Self) -> Self {
        MtlFormula::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn yesterday(self) -> Self {
        MtlFormula::Yesterday(Box::new(self))
    }

    pub fn weak_yesterday(self) -> Self {
        MtlFormula::WeakYesterday(Box::new(self))
    }

    pub fn once(i: Interval, f: Self) -> Self {
        MtlFormula::Once(i, Box::new(f))
    }

    pub fn historically(i: Interval, f: Self) -> Self {
        MtlFormula::Historically(i, Box::new(f))
    }

    pub fn since(i: Interval, lhs: Self, rhs: Self) -> Self {
        MtlFormula::Since(i, Box::new(lhs), Box::new(rhs))
    }

    pub fn next(self) -> Self {
        MtlFormula::Next(Box::new(self))
    }

    pub fn eventually(i: Interval, f: Self) -> Self {
        MtlFormula::Eventually(i, Box::new(f))
    }

    pub fn globally(i: Interval, f: Self) -> Self {
        MtlFormula::Globally(i, Box::new(f))
    }

    pub fn until(i: Interval, lhs: Self, rhs: Self) -> Self {
        MtlFormula::Until(i, Box::new(lhs), Box::new(rhs))
    }

    pub fn release(i: Interval, lhs: Self, rhs: Self) -> Self {
        MtlFormula::Release(i, Box::new(lhs), Box::new(rhs))
    }

    /// True for the ten temporal connectives (not for boolean ones or leaves).
    pub fn is_temporal(&self) -> bool {
        use MtlFormula::*;
        matches!(
            self,
            Yesterday(_)
                | WeakYesterday(_)
                | Once(..)
                | Historically(..)
                | Since(..)
                | Next(_)
                | Eventually(..)
                | Globally(..)
                | Until(..)
                | Release(..)
        )
    }

    /// True for nodes with two subformulas (boolean or temporal).
    pub fn is_binary(&self) -> bool {
        use MtlFormula::*;
        matches!(
            self,
            And(..) | Or(..) | Implies(..) | Iff(..) | Since(..) | Until(..) | Release(..)
        )
    }

    fn children(&self) -> Vec<&MtlFormula> {
        use MtlFormula::*;
        match self {
            Atom(_) | Last | True | False => vec![],
            Not(a) | Yesterday(a) | WeakYesterday(a) | Next(a) | Once(_, a)
            | Historically(_, a) | Eventually(_, a) | Globally(_, a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Since(_, a, b)
            | Until(_, a, b) | Release(_, a, b) => vec![a, b],
        }
    }
}

/// Structural complexity of a formula.
///
/// `size` counts every AST node (leaves and connectives alike; interval
/// annotations add nothing), `temp_ops` counts temporal connectives,
/// `props` counts atom occurrences with multiplicity (`LAST` included),
/// and `temporal_depth` is the deepest nesting of temporal connectives
/// on any root-to-leaf path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricsReport {
    pub size: usize,
    pub temp_ops: usize,
    pub props: usize,
    pub temporal_depth: usize,
}

pub fn metrics(f: &MtlFormula) -> MetricsReport {
    use MtlFormula::*;
    let kids: Vec<MetricsReport> = f.children().into_iter().map(metrics).collect();
    let size = 1 + kids.iter().map(|k| k.size).sum::<usize>();
    let temp_ops =
        usize::from(f.is_temporal()) + kids.iter().map(|k| k.temp_ops).sum::<usize>();
    let props = match f {
        Atom(_) | Last => 1,
        _ => kids.iter().map(|k| k.props).sum(),
    };
    let temporal_depth = usize::from(f.is_temporal())
        + kids.iter().map(|k| k.temporal_depth).max().unwrap_or(0);
    MetricsReport { size, temp_ops, props, temporal_depth }
}

/// The set of distinct atom names in `f`, excluding `LAST`.
pub fn atoms(f: &MtlFormula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_atoms(f, &mut out);
    out
}

fn collect_atoms(f: &MtlFormula, out: &mut BTreeSet<String>) {
    if let MtlFormula::Atom(name) = f {
        out.insert(name.clone());
        return;
    }
    for child in f.children() {
        collect_atoms(child, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use MtlFormula as F;

    #[test]
    fn metrics_single_atom() {
        let r = metrics(&F::atom("p"));
        assert_eq!(r, MetricsReport { size: 1, temp_ops: 0, props: 1, temporal_depth: 0 });
    }

    #[test]
    fn metrics_globally_atom() {
        let r = metrics(&F::globally(Interval::Unbounded, F::atom("p")));
        assert_eq!(r, MetricsReport { size: 2, temp_ops: 1, props: 1, temporal_depth: 1 });
    }

    #[test]
    fn metrics_not_adds_one_node() {
        let f = F::atom("p").and(F::eventually(Interval::bounded(0, 3), F::atom("q")));
        let base = metrics(&f);
        let negated = metrics(&f.clone().not());
        assert_eq!(negated.size, base.size + 1);
        assert_eq!(negated.temp_ops, base.temp_ops);
        assert_eq!(negated.props, base.props);
    }

    #[test]
    fn metrics_globally_increments_depth() {
        for f in [
            F::atom("p"),
            F::until(Interval::Unbounded, F::atom("p"), F::atom("q")),
            F::Last,
        ] {
            let inner = metrics(&f);
            let wrapped = metrics(&F::globally(Interval::bounded(0, 2), f.clone()));
            assert_eq!(wrapped.temporal_depth, inner.temporal_depth + 1);
        }
    }

    #[test]
    fn metrics_invariant_under_atom_renaming() {
        let f = F::atom("alpha").and(F::once(
            Interval::bounded(1, 2),
            F::atom("alpha").or(F::atom("beta")),
        ));
        let g = F::atom("x").and(F::once(
            Interval::bounded(1, 2),
            F::atom("x").or(F::atom("y")),
        ));
        assert_eq!(metrics(&f), metrics(&g));
    }

    #[test]
    fn metrics_counts_last_as_prop() {
        let f = F::release(Interval::Unbounded, F::Last, F::atom("p"));
        let r = metrics(&f);
        assert_eq!(r.props, 2);
        assert_eq!(r.size, 3);
    }

    #[test]
    fn atoms_deduplicates() {
        let f = F::atom("p").and(F::atom("p"));
        let names = atoms(&f);
        assert_eq!(names.into_iter().collect::<Vec<_>>(), vec!["p".to_string()]);
    }

    #[test]
    fn atoms_of_constant_is_empty() {
        assert!(atoms(&F::True).is_empty());
    }

    #[test]
    fn atoms_excludes_last() {
        let f = F::Last.and(F::atom("q"));
        assert_eq!(atoms(&f).into_iter().collect::<Vec<_>>(), vec!["q".to_string()]);
    }

    #[test]
    #[should_panic]
    fn interval_rejects_inverted_bounds() {
        Interval::bounded(3, 1);
    }

    #[test]
    fn interval_membership() {
        let i = Interval::bounded(2, 4);
        assert!(!i.contains(1));
        assert!(i.contains(2) && i.contains(4));
        assert!(!i.contains(5));
        assert!(Interval::Unbounded.contains(123456));
    }
}
