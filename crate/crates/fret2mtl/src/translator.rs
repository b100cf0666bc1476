//! Compositional translation of FRETISH requirements into MTL under three
//! trace semantics.
//!
//! A requirement is translated as a scope characterization, a trigger
//! formula, and a timed response, combined into one implication and lifted
//! to a global specification. The lifting depends on the chosen semantics:
//! `H` for past, `G` for infinite future traces, `LAST R ·` for finite
//! future traces. No boolean simplification is applied anywhere, so the
//! output structure mirrors the input fields one-to-one.

use crate::fretish::{Condition, Requirement, Scope, Timing};
use crate::mtl::{Interval, MtlFormula};

/// Trace semantics a requirement can be translated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    Past,
    FutureFinite,
    FutureInfinite,
}

impl Semantics {
    pub const ALL: [Semantics; 3] =
        [Semantics::Past, Semantics::FutureFinite, Semantics::FutureInfinite];

    pub fn label(&self) -> &'static str {
        match self {
            Semantics::Past => "past",
            Semantics::FutureFinite => "fin",
            Semantics::FutureInfinite => "inf",
        }
    }
}

const UNB: Interval = Interval::Unbounded;

/// The scope characterization: holds exactly at the positions belonging to
/// the scope's region.
pub fn mtl_of_scope(scope: &Scope) -> MtlFormula {
    use MtlFormula as F;
    let mode = F::atom;
    match scope {
        Scope::Global => F::True,
        Scope::In(m) => mode(m),
        Scope::NotIn(m) => mode(m).not(),
        Scope::OnlyIn(m) => mode(m).not(),
        Scope::Before(m) => F::historically(UNB, mode(m).not()),
        Scope::OnlyBefore(m) => F::once(UNB, mode(m)),
        Scope::After(m) => F::once(UNB, mode(m).not().and(mode(m).yesterday())),
        Scope::OnlyAfter(m) => F::historically(UNB, mode(m).yesterday().implies(mode(m))),
    }
}

/// The antecedent of the core implication. A continual condition applies
/// whenever scope and condition hold together; a trigger fires on the rising
/// edge of that conjunction. An absent condition is a trigger with the
/// condition set to TRUE, kept unsimplified.
pub fn triggers(scope: &Scope, condition: &Condition) -> MtlFormula {
    let phi = mtl_of_scope(scope);
    match condition {
        Condition::Continual(c) => phi.and(c.to_mtl()),
        Condition::Trigger(c) => rising_edge(phi, c.to_mtl()),
        Condition::None => rising_edge(phi, MtlFormula::True),
    }
}

fn rising_edge(phi: MtlFormula, cond: MtlFormula) -> MtlFormula {
    let active = phi.and(cond);
    active.clone().and(active.not().weak_yesterday())
}

/// Last instant of the scope region. Under finite-trace and past semantics
/// the final trace position also exits the scope; infinite traces have no
/// final position.
fn scope_exit(phi: &MtlFormula, semantics: Semantics) -> MtlFormula {
    let about_to_leave = phi.clone().and(phi.clone().not().next());
    match semantics {
        Semantics::FutureInfinite => about_to_leave,
        Semantics::FutureFinite | Semantics::Past => about_to_leave.or(MtlFormula::Last),
    }
}

/// `p U_phi q`: the scope-restricted until `p U (q ∧ phi)`.
fn scoped_until(p: MtlFormula, q: MtlFormula, phi: &MtlFormula) -> MtlFormula {
    MtlFormula::until(UNB, p, q.and(phi.clone()))
}

fn nested_next(steps: usize, f: MtlFormula) -> MtlFormula {
    (0..steps).fold(f, |acc, _| acc.next())
}

/// The timed-response consequent for one timing under the given scope and
/// semantics, with `resp` standing for the response expression.
///
/// Scopes divide into regular rows and "only" rows (the latter for the three
/// only-scopes, which forbid the behavior). Inside the consequent the scope
/// enters through its characterization `phi` and its σ-dependent exit
/// predicate; rows whose finite or past variant coincides with the infinite
/// one reuse that shape with the σ-dependent exit substituted.
pub fn timed_response(
    timing: &Timing,
    scope: &Scope,
    semantics: Semantics,
    resp: &MtlFormula,
) -> MtlFormula {
    use MtlFormula as F;
    use Semantics::*;
    if let Timing::Within(k) | Timing::For(k) | Timing::After(k) = timing {
        assert!(*k >= 1, "bounded timings need k >= 1");
    }
    let phi = mtl_of_scope(scope);
    let exit = scope_exit(&phi, semantics);
    let resp = resp.clone();
    let only = scope.is_only();

    match (timing, only) {
        (Timing::Immediately, false) => resp,
        (Timing::Immediately, true) => resp.not(),

        (Timing::Eventually, false) => match semantics {
            FutureInfinite | Past => scoped_until(phi.clone(), resp, &phi),
            FutureFinite => {
                scoped_until(F::Last.not().and(phi.clone()), resp, &phi)
            }
        },
        (Timing::Eventually, true) => match semantics {
            FutureInfinite => scoped_until(phi.clone(), resp, &phi).not(),
            FutureFinite => scoped_until(F::Last.not().and(phi.clone()), resp, &phi).not(),
            Past => F::release(UNB, exit, resp.not()),
        },

        (Timing::Next, false) => exit.not().implies(resp.next()),
        (Timing::Next, true) => exit.not().implies(resp.not().next()),

        (Timing::Always, false) => F::release(UNB, exit, resp),
        (Timing::Always, true) => match semantics {
            FutureInfinite | FutureFinite => F::release(UNB, exit, resp).not(),
            Past => scoped_until(F::Last.not().and(phi.clone()), resp.not(), &phi),
        },

        (Timing::Never, false) => F::release(UNB, exit, resp.not()),
        (Timing::Never, true) => match semantics {
            FutureInfinite | FutureFinite => F::release(UNB, exit, resp.not()).not(),
            Past => scoped_until(F::Last.not().and(phi.clone()), resp, &phi),
        },

        (Timing::Within(k), false) => {
            // response within k steps, or the scope ends first
            F::eventually(Interval::bounded(0, *k), resp)
                .or(F::eventually(Interval::bounded(0, k - 1), exit))
        }
        (Timing::Within(k), true) => match semantics {
            FutureInfinite | Past => F::globally(Interval::bounded(0, *k), resp.clone().not())
                .or(F::until(
                    Interval::bounded(0, *k),
                    resp.not().and(phi.clone()),
                    phi.clone().not(),
                )),
            FutureFinite => F::globally(Interval::bounded(0, *k), resp.clone().not())
                .or(F::release(UNB, exit, resp.not())),
        },

        (Timing::For(k), false) => match semantics {
            FutureInfinite | Past => F::globally(Interval::bounded(0, *k), resp.clone()).or(
                F::until(Interval::bounded(0, *k), resp.and(phi.clone()), phi.clone().not()),
            ),
            FutureFinite => F::globally(Interval::bounded(0, *k), resp.clone())
                .or(F::release(UNB, exit, resp)),
        },
        (Timing::For(k), true) => F::eventually(Interval::bounded(0, *k), resp.not())
            .or(F::eventually(Interval::bounded(0, k - 1), exit)),

        (Timing::After(k), false) => match semantics {
            FutureInfinite => F::globally(Interval::bounded(0, *k), resp.clone().not())
                .and(nested_next(k + 1, resp.clone()))
                .or(F::until(
                    Interval::bounded(0, k + 1),
                    resp.not().and(phi.clone()),
                    phi.clone().not(),
                )),
            FutureFinite => F::globally(Interval::bounded(0, *k), resp.clone().not())
                .or(F::release(UNB, exit.clone(), resp.clone().not()))
                .and(
                    F::eventually(Interval::bounded(0, k + 1), resp)
                        .or(F::eventually(Interval::bounded(0, *k), exit)),
                ),
            Past => F::globally(Interval::bounded(0, *k), resp.clone().not())
                .and(F::until(Interval::bounded(0, k + 1), resp.clone().not(), resp.clone()))
                .or(F::until(
                    Interval::bounded(0, k + 1),
                    resp.not().and(phi.clone()),
                    phi.clone().not(),
                )),
        },
        (Timing::After(k), true) => match semantics {
            FutureInfinite | Past => F::eventually(Interval::bounded(0, *k), resp.clone())
                .or(F::globally(Interval::bounded(0, k + 1), resp.not()))
                .or(F::until(Interval::bounded(0, k + 1), phi.clone(), phi.clone().not())),
            FutureFinite => F::eventually(Interval::bounded(0, *k), resp.clone())
                .or(F::eventually(Interval::bounded(0, k - 1), exit.clone()))
                .or(F::globally(Interval::bounded(0, k + 1), resp.clone().not())
                    .or(F::release(UNB, exit, resp.not()))),
        },

        (Timing::Until(stop), false) => {
            let stop = stop.to_mtl();
            match semantics {
                FutureInfinite | Past => F::globally(UNB, resp.clone()).or(F::until(
                    UNB,
                    resp,
                    stop.or(phi.clone().not().and(phi.clone().yesterday())),
                )),
                FutureFinite => F::until(
                    UNB,
                    resp.clone().and(phi.clone()),
                    resp.and(F::Last).or(stop).or(phi.clone().not()),
                ),
            }
        }
        (Timing::Until(stop), true) => {
            let stop = stop.to_mtl();
            match semantics {
                FutureInfinite | Past => F::release(UNB, resp.not(), stop.clone().not())
                    .or(F::release(UNB, exit, stop.not())),
                FutureFinite => F::release(UNB, resp.not().or(exit), stop.not()),
            }
        }

        (Timing::Before(stop), false) => {
            let stop = stop.to_mtl();
            match semantics {
                FutureInfinite | Past => F::release(UNB, resp, stop.clone().not())
                    .or(F::release(UNB, exit, stop.not())),
                FutureFinite => F::release(UNB, resp.or(exit), stop.not()),
            }
        }
        (Timing::Before(stop), true) => {
            let stop = stop.to_mtl();
            match semantics {
                FutureInfinite | Past => F::globally(UNB, resp.clone().not()).or(F::until(
                    UNB,
                    resp.not(),
                    stop.or(phi.clone().not().and(phi.clone().yesterday())),
                )),
                FutureFinite => F::release(
                    UNB,
                    stop.clone().or(exit.clone()),
                    resp.clone().not().or(stop),
                )
                .or(resp.clone().not().and(phi.clone().not()).and(phi.clone().not().next()))
                .or(F::release(UNB, exit, resp.not())),
            }
        }
    }
}

/// Translates a requirement: the core implication `triggers → timed
/// response` lifted to the whole trace.
pub fn translate(req: &Requirement, semantics: Semantics) -> MtlFormula {
    let resp = req.response.to_mtl();
    let core = triggers(&req.scope, &req.condition)
        .implies(timed_response(&req.timing, &req.scope, semantics, &resp));
    match semantics {
        Semantics::Past => MtlFormula::historically(UNB, core),
        Semantics::FutureInfinite => MtlFormula::globally(UNB, core),
        Semantics::FutureFinite => MtlFormula::release(UNB, MtlFormula::Last, core),
    }
}
