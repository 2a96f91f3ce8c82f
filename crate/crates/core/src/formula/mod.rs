//! Formula representation for the infinitary logic: core connectives
//! (variables, bottom, negation, implication, graded `nab`, countable
//! disjunction) plus the derived connectives that expand into them.
//!
//! Countable families are either explicit finite lists (with the usual
//! bottom-padding convention for members past the end) or schemas: a
//! template with a scalar hole instantiated along a closed-form rational
//! sequence from a small catalog.

mod json;
mod parse;
mod print;

pub use json::{family_from_json, family_to_json, formula_from_json, formula_to_json};
pub use parse::{parse, ParseError};

use std::collections::BTreeMap;
use std::sync::Arc;

use num::One;

use crate::rational::{pow2_inv, Rat, Rational01};

/// A scalar slot of a graded connective: either a concrete rational in
/// [0,1] or a schema hole (`@s` in the concrete syntax) filled at
/// instantiation time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Const(Rational01),
    Hole,
}

impl Scalar {
    pub fn constant(&self) -> Option<&Rational01> {
        match self {
            Scalar::Const(r) => Some(r),
            Scalar::Hole => None,
        }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, Scalar::Hole)
    }
}

impl From<Rational01> for Scalar {
    fn from(r: Rational01) -> Self {
        Scalar::Const(r)
    }
}

/// Formula AST. `Var`, `Bot`, `Neg`, `Imp`, `Nabla` and `Sup` are the core
/// nodes; everything else is derived sugar eliminated by
/// [`expand_derived`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Propositional variable `x1, x2, ...` (indices are 1-based).
    Var(u32),
    Bot,
    Top,
    Neg(Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    /// `nab(a, f)`, evaluated as `1 - a*(1 - e(f))`.
    Nabla(Scalar, Arc<Formula>),
    /// `del(a, f) = !nab(a, !f)`, evaluated as `a * e(f)`.
    Delta(Scalar, Arc<Formula>),
    OPlus(Arc<Formula>, Arc<Formula>),
    OTimes(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    /// `ramp(lo, hi, f)`: 0 for `e(f) <= lo`, affine in between, 1 for
    /// `e(f) >= hi`. Requires `lo < hi`. Derived: it expands into a stack
    /// of truncated sums, and exists so the characteristic-function
    /// families fit a schema with a single scalar hole.
    Ramp {
        lo: Scalar,
        hi: Scalar,
        body: Arc<Formula>,
    },
    /// Countable disjunction.
    Sup(CountableFamily),
    /// Countable conjunction, sugar for `!V{!f_n}`.
    Inf(CountableFamily),
}

/// Monotonicity declared on a schema's scalar sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonotoneHint {
    Increasing,
    Decreasing,
    None,
}

/// Closed-form rational sequences a schema can draw from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SeqDescriptor {
    /// `s_n = 1 - 2^-n`, increasing to 1.
    DyadicComplement,
    /// `s_n = r - r*2^-n`, increasing to `r`.
    DyadicRampBelow(Rational01),
    /// `s_n = r + (1-r)*2^-n`, decreasing to `r`.
    DyadicGapAbove(Rational01),
    /// `s_n = min(1, n*2^-m)`, increasing, reaches 1 at `n = 2^m`.
    DyadicLevels(u32),
    /// Finitely many explicit values followed by a constant tail.
    ExplicitEventuallyConstant {
        prefix: Vec<Rational01>,
        tail: Rational01,
    },
}

/// Direction of a scalar sequence, derived from the catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqDirection {
    Nondecreasing,
    Nonincreasing,
    Mixed,
}

/// Dyadic exponents stay small; indices are depth/sample bounds.
fn seq_exp(n: u64) -> u32 {
    u32::try_from(n).expect("sequence index too large")
}

impl SeqDescriptor {
    /// The nth value, n >= 1.
    pub fn value(&self, n: u64) -> Rational01 {
        assert!(n >= 1, "sequence indices start at 1");
        match self {
            SeqDescriptor::DyadicComplement => {
                Rational01::new(Rat::one() - pow2_inv(seq_exp(n)))
                    .expect("1 - 2^-n lies in [0,1]")
            }
            SeqDescriptor::DyadicRampBelow(r) => {
                let r = r.as_rat();
                Rational01::new(r - r * pow2_inv(seq_exp(n))).expect("r - r*2^-n lies in [0,1]")
            }
            SeqDescriptor::DyadicGapAbove(r) => {
                let r = r.as_rat();
                Rational01::new(r + (Rat::one() - r) * pow2_inv(seq_exp(n)))
                    .expect("r + (1-r)*2^-n lies in [0,1]")
            }
            SeqDescriptor::DyadicLevels(m) => {
                Rational01::clamped(Rat::from_integer(n.into()) * pow2_inv(*m))
            }
            SeqDescriptor::ExplicitEventuallyConstant { prefix, tail } => prefix
                .get((n - 1) as usize)
                .cloned()
                .unwrap_or_else(|| tail.clone()),
        }
    }

    /// Limit of the sequence as n grows.
    pub fn limit(&self) -> Rational01 {
        match self {
            SeqDescriptor::DyadicComplement | SeqDescriptor::DyadicLevels(_) => Rational01::one(),
            SeqDescriptor::DyadicRampBelow(r) | SeqDescriptor::DyadicGapAbove(r) => r.clone(),
            SeqDescriptor::ExplicitEventuallyConstant { tail, .. } => tail.clone(),
        }
    }

    pub fn direction(&self) -> SeqDirection {
        match self {
            SeqDescriptor::DyadicComplement
            | SeqDescriptor::DyadicRampBelow(_)
            | SeqDescriptor::DyadicLevels(_) => SeqDirection::Nondecreasing,
            SeqDescriptor::DyadicGapAbove(_) => SeqDirection::Nonincreasing,
            SeqDescriptor::ExplicitEventuallyConstant { prefix, tail } => {
                let mut vals = prefix.clone();
                vals.push(tail.clone());
                let nondec = vals.windows(2).all(|w| w[0] <= w[1]);
                let noninc = vals.windows(2).all(|w| w[0] >= w[1]);
                match (nondec, noninc) {
                    (true, _) => SeqDirection::Nondecreasing,
                    (_, true) => SeqDirection::Nonincreasing,
                    _ => SeqDirection::Mixed,
                }
            }
        }
    }

    /// Supremum of the generated value set, exact by the catalog's closed
    /// forms.
    pub fn sup(&self) -> Rational01 {
        match self.direction() {
            SeqDirection::Nondecreasing => self.limit(),
            SeqDirection::Nonincreasing => self.value(1),
            SeqDirection::Mixed => self.finite_values().into_iter().max().expect("nonempty"),
        }
    }

    /// Infimum of the generated value set.
    pub fn inf(&self) -> Rational01 {
        match self.direction() {
            SeqDirection::Nondecreasing => self.value(1),
            SeqDirection::Nonincreasing => self.limit(),
            SeqDirection::Mixed => self.finite_values().into_iter().min().expect("nonempty"),
        }
    }

    /// All distinct values when the sequence has finitely many (the
    /// explicit catalog entry); used for the mixed-direction fallback.
    fn finite_values(&self) -> Vec<Rational01> {
        match self {
            SeqDescriptor::ExplicitEventuallyConstant { prefix, tail } => {
                let mut vals = prefix.clone();
                vals.push(tail.clone());
                vals
            }
            _ => vec![],
        }
    }
}

/// A schema: template with a scalar hole, instantiated along `seq`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilySchema {
    pub template: Arc<Formula>,
    pub seq: SeqDescriptor,
    pub monotone: MonotoneHint,
}

impl FamilySchema {
    /// The nth instantiation: every hole replaced by `seq(n)`.
    pub fn nth(&self, n: u64) -> Formula {
        self.template.fill_hole(&self.seq.value(n))
    }
}

/// A countable family of formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CountableFamily {
    /// Nonempty explicit list; members past the end are `0` (bottom).
    Finite(Vec<Formula>),
    Schema(FamilySchema),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("finite families must be nonempty")]
    EmptyFinite,
}

impl CountableFamily {
    pub fn finite(members: Vec<Formula>) -> Result<Self, FamilyError> {
        if members.is_empty() {
            return Err(FamilyError::EmptyFinite);
        }
        Ok(CountableFamily::Finite(members))
    }

    pub fn schema(template: Formula, seq: SeqDescriptor, monotone: MonotoneHint) -> Self {
        CountableFamily::Schema(FamilySchema {
            template: Arc::new(template),
            seq,
            monotone,
        })
    }

    /// The nth member, n >= 1. Finite lists pad with bottom.
    pub fn nth(&self, n: u64) -> Formula {
        assert!(n >= 1, "family indices start at 1");
        match self {
            CountableFamily::Finite(members) => members
                .get((n - 1) as usize)
                .cloned()
                .unwrap_or(Formula::Bot),
            CountableFamily::Schema(schema) => schema.nth(n),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CountableFamily::Finite(_))
    }

    /// Apply `f` to every member (template for schemas).
    pub fn map(&self, f: impl Fn(&Formula) -> Formula) -> CountableFamily {
        match self {
            CountableFamily::Finite(members) => {
                CountableFamily::Finite(members.iter().map(f).collect())
            }
            CountableFamily::Schema(schema) => CountableFamily::Schema(FamilySchema {
                template: Arc::new(f(&schema.template)),
                seq: schema.seq.clone(),
                monotone: schema.monotone,
            }),
        }
    }
}

/// Top-level convenience for `CountableFamily::nth`.
pub fn family_nth(family: &CountableFamily, n: u64) -> Formula {
    family.nth(n)
}

impl Formula {
    pub fn var(i: u32) -> Formula {
        assert!(i >= 1, "variable indices are 1-based");
        Formula::Var(i)
    }

    pub fn bot() -> Formula {
        Formula::Bot
    }

    pub fn top() -> Formula {
        Formula::Top
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Arc::new(f))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn nabla(s: impl Into<Scalar>, f: Formula) -> Formula {
        Formula::Nabla(s.into(), Arc::new(f))
    }

    pub fn delta(s: impl Into<Scalar>, f: Formula) -> Formula {
        Formula::Delta(s.into(), Arc::new(f))
    }

    pub fn oplus(a: Formula, b: Formula) -> Formula {
        Formula::OPlus(Arc::new(a), Arc::new(b))
    }

    pub fn otimes(a: Formula, b: Formula) -> Formula {
        Formula::OTimes(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn ramp(lo: impl Into<Scalar>, hi: impl Into<Scalar>, body: Formula) -> Formula {
        Formula::Ramp {
            lo: lo.into(),
            hi: hi.into(),
            body: Arc::new(body),
        }
    }

    pub fn sup(family: CountableFamily) -> Formula {
        Formula::Sup(family)
    }

    pub fn inf(family: CountableFamily) -> Formula {
        Formula::Inf(family)
    }

    /// Variables occurring in the formula (including family members and
    /// schema templates).
    pub fn vars(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<u32>) {
        match self {
            Formula::Var(i) => out.push(*i),
            Formula::Bot | Formula::Top => {}
            Formula::Neg(f) | Formula::Nabla(_, f) | Formula::Delta(_, f) => f.collect_vars(out),
            Formula::Ramp { body, .. } => body.collect_vars(out),
            Formula::Imp(a, b)
            | Formula::OPlus(a, b)
            | Formula::OTimes(a, b)
            | Formula::Or(a, b)
            | Formula::And(a, b)
            | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Sup(fam) | Formula::Inf(fam) => match fam {
                CountableFamily::Finite(members) => {
                    members.iter().for_each(|m| m.collect_vars(out))
                }
                CountableFamily::Schema(schema) => schema.template.collect_vars(out),
            },
        }
    }

    /// Largest variable index, or 0 for a closed formula.
    pub fn max_var(&self) -> u32 {
        self.vars().last().copied().unwrap_or(0)
    }

    /// True when the formula contains a countable disjunction or
    /// conjunction node (finite-list or schematic).
    pub fn has_family(&self) -> bool {
        self.any_node(&mut |f| matches!(f, Formula::Sup(_) | Formula::Inf(_)))
    }

    /// True when some family node is schematic (genuinely infinitary).
    pub fn has_schema_family(&self) -> bool {
        self.any_node(&mut |f| {
            matches!(
                f,
                Formula::Sup(CountableFamily::Schema(_)) | Formula::Inf(CountableFamily::Schema(_))
            )
        })
    }

    /// True when some scalar slot is a hole.
    pub fn has_holes(&self) -> bool {
        self.any_node(&mut |f| match f {
            Formula::Nabla(s, _) | Formula::Delta(s, _) => s.is_hole(),
            Formula::Ramp { lo, hi, .. } => lo.is_hole() || hi.is_hole(),
            _ => false,
        })
    }

    fn any_node(&self, pred: &mut impl FnMut(&Formula) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top => false,
            Formula::Neg(f) | Formula::Nabla(_, f) | Formula::Delta(_, f) => f.any_node(pred),
            Formula::Ramp { body, .. } => body.any_node(pred),
            Formula::Imp(a, b)
            | Formula::OPlus(a, b)
            | Formula::OTimes(a, b)
            | Formula::Or(a, b)
            | Formula::And(a, b)
            | Formula::Iff(a, b) => a.any_node(pred) || b.any_node(pred),
            Formula::Sup(fam) | Formula::Inf(fam) => match fam {
                CountableFamily::Finite(members) => members.iter().any(|m| m.any_node(pred)),
                CountableFamily::Schema(schema) => schema.template.any_node(pred),
            },
        }
    }

    /// Replace every scalar hole with the given constant.
    pub fn fill_hole(&self, value: &Rational01) -> Formula {
        let fill = |s: &Scalar| match s {
            Scalar::Hole => Scalar::Const(value.clone()),
            c => c.clone(),
        };
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top => self.clone(),
            Formula::Neg(f) => Formula::neg(f.fill_hole(value)),
            Formula::Imp(a, b) => Formula::imp(a.fill_hole(value), b.fill_hole(value)),
            Formula::Nabla(s, f) => Formula::nabla(fill(s), f.fill_hole(value)),
            Formula::Delta(s, f) => Formula::delta(fill(s), f.fill_hole(value)),
            Formula::OPlus(a, b) => Formula::oplus(a.fill_hole(value), b.fill_hole(value)),
            Formula::OTimes(a, b) => Formula::otimes(a.fill_hole(value), b.fill_hole(value)),
            Formula::Or(a, b) => Formula::or(a.fill_hole(value), b.fill_hole(value)),
            Formula::And(a, b) => Formula::and(a.fill_hole(value), b.fill_hole(value)),
            Formula::Iff(a, b) => Formula::iff(a.fill_hole(value), b.fill_hole(value)),
            Formula::Ramp { lo, hi, body } => {
                Formula::ramp(fill(lo), fill(hi), body.fill_hole(value))
            }
            Formula::Sup(fam) => Formula::Sup(fam.map(|m| m.fill_hole(value))),
            Formula::Inf(fam) => Formula::Inf(fam.map(|m| m.fill_hole(value))),
        }
    }

    /// Simultaneous substitution of formulas for variables.
    pub fn subst(&self, map: &BTreeMap<u32, Formula>) -> Formula {
        match self {
            Formula::Var(i) => map.get(i).cloned().unwrap_or_else(|| self.clone()),
            Formula::Bot | Formula::Top => self.clone(),
            Formula::Neg(f) => Formula::neg(f.subst(map)),
            Formula::Imp(a, b) => Formula::imp(a.subst(map), b.subst(map)),
            Formula::Nabla(s, f) => Formula::Nabla(s.clone(), Arc::new(f.subst(map))),
            Formula::Delta(s, f) => Formula::Delta(s.clone(), Arc::new(f.subst(map))),
            Formula::OPlus(a, b) => Formula::oplus(a.subst(map), b.subst(map)),
            Formula::OTimes(a, b) => Formula::otimes(a.subst(map), b.subst(map)),
            Formula::Or(a, b) => Formula::or(a.subst(map), b.subst(map)),
            Formula::And(a, b) => Formula::and(a.subst(map), b.subst(map)),
            Formula::Iff(a, b) => Formula::iff(a.subst(map), b.subst(map)),
            Formula::Ramp { lo, hi, body } => Formula::Ramp {
                lo: lo.clone(),
                hi: hi.clone(),
                body: Arc::new(body.subst(map)),
            },
            Formula::Sup(fam) => Formula::Sup(fam.map(|m| m.subst(map))),
            Formula::Inf(fam) => Formula::Inf(fam.map(|m| m.subst(map))),
        }
    }

    /// True when only core nodes occur (after expansion).
    pub fn is_core(&self) -> bool {
        !self.any_node(&mut |f| {
            matches!(
                f,
                Formula::Top
                    | Formula::Delta(..)
                    | Formula::OPlus(..)
                    | Formula::OTimes(..)
                    | Formula::Or(..)
                    | Formula::And(..)
                    | Formula::Iff(..)
                    | Formula::Ramp { .. }
                    | Formula::Inf(..)
            )
        })
    }
}

/// `min(1, k * e(f))` for a positive integer `k`, built by double-and-add
/// over the truncated sum. Saturation composes: for nonnegative summands,
/// `min(1, a*t) (+) min(1, b*t) = min(1, (a+b)*t)`. Subtrees are shared
/// through `Arc` so downstream passes can memoize by pointer.
fn oplus_scale(k: u64, f: &Arc<Formula>) -> Arc<Formula> {
    assert!(k >= 1);
    if k == 1 {
        f.clone()
    } else if k % 2 == 0 {
        let half = oplus_scale(k / 2, f);
        Arc::new(Formula::OPlus(half.clone(), half))
    } else {
        Arc::new(Formula::OPlus(oplus_scale(k - 1, f), f.clone()))
    }
}

/// Expansion of `ramp(lo, hi, f)` into core connectives: with slope
/// `1/(hi-lo) = u/v`, the ramp is `min(1, u * del(1/v, max(0, e(f)-lo)))`,
/// and `max(0, x - lo) = x (.) !del(lo, 1)`.
fn expand_ramp(lo: &Rational01, hi: &Rational01, body: Formula) -> Formula {
    assert!(lo < hi, "ramp requires lo < hi");
    let width = hi.as_rat() - lo.as_rat();
    // slope u/v = 1/width, u >= v since width <= 1
    let to_u64 =
        |b: &num::BigInt| -> u64 { u64::try_from(b.clone()).expect("ramp slope exceeds u64") };
    let (u, v) = (to_u64(width.denom()), to_u64(width.numer()));
    let shifted = if lo.is_zero() {
        Arc::new(body)
    } else {
        // body (.) c with e(c) = 1 - lo, i.e. !(body -> !c); the inner !c
        // is !nab(lo, 0), which has value lo.
        Arc::new(Formula::neg(Formula::imp(
            body,
            Formula::neg(Formula::nabla(lo.clone(), Formula::Bot)),
        )))
    };
    let scaled_down = if v == 1 {
        shifted
    } else {
        let inv_v = Rational01::new(Rat::new(num::BigInt::one(), num::BigInt::from(v)))
            .expect("1/v in [0,1]");
        // del(1/v, shifted) in core form
        Arc::new(Formula::Neg(Arc::new(Formula::Nabla(
            Scalar::Const(inv_v),
            Arc::new(Formula::Neg(shifted)),
        ))))
    };
    (*oplus_scale(u, &scaled_down)).clone()
}

/// Eliminate all derived connectives. The result uses only core nodes.
///
/// Idempotent. A `ramp` whose scalar slots still contain schema holes is
/// left in place (its expansion depends on the hole's value); holes only
/// occur inside schema templates, which are instantiated before any
/// evaluation or compilation.
pub fn expand_derived(f: &Formula) -> Formula {
    match f {
        Formula::Var(_) | Formula::Bot => f.clone(),
        Formula::Top => Formula::neg(Formula::Bot),
        Formula::Neg(g) => Formula::neg(expand_derived(g)),
        Formula::Imp(a, b) => Formula::imp(expand_derived(a), expand_derived(b)),
        Formula::Nabla(s, g) => Formula::Nabla(s.clone(), Arc::new(expand_derived(g))),
        Formula::Delta(s, g) => Formula::neg(Formula::Nabla(
            s.clone(),
            Arc::new(Formula::neg(expand_derived(g))),
        )),
        Formula::OPlus(a, b) => Formula::imp(Formula::neg(expand_derived(a)), expand_derived(b)),
        Formula::OTimes(a, b) => Formula::neg(Formula::imp(
            expand_derived(a),
            Formula::neg(expand_derived(b)),
        )),
        Formula::Or(a, b) => {
            let a = Arc::new(expand_derived(a));
            let b = Arc::new(expand_derived(b));
            Formula::Imp(Arc::new(Formula::Imp(a, b.clone())), b)
        }
        Formula::And(a, b) => {
            // !( (!a -> !b) -> !b ) , i.e. !(!a \/ !b)
            let na = Arc::new(Formula::neg(expand_derived(a)));
            let nb = Arc::new(Formula::neg(expand_derived(b)));
            Formula::Neg(Arc::new(Formula::Imp(
                Arc::new(Formula::Imp(na, nb.clone())),
                nb,
            )))
        }
        Formula::Iff(a, b) => {
            let a = Arc::new(expand_derived(a));
            let b = Arc::new(expand_derived(b));
            let fwd = Formula::Imp(a.clone(), b.clone());
            let bwd = Formula::Imp(b, a);
            // fwd (.) bwd
            Formula::Neg(Arc::new(Formula::Imp(
                Arc::new(fwd),
                Arc::new(Formula::Neg(Arc::new(bwd))),
            )))
        }
        Formula::Ramp { lo, hi, body } => match (lo, hi) {
            (Scalar::Const(lo), Scalar::Const(hi)) => {
                expand_derived(&expand_ramp(lo, hi, (**body).clone()))
            }
            _ => Formula::Ramp {
                lo: lo.clone(),
                hi: hi.clone(),
                body: Arc::new(expand_derived(body)),
            },
        },
        Formula::Sup(fam) => Formula::Sup(fam.map(|m| expand_derived(m))),
        Formula::Inf(fam) => {
            Formula::neg(Formula::Sup(fam.map(|m| Formula::neg(expand_derived(m)))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Formula {
        Formula::var(i)
    }

    #[test]
    fn expansion_of_or() {
        let f = Formula::or(x(1), x(2));
        let expanded = expand_derived(&f);
        assert_eq!(
            expanded,
            Formula::imp(Formula::imp(x(1), x(2)), x(2))
        );
    }

    #[test]
    fn expansion_of_inf_negates_members() {
        let fam = CountableFamily::finite(vec![x(1), x(2)]).unwrap();
        let f = Formula::inf(fam);
        let expanded = expand_derived(&f);
        match expanded {
            Formula::Neg(inner) => match &*inner {
                Formula::Sup(CountableFamily::Finite(members)) => {
                    assert_eq!(members.len(), 2);
                    assert_eq!(members[0], Formula::neg(x(1)));
                }
                other => panic!("expected sup, got {other:?}"),
            },
            other => panic!("expected negation, got {other:?}"),
        }
    }

    #[test]
    fn expansion_idempotent() {
        let f = Formula::iff(
            Formula::oplus(x(1), Formula::delta(Rational01::from_ints(1, 2), x(2))),
            Formula::and(x(1), Formula::top()),
        );
        let once = expand_derived(&f);
        assert!(once.is_core());
        assert_eq!(expand_derived(&once), once);
    }

    #[test]
    fn family_padding() {
        let fam = CountableFamily::finite(vec![x(1), x(2)]).unwrap();
        assert_eq!(fam.nth(1), x(1));
        assert_eq!(fam.nth(2), x(2));
        assert_eq!(fam.nth(5), Formula::Bot);
    }

    #[test]
    fn schema_instantiation() {
        let schema = CountableFamily::schema(
            Formula::delta(Scalar::Hole, x(1)),
            SeqDescriptor::DyadicComplement,
            MonotoneHint::Increasing,
        );
        assert_eq!(
            schema.nth(3),
            Formula::delta(Rational01::from_ints(7, 8), x(1))
        );
    }

    #[test]
    fn sequence_values() {
        let below = SeqDescriptor::DyadicRampBelow(Rational01::from_ints(1, 2));
        assert_eq!(below.value(1), Rational01::from_ints(1, 4));
        assert_eq!(below.value(2), Rational01::from_ints(3, 8));
        assert_eq!(below.limit(), Rational01::from_ints(1, 2));
        let above = SeqDescriptor::DyadicGapAbove(Rational01::from_ints(1, 2));
        assert_eq!(above.value(1), Rational01::from_ints(3, 4));
        assert_eq!(above.direction(), SeqDirection::Nonincreasing);
        let levels = SeqDescriptor::DyadicLevels(2);
        assert_eq!(levels.value(3), Rational01::from_ints(3, 4));
        assert_eq!(levels.value(9), Rational01::one());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let f = Formula::imp(x(1), x(2));
        let mut map = BTreeMap::new();
        map.insert(1, x(2));
        map.insert(2, x(1));
        assert_eq!(f.subst(&map), Formula::imp(x(2), x(1)));
    }

    #[test]
    fn ramp_expansion_matches_shape() {
        // ramp(1/4, 1/2, x1): slope 4, so min(1, 4 * max(0, x - 1/4))
        let f = Formula::ramp(
            Rational01::from_ints(1, 4),
            Rational01::from_ints(1, 2),
            x(1),
        );
        let expanded = expand_derived(&f);
        assert!(expanded.is_core());
        assert!(!expanded.has_holes());
    }
}
