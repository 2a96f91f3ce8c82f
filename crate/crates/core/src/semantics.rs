//! Exact evaluation in the standard algebra on [0,1].
//!
//! `eval` computes the value of a schema-free formula at a valuation.
//! `eval_sup` additionally handles schematic countable families, returning
//! monotone lower/upper bounds that collapse to an exact value whenever the
//! member values admit a closed form: every catalog sequence is monotone
//! with a known rational limit, so a template whose hole occurs with
//! uniform polarity has a computable supremum.

use std::collections::BTreeMap;

use crate::formula::{CountableFamily, Formula, Scalar, SeqDirection};
use crate::rational::Rational01;

/// Assignment of unit-interval values to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    assignment: BTreeMap<u32, Rational01>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, Rational01)>) -> Self {
        Valuation {
            assignment: pairs.into_iter().collect(),
        }
    }

    /// Valuation binding `x1..xn` to the coordinates of a point.
    pub fn from_point(point: &[Rational01]) -> Self {
        Valuation {
            assignment: point
                .iter()
                .enumerate()
                .map(|(i, r)| (i as u32 + 1, r.clone()))
                .collect(),
        }
    }

    pub fn set(&mut self, var: u32, value: Rational01) {
        self.assignment.insert(var, value);
    }

    pub fn get(&self, var: u32) -> Option<&Rational01> {
        self.assignment.get(&var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable x{0} is not bound by the valuation")]
    UnboundVariable(u32),
    #[error("formula contains a schematic family; use eval_sup")]
    SchematicFamily,
    #[error("formula contains an unfilled scalar hole")]
    UnfilledHole,
    #[error("ramp with lo >= hi after instantiation")]
    DegenerateRamp,
    #[error("depth must be at least 1")]
    ZeroDepth,
}

fn scalar_value(s: &Scalar) -> Result<&Rational01, EvalError> {
    s.constant().ok_or(EvalError::UnfilledHole)
}

/// Exact evaluation. Derived connectives are evaluated by their standard
/// semantics; finite families evaluate to the max/min of their members
/// (bottom padding never changes either). Schematic families are rejected.
pub fn eval(f: &Formula, v: &Valuation) -> Result<Rational01, EvalError> {
    match f {
        Formula::Var(i) => v.get(*i).cloned().ok_or(EvalError::UnboundVariable(*i)),
        Formula::Bot => Ok(Rational01::zero()),
        Formula::Top => Ok(Rational01::one()),
        Formula::Neg(g) => Ok(eval(g, v)?.complement()),
        Formula::Imp(a, b) => Ok(eval(a, v)?.imp(&eval(b, v)?)),
        Formula::Nabla(s, g) => Ok(eval(g, v)?.nabla(scalar_value(s)?)),
        Formula::Delta(s, g) => Ok(eval(g, v)?.delta(scalar_value(s)?)),
        Formula::OPlus(a, b) => Ok(eval(a, v)?.oplus(&eval(b, v)?)),
        Formula::OTimes(a, b) => Ok(eval(a, v)?.otimes(&eval(b, v)?)),
        Formula::Or(a, b) => Ok(eval(a, v)?.max_of(&eval(b, v)?)),
        Formula::And(a, b) => Ok(eval(a, v)?.min_of(&eval(b, v)?)),
        Formula::Iff(a, b) => {
            let (a, b) = (eval(a, v)?, eval(b, v)?);
            // (a -> b) /\ (b -> a) = 1 - |a - b|
            Ok(a.imp(&b).min_of(&b.imp(&a)))
        }
        Formula::Ramp { lo, hi, body } => {
            let lo = scalar_value(lo)?;
            let hi = scalar_value(hi)?;
            if lo >= hi {
                return Err(EvalError::DegenerateRamp);
            }
            let x = eval(body, v)?;
            Ok(ramp_value(lo, hi, &x))
        }
        Formula::Sup(fam) => match fam {
            CountableFamily::Finite(members) => {
                let mut best = Rational01::zero();
                for m in members {
                    best = best.max_of(&eval(m, v)?);
                }
                Ok(best)
            }
            CountableFamily::Schema(_) => Err(EvalError::SchematicFamily),
        },
        Formula::Inf(fam) => match fam {
            CountableFamily::Finite(members) => {
                let mut best = Rational01::one();
                for m in members {
                    best = best.min_of(&eval(m, v)?);
                }
                Ok(best)
            }
            CountableFamily::Schema(_) => Err(EvalError::SchematicFamily),
        },
    }
}

fn ramp_value(lo: &Rational01, hi: &Rational01, x: &Rational01) -> Rational01 {
    if x <= lo {
        Rational01::zero()
    } else if x >= hi {
        Rational01::one()
    } else {
        Rational01::clamped((x.as_rat() - lo.as_rat()) / (hi.as_rat() - lo.as_rat()))
    }
}

/// Result of a bounded evaluation of a formula with schematic families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsResult {
    pub lower: Rational01,
    pub upper: Rational01,
    pub exact: bool,
}

impl BoundsResult {
    fn point(value: Rational01) -> Self {
        BoundsResult {
            lower: value.clone(),
            upper: value,
            exact: true,
        }
    }

    fn range(lower: Rational01, upper: Rational01) -> Self {
        let exact = lower == upper;
        BoundsResult { lower, upper, exact }
    }
}

/// Polarity of the scalar hole inside a schema template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Constant,
    Nondecreasing,
    Nonincreasing,
    Mixed,
}

fn combine(a: Polarity, b: Polarity) -> Polarity {
    use Polarity::*;
    match (a, b) {
        (Constant, p) | (p, Constant) => p,
        (Mixed, _) | (_, Mixed) => Mixed,
        (Nondecreasing, Nondecreasing) => Nondecreasing,
        (Nonincreasing, Nonincreasing) => Nonincreasing,
        _ => Mixed,
    }
}

/// Monotonicity of the formula's value in the hole scalar, at a position
/// of the given variance.
fn hole_polarity(f: &Formula, covariant: bool) -> Polarity {
    let here = |antitone_in_scalar: bool, s: &Scalar| -> Polarity {
        if !s.is_hole() {
            Polarity::Constant
        } else if antitone_in_scalar == covariant {
            Polarity::Nonincreasing
        } else {
            Polarity::Nondecreasing
        }
    };
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => Polarity::Constant,
        Formula::Neg(g) => hole_polarity(g, !covariant),
        Formula::Imp(a, b) => combine(hole_polarity(a, !covariant), hole_polarity(b, covariant)),
        // nab is antitone in its scalar, del is monotone
        Formula::Nabla(s, g) => combine(here(true, s), hole_polarity(g, covariant)),
        Formula::Delta(s, g) => combine(here(false, s), hole_polarity(g, covariant)),
        Formula::OPlus(a, b) | Formula::OTimes(a, b) | Formula::Or(a, b) | Formula::And(a, b) => {
            combine(hole_polarity(a, covariant), hole_polarity(b, covariant))
        }
        Formula::Iff(a, b) => {
            // not monotone in either argument; only a hole-free iff is safe
            if a.has_holes() || b.has_holes() {
                Polarity::Mixed
            } else {
                Polarity::Constant
            }
        }
        // larger knees shift the ramp right, shrinking the value
        Formula::Ramp { lo, hi, body } => combine(
            combine(here(true, lo), here(true, hi)),
            hole_polarity(body, covariant),
        ),
        Formula::Sup(fam) | Formula::Inf(fam) => match fam {
            CountableFamily::Finite(members) => members
                .iter()
                .map(|m| hole_polarity(m, covariant))
                .fold(Polarity::Constant, combine),
            CountableFamily::Schema(schema) => hole_polarity(&schema.template, covariant),
        },
    }
}

/// Check every instantiated ramp is nondegenerate.
fn ramps_valid(f: &Formula) -> bool {
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => true,
        Formula::Neg(g) | Formula::Nabla(_, g) | Formula::Delta(_, g) => ramps_valid(g),
        Formula::Imp(a, b)
        | Formula::OPlus(a, b)
        | Formula::OTimes(a, b)
        | Formula::Or(a, b)
        | Formula::And(a, b)
        | Formula::Iff(a, b) => ramps_valid(a) && ramps_valid(b),
        Formula::Ramp { lo, hi, body } => {
            let ok = match (lo.constant(), hi.constant()) {
                (Some(a), Some(b)) => a < b,
                _ => true,
            };
            ok && ramps_valid(body)
        }
        Formula::Sup(fam) | Formula::Inf(fam) => match fam {
            CountableFamily::Finite(members) => members.iter().all(ramps_valid),
            CountableFamily::Schema(schema) => ramps_valid(&schema.template),
        },
    }
}

/// Bounded evaluation; see module docs. `depth >= 1`.
pub fn eval_sup(f: &Formula, v: &Valuation, depth: u64) -> Result<BoundsResult, EvalError> {
    eval_sup_with(f, v, depth, true)
}

/// Like [`eval_sup`], with the closed-form shortcut switchable (useful for
/// exercising the finite-sampling path).
pub fn eval_sup_with(
    f: &Formula,
    v: &Valuation,
    depth: u64,
    use_closed_form: bool,
) -> Result<BoundsResult, EvalError> {
    if depth == 0 {
        return Err(EvalError::ZeroDepth);
    }
    bounds(f, v, depth, use_closed_form)
}

fn bounds(f: &Formula, v: &Valuation, depth: u64, closed: bool) -> Result<BoundsResult, EvalError> {
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => Ok(BoundsResult::point(eval(f, v)?)),
        Formula::Neg(g) => {
            let b = bounds(g, v, depth, closed)?;
            Ok(BoundsResult::range(
                b.upper.complement(),
                b.lower.complement(),
            ))
        }
        Formula::Imp(a, b) => {
            let ba = bounds(a, v, depth, closed)?;
            let bb = bounds(b, v, depth, closed)?;
            Ok(BoundsResult::range(
                ba.upper.imp(&bb.lower),
                ba.lower.imp(&bb.upper),
            ))
        }
        Formula::Nabla(s, g) => {
            let alpha = scalar_value(s)?;
            let b = bounds(g, v, depth, closed)?;
            Ok(BoundsResult::range(
                b.lower.nabla(alpha),
                b.upper.nabla(alpha),
            ))
        }
        Formula::Delta(s, g) => {
            let alpha = scalar_value(s)?;
            let b = bounds(g, v, depth, closed)?;
            Ok(BoundsResult::range(
                b.lower.delta(alpha),
                b.upper.delta(alpha),
            ))
        }
        Formula::OPlus(a, b) => {
            let ba = bounds(a, v, depth, closed)?;
            let bb = bounds(b, v, depth, closed)?;
            Ok(BoundsResult::range(
                ba.lower.oplus(&bb.lower),
                ba.upper.oplus(&bb.upper),
            ))
        }
        Formula::OTimes(a, b) => {
            let ba = bounds(a, v, depth, closed)?;
            let bb = bounds(b, v, depth, closed)?;
            Ok(BoundsResult::range(
                ba.lower.otimes(&bb.lower),
                ba.upper.otimes(&bb.upper),
            ))
        }
        Formula::Or(a, b) => {
            let ba = bounds(a, v, depth, closed)?;
            let bb = bounds(b, v, depth, closed)?;
            Ok(BoundsResult::range(
                ba.lower.max_of(&bb.lower),
                ba.upper.max_of(&bb.upper),
            ))
        }
        Formula::And(a, b) => {
            let ba = bounds(a, v, depth, closed)?;
            let bb = bounds(b, v, depth, closed)?;
            Ok(BoundsResult::range(
                ba.lower.min_of(&bb.lower),
                ba.upper.min_of(&bb.upper),
            ))
        }
        Formula::Iff(a, b) => {
            let ba = bounds(a, v, depth, closed)?;
            let bb = bounds(b, v, depth, closed)?;
            // 1 - |a - b| over the rectangle of bounds
            let zero = num::Zero::zero();
            let min_gap = {
                let g1 = ba.lower.as_rat() - bb.upper.as_rat();
                let g2 = bb.lower.as_rat() - ba.upper.as_rat();
                Rational01::clamped(g1.max(g2).max(zero))
            };
            let max_gap = {
                let g1 = ba.upper.as_rat() - bb.lower.as_rat();
                let g2 = bb.upper.as_rat() - ba.lower.as_rat();
                Rational01::clamped(g1.max(g2))
            };
            Ok(BoundsResult::range(
                max_gap.complement(),
                min_gap.complement(),
            ))
        }
        Formula::Ramp { lo, hi, body } => {
            let lo = scalar_value(lo)?;
            let hi = scalar_value(hi)?;
            if lo >= hi {
                return Err(EvalError::DegenerateRamp);
            }
            let b = bounds(body, v, depth, closed)?;
            Ok(BoundsResult::range(
                ramp_value(lo, hi, &b.lower),
                ramp_value(lo, hi, &b.upper),
            ))
        }
        Formula::Sup(fam) => family_bounds(fam, v, depth, closed, true),
        Formula::Inf(fam) => family_bounds(fam, v, depth, closed, false),
    }
}

fn family_bounds(
    fam: &CountableFamily,
    v: &Valuation,
    depth: u64,
    closed: bool,
    is_sup: bool,
) -> Result<BoundsResult, EvalError> {
    match fam {
        CountableFamily::Finite(members) => {
            let mut acc: Option<(Rational01, Rational01)> = None;
            for m in members {
                let b = bounds(m, v, depth, closed)?;
                acc = Some(match acc {
                    None => (b.lower, b.upper),
                    Some((lo, hi)) => {
                        if is_sup {
                            (lo.max_of(&b.lower), hi.max_of(&b.upper))
                        } else {
                            (lo.min_of(&b.lower), hi.min_of(&b.upper))
                        }
                    }
                });
            }
            let (lo, hi) = acc.expect("finite families are nonempty");
            Ok(BoundsResult::range(lo, hi))
        }
        CountableFamily::Schema(schema) => {
            if closed {
                if let Some(result) = schema_closed_form(schema, v, depth, is_sup)? {
                    return Ok(result);
                }
            }
            // sampling fallback: bound from the first `depth` members
            let mut sampled: Option<Rational01> = None;
            for n in 1..=depth {
                let member = schema.nth(n);
                let b = bounds(&member, v, depth, closed)?;
                let candidate = if is_sup { b.lower } else { b.upper };
                sampled = Some(match sampled {
                    None => candidate,
                    Some(prev) => {
                        if is_sup {
                            prev.max_of(&candidate)
                        } else {
                            prev.min_of(&candidate)
                        }
                    }
                });
            }
            let sampled = sampled.expect("depth >= 1");
            if is_sup {
                Ok(BoundsResult::range(sampled, Rational01::one()))
            } else {
                Ok(BoundsResult::range(Rational01::zero(), sampled))
            }
        }
    }
}

/// Closed-form family value: the member value is `h(s_n)` for a monotone
/// `h` (uniform-polarity hole) and a monotone scalar sequence, so the
/// supremum (infimum) is attained at a known scalar: the sequence limit or
/// its first element. `h` is piecewise linear, hence continuous, so the
/// limit scalar yields the exact limit value.
fn schema_closed_form(
    schema: &crate::formula::FamilySchema,
    v: &Valuation,
    depth: u64,
    is_sup: bool,
) -> Result<Option<BoundsResult>, EvalError> {
    let seq = &schema.seq;
    if seq.direction() == SeqDirection::Mixed {
        // explicit sequences take finitely many values; fold them all
        if let crate::formula::SeqDescriptor::ExplicitEventuallyConstant { prefix, .. } = seq {
            let count = prefix.len() as u64 + 1;
            let mut best: Option<Rational01> = None;
            for n in 1..=count {
                let member = schema.nth(n);
                if !ramps_valid(&member) {
                    return Ok(None);
                }
                let b = bounds(&member, v, depth, true)?;
                if !b.exact {
                    return Ok(None);
                }
                best = Some(match best {
                    None => b.lower,
                    Some(prev) => {
                        if is_sup {
                            prev.max_of(&b.lower)
                        } else {
                            prev.min_of(&b.lower)
                        }
                    }
                });
            }
            return Ok(best.map(BoundsResult::point));
        }
        return Ok(None);
    }
    let polarity = hole_polarity(&schema.template, true);
    let target = match polarity {
        Polarity::Mixed => return Ok(None),
        Polarity::Constant => seq.value(1),
        Polarity::Nondecreasing => {
            if is_sup {
                seq.sup()
            } else {
                seq.inf()
            }
        }
        Polarity::Nonincreasing => {
            if is_sup {
                seq.inf()
            } else {
                seq.sup()
            }
        }
    };
    let member = schema.template.fill_hole(&target);
    if !ramps_valid(&member) {
        return Ok(None);
    }
    let b = bounds(&member, v, depth, true)?;
    if b.exact {
        Ok(Some(b))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn val(pairs: &[(u32, (i64, i64))]) -> Valuation {
        Valuation::from_pairs(
            pairs
                .iter()
                .map(|&(i, (p, q))| (i, Rational01::from_ints(p, q))),
        )
    }

    fn r(p: i64, q: i64) -> Rational01 {
        Rational01::from_ints(p, q)
    }

    #[test]
    fn eval_implication() {
        let f = parse("x1 -> x2").unwrap();
        let v = val(&[(1, (3, 4)), (2, (1, 2))]);
        assert_eq!(eval(&f, &v).unwrap(), r(3, 4));
    }

    #[test]
    fn eval_delta_scales() {
        let f = parse("del(1/2, x1)").unwrap();
        let v = val(&[(1, (1, 2))]);
        assert_eq!(eval(&f, &v).unwrap(), r(1, 4));
    }

    #[test]
    fn eval_iff_is_distance_complement() {
        let f = parse("x1 <-> x2").unwrap();
        let v = val(&[(1, (1, 5)), (2, (4, 5))]);
        assert_eq!(eval(&f, &v).unwrap(), r(2, 5));
    }

    #[test]
    fn eval_unbound_variable_errors() {
        let f = parse("x1 -> x3").unwrap();
        let v = val(&[(1, (1, 2))]);
        assert_eq!(eval(&f, &v), Err(EvalError::UnboundVariable(3)));
    }

    #[test]
    fn eval_agrees_with_expansion() {
        let texts = [
            "x1 (+) x2",
            "x1 (.) x2",
            "x1 \\/ x2",
            "x1 /\\ x2",
            "x1 <-> x2",
            "del(2/3, x1)",
            "ramp(1/4, 1/2, x1)",
            "V{x1; x2; 0}",
            "W{x1; x2}",
        ];
        let points = [(0i64, 1i64), (1, 4), (1, 2), (3, 4), (1, 1)];
        for text in texts {
            let f = parse(text).unwrap();
            let g = crate::formula::expand_derived(&f);
            for &(p1, q1) in &points {
                for &(p2, q2) in &points {
                    let v = val(&[(1, (p1, q1)), (2, (p2, q2))]);
                    assert_eq!(
                        eval(&f, &v).unwrap(),
                        eval(&g, &v).unwrap(),
                        "sugar/core mismatch for {text} at ({p1}/{q1}, {p2}/{q2})"
                    );
                }
            }
        }
    }

    #[test]
    fn sup_closed_form_dyadic_complement() {
        // sup over del(s_n, x1), s_n = 1 - 2^-n increasing to 1
        let f = parse("V[del(@s, x1); seq=dyadic_complement; mono=inc]").unwrap();
        let at_one = eval_sup(&f, &val(&[(1, (1, 1))]), 3).unwrap();
        assert!(at_one.exact);
        assert_eq!(at_one.lower, r(1, 1));
        let at_zero = eval_sup(&f, &val(&[(1, (0, 1))]), 3).unwrap();
        assert!(at_zero.exact);
        assert_eq!(at_zero.upper, r(0, 1));
    }

    #[test]
    fn sup_sampling_fallback() {
        let f = parse("V[del(@s, x1); seq=dyadic_complement; mono=inc]").unwrap();
        let b = eval_sup_with(&f, &val(&[(1, (1, 1))]), 3, false).unwrap();
        assert!(!b.exact);
        assert_eq!(b.lower, r(7, 8));
        assert_eq!(b.upper, r(1, 1));
        // deeper sampling improves the lower bound
        let b5 = eval_sup_with(&f, &val(&[(1, (1, 1))]), 5, false).unwrap();
        assert!(b5.lower >= b.lower);
        assert_eq!(b5.lower, r(31, 32));
    }

    #[test]
    fn sup_of_nabla_hole_antitone() {
        // nab is antitone in the scalar, so the sup over an increasing
        // scalar sequence is the first member.
        let f = parse("V[nab(@s, x1); seq=dyadic_complement; mono=dec]").unwrap();
        let b = eval_sup(&f, &val(&[(1, (0, 1))]), 4).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(1, 2)); // 1 - (1/2)(1 - 0)
    }

    #[test]
    fn inf_dual() {
        // member values s_n * x increase with n; the inf is s_1 * x.
        let f = parse("W[del(@s, x1); seq=dyadic_complement; mono=inc]").unwrap();
        let b = eval_sup(&f, &val(&[(1, (1, 1))]), 4).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(1, 2));
    }

    #[test]
    fn zero_depth_rejected() {
        let f = parse("V{x1}").unwrap();
        assert_eq!(eval_sup(&f, &val(&[(1, (1, 2))]), 0), Err(EvalError::ZeroDepth));
    }

    #[test]
    fn finite_family_bounds_exact() {
        let f = parse("V{x1; x2}").unwrap();
        let v = val(&[(1, (1, 4)), (2, (3, 4))]);
        let b = eval_sup(&f, &v, 1).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(3, 4));
    }
}
