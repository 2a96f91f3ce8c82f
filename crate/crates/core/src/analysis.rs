//! Constructive analysis over the compiled functions: dyadic
//! simple-function approximation, the characteristic-function ramp
//! families, pointwise limits with monotone bounds, uniform-limit
//! witnesses, order-limit certificates, and good sequences.

use num::{Signed, Zero};

use crate::formula::{
    expand_derived, CountableFamily, Formula, MonotoneHint, Scalar, SeqDescriptor, SeqDirection,
};
use crate::pwl::{compile, is_tautology, pwl_eval, sup_distance, CompileError, PWLFunc};
use crate::rational::{pow2_inv, Rat, Rational01};
use crate::semantics::{eval, eval_sup, BoundsResult, EvalError, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("approximation level m must be at least 1")]
    ZeroLevel,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("ramp radius out of range for the requested mode")]
    BadRadius,
    #[error("negative input to a good sequence")]
    NegativeInput,
    #[error("empty value list")]
    EmptyValues,
    #[error("point has wrong dimension")]
    BadPoint,
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// One coordinate interval with open/closed endpoint flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval1 {
    pub lo: Rational01,
    pub lo_closed: bool,
    pub hi: Rational01,
    pub hi_closed: bool,
}

impl Interval1 {
    pub fn closed(lo: Rational01, hi: Rational01) -> Self {
        Interval1 {
            lo,
            lo_closed: true,
            hi,
            hi_closed: true,
        }
    }

    pub fn contains(&self, x: &Rational01) -> bool {
        let lo_ok = if self.lo_closed {
            *x >= self.lo
        } else {
            *x > self.lo
        };
        let hi_ok = if self.hi_closed {
            *x <= self.hi
        } else {
            *x < self.hi
        };
        lo_ok && hi_ok
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }
}

/// Axis-aligned box with per-coordinate endpoint flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiInterval {
    pub coords: Vec<Interval1>,
}

impl MultiInterval {
    pub fn contains(&self, p: &[Rational01]) -> bool {
        self.coords.len() == p.len()
            && self.coords.iter().zip(p).all(|(iv, x)| iv.contains(x))
    }
}

/// A one-dimensional interval template whose lower or upper endpoint is a
/// schema hole, generating a countable union along a catalog sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSchema {
    pub lo: Scalar,
    pub lo_closed: bool,
    pub hi: Scalar,
    pub hi_closed: bool,
    pub seq: SeqDescriptor,
}

impl IntervalSchema {
    fn instance(&self, n: u64) -> Interval1 {
        let value = self.seq.value(n);
        let fill = |s: &Scalar| match s {
            Scalar::Const(r) => r.clone(),
            Scalar::Hole => value.clone(),
        };
        Interval1 {
            lo: fill(&self.lo),
            lo_closed: self.lo_closed,
            hi: fill(&self.hi),
            hi_closed: self.hi_closed,
        }
    }

    /// Exact membership in the full union, via the catalog closed form:
    /// the holed endpoint sweeps monotonically to its limit, so the union
    /// is an interval whose swept endpoint is the sequence limit, closed
    /// there only if the limit is attained.
    fn union_contains(&self, x: &Rational01) -> bool {
        if self.seq.direction() == SeqDirection::Mixed {
            // finitely many distinct instances
            if let SeqDescriptor::ExplicitEventuallyConstant { prefix, .. } = &self.seq {
                return (1..=(prefix.len() as u64 + 1)).any(|n| self.instance(n).contains(x));
            }
        }
        let attained = seq_attains_limit(&self.seq);
        let union = match (&self.lo, &self.hi) {
            (Scalar::Hole, Scalar::Const(hi)) => Interval1 {
                lo: self.seq.inf(),
                lo_closed: self.lo_closed && (attained || inf_is_first(&self.seq)),
                hi: hi.clone(),
                hi_closed: self.hi_closed,
            },
            (Scalar::Const(lo), Scalar::Hole) => Interval1 {
                lo: lo.clone(),
                lo_closed: self.lo_closed,
                hi: self.seq.sup(),
                hi_closed: self.hi_closed && (attained || sup_is_first(&self.seq)),
            },
            // no hole: a constant family
            _ => return self.instance(1).contains(x),
        };
        union.contains(x)
    }
}

fn seq_attains_limit(seq: &SeqDescriptor) -> bool {
    match seq {
        SeqDescriptor::DyadicComplement => false,
        SeqDescriptor::DyadicRampBelow(r) => r.is_zero(),
        SeqDescriptor::DyadicGapAbove(r) => r.is_one(),
        SeqDescriptor::DyadicLevels(_) => true,
        SeqDescriptor::ExplicitEventuallyConstant { .. } => true,
    }
}

fn inf_is_first(seq: &SeqDescriptor) -> bool {
    seq.direction() == SeqDirection::Nondecreasing
}

fn sup_is_first(seq: &SeqDescriptor) -> bool {
    seq.direction() == SeqDirection::Nonincreasing
}

/// Descriptor of a Borel subset of the cube.
#[derive(Debug, Clone)]
pub enum BorelSetDesc {
    MultiInterval(MultiInterval),
    Complement(Box<BorelSetDesc>),
    UnionFinite(Vec<BorelSetDesc>),
    UnionSchema(IntervalSchema),
    /// Intensional preimage `{x : f(x) in band}`; covers the
    /// multi-dimensional polyhedral slabs and the non-geometric
    /// descriptors, where membership is decided pointwise.
    Preimage {
        func: Box<FuncDescriptor>,
        band: Interval1,
    },
}

/// Tri-state membership: limits may be undecided at a given depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Unknown,
}

impl BorelSetDesc {
    pub fn contains(&self, p: &[Rational01], depth: u64) -> Result<Membership, AnalysisError> {
        match self {
            BorelSetDesc::MultiInterval(mi) => Ok(if mi.contains(p) {
                Membership::In
            } else {
                Membership::Out
            }),
            BorelSetDesc::Complement(inner) => Ok(match inner.contains(p, depth)? {
                Membership::In => Membership::Out,
                Membership::Out => Membership::In,
                Membership::Unknown => Membership::Unknown,
            }),
            BorelSetDesc::UnionFinite(members) => {
                let mut unknown = false;
                for m in members {
                    match m.contains(p, depth)? {
                        Membership::In => return Ok(Membership::In),
                        Membership::Unknown => unknown = true,
                        Membership::Out => {}
                    }
                }
                Ok(if unknown {
                    Membership::Unknown
                } else {
                    Membership::Out
                })
            }
            BorelSetDesc::UnionSchema(schema) => {
                if p.len() != 1 {
                    return Err(AnalysisError::BadPoint);
                }
                Ok(if schema.union_contains(&p[0]) {
                    Membership::In
                } else {
                    Membership::Out
                })
            }
            BorelSetDesc::Preimage { func, band } => {
                let bounds = func.eval_bounds(p, depth)?;
                if bounds.exact {
                    return Ok(if band.contains(&bounds.lower) {
                        Membership::In
                    } else {
                        Membership::Out
                    });
                }
                let inner = Interval1 {
                    lo: bounds.lower.clone(),
                    lo_closed: true,
                    hi: bounds.upper.clone(),
                    hi_closed: true,
                };
                // decided only if the whole bound interval is inside or
                // outside the band
                let all_in = {
                    let lo_ok = if band.lo_closed {
                        inner.lo >= band.lo
                    } else {
                        inner.lo > band.lo
                    };
                    let hi_ok = if band.hi_closed {
                        inner.hi <= band.hi
                    } else {
                        inner.hi < band.hi
                    };
                    lo_ok && hi_ok
                };
                if all_in {
                    return Ok(Membership::In);
                }
                let all_out = inner.lo > band.hi
                    || inner.hi < band.lo
                    || (!band.hi_closed && inner.lo >= band.hi)
                    || (!band.lo_closed && inner.hi <= band.lo);
                if all_out {
                    return Ok(Membership::Out);
                }
                Ok(Membership::Unknown)
            }
        }
    }
}

/// Direction of a pointwise limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    Sup,
    Inf,
}

impl LimitMode {
    pub fn from_hint(hint: MonotoneHint) -> LimitMode {
        match hint {
            MonotoneHint::Decreasing => LimitMode::Inf,
            _ => LimitMode::Sup,
        }
    }
}

/// A countable family of evaluable functions.
#[derive(Debug, Clone)]
pub enum FuncFamily {
    Finite(Vec<FuncDescriptor>),
    /// Members are the compiled instances of a formula family.
    Formulas { family: CountableFamily, dim: usize },
}

/// An evaluable `[0,1]`-valued function on the cube.
#[derive(Debug, Clone)]
pub enum FuncDescriptor {
    CompiledPWL(PWLFunc),
    CharOfSet { set: BorelSetDesc, dim: usize },
    PointwiseLimit { family: FuncFamily, mode: LimitMode },
}

impl FuncDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            FuncDescriptor::CompiledPWL(f) => f.dim(),
            FuncDescriptor::CharOfSet { dim, .. } => *dim,
            FuncDescriptor::PointwiseLimit { family, .. } => match family {
                FuncFamily::Finite(members) => members.first().map(|m| m.dim()).unwrap_or(1),
                FuncFamily::Formulas { dim, .. } => *dim,
            },
        }
    }

    /// Compile a finitary formula into a descriptor.
    pub fn from_formula(f: &Formula, dim: usize) -> Result<Self, AnalysisError> {
        Ok(FuncDescriptor::CompiledPWL(compile(f, dim)?))
    }

    /// Bounded evaluation at a point.
    pub fn eval_bounds(&self, p: &[Rational01], depth: u64) -> Result<BoundsResult, AnalysisError> {
        if depth == 0 {
            return Err(AnalysisError::ZeroDepth);
        }
        match self {
            FuncDescriptor::CompiledPWL(f) => {
                let value = pwl_eval(f, p)?;
                Ok(BoundsResult {
                    lower: value.clone(),
                    upper: value,
                    exact: true,
                })
            }
            FuncDescriptor::CharOfSet { set, .. } => match set.contains(p, depth)? {
                Membership::In => Ok(exact_bounds(Rational01::one())),
                Membership::Out => Ok(exact_bounds(Rational01::zero())),
                Membership::Unknown => Ok(BoundsResult {
                    lower: Rational01::zero(),
                    upper: Rational01::one(),
                    exact: false,
                }),
            },
            FuncDescriptor::PointwiseLimit { family, mode } => {
                pointwise_limit_eval(family, *mode, p, depth)
            }
        }
    }
}

fn exact_bounds(v: Rational01) -> BoundsResult {
    BoundsResult {
        lower: v.clone(),
        upper: v,
        exact: true,
    }
}

/// Monotone bounds on the pointwise sup/inf of a function family at a
/// point; exact when the family admits a closed form at that point or the
/// bound is attained by a sampled member.
pub fn pointwise_limit_eval(
    family: &FuncFamily,
    mode: LimitMode,
    p: &[Rational01],
    depth: u64,
) -> Result<BoundsResult, AnalysisError> {
    if depth == 0 {
        return Err(AnalysisError::ZeroDepth);
    }
    match family {
        FuncFamily::Finite(members) => {
            let mut acc: Option<BoundsResult> = None;
            for m in members {
                let b = m.eval_bounds(p, depth)?;
                acc = Some(match acc {
                    None => b,
                    Some(prev) => match mode {
                        LimitMode::Sup => BoundsResult {
                            exact: false,
                            lower: prev.lower.max_of(&b.lower),
                            upper: prev.upper.max_of(&b.upper),
                        },
                        LimitMode::Inf => BoundsResult {
                            exact: false,
                            lower: prev.lower.min_of(&b.lower),
                            upper: prev.upper.min_of(&b.upper),
                        },
                    },
                });
            }
            let mut b = acc.ok_or(AnalysisError::EmptyValues)?;
            b.exact = b.lower == b.upper;
            Ok(b)
        }
        FuncFamily::Formulas { family, dim } => match family {
            CountableFamily::Finite(members) => {
                let descs = members
                    .iter()
                    .map(|m| FuncDescriptor::from_formula(m, *dim))
                    .collect::<Result<Vec<_>, _>>()?;
                pointwise_limit_eval(&FuncFamily::Finite(descs), mode, p, depth)
            }
            CountableFamily::Schema(schema) => {
                schema_limit_bounds(schema, *dim, mode, p, depth)
            }
        },
    }
}

fn schema_limit_bounds(
    schema: &crate::formula::FamilySchema,
    dim: usize,
    mode: LimitMode,
    p: &[Rational01],
    depth: u64,
) -> Result<BoundsResult, AnalysisError> {
    let v = Valuation::from_point(p);
    // ramp families: constant regions are decided structurally
    if let Some(result) = ramp_family_bounds(schema, mode, p, depth)? {
        return Ok(result);
    }
    // single-hole monotone closed form, as in bounded formula evaluation
    let member_at = |n: u64| -> Result<Rational01, AnalysisError> {
        let member = schema.nth(n);
        if dim == 0 {
            return Err(AnalysisError::BadPoint);
        }
        Ok(eval(&expand_derived(&member), &v)?)
    };
    let full = Formula::Sup(CountableFamily::Schema(schema.clone()));
    let formula = match mode {
        LimitMode::Sup => full,
        LimitMode::Inf => match &full {
            Formula::Sup(fam) => Formula::Inf(fam.clone()),
            _ => unreachable!(),
        },
    };
    match eval_sup(&formula, &v, depth) {
        Ok(b) if b.exact => Ok(b),
        _ => {
            // sampling fallback
            let mut folded: Option<Rational01> = None;
            for n in 1..=depth {
                let value = member_at(n)?;
                folded = Some(match folded {
                    None => value,
                    Some(prev) => match mode {
                        LimitMode::Sup => prev.max_of(&value),
                        LimitMode::Inf => prev.min_of(&value),
                    },
                });
            }
            let folded = folded.ok_or(AnalysisError::ZeroDepth)?;
            Ok(match mode {
                LimitMode::Sup => BoundsResult {
                    exact: folded.is_one(),
                    upper: Rational01::one(),
                    lower: folded,
                },
                LimitMode::Inf => BoundsResult {
                    exact: folded.is_zero(),
                    lower: Rational01::zero(),
                    upper: folded,
                },
            })
        }
    }
}

/// Exactness rules specific to the ramp families: outside the moving knee
/// every member is constant, and once the sampled knee passes the point
/// the bound is attained.
fn ramp_family_bounds(
    schema: &crate::formula::FamilySchema,
    mode: LimitMode,
    p: &[Rational01],
    depth: u64,
) -> Result<Option<BoundsResult>, AnalysisError> {
    let Formula::Ramp { lo, hi, body } = &*schema.template else {
        return Ok(None);
    };
    let Formula::Var(1) = &**body else {
        return Ok(None);
    };
    if p.len() != 1 {
        return Err(AnalysisError::BadPoint);
    }
    let x = &p[0];
    let v = Valuation::from_point(p);
    let member_value = |n: u64| -> Result<Rational01, AnalysisError> {
        Ok(eval(&expand_derived(&schema.nth(n)), &v)?)
    };
    match (lo, hi, mode) {
        // increasing family 0 .. ramp(r, s_n, x): sup is the indicator of (r, 1]
        (Scalar::Const(r), Scalar::Hole, LimitMode::Sup) => {
            if x <= r {
                return Ok(Some(exact_bounds(Rational01::zero())));
            }
            let deepest = member_value(depth)?;
            if deepest.is_one() {
                Ok(Some(exact_bounds(Rational01::one())))
            } else {
                Ok(Some(BoundsResult {
                    lower: deepest,
                    upper: Rational01::one(),
                    exact: false,
                }))
            }
        }
        // decreasing family ramp(s_n, r, x): inf is the indicator of [r, 1]
        (Scalar::Hole, Scalar::Const(r), LimitMode::Inf) => {
            if x >= r {
                return Ok(Some(exact_bounds(Rational01::one())));
            }
            let deepest = member_value(depth)?;
            if deepest.is_zero() {
                Ok(Some(exact_bounds(Rational01::zero())))
            } else {
                Ok(Some(BoundsResult {
                    lower: Rational01::zero(),
                    upper: deepest,
                    exact: false,
                }))
            }
        }
        _ => Ok(None),
    }
}

/// Ramp family generators for characteristic functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampMode {
    /// `f_{m,r}`: 0 up to `r - r/2^m`, affine, 1 at and above `r`. A
    /// decreasing family; its pointwise infimum is the indicator of
    /// `[r, 1]` (closed at `r`).
    RampBelow,
    /// `g_{m,r}`: 0 up to `r`, affine, 1 above `r + (1-r)/2^m`. An
    /// increasing family; its pointwise supremum is the indicator of
    /// `(r, 1]`.
    RampAbove,
}

/// The one-variable formula families `f_{m,r}` / `g_{m,r}`.
pub fn char_interval_family(
    r: &Rational01,
    mode: RampMode,
) -> Result<CountableFamily, AnalysisError> {
    match mode {
        RampMode::RampBelow => {
            if r.is_zero() {
                return Err(AnalysisError::BadRadius);
            }
            Ok(CountableFamily::schema(
                Formula::ramp(Scalar::Hole, r.clone(), Formula::var(1)),
                SeqDescriptor::DyadicRampBelow(r.clone()),
                MonotoneHint::Decreasing,
            ))
        }
        RampMode::RampAbove => {
            if r.is_one() {
                return Err(AnalysisError::BadRadius);
            }
            Ok(CountableFamily::schema(
                Formula::ramp(r.clone(), Scalar::Hole, Formula::var(1)),
                SeqDescriptor::DyadicGapAbove(r.clone()),
                MonotoneHint::Increasing,
            ))
        }
    }
}

/// A simple function: rational coefficients against Borel set descriptors.
#[derive(Debug, Clone)]
pub struct SimpleFunc {
    pub dim: usize,
    pub terms: Vec<(Rational01, BorelSetDesc)>,
}

impl SimpleFunc {
    /// Bounded evaluation: terms with undecided membership widen the
    /// bounds. For the dyadic approximations the sets are disjoint and at
    /// most one term contributes.
    pub fn eval_bounds(&self, p: &[Rational01], depth: u64) -> Result<BoundsResult, AnalysisError> {
        if p.len() != self.dim {
            return Err(AnalysisError::BadPoint);
        }
        let mut lower = Rat::zero();
        let mut upper = Rat::zero();
        for (coeff, set) in &self.terms {
            match set.contains(p, depth)? {
                Membership::In => {
                    lower += coeff.as_rat();
                    upper += coeff.as_rat();
                }
                Membership::Unknown => {
                    upper += coeff.as_rat();
                }
                Membership::Out => {}
            }
        }
        let lower = Rational01::clamped(lower);
        let upper = Rational01::clamped(upper);
        let exact = lower == upper;
        Ok(BoundsResult {
            lower,
            upper,
            exact,
        })
    }

    /// Exact evaluation, available when every membership is decided.
    pub fn eval_exact(&self, p: &[Rational01], depth: u64) -> Result<Rational01, AnalysisError> {
        let b = self.eval_bounds(p, depth)?;
        if b.exact {
            Ok(b.lower)
        } else {
            Err(AnalysisError::ZeroDepth)
        }
    }
}

/// The m-th dyadic simple approximation `f_m = sum (k/2^m) chi_{E_k}` with
/// `E_k = f^{-1}([k/2^m, (k+1)/2^m))` and the top band closed at 1.
/// One-dimensional compiled functions get exact interval preimages;
/// everything else is represented intensionally.
pub fn dyadic_simple_approx(f: &FuncDescriptor, m: u32) -> Result<SimpleFunc, AnalysisError> {
    if m == 0 {
        return Err(AnalysisError::ZeroLevel);
    }
    let dim = f.dim();
    let step = pow2_inv(m);
    let mut terms = Vec::new();
    for k in 0..(1u64 << m) {
        let lo = Rational01::new(Rat::from_integer(k.into()) * &step).expect("band start");
        let hi_rat = Rat::from_integer((k + 1).into()) * &step;
        let top = k + 1 == 1 << m;
        let hi = Rational01::new(hi_rat).expect("band end");
        let band = Interval1 {
            lo: lo.clone(),
            lo_closed: true,
            hi,
            hi_closed: top,
        };
        if lo.is_zero() {
            // zero coefficient contributes nothing
            continue;
        }
        let set = match f {
            FuncDescriptor::CompiledPWL(pwl) if dim == 1 => preimage_intervals(pwl, &band)?,
            _ => BorelSetDesc::Preimage {
                func: Box::new(f.clone()),
                band: band.clone(),
            },
        };
        terms.push((lo, set));
    }
    Ok(SimpleFunc { dim, terms })
}

/// Exact band preimage of a one-dimensional compiled function, as a
/// finite union of intervals with correct endpoint flags.
fn preimage_intervals(f: &PWLFunc, band: &Interval1) -> Result<BorelSetDesc, AnalysisError> {
    let mut intervals: Vec<Interval1> = Vec::new();
    for (cell, aff) in f.pieces() {
        let xs: Vec<&Rat> = cell.vertices().iter().map(|v| &v[0]).collect();
        let a = xs.iter().min().expect("cells have vertices");
        let b = xs.iter().max().expect("cells have vertices");
        let c = &aff.coeffs[0];
        let d = &aff.constant;
        let piece = if c.is_zero() {
            let value = Rational01::new(d.clone()).map_err(|_| AnalysisError::BadPoint)?;
            if band.contains(&value) {
                Some(Interval1::closed(
                    Rational01::new((*a).clone()).expect("cube"),
                    Rational01::new((*b).clone()).expect("cube"),
                ))
            } else {
                None
            }
        } else {
            // solve band.lo <= c x + d <= band.hi within [a, b]
            let lo_x = (band.lo.as_rat() - d) / c;
            let hi_x = (band.hi.as_rat() - d) / c;
            let (mut lo_x, mut lo_cl, mut hi_x, mut hi_cl) = if c.is_positive() {
                (lo_x, band.lo_closed, hi_x, band.hi_closed)
            } else {
                (hi_x, band.hi_closed, lo_x, band.lo_closed)
            };
            if &lo_x < a {
                lo_x = (*a).clone();
                lo_cl = true;
            }
            if &hi_x > b {
                hi_x = (*b).clone();
                hi_cl = true;
            }
            if lo_x > hi_x || (lo_x == hi_x && !(lo_cl && hi_cl)) {
                None
            } else {
                Some(Interval1 {
                    lo: Rational01::new(lo_x).expect("cube"),
                    lo_closed: lo_cl,
                    hi: Rational01::new(hi_x).expect("cube"),
                    hi_closed: hi_cl,
                })
            }
        };
        if let Some(iv) = piece {
            if !iv.is_empty() && !intervals.contains(&iv) {
                intervals.push(iv);
            }
        }
    }
    let boxes: Vec<BorelSetDesc> = intervals
        .into_iter()
        .map(|iv| BorelSetDesc::MultiInterval(MultiInterval { coords: vec![iv] }))
        .collect();
    Ok(match boxes.len() {
        0 => BorelSetDesc::UnionFinite(vec![]),
        1 => boxes.into_iter().next().expect("one element"),
        _ => BorelSetDesc::UnionFinite(boxes),
    })
}

/// Report of the uniform-limit certificate extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformLimitReport {
    /// `r_n = 1 - d_sup(f_n, f)` per member.
    pub radii: Vec<Rational01>,
    /// All semantic certificates `eta_{r_n} -> (phi_n <-> phi)` valid.
    pub certified: bool,
    pub nondecreasing: bool,
    /// `1 - r_N` for the last member.
    pub final_gap: Rational01,
}

/// Extract the uniform-convergence radii of the first members against the
/// target and verify the constant-witness certificates semantically.
pub fn uniform_limit_witness(
    members: &[Formula],
    target: &Formula,
    dim: usize,
) -> Result<UniformLimitReport, AnalysisError> {
    if members.is_empty() {
        return Err(AnalysisError::EmptyValues);
    }
    let compiled_target = compile(target, dim)?;
    let mut radii = Vec::with_capacity(members.len());
    let mut certified = true;
    for member in members {
        let compiled = compile(member, dim)?;
        let distance = sup_distance(&compiled, &compiled_target)?;
        let r = distance.complement();
        // eta_r -> (member <-> target) must be a tautology
        let eta = Formula::delta(r.clone(), Formula::top());
        let cert = Formula::imp(eta, Formula::iff(member.clone(), target.clone()));
        if !is_tautology(&cert, dim)?.verdict {
            certified = false;
        }
        radii.push(r);
    }
    let nondecreasing = radii.windows(2).all(|w| w[0] <= w[1]);
    let final_gap = radii.last().expect("nonempty").complement();
    Ok(UniformLimitReport {
        radii,
        certified,
        nondecreasing,
        final_gap,
    })
}

/// One row of an order-limit check report.
#[derive(Debug, Clone)]
pub struct LimitCheckRow {
    pub index: u64,
    pub check: String,
    pub ok: bool,
    pub witness: Option<Vec<Rational01>>,
}

#[derive(Debug, Clone)]
pub struct OrderLimitReport {
    pub rows: Vec<LimitCheckRow>,
    pub passed: bool,
}

/// Check the order-limit witness conditions on sampled indices: each
/// `psi_n -> (phi <-> phi_n)` is valid, the witnesses increase, and the
/// witness disjunction evaluates exactly to 1 at the sampled valuations.
pub fn order_limit_check(
    phi_family: &CountableFamily,
    target: &Formula,
    psi_family: &CountableFamily,
    indices: &[u64],
    valuations: &[Valuation],
    dim: usize,
    depth: u64,
) -> Result<OrderLimitReport, AnalysisError> {
    let mut rows = Vec::new();
    let mut passed = true;
    for &n in indices {
        let phi_n = phi_family.nth(n);
        let psi_n = psi_family.nth(n);
        let cert = Formula::imp(
            psi_n.clone(),
            Formula::iff(target.clone(), phi_n.clone()),
        );
        let report = is_tautology(&cert, dim)?;
        passed &= report.verdict;
        rows.push(LimitCheckRow {
            index: n,
            check: "psi_n -> (phi <-> phi_n)".to_string(),
            ok: report.verdict,
            witness: report.witness,
        });
        let step_up = Formula::imp(psi_n, psi_family.nth(n + 1));
        let report = is_tautology(&step_up, dim)?;
        passed &= report.verdict;
        rows.push(LimitCheckRow {
            index: n,
            check: "psi_n -> psi_{n+1}".to_string(),
            ok: report.verdict,
            witness: report.witness,
        });
    }
    let sup_psi = Formula::Sup(psi_family.clone());
    for (i, v) in valuations.iter().enumerate() {
        let bounds = eval_sup(&sup_psi, v, depth)?;
        let ok = bounds.exact && bounds.lower.is_one();
        passed &= ok;
        rows.push(LimitCheckRow {
            index: i as u64,
            check: "e(V psi_n) = 1".to_string(),
            ok,
            witness: None,
        });
    }
    Ok(OrderLimitReport { rows, passed })
}

fn interval_to_json(iv: &Interval1) -> serde_json::Value {
    serde_json::json!({
        "lo": iv.lo.to_string(),
        "lo_closed": iv.lo_closed,
        "hi": iv.hi.to_string(),
        "hi_closed": iv.hi_closed,
    })
}

fn scalar_to_json(s: &Scalar) -> serde_json::Value {
    match s {
        Scalar::Const(r) => serde_json::Value::String(r.to_string()),
        Scalar::Hole => serde_json::Value::String("@s".to_string()),
    }
}

/// JSON mirror of a set descriptor AST.
pub fn borel_set_to_json(set: &BorelSetDesc) -> serde_json::Value {
    use serde_json::json;
    match set {
        BorelSetDesc::MultiInterval(mi) => json!({
            "kind": "multi_interval",
            "coords": mi.coords.iter().map(interval_to_json).collect::<Vec<_>>(),
        }),
        BorelSetDesc::Complement(inner) => json!({
            "kind": "complement",
            "child": borel_set_to_json(inner),
        }),
        BorelSetDesc::UnionFinite(members) => json!({
            "kind": "union",
            "members": members.iter().map(borel_set_to_json).collect::<Vec<_>>(),
        }),
        BorelSetDesc::UnionSchema(schema) => json!({
            "kind": "union_schema",
            "lo": scalar_to_json(&schema.lo),
            "lo_closed": schema.lo_closed,
            "hi": scalar_to_json(&schema.hi),
            "hi_closed": schema.hi_closed,
            "seq": seq_to_json(&schema.seq),
        }),
        BorelSetDesc::Preimage { func, band } => json!({
            "kind": "preimage",
            "band": interval_to_json(band),
            "func": func_descriptor_to_json(func),
        }),
    }
}

fn seq_to_json(seq: &SeqDescriptor) -> serde_json::Value {
    use serde_json::json;
    match seq {
        SeqDescriptor::DyadicComplement => json!({"kind": "dyadic_complement"}),
        SeqDescriptor::DyadicRampBelow(r) => json!({"kind": "dyadic_ramp_below", "r": r.to_string()}),
        SeqDescriptor::DyadicGapAbove(r) => json!({"kind": "dyadic_gap_above", "r": r.to_string()}),
        SeqDescriptor::DyadicLevels(m) => json!({"kind": "dyadic_levels", "m": m}),
        SeqDescriptor::ExplicitEventuallyConstant { prefix, tail } => json!({
            "kind": "explicit",
            "prefix": prefix.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "tail": tail.to_string(),
        }),
    }
}

/// JSON mirror of a function descriptor.
pub fn func_descriptor_to_json(f: &FuncDescriptor) -> serde_json::Value {
    use serde_json::json;
    match f {
        FuncDescriptor::CompiledPWL(pwl) => json!({"kind": "pwl", "pwl": pwl.to_json()}),
        FuncDescriptor::CharOfSet { set, dim } => json!({
            "kind": "char",
            "dim": dim,
            "set": borel_set_to_json(set),
        }),
        FuncDescriptor::PointwiseLimit { family, mode } => json!({
            "kind": "limit",
            "mode": match mode { LimitMode::Sup => "sup", LimitMode::Inf => "inf" },
            "family": match family {
                FuncFamily::Finite(members) => json!({
                    "kind": "finite",
                    "members": members.iter().map(func_descriptor_to_json).collect::<Vec<_>>(),
                }),
                FuncFamily::Formulas { family, dim } => json!({
                    "kind": "formulas",
                    "dim": dim,
                    "family": crate::formula::family_to_json(family),
                }),
            },
        }),
    }
}

/// JSON mirror of a simple function.
pub fn simple_func_to_json(f: &SimpleFunc) -> serde_json::Value {
    serde_json::json!({
        "dim": f.dim,
        "terms": f.terms.iter().map(|(coeff, set)| serde_json::json!({
            "coeff": coeff.to_string(),
            "set": borel_set_to_json(set),
        })).collect::<Vec<_>>(),
    })
}

/// Good sequence of a nonnegative rational: unit-interval components
/// `b_i = min(1, max(0, a - (i-1)))` with finitely many nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodSequence {
    entries: Vec<Rational01>,
}

impl GoodSequence {
    pub fn entries(&self) -> &[Rational01] {
        &self.entries
    }

    /// `b_{i+1} > 0` implies `b_i = 1`.
    pub fn is_good(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[1].is_zero() || w[0].is_one())
    }

    pub fn sum(&self) -> Rat {
        self.entries.iter().map(|r| r.as_rat().clone()).sum()
    }
}

/// Decompose a nonnegative rational into its good sequence.
pub fn good_sequence(a: &Rat) -> Result<GoodSequence, AnalysisError> {
    if a.is_negative() {
        return Err(AnalysisError::NegativeInput);
    }
    let mut entries = Vec::new();
    let mut i = 0u64;
    loop {
        let value = a - Rat::from_integer(i.into());
        if !value.is_positive() {
            break;
        }
        entries.push(Rational01::clamped(value));
        i += 1;
    }
    Ok(GoodSequence { entries })
}

/// The finite shadow of the sup-interchange law: the componentwise max of
/// the good sequences equals the good sequence of the max.
pub fn good_sequence_sup_check(values: &[Rat]) -> Result<bool, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::EmptyValues);
    }
    let sequences = values
        .iter()
        .map(good_sequence)
        .collect::<Result<Vec<_>, _>>()?;
    let width = sequences.iter().map(|s| s.entries.len()).max().unwrap_or(0);
    let mut componentwise = Vec::with_capacity(width);
    for i in 0..width {
        let max = sequences
            .iter()
            .map(|s| s.entries.get(i).cloned().unwrap_or_else(Rational01::zero))
            .max()
            .expect("nonempty");
        componentwise.push(max);
    }
    while componentwise.last().is_some_and(|r| r.is_zero()) {
        componentwise.pop();
    }
    let max_value = values.iter().max().expect("nonempty");
    let expected = good_sequence(max_value)?;
    Ok(componentwise == expected.entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::rational::rat;

    fn r(p: i64, q: i64) -> Rational01 {
        Rational01::from_ints(p, q)
    }

    fn pt(p: i64, q: i64) -> Vec<Rational01> {
        vec![r(p, q)]
    }

    #[test]
    fn good_sequence_examples() {
        let g = good_sequence(&rat(23, 10)).unwrap();
        assert_eq!(g.entries(), &[r(1, 1), r(1, 1), r(3, 10)]);
        assert!(g.is_good());
        assert_eq!(g.sum(), rat(23, 10));
        assert_eq!(good_sequence(&rat(0, 1)).unwrap().entries().len(), 0);
        assert_eq!(good_sequence(&rat(1, 1)).unwrap().entries(), &[r(1, 1)]);
        assert!(good_sequence(&rat(-1, 2)).is_err());
    }

    #[test]
    fn good_sequence_sup_examples() {
        assert!(good_sequence_sup_check(&[rat(23, 10), rat(3, 2)]).unwrap());
        assert!(good_sequence_sup_check(&[rat(7, 3)]).unwrap());
        assert!(good_sequence_sup_check(&[rat(0, 1), rat(5, 1)]).unwrap());
        assert!(good_sequence_sup_check(&[]).is_err());
    }

    #[test]
    fn dyadic_approx_of_identity() {
        let f = FuncDescriptor::from_formula(&parse("x1").unwrap(), 1).unwrap();
        let fm = dyadic_simple_approx(&f, 2).unwrap();
        // 3/10 lies in [1/4, 2/4)
        assert_eq!(fm.eval_exact(&pt(3, 10), 1).unwrap(), r(1, 4));
        assert_eq!(fm.eval_exact(&pt(0, 1), 1).unwrap(), r(0, 1));
        assert_eq!(fm.eval_exact(&pt(1, 1), 1).unwrap(), r(3, 4));
    }

    #[test]
    fn dyadic_approx_error_bound() {
        let f = FuncDescriptor::from_formula(&parse("x1").unwrap(), 1).unwrap();
        for m in 1..=4u32 {
            let fm = dyadic_simple_approx(&f, m).unwrap();
            let tol = pow2_inv(m);
            for k in 0..=64i64 {
                let x = pt(k, 64);
                let approx = fm.eval_exact(&x, 1).unwrap();
                let exact = rat(k, 64);
                let gap = (exact - approx.as_rat()).abs();
                assert!(gap <= tol, "bound violated at {k}/64 for m={m}");
            }
        }
    }

    #[test]
    fn dyadic_approx_monotone_in_m() {
        let f =
            FuncDescriptor::from_formula(&parse("x1 (+) x1").unwrap(), 1).unwrap();
        for m in 1..=3u32 {
            let fm = dyadic_simple_approx(&f, m).unwrap();
            let fm1 = dyadic_simple_approx(&f, m + 1).unwrap();
            for k in 0..=64i64 {
                let x = pt(k, 64);
                assert!(
                    fm.eval_exact(&x, 1).unwrap() <= fm1.eval_exact(&x, 1).unwrap(),
                    "monotonicity failed at {k}/64, m={m}"
                );
            }
        }
    }

    #[test]
    fn constant_zero_approximates_to_zero() {
        let f = FuncDescriptor::from_formula(&parse("0").unwrap(), 1).unwrap();
        for m in 1..=3 {
            let fm = dyadic_simple_approx(&f, m).unwrap();
            assert_eq!(fm.eval_exact(&pt(1, 2), 1).unwrap(), r(0, 1));
        }
    }

    #[test]
    fn ramp_below_family_values() {
        let fam = char_interval_family(&r(1, 2), RampMode::RampBelow).unwrap();
        // member 1: affine from 0 at 1/4 to 1 at 1/2
        let m1 = expand_derived(&fam.nth(1));
        let v = Valuation::from_point(&pt(3, 8));
        assert_eq!(eval(&m1, &v).unwrap(), r(1, 2));
        // above r every member is 1
        for n in 1..=4 {
            let m = expand_derived(&fam.nth(n));
            let v = Valuation::from_point(&pt(3, 4));
            assert_eq!(eval(&m, &v).unwrap(), r(1, 1));
        }
    }

    #[test]
    fn ramp_above_left_endpoint_excluded() {
        let fam = char_interval_family(&r(1, 2), RampMode::RampAbove).unwrap();
        for n in 1..=4 {
            let m = expand_derived(&fam.nth(n));
            let v = Valuation::from_point(&pt(1, 2));
            assert_eq!(eval(&m, &v).unwrap(), r(0, 1));
        }
    }

    #[test]
    fn pointwise_limits_of_ramp_families() {
        let above = char_interval_family(&r(1, 2), RampMode::RampAbove).unwrap();
        let fam = FuncFamily::Formulas {
            family: above,
            dim: 1,
        };
        // at x = 1/2 the sup is 0 at depth 1
        let b = pointwise_limit_eval(&fam, LimitMode::Sup, &pt(1, 2), 1).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(0, 1));
        // at x = 3/4: g_1(3/4) = 1 already
        let b = pointwise_limit_eval(&fam, LimitMode::Sup, &pt(3, 4), 1).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(1, 1));
        // just above r: exact 1 at some finite depth
        let b = pointwise_limit_eval(&fam, LimitMode::Sup, &pt(33, 64), 8).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(1, 1));
        // shallow depth: inexact
        let b = pointwise_limit_eval(&fam, LimitMode::Sup, &pt(33, 64), 1).unwrap();
        assert!(!b.exact);

        let below = char_interval_family(&r(1, 2), RampMode::RampBelow).unwrap();
        let fam = FuncFamily::Formulas {
            family: below,
            dim: 1,
        };
        // x = 1/4 <= 1/2 - 1/2*2^-1: member 1 is already 0
        let b = pointwise_limit_eval(&fam, LimitMode::Inf, &pt(1, 4), 1).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(0, 1));
        // x = 3/4 > r: all members 1
        let b = pointwise_limit_eval(&fam, LimitMode::Inf, &pt(3, 4), 1).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(1, 1));
        // x = r: the infimum is 1 (closed left endpoint)
        let b = pointwise_limit_eval(&fam, LimitMode::Inf, &pt(1, 2), 1).unwrap();
        assert!(b.exact);
        assert_eq!(b.lower, r(1, 1));
    }

    #[test]
    fn uniform_limit_of_delta_family() {
        let members: Vec<Formula> = (1..=5)
            .map(|n| {
                let s = SeqDescriptor::DyadicComplement.value(n);
                Formula::delta(s, Formula::var(1))
            })
            .collect();
        let report = uniform_limit_witness(&members, &Formula::var(1), 1).unwrap();
        assert!(report.certified);
        assert!(report.nondecreasing);
        for (n, r_n) in report.radii.iter().enumerate() {
            assert_eq!(*r_n, SeqDescriptor::DyadicComplement.value(n as u64 + 1));
        }
        assert_eq!(report.final_gap, r(1, 32));
    }

    #[test]
    fn uniform_limit_constant_family() {
        let phi = parse("x1 (+) x2").unwrap();
        let members = vec![phi.clone(), phi.clone(), phi.clone()];
        let report = uniform_limit_witness(&members, &phi, 2).unwrap();
        assert!(report.radii.iter().all(|r| r.is_one()));
        assert!(report.certified);
    }

    #[test]
    fn no_convergence_of_negation() {
        let members = vec![parse("!x1").unwrap()];
        let report = uniform_limit_witness(&members, &parse("x1").unwrap(), 1).unwrap();
        assert_eq!(report.radii[0], r(0, 1));
    }

    #[test]
    fn order_limit_of_delta_family() {
        let phi_family = CountableFamily::schema(
            Formula::delta(Scalar::Hole, Formula::var(1)),
            SeqDescriptor::DyadicComplement,
            MonotoneHint::Increasing,
        );
        let psi_family = CountableFamily::schema(
            Formula::delta(Scalar::Hole, Formula::top()),
            SeqDescriptor::DyadicComplement,
            MonotoneHint::Increasing,
        );
        let valuations = vec![
            Valuation::from_point(&pt(0, 1)),
            Valuation::from_point(&pt(1, 2)),
            Valuation::from_point(&pt(1, 1)),
        ];
        let report = order_limit_check(
            &phi_family,
            &Formula::var(1),
            &psi_family,
            &[1, 2, 3, 4],
            &valuations,
            1,
            8,
        )
        .unwrap();
        assert!(report.passed, "rows: {:?}", report.rows);
    }

    #[test]
    fn order_limit_fails_with_bottom_witnesses() {
        let phi_family = CountableFamily::schema(
            Formula::delta(Scalar::Hole, Formula::var(1)),
            SeqDescriptor::DyadicComplement,
            MonotoneHint::Increasing,
        );
        let psi_family = CountableFamily::finite(vec![Formula::Bot]).unwrap();
        let report = order_limit_check(
            &phi_family,
            &Formula::var(1),
            &psi_family,
            &[1],
            &[Valuation::from_point(&pt(1, 2))],
            1,
            4,
        )
        .unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn union_schema_closed_form() {
        // union over n of [0, 1 - 2^-n] is [0, 1)
        let schema = IntervalSchema {
            lo: Scalar::Const(Rational01::zero()),
            lo_closed: true,
            hi: Scalar::Hole,
            hi_closed: true,
            seq: SeqDescriptor::DyadicComplement,
        };
        let set = BorelSetDesc::UnionSchema(schema);
        assert_eq!(set.contains(&pt(63, 64), 1).unwrap(), Membership::In);
        assert_eq!(set.contains(&pt(1, 1), 1).unwrap(), Membership::Out);
    }

    #[test]
    fn multi_interval_is_min_of_coordinates() {
        let e = MultiInterval {
            coords: vec![
                Interval1::closed(r(0, 1), r(1, 2)),
                Interval1::closed(r(1, 4), r(1, 1)),
            ],
        };
        let inside = vec![r(1, 4), r(1, 2)];
        let outside = vec![r(3, 4), r(1, 2)];
        assert!(e.contains(&inside));
        assert!(!e.contains(&outside));
        // characteristic of the box = min of coordinate characteristics
        for p in [&inside, &outside] {
            let full = e.contains(p) as u8;
            let per_coord: u8 = e
                .coords
                .iter()
                .zip(p)
                .all(|(iv, x)| iv.contains(x)) as u8;
            assert_eq!(full, per_coord);
        }
    }
}
