//! Compilation of finitary formulas into exact piecewise-linear functions
//! on `[0,1]^n`, and the polyhedral decision procedures built on them:
//! tautology, equivalence, semantic consequence and sup-norm distance.
//!
//! Every operation keeps the complex exact: cells are rational polytopes
//! carrying their vertex sets, and an affine map attains its extrema on
//! vertices, so minimization is a scan, not an approximation.

mod geometry;

pub use geometry::{dot, lex_cmp, rank, Cell, CutResult, Halfspace, Point};

use std::collections::HashMap;
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::formula::{expand_derived, CountableFamily, Formula};
use crate::rational::{format_rat, Rat, Rational01};
use crate::semantics::Valuation;

/// `x -> coeffs . x + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl AffineMap {
    pub fn constant_map(dim: usize, value: Rat) -> Self {
        AffineMap {
            coeffs: vec![Rat::zero(); dim],
            constant: value,
        }
    }

    pub fn projection(dim: usize, var: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); dim];
        coeffs[var] = Rat::one();
        AffineMap {
            coeffs,
            constant: Rat::zero(),
        }
    }

    pub fn eval(&self, p: &Point) -> Rat {
        dot(&self.coeffs, p) + &self.constant
    }

    /// `1 - f`.
    fn complement(&self) -> Self {
        AffineMap {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            constant: Rat::one() - &self.constant,
        }
    }

    /// `alpha * f + (1 - alpha)`, the graded connective.
    fn nabla(&self, alpha: &Rat) -> Self {
        AffineMap {
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
            constant: alpha * &self.constant + (Rat::one() - alpha),
        }
    }

    /// `1 - f + g`, the untruncated implication.
    fn imp_raw(&self, other: &Self) -> Self {
        AffineMap {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| b - a)
                .collect(),
            constant: Rat::one() - &self.constant + &other.constant,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        AffineMap {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            constant: &self.constant - &other.constant,
        }
    }

    /// Halfspace `self(x) <= c`.
    fn le(&self, c: &Rat) -> Halfspace {
        Halfspace::new(self.coeffs.clone(), c - &self.constant)
    }

    fn min_max_on(&self, cell: &Cell) -> (Rat, Rat) {
        let mut values = cell.vertices().iter().map(|v| self.eval(v));
        let first = values.next().expect("cells have vertices");
        values.fold((first.clone(), first), |(lo, hi), v| {
            let lo = if v < lo { v.clone() } else { lo };
            let hi = if v > hi { v } else { hi };
            (lo, hi)
        })
    }
}

/// Exact piecewise-linear function: cells covering the cube, one affine
/// map per cell, agreeing on shared boundaries.
#[derive(Debug, Clone)]
pub struct PWLFunc {
    dim: usize,
    pieces: Vec<(Arc<Cell>, AffineMap)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("variable x{var} exceeds the declared dimension {dim}")]
    VarExceedsDim { var: u32, dim: usize },
    #[error("schematic families cannot be compiled to a piecewise-linear function")]
    SchematicFamily,
    #[error("formula contains an unfilled scalar hole")]
    UnfilledHole,
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point lies outside the unit cube or has wrong dimension")]
    BadPoint,
}

/// Verdict of a decision procedure together with an optional witness.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct DecisionReport {
    pub verdict: bool,
    pub witness: Option<Vec<Rational01>>,
    pub value_at_witness: Option<Rational01>,
}

impl DecisionReport {
    fn yes() -> Self {
        DecisionReport {
            verdict: true,
            witness: None,
            value_at_witness: None,
        }
    }

    fn no(witness: Vec<Rational01>, value: Rational01) -> Self {
        DecisionReport {
            verdict: false,
            witness: Some(witness),
            value_at_witness: Some(value),
        }
    }

    /// Witness as a valuation binding `x1..xn`.
    pub fn witness_valuation(&self) -> Option<Valuation> {
        self.witness.as_ref().map(|w| Valuation::from_point(w))
    }
}

fn to_unit_point(p: &Point) -> Vec<Rational01> {
    p.iter()
        .map(|c| Rational01::new(c.clone()).expect("cube vertices lie in [0,1]"))
        .collect()
}

impl PWLFunc {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&Cell, &AffineMap)> {
        self.pieces.iter().map(|(c, a)| (&**c, a))
    }

    fn from_affine(dim: usize, map: AffineMap) -> Self {
        PWLFunc {
            dim,
            pieces: vec![(Cell::cube(dim), map)],
        }
    }

    fn map_affine(&self, f: impl Fn(&AffineMap) -> AffineMap) -> Self {
        PWLFunc {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|(cell, aff)| (cell.clone(), f(aff)))
                .collect(),
        }
    }

    /// Refine two complexes to a common one and combine affine maps per
    /// overlay cell.
    fn overlay(
        f: &PWLFunc,
        g: &PWLFunc,
        mut combine: impl FnMut(Cell, &AffineMap, &AffineMap, &mut Vec<(Arc<Cell>, AffineMap)>),
    ) -> PWLFunc {
        assert_eq!(f.dim, g.dim);
        let mut pieces = Vec::new();
        for (cf, af) in &f.pieces {
            for (cg, ag) in &g.pieces {
                if let Some(cell) = Cell::intersect(cf, cg) {
                    combine(cell, af, ag, &mut pieces);
                }
            }
        }
        PWLFunc {
            dim: f.dim,
            pieces,
        }
    }

    /// `min(1, 1 - f + g)` pointwise.
    fn imp(f: &PWLFunc, g: &PWLFunc) -> PWLFunc {
        PWLFunc::overlay(f, g, |cell, af, ag, out| {
            let h = af.imp_raw(ag);
            let (min, max) = h.min_max_on(&cell);
            if max <= Rat::one() {
                out.push((Arc::new(cell), h));
            } else if min >= Rat::one() {
                let dim = cell.dim;
                out.push((Arc::new(cell), AffineMap::constant_map(dim, Rat::one())));
            } else {
                let below = h.le(&Rat::one());
                match cell.cut(&below) {
                    CutResult::Split(lower) => out.push((Arc::new(lower), h.clone())),
                    CutResult::Whole => out.push((Arc::new(cell.clone()), h.clone())),
                    CutResult::Gone => {}
                }
                match cell.cut(&below.flip()) {
                    CutResult::Split(upper) => {
                        let dim = upper.dim;
                        out.push((Arc::new(upper), AffineMap::constant_map(dim, Rat::one())));
                    }
                    CutResult::Whole => {
                        let dim = cell.dim;
                        out.push((Arc::new(cell), AffineMap::constant_map(dim, Rat::one())));
                    }
                    CutResult::Gone => {}
                }
            }
        })
    }

    /// `max(f, g)` pointwise.
    fn max(f: &PWLFunc, g: &PWLFunc) -> PWLFunc {
        PWLFunc::overlay(f, g, |cell, af, ag, out| {
            let d = af.sub(ag);
            let (min, max) = d.min_max_on(&cell);
            if max <= Rat::zero() {
                out.push((Arc::new(cell), ag.clone()));
            } else if min >= Rat::zero() {
                out.push((Arc::new(cell), af.clone()));
            } else {
                let below = d.le(&Rat::zero());
                match cell.cut(&below) {
                    CutResult::Split(lower) => out.push((Arc::new(lower), ag.clone())),
                    CutResult::Whole => out.push((Arc::new(cell.clone()), ag.clone())),
                    CutResult::Gone => {}
                }
                match cell.cut(&below.flip()) {
                    CutResult::Split(upper) => out.push((Arc::new(upper), af.clone())),
                    CutResult::Whole => out.push((Arc::new(cell), af.clone())),
                    CutResult::Gone => {}
                }
            }
        })
    }

    /// JSON dump: `{dim, pieces: [{ineqs: [[a1..an, b]..], affine: [c1..cn, c0]}]}`.
    pub fn to_json(&self) -> Value {
        let pieces: Vec<Value> = self
            .pieces
            .iter()
            .map(|(cell, aff)| {
                let ineqs: Vec<Value> = cell
                    .ineqs()
                    .iter()
                    .map(|h| {
                        let mut row: Vec<Value> = h
                            .normal
                            .iter()
                            .map(|c| Value::String(format_rat(c)))
                            .collect();
                        row.push(Value::String(format_rat(&h.bound)));
                        Value::Array(row)
                    })
                    .collect();
                let mut affine: Vec<Value> = aff
                    .coeffs
                    .iter()
                    .map(|c| Value::String(format_rat(c)))
                    .collect();
                affine.push(Value::String(format_rat(&aff.constant)));
                json!({"ineqs": ineqs, "affine": affine})
            })
            .collect();
        json!({"dim": self.dim, "pieces": pieces})
    }
}

/// Compile a finitary formula into its exact term function. Finite-list
/// families compile as iterated max/min of their members; schematic
/// families are rejected (their suprema are generally not piecewise
/// linear).
pub fn compile(f: &Formula, dim: usize) -> Result<PWLFunc, CompileError> {
    if dim == 0 {
        return Err(CompileError::ZeroDim);
    }
    if let Some(&var) = f.vars().iter().find(|&&v| v as usize > dim) {
        return Err(CompileError::VarExceedsDim { var, dim });
    }
    let expanded = expand_derived(f);
    let mut memo: HashMap<*const Formula, PWLFunc> = HashMap::new();
    compile_node(&expanded, dim, &mut memo)
}

fn compile_arc(
    f: &Arc<Formula>,
    dim: usize,
    memo: &mut HashMap<*const Formula, PWLFunc>,
) -> Result<PWLFunc, CompileError> {
    let key = Arc::as_ptr(f);
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let result = compile_node(f, dim, memo)?;
    memo.insert(key, result.clone());
    Ok(result)
}

fn compile_node(
    f: &Formula,
    dim: usize,
    memo: &mut HashMap<*const Formula, PWLFunc>,
) -> Result<PWLFunc, CompileError> {
    match f {
        Formula::Var(i) => Ok(PWLFunc::from_affine(
            dim,
            AffineMap::projection(dim, (*i - 1) as usize),
        )),
        Formula::Bot => Ok(PWLFunc::from_affine(
            dim,
            AffineMap::constant_map(dim, Rat::zero()),
        )),
        Formula::Neg(g) => Ok(compile_arc(g, dim, memo)?.map_affine(AffineMap::complement)),
        Formula::Nabla(s, g) => {
            let alpha = s.constant().ok_or(CompileError::UnfilledHole)?;
            Ok(compile_arc(g, dim, memo)?.map_affine(|a| a.nabla(alpha.as_rat())))
        }
        Formula::Imp(a, b) => {
            let fa = compile_arc(a, dim, memo)?;
            let fb = compile_arc(b, dim, memo)?;
            Ok(PWLFunc::imp(&fa, &fb))
        }
        Formula::Sup(fam) => match fam {
            CountableFamily::Finite(members) => {
                let mut acc: Option<PWLFunc> = None;
                for m in members {
                    let fm = compile_node(m, dim, memo)?;
                    acc = Some(match acc {
                        None => fm,
                        Some(prev) => PWLFunc::max(&prev, &fm),
                    });
                }
                Ok(acc.expect("finite families are nonempty"))
            }
            CountableFamily::Schema(_) => Err(CompileError::SchematicFamily),
        },
        // expand_derived leaves no other node kinds
        other => {
            debug_assert!(false, "unexpanded node reached the compiler: {other:?}");
            compile_node(&expand_derived(other), dim, memo)
        }
    }
}

/// Evaluate a compiled function at a rational point of the cube.
pub fn pwl_eval(f: &PWLFunc, point: &[Rational01]) -> Result<Rational01, CompileError> {
    if point.len() != f.dim {
        return Err(CompileError::BadPoint);
    }
    let p: Point = point.iter().map(|r| r.as_rat().clone()).collect();
    for (cell, aff) in &f.pieces {
        if cell.contains(&p) {
            let value = aff.eval(&p);
            return Rational01::new(value).map_err(|_| CompileError::BadPoint);
        }
    }
    Err(CompileError::BadPoint)
}

/// Exact global minimum and a witness vertex (lexicographically smallest
/// among minimizers).
pub fn pwl_min(f: &PWLFunc) -> (Rational01, Vec<Rational01>) {
    extremum(f, true)
}

/// Exact global maximum and a witness vertex.
pub fn pwl_max(f: &PWLFunc) -> (Rational01, Vec<Rational01>) {
    extremum(f, false)
}

fn extremum(f: &PWLFunc, minimize: bool) -> (Rational01, Vec<Rational01>) {
    let mut best: Option<(Rat, Point)> = None;
    for (cell, aff) in &f.pieces {
        for v in cell.vertices() {
            let value = aff.eval(v);
            let better = match &best {
                None => true,
                Some((bv, bw)) => {
                    let cmp = value.cmp(bv);
                    let strictly = if minimize {
                        cmp == std::cmp::Ordering::Less
                    } else {
                        cmp == std::cmp::Ordering::Greater
                    };
                    strictly
                        || (cmp == std::cmp::Ordering::Equal
                            && lex_cmp(v, bw) == std::cmp::Ordering::Less)
                }
            };
            if better {
                best = Some((value, v.clone()));
            }
        }
    }
    let (value, witness) = best.expect("complexes are nonempty");
    (
        Rational01::new(value).expect("term functions map into [0,1]"),
        to_unit_point(&witness),
    )
}

/// Decide validity: the formula is a tautology iff its compiled term
/// function has minimum exactly 1.
pub fn is_tautology(f: &Formula, dim: usize) -> Result<DecisionReport, CompileError> {
    let compiled = compile(f, dim)?;
    let (min, witness) = pwl_min(&compiled);
    if min.is_one() {
        Ok(DecisionReport::yes())
    } else {
        Ok(DecisionReport::no(witness, min))
    }
}

/// Exact sup-norm distance `max |f - g|` over the cube, with a witness.
pub fn sup_distance_witness(
    f: &PWLFunc,
    g: &PWLFunc,
) -> Result<(Rational01, Vec<Rational01>), CompileError> {
    if f.dim != g.dim {
        return Err(CompileError::DimensionMismatch(f.dim, g.dim));
    }
    let mut best: Option<(Rat, Point)> = None;
    let _ = PWLFunc::overlay(f, g, |cell, af, ag, _out| {
        let d = af.sub(ag);
        for v in cell.vertices() {
            let value = d.eval(v).abs();
            let better = match &best {
                None => true,
                Some((bv, bw)) => {
                    value > *bv
                        || (value == *bv && lex_cmp(v, bw) == std::cmp::Ordering::Less)
                }
            };
            if better {
                best = Some((value, v.clone()));
            }
        }
    });
    let (value, witness) = best.expect("complexes cover the cube");
    Ok((
        Rational01::new(value).expect("distance of unit-valued functions"),
        to_unit_point(&witness),
    ))
}

/// Exact sup-norm distance.
pub fn sup_distance(f: &PWLFunc, g: &PWLFunc) -> Result<Rational01, CompileError> {
    Ok(sup_distance_witness(f, g)?.0)
}

/// Decide semantic equivalence via sup-distance zero.
pub fn are_equivalent(f: &Formula, g: &Formula, dim: usize) -> Result<DecisionReport, CompileError> {
    let cf = compile(f, dim)?;
    let cg = compile(g, dim)?;
    let (d, witness) = sup_distance_witness(&cf, &cg)?;
    if d.is_zero() {
        Ok(DecisionReport::yes())
    } else {
        Ok(DecisionReport::no(witness, d))
    }
}

/// Decide whether every model of the theory (a point where all theory
/// members evaluate to 1) gives the conclusion value 1. Vacuously true
/// when no such point exists.
pub fn semantic_consequence(
    theory: &[Formula],
    f: &Formula,
    dim: usize,
) -> Result<DecisionReport, CompileError> {
    let conclusion = compile(f, dim)?;
    let mut premises = Vec::with_capacity(theory.len());
    for t in theory {
        premises.push(compile(t, dim)?);
    }
    // fold to a common refinement carrying all affine maps
    let mut regions: Vec<(Cell, Vec<AffineMap>, AffineMap)> = conclusion
        .pieces
        .iter()
        .map(|(c, a)| ((**c).clone(), Vec::new(), a.clone()))
        .collect();
    for premise in &premises {
        let mut refined = Vec::new();
        for (cell, maps, target) in &regions {
            for (pc, pa) in &premise.pieces {
                if let Some(inter) = Cell::intersect(cell, pc) {
                    let mut maps = maps.clone();
                    maps.push(pa.clone());
                    refined.push((inter, maps, target.clone()));
                }
            }
        }
        regions = refined;
    }
    let mut best: Option<(Rat, Point)> = None;
    for (cell, premise_maps, target) in regions {
        // restrict to the face where every premise is exactly 1
        let mut face = Some(cell);
        for pm in &premise_maps {
            face = match face {
                None => None,
                Some(c) => c.slice(&pm.le(&Rat::one())),
            };
        }
        let Some(face) = face else { continue };
        for v in face.vertices() {
            let value = target.eval(v);
            let better = match &best {
                None => true,
                Some((bv, bw)) => {
                    value < *bv
                        || (value == *bv && lex_cmp(v, bw) == std::cmp::Ordering::Less)
                }
            };
            if better {
                best = Some((value, v.clone()));
            }
        }
    }
    match best {
        None => Ok(DecisionReport::yes()),
        Some((min, witness)) => {
            if min.is_one() {
                Ok(DecisionReport::yes())
            } else {
                Ok(DecisionReport::no(
                    to_unit_point(&witness),
                    Rational01::new(min).expect("unit value"),
                ))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error("complex has no pieces")]
    Empty,
    #[error("cell is not full-dimensional")]
    NotFullDimensional,
    #[error("vertex value outside [0,1]: {0}")]
    ValueOutOfRange(String),
    #[error("cells {0} and {1} disagree on a shared boundary point")]
    BoundaryMismatch(usize, usize),
    #[error("cell volumes sum to {0}, expected 1")]
    CoverMismatch(String),
}

/// Structural validation: full-dimensional cells, unit-range vertex
/// values, exact boundary agreement, and (for `dim <= 3`) an exact
/// volume-sum cover check.
pub fn audit(f: &PWLFunc) -> Result<(), AuditError> {
    if f.pieces.is_empty() {
        return Err(AuditError::Empty);
    }
    for (cell, aff) in &f.pieces {
        if cell.affine_rank() != f.dim {
            return Err(AuditError::NotFullDimensional);
        }
        for v in cell.vertices() {
            let value = aff.eval(v);
            if value.is_negative() || value > Rat::one() {
                return Err(AuditError::ValueOutOfRange(format_rat(&value)));
            }
        }
    }
    for i in 0..f.pieces.len() {
        for j in (i + 1)..f.pieces.len() {
            let (ci, ai) = &f.pieces[i];
            let (cj, aj) = &f.pieces[j];
            if let Some(shared) = Cell::intersect_face(ci, cj) {
                for v in shared.vertices() {
                    if ai.eval(v) != aj.eval(v) {
                        return Err(AuditError::BoundaryMismatch(i, j));
                    }
                }
            }
        }
    }
    if f.dim <= 3 {
        let total: Rat = f.pieces.iter().map(|(c, _)| c.volume()).sum();
        if !total.is_one() {
            return Err(AuditError::CoverMismatch(format_rat(&total)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn r(p: i64, q: i64) -> Rational01 {
        Rational01::from_ints(p, q)
    }

    fn taut(text: &str, dim: usize) -> bool {
        is_tautology(&parse(text).unwrap(), dim).unwrap().verdict
    }

    #[test]
    fn compile_doubling() {
        // x1 (+) x1 = min(1, 2x): two pieces
        let f = compile(&parse("x1 (+) x1").unwrap(), 1).unwrap();
        assert_eq!(f.pieces.len(), 2);
        assert_eq!(pwl_eval(&f, &[r(1, 4)]).unwrap(), r(1, 2));
        assert_eq!(pwl_eval(&f, &[r(1, 2)]).unwrap(), r(1, 1));
        assert_eq!(pwl_eval(&f, &[r(3, 4)]).unwrap(), r(1, 1));
        audit(&f).unwrap();
    }

    #[test]
    fn compile_negation_and_delta() {
        let f = compile(&parse("!x1").unwrap(), 1).unwrap();
        assert_eq!(pwl_eval(&f, &[r(1, 4)]).unwrap(), r(3, 4));
        let g = compile(&parse("del(1/3, x1)").unwrap(), 1).unwrap();
        assert_eq!(g.pieces.len(), 1);
        assert_eq!(pwl_eval(&g, &[r(1, 2)]).unwrap(), r(1, 6));
    }

    #[test]
    fn min_of_complement() {
        let f = compile(&parse("!x1").unwrap(), 1).unwrap();
        let (min, witness) = pwl_min(&f);
        assert_eq!(min, r(0, 1));
        assert_eq!(witness, vec![r(1, 1)]);
    }

    #[test]
    fn l3_instance_is_tautology() {
        assert!(taut("((x1 -> x2) -> x2) -> ((x2 -> x1) -> x1)", 2));
    }

    #[test]
    fn contraction_fails_at_half() {
        let report = is_tautology(&parse("x1 -> x1 (.) x1").unwrap(), 1).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.witness.unwrap(), vec![r(1, 2)]);
        assert_eq!(report.value_at_witness.unwrap(), r(1, 2));
    }

    #[test]
    fn min_attained_inside() {
        let f = compile(&parse("x1 -> x1 (.) x1").unwrap(), 1).unwrap();
        let (min, witness) = pwl_min(&f);
        assert_eq!(min, r(1, 2));
        assert_eq!(witness, vec![r(1, 2)]);
        audit(&f).unwrap();
    }

    #[test]
    fn sup_distance_examples() {
        let id = compile(&parse("x1").unwrap(), 1).unwrap();
        let neg = compile(&parse("!x1").unwrap(), 1).unwrap();
        let half = compile(&parse("del(1/2, x1)").unwrap(), 1).unwrap();
        assert_eq!(sup_distance(&id, &id).unwrap(), r(0, 1));
        assert_eq!(sup_distance(&id, &neg).unwrap(), r(1, 1));
        assert_eq!(sup_distance(&id, &half).unwrap(), r(1, 2));
    }

    #[test]
    fn equivalence_of_or_expansions() {
        let a = parse("x1 \\/ x2").unwrap();
        let b = parse("(x1 -> x2) -> x2").unwrap();
        assert!(are_equivalent(&a, &b, 2).unwrap().verdict);
        let c = parse("x1 (+) x1").unwrap();
        let report = are_equivalent(&parse("x1").unwrap(), &c, 1).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.witness.unwrap(), vec![r(1, 2)]);
    }

    #[test]
    fn consequence_examples() {
        let x1 = parse("x1").unwrap();
        assert!(semantic_consequence(&[x1.clone()], &x1, 1).unwrap().verdict);
        // {x1 (+) x1} does not give x1: at x = 1/2 the premise is 1
        let premise = parse("x1 (+) x1").unwrap();
        let report = semantic_consequence(&[premise], &x1, 1).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.witness.unwrap(), vec![r(1, 2)]);
        assert_eq!(report.value_at_witness.unwrap(), r(1, 2));
        // {x1} forces x = 1, where x1 (.) x1 is 1
        let square = parse("x1 (.) x1").unwrap();
        assert!(semantic_consequence(&[x1], &square, 1).unwrap().verdict);
    }

    #[test]
    fn vacuous_consequence() {
        // no point gives the premise value 1
        let premise = parse("del(1/2, x1)").unwrap();
        let conclusion = parse("0").unwrap();
        assert!(
            semantic_consequence(&[premise], &conclusion, 1)
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn finite_sup_compiles_as_max() {
        let f = compile(&parse("V{x1; x2}").unwrap(), 2).unwrap();
        assert_eq!(pwl_eval(&f, &[r(1, 4), r(3, 4)]).unwrap(), r(3, 4));
        audit(&f).unwrap();
        let report = is_tautology(&parse("x2 -> V{x1; x2; x3}").unwrap(), 3).unwrap();
        assert!(report.verdict);
    }

    #[test]
    fn schema_family_rejected() {
        let f = parse("V[del(@s, x1); seq=dyadic_complement; mono=inc]").unwrap();
        assert!(matches!(
            compile(&f, 1),
            Err(CompileError::SchematicFamily)
        ));
    }

    #[test]
    fn ramp_compilation() {
        // ramp(1/4, 1/2, x1): 0, then affine to 1 at 1/2, then 1
        let f = compile(&parse("ramp(1/4, 1/2, x1)").unwrap(), 1).unwrap();
        assert_eq!(pwl_eval(&f, &[r(1, 8)]).unwrap(), r(0, 1));
        assert_eq!(pwl_eval(&f, &[r(3, 8)]).unwrap(), r(1, 2));
        assert_eq!(pwl_eval(&f, &[r(1, 2)]).unwrap(), r(1, 1));
        assert_eq!(pwl_eval(&f, &[r(3, 4)]).unwrap(), r(1, 1));
        audit(&f).unwrap();
    }

    #[test]
    fn negation_duality() {
        let texts = ["x1 (+) x2", "x1 -> del(1/2, x2)", "x1 /\\ !x2"];
        for text in texts {
            let f = parse(text).unwrap();
            let nf = Formula::neg(f.clone());
            let cf = compile(&f, 2).unwrap();
            let cnf = compile(&nf, 2).unwrap();
            let (max, _) = pwl_max(&cf);
            let (min, _) = pwl_min(&cnf);
            assert_eq!(max, min.complement(), "duality failed for {text}");
        }
    }

    #[test]
    fn json_dump_shape() {
        let f = compile(&parse("x1 (+) x1").unwrap(), 1).unwrap();
        let v = f.to_json();
        assert_eq!(v["dim"], 1);
        assert!(v["pieces"].as_array().unwrap().len() == 2);
        assert!(v["pieces"][0]["affine"].as_array().unwrap().len() == 2);
    }
}
