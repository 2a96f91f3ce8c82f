//! The axiom schemas of the logic and first-order matching against them.
//!
//! Schemas L1-L4 are the Lukasiewicz axioms, R1-R4 govern the graded
//! connectives, and S1 introduces countable disjunctions. The biconditional
//! axioms R1-R4 are matched in expanded form, so the unifier stays
//! first-order: formula metavariables bind subformulas, scalar
//! metavariables bind rationals, and derived scalar slots
//! (`alpha (.) beta*`, `alpha * beta`) are checked as equations once both
//! scalars are bound.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::{expand_derived, CountableFamily, Formula};
use crate::rational::Rational01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomId {
    L1,
    L2,
    L3,
    L4,
    R1,
    R2,
    R3,
    R4,
    S1,
}

impl AxiomId {
    pub const ALL: [AxiomId; 9] = [
        AxiomId::L1,
        AxiomId::L2,
        AxiomId::L3,
        AxiomId::L4,
        AxiomId::R1,
        AxiomId::R2,
        AxiomId::R3,
        AxiomId::R4,
        AxiomId::S1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AxiomId::L1 => "L1",
            AxiomId::L2 => "L2",
            AxiomId::L3 => "L3",
            AxiomId::L4 => "L4",
            AxiomId::R1 => "R1",
            AxiomId::R2 => "R2",
            AxiomId::R3 => "R3",
            AxiomId::R4 => "R4",
            AxiomId::S1 => "S1",
        }
    }

    pub fn parse(s: &str) -> Option<AxiomId> {
        AxiomId::ALL.iter().copied().find(|id| id.name() == s)
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetaVar {
    Phi,
    Psi,
    Chi,
}

impl MetaVar {
    pub fn name(&self) -> &'static str {
        match self {
            MetaVar::Phi => "phi",
            MetaVar::Psi => "psi",
            MetaVar::Chi => "chi",
        }
    }

    pub fn parse(s: &str) -> Option<MetaVar> {
        match s {
            "phi" => Some(MetaVar::Phi),
            "psi" => Some(MetaVar::Psi),
            "chi" => Some(MetaVar::Chi),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScalarVar {
    Alpha,
    Beta,
}

impl ScalarVar {
    pub fn name(&self) -> &'static str {
        match self {
            ScalarVar::Alpha => "alpha",
            ScalarVar::Beta => "beta",
        }
    }

    pub fn parse(s: &str) -> Option<ScalarVar> {
        match s {
            "alpha" => Some(ScalarVar::Alpha),
            "beta" => Some(ScalarVar::Beta),
            _ => None,
        }
    }
}

/// Scalar slot of an axiom pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
enum ScalarPat {
    Var(ScalarVar),
    One,
    /// `max(0, alpha - beta)`, the scalar of R2.
    AlphaOdotBetaStar,
    /// `alpha * beta`, the scalar of R3.
    AlphaTimesBeta,
}

/// Axiom pattern over core connectives with metavariables.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Pat {
    Meta(MetaVar),
    Neg(Box<Pat>),
    Imp(Box<Pat>, Box<Pat>),
    Nabla(ScalarPat, Box<Pat>),
}

fn meta(v: MetaVar) -> Pat {
    Pat::Meta(v)
}

fn pneg(p: Pat) -> Pat {
    Pat::Neg(Box::new(p))
}

fn pimp(a: Pat, b: Pat) -> Pat {
    Pat::Imp(Box::new(a), Box::new(b))
}

fn pnab(s: ScalarPat, p: Pat) -> Pat {
    Pat::Nabla(s, Box::new(p))
}

/// `a <-> b` in expanded form: `!((a -> b) -> !(b -> a))`.
fn piff(a: Pat, b: Pat) -> Pat {
    pneg(pimp(pimp(a.clone(), b.clone()), pneg(pimp(b, a))))
}

fn pattern(id: AxiomId) -> Pat {
    use MetaVar::{Chi, Phi, Psi};
    match id {
        // phi -> (psi -> phi)
        AxiomId::L1 => pimp(meta(Phi), pimp(meta(Psi), meta(Phi))),
        // (phi -> psi) -> ((psi -> chi) -> (phi -> chi))
        AxiomId::L2 => pimp(
            pimp(meta(Phi), meta(Psi)),
            pimp(pimp(meta(Psi), meta(Chi)), pimp(meta(Phi), meta(Chi))),
        ),
        // ((phi -> psi) -> psi) -> ((psi -> phi) -> phi)
        AxiomId::L3 => pimp(
            pimp(pimp(meta(Phi), meta(Psi)), meta(Psi)),
            pimp(pimp(meta(Psi), meta(Phi)), meta(Phi)),
        ),
        // (!psi -> !phi) -> (phi -> psi)
        AxiomId::L4 => pimp(
            pimp(pneg(meta(Psi)), pneg(meta(Phi))),
            pimp(meta(Phi), meta(Psi)),
        ),
        // nab_a(phi -> psi) <-> (nab_a phi -> nab_a psi)
        AxiomId::R1 => piff(
            pnab(ScalarPat::Var(ScalarVar::Alpha), pimp(meta(Phi), meta(Psi))),
            pimp(
                pnab(ScalarPat::Var(ScalarVar::Alpha), meta(Phi)),
                pnab(ScalarPat::Var(ScalarVar::Alpha), meta(Psi)),
            ),
        ),
        // nab_{a (.) b*} phi <-> (nab_b phi -> nab_a phi)
        AxiomId::R2 => piff(
            pnab(ScalarPat::AlphaOdotBetaStar, meta(Phi)),
            pimp(
                pnab(ScalarPat::Var(ScalarVar::Beta), meta(Phi)),
                pnab(ScalarPat::Var(ScalarVar::Alpha), meta(Phi)),
            ),
        ),
        // nab_a(nab_b phi) <-> nab_{a*b} phi
        AxiomId::R3 => piff(
            pnab(
                ScalarPat::Var(ScalarVar::Alpha),
                pnab(ScalarPat::Var(ScalarVar::Beta), meta(Phi)),
            ),
            pnab(ScalarPat::AlphaTimesBeta, meta(Phi)),
        ),
        // nab_1 phi <-> phi
        AxiomId::R4 => piff(pnab(ScalarPat::One, meta(Phi)), meta(Phi)),
        AxiomId::S1 => unreachable!("S1 is matched structurally, not by pattern"),
    }
}

/// Bindings of an axiom instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomSubst {
    pub formulas: BTreeMap<MetaVar, Formula>,
    pub scalars: BTreeMap<ScalarVar, Rational01>,
    /// For S1: the family and the selected member index (1-based).
    pub family: Option<(CountableFamily, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error("axiom {0} requires metavariable {1}")]
    MissingFormula(AxiomId, &'static str),
    #[error("axiom {0} requires scalar {1}")]
    MissingScalar(AxiomId, &'static str),
    #[error("axiom S1 requires a family binding")]
    MissingFamily,
}

/// `max(0, alpha - beta)` as a unit scalar.
pub fn alpha_odot_beta_star(alpha: &Rational01, beta: &Rational01) -> Rational01 {
    Rational01::clamped(alpha.as_rat() - beta.as_rat())
}

fn scalar_of(pat: &ScalarPat, subst: &AxiomSubst, id: AxiomId) -> Result<Rational01, AxiomError> {
    let lookup = |v: ScalarVar| {
        subst
            .scalars
            .get(&v)
            .cloned()
            .ok_or(AxiomError::MissingScalar(id, v.name()))
    };
    match pat {
        ScalarPat::Var(v) => lookup(*v),
        ScalarPat::One => Ok(Rational01::one()),
        ScalarPat::AlphaOdotBetaStar => {
            let a = lookup(ScalarVar::Alpha)?;
            let b = lookup(ScalarVar::Beta)?;
            Ok(alpha_odot_beta_star(&a, &b))
        }
        ScalarPat::AlphaTimesBeta => {
            let a = lookup(ScalarVar::Alpha)?;
            let b = lookup(ScalarVar::Beta)?;
            Ok(Rational01::new(a.as_rat() * b.as_rat()).expect("product of unit scalars"))
        }
    }
}

fn realize(pat: &Pat, subst: &AxiomSubst, id: AxiomId) -> Result<Formula, AxiomError> {
    match pat {
        Pat::Meta(v) => subst
            .formulas
            .get(v)
            .cloned()
            .ok_or(AxiomError::MissingFormula(id, v.name())),
        Pat::Neg(p) => Ok(Formula::neg(realize(p, subst, id)?)),
        Pat::Imp(a, b) => Ok(Formula::imp(realize(a, subst, id)?, realize(b, subst, id)?)),
        Pat::Nabla(s, p) => Ok(Formula::nabla(
            scalar_of(s, subst, id)?,
            realize(p, subst, id)?,
        )),
    }
}

/// Instantiate an axiom schema. The result is in expanded core form.
pub fn instantiate(id: AxiomId, subst: &AxiomSubst) -> Result<Formula, AxiomError> {
    if id == AxiomId::S1 {
        let (family, k) = subst.family.clone().ok_or(AxiomError::MissingFamily)?;
        let member = family.nth(k);
        return Ok(expand_derived(&Formula::imp(member, Formula::Sup(family))));
    }
    let f = realize(&pattern(id), subst, id)?;
    Ok(expand_derived(&f))
}

struct Matcher {
    formulas: BTreeMap<MetaVar, Formula>,
    scalars: BTreeMap<ScalarVar, Rational01>,
    deferred: Vec<(ScalarPat, Rational01)>,
}

impl Matcher {
    fn go(&mut self, pat: &Pat, f: &Formula) -> bool {
        match (pat, f) {
            (Pat::Meta(v), _) => match self.formulas.get(v) {
                Some(bound) => bound == f,
                None => {
                    self.formulas.insert(*v, f.clone());
                    true
                }
            },
            (Pat::Neg(p), Formula::Neg(g)) => self.go(p, g),
            (Pat::Imp(a, b), Formula::Imp(x, y)) => self.go(a, x) && self.go(b, y),
            (Pat::Nabla(s, p), Formula::Nabla(sc, g)) => {
                let Some(value) = sc.constant() else {
                    return false;
                };
                let scalar_ok = match s {
                    ScalarPat::Var(v) => match self.scalars.get(v) {
                        Some(bound) => bound == value,
                        None => {
                            self.scalars.insert(*v, value.clone());
                            true
                        }
                    },
                    ScalarPat::One => value.is_one(),
                    computed => {
                        self.deferred.push((computed.clone(), value.clone()));
                        true
                    }
                };
                scalar_ok && self.go(p, g)
            }
            _ => false,
        }
    }

    fn verify_deferred(&self) -> bool {
        self.deferred.iter().all(|(pat, observed)| {
            let (Some(a), Some(b)) = (
                self.scalars.get(&ScalarVar::Alpha),
                self.scalars.get(&ScalarVar::Beta),
            ) else {
                return false;
            };
            let expected = match pat {
                ScalarPat::AlphaOdotBetaStar => alpha_odot_beta_star(a, b),
                ScalarPat::AlphaTimesBeta => {
                    Rational01::new(a.as_rat() * b.as_rat()).expect("unit product")
                }
                _ => unreachable!("only computed slots are deferred"),
            };
            expected == *observed
        })
    }
}

/// Match a formula against the axiom schemas, in the fixed order L1..S1.
/// The formula is expanded first; the returned substitution reproduces the
/// expanded formula under [`instantiate`].
pub fn match_axiom(f: &Formula) -> Option<(AxiomId, AxiomSubst)> {
    let f = expand_derived(f);
    for id in AxiomId::ALL {
        if let Some(subst) = match_one(id, &f) {
            return Some((id, subst));
        }
    }
    None
}

/// Match against a single axiom schema.
pub fn match_one(id: AxiomId, f: &Formula) -> Option<AxiomSubst> {
    let f = expand_derived(f);
    if id == AxiomId::S1 {
        return match_s1(&f);
    }
    let mut matcher = Matcher {
        formulas: BTreeMap::new(),
        scalars: BTreeMap::new(),
        deferred: Vec::new(),
    };
    if matcher.go(&pattern(id), &f) && matcher.verify_deferred() {
        Some(AxiomSubst {
            formulas: matcher.formulas,
            scalars: matcher.scalars,
            family: None,
        })
    } else {
        None
    }
}

/// How many schema members are tried when matching `phi_k -> V[...]`.
const S1_SCHEMA_SEARCH_BOUND: u64 = 64;

fn match_s1(f: &Formula) -> Option<AxiomSubst> {
    let Formula::Imp(lhs, rhs) = f else {
        return None;
    };
    let Formula::Sup(family) = &**rhs else {
        return None;
    };
    let candidates: Box<dyn Iterator<Item = u64>> = match family {
        CountableFamily::Finite(members) => Box::new(1..=(members.len() as u64 + 1)),
        CountableFamily::Schema(_) => Box::new(1..=S1_SCHEMA_SEARCH_BOUND),
    };
    for k in candidates {
        if expand_derived(&family.nth(k)) == **lhs {
            return Some(AxiomSubst {
                formulas: BTreeMap::new(),
                scalars: BTreeMap::new(),
                family: Some((family.clone(), k)),
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn l1_matches_with_bindings() {
        let f = parse("x3 -> (x1 -> x3)").unwrap();
        let (id, subst) = match_axiom(&f).unwrap();
        assert_eq!(id, AxiomId::L1);
        assert_eq!(subst.formulas[&MetaVar::Phi], parse("x3").unwrap());
        assert_eq!(subst.formulas[&MetaVar::Psi], parse("x1").unwrap());
        assert_eq!(instantiate(id, &subst).unwrap(), expand_derived(&f));
    }

    #[test]
    fn l1_requires_equal_occurrences() {
        let f = parse("x3 -> (x1 -> x2)").unwrap();
        assert!(match_axiom(&f).is_none());
    }

    #[test]
    fn r2_scalar_side_condition() {
        // alpha = 1/2, beta = 1/3: alpha (.) beta* = 1/6
        let f = parse("nab(1/6, x1) <-> (nab(1/3, x1) -> nab(1/2, x1))").unwrap();
        let (id, subst) = match_axiom(&f).unwrap();
        assert_eq!(id, AxiomId::R2);
        assert_eq!(subst.scalars[&ScalarVar::Alpha], Rational01::from_ints(1, 2));
        assert_eq!(subst.scalars[&ScalarVar::Beta], Rational01::from_ints(1, 3));
        // wrong computed scalar must not match
        let bad = parse("nab(1/5, x1) <-> (nab(1/3, x1) -> nab(1/2, x1))").unwrap();
        assert!(match_axiom(&bad).is_none());
    }

    #[test]
    fn r3_product_scalar() {
        let f = parse("nab(1/2, nab(2/3, x1)) <-> nab(1/3, x1)").unwrap();
        let (id, _) = match_axiom(&f).unwrap();
        assert_eq!(id, AxiomId::R3);
    }

    #[test]
    fn r4_unit_scalar() {
        let f = parse("nab(1, x2) <-> x2").unwrap();
        let (id, _) = match_axiom(&f).unwrap();
        assert_eq!(id, AxiomId::R4);
        let bad = parse("nab(1/2, x2) <-> x2").unwrap();
        assert!(match_axiom(&bad).is_none());
    }

    #[test]
    fn s1_member_and_padding() {
        let f = parse("x2 -> V{x1; x2; x3}").unwrap();
        let (id, subst) = match_axiom(&f).unwrap();
        assert_eq!(id, AxiomId::S1);
        assert_eq!(subst.family.unwrap().1, 2);
        // the bottom-padded member also matches
        let padded = parse("0 -> V{x1; x2}").unwrap();
        let (_, subst) = match_axiom(&padded).unwrap();
        assert_eq!(subst.family.unwrap().1, 3);
    }

    #[test]
    fn s1_schema_member() {
        let f = parse("del(3/4, x1) -> V[del(@s, x1); seq=dyadic_complement; mono=inc]").unwrap();
        let (id, subst) = match_axiom(&f).unwrap();
        assert_eq!(id, AxiomId::S1);
        assert_eq!(subst.family.unwrap().1, 2);
    }

    #[test]
    fn round_trip_for_all_pattern_axioms() {
        // fixed instantiation: phi := x1, psi := x2 -> x3, chi := !x1
        let mut subst = AxiomSubst::default();
        subst.formulas.insert(MetaVar::Phi, parse("x1").unwrap());
        subst
            .formulas
            .insert(MetaVar::Psi, parse("x2 -> x3").unwrap());
        subst.formulas.insert(MetaVar::Chi, parse("!x1").unwrap());
        subst
            .scalars
            .insert(ScalarVar::Alpha, Rational01::from_ints(3, 4));
        subst
            .scalars
            .insert(ScalarVar::Beta, Rational01::from_ints(1, 4));
        for id in AxiomId::ALL.into_iter().filter(|&id| id != AxiomId::S1) {
            let inst = instantiate(id, &subst).unwrap();
            let (found, found_subst) = match_axiom(&inst)
                .unwrap_or_else(|| panic!("instance of {id} did not match any schema"));
            let inst_back = instantiate(found, &found_subst).unwrap();
            assert_eq!(inst, inst_back, "round trip failed for {id}");
        }
    }
}
