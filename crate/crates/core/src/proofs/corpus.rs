//! Proof construction helpers and the shipped proof corpus.
//!
//! The builder appends axiom instances, modus ponens steps and rule
//! applications to a growing proof, and layers the standard derived rules
//! on top (transitivity, suffixing, the assertion lemma, double negation,
//! contraposition). The double-negation derivations follow the classical
//! ones in the Wajsberg-style axiomatization; every step below is an
//! explicit axiom instance or modus ponens, so the checker re-validates
//! them from scratch.

use std::collections::BTreeMap;

use super::{Justification, ProofObject, ProofStep, SupPremises};
use crate::axioms::{instantiate, AxiomId, AxiomSubst, MetaVar};
use crate::formula::{expand_derived, CountableFamily, Formula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("step {0} is not an implication")]
    NotAnImplication(usize),
    #[error("steps {0} and {1} do not compose")]
    DoesNotCompose(usize, usize),
    #[error("hypothesis index {0} out of range")]
    BadHypothesis(usize),
    #[error("axiom instantiation failed: {0}")]
    Axiom(String),
}

/// Incremental proof constructor.
pub struct Builder {
    theory: Vec<Formula>,
    steps: Vec<ProofStep>,
}

impl Builder {
    pub fn new(theory: Vec<Formula>) -> Self {
        Builder {
            theory,
            steps: Vec::new(),
        }
    }

    pub fn finish(self) -> ProofObject {
        ProofObject {
            theory: self.theory,
            steps: self.steps,
        }
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.steps[i].formula
    }

    pub fn push(&mut self, formula: Formula, justification: Justification) -> usize {
        self.steps.push(ProofStep {
            formula,
            justification,
        });
        self.steps.len() - 1
    }

    fn destructure_imp(&self, i: usize) -> Result<(Formula, Formula), BuildError> {
        match expand_derived(self.formula(i)) {
            Formula::Imp(a, b) => Ok(((*a).clone(), (*b).clone())),
            _ => Err(BuildError::NotAnImplication(i)),
        }
    }

    pub fn hyp(&mut self, k: usize) -> Result<usize, BuildError> {
        let formula = self
            .theory
            .get(k)
            .cloned()
            .ok_or(BuildError::BadHypothesis(k))?;
        Ok(self.push(formula, Justification::Hypothesis(k)))
    }

    /// Append an axiom instance with explicit bindings.
    pub fn axiom(&mut self, id: AxiomId, subst: AxiomSubst) -> Result<usize, BuildError> {
        let formula = instantiate(id, &subst).map_err(|e| BuildError::Axiom(e.to_string()))?;
        Ok(self.push(
            formula,
            Justification::Axiom {
                id,
                subst: Some(subst),
            },
        ))
    }

    fn formula_subst(pairs: &[(MetaVar, &Formula)]) -> AxiomSubst {
        AxiomSubst {
            formulas: pairs
                .iter()
                .map(|(v, f)| (*v, (*f).clone()))
                .collect::<BTreeMap<_, _>>(),
            scalars: BTreeMap::new(),
            family: None,
        }
    }

    /// `phi -> (psi -> phi)`.
    pub fn l1(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        self.axiom(
            AxiomId::L1,
            Self::formula_subst(&[(MetaVar::Phi, phi), (MetaVar::Psi, psi)]),
        )
    }

    /// `(phi -> psi) -> ((psi -> chi) -> (phi -> chi))`.
    pub fn l2(
        &mut self,
        phi: &Formula,
        psi: &Formula,
        chi: &Formula,
    ) -> Result<usize, BuildError> {
        self.axiom(
            AxiomId::L2,
            Self::formula_subst(&[
                (MetaVar::Phi, phi),
                (MetaVar::Psi, psi),
                (MetaVar::Chi, chi),
            ]),
        )
    }

    /// `((phi -> psi) -> psi) -> ((psi -> phi) -> phi)`.
    pub fn l3(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        self.axiom(
            AxiomId::L3,
            Self::formula_subst(&[(MetaVar::Phi, phi), (MetaVar::Psi, psi)]),
        )
    }

    /// `(!psi -> !phi) -> (phi -> psi)`.
    pub fn l4(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        self.axiom(
            AxiomId::L4,
            Self::formula_subst(&[(MetaVar::Phi, phi), (MetaVar::Psi, psi)]),
        )
    }

    /// S1: `member_k -> V[family]`.
    pub fn s1(&mut self, family: CountableFamily, k: u64) -> Result<usize, BuildError> {
        self.axiom(
            AxiomId::S1,
            AxiomSubst {
                formulas: BTreeMap::new(),
                scalars: BTreeMap::new(),
                family: Some((family, k)),
            },
        )
    }

    pub fn mp(&mut self, premise: usize, implication: usize) -> Result<usize, BuildError> {
        let (ante, cons) = self.destructure_imp(implication)?;
        if expand_derived(self.formula(premise)) != ante {
            return Err(BuildError::DoesNotCompose(premise, implication));
        }
        Ok(self.push(
            cons,
            Justification::ModusPonens {
                premise,
                implication,
            },
        ))
    }

    /// SUP application: from refs proving `member_k -> psi`, conclude
    /// `V[family] -> psi`.
    pub fn sup_rule(
        &mut self,
        family: CountableFamily,
        psi: Formula,
        refs: Vec<usize>,
    ) -> Result<usize, BuildError> {
        let formula = Formula::imp(Formula::Sup(family), psi);
        Ok(self.push(
            expand_derived(&formula),
            Justification::SupRule {
                premises: SupPremises::Finite(refs),
            },
        ))
    }

    /// From `A -> B` and `B -> C`, conclude `A -> C` (via L2).
    pub fn trans(&mut self, ab: usize, bc: usize) -> Result<usize, BuildError> {
        let (a, b) = self.destructure_imp(ab)?;
        let (b2, c) = self.destructure_imp(bc)?;
        if b != b2 {
            return Err(BuildError::DoesNotCompose(ab, bc));
        }
        let l2 = self.l2(&a, &b, &c)?;
        let step = self.mp(ab, l2)?;
        self.mp(bc, step)
    }

    /// From `A -> B`, conclude `(B -> C) -> (A -> C)` (via L2).
    pub fn suf(&mut self, ab: usize, c: &Formula) -> Result<usize, BuildError> {
        let (a, b) = self.destructure_imp(ab)?;
        let l2 = self.l2(&a, &b, c)?;
        self.mp(ab, l2)
    }

    /// The assertion lemma `a -> ((a -> b) -> b)`.
    pub fn assert_lemma(&mut self, a: &Formula, b: &Formula) -> Result<usize, BuildError> {
        let a = expand_derived(a);
        let b = expand_derived(b);
        let ba = Formula::imp(b.clone(), a.clone());
        let ab = Formula::imp(a.clone(), b.clone());
        let baa = Formula::imp(ba, a.clone());
        let abb = Formula::imp(ab, b.clone());
        let s1 = self.l1(&a, &Formula::imp(b.clone(), a.clone()))?;
        let s2 = self.l3(&b, &a)?;
        let s3 = self.l2(&a, &baa, &abb)?;
        let s4 = self.mp(s1, s3)?;
        self.mp(s2, s4)
    }

    /// From a proved `q` (step index), conclude `(q -> b) -> b`.
    pub fn detach_assert(&mut self, hq: usize, b: &Formula) -> Result<usize, BuildError> {
        let q = expand_derived(self.formula(hq));
        let lemma = self.assert_lemma(&q, b)?;
        self.mp(hq, lemma)
    }

    /// The identity lemma `f -> f` (nine steps from L1-L3).
    pub fn lemma_i(&mut self, f: &Formula) -> Result<usize, BuildError> {
        let f = expand_derived(f);
        let q = Formula::imp(f.clone(), Formula::imp(f.clone(), f.clone()));
        let s1 = self.l1(&f, &f)?;
        let s2 = self.l1(&q, &Formula::imp(f.clone(), q.clone()))?;
        let s3 = self.mp(s1, s2)?;
        let s4 = self.l1(&f, &q)?;
        let s5 = self.l2(&f, &Formula::imp(q.clone(), f.clone()), &f)?;
        let s6 = self.mp(s4, s5)?;
        let s7 = self.l3(&f, &q)?;
        let s8 = self.mp(s3, s7)?;
        self.mp(s8, s6)
    }

    /// Double-negation elimination `!!f -> f` (classical seventeen-step
    /// derivation; `A` is the L1 instance `f -> (f -> f)`).
    pub fn dn2(&mut self, f: &Formula) -> Result<usize, BuildError> {
        let f = expand_derived(f);
        let a = Formula::imp(f.clone(), Formula::imp(f.clone(), f.clone()));
        let na = Formula::neg(a.clone());
        let nna = Formula::neg(na.clone());
        let p = Formula::neg(f.clone());
        let q = Formula::neg(p.clone());
        let nna_q = Formula::imp(nna.clone(), q.clone());
        let p_na = Formula::imp(p.clone(), na.clone());
        let a_f = Formula::imp(a.clone(), f.clone());
        let s1 = self.l1(&q, &nna)?;
        let s2 = self.l2(&q, &nna_q, &p_na)?;
        let s3 = self.mp(s1, s2)?;
        let s4 = self.l4(&p, &na)?;
        let s5 = self.mp(s4, s3)?;
        let s6 = self.l2(&q, &p_na, &a_f)?;
        let s7 = self.mp(s5, s6)?;
        let s8 = self.l4(&a, &f)?;
        let s9 = self.mp(s8, s7)?;
        let s10 = self.l2(&q, &a_f, &f)?;
        let s11 = self.mp(s9, s10)?;
        let s12 = self.l1(&f, &f)?;
        let s13 = self.l1(&a, &Formula::imp(f.clone(), a.clone()))?;
        let s14 = self.mp(s12, s13)?;
        let s15 = self.l3(&f, &a)?;
        let s16 = self.mp(s14, s15)?;
        self.mp(s16, s11)
    }

    /// Double-negation introduction `f -> !!f`.
    pub fn dn1(&mut self, f: &Formula) -> Result<usize, BuildError> {
        let f = expand_derived(f);
        let nf = Formula::neg(f.clone());
        let dn2_on_neg = self.dn2(&nf)?;
        let l4 = self.l4(&f, &Formula::neg(nf))?;
        self.mp(dn2_on_neg, l4)
    }

    /// Contraposition rule: from a proved `X -> Y`, conclude `!Y -> !X`.
    pub fn contra(&mut self, h: usize) -> Result<usize, BuildError> {
        let (x, y) = self.destructure_imp(h)?;
        let c1 = self.dn2(&x)?;
        let c2 = self.trans(c1, h)?;
        let c3 = self.dn1(&y)?;
        let c4 = self.trans(c2, c3)?;
        let l4 = self.l4(&Formula::neg(y), &Formula::neg(x))?;
        self.mp(c4, l4)
    }

    /// Ex falso `0 -> psi`: the padded S1 instance `0 -> V{psi}` chained
    /// with the SUP collapse `V{psi} -> psi`.
    pub fn bot_elim(&mut self, psi: &Formula) -> Result<usize, BuildError> {
        let psi = expand_derived(psi);
        let family = CountableFamily::finite(vec![psi.clone()]).expect("singleton family");
        let ident = self.lemma_i(&psi)?;
        let collapse = self.sup_rule(family.clone(), psi.clone(), vec![ident])?;
        let padded = self.s1(family, 2)?;
        self.trans(padded, collapse)
    }
}

/// Corpus (a): `f -> f`.
pub fn identity_proof(f: &Formula) -> ProofObject {
    let mut b = Builder::new(vec![]);
    b.lemma_i(f).expect("identity derivation");
    b.finish()
}

/// Corpus (d): `0 -> psi` via SUP padding.
pub fn bot_elim_proof(psi: &Formula) -> ProofObject {
    let mut b = Builder::new(vec![]);
    b.bot_elim(psi).expect("ex falso derivation");
    b.finish()
}

/// Corpus (b), first direction: `V{phi; psi} -> (phi \/ psi)`.
pub fn sup_to_or_proof(phi: &Formula, psi: &Formula) -> ProofObject {
    let phi = expand_derived(phi);
    let psi = expand_derived(psi);
    let or = expand_derived(&Formula::or(phi.clone(), psi.clone()));
    let mut b = Builder::new(vec![]);
    let from_phi = b.assert_lemma(&phi, &psi).expect("assertion lemma");
    let from_psi = b
        .l1(&psi, &Formula::imp(phi.clone(), psi.clone()))
        .expect("L1");
    let family = CountableFamily::finite(vec![phi, psi]).expect("pair family");
    b.sup_rule(family, or, vec![from_phi, from_psi])
        .expect("SUP");
    b.finish()
}

/// Corpus (b), second direction: `(phi \/ psi) -> V{phi; psi}`, the
/// proof-by-cases elaboration.
pub fn or_to_sup_proof(phi: &Formula, psi: &Formula) -> ProofObject {
    let phi = expand_derived(phi);
    let psi = expand_derived(psi);
    let family = CountableFamily::finite(vec![phi.clone(), psi.clone()]).expect("pair family");
    let v = expand_derived(&Formula::Sup(family.clone()));
    let mut b = Builder::new(vec![]);
    let phi_v = b.s1(family.clone(), 1).expect("S1");
    let psi_v = b.s1(family, 2).expect("S1");
    // ((psi -> phi) -> phi) -> ((V -> phi) -> phi), by suffixing twice
    let t2 = b.suf(psi_v, &phi).expect("suf"); // (V -> phi) -> (psi -> phi)
    let t3 = b.suf(t2, &phi).expect("suf"); // ((psi->phi)->phi) -> ((V->phi)->phi)
    let t1 = b.l3(&phi, &psi).expect("L3"); // ((phi->psi)->psi) -> ((psi->phi)->phi)
    let t4 = b.l3(&v, &phi).expect("L3"); // ((V->phi)->phi) -> ((phi->V)->V)
    let t5 = b.detach_assert(phi_v, &v).expect("assert"); // ((phi->V)->V) -> V
    let c1 = b.trans(t1, t3).expect("trans");
    let c2 = b.trans(c1, t4).expect("trans");
    b.trans(c2, t5).expect("trans");
    b.finish()
}

/// Corpus (c): a theory-free application of the derived conjunction rule,
/// `x1 -> W{x1; (x1 -> x1) -> x1}` from provable premises.
pub fn inf_rule_proof() -> ProofObject {
    let x1 = Formula::var(1);
    let member2 = Formula::imp(Formula::imp(x1.clone(), x1.clone()), x1.clone());
    let mut b = Builder::new(vec![]);
    let p1 = b.lemma_i(&x1).expect("identity");
    let p2 = b
        .l1(&x1, &Formula::imp(x1.clone(), x1.clone()))
        .expect("L1");
    let family = CountableFamily::finite(vec![x1.clone(), member2]).expect("pair family");
    let conclusion = expand_derived(&Formula::imp(x1, Formula::Inf(family)));
    b.push(
        conclusion,
        Justification::InfRule {
            premises: vec![p1, p2],
        },
    );
    b.finish()
}

/// Elaborate an application of the derived conjunction rule into a
/// disjunction-based proof: contrapose every premise, apply SUP to the
/// negated family, contrapose back and absorb the double negation.
pub fn elaborate_inf(
    premises: &[Formula],
    psi: &Formula,
    members: &[Formula],
) -> Result<ProofObject, BuildError> {
    let psi = expand_derived(psi);
    let mut b = Builder::new(premises.to_vec());
    let mut contraposed = Vec::with_capacity(members.len());
    for k in 0..members.len() {
        let h = b.hyp(k)?;
        contraposed.push(b.contra(h)?);
    }
    let neg_members: Vec<Formula> = members
        .iter()
        .map(|m| Formula::neg(expand_derived(m)))
        .collect();
    let neg_family = CountableFamily::finite(neg_members).expect("nonempty premise family");
    let sup = b.sup_rule(neg_family, Formula::neg(psi.clone()), contraposed)?;
    let back = b.contra(sup)?;
    let dn = b.dn1(&psi)?;
    b.trans(dn, back)?;
    Ok(b.finish())
}
