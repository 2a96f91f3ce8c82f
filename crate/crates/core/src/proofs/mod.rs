//! Hilbert-style proof checking: axiom instances, modus ponens, the
//! infinitary disjunction-introduction rule over finite or schematic
//! premise families, and the derived conjunction rule accepted by
//! elaboration into a checked disjunction-based proof.
//!
//! Formulas in proofs are compared up to expansion of derived
//! connectives. Schematic rule applications are checked by sampled
//! instantiation: the template proof must check for the first `K`
//! indices; the verdict records that sampling took place.

pub mod corpus;
mod json;

pub use json::{proof_from_json, proof_to_json, ProofJsonError};

use std::fmt;

use crate::axioms::{instantiate, match_one, AxiomId, AxiomSubst};
use crate::formula::{expand_derived, CountableFamily, Formula};
use crate::rational::Rational01;

/// Justification of a single proof step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// Axiom instance. Without an explicit substitution the checker infers
    /// one by matching the step formula against the schema.
    Axiom {
        id: AxiomId,
        subst: Option<AxiomSubst>,
    },
    /// Reference into the theory.
    Hypothesis(usize),
    /// `premise` proves `A`, `implication` proves `A -> B`, step is `B`.
    ModusPonens { premise: usize, implication: usize },
    /// Disjunction introduction on the left: from `phi_k -> psi` for every
    /// family member, conclude `V{phi_n} -> psi`.
    SupRule { premises: SupPremises },
    /// Derived rule: from `psi -> phi_k` for every member, conclude
    /// `psi -> W{phi_n}`. Checked by elaboration.
    InfRule { premises: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupPremises {
    /// One reference per listed family member; bottom padding past the
    /// end of the list is discharged automatically.
    Finite(Vec<usize>),
    /// A schematic proof template covering all indices at once.
    Template(ProofTemplate),
}

/// Proof skeleton with scalar holes, instantiated at sampled indices of
/// the conclusion family's sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTemplate {
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofObject {
    pub theory: Vec<Formula>,
    pub steps: Vec<ProofStep>,
}

impl ProofObject {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }
}

/// Checker configuration.
#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    /// Number of sampled indices for schematic rule applications.
    pub template_samples: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            template_samples: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("step formula is not an instance of {0}")]
    NotAnAxiomInstance(AxiomId),
    #[error("axiom substitution does not reproduce the step formula")]
    SubstitutionMismatch,
    #[error("invalid axiom bindings: {0}")]
    BadBindings(String),
    #[error("hypothesis index {0} out of range")]
    BadHypothesis(usize),
    #[error("hypothesis does not match the step formula")]
    HypothesisMismatch,
    #[error("reference to step {0} does not precede this step")]
    ForwardReference(usize),
    #[error("modus ponens: step {implication} is not `premise -> conclusion`")]
    ModusPonensMismatch { implication: usize },
    #[error("sup rule: conclusion is not of the form `V[family] -> psi`")]
    SupShape,
    #[error("sup rule: family has {family} members but {refs} premises were given")]
    SupRefCount { family: usize, refs: usize },
    #[error("sup rule: premise {index} does not prove `member -> psi`")]
    SupPremiseMismatch { index: usize },
    #[error("sup rule: finite premise list cannot discharge a schematic family")]
    SupFiniteForSchema,
    #[error("sup rule: template proofs require a schematic family")]
    SupTemplateForFinite,
    #[error("template instantiation at index {index} failed at step {step}: {reason}")]
    TemplateFailure {
        index: u64,
        step: usize,
        reason: String,
    },
    #[error("template conclusion at index {index} is not `member -> psi`")]
    TemplateConclusionMismatch { index: u64 },
    #[error("inf rule: conclusion is not of the form `psi -> W[family]`")]
    InfShape,
    #[error("inf rule: schematic families are not supported")]
    InfSchema,
    #[error("inf rule: empty premise list")]
    InfEmpty,
    #[error("inf rule: premise {index} does not prove `psi -> member`")]
    InfPremiseMismatch { index: usize },
    #[error("inf rule elaboration failed: {0}")]
    InfElaboration(String),
    #[error("proof has no steps")]
    EmptyProof,
}

/// Outcome of checking one step, for reporting.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub index: usize,
    pub formula: String,
    pub rule: String,
    pub ok: bool,
    pub detail: Option<String>,
}

/// Overall verdict.
#[derive(Debug, Clone)]
pub enum Verdict {
    Accepted,
    Rejected { step: usize, reason: CheckError },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("accepted"),
            Verdict::Rejected { step, reason } => {
                write!(f, "rejected at step {step}: {reason}")
            }
        }
    }
}

/// Verdict plus per-step reports and checker metadata.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub reports: Vec<StepReport>,
    /// True when some rule application was checked by sampled
    /// instantiation rather than exhaustively.
    pub schema_sampled: bool,
}

impl Justification {
    fn rule_name(&self) -> String {
        match self {
            Justification::Axiom { id, .. } => id.name().to_string(),
            Justification::Hypothesis(_) => "HYP".to_string(),
            Justification::ModusPonens { .. } => "MP".to_string(),
            Justification::SupRule { .. } => "SUP".to_string(),
            Justification::InfRule { .. } => "INF".to_string(),
        }
    }

    /// Replace scalar holes in embedded formulas (template instantiation).
    fn fill_hole(&self, value: &Rational01) -> Justification {
        match self {
            Justification::Axiom { id, subst } => Justification::Axiom {
                id: *id,
                subst: subst.as_ref().map(|s| {
                    let mut filled = s.clone();
                    for f in filled.formulas.values_mut() {
                        *f = f.fill_hole(value);
                    }
                    if let Some((family, k)) = &filled.family {
                        filled.family = Some((family.map(|m| m.fill_hole(value)), *k));
                    }
                    filled
                }),
            },
            Justification::SupRule {
                premises: SupPremises::Template(t),
            } => Justification::SupRule {
                premises: SupPremises::Template(ProofTemplate {
                    steps: t
                        .steps
                        .iter()
                        .map(|s| ProofStep {
                            formula: s.formula.fill_hole(value),
                            justification: s.justification.fill_hole(value),
                        })
                        .collect(),
                }),
            },
            other => other.clone(),
        }
    }
}

/// Check a proof object; the default configuration samples schematic
/// templates at indices 1..=8.
pub fn check_proof(proof: &ProofObject, config: &CheckConfig) -> CheckOutcome {
    let mut reports = Vec::with_capacity(proof.steps.len());
    let mut schema_sampled = false;
    if proof.steps.is_empty() {
        return CheckOutcome {
            verdict: Verdict::Rejected {
                step: 0,
                reason: CheckError::EmptyProof,
            },
            reports,
            schema_sampled,
        };
    }
    for (i, step) in proof.steps.iter().enumerate() {
        let result = check_step(proof, i, step, config, &mut schema_sampled);
        let ok = result.is_ok();
        reports.push(StepReport {
            index: i,
            formula: step.formula.to_string(),
            rule: step.justification.rule_name(),
            ok,
            detail: result.as_ref().err().map(|e| e.to_string()),
        });
        if let Err(reason) = result {
            return CheckOutcome {
                verdict: Verdict::Rejected { step: i, reason },
                reports,
                schema_sampled,
            };
        }
    }
    CheckOutcome {
        verdict: Verdict::Accepted,
        reports,
        schema_sampled,
    }
}

fn check_step(
    proof: &ProofObject,
    index: usize,
    step: &ProofStep,
    config: &CheckConfig,
    schema_sampled: &mut bool,
) -> Result<(), CheckError> {
    let target = expand_derived(&step.formula);
    let prior = |r: usize| -> Result<Formula, CheckError> {
        if r >= index {
            return Err(CheckError::ForwardReference(r));
        }
        Ok(expand_derived(&proof.steps[r].formula))
    };
    match &step.justification {
        Justification::Axiom { id, subst } => match subst {
            Some(s) => {
                let inst = instantiate(*id, s)
                    .map_err(|e| CheckError::BadBindings(e.to_string()))?;
                if inst == target {
                    Ok(())
                } else {
                    Err(CheckError::SubstitutionMismatch)
                }
            }
            None => {
                if match_one(*id, &target).is_some() {
                    Ok(())
                } else {
                    Err(CheckError::NotAnAxiomInstance(*id))
                }
            }
        },
        Justification::Hypothesis(k) => {
            let hyp = proof
                .theory
                .get(*k)
                .ok_or(CheckError::BadHypothesis(*k))?;
            if expand_derived(hyp) == target {
                Ok(())
            } else {
                Err(CheckError::HypothesisMismatch)
            }
        }
        Justification::ModusPonens {
            premise,
            implication,
        } => {
            let prem = prior(*premise)?;
            let imp = prior(*implication)?;
            let expected = Formula::imp(prem, target);
            if imp == expand_derived(&expected) {
                Ok(())
            } else {
                Err(CheckError::ModusPonensMismatch {
                    implication: *implication,
                })
            }
        }
        Justification::SupRule { premises } => {
            let Formula::Imp(lhs, psi) = &target else {
                return Err(CheckError::SupShape);
            };
            let Formula::Sup(family) = &**lhs else {
                return Err(CheckError::SupShape);
            };
            match (premises, family) {
                (SupPremises::Finite(refs), CountableFamily::Finite(members)) => {
                    if refs.len() != members.len() {
                        return Err(CheckError::SupRefCount {
                            family: members.len(),
                            refs: refs.len(),
                        });
                    }
                    for (m, (member, r)) in members.iter().zip(refs).enumerate() {
                        let premise = prior(*r)?;
                        let expected =
                            expand_derived(&Formula::imp(member.clone(), (**psi).clone()));
                        if premise != expected {
                            return Err(CheckError::SupPremiseMismatch { index: m });
                        }
                    }
                    // members past the end of the list are bottom and their
                    // premises `0 -> psi` hold by the ex-falso theorem
                    Ok(())
                }
                (SupPremises::Finite(_), CountableFamily::Schema(_)) => {
                    Err(CheckError::SupFiniteForSchema)
                }
                (SupPremises::Template(_), CountableFamily::Finite(_)) => {
                    Err(CheckError::SupTemplateForFinite)
                }
                (SupPremises::Template(template), CountableFamily::Schema(schema)) => {
                    *schema_sampled = true;
                    for n in 1..=config.template_samples.max(1) {
                        let value = schema.seq.value(n);
                        let instantiated = ProofObject {
                            theory: proof.theory.clone(),
                            steps: template
                                .steps
                                .iter()
                                .map(|s| ProofStep {
                                    formula: s.formula.fill_hole(&value),
                                    justification: s.justification.fill_hole(&value),
                                })
                                .collect(),
                        };
                        let outcome = check_proof(&instantiated, config);
                        if let Verdict::Rejected { step, reason } = outcome.verdict {
                            return Err(CheckError::TemplateFailure {
                                index: n,
                                step,
                                reason: reason.to_string(),
                            });
                        }
                        let member = schema.nth(n);
                        let expected =
                            expand_derived(&Formula::imp(member, (**psi).clone()));
                        let got = instantiated
                            .conclusion()
                            .map(expand_derived)
                            .ok_or(CheckError::EmptyProof)?;
                        if got != expected {
                            return Err(CheckError::TemplateConclusionMismatch { index: n });
                        }
                    }
                    Ok(())
                }
            }
        }
        Justification::InfRule { premises } => {
            check_inf_step(proof, index, &target, premises, config)
        }
    }
}

fn check_inf_step(
    proof: &ProofObject,
    index: usize,
    target: &Formula,
    premises: &[usize],
    config: &CheckConfig,
) -> Result<(), CheckError> {
    if premises.is_empty() {
        return Err(CheckError::InfEmpty);
    }
    // expanded conclusion shape: psi -> !V{!phi_n}
    let Formula::Imp(psi, rhs) = target else {
        return Err(CheckError::InfShape);
    };
    let Formula::Neg(sup) = &**rhs else {
        return Err(CheckError::InfShape);
    };
    let Formula::Sup(neg_family) = &**sup else {
        return Err(CheckError::InfShape);
    };
    let CountableFamily::Finite(neg_members) = neg_family else {
        return Err(CheckError::InfSchema);
    };
    // recover the positive members: each listed member is !phi_m
    let mut members = Vec::with_capacity(neg_members.len());
    for m in neg_members {
        let Formula::Neg(inner) = m else {
            return Err(CheckError::InfShape);
        };
        members.push((**inner).clone());
    }
    if premises.len() != members.len() {
        return Err(CheckError::SupRefCount {
            family: members.len(),
            refs: premises.len(),
        });
    }
    for (m, (member, r)) in members.iter().zip(premises).enumerate() {
        if *r >= index {
            return Err(CheckError::ForwardReference(*r));
        }
        let premise = expand_derived(&proof.steps[*r].formula);
        let expected = expand_derived(&Formula::imp((**psi).clone(), member.clone()));
        if premise != expected {
            return Err(CheckError::InfPremiseMismatch { index: m });
        }
    }
    // elaborate into a disjunction-based proof and check it
    let premise_formulas: Vec<Formula> = members
        .iter()
        .map(|m| Formula::imp((**psi).clone(), m.clone()))
        .collect();
    let elaborated = corpus::elaborate_inf(&premise_formulas, psi, &members)
        .map_err(|e| CheckError::InfElaboration(e.to_string()))?;
    let outcome = check_proof(&elaborated, config);
    match outcome.verdict {
        Verdict::Accepted => {
            let got = elaborated
                .conclusion()
                .map(expand_derived)
                .ok_or(CheckError::EmptyProof)?;
            if got == *target {
                Ok(())
            } else {
                Err(CheckError::InfElaboration(
                    "elaborated conclusion differs from the step formula".to_string(),
                ))
            }
        }
        Verdict::Rejected { step, reason } => Err(CheckError::InfElaboration(format!(
            "elaboration rejected at step {step}: {reason}"
        ))),
    }
}

/// Check the derived conjunction-introduction rule directly: premises
/// `psi -> phi_k`, conclusion `psi -> W{phi_n}`. Returns the elaborated
/// ordinary proof on success.
pub fn check_inf_rule(
    premises: &[Formula],
    conclusion: &Formula,
    config: &CheckConfig,
) -> Result<ProofObject, CheckError> {
    if premises.is_empty() {
        return Err(CheckError::InfEmpty);
    }
    let expanded = expand_derived(conclusion);
    let Formula::Imp(psi, rhs) = &expanded else {
        return Err(CheckError::InfShape);
    };
    let Formula::Neg(sup) = &**rhs else {
        return Err(CheckError::InfShape);
    };
    let Formula::Sup(neg_family) = &**sup else {
        return Err(CheckError::InfShape);
    };
    let CountableFamily::Finite(neg_members) = neg_family else {
        return Err(CheckError::InfSchema);
    };
    let mut members = Vec::with_capacity(neg_members.len());
    for m in neg_members {
        let Formula::Neg(inner) = m else {
            return Err(CheckError::InfShape);
        };
        members.push((**inner).clone());
    }
    if premises.len() != members.len() {
        return Err(CheckError::SupRefCount {
            family: members.len(),
            refs: premises.len(),
        });
    }
    for (m, (member, premise)) in members.iter().zip(premises).enumerate() {
        let expected = expand_derived(&Formula::imp((**psi).clone(), member.clone()));
        if expand_derived(premise) != expected {
            return Err(CheckError::InfPremiseMismatch { index: m });
        }
    }
    let elaborated = corpus::elaborate_inf(premises, psi, &members)
        .map_err(|e| CheckError::InfElaboration(e.to_string()))?;
    let outcome = check_proof(&elaborated, config);
    match outcome.verdict {
        Verdict::Accepted => Ok(elaborated),
        Verdict::Rejected { step, reason } => Err(CheckError::InfElaboration(format!(
            "elaboration rejected at step {step}: {reason}"
        ))),
    }
}

/// Convenience: match a formula against the axiom schemas (re-export of
/// the axioms module entry point, part of this module's public surface).
pub fn match_axiom(f: &Formula) -> Option<(AxiomId, AxiomSubst)> {
    crate::axioms::match_axiom(f)
}

#[cfg(test)]
mod tests {
    use super::corpus;
    use super::*;
    use crate::formula::parse;

    fn check(proof: &ProofObject) -> Verdict {
        check_proof(proof, &CheckConfig::default()).verdict
    }

    #[test]
    fn identity_lemma_checks() {
        let proof = corpus::identity_proof(&parse("x1").unwrap());
        assert!(check(&proof).is_accepted());
        assert_eq!(
            expand_derived(proof.conclusion().unwrap()),
            expand_derived(&parse("x1 -> x1").unwrap())
        );
    }

    #[test]
    fn identity_of_compound_formula() {
        let f = parse("del(1/2, x1) (+) x2").unwrap();
        let proof = corpus::identity_proof(&f);
        assert!(check(&proof).is_accepted());
    }

    #[test]
    fn dn_lemmas_check() {
        let f = parse("x1").unwrap();
        let mut b = corpus::Builder::new(vec![]);
        b.dn2(&f).unwrap();
        assert!(check(&b.finish()).is_accepted());
        let mut b = corpus::Builder::new(vec![]);
        b.dn1(&f).unwrap();
        let proof = b.finish();
        assert!(check(&proof).is_accepted());
        assert_eq!(
            expand_derived(proof.conclusion().unwrap()),
            expand_derived(&parse("x1 -> !!x1").unwrap())
        );
    }

    #[test]
    fn bot_elim_checks() {
        let proof = corpus::bot_elim_proof(&parse("x1").unwrap());
        assert!(check(&proof).is_accepted());
        assert_eq!(
            expand_derived(proof.conclusion().unwrap()),
            expand_derived(&parse("0 -> x1").unwrap())
        );
    }

    #[test]
    fn mp_reference_swap_rejected() {
        // identity proof with the final MP's references swapped
        let mut proof = corpus::identity_proof(&parse("x1").unwrap());
        let last = proof.steps.len() - 1;
        if let Justification::ModusPonens {
            premise,
            implication,
        } = &mut proof.steps[last].justification
        {
            std::mem::swap(premise, implication);
        }
        assert!(!check(&proof).is_accepted());
    }

    #[test]
    fn hypothesis_steps() {
        let theory = vec![parse("x1 -> x2").unwrap()];
        let mut b = corpus::Builder::new(theory);
        let h = b.hyp(0).unwrap();
        let _ = h;
        let proof = b.finish();
        assert!(check(&proof).is_accepted());
        let mut bad = proof.clone();
        bad.steps[0].formula = parse("x1 -> x3").unwrap();
        assert!(!check(&bad).is_accepted());
    }

    #[test]
    fn sup_rule_finite() {
        // from x1 -> (x1 \/ x2), x2 -> (x1 \/ x2) conclude V{x1;x2} -> (x1 \/ x2)
        let theory = vec![
            parse("x1 -> x1 \\/ x2").unwrap(),
            parse("x2 -> x1 \\/ x2").unwrap(),
        ];
        let mut b = corpus::Builder::new(theory);
        let p1 = b.hyp(0).unwrap();
        let p2 = b.hyp(1).unwrap();
        let family = crate::formula::CountableFamily::finite(vec![
            parse("x1").unwrap(),
            parse("x2").unwrap(),
        ])
        .unwrap();
        b.sup_rule(family, parse("x1 \\/ x2").unwrap(), vec![p1, p2])
            .unwrap();
        let proof = b.finish();
        assert!(check(&proof).is_accepted());

        // swapping the premise references must break it
        let mut bad = proof.clone();
        let last = bad.steps.len() - 1;
        if let Justification::SupRule {
            premises: SupPremises::Finite(refs),
        } = &mut bad.steps[last].justification
        {
            refs.swap(0, 1);
        }
        assert!(!check(&bad).is_accepted());
    }

    #[test]
    fn inf_rule_with_theory() {
        let theory = vec![parse("x1 -> x2").unwrap(), parse("x1 -> x3").unwrap()];
        let mut b = corpus::Builder::new(theory);
        let p1 = b.hyp(0).unwrap();
        let p2 = b.hyp(1).unwrap();
        let conclusion = parse("x1 -> W{x2; x3}").unwrap();
        b.push(
            conclusion,
            Justification::InfRule {
                premises: vec![p1, p2],
            },
        );
        let proof = b.finish();
        assert!(check(&proof).is_accepted());
    }

    #[test]
    fn inf_rule_rejects_mismatch() {
        let premises = vec![parse("x1 -> x2").unwrap()];
        let conclusion = parse("x1 -> W{x3}").unwrap();
        assert!(matches!(
            check_inf_rule(&premises, &conclusion, &CheckConfig::default()),
            Err(CheckError::InfPremiseMismatch { .. })
        ));
        let empty: Vec<Formula> = vec![];
        assert!(matches!(
            check_inf_rule(&empty, &conclusion, &CheckConfig::default()),
            Err(CheckError::InfEmpty)
        ));
    }

    #[test]
    fn check_inf_rule_elaborates() {
        let premises = vec![parse("x1 -> x2").unwrap(), parse("x1 -> x3").unwrap()];
        let conclusion = parse("x1 -> W{x2; x3}").unwrap();
        let elaborated = check_inf_rule(&premises, &conclusion, &CheckConfig::default()).unwrap();
        assert!(check(&elaborated).is_accepted());
        assert!(elaborated.steps.len() > 40);
    }

    #[test]
    fn forward_references_rejected() {
        let mut b = corpus::Builder::new(vec![]);
        b.push(
            parse("x1 -> x1").unwrap(),
            Justification::ModusPonens {
                premise: 5,
                implication: 7,
            },
        );
        assert!(!check(&b.finish()).is_accepted());
    }
}
