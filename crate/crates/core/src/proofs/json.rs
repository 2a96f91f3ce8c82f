//! JSON encoding of proof objects.
//!
//! ```text
//! {"theory": ["x1 -> x2", ...],
//!  "steps": [{"formula": "...", "rule": "L1|..|S1|MP|SUP|INF|HYP",
//!             "refs": [..], "subst": {"phi": "..."},
//!             "scalars": {"alpha": "1/2"}, "k": 2,
//!             "template": {"steps": [...]}}, ...]}
//! ```
//!
//! References are 0-based step indices; for `MP` they are
//! `[premise, implication]`. An axiom step may omit `subst`/`scalars`, in
//! which case the checker infers the bindings by matching.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{Justification, ProofObject, ProofStep, ProofTemplate, SupPremises};
use crate::axioms::{AxiomId, AxiomSubst, MetaVar, ScalarVar};
use crate::formula::{expand_derived, parse, Formula};
use crate::rational::Rational01;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed proof JSON: {0}")]
pub struct ProofJsonError(pub String);

fn err(msg: impl Into<String>) -> ProofJsonError {
    ProofJsonError(msg.into())
}

pub fn proof_to_json(proof: &ProofObject) -> Value {
    json!({
        "theory": proof.theory.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "steps": proof.steps.iter().map(step_to_json).collect::<Vec<_>>(),
    })
}

fn step_to_json(step: &ProofStep) -> Value {
    let mut obj = Map::new();
    obj.insert(
        "formula".to_string(),
        Value::String(step.formula.to_string()),
    );
    match &step.justification {
        Justification::Axiom { id, subst } => {
            obj.insert("rule".to_string(), Value::String(id.name().to_string()));
            if let Some(s) = subst {
                if !s.formulas.is_empty() {
                    let m: Map<String, Value> = s
                        .formulas
                        .iter()
                        .map(|(v, f)| (v.name().to_string(), Value::String(f.to_string())))
                        .collect();
                    obj.insert("subst".to_string(), Value::Object(m));
                }
                if !s.scalars.is_empty() {
                    let m: Map<String, Value> = s
                        .scalars
                        .iter()
                        .map(|(v, r)| (v.name().to_string(), Value::String(r.to_string())))
                        .collect();
                    obj.insert("scalars".to_string(), Value::Object(m));
                }
                if let Some((_, k)) = &s.family {
                    obj.insert("k".to_string(), json!(k));
                }
            }
        }
        Justification::Hypothesis(k) => {
            obj.insert("rule".to_string(), Value::String("HYP".to_string()));
            obj.insert("refs".to_string(), json!([k]));
        }
        Justification::ModusPonens {
            premise,
            implication,
        } => {
            obj.insert("rule".to_string(), Value::String("MP".to_string()));
            obj.insert("refs".to_string(), json!([premise, implication]));
        }
        Justification::SupRule { premises } => {
            obj.insert("rule".to_string(), Value::String("SUP".to_string()));
            match premises {
                SupPremises::Finite(refs) => {
                    obj.insert("refs".to_string(), json!(refs));
                }
                SupPremises::Template(t) => {
                    obj.insert(
                        "template".to_string(),
                        json!({
                            "steps": t.steps.iter().map(step_to_json).collect::<Vec<_>>()
                        }),
                    );
                }
            }
        }
        Justification::InfRule { premises } => {
            obj.insert("rule".to_string(), Value::String("INF".to_string()));
            obj.insert("refs".to_string(), json!(premises));
        }
    }
    Value::Object(obj)
}

pub fn proof_from_json(v: &Value) -> Result<ProofObject, ProofJsonError> {
    let obj = v.as_object().ok_or_else(|| err("proof must be an object"))?;
    let theory = match obj.get("theory") {
        None => Vec::new(),
        Some(t) => t
            .as_array()
            .ok_or_else(|| err("`theory` must be an array"))?
            .iter()
            .map(parse_formula_value)
            .collect::<Result<Vec<_>, _>>()?,
    };
    let steps = obj
        .get("steps")
        .and_then(|s| s.as_array())
        .ok_or_else(|| err("`steps` must be an array"))?
        .iter()
        .map(step_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProofObject { theory, steps })
}

fn parse_formula_value(v: &Value) -> Result<Formula, ProofJsonError> {
    let s = v.as_str().ok_or_else(|| err("formulas must be strings"))?;
    parse(s).map_err(|e| err(format!("in formula `{s}`: {e}")))
}

fn refs_of(obj: &Map<String, Value>) -> Result<Vec<usize>, ProofJsonError> {
    obj.get("refs")
        .and_then(|r| r.as_array())
        .ok_or_else(|| err("missing `refs`"))?
        .iter()
        .map(|r| {
            r.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| err("refs must be nonnegative integers"))
        })
        .collect()
}

fn step_from_json(v: &Value) -> Result<ProofStep, ProofJsonError> {
    let obj = v.as_object().ok_or_else(|| err("step must be an object"))?;
    let formula = parse_formula_value(
        obj.get("formula")
            .ok_or_else(|| err("step missing `formula`"))?,
    )?;
    let rule = obj
        .get("rule")
        .and_then(|r| r.as_str())
        .ok_or_else(|| err("step missing `rule`"))?;
    let justification = match rule {
        "HYP" => {
            let refs = refs_of(obj)?;
            if refs.len() != 1 {
                return Err(err("HYP takes exactly one reference"));
            }
            Justification::Hypothesis(refs[0])
        }
        "MP" => {
            let refs = refs_of(obj)?;
            if refs.len() != 2 {
                return Err(err("MP takes exactly two references"));
            }
            Justification::ModusPonens {
                premise: refs[0],
                implication: refs[1],
            }
        }
        "SUP" => {
            if let Some(template) = obj.get("template") {
                let steps = template
                    .get("steps")
                    .and_then(|s| s.as_array())
                    .ok_or_else(|| err("template must contain `steps`"))?
                    .iter()
                    .map(step_from_json)
                    .collect::<Result<Vec<_>, _>>()?;
                Justification::SupRule {
                    premises: SupPremises::Template(ProofTemplate { steps }),
                }
            } else {
                Justification::SupRule {
                    premises: SupPremises::Finite(refs_of(obj)?),
                }
            }
        }
        "INF" => Justification::InfRule {
            premises: refs_of(obj)?,
        },
        axiom_name => {
            let id = AxiomId::parse(axiom_name)
                .ok_or_else(|| err(format!("unknown rule `{axiom_name}`")))?;
            let subst = axiom_subst_from_json(id, obj, &formula)?;
            Justification::Axiom { id, subst }
        }
    };
    Ok(ProofStep {
        formula,
        justification,
    })
}

fn axiom_subst_from_json(
    id: AxiomId,
    obj: &Map<String, Value>,
    formula: &Formula,
) -> Result<Option<AxiomSubst>, ProofJsonError> {
    let mut formulas = BTreeMap::new();
    if let Some(subst) = obj.get("subst") {
        let m = subst
            .as_object()
            .ok_or_else(|| err("`subst` must be an object"))?;
        for (key, value) in m {
            let var = MetaVar::parse(key)
                .ok_or_else(|| err(format!("unknown metavariable `{key}`")))?;
            formulas.insert(var, parse_formula_value(value)?);
        }
    }
    let mut scalars = BTreeMap::new();
    if let Some(sc) = obj.get("scalars") {
        let m = sc
            .as_object()
            .ok_or_else(|| err("`scalars` must be an object"))?;
        for (key, value) in m {
            let var = ScalarVar::parse(key)
                .ok_or_else(|| err(format!("unknown scalar variable `{key}`")))?;
            let s = value
                .as_str()
                .ok_or_else(|| err("scalar bindings must be strings"))?;
            scalars.insert(
                var,
                Rational01::parse(s).map_err(|e| err(e.to_string()))?,
            );
        }
    }
    let family = match obj.get("k") {
        None => None,
        Some(kv) => {
            let k = kv
                .as_u64()
                .filter(|&k| k >= 1)
                .ok_or_else(|| err("`k` must be a positive integer"))?;
            // the family is the right-hand side of the step formula
            let Formula::Imp(_, rhs) = expand_derived(formula) else {
                return Err(err("S1 steps must be implications"));
            };
            let Formula::Sup(fam) = &*rhs else {
                return Err(err("S1 steps must conclude with a countable disjunction"));
            };
            Some((fam.clone(), k))
        }
    };
    if formulas.is_empty() && scalars.is_empty() && family.is_none() {
        return Ok(None);
    }
    if id == AxiomId::S1 && family.is_none() {
        return Ok(None);
    }
    Ok(Some(AxiomSubst {
        formulas,
        scalars,
        family,
    }))
}

#[cfg(test)]
mod tests {
    use super::super::{check_proof, corpus, CheckConfig};
    use super::*;

    #[test]
    fn corpus_roundtrips_and_checks() {
        let phi = parse("x1").unwrap();
        let psi = parse("x2").unwrap();
        let proofs = vec![
            corpus::identity_proof(&phi),
            corpus::bot_elim_proof(&phi),
            corpus::sup_to_or_proof(&phi, &psi),
            corpus::or_to_sup_proof(&phi, &psi),
            corpus::inf_rule_proof(),
        ];
        for proof in proofs {
            let v = proof_to_json(&proof);
            let back = proof_from_json(&v).unwrap();
            let outcome = check_proof(&back, &CheckConfig::default());
            assert!(
                outcome.verdict.is_accepted(),
                "reloaded proof rejected: {} (conclusion {})",
                outcome.verdict,
                proof.conclusion().unwrap()
            );
        }
    }

    #[test]
    fn rejects_malformed_json(){
        assert!(proof_from_json(&serde_json::json!({"steps": "no"})).is_err());
        assert!(proof_from_json(&serde_json::json!({
            "steps": [{"formula": "x1", "rule": "NOPE"}]
        }))
        .is_err());
        assert!(proof_from_json(&serde_json::json!({
            "steps": [{"formula": "x1 ->", "rule": "L1"}]
        }))
        .is_err());
    }
}
