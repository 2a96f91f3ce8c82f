//! JSON mirror of the formula AST: one object per node with a `kind` tag.

use serde_json::{json, Map, Value};

use super::{CountableFamily, Formula, MonotoneHint, Scalar, SeqDescriptor};
use crate::rational::Rational01;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed formula JSON: {0}")]
pub struct JsonError(pub String);

fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Const(r) => Value::String(r.to_string()),
        Scalar::Hole => Value::String("@s".to_string()),
    }
}

fn scalar_from_json(v: &Value) -> Result<Scalar, JsonError> {
    let s = v
        .as_str()
        .ok_or_else(|| JsonError("scalar must be a string".into()))?;
    if s == "@s" {
        return Ok(Scalar::Hole);
    }
    Rational01::parse(s)
        .map(Scalar::Const)
        .map_err(|e| JsonError(e.to_string()))
}

pub fn formula_to_json(f: &Formula) -> Value {
    match f {
        Formula::Var(i) => json!({"kind": "var", "index": i}),
        Formula::Bot => json!({"kind": "bot"}),
        Formula::Top => json!({"kind": "top"}),
        Formula::Neg(g) => json!({"kind": "neg", "child": formula_to_json(g)}),
        Formula::Imp(a, b) => {
            json!({"kind": "imp", "left": formula_to_json(a), "right": formula_to_json(b)})
        }
        Formula::Nabla(s, g) => {
            json!({"kind": "nabla", "scalar": scalar_to_json(s), "child": formula_to_json(g)})
        }
        Formula::Delta(s, g) => {
            json!({"kind": "delta", "scalar": scalar_to_json(s), "child": formula_to_json(g)})
        }
        Formula::OPlus(a, b) => {
            json!({"kind": "oplus", "left": formula_to_json(a), "right": formula_to_json(b)})
        }
        Formula::OTimes(a, b) => {
            json!({"kind": "otimes", "left": formula_to_json(a), "right": formula_to_json(b)})
        }
        Formula::Or(a, b) => {
            json!({"kind": "or", "left": formula_to_json(a), "right": formula_to_json(b)})
        }
        Formula::And(a, b) => {
            json!({"kind": "and", "left": formula_to_json(a), "right": formula_to_json(b)})
        }
        Formula::Iff(a, b) => {
            json!({"kind": "iff", "left": formula_to_json(a), "right": formula_to_json(b)})
        }
        Formula::Ramp { lo, hi, body } => json!({
            "kind": "ramp",
            "lo": scalar_to_json(lo),
            "hi": scalar_to_json(hi),
            "body": formula_to_json(body),
        }),
        Formula::Sup(fam) => json!({"kind": "sup", "family": family_to_json(fam)}),
        Formula::Inf(fam) => json!({"kind": "inf", "family": family_to_json(fam)}),
    }
}

pub fn family_to_json(fam: &CountableFamily) -> Value {
    match fam {
        CountableFamily::Finite(members) => json!({
            "kind": "finite",
            "members": members.iter().map(formula_to_json).collect::<Vec<_>>(),
        }),
        CountableFamily::Schema(schema) => json!({
            "kind": "schema",
            "template": formula_to_json(&schema.template),
            "seq": seq_to_json(&schema.seq),
            "mono": match schema.monotone {
                MonotoneHint::Increasing => "inc",
                MonotoneHint::Decreasing => "dec",
                MonotoneHint::None => "none",
            },
        }),
    }
}

fn seq_to_json(seq: &SeqDescriptor) -> Value {
    match seq {
        SeqDescriptor::DyadicComplement => json!({"kind": "dyadic_complement"}),
        SeqDescriptor::DyadicRampBelow(r) => {
            json!({"kind": "dyadic_ramp_below", "r": r.to_string()})
        }
        SeqDescriptor::DyadicGapAbove(r) => {
            json!({"kind": "dyadic_gap_above", "r": r.to_string()})
        }
        SeqDescriptor::DyadicLevels(m) => json!({"kind": "dyadic_levels", "m": m}),
        SeqDescriptor::ExplicitEventuallyConstant { prefix, tail } => json!({
            "kind": "explicit",
            "prefix": prefix.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "tail": tail.to_string(),
        }),
    }
}

fn obj<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>, JsonError> {
    v.as_object()
        .ok_or_else(|| JsonError(format!("{what} must be an object")))
}

fn field<'v>(m: &'v Map<String, Value>, name: &str) -> Result<&'v Value, JsonError> {
    m.get(name)
        .ok_or_else(|| JsonError(format!("missing field `{name}`")))
}

pub fn formula_from_json(v: &Value) -> Result<Formula, JsonError> {
    let m = obj(v, "formula node")?;
    let kind = field(m, "kind")?
        .as_str()
        .ok_or_else(|| JsonError("`kind` must be a string".into()))?;
    let child = |name: &str| -> Result<Formula, JsonError> { formula_from_json(field(m, name)?) };
    match kind {
        "var" => {
            let index = field(m, "index")?
                .as_u64()
                .filter(|&i| i >= 1 && i <= u32::MAX as u64)
                .ok_or_else(|| JsonError("`index` must be a positive integer".into()))?;
            Ok(Formula::Var(index as u32))
        }
        "bot" => Ok(Formula::Bot),
        "top" => Ok(Formula::Top),
        "neg" => Ok(Formula::neg(child("child")?)),
        "imp" => Ok(Formula::imp(child("left")?, child("right")?)),
        "nabla" => Ok(Formula::Nabla(
            scalar_from_json(field(m, "scalar")?)?,
            child("child")?.into(),
        )),
        "delta" => Ok(Formula::Delta(
            scalar_from_json(field(m, "scalar")?)?,
            child("child")?.into(),
        )),
        "oplus" => Ok(Formula::oplus(child("left")?, child("right")?)),
        "otimes" => Ok(Formula::otimes(child("left")?, child("right")?)),
        "or" => Ok(Formula::or(child("left")?, child("right")?)),
        "and" => Ok(Formula::and(child("left")?, child("right")?)),
        "iff" => Ok(Formula::iff(child("left")?, child("right")?)),
        "ramp" => Ok(Formula::Ramp {
            lo: scalar_from_json(field(m, "lo")?)?,
            hi: scalar_from_json(field(m, "hi")?)?,
            body: child("body")?.into(),
        }),
        "sup" => Ok(Formula::Sup(family_from_json(field(m, "family")?)?)),
        "inf" => Ok(Formula::Inf(family_from_json(field(m, "family")?)?)),
        other => Err(JsonError(format!("unknown node kind `{other}`"))),
    }
}

pub fn family_from_json(v: &Value) -> Result<CountableFamily, JsonError> {
    let m = obj(v, "family")?;
    let kind = field(m, "kind")?
        .as_str()
        .ok_or_else(|| JsonError("`kind` must be a string".into()))?;
    match kind {
        "finite" => {
            let members = field(m, "members")?
                .as_array()
                .ok_or_else(|| JsonError("`members` must be an array".into()))?
                .iter()
                .map(formula_from_json)
                .collect::<Result<Vec<_>, _>>()?;
            CountableFamily::finite(members).map_err(|e| JsonError(e.to_string()))
        }
        "schema" => {
            let template = formula_from_json(field(m, "template")?)?;
            let seq = seq_from_json(field(m, "seq")?)?;
            let mono = match field(m, "mono")?.as_str() {
                Some("inc") => MonotoneHint::Increasing,
                Some("dec") => MonotoneHint::Decreasing,
                Some("none") => MonotoneHint::None,
                _ => return Err(JsonError("`mono` must be inc|dec|none".into())),
            };
            Ok(CountableFamily::schema(template, seq, mono))
        }
        other => Err(JsonError(format!("unknown family kind `{other}`"))),
    }
}

fn seq_from_json(v: &Value) -> Result<SeqDescriptor, JsonError> {
    let m = obj(v, "sequence descriptor")?;
    let kind = field(m, "kind")?
        .as_str()
        .ok_or_else(|| JsonError("`kind` must be a string".into()))?;
    let rational = |name: &str| -> Result<Rational01, JsonError> {
        let s = field(m, name)?
            .as_str()
            .ok_or_else(|| JsonError(format!("`{name}` must be a string")))?;
        Rational01::parse(s).map_err(|e| JsonError(e.to_string()))
    };
    match kind {
        "dyadic_complement" => Ok(SeqDescriptor::DyadicComplement),
        "dyadic_ramp_below" => Ok(SeqDescriptor::DyadicRampBelow(rational("r")?)),
        "dyadic_gap_above" => Ok(SeqDescriptor::DyadicGapAbove(rational("r")?)),
        "dyadic_levels" => {
            let mexp = field(m, "m")?
                .as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| JsonError("`m` must be a small integer".into()))?;
            Ok(SeqDescriptor::DyadicLevels(mexp))
        }
        "explicit" => {
            let prefix = field(m, "prefix")?
                .as_array()
                .ok_or_else(|| JsonError("`prefix` must be an array".into()))?
                .iter()
                .map(|p| {
                    p.as_str()
                        .ok_or_else(|| JsonError("prefix entries must be strings".into()))
                        .and_then(|s| {
                            Rational01::parse(s).map_err(|e| JsonError(e.to_string()))
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SeqDescriptor::ExplicitEventuallyConstant {
                prefix,
                tail: rational("tail")?,
            })
        }
        other => Err(JsonError(format!("unknown sequence kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn json_roundtrip() {
        for text in [
            "x1 -> (x2 -> x1)",
            "del(1/2, x1) <-> nab(1/3, x2)",
            "V{x1; x2} (+) W{x3}",
            "V[del(@s, x1); seq=dyadic_ramp_below(2/3); mono=inc]",
            "ramp(1/4, 1/2, x1)",
        ] {
            let f = parse(text).unwrap();
            let v = formula_to_json(&f);
            let back = formula_from_json(&v).unwrap();
            assert_eq!(f, back, "json roundtrip failed for {text}");
        }
    }
}
