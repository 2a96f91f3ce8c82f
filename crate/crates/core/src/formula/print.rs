//! Pretty printer, inverse of the parser up to whitespace.

use std::fmt;

use super::{CountableFamily, Formula, MonotoneHint, Scalar, SeqDescriptor};

// Binding strength; parenthesize a child whenever its level is below what
// the position requires.
const LVL_IFF: u8 = 1;
const LVL_IMP: u8 = 2;
const LVL_OR: u8 = 3;
const LVL_AND: u8 = 4;
const LVL_OPLUS: u8 = 5;
const LVL_OTIMES: u8 = 6;
const LVL_ATOM: u8 = 7;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write(f, self, 0)
    }
}

fn write(f: &mut fmt::Formatter<'_>, formula: &Formula, min_level: u8) -> fmt::Result {
    let level = level_of(formula);
    if level < min_level {
        f.write_str("(")?;
        write(f, formula, 0)?;
        return f.write_str(")");
    }
    match formula {
        Formula::Var(i) => write!(f, "x{i}"),
        Formula::Bot => f.write_str("0"),
        Formula::Top => f.write_str("1"),
        Formula::Neg(g) => {
            f.write_str("!")?;
            write(f, g, LVL_ATOM)
        }
        Formula::Imp(a, b) => {
            write(f, a, LVL_IMP + 1)?;
            f.write_str(" -> ")?;
            write(f, b, LVL_IMP)
        }
        Formula::Iff(a, b) => {
            write(f, a, LVL_IFF + 1)?;
            f.write_str(" <-> ")?;
            write(f, b, LVL_IFF)
        }
        Formula::Or(a, b) => {
            write(f, a, LVL_OR)?;
            f.write_str(" \\/ ")?;
            write(f, b, LVL_OR + 1)
        }
        Formula::And(a, b) => {
            write(f, a, LVL_AND)?;
            f.write_str(" /\\ ")?;
            write(f, b, LVL_AND + 1)
        }
        Formula::OPlus(a, b) => {
            write(f, a, LVL_OPLUS)?;
            f.write_str(" (+) ")?;
            write(f, b, LVL_OPLUS + 1)
        }
        Formula::OTimes(a, b) => {
            write(f, a, LVL_OTIMES)?;
            f.write_str(" (.) ")?;
            write(f, b, LVL_OTIMES + 1)
        }
        Formula::Nabla(s, g) => {
            write!(f, "nab({}, ", ScalarDisplay(s))?;
            write(f, g, 0)?;
            f.write_str(")")
        }
        Formula::Delta(s, g) => {
            write!(f, "del({}, ", ScalarDisplay(s))?;
            write(f, g, 0)?;
            f.write_str(")")
        }
        Formula::Ramp { lo, hi, body } => {
            write!(f, "ramp({}, {}, ", ScalarDisplay(lo), ScalarDisplay(hi))?;
            write(f, body, 0)?;
            f.write_str(")")
        }
        Formula::Sup(fam) => write_family(f, "V", fam),
        Formula::Inf(fam) => write_family(f, "W", fam),
    }
}

fn level_of(formula: &Formula) -> u8 {
    match formula {
        Formula::Iff(..) => LVL_IFF,
        Formula::Imp(..) => LVL_IMP,
        Formula::Or(..) => LVL_OR,
        Formula::And(..) => LVL_AND,
        Formula::OPlus(..) => LVL_OPLUS,
        Formula::OTimes(..) => LVL_OTIMES,
        _ => LVL_ATOM,
    }
}

struct ScalarDisplay<'a>(&'a Scalar);

impl fmt::Display for ScalarDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Scalar::Const(r) => write!(f, "{r}"),
            Scalar::Hole => f.write_str("@s"),
        }
    }
}

fn write_family(f: &mut fmt::Formatter<'_>, head: &str, fam: &CountableFamily) -> fmt::Result {
    match fam {
        CountableFamily::Finite(members) => {
            write!(f, "{head}{{")?;
            for (i, member) in members.iter().enumerate() {
                if i > 0 {
                    f.write_str("; ")?;
                }
                write(f, member, 0)?;
            }
            f.write_str("}")
        }
        CountableFamily::Schema(schema) => {
            write!(f, "{head}[")?;
            write(f, &schema.template, 0)?;
            write!(f, "; seq={}", SeqDisplay(&schema.seq))?;
            let mono = match schema.monotone {
                MonotoneHint::Increasing => "inc",
                MonotoneHint::Decreasing => "dec",
                MonotoneHint::None => "none",
            };
            write!(f, "; mono={mono}]")
        }
    }
}

struct SeqDisplay<'a>(&'a SeqDescriptor);

impl fmt::Display for SeqDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            SeqDescriptor::DyadicComplement => f.write_str("dyadic_complement"),
            SeqDescriptor::DyadicRampBelow(r) => write!(f, "dyadic_ramp_below({r})"),
            SeqDescriptor::DyadicGapAbove(r) => write!(f, "dyadic_gap_above({r})"),
            SeqDescriptor::DyadicLevels(m) => write!(f, "dyadic_levels({m})"),
            SeqDescriptor::ExplicitEventuallyConstant { prefix, tail } => {
                f.write_str("explicit(")?;
                for (i, r) in prefix.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, "; tail={tail})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use crate::formula::Formula;
    use crate::rational::Rational01;

    fn roundtrip(text: &str) {
        let f = parse(text).unwrap();
        let printed = f.to_string();
        let reparsed = parse(&printed).unwrap();
        assert_eq!(f, reparsed, "print/parse mismatch for `{text}` -> `{printed}`");
    }

    #[test]
    fn roundtrips() {
        roundtrip("x1 -> (x2 -> x1)");
        roundtrip("!x1 (.) x2 (+) x3");
        roundtrip("x1 \\/ x2 /\\ !x3 <-> x2");
        roundtrip("nab(1/2, x1) <-> (nab(2/3, x1) -> nab(1/2, x1))");
        roundtrip("V{x1; x2; 0}");
        roundtrip("W{x1 -> x2; 1}");
        roundtrip("V[del(@s, x1); seq=dyadic_complement; mono=inc]");
        roundtrip("V[ramp(1/2, @s, x1); seq=dyadic_gap_above(1/2); mono=inc]");
        roundtrip("W[ramp(@s, 1/2, x1); seq=dyadic_ramp_below(1/2); mono=dec]");
        roundtrip("V[del(@s, x1); seq=explicit(1/2, 3/4; tail=1); mono=inc]");
    }

    #[test]
    fn minimal_parens() {
        let f = parse("(x1 -> x2) -> x2").unwrap();
        assert_eq!(f.to_string(), "(x1 -> x2) -> x2");
        let g = parse("x1 -> (x2 -> x3)").unwrap();
        assert_eq!(g.to_string(), "x1 -> x2 -> x3");
        let h = Formula::delta(Rational01::from_ints(1, 2), Formula::var(1));
        assert_eq!(h.to_string(), "del(1/2, x1)");
    }
}
