//! Text format: `kind=`, `basis=`, `order=` headers, then one `s= w= num= den=` line per
//! nonzero coefficient.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{FQOperation, OperationKind};
use crate::bases::BasisTag;
use crate::rational::Rational;
use crate::word::Word;
use crate::Error;

pub fn serialize_operation(op: &FQOperation<Rational>) -> String {
    let mut s = format!("kind={}\nbasis={}\norder={}\n", op.kind(), op.basis(), op.order());
    for (i, comp) in op.components().iter().enumerate() {
        let label = op.kind().labels()[i];
        for (w, c) in comp {
            s.push_str(&format!("s={label} w={w} num={} den={}\n", c.numer(), c.denom()));
        }
    }
    s
}

pub fn parse_operation(text: &str) -> Result<FQOperation<Rational>, Error> {
    let mut kind = None;
    let mut basis = None;
    let mut order = None;
    let mut records = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |m: &str| Error::Parse(format!("line {}: {m}", n + 1));
        if let Some(v) = line.strip_prefix("kind=") {
            kind = Some(v.parse::<OperationKind>()?);
        } else if let Some(v) = line.strip_prefix("basis=") {
            basis = Some(v.parse::<BasisTag>()?);
        } else if let Some(v) = line.strip_prefix("order=") {
            order = Some(v.trim().parse::<usize>().map_err(|_| bad("bad order"))?);
        } else {
            let mut s = None;
            let mut w = None;
            let mut num = None;
            let mut den = None;
            for field in line.split_whitespace() {
                let (k, v) = field.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                match k {
                    "s" => s = Some(v.to_string()),
                    "w" => w = Some(Word::parse(v).ok_or_else(|| bad("bad word"))?),
                    "num" => num = Some(v.parse::<BigInt>().map_err(|_| bad("bad numerator"))?),
                    "den" => den = Some(v.parse::<BigInt>().map_err(|_| bad("bad denominator"))?),
                    _ => return Err(bad(&format!("unknown field `{k}`"))),
                }
            }
            match (s, w, num, den) {
                (Some(s), Some(w), Some(num), Some(den)) => {
                    if den.is_zero() {
                        return Err(bad("zero denominator"));
                    }
                    records.push((n + 1, s, w, Rational::new(num, den)));
                }
                _ => return Err(bad("record needs s, w, num and den")),
            }
        }
    }
    let kind = kind.ok_or_else(|| Error::Parse("missing kind header".into()))?;
    let basis = basis.ok_or_else(|| Error::Parse("missing basis header".into()))?;
    let order = order.ok_or_else(|| Error::Parse("missing order header".into()))?;
    let mut op = FQOperation::zero(kind, basis, order);
    for (line, s, w, c) in records {
        let i = kind
            .component_of_label(&s)
            .ok_or_else(|| Error::Parse(format!("line {line}: component {s} not valid for {kind}")))?;
        if w.len() > order {
            return Err(Error::Parse(format!("line {line}: word longer than the order")));
        }
        op.add_to(i, w, &c);
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn round_trip() {
        let mut op = FQOperation::<Rational>::zero(OperationKind::Vectorial, BasisTag::Circular, 2);
        op.set(0, Word::EMPTY, frac(1, 1));
        op.set(1, Word::new(&[8, 1]), frac(-3, 7));
        let text = serialize_operation(&op);
        assert!(text.contains("s=2 w=81 num=-3 den=7"));
        assert_eq!(parse_operation(&text).unwrap(), op);
    }

    #[test]
    fn rejects_bad_records() {
        assert!(parse_operation("kind=scalar\nbasis=mixed\norder=1\ns=1 w=- num=1 den=1\n").is_err());
        assert!(parse_operation("kind=scalar\nbasis=mixed\norder=1\ns=0 w=12 num=1 den=1\n").is_err());
        assert!(parse_operation("kind=scalar\norder=1\n").is_err());
        assert!(parse_operation("kind=scalar\nbasis=mixed\norder=1\ns=0 w=- num=1 den=0\n").is_err());
    }
}
