use std::fmt;

use crate::bases::BasisTag;
use crate::rational::{fmt_rational, int, parse_rational, Rational};
use crate::word::Word;
use crate::Error;

/// Which scaling derivation a scaling property refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingIndex {
    /// `r̂_i`, mixed basis.
    Mixed(u8),
    /// `r̃₄ = ½(S4 + S5)` at equal weights.
    Circular4,
    /// `r̃₅ = ½(S4|α − S5|−α)`.
    Circular5,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PropertySpec {
    CliffordConservative,
    Natural,
    Transposition,
    Symmetry,
    Orthogonal,
    Scaling {
        index: ScalingIndex,
        alpha: Rational,
    },
    Hyperscaling {
        h: u8,
        j: Rational,
        l: Rational,
        alpha: Rational,
        beta: Rational,
    },
    CharacterDegeneracy(i8),
    Bivariant,
    Antivariant,
    LeftVariant,
    RightVariant,
    FloatingConservative(i8),
    CliffordProductive,
    FloatingProductive,
    Involutive,
    Idempotent,
    ThreeIdempotent,
    /// `D ∘ Ψ` equals the named pseudoscalar builtin.
    AxisEquals(String),
    /// The weakened metric trace commutativity relative to the central axis.
    WeakMetricTrace,
    /// `Ψ ∘ B = Ψ` for the named vectorial builtin `B`.
    ComposeFixed(String),
    /// A single coefficient prescribed.
    Pin {
        basis: BasisTag,
        comp: usize,
        word: Word,
        value: Rational,
    },
    /// Scaling of `D ∘ Ψ`.
    DScaling {
        index: u8,
        alpha: Rational,
    },
}

impl PropertySpec {
    pub fn scaling(i: u8, alpha: Rational) -> Self {
        PropertySpec::Scaling { index: ScalingIndex::Mixed(i), alpha }
    }

    /// Rows depend on the unknowns only linearly with constant coefficients.
    pub fn is_linear(&self) -> bool {
        !matches!(
            self,
            PropertySpec::CliffordProductive
                | PropertySpec::FloatingProductive
                | PropertySpec::Involutive
                | PropertySpec::Idempotent
                | PropertySpec::ThreeIdempotent
                | PropertySpec::AxisEquals(_)
                | PropertySpec::DScaling { .. }
        )
    }

    pub fn tag(&self) -> String {
        self.to_string()
    }
}

const SCALING_NAMES: [(&str, u8); 8] =
    [("SE", 1), ("SH", 2), ("H", 3), ("E", 4), ("CE", 5), ("CH", 6), ("CSH", 7), ("CSE", 8)];

impl fmt::Display for PropertySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PropertySpec::*;
        let q = fmt_rational;
        match self {
            CliffordConservative => write!(f, "sC"),
            Natural => write!(f, "Nat"),
            Transposition => write!(f, "Opp"),
            Symmetry => write!(f, "Sigma2"),
            Orthogonal => write!(f, "O2"),
            Scaling { index: ScalingIndex::Mixed(i), alpha } => write!(f, "S({i},{})", q(alpha)),
            Scaling { index: ScalingIndex::Circular4, alpha } => write!(f, "XE({})", q(alpha)),
            Scaling { index: ScalingIndex::Circular5, alpha } => write!(f, "CXE({})", q(alpha)),
            Hyperscaling { h, j, l, alpha, beta } => {
                write!(f, "Hyp({h},{},{},{},{})", q(j), q(l), q(alpha), q(beta))
            }
            CharacterDegeneracy(e) => write!(f, "CD({e})"),
            Bivariant => write!(f, "Biv"),
            Antivariant => write!(f, "Antiv"),
            LeftVariant => write!(f, "Liv"),
            RightVariant => write!(f, "Riv"),
            FloatingConservative(e) => write!(f, "FC({e})"),
            CliffordProductive => write!(f, "CP"),
            FloatingProductive => write!(f, "FP"),
            Involutive => write!(f, "Inv"),
            Idempotent => write!(f, "Idm"),
            ThreeIdempotent => write!(f, "I3"),
            AxisEquals(n) => write!(f, "Axis({n})"),
            WeakMetricTrace => write!(f, "WMT"),
            ComposeFixed(n) => write!(f, "Fix({n})"),
            Pin { basis, comp, word, value } => {
                let lab = if *comp == 1 { "2" } else { "1" };
                write!(f, "Pin({basis},{lab},{word},{})", q(value))
            }
            DScaling { index, alpha } => write!(f, "DS({index},{})", q(alpha)),
        }
    }
}

fn split_args(s: &str) -> (String, Vec<String>) {
    match s.find('(') {
        Some(i) if s.ends_with(')') => {
            let name = s[..i].trim().to_string();
            let inner = &s[i + 1..s.len() - 1];
            let args = if inner.trim().is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|a| {
                        let a = a.trim();
                        // Accept `alpha=1` style named arguments.
                        a.split_once('=').map_or(a, |(_, v)| v.trim()).to_string()
                    })
                    .collect()
            };
            (name, args)
        }
        _ => (s.trim().to_string(), vec![]),
    }
}

fn rat(s: &str) -> Result<Rational, Error> {
    parse_rational(s).ok_or_else(|| Error::Parse(format!("bad rational `{s}`")))
}

fn sign(s: &str) -> Result<i8, Error> {
    match s {
        "+" | "1" | "+1" => Ok(1),
        "-" | "-1" => Ok(-1),
        _ => Err(Error::Parse(format!("expected a sign, got `{s}`"))),
    }
}

fn parse_one(t: &str) -> Result<PropertySpec, Error> {
    use PropertySpec::*;
    let (name, args) = split_args(t);
    let nargs = |n: usize| -> Result<(), Error> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!("`{name}` takes {n} argument(s), got {}", args.len())))
        }
    };
    let alpha = |default: i64| -> Result<Rational, Error> {
        match args.len() {
            0 => Ok(int(default)),
            1 => rat(&args[0]),
            _ => Err(Error::Parse(format!("`{name}` takes at most one argument"))),
        }
    };
    Ok(match name.as_str() {
        "sC" | "vC" | "psC" | "CC" => CliffordConservative,
        "Nat" | "Natural" => Natural,
        "Opp" | "Transposition" => Transposition,
        "Sigma2" | "S2" => Symmetry,
        "O2" | "Orthogonal" => Orthogonal,
        "S" => {
            nargs(2)?;
            let i: u8 = args[0].parse().map_err(|_| Error::Parse(format!("bad index `{}`", args[0])))?;
            if !(1..=8).contains(&i) {
                return Err(Error::Parse(format!("scaling index {i} out of range")));
            }
            PropertySpec::scaling(i, rat(&args[1])?)
        }
        "XE" => Scaling { index: ScalingIndex::Circular4, alpha: alpha(1)? },
        "CXE" => Scaling { index: ScalingIndex::Circular5, alpha: alpha(1)? },
        "Hyp" => {
            nargs(5)?;
            let h: u8 = args[0].parse().map_err(|_| Error::Parse(format!("bad index `{}`", args[0])))?;
            if !(6..=8).contains(&h) {
                return Err(Error::Parse("hyperscaling index must be 6, 7 or 8".into()));
            }
            Hyperscaling { h, j: rat(&args[1])?, l: rat(&args[2])?, alpha: rat(&args[3])?, beta: rat(&args[4])? }
        }
        "CD" => {
            nargs(1)?;
            CharacterDegeneracy(sign(&args[0])?)
        }
        "Biv" => Bivariant,
        "Antiv" => Antivariant,
        "Liv" => LeftVariant,
        "Riv" => RightVariant,
        "FC" => {
            nargs(1)?;
            FloatingConservative(sign(&args[0])?)
        }
        "CP" | "CliffordProductive" => CliffordProductive,
        "FP" => FloatingProductive,
        "Inv" | "Involutive" => Involutive,
        "Idm" | "Idempotent" => Idempotent,
        "I3" | "ThreeIdempotent" => ThreeIdempotent,
        "Axis" => {
            nargs(1)?;
            AxisEquals(args[0].clone())
        }
        "WMT" => WeakMetricTrace,
        "Fix" => {
            nargs(1)?;
            ComposeFixed(args[0].clone())
        }
        "Pin" => {
            nargs(4)?;
            let basis: BasisTag = args[0].parse()?;
            let comp = match args[1].as_str() {
                "0" | "1" | "12" => 0,
                "2" => 1,
                s => return Err(Error::Parse(format!("bad component `{s}`"))),
            };
            let word = Word::parse(&args[2]).ok_or_else(|| Error::Parse(format!("bad word `{}`", args[2])))?;
            Pin { basis, comp, word, value: rat(&args[3])? }
        }
        "DS" => {
            nargs(2)?;
            let i: u8 = args[0].parse().map_err(|_| Error::Parse(format!("bad index `{}`", args[0])))?;
            if !(1..=8).contains(&i) {
                return Err(Error::Parse(format!("scaling index {i} out of range")));
            }
            DScaling { index: i, alpha: rat(&args[1])? }
        }
        n => {
            if let Some(&(_, i)) = SCALING_NAMES.iter().find(|(s, _)| *s == n) {
                PropertySpec::scaling(i, alpha(1)?)
            } else {
                return Err(Error::Parse(format!("unknown property `{n}`")));
            }
        }
    })
}

/// Parses `+`-separated property tags, e.g. `sC + Opp + O2 + CP` or `H(alpha=1)`.
pub fn parse_property_set(s: &str) -> Result<Vec<PropertySpec>, Error> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == '+' && depth == 0 {
            out.push(parse_one(cur.trim())?);
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced parentheses".into()));
    }
    if !cur.trim().is_empty() {
        out.push(parse_one(cur.trim())?);
    } else if !out.is_empty() || s.contains('+') {
        return Err(Error::Parse("empty property tag".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn parses_the_standard_set() {
        let v = parse_property_set("sC + Opp + O2 + CP").unwrap();
        assert_eq!(
            v,
            vec![
                PropertySpec::CliffordConservative,
                PropertySpec::Transposition,
                PropertySpec::Orthogonal,
                PropertySpec::CliffordProductive
            ]
        );
    }

    #[test]
    fn parses_parameters() {
        let v = parse_property_set("H(alpha=1)+S(4,1/2)+Hyp(7,1,0,1,0)+CD(-1)+Pin(circular,1,4,0)").unwrap();
        assert_eq!(v[0], PropertySpec::scaling(3, int(1)));
        assert_eq!(v[1], PropertySpec::scaling(4, frac(1, 2)));
        assert!(matches!(v[2], PropertySpec::Hyperscaling { h: 7, .. }));
        assert_eq!(v[3], PropertySpec::CharacterDegeneracy(-1));
        assert!(matches!(v[4], PropertySpec::Pin { comp: 0, .. }));
    }

    #[test]
    fn long_names() {
        assert_eq!(parse_property_set("Natural+Idempotent").unwrap(), parse_property_set("Nat+Idm").unwrap());
    }

    #[test]
    fn display_round_trips() {
        let s = "sC+Nat+Opp+Sigma2+O2+S(3,2)+XE(1)+CD(1)+Biv+FC(-1)+CP+Inv+Axis(AxisC)+WMT+Fix(OfSy)+DS(4,0)";
        let v = parse_property_set(s).unwrap();
        let back: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(parse_property_set(&back.join("+")).unwrap(), v);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_property_set("sC + Foo").is_err());
        assert!(parse_property_set("S(9,1)").is_err());
        assert!(parse_property_set("sC + ").is_err());
    }
}
