//! Textual charge identifiers.
//!
//! Grammar (whitespace is not allowed):
//!
//! ```text
//! spec     := family [ "{" weights "}" ] [ "@d" INT "m" INT ]
//! family   := "schoices." INT | "qpe." INT | "qghz." INT | "qw." INT
//!           | "mproduct." SIG | "qir." SIG | "mghz." SIG | "lowl." SIG
//!           | "mwstate" | "uq" INT [ "." INT ] | "appendixA"
//!           | "synth." KET ">" KET { "+" KET }
//! weights  := weight { "," weight }
//! weight   := NUMBER | KEY "=" NUMBER
//! KEY      := "a" | "b" | "g" | "c" | "alpha" | "beta" | "gamma" | "a" INT
//! SIG      := word over q (charge), d (adjoint charge), w (Witten operator)
//! ```
//!
//! Omitted weights mean all ones; an omitted shape means `d = 2` and the
//! family's natural window. The canonical form printed by `Display` always
//! carries the shape and prints weights positionally, and only when they
//! differ from the default.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub(crate) const SCHOICES: [&str; 6] = ["wq", "qw", "qq", "dd", "qd", "dq"];

pub(crate) const QPE: [&str; 12] = [
    "qqw", "ddw", "dqw", "qdw", "wqq", "wdd", "wqd", "wdq", "qwq", "dwd", "qwd", "dwq",
];

pub(crate) const QGHZ: [&str; 8] = ["qqq", "qqd", "qdq", "dqq", "ddq", "qdd", "dqd", "ddd"];

pub(crate) const QW: [[&str; 2]; 8] = [
    ["bdq", "dbq"],
    ["dbd", "bdd"],
    ["ddb", "bdd"],
    ["ddb", "dbd"],
    ["qqf", "qfq"],
    ["qqf", "fqq"],
    ["qfq", "fqq"],
    ["dqf", "dfq"],
];

/// Number of variants of each `uq` family.
pub(crate) fn uq_variants(number: u8) -> Option<u8> {
    match number {
        1 | 2 => Some(2),
        3 => Some(7),
        4..=9 => Some(1),
        _ => None,
    }
}

/// Charge family identifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Schoices(u8),
    Qpe(u8),
    Qghz(u8),
    Qw(u8),
    Mproduct(String),
    Qir(String),
    Mghz(String),
    Mwstate,
    Uq {
        number: u8,
        variant: u8,
    },
    Lowl(String),
    AppendixA,
    Synth {
        source: String,
        targets: Vec<String>,
    },
}

impl Family {
    /// Family name without selector, e.g. `qghz` or `uq3`.
    pub fn base(&self) -> String {
        match self {
            Family::Schoices(_) => "schoices".into(),
            Family::Qpe(_) => "qpe".into(),
            Family::Qghz(_) => "qghz".into(),
            Family::Qw(_) => "qw".into(),
            Family::Mproduct(_) => "mproduct".into(),
            Family::Qir(_) => "qir".into(),
            Family::Mghz(_) => "mghz".into(),
            Family::Mwstate => "mwstate".into(),
            Family::Uq { number, .. } => format!("uq{number}"),
            Family::Lowl(_) => "lowl".into(),
            Family::AppendixA => "appendixA".into(),
            Family::Synth { .. } => "synth".into(),
        }
    }

    /// Window size fixed by the family, if any.
    pub fn fixed_m(&self) -> Option<usize> {
        match self {
            Family::Schoices(_) => Some(2),
            Family::Qpe(_) | Family::Qghz(_) | Family::Qw(_) | Family::AppendixA => Some(3),
            Family::Mproduct(s) | Family::Qir(s) | Family::Mghz(s) | Family::Lowl(s) => {
                Some(s.len())
            }
            Family::Uq { number, variant } => match (number, variant) {
                (1 | 2, _) => Some(2),
                (3, 1) | (9, _) => None,
                _ => Some(3),
            },
            Family::Mwstate => None,
            Family::Synth { source, .. } => Some(source.len()),
        }
    }

    /// Number of weights given `m`.
    pub fn weight_count(&self, m: usize) -> usize {
        match self {
            Family::Uq { number: 4 | 5, .. } | Family::AppendixA => 3,
            Family::Uq { number: 9, .. } => m,
            Family::Uq { .. } => 2,
            Family::Synth { targets, .. } => targets.len(),
            _ => 0,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Parse(what));
        let in_range = |k: u8, n: usize, name: &str| {
            if k == 0 || k as usize > n {
                bad(format!("{name}.{k} is out of range 1..={n}"))
            } else {
                Ok(())
            }
        };
        match self {
            Family::Schoices(k) => in_range(*k, SCHOICES.len(), "schoices"),
            Family::Qpe(k) => in_range(*k, QPE.len(), "qpe"),
            Family::Qghz(k) => in_range(*k, QGHZ.len(), "qghz"),
            Family::Qw(k) => in_range(*k, QW.len(), "qw"),
            Family::Mproduct(s) => {
                check_signature(s, "mproduct")?;
                if charge_letters(s) != 1 {
                    return bad(format!("mproduct.{s} needs exactly one charge letter"));
                }
                Ok(())
            }
            Family::Qir(s) => {
                check_signature(s, "qir")?;
                let r = charge_letters(s);
                if r < 2 || r + 1 > s.len() {
                    return bad(format!("qir.{s} needs between 2 and m-1 charge letters"));
                }
                Ok(())
            }
            Family::Mghz(s) => {
                check_signature(s, "mghz")?;
                if s.contains('w') {
                    return bad(format!("mghz.{s} takes only q and d"));
                }
                Ok(())
            }
            Family::Lowl(s) => {
                check_signature(s, "lowl")?;
                if charge_letters(s) == 0 {
                    return bad(format!("lowl.{s} needs a charge letter"));
                }
                Ok(())
            }
            Family::Uq { number, variant } => match uq_variants(*number) {
                Some(n) if *variant >= 1 && *variant <= n => Ok(()),
                Some(n) => bad(format!("uq{number}.{variant} is out of range 1..={n}")),
                None => Err(Error::UnknownFamily(format!("uq{number}"))),
            },
            Family::Mwstate | Family::AppendixA => Ok(()),
            Family::Synth { source, targets } => {
                let m = source.len();
                if m < 2 {
                    return bad("synth needs at least two sites".into());
                }
                for ket in std::iter::once(source).chain(targets) {
                    if ket.len() != m || !ket.bytes().all(|c| c == b'0' || c == b'1') {
                        return bad(format!("synth ket {ket:?} must be {m} binary digits"));
                    }
                }
                if targets.is_empty() {
                    return bad("synth needs at least one target ket".into());
                }
                Ok(())
            }
        }
    }
}

fn check_signature(s: &str, family: &str) -> Result<()> {
    if s.len() < 2 || !s.bytes().all(|c| matches!(c, b'q' | b'd' | b'w')) {
        return Err(Error::Parse(format!(
            "{family}.{s}: signature must be at least two letters from q, d, w"
        )));
    }
    Ok(())
}

fn charge_letters(s: &str) -> usize {
    s.bytes().filter(|c| *c != b'w').count()
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Schoices(k) => write!(f, "schoices.{k}"),
            Family::Qpe(k) => write!(f, "qpe.{k}"),
            Family::Qghz(k) => write!(f, "qghz.{k}"),
            Family::Qw(k) => write!(f, "qw.{k}"),
            Family::Mproduct(s) => write!(f, "mproduct.{s}"),
            Family::Qir(s) => write!(f, "qir.{s}"),
            Family::Mghz(s) => write!(f, "mghz.{s}"),
            Family::Lowl(s) => write!(f, "lowl.{s}"),
            Family::Mwstate => write!(f, "mwstate"),
            Family::Uq { number, variant: 1 } => write!(f, "uq{number}"),
            Family::Uq { number, variant } => write!(f, "uq{number}.{variant}"),
            Family::AppendixA => write!(f, "appendixA"),
            Family::Synth { source, targets } => {
                write!(f, "synth.{source}>{}", targets.join("+"))
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, sel) = match s.split_once('.') {
            Some((b, rest)) => (b, Some(rest)),
            None => (s, None),
        };
        let index = |name: &str| -> Result<u8> {
            let sel = sel.ok_or_else(|| Error::Parse(format!("{name} needs a .k selector")))?;
            sel.parse::<u8>()
                .map_err(|_| Error::Parse(format!("bad selector {sel:?} for {name}")))
        };
        let sig = |name: &str| -> Result<String> {
            sel.map(str::to_owned)
                .ok_or_else(|| Error::Parse(format!("{name} needs a .signature selector")))
        };
        let family = match base {
            "schoices" => Family::Schoices(index(base)?),
            "qpe" => Family::Qpe(index(base)?),
            "qghz" => Family::Qghz(index(base)?),
            "qw" => Family::Qw(index(base)?),
            "mproduct" => Family::Mproduct(sig(base)?),
            "qir" => Family::Qir(sig(base)?),
            "mghz" => Family::Mghz(sig(base)?),
            "lowl" => Family::Lowl(sig(base)?),
            "mwstate" | "appendixA" if sel.is_some() => {
                return Err(Error::Parse(format!("{base} takes no selector")))
            }
            "mwstate" => Family::Mwstate,
            "appendixA" => Family::AppendixA,
            "synth" => {
                let body = sig(base)?;
                let (source, rest) = body.split_once('>').ok_or_else(|| {
                    Error::Parse(format!("synth.{body}: expected source>targets"))
                })?;
                Family::Synth {
                    source: source.to_owned(),
                    targets: rest.split('+').map(str::to_owned).collect(),
                }
            }
            _ => {
                let number = base
                    .strip_prefix("uq")
                    .and_then(|n| n.parse::<u8>().ok())
                    .ok_or_else(|| Error::UnknownFamily(s.to_owned()))?;
                let variant = match sel {
                    Some(v) => v
                        .parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad selector {v:?} for {base}")))?,
                    None => 1,
                };
                Family::Uq { number, variant }
            }
        };
        family.validate()?;
        Ok(family)
    }
}

/// A charge family member together with its weights and shape.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeSpec {
    pub family: Family,
    pub weights: Vec<f64>,
    pub m: usize,
    pub d: usize,
}

impl ChargeSpec {
    /// Spec with default (all-one) weights.
    pub fn new(family: Family, d: usize, m: usize) -> Result<Self> {
        let weights = vec![1.0; family.weight_count(m)];
        Self::with_weights(family, weights, d, m)
    }

    pub fn with_weights(family: Family, weights: Vec<f64>, d: usize, m: usize) -> Result<Self> {
        family.validate()?;
        if m < 2 {
            return Err(Error::UnsupportedShape {
                family: family.base(),
                what: format!("m = {m}"),
            });
        }
        if d < 2 {
            return Err(Error::InvalidDimension(format!("d = {d}")));
        }
        if let Some(fixed) = family.fixed_m() {
            if fixed != m {
                return Err(Error::UnsupportedShape {
                    family: family.to_string(),
                    what: format!("m = {m} (window is {fixed})"),
                });
            }
        }
        if matches!(family, Family::Synth { .. }) && d != 2 {
            return Err(Error::UnsupportedShape {
                family: "synth".into(),
                what: format!("d = {d}"),
            });
        }
        let expected = family.weight_count(m);
        if weights.len() != expected {
            return Err(Error::WeightLength {
                family: family.to_string(),
                expected,
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidWeights("weights must be finite".into()));
        }
        if !weights.is_empty() && weights.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidWeights("weights are all zero".into()));
        }
        Ok(Self {
            family,
            weights,
            m,
            d,
        })
    }

    /// `true` when every weight is one.
    pub fn has_default_weights(&self) -> bool {
        self.weights.iter().all(|w| *w == 1.0)
    }

    /// Same family and weights at another local dimension.
    pub fn at_dim(&self, d: usize) -> Result<Self> {
        Self::with_weights(self.family.clone(), self.weights.clone(), d, self.m)
    }
}

impl fmt::Display for ChargeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if !self.has_default_weights() {
            let w: Vec<String> = self.weights.iter().map(|x| x.to_string()).collect();
            write!(f, "{{{}}}", w.join(","))?;
        }
        write!(f, "@d{}m{}", self.d, self.m)
    }
}

fn weight_slot(key: &str) -> Option<usize> {
    match key {
        "a" | "alpha" => Some(0),
        "b" | "beta" => Some(1),
        "g" | "c" | "gamma" => Some(2),
        _ => key
            .strip_prefix('a')
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|n| *n >= 1)
            .map(|n| n - 1),
    }
}

fn parse_weights(body: &str, count: usize, family: &Family) -> Result<Vec<f64>> {
    let items: Vec<&str> = body.split(',').collect();
    let keyed = items.iter().filter(|s| s.contains('=')).count();
    if keyed != 0 && keyed != items.len() {
        return Err(Error::Parse(format!(
            "mixed keyed and positional weights in {{{body}}}"
        )));
    }
    let number = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad weight {s:?}")))
    };
    if keyed == 0 {
        return items.iter().map(|s| number(s)).collect();
    }
    let mut weights = vec![None; count];
    for item in items {
        let (key, value) = item.split_once('=').expect("keyed item");
        let slot =
            weight_slot(key).ok_or_else(|| Error::Parse(format!("unknown weight key {key:?}")))?;
        if slot >= count {
            return Err(Error::WeightLength {
                family: family.to_string(),
                expected: count,
                got: slot + 1,
            });
        }
        if weights[slot].replace(number(value)?).is_some() {
            return Err(Error::Parse(format!("weight {key:?} given twice")));
        }
    }
    Ok(weights.into_iter().map(|w| w.unwrap_or(1.0)).collect())
}

fn parse_shape(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("expected d<D>m<M>, got {s:?}"));
    let rest = s.strip_prefix('d').ok_or_else(bad)?;
    let (d, m) = rest.split_once('m').ok_or_else(bad)?;
    Ok((d.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?))
}

impl FromStr for ChargeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, shape) = match s.rsplit_once('@') {
            Some((h, sh)) => (h, Some(parse_shape(sh)?)),
            None => (s, None),
        };
        let (name, weights) = match head.find('{') {
            Some(open) => {
                let body = head[open + 1..]
                    .strip_suffix('}')
                    .ok_or_else(|| Error::Parse(format!("unterminated weights in {s:?}")))?;
                (&head[..open], Some(body))
            }
            None => (head, None),
        };
        let family: Family = name.parse()?;
        let (d, m) = match shape {
            Some(dm) => dm,
            None => (2, family.fixed_m().unwrap_or(3)),
        };
        let count = family.weight_count(m);
        let weights = match weights {
            Some(body) => parse_weights(body, count, &family)?,
            None => vec![1.0; count],
        };
        ChargeSpec::with_weights(family, weights, d, m)
    }
}

impl Serialize for ChargeSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChargeSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
