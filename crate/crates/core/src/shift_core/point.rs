use super::{format_word, parse_word, SftGraph, Symbol, Word};
use crate::error::{Error, Result};
use crate::scalar::{pow2_neg, Exact};
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

/// Exact value `0` or `2^-k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dyadic {
    Zero,
    Pow(u32),
}

impl Dyadic {
    pub const ONE: Dyadic = Dyadic::Pow(0);

    pub fn exponent(self) -> Option<u32> {
        match self {
            Dyadic::Zero => None,
            Dyadic::Pow(k) => Some(k),
        }
    }

    /// `self * 2^-k`.
    pub fn scaled(self, k: u32) -> Dyadic {
        match self {
            Dyadic::Zero => Dyadic::Zero,
            Dyadic::Pow(j) => Dyadic::Pow(j + k),
        }
    }

    pub fn to_exact<S: Exact>(self) -> S {
        match self {
            Dyadic::Zero => S::zero(),
            Dyadic::Pow(k) => pow2_neg(k),
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Dyadic::Zero => 0.0,
            Dyadic::Pow(k) => (-(k as f64)).exp2(),
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dyadic::Zero, Dyadic::Zero) => Ordering::Equal,
            (Dyadic::Zero, _) => Ordering::Less,
            (_, Dyadic::Zero) => Ordering::Greater,
            (Dyadic::Pow(a), Dyadic::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dyadic::Zero => write!(f, "0"),
            Dyadic::Pow(0) => write!(f, "1"),
            Dyadic::Pow(k) if *k < 128 => write!(f, "1/{}", 1u128 << k),
            Dyadic::Pow(k) => write!(f, "2^-{k}"),
        }
    }
}

impl std::str::FromStr for Dyadic {
    type Err = Error;

    /// Accepts `0`, `1`, `2^-k` and `1/N` with `N` a power of two.
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::Parse(format!("not a dyadic value: {text:?}"));
        if t == "0" {
            return Ok(Dyadic::Zero);
        }
        if t == "1" {
            return Ok(Dyadic::ONE);
        }
        if let Some(k) = t.strip_prefix("2^-") {
            return k.parse().map(Dyadic::Pow).map_err(|_| bad());
        }
        if let Some(d) = t.strip_prefix("1/") {
            let n: u128 = d.parse().map_err(|_| bad())?;
            if n.is_power_of_two() {
                return Ok(Dyadic::Pow(n.trailing_zeros()));
            }
        }
        Err(bad())
    }
}

impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dyadic::Zero => s.serialize_str("0"),
            Dyadic::Pow(k) => s.collect_str(&format_args!("2^-{k}")),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Metric conventions on one-sided sequence space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CylinderMetric;

impl CylinderMetric {
    pub const BASE: u32 = 2;
    pub const ORIGIN: usize = 0;

    /// Index of the first disagreement within the common length.
    pub fn first_mismatch(a: &[Symbol], b: &[Symbol]) -> Option<usize> {
        a.iter().zip(b).position(|(x, y)| x != y)
    }

    /// Distance of words read as cylinders: `0` when one is a prefix of
    /// the other.
    pub fn word_distance(a: &[Symbol], b: &[Symbol]) -> Dyadic {
        match Self::first_mismatch(a, b) {
            Some(j) => Dyadic::Pow(j as u32),
            None => Dyadic::Zero,
        }
    }
}

/// Eventually periodic sequence `preperiod · period^∞`, kept in normal form
/// (primitive period, shortest preperiod).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolicPoint {
    preperiod: Word,
    period: Word,
}

fn primitive_root(w: &[Symbol]) -> &[Symbol] {
    let n = w.len();
    for p in 1..=n {
        if n % p == 0 && (p..n).all(|i| w[i] == w[i - p]) {
            return &w[..p];
        }
    }
    w
}

impl SymbolicPoint {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Schema("period word must be nonempty".into()));
        }
        let mut pre = preperiod;
        let mut per = primitive_root(&period).to_vec();
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Ok(SymbolicPoint {
            preperiod: pre,
            period: per,
        })
    }

    pub fn periodic(period: Word) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    pub fn constant(symbol: Symbol) -> Self {
        SymbolicPoint {
            preperiod: Vec::new(),
            period: vec![symbol],
        }
    }

    pub fn preperiod(&self) -> &[Symbol] {
        &self.preperiod
    }
    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    pub fn at(&self, i: usize) -> Symbol {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// `σ^k` of this point.
    pub fn shifted(&self, k: usize) -> Self {
        let pl = self.preperiod.len();
        if k <= pl {
            return SymbolicPoint {
                preperiod: self.preperiod[k..].to_vec(),
                period: self.period.clone(),
            };
        }
        let mut per = self.period.clone();
        let r = (k - pl) % per.len();
        per.rotate_left(r);
        SymbolicPoint {
            preperiod: Vec::new(),
            period: per,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    /// Prefix length on which agreement with `other` forces equality.
    fn horizon(&self, other: &Self) -> usize {
        let (p, q) = (self.period.len(), other.period.len());
        self.preperiod.len().max(other.preperiod.len()) + num_integer::lcm(p, q)
    }

    pub fn format(&self, alphabet: &[String]) -> String {
        format!(
            "{}({})^inf",
            format_word(alphabet, &self.preperiod),
            format_word(alphabet, &self.period)
        )
    }

    /// Inverse of [`SymbolicPoint::format`].
    pub fn parse(alphabet: &[String], text: &str) -> Result<Self> {
        let body = text
            .strip_suffix(")^inf")
            .ok_or_else(|| Error::Parse(format!("point {text:?} must end with \")^inf\"")))?;
        let open = body
            .rfind('(')
            .ok_or_else(|| Error::Parse(format!("point {text:?} lacks \"(\"")))?;
        let pre = parse_word(alphabet, &body[..open])?;
        let per = parse_word(alphabet, &body[open + 1..])?;
        Self::new(pre, per).map_err(|_| Error::Parse(format!("point {text:?} has empty period")))
    }
}

/// Cylinder distance `2^-j` at the first mismatch `j`, exact.
pub fn distance(x: &SymbolicPoint, y: &SymbolicPoint) -> Dyadic {
    if x == y {
        return Dyadic::Zero;
    }
    let h = x.horizon(y);
    (0..h)
        .find(|&i| x.at(i) != y.at(i))
        .map(|j| Dyadic::Pow(j as u32))
        .unwrap_or(Dyadic::Zero)
}

impl SftGraph {
    /// Whether the point is the label of some infinite path.
    pub fn contains_point(&self, x: &SymbolicPoint) -> bool {
        if self.is_empty()
            || x.period
                .iter()
                .chain(&x.preperiod)
                .any(|&s| s >= self.alphabet.len())
        {
            return false;
        }
        let mut cur = self.follow(&self.all_vertices(), &x.preperiod);
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        loop {
            if cur.is_empty() {
                return false;
            }
            if !seen.insert(cur.clone()) {
                return true;
            }
            cur = self.follow(&cur, &x.period);
        }
    }
}
