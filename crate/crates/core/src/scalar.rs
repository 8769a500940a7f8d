//! Scalar abstractions: floating types for spectral estimates and exact
//! ordered fields for distance matrices.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed};
use std::fmt::{Debug, Display};

pub trait Real:
    num_traits::Float + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

pub trait Exact: Clone + Ord + Num + Signed + Debug + Display + Send + Sync + 'static {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64_lossy(&self) -> f64;
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn parse_text(s: &str) -> Option<Self>;
}

impl Exact for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn parse_text(s: &str) -> Option<Self> {
        parse_fraction(s).and_then(|(n, d)| {
            let n: i64 = n.parse().ok()?;
            let d: i64 = d.parse().ok()?;
            (d != 0).then(|| Ratio::new(n, d))
        })
    }
}

impl Exact for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn parse_text(s: &str) -> Option<Self> {
        parse_fraction(s).and_then(|(n, d)| {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            (d != BigInt::from(0)).then(|| BigRational::new(n, d))
        })
    }
}

fn parse_fraction(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => Some((n.trim(), d.trim())),
        None => Some((s, "1")),
    }
}

/// 2^(-k) as an exact value of any `Exact` scalar.
pub fn pow2_neg<S: Exact>(k: u32) -> S {
    let mut v = S::one();
    let two = S::one() + S::one();
    for _ in 0..k {
        v = v / two.clone();
    }
    v
}
