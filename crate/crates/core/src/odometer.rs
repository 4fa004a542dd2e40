//! Odometers: adding one with carry on `∏ {0, …, a_i − 1}`.
//!
//! Only eventually periodic digit sequences are represented, written
//! `pre:period` with comma-separated bases (`6:5` is `6, 5, 5, 5, …`; `:2` is the
//! constant sequence of 2s). The conjugacy invariant is the supernatural number
//! `∏ p^{e_p}` with `e_p ∈ ℕ ∪ {∞}`: two odometers are conjugate iff every
//! partial product of one divides some partial product of the other, which is
//! exactly equality of these invariants.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::findyn::{self, EquivariantMap, FiniteSystem};
use crate::tower::Tower;

/// Largest truncation built by default.
pub const DEFAULT_TRUNCATION_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OdometerSpec {
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

impl OdometerSpec {
    pub fn new(preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidSpec("period must be nonempty".into()));
        }
        if let Some(a) = preperiod.iter().chain(&period).find(|&&a| a < 2) {
            return Err(Error::InvalidSpec(format!("base {a} is below 2")));
        }
        Ok(OdometerSpec { preperiod, period })
    }

    /// The constant sequence `a, a, a, …`.
    pub fn constant(a: u64) -> Result<Self> {
        Self::new(vec![], vec![a])
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    /// The base `a_i` of digit `i` (zero-based).
    pub fn base(&self, i: usize) -> u64 {
        match self.preperiod.get(i) {
            Some(&a) => a,
            None => self.period[(i - self.preperiod.len()) % self.period.len()],
        }
    }

    pub fn bases(&self, n: usize) -> Vec<u64> {
        (0..n).map(|i| self.base(i)).collect()
    }

    /// `m_n = a_1 ⋯ a_n`, or `None` on overflow.
    pub fn partial_product(&self, n: usize) -> Option<u128> {
        (0..n).try_fold(1u128, |acc, i| acc.checked_mul(self.base(i) as u128))
    }

    /// Adds one to the first digit and carries to the right. The all-maximal
    /// vector wraps to all zeros.
    pub fn step(&self, digits: &[u64]) -> Result<Vec<u64>> {
        self.check_digits(digits)?;
        let mut out = digits.to_vec();
        for (i, d) in out.iter_mut().enumerate() {
            if *d + 1 < self.base(i) {
                *d += 1;
                return Ok(out);
            }
            *d = 0;
        }
        Ok(out)
    }

    fn check_digits(&self, digits: &[u64]) -> Result<()> {
        for (index, &digit) in digits.iter().enumerate() {
            let base = self.base(index);
            if digit >= base {
                return Err(Error::DigitOutOfRange { index, digit, base });
            }
        }
        Ok(())
    }

    /// Mixed-radix value of a digit vector, least significant digit first.
    fn encode(&self, digits: &[u64]) -> usize {
        digits
            .iter()
            .enumerate()
            .rev()
            .fold(0usize, |acc, (i, &d)| acc * self.base(i) as usize + d as usize)
    }

    fn decode(&self, n: usize, mut value: usize) -> Vec<u64> {
        (0..n)
            .map(|i| {
                let b = self.base(i) as usize;
                let d = value % b;
                value /= b;
                d as u64
            })
            .collect()
    }

    pub fn truncation(&self, n: usize) -> Result<OdometerTruncation> {
        self.truncation_capped(n, DEFAULT_TRUNCATION_CAP)
    }

    pub fn truncation_capped(&self, n: usize, cap: u128) -> Result<OdometerTruncation> {
        if n == 0 {
            return Err(Error::LevelOutOfRange {
                got: 0,
                expected: "n ≥ 1".into(),
            });
        }
        let size = self.partial_product(n).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::ResourceCap {
                what: format!("odometer truncation at level {n}"),
                needed: size,
                cap,
            });
        }
        let size = size as usize;
        let mut images = Vec::with_capacity(size);
        let mut labels = Vec::with_capacity(size);
        for v in 0..size {
            let digits = self.decode(n, v);
            images.push(self.encode(&self.step(&digits)?));
            labels.push(format_digits(&digits));
        }
        let system = FiniteSystem::permutation_labelled(labels, images)?;
        Ok(OdometerTruncation {
            level: n,
            system: Arc::new(system),
        })
    }

    /// Projection from truncation `n + 1` onto truncation `n` dropping the last digit.
    pub fn bonding(&self, n: usize) -> Result<EquivariantMap> {
        let upper = self.truncation(n + 1)?;
        let lower = self.truncation(n)?;
        self.bonding_between(&upper, &lower)
    }

    fn bonding_between(&self, upper: &OdometerTruncation, lower: &OdometerTruncation) -> Result<EquivariantMap> {
        let modulus = lower.system.len();
        let assignment = (0..upper.system.len()).map(|v| v % modulus).collect();
        EquivariantMap::new(upper.system.clone(), lower.system.clone(), assignment)
    }

    /// The tower of truncations `1 ← 2 ← … ← depth`.
    pub fn tower(&self, depth: usize) -> Result<Tower> {
        let levels = (1..=depth).map(|n| self.truncation(n)).collect::<Result<Vec<_>>>()?;
        let bondings = levels
            .windows(2)
            .map(|w| self.bonding_between(&w[1], &w[0]))
            .collect::<Result<Vec<_>>>()?;
        Tower::new(levels.into_iter().map(|t| t.system).collect(), bondings)
    }

    pub fn supernatural(&self) -> SupernaturalNumber {
        let mut sn = SupernaturalNumber::one();
        for &a in &self.period {
            for (p, _) in factorize(a) {
                sn.exponents.insert(p, Exponent::Infinite);
            }
        }
        for &a in &self.preperiod {
            for (p, e) in factorize(a) {
                sn.multiply_prime(p, Exponent::Finite(e));
            }
        }
        sn
    }

    /// Least level `n` with `k | m_n`, if `k` divides the supernatural number.
    pub fn phi_k(&self, k: u64) -> Option<usize> {
        assert!(k >= 1, "k must be positive");
        if !self.supernatural().is_divisible_by(k) {
            return None;
        }
        let mut residue = 1u128 % k as u128;
        let mut n = 0;
        while residue != 0 {
            residue = residue * self.base(n) as u128 % k as u128;
            n += 1;
        }
        Some(n.max(1))
    }

    /// Whether there is a clopen set `U` with `σ(U)` its complement.
    pub fn swap_sentence_holds(&self) -> bool {
        self.phi_k(2).is_some()
    }
}

fn format_digits(digits: &[u64]) -> String {
    let parts: Vec<String> = digits.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

fn format_list(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for OdometerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", format_list(&self.preperiod), format_list(&self.period))
    }
}

impl FromStr for OdometerSpec {
    type Err = Error;

    /// `pre:period`; a spec without a colon is read as a constant/periodic sequence.
    fn from_str(s: &str) -> Result<Self> {
        let parse_list = |t: &str| -> Result<Vec<u64>> {
            let t = t.trim();
            if t.is_empty() {
                return Ok(Vec::new());
            }
            t.split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| Error::InvalidSpec(format!("bad base {x:?} in {s:?}"))))
                .collect()
        };
        let (pre, per) = match s.split_once(':') {
            Some((pre, per)) => (parse_list(pre)?, parse_list(per)?),
            None => (Vec::new(), parse_list(s)?),
        };
        OdometerSpec::new(pre, per)
    }
}

impl Serialize for OdometerSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            preperiod: &'a [u64],
            period: &'a [u64],
        }
        Repr {
            preperiod: &self.preperiod,
            period: &self.period,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OdometerSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[serde(default)]
            preperiod: Vec<u64>,
            period: Vec<u64>,
        }
        let r = Repr::deserialize(deserializer)?;
        OdometerSpec::new(r.preperiod, r.period).map_err(de::Error::custom)
    }
}

/// Level `n` of an odometer: a single cycle of length `m_n` on digit vectors.
///
/// State `v` is the digit vector whose mixed-radix value (first digit least
/// significant) is `v`.
#[derive(Clone, Debug)]
pub struct OdometerTruncation {
    level: usize,
    system: Arc<FiniteSystem>,
}

impl OdometerTruncation {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn system(&self) -> &Arc<FiniteSystem> {
        &self.system
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

impl Exponent {
    fn add(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a + b),
            _ => Exponent::Infinite,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(e) => write!(f, "{e}"),
            Exponent::Infinite => f.write_str("∞"),
        }
    }
}

/// `∏ p^{e_p}` over primes, with `e_p ∈ ℕ ∪ {∞}`; primes with exponent 0 are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SupernaturalNumber {
    exponents: BTreeMap<u64, Exponent>,
}

impl SupernaturalNumber {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_exponents(exponents: impl IntoIterator<Item = (u64, Exponent)>) -> Result<Self> {
        let mut sn = Self::one();
        for (p, e) in exponents {
            if factorize(p) != vec![(p, 1)] {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
            sn.multiply_prime(p, e);
        }
        Ok(sn)
    }

    fn multiply_prime(&mut self, p: u64, e: Exponent) {
        if e == Exponent::Finite(0) {
            return;
        }
        let entry = self.exponents.entry(p).or_insert(Exponent::Finite(0));
        *entry = entry.add(e);
    }

    pub fn exponent(&self, p: u64) -> Exponent {
        self.exponents.get(&p).copied().unwrap_or(Exponent::Finite(0))
    }

    pub fn exponents(&self) -> &BTreeMap<u64, Exponent> {
        &self.exponents
    }

    /// Primewise: `p^e ∥ k` needs exponent ≥ `e`; `∞` absorbs any finite exponent.
    pub fn is_divisible_by(&self, k: u64) -> bool {
        assert!(k >= 1, "k must be positive");
        factorize(k).into_iter().all(|(p, e)| self.exponent(p) >= Exponent::Finite(e))
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.exponents.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        f.write_str(&parts.join(" · "))
    }
}

impl Serialize for SupernaturalNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.exponents.len()))?;
        for (p, e) in &self.exponents {
            match e {
                Exponent::Finite(e) => map.serialize_entry(&p.to_string(), e)?,
                Exponent::Infinite => map.serialize_entry(&p.to_string(), "inf")?,
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SupernaturalNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Finite(u32),
            Tag(String),
        }
        let raw = BTreeMap::<String, Raw>::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(raw.len());
        for (p, e) in raw {
            let p: u64 = p.parse().map_err(|_| de::Error::custom(format!("bad prime {p:?}")))?;
            let e = match e {
                Raw::Finite(0) => return Err(de::Error::custom("zero exponents are not stored")),
                Raw::Finite(e) => Exponent::Finite(e),
                Raw::Tag(t) if t == "inf" => Exponent::Infinite,
                Raw::Tag(t) => return Err(de::Error::custom(format!("bad exponent {t:?}"))),
            };
            entries.push((p, e));
        }
        SupernaturalNumber::from_exponents(entries).map_err(de::Error::custom)
    }
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn conjugate(a: &OdometerSpec, b: &OdometerSpec) -> bool {
    a.supernatural() == b.supernatural()
}

pub fn step(spec: &OdometerSpec, digits: &[u64]) -> Result<Vec<u64>> {
    spec.step(digits)
}

pub fn truncation(spec: &OdometerSpec, n: usize) -> Result<OdometerTruncation> {
    spec.truncation(n)
}

pub fn bonding(spec: &OdometerSpec, n: usize) -> Result<EquivariantMap> {
    spec.bonding(n)
}

pub fn supernatural(spec: &OdometerSpec) -> SupernaturalNumber {
    spec.supernatural()
}

pub fn phi_k_odometer(spec: &OdometerSpec, k: u64) -> Option<usize> {
    spec.phi_k(k)
}

pub fn swap_sentence_holds(spec: &OdometerSpec) -> bool {
    spec.swap_sentence_holds()
}

/// Least level `n ≤ max_level` whose truncation carries a cyclic `k`-block
/// partition, found by direct search on the truncations.
pub fn phi_k_by_truncation(spec: &OdometerSpec, k: usize, max_level: usize) -> Result<Option<usize>> {
    for n in 1..=max_level {
        let t = spec.truncation(n)?;
        if findyn::phi_k_holds(t.system(), k)?.is_some() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
