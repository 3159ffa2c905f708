//! Prime-field helpers (powers, primitive roots, discrete indices) and the
//! code alphabets GF(2) ⊂ GF(4).
//!
//! GF(4) = {0, 1, ε, ε²} with ε² = ε + 1. Elements are stored in two bits,
//! `hi·ε + lo`, so 0 ↦ 00, 1 ↦ 01, ε ↦ 10, ε² ↦ 11 and addition is XOR.
//! GF(2) is the subfield {0, 1} and shares the representation.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `base^exp mod p` by square-and-multiply.
pub fn mod_pow(base: u64, exp: u64, p: u64) -> u64 {
    if p == 1 {
        return 0;
    }
    let m = p as u128;
    let mut acc: u128 = 1;
    let mut b = (base as u128) % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// True iff `g` has multiplicative order `p - 1` modulo the prime `p`.
pub fn is_primitive_root(g: u64, p: u64) -> bool {
    if g.is_multiple_of(p) {
        return false;
    }
    if p == 2 {
        return g % 2 == 1;
    }
    distinct_prime_factors(p - 1)
        .into_iter()
        .all(|r| mod_pow(g, (p - 1) / r, p) != 1)
}

/// Smallest positive primitive root of the prime `p`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    (2..p)
        .find(|&g| is_primitive_root(g, p))
        .ok_or_else(|| Error::Internal(format!("no primitive root found for {p}")))
}

/// Upper limit on supported primes; index tables are held in memory.
pub const MAX_PRIME: u64 = 1 << 31;

/// A prime `p = 12l + 7` together with its class size `f = (p-1)/6`,
/// `l = (p-7)/12` and a fixed primitive root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeModulus {
    pub p: u64,
    pub f: u64,
    pub l: u64,
    pub gamma: u64,
}

impl PrimeModulus {
    /// Uses the smallest primitive root of `p`.
    pub fn new(p: u64) -> Result<Self> {
        Self::validate(p)?;
        let gamma = primitive_root(p)?;
        Ok(Self::assemble(p, gamma))
    }

    pub fn with_root(p: u64, gamma: u64) -> Result<Self> {
        Self::validate(p)?;
        if !is_primitive_root(gamma, p) {
            return Err(Error::InvalidInput(format!(
                "{gamma} is not a primitive root of {p}"
            )));
        }
        Ok(Self::assemble(p, gamma % p))
    }

    fn validate(p: u64) -> Result<()> {
        if p >= MAX_PRIME {
            return Err(Error::InvalidInput(format!("p = {p} exceeds 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p % 12 != 7 {
            return Err(Error::Incongruent {
                p,
                modulus: 12,
                residue: 7,
            });
        }
        Ok(())
    }

    fn assemble(p: u64, gamma: u64) -> Self {
        Self {
            p,
            f: (p - 1) / 6,
            l: (p - 7) / 12,
            gamma,
        }
    }
}

/// Power and index tables for a primitive root `gamma` of `p`.
#[derive(Debug, Clone)]
pub struct IndexTable {
    p: u64,
    gamma: u64,
    // log[a] for 1 <= a < p; log[0] is unused.
    log: Vec<u32>,
    pow: Vec<u32>,
}

impl IndexTable {
    pub fn new(p: u64, gamma: u64) -> Result<Self> {
        if !is_prime(p) || p >= MAX_PRIME {
            return Err(Error::NotPrime(p));
        }
        if !is_primitive_root(gamma, p) {
            return Err(Error::InvalidInput(format!(
                "{gamma} is not a primitive root of {p}"
            )));
        }
        let n = (p - 1) as usize;
        let mut log = vec![u32::MAX; p as usize];
        let mut pow = Vec::with_capacity(n);
        let mut x = 1u64;
        for i in 0..n {
            pow.push(x as u32);
            log[x as usize] = i as u32;
            x = x * gamma % p;
        }
        Ok(Self {
            p,
            gamma: gamma % p,
            log,
            pow,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    /// The unique `i` in `[0, p-2]` with `gamma^i = a (mod p)`.
    pub fn index(&self, a: u64) -> Result<u32> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroHasNoIndex);
        }
        Ok(self.log[a as usize])
    }

    /// `gamma^i mod p`.
    pub fn power(&self, i: u64) -> u64 {
        self.pow[(i % (self.p - 1)) as usize] as u64
    }
}

/// One-shot discrete index; builds a table, so prefer [`IndexTable`] for
/// repeated lookups.
pub fn discrete_index(p: u64, gamma: u64, a: u64) -> Result<u32> {
    if a.is_multiple_of(p) {
        return Err(Error::ZeroHasNoIndex);
    }
    IndexTable::new(p, gamma)?.index(a)
}

/// Code alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Gf2,
    Gf4,
}

impl Field {
    pub fn from_q(q: u32) -> Result<Self> {
        match q {
            2 => Ok(Field::Gf2),
            4 => Ok(Field::Gf4),
            _ => Err(Error::UnsupportedField(q)),
        }
    }

    pub fn q(self) -> u32 {
        match self {
            Field::Gf2 => 2,
            Field::Gf4 => 4,
        }
    }

    pub fn contains(self, a: Gf4) -> bool {
        match self {
            Field::Gf2 => a.0 < 2,
            Field::Gf4 => a.0 < 4,
        }
    }

    pub fn elements(self) -> &'static [Gf4] {
        match self {
            Field::Gf2 => &Gf4::ALL[..2],
            Field::Gf4 => &Gf4::ALL,
        }
    }

    pub fn nonzero(self) -> &'static [Gf4] {
        &self.elements()[1..]
    }

    /// Parses one coordinate symbol: `0`, `1`, and for GF(4) `w` (ε) or `W` (ε²).
    pub fn parse_symbol(self, c: char) -> Option<Gf4> {
        let a = Gf4::from_symbol(c)?;
        self.contains(a).then_some(a)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q())
    }
}

/// Element of GF(4), also used for GF(2) values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf4(u8);

// log table with respect to ε; index 0 unused.
const LOG: [u8; 4] = [0, 0, 1, 2];
const EXP: [u8; 3] = [1, 2, 3];

impl Gf4 {
    pub const ZERO: Gf4 = Gf4(0);
    pub const ONE: Gf4 = Gf4(1);
    /// ε
    pub const W: Gf4 = Gf4(2);
    /// ε² = ε + 1
    pub const W2: Gf4 = Gf4(3);
    pub const ALL: [Gf4; 4] = [Gf4::ZERO, Gf4::ONE, Gf4::W, Gf4::W2];

    pub const fn from_bits(bits: u8) -> Gf4 {
        Gf4(bits & 3)
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn from_symbol(c: char) -> Option<Gf4> {
        match c {
            '0' => Some(Gf4::ZERO),
            '1' => Some(Gf4::ONE),
            'w' => Some(Gf4::W),
            'W' => Some(Gf4::W2),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        ['0', '1', 'w', 'W'][self.0 as usize]
    }

    pub fn inv(self) -> Result<Gf4> {
        if self.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(Gf4(EXP[((3 - LOG[self.0 as usize]) % 3) as usize]))
    }

    pub fn square(self) -> Gf4 {
        self * self
    }

    /// `n · self`, i.e. `self` added to itself `n` times. Only the parity of
    /// `n` matters in characteristic 2.
    pub fn times(self, n: i64) -> Gf4 {
        if n.rem_euclid(2) == 1 {
            self
        } else {
            Gf4::ZERO
        }
    }
}

impl Add for Gf4 {
    type Output = Gf4;
    fn add(self, rhs: Gf4) -> Gf4 {
        Gf4(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf4 {
    fn add_assign(&mut self, rhs: Gf4) {
        self.0 ^= rhs.0;
    }
}

impl Sub for Gf4 {
    type Output = Gf4;
    fn sub(self, rhs: Gf4) -> Gf4 {
        self + rhs
    }
}

impl Neg for Gf4 {
    type Output = Gf4;
    fn neg(self) -> Gf4 {
        self
    }
}

impl Mul for Gf4 {
    type Output = Gf4;
    fn mul(self, rhs: Gf4) -> Gf4 {
        if self.0 == 0 || rhs.0 == 0 {
            return Gf4::ZERO;
        }
        Gf4(EXP[((LOG[self.0 as usize] + LOG[rhs.0 as usize]) % 3) as usize])
    }
}

impl MulAssign for Gf4 {
    fn mul_assign(&mut self, rhs: Gf4) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Gf4 {
    fn sum<I: Iterator<Item = Gf4>>(iter: I) -> Gf4 {
        iter.fold(Gf4::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl Serialize for Gf4 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Gf4 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = char::deserialize(d)?;
        Gf4::from_symbol(c).ok_or_else(|| serde::de::Error::custom(format!("bad symbol {c:?}")))
    }
}

fn checked(q: u32, a: Gf4, b: Gf4) -> Result<Field> {
    let field = Field::from_q(q)?;
    for x in [a, b] {
        if !field.contains(x) {
            return Err(Error::InvalidInput(format!("{x} is not an element of {field}")));
        }
    }
    Ok(field)
}

pub fn ff_add(q: u32, a: Gf4, b: Gf4) -> Result<Gf4> {
    checked(q, a, b)?;
    Ok(a + b)
}

pub fn ff_mul(q: u32, a: Gf4, b: Gf4) -> Result<Gf4> {
    checked(q, a, b)?;
    Ok(a * b)
}

pub fn ff_inv(q: u32, a: Gf4) -> Result<Gf4> {
    checked(q, a, Gf4::ZERO)?;
    a.inv()
}
