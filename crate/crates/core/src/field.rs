//! Arithmetic in odd finite fields and the quadratic character.
//!
//! Prime fields use plain modular arithmetic on canonical residues. Small
//! extension fields `F_{p^m}` (order at most 2^20) are realized with
//! discrete-logarithm and Zech tables over a primitive modulus. An element of
//! an extension field is encoded by its polynomial-basis coordinates read as
//! base-`p` digits, `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`, so the prime
//! subfield occupies indices `0..p` in both modes.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest order supported in log-table mode.
pub const MAX_TABLE_ORDER: u64 = 1 << 20;
/// Prime fields below this order get a precomputed residue bitset.
pub const RESIDUE_BITSET_LIMIT: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub(crate) fn from_index_unchecked(index: u64) -> Self {
        FieldElement(index)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Value of the quadratic character: -1, 0 or +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CharValue(i8);

impl CharValue {
    pub const ZERO: CharValue = CharValue(0);
    pub const RESIDUE: CharValue = CharValue(1);
    pub const NON_RESIDUE: CharValue = CharValue(-1);

    #[inline]
    pub fn value(self) -> i8 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    PrimeModular,
    LogTable,
}

#[derive(Debug)]
struct LogTables {
    /// Monic modulus, lowest coefficient first, length `m + 1`.
    modulus: Vec<u64>,
    /// `exp[i]` is the index of `g^i`, for `i` in `0..q-1`.
    exp: Vec<u32>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
    /// `zech[i] = log(1 + g^i)`, or `NO_LOG` when `1 + g^i = 0`.
    zech: Vec<u32>,
}

const NO_LOG: u32 = u32::MAX;

#[derive(Debug)]
pub struct FieldSpec {
    p: u64,
    m: u32,
    q: u64,
    tables: Option<LogTables>,
    residues: OnceLock<Vec<u64>>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits a prime power into `(p, m)`; `None` if `q` is not one.
pub fn prime_power_decomposition(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut m = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

impl FieldSpec {
    /// Builds `F_{p^m}`.
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if p.is_multiple_of(2) {
            return Err(Error::pre(format!("characteristic {p} is even; p must be an odd prime")));
        }
        if !is_prime(p) {
            return Err(Error::pre(format!("{p} is not prime")));
        }
        if p >= 1 << 32 {
            return Err(Error::pre(format!("p = {p} must be < 2^32")));
        }
        if m == 0 {
            return Err(Error::pre("extension degree m must be >= 1"));
        }
        if m == 1 {
            return Ok(Self {
                p,
                m,
                q: p,
                tables: None,
                residues: OnceLock::new(),
            });
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= MAX_TABLE_ORDER)
            .ok_or_else(|| Error::pre(format!("p^m = {p}^{m} exceeds 2^20")))?;
        let tables = build_log_tables(p, m, q)?;
        Ok(Self {
            p,
            m,
            q,
            tables: Some(tables),
            residues: OnceLock::new(),
        })
    }

    /// Builds the field of order `q`, which must be an odd prime power.
    pub fn with_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power_decomposition(q)
            .ok_or_else(|| Error::pre(format!("q = {q} is not a prime power")))?;
        Self::new(p, m)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn representation(&self) -> Representation {
        if self.tables.is_some() {
            Representation::LogTable
        } else {
            Representation::PrimeModular
        }
    }

    pub fn is_prime_field(&self) -> bool {
        self.tables.is_none()
    }

    /// Index of the fixed multiplicative generator in log-table mode (the
    /// class of `x`).
    pub fn generator_index(&self) -> Option<u64> {
        self.tables.as_ref().map(|_| self.p)
    }

    /// Modulus of the extension, lowest coefficient first.
    pub fn modulus(&self) -> Option<&[u64]> {
        self.tables.as_ref().map(|t| t.modulus.as_slice())
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.q {
            return Err(Error::pre(format!("element index {index} >= q = {}", self.q)));
        }
        Ok(FieldElement(index))
    }

    /// Image of an integer in the prime subfield.
    #[inline]
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            None => {
                let s = a.0 + b.0;
                FieldElement(if s >= self.p { s - self.p } else { s })
            }
            Some(t) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let order = self.q - 1;
                let la = u64::from(t.log[a.0 as usize]);
                let lb = u64::from(t.log[b.0 as usize]);
                let z = t.zech[((lb + order - la) % order) as usize];
                if z == NO_LOG {
                    FieldElement::ZERO
                } else {
                    FieldElement(u64::from(t.exp[((la + u64::from(z)) % order) as usize]))
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            return a;
        }
        match &self.tables {
            None => FieldElement(self.p - a.0),
            Some(t) => {
                let order = self.q - 1;
                let la = u64::from(t.log[a.0 as usize]);
                FieldElement(u64::from(t.exp[((la + order / 2) % order) as usize]))
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            None => FieldElement(a.0 * b.0 % self.p),
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    return FieldElement::ZERO;
                }
                let order = self.q - 1;
                let s = u64::from(t.log[a.0 as usize]) + u64::from(t.log[b.0 as usize]);
                FieldElement(u64::from(t.exp[(s % order) as usize]))
            }
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        match &self.tables {
            None => Ok(self.pow(a, self.p - 2)),
            Some(t) => {
                let order = self.q - 1;
                let la = u64::from(t.log[a.0 as usize]);
                Ok(FieldElement(u64::from(t.exp[((order - la) % order) as usize])))
            }
        }
    }

    /// Square-and-multiply exponentiation; `pow(0, 0) = 1`.
    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Quadratic character of `a`, using the fastest available route.
    #[inline]
    pub fn character(&self, a: FieldElement) -> CharValue {
        if a.0 == 0 {
            return CharValue::ZERO;
        }
        match &self.tables {
            Some(t) => {
                if t.log[a.0 as usize] & 1 == 0 {
                    CharValue::RESIDUE
                } else {
                    CharValue::NON_RESIDUE
                }
            }
            None if self.q < RESIDUE_BITSET_LIMIT => {
                let bits = self.residue_bitset();
                if bits[(a.0 >> 6) as usize] >> (a.0 & 63) & 1 == 1 {
                    CharValue::RESIDUE
                } else {
                    CharValue::NON_RESIDUE
                }
            }
            None => self.character_euler(a),
        }
    }

    /// Euler's criterion `a^((q-1)/2)`, valid in both representations.
    pub fn character_euler(&self, a: FieldElement) -> CharValue {
        if a.0 == 0 {
            return CharValue::ZERO;
        }
        if self.pow(a, (self.q - 1) / 2) == FieldElement::ONE {
            CharValue::RESIDUE
        } else {
            CharValue::NON_RESIDUE
        }
    }

    /// Bitset of nonzero squares (prime mode only), built on first use.
    fn residue_bitset(&self) -> &[u64] {
        self.residues.get_or_init(|| {
            let p = self.p;
            let mut bits = vec![0u64; (p as usize >> 6) + 1];
            for x in 1..=(p - 1) / 2 {
                let s = x * x % p;
                bits[(s >> 6) as usize] |= 1 << (s & 63);
            }
            bits
        })
    }

    /// Character values of every element, indexed by element index. Used by
    /// the enumeration kernels.
    pub fn character_table(&self) -> Vec<i8> {
        self.elements().map(|a| self.character(a).value()).collect()
    }
}

/// Digits of `index` in base `p`, lowest first, padded to `m` digits.
fn digits(mut index: u64, p: u64, m: u32) -> Vec<u64> {
    (0..m)
        .map(|_| {
            let d = index % p;
            index /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u64], p: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two residues modulo the monic `modulus` (coefficients lowest
/// first, length `m` for operands).
fn mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let m = a.len();
    let mut prod = vec![0u64; 2 * m - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (m..prod.len()).rev() {
        let top = prod[d];
        if top == 0 {
            continue;
        }
        for j in 0..m {
            prod[d - m + j] = (prod[d - m + j] + (p - modulus[j]) * top) % p;
        }
        prod[d] = 0;
    }
    prod.truncate(m);
    prod
}

fn powmod_x(mut e: u64, modulus: &[u64], p: u64, m: usize) -> Vec<u64> {
    let mut base = vec![0u64; m];
    base[1 % m] = 1;
    let mut acc = vec![0u64; m];
    acc[0] = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &base, modulus, p);
        }
        base = mulmod(&base, &base, modulus, p);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
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

/// Whether `x` has multiplicative order exactly `q - 1` modulo `modulus`.
/// Such a modulus is irreducible: the `q - 1` distinct powers of `x` are
/// units, so every nonzero residue is invertible.
fn x_is_primitive(p: u64, m: u32, q: u64, modulus: &[u64]) -> bool {
    let m = m as usize;
    let mut one = vec![0u64; m];
    one[0] = 1;
    if powmod_x(q - 1, modulus, p, m) != one {
        return false;
    }
    prime_factors(q - 1)
        .into_iter()
        .all(|r| powmod_x((q - 1) / r, modulus, p, m) != one)
}

/// Exponent table of `x` modulo a primitive `modulus`.
fn orbit(p: u64, m: u32, q: u64, modulus: &[u64]) -> Vec<u32> {
    let m = m as usize;
    let mut exp = Vec::with_capacity((q - 1) as usize);
    let mut cur = vec![0u64; m];
    cur[0] = 1;
    for _ in 0..q - 1 {
        exp.push(undigits(&cur, p) as u32);
        // cur <- cur * x
        let top = cur[m - 1];
        for j in (1..m).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for j in 0..m {
                cur[j] = (cur[j] + (p - modulus[j]) * top) % p;
            }
        }
    }
    exp
}

fn build_log_tables(p: u64, m: u32, q: u64) -> Result<LogTables> {
    // Candidates x^m + c_{m-1} x^{m-1} + ... + c_0 in lexicographic order of
    // (c_0, c_1, ..., c_{m-1}).
    let span = p.pow(m);
    for code in 0..span {
        let mut lower: Vec<u64> = digits(code, p, m);
        lower.reverse();
        if lower[0] == 0 || !x_is_primitive(p, m, q, &lower) {
            continue;
        }
        let exp = orbit(p, m, q, &lower);
        let mut log = vec![0u32; q as usize];
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u32;
        }
        let zech = exp
            .iter()
            .map(|&e| {
                let mut ds = digits(u64::from(e), p, m);
                ds[0] = (ds[0] + 1) % p;
                let s = undigits(&ds, p);
                if s == 0 {
                    NO_LOG
                } else {
                    log[s as usize]
                }
            })
            .collect();
        let mut modulus = lower;
        modulus.push(1);
        return Ok(LogTables {
            modulus,
            exp,
            log,
            zech,
        });
    }
    Err(Error::Invariant(format!(
        "no primitive degree-{m} modulus over F_{p}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(i: u64) -> FieldElement {
        FieldElement(i)
    }

    #[test]
    fn prime_field_of_order_seven() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f.order(), 7);
        assert_eq!(f.representation(), Representation::PrimeModular);
        assert_eq!(f.mul(el(3), el(5)), el(1));
        assert_eq!(f.inv(el(3)).unwrap(), el(5));
        assert_eq!(f.pow(el(3), 3), el(6));
        assert!(matches!(f.inv(el(0)), Err(Error::ZeroInverse)));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(FieldSpec::new(2, 3), Err(Error::Precondition(_))));
        assert!(matches!(FieldSpec::new(9, 1), Err(Error::Precondition(_))));
        assert!(matches!(FieldSpec::new(3, 13), Err(Error::Precondition(_))));
        assert!(FieldSpec::new(3, 12).is_ok()); // 531441 <= 2^20
        assert!(FieldSpec::with_order(4).is_err());
        assert!(FieldSpec::with_order(15).is_err());
        assert_eq!(FieldSpec::with_order(9).unwrap().degree(), 2);
    }

    #[test]
    fn order_nine_generator_orbit() {
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.representation(), Representation::LogTable);
        // x^2 + x + 2 is the first primitive candidate in (c0, c1) order.
        assert_eq!(f.modulus().unwrap(), &[2, 1, 1]);
        let g = el(f.generator_index().unwrap());
        let mut seen = std::collections::BTreeSet::new();
        let mut cur = FieldElement::ONE;
        for _ in 0..8 {
            seen.insert(cur);
            cur = f.mul(cur, g);
        }
        assert_eq!(cur, FieldElement::ONE);
        assert_eq!(seen.len(), 8);
        assert!(!seen.contains(&FieldElement::ZERO));
    }

    #[test]
    fn characters_in_small_fields() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f7.character(el(3)), CharValue::NON_RESIDUE);
        assert_eq!(f7.character(el(2)), CharValue::RESIDUE);
        assert_eq!(f7.character(el(0)), CharValue::ZERO);
        let f9 = FieldSpec::new(3, 2).unwrap();
        let minus_one = f9.neg(FieldElement::ONE);
        assert_eq!(f9.character(minus_one), CharValue::RESIDUE);
        let squares: std::collections::BTreeSet<_> =
            f9.elements().map(|b| f9.mul(b, b)).collect();
        assert!(squares.contains(&minus_one));
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power_decomposition(81), Some((3, 4)));
        assert_eq!(prime_power_decomposition(10007), Some((10007, 1)));
        assert_eq!(prime_power_decomposition(12), None);
        assert_eq!(prime_power_decomposition(1), None);
    }

    #[test]
    fn large_prime_uses_euler() {
        let f = FieldSpec::new(2_147_483_647, 1).unwrap();
        // -1 is a non-residue since p = 3 mod 4.
        let minus_one = f.neg(FieldElement::ONE);
        assert_eq!(f.character(minus_one), CharValue::NON_RESIDUE);
        assert_eq!(f.character(el(4)), CharValue::RESIDUE);
    }
}
