//! Univariate polynomials over `F_q` and the census of polynomials that
//! define hyperelliptic curves of degree `4k - 1`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Pow;
use rayon::prelude::*;

use crate::error::{check_budget, Error, Result, ENUMERATION_BUDGET};
use crate::field::{FieldElement, FieldSpec};
use crate::numeric::ratio;

/// Coefficient vector, `coeffs[j]` holding the coefficient of `x^j`. The
/// highest stored coefficient is nonzero; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Convenience constructor from integers, lowest degree first; values
    /// are reduced into the prime subfield.
    pub fn from_ints(spec: &FieldSpec, coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| spec.from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> FieldElement {
        self.coeffs.get(j).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }
}

/// Horner evaluation of `f` at `x`.
#[inline]
pub fn evaluate(spec: &FieldSpec, f: &Polynomial, x: FieldElement) -> FieldElement {
    f.coeffs
        .iter()
        .rev()
        .fold(FieldElement::ZERO, |acc, &c| spec.add(spec.mul(acc, x), c))
}

pub fn derivative(spec: &FieldSpec, f: &Polynomial) -> Polynomial {
    Polynomial::new(
        f.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| spec.mul(spec.from_int(j as i64), c))
            .collect(),
    )
}

fn make_monic(spec: &FieldSpec, f: Polynomial) -> Polynomial {
    if f.is_zero() {
        return f;
    }
    let inv = spec
        .inv(f.leading())
        .expect("leading coefficient of a nonzero polynomial is nonzero");
    Polynomial::new(f.coeffs.iter().map(|&c| spec.mul(c, inv)).collect())
}

/// Remainder of `a` modulo nonzero `b`.
pub fn rem(spec: &FieldSpec, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    let db = b
        .degree()
        .ok_or_else(|| Error::pre("polynomial division by zero"))?;
    let lead_inv = spec.inv(b.leading())?;
    let mut r = a.coeffs.clone();
    while r.len() > db {
        let top = *r.last().unwrap();
        if top.is_zero() {
            r.pop();
            continue;
        }
        let factor = spec.mul(top, lead_inv);
        let shift = r.len() - 1 - db;
        for (j, &bc) in b.coeffs.iter().enumerate() {
            r[shift + j] = spec.sub(r[shift + j], spec.mul(factor, bc));
        }
        r.pop();
    }
    Ok(Polynomial::new(r))
}

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn poly_gcd(spec: &FieldSpec, a: &Polynomial, b: &Polynomial) -> Polynomial {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = rem(spec, &x, &y).expect("divisor is nonzero");
        x = y;
        y = r;
    }
    make_monic(spec, x)
}

/// Whether `f` has distinct roots in the algebraic closure, i.e. whether
/// `gcd(f, f')` is a nonzero constant. A nonconstant `f` with `f' = 0` is a
/// `p`-th power and is reported as not squarefree.
pub fn is_squarefree(spec: &FieldSpec, f: &Polynomial) -> Result<bool> {
    let deg = f
        .degree()
        .ok_or_else(|| Error::pre("squarefree test of the zero polynomial"))?;
    if deg == 0 {
        return Ok(true);
    }
    let df = derivative(spec, f);
    if df.is_zero() {
        return Ok(false);
    }
    Ok(poly_gcd(spec, f, &df).degree() == Some(0))
}

/// `deg f = 4k - 1` and `f` is squarefree.
pub fn is_hyperelliptic(spec: &FieldSpec, f: &Polynomial, k: u32) -> bool {
    k >= 1
        && f.degree() == Some(4 * k as usize - 1)
        && is_squarefree(spec, f).unwrap_or(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusMode {
    ClosedForm,
    Enumerate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusReport {
    pub q: u64,
    pub k: u32,
    pub total_count: BigUint,
    pub valid_count: BigUint,
    pub failing_fraction: BigRational,
    /// `failing_fraction = c_qk / q`.
    pub c_qk: BigRational,
}

impl CensusReport {
    pub fn failing_count(&self) -> BigUint {
        &self.total_count - &self.valid_count
    }

    fn from_counts(q: u64, k: u32, total: BigUint, valid: BigUint) -> Self {
        let failing = BigRational::new((&total - &valid).into(), total.clone().into());
        let c_qk = &failing * BigRational::from_integer(q.into());
        Self {
            q,
            k,
            total_count: total,
            valid_count: valid,
            failing_fraction: failing,
            c_qk,
        }
    }
}

/// Exact closed form of `c_{q,k} = 2 - 1/q`.
pub fn census_constant(q: u64) -> BigRational {
    ratio(2 * q as i64 - 1, q as i64)
}

/// Counts the polynomials of degree at most `4k - 1` that define a
/// hyperelliptic curve of degree exactly `4k - 1`.
pub fn hyperelliptic_census(spec: &FieldSpec, k: u32, mode: CensusMode) -> Result<CensusReport> {
    if k == 0 {
        return Err(Error::pre("k >= 1 required"));
    }
    let q = spec.order();
    let len = 4 * k;
    let total: BigUint = BigUint::from(q).pow(len);
    let valid = match mode {
        CensusMode::ClosedForm => {
            let qb = BigUint::from(q);
            // (q - 1) leading coefficients times q^d - q^(d-1) monic squarefree polynomials
            (&qb - 1u32) * (qb.clone().pow(len - 1) - qb.pow(len - 2))
        }
        CensusMode::Enumerate => {
            let count = enumeration_count(q, len as usize)?;
            check_budget("hyperelliptic census", count, ENUMERATION_BUDGET)?;
            let valid = (0..count as u64)
                .into_par_iter()
                .filter(|&i| is_hyperelliptic(spec, &poly_from_index(spec, i, len as usize), k))
                .count();
            BigUint::from(valid)
        }
    };
    Ok(CensusReport::from_counts(q, k, total, valid))
}

fn enumeration_count(q: u64, len: usize) -> Result<u128> {
    u128::from(q)
        .checked_pow(len as u32)
        .ok_or(Error::Budget {
            what: "polynomial enumeration",
            needed: u128::MAX,
            limit: ENUMERATION_BUDGET,
        })
}

/// The `index`-th coefficient vector of length `len` in lexicographic order
/// of `(a_0, ..., a_{len-1})`.
pub fn poly_from_index(spec: &FieldSpec, mut index: u64, len: usize) -> Polynomial {
    let q = spec.order();
    let mut coeffs = vec![FieldElement::ZERO; len];
    for slot in coeffs.iter_mut().rev() {
        *slot = FieldElement::from_index_unchecked(index % q);
        index /= q;
    }
    Polynomial::new(coeffs)
}

/// Iterator over every polynomial of degree at most `max_deg`.
pub struct PolyEnumeration<'a> {
    spec: &'a FieldSpec,
    len: usize,
    next: u64,
    end: u64,
}

impl Iterator for PolyEnumeration<'_> {
    type Item = Polynomial;

    fn next(&mut self) -> Option<Polynomial> {
        if self.next >= self.end {
            return None;
        }
        let f = poly_from_index(self.spec, self.next, self.len);
        self.next += 1;
        Some(f)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for PolyEnumeration<'_> {}

/// Streams all `q^(max_deg+1)` coefficient vectors. Without `allow_large`
/// the count must not exceed the enumeration budget.
pub fn enumerate_polys(
    spec: &FieldSpec,
    max_deg: usize,
    allow_large: bool,
) -> Result<PolyEnumeration<'_>> {
    let count = enumeration_count(spec.order(), max_deg + 1)?;
    if !allow_large {
        check_budget("polynomial enumeration", count, ENUMERATION_BUDGET)?;
    }
    let end = u64::try_from(count).map_err(|_| Error::Budget {
        what: "polynomial enumeration",
        needed: count,
        limit: u128::from(u64::MAX),
    })?;
    Ok(PolyEnumeration {
        spec,
        len: max_deg + 1,
        next: 0,
        end,
    })
}
