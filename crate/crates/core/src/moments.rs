//! Exact moments `E_j` of `T / sqrt(n)`, where `T = sum_i chi(f(s_i))` and
//! `f` is uniform among polynomials of degree at most `4k - 1`.
//!
//! Any `4k` of the values `f(s_i)` are jointly uniform, so a mixed moment of
//! the `X_i` vanishes unless every exponent is even, in which case it is
//! `(1 - 1/q)^m` with `m` the number of distinct indices. Expanding
//! `(sum X_i)^j` then gives
//!
//! `E_j = n^{-j/2} * sum_{m=1}^{j/2} (1 - 1/q)^m * C(n, m) * M(j, m)`
//!
//! with `M(j, m)` the multinomial weight of ordered compositions of `j` into
//! `m` positive even parts.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;

use crate::error::{check_budget, Error, Result, ENUMERATION_BUDGET};
use crate::field::FieldSpec;
use crate::numeric::{binomial, to_f64};
use crate::poly::{evaluate, poly_from_index};
use crate::subset::Subset;

/// Exact `E_1..E_{4k}` for one `(n, q, k)`; `n` and `q` are `None` for the
/// Gaussian limit table (`n, q -> infinity`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTable {
    pub n: Option<u64>,
    pub q: Option<u64>,
    pub k: u32,
    pub values: BTreeMap<u32, BigRational>,
}

impl MomentTable {
    pub fn exact(n: u64, q: u64, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::pre("k >= 1 required"));
        }
        let values = (1..=4 * k)
            .map(|j| exact_moment(j, n, q, k).map(|v| (j, v)))
            .collect::<Result<_>>()?;
        Ok(Self {
            n: Some(n),
            q: Some(q),
            k,
            values,
        })
    }

    /// Limit moments: `E_j = (j-1)!!` for even `j`, zero for odd.
    pub fn gaussian_limit(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::pre("k >= 1 required"));
        }
        let values = (1..=4 * k)
            .map(|j| {
                let v = if j % 2 == 1 {
                    BigRational::zero()
                } else {
                    BigRational::from_integer(gaussian_leading(j)?.into())
                };
                Ok((j, v))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            n: None,
            q: None,
            k,
            values,
        })
    }

    /// Builds a table from explicit `E_2k` and `E_4k`. Only those two entries
    /// are present; this is what the tail bounds consume.
    pub fn from_pair(k: u32, e2k: BigRational, e4k: BigRational) -> Result<Self> {
        if k == 0 {
            return Err(Error::pre("k >= 1 required"));
        }
        let values = BTreeMap::from([(2 * k, e2k), (4 * k, e4k)]);
        Ok(Self {
            n: None,
            q: None,
            k,
            values,
        })
    }

    pub fn get(&self, j: u32) -> Option<&BigRational> {
        self.values.get(&j)
    }

    pub fn e2k(&self) -> &BigRational {
        &self.values[&(2 * self.k)]
    }

    pub fn e4k(&self) -> &BigRational {
        &self.values[&(4 * self.k)]
    }
}

/// `M(j, m)`: sum over ordered compositions of `j` into `m` positive even
/// parts `h_1..h_m` of `j! / (h_1! ... h_m!)`.
pub fn composition_weight(j: u32, m: u32) -> Result<BigUint> {
    if j % 2 == 1 {
        return Err(Error::pre(format!("j = {j} must be even")));
    }
    if m < 1 || m > j / 2 {
        return Err(Error::pre(format!("m = {m} outside 1 <= m <= j/2 = {}", j / 2)));
    }
    Ok(composition_weights(j)[m as usize].clone())
}

/// `M(j, m)` for every `m` in `0..=j/2` (entry 0 is zero unless `j = 0`).
///
/// Peels off the first part `h`: `M(r, m) = sum_h C(r, h) M(r - h, m - 1)`,
/// tabulated over even remainders `r` up to `j`.
fn composition_weights(j: u32) -> Vec<BigUint> {
    let half = (j / 2) as usize;
    // table[r/2][m]
    let mut table = vec![vec![BigUint::zero(); half + 1]; half + 1];
    table[0][0] = BigUint::one();
    for r2 in 1..=half {
        for m in 1..=r2 {
            let mut acc = BigUint::zero();
            for h2 in 1..=r2 - (m - 1) {
                let prev = &table[r2 - h2][m - 1];
                if !prev.is_zero() {
                    acc += binomial(2 * r2 as u64, 2 * h2 as u64) * prev;
                }
            }
            table[r2][m] = acc;
        }
    }
    table.swap_remove(half)
}

/// Exact `E_j` for `1 <= j <= 4k`.
pub fn exact_moment(j: u32, n: u64, q: u64, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::pre("k >= 1 required"));
    }
    if j == 0 || j > 4 * k {
        return Err(Error::pre(format!(
            "moment order j = {j} outside 1 <= j <= 4k = {}",
            4 * k
        )));
    }
    if n == 0 {
        return Err(Error::pre("n >= 1 required"));
    }
    if q < 2 {
        return Err(Error::pre(format!("q = {q} must be >= 2")));
    }
    if n > q {
        return Err(Error::pre(format!("n = {n} > q = {q}")));
    }
    if n <= 4 * u64::from(k) {
        log::warn!("n = {n} <= 4k = {}: moment is exact but outside the asymptotic regime", 4 * k);
    }
    if j % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let weights = composition_weights(j);
    let survive = BigRational::new(BigInt::from(q - 1), BigInt::from(q));
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    for m in 1..=j / 2 {
        power *= &survive;
        let count = binomial(n, u64::from(m)) * &weights[m as usize];
        if count.is_zero() {
            continue;
        }
        sum += &power * BigRational::from_integer(count.into());
    }
    let scale = BigInt::from(n).pow(j / 2);
    Ok(sum / BigRational::from_integer(scale))
}

/// `j! / (2^{j/2} (j/2)!)`, i.e. `(j-1)!!`.
pub fn gaussian_leading(j: u32) -> Result<BigUint> {
    if j == 0 || j % 2 == 1 {
        return Err(Error::pre(format!("j = {j} must be even and >= 2")));
    }
    Ok((1..j).step_by(2).fold(BigUint::one(), |acc, i| acc * i))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticConstants {
    /// `sqrt(2k / e)`: lower bound on `E_2k^{1/2k}` as `n -> infinity`.
    pub root_bound: f64,
    /// `(sqrt(2 pi)/e)^3 * 2^{1/2 - 2k}`: lower bound on `E_2k^2 / E_4k`.
    pub ratio_bound: f64,
}

pub fn asymptotic_constants(k: u32) -> Result<AsymptoticConstants> {
    if k == 0 {
        return Err(Error::pre("k >= 1 required"));
    }
    let e = std::f64::consts::E;
    let kf = f64::from(k);
    let root_bound = (2.0 * kf / e).sqrt();
    let ratio_bound =
        ((2.0 * std::f64::consts::PI).sqrt() / e).powi(3) * 2f64.powf(0.5 - 2.0 * kf);
    Ok(AsymptoticConstants {
        root_bound,
        ratio_bound,
    })
}

/// Counts of `T = sum_{s in S} chi(f(s))` over every polynomial of degree at
/// most `4k - 1`; entry `t + n` holds the count for `T = t`.
pub fn exhaustive_t_histogram(spec: &FieldSpec, k: u32, subset: &Subset) -> Result<Vec<u64>> {
    exhaustive_histogram_filtered(spec, k, subset, |_| true)
}

pub(crate) fn exhaustive_histogram_filtered(
    spec: &FieldSpec,
    k: u32,
    subset: &Subset,
    keep: impl Fn(&crate::poly::Polynomial) -> bool + Sync,
) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::pre("k >= 1 required"));
    }
    let q = spec.order();
    let len = 4 * k as usize;
    let total = u128::from(q)
        .checked_pow(len as u32)
        .unwrap_or(u128::MAX);
    check_budget("exhaustive polynomial enumeration", total, ENUMERATION_BUDGET)?;
    let n = subset.len();
    let width = 2 * n + 1;
    const CHUNK: u64 = 4096;
    let chunks = (total as u64).div_ceil(CHUNK);
    let hist = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut h = vec![0u64; width];
            let end = ((c + 1) * CHUNK).min(total as u64);
            for i in c * CHUNK..end {
                let f = poly_from_index(spec, i, len);
                if !keep(&f) {
                    continue;
                }
                let t: i64 = subset
                    .elements()
                    .iter()
                    .map(|&s| i64::from(spec.character(evaluate(spec, &f, s)).value()))
                    .sum();
                h[(t + n as i64) as usize] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

/// Enumeration oracle: the exact average of `(T / sqrt(n))^j` over all
/// `q^{4k}` polynomials, for `j` in `1..=j_max`.
///
/// Odd-order averages are only rational when the power sum vanishes, which
/// the sign symmetry `f -> c f` (with `chi(c) = -1`) guarantees; a nonzero
/// odd power sum is reported as an invariant breach.
pub fn brute_force_moments(
    spec: &FieldSpec,
    k: u32,
    subset: &Subset,
    j_max: u32,
) -> Result<BTreeMap<u32, BigRational>> {
    if j_max > 4 * k {
        return Err(Error::pre(format!("j_max = {j_max} > 4k = {}", 4 * k)));
    }
    if subset.is_empty() {
        return Err(Error::pre("subset must be nonempty"));
    }
    let hist = exhaustive_t_histogram(spec, k, subset)?;
    let n = subset.len() as i64;
    let total: u64 = hist.iter().sum();
    let mut out = BTreeMap::new();
    for j in 1..=j_max {
        let mut power_sum = BigInt::zero();
        for (slot, &count) in hist.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let t = BigInt::from(slot as i64 - n);
            power_sum += t.pow(j) * BigInt::from(count);
        }
        let value = if j % 2 == 1 {
            if !power_sum.is_zero() {
                return Err(Error::Invariant(format!(
                    "odd power sum of order {j} is {power_sum}, expected 0"
                )));
            }
            BigRational::zero()
        } else {
            BigRational::new(power_sum, BigInt::from(total) * BigInt::from(n).pow(j / 2))
        };
        out.insert(j, value);
    }
    Ok(out)
}

/// `E_2k^{1/2k}` and `E_2k^2 / E_4k` of a table, as floats.
pub fn table_statistics(table: &MomentTable) -> (f64, f64) {
    let e2k = table.e2k();
    let root = to_f64(e2k).powf(1.0 / (2.0 * f64::from(table.k)));
    let ratio = to_f64(&(e2k * e2k / table.e4k()));
    (root, ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    #[test]
    fn composition_weight_values() {
        assert_eq!(composition_weight(6, 3).unwrap(), BigUint::from(90u32));
        assert_eq!(composition_weight(6, 2).unwrap(), BigUint::from(30u32));
        assert_eq!(composition_weight(8, 4).unwrap(), BigUint::from(2520u32));
        for j in (2..=20).step_by(2) {
            assert_eq!(composition_weight(j, 1).unwrap(), BigUint::one());
        }
        assert!(composition_weight(5, 1).is_err());
        assert!(composition_weight(6, 4).is_err());
        assert!(composition_weight(6, 0).is_err());
    }

    #[test]
    fn full_composition_count_matches_factorial_over_powers() {
        // M(j, j/2) = j! / 2^{j/2}
        for j in (2..=24u32).step_by(2) {
            let fact: BigUint = (1..=j).fold(BigUint::one(), |a, i| a * i);
            let expect = fact / BigUint::from(2u32).pow(j / 2);
            assert_eq!(composition_weight(j, j / 2).unwrap(), expect);
        }
    }

    #[test]
    fn low_order_moments() {
        assert_eq!(exact_moment(2, 5, 5, 1).unwrap(), ratio(4, 5));
        assert_eq!(exact_moment(2, 1000, 1009, 3).unwrap(), ratio(1008, 1009));
        assert!(exact_moment(3, 10, 11, 1).unwrap().is_zero());
        assert_eq!(exact_moment(4, 3, 3, 1).unwrap(), ratio(10, 9));
    }

    #[test]
    fn moment_order_limits() {
        assert!(exact_moment(5, 10, 11, 1).is_err());
        assert!(exact_moment(0, 10, 11, 1).is_err());
        assert!(exact_moment(2, 12, 11, 1).is_err());
        // n <= 4k is allowed.
        assert!(exact_moment(2, 3, 11, 1).is_ok());
    }

    #[test]
    fn gaussian_leading_values() {
        assert_eq!(gaussian_leading(2).unwrap(), BigUint::from(1u32));
        assert_eq!(gaussian_leading(6).unwrap(), BigUint::from(15u32));
        assert_eq!(gaussian_leading(8).unwrap(), BigUint::from(105u32));
        assert!(gaussian_leading(7).is_err());
    }

    #[test]
    fn asymptotic_constant_values() {
        let c1 = asymptotic_constants(1).unwrap();
        assert!((c1.root_bound - 0.857763).abs() < 1e-6);
        assert!((c1.ratio_bound - 0.277230).abs() < 1e-6);
        let c2 = asymptotic_constants(2).unwrap();
        assert!((c2.ratio_bound - 0.069307).abs() < 1e-6);
        for k in 1..=6 {
            let c = asymptotic_constants(k).unwrap();
            let alt = 4.0 * std::f64::consts::PI.powf(1.5) * (-3f64).exp() * 2f64.powi(-2 * k as i32);
            assert!((c.ratio_bound - alt).abs() <= 1e-12 * alt);
        }
    }

    #[test]
    fn limit_table_entries() {
        let t = MomentTable::gaussian_limit(1).unwrap();
        assert_eq!(t.e2k(), &ratio(1, 1));
        assert_eq!(t.e4k(), &ratio(3, 1));
        assert!(t.get(3).unwrap().is_zero());
    }

    #[test]
    fn oracle_small_case() {
        let f = FieldSpec::new(3, 1).unwrap();
        let s = Subset::full_field(&f);
        let bf = brute_force_moments(&f, 1, &s, 4).unwrap();
        assert_eq!(bf[&2], ratio(2, 3));
        assert!(bf[&1].is_zero());
        for j in 1..=4 {
            assert_eq!(bf[&j], exact_moment(j, 3, 3, 1).unwrap());
        }
        assert!(brute_force_moments(&f, 1, &s, 5).is_err());
    }
}
