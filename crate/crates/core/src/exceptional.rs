//! Subsets with exceptionally large discrepancy against monic separable
//! cubics over a prime field.
//!
//! The bipartite graph joins a size-`n` subset `S` to a cubic `f` when
//! `|sum_{s in S} chi(f(s))| >= n - 2m`. Cubic-side degrees are computed
//! combinatorially from the residue census `(#Q, #N, z)` of `f`; subset-side
//! degrees scan every cubic `x^3 + a x^2 + b x + c` with `c` innermost, so
//! that `f(s) = g_{a,b}(s) + c` is a table shift.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_budget, Error, Result};
use crate::field::FieldSpec;
use crate::numeric::{binomial, decimal_rational, to_f64, wilson_interval, WILSON_Z_99};
use crate::poly::{is_squarefree, Polynomial};
use crate::rng::RngSpec;
use crate::subset::Subset;

/// Limit on `p^3` for anything that visits every cubic.
pub const CUBIC_BUDGET: u128 = 1_000_000_000;
/// Limit on `p^4` for per-sample work in the subset-degree estimators.
pub const SAMPLE_WORK_BUDGET: u128 = 10_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CubicProfile {
    pub p: u64,
    /// Coefficients of `x^3 + a x^2 + b x + c`.
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub n_q: u64,
    pub n_n: u64,
    pub z: u64,
}

impl CubicProfile {
    /// `max(#Q, #N) - p/2`.
    pub fn a_f(&self) -> f64 {
        self.n_q.max(self.n_n) as f64 - self.p as f64 / 2.0
    }

    pub fn char_sum(&self) -> i64 {
        self.n_q as i64 - self.n_n as i64
    }

    fn larger(&self) -> u64 {
        self.n_q.max(self.n_n)
    }

    pub fn polynomial(&self, spec: &FieldSpec) -> Polynomial {
        Polynomial::from_ints(spec, &[self.c as i64, self.b as i64, self.a as i64, 1])
    }
}

/// Validated `(p, n, m)` with `n - 2m > sqrt(n)` and `n <= p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphParams {
    pub p: u64,
    pub n: u64,
    pub m: u64,
}

impl GraphParams {
    pub fn new(p: u64, n: u64, m: u64) -> Result<Self> {
        check_degree_params(p, n, m)?;
        let gap = n - 2 * m;
        if gap * gap <= n {
            return Err(Error::pre(format!("n - 2m > sqrt(n) fails for n = {n}, m = {m}")));
        }
        Ok(Self { p, n, m })
    }
}

fn check_degree_params(p: u64, n: u64, m: u64) -> Result<()> {
    if n > p {
        return Err(Error::pre(format!("n = {n} > p = {p}")));
    }
    if 2 * m > n {
        return Err(Error::pre(format!("2m > n for n = {n}, m = {m}")));
    }
    Ok(())
}

fn require_prime_field(spec: &FieldSpec) -> Result<u64> {
    if !spec.is_prime_field() {
        return Err(Error::pre(format!(
            "cubic family is defined over prime fields; q = {} is not prime",
            spec.order()
        )));
    }
    Ok(spec.characteristic())
}

fn cubic_budget(p: u64) -> Result<()> {
    check_budget("cubic enumeration", u128::from(p).pow(3), CUBIC_BUDGET)
}

/// Discriminant of `x^3 + a x^2 + b x + c` modulo `p`, for `p < 2^20`
/// (guaranteed by the cubic budget) so every product fits in a `u64`.
#[inline]
fn discriminant(p: u64, a: u64, b: u64, c: u64) -> u64 {
    debug_assert!(p < 1 << 20);
    let (a2, b2) = (a * a % p, b * b % p);
    let pos = (18 * (a * b % p) % p * c + a2 * b2) % p;
    let neg = (4 * (a2 * a % p) % p * c + 4 * (b2 * b % p) + 27 * (c * c % p)) % p;
    (pos + p - neg) % p
}

/// Character table indexed by `0..2p`, so that `chi(u + c)` for `u, c < p`
/// needs no reduction.
fn doubled_character_table(spec: &FieldSpec) -> Vec<i8> {
    let chi = spec.character_table();
    chi.iter().chain(chi.iter()).copied().collect()
}

/// Every monic squarefree cubic, in lexicographic order of `(a, b, c)`.
pub fn enumerate_cubics(spec: &FieldSpec) -> Result<impl Iterator<Item = Polynomial> + '_> {
    let p = require_prime_field(spec)?;
    cubic_budget(p)?;
    Ok((0..p * p * p).filter_map(move |i| {
        let (a, b, c) = (i / (p * p), i / p % p, i % p);
        let f = Polynomial::from_ints(spec, &[c as i64, b as i64, a as i64, 1]);
        is_squarefree(spec, &f).ok()?.then_some(f)
    }))
}

fn monic_cubic_coeffs(spec: &FieldSpec, f: &Polynomial) -> Result<(u64, u64, u64)> {
    if f.degree() != Some(3) || f.leading().index() != 1 {
        return Err(Error::pre("expected a monic cubic"));
    }
    if !is_squarefree(spec, f)? {
        return Err(Error::pre("cubic is not separable"));
    }
    Ok((f.coeff(2).index(), f.coeff(1).index(), f.coeff(0).index()))
}

pub fn cubic_profile(spec: &FieldSpec, f: &Polynomial) -> Result<CubicProfile> {
    let p = require_prime_field(spec)?;
    let (a, b, c) = monic_cubic_coeffs(spec, f)?;
    let mut profile = CubicProfile {
        p,
        a,
        b,
        c,
        n_q: 0,
        n_n: 0,
        z: 0,
    };
    for x in spec.elements() {
        match spec.character(crate::poly::evaluate(spec, f, x)).value() {
            1 => profile.n_q += 1,
            -1 => profile.n_n += 1,
            _ => profile.z += 1,
        }
    }
    Ok(profile)
}

/// Profiles of all `p^3 - p^2` monic separable cubics, in `(a, b, c)` order.
pub fn all_cubic_profiles(spec: &FieldSpec) -> Result<Vec<CubicProfile>> {
    let p = require_prime_field(spec)?;
    cubic_budget(p)?;
    let chi2 = doubled_character_table(spec);
    let cube: Vec<u64> = (0..p).map(|x| x * x % p * x % p).collect();
    let square: Vec<u64> = (0..p).map(|x| x * x % p).collect();
    let per_a: Vec<Vec<CubicProfile>> = (0..p)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::with_capacity((p * p) as usize);
            let mut g = vec![0usize; p as usize];
            let mut counts = vec![[0u64; 3]; p as usize];
            for b in 0..p {
                for x in 0..p as usize {
                    g[x] = ((cube[x] + a * square[x] + b * x as u64) % p) as usize;
                }
                counts.iter_mut().for_each(|c| *c = [0; 3]);
                for &gx in &g {
                    for (c, slot) in counts.iter_mut().enumerate() {
                        slot[(chi2[gx + c] + 1) as usize] += 1;
                    }
                }
                for (c, slot) in counts.iter().enumerate() {
                    let c = c as u64;
                    if discriminant(p, a, b, c) == 0 {
                        continue;
                    }
                    out.push(CubicProfile {
                        p,
                        a,
                        b,
                        c,
                        n_q: slot[2],
                        n_n: slot[0],
                        z: slot[1],
                    });
                }
            }
            out
        })
        .collect();
    Ok(per_a.into_iter().flatten().collect())
}

/// `sum_{x in F_q} chi(f(x))`.
pub fn character_sum(spec: &FieldSpec, f: &Polynomial) -> i64 {
    spec.elements()
        .map(|x| i64::from(spec.character(crate::poly::evaluate(spec, f, x)).value()))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditScope {
    All,
    Sample { trials: u64, rng: RngSpec },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HasseReport {
    pub p: u64,
    pub audited: u64,
    pub violations: u64,
    pub max_abs_char_sum: u64,
    /// `max |sum chi(f(x))| / (2 sqrt(p))`.
    pub max_normalized: f64,
    pub max_a_f: f64,
}

/// Random monic separable cubic from stream `i`, by rejection.
pub fn sample_cubic(spec: &FieldSpec, rng: &RngSpec, i: u64) -> Result<CubicProfile> {
    let p = require_prime_field(spec)?;
    let mut stream = rng.stream(i);
    for _ in 0..crate::sampler::CURVE_ATTEMPT_CAP {
        let (a, b, c) = (stream.below(p), stream.below(p), stream.below(p));
        let f = Polynomial::from_ints(spec, &[c as i64, b as i64, a as i64, 1]);
        if is_squarefree(spec, &f)? {
            return cubic_profile(spec, &f);
        }
    }
    Err(Error::Invariant("cubic rejection sampling exhausted".into()))
}

/// Checks `|sum_x chi(f(x))| <= 2 sqrt(p)` and `A_f <= sqrt(p)` on every
/// audited cubic. A violation means the implementation is wrong.
pub fn hasse_audit(spec: &FieldSpec, scope: AuditScope) -> Result<HasseReport> {
    let p = require_prime_field(spec)?;
    let profiles = match scope {
        AuditScope::All => all_cubic_profiles(spec)?,
        AuditScope::Sample { trials, rng } => (0..trials)
            .into_par_iter()
            .map(|i| sample_cubic(spec, &rng, i))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut report = HasseReport {
        p,
        audited: profiles.len() as u64,
        violations: 0,
        max_abs_char_sum: 0,
        max_normalized: 0.0,
        max_a_f: f64::NEG_INFINITY,
    };
    for pr in &profiles {
        let s = pr.char_sum().unsigned_abs();
        // |s| <= 2 sqrt(p)  <=>  s^2 <= 4p ;  A_f <= sqrt(p)  <=>  (2 max - p)^2 <= 4p when positive
        let twice_af = 2 * pr.larger() as i64 - p as i64;
        let af_ok = twice_af <= 0 || (twice_af as u128).pow(2) <= 4 * u128::from(p);
        if u128::from(s).pow(2) > 4 * u128::from(p) || !af_ok {
            report.violations += 1;
        }
        report.max_abs_char_sum = report.max_abs_char_sum.max(s);
        report.max_a_f = report.max_a_f.max(pr.a_f());
    }
    report.max_normalized = report.max_abs_char_sum as f64 / (2.0 * (p as f64).sqrt());
    if report.violations > 0 {
        return Err(Error::Invariant(format!(
            "{} Hasse violations among {} cubics over F_{p}",
            report.violations, report.audited
        )));
    }
    Ok(report)
}

/// Number of size-`n` subsets `S` of `F_p` with
/// `|sum_{s in S} chi(f(s))| >= n - 2m`, counted from the census of `f`.
pub fn exact_degree(profile: &CubicProfile, n: u64, m: u64) -> Result<BigUint> {
    check_degree_params(profile.p, n, m)?;
    let need = n - 2 * m;
    let mut total = BigUint::zero();
    for a in 0..=n.min(profile.n_q) {
        for b in 0..=(n - a).min(profile.n_n) {
            let c = n - a - b;
            if c > profile.z || a.abs_diff(b) < need {
                continue;
            }
            total += binomial(profile.n_q, a) * binomial(profile.n_n, b) * binomial(profile.z, c);
        }
    }
    Ok(total)
}

/// `C(p - max, m) * C(max, n - m)` with `max = max(#Q, #N)`: choose `n - m`
/// points from the larger class and `m` from the rest (the smaller class
/// together with the zeros). Each such subset has character sum at least
/// `n - 2m` in absolute value, so this never exceeds [`exact_degree`].
pub fn degree_lower_bound(profile: &CubicProfile, n: u64, m: u64) -> Result<BigUint> {
    check_degree_params(profile.p, n, m)?;
    let larger = profile.larger();
    Ok(binomial(profile.p - larger, m) * binomial(larger, n - m))
}

/// For each `(a, b)` (at index `a p + b`), the `c` with
/// `x^3 + a x^2 + b x + c` inseparable, i.e. of the form `(x - r)^2 (x - s)`.
fn inseparable_table(p: u64) -> Vec<Vec<u32>> {
    let mut table = vec![Vec::new(); (p * p) as usize];
    for r in 0..p {
        for s in 0..p {
            let a = (p - (2 * r + s) % p) % p;
            let b = (r * r + 2 * r * s) % p;
            let c = (p - r * r % p * s % p) % p;
            table[(a * p + b) as usize].push(c as u32);
        }
    }
    table
}

/// Counts cubics joined to `S`; once `stop_at` is reached the scan stops and
/// returns a count of at least `stop_at`.
fn count_edges(
    spec: &FieldSpec,
    subset: &Subset,
    m: u64,
    stop_at: Option<u64>,
    inseparable: Option<&[Vec<u32>]>,
) -> Result<u64> {
    let p = require_prime_field(spec)?;
    cubic_budget(p)?;
    let n = subset.len() as u64;
    check_degree_params(p, n, m)?;
    // |sum| <= n <= p <= 1000 under the cubic budget, so i16 lanes suffice.
    let need = (n - 2 * m) as i16;
    let owned;
    let inseparable = match inseparable {
        Some(t) => t,
        None => {
            owned = inseparable_table(p);
            &owned
        }
    };
    let chi2 = doubled_character_table(spec);
    let pts: Vec<u64> = subset.indices();
    let sq: Vec<u64> = pts.iter().map(|&s| s * s % p).collect();
    let cu: Vec<u64> = pts.iter().zip(&sq).map(|(&s, &s2)| s2 * s % p).collect();
    let width = p as usize;
    let mut sums = vec![0i16; width];
    let mut count = 0u64;
    for a in 0..p {
        for b in 0..p {
            // sums[c] = sum_i chi(g_i + c): one contiguous row of the doubled table per point.
            sums.fill(0);
            for i in 0..pts.len() {
                let g = ((cu[i] + a * sq[i] + b * pts[i]) % p) as usize;
                for (acc, &v) in sums.iter_mut().zip(&chi2[g..g + width]) {
                    *acc = acc.wrapping_add(i16::from(v));
                }
            }
            let row: u64 = sums.iter().map(|&s| u64::from(s.wrapping_abs() >= need)).sum();
            let singular = inseparable[(a * p + b) as usize]
                .iter()
                .filter(|&&c| sums[c as usize].wrapping_abs() >= need)
                .count() as u64;
            count += row - singular;
            if stop_at.is_some_and(|s| count >= s) {
                return Ok(count);
            }
        }
    }
    Ok(count)
}

/// Number of monic separable cubics joined to `S` (with `n = |S|`).
pub fn subset_degree(spec: &FieldSpec, subset: &Subset, m: u64) -> Result<u64> {
    count_edges(spec, subset, m, None, None)
}

/// Whether `S` is joined to at least `needed` cubics.
pub fn subset_degree_reaches(spec: &FieldSpec, subset: &Subset, m: u64, needed: u64) -> Result<bool> {
    reaches(spec, subset, m, needed, None)
}

fn reaches(spec: &FieldSpec, subset: &Subset, m: u64, needed: u64, table: Option<&[Vec<u32>]>) -> Result<bool> {
    if needed == 0 {
        return Ok(true);
    }
    Ok(count_edges(spec, subset, m, Some(needed), table)? >= needed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub beta_hat: f64,
    pub hits: u64,
    pub samples: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `ceil(alpha (p^3 - p^2))`.
    pub needed_degree: u64,
}

impl BetaEstimate {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

pub fn family_size(p: u64) -> u64 {
    p * p * p - p * p
}

/// Fraction of uniformly random size-`n` subsets whose degree is at least
/// `alpha (p^3 - p^2)`. Subset `i` is drawn from stream `i`.
pub fn beta_estimate(
    spec: &FieldSpec,
    params: GraphParams,
    alpha: f64,
    samples: u64,
    rng: RngSpec,
) -> Result<BetaEstimate> {
    let p = require_prime_field(spec)?;
    if params.p != p {
        return Err(Error::pre(format!("graph parameters are for p = {}, field has p = {p}", params.p)));
    }
    if samples < crate::sampler::MIN_MONTE_CARLO_TRIALS {
        return Err(Error::pre(format!("samples = {samples} < 100")));
    }
    if alpha < 0.0 {
        return Err(Error::pre(format!("alpha = {alpha} must be >= 0")));
    }
    check_budget("per-sample subset degree", u128::from(p).pow(4), SAMPLE_WORK_BUDGET)?;
    let needed_rat = decimal_rational(alpha)? * BigRational::from_integer(family_size(p).into());
    let needed = needed_rat
        .ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::pre("alpha too large"))?;
    let table = inseparable_table(p);
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = Subset::random(spec, params.n as usize, &mut rng.stream(i))?;
            reaches(spec, &s, params.m, needed, Some(&table)).map(u64::from)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    let (ci_low, ci_high) = wilson_interval(hits, samples, WILSON_Z_99);
    Ok(BetaEstimate {
        beta_hat: hits as f64 / samples as f64,
        hits,
        samples,
        ci_low,
        ci_high,
        needed_degree: needed,
    })
}

/// `C(n, m) 2^{-n}`, the limiting edge density guaranteed by the degree bound.
pub fn edge_density_floor(n: u64, m: u64) -> BigRational {
    BigRational::new(binomial(n, m).into(), (BigUint::from(1u32) << n as usize).into())
}

/// `(C(n, m) 2^{-n} - alpha) / (1 - alpha)`, the `o(1)` term dropped.
pub fn beta_lower_bound(n: u64, m: u64, alpha: f64) -> Result<f64> {
    if 2 * m > n {
        return Err(Error::pre(format!("2m > n for n = {n}, m = {m}")));
    }
    let density = edge_density_floor(n, m);
    let a = decimal_rational(alpha)?;
    if a <= BigRational::zero() || a >= density {
        return Err(Error::pre(format!(
            "alpha = {alpha} violates 0 < alpha < C(n,m) 2^-n = {}",
            to_f64(&density)
        )));
    }
    let one = BigRational::from_integer(1.into());
    Ok(to_f64(&((density - &a) / (one - a))))
}

/// Exact fraction of monic separable cubics whose values on `S` are all
/// nonzero residues or all non-residues.
pub fn all_residue_event_probability(spec: &FieldSpec, subset: &Subset) -> Result<BigRational> {
    let p = require_prime_field(spec)?;
    let hits = subset_degree(spec, subset, 0)?;
    Ok(BigRational::new(hits.into(), family_size(p).into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeStatistics {
    pub cubics: u64,
    pub min_exact_degree: String,
    pub min_degree_bound: String,
    /// Mean exact degree divided by `C(p, n)`.
    pub mean_degree_ratio: f64,
    /// `C(n, m) 2^{-n}`.
    pub density_floor: f64,
    pub bound_holds_everywhere: bool,
}

/// Degree statistics over a list of cubic profiles; identical censuses are
/// evaluated once.
pub fn degree_statistics(profiles: &[CubicProfile], n: u64, m: u64) -> Result<(DegreeStatistics, Vec<BigUint>)> {
    let p = profiles.first().map_or(0, |pr| pr.p);
    let mut cache: HashMap<(u64, u64, u64), (BigUint, BigUint)> = HashMap::new();
    let mut degrees = Vec::with_capacity(profiles.len());
    let mut sum = BigUint::zero();
    let mut min_exact: Option<BigUint> = None;
    let mut min_bound: Option<BigUint> = None;
    let mut holds = true;
    for pr in profiles {
        let key = (pr.n_q, pr.n_n, pr.z);
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
            e.insert((exact_degree(pr, n, m)?, degree_lower_bound(pr, n, m)?));
        }
        let (exact, bound) = &cache[&key];
        holds &= bound <= exact;
        sum += exact;
        if min_exact.as_ref().is_none_or(|v| exact < v) {
            min_exact = Some(exact.clone());
        }
        if min_bound.as_ref().is_none_or(|v| bound < v) {
            min_bound = Some(bound.clone());
        }
        degrees.push(exact.clone());
    }
    let count = profiles.len() as u64;
    let mean_ratio = if count == 0 {
        0.0
    } else {
        to_f64(&BigRational::new(sum.into(), (binomial(p, n) * count).into()))
    };
    Ok((
        DegreeStatistics {
            cubics: count,
            min_exact_degree: min_exact.unwrap_or_default().to_string(),
            min_degree_bound: min_bound.unwrap_or_default().to_string(),
            mean_degree_ratio: mean_ratio,
            density_floor: to_f64(&edge_density_floor(n, m)),
            bound_holds_everywhere: holds,
        },
        degrees,
    ))
}

/// Edge counts of the bipartite graph by direct enumeration of all
/// `C(p, n)` subsets: degrees of the cubics (in [`all_cubic_profiles`]
/// order) and of the subsets (in lexicographic order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCensus {
    pub cubic_degrees: Vec<u64>,
    pub subset_degrees: Vec<u64>,
}

/// Limit on `C(p, n) * (p^3 - p^2)` for [`enumerate_edges`].
pub const EDGE_ENUMERATION_BUDGET: u128 = 2_000_000_000;

pub fn enumerate_edges(spec: &FieldSpec, n: u64, m: u64) -> Result<EdgeCensus> {
    let p = require_prime_field(spec)?;
    check_degree_params(p, n, m)?;
    cubic_budget(p)?;
    let subsets = binomial(p, n);
    let work = &subsets * BigUint::from(family_size(p));
    let work = work.to_u128().unwrap_or(u128::MAX);
    check_budget("subset enumeration", work, EDGE_ENUMERATION_BUDGET)?;
    let subsets: Vec<Vec<usize>> = combinations(p as usize, n as usize);
    let need = (n - 2 * m) as i32;
    let chi = spec.character_table();
    let profiles = all_cubic_profiles(spec)?;
    let rows: Vec<Vec<bool>> = profiles
        .par_iter()
        .map(|pr| {
            let values: Vec<i32> = (0..p)
                .map(|x| {
                    let v = (x * x % p * x + pr.a * (x * x % p) + pr.b * x + pr.c) % p;
                    i32::from(chi[v as usize])
                })
                .collect();
            subsets
                .iter()
                .map(|s| s.iter().map(|&x| values[x]).sum::<i32>().abs() >= need)
                .collect()
        })
        .collect();
    let cubic_degrees = rows.iter().map(|r| r.iter().filter(|&&e| e).count() as u64).collect();
    let subset_degrees = (0..subsets.len())
        .map(|j| rows.iter().filter(|r| r[j]).count() as u64)
        .collect();
    Ok(EdgeCensus {
        cubic_degrees,
        subset_degrees,
    })
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> FieldSpec {
        FieldSpec::new(p, 1).unwrap()
    }

    #[test]
    fn cubic_counts() {
        assert_eq!(enumerate_cubics(&field(5)).unwrap().count(), 100);
        assert_eq!(enumerate_cubics(&field(13)).unwrap().count(), 2028);
        for f in enumerate_cubics(&field(5)).unwrap() {
            assert_eq!(f.degree(), Some(3));
            assert_eq!(f.leading().index(), 1);
        }
        assert!(enumerate_cubics(&FieldSpec::new(3, 2).unwrap()).is_err());
        assert!(matches!(enumerate_cubics(&field(1009)), Err(Error::Budget { .. })));
    }

    #[test]
    fn discriminant_matches_squarefree_test() {
        for p in [3u64, 5, 7, 13] {
            let spec = field(p);
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        let f = Polynomial::from_ints(&spec, &[c as i64, b as i64, a as i64, 1]);
                        assert_eq!(
                            discriminant(p, a, b, c) != 0,
                            is_squarefree(&spec, &f).unwrap(),
                            "p={p} a={a} b={b} c={c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn inseparable_table_matches_discriminant() {
        for p in [3u64, 5, 13, 31] {
            let table = inseparable_table(p);
            for a in 0..p {
                for b in 0..p {
                    let mut listed = table[(a * p + b) as usize].clone();
                    listed.sort_unstable();
                    let zeros: Vec<u32> = (0..p).filter(|&c| discriminant(p, a, b, c) == 0).map(|c| c as u32).collect();
                    assert_eq!(listed, zeros, "p={p} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn profile_example() {
        let spec = field(5);
        let f = Polynomial::from_ints(&spec, &[0, -1, 0, 1]);
        let pr = cubic_profile(&spec, &f).unwrap();
        assert_eq!((pr.n_q, pr.n_n, pr.z), (2, 0, 3));
        assert_eq!(pr.a_f(), -0.5);
        assert_eq!(exact_degree(&pr, 4, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(degree_lower_bound(&pr, 4, 1).unwrap(), BigUint::zero());
        assert!(cubic_profile(&spec, &Polynomial::from_ints(&spec, &[0, 0, 0, 1])).is_err());
        assert!(cubic_profile(&spec, &Polynomial::from_ints(&spec, &[0, 1, 0, 2])).is_err());
    }

    #[test]
    fn fast_profiles_match_direct() {
        let spec = field(13);
        let fast = all_cubic_profiles(&spec).unwrap();
        let slow: Vec<_> = enumerate_cubics(&spec)
            .unwrap()
            .map(|f| cubic_profile(&spec, &f).unwrap())
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn degree_edge_cases() {
        let spec = field(13);
        let f = Polynomial::from_ints(&spec, &[1, 2, 0, 1]);
        let pr = cubic_profile(&spec, &f).unwrap();
        // m = n/2: every subset qualifies.
        assert_eq!(exact_degree(&pr, 4, 2).unwrap(), binomial(13, 4));
        assert_eq!(degree_lower_bound(&pr, 4, 0).unwrap(), binomial(pr.n_q.max(pr.n_n), 4));
        let all_res = CubicProfile { p: 13, a: 0, b: 0, c: 0, n_q: 13, n_n: 0, z: 0 };
        assert_eq!(exact_degree(&all_res, 5, 1).unwrap(), binomial(13, 5));
        assert!(exact_degree(&pr, 14, 0).is_err());
        assert!(exact_degree(&pr, 4, 3).is_err());
    }

    #[test]
    fn graph_params_validation() {
        assert!(GraphParams::new(101, 6, 1).is_ok());
        assert!(GraphParams::new(101, 6, 2).is_err()); // 2 > sqrt(6) fails
        assert!(GraphParams::new(101, 4, 2).is_err());
        assert!(GraphParams::new(5, 6, 0).is_err());
    }

    #[test]
    fn beta_bounds() {
        assert!((beta_lower_bound(6, 1, 0.046875).unwrap() - 0.049180).abs() < 1e-6);
        let n = 5u64;
        let a = 2f64.powi(-(n as i32) - 1);
        let b = beta_lower_bound(n, 0, a).unwrap();
        assert!((b - a).abs() < a * 0.05);
        assert!(beta_lower_bound(6, 1, 0.1).is_err());
        assert!(beta_lower_bound(6, 1, 0.0).is_err());
        let tiny = beta_lower_bound(6, 1, 1e-12).unwrap();
        assert!((tiny - 6.0 / 64.0).abs() < 1e-9);
    }

    #[test]
    fn subset_degree_single_point() {
        let spec = field(13);
        let s = Subset::from_indices(&spec, &[4]).unwrap();
        let roots_at_4 = enumerate_cubics(&spec)
            .unwrap()
            .filter(|f| crate::poly::evaluate(&spec, f, spec.from_int(4)).is_zero())
            .count() as u64;
        assert_eq!(subset_degree(&spec, &s, 0).unwrap(), 2028 - roots_at_4);
        assert_eq!(subset_degree(&spec, &s, 0).unwrap(), subset_degree(&spec, &s, 0).unwrap());
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(5, 3).len(), 10);
    }

    #[test]
    fn edge_census_small() {
        let spec = field(5);
        let edges = enumerate_edges(&spec, 2, 0).unwrap();
        assert_eq!(edges.subset_degrees.len(), 10);
        let profiles = all_cubic_profiles(&spec).unwrap();
        for (pr, &d) in profiles.iter().zip(&edges.cubic_degrees) {
            assert_eq!(exact_degree(pr, 2, 0).unwrap(), BigUint::from(d));
        }
    }

    #[test]
    fn empty_subset_event() {
        let spec = field(5);
        let s = Subset::from_indices(&spec, &[]).unwrap();
        assert_eq!(all_residue_event_probability(&spec, &s).unwrap(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn single_point_event_matches_enumeration() {
        let spec = field(5);
        let s = Subset::from_indices(&spec, &[2]).unwrap();
        let nonzero = enumerate_cubics(&spec)
            .unwrap()
            .filter(|f| !crate::poly::evaluate(&spec, f, spec.from_int(2)).is_zero())
            .count();
        let prob = all_residue_event_probability(&spec, &s).unwrap();
        assert_eq!(prob, BigRational::new((nonzero as u64).into(), 100u64.into()));
        assert!((to_f64(&prob) - 0.8).abs() < 0.1);
    }
}
