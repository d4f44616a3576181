//! Random polynomials and curves, character profiles over a subset, point
//! counts, and tail-probability estimation.
//!
//! Monte Carlo trial `i` draws from stream `i` of the run's [`RngSpec`], and
//! per-trial outcomes are merged by integer addition, so results do not
//! depend on the number of worker threads.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::moments::exhaustive_histogram_filtered;
use crate::numeric::{decimal_rational, to_f64, wilson_interval, WILSON_Z_99};
use crate::poly::{evaluate, is_hyperelliptic, Polynomial};
use crate::rng::{RngSpec, Stream};
use crate::subset::Subset;

/// Attempts allowed when rejection-sampling a hyperelliptic curve.
pub const CURVE_ATTEMPT_CAP: u32 = 10_000;
/// Direct point counting enumerates `y` over the whole field.
pub const DIRECT_COUNT_LIMIT: u64 = 100_000;
pub const MIN_MONTE_CARLO_TRIALS: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CharProfile {
    pub n_qr: u64,
    pub n_nr: u64,
    pub n_zero: u64,
    pub t_sum: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    /// Uniform over all `q^{4k}` polynomials of degree at most `4k - 1`.
    AllPolys,
    /// Uniform over polynomials defining a hyperelliptic curve of degree
    /// `4k - 1`.
    Hyperelliptic,
}

impl fmt::Display for Conditioning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conditioning::AllPolys => "all_polys",
            Conditioning::Hyperelliptic => "hyperelliptic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailMode {
    Exhaustive,
    MonteCarlo { trials: u64, rng: RngSpec },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointCountMethod {
    Character,
    Direct,
}

/// Threshold `t` of the event `|T| / sqrt(n) > t`, compared exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    value: f64,
    /// `t^2`, or `None` when `t < 0` (the event always holds).
    square: Option<BigRational>,
}

impl Threshold {
    /// Reads `t` as the decimal number it prints as.
    pub fn new(t: f64) -> Result<Self> {
        let r = decimal_rational(t)?;
        Ok(Self {
            value: t,
            square: (t >= 0.0).then(|| &r * &r),
        })
    }

    /// `t = sqrt(s)` for an exact nonnegative rational `s`.
    pub fn sqrt_of(s: BigRational) -> Result<Self> {
        if s < BigRational::zero() {
            return Err(Error::pre("threshold square must be >= 0"));
        }
        Ok(Self {
            value: to_f64(&s).sqrt(),
            square: Some(s),
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Smallest `|T|` satisfying `|T| > t sqrt(n)`.
    pub fn min_hit(&self, n: usize) -> u64 {
        let Some(sq) = &self.square else {
            return 0;
        };
        let bound = sq * BigRational::from_integer(n.into());
        let mut v = to_f64(&bound).sqrt().floor().max(0.0) as u64;
        let exceeds = |v: u64| BigRational::from_integer((v as i128 * v as i128).into()) > bound;
        while v > 0 && exceeds(v - 1) {
            v -= 1;
        }
        while !exceeds(v) {
            v += 1;
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    Exhaustive,
    Montecarlo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailEstimate {
    pub mode: EstimateMode,
    pub threshold: f64,
    pub hits: u64,
    pub trials: u64,
    /// `hits / trials`, exact.
    pub p_hat: BigRational,
    /// Wilson 99% interval; Monte Carlo only.
    pub ci: Option<(f64, f64)>,
    pub conditioning: Conditioning,
}

impl TailEstimate {
    pub fn p_hat_f64(&self) -> f64 {
        to_f64(&self.p_hat)
    }

    pub fn half_width(&self) -> f64 {
        self.ci.map_or(0.0, |(lo, hi)| 0.5 * (hi - lo))
    }
}

/// Histogram of `T = sum_{s in S} chi(f(s))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    n: usize,
    counts: Vec<u64>,
}

impl Histogram {
    pub(crate) fn from_counts(n: usize, counts: Vec<u64>) -> Self {
        debug_assert_eq!(counts.len(), 2 * n + 1);
        Self { n, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, t: i64) -> u64 {
        let slot = t + self.n as i64;
        if slot < 0 {
            return 0;
        }
        self.counts.get(slot as usize).copied().unwrap_or(0)
    }

    /// Nonzero entries, ascending in `T`.
    pub fn to_map(&self) -> BTreeMap<i64, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(slot, &c)| (slot as i64 - self.n as i64, c))
            .collect()
    }

    /// Number of outcomes with `|T| >= min_abs`.
    pub fn tail_count(&self, min_abs: u64) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(slot, _)| (*slot as i64 - self.n as i64).unsigned_abs() >= min_abs)
            .map(|(_, &c)| c)
            .sum()
    }

    /// CSV with header `t_value,count`, rows ascending by `t_value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_value,count\n");
        for (t, c) in self.to_map() {
            out.push_str(&format!("{t},{c}\n"));
        }
        out
    }
}

/// Uniform polynomial of degree at most `4k - 1`; coefficients `a_0` first.
pub fn sample_poly(spec: &FieldSpec, k: u32, stream: &mut Stream) -> Polynomial {
    let q = spec.order();
    Polynomial::new(
        (0..4 * k)
            .map(|_| FieldElement::from_index_unchecked(stream.below(q)))
            .collect(),
    )
}

/// Uniform hyperelliptic curve of degree `4k - 1`, by rejection.
pub fn sample_curve(spec: &FieldSpec, k: u32, stream: &mut Stream) -> Result<Polynomial> {
    for _ in 0..CURVE_ATTEMPT_CAP {
        let f = sample_poly(spec, k, stream);
        if is_hyperelliptic(spec, &f, k) {
            return Ok(f);
        }
    }
    Err(Error::Invariant(format!(
        "no hyperelliptic curve in {CURVE_ATTEMPT_CAP} attempts; random source is broken"
    )))
}

#[inline]
fn t_sum(spec: &FieldSpec, f: &Polynomial, subset: &Subset) -> i64 {
    subset
        .elements()
        .iter()
        .map(|&s| i64::from(spec.character(evaluate(spec, f, s)).value()))
        .sum()
}

pub fn char_profile(spec: &FieldSpec, f: &Polynomial, subset: &Subset) -> CharProfile {
    let mut profile = CharProfile {
        n_qr: 0,
        n_nr: 0,
        n_zero: 0,
        t_sum: 0,
    };
    for &s in subset.elements() {
        match spec.character(evaluate(spec, f, s)).value() {
            1 => profile.n_qr += 1,
            -1 => profile.n_nr += 1,
            _ => profile.n_zero += 1,
        }
    }
    profile.t_sum = profile.n_qr as i64 - profile.n_nr as i64;
    profile
}

/// `#{(x, y) in S x F_q : y^2 = f(x)}`; the point at infinity is not counted.
pub fn point_count(
    spec: &FieldSpec,
    f: &Polynomial,
    subset: &Subset,
    method: PointCountMethod,
) -> Result<u64> {
    match method {
        PointCountMethod::Character => {
            Ok((subset.len() as i64 + t_sum(spec, f, subset)) as u64)
        }
        PointCountMethod::Direct => {
            if spec.order() > DIRECT_COUNT_LIMIT {
                return Err(Error::Budget {
                    what: "direct point count",
                    needed: u128::from(spec.order()),
                    limit: u128::from(DIRECT_COUNT_LIMIT),
                });
            }
            let squares: Vec<FieldElement> = spec.elements().map(|y| spec.mul(y, y)).collect();
            Ok(subset
                .elements()
                .iter()
                .map(|&x| {
                    let v = evaluate(spec, f, x);
                    squares.iter().filter(|&&y2| y2 == v).count() as u64
                })
                .sum())
        }
    }
}

/// `|#E(F_q, S) - #S| = |#QR - #NR|`.
pub fn discrepancy(spec: &FieldSpec, f: &Polynomial, subset: &Subset) -> u64 {
    t_sum(spec, f, subset).unsigned_abs()
}

fn check_mode(spec: &FieldSpec, k: u32, mode: &TailMode) -> Result<()> {
    if k == 0 {
        return Err(Error::pre("k >= 1 required"));
    }
    if let TailMode::MonteCarlo { trials, .. } = mode {
        if *trials < MIN_MONTE_CARLO_TRIALS {
            return Err(Error::pre(format!(
                "trials = {trials} < {MIN_MONTE_CARLO_TRIALS}"
            )));
        }
    }
    let _ = spec;
    Ok(())
}

/// Full histogram of `T` under the chosen measure.
pub fn distribution_histogram(
    spec: &FieldSpec,
    k: u32,
    subset: &Subset,
    conditioning: Conditioning,
    mode: TailMode,
) -> Result<Histogram> {
    check_mode(spec, k, &mode)?;
    let n = subset.len();
    let counts = match mode {
        TailMode::Exhaustive => match conditioning {
            Conditioning::AllPolys => exhaustive_histogram_filtered(spec, k, subset, |_| true)?,
            Conditioning::Hyperelliptic => {
                exhaustive_histogram_filtered(spec, k, subset, |f| is_hyperelliptic(spec, f, k))?
            }
        },
        TailMode::MonteCarlo { trials, rng } => {
            let width = 2 * n + 1;
            (0..trials)
                .into_par_iter()
                .try_fold(
                    || vec![0u64; width],
                    |mut h, i| {
                        let mut stream = rng.stream(i);
                        let f = match conditioning {
                            Conditioning::AllPolys => sample_poly(spec, k, &mut stream),
                            Conditioning::Hyperelliptic => sample_curve(spec, k, &mut stream)?,
                        };
                        h[(t_sum(spec, &f, subset) + n as i64) as usize] += 1;
                        Ok::<_, Error>(h)
                    },
                )
                .try_reduce(
                    || vec![0u64; width],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        Ok(a)
                    },
                )?
        }
    };
    Ok(Histogram::from_counts(n, counts))
}

/// Estimates `P(|T| / sqrt(n) > t)` under the chosen measure.
pub fn tail_estimate(
    spec: &FieldSpec,
    k: u32,
    subset: &Subset,
    threshold: &Threshold,
    conditioning: Conditioning,
    mode: TailMode,
) -> Result<TailEstimate> {
    let hist = distribution_histogram(spec, k, subset, conditioning, mode)?;
    Ok(estimate_from_histogram(&hist, subset.len(), threshold, conditioning, mode))
}

pub fn estimate_from_histogram(
    hist: &Histogram,
    n: usize,
    threshold: &Threshold,
    conditioning: Conditioning,
    mode: TailMode,
) -> TailEstimate {
    let hits = hist.tail_count(threshold.min_hit(n));
    let trials = hist.total();
    let p_hat = if trials == 0 {
        BigRational::zero()
    } else {
        BigRational::new(hits.into(), trials.into())
    };
    let (mode, ci) = match mode {
        TailMode::Exhaustive => (EstimateMode::Exhaustive, None),
        TailMode::MonteCarlo { .. } => (
            EstimateMode::Montecarlo,
            Some(wilson_interval(hits, trials, WILSON_Z_99)),
        ),
    };
    TailEstimate {
        mode,
        threshold: threshold.value(),
        hits,
        trials,
        p_hat,
        ci,
        conditioning,
    }
}
