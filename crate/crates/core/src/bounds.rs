//! Lower bounds on `P(|T| / sqrt(n) > t)` from the moments `E_2k`, `E_4k`.
//!
//! All algebra is carried out in exact rationals; real-valued parameters
//! are read as the decimal numbers they print as, and only square and
//! `2k`-th roots are taken in floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::numeric::{decimal_rational, to_f64};
use crate::poly::census_constant;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundParameters {
    Markov {
        delta: f64,
        /// Optimizing value of `c^k`.
        c_k: f64,
    },
    SmallProbability {
        epsilon: f64,
        eta: f64,
        c: f64,
        c_k: f64,
        lambda: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailBound {
    pub threshold: f64,
    pub probability_floor: f64,
    pub parameters: BoundParameters,
}

/// `(E_2k - d)^2 / (E_4k - 2 d E_2k + d^2)` with `d = delta^{2k}`.
pub fn markov_floor_exact(table: &MomentTable, delta: &BigRational) -> Result<BigRational> {
    let (e2, e4) = (table.e2k(), table.e4k());
    let d = delta.pow(2 * table.k as i32);
    if &d >= e2 {
        return Err(Error::pre("delta^{2k} >= E2k (bound is vacuous)"));
    }
    let num = (e2 - &d) * (e2 - &d);
    let den = e4 - BigRational::from_integer(2.into()) * &d * e2 + &d * &d;
    Ok(num / den)
}

/// Right-hand side of the second-moment inequality at a given `c^k`:
/// `1 - (c^{2k} - 2 c^k E_2k + E_4k) / (c^k - delta^{2k})^2`.
pub fn markov_objective(table: &MomentTable, delta: &BigRational, c_k: &BigRational) -> BigRational {
    let (e2, e4) = (table.e2k(), table.e4k());
    let d = delta.pow(2 * table.k as i32);
    let num = c_k * c_k - BigRational::from_integer(2.into()) * c_k * e2 + e4;
    let gap = c_k - &d;
    BigRational::one() - num / (&gap * &gap)
}

/// `P(|T|/sqrt(n) > delta) >= floor` for `0 < delta < 1/2`.
pub fn markov_tail_bound(table: &MomentTable, delta: f64) -> Result<TailBound> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::pre(format!("delta = {delta} violates 0 < delta < 1/2")));
    }
    let d = decimal_rational(delta)?;
    let floor = markov_floor_exact(table, &d)?;
    let d2k = d.pow(2 * table.k as i32);
    let (e2, e4) = (table.e2k(), table.e4k());
    let c_k = (e4 - &d2k * e2) / (e2 - &d2k);
    Ok(TailBound {
        threshold: delta,
        probability_floor: to_f64(&floor),
        parameters: BoundParameters::Markov {
            delta,
            c_k: to_f64(&c_k),
        },
    })
}

/// Threshold `t` with `P(|T|/sqrt(n) > t) >= epsilon`, from
/// `c^k = eta / epsilon` and `lambda = (c^{2k} - 2 c^k E_2k + E_4k) / (1 - epsilon)`.
/// `eta` defaults to `epsilon^{1/4}`.
pub fn small_prob_threshold(table: &MomentTable, epsilon: f64, eta: Option<f64>) -> Result<TailBound> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::pre(format!("epsilon = {epsilon} violates 0 < epsilon < 1")));
    }
    let eta = eta.unwrap_or_else(|| epsilon.powf(0.25));
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::pre(format!("eta = {eta} must be > 0")));
    }
    let (e2, e4) = (table.e2k(), table.e4k());
    let eps = decimal_rational(epsilon)?;
    let h = decimal_rational(eta)?;
    let two = BigRational::from_integer(2.into());
    if h >= &two * e2 {
        return Err(Error::pre(format!(
            "eta >= 2*E2k (eta = {eta}, 2*E2k = {})",
            to_f64(&(&two * e2))
        )));
    }
    let c_k = &h / &eps;
    let c_2k = &c_k * &c_k;
    let lambda = (&c_2k - &two * &c_k * e2 + e4) / (BigRational::one() - &eps);
    if lambda >= c_2k {
        return Err(Error::pre(format!(
            "lambda >= c^{{2k}} (lambda = {}, c^{{2k}} = {})",
            to_f64(&lambda),
            to_f64(&c_2k)
        )));
    }
    // c^k - sqrt(lambda) = (c^{2k} - lambda) / (c^k + sqrt(lambda)) avoids cancellation.
    let sqrt_lambda = to_f64(&lambda).sqrt();
    let gap = to_f64(&(&c_2k - &lambda)) / (to_f64(&c_k) + sqrt_lambda);
    let threshold = gap.powf(1.0 / (2.0 * f64::from(table.k)));
    let c_k_f = to_f64(&c_k);
    Ok(TailBound {
        threshold,
        probability_floor: epsilon,
        parameters: BoundParameters::SmallProbability {
            epsilon,
            eta,
            c: c_k_f.powf(1.0 / f64::from(table.k)),
            c_k: c_k_f,
            lambda: to_f64(&lambda),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoremConstants {
    /// `4 pi^{3/2} e^{-3} 2^{-2k}`
    pub thm1: f64,
    /// `0.8577 sqrt(k)`
    pub thm2: f64,
}

/// Discrepancy scale used by the constant-probability statement; strictly
/// below `sqrt(2/e)`.
pub const THEOREM2_SCALE: f64 = 0.8577;

pub fn theorem_constants(k: u32) -> Result<TheoremConstants> {
    if k == 0 {
        return Err(Error::pre("k >= 1 required"));
    }
    let pi = std::f64::consts::PI;
    Ok(TheoremConstants {
        thm1: 4.0 * pi.powf(1.5) * (-3f64).exp() * 2f64.powi(-2 * k as i32),
        thm2: THEOREM2_SCALE * f64::from(k).sqrt(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theorem1Parameters {
    pub delta: f64,
    /// Smallest `N` with `c_{q,k} / N < epsilon / 3`, using `c_{q,k} <= 2`.
    pub n_threshold: u64,
}

const DELTA_CAP: f64 = 0.49;

/// Largest `delta` in `(0, 0.49]` (to bisection resolution) for which
/// `|floor(delta) / (E_2k^2/E_4k) - 1| < (epsilon/3) E_4k / E_2k^2`.
pub fn theorem1_parameters(k: u32, epsilon: f64, table: &MomentTable) -> Result<Theorem1Parameters> {
    if table.k != k {
        return Err(Error::pre(format!("table is for k = {}, not k = {k}", table.k)));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::pre(format!("epsilon = {epsilon} violates 0 < epsilon < 1")));
    }
    let eps = decimal_rational(epsilon)?;
    let (e2, e4) = (table.e2k(), table.e4k());
    let limit = e2 * e2 / e4;
    let tolerance = &eps / BigRational::from_integer(3.into()) / &limit;
    let admissible = |delta: f64| -> bool {
        let Some(d) = BigRational::from_float(delta) else {
            return false;
        };
        match markov_floor_exact(table, &d) {
            Ok(floor) => (floor / &limit - BigRational::one()).abs() < tolerance,
            Err(_) => false,
        }
    };
    let delta = if admissible(DELTA_CAP) {
        DELTA_CAP
    } else {
        let (mut lo, mut hi) = (0.0f64, DELTA_CAP);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if admissible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if delta <= 0.0 {
        return Err(Error::pre("no admissible delta in (0, 0.49]"));
    }
    // 2/N < eps/3  <=>  N > 6/eps
    let bound = BigRational::from_integer(6.into()) / &eps;
    let n_threshold = (bound.floor().to_integer() + BigInt::one())
        .to_u64()
        .ok_or_else(|| Error::pre("epsilon too small for a 64-bit N"))?;
    Ok(Theorem1Parameters { delta, n_threshold })
}

/// `max(0, raw - c_{q,k}/q)`: a floor on the probability over hyperelliptic
/// curves from one over all polynomials of degree at most `4k - 1`.
pub fn probability_floor_assembled(raw: f64, q: u64, k: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&raw) {
        return Err(Error::pre(format!("raw probability {raw} outside [0, 1]")));
    }
    if k == 0 {
        return Err(Error::pre("k >= 1 required"));
    }
    if q < 3 {
        return Err(Error::pre(format!("q = {q} must be an odd prime power")));
    }
    let correction = census_constant(q) / BigRational::from_integer(q.into());
    let value = decimal_rational(raw)? - correction;
    Ok(if value.is_positive() { to_f64(&value) } else { 0.0 })
}
