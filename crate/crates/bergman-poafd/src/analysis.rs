//! Coefficient-side norms and growth probes.
//!
//! The monomials are orthogonal in every disc space here, so membership
//! of a Taylor series is a weighted coefficient sum: exactly with the
//! Gamma-ratio weights, or up to constants with the power weights
//! (k+1)^{-(1+alpha)}. On top of that sit three numerical probes:
//!
//! * membership_probe integrates |f|^2 over dyadic annuli and fits the
//!   decay exponent of the shell increments,
//! * weighted_series_probe reads the decay exponent of a weighted
//!   coefficient series at a large horizon,
//! * inclusion_probe drives a witness series that separates two spaces:
//!   divergent in the smaller exponent, convergent in the larger.
//!
//! Probes report trends measured at finite horizons. They are designed to
//! agree with the closed-form classification away from the critical line
//! alpha = 2 + 2 beta, and to admit defeat on it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{gamma_weight, monomial_weights};
use crate::math::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    /// Exact weights k! Gamma(alpha+2) / Gamma(k+alpha+2).
    ExactGamma,
    /// Comparable weights (k+1)^{-(1+alpha)}; same finiteness, constants off
    /// by Gamma(alpha+2) asymptotically.
    PowerEquiv,
}

/// Squared norm of a Taylor series from its coefficients.
pub fn coefficient_norm(coeffs: &[Complex64], alpha: f64, mode: NormMode) -> Result<f64> {
    if !alpha.is_finite() || alpha <= -1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    let s = match mode {
        NormMode::ExactGamma => {
            let w = monomial_weights(alpha, coeffs.len());
            coeffs.iter().zip(w).map(|(c, wk)| c.norm_sqr() * wk).sum()
        }
        NormMode::PowerEquiv => coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm_sqr() * (k as f64 + 1.0).powf(-(1.0 + alpha)))
            .sum(),
    };
    Ok(s)
}

/// Where the model family f_beta(z) = (1 - z)^{-(2+beta)} lives, by the
/// closed-form trichotomy in beta.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FBetaClass {
    pub beta: f64,
    /// Member of the Hardy space on the circle.
    pub hardy: bool,
    /// Member of every disc space regardless of weight.
    pub all_bergman: bool,
    /// Otherwise: member exactly for alpha above this line.
    pub bergman_threshold: Option<f64>,
}

pub fn classify_f_beta(beta: f64) -> FBetaClass {
    if beta < -1.5 {
        FBetaClass { beta, hardy: true, all_bergman: true, bergman_threshold: None }
    } else if beta == -1.5 {
        FBetaClass { beta, hardy: false, all_bergman: true, bergman_threshold: None }
    } else {
        FBetaClass { beta, hardy: false, all_bergman: false, bergman_threshold: Some(2.0 + 2.0 * beta) }
    }
}

impl FBetaClass {
    pub fn member_of(&self, alpha: f64) -> bool {
        self.all_bergman || alpha > self.bergman_threshold.unwrap()
    }

    /// Exactly on the critical line alpha = 2 + 2 beta, where the integral
    /// diverges logarithmically.
    pub fn on_critical_line(&self, alpha: f64) -> bool {
        self.bergman_threshold.map(|t| alpha == t).unwrap_or(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    Member,
    NotMember,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShellRow {
    pub radius: f64,
    pub increment: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub beta: f64,
    pub alpha: f64,
    pub shells: Vec<ShellRow>,
    /// Decay exponent e fitted from increment ~ (1-r)^e over the last
    /// shells; positive means the integral is settling.
    pub fitted_exponent: f64,
    /// The singularity reading alpha - 2 - 2 beta.
    pub predicted_exponent: f64,
    pub verdict: GrowthVerdict,
    pub agrees_with_classification: bool,
}

const MEMBERSHIP_SHELLS: usize = 12;
const MEMBERSHIP_FIT_SHELLS: usize = 6;
const MEMBERSHIP_SLOPE_BAND: f64 = 0.15;

/// Integrate |f_beta|^2 dA_alpha over dyadic annuli up to r = 1 - 2^{-12}
/// and fit the shell-increment decay. The angular rule is graded toward
/// theta = 0 so the (1-r)-wide singularity peak is resolved at every
/// radius.
pub fn membership_probe(beta: f64, alpha: f64) -> Result<MembershipReport> {
    if !alpha.is_finite() || alpha <= -1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidConfig("beta must be finite".into()));
    }
    let (gx, gw) = gauss_legendre(24);
    let (px, pw) = gauss_legendre(16);

    // mean over the circle of |1 - rho e^{i theta}|^{-2(2+beta)}
    let angular_mean = |rho: f64| -> f64 {
        let delta = 1.0 - rho;
        let e = -(2.0 + beta);
        let value = |theta: f64| {
            let d2 = delta * delta + 4.0 * rho * (theta / 2.0).sin().powi(2);
            d2.powf(e)
        };
        let mut lo = 0.0;
        let mut hi = delta.min(std::f64::consts::PI);
        let mut acc = 0.0;
        loop {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, w) in px.iter().zip(&pw) {
                acc += w * half * value(mid + half * x);
            }
            if hi >= std::f64::consts::PI {
                break;
            }
            lo = hi;
            hi = (2.0 * hi).min(std::f64::consts::PI);
        }
        acc / std::f64::consts::PI
    };

    let mut shells = Vec::with_capacity(MEMBERSHIP_SHELLS);
    let mut cumulative = 0.0;
    let mut prev_r = 0.0;
    for j in 1..=MEMBERSHIP_SHELLS {
        let r = 1.0 - 2f64.powi(-(j as i32));
        let half = 0.5 * (r - prev_r);
        let mid = 0.5 * (r + prev_r);
        let mut inc = 0.0;
        for (x, w) in gx.iter().zip(&gw) {
            let rho = mid + half * x;
            inc += w * half * 2.0 * rho * (1.0 - rho * rho).powf(alpha) * angular_mean(rho);
        }
        inc *= 1.0 + alpha;
        cumulative += inc;
        shells.push(ShellRow { radius: r, increment: inc, cumulative });
        prev_r = r;
    }

    // least squares on log2(increment) against the dyadic index
    let tail = &shells[MEMBERSHIP_SHELLS - MEMBERSHIP_FIT_SHELLS..];
    let n = tail.len() as f64;
    let xbar = tail.iter().enumerate().map(|(i, _)| i as f64).sum::<f64>() / n;
    let ybar = tail.iter().map(|s| s.increment.log2()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, s) in tail.iter().enumerate() {
        let dx = i as f64 - xbar;
        num += dx * (s.increment.log2() - ybar);
        den += dx * dx;
    }
    let slope = num / den;
    let fitted = -slope;

    let verdict = if fitted > MEMBERSHIP_SLOPE_BAND {
        GrowthVerdict::Member
    } else if fitted < -MEMBERSHIP_SLOPE_BAND {
        GrowthVerdict::NotMember
    } else {
        GrowthVerdict::Indeterminate
    };
    let class = classify_f_beta(beta);
    let agrees = match verdict {
        GrowthVerdict::Member => class.member_of(alpha),
        GrowthVerdict::NotMember => !class.member_of(alpha),
        GrowthVerdict::Indeterminate => true,
    };
    Ok(MembershipReport {
        beta,
        alpha,
        shells,
        fitted_exponent: fitted,
        predicted_exponent: alpha - 2.0 - 2.0 * beta,
        verdict,
        agrees_with_classification: agrees,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Converges,
    Diverges,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplier {
    /// Hardy reading: unit weight on |a_k|^2.
    Hardy,
    /// Bergman reading at this alpha: weight k! Gamma(a+2)/Gamma(k+a+2).
    Bergman(f64),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesProbe {
    pub partial_at_horizon: f64,
    /// Last dyadic Cauchy gap, sum over (horizon/2, horizon].
    pub cauchy_gap: f64,
    /// Whether the partial sum exceeded the divergence threshold.
    pub crossed_threshold: bool,
    /// q with term_k ~ k^q, read off the last dyadic doubling.
    pub fitted_exponent: f64,
    pub verdict: SeriesVerdict,
}

pub const DEFAULT_SERIES_HORIZON: usize = 100_000;
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e3;
const SERIES_EXPONENT_TOL: f64 = 0.05;

/// Partial sums of sum_k m_k (k+1)^{coeff_sq_exponent}, where m_k is the
/// Hardy or Bergman weight. The verdict comes from the fitted term
/// exponent (converges iff below -1 with margin); the threshold crossing
/// and the Cauchy gap are reported alongside as raw evidence.
pub fn weighted_series_probe(
    coeff_sq_exponent: f64,
    multiplier: Multiplier,
    horizon: usize,
    threshold: f64,
) -> Result<SeriesProbe> {
    if horizon < 16 {
        return Err(Error::InvalidConfig("series horizon must be at least 16".into()));
    }
    if let Multiplier::Bergman(a) = multiplier {
        if !a.is_finite() || a <= -1.0 {
            return Err(Error::InvalidAlpha(a));
        }
    }
    let term = |k: usize| -> f64 {
        let m = match multiplier {
            Multiplier::Hardy => 1.0,
            Multiplier::Bergman(a) => gamma_weight(k as u32, a),
        };
        m * (k as f64 + 1.0).powf(coeff_sq_exponent)
    };
    let mut partial = 0.0;
    let mut half_partial = 0.0;
    for k in 0..=horizon {
        partial += term(k);
        if k == horizon / 2 {
            half_partial = partial;
        }
    }
    let k_lo = horizon / 2;
    let t_hi = term(horizon);
    let t_lo = term(k_lo);
    let fitted = (t_hi / t_lo).ln() / ((horizon as f64 + 1.0) / (k_lo as f64 + 1.0)).ln();
    let verdict = if fitted < -1.0 - SERIES_EXPONENT_TOL {
        SeriesVerdict::Converges
    } else {
        SeriesVerdict::Diverges
    };
    Ok(SeriesProbe {
        partial_at_horizon: partial,
        cauchy_gap: partial - half_partial,
        crossed_threshold: partial > threshold,
        fitted_exponent: fitted,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    pub alpha_lower: f64,
    pub alpha_upper: f64,
    /// delta with witness coefficients |a_k|^2 = (k+1)^{-(1+delta)}.
    pub witness_exponent: f64,
    pub lower: SeriesProbe,
    pub upper: SeriesProbe,
    /// The witness diverges in the smaller space and converges in the
    /// larger: the inclusion is strict.
    pub separates: bool,
}

/// Drive the strictness witness for the nested pair alpha_lower <
/// alpha_upper. The default witness exponent -1 - (a1 + a2)/2 places the
/// series exactly between the two convergence lines.
pub fn inclusion_probe(
    alpha_lower: f64,
    alpha_upper: f64,
    witness_exponent: Option<f64>,
    horizon: usize,
    threshold: f64,
) -> Result<InclusionReport> {
    if !alpha_lower.is_finite() || alpha_lower <= -1.0 {
        return Err(Error::InvalidAlpha(alpha_lower));
    }
    if !alpha_upper.is_finite() || alpha_upper <= alpha_lower {
        return Err(Error::InvalidConfig(
            "inclusion probe needs alpha_lower < alpha_upper".into(),
        ));
    }
    let delta = witness_exponent.unwrap_or(-1.0 - 0.5 * (alpha_lower + alpha_upper));
    let coeff = -(1.0 + delta);
    let lower =
        weighted_series_probe(coeff, Multiplier::Bergman(alpha_lower), horizon, threshold)?;
    let upper =
        weighted_series_probe(coeff, Multiplier::Bergman(alpha_upper), horizon, threshold)?;
    let separates =
        lower.verdict == SeriesVerdict::Diverges && upper.verdict == SeriesVerdict::Converges;
    Ok(InclusionReport {
        alpha_lower,
        alpha_upper,
        witness_exponent: delta,
        lower,
        upper,
        separates,
    })
}
