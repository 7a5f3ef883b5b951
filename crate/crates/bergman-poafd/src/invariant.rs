//! Zero-based products and admissibility diagnostics on the disc.
//!
//! A Bergman zero sequence is wilder than a Hardy one: the right product
//! to form is not the Blaschke product but the modified factor
//! H_a(z) = u (2 - u) with u = (|a|/a)(a - z)/(1 - conj(a) z), and the
//! convergence condition relaxes to sum (1 - |a_k|)^2 < infinity. The
//! module evaluates partial products, estimates the condition sums with
//! analytic tails for law-given sequences, and probes the finer
//! limsup-type criterion sum_j (1 - r_j)^{1+eps} / log(1/eps) < 1/4 on an
//! epsilon grid. The limsup probe is a numerical trend reading, not a
//! proof, and its report says so.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::splitmix64;

/// One factor of the zero-based product. Vanishes exactly at z = a.
/// Undefined at a = 0, which is rejected rather than given a convention.
pub fn horowitz_factor(a: Complex64, z: Complex64) -> Result<Complex64> {
    if !a.is_finite() || !z.is_finite() {
        return Err(Error::NonFinite { at: a, context: "horowitz factor" });
    }
    if a.norm() == 0.0 {
        return Err(Error::DomainViolation(a, "factor is undefined at the origin"));
    }
    if a.norm() >= 1.0 {
        return Err(Error::DomainViolation(a, "zero must be interior"));
    }
    if z.norm() >= 1.0 {
        return Err(Error::DomainViolation(z, "evaluation point must be interior"));
    }
    let u = Complex64::new(a.norm(), 0.0) / a * (a - z)
        / (Complex64::new(1.0, 0.0) - a.conj() * z);
    Ok(u * (2.0 - u))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZeroPoint {
    #[serde(with = "crate::funcspace::cpair")]
    pub center: Complex64,
    #[serde(default = "default_multiplicity")]
    pub multiplicity: u32,
}

fn default_multiplicity() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroSequence {
    pub points: Vec<ZeroPoint>,
}

impl ZeroSequence {
    pub fn new(points: Vec<ZeroPoint>) -> Result<Self> {
        for p in &points {
            if p.center.norm() >= 1.0 || !p.center.is_finite() {
                return Err(Error::DomainViolation(p.center, "zero must be interior"));
            }
            if p.multiplicity == 0 {
                return Err(Error::InvalidConfig("zero multiplicity must be positive".into()));
            }
        }
        Ok(ZeroSequence { points })
    }

    /// Points repeated per multiplicity, in listed order.
    pub fn flat(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for p in &self.points {
            for _ in 0..p.multiplicity {
                out.push(p.center);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Partial product of Horowitz factors over the first n_terms entries
/// (multiplicities expand the list).
pub fn horowitz_product(seq: &ZeroSequence, z: Complex64, n_terms: usize) -> Result<Complex64> {
    let flat = seq.flat();
    if n_terms > flat.len() {
        return Err(Error::IndexOutOfRange { index: n_terms, len: flat.len() });
    }
    let mut p = Complex64::new(1.0, 0.0);
    for &a in flat.iter().take(n_terms) {
        p *= horowitz_factor(a, z)?;
    }
    Ok(p)
}

/// Radial law for infinite zero families: r_j = 1 - scale j^{-exponent},
/// indexed from j = 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialLaw {
    PowerGap { scale: f64, exponent: f64 },
}

impl RadialLaw {
    pub fn gap(&self, j: u64) -> f64 {
        match self {
            RadialLaw::PowerGap { scale, exponent } => scale * (j as f64).powf(-exponent),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleRule {
    #[default]
    Equispaced,
    SeededUniform,
}

/// JSON-facing description: an explicit point list or a radial law with an
/// angle rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZeroSequenceSpec {
    Explicit {
        points: Vec<ZeroPoint>,
    },
    Law {
        law: RadialLaw,
        count: u32,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        angles: AngleRule,
    },
}

impl ZeroSequenceSpec {
    pub fn generate(&self) -> Result<ZeroSequence> {
        match self {
            ZeroSequenceSpec::Explicit { points } => ZeroSequence::new(points.clone()),
            ZeroSequenceSpec::Law { law, count, seed, angles } => {
                let mut points = Vec::with_capacity(*count as usize);
                let mut state = seed ^ 0x1357_9bdf_2468_ace0;
                for j in 1..=(*count as u64) {
                    let r = 1.0 - law.gap(j);
                    if r <= 1e-9 {
                        return Err(Error::InvalidConfig(format!(
                            "radial law puts point {j} at or outside the origin; \
                             use a scale below 1"
                        )));
                    }
                    let theta = match angles {
                        AngleRule::Equispaced => {
                            2.0 * std::f64::consts::PI * j as f64 / *count as f64
                        }
                        AngleRule::SeededUniform => {
                            state = splitmix64(state);
                            2.0 * std::f64::consts::PI * (state >> 11) as f64
                                / (1u64 << 53) as f64
                        }
                    };
                    points.push(ZeroPoint {
                        center: Complex64::from_polar(r, theta),
                        multiplicity: 1,
                    });
                }
                ZeroSequence::new(points)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// sum over the first `terms` entries of (1 - |a_j|)^2.
    pub partial_sum: f64,
    /// Analytic bound on the remainder; None when the tail diverges.
    pub tail_bound: Option<f64>,
    pub satisfied: bool,
    pub terms: usize,
}

impl ConditionReport {
    pub fn total_estimate(&self) -> Option<f64> {
        self.tail_bound.map(|t| self.partial_sum + t)
    }
}

/// The product-convergence condition sum (1 - |a_k|)^2 < infinity.
pub fn zero_condition(spec: &ZeroSequenceSpec, horizon: usize) -> Result<ConditionReport> {
    match spec {
        ZeroSequenceSpec::Explicit { points } => {
            let s = points
                .iter()
                .map(|p| p.multiplicity as f64 * (1.0 - p.center.norm()).powi(2))
                .sum();
            Ok(ConditionReport {
                partial_sum: s,
                tail_bound: Some(0.0),
                satisfied: true,
                terms: points.len(),
            })
        }
        ZeroSequenceSpec::Law { law, .. } => {
            let RadialLaw::PowerGap { scale, exponent } = law;
            let q = 2.0 * exponent;
            let mut partial = 0.0;
            for j in 1..=horizon as u64 {
                partial += (scale * (j as f64).powf(-exponent)).powi(2);
            }
            // midpoint integral tail for the p-series
            let tail = if q > 1.0 {
                Some(scale * scale * (horizon as f64 + 0.5).powf(1.0 - q) / (q - 1.0))
            } else {
                None
            };
            Ok(ConditionReport {
                partial_sum: partial,
                tail_bound: tail,
                satisfied: q > 1.0,
                terms: horizon,
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonRow {
    pub eps: f64,
    /// sum_j (1 - r_j)^{1 + eps}, with analytic tail; None when the series
    /// diverges at this eps.
    pub sum: Option<f64>,
    /// sum / log(1/eps).
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonVerdict {
    Consistent,
    Inconsistent,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonReport {
    pub rows: Vec<EpsilonRow>,
    pub verdict: EpsilonVerdict,
    pub note: String,
}

pub const DEFAULT_EPS_GRID: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];

/// Probe the limsup criterion ratio(eps) = sum (1-r_j)^{1+eps} / log(1/eps)
/// on a grid of epsilons. The verdict reads the trend: ratios falling
/// toward zero are consistent with a limsup below 1/4, growth is
/// inconsistent; a flat profile is judged against the 1/4 threshold with
/// a ten percent indeterminate band.
pub fn epsilon_condition(
    spec: &ZeroSequenceSpec,
    eps_grid: &[f64],
    horizon: usize,
) -> Result<EpsilonReport> {
    let mut eps_sorted: Vec<f64> = eps_grid.to_vec();
    if eps_sorted.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::InvalidConfig("epsilon grid entries must lie in (0, 1)".into()));
    }
    eps_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut rows = Vec::with_capacity(eps_sorted.len());
    for &eps in &eps_sorted {
        let sum = match spec {
            ZeroSequenceSpec::Explicit { points } => Some(
                points
                    .iter()
                    .map(|p| p.multiplicity as f64 * (1.0 - p.center.norm()).powf(1.0 + eps))
                    .sum(),
            ),
            ZeroSequenceSpec::Law { law, .. } => {
                let RadialLaw::PowerGap { scale, exponent } = law;
                let q = exponent * (1.0 + eps);
                if q <= 1.0 {
                    None
                } else {
                    let mut s = 0.0;
                    for j in 1..=horizon as u64 {
                        s += (j as f64).powf(-q);
                    }
                    s += (horizon as f64 + 0.5).powf(1.0 - q) / (q - 1.0);
                    Some(scale.powf(1.0 + eps) * s)
                }
            }
        };
        let ratio = sum.map(|s| s / (1.0 / eps).ln());
        rows.push(EpsilonRow { eps, sum, ratio });
    }

    let note = "trend probe of a limsup on a finite epsilon grid; \
                indicative, not a proof"
        .to_string();
    if rows.iter().any(|r| r.ratio.is_none()) {
        // divergence at a positive epsilon forces the limsup to infinity
        return Ok(EpsilonReport { rows, verdict: EpsilonVerdict::Inconsistent, note });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio.unwrap()).collect();
    let first = ratios[0];
    let last = *ratios.last().unwrap();
    let nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let nondecreasing = ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    let verdict = if nonincreasing && last <= 0.9 * first {
        EpsilonVerdict::Consistent
    } else if nondecreasing && last >= 1.1 * first {
        EpsilonVerdict::Inconsistent
    } else {
        let plateau = 0.5 * (ratios[ratios.len() - 1] + ratios[ratios.len() - 2]);
        if plateau < 0.225 {
            EpsilonVerdict::Consistent
        } else if plateau > 0.275 {
            EpsilonVerdict::Inconsistent
        } else {
            EpsilonVerdict::Indeterminate
        }
    };
    Ok(EpsilonReport { rows, verdict, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::TargetFunction;
    use crate::orthosystem::BroSystem;
    use crate::space::SpaceSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn factor_basics() {
        let a = c(0.5, 0.0);
        assert!(horowitz_factor(a, a).unwrap().norm() < 1e-16);
        let v = horowitz_factor(a, c(0.0, 0.0)).unwrap();
        assert!((v - c(0.75, 0.0)).norm() < 1e-15);
        assert!(horowitz_factor(c(0.0, 0.0), c(0.1, 0.0)).is_err());
        assert!(horowitz_factor(c(1.0, 0.0), c(0.1, 0.0)).is_err());
    }

    #[test]
    fn factor_envelope_on_a_grid() {
        let a = c(0.5, 0.0);
        for i in 0..32 {
            for j in 0..32 {
                let r = 0.9 * (i as f64 + 0.5) / 32.0;
                let th = 2.0 * std::f64::consts::PI * j as f64 / 32.0;
                let z = Complex64::from_polar(r, th);
                let h = horowitz_factor(a, z).unwrap();
                assert!(h.norm() <= 3.0, "|H| = {} at {z}", h.norm());
            }
        }
    }

    #[test]
    fn product_vanishes_exactly_at_zeros_and_nowhere_else() {
        let seq = ZeroSequence::new(vec![
            ZeroPoint { center: c(0.5, 0.0), multiplicity: 1 },
            ZeroPoint { center: c(-0.3, 0.2), multiplicity: 2 },
        ])
        .unwrap();
        for p in &seq.points {
            let v = horowitz_product(&seq, p.center, seq.len()).unwrap();
            assert!(v.norm() < 1e-15);
        }
        let single = ZeroSequence::new(vec![ZeroPoint { center: c(0.5, 0.0), multiplicity: 1 }])
            .unwrap();
        let v = horowitz_product(&single, c(0.0, 0.0), 1).unwrap();
        assert!((v - c(0.75, 0.0)).norm() < 1e-15);
        // random interior probes stay away from zero
        let mut state = 7u64;
        for _ in 0..50 {
            state = splitmix64(state);
            let r = 0.85 * (state >> 11) as f64 / (1u64 << 53) as f64;
            state = splitmix64(state);
            let th = 2.0 * std::f64::consts::PI * (state >> 11) as f64 / (1u64 << 53) as f64;
            let z = Complex64::from_polar(r, th);
            if seq.flat().iter().any(|a| (z - a).norm() < 0.05) {
                continue;
            }
            let v = horowitz_product(&seq, z, seq.len()).unwrap();
            assert!(v.norm() > 1e-6, "unexpected near-zero at {z}");
        }
    }

    #[test]
    fn partial_products_settle_for_admissible_laws() {
        // gaps 0.9 j^{-0.75} satisfy the square-sum condition; successive
        // dyadic partial products must form a shrinking Cauchy chain
        let spec = ZeroSequenceSpec::Law {
            law: RadialLaw::PowerGap { scale: 0.9, exponent: 0.75 },
            count: 1024,
            seed: 0,
            angles: AngleRule::Equispaced,
        };
        let seq = spec.generate().unwrap();
        let z = c(0.3, 0.0);
        let p128 = horowitz_product(&seq, z, 128).unwrap();
        let p256 = horowitz_product(&seq, z, 256).unwrap();
        let p512 = horowitz_product(&seq, z, 512).unwrap();
        let p1024 = horowitz_product(&seq, z, 1024).unwrap();
        let g1 = (p256 - p128).norm();
        let g2 = (p512 - p256).norm();
        let g3 = (p1024 - p512).norm();
        // complex phases make the chain wobble term by term, so only the
        // coarse trend is monotone
        assert!(g2 < g1 && g3 < g1, "gaps {g1} {g2} {g3} not settling");
        assert!(g1 < 1e-3 && g2 < 1e-3 && g3 < 1e-3, "gaps {g1} {g2} {g3}");
    }

    #[test]
    fn square_sum_condition_reports() {
        // gaps 1/j: sum 1/j^2 = pi^2/6
        let law = ZeroSequenceSpec::Law {
            law: RadialLaw::PowerGap { scale: 1.0, exponent: 1.0 },
            count: 0,
            seed: 0,
            angles: AngleRule::Equispaced,
        };
        let rep = zero_condition(&law, 100_000).unwrap();
        assert!(rep.satisfied);
        let total = rep.total_estimate().unwrap();
        assert!(
            (total - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-6,
            "estimate {total}"
        );
        // gaps 1/sqrt(j): harmonic series
        let bad = ZeroSequenceSpec::Law {
            law: RadialLaw::PowerGap { scale: 1.0, exponent: 0.5 },
            count: 0,
            seed: 0,
            angles: AngleRule::Equispaced,
        };
        let rep = zero_condition(&bad, 10_000).unwrap();
        assert!(!rep.satisfied && rep.tail_bound.is_none());
        // finite sequences always pass
        let fin = ZeroSequenceSpec::Explicit {
            points: vec![ZeroPoint { center: c(0.99, 0.0), multiplicity: 3 }],
        };
        let rep = zero_condition(&fin, 0).unwrap();
        assert!(rep.satisfied);
        assert!((rep.partial_sum - 3.0 * 0.01f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn epsilon_probe_reads_trends() {
        let fast = ZeroSequenceSpec::Law {
            law: RadialLaw::PowerGap { scale: 1.0, exponent: 2.0 },
            count: 0,
            seed: 0,
            angles: AngleRule::Equispaced,
        };
        let rep = epsilon_condition(&fast, &DEFAULT_EPS_GRID, 100_000).unwrap();
        assert_eq!(rep.verdict, EpsilonVerdict::Consistent, "{:?}", rep.rows);
        // ratios must decrease toward zero
        let r: Vec<f64> = rep.rows.iter().map(|x| x.ratio.unwrap()).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]));

        let slow = ZeroSequenceSpec::Law {
            law: RadialLaw::PowerGap { scale: 1.0, exponent: 1.0 },
            count: 0,
            seed: 0,
            angles: AngleRule::Equispaced,
        };
        let rep = epsilon_condition(&slow, &DEFAULT_EPS_GRID, 100_000).unwrap();
        assert_eq!(rep.verdict, EpsilonVerdict::Inconsistent, "{:?}", rep.rows);

        let finite = ZeroSequenceSpec::Explicit {
            points: vec![
                ZeroPoint { center: c(0.5, 0.0), multiplicity: 1 },
                ZeroPoint { center: c(0.0, 0.9), multiplicity: 1 },
            ],
        };
        let rep = epsilon_condition(&finite, &DEFAULT_EPS_GRID, 0).unwrap();
        assert_eq!(rep.verdict, EpsilonVerdict::Consistent);
    }

    #[test]
    fn distinct_zero_systems_have_full_gram_rank() {
        let spec = ZeroSequenceSpec::Law {
            law: RadialLaw::PowerGap { scale: 0.7, exponent: 1.0 },
            count: 6,
            seed: 3,
            angles: AngleRule::SeededUniform,
        };
        let seq = spec.generate().unwrap();
        let mut sys = BroSystem::new(SpaceSpec::unweighted_disc());
        for a in seq.flat() {
            sys.extend(a).unwrap();
        }
        let g = sys.gram();
        for (k, row) in g.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn forced_system_residual_vanishes_on_its_zero_set() {
        // the unprojected remainder lies in the subspace of functions
        // vanishing at the consumed parameters
        let space = SpaceSpec::unweighted_disc();
        let pts = [c(0.3, 0.0), c(0.0, -0.4)];
        let f = TargetFunction::taylor(vec![c(1.0, 0.0), c(-0.5, 0.2), c(0.0, 0.3), c(0.25, 0.0)]);
        let mut sys = BroSystem::new(space);
        for &p in &pts {
            sys.extend(p).unwrap();
        }
        let coeffs = sys.project(&f).unwrap();
        let approx = sys.combination_mix(&coeffs).unwrap();
        let norm = f.norm_squared(&space).unwrap().sqrt();
        for &p in &pts {
            let r = f.eval(&space, p).unwrap() - approx.eval(&space, p).unwrap();
            assert!(r.norm() <= 1e-10 * norm, "residual {} at {p}", r.norm());
        }
    }
}
