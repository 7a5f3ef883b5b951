//! Target-function representations and their pairings.
//!
//! Everything the decomposition needs from a target f reduces to three
//! quantities: derivative values f^(m)(b) at interior points (these ARE the
//! inner products against generalized kernels), the squared space norm, and
//! optionally a Taylor expansion for baseline comparisons. Four concrete
//! representations cover the test corpus:
//!
//! - `Taylor`: finite power series, disc spaces only.
//! - `KernelMix`: finite combinations of unit-norm generalized kernels;
//!   norms and pairings are exact kernel algebra in both geometries.
//! - `BlackBox`: an opaque evaluator with a declared analyticity margin;
//!   derivatives come from Cauchy-circle trapezoid sums, norms from
//!   quadrature.
//! - `PowerKernel`: (1 - conj(c) z)^-(2+beta) with |c| <= 1. The center may
//!   sit ON the boundary, which no other representation supports with exact
//!   norms: for |c| = 1 the squared norm has the closed form
//!   Gamma(alpha+2) Gamma(alpha-2-2beta) / Gamma(alpha-beta)^2, finite
//!   exactly when alpha > 2 + 2 beta.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel_eval, kernel_inner, kernel_norm_squared, KernelRef};
use crate::math::{falling, gamma, ln_gamma, rising, splitmix64};
use crate::quadrature::{DiscRule, HalfPlaneRule};
use crate::space::{Geometry, SpaceSpec};

/// Serde adapter: complex scalars as [re, im] pairs.
pub mod cpair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

pub fn c64(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

/// One summand of a kernel mix: coeff times the unit-norm generalized
/// kernel at `kernel`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixTerm {
    #[serde(with = "cpair")]
    pub coeff: Complex64,
    pub kernel: KernelRef,
}

#[derive(Clone)]
pub struct BlackBoxFn {
    pub eval: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    /// Declared analyticity margin: Cauchy circles never exceed this radius.
    pub radius: f64,
    pub label: String,
}

impl fmt::Debug for BlackBoxFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBoxFn")
            .field("radius", &self.radius)
            .field("label", &self.label)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum TargetFunction {
    Taylor { coeffs: Vec<Complex64> },
    KernelMix { terms: Vec<MixTerm> },
    BlackBox(BlackBoxFn),
    PowerKernel { center: Complex64, beta: f64 },
}

/// Monomial weights ||z^k||^2 = k! Gamma(alpha+2) / Gamma(k+alpha+2),
/// generated by the exact ratio recurrence w_k = w_{k-1} k / (k+1+alpha).
/// Stays in (0, 1], so no overflow at any index.
pub(crate) fn monomial_weights(alpha: f64, len: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(len);
    let mut cur = 1.0;
    for k in 0..len {
        if k > 0 {
            cur *= k as f64 / (k as f64 + 1.0 + alpha);
        }
        w.push(cur);
    }
    w
}

/// Single-index monomial weight through log-Gamma differences; agrees with
/// the recurrence and is safe for k around 10^4 and beyond.
pub fn gamma_weight(k: u32, alpha: f64) -> f64 {
    (ln_gamma(k as f64 + 1.0) + ln_gamma(alpha + 2.0) - ln_gamma(k as f64 + alpha + 2.0)).exp()
}

const CAUCHY_NODES: usize = 256;

impl TargetFunction {
    pub fn taylor(coeffs: Vec<Complex64>) -> Self {
        TargetFunction::Taylor { coeffs }
    }

    pub fn kernel_mix(terms: Vec<MixTerm>) -> Self {
        TargetFunction::KernelMix { terms }
    }

    pub fn black_box(
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        radius: f64,
        label: impl Into<String>,
    ) -> Self {
        TargetFunction::BlackBox(BlackBoxFn { eval: Arc::new(eval), radius, label: label.into() })
    }

    pub fn power_kernel(center: Complex64, beta: f64) -> Result<Self> {
        if center.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidTarget(format!(
                "power-kernel center {center} outside the closed disc"
            )));
        }
        Ok(TargetFunction::PowerKernel { center, beta })
    }

    pub fn label(&self) -> String {
        match self {
            TargetFunction::Taylor { coeffs } => format!("taylor[deg {}]", coeffs.len().saturating_sub(1)),
            TargetFunction::KernelMix { terms } => format!("kernel-mix[{} terms]", terms.len()),
            TargetFunction::BlackBox(b) => format!("black-box[{}]", b.label),
            TargetFunction::PowerKernel { center, beta } => {
                format!("power-kernel[c={center}, beta={beta}]")
            }
        }
    }

    /// Sum of |coeff| over mix terms; the constant in the decay bound
    /// M / sqrt(k). Only kernel mixes carry it.
    pub fn mix_sum_abs(&self) -> Option<f64> {
        match self {
            TargetFunction::KernelMix { terms } => {
                Some(terms.iter().map(|t| t.coeff.norm()).sum())
            }
            _ => None,
        }
    }

    fn require_disc(&self, space: &SpaceSpec, what: &str) -> Result<()> {
        if space.is_disc() {
            Ok(())
        } else {
            Err(Error::InvalidTarget(format!("{what} targets are disc-only")))
        }
    }

    pub fn eval(&self, space: &SpaceSpec, z: Complex64) -> Result<Complex64> {
        space.check_point(z)?;
        match self {
            TargetFunction::Taylor { coeffs } => {
                self.require_disc(space, "taylor")?;
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    acc = acc * z + c;
                }
                Ok(acc)
            }
            TargetFunction::KernelMix { terms } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    let n2 = kernel_norm_squared(space, &t.kernel)?;
                    acc += t.coeff * kernel_eval(space, &t.kernel, z)? / n2.sqrt();
                }
                Ok(acc)
            }
            TargetFunction::BlackBox(b) => Ok((b.eval)(z)),
            TargetFunction::PowerKernel { center, beta } => {
                self.require_disc(space, "power-kernel")?;
                let base = Complex64::new(1.0, 0.0) - center.conj() * z;
                Ok(base.powf(-(2.0 + beta)))
            }
        }
    }

    /// f^(m)(b) at an interior point; equals the pairing <f, k~_{b,m}>.
    pub fn eval_deriv(&self, space: &SpaceSpec, b: Complex64, m: u32) -> Result<Complex64> {
        space.check_point(b)?;
        match self {
            TargetFunction::Taylor { coeffs } => {
                self.require_disc(space, "taylor")?;
                if m as usize >= coeffs.len() {
                    return Err(Error::DerivOrder {
                        order: m,
                        reason: format!(
                            "series has length {}; higher derivatives are not represented",
                            coeffs.len()
                        ),
                    });
                }
                let mut acc = Complex64::new(0.0, 0.0);
                let mut pw = Complex64::new(1.0, 0.0);
                for (k, ck) in coeffs.iter().enumerate().skip(m as usize) {
                    acc += falling(k as u32, m) * ck * pw;
                    pw *= b;
                }
                Ok(acc)
            }
            TargetFunction::KernelMix { terms } => {
                let probe = KernelRef::new(b, m);
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    let n2 = kernel_norm_squared(space, &t.kernel)?;
                    acc += t.coeff * kernel_inner(space, &t.kernel, &probe)? / n2.sqrt();
                }
                Ok(acc)
            }
            TargetFunction::BlackBox(b_fn) => {
                if m == 0 {
                    return Ok((b_fn.eval)(b));
                }
                let rho = (0.5 * space.boundary_distance(b)).min(b_fn.radius);
                if rho.is_nan() || rho <= 0.0 {
                    return Err(Error::CauchyCircle { center: b, radius: rho });
                }
                // m!/(2 pi rho^m) int f(b + rho e^{i t}) e^{-i m t} dt
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..CAUCHY_NODES {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / CAUCHY_NODES as f64;
                    let zeta = b + Complex64::from_polar(rho, t);
                    space.check_point(zeta).map_err(|_| Error::CauchyCircle {
                        center: b,
                        radius: rho,
                    })?;
                    acc += (b_fn.eval)(zeta) * Complex64::from_polar(1.0, -(m as f64) * t);
                }
                let scale = crate::math::factorial(m) / (CAUCHY_NODES as f64 * rho.powi(m as i32));
                Ok(acc * scale)
            }
            TargetFunction::PowerKernel { center, beta } => {
                self.require_disc(space, "power-kernel")?;
                let p = 2.0 + beta;
                let base = Complex64::new(1.0, 0.0) - center.conj() * b;
                Ok(rising(p, m) * center.conj().powu(m) * base.powf(-(p + m as f64)))
            }
        }
    }

    /// Squared norm in the given space.
    pub fn norm_squared(&self, space: &SpaceSpec) -> Result<f64> {
        match self {
            TargetFunction::Taylor { coeffs } => {
                self.require_disc(space, "taylor")?;
                let w = monomial_weights(space.alpha, coeffs.len());
                Ok(coeffs.iter().zip(&w).map(|(c, w)| w * c.norm_sqr()).sum())
            }
            TargetFunction::KernelMix { terms } => {
                let mut acc = Complex64::new(0.0, 0.0);
                let norms: Result<Vec<f64>> = terms
                    .iter()
                    .map(|t| Ok(kernel_norm_squared(space, &t.kernel)?.sqrt()))
                    .collect();
                let norms = norms?;
                for (i, ti) in terms.iter().enumerate() {
                    for (j, tj) in terms.iter().enumerate() {
                        let g = kernel_inner(space, &ti.kernel, &tj.kernel)?;
                        acc += ti.coeff * tj.coeff.conj() * g / (norms[i] * norms[j]);
                    }
                }
                Ok(acc.re)
            }
            TargetFunction::BlackBox(b) => match space.geometry {
                Geometry::Disc => {
                    let rule = DiscRule::new(
                        space,
                        crate::quadrature::DEFAULT_RADIAL_NODES,
                        crate::quadrature::DEFAULT_ANGULAR_NODES,
                    );
                    Ok(rule.integrate_abs2(|z| (b.eval)(z)))
                }
                Geometry::HalfPlane => {
                    let rule = HalfPlaneRule::new(
                        crate::quadrature::DEFAULT_HP_NODES,
                        crate::quadrature::DEFAULT_HP_NODES,
                        crate::quadrature::DEFAULT_HP_SCALE,
                    );
                    let v = rule.inner(|z| (b.eval)(z), |z| (b.eval)(z));
                    Ok(v.re)
                }
            },
            TargetFunction::PowerKernel { center, beta } => {
                self.require_disc(space, "power-kernel")?;
                let alpha = space.alpha;
                let r2 = center.norm_sqr();
                if r2 < 1.0 - 1e-12 {
                    // sum of [rising(2+b,k)/k!]^2 r^{2k} w_k via the term ratio
                    let mut term = 1.0f64;
                    let mut sum = 1.0f64;
                    let mut k = 0u64;
                    while k < 2_000_000 {
                        let kf = k as f64;
                        let ratio =
                            (2.0 + beta + kf).powi(2) * r2 / ((kf + 1.0) * (kf + 2.0 + alpha));
                        term *= ratio;
                        sum += term;
                        if term < 1e-17 * sum && k > 8 {
                            return Ok(sum);
                        }
                        k += 1;
                    }
                    Err(Error::NormDiverges(
                        "power-kernel norm series did not settle".into(),
                    ))
                } else {
                    // boundary center: finite iff alpha > 2 + 2 beta
                    if alpha <= 2.0 + 2.0 * beta {
                        return Err(Error::NormDiverges(format!(
                            "boundary power-kernel with beta={beta} lies outside alpha={alpha}"
                        )));
                    }
                    Ok(gamma(alpha + 2.0) * gamma(alpha - 2.0 - 2.0 * beta)
                        / gamma(alpha - beta).powi(2))
                }
            }
        }
    }

    /// Pairing <f, k~_b> with a generalized kernel; just the derivative.
    pub fn project_on_kernel(&self, space: &SpaceSpec, b: &KernelRef) -> Result<Complex64> {
        self.eval_deriv(space, b.center, b.deriv_order)
    }

    /// Taylor coefficients up to an internally chosen cutoff with relative
    /// tail below roughly 1e-12. Baseline comparisons need this; black-box
    /// targets and boundary-centered power kernels are not convertible.
    pub fn to_taylor(&self, space: &SpaceSpec) -> Result<Vec<Complex64>> {
        self.require_disc(space, "taylor conversion")?;
        match self {
            TargetFunction::Taylor { coeffs } => Ok(coeffs.clone()),
            TargetFunction::KernelMix { terms } => {
                let max_r = terms
                    .iter()
                    .map(|t| t.kernel.center.norm())
                    .fold(0.0f64, f64::max);
                let len = series_len_for_radius(max_r);
                let s = 2.0 + space.alpha;
                let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
                for t in terms {
                    let m = t.kernel.deriv_order as usize;
                    let ac = t.kernel.center.conj();
                    let scale =
                        t.coeff * rising(s, t.kernel.deriv_order)
                            / kernel_norm_squared(space, &t.kernel)?.sqrt();
                    // k~(z) = rising(s,m) z^m sum_j rising(s+m,j)/j! conj(a)^j z^j
                    let mut pw = Complex64::new(1.0, 0.0);
                    for j in 0..len - m {
                        let w = rising(s + m as f64, j as u32) / crate::math::factorial(j as u32);
                        coeffs[j + m] += scale * w * pw;
                        pw *= ac;
                    }
                }
                Ok(coeffs)
            }
            TargetFunction::PowerKernel { center, beta } => {
                let r = center.norm();
                if r > 1.0 - 1e-9 {
                    return Err(Error::InvalidTarget(
                        "boundary power-kernel has no convergent coefficient truncation".into(),
                    ));
                }
                let len = series_len_for_radius(r);
                let p = 2.0 + beta;
                let mut coeffs = Vec::with_capacity(len);
                let mut cur = Complex64::new(1.0, 0.0);
                for k in 0..len {
                    coeffs.push(cur);
                    cur *= (p + k as f64) / (k as f64 + 1.0) * center.conj();
                }
                Ok(coeffs)
            }
            TargetFunction::BlackBox(_) => Err(Error::InvalidTarget(
                "black-box targets have no exact coefficient expansion".into(),
            )),
        }
    }
}

/// Truncation length with coefficient tail around 1e-13 for geometric decay
/// at the given radius.
fn series_len_for_radius(r: f64) -> usize {
    if r < 1e-8 {
        return 32;
    }
    let needed = (-30.0 / r.ln()).ceil() as usize;
    needed.clamp(32, 8192)
}

/// Exact inner product <f, g> where the pair admits one: any representation
/// against a kernel mix (pairings are derivatives), series against series,
/// and series against interior power kernels.
pub fn inner_product(
    space: &SpaceSpec,
    f: &TargetFunction,
    g: &TargetFunction,
) -> Result<Complex64> {
    match (f, g) {
        (_, TargetFunction::KernelMix { terms }) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                let n = kernel_norm_squared(space, &t.kernel)?.sqrt();
                let pair = f.project_on_kernel(space, &t.kernel)?;
                acc += t.coeff.conj() * pair / n;
            }
            Ok(acc)
        }
        (TargetFunction::KernelMix { .. }, _) => Ok(inner_product(space, g, f)?.conj()),
        (TargetFunction::Taylor { coeffs: a }, TargetFunction::Taylor { coeffs: b }) => {
            let n = a.len().min(b.len());
            let w = monomial_weights(space.alpha, n);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += w[k] * a[k] * b[k].conj();
            }
            Ok(acc)
        }
        (TargetFunction::Taylor { coeffs }, TargetFunction::PowerKernel { center, beta }) => {
            // finite sum over the series coefficients; exact even for
            // boundary centers
            let w = monomial_weights(space.alpha, coeffs.len());
            let p = 2.0 + beta;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut g_k = Complex64::new(1.0, 0.0);
            for k in 0..coeffs.len() {
                acc += w[k] * coeffs[k] * g_k.conj();
                g_k *= (p + k as f64) / (k as f64 + 1.0) * center.conj();
            }
            Ok(acc)
        }
        (TargetFunction::PowerKernel { .. }, TargetFunction::Taylor { .. }) => {
            Ok(inner_product(space, g, f)?.conj())
        }
        _ => Err(Error::InvalidTarget(format!(
            "no exact pairing between {} and {}; integrate numerically instead",
            f.label(),
            g.label()
        ))),
    }
}

// ---------------------------------------------------------------------------
// JSON-facing target schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixTermSpec {
    pub coeff: [f64; 2],
    pub center: [f64; 2],
    #[serde(default)]
    pub deriv_order: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinName {
    /// (1 - conj(center) z)^-(2+beta); center defaults to the boundary
    /// point 1, giving the singular family f_beta.
    FBeta,
    /// Finite Blaschke product from an explicit or seeded zero list.
    Blaschke,
    /// sum_{k<=degree} z^k / (k+1)^exponent.
    PolyDecay,
    /// cos(t^2) on [0, 2 pi), embedded through its nonnegative-frequency
    /// trigonometric coefficients reinterpreted as Taylor coefficients.
    Chirp,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TargetSpec {
    Taylor {
        coeffs: Vec<[f64; 2]>,
    },
    KernelMix {
        terms: Vec<MixTermSpec>,
    },
    Builtin {
        name: BuiltinName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeros: Option<Vec<[f64; 2]>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seeded_zeros: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncate: Option<u32>,
    },
}

pub const CHIRP_DEFAULT_SAMPLES: u32 = 1024;
pub const CHIRP_DEFAULT_TRUNCATE: u32 = 256;

impl TargetSpec {
    /// Materialize the target. `seed` only affects seeded builtin variants.
    pub fn build(&self, seed: u64) -> Result<TargetFunction> {
        match self {
            TargetSpec::Taylor { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidConfig("empty coefficient list".into()));
                }
                Ok(TargetFunction::taylor(coeffs.iter().map(|&p| c64(p)).collect()))
            }
            TargetSpec::KernelMix { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidConfig("empty kernel mix".into()));
                }
                Ok(TargetFunction::kernel_mix(
                    terms
                        .iter()
                        .map(|t| MixTerm {
                            coeff: c64(t.coeff),
                            kernel: KernelRef::new(c64(t.center), t.deriv_order),
                        })
                        .collect(),
                ))
            }
            TargetSpec::Builtin { name, beta, center, zeros, seeded_zeros, exponent, degree, samples, truncate } => {
                match name {
                    BuiltinName::FBeta => {
                        let beta = beta.ok_or_else(|| {
                            Error::InvalidConfig("f_beta requires `beta`".into())
                        })?;
                        let center =
                            center.map(c64).unwrap_or_else(|| Complex64::new(1.0, 0.0));
                        TargetFunction::power_kernel(center, beta)
                    }
                    BuiltinName::Blaschke => {
                        let zs: Vec<Complex64> = if let Some(zs) = zeros {
                            zs.iter().map(|&p| c64(p)).collect()
                        } else if let Some(n) = seeded_zeros {
                            seeded_blaschke_zeros(*n, seed)
                        } else {
                            return Err(Error::InvalidConfig(
                                "blaschke requires `zeros` or `seeded_zeros`".into(),
                            ));
                        };
                        blaschke_taylor(&zs)
                    }
                    BuiltinName::PolyDecay => {
                        let p = exponent.unwrap_or(2.0);
                        let d = degree.unwrap_or(10) as usize;
                        let coeffs = (0..=d)
                            .map(|k| Complex64::new(1.0 / ((k + 1) as f64).powf(p), 0.0))
                            .collect();
                        Ok(TargetFunction::taylor(coeffs))
                    }
                    BuiltinName::Chirp => {
                        let n = samples.unwrap_or(CHIRP_DEFAULT_SAMPLES) as usize;
                        let k_max = truncate.unwrap_or(CHIRP_DEFAULT_TRUNCATE) as usize;
                        if k_max * 2 >= n {
                            return Err(Error::InvalidConfig(
                                "chirp truncation must stay below half the sample count".into(),
                            ));
                        }
                        Ok(TargetFunction::taylor(chirp_coefficients(n, k_max)))
                    }
                }
            }
        }
    }
}

/// Deterministic zero scatter for seeded Blaschke targets: area-uniform
/// over the disc, capped at radius 0.97 so the series stays truncatable.
fn seeded_blaschke_zeros(n: u32, seed: u64) -> Vec<Complex64> {
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut unit = || {
        state = splitmix64(state);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n)
        .map(|_| {
            let r = 0.97 * unit().sqrt();
            let th = 2.0 * std::f64::consts::PI * unit();
            Complex64::from_polar(r, th)
        })
        .collect()
}

/// Expand prod_k (z - a_k)/(1 - conj(a_k) z) into a truncated power series.
fn blaschke_taylor(zeros: &[Complex64]) -> Result<TargetFunction> {
    if zeros.is_empty() {
        return Err(Error::InvalidConfig("blaschke needs at least one zero".into()));
    }
    let max_r = zeros.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if max_r >= 1.0 - 1e-9 {
        return Err(Error::InvalidConfig("blaschke zeros must be interior".into()));
    }
    let len = series_len_for_radius(max_r);
    let mut series = vec![Complex64::new(0.0, 0.0); len];
    series[0] = Complex64::new(1.0, 0.0);
    let mut scratch = vec![Complex64::new(0.0, 0.0); len];
    for &a in zeros {
        // multiply by (z - a)
        scratch[0] = -a * series[0];
        for j in 1..len {
            scratch[j] = series[j - 1] - a * series[j];
        }
        // multiply by sum_j conj(a)^j z^j
        let ac = a.conj();
        for (j, out) in series.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut pw = Complex64::new(1.0, 0.0);
            // descending i keeps the power update cheap: pw = conj(a)^(j-i)
            for i in (0..=j).rev() {
                acc += scratch[i] * pw;
                pw *= ac;
            }
            *out = acc;
        }
    }
    Ok(TargetFunction::taylor(series))
}

/// Nonnegative-frequency trigonometric coefficients of cos(t^2) sampled on
/// [0, 2 pi), reinterpreted as Taylor coefficients (analytic-signal
/// embedding): c_0 is the mean, c_k = (2/N) sum_j g_j e^{-2 pi i j k / N}.
fn chirp_coefficients(n: usize, k_max: usize) -> Vec<Complex64> {
    let g: Vec<f64> = (0..n)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            (t * t).cos()
        })
        .collect();
    let mut coeffs = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &gj) in g.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
            acc += gj * Complex64::from_polar(1.0, phase);
        }
        let scale = if k == 0 { 1.0 } else { 2.0 } / n as f64;
        coeffs.push(acc * scale);
    }
    coeffs
}
