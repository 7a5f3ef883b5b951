//! Greedy kernel decomposition with maximal selection.
//!
//! Each step picks the parameter whose residualized, renormalized kernel
//! direction captures the most of what is left of the target. Candidates
//! come from two pools:
//!
//! - fresh grid points, contributing order-zero kernels;
//! - every distinct center already in the system, contributing its
//!   next-order derivative kernel. This is the limit object of a fresh
//!   point sliding into an occupied center, so including it makes the
//!   supremum over the closed candidate set attainable.
//!
//! Fresh candidates inside a small exclusion radius around occupied centers
//! are ceded to the derivative candidate; the objective is continuous
//! there, and the substitution keeps the Gram extension well conditioned.
//!
//! The selected objective value is |<R, u_b>| where R is the current
//! residual and u_b the unit vector the candidate adds to the span; the
//! captured energy of a step is its square.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::TargetFunction;
use crate::kernels::{kernel_norm_squared, KernelRef};
use crate::orthosystem::{BroSystem, TAU_SPAN};
use crate::space::{Geometry, SpaceSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    /// Radial count on the disc; vertical count on the half plane.
    pub n_radial: usize,
    /// Angular count on the disc; horizontal count on the half plane.
    pub n_angular: usize,
    /// Disc: closest approach to the rim, as a gap 1 - r. Half plane:
    /// the shallowest height above the real axis.
    pub boundary_margin: f64,
    /// Half plane only: the grid is rectangular in (Re, log Im) over
    /// [-extent, extent] x [boundary_margin, extent]. The disc ignores it.
    #[serde(default = "default_extent")]
    pub extent: f64,
}

fn default_extent() -> f64 {
    8.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub grid: GridSpec,
    /// Local search passes around the best fresh grid point; each pass
    /// shrinks the window by a factor of four.
    pub refine_rounds: usize,
    /// A center never holds more kernels than this, so derivative orders
    /// stay below it.
    pub max_multiplicity: u32,
    /// Fresh candidates closer than this to an occupied center are ceded
    /// to the derivative candidate. Near an occupied center the fresh
    /// objective is a ratio of two vanishing quantities, so inside this
    /// band its floating-point noise can exceed its true gap to the
    /// derivative limit; the band keeps the comparison meaningful.
    pub snap_radius: f64,
}

impl SelectionConfig {
    pub fn for_space(space: &SpaceSpec) -> Self {
        let (grid, refine_rounds) = match space.geometry {
            Geometry::Disc => (
                GridSpec { n_radial: 64, n_angular: 256, boundary_margin: 1e-3, extent: 1.0 },
                6,
            ),
            Geometry::HalfPlane => (
                GridSpec { n_radial: 48, n_angular: 96, boundary_margin: 1e-3, extent: 8.0 },
                8,
            ),
        };
        SelectionConfig { grid, refine_rounds, max_multiplicity: 8, snap_radius: 1e-4 }
    }
}

/// Candidate points plus a local spacing estimate used to size the
/// refinement window.
struct CandidateGrid {
    points: Vec<Complex64>,
    local_h: Vec<f64>,
}

fn build_grid(space: &SpaceSpec, grid: &GridSpec) -> CandidateGrid {
    let mut points = Vec::new();
    let mut local_h = Vec::new();
    match space.geometry {
        Geometry::Disc => {
            let n_r = grid.n_radial.max(2);
            let n_a = grid.n_angular.max(8);
            let radii: Vec<f64> = (0..n_r)
                .map(|i| 1.0 - grid.boundary_margin.powf((i + 1) as f64 / n_r as f64))
                .collect();
            points.push(Complex64::new(0.0, 0.0));
            local_h.push(0.75 * radii[0].max(1e-3));
            for (i, &r) in radii.iter().enumerate() {
                let dr = if i + 1 < n_r { radii[i + 1] - r } else { r - radii[i - 1] };
                let arc = r * 2.0 * std::f64::consts::PI / n_a as f64;
                let h = 0.75 * dr.max(arc);
                for j in 0..n_a {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / n_a as f64;
                    points.push(Complex64::from_polar(r, th));
                    local_h.push(h);
                }
            }
        }
        Geometry::HalfPlane => {
            // rectangular in (Re, log Im) over [-R, R] x [delta, R]
            let n_y = grid.n_radial.max(2);
            let n_x = grid.n_angular.max(2);
            let r = grid.extent;
            let delta = grid.boundary_margin.min(r / 10.0);
            let dlog = (r / delta).ln() / n_y as f64;
            let dx = 2.0 * r / n_x as f64;
            for i in 0..n_y {
                let y = delta * ((i as f64 + 0.5) * dlog).exp();
                let h = 0.75 * dx.max(y * dlog);
                for j in 0..n_x {
                    let x = -r + (j as f64 + 0.5) * dx;
                    points.push(Complex64::new(x, y));
                    local_h.push(h);
                }
            }
        }
    }
    CandidateGrid { points, local_h }
}

/// |<R, u_b>| for the candidate kernel, where R = f - sum_k c_k B_k and
/// u_b is the unit residualized direction of e~_b. Returns 0 when the
/// candidate adds no usable direction.
pub fn selection_objective(
    sys: &BroSystem,
    f: &TargetFunction,
    f_coeffs: &[Complex64],
    b: &KernelRef,
) -> Result<f64> {
    let space = sys.space();
    let nb = kernel_norm_squared(space, b)?.sqrt();
    let pair = f.eval_deriv(space, b.center, b.deriv_order)? / nb;
    let proj = sys.kernel_projections(b)?;
    let mut num = pair;
    let mut den2 = 1.0;
    for (p, c) in proj.iter().zip(f_coeffs) {
        num -= p.conj() * c;
        den2 -= p.norm_sqr();
    }
    if den2 <= TAU_SPAN {
        return Ok(0.0);
    }
    Ok(num.norm() / den2.sqrt())
}

/// Objective values at caller-chosen order-zero probes, for tracing how
/// the selection landscape behaves toward the boundary.
pub fn objective_profile(
    sys: &BroSystem,
    f: &TargetFunction,
    f_coeffs: &[Complex64],
    probes: &[Complex64],
) -> Result<Vec<f64>> {
    probes
        .iter()
        .map(|&b| selection_objective(sys, f, f_coeffs, &KernelRef::point(b)))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct Selected {
    pub kernel: KernelRef,
    pub objective: f64,
}

/// Deterministic preference: larger value, then smaller modulus, then
/// smaller argument.
fn prefer(value: f64, at: Complex64, best_value: f64, best_at: Complex64) -> bool {
    if value != best_value {
        return value > best_value;
    }
    let (r, rb) = (at.norm(), best_at.norm());
    if r != rb {
        return r < rb;
    }
    at.arg() < best_at.arg()
}

fn distinct_centers(sys: &BroSystem) -> Vec<(Complex64, u32)> {
    let mut centers: Vec<(Complex64, u32)> = Vec::new();
    for r in sys.refs() {
        match centers.iter_mut().find(|(c, _)| (*c - r.center).norm() == 0.0) {
            Some((_, count)) => *count += 1,
            None => centers.push((r.center, 1)),
        }
    }
    centers
}

pub fn select_next(
    sys: &BroSystem,
    f: &TargetFunction,
    f_coeffs: &[Complex64],
    cfg: &SelectionConfig,
) -> Result<Selected> {
    let space = *sys.space();
    let centers = distinct_centers(sys);
    let excluded = |p: Complex64| {
        centers.iter().any(|(c, _)| (p - c).norm() <= cfg.snap_radius)
    };

    let grid = build_grid(&space, &cfg.grid);
    let fresh: Vec<(f64, Complex64, f64)> = grid
        .points
        .par_iter()
        .zip(grid.local_h.par_iter())
        .map(|(&p, &h)| -> Result<Option<(f64, Complex64, f64)>> {
            if !space.contains(p) || excluded(p) {
                return Ok(None);
            }
            let v = selection_objective(sys, f, f_coeffs, &KernelRef::point(p))?;
            Ok(Some((v, p, h)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut best_fresh: Option<(f64, Complex64, f64)> = None;
    for &(v, p, h) in &fresh {
        if best_fresh.is_none_or(|(bv, bp, _)| prefer(v, p, bv, bp)) {
            best_fresh = Some((v, p, h));
        }
    }

    // local polish around the fresh winner
    if let Some((mut bv, mut bp, h0)) = best_fresh {
        let mut h = h0;
        for _ in 0..cfg.refine_rounds {
            let mut samples = Vec::with_capacity(24);
            for i in -2i32..=2 {
                for j in -2i32..=2 {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let q = bp + Complex64::new(i as f64 * h / 2.0, j as f64 * h / 2.0);
                    if space.contains(q) && !excluded(q) {
                        samples.push(q);
                    }
                }
            }
            let vals: Vec<(f64, Complex64)> = samples
                .par_iter()
                .map(|&q| -> Result<(f64, Complex64)> {
                    Ok((selection_objective(sys, f, f_coeffs, &KernelRef::point(q))?, q))
                })
                .collect::<Result<Vec<_>>>()?;
            for (v, q) in vals {
                if prefer(v, q, bv, bp) {
                    bv = v;
                    bp = q;
                }
            }
            h /= 4.0;
        }
        best_fresh = Some((bv, bp, h0));
    }

    // derivative candidates at occupied centers
    let mut best_deriv: Option<(f64, KernelRef)> = None;
    for &(c, count) in &centers {
        if count >= cfg.max_multiplicity {
            continue;
        }
        let cand = KernelRef::new(c, count);
        match selection_objective(sys, f, f_coeffs, &cand) {
            Ok(v) => {
                if best_deriv.is_none_or(|(bv, br)| prefer(v, c, bv, br.center)) {
                    best_deriv = Some((v, cand));
                }
            }
            // a representation that cannot produce this derivative order
            // simply withdraws the candidate
            Err(Error::DerivOrder { .. }) => continue,
            Err(e) => return Err(e),
        }
    }

    let fresh_pick = best_fresh.map(|(v, p, _)| (v, sys.resolve(p)));
    let pick = match (fresh_pick, best_deriv) {
        (Some((fv, fr)), Some((dv, dr))) => {
            if prefer(dv, dr.center, fv, fr.center) {
                (dv, dr)
            } else {
                (fv, fr)
            }
        }
        (Some(f), None) => f,
        (None, Some(d)) => d,
        (None, None) => {
            return Err(Error::SelectionExhausted("no admissible candidates".into()))
        }
    };
    if pick.0.is_nan() || pick.0 <= 0.0 {
        return Err(Error::SelectionExhausted(
            "no candidate captures any residual energy".into(),
        ));
    }
    Ok(Selected { kernel: pick.1, objective: pick.0 })
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    #[serde(with = "crate::funcspace::cpair")]
    pub param: Complex64,
    pub deriv_order: u32,
    #[serde(with = "crate::funcspace::cpair")]
    pub coeff: Complex64,
    pub objective: f64,
    /// ||f - partial sum||^2 after this step.
    pub residual_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxTerms,
    ResidualBelowTolerance,
    CoefficientUnderflow,
    Exhausted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecomposeConfig {
    pub selection: SelectionConfig,
    pub max_terms: usize,
    /// Stop once the residual energy drops below this times the target
    /// energy.
    pub residual_rel_tol: f64,
}

impl DecomposeConfig {
    pub fn for_space(space: &SpaceSpec) -> Self {
        DecomposeConfig {
            selection: SelectionConfig::for_space(space),
            max_terms: 30,
            residual_rel_tol: 1e-22,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub space: SpaceSpec,
    pub system: BroSystem,
    /// <f, B_k> for each retained step.
    pub coeffs: Vec<Complex64>,
    pub records: Vec<IterationRecord>,
    pub norm_squared: f64,
    /// sum |c_l| when the target is a kernel mix; feeds the decay bound.
    pub mix_sum_abs: Option<f64>,
    pub stop: StopReason,
}

impl Decomposition {
    pub fn approximation(&self) -> Result<TargetFunction> {
        self.system.combination_mix(&self.coeffs)
    }

    pub fn eval_approx(&self, z: Complex64) -> Result<Complex64> {
        self.approximation()?.eval(&self.space, z)
    }

    /// ||f_k|| for k = 1..=n+1 where f_1 = f and f_{k+1} is the residual
    /// after k extractions.
    pub fn residual_norms(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.records.len() + 1);
        out.push(self.norm_squared.max(0.0).sqrt());
        for r in &self.records {
            out.push(r.residual_energy.max(0.0).sqrt());
        }
        out
    }

    /// Theoretical decay ceiling M / sqrt(k) for mix targets: f_k, the
    /// residual entering step k, satisfies ||f_k|| <= M / sqrt(k).
    pub fn rate_bound(&self, k: usize) -> Result<f64> {
        let m = self.mix_sum_abs.ok_or(Error::MixBoundMissing)?;
        if k == 0 {
            return Err(Error::IndexOutOfRange { index: 0, len: self.records.len() + 1 });
        }
        Ok(m / (k as f64).sqrt())
    }
}

pub fn decompose(
    space: &SpaceSpec,
    f: &TargetFunction,
    cfg: &DecomposeConfig,
) -> Result<Decomposition> {
    let norm_squared = f.norm_squared(space)?;
    if !norm_squared.is_finite() || norm_squared <= 0.0 {
        return Err(Error::InvalidTarget(format!(
            "target energy {norm_squared} is not decomposable"
        )));
    }
    let mut sys = BroSystem::new(*space);
    let mut coeffs: Vec<Complex64> = Vec::new();
    let mut records = Vec::new();
    let mut stop = StopReason::MaxTerms;
    for k in 1..=cfg.max_terms {
        let sel = match select_next(&sys, f, &coeffs, &cfg.selection) {
            Ok(s) => s,
            Err(Error::SelectionExhausted(_)) => {
                stop = StopReason::Exhausted;
                break;
            }
            Err(e) => return Err(e),
        };
        match sys.extend_ref(sel.kernel) {
            Ok(()) => {}
            Err(Error::DegenerateExtension { .. }) => {
                stop = StopReason::Exhausted;
                break;
            }
            Err(e) => return Err(e),
        }
        coeffs = sys.project(f)?;
        let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let residual_energy = norm_squared - captured;
        let c_k = coeffs[k - 1];
        records.push(IterationRecord {
            k,
            param: sel.kernel.center,
            deriv_order: sel.kernel.deriv_order,
            coeff: c_k,
            objective: sel.objective,
            residual_energy,
        });
        if residual_energy <= cfg.residual_rel_tol * norm_squared + 1e-30 {
            stop = StopReason::ResidualBelowTolerance;
            break;
        }
        if c_k.norm_sqr() <= 1e-24 * norm_squared {
            stop = StopReason::CoefficientUnderflow;
            break;
        }
    }
    Ok(Decomposition {
        space: *space,
        system: sys,
        coeffs,
        records,
        norm_squared,
        mix_sum_abs: f.mix_sum_abs(),
        stop,
    })
}
