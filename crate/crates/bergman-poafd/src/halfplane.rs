//! Upper half-plane specialization.
//!
//! The space is the unweighted Bergman space over Im z > 0 with the
//! area measure normalized by pi. Its reproducing kernel is
//! k_a(z) = -(z - conj a)^{-2} with ||k_a||^2 = (2 Im a)^{-2}, and the
//! parameter-derivative family is -(m+1)! (z - conj a)^{-(m+2)}. All
//! kernel arithmetic is shared with the disc through [`SpaceSpec`]; this
//! module adds the half-plane entry points, the boundary band used to
//! fence selection away from the real axis and infinity, and a decompose
//! wrapper whose candidate grid is rectangular in (Re, log Im).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::TargetFunction;
use crate::kernels::{kernel_eval, KernelRef};
use crate::poafd::{decompose, DecomposeConfig, Decomposition};
use crate::space::SpaceSpec;

/// Kernel or derivative-kernel value on the half plane.
pub fn hp_kernel_eval(r: &KernelRef, z: Complex64) -> Result<Complex64> {
    kernel_eval(&SpaceSpec::half_plane(), r, z)
}

/// The excluded region B(delta, R): closer to the real axis than delta,
/// or farther from the origin than R. Selection energy drains out of this
/// band, so candidate searches stay in its complement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryBand {
    pub delta: f64,
    pub radius: f64,
}

pub fn hp_boundary_band(delta: f64, radius: f64) -> Result<BoundaryBand> {
    if !delta.is_finite() || !radius.is_finite() || delta <= 0.0 || radius <= delta {
        return Err(Error::InvalidConfig(format!(
            "boundary band needs 0 < delta < R, got delta {delta}, R {radius}"
        )));
    }
    Ok(BoundaryBand { delta, radius })
}

impl BoundaryBand {
    /// True when b lies in the band (and is therefore excluded).
    pub fn contains(&self, b: Complex64) -> bool {
        b.im < self.delta || b.norm() > self.radius
    }

    /// True for admissible candidates: in the open half plane, outside
    /// the band.
    pub fn admits(&self, b: Complex64) -> bool {
        b.im > 0.0 && !self.contains(b)
    }
}

/// Greedy decomposition over the half plane with the default
/// (Re, log Im) candidate grid.
pub fn hp_decompose(f: &TargetFunction, max_terms: usize) -> Result<Decomposition> {
    let space = SpaceSpec::half_plane();
    let cfg = DecomposeConfig { max_terms, ..DecomposeConfig::for_space(&space) };
    decompose(&space, f, &cfg)
}

pub fn hp_decompose_with(f: &TargetFunction, cfg: &DecomposeConfig) -> Result<Decomposition> {
    decompose(&SpaceSpec::half_plane(), f, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::MixTerm;
    use crate::kernels::kernel_inner;
    use crate::orthosystem::BroSystem;
    use crate::poafd::{objective_profile, select_next, SelectionConfig};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_diagonal_values() {
        let a = c(0.0, 1.0);
        let v = hp_kernel_eval(&KernelRef::point(a), a).unwrap();
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
        let b = c(0.0, 2.0);
        let v = hp_kernel_eval(&KernelRef::point(b), b).unwrap();
        assert!((v - c(0.0625, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_kernel_matches_a_parameter_difference_quotient() {
        // the order-1 family is the derivative of k_b in the parameter;
        // a real step moves b and conj b together
        let b = c(0.4, 1.3);
        let z = c(-0.2, 0.8);
        let h = 1e-5;
        let plus = hp_kernel_eval(&KernelRef::point(b + h), z).unwrap();
        let minus = hp_kernel_eval(&KernelRef::point(b - h), z).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        let exact = hp_kernel_eval(&KernelRef::new(b, 1), z).unwrap();
        assert!((fd - exact).norm() / exact.norm() < 1e-6, "fd {fd} exact {exact}");
    }

    #[test]
    fn boundary_band_examples() {
        let band = hp_boundary_band(0.01, 100.0).unwrap();
        assert!(band.contains(c(0.0, 0.005)));
        assert!(band.contains(c(200.0, 1.0)));
        assert!(!band.contains(c(0.0, 1.0)));
        assert!(band.admits(c(0.0, 1.0)));
        assert!(!band.admits(c(0.0, -1.0)));
        assert!(hp_boundary_band(0.0, 1.0).is_err());
        assert!(hp_boundary_band(2.0, 1.0).is_err());
    }

    #[test]
    fn single_kernel_target_is_captured_in_one_step() {
        let f = TargetFunction::kernel_mix(vec![MixTerm {
            coeff: c(1.0, 0.0),
            kernel: KernelRef::point(c(0.0, 1.0)),
        }]);
        let dec = hp_decompose(&f, 1).unwrap();
        let res = dec.records[0].residual_energy;
        assert!(res <= 1e-10 * dec.norm_squared, "residual {res}");
    }

    #[test]
    fn two_kernel_target_decomposes_cleanly() {
        let f = TargetFunction::kernel_mix(vec![
            MixTerm { coeff: c(1.0, 0.0), kernel: KernelRef::point(c(0.0, 1.0)) },
            MixTerm { coeff: c(1.0, 0.0), kernel: KernelRef::point(c(2.0, 3.0)) },
        ]);
        // the centers overlap (normalized inner product 0.6), so two greedy
        // steps leave a visible remainder; the tail then drains fast
        let dec = hp_decompose(&f, 12).unwrap();
        let n2 = dec.norm_squared;
        assert!((n2 - 2.72).abs() < 1e-12, "norm^2 {n2}");
        let r1 = dec.records[0].residual_energy;
        let r2 = dec.records[1].residual_energy;
        eprintln!("hp two-kernel residuals: {r1:.6e} {r2:.6e}");
        assert!(r1 < n2 && r2 < r1);
        let last = dec.records.last().unwrap().residual_energy;
        assert!(last <= 1e-5 * n2, "after {} steps residual {last}", dec.records.len());

        // forced extensions at the true centers capture everything
        let mut sys = BroSystem::new(SpaceSpec::half_plane());
        sys.extend(c(0.0, 1.0)).unwrap();
        sys.extend(c(2.0, 3.0)).unwrap();
        let coeffs = sys.project(&f).unwrap();
        let captured: f64 = coeffs.iter().map(|x| x.norm_sqr()).sum();
        assert!((captured - n2).abs() <= 1e-10 * n2);
    }

    #[test]
    fn objective_drains_out_of_the_boundary_band() {
        let space = SpaceSpec::half_plane();
        let f = TargetFunction::kernel_mix(vec![
            MixTerm { coeff: c(1.0, 0.0), kernel: KernelRef::point(c(0.0, 1.0)) },
            MixTerm { coeff: c(0.8, 0.0), kernel: KernelRef::point(c(-1.0, 0.7)) },
        ]);
        let sys = BroSystem::new(space);
        let cfg = SelectionConfig::for_space(&space);
        let interior_max = select_next(&sys, &f, &[], &cfg).unwrap().objective;
        let delta = cfg.grid.boundary_margin;
        let mut shallow = Vec::new();
        for i in -8..=8 {
            shallow.push(c(i as f64 * 0.5, delta));
        }
        for i in -8..=8 {
            shallow.push(c(i as f64 * 60.0, 500.0 - (i as f64 * 60.0).abs() * 0.5 + 1.0));
        }
        let vals = objective_profile(&sys, &f, &[], &shallow).unwrap();
        for (b, v) in shallow.iter().zip(&vals) {
            assert!(*v < 0.1 * interior_max, "objective {v} at {b} vs max {interior_max}");
        }
    }

    #[test]
    fn far_candidates_decouple_from_the_system() {
        // with B_1 the normalized kernel at i, the coupling to a distant
        // candidate decays at least like Im(a_1)/|b| once b leaves the
        // cone around the imaginary axis
        let space = SpaceSpec::half_plane();
        let a1 = c(0.0, 1.0);
        let mut sys = BroSystem::new(space);
        sys.extend(a1).unwrap();
        for &scale in &[10.0f64, 100.0, 1000.0] {
            for &y in &[0.1f64, 0.5, 1.0, 2.0] {
                let x = (scale * scale - y * y).sqrt();
                let b = c(x, y);
                let proj = sys.kernel_projections(&KernelRef::point(b)).unwrap();
                let coupling = proj[0].norm();
                let bound = a1.im / b.norm();
                assert!(
                    coupling <= bound * (1.0 + 1e-12),
                    "coupling {coupling} vs bound {bound} at {b}"
                );
            }
        }
    }

    #[test]
    fn hp_kernel_inner_is_hermitian() {
        let space = SpaceSpec::half_plane();
        let a = KernelRef::new(c(0.3, 0.9), 1);
        let b = KernelRef::point(c(-1.2, 0.4));
        let ab = kernel_inner(&space, &a, &b).unwrap();
        let ba = kernel_inner(&space, &b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12 * ab.norm().max(1.0));
    }
}
