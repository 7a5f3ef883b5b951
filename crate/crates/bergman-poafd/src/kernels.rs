//! Reproducing kernels, derivative kernels, and closed-form inner products.
//!
//! Disc with weight alpha (write s = 2 + alpha):
//!   k_a(z) = (1 - conj(a) z)^(-s),            ||k_a||^2 = (1 - |a|^2)^(-s).
//! The m-th derivative kernel is d^m/d(conj w)^m k_w(z) at w = a:
//!   k~_{a,m}(z) = s (s+1) ... (s+m-1) z^m (1 - conj(a) z)^(-(s+m)).
//!
//! Upper half-plane:
//!   k_a(z) = -(z - conj(a))^(-2),             ||k_a||^2 = (2 Im a)^(-2),
//!   k~_{a,m}(z) = -(m+1)! (z - conj(a))^(-(m+2)).
//!
//! Pairing against a derivative kernel recovers a derivative of the other
//! argument: <f, k~_{b,m}> = f^(m)(b) for every f in the space. Applied to
//! f = k~_{a,ma} this turns every kernel-kernel inner product into a finite
//! Leibniz sum, evaluated here without any integration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{binomial, factorial, falling, rising};
use crate::space::{Geometry, SpaceSpec};

/// Orders beyond this are rejected outright; factorial growth makes higher
/// derivative kernels numerically meaningless long before this cap.
pub const MAX_DERIV_ORDER: u32 = 60;

/// A generalized kernel parameter: an interior center plus a derivative
/// order. Order 0 is the plain reproducing kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelRef {
    #[serde(with = "crate::funcspace::cpair")]
    pub center: Complex64,
    pub deriv_order: u32,
}

impl KernelRef {
    pub fn new(center: Complex64, deriv_order: u32) -> Self {
        KernelRef { center, deriv_order }
    }

    /// Plain reproducing kernel at `center`.
    pub fn point(center: Complex64) -> Self {
        KernelRef { center, deriv_order: 0 }
    }
}

fn check_ref(space: &SpaceSpec, r: &KernelRef) -> Result<()> {
    space.check_point(r.center)?;
    if r.deriv_order > MAX_DERIV_ORDER {
        return Err(Error::DerivOrder {
            order: r.deriv_order,
            reason: format!("exceeds the supported cap {MAX_DERIV_ORDER}"),
        });
    }
    Ok(())
}

/// base^(-p) for real p > 0, taking the principal branch. The bases that
/// arise here (1 - conj(a) z with |a||z| < 1, or z - conj(a) with both
/// points in the upper half-plane) never touch the branch cut.
fn inv_pow(base: Complex64, p: f64) -> Complex64 {
    if p.fract() == 0.0 && p.abs() < 64.0 {
        base.powi(-(p as i32))
    } else {
        base.powf(-p)
    }
}

/// Evaluate the generalized kernel k~_{a,m} at z.
pub fn kernel_eval(space: &SpaceSpec, kernel: &KernelRef, z: Complex64) -> Result<Complex64> {
    check_ref(space, kernel)?;
    space.check_point(z)?;
    let a = kernel.center;
    let m = kernel.deriv_order;
    let value = match space.geometry {
        Geometry::Disc => {
            let s = 2.0 + space.alpha;
            let base = Complex64::new(1.0, 0.0) - a.conj() * z;
            rising(s, m) * z.powu(m) * inv_pow(base, s + m as f64)
        }
        Geometry::HalfPlane => {
            let base = z - a.conj();
            -factorial(m + 1) * inv_pow(base, (m + 2) as f64)
        }
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite { at: z, context: "kernel evaluation" });
    }
    Ok(value)
}

/// Closed-form inner product <k~_a, k~_b>. Equals the (order of b)-th
/// z-derivative of k~_a evaluated at the center of b.
pub fn kernel_inner(space: &SpaceSpec, a: &KernelRef, b: &KernelRef) -> Result<Complex64> {
    check_ref(space, a)?;
    check_ref(space, b)?;
    let (ca, ma) = (a.center, a.deriv_order);
    let (cb, mb) = (b.center, b.deriv_order);
    let value = match space.geometry {
        Geometry::Disc => {
            // d^mb/dz^mb [ z^ma (1 - conj(ca) z)^-(s+ma) ] at z = cb, by Leibniz.
            let s = 2.0 + space.alpha;
            let base = Complex64::new(1.0, 0.0) - ca.conj() * cb;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..=mb.min(ma) {
                let pow_z = cb.powu(ma - j);
                let i = mb - j;
                let term = binomial(mb, j)
                    * falling(ma, j)
                    * rising(s + ma as f64, i)
                    * pow_z
                    * ca.conj().powu(i)
                    * inv_pow(base, s + (ma + i) as f64);
                sum += term;
            }
            rising(s, ma) * sum
        }
        Geometry::HalfPlane => {
            // d^mb/dz^mb [ -(ma+1)! (z - conj(ca))^-(ma+2) ] at z = cb.
            let base = cb - ca.conj();
            let sign = if mb % 2 == 0 { 1.0 } else { -1.0 };
            -factorial(ma + 1)
                * sign
                * rising((ma + 2) as f64, mb)
                * inv_pow(base, (ma + 2 + mb) as f64)
        }
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite { at: cb, context: "kernel inner product" });
    }
    Ok(value)
}

/// Squared norm of a generalized kernel; real and positive.
pub fn kernel_norm_squared(space: &SpaceSpec, r: &KernelRef) -> Result<f64> {
    let v = kernel_inner(space, r, r)?;
    debug_assert!(v.im.abs() <= 1e-10 * v.re.abs().max(1.0));
    if v.re <= 0.0 {
        return Err(Error::NonFinite { at: r.center, context: "kernel norm" });
    }
    Ok(v.re)
}

/// A unit-norm kernel e_a = k_a / ||k_a||, stored as the parameter plus the
/// normalizing scale 1 / ||k_a||.
#[derive(Debug, Clone, Copy)]
pub struct NormalizedKernel {
    pub kernel: KernelRef,
    pub scale: f64,
}

impl NormalizedKernel {
    pub fn eval(&self, space: &SpaceSpec, z: Complex64) -> Result<Complex64> {
        Ok(self.scale * kernel_eval(space, &self.kernel, z)?)
    }
}

/// Normalized point kernel e_a. Disc: e_a(z) = (1-|a|^2)^(s/2) k_a(z);
/// half-plane: e_a(z) = 2 Im(a) k_a(z).
pub fn normalized_kernel(space: &SpaceSpec, a: Complex64) -> Result<NormalizedKernel> {
    space.check_point(a)?;
    let scale = match space.geometry {
        Geometry::Disc => {
            let s = 2.0 + space.alpha;
            (1.0 - a.norm_sqr()).powf(s / 2.0)
        }
        Geometry::HalfPlane => 2.0 * a.im,
    };
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::NonFinite { at: a, context: "kernel normalization" });
    }
    Ok(NormalizedKernel { kernel: KernelRef::point(a), scale })
}
