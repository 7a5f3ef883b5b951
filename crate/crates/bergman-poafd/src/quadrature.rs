//! Numerical integration against the space measures.
//!
//! These rules are the independent check on the closed-form kernel algebra:
//! nothing in the orthonormalization path integrates anything, so agreement
//! between the two routes is meaningful.
//!
//! Disc: dA_alpha = (1+alpha)(1-|z|^2)^alpha dA with dA normalized by pi.
//! Substituting s = r^2 absorbs the radial Jacobian,
//!   integral = (1+alpha)/(2 pi) int_0^1 (1-s)^alpha int_0^{2pi} g(sqrt(s) e^{i t}) dt ds,
//! and a second, endpoint-graded substitution s = 1 - (1-t)^2 turns the
//! weight factor into (1-t)^{2 alpha + 1}, which doubles its smoothness at
//! the rim; half-integer alpha becomes polynomial there. The rule is then
//! Gauss-Legendre in t times a uniform trapezoid in the angle
//! (exponentially accurate for the periodic factor).
//!
//! Half-plane: dA = dx dy / pi over the open upper half-plane. Kernel-pair
//! integrands decay like |z|^-4, so a finite box truncates too slowly for
//! tight tolerances; instead both axes are compactified through x = cx tan u,
//! y = cy tan v, and Gauss-Legendre is applied in (u, v). The transformed
//! integrand is analytic in a strip, so the rule converges geometrically for
//! centers at moderate height above the axis.

use num_complex::Complex64;

use crate::math::gauss_legendre;
use crate::space::SpaceSpec;

pub const DEFAULT_RADIAL_NODES: usize = 200;
pub const DEFAULT_ANGULAR_NODES: usize = 512;

pub struct DiscRule {
    nodes: Vec<(Complex64, f64)>,
}

impl DiscRule {
    pub fn new(space: &SpaceSpec, n_radial: usize, n_angular: usize) -> Self {
        Self::capped(space, n_radial, n_angular, 1.0)
    }

    /// Rule restricted to |z| <= r_max; used by membership probes that watch
    /// partial integrals grow toward the boundary.
    pub fn capped(space: &SpaceSpec, n_radial: usize, n_angular: usize, r_max: f64) -> Self {
        assert!(space.is_disc(), "disc rule on a non-disc space");
        assert!(r_max > 0.0 && r_max <= 1.0);
        let alpha = space.alpha;
        let (gx, gw) = gauss_legendre(n_radial);
        let s_max = r_max * r_max;
        let mut nodes = Vec::with_capacity(n_radial * n_angular);
        for (x, w) in gx.iter().zip(&gw) {
            // graded: s = s_max (1 - (1-t)^2), ds = 2 s_max (1-t) dt
            let t = 0.5 * (x + 1.0);
            let omt = 1.0 - t;
            let s = s_max * (2.0 - t) * t;
            // algebraically 1 - s; avoids cancellation at the last nodes
            let one_minus_s = (1.0 - s_max) + s_max * omt * omt;
            let r = s.sqrt();
            let radial_weight =
                (1.0 + alpha) * w * s_max * omt * one_minus_s.powf(alpha) / n_angular as f64;
            for j in 0..n_angular {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n_angular as f64;
                nodes.push((Complex64::from_polar(r, theta), radial_weight));
            }
        }
        DiscRule { nodes }
    }

    pub fn nodes(&self) -> &[(Complex64, f64)] {
        &self.nodes
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().map(|&(z, w)| w * f(z)).sum()
    }

    pub fn integrate_abs2(&self, f: impl Fn(Complex64) -> Complex64) -> f64 {
        self.nodes.iter().map(|&(z, w)| w * f(z).norm_sqr()).sum()
    }

    /// <f, g> = int f conj(g) dA_alpha
    pub fn inner(
        &self,
        f: impl Fn(Complex64) -> Complex64,
        g: impl Fn(Complex64) -> Complex64,
    ) -> Complex64 {
        self.nodes.iter().map(|&(z, w)| w * f(z) * g(z).conj()).sum()
    }
}

pub const DEFAULT_HP_NODES: usize = 256;
/// Axis scales of the tangent compactification.
pub const DEFAULT_HP_SCALE: f64 = 2.0;

pub struct HalfPlaneRule {
    nodes: Vec<(Complex64, f64)>,
}

impl HalfPlaneRule {
    pub fn new(n_x: usize, n_y: usize, scale: f64) -> Self {
        let half_pi = 0.5 * std::f64::consts::PI;
        let (ux, wx) = gauss_legendre(n_x);
        let (uy, wy) = gauss_legendre(n_y);
        let mut xs = Vec::with_capacity(n_x);
        for (u, w) in ux.iter().zip(&wx) {
            // u in (-1,1) -> angle in (-pi/2, pi/2)
            let t = half_pi * u;
            let sec = 1.0 / t.cos();
            xs.push((scale * t.tan(), w * half_pi * scale * sec * sec));
        }
        let mut ys = Vec::with_capacity(n_y);
        for (u, w) in uy.iter().zip(&wy) {
            // u in (-1,1) -> angle in (0, pi/2)
            let t = half_pi * 0.5 * (u + 1.0);
            let sec = 1.0 / t.cos();
            ys.push((scale * t.tan(), w * half_pi * 0.5 * scale * sec * sec));
        }
        let inv_pi = 1.0 / std::f64::consts::PI;
        let mut nodes = Vec::with_capacity(n_x * n_y);
        for &(y, wy) in &ys {
            for &(x, wx) in &xs {
                nodes.push((Complex64::new(x, y), wx * wy * inv_pi));
            }
        }
        HalfPlaneRule { nodes }
    }

    pub fn nodes(&self) -> &[(Complex64, f64)] {
        &self.nodes
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().map(|&(z, w)| w * f(z)).sum()
    }

    pub fn inner(
        &self,
        f: impl Fn(Complex64) -> Complex64,
        g: impl Fn(Complex64) -> Complex64,
    ) -> Complex64 {
        self.nodes.iter().map(|&(z, w)| w * f(z) * g(z).conj()).sum()
    }
}
