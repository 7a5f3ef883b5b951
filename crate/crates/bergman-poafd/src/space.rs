//! Space descriptors and domain guards.
//!
//! A [`SpaceSpec`] names one concrete reproducing-kernel Hilbert space:
//! either the weighted Bergman space A^2_alpha on the open unit disc with
//! measure dA_alpha = (1+alpha)(1-|z|^2)^alpha dA (dA normalized by pi), or
//! the Bergman space A^2 on the open upper half-plane with dA = dx dy / pi.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points this close to the boundary (or closer) are treated as outside.
/// Kernel values blow up beyond any representable scale there.
pub const BOUNDARY_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Disc,
    HalfPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub geometry: Geometry,
    /// Weight exponent for the disc; ignored on the half-plane.
    pub alpha: f64,
}

impl SpaceSpec {
    pub fn disc(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(SpaceSpec { geometry: Geometry::Disc, alpha })
    }

    /// The classical unweighted Bergman space on the disc (alpha = 0).
    pub fn unweighted_disc() -> Self {
        SpaceSpec { geometry: Geometry::Disc, alpha: 0.0 }
    }

    pub fn half_plane() -> Self {
        SpaceSpec { geometry: Geometry::HalfPlane, alpha: 0.0 }
    }

    pub fn is_disc(&self) -> bool {
        self.geometry == Geometry::Disc
    }

    /// Strict interior membership, with the guard band excluded.
    pub fn contains(&self, z: Complex64) -> bool {
        if !z.re.is_finite() || !z.im.is_finite() {
            return false;
        }
        match self.geometry {
            Geometry::Disc => z.norm() < 1.0 - BOUNDARY_GUARD,
            Geometry::HalfPlane => z.im > BOUNDARY_GUARD,
        }
    }

    pub fn check_point(&self, z: Complex64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::DomainViolation(z, self.domain_name()))
        }
    }

    /// Distance from z to the domain boundary (disc rim or real axis).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self.geometry {
            Geometry::Disc => 1.0 - z.norm(),
            Geometry::HalfPlane => z.im,
        }
    }

    pub fn domain_name(&self) -> &'static str {
        match self.geometry {
            Geometry::Disc => "unit disc",
            Geometry::HalfPlane => "upper half-plane",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_must_exceed_minus_one() {
        assert!(SpaceSpec::disc(-1.0).is_err());
        assert!(SpaceSpec::disc(-2.5).is_err());
        assert!(SpaceSpec::disc(f64::NAN).is_err());
        assert!(SpaceSpec::disc(-0.5).is_ok());
        assert!(SpaceSpec::disc(3.0).is_ok());
    }

    #[test]
    fn domain_guards() {
        let d = SpaceSpec::unweighted_disc();
        assert!(d.contains(Complex64::new(0.3, 0.4)));
        assert!(!d.contains(Complex64::new(1.0, 0.0)));
        assert!(!d.contains(Complex64::new(1.0 - 1e-13, 0.0)));
        let h = SpaceSpec::half_plane();
        assert!(h.contains(Complex64::new(-7.0, 0.1)));
        assert!(!h.contains(Complex64::new(0.0, 0.0)));
        assert!(!h.contains(Complex64::new(2.0, -0.4)));
        assert!(!h.contains(Complex64::new(f64::INFINITY, 1.0)));
    }
}
