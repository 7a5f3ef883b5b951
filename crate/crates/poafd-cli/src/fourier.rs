//! Fourier baseline: orthogonal projection onto the normalized monomials
//! z^k / ||z^k||, which form the natural orthonormal basis of the weighted
//! disc space. Residuals use the same Pythagoras bookkeeping as the
//! adaptive decomposition, so error curves compare like for like.

use bergman_poafd::funcspace::gamma_weight;
use bergman_poafd::{Complex64, Result, SpaceSpec, TargetFunction};

#[derive(Debug, Clone)]
pub struct FourierRun {
    pub space: SpaceSpec,
    /// <f, z^k>/||z^k|| for k = 0..n_terms.
    pub coeffs: Vec<Complex64>,
    /// ||z^k||^2, kept so the partial sums can be evaluated.
    pub weights: Vec<f64>,
    pub norm_squared: f64,
    /// ||f - S_k f||^2 after k+1 terms, same indexing as `coeffs`.
    pub residual_energy: Vec<f64>,
}

impl FourierRun {
    /// Partial sum with all computed terms.
    pub fn eval_approx(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for (c, w) in self.coeffs.iter().zip(&self.weights) {
            acc += c * pw / w.sqrt();
            pw *= z;
        }
        acc
    }

    pub fn final_residual_energy(&self) -> f64 {
        self.residual_energy.last().copied().unwrap_or(self.norm_squared)
    }
}

/// Projects `f` on the first `n_terms` normalized monomials. The target
/// must convert to a coefficient series, so black-box targets and the
/// half-plane are rejected.
pub fn fourier_baseline(
    space: &SpaceSpec,
    f: &TargetFunction,
    n_terms: usize,
) -> Result<FourierRun> {
    let taylor = f.to_taylor(space)?;
    let norm_squared = f.norm_squared(space)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = Vec::with_capacity(n_terms);
    let mut weights = Vec::with_capacity(n_terms);
    let mut residual_energy = Vec::with_capacity(n_terms);
    let mut remaining = norm_squared;
    for k in 0..n_terms {
        let w = gamma_weight(k as u32, space.alpha);
        let a = taylor.get(k).copied().unwrap_or(zero);
        let c = a * w.sqrt();
        remaining = (remaining - c.norm_sqr()).max(0.0);
        coeffs.push(c);
        weights.push(w);
        residual_energy.push(remaining);
    }
    Ok(FourierRun { space: *space, coeffs, weights, norm_squared, residual_energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bergman_poafd::{MixTerm, KernelRef};

    #[test]
    fn monomial_target_is_exact_once_covered() {
        // f = z^3 needs exactly four terms
        let space = SpaceSpec::unweighted_disc();
        let f = TargetFunction::taylor(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        let run = fourier_baseline(&space, &f, 4).unwrap();
        assert!(run.residual_energy[2] > 0.9 * run.norm_squared);
        assert!(run.residual_energy[3] <= 1e-14 * run.norm_squared);
        let z = Complex64::new(0.3, -0.2);
        assert!((run.eval_approx(z) - z.powu(3)).norm() < 1e-12);
    }

    #[test]
    fn kernel_target_residual_matches_geometric_tail() {
        // e_a at alpha = 0 has coefficients (1-|a|^2)(k+1) conj(a)^k and
        // monomial weights 1/(k+1); the residual after n terms telescopes
        // to |a|^(2n) (0.75 n + 1) at a = 1/2.
        let space = SpaceSpec::unweighted_disc();
        let a = Complex64::new(0.5, 0.0);
        let f = TargetFunction::kernel_mix(vec![MixTerm {
            coeff: Complex64::new(1.0, 0.0),
            kernel: KernelRef::point(a),
        }]);
        let run = fourier_baseline(&space, &f, 9).unwrap();
        assert!((run.norm_squared - 1.0).abs() < 1e-12);
        for n in 1..=9usize {
            let expect = 0.25f64.powi(n as i32) * (0.75 * n as f64 + 1.0);
            let got = run.residual_energy[n - 1];
            assert!(
                (got - expect).abs() <= 1e-9 * expect,
                "n={n}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn black_box_targets_are_rejected() {
        let space = SpaceSpec::unweighted_disc();
        let f = TargetFunction::black_box(|z| z, 1.0, "identity");
        assert!(fourier_baseline(&space, &f, 4).is_err());
    }
}
