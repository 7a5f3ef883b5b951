//! Experiment configuration: one JSON document per run.
//!
//! The schema is deliberately small: a space, a target, which methods to
//! run, an iteration budget, and optional knobs (selection overrides, seed,
//! error targets, an alpha grid for space-comparison matrices). Unknown
//! fields are rejected so typos fail loudly instead of silently running a
//! default.

use std::fs;
use std::path::{Path, PathBuf};

use bergman_poafd::{DecomposeConfig, Geometry, SelectionConfig, SpaceSpec, TargetSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_ERROR_TARGETS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
pub const MAX_ITER: usize = 10_000;
pub const MAX_FOURIER_TERMS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Poafd,
    Fourier,
    #[default]
    Both,
}

impl Method {
    pub fn runs_poafd(self) -> bool {
        matches!(self, Method::Poafd | Method::Both)
    }

    pub fn runs_fourier(self) -> bool {
        matches!(self, Method::Fourier | Method::Both)
    }
}

/// Partial override of the per-space selection defaults; absent fields keep
/// the default for the configured space.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionOverride {
    pub n_radial: Option<usize>,
    pub n_angular: Option<usize>,
    pub boundary_margin: Option<f64>,
    pub extent: Option<f64>,
    pub refine_rounds: Option<usize>,
    pub max_multiplicity: Option<u32>,
    pub snap_radius: Option<f64>,
}

impl SelectionOverride {
    pub fn apply(&self, mut base: SelectionConfig) -> SelectionConfig {
        if let Some(v) = self.n_radial {
            base.grid.n_radial = v;
        }
        if let Some(v) = self.n_angular {
            base.grid.n_angular = v;
        }
        if let Some(v) = self.boundary_margin {
            base.grid.boundary_margin = v;
        }
        if let Some(v) = self.extent {
            base.grid.extent = v;
        }
        if let Some(v) = self.refine_rounds {
            base.refine_rounds = v;
        }
        if let Some(v) = self.max_multiplicity {
            base.max_multiplicity = v;
        }
        if let Some(v) = self.snap_radius {
            base.snap_radius = v;
        }
        base
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub label: Option<String>,
    pub space: SpaceSpec,
    pub target: TargetSpec,
    #[serde(default)]
    pub method: Method,
    pub n_iter: usize,
    /// Term budget for the Fourier baseline; defaults to `n_iter`.
    pub fourier_terms: Option<usize>,
    pub selection: Option<SelectionOverride>,
    /// Stop once residual energy falls below this times the target energy.
    pub residual_rel_tol: Option<f64>,
    /// Relative-error levels the summary reports iteration counts for.
    pub error_targets: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Runs the target once per alpha and emits a comparison matrix
    /// instead of a method comparison. Entries at or below -1 are carried
    /// as NA rows, so grids may sweep past the admissible range.
    pub alpha_grid: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        match self.space.geometry {
            Geometry::Disc => {
                if SpaceSpec::disc(self.space.alpha).is_err() {
                    return fail(format!(
                        "disc weight alpha must be finite and exceed -1, got {}",
                        self.space.alpha
                    ));
                }
            }
            Geometry::HalfPlane => {
                if self.space.alpha != 0.0 {
                    return fail("the half-plane space carries no weight; set alpha to 0".into());
                }
                if self.method.runs_fourier() {
                    return fail(
                        "the fourier baseline projects on monomials and needs the disc".into(),
                    );
                }
                if self.alpha_grid.is_some() {
                    return fail("alpha grids sweep disc weights; use a disc space".into());
                }
            }
        }
        if self.n_iter > MAX_ITER {
            return fail(format!("n_iter is capped at {MAX_ITER}"));
        }
        if self.fourier_terms.is_some_and(|n| n > MAX_FOURIER_TERMS) {
            return fail(format!("fourier_terms is capped at {MAX_FOURIER_TERMS}"));
        }
        if let Some(tol) = self.residual_rel_tol {
            if !tol.is_finite() || tol < 0.0 {
                return fail(format!("residual_rel_tol must be finite and nonnegative, got {tol}"));
            }
        }
        if let Some(ts) = &self.error_targets {
            if ts.iter().any(|t| !t.is_finite() || *t <= 0.0) {
                return fail("error_targets must be finite and positive".into());
            }
        }
        if let Some(grid) = &self.alpha_grid {
            if grid.is_empty() {
                return fail("alpha_grid must not be empty".into());
            }
            if grid.iter().any(|a| !a.is_finite()) {
                return fail("alpha_grid entries must be finite".into());
            }
            if self.method != Method::Poafd {
                return fail("alpha-grid runs compare spaces, not methods; set method to poafd".into());
            }
        }
        if let Some(sel) = &self.selection {
            if sel.n_radial.is_some_and(|v| v < 2) || sel.n_angular.is_some_and(|v| v < 2) {
                return fail("selection grid needs at least 2 nodes per direction".into());
            }
            if sel.boundary_margin.is_some_and(|v| !v.is_finite() || v <= 0.0 || v >= 1.0) {
                return fail("boundary_margin must lie in (0, 1)".into());
            }
            if sel.extent.is_some_and(|v| !v.is_finite() || v <= 0.0) {
                return fail("extent must be positive".into());
            }
            if sel.snap_radius.is_some_and(|v| !v.is_finite() || v < 0.0) {
                return fail("snap_radius must be finite and nonnegative".into());
            }
            if sel.refine_rounds.is_some_and(|v| v > 60) {
                return fail("refine_rounds is capped at 60".into());
            }
            if sel.max_multiplicity.is_some_and(|v| v == 0) {
                return fail("max_multiplicity must be at least 1".into());
            }
        }
        Ok(())
    }

    /// Selection settings for a concrete space: per-space defaults plus the
    /// configured overrides.
    pub fn selection_for(&self, space: &SpaceSpec) -> SelectionConfig {
        let base = SelectionConfig::for_space(space);
        match &self.selection {
            Some(ov) => ov.apply(base),
            None => base,
        }
    }

    pub fn decompose_config(&self, space: &SpaceSpec) -> DecomposeConfig {
        let mut cfg = DecomposeConfig::for_space(space);
        cfg.selection = self.selection_for(space);
        cfg.max_terms = self.n_iter;
        if let Some(tol) = self.residual_rel_tol {
            cfg.residual_rel_tol = tol;
        }
        cfg
    }

    /// Error-target levels, largest first.
    pub fn error_targets(&self) -> Vec<f64> {
        let mut ts = self
            .error_targets
            .clone()
            .unwrap_or_else(|| DEFAULT_ERROR_TARGETS.to_vec());
        ts.sort_by(|a, b| b.partial_cmp(a).expect("validated finite"));
        ts
    }

    pub fn fourier_terms(&self) -> usize {
        self.fourier_terms.unwrap_or(self.n_iter)
    }
}
