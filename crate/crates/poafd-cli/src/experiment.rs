//! Runs one configured experiment and writes its artifacts: a per-iteration
//! CSV, a JSON summary, a sampled reconstruction CSV, and a gnuplot script
//! that references only the emitted files. Alpha-grid runs instead emit one
//! iteration CSV per grid entry plus a comparison matrix.
//!
//! Everything written is a pure function of the config, so fixed configs
//! give byte-identical artifacts; floats are printed with the shortest
//! round-trip form and rows follow fixed sort orders.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bergman_poafd::{
    decompose, Complex64, Decomposition, Geometry, SpaceSpec, StopReason, TargetFunction,
    TargetSpec,
};
use bergman_poafd::funcspace::BuiltinName;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::fourier::{fourier_baseline, FourierRun};

pub const RECON_SAMPLES: usize = 256;
pub const DISC_RECON_RADIUS: f64 = 0.95;
pub const HP_RECON_HEIGHT: f64 = 1.0;

const ITER_HEADER: &str = "k,method,coeff_abs,residual_energy,rel_error";
const MATRIX_HEADER: &str = "alpha,status,iterations,final_rel_error,iters_to_1e3";
const RECON_HEADER: &str = "method,t,target_re,target_im,recon_re,recon_im,abs_err";

#[derive(Debug, Clone, Serialize)]
pub struct TargetHit {
    pub target: f64,
    /// First term count whose relative error is at or below the target;
    /// absent when the budget never reached it.
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub terms: usize,
    pub final_residual_energy: f64,
    pub final_rel_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<StopReason>,
    pub reached: Vec<TargetHit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixRow {
    pub alpha: f64,
    /// "ok", or "na" for grid entries outside the admissible weights.
    pub status: &'static str,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters_to_1e3: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub target: String,
    pub space: SpaceSpec,
    pub seed: u64,
    pub n_iter: usize,
    pub norm_squared: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub matrix: Vec<MatrixRow>,
    pub files: Vec<String>,
}

/// Per-method iteration series in CSV row order.
struct MethodSeries {
    name: &'static str,
    coeff_abs: Vec<f64>,
    residual_energy: Vec<f64>,
    rel_error: Vec<f64>,
    stop: Option<StopReason>,
}

impl MethodSeries {
    fn from_decomposition(dec: &Decomposition) -> Self {
        let norm = dec.norm_squared;
        let mut coeff_abs = Vec::with_capacity(dec.records.len());
        let mut residual_energy = Vec::with_capacity(dec.records.len());
        let mut rel_error = Vec::with_capacity(dec.records.len());
        for r in &dec.records {
            let res = r.residual_energy.max(0.0);
            coeff_abs.push(r.coeff.norm());
            residual_energy.push(res);
            rel_error.push((res / norm).sqrt());
        }
        MethodSeries {
            name: "poafd",
            coeff_abs,
            residual_energy,
            rel_error,
            stop: Some(dec.stop),
        }
    }

    fn from_fourier(run: &FourierRun) -> Self {
        let norm = run.norm_squared;
        MethodSeries {
            name: "fourier",
            coeff_abs: run.coeffs.iter().map(|c| c.norm()).collect(),
            residual_energy: run.residual_energy.clone(),
            rel_error: run.residual_energy.iter().map(|r| (r / norm).sqrt()).collect(),
            stop: None,
        }
    }

    fn final_rel_error(&self) -> f64 {
        self.rel_error.last().copied().unwrap_or(1.0)
    }

    fn final_residual_energy(&self, norm_squared: f64) -> f64 {
        self.residual_energy.last().copied().unwrap_or(norm_squared)
    }

    fn first_reaching(&self, target: f64) -> Option<usize> {
        self.rel_error.iter().position(|e| *e <= target).map(|i| i + 1)
    }

    fn summarize(&self, norm_squared: f64, targets: &[f64]) -> MethodSummary {
        MethodSummary {
            method: self.name.to_string(),
            terms: self.rel_error.len(),
            final_residual_energy: self.final_residual_energy(norm_squared),
            final_rel_error: self.final_rel_error(),
            stop: self.stop,
            reached: targets
                .iter()
                .map(|&t| TargetHit { target: t, iterations: self.first_reaching(t) })
                .collect(),
        }
    }
}

fn iterations_csv(series: &[&MethodSeries]) -> String {
    let mut out = String::from(ITER_HEADER);
    out.push('\n');
    for s in series {
        for k in 0..s.rel_error.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                k + 1,
                s.name,
                s.coeff_abs[k],
                s.residual_energy[k],
                s.rel_error[k]
            )
            .expect("string write");
        }
    }
    out
}

/// Sample positions for the reconstruction plot: an interior circle on the
/// disc, a horizontal line on the half-plane.
fn recon_path(space: &SpaceSpec, extent: f64) -> Vec<(f64, Complex64)> {
    (0..RECON_SAMPLES)
        .map(|j| match space.geometry {
            Geometry::Disc => {
                let t = 2.0 * std::f64::consts::PI * j as f64 / RECON_SAMPLES as f64;
                (t, Complex64::from_polar(DISC_RECON_RADIUS, t))
            }
            Geometry::HalfPlane => {
                let t = -extent + 2.0 * extent * j as f64 / (RECON_SAMPLES - 1) as f64;
                (t, Complex64::new(t, HP_RECON_HEIGHT))
            }
        })
        .collect()
}

type ReconEval<'a> = (&'static str, &'a dyn Fn(Complex64) -> CliResult<Complex64>);

fn recon_csv(
    space: &SpaceSpec,
    f: &TargetFunction,
    extent: f64,
    evals: &[ReconEval],
) -> CliResult<String> {
    let mut out = String::from(RECON_HEADER);
    out.push('\n');
    for (name, eval) in evals {
        for &(t, z) in &recon_path(space, extent) {
            let fv = f.eval(space, z)?;
            let rv = eval(z)?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                name,
                t,
                fv.re,
                fv.im,
                rv.re,
                rv.im,
                (fv - rv).norm()
            )
            .expect("string write");
        }
    }
    Ok(out)
}

fn decay_plot(into: &mut String, csv: &str, methods: &[&'static str]) {
    let _ = writeln!(into, "set title 'error decay'");
    let _ = writeln!(into, "set xlabel 'terms'");
    let _ = writeln!(into, "set ylabel 'relative error'");
    let _ = writeln!(into, "set logscale y");
    let parts: Vec<String> = methods
        .iter()
        .map(|m| {
            format!(
                "'{csv}' skip 1 using 1:(strcol(2) eq '{m}' ? column(5) : NaN) \
                 with linespoints title '{m}'"
            )
        })
        .collect();
    let _ = writeln!(into, "plot {}", parts.join(", \\\n     "));
}

fn standard_plot_script(methods: &[&'static str]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# generated plotting script; run gnuplot from this directory");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key outside");
    let _ = writeln!(s, "set terminal pngcairo size 1100,420");
    let _ = writeln!(s, "set output 'figures.png'");
    let _ = writeln!(s, "set multiplot layout 1,2");
    decay_plot(&mut s, "iterations.csv", methods);
    let _ = writeln!(s, "set title 'reconstruction (real part)'");
    let _ = writeln!(s, "set xlabel 't'");
    let _ = writeln!(s, "set ylabel 'value'");
    let _ = writeln!(s, "unset logscale y");
    let first = methods.first().copied().unwrap_or("poafd");
    let mut parts = vec![format!(
        "'recon.csv' skip 1 using 2:(strcol(1) eq '{first}' ? column(3) : NaN) \
         with lines title 'target'"
    )];
    for m in methods {
        parts.push(format!(
            "'recon.csv' skip 1 using 2:(strcol(1) eq '{m}' ? column(5) : NaN) \
             with lines title '{m}'"
        ));
    }
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    let _ = writeln!(s, "unset multiplot");
    s
}

fn matrix_plot_script() -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# generated plotting script; run gnuplot from this directory");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 640,420");
    let _ = writeln!(s, "set output 'matrix.png'");
    let _ = writeln!(s, "set xlabel 'alpha'");
    let _ = writeln!(s, "set ylabel 'final relative error'");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(
        s,
        "plot 'matrix.csv' skip 1 using 1:(strcol(2) eq 'ok' ? column(4) : NaN) \
         with linespoints title 'poafd'"
    );
    s
}

/// The label the artifacts carry for the target. The chirp is flagged as
/// embedded because its disc representation goes through the analytic
/// signal of the sampled waveform, not the waveform itself.
pub fn target_label(spec: &TargetSpec, built: &TargetFunction) -> String {
    if let TargetSpec::Builtin { name: BuiltinName::Chirp, .. } = spec {
        return "chirp (embedded)".into();
    }
    built.label()
}

fn write_artifact(
    dir: &Path,
    name: &str,
    contents: &str,
    files: &mut Vec<String>,
) -> CliResult<()> {
    fs::write(dir.join(name), contents)?;
    files.push(name.to_string());
    Ok(())
}

pub fn run_experiment(cfg: &RunConfig, out_dir: &Path, verbose: bool) -> CliResult<Summary> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let f = cfg.target.build(cfg.seed)?;
    match &cfg.alpha_grid {
        Some(grid) => matrix_run(cfg, &f, grid, out_dir, verbose),
        None => standard_run(cfg, &f, out_dir, verbose),
    }
}

fn standard_run(
    cfg: &RunConfig,
    f: &TargetFunction,
    out_dir: &Path,
    verbose: bool,
) -> CliResult<Summary> {
    let space = cfg.space;
    let norm_squared = f.norm_squared(&space)?;
    let targets = cfg.error_targets();

    let mut fourier_series = None;
    let mut fourier_run = None;
    if cfg.method.runs_fourier() {
        let run = fourier_baseline(&space, f, cfg.fourier_terms())?;
        fourier_series = Some(MethodSeries::from_fourier(&run));
        fourier_run = Some(run);
    }
    let mut poafd_series = None;
    let mut poafd_approx = None;
    if cfg.method.runs_poafd() {
        let dec = decompose(&space, f, &cfg.decompose_config(&space))?;
        if verbose {
            for r in &dec.records {
                eprintln!(
                    "poafd k={} param={} order={} |coeff|={:.6e} residual={:.6e}",
                    r.k,
                    r.param,
                    r.deriv_order,
                    r.coeff.norm(),
                    r.residual_energy
                );
            }
        }
        poafd_series = Some(MethodSeries::from_decomposition(&dec));
        poafd_approx = Some(dec.approximation()?);
    }

    // fixed row order: methods alphabetically, iterations ascending
    let series: Vec<&MethodSeries> =
        [fourier_series.as_ref(), poafd_series.as_ref()].into_iter().flatten().collect();
    let method_names: Vec<&'static str> = series.iter().map(|s| s.name).collect();

    let mut files = Vec::new();
    write_artifact(out_dir, "iterations.csv", &iterations_csv(&series), &mut files)?;

    let extent = cfg.selection_for(&space).grid.extent;
    let mut evals: Vec<ReconEval> = Vec::new();
    let eval_fourier = |z: Complex64| -> CliResult<Complex64> {
        Ok(fourier_run.as_ref().expect("fourier ran").eval_approx(z))
    };
    let eval_poafd = |z: Complex64| -> CliResult<Complex64> {
        Ok(poafd_approx.as_ref().expect("poafd ran").eval(&space, z)?)
    };
    if fourier_run.is_some() {
        evals.push(("fourier", &eval_fourier));
    }
    if poafd_approx.is_some() {
        evals.push(("poafd", &eval_poafd));
    }
    write_artifact(out_dir, "recon.csv", &recon_csv(&space, f, extent, &evals)?, &mut files)?;
    write_artifact(out_dir, "plot.gp", &standard_plot_script(&method_names), &mut files)?;

    let methods: Vec<MethodSummary> =
        series.iter().map(|s| s.summarize(norm_squared, &targets)).collect();
    let mut summary = Summary {
        label: cfg.label.clone(),
        target: target_label(&cfg.target, f),
        space,
        seed: cfg.seed,
        n_iter: cfg.n_iter,
        norm_squared,
        methods,
        matrix: Vec::new(),
        files,
    };
    let json = serde_json::to_string_pretty(&summary).expect("serializable summary");
    fs::write(out_dir.join("summary.json"), json + "\n")?;
    summary.files.push("summary.json".to_string());
    Ok(summary)
}

fn matrix_run(
    cfg: &RunConfig,
    f: &TargetFunction,
    grid: &[f64],
    out_dir: &Path,
    verbose: bool,
) -> CliResult<Summary> {
    let mut rows = Vec::with_capacity(grid.len());
    let mut files = Vec::new();
    for &alpha in grid {
        let name = format!("iterations_alpha_{alpha}.csv");
        let space = match SpaceSpec::disc(alpha) {
            Ok(s) => s,
            Err(_) => {
                // out-of-range weights stay in the matrix as NA rows
                write_artifact(out_dir, &name, &format!("{ITER_HEADER}\n"), &mut files)?;
                rows.push(MatrixRow {
                    alpha,
                    status: "na",
                    iterations: 0,
                    final_rel_error: None,
                    iters_to_1e3: None,
                });
                if verbose {
                    eprintln!("alpha={alpha}: not an admissible weight, recorded as na");
                }
                continue;
            }
        };
        let dec = decompose(&space, f, &cfg.decompose_config(&space))?;
        let series = MethodSeries::from_decomposition(&dec);
        write_artifact(out_dir, &name, &iterations_csv(&[&series]), &mut files)?;
        if verbose {
            eprintln!(
                "alpha={alpha}: {} iterations, final rel error {:.6e}",
                series.rel_error.len(),
                series.final_rel_error()
            );
        }
        rows.push(MatrixRow {
            alpha,
            status: "ok",
            iterations: series.rel_error.len(),
            final_rel_error: Some(series.final_rel_error()),
            iters_to_1e3: series.first_reaching(1e-3),
        });
    }

    let mut csv = String::from(MATRIX_HEADER);
    csv.push('\n');
    for r in &rows {
        let re = r.final_rel_error.map(|v| v.to_string()).unwrap_or_default();
        let it = r.iters_to_1e3.map(|v| v.to_string()).unwrap_or_default();
        writeln!(csv, "{},{},{},{},{}", r.alpha, r.status, r.iterations, re, it)
            .expect("string write");
    }
    write_artifact(out_dir, "matrix.csv", &csv, &mut files)?;
    write_artifact(out_dir, "plot.gp", &matrix_plot_script(), &mut files)?;

    let norm_squared = f.norm_squared(&SpaceSpec::unweighted_disc())?;
    let mut summary = Summary {
        label: cfg.label.clone(),
        target: target_label(&cfg.target, f),
        space: cfg.space,
        seed: cfg.seed,
        n_iter: cfg.n_iter,
        norm_squared,
        methods: Vec::new(),
        matrix: rows,
        files,
    };
    let json = serde_json::to_string_pretty(&summary).expect("serializable summary");
    fs::write(out_dir.join("summary.json"), json + "\n")?;
    summary.files.push("summary.json".to_string());
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Method, SelectionOverride};
    use std::path::PathBuf;

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir()
            .join(format!("poafd-cli-{}-{name}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    fn poly_config(method: Method, n_iter: usize) -> RunConfig {
        RunConfig {
            label: None,
            space: SpaceSpec::unweighted_disc(),
            target: TargetSpec::Taylor {
                coeffs: vec![[1.0, 0.0], [0.0, 0.5], [0.25, 0.0]],
            },
            method,
            n_iter,
            fourier_terms: None,
            selection: Some(SelectionOverride {
                n_radial: Some(24),
                n_angular: Some(64),
                ..SelectionOverride::default()
            }),
            residual_rel_tol: None,
            error_targets: None,
            seed: 0,
            out_dir: None,
            alpha_grid: None,
        }
    }

    #[test]
    fn empty_run_emits_header_only_csv() {
        let dir = scratch("empty");
        let summary = run_experiment(&poly_config(Method::Both, 0), &dir, false).unwrap();
        let csv = fs::read_to_string(dir.join("iterations.csv")).unwrap();
        assert_eq!(csv, format!("{ITER_HEADER}\n"));
        assert_eq!(summary.methods.len(), 2);
        assert_eq!(summary.methods[0].final_rel_error, 1.0);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn two_method_rows_sort_by_method_then_iteration() {
        let dir = scratch("sorted");
        run_experiment(&poly_config(Method::Both, 3), &dir, false).unwrap();
        let csv = fs::read_to_string(dir.join("iterations.csv")).unwrap();
        let keys: Vec<(String, usize)> = csv
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split(',');
                let k: usize = it.next().unwrap().parse().unwrap();
                let m = it.next().unwrap().to_string();
                (m, k)
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(keys.len(), 6);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rel_error_column_is_pythagorean() {
        let dir = scratch("pyth");
        let summary = run_experiment(&poly_config(Method::Poafd, 3), &dir, false).unwrap();
        let csv = fs::read_to_string(dir.join("iterations.csv")).unwrap();
        for line in csv.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let res: f64 = cols[3].parse().unwrap();
            let rel: f64 = cols[4].parse().unwrap();
            let expect = (res / summary.norm_squared).sqrt();
            assert!((rel - expect).abs() <= 1e-9 * expect.max(1e-30));
        }
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn matrix_run_emits_one_csv_per_alpha_plus_matrix() {
        let dir = scratch("matrix");
        let mut cfg = poly_config(Method::Poafd, 2);
        cfg.target = TargetSpec::KernelMix {
            terms: vec![bergman_poafd::funcspace::MixTermSpec {
                coeff: [1.0, 0.0],
                center: [0.5, 0.0],
                deriv_order: 0,
            }],
        };
        cfg.alpha_grid = Some(vec![-1.5, 0.0, 1.0]);
        let summary = run_experiment(&cfg, &dir, false).unwrap();
        assert_eq!(summary.matrix.len(), 3);
        assert_eq!(summary.matrix[0].status, "na");
        assert_eq!(summary.matrix[1].status, "ok");
        for name in [
            "iterations_alpha_-1.5.csv",
            "iterations_alpha_0.csv",
            "iterations_alpha_1.csv",
            "matrix.csv",
        ] {
            assert!(dir.join(name).is_file(), "missing {name}");
        }
        let na_csv = fs::read_to_string(dir.join("iterations_alpha_-1.5.csv")).unwrap();
        assert_eq!(na_csv, format!("{ITER_HEADER}\n"));
        let matrix = fs::read_to_string(dir.join("matrix.csv")).unwrap();
        let na_row = matrix.lines().nth(1).unwrap();
        assert_eq!(na_row, "-1.5,na,0,,");
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn chirp_runs_are_labeled_embedded() {
        let spec = TargetSpec::Builtin {
            name: BuiltinName::Chirp,
            beta: None,
            center: None,
            zeros: None,
            seeded_zeros: None,
            exponent: None,
            degree: None,
            samples: None,
            truncate: None,
        };
        let built = spec.build(0).unwrap();
        assert_eq!(target_label(&spec, &built), "chirp (embedded)");
    }
}
