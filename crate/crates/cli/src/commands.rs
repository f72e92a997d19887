//! Command implementations behind the argument surface in `main`.

use std::path::{Path, PathBuf};

use serde_json::json;
use spinbo_core::config::SimConfig;
use spinbo_core::dynamics::simulate;
use spinbo_core::hardy::{
    critical_residual, critical_scale, lax_static_residual, lax_static_scale, lemma_residual,
    lemma_scale, relative, spectrum_l,
};
use spinbo_core::init::{cosine_field, decay_field, random_field, random_hardy, random_hermitian, trial_rng};
use spinbo_core::invariants::{
    drift_series, e0_explicit, e1_explicit, energy, invariant_record, m0_explicit,
    matrix_invariant,
};
use spinbo_core::io;

use crate::{Cli, Command, Failure, Preset, VerifyKind};

/// Gate applied by `verify`: the identities hold to round-off, so any
/// excess over this is a defect, not discretization error.
const VERIFY_TOL: f64 = 1e-11;

pub fn run(cli: Cli) -> Result<(), Failure> {
    let mut overrides = cli.set.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(out) = &cli.out {
        overrides.push(format!("outputs={}", toml_quote(&out.display().to_string())));
    }
    let config = SimConfig::load(cli.config.as_deref(), &overrides).map_err(Failure::from_core)?;
    let warnings = config.validate().map_err(Failure::from_core)?;
    io::warn_all(&warnings, cli.quiet);

    if cli.print_config {
        print!("{}", config.to_toml_string());
        return Ok(());
    }

    match &cli.command {
        Command::Simulate => run_simulate(&cli, &config, &warnings),
        Command::Verify {
            kind,
            trials,
            dims,
            bandwidths,
        } => run_verify(&cli, &config, *kind, *trials, dims, bandwidths),
        Command::Spectrum { input, hardy_modes } => {
            run_spectrum(&cli, &config, input, *hardy_modes)
        }
        Command::Invariants {
            input,
            energy_orders,
            matrix_orders,
        } => run_invariants(&cli, &config, input, *energy_orders, *matrix_orders),
        Command::Gen {
            preset,
            d,
            amplitude,
            rate,
            bandwidth,
            path,
        } => run_gen(&cli, &config, *preset, *d, *amplitude, *rate, *bandwidth, path.clone()),
    }
}

fn toml_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn io_fail(context: &str, e: std::io::Error) -> Failure {
    Failure::Invalid(format!("{context}: {e}"))
}

fn run_simulate(cli: &Cli, config: &SimConfig, warnings: &[String]) -> Result<(), Failure> {
    let u0 = config.build_initial().map_err(Failure::from_core)?;
    let trajectory = simulate(config, u0).map_err(Failure::from_core)?;
    let manifest = io::write_trajectory(Path::new(&config.outputs), config, warnings, &trajectory)
        .map_err(Failure::from_core)?;
    if !cli.quiet {
        println!(
            "run complete: {} steps at dt = {:.3e}, {} snapshots in {}",
            manifest.n_steps,
            manifest.dt_actual,
            manifest.snapshots.len(),
            config.outputs
        );
        println!(
            "max relative drift: energies {:.3e}, matrix invariants {:.3e}; herm defect {:.3e}",
            trajectory.energy_drift, trajectory.matrix_drift, trajectory.max_herm_defect
        );
    }
    Ok(())
}

fn run_verify(
    cli: &Cli,
    config: &SimConfig,
    kind: VerifyKind,
    trials: u64,
    dims: &[usize],
    bandwidths: &[i64],
) -> Result<(), Failure> {
    if trials == 0 {
        return Err(Failure::Invalid(
            "verify needs at least one trial per cell (got --trials 0)".into(),
        ));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Failure::Invalid("--dims needs entries ≥ 1".into()));
    }
    if bandwidths.is_empty() || bandwidths.iter().any(|&b| b < 0) {
        return Err(Failure::Invalid("--bandwidths needs entries ≥ 0".into()));
    }

    let seed = config.seed;
    let mut cells = Vec::new();
    let mut global_max = 0f64;
    for &d in dims {
        for &bw in bandwidths {
            let mut cell_max = 0f64;
            for trial in 0..trials {
                cell_max = cell_max.max(residual_for(kind, d, bw, seed, trial)?);
            }
            cells.push(json!({ "d": d, "bandwidth": bw, "max_rel_residual": cell_max }));
            global_max = global_max.max(cell_max);
        }
    }
    let pass = global_max <= VERIFY_TOL;

    let report = json!({
        "kind": kind.name(),
        "seed": seed,
        "trials_per_cell": trials,
        "dims": dims,
        "bandwidths": bandwidths,
        "tolerance": VERIFY_TOL,
        "max_rel_residual": global_max,
        "pass": pass,
        "cells": cells,
    });
    let out_dir = PathBuf::from(&config.outputs);
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| io_fail(&format!("creating {}", out_dir.display()), e))?;
    let report_path = out_dir.join(format!("verify_{}.json", kind.name().replace('-', "_")));
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    text.push('\n');
    std::fs::write(&report_path, text)
        .map_err(|e| io_fail(&format!("writing {}", report_path.display()), e))?;

    if !cli.quiet {
        println!(
            "verify {}: max relative residual {:.3e} over {} trials in {} cells; report {}",
            kind.name(),
            global_max,
            trials * (dims.len() * bandwidths.len()) as u64,
            dims.len() * bandwidths.len(),
            report_path.display()
        );
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Violation(format!(
            "verify {}: max relative residual {:.3e} exceeds {:.0e} (report: {})",
            kind.name(),
            global_max,
            VERIFY_TOL,
            report_path.display()
        )))
    }
}

/// One seeded trial of the named check; returns its relative residual.
fn residual_for(kind: VerifyKind, d: usize, bw: i64, seed: u64, trial: u64) -> Result<f64, Failure> {
    let mut rng = trial_rng(seed, d, bw, trial);
    match kind {
        VerifyKind::Lemma => {
            let a = random_field(d, -bw, bw, 1.0, &mut rng);
            let b = random_field(d, -bw, bw, 1.0, &mut rng);
            let f = random_hardy(d, bw, 1.0, &mut rng);
            let r = lemma_residual(&a, &b, &f).map_err(Failure::from_core)?;
            Ok(relative(r, lemma_scale(&a, &b, &f)))
        }
        VerifyKind::Critical => {
            // even trials draw fully non-Hermitian symbols: the identity
            // does not depend on the Hermitian structure
            let u = if trial.is_multiple_of(2) {
                random_field(d, -bw, bw, 1.0, &mut rng)
            } else {
                random_hermitian(d, bw, 1.0, &mut rng)
            };
            let f = random_hardy(d, bw, 1.0, &mut rng);
            let r = critical_residual(&u, &f).map_err(Failure::from_core)?;
            Ok(relative(r, critical_scale(&u, &f)))
        }
        VerifyKind::LaxStatic => {
            let u = if trial.is_multiple_of(2) {
                random_field(d, -bw, bw, 1.0, &mut rng)
            } else {
                random_hermitian(d, bw, 1.0, &mut rng)
            };
            let f = random_hardy(d, bw, 1.0, &mut rng);
            let r = lax_static_residual(&u, &f).map_err(Failure::from_core)?;
            let s = lax_static_scale(&u, &f).map_err(Failure::from_core)?;
            Ok(relative(r, s))
        }
        VerifyKind::Explicit => {
            let u = random_hermitian(d, bw, 0.8, &mut rng);
            let e0 = energy(&u, 0);
            let e1 = energy(&u, 1);
            let m0 = matrix_invariant(&u, 0);
            let r0 = (e0_explicit(&u) - e0).norm() / e0.norm().max(1.0);
            let r1 = (e1_explicit(&u) - e1).norm() / e1.norm().max(1.0);
            let rm = (m0_explicit(&u) - &m0).norm() / m0.norm().max(1.0);
            Ok(r0.max(r1).max(rm))
        }
        VerifyKind::Trace => {
            let u = random_hermitian(d, bw, 0.8, &mut rng);
            let mut worst = 0f64;
            for k in 0..=6i64 {
                let tr = matrix_invariant(&u, k).trace();
                let e = energy(&u, k as usize);
                worst = worst.max((tr - e).norm() / e.norm().max(1.0));
            }
            Ok(worst)
        }
    }
}

fn run_spectrum(
    cli: &Cli,
    config: &SimConfig,
    input: &Path,
    hardy_modes: Option<usize>,
) -> Result<(), Failure> {
    if input.is_dir() {
        let manifest =
            io::read_manifest(&input.join("run_manifest.json")).map_err(Failure::from_core)?;
        let n = hardy_modes.unwrap_or(manifest.config.hardy_modes);
        let mut rows = Vec::new();
        for meta in &manifest.snapshots {
            let u = io::read_field(&input.join(&meta.file)).map_err(Failure::from_core)?;
            rows.push((meta.t, spectrum_l(&u, n).map_err(Failure::from_core)?));
        }
        let out_dir = cli.out.clone().unwrap_or_else(|| input.to_path_buf());
        let path = out_dir.join("spectrum.csv");
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| io_fail(&format!("creating {}", out_dir.display()), e))?;
        io::write_spectrum_csv(&path, &rows).map_err(Failure::from_core)?;
        if !cli.quiet {
            let count = rows.first().map_or(0, |(_, evs)| evs.len());
            println!(
                "wrote {} spectra ({} eigenvalues each, cutoff {}) to {}",
                rows.len(),
                count,
                n,
                path.display()
            );
        }
    } else {
        let u = io::read_field(input).map_err(Failure::from_core)?;
        let n = hardy_modes.unwrap_or(config.hardy_modes);
        let evs = spectrum_l(&u, n).map_err(Failure::from_core)?;
        let out_dir = cli
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&config.outputs));
        let path = out_dir.join("spectrum.csv");
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| io_fail(&format!("creating {}", out_dir.display()), e))?;
        io::write_spectrum_csv(&path, &[(0.0, evs.clone())]).map_err(Failure::from_core)?;
        if !cli.quiet {
            println!(
                "spectrum: {} eigenvalues in [{:.6}, {:.6}]; wrote {}",
                evs.len(),
                evs.first().unwrap_or(&0.0),
                evs.last().unwrap_or(&0.0),
                path.display()
            );
        }
    }
    Ok(())
}

fn run_invariants(
    cli: &Cli,
    config: &SimConfig,
    input: &Path,
    energy_orders: Option<usize>,
    matrix_orders: Option<i64>,
) -> Result<(), Failure> {
    if input.is_dir() {
        let manifest =
            io::read_manifest(&input.join("run_manifest.json")).map_err(Failure::from_core)?;
        let k_e = energy_orders.unwrap_or(manifest.config.energy_orders);
        let k_m = matrix_orders.unwrap_or(manifest.config.matrix_orders);
        let mut states = Vec::new();
        for meta in &manifest.snapshots {
            let u = io::read_field(&input.join(&meta.file)).map_err(Failure::from_core)?;
            states.push((meta.t, u));
        }
        let (records, summary) = drift_series(&states, k_e, k_m).map_err(Failure::from_core)?;
        let out_dir = cli.out.clone().unwrap_or_else(|| input.to_path_buf());
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| io_fail(&format!("creating {}", out_dir.display()), e))?;
        io::write_invariants_csv(&out_dir.join("invariants.csv"), &records)
            .map_err(Failure::from_core)?;
        io::write_matrix_sidecar(&out_dir.join("matrix_invariants.json"), &records)
            .map_err(Failure::from_core)?;
        if !cli.quiet {
            println!(
                "invariants along {} snapshots: energy drift {:.3e}, matrix drift {:.3e}; wrote {}",
                records.len(),
                summary.energy_drift,
                summary.matrix_drift,
                out_dir.join("invariants.csv").display()
            );
        }
    } else {
        let u = io::read_field(input).map_err(Failure::from_core)?;
        let k_e = energy_orders.unwrap_or(config.energy_orders);
        let k_m = matrix_orders.unwrap_or(config.matrix_orders);
        let rec = invariant_record(&u, 0.0, k_e, k_m).map_err(Failure::from_core)?;
        let out_dir = cli
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&config.outputs));
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| io_fail(&format!("creating {}", out_dir.display()), e))?;
        io::write_invariants_csv(&out_dir.join("invariants.csv"), std::slice::from_ref(&rec))
            .map_err(Failure::from_core)?;
        io::write_matrix_sidecar(
            &out_dir.join("matrix_invariants.json"),
            std::slice::from_ref(&rec),
        )
        .map_err(Failure::from_core)?;
        if !cli.quiet {
            println!(
                "wrote energy orders 0..={} and matrix orders -1..={} to {}",
                k_e,
                k_m,
                out_dir.display()
            );
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_gen(
    cli: &Cli,
    config: &SimConfig,
    preset: Preset,
    d: usize,
    amplitude: f64,
    rate: f64,
    bandwidth: i64,
    path: Option<PathBuf>,
) -> Result<(), Failure> {
    if d == 0 {
        return Err(Failure::Invalid("--d must be ≥ 1".into()));
    }
    if bandwidth < 0 {
        return Err(Failure::Invalid("--bandwidth must be ≥ 0".into()));
    }
    let u = match preset {
        Preset::Cosine => cosine_field(d, amplitude, None).map_err(Failure::from_core)?,
        Preset::Decay => decay_field(d, bandwidth, amplitude, rate, config.seed),
    };
    let path = path.unwrap_or_else(|| PathBuf::from(&config.outputs).join("field.json"));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| io_fail(&format!("creating {}", parent.display()), e))?;
        }
    }
    io::write_field(&path, &u).map_err(Failure::from_core)?;
    if !cli.quiet {
        println!(
            "wrote {} (d = {}, modes {}..={})",
            path.display(),
            d,
            u.lo(),
            u.hi()
        );
    }
    Ok(())
}
