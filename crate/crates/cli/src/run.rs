//! Spectrum, march and sweep modes.

use std::path::{Path, PathBuf};

use splitdg_core::spectra::{classify, Spectrum};
use splitdg_core::timeint::{rk_march, MarchOptions};
use splitdg_core::{Execution, GlobalOperator};

use crate::config::{Case, ExperimentConfig, Mode};
use crate::output::{num, write_csv, write_text};
use crate::svg::{emit_svg, PlotKind, PlotStyle, Series};
use crate::{CliError, Status};

pub struct Context {
    pub out_dir: PathBuf,
    pub exec: Execution,
}

fn build(cfg: &ExperimentConfig, case: &Case) -> Result<GlobalOperator, CliError> {
    let mesh = cfg.mesh(case.k)?;
    let op = GlobalOperator::assemble(
        &mesh,
        &case.split_config(cfg),
        cfg.flux(),
        cfg.boundary(),
        &cfg.speed(),
        Execution::Sequential,
    )?;
    Ok(op)
}

fn file_name(stem: &str, label: &str) -> String {
    if label.is_empty() {
        format!("{stem}.csv")
    } else {
        format!("{stem}_{label}.csv")
    }
}

fn series_label(case: &Case, label: &str) -> String {
    if label.is_empty() {
        format!("{} N={} K={} θ={} α={}", case.family_tag(), case.n, case.k, case.theta, case.alpha)
    } else {
        label.to_string()
    }
}

pub fn run(cfg: &ExperimentConfig, mode: Mode, ctx: &Context) -> Result<Status, CliError> {
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| CliError::Io(ctx.out_dir.clone(), e.to_string()))?;
    match mode {
        Mode::Spectrum => spectrum(cfg, ctx),
        Mode::March => march(cfg, ctx),
        Mode::Sweep => sweep(cfg, ctx),
        Mode::Verify => Ok(crate::verify::run(None, cfg.seed, ctx.exec)),
    }
}

fn spectrum(cfg: &ExperimentConfig, ctx: &Context) -> Result<Status, CliError> {
    let cases = cfg.cases();
    let results = ctx.exec.map_slice(&cases, |case| -> Result<_, CliError> {
        let op = build(cfg, case)?;
        let s = Spectrum::from_operator(&op)?;
        let report = classify(&op, &s);
        let residual = if cfg.residual_samples > 0 {
            s.residual_check(op.matrix(), cfg.residual_samples)
        } else {
            None
        };
        Ok((s, report, op.inf_norm(), residual))
    });
    let mut series = Vec::new();
    let mut scaling = None;
    for (case, result) in cases.iter().zip(results) {
        let (s, report, norm, residual) = result?;
        let label = case.label(cfg);
        let path = ctx.out_dir.join(file_name("spectrum", &label));
        let k = s.scaling();
        let rows: Vec<Vec<String>> = s
            .sorted()
            .iter()
            .map(|z| vec![num(z.re), num(z.im), num(z.re * k), num(z.im * k)])
            .collect();
        write_csv(&path, &["re", "im", "re_scaled", "im_scaled"], &rows)?;
        let mut line = format!(
            "{}: max_re={} ({:.3e}·‖G‖∞) stable={} paired={} -> {}",
            series_label(case, &label),
            num(report.max_re),
            report.max_re / norm,
            report.stable,
            report.paired,
            path.display()
        );
        if let Some(r) = residual {
            line.push_str(&format!(" residual={r:.2e}·‖G‖∞"));
        }
        println!("{line}");
        scaling.get_or_insert(k);
        series.push(Series {
            label: series_label(case, &label),
            points: s.eigenvalues().iter().map(|z| (z.re, z.im * k)).collect(),
        });
    }
    if cfg.svg {
        let style = PlotStyle {
            title: "Spectrum of the semi-discrete operator".into(),
            x_label: "Re λ".into(),
            y_label: "Im λ · Δx/(a_max (N+1))".into(),
            annotation: scaling.map(|k| format!("imaginary axis scaled by Δx/(a_max (N+1)) = {k:.6e}")),
            ..PlotStyle::default()
        };
        write_text(&ctx.out_dir.join("spectrum.svg"), &emit_svg(PlotKind::Scatter, &series, &style))?;
    }
    Ok(Status::Ok)
}

fn march(cfg: &ExperimentConfig, ctx: &Context) -> Result<Status, CliError> {
    let cases = cfg.cases();
    let mut opts = MarchOptions::new(cfg.t_final).with_cfl(cfg.cfl);
    opts.dt = cfg.dt;
    opts.sample_every = cfg.sample_every;
    opts.force = cfg.force;
    let results = ctx.exec.map_slice(&cases, |case| -> Result<_, CliError> {
        let op = build(cfg, case)?;
        let u0 = cfg.initial_condition().sample(&op);
        let out = rk_march(&op, &u0, &opts)?;
        Ok((op.node_coordinates(), out))
    });
    let mut status = Status::Ok;
    for (case, result) in cases.iter().zip(results) {
        let (x, out) = result?;
        let label = case.label(cfg);
        let tr = &out.trace;
        let rows: Vec<Vec<String>> = (0..tr.len())
            .map(|i| vec![num(tr.times[i]), num(tr.e_a[i]), num(tr.e_inv_a[i]), num(tr.e_l2[i]), num(tr.bound_rhs[i])])
            .collect();
        let energy = ctx.out_dir.join(file_name("energy", &label));
        write_csv(&energy, &["t", "E_a", "E_inv_a", "E_L2", "bound_rhs"], &rows)?;
        let state_rows: Vec<Vec<String>> = x.iter().zip(&out.state).map(|(x, u)| vec![num(*x), num(*u)]).collect();
        let state = ctx.out_dir.join(file_name("state", &label));
        write_csv(&state, &["x", "u"], &state_rows)?;
        if out.cfl_warning {
            eprintln!("warning: dt = {} exceeds the CFL estimate (forced)", out.dt);
        }
        if let Some(t) = out.non_finite_at {
            eprintln!("error: state became non-finite at t = {t}");
        }
        println!(
            "{}: steps={} dt={} E_a(0)={:.6e} E_a(T)={:.6e} bound_violated={} -> {}",
            series_label(case, &label),
            out.steps,
            num(out.dt),
            tr.e_a[0],
            tr.e_a.last().unwrap(),
            tr.violated,
            energy.display()
        );
        if tr.violated {
            status = Status::PropertyFailure;
        }
        if cfg.svg {
            let line = |name: &str, v: &[f64]| Series {
                label: name.into(),
                points: tr.times.iter().copied().zip(v.iter().copied()).collect(),
            };
            let series = [
                line("E_a", &tr.e_a),
                line("E_1/a", &tr.e_inv_a),
                line("E_L2", &tr.e_l2),
                line("bound", &tr.bound_rhs),
            ];
            let style = PlotStyle {
                title: format!("Energy, {}", series_label(case, &label)),
                x_label: "t".into(),
                y_label: "energy".into(),
                annotation: Some(format!("RK4 dt = {:.6e}, sampled every {} steps", out.dt, cfg.sample_every)),
                log_y: true,
                ..PlotStyle::default()
            };
            let name = if label.is_empty() { "energy.svg".into() } else { format!("energy_{label}.svg") };
            write_text(&ctx.out_dir.join(name), &emit_svg(PlotKind::Line, &series, &style))?;
        }
    }
    Ok(status)
}

pub const SWEEP_HEADER: [&str; 8] = ["family", "n", "k", "theta", "alpha", "max_re", "stable", "gamma"];

fn sweep(cfg: &ExperimentConfig, ctx: &Context) -> Result<Status, CliError> {
    let cases = cfg.cases();
    let results = ctx.exec.map_slice(&cases, |case| -> Result<_, CliError> {
        let op = build(cfg, case)?;
        let s = Spectrum::from_operator(&op)?;
        let report = classify(&op, &s);
        let (norm, _) = op.config().form.estimate(case.alpha);
        let gamma = op.gamma_global(norm, Execution::Sequential);
        Ok(vec![
            case.family_tag().to_string(),
            case.n.to_string(),
            case.k.to_string(),
            case.theta.to_string(),
            num(case.alpha),
            num(report.max_re),
            report.stable.to_string(),
            num(gamma),
        ])
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let path: &Path = &ctx.out_dir.join("sweep.csv");
    write_csv(path, &SWEEP_HEADER, &rows)?;
    let stable = rows.iter().filter(|r| r[6] == "true").count();
    println!("{} configurations, {stable} stable -> {}", rows.len(), path.display());
    Ok(Status::Ok)
}
