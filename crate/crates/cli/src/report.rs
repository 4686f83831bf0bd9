//! Experiment report: a structured text document with per-trial records,
//! radius clusters, aggregates, and (optionally) full convergence traces.
//! All numbers are written with enough digits to reimport losslessly.

use std::fmt::Write as _;

use strad::{MultiStartReport, NormKind, PencilKind, SolverConfig, Stage};

pub struct ReportMeta<'a> {
    pub problem_path: &'a str,
    pub kind: PencilKind,
    pub norm: NormKind,
    pub trials: usize,
    pub config: &'a SolverConfig,
    pub keep_traces: bool,
}

fn kind_label(kind: PencilKind) -> &'static str {
    match kind {
        PencilKind::Controllability => "controllability",
        PencilKind::Stabilizability => "stabilizability",
        PencilKind::Stability => "stability",
    }
}

fn norm_label(norm: NormKind) -> &'static str {
    match norm {
        NormKind::Frobenius => "frobenius",
        NormKind::Spectral => "spectral",
    }
}

/// Renders the machine-readable report document.
pub fn render(meta: &ReportMeta, report: &MultiStartReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "strad-report v1");
    let _ = writeln!(out, "problem {}", meta.problem_path);
    let _ = writeln!(out, "kind {}", kind_label(meta.kind));
    let _ = writeln!(out, "norm {}", norm_label(meta.norm));
    let _ = writeln!(out, "trials {}", meta.trials);
    let _ = writeln!(out, "seed {}", meta.config.seed);
    let _ = writeln!(out, "eps {:e}", meta.config.epsilon);
    let _ = writeln!(out, "xi {:e}", meta.config.xi);
    let _ = writeln!(out, "max-iter {}", meta.config.max_iter);
    let _ = match meta.config.gamma {
        strad::GammaPolicy::Fixed(v) => writeln!(out, "gamma fixed {v:e}"),
        strad::GammaPolicy::Capped { cap } => writeln!(out, "gamma capped {cap:e}"),
        strad::GammaPolicy::Uncapped => writeln!(out, "gamma uncapped"),
    };
    let _ = writeln!(
        out,
        "columns trial radius g sigma iters1 iters2 status certificate witness-re witness-im"
    );
    for record in &report.trials {
        let r = &record.result;
        let cert_metric = record
            .certificate
            .m_ucon
            .or(record.certificate.axis_distance)
            .unwrap_or(f64::NAN);
        let (wre, wim) = record.certificate.witness_eigenvalue.unwrap_or((f64::NAN, f64::NAN));
        let _ = writeln!(
            out,
            "trial {} {:.12e} {:.12e} {:.12e} {} {} {} {:.12e} {:.12e} {:.12e}",
            record.trial,
            r.radius,
            r.g_value,
            r.sigma_min,
            r.stage1_iterations,
            r.stage2_iterations,
            r.status.label(),
            cert_metric,
            wre,
            wim
        );
    }
    for cluster in &report.clusters {
        let _ = writeln!(
            out,
            "cluster {:.12e} {:.12e} {}",
            cluster.low, cluster.high, cluster.count
        );
    }
    if report.uncertified > 0 {
        let _ = writeln!(out, "uncertified {}", report.uncertified);
    }
    let _ = writeln!(out, "success-rate {:.6}", report.success_rate);
    let _ = writeln!(out, "avg-iterations {:.4}", report.avg_iterations);
    if meta.keep_traces {
        for record in &report.trials {
            for point in &record.result.trace {
                let _ = writeln!(
                    out,
                    "trace {} {} {} {:.12e} {:.12e}",
                    record.trial,
                    point.stage.label(),
                    point.iteration,
                    point.f_value,
                    point.sigma_min
                );
            }
        }
    }
    out
}

/// Renders the human-readable summary table.
pub fn render_summary(report: &MultiStartReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {:>10} {:>14}", "radius interval", "frequency", "success rate");
    for (i, cluster) in report.clusters.iter().enumerate() {
        let interval = if (cluster.high - cluster.low).abs() < 5e-5 {
            format!("{:.4}", cluster.representative)
        } else {
            format!("[{:.5}, {:.5}]", cluster.low, cluster.high)
        };
        let rate = if i == 0 {
            format!("{:.1}%", 100.0 * report.success_rate)
        } else {
            String::new()
        };
        let _ = writeln!(out, "{:<28} {:>10} {:>14}", interval, cluster.count, rate);
    }
    if report.uncertified > 0 {
        let _ = writeln!(
            out,
            "{:<28} {:>10}",
            "(no rank deficiency found)", report.uncertified
        );
    }
    let _ = writeln!(out, "average iterations: {:.2}", report.avg_iterations);
    out
}

/// One row extracted from a report's trace section.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub trial: usize,
    pub stage: Stage,
    pub iteration: usize,
    pub f_value: f64,
    pub sigma_min: f64,
}

/// Pulls the trace rows back out of a rendered report.
pub fn parse_traces(text: &str) -> anyhow::Result<Vec<TraceRow>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("trace") {
            continue;
        }
        let fail = || anyhow::anyhow!("malformed trace line {}", idx + 1);
        let trial: usize = tokens.next().ok_or_else(fail)?.parse()?;
        let stage = match tokens.next().ok_or_else(fail)? {
            "feasibility" => Stage::Feasibility,
            "weighted" => Stage::Weighted,
            other => anyhow::bail!("unknown stage `{other}` on line {}", idx + 1),
        };
        let iteration: usize = tokens.next().ok_or_else(fail)?.parse()?;
        let f_value: f64 = tokens.next().ok_or_else(fail)?.parse()?;
        let sigma_min: f64 = tokens.next().ok_or_else(fail)?.parse()?;
        rows.push(TraceRow {
            trial,
            stage,
            iteration,
            f_value,
            sigma_min,
        });
    }
    if rows.is_empty() {
        anyhow::bail!("report contains no trace rows (was it produced with traces on?)");
    }
    Ok(rows)
}

/// Converts trace rows to the convergence CSV (header first, stage column
/// marks the stage boundary).
pub fn traces_to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("trial,stage,iteration,f_value,sigma_min\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.9e},{:.9e}",
            row.trial,
            row.stage.label(),
            row.iteration,
            row.f_value,
            row.sigma_min
        );
    }
    out
}
