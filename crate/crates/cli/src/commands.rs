use std::fmt::Write as _;

use rayon::prelude::*;
use renorm::balls::{content_upper_bound, growth_process, Ball, BallsError};
use renorm::solver::{renormalised_energy, synharmony_estimate, EnergyReport, Mode, TargetModel, DEFAULT_LENGTHS};
use renorm::topology::{
    is_topological_resolution, singular_energy_of_boundary, table_report, table_rows, ManifoldDescriptor, TableFormat,
};
use serde_json::json;

use crate::config::{self, read_json, BallsConfig, EnergyConfig, GeodesicConfig, Token};
use crate::output::{csv_string, emit, over_pi, sig7, Format};
use crate::{Cli, Command, Failure};

pub fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let text = match &cli.command {
        Command::Table { manifold, norm_bound } => table(manifold, *norm_bound, cli.format.unwrap_or(Format::Text))?,
        Command::Resolve { manifold, outer, sing, inner } => {
            let (text, compatible) = resolve(manifold, outer, sing, inner, cli.format.unwrap_or(Format::Text))?;
            emit(&text, cli.out.as_deref())?;
            if !compatible {
                return Err(Failure::Topology(format!("{sing:?} does not resolve {outer}")));
            }
            return Ok(());
        }
        Command::Energy { config, manifold } => {
            let cfg: EnergyConfig = read_json(config)?;
            energy(&cfg, manifold.as_deref(), cli)?
        }
        Command::Balls { config } => {
            let cfg: BallsConfig = read_json(config)?;
            balls(&cfg, cli.format.unwrap_or(Format::Csv))?
        }
        Command::Synharmony { manifold, gamma, beta, gamma_phase, beta_phase, n_theta, lengths } => synharmony(
            manifold,
            (gamma, *gamma_phase),
            (beta, *beta_phase),
            *n_theta,
            lengths,
            cli.seed,
            cli.format.unwrap_or(Format::Text),
        )?,
    };
    emit(&text, cli.out.as_deref())?;
    Ok(())
}

fn table(manifold: &str, norm_bound: f64, format: Format) -> Result<String, Failure> {
    let m = ManifoldDescriptor::new(config::parse_kind(manifold)?);
    Ok(match format {
        Format::Text => table_report(&m, TableFormat::Text, norm_bound)?,
        Format::Csv => table_report(&m, TableFormat::Csv, norm_bound)?,
        Format::Json => {
            let rows: Vec<_> = table_rows(&m, norm_bound)?
                .into_iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "description": r.description,
                        "conjugates": r.conjugates,
                        "lambda": r.lambda,
                        "decompositions": r.decompositions.iter()
                            .map(|d| d.iter().map(|&c| m.class_name(c)).collect::<Vec<_>>())
                            .collect::<Vec<_>>(),
                        "singular_energy": r.singular_energy,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "manifold": m.kind().to_string(), "rows": rows })).expect("json") + "\n"
        }
    })
}

fn resolve(
    manifold: &str,
    outer: &str,
    sing: &[String],
    inner: &[String],
    format: Format,
) -> Result<(String, bool), Failure> {
    let kind = config::parse_kind(manifold)?;
    let m = ManifoldDescriptor::new(kind);
    let outer_c = config::class_list(kind, &[outer.to_string()])?[0];
    let sing_c = config::class_list(kind, sing)?;
    let inner_c = config::class_list(kind, inner)?;
    let compatible = is_topological_resolution(&m, outer_c, &inner_c, &sing_c)?;
    let esg = singular_energy_of_boundary(&m, outer_c, &inner_c).ok();
    let charge: f64 = sing_c.iter().map(|&c| m.length(c).powi(2) / (4.0 * std::f64::consts::PI)).sum();
    let verdict = if compatible { "compatible" } else { "incompatible" };
    let text = match format {
        Format::Text => {
            let mut s = format!("{verdict}\n");
            writeln!(s, "charges: {} (Σλ²/4π = {} = {}π)", names(&m, &sing_c), sig7(charge), over_pi(charge)).unwrap();
            if let Some(e) = esg {
                writeln!(s, "singular energy of the boundary data: {} = {}π", sig7(e), over_pi(e)).unwrap();
            }
            s
        }
        Format::Csv => csv_string(
            &["compatible", "charge_energy", "charge_energy_over_pi", "singular_energy", "singular_energy_over_pi"],
            &[vec![
                compatible.to_string(),
                sig7(charge),
                over_pi(charge),
                esg.map(sig7).unwrap_or_default(),
                esg.map(over_pi).unwrap_or_default(),
            ]],
        ),
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "compatible": compatible,
                "charge_energy": charge,
                "singular_energy": esg,
            }))
            .expect("json")
                + "\n"
        }
    };
    Ok((text, compatible))
}

fn names(m: &ManifoldDescriptor, cs: &[renorm::topology::ClassId]) -> String {
    cs.iter().map(|&c| m.class_name(c)).collect::<Vec<_>>().join(" ")
}

fn energy(cfg: &EnergyConfig, manifold: Option<&str>, cli: &Cli) -> Result<String, Failure> {
    let run = cfg.build(manifold, cli.seed)?;
    let format = cli.format.unwrap_or(Format::Csv);
    if let Some(sw) = &cfg.sweep {
        let base = run.problem.domain.singularities[sw.singularity].center;
        let positions = config::sweep_positions(base, sw);
        let solve = |p: &[f64; 2]| {
            let mut q = run.problem.clone();
            q.domain.singularities[sw.singularity].center = *p;
            renormalised_energy(&q, &run.schedule, run.mode, &run.solver)
        };
        let results: Vec<_> = if cli.threads <= 1 {
            positions.iter().map(solve).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads)
                .build()
                .map_err(|e| Failure::Config(e.to_string()))?;
            pool.install(|| positions.par_iter().map(solve).collect())
        };
        let mut rows = Vec::new();
        for (p, r) in positions.iter().zip(results) {
            let r = r?;
            for w in &r.warnings {
                eprintln!("warning: a = ({}, {}): {w}", p[0], p[1]);
            }
            rows.push((*p, r));
        }
        return Ok(sweep_output(&rows, format));
    }
    let report = renormalised_energy(&run.problem, &run.schedule, run.mode, &run.solver)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(energy_output(&report, format))
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Geometric => "geom",
        Mode::Topological => "top",
    }
}

fn energy_output(r: &EnergyReport, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut rows = Vec::new();
            let mut push = |q: &str, i: String, rho: String, v: f64, pi: bool| {
                rows.push(vec![q.to_string(), i, rho, sig7(v), if pi { over_pi(v) } else { String::new() }]);
            };
            for &(rho, e) in &r.samples {
                push("energy", String::new(), sig7(rho), e, true);
            }
            if r.mode == Mode::Topological {
                for &(rho, e) in &r.geometric {
                    push("geometric_energy", String::new(), sig7(rho), e, true);
                }
            }
            push("A", String::new(), String::new(), r.slope, true);
            push("W", String::new(), String::new(), r.renormalised, true);
            push("expected_A", String::new(), String::new(), r.expected_slope, true);
            push("residual", String::new(), String::new(), r.residual, false);
            for (i, f) in r.flux.iter().enumerate() {
                push("flux_x", i.to_string(), String::new(), f[0], false);
                push("flux_y", i.to_string(), String::new(), f[1], false);
            }
            csv_string(&["quantity", "singularity", "rho", "value", "value_over_pi"], &rows)
        }
        Format::Json => {
            let samples: Vec<_> = r.samples.iter().map(|&(rho, e)| json!({ "rho": rho, "energy": e })).collect();
            let geometric: Vec<_> = r.geometric.iter().map(|&(rho, e)| json!({ "rho": rho, "energy": e })).collect();
            serde_json::to_string_pretty(&json!({
                "mode": mode_name(r.mode),
                "samples": samples,
                "geometric": geometric,
                "A": r.slope,
                "W": r.renormalised,
                "expected_A": r.expected_slope,
                "residual": r.residual,
                "flux": r.flux,
                "warnings": r.warnings,
            }))
            .expect("json")
                + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "mode: {}", mode_name(r.mode)).unwrap();
            for &(rho, e) in &r.samples {
                writeln!(s, "rho = {:<10} E = {} = {}π", sig7(rho), sig7(e), over_pi(e)).unwrap();
            }
            writeln!(s, "A = {} = {}π (expected {}π)", sig7(r.slope), over_pi(r.slope), over_pi(r.expected_slope)).unwrap();
            writeln!(s, "W = {} = {}π", sig7(r.renormalised), over_pi(r.renormalised)).unwrap();
            for (i, f) in r.flux.iter().enumerate() {
                writeln!(s, "flux[{i}] = ({}, {})", sig7(f[0]), sig7(f[1])).unwrap();
            }
            s
        }
    }
}

fn sweep_output(rows: &[([f64; 2], EnergyReport)], format: Format) -> String {
    match format {
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(p, r)| json!({ "a_x": p[0], "a_y": p[1], "W": r.renormalised, "A": r.slope, "flux": r.flux }))
                .collect();
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        _ => csv_string(
            &["a_x", "a_y", "W", "W_over_pi", "A"],
            &rows
                .iter()
                .map(|(p, r)| vec![sig7(p[0]), sig7(p[1]), sig7(r.renormalised), over_pi(r.renormalised), sig7(r.slope)])
                .collect::<Vec<_>>(),
        ),
    }
}

fn balls(cfg: &BallsConfig, format: Format) -> Result<String, Failure> {
    let family: Vec<Ball> = cfg.balls.iter().map(|b| Ball::new(b.x, b.y, b.r)).collect();
    if cfg.balls.iter().any(|b| !(b.r >= 0.0) || !b.x.is_finite() || !b.y.is_finite()) {
        return Err(Failure::Config("ball radii must be nonnegative and centres finite".into()));
    }
    if !(cfg.t_max >= 0.0) || cfg.samples < 2 {
        return Err(Failure::Config("t_max must be nonnegative and samples at least 2".into()));
    }
    let trace = growth_process(&family, cfg.t_max).map_err(|e: BallsError| Failure::Config(e.to_string()))?;
    let mut times: Vec<f64> = (0..cfg.samples).map(|k| cfg.t_max * k as f64 / (cfg.samples - 1) as f64).collect();
    times.extend(&trace.merge_times);
    times.sort_by(f64::total_cmp);
    times.dedup();
    Ok(match format {
        Format::Json => {
            let intervals: Vec<_> = trace
                .intervals
                .iter()
                .map(|iv| {
                    json!({
                        "t_start": iv.t_start,
                        "t_end": iv.t_end,
                        "balls": iv.balls.iter().map(|b| json!({"x": b.center[0], "y": b.center[1], "r": b.radius})).collect::<Vec<_>>(),
                        "members": iv.members,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({
                "merge_times": trace.merge_times,
                "content_upper_bound": content_upper_bound(&family),
                "intervals": intervals,
            }))
            .expect("json")
                + "\n"
        }
        _ => {
            let mut rows = Vec::new();
            for &t in &times {
                for (i, b) in trace.at(t).iter().enumerate() {
                    rows.push(vec![format!("{t}"), i.to_string(), format!("{}", b.center[0]), format!("{}", b.center[1]), format!("{}", b.radius)]);
                }
            }
            csv_string(&["t", "ball_index", "cx", "cy", "r"], &rows)
        }
    })
}

fn synharmony(
    manifold: &str,
    gamma: (&str, f64),
    beta: (&str, f64),
    n_theta: usize,
    lengths: &[f64],
    seed: u64,
    format: Format,
) -> Result<String, Failure> {
    let target = TargetModel::from_kind(config::parse_kind(manifold)?)?;
    let spec = |(c, phase): (&str, f64)| GeodesicConfig { class: Token::Str(c.to_string()), phase, element: None };
    let g = config::build_loop(&target, &spec(gamma))?;
    let b = config::build_loop(&target, &spec(beta))?;
    let lengths = if lengths.is_empty() { DEFAULT_LENGTHS.to_vec() } else { lengths.to_vec() };
    let cfg = renorm::solver::SolverConfig { seed, ..Default::default() };
    let r = synharmony_estimate(&target, &g, &b, &lengths, n_theta, &cfg)?;
    Ok(match format {
        Format::Csv => csv_string(
            &["T", "excess", "excess_over_pi"],
            &r.excess.iter().map(|&(t, e)| vec![sig7(t), sig7(e), over_pi(e)]).collect::<Vec<_>>(),
        ),
        Format::Json => {
            let ex: Vec<_> = r.excess.iter().map(|&(t, e)| json!({ "T": t, "excess": e })).collect();
            serde_json::to_string_pretty(&json!({ "estimate": r.estimate, "loop_energy": r.loop_energy, "excess": ex }))
                .expect("json")
                + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            for &(t, e) in &r.excess {
                writeln!(s, "T = {:<6} excess = {} = {}π", sig7(t), sig7(e), over_pi(e)).unwrap();
            }
            writeln!(s, "estimate = {} = {}π", sig7(r.estimate), over_pi(r.estimate)).unwrap();
            s
        }
    })
}
