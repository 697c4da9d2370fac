//! The six subcommands.

use crate::config::{
    cutoff_override, parse_f64_list, parse_grid, parse_root_order, resolve, ResolvedMap,
};
use crate::output::{
    column_headers, complex_columns, csv_meta_line, emit, opt_field, polar_3dp, unix_now,
};
use crate::{
    CliError, EngineerArgs, FidelityArgs, FormatArg, HusimiArgs, StateArgs, SweepArgs,
    ValidateArgs,
};
use serde_json::json;
use tsi_lab::engineering::{optimize_transmittance, EngineeringPlan, RootOrder};
use tsi_lab::fidelity::fidelity_sweep;
use tsi_lab::photon_stats::{husimi_grid, stats_report, stats_sweep, StatsReport};
use tsi_lab::validation;

pub type Result<T> = std::result::Result<T, CliError>;

fn format_of(opts: &crate::OutputOpts) -> FormatArg {
    opts.format.unwrap_or_default()
}

pub fn state(args: StateArgs) -> Result<()> {
    let config = resolve(&args.map)?;
    let state = config.map.build_state(config.n)?;
    let polar = args.out.polar;
    let content = match format_of(&args.out) {
        FormatArg::Csv => {
            let (h1, h2) = column_headers(polar);
            let mut out = csv_meta_line(&args.out, "state");
            out.push_str(&format!("n,{h1},{h2},p_n\n"));
            let p = state.photon_distribution();
            for (n, amp) in state.amplitudes().iter().enumerate() {
                let (a, b) = complex_columns(*amp, polar);
                out.push_str(&format!("{n},{a},{b},{}\n", p[n]));
            }
            out
        }
        FormatArg::Json => {
            let pairs: Vec<[f64; 2]> = state
                .amplitudes()
                .iter()
                .map(|amp| {
                    let (a, b) = complex_columns(*amp, polar);
                    [a, b]
                })
                .collect();
            format!("{}\n", json!(pairs))
        }
    };
    emit(&args.out, &content)
}

const SWEEP_HEADER: &str = "N,p_even,p_odd,mean_n,delta_n,q,g2,dx1,dx2";

pub fn sweep(args: SweepArgs) -> Result<()> {
    let config = resolve(&args.map)?;
    let reports: Vec<StatsReport> = match &config.map {
        ResolvedMap::Spec(map) => stats_sweep(map, config.n)?,
        // the exact mode rebuilds each truncation from the rational orbit
        exact => (0..=config.n)
            .map(|n| Ok(stats_report(&exact.build_state(n)?)))
            .collect::<Result<_>>()?,
    };
    let content = match format_of(&args.out) {
        FormatArg::Csv => {
            let mut out = csv_meta_line(&args.out, "sweep");
            out.push_str(SWEEP_HEADER);
            out.push('\n');
            for (n, r) in reports.iter().enumerate() {
                out.push_str(&format!(
                    "{n},{},{},{},{},{},{},{},{}\n",
                    r.p_even,
                    r.p_odd,
                    r.mean_n,
                    r.delta_n,
                    opt_field(r.mandel_q),
                    opt_field(r.g2),
                    r.dx1,
                    r.dx2
                ));
            }
            out
        }
        FormatArg::Json => {
            let rows: Vec<serde_json::Value> = reports
                .iter()
                .enumerate()
                .map(|(n, r)| {
                    json!({
                        "N": n,
                        "p_even": r.p_even,
                        "p_odd": r.p_odd,
                        "mean_n": r.mean_n,
                        "delta_n": r.delta_n,
                        "q": r.mandel_q,
                        "g2": r.g2,
                        "dx1": r.dx1,
                        "dx2": r.dx2,
                        "nonclassical_parity": r.nonclassical_parity,
                    })
                })
                .collect();
            format!("{}\n", json!(rows))
        }
    };
    emit(&args.out, &content)
}

pub fn husimi(args: HusimiArgs) -> Result<()> {
    if args.window.is_nan() || args.window <= 0.0 || !args.window.is_finite() {
        return Err(CliError::Usage("husimi window must be positive".into()));
    }
    if args.resolution < 2 {
        return Err(CliError::Usage("husimi resolution must be >= 2".into()));
    }
    let config = resolve(&args.map)?;
    let state = config.map.build_state(config.n)?;
    let w = args.window;
    let grid = husimi_grid(&state, (-w, w), (-w, w), args.resolution);
    let content = match format_of(&args.out) {
        FormatArg::Csv => {
            let mut out = csv_meta_line(&args.out, "husimi");
            out.push_str("re,im,q\n");
            for (i, re) in grid.re_axis.iter().enumerate() {
                for (j, im) in grid.im_axis.iter().enumerate() {
                    out.push_str(&format!("{re},{im},{}\n", grid.value(i, j)));
                }
            }
            out
        }
        FormatArg::Json => format!(
            "{}\n",
            json!({
                "re_axis": grid.re_axis,
                "im_axis": grid.im_axis,
                "values": grid.values(),
                "quadrature": grid.quadrature(),
            })
        ),
    };
    emit(&args.out, &content)
}

fn root_order_from(text: &Option<String>) -> Result<RootOrder> {
    Ok(match text {
        None => RootOrder::Canonical,
        Some(t) => RootOrder::Permutation(parse_root_order(t)?),
    })
}

pub fn engineer(args: EngineerArgs) -> Result<()> {
    let config = resolve(&args.map)?;
    let Some(transmittance) = args.transmittance else {
        return Err(CliError::Usage("missing --transmittance".into()));
    };
    let state = config.map.build_state(config.n)?;
    let order = root_order_from(&args.root_order)?;
    let cutoff = cutoff_override(args.cutoff)?;
    let plan = EngineeringPlan::synthesize(state.amplitudes(), transmittance, &order, cutoff)?;

    let optimum = if args.optimize_t {
        Some(optimize_transmittance(
            state.amplitudes(),
            &order,
            (args.t_min, args.t_max),
            args.t_grid,
            args.t_tol,
        )?)
    } else {
        None
    };

    let mut table = String::new();
    table.push_str(&format!(
        "plan: {} N={} T={} success probability {:.6} (cutoff {})\n",
        config.map.describe(),
        config.n,
        plan.transmittance,
        plan.success_prob,
        plan.cutoff_used
    ));
    table.push_str("  k  |beta|   phi_beta  |alpha|  phi_alpha\n");
    for k in 0..plan.alphas.len() {
        let (am, ap) = polar_3dp(plan.alphas[k]);
        if k < plan.betas.len() {
            let (bm, bp) = polar_3dp(plan.betas[k]);
            table.push_str(&format!(
                "  {}  {:6.3}  {:+8.3}  {:6.3}  {:+8.3}\n",
                k + 1,
                bm,
                bp,
                am,
                ap
            ));
        } else {
            table.push_str(&format!(
                "  {}  {:6}  {:8}  {:6.3}  {:+8.3}\n",
                k + 1,
                "",
                "",
                am,
                ap
            ));
        }
    }
    if let Some(opt) = &optimum {
        table.push_str(&format!(
            "optimal transmittance: T* = {:.4}, success probability {:.6}{}\n",
            opt.t_star,
            opt.p_star,
            if opt.degenerate { " (degenerate landscape)" } else { "" }
        ));
    }

    let mut plan_json = json!({
        "coefficients": plan.coefficients.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "betas": plan.betas.iter().map(|b| { let (m, p) = polar_3dp(*b); [m, p] }).collect::<Vec<_>>(),
        "transmittance": plan.transmittance,
        "alphas": plan.alphas.iter().map(|a| { let (m, p) = polar_3dp(*a); [m, p] }).collect::<Vec<_>>(),
        "success_prob": plan.success_prob,
        "cutoff_used": plan.cutoff_used,
    });
    if let Some(opt) = &optimum {
        plan_json["optimization"] = json!({
            "t_star": opt.t_star,
            "p_star": opt.p_star,
            "degenerate": opt.degenerate,
        });
    }
    if !args.out.no_meta {
        plan_json["meta"] = json!({ "generated_at": unix_now() });
    }
    let json_text = format!("{}\n", serde_json::to_string_pretty(&plan_json).expect("serializable"));

    match (format_of(&args.out), &args.out.output) {
        // default: human-readable table on stdout, JSON alongside on request
        (FormatArg::Csv, None) => {
            print!("{table}");
            Ok(())
        }
        (FormatArg::Csv, Some(_)) => {
            print!("{table}");
            emit(&args.out, &json_text)
        }
        (FormatArg::Json, _) => emit(&args.out, &json_text),
    }
}

pub fn fidelity(args: FidelityArgs) -> Result<()> {
    let config = resolve(&args.map)?;
    let Some(transmittance) = args.transmittance else {
        return Err(CliError::Usage("missing --transmittance".into()));
    };
    let etas = match (&args.eta, &args.eta_grid) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("give either --eta or --eta-grid, not both".into()))
        }
        (Some(list), None) => parse_f64_list(list)?,
        (None, Some(grid)) => parse_grid(grid)?,
        (None, None) => vec![0.99, 0.95, 0.90],
    };
    for &eta in &etas {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(CliError::Usage(format!(
                "detector efficiency must lie in (0, 1], got {eta}"
            )));
        }
        if eta < 0.9 {
            eprintln!(
                "warning: eta = {eta} is below the first-order model's stated regime (>= 0.9)"
            );
        }
    }
    let state = config.map.build_state(config.n)?;
    let order = root_order_from(&args.root_order)?;
    let cutoff = cutoff_override(args.cutoff)?;
    let plan = EngineeringPlan::synthesize(state.amplitudes(), transmittance, &order, cutoff)?;
    let reports = fidelity_sweep(&plan, &etas, cutoff)?;

    let content = match format_of(&args.out) {
        FormatArg::Csv => {
            let mut out = csv_meta_line(&args.out, "fidelity");
            out.push_str("eta,fidelity\n");
            for r in &reports {
                out.push_str(&format!("{},{}\n", r.eta, r.fidelity));
            }
            out
        }
        FormatArg::Json => {
            let rows: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "eta": r.eta,
                        "fidelity": r.fidelity,
                        "branch_norms": r.branch_norms,
                        "branch_overlaps": r.branch_overlaps,
                    })
                })
                .collect();
            format!("{}\n", json!(rows))
        }
    };
    emit(&args.out, &content)
}

pub fn validate(args: ValidateArgs) -> Result<()> {
    if args.list {
        for (id, name) in validation::list_criteria() {
            println!("{id}: {name}");
        }
        return Ok(());
    }
    let outcomes = match args.criterion {
        Some(id) => vec![validation::run_criterion(id)?],
        None => validation::run_reference_criteria()?,
    };
    let mut failed = Vec::new();
    for outcome in &outcomes {
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {} ({}): {}", outcome.id, outcome.name, outcome.details);
        if !outcome.passed {
            failed.push(outcome.id);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", outcomes.len());
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{} of {} criteria failed: {failed:?}",
            failed.len(),
            outcomes.len()
        )))
    }
}
