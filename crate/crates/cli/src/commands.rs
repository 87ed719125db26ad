use std::path::Path;

use centerout::io::{
    load_csv, sha256_hex, write_csv, write_report, FitArchive, Metadata, Provenance, TimeSeriesTable,
};
use centerout::pipeline::{fit_sample, parse_distribution, rolling, FitConfig, RollingConfig};
use centerout::risk::{polar_eval_grid, risk_report, risk_surface};
use centerout::smooth::quantile_contour;
use centerout::tails::{evi_sweep, pareto_qq_data, y_values};
use centerout::volumes::{
    empirical_volume, uniform_orders, volume_qq_data, QuadratureSpec, VolumeReference, SPIKY_LOG_XI,
};
use centerout::{Error, Fit, Result, XiPolicy};

use crate::{
    Cli, Command, ContourArgs, EviArgs, FitArgs, FitSource, QqArgs, QqKind, RiskArgs, RollingArgs, SimArgs,
    VolumeArgs, XiArgs, XiPolicyArg,
};

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument { module: "io_cli", msg: msg.into() }
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Runs one parsed command line; `argv` is recorded in fit provenance.
pub fn run(cli: &Cli, argv: &[String]) -> Result<()> {
    let threads = if cli.sequential { Some(1) } else { cli.threads };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| usage(format!("thread pool: {e}")))?;
    std::fs::create_dir_all(&cli.out_dir)?;
    pool.install(|| dispatch(cli, argv))
}

fn dispatch(cli: &Cli, argv: &[String]) -> Result<()> {
    let out = cli.out_dir.as_path();
    match &cli.command {
        Command::Simulate(a) => simulate(out, a),
        Command::Fit(a) => fit(out, a, argv),
        Command::Risk(a) => risk(out, a),
        Command::Contours(a) => contours(out, a),
        Command::Volumes(a) => volumes(out, a),
        Command::Evi(a) => evi(out, a),
        Command::Rolling(a) => rolling_cmd(out, a),
        Command::Qq(a) => qq(out, a),
    }
}

fn resolve_xi(xi: &XiArgs) -> Option<XiPolicy> {
    match (xi.xi_log, xi.xi_policy) {
        (Some(v), _) => Some(XiPolicy::Fixed(v)),
        (None, Some(XiPolicyArg::Paper)) => Some(XiPolicy::Paper),
        (None, Some(XiPolicyArg::Moderate)) => Some(XiPolicy::Moderate),
        (None, None) => None,
    }
}

fn metadata(command: &str, fit: &Fit, archive: &FitArchive, policy: &str) -> Metadata {
    let mut md = Metadata::new(command);
    md.seed = Some(archive.grids.seed);
    md.xi_policy = Some(policy.into());
    md.xi_log = Some(fit.xi_log);
    md.m = Some(fit.m);
    md
}

/// Loads the archived fit, optionally re-smoothed under another policy.
fn load_fit(out: &Path, src: &FitSource, xi: Option<XiPolicy>) -> Result<(Fit, FitArchive, String)> {
    let path = src.fit.clone().unwrap_or_else(|| out.join("fit.json"));
    let archive = FitArchive::load(&path)?;
    let fit = archive.to_fit()?;
    Ok(match xi {
        Some(p) => (fit.with_xi_log(p.xi_log(fit.n())), archive, p.name()),
        None => {
            let name = archive.xi_policy.clone();
            (fit, archive, name)
        }
    })
}

fn load_table(path: &Path, date_column: Option<&str>, log_returns: bool) -> Result<(TimeSeriesTable, String)> {
    let digest = sha256_hex(&std::fs::read(path)?);
    let table = load_csv(path, date_column)?;
    let table = if log_returns { table.log_returns()? } else { table };
    Ok((table, digest))
}

fn simulate(out: &Path, a: &SimArgs) -> Result<()> {
    let spec = parse_distribution(&a.dist, a.d)?;
    let sample = spec.sample(a.n, a.seed)?;
    let header: Vec<String> = (1..=a.d).map(|j| format!("x{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(out.join("sample.csv"), &header, sample.rows.rows().map(|r| r.iter().map(|&v| num(v))))
}

fn fit(out: &Path, a: &FitArgs, argv: &[String]) -> Result<()> {
    let (sample, digest) = match &a.input {
        Some(path) => {
            let (table, digest) = load_table(path, a.date_column.as_deref(), a.log_returns)?;
            (table.to_sample()?, Some(digest))
        }
        None => (parse_distribution(&a.sim.dist, a.sim.d)?.sample(a.sim.n, a.sim.seed)?, None),
    };
    if sample.d() < 2 {
        return Err(usage("fits need at least two dimensions"));
    }
    let policy = resolve_xi(&a.xi).unwrap_or(XiPolicy::Paper);
    let config = FitConfig { grid: None, m: a.m, seed: a.sim.seed, xi: policy };
    let fit = fit_sample(&sample, &config)?;
    let archive = FitArchive::from_fit(
        &fit,
        &policy.name(),
        config.grid_record(sample.n(), sample.d())?,
        Provenance::new(argv.to_vec(), digest),
    );
    archive.save(out.join("fit.json"))
}

fn risk(out: &Path, a: &RiskArgs) -> Result<()> {
    let (fit, archive, policy) = load_fit(out, &a.source, resolve_xi(&a.xi))?;
    let report = risk_report(&fit, a.p)?;
    let md = metadata("risk", &fit, &archive, &policy);
    write_report(out.join("risk.json"), &report, &md)?;
    if fit.d() == 2 {
        let surface = risk_surface(&fit, &polar_eval_grid(20, 72))?;
        write_csv(
            out.join("risk_surface.csv"),
            &["u1", "u2", "height"],
            surface.iter().map(|(u, h)| vec![num(u[0]), num(u[1]), num(*h)]),
        )?;
    }
    Ok(())
}

fn contours(out: &Path, a: &ContourArgs) -> Result<()> {
    let (fit, _, _) = load_fit(out, &a.source, resolve_xi(&a.xi))?;
    let mut header = vec!["p".to_string(), "index".to_string()];
    header.extend((1..=fit.d()).map(|j| format!("x{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for &p in &a.p {
        for (i, x) in quantile_contour(&fit, p, a.points)?.into_iter().enumerate() {
            let mut row = vec![num(p), i.to_string()];
            row.extend(x.into_iter().map(num));
            rows.push(row);
        }
    }
    write_csv(out.join("contours.csv"), &header, rows)
}

fn volume_fit(out: &Path, src: &FitSource, xi: &XiArgs) -> Result<(Fit, FitArchive, String)> {
    let policy = resolve_xi(xi).unwrap_or(XiPolicy::Moderate);
    let (fit, archive, name) = load_fit(out, src, Some(policy))?;
    if fit.xi_log > SPIKY_LOG_XI {
        return Err(Error::InvalidArgument {
            module: "volumes",
            msg: format!(
                "ln xi = {} exceeds {SPIKY_LOG_XI}: the Jacobian is a sum of spikes; use --xi-policy moderate",
                fit.xi_log
            ),
        });
    }
    Ok((fit, archive, name))
}

fn volumes(out: &Path, a: &VolumeArgs) -> Result<()> {
    let (fit, archive, policy) = volume_fit(out, &a.source, &a.xi)?;
    let spec = QuadratureSpec::default();
    let mut rows = Vec::new();
    let mut diags = Vec::new();
    for &p in &a.p {
        let (v, diag) = empirical_volume(&fit, p, &spec)?;
        rows.push(vec![num(p), num(v), diag.std_error.map(num).unwrap_or_default()]);
        diags.push(serde_json::json!({ "p": p, "volume": v, "diagnostics": diag }));
    }
    write_csv(out.join("volumes.csv"), &["p", "volume", "std_error"], rows)?;
    write_report(out.join("volumes.json"), &diags, &metadata("volumes", &fit, &archive, &policy))
}

fn evi(out: &Path, a: &EviArgs) -> Result<()> {
    let (fit, archive, policy) = load_fit(out, &a.source, None)?;
    let y = y_values(&fit, a.smoothed);
    let est = evi_sweep(&y, a.k_max, a.tau, a.rho2)?;
    let rows = (0..est.ks.len())
        .map(|i| vec![est.ks[i].to_string(), num(est.hill[i]), num(est.ls[i]), num(est.ridge[i])]);
    write_csv(out.join("evi.csv"), &["k", "hill", "ls", "ridge"], rows)?;
    let md = metadata("evi", &fit, &archive, &policy).with("dropped", est.dropped).with("smoothed", a.smoothed);
    write_report(out.join("evi.json"), &est, &md)
}

fn qq(out: &Path, a: &QqArgs) -> Result<()> {
    match a.kind {
        QqKind::Pareto => {
            let (fit, archive, policy) = load_fit(out, &a.source, None)?;
            let data = pareto_qq_data(&y_values(&fit, a.smoothed))?;
            write_csv(
                out.join("qq_pareto.csv"),
                &["theoretical", "empirical"],
                data.points.iter().map(|&(x, y)| vec![num(x), num(y)]),
            )?;
            let md = metadata("qq", &fit, &archive, &policy).with("dropped", data.dropped);
            write_report(out.join("qq_pareto.json"), &data, &md)
        }
        QqKind::Volume => {
            let xi = XiArgs { xi_policy: None, xi_log: None };
            let (fit, archive, policy) = volume_fit(out, &a.source, &xi)?;
            let data =
                volume_qq_data(&fit, &VolumeReference::LogPareto, &uniform_orders(9), &QuadratureSpec::default())?;
            write_csv(
                out.join("qq_volume.csv"),
                &["p", "theoretical", "empirical"],
                (0..data.orders.len())
                    .map(|i| vec![num(data.orders[i]), num(data.reference[i]), num(data.empirical[i])]),
            )?;
            write_report(out.join("qq_volume.json"), &data, &metadata("qq", &fit, &archive, &policy))
        }
    }
}

fn rolling_cmd(out: &Path, a: &RollingArgs) -> Result<()> {
    let (table, digest) = load_table(&a.input, Some(&a.date_column), a.log_returns)?;
    let policy = resolve_xi(&a.xi).unwrap_or(XiPolicy::Paper);
    let config = RollingConfig {
        window_months: a.window_months,
        step_months: a.step_months,
        fit: FitConfig { grid: None, m: a.m, seed: a.seed, xi: policy },
        p: a.p,
        k: a.k_max,
        tau: a.tau,
        second_order_rho: a.rho2,
    };
    let rows = rolling(&table, &config)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    write_csv(
        out.join("rolling.csv"),
        &["label", "n", "rho", "rho_tail", "rho_trimmed", "n_tail", "tail_share", "k", "hill", "ridge", "dropped"],
        rows.iter().map(|r| {
            vec![
                r.label.clone(),
                r.n.to_string(),
                num(r.rho),
                num(r.rho_tail),
                num(r.rho_trimmed),
                r.n_tail.to_string(),
                num(r.tail_share),
                r.k.to_string(),
                opt(r.hill),
                opt(r.ridge),
                r.dropped.to_string(),
            ]
        }),
    )?;
    let mut md = Metadata::new("rolling");
    md.seed = Some(a.seed);
    md.xi_policy = Some(policy.name());
    md.m = Some(a.m);
    let md = md
        .with("input_digest", digest)
        .with("window_months", a.window_months)
        .with("step_months", a.step_months)
        .with("p", a.p);
    write_report(out.join("rolling.json"), &rows, &md)
}

