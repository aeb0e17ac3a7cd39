use adnovel_core::propagate::{time_average, PropagateOptions};
use adnovel_core::{propagate_with, Trajectory};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{Format, Resolved, RunConfig};
use crate::error::{CliError, Result};
use crate::presets;
use crate::table::{Certificate, Column, ResultTable};

/// SHA-256 of the canonical JSON form of `config`.
pub fn config_hash(config: &RunConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

fn propagate_resolved(r: &Resolved) -> Result<Trajectory> {
    let rho0 = r.initial_state();
    Ok(propagate_with(&r.spec, &r.schedule, &rho0, &PropagateOptions::new(r.n_steps, r.tol))?)
}

/// Summary values reported per run and per scan point.
pub const SUMMARY: [&str; 4] = ["P_final", "P_settled", "P_avg", "e_x_final"];

fn summary(tr: &Trajectory) -> [f64; 4] {
    let total = tr.total_nuclear();
    [
        *total.last().expect("non-empty"),
        tr.settled_total(),
        time_average(&tr.times, &total),
        tr.final_observables().electron_x,
    ]
}

/// Runs a preset or an explicit configuration. A scan block delegates to [`scan`].
pub fn run(config: &RunConfig) -> Result<ResultTable> {
    config.validate()?;
    if config.scan.is_some() {
        return scan(config);
    }
    let mut table = match &config.preset {
        Some(name) => presets::run(
            name,
            &presets::Options {
                n_steps: config.output.n_steps,
                tol: config.tol(),
            },
        )?,
        None => run_explicit(config)?,
    };
    if let Some(name) = &config.preset {
        table.info("preset", name);
    }
    table.metadata.config_hash = config_hash(config);
    Ok(table)
}

fn run_explicit(config: &RunConfig) -> Result<ResultTable> {
    let r = config.resolve()?;
    let tr = propagate_resolved(&r)?;
    let k = r.spec.k();
    let mut cols = vec![Column::new("t", "us"), Column::new("e_x", "")];
    cols.extend((1..=k).map(|i| Column::new(format!("P_n{i}"), "")));
    cols.push(Column::new("P_total", ""));
    let mut table = ResultTable::new(cols, r.tol, r.n_steps);
    for (i, (t, o)) in tr.times.iter().zip(&tr.observables).enumerate() {
        if i % r.stride != 0 && i + 1 != tr.times.len() {
            continue;
        }
        let mut row = vec![t * 1e6, o.electron_x];
        row.extend(&o.nuclear_z);
        row.push(o.total_nuclear());
        table.push(&row);
    }
    for (name, v) in SUMMARY.iter().zip(summary(&tr)) {
        table.info(name, v);
    }
    if let Some((pe, pn)) = r.thermal {
        table.info("thermal_electron", pe);
        table.info("thermal_nuclear", pn);
    }
    table.info("stride", r.stride);
    table.metadata.certificate = Some(Certificate::from(&tr.certificate));
    Ok(table)
}

/// Evaluates every grid point independently; failures are recorded in their row.
pub fn scan(config: &RunConfig) -> Result<ResultTable> {
    config.validate()?;
    let block = config
        .scan
        .as_ref()
        .ok_or_else(|| CliError::validation("scan", "scan needs a scan block"))?;
    let points: Vec<Result<Trajectory>> = block
        .values
        .par_iter()
        .map(|&v| {
            let c = config.with_parameter(block.parameter, v)?;
            propagate_resolved(&c.resolve()?)
        })
        .collect();
    let mut cols = vec![Column::new(block.parameter.name(), "")];
    cols.extend(SUMMARY.iter().map(|s| Column::new(*s, "")));
    let mut table = ResultTable::new(cols, config.tol(), config.n_steps());
    let mut certs = Vec::new();
    for (v, p) in block.values.iter().zip(points) {
        match p {
            Ok(tr) => {
                let mut row = vec![*v];
                row.extend(summary(&tr));
                table.push(&row);
                certs.push(Certificate::from(&tr.certificate));
            }
            Err(e) => table.push_error(&[*v], e.to_string()),
        }
    }
    table.metadata.certificate = Certificate::merge(certs);
    table.metadata.config_hash = config_hash(config);
    Ok(table)
}

pub fn render(table: &ResultTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}
