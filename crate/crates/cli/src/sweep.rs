use std::fs::File;
use std::io::{BufWriter, Write};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use vncert_core::discrim::{Mode, Scheme};
use vncert_core::protocol::{Estimate, SimResult};

use crate::{run_simulation, scenario, to_value, CliError, SweepArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepFormat {
    Csv,
    Jsonl,
}

/// One output line: closed forms next to the empirical estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub mode: Mode,
    pub scheme: Scheme,
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
    pub p_succ_analytic: f64,
    pub p_err_analytic: f64,
    pub p1_analytic: f64,
    pub p2_analytic: f64,
    pub p_succ_hat: Option<f64>,
    pub p_succ_stderr: Option<f64>,
    pub p_succ_z: Option<f64>,
    pub p1_hat: Option<f64>,
    pub p1_stderr: Option<f64>,
    pub p1_z: Option<f64>,
    pub p2_hat: Option<f64>,
    pub p2_stderr: Option<f64>,
    pub p2_z: Option<f64>,
}

fn parts(e: Option<Estimate>) -> (Option<f64>, Option<f64>, Option<f64>) {
    match e {
        Some(e) => (Some(e.value), Some(e.stderr), e.z),
        None => (None, None, None),
    }
}

impl SweepRow {
    pub fn from_result(r: &SimResult) -> Self {
        let (p_succ_hat, p_succ_stderr, p_succ_z) = parts(r.p_succ);
        let (p1_hat, p1_stderr, p1_z) = parts(r.p1);
        let (p2_hat, p2_stderr, p2_z) = parts(r.p2);
        SweepRow {
            mode: r.config.mode,
            scheme: r.config.scheme,
            d: r.config.d,
            trials: r.config.trials,
            seed: r.config.seed,
            p_succ_analytic: r.analytic.p_succ,
            p_err_analytic: r.analytic.p_err,
            p1_analytic: r.analytic.p1,
            p2_analytic: r.analytic.p2,
            p_succ_hat,
            p_succ_stderr,
            p_succ_z,
            p1_hat,
            p1_stderr,
            p1_z,
            p2_hat,
            p2_stderr,
            p2_z,
        }
    }
}

fn write_rows(rows: &[SweepRow], format: SweepFormat, sink: impl Write) -> std::io::Result<()> {
    match format {
        SweepFormat::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()
        }
        SweepFormat::Jsonl => {
            let mut sink = BufWriter::new(sink);
            for row in rows {
                serde_json::to_writer(&mut sink, row)?;
                sink.write_all(b"\n")?;
            }
            sink.flush()
        }
    }
}

pub(crate) fn cmd_sweep(args: &SweepArgs) -> Result<(Value, Value), CliError> {
    if args.modes.is_empty() || args.schemes.is_empty() || args.dims.is_empty() {
        return Err(CliError::Usage(
            "modes, schemes and dims must be non-empty".into(),
        ));
    }
    let configs = args
        .schemes
        .iter()
        .flat_map(|&s| args.modes.iter().map(move |&m| (m, s)))
        .flat_map(|(m, s)| args.dims.iter().map(move |&d| (m, s, d)))
        .map(|(m, s, d)| scenario(m, s, d, args.trials, args.seed, None))
        .collect::<Result<Vec<_>, _>>()?;
    let file = File::create(&args.out)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", args.out.display())))?;
    let mut rows = Vec::with_capacity(configs.len());
    for config in &configs {
        rows.push(SweepRow::from_result(&run_simulation(
            config,
            args.threads,
        )?));
    }
    write_rows(&rows, args.format, file)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", args.out.display())))?;
    let result = json!({
        "out": args.out.display().to_string(),
        "format": args.format,
        "rows": rows.len(),
    });
    Ok((to_value(args), result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use vncert_core::protocol::{simulate, ScenarioConfig};

    #[test]
    fn csv_leaves_missing_estimates_empty() {
        let r = simulate(&ScenarioConfig::new(
            Mode::OneFixed,
            Scheme::Symmetric,
            2,
            100,
            1,
        ))
        .unwrap();
        let mut buf = Vec::new();
        write_rows(&[SweepRow::from_result(&r)], SweepFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("mode,scheme,d,trials,seed,p_succ_analytic"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("one-fixed,symmetric,2,100,1,0.75,0.25,0.0,0.5,"));
        assert!(row.ends_with(",,,,,,"));
    }
}
