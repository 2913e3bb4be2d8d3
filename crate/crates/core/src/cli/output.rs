use std::path::Path;

use serde::Serialize;
use serde_json::json;

use super::Common;
use crate::scenarios::{Fit, ScenarioConfig, ScenarioResult};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "family", "param", "N", "ratio", "predicted", "rmse_sq", "rmse_cl", "flags",
];

/// Echoed into the output directory so a run can be repeated.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub output_dir: Option<String>,
    pub master_seed: u64,
    pub version_stamp: String,
    pub config: ScenarioConfig,
    pub fit: Option<Fit>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV row in [`CSV_HEADER`] order; flags are joined with `;`.
pub fn csv_row(r: &ScenarioResult) -> [String; 8] {
    [
        r.family.as_str().to_string(),
        r.param.to_string(),
        cell(r.gain.map(|g| g.n_probes)),
        cell(r.gain.map(|g| g.ratio)),
        cell(r.gain.map(|g| g.predicted)),
        cell(r.sq_run.as_ref().map(|x| x.empirical_rmse)),
        cell(r.cl_run.as_ref().map(|x| x.empirical_rmse)),
        r.flags.join(";"),
    ]
}

pub fn write_csv(results: &[ScenarioResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record(csv_row(r))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Write all files or none: existing targets are refused unless `force`.
pub(crate) fn write_files(dir: &Path, force: bool, files: &[(&str, String)]) -> Result<()> {
    if !force {
        if let Some((name, _)) = files.iter().find(|(name, _)| dir.join(name).exists()) {
            return Err(Error::InvalidParameter(format!(
                "{} exists; pass --force to overwrite",
                dir.join(name).display()
            )));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::from(e).in_file(&path))?;
    }
    Ok(())
}

pub(crate) fn emit(
    common: &Common,
    command: &str,
    cfg: &ScenarioConfig,
    results: &[ScenarioResult],
    fit: Option<Fit>,
) -> Result<()> {
    let mut lines = String::new();
    for r in results {
        lines.push_str(&serde_json::to_string(r)?);
        lines.push('\n');
    }
    let Some(dir) = &common.out else {
        print!("{lines}");
        if let Some(fit) = fit {
            println!("{}", json!({ "fit": fit }));
        }
        return Ok(());
    };
    let manifest = RunManifest {
        command: command.to_string(),
        config_path: common.config.as_ref().map(|p| p.display().to_string()),
        output_dir: Some(dir.display().to_string()),
        master_seed: cfg.options.seed,
        version_stamp: format!("squeezelab {}", env!("CARGO_PKG_VERSION")),
        config: cfg.clone(),
        fit,
    };
    write_files(
        dir,
        common.force,
        &[
            ("result.jsonl", lines),
            ("results.csv", write_csv(results)?),
            ("manifest.json", serde_json::to_string_pretty(&manifest)? + "\n"),
        ],
    )?;
    println!(
        "{}",
        json!({ "out": dir.display().to_string(), "rows": results.len(), "fit": fit })
    );
    Ok(())
}
