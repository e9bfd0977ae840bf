//! `run`: integrate a configured flow and write its artifacts.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pwf_core::flow::{run_with, TerminalStatus};

use crate::config::RunConfig;
use crate::export::{export_surface, Format};
use crate::init::init_immersion;
use crate::manifest::{now, RunManifest};
use crate::{records, snapshot, CliError, Result};

pub const RECORDS_FILE: &str = "records.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

/// Runs the flow described by `config` into `out_dir`. Records are streamed
/// as they are produced; snapshots, the final surface and the manifest follow.
pub fn run_to_dir(config: &RunConfig, out_dir: &Path) -> Result<RunManifest> {
    let start_time = now();
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let initial = init_immersion(&config.initial, config.n)?;
    let flow = config.flow_config();

    let records_path = out_dir.join(RECORDS_FILE);
    let file = std::fs::File::create(&records_path).map_err(|e| CliError::io(&records_path, e))?;
    let mut out = BufWriter::new(file);
    let mut io_err = None;
    let mut wrote_header = false;
    let traj = run_with(&flow, &initial, |rec| {
        if io_err.is_some() {
            return;
        }
        let mut res = Ok(());
        if !wrote_header {
            res = writeln!(out, "{}", records::header(rec.e_sup.len()));
            wrote_header = true;
        }
        if res.is_ok() {
            res = writeln!(out, "{}", records::row(rec));
        }
        if let Err(e) = res {
            io_err = Some(e);
        }
    })?;
    if let Some(e) = io_err {
        return Err(CliError::io(&records_path, e));
    }
    out.flush().map_err(|e| CliError::io(&records_path, e))?;

    let mut artifacts = vec![PathBuf::from(RECORDS_FILE)];
    let snap_dir = out_dir.join("snapshots");
    std::fs::create_dir_all(&snap_dir).map_err(|e| CliError::io(&snap_dir, e))?;
    for s in &traj.snapshots {
        let rel = PathBuf::from("snapshots").join(format!("step_{:06}.pwfl", s.step_count));
        snapshot::write(s, &out_dir.join(&rel))?;
        artifacts.push(rel);
    }
    let (name, format) = if traj.final_state.m() == 3 {
        ("surface.obj", Format::Obj)
    } else {
        ("surface.csv", Format::CsvGrid)
    };
    export_surface(&traj.final_state, &out_dir.join(name), format)?;
    artifacts.push(PathBuf::from(name));
    artifacts.push(PathBuf::from(MANIFEST_FILE));

    let manifest = RunManifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        start_time,
        end_time: now(),
        status: traj.status.as_str().to_string(),
        message: traj.message.clone(),
        steps: traj.final_state.step_count,
        final_t: traj.final_state.t,
        reprojection_failures: traj.reprojection_failures,
        artifacts,
        config: config.clone(),
    };
    manifest.write(&out_dir.join(MANIFEST_FILE))?;
    if traj.status != TerminalStatus::Completed {
        return Err(CliError::Guard(format!(
            "run stopped with {} at t = {}{}",
            manifest.status,
            manifest.final_t,
            traj.message.map(|m| format!(": {m}")).unwrap_or_default()
        )));
    }
    Ok(manifest)
}
