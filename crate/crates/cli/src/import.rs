use std::process::Command;

use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::{Context, ImportArgs};

/// Converter executable; overridable for installs outside `PATH`.
const TOOL_ENV: &str = "PPG2ECG_DALIA_IMPORT";
const TOOL: &str = "dalia-import";

pub fn run(ctx: &Context, args: &ImportArgs, rec: &mut Recorder) -> CliResult<()> {
    let tool = std::env::var(TOOL_ENV).unwrap_or_else(|_| TOOL.to_string());
    for archive in &args.inputs {
        rec.input(archive);
        let status = Command::new(&tool)
            .arg("convert")
            .arg("--in")
            .arg(archive)
            .arg("--out")
            .arg(&ctx.out)
            .status()
            .map_err(|e| {
                CliError::input(format!(
                    "cannot run the converter {tool:?} ({e}); install dalia-import or set {TOOL_ENV}"
                ))
            })?;
        if !status.success() {
            return Err(CliError::Child(
                status.code().unwrap_or(2),
                format!("{tool} failed on {}", archive.display()),
            ));
        }
    }
    Ok(())
}
