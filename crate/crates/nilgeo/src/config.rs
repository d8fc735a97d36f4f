//! Optional TOML file overriding the numerical tolerances.

use std::path::Path;

use nilgeo_core::Tolerances;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    fd_step: Option<f64>,
    conservation_tol: Option<f64>,
    bracket_tol: Option<f64>,
    svd_threshold: Option<f64>,
    rk4_steps_per_unit: Option<f64>,
}

pub fn parse_config(text: &str) -> Result<Tolerances, CliError> {
    let cfg: ConfigFile =
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
    let mut t = Tolerances::default();
    let set = |slot: &mut f64, v: Option<f64>, name: &str| -> Result<(), CliError> {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!(
                    "config: {name} must be positive, got {v}"
                )));
            }
            *slot = v;
        }
        Ok(())
    };
    set(&mut t.fd_step, cfg.fd_step, "fd_step")?;
    set(
        &mut t.conservation_tol,
        cfg.conservation_tol,
        "conservation_tol",
    )?;
    set(&mut t.bracket_tol, cfg.bracket_tol, "bracket_tol")?;
    set(&mut t.svd_threshold, cfg.svd_threshold, "svd_threshold")?;
    set(
        &mut t.rk4_steps_per_unit,
        cfg.rk4_steps_per_unit,
        "rk4_steps_per_unit",
    )?;
    Ok(t)
}

pub fn load_config(path: &Path) -> Result<Tolerances, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
