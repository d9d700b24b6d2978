//! Embedded baseline parameter tables, loadable by name.

use super::{HardwareError, HardwareParams};

const CC_BASELINE: &str = include_str!("../../data/cc-baseline.toml");
const TI_BASELINE: &str = include_str!("../../data/ti-baseline.toml");

/// Loads a shipped baseline parameter set: `"cc-baseline"` or `"ti-baseline"`.
pub fn baseline(name: &str) -> Result<HardwareParams, HardwareError> {
    let text = match name {
        "cc-baseline" => CC_BASELINE,
        "ti-baseline" => TI_BASELINE,
        other => return Err(HardwareError::UnknownBaseline(other.to_string())),
    };
    let params: HardwareParams =
        toml::from_str(text).map_err(|e| HardwareError::MalformedBaseline(e.to_string()))?;
    params.validate()?;
    Ok(params)
}
