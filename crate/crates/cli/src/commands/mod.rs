pub mod analyze;
pub mod compare;
pub mod radiation;
pub mod reduce;
pub mod simulate;

use crate::CmdError;
use std::path::Path;

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CmdError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CmdError::Runtime(format!("serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
