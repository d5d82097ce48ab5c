//! Plain-text `key = value` configuration. Keys are the [`NetworkParams`]
//! field names; `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::NetworkParams;

/// Parse a config file body on top of the defaults.
pub fn parse_config(text: &str) -> Result<NetworkParams> {
    parse_config_onto(text, NetworkParams::default())
}

pub fn parse_config_onto(text: &str, mut params: NetworkParams) -> Result<NetworkParams> {
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(Error::Config {
                key: body.to_string(),
                line,
                reason: "expected `key = value`".into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let v: f64 = value.parse().map_err(|_| Error::Config {
            key: key.to_string(),
            line,
            reason: format!("`{value}` is not a number"),
        })?;
        if !params.set(key, v) {
            return Err(Error::Config {
                key: key.to_string(),
                line,
                reason: "unknown key".into(),
            });
        }
    }
    Ok(params)
}

pub fn load_config(path: &Path) -> Result<NetworkParams> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Render `params` as a config file that parses back to the same values.
pub fn emit_config(params: &NetworkParams) -> String {
    let mut out = String::from("# sondecp network parameters\n");
    for (key, value) in params.entries() {
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}
