use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::{run_err, CliResult};

/// `key=value` lines written next to every CSV.
pub struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        let mut m = Manifest { lines: Vec::new() };
        m.push("tool", env!("CARGO_PKG_NAME"));
        m.push("version", env!("CARGO_PKG_VERSION"));
        m.push("subcommand", subcommand);
        m.push("argv", std::env::args().skip(1).collect::<Vec<_>>().join(" "));
        m
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.txt");
        PathBuf::from(name)
    }

    pub fn write(mut self, out: &Path) -> CliResult<()> {
        self.push("output", out.display());
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        self.push("timestamp_unix", secs);
        let text: String = self.lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let path = Self::path_for(out);
        std::fs::write(&path, text).map_err(|e| run_err(format!("{}: {e}", path.display())))
    }
}
