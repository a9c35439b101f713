use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, so a CSV round-trips every f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

pub struct Out {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Out {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        Ok(Out {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, csv: Csv) -> Result<(), CliError> {
        self.put(name, &csv.text)
    }

    /// Writes the body together with the version and the full config echo.
    pub fn json<T: Serialize>(
        &mut self,
        name: &str,
        command: &str,
        config: &RunConfig,
        body: T,
    ) -> Result<(), CliError> {
        let env = Envelope {
            version: VERSION,
            command,
            config,
            body,
        };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        self.put(name, &text)
    }
}

fn io(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}
