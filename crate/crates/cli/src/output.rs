use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// Writes result files into one directory. JSON is pretty-printed with a
/// trailing newline; struct field order is fixed, so identical inputs give
/// identical bytes.
pub struct Output {
    dir: PathBuf,
    json: bool,
    csv: bool,
    quiet: bool,
}

impl Output {
    pub fn new(dir: &Path, formats: &[Format], quiet: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            json: formats.contains(&Format::Json),
            csv: formats.contains(&Format::Csv),
            quiet,
        })
    }

    pub fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.say(format!("wrote {}", path.display()));
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        if !self.json {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn csv(&self, name: &str, contents: &str) -> Result<(), CliError> {
        if !self.csv {
            return Ok(());
        }
        self.write(name, contents)
    }
}
