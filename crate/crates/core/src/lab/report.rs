use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::VERSION;

use super::config::ExperimentConfig;

#[derive(Debug, Serialize)]
pub struct Meta<'a> {
    pub version: &'a str,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
}

impl<'a> Meta<'a> {
    pub fn of(config: &'a ExperimentConfig) -> Self {
        Meta { version: VERSION, seed: config.seed, config }
    }
}

/// `path` with `suffix` appended to the full file name.
pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name: OsString = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn meta_path(out: &Path) -> PathBuf {
    with_suffix(out, ".meta.json")
}

/// Writes the config, seed and version next to `out`.
pub fn write_meta(out: &Path, config: &ExperimentConfig) -> Result<PathBuf> {
    let path = meta_path(out);
    write_json(&path, &Meta::of(config))?;
    Ok(path)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Buffered writer on `path`, or on stdout when `path` is `None`.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}
