//! Workspace configuration file (JSON).

use std::fs;
use std::path::{Path, PathBuf};

use apify_core::signature::Flow;
use serde::Deserialize;

use crate::CliError;

/// Analysis settings used when a command does not override them.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    #[serde(with = "flow_name")]
    pub flow: Flow,
    pub call_chain: bool,
    pub ps_bound: usize,
    pub include_sqlcode: bool,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults { flow: Flow::Sensitive, call_chain: false, ps_bound: 3, include_sqlcode: false }
    }
}

mod flow_name {
    use apify_core::signature::Flow;
    use serde::{de, Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Flow, D::Error> {
        let s = String::deserialize(d)?;
        Flow::parse(&s).ok_or_else(|| de::Error::custom(format!("unknown flow {s:?}, expected fi, fs or ps")))
    }
}

/// Where the sources, copybooks and side files of a workspace live.
/// Relative paths are resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceConfig {
    pub source_dirs: Vec<PathBuf>,
    #[serde(default)]
    pub copybook_dirs: Vec<PathBuf>,
    #[serde(default)]
    pub screen_maps: Vec<PathBuf>,
    #[serde(default)]
    pub transaction_table: Option<PathBuf>,
    #[serde(default)]
    pub partition_file: Option<PathBuf>,
    #[serde(default)]
    pub defaults: Defaults,
}

impl WorkspaceConfig {
    /// Reads, resolves and validates a config file.
    pub fn load(path: &Path) -> Result<WorkspaceConfig, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut config: WorkspaceConfig = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve(base);
        config.validate()?;
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.source_dirs.iter_mut().for_each(fix);
        self.copybook_dirs.iter_mut().for_each(fix);
        self.screen_maps.iter_mut().for_each(fix);
        self.transaction_table.iter_mut().for_each(fix);
        self.partition_file.iter_mut().for_each(fix);
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.source_dirs.is_empty() {
            return Err(CliError::Config("source_dirs must name at least one directory".into()));
        }
        let paths = self
            .source_dirs
            .iter()
            .chain(&self.copybook_dirs)
            .chain(&self.screen_maps)
            .chain(&self.transaction_table)
            .chain(&self.partition_file);
        for p in paths {
            if !p.exists() {
                return Err(CliError::Config(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }
}
