//! Loading a workspace from disk and resolving API selectors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use apify_core::discovery::{discover_candidates, dynamic_query_candidate, ApiCandidate, DiscoveryInputs, FixedSignature, SeedKind};
use apify_core::frontend::{parse_screen_map, parse_source_with_maps, ScreenMap};
use apify_core::graphs::{build_call_graph, CallGraph, CodeRegion};
use apify_core::Workspace;

use crate::config::WorkspaceConfig;
use crate::CliError;

const SOURCE_EXTENSIONS: &[&str] = &["cbl", "cob", "cobol"];

/// A parsed workspace with everything discovery needs.
#[derive(Debug)]
pub struct Project {
    pub config: WorkspaceConfig,
    pub workspace: Workspace,
    pub call_graph: CallGraph,
    pub inputs: DiscoveryInputs,
    /// Copybook texts keyed by upper-cased file stem.
    pub copybooks: BTreeMap<String, String>,
}

/// An API to analyze: a discovered candidate or an ad-hoc region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub name: String,
    pub seed_kind: SeedKind,
    pub region: CodeRegion,
    pub fixed_signature: Option<FixedSignature>,
}

impl From<ApiCandidate> for Target {
    fn from(c: ApiCandidate) -> Target {
        Target { name: c.suggested_name, seed_kind: c.seed_kind, region: c.region, fixed_signature: c.fixed_signature }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_file()).collect();
    files.sort();
    Ok(files)
}

fn has_extension(path: &Path, exts: &[&str]) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| exts.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_ascii_uppercase()
}

/// Reads "KEY VALUE" lines; blank lines and '#' comments are skipped.
fn read_pairs(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = read(path)?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let [key, value] = words[..] else {
            return Err(CliError::Config(format!("{}:{}: expected two words", path.display(), i + 1)));
        };
        out.insert(key.to_ascii_uppercase(), value.to_ascii_uppercase());
    }
    Ok(out)
}

impl Project {
    pub fn load(config_path: &Path) -> Result<Project, CliError> {
        Project::from_config(WorkspaceConfig::load(config_path)?)
    }

    pub fn from_config(config: WorkspaceConfig) -> Result<Project, CliError> {
        let mut copybooks = BTreeMap::new();
        for dir in &config.copybook_dirs {
            for f in sorted_files(dir)? {
                copybooks.entry(stem(&f)).or_insert(read(&f)?);
            }
        }
        let mut maps = Vec::new();
        for path in &config.screen_maps {
            let fields = parse_screen_map(&read(path)?).map_err(|source| CliError::Parse { file: path.display().to_string(), source })?;
            maps.push(ScreenMap { name: stem(path), fields });
        }
        let mut sources = Vec::new();
        for dir in &config.source_dirs {
            for f in sorted_files(dir)? {
                if has_extension(&f, SOURCE_EXTENSIONS) {
                    let text = read(&f)?;
                    sources.push((f, text));
                }
            }
        }
        let parsed: Vec<_> = thread::scope(|s| {
            let handles: Vec<_> = sources.iter().map(|(_, text)| s.spawn(|| parse_source_with_maps(text, &copybooks, &maps))).collect();
            handles.into_iter().map(|h| h.join().expect("parser thread panicked")).collect()
        });
        let mut workspace = Workspace::new();
        for ((path, _), unit) in sources.iter().zip(parsed) {
            let file = path.display().to_string();
            let unit = unit.map_err(|source| CliError::Parse { file: file.clone(), source })?;
            workspace.insert(unit).map_err(|source| CliError::Parse { file, source })?;
        }
        let call_graph = build_call_graph(&workspace);
        let transactions = match &config.transaction_table {
            Some(p) => read_pairs(p)?,
            None => BTreeMap::new(),
        };
        let partitions = match &config.partition_file {
            Some(p) => read_pairs(p)?,
            None => BTreeMap::new(),
        };
        let inputs = DiscoveryInputs { screen_maps: maps, transactions, partitions, user_regions: Vec::new() };
        Ok(Project { config, workspace, call_graph, inputs, copybooks })
    }

    /// Discovered candidates plus dynamic-query candidates for `dynamic`.
    pub fn candidates(&self, dynamic: &[String]) -> Result<Vec<ApiCandidate>, CliError> {
        let mut out = discover_candidates(&self.workspace, &self.call_graph, &self.inputs).map_err(CliError::Analysis)?;
        for p in dynamic {
            out.push(dynamic_query_candidate(&self.workspace, &p.to_ascii_uppercase()).map_err(CliError::Analysis)?);
        }
        out.sort_by(|a, b| (&a.region.program, a.region.start_line).cmp(&(&b.region.program, b.region.start_line)));
        Ok(out)
    }

    /// Resolves `PROG:p-q` to a region, anything else to a candidate name.
    pub fn resolve(&self, selector: &str) -> Result<Target, CliError> {
        if let Some((program, range)) = selector.split_once(':') {
            let program = program.to_ascii_uppercase();
            let bad = || CliError::Selector(format!("{selector}: expected PROGRAM:START-END"));
            let (p, q) = range.split_once('-').ok_or_else(bad)?;
            let (p, q): (u32, u32) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
            let unit = self.workspace.get(&program).ok_or_else(|| CliError::Selector(format!("{selector}: unknown program {program}")))?;
            let region = CodeRegion::new(unit, p, q).map_err(|e| CliError::Selector(format!("{selector}: {e}")))?;
            return Ok(Target { name: format!("{}-{p}-{q}", program.to_ascii_lowercase()), seed_kind: SeedKind::UserRegion, region, fixed_signature: None });
        }
        let wanted = selector.to_ascii_lowercase();
        if let Some(program) = wanted.strip_suffix("-dynamic-query") {
            let program = program.to_ascii_uppercase();
            if self.workspace.get(&program).is_some() {
                return dynamic_query_candidate(&self.workspace, &program).map(Target::from).map_err(|e| CliError::Selector(format!("{selector}: {e}")));
            }
        }
        self.candidates(&[])?
            .into_iter()
            .find(|c| c.suggested_name == wanted)
            .map(Target::from)
            .ok_or_else(|| CliError::Selector(format!("{selector}: no such candidate")))
    }
}
