//! Signature computation for a resolved target.

use std::collections::BTreeSet;

use apify_core::frontend::{ItemId, Section, SourceUnit};
use apify_core::graphs::CodeRegion;
use apify_core::signature::{interprocedural_signature, AnalysisOptions, ApiSignature, Flow, PathBounds, Scope};

use crate::config::Defaults;
use crate::project::{Project, Target};
use crate::CliError;

/// Variant and filters for one signature computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureOptions {
    pub flow: Flow,
    pub call_chain: bool,
    pub ps_bound: usize,
    pub include_sqlcode: bool,
    /// Restrict flow-sensitive responses to fields visible after the region.
    pub post_context: bool,
    pub strict: bool,
}

impl From<&Defaults> for SignatureOptions {
    fn from(d: &Defaults) -> Self {
        SignatureOptions { flow: d.flow, call_chain: d.call_chain, ps_bound: d.ps_bound, include_sqlcode: d.include_sqlcode, post_context: false, strict: false }
    }
}

/// Fields a caller can observe once the region finishes: the linkage
/// section, plus whatever the rest of the program reads.
pub fn post_context(unit: &SourceUnit, region: &CodeRegion) -> BTreeSet<ItemId> {
    let scope = Scope::of_region(unit, region);
    let mut out: BTreeSet<ItemId> = unit.data.iter().filter(|(_, d)| d.section == Section::Linkage).map(|(i, _)| i).collect();
    for s in &unit.statements {
        if !scope.contains(s.id) {
            out.extend(s.reads.iter().copied());
        }
    }
    out
}

/// Signature of a target that has no fixed signature.
pub fn compute_signature(project: &Project, target: &Target, opts: &SignatureOptions) -> Result<ApiSignature, CliError> {
    let unit = project.workspace.unit(&target.region.program).map_err(CliError::Analysis)?;
    let options = AnalysisOptions {
        flow: opts.flow,
        call_chain: opts.call_chain,
        bounds: PathBounds { unroll: opts.ps_bound, ..PathBounds::default() },
        strict: opts.strict,
        post_context: opts.post_context.then(|| post_context(unit, &target.region)),
    };
    let sig = interprocedural_signature(&project.workspace, &project.call_graph, &target.region, &options).map_err(CliError::from_analysis)?;
    Ok(if opts.include_sqlcode { sig } else { sig.without_sqlca(&unit.data) })
}
