//! Machine-readable run reports (schema `holo-eikonal/1`).
//!
//! Serialization is deterministic: struct field order is fixed, every
//! collection is ordered, and timings are included only on request so that
//! identical invocations emit byte-identical output.

use serde::Serialize;

use crate::structure::{Block, BlockKind, CaseTag, Classification, VariablePartition};
use crate::synthesize::{FamilyNote, SolutionForm};
use crate::verify::VerifyReport;

pub const SCHEMA: &str = "holo-eikonal/1";

#[derive(Clone, Debug, Serialize, Default)]
pub struct InputEcho {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    pub nvars: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merges: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    /// 1-based variable indices.
    pub vars: Vec<usize>,
    pub poly: String,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
}

impl BlockReport {
    pub fn from_block(b: &Block) -> Self {
        let (ell, profile) = match &b.kind {
            BlockKind::Group { ell, profile } => (
                Some(ell.to_string()),
                Some(profile.render_with_vars(&|_| "t".to_string())),
            ),
            _ => (None, None),
        };
        BlockReport {
            vars: b.vars.iter().map(|v| v + 1).collect(),
            poly: b.poly.to_string(),
            kind: b.kind.label(),
            ell,
            profile,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub kappa: String,
    pub blocks: Vec<BlockReport>,
    /// 1-based indices of singleton-block variables (the set J).
    pub singletons: Vec<usize>,
    /// 1-based indices of group-block variables (the complement).
    pub interacting: Vec<usize>,
}

impl PartitionReport {
    pub fn from_partition(p: &VariablePartition) -> Self {
        PartitionReport {
            kappa: p.kappa.to_string(),
            blocks: p.blocks.iter().map(BlockReport::from_block).collect(),
            singletons: p.singleton_vars().iter().map(|v| v + 1).collect(),
            interacting: p.interacting_vars().iter().map(|v| v + 1).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseDetail {
    pub singleton_count: usize,
    pub group_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub vars: Vec<usize>,
    pub poly: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionReport {
    /// How this solution arose: "canonical" or "affine_merge".
    pub origin: &'static str,
    pub rendered: String,
    pub latex: String,
    pub structured: SolutionForm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_note: Option<FamilyNote>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeSummary {
    pub count: usize,
    pub truncated: bool,
    pub cap: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub stages: Vec<(String, f64)>,
    pub total_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub input: InputEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_detail: Option<CaseDetail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    pub solutions: Vec<SolutionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merges: Option<MergeSummary>,
    pub verification: Vec<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn new(input: InputEcho) -> Self {
        Report {
            schema: SCHEMA,
            input,
            partition: None,
            case: None,
            case_detail: None,
            witness: None,
            solutions: Vec::new(),
            merges: None,
            verification: Vec::new(),
            timings: None,
        }
    }

    /// Fill partition, case tag, and witness from a classification result.
    pub fn set_classification(
        &mut self,
        partition: &VariablePartition,
        classification: &Classification,
    ) {
        self.partition = Some(PartitionReport::from_partition(partition));
        match classification {
            Classification::Solvable(tag) => {
                self.case = Some(tag.label().to_string());
                let (s, g) = match tag {
                    CaseTag::A => (partition.singleton_count(), 0),
                    CaseTag::B { groups } => (0, *groups),
                    CaseTag::C { singletons, groups } => (*singletons, *groups),
                };
                self.case_detail = Some(CaseDetail {
                    singleton_count: s,
                    group_count: g,
                });
            }
            Classification::NoEntireSolution { witness, detail } => {
                self.case = Some("none".to_string());
                self.witness = Some(WitnessReport {
                    vars: witness.vars.iter().map(|v| v + 1).collect(),
                    poly: witness.poly.to_string(),
                    detail: detail.clone(),
                });
            }
        }
    }
}

/// Report output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

/// Deterministic serialization of a report.
pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut out =
                serde_json::to_string_pretty(report).expect("report serialization is total");
            out.push('\n');
            out
        }
        ReportFormat::Text => emit_text(report),
    }
}

fn emit_text(report: &Report) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "schema: {}", report.schema);
    let _ = writeln!(out, "command: {}", report.input.command);
    if let Some(g) = &report.input.g {
        let _ = writeln!(out, "g: {g}");
    }
    if let Some(u) = &report.input.u {
        let _ = writeln!(out, "u: {u}");
    }
    let _ = writeln!(out, "nvars: {}", report.input.nvars);
    if let Some(case) = &report.case {
        match &report.case_detail {
            Some(d) => {
                let _ = writeln!(
                    out,
                    "case: {case} (singletons: {}, groups: {})",
                    d.singleton_count, d.group_count
                );
            }
            None => {
                let _ = writeln!(out, "case: {case}");
            }
        }
    }
    if let Some(p) = &report.partition {
        let _ = writeln!(out, "kappa: {}", p.kappa);
        for b in &p.blocks {
            let vars: Vec<String> = b.vars.iter().map(|v| format!("z{v}")).collect();
            let mut line = format!("block {{{}}} [{}]: {}", vars.join(", "), b.kind, b.poly);
            if let Some(ell) = &b.ell {
                line.push_str(&format!(", ell = {ell}"));
            }
            if let Some(profile) = &b.profile {
                line.push_str(&format!(", profile = {profile}"));
            }
            let _ = writeln!(out, "  {line}");
        }
    }
    if let Some(w) = &report.witness {
        let vars: Vec<String> = w.vars.iter().map(|v| format!("z{v}")).collect();
        let _ = writeln!(out, "witness: {{{}}} {}", vars.join(", "), w.poly);
        let _ = writeln!(out, "  {}", w.detail);
    }
    for (i, s) in report.solutions.iter().enumerate() {
        let _ = writeln!(out, "solution[{i}] ({}): {}", s.origin, s.rendered);
        if let Some(n) = &s.family_note {
            let _ = writeln!(
                out,
                "  family: {} with {}",
                n.parameters.join(", "),
                n.constraint
            );
        }
    }
    if let Some(m) = &report.merges {
        let _ = writeln!(
            out,
            "affine merges: {} (cap {}, truncated: {})",
            m.count, m.cap, m.truncated
        );
    }
    for (i, v) in report.verification.iter().enumerate() {
        let mut line = format!("verification[{i}]:");
        if let Some(sym) = &v.symbolic {
            line.push_str(&format!(
                " symbolic={}",
                if sym.pass { "pass" } else { "FAIL" }
            ));
            if let Some(w) = &sym.witness {
                line.push_str(&format!(" witness=({w})"));
            }
            if let Some(s) = &sym.scalar_leftover {
                line.push_str(&format!(" scalar=({s})"));
            }
            if let Some(r) = sym.failed_row {
                line.push_str(&format!(" failed_row={r}"));
            }
        }
        if let Some(num) = &v.numeric {
            line.push_str(&format!(
                " numeric={} max={:e} mean={:e} samples={} excluded={} seed={}",
                if num.pass { "pass" } else { "FAIL" },
                num.max_rel_residual,
                num.mean_rel_residual,
                num.samples,
                num.excluded,
                num.seed
            ));
        }
        if let Some(q) = &v.quadrature {
            line.push_str(&format!(
                " quad_doubling={:e} ({}->{})",
                q.max_doubling_diff, q.nodes_low, q.nodes_high
            ));
        }
        if let Some(fd) = &v.fd {
            line.push_str(&format!(" fd_dev={:e} h={:e}", fd.max_deviation, fd.step));
        }
        let _ = writeln!(out, "{line}");
    }
    if let Some(t) = &report.timings {
        for (name, ms) in &t.stages {
            let _ = writeln!(out, "timing {name}: {ms:.3} ms");
        }
        let _ = writeln!(out, "timing total: {:.3} ms", t.total_ms);
    }
    out
}
