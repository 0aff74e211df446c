//! Emitted records. Every numeric field sits next to a label naming the
//! quantity and a definition string, and each type parses back from its own
//! JSON and CSV forms.

use serde::{Deserialize, Serialize};

use qtp_core::certify::{Adversary, CertificateId, Comparison, Criterion, ThresholdSource, Verdict};
use qtp_core::{InputFamily, ProtocolId};

use crate::config::Mode;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub announcement: String,
    /// Exact probability, or the observed frequency in Monte Carlo mode.
    pub probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub protocol: ProtocolId,
    pub m: usize,
    pub family: InputFamily,
    pub theta: f64,
    pub phi: f64,
    pub mode: Mode,
    pub label: String,
    pub definition: String,
    pub f_th: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    pub branches: Vec<BranchRecord>,
}

/// One branch of a [`RunRecord`] with the run fields repeated, for CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub protocol: ProtocolId,
    pub m: usize,
    pub family: InputFamily,
    pub theta: f64,
    pub phi: f64,
    pub mode: Mode,
    pub label: String,
    pub definition: String,
    pub f_th: f64,
    pub stderr: Option<f64>,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub announcement: String,
    pub probability: f64,
    pub fidelity: Option<f64>,
}

impl RunRecord {
    pub fn rows(&self) -> Vec<RunRow> {
        self.branches
            .iter()
            .map(|b| RunRow {
                protocol: self.protocol,
                m: self.m,
                family: self.family,
                theta: self.theta,
                phi: self.phi,
                mode: self.mode,
                label: self.label.clone(),
                definition: self.definition.clone(),
                f_th: self.f_th,
                stderr: self.stderr,
                shots: self.shots,
                seed: self.seed,
                rng: self.rng.clone(),
                announcement: b.announcement.clone(),
                probability: b.probability,
                fidelity: b.fidelity,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub protocol: ProtocolId,
    pub m: usize,
    pub family: InputFamily,
    pub phi: f64,
    pub theta: f64,
    pub mode: Mode,
    pub label: String,
    pub definition: String,
    pub f_th: f64,
    pub stderr: Option<f64>,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub protocol: ProtocolId,
    pub m: usize,
    pub label: String,
    /// Announcement or `a=bit` for per-announcement values; empty otherwise.
    pub key: String,
    pub value: f64,
    pub definition: String,
    pub normalization: Option<String>,
    pub quadrature: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyRecord {
    pub certificate: CertificateId,
    pub claim: String,
    pub adversary: Adversary,
    pub criterion: Criterion,
    pub m: usize,
    pub family: InputFamily,
    /// Protocol whose simulated value was certified, for `--self`.
    pub observed_protocol: Option<ProtocolId>,
    pub observed_label: String,
    pub observed_definition: String,
    pub observed: f64,
    pub threshold: f64,
    pub threshold_source: ThresholdSource,
    pub provenance: String,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub m: usize,
    pub family: InputFamily,
    pub adversary: Adversary,
    pub certificate: CertificateId,
    pub criterion: Criterion,
    pub label: String,
    pub threshold: f64,
    pub threshold_source: ThresholdSource,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchDump {
    pub protocol: ProtocolId,
    pub m: usize,
    pub family: InputFamily,
    pub theta: f64,
    pub phi: f64,
    pub announcement: String,
    pub probability: f64,
    pub fidelity: Option<f64>,
    /// Unit-trace output over the ancillas then B's qubit, as `[re, im]`
    /// entries in row-major order; absent for a zero-probability branch.
    pub output: Option<Vec<Vec<[f64; 2]>>>,
}

/// One matrix entry of a [`BranchDump`], for CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryRow {
    pub protocol: ProtocolId,
    pub m: usize,
    pub family: InputFamily,
    pub theta: f64,
    pub phi: f64,
    pub announcement: String,
    pub probability: f64,
    pub fidelity: Option<f64>,
    pub row: Option<usize>,
    pub col: Option<usize>,
    pub re: Option<f64>,
    pub im: Option<f64>,
}

impl BranchDump {
    pub fn rows(&self) -> Vec<EntryRow> {
        let base = |row, col, re, im| EntryRow {
            protocol: self.protocol,
            m: self.m,
            family: self.family,
            theta: self.theta,
            phi: self.phi,
            announcement: self.announcement.clone(),
            probability: self.probability,
            fidelity: self.fidelity,
            row,
            col,
            re,
            im,
        };
        match &self.output {
            None => vec![base(None, None, None, None)],
            Some(matrix) => matrix
                .iter()
                .enumerate()
                .flat_map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(move |(j, z)| (i, j, z[0], z[1]))
                        .collect::<Vec<_>>()
                })
                .map(|(i, j, re, im)| base(Some(i), Some(j), Some(re), Some(im)))
                .collect(),
        }
    }
}
