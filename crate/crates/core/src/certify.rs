//! Issue/deny decisions for teleportation certificates.
//!
//! A certificate names who must have used quantum resources. It issues when
//! the observed fidelity strictly exceeds the best value the matching
//! classical adversary can reach.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{self, Quadrature};
use crate::protocols::{InputFamily, ProtocolId, ProtocolParams};

/// Slack on every comparison; absorbs rounding in observed values.
pub const DECISION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    Honest,
    CheatingA,
    CheatingB,
    #[serde(rename = "cheating_ab")]
    CheatingAB,
}

impl Adversary {
    pub const ALL: [Adversary; 4] = [Self::Honest, Self::CheatingA, Self::CheatingB, Self::CheatingAB];

    pub fn name(self) -> &'static str {
        match self {
            Self::Honest => "honest",
            Self::CheatingA => "cheating_a",
            Self::CheatingB => "cheating_b",
            Self::CheatingAB => "cheating_ab",
        }
    }

    /// Protocols that realize this adversary's classical strategies.
    pub fn protocols(self) -> &'static [ProtocolId] {
        match self {
            Self::Honest => &[ProtocolId::P0],
            Self::CheatingA => &[ProtocolId::PA1, ProtocolId::PA2],
            Self::CheatingB => &[ProtocolId::PB],
            Self::CheatingAB => &[ProtocolId::PAB],
        }
    }

    pub fn certificate(self) -> CertificateId {
        match self {
            Self::Honest => CertificateId(1),
            Self::CheatingA => CertificateId(3),
            Self::CheatingB => CertificateId(4),
            Self::CheatingAB => CertificateId(5),
        }
    }

    /// The adversary model a protocol's cheater is judged under.
    pub fn for_protocol(protocol: ProtocolId) -> Self {
        match protocol {
            ProtocolId::P0 => Self::Honest,
            ProtocolId::PA1 | ProtocolId::PA2 => Self::CheatingA,
            ProtocolId::PB => Self::CheatingB,
            ProtocolId::PAB => Self::CheatingAB,
        }
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::Unknown {
                kind: "adversary model",
                value: s.to_string(),
            })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Worst case over the input family.
    #[default]
    Pointwise,
    /// Mean over θ uniform on `[0, π)`; GHZ family only.
    ThetaAverage,
    /// Sphere average postselected on `a = 1`; single-qubit Bloch inputs,
    /// adversaries B and AB only.
    BlochPostselected,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Self::Pointwise, Self::ThetaAverage, Self::BlochPostselected];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pointwise => "pointwise",
            Self::ThetaAverage => "theta_average",
            Self::BlochPostselected => "bloch_postselected",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::Unknown {
                kind: "criterion",
                value: s.to_string(),
            })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSource {
    /// Closed-form constants as published.
    #[default]
    PaperConstant,
    /// Best value the simulated cheating protocols reach.
    ComputedFromSimulation,
}

impl ThresholdSource {
    pub const ALL: [ThresholdSource; 2] = [Self::PaperConstant, Self::ComputedFromSimulation];

    pub fn name(self) -> &'static str {
        match self {
            Self::PaperConstant => "paper_constant",
            Self::ComputedFromSimulation => "computed_from_simulation",
        }
    }
}

impl fmt::Display for ThresholdSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThresholdSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "paper_constant" | "paper" => Ok(Self::PaperConstant),
            "computed_from_simulation" | "computed" | "simulation" => Ok(Self::ComputedFromSimulation),
            _ => Err(Error::Unknown {
                kind: "threshold source",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryModel {
    pub adversary: Adversary,
    pub criterion: Criterion,
    pub source: ThresholdSource,
}

impl AdversaryModel {
    pub fn new(adversary: Adversary, criterion: Criterion, source: ThresholdSource) -> Self {
        Self {
            adversary,
            criterion,
            source,
        }
    }

    pub fn pointwise(adversary: Adversary) -> Self {
        Self::new(adversary, Criterion::Pointwise, ThresholdSource::PaperConstant)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CertificateId(pub u8);

impl CertificateId {
    /// What an issued certificate asserts.
    pub fn claim(self) -> &'static str {
        match self.0 {
            1 => "the protocol ran without error",
            3 => "A used quantum resources; B is trusted",
            4 => "B used quantum resources; A is trusted",
            5 => "A and B both used quantum resources",
            _ => "unknown certificate",
        }
    }
}

impl fmt::Display for CertificateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certificate {}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Issue,
    Deny,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `observed > threshold + tolerance`.
    StrictGreater,
    /// `observed >= threshold - tolerance`; the honest model only, whose
    /// threshold is the maximum fidelity 1 and cannot be strictly exceeded.
    AtLeastPerfect,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComputeSettings {
    /// θ samples on `[0, π]` for pointwise maxima.
    pub theta_points: usize,
    /// φ samples on `[0, 2π)` for single-qubit pointwise maxima.
    pub phi_points: usize,
    pub quadrature: Quadrature,
    /// Gauss nodes in `cos θ` (and azimuths) for sphere averages.
    pub sphere_nodes: usize,
}

impl Default for ComputeSettings {
    fn default() -> Self {
        Self {
            theta_points: 181,
            phi_points: 24,
            quadrature: Quadrature::default(),
            sphere_nodes: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Threshold {
    pub value: f64,
    pub source: ThresholdSource,
    pub provenance: String,
}

impl Threshold {
    fn published(value: f64, provenance: &str) -> Self {
        Self {
            value,
            source: ThresholdSource::PaperConstant,
            provenance: provenance.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateDecision {
    pub certificate: CertificateId,
    pub claim: &'static str,
    pub adversary: Adversary,
    pub criterion: Criterion,
    pub m: usize,
    pub family: InputFamily,
    pub observed: f64,
    pub threshold: f64,
    pub source: ThresholdSource,
    pub provenance: String,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub verdict: Verdict,
}

fn not_applicable(criterion: Criterion, reason: impl Into<String>) -> Error {
    Error::NotApplicable {
        criterion: criterion.name().to_string(),
        reason: reason.into(),
    }
}

fn check_context(model: &AdversaryModel, m: usize, family: InputFamily) -> Result<()> {
    ProtocolParams::<f64> {
        m,
        theta: 0.0,
        phi: 0.0,
        family,
    }
    .validate()?;
    match model.criterion {
        Criterion::Pointwise => Ok(()),
        Criterion::ThetaAverage if family != InputFamily::Ghz => Err(not_applicable(
            model.criterion,
            format!("needs the ghz family, got {family}"),
        )),
        Criterion::ThetaAverage => Ok(()),
        Criterion::BlochPostselected => {
            if !matches!(model.adversary, Adversary::CheatingB | Adversary::CheatingAB) {
                return Err(not_applicable(
                    model.criterion,
                    format!("defined for cheating_b and cheating_ab, got {}", model.adversary),
                ));
            }
            if family != InputFamily::Bloch {
                return Err(not_applicable(
                    model.criterion,
                    format!("needs the bloch family with m = 1, got {family}"),
                ));
            }
            Ok(())
        }
    }
}

fn published_threshold(model: &AdversaryModel, m: usize, family: InputFamily) -> Threshold {
    use Adversary::*;
    use Criterion::*;
    let isolated = m == 1;
    match (model.adversary, model.criterion) {
        (Honest, _) => Threshold::published(1.0, "perfect teleportation: f_th = 1"),
        (CheatingA, Pointwise) if isolated => {
            Threshold::published(0.5, "A guesses on an isolated qubit: f_th = 1/2")
        }
        (CheatingA, Pointwise) => Threshold::published(
            0.5,
            "A cheating on m > 1: max over theta of 1/2 - sin^2(theta)/4 = 1/2",
        ),
        (CheatingA, ThetaAverage) => Threshold::published(
            0.375,
            "A cheating, theta average of 1/2 - sin^2(theta)/4 = 3/8",
        ),
        (CheatingB, Pointwise) if isolated => {
            Threshold::published(0.5, "B regenerates an isolated qubit: f_th = 1/2")
        }
        (CheatingB, Pointwise) if family == InputFamily::Trivial => {
            Threshold::published(0.5, "B regenerates, trivial input on m > 1: f_th = 1/2")
        }
        (CheatingB, Pointwise) => Threshold::published(
            0.25,
            "B cheating on m > 1: max over theta of 1/4 - sin^2(theta)/8 = 1/4",
        ),
        (CheatingB, ThetaAverage) => Threshold::published(
            0.1875,
            "B cheating, theta average of 1/4 - sin^2(theta)/8 = 3/16",
        ),
        (CheatingB, BlochPostselected) => Threshold::published(
            2.0 / 3.0,
            "B cheating, sphere-averaged fidelity postselected on a = 1: 2/3",
        ),
        (CheatingAB, Pointwise) if isolated => {
            Threshold::published(0.5, "A and B both cheat on an isolated qubit: f_th = 1/2")
        }
        (CheatingAB, Pointwise) => Threshold::published(
            0.5,
            "A and B both cheat on m > 1: max over theta of 1/2 - sin^2(theta)/4 = 1/2",
        ),
        (CheatingAB, ThetaAverage) => Threshold::published(
            0.375,
            "A and B both cheat, theta average of 1/2 - sin^2(theta)/4 = 3/8",
        ),
        (CheatingAB, BlochPostselected) => Threshold::published(
            2.0 / 3.0,
            "A and B both cheat, sphere-averaged fidelity postselected on a = 1: 2/3",
        ),
        (CheatingA, BlochPostselected) => unreachable!("rejected by check_context"),
    }
}

fn computed_threshold(
    model: &AdversaryModel,
    m: usize,
    family: InputFamily,
    settings: &ComputeSettings,
) -> Result<Threshold> {
    let protocols = model.adversary.protocols();
    let names = protocols.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ");
    let (value, how) = match model.criterion {
        Criterion::Pointwise => {
            let grid: Vec<ProtocolParams<f64>> = match family {
                InputFamily::Trivial => vec![ProtocolParams::trivial(m)],
                InputFamily::Ghz => fidelity::linspace(0.0, std::f64::consts::PI, settings.theta_points)
                    .into_iter()
                    .map(|t| ProtocolParams::ghz(m, t))
                    .collect(),
                InputFamily::Bloch => {
                    let phis = (0..settings.phi_points)
                        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / settings.phi_points as f64);
                    let thetas = fidelity::linspace(0.0, std::f64::consts::PI, settings.theta_points);
                    phis.flat_map(|phi| thetas.iter().map(move |&t| ProtocolParams::bloch(t, phi)))
                        .collect()
                }
            };
            let mut best = f64::NEG_INFINITY;
            for id in protocols {
                for p in &grid {
                    best = best.max(fidelity::exact_threshold(*id, p)?);
                }
            }
            (best, format!("max of simulated f_th over {} {family} inputs", grid.len()))
        }
        Criterion::ThetaAverage => {
            let mut best = f64::NEG_INFINITY;
            for id in protocols {
                best = best.max(fidelity::theta_average(*id, m, settings.quadrature)?);
            }
            (best, format!("simulated theta average, {:?} quadrature", settings.quadrature))
        }
        Criterion::BlochPostselected => {
            let avg = fidelity::bloch_average::<f64>(protocols[0], Some(1), settings.sphere_nodes)?;
            (
                avg.postselected.unwrap_or(f64::NAN),
                format!("simulated sphere average postselected on a = 1, {} nodes", settings.sphere_nodes),
            )
        }
    };
    Ok(Threshold {
        value,
        source: ThresholdSource::ComputedFromSimulation,
        provenance: format!("{how} for {names}"),
    })
}

/// The threshold `model` binds for inputs of size `m` from `family`.
pub fn threshold_for(model: &AdversaryModel, m: usize, family: InputFamily) -> Result<Threshold> {
    threshold_with(model, m, family, &ComputeSettings::default())
}

pub fn threshold_with(
    model: &AdversaryModel,
    m: usize,
    family: InputFamily,
    settings: &ComputeSettings,
) -> Result<Threshold> {
    check_context(model, m, family)?;
    match model.source {
        ThresholdSource::PaperConstant => Ok(published_threshold(model, m, family)),
        ThresholdSource::ComputedFromSimulation => computed_threshold(model, m, family, settings),
    }
}

/// Compares `observed` against a threshold already bound for `model`.
pub fn decide_against(
    observed: f64,
    model: &AdversaryModel,
    m: usize,
    family: InputFamily,
    threshold: &Threshold,
) -> Result<CertificateDecision> {
    if !(-DECISION_TOLERANCE..=1.0 + DECISION_TOLERANCE).contains(&observed) || observed.is_nan() {
        return Err(Error::ObservedOutOfRange(observed));
    }
    let comparison = if model.adversary == Adversary::Honest {
        Comparison::AtLeastPerfect
    } else {
        Comparison::StrictGreater
    };
    let passes = match comparison {
        Comparison::StrictGreater => observed > threshold.value + DECISION_TOLERANCE,
        Comparison::AtLeastPerfect => observed >= threshold.value - DECISION_TOLERANCE,
    };
    let certificate = model.adversary.certificate();
    Ok(CertificateDecision {
        certificate,
        claim: certificate.claim(),
        adversary: model.adversary,
        criterion: model.criterion,
        m,
        family,
        observed,
        threshold: threshold.value,
        source: threshold.source,
        provenance: threshold.provenance.clone(),
        comparison,
        tolerance: DECISION_TOLERANCE,
        verdict: if passes { Verdict::Issue } else { Verdict::Deny },
    })
}

pub fn decide(observed: f64, model: &AdversaryModel, m: usize, family: InputFamily) -> Result<CertificateDecision> {
    let threshold = threshold_for(model, m, family)?;
    decide_against(observed, model, m, family, &threshold)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub adversary: Adversary,
    pub certificate: CertificateId,
    pub criterion: Criterion,
    pub threshold: Threshold,
}

/// Every applicable (adversary, criterion) threshold for `(m, family)`.
pub fn threshold_table(m: usize, family: InputFamily, source: ThresholdSource) -> Result<Vec<ThresholdRow>> {
    threshold_table_with(m, family, source, &ComputeSettings::default())
}

pub fn threshold_table_with(
    m: usize,
    family: InputFamily,
    source: ThresholdSource,
    settings: &ComputeSettings,
) -> Result<Vec<ThresholdRow>> {
    let mut rows = Vec::new();
    for adversary in Adversary::ALL {
        for criterion in Criterion::ALL {
            let model = AdversaryModel::new(adversary, criterion, source);
            match threshold_with(&model, m, family, settings) {
                Ok(threshold) => rows.push(ThresholdRow {
                    adversary,
                    certificate: adversary.certificate(),
                    criterion,
                    threshold,
                }),
                Err(Error::NotApplicable { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(rows)
}
