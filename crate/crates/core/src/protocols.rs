//! Agent-level step semantics of the honest and cheating teleportation
//! protocols.
//!
//! The register holds C's `m` qubits (ancillas `0..m-1`, then the qubit to be
//! sent), followed by D's two ebit shares: A's share and B's share. Every
//! protocol is a [`Script`] of [`Step`]s run either by branch enumeration
//! ([`run_exact`]) or as a single sampled trajectory ([`run_sampled`]).
//!
//! Trash is deferred: a trashed qubit stays in the pure register, is never
//! touched again, and is traced out when the output is formed. This equals an
//! immediate partial trace because later steps act on disjoint qubits.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{self, RngStream};
use crate::error::{Error, Result};
use crate::gates::{self, UnitaryMatrix, MAX_GATE_QUBITS};
use crate::scalar::Real;
use crate::statevec::{DensityOperator, PureState};

/// Largest `m` a protocol run accepts. The preparation gate is dense over
/// `m` qubits, so this matches [`MAX_GATE_QUBITS`].
pub const MAX_M: usize = MAX_GATE_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProtocolId {
    #[serde(rename = "p0", alias = "P0")]
    P0,
    #[serde(rename = "pa1", alias = "PA1")]
    PA1,
    #[serde(rename = "pa2", alias = "PA2")]
    PA2,
    #[serde(rename = "pb", alias = "PB")]
    PB,
    #[serde(rename = "pab", alias = "PAB")]
    PAB,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 5] = [Self::P0, Self::PA1, Self::PA2, Self::PB, Self::PAB];

    pub fn name(self) -> &'static str {
        match self {
            Self::P0 => "p0",
            Self::PA1 => "pa1",
            Self::PA2 => "pa2",
            Self::PB => "pb",
            Self::PAB => "pab",
        }
    }

    /// Whether the announcement carries a second bit.
    pub fn announces_b(self) -> bool {
        self != Self::PAB
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                kind: "protocol",
                value: s.to_string(),
            })
    }
}

/// How C prepares the state to be teleported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFamily {
    /// `|0…0>`; both angles ignored.
    #[serde(alias = "trivial-identity")]
    Trivial,
    /// `cos(θ/2)|0…0> + sin(θ/2)|1…1>`; φ ignored.
    #[serde(alias = "ghz-rotation")]
    Ghz,
    /// `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`; requires `m = 1`.
    #[serde(alias = "bloch-rotation")]
    Bloch,
}

impl InputFamily {
    pub const ALL: [InputFamily; 3] = [Self::Trivial, Self::Ghz, Self::Bloch];

    pub fn name(self) -> &'static str {
        match self {
            Self::Trivial => "trivial",
            Self::Ghz => "ghz",
            Self::Bloch => "bloch",
        }
    }
}

impl fmt::Display for InputFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "trivial" | "trivial-identity" | "identity" => Ok(Self::Trivial),
            "ghz" | "ghz-rotation" => Ok(Self::Ghz),
            "bloch" | "bloch-rotation" => Ok(Self::Bloch),
            _ => Err(Error::Unknown {
                kind: "input family",
                value: s,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams<T> {
    pub m: usize,
    pub theta: T,
    pub phi: T,
    pub family: InputFamily,
}

impl<T: Real> ProtocolParams<T> {
    pub fn trivial(m: usize) -> Self {
        Self {
            m,
            theta: T::zero(),
            phi: T::zero(),
            family: InputFamily::Trivial,
        }
    }

    pub fn ghz(m: usize, theta: T) -> Self {
        Self {
            m,
            theta,
            phi: T::zero(),
            family: InputFamily::Ghz,
        }
    }

    pub fn bloch(theta: T, phi: T) -> Self {
        Self {
            m: 1,
            theta,
            phi,
            family: InputFamily::Bloch,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if self.m > MAX_M {
            return Err(Error::Capacity {
                requested: self.m,
                limit: MAX_M,
            });
        }
        if self.family == InputFamily::Bloch && self.m != 1 {
            return Err(Error::InvalidParams(format!(
                "the bloch family needs m = 1, got m = {}",
                self.m
            )));
        }
        if !self.theta.is_finite() || !self.phi.is_finite() {
            return Err(Error::InvalidParams("angles must be finite".into()));
        }
        Ok(())
    }

    /// C's preparation gate on the first `m` qubits.
    pub fn preparation(&self) -> Result<UnitaryMatrix<T>> {
        self.validate()?;
        match self.family {
            InputFamily::Trivial => gates::identity(self.m),
            InputFamily::Ghz => gates::ghz_rotation(self.m, self.theta),
            InputFamily::Bloch => Ok(gates::bloch_rotation(self.theta, self.phi)),
        }
    }
}

/// Classical message from A to B, ordered by `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Announcement {
    pub a: u8,
    pub b: Option<u8>,
}

impl fmt::Display for Announcement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.b {
            Some(b) => write!(f, "{}{}", self.a, b),
            None => write!(f, "{}", self.a),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Branch<T> {
    pub announcement: Announcement,
    pub probability: T,
    /// Unit-trace output over the ancillas followed by B's delivered qubit.
    /// `None` for a zero-probability branch.
    pub output: Option<DensityOperator<T>>,
}

impl<T: Real> Branch<T> {
    /// `probability · output`, the sub-normalized branch operator.
    pub fn weighted_output(&self, num_qubits: usize) -> DensityOperator<T> {
        match &self.output {
            Some(rho) => rho.scaled(self.probability),
            None => DensityOperator::zero(num_qubits),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetState<T> {
    pub psi: PureState<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolRun<T> {
    pub protocol: ProtocolId,
    pub params: ProtocolParams<T>,
    pub branches: Vec<Branch<T>>,
}

/// The state C intends to have delivered: the preparation gate on `|0…0>`.
pub fn build_target<T: Real>(params: &ProtocolParams<T>) -> Result<TargetState<T>> {
    let psi = PureState::zero(params.m)?.apply_unitary(&params.preparation()?, &all_qubits(params.m))?;
    Ok(TargetState { psi })
}

fn all_qubits(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Named register positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Slot {
    Ancilla(usize),
    Sent,
    ShareA,
    ShareB,
}

/// Which announced bit a step writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Bit {
    A,
    B,
}

/// B's correction on his qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Correction {
    /// `Z^a X^b`, X applied first.
    Honest,
    /// `X^a`, ignoring `b`.
    FlipOnA,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Step {
    /// C: preparation gate on its `m` qubits.
    Prepare,
    /// D: the entanglement gadget on the two shares.
    Entangle,
    /// A: the gadget inverse on (Sent, ShareA).
    Disentangle,
    Measure(Slot, Bit),
    Trash(Slot),
    RandomBit(Bit),
    /// Fresh `|0>` in a slot previously trashed.
    Regenerate(Slot),
    Correct(Correction),
}

pub type Script = Vec<Step>;

/// The step sequence of `protocol`.
pub fn script(protocol: ProtocolId) -> Script {
    use Step::*;
    let mut steps = vec![Prepare, Entangle];
    match protocol {
        ProtocolId::P0 => steps.extend([
            Disentangle,
            Measure(Slot::Sent, Bit::A),
            Measure(Slot::ShareA, Bit::B),
            Correct(Correction::Honest),
        ]),
        ProtocolId::PA1 => steps.extend([
            Trash(Slot::ShareA),
            RandomBit(Bit::B),
            Measure(Slot::Sent, Bit::A),
            Correct(Correction::Honest),
        ]),
        ProtocolId::PA2 => steps.extend([
            Trash(Slot::Sent),
            Trash(Slot::ShareA),
            RandomBit(Bit::A),
            RandomBit(Bit::B),
            Correct(Correction::Honest),
        ]),
        ProtocolId::PB => steps.extend([
            Disentangle,
            Measure(Slot::Sent, Bit::A),
            Measure(Slot::ShareA, Bit::B),
            Trash(Slot::ShareB),
            Regenerate(Slot::ShareB),
            Correct(Correction::FlipOnA),
        ]),
        ProtocolId::PAB => steps.extend([
            Measure(Slot::Sent, Bit::A),
            Trash(Slot::ShareA),
            Trash(Slot::ShareB),
            Regenerate(Slot::ShareB),
            Correct(Correction::FlipOnA),
        ]),
    }
    steps
}

/// How a `Trash` step is realized. Both are the same channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrashMode {
    /// Partial trace, deferred to the end of the run.
    #[default]
    PartialTrace,
    /// Measure in the computational basis and forget the result.
    MeasureAndDiscard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    Live(Slot),
    Discarded,
}

/// One term of the pure-state decomposition.
///
/// `state` is sub-normalized with squared norm equal to the path's quantum
/// probability; `weight` carries the classical factor from random bits.
#[derive(Clone, Debug)]
struct Path<T> {
    state: PureState<T>,
    labels: Vec<Label>,
    weight: T,
    a: Option<u8>,
    b: Option<u8>,
}

impl<T: Real> Path<T> {
    fn position(&self, slot: Slot) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| *l == Label::Live(slot))
            .ok_or_else(|| Error::InvalidParams(format!("{slot:?} is not live at this step")))
    }

    fn set_bit(&mut self, bit: Bit, value: u8) {
        match bit {
            Bit::A => self.a = Some(value),
            Bit::B => self.b = Some(value),
        }
    }

    fn project(&self, slot: Slot, value: u8) -> Result<Self> {
        let q = self.position(slot)?;
        let mut labels = self.labels.clone();
        labels.remove(q);
        Ok(Self {
            state: self.state.project_out(q, value)?,
            labels,
            weight: self.weight,
            a: self.a,
            b: self.b,
        })
    }

    fn apply(&mut self, u: &UnitaryMatrix<T>, slots: &[Slot]) -> Result<()> {
        let targets = slots
            .iter()
            .map(|&s| self.position(s))
            .collect::<Result<Vec<_>>>()?;
        self.state = self.state.apply_unitary(u, &targets)?;
        Ok(())
    }

    fn announcement(&self) -> Result<Announcement> {
        let a = self
            .a
            .ok_or_else(|| Error::InvalidParams("script never sets bit a".into()))?;
        Ok(Announcement { a, b: self.b })
    }

    /// Output qubits in register order: ancillas, then B's qubit.
    fn output(&self, m: usize) -> Result<DensityOperator<T>> {
        let mut keep: Vec<usize> = (0..m - 1)
            .map(|i| self.position(Slot::Ancilla(i)))
            .collect::<Result<_>>()?;
        keep.push(self.position(Slot::ShareB)?);
        let rest: Vec<usize> = (0..self.labels.len()).filter(|q| !keep.contains(q)).collect();
        let mut order = keep;
        order.extend(&rest);
        let ordered = self.state.permute(&order)?;
        let discard: Vec<usize> = (m..ordered.num_qubits()).collect();
        Ok(ordered.reduced_density(&discard)?.scaled(self.weight))
    }
}

/// Source of the classical choices a run makes.
enum Chooser<'a> {
    Enumerate,
    Sample(&'a mut RngStream),
}

fn initial_path<T: Real>(m: usize) -> Result<Path<T>> {
    let mut labels: Vec<Label> = (0..m - 1).map(|i| Label::Live(Slot::Ancilla(i))).collect();
    labels.extend([Slot::Sent, Slot::ShareA, Slot::ShareB].map(Label::Live));
    Ok(Path {
        state: PureState::zero(m + 2)?,
        labels,
        weight: T::one(),
        a: None,
        b: None,
    })
}

fn execute<T: Real>(
    steps: &[Step],
    params: &ProtocolParams<T>,
    trash_mode: TrashMode,
    mut chooser: Chooser<'_>,
) -> Result<Vec<Path<T>>> {
    params.validate()?;
    let m = params.m;
    let mut paths = vec![initial_path::<T>(m)?];
    let half = T::lit(0.5);
    for step in steps {
        let mut next = Vec::with_capacity(paths.len() * 2);
        for mut path in paths {
            match *step {
                Step::Prepare => {
                    let prep = params.preparation()?;
                    let slots: Vec<Slot> = (0..m - 1)
                        .map(Slot::Ancilla)
                        .chain(std::iter::once(Slot::Sent))
                        .collect();
                    path.apply(&prep, &slots)?;
                    next.push(path);
                }
                Step::Entangle => {
                    path.apply(&gates::entanglement_gadget(), &[Slot::ShareA, Slot::ShareB])?;
                    next.push(path);
                }
                Step::Disentangle => {
                    path.apply(&gates::entanglement_gadget_inverse(), &[Slot::Sent, Slot::ShareA])?;
                    next.push(path);
                }
                Step::Measure(slot, bit) => match &mut chooser {
                    Chooser::Enumerate => {
                        for value in 0..2 {
                            let mut p = path.project(slot, value)?;
                            p.set_bit(bit, value);
                            next.push(p);
                        }
                    }
                    Chooser::Sample(rng) => {
                        let q = path.position(slot)?;
                        let out = channels::measure_sample(&path.state, q, rng)?;
                        path.labels.remove(q);
                        path.state = out.post_state.ok_or(Error::InvalidProbability(0.0))?;
                        path.set_bit(bit, out.bit);
                        next.push(path);
                    }
                },
                Step::Trash(slot) => match trash_mode {
                    TrashMode::PartialTrace => {
                        let q = path.position(slot)?;
                        path.labels[q] = Label::Discarded;
                        next.push(path);
                    }
                    TrashMode::MeasureAndDiscard => match &mut chooser {
                        Chooser::Enumerate => {
                            for value in 0..2 {
                                next.push(path.project(slot, value)?);
                            }
                        }
                        Chooser::Sample(rng) => {
                            let q = path.position(slot)?;
                            let out = channels::measure_sample(&path.state, q, rng)?;
                            path.labels.remove(q);
                            path.state = out.post_state.ok_or(Error::InvalidProbability(0.0))?;
                            next.push(path);
                        }
                    },
                },
                Step::RandomBit(bit) => match &mut chooser {
                    Chooser::Enumerate => {
                        for value in 0..2 {
                            let mut p = path.clone();
                            p.weight = p.weight * half;
                            p.set_bit(bit, value);
                            next.push(p);
                        }
                    }
                    Chooser::Sample(rng) => {
                        path.set_bit(bit, channels::random_bit(rng));
                        next.push(path);
                    }
                },
                Step::Regenerate(slot) => {
                    if path.labels.contains(&Label::Live(slot)) {
                        return Err(Error::InvalidParams(format!(
                            "{slot:?} must be trashed before it is regenerated"
                        )));
                    }
                    path.state = path.state.tensor(&PureState::zero(1)?)?;
                    path.labels.push(Label::Live(slot));
                    next.push(path);
                }
                Step::Correct(kind) => {
                    let a = path.a.unwrap_or(0);
                    let u = match kind {
                        Correction::Honest => gates::z_pow_x_pow(a, path.b.unwrap_or(0)),
                        Correction::FlipOnA => gates::z_pow_x_pow(0, a),
                    };
                    path.apply(&u, &[Slot::ShareB])?;
                    next.push(path);
                }
            }
        }
        paths = next;
    }
    Ok(paths)
}

/// Runs an arbitrary script by branch enumeration.
///
/// Paths sharing an announcement are summed, so measure-and-discard trash
/// and partial-trace trash give the same branches.
pub fn run_script_exact<T: Real>(
    steps: &[Step],
    params: &ProtocolParams<T>,
    trash_mode: TrashMode,
) -> Result<Vec<Branch<T>>> {
    let m = params.m;
    let paths = execute(steps, params, trash_mode, Chooser::Enumerate)?;
    let mut grouped: BTreeMap<Announcement, DensityOperator<T>> = BTreeMap::new();
    for path in &paths {
        let rho = path.output(m)?;
        let key = path.announcement()?;
        let merged = match grouped.remove(&key) {
            Some(acc) => acc.add(&rho)?,
            None => rho,
        };
        grouped.insert(key, merged);
    }
    Ok(grouped
        .into_iter()
        .map(|(announcement, rho)| {
            let trace = rho.trace();
            let output = (trace > T::probability_floor()).then(|| rho.scaled(T::one() / trace));
            let probability = trace.max(T::zero()).min(T::one());
            Branch {
                announcement,
                probability,
                output,
            }
        })
        .collect())
}

/// Every announcement branch of `protocol`, sorted by `(a, b)`.
pub fn run_exact<T: Real>(protocol: ProtocolId, params: &ProtocolParams<T>) -> Result<ProtocolRun<T>> {
    run_exact_with(protocol, params, TrashMode::PartialTrace)
}

pub fn run_exact_with<T: Real>(
    protocol: ProtocolId,
    params: &ProtocolParams<T>,
    trash_mode: TrashMode,
) -> Result<ProtocolRun<T>> {
    Ok(ProtocolRun {
        protocol,
        params: *params,
        branches: run_script_exact(&script(protocol), params, trash_mode)?,
    })
}

/// One trajectory: the announcement and the unit-trace delivered state.
pub fn run_sampled<T: Real>(
    protocol: ProtocolId,
    params: &ProtocolParams<T>,
    rng: &mut RngStream,
) -> Result<(Announcement, DensityOperator<T>)> {
    let paths = execute(&script(protocol), params, TrashMode::PartialTrace, Chooser::Sample(rng))?;
    let path = paths
        .into_iter()
        .next()
        .ok_or_else(|| Error::InvalidParams("sampled run produced no trajectory".into()))?;
    let mut rho = path.output(params.m)?;
    let trace = rho.trace();
    if trace > T::probability_floor() {
        rho = rho.scaled(T::one() / trace);
    }
    Ok((path.announcement()?, rho))
}

impl<T: Real> ProtocolRun<T> {
    pub fn total_probability(&self) -> T {
        crate::scalar::compensated_sum(self.branches.iter().map(|b| b.probability))
    }

    /// `Σ_branches probability · output`.
    pub fn averaged_output(&self) -> Result<DensityOperator<T>> {
        let m = self.params.m;
        self.branches
            .iter()
            .try_fold(DensityOperator::zero(m), |acc, b| acc.add(&b.weighted_output(m)))
    }
}
