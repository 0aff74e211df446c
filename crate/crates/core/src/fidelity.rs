//! Threshold fidelities: exact, swept over θ, averaged over θ or the Bloch
//! sphere, and estimated by Monte Carlo.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::RngStream;
use crate::error::{Error, Result};
use crate::protocols::{
    build_target, run_exact, run_sampled, Announcement, InputFamily, ProtocolId, ProtocolParams,
    ProtocolRun, TargetState,
};
use crate::quadrature::Rule;
use crate::scalar::{compensated_sum, Real};

pub const MIN_SHOTS: usize = 100;
pub const DEFAULT_GAUSS_NODES: usize = 64;

/// Label for the announcement-summed overlap with sub-normalized outputs.
pub const DEF_THRESHOLD: &str = "f_th = sum over announcements of p * <psi|rho|psi>";
pub const DEF_THETA_AVERAGE: &str = "(1/pi) * integral over [0, pi) of f_th(theta)";
pub const DEF_SQUARED: &str =
    "c * closed integral over the sphere of |<psi|rho_ann|psi>|^2, rho_ann sub-normalized";
pub const DEF_POSTSELECTED: &str =
    "postselected - not a certification input by default: E[<psi|rho_a|psi>] / E[tr rho_a]";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchFidelity<T> {
    pub announcement: Announcement,
    pub probability: T,
    /// `<psi|output|psi>`; absent for a zero-probability branch.
    pub fidelity: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityReport<T> {
    pub protocol: ProtocolId,
    pub params: ProtocolParams<T>,
    pub definition: &'static str,
    pub mode: Mode,
    pub f_th: T,
    pub per_branch: Vec<BranchFidelity<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `Σ p · <psi|output|psi>` over the branches of `run`.
pub fn threshold_fidelity<T: Real>(run: &ProtocolRun<T>, target: &TargetState<T>) -> Result<FidelityReport<T>> {
    let per_branch = run
        .branches
        .iter()
        .map(|b| {
            let fidelity = b.output.as_ref().map(|rho| rho.expectation(&target.psi)).transpose()?;
            Ok(BranchFidelity {
                announcement: b.announcement,
                probability: b.probability,
                fidelity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let f_th = compensated_sum(
        per_branch
            .iter()
            .map(|b| b.probability * b.fidelity.unwrap_or_else(T::zero)),
    );
    Ok(FidelityReport {
        protocol: run.protocol,
        params: run.params,
        definition: DEF_THRESHOLD,
        mode: Mode::Exact,
        f_th,
        per_branch,
        shots: None,
        stderr: None,
        seed: None,
    })
}

/// Exact report for one protocol and parameter set.
pub fn exact_report<T: Real>(protocol: ProtocolId, params: &ProtocolParams<T>) -> Result<FidelityReport<T>> {
    threshold_fidelity(&run_exact(protocol, params)?, &build_target(params)?)
}

pub fn exact_threshold<T: Real>(protocol: ProtocolId, params: &ProtocolParams<T>) -> Result<T> {
    Ok(exact_report(protocol, params)?.f_th)
}

/// `(θ, f_th(θ))` on the GHZ family.
pub fn theta_sweep<T: Real>(protocol: ProtocolId, m: usize, grid: &[T]) -> Result<Vec<(T, T)>> {
    grid.iter()
        .map(|&theta| Ok((theta, exact_threshold(protocol, &ProtocolParams::ghz(m, theta))?)))
        .collect()
}

/// `n` equally spaced angles from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * T::lit(i as f64 / (n - 1) as f64))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum Quadrature {
    /// Midpoint rule with `n` cells.
    Grid(usize),
    Gauss(usize),
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::Gauss(DEFAULT_GAUSS_NODES)
    }
}

impl Quadrature {
    pub fn rule<T: Real>(self) -> Result<Rule<T>> {
        match self {
            Self::Grid(n) => Rule::midpoint(n),
            Self::Gauss(n) => Rule::gauss_legendre(n),
        }
    }
}

/// `(1/π) ∫_0^π f_th(θ) dθ` on the GHZ family.
pub fn theta_average<T: Real>(protocol: ProtocolId, m: usize, quadrature: Quadrature) -> Result<T> {
    let rule = quadrature.rule::<T>()?;
    let pi = T::PI();
    let integral = rule.integrate(T::zero(), pi, |theta| exact_threshold(protocol, &ProtocolParams::ghz(m, theta)))?;
    Ok(integral / pi)
}

/// Averages over the Bloch sphere for the single-qubit `pb` and `pab` runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochAverage<T> {
    pub protocol: ProtocolId,
    /// Constant in front of the squared-form integral.
    pub normalization: String,
    pub squared_definition: &'static str,
    /// Squared form per announcement, in announcement order.
    pub per_announcement: Vec<(Announcement, T)>,
    /// Same, summed over `b` so keyed by `a` alone.
    pub per_a: [T; 2],
    pub postselected_definition: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub postselect: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub postselected: Option<T>,
}

/// Sphere averages for `protocol ∈ {pb, pab}` at `m = 1`.
///
/// The squared form integrates `|<psi|rho_ann|psi>|²` against
/// `dφ d(cos θ)` times `1/(4π)` for `pb` and `1/(8π)` for `pab`. The
/// postselected value is the conditional mean fidelity given `a = bit`.
/// The sphere is discretized as `n` Gauss nodes in `cos θ` times `n`
/// uniform azimuths, which is exact for trigonometric polynomials in φ.
pub fn bloch_average<T: Real>(protocol: ProtocolId, postselect: Option<u8>, n: usize) -> Result<BlochAverage<T>> {
    let constant = match protocol {
        ProtocolId::PB => 4.0,
        ProtocolId::PAB => 8.0,
        other => {
            return Err(Error::NotApplicable {
                criterion: "bloch_average".into(),
                reason: format!("defined for pb and pab only, got {other}"),
            })
        }
    };
    if let Some(bit) = postselect {
        if bit > 1 {
            return Err(Error::InvalidParams(format!("postselect bit must be 0 or 1, got {bit}")));
        }
    }
    let rule = Rule::<T>::gauss_legendre(n)?;
    let phis: Vec<T> = (0..n).map(|k| T::lit(2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    let dphi = T::lit(2.0 * std::f64::consts::PI / n as f64);

    let mut squared: BTreeMap<Announcement, Vec<T>> = BTreeMap::new();
    let mut overlap = [Vec::new(), Vec::new()];
    let mut weight = [Vec::new(), Vec::new()];
    for (u, wu) in rule.on_interval(-T::one(), T::one()) {
        let theta = u.max(-T::one()).min(T::one()).acos();
        for &phi in &phis {
            let params = ProtocolParams::bloch(theta, phi);
            let target = build_target(&params)?;
            let run = run_exact(protocol, &params)?;
            let w = wu * dphi;
            let mut by_a = [(T::zero(), T::zero()); 2];
            for b in &run.branches {
                let f = match &b.output {
                    Some(rho) => b.probability * rho.expectation(&target.psi)?,
                    None => T::zero(),
                };
                squared.entry(b.announcement).or_default().push(w * f * f);
                let slot = &mut by_a[usize::from(b.announcement.a)];
                slot.0 = slot.0 + f;
                slot.1 = slot.1 + b.probability;
            }
            for a in 0..2 {
                overlap[a].push(w * by_a[a].0);
                weight[a].push(w * by_a[a].1);
            }
        }
    }
    let c = T::one() / (T::lit(constant) * T::PI());
    let per_announcement: Vec<(Announcement, T)> = squared
        .into_iter()
        .map(|(ann, terms)| (ann, c * compensated_sum(terms)))
        .collect();
    let mut per_a = [T::zero(); 2];
    for (ann, v) in &per_announcement {
        per_a[usize::from(ann.a)] = per_a[usize::from(ann.a)] + *v;
    }
    let postselected = postselect.map(|bit| {
        let i = usize::from(bit);
        compensated_sum(overlap[i].iter().copied()) / compensated_sum(weight[i].iter().copied())
    });
    Ok(BlochAverage {
        protocol,
        normalization: format!("1/({constant}*pi)"),
        squared_definition: DEF_SQUARED,
        per_announcement,
        per_a,
        postselected_definition: DEF_POSTSELECTED,
        postselect,
        postselected,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate<T> {
    pub estimate: T,
    pub stderr: T,
    pub shots: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub counts: BTreeMap<Announcement, u64>,
}

impl<T: Real> McEstimate<T> {
    pub fn frequency(&self, announcement: &Announcement) -> f64 {
        self.counts.get(announcement).copied().unwrap_or(0) as f64 / self.shots as f64
    }
}

/// Mean delivered fidelity over `shots` sampled trajectories.
///
/// Shot `i` draws from substream `i` of `seed`, and per-shot values are
/// collected in shot order before a compensated sum, so the estimate is
/// independent of the thread count.
pub fn monte_carlo_threshold<T: Real>(
    protocol: ProtocolId,
    params: &ProtocolParams<T>,
    shots: usize,
    seed: u64,
) -> Result<McEstimate<T>> {
    if shots < MIN_SHOTS {
        return Err(Error::TooFewShots {
            got: shots,
            min: MIN_SHOTS,
        });
    }
    params.validate()?;
    let target = build_target(params)?;
    let samples = (0..shots as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::substream(seed, i);
            let (ann, rho) = run_sampled(protocol, params, &mut rng)?;
            Ok((ann, rho.expectation(&target.psi)?))
        })
        .collect::<Result<Vec<(Announcement, T)>>>()?;
    let n = T::lit(shots as f64);
    let mean = compensated_sum(samples.iter().map(|s| s.1)) / n;
    let var = compensated_sum(samples.iter().map(|s| (s.1 - mean) * (s.1 - mean))) / (n - T::one());
    let mut counts = BTreeMap::new();
    for (ann, _) in &samples {
        *counts.entry(*ann).or_insert(0) += 1;
    }
    Ok(McEstimate {
        estimate: mean,
        stderr: (var / n).sqrt(),
        shots,
        seed,
        rng: crate::channels::RNG_ALGORITHM,
        counts,
    })
}

/// [`monte_carlo_threshold`] on a dedicated pool of `threads` workers.
pub fn monte_carlo_threshold_on<T: Real>(
    protocol: ProtocolId,
    params: &ProtocolParams<T>,
    shots: usize,
    seed: u64,
    threads: usize,
) -> Result<McEstimate<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    pool.install(|| monte_carlo_threshold(protocol, params, shots, seed))
}

/// A Monte Carlo estimate packaged as a report.
pub fn monte_carlo_report<T: Real>(
    protocol: ProtocolId,
    params: &ProtocolParams<T>,
    shots: usize,
    seed: u64,
) -> Result<FidelityReport<T>> {
    let mc = monte_carlo_threshold(protocol, params, shots, seed)?;
    let per_branch = mc
        .counts
        .iter()
        .map(|(ann, &count)| BranchFidelity {
            announcement: *ann,
            probability: T::lit(count as f64 / shots as f64),
            fidelity: None,
        })
        .collect();
    Ok(FidelityReport {
        protocol,
        params: *params,
        definition: DEF_THRESHOLD,
        mode: Mode::MonteCarlo,
        f_th: mc.estimate,
        per_branch,
        shots: Some(shots),
        stderr: Some(mc.stderr),
        seed: Some(seed),
    })
}

/// Whether a family admits a θ-average.
pub fn supports_theta_average(family: InputFamily) -> bool {
    family == InputFamily::Ghz
}
