use std::f64::consts::PI;

use proptest::prelude::*;
use qtp_core::certify::{
    self, Adversary, AdversaryModel, Comparison, Criterion, ThresholdSource, Verdict,
};
use qtp_core::fidelity::linspace;
use qtp_core::{exact_threshold, InputFamily, Params, ProtocolId};

fn model(adversary: Adversary, criterion: Criterion, source: ThresholdSource) -> AdversaryModel {
    AdversaryModel::new(adversary, criterion, source)
}

#[test]
fn cheaters_never_beat_computed_thresholds() {
    let source = ThresholdSource::ComputedFromSimulation;
    for m in [1, 2] {
        for id in [ProtocolId::PA1, ProtocolId::PA2, ProtocolId::PB, ProtocolId::PAB] {
            let adversary = Adversary::for_protocol(id);
            let mdl = model(adversary, Criterion::Pointwise, source);
            let threshold = certify::threshold_for(&mdl, m, InputFamily::Ghz).unwrap();
            for theta in linspace(0.0, PI, 19) {
                let f = exact_threshold(id, &Params::ghz(m, theta)).unwrap();
                let d = certify::decide_against(f, &mdl, m, InputFamily::Ghz, &threshold).unwrap();
                assert_eq!(d.verdict, Verdict::Deny, "{id} m={m} θ={theta}: {f} vs {}", d.threshold);
            }
        }
    }
}

#[test]
fn computed_thresholds_match_simulated_optima() {
    let get = |a, c, m, fam| {
        certify::threshold_for(&model(a, c, ThresholdSource::ComputedFromSimulation), m, fam)
            .unwrap()
            .value
    };
    assert!((get(Adversary::CheatingA, Criterion::Pointwise, 2, InputFamily::Ghz) - 0.5).abs() <= 1e-12);
    assert!((get(Adversary::CheatingB, Criterion::Pointwise, 2, InputFamily::Ghz) - 0.5).abs() <= 1e-12);
    assert!((get(Adversary::CheatingAB, Criterion::Pointwise, 2, InputFamily::Ghz) - 1.0).abs() <= 1e-12);
    assert!((get(Adversary::CheatingA, Criterion::ThetaAverage, 2, InputFamily::Ghz) - 0.375).abs() <= 1e-9);
    assert!((get(Adversary::CheatingAB, Criterion::BlochPostselected, 1, InputFamily::Bloch) - 2.0 / 3.0).abs() <= 1e-9);
    assert!((get(Adversary::Honest, Criterion::Pointwise, 1, InputFamily::Bloch) - 1.0).abs() <= 1e-12);
}

#[test]
fn honest_runs_pass_every_published_threshold() {
    for (m, family) in [(1, InputFamily::Bloch), (1, InputFamily::Ghz), (2, InputFamily::Ghz), (3, InputFamily::Trivial)] {
        for row in certify::threshold_table(m, family, ThresholdSource::PaperConstant).unwrap() {
            let mdl = model(row.adversary, row.criterion, ThresholdSource::PaperConstant);
            let d = certify::decide(1.0, &mdl, m, family).unwrap();
            assert_eq!(d.verdict, Verdict::Issue, "{:?}", row);
            assert_eq!(d.certificate, row.adversary.certificate());
        }
    }
}

#[test]
fn honest_model_compares_at_least_perfect() {
    let d = certify::decide(1.0, &AdversaryModel::pointwise(Adversary::Honest), 2, InputFamily::Ghz).unwrap();
    assert_eq!(d.comparison, Comparison::AtLeastPerfect);
    assert_eq!(d.verdict, Verdict::Issue);
    let d = certify::decide(0.99, &AdversaryModel::pointwise(Adversary::Honest), 2, InputFamily::Ghz).unwrap();
    assert_eq!(d.verdict, Verdict::Deny);
    let d = certify::decide(0.9, &AdversaryModel::pointwise(Adversary::CheatingA), 2, InputFamily::Ghz).unwrap();
    assert_eq!(d.comparison, Comparison::StrictGreater);
}

#[test]
fn decision_serializes_with_provenance() {
    let d = certify::decide(0.55, &AdversaryModel::pointwise(Adversary::CheatingA), 1, InputFamily::Ghz).unwrap();
    let v = serde_json::to_value(&d).unwrap();
    assert_eq!(v["certificate"], 3);
    assert_eq!(v["verdict"], "issue");
    assert_eq!(v["criterion"], "pointwise");
    assert_eq!(v["source"], "paper_constant");
    assert!(!v["provenance"].as_str().unwrap().is_empty());
}

fn any_model() -> impl Strategy<Value = (AdversaryModel, usize, InputFamily)> {
    let adv = prop::sample::select(Adversary::ALL.to_vec());
    let crit = prop::sample::select(Criterion::ALL.to_vec());
    let ctx = prop::sample::select(vec![(1, InputFamily::Bloch), (1, InputFamily::Ghz), (2, InputFamily::Ghz), (2, InputFamily::Trivial)]);
    (adv, crit, ctx).prop_filter_map("criterion not applicable", |(a, c, (m, fam))| {
        let mdl = AdversaryModel::new(a, c, ThresholdSource::PaperConstant);
        certify::threshold_for(&mdl, m, fam).ok().map(|_| (mdl, m, fam))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn decisions_are_monotone((mdl, m, fam) in any_model(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let d_lo = certify::decide(lo, &mdl, m, fam).unwrap();
        let d_hi = certify::decide(hi, &mdl, m, fam).unwrap();
        if d_lo.verdict == Verdict::Issue {
            prop_assert_eq!(d_hi.verdict, Verdict::Issue);
        }
    }
}
