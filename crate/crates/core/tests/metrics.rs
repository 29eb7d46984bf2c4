use proptest::prelude::*;
use rlbsp::imageio::TemporalWindow;
use rlbsp::metrics::{aggregate, aggregate_counts, compute, format_value, Averaging};
use rlbsp::{ConfusionCounts, Frame, GroundTruthFrame, Mask, MetricsReport};

fn mask(w: usize, values: &[u8]) -> Mask {
    Mask::from_frame(Frame::new(w, values.len() / w, values.to_vec()).unwrap()).unwrap()
}

fn gt(w: usize, labels: &[u8]) -> GroundTruthFrame {
    GroundTruthFrame::new(w, labels.len() / w, labels.to_vec()).unwrap()
}

fn counts_of(m: &Mask, g: &GroundTruthFrame) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    c.accumulate(m, g, None, None, 1).unwrap();
    c
}

#[test]
fn label_rules() {
    let c = counts_of(&mask(2, &[255, 255, 0, 255]), &gt(2, &[255, 0, 50, 170]));
    assert_eq!(c, ConfusionCounts::new(1, 1, 1, 0));
    let c = counts_of(&mask(2, &[255, 0, 0, 255]), &gt(2, &[170; 4]));
    assert_eq!(c.total(), 0);
}

#[test]
fn roi_and_window_exclusions() {
    let m = mask(2, &[255, 255, 255, 255]);
    let g = gt(2, &[255, 255, 0, 0]);
    let roi = Frame::new(2, 2, vec![255, 0, 255, 0]).unwrap();
    let mut c = ConfusionCounts::default();
    c.accumulate(&m, &g, Some(&roi), None, 1).unwrap();
    assert_eq!(c, ConfusionCounts::new(1, 1, 0, 0));
    let w = TemporalWindow::new(5, 9).unwrap();
    c.accumulate(&m, &g, None, Some(w), 4).unwrap();
    c.accumulate(&m, &g, None, Some(w), 10).unwrap();
    assert_eq!(c.total(), 2);
    c.accumulate(&m, &g, None, Some(w), 5).unwrap();
    assert_eq!(c.total(), 6);
    assert!(c.accumulate(&mask(1, &[0, 0, 0, 0]), &g, None, None, 1).is_err());
}

#[test]
fn worked_example() {
    let r = compute(&ConfusionCounts::new(50, 10, 915, 25));
    let shown: Vec<String> = r.values().iter().map(|&v| format_value(v)).collect();
    assert_eq!(
        shown,
        ["0.6667", "0.9892", "0.0108", "0.3333", "3.5000", "0.8333", "0.7407"]
    );
    let z = compute(&ConfusionCounts::new(0, 0, 100, 0));
    assert_eq!(
        (z.recall, z.precision, z.fmeasure, z.specificity, z.pwc),
        (0.0, 0.0, 0.0, 1.0, 0.0)
    );
    assert_eq!(compute(&ConfusionCounts::default()).values(), [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn two_level_mean() {
    let rep = |fm| MetricsReport { fmeasure: fm, ..MetricsReport::default() };
    let t = aggregate(&[
        ("a".into(), rep(0.8)),
        ("a".into(), rep(0.6)),
        ("b".into(), rep(0.1)),
    ])
    .unwrap();
    assert!((t.categories[0].1.fmeasure - 0.7).abs() < 1e-12);
    assert!((t.overall.fmeasure - 0.4).abs() < 1e-12);
    assert!(aggregate(&[]).is_err());

    let one = ConfusionCounts::new(3, 1, 5, 2);
    let t = aggregate_counts(&[("x".into(), one)], Averaging::MeanOfSequences).unwrap();
    assert_eq!(t.categories[0].1, compute(&one));
    let p = aggregate_counts(
        &[("x".into(), one), ("x".into(), ConfusionCounts::new(0, 4, 1, 0))],
        Averaging::Pooled,
    )
    .unwrap();
    assert_eq!(p.overall, compute(&ConfusionCounts::new(3, 5, 6, 2)));
}

#[test]
fn csv_layout() {
    let t = aggregate_counts(
        &[("baseline".into(), ConfusionCounts::new(50, 10, 915, 25))],
        Averaging::MeanOfSequences,
    )
    .unwrap();
    assert_eq!(
        t.to_csv(),
        "category,recall,specificity,fpr,fnr,pwc,precision,fmeasure\n\
         baseline,0.6667,0.9892,0.0108,0.3333,3.5000,0.8333,0.7407\n\
         overall,0.6667,0.9892,0.0108,0.3333,3.5000,0.8333,0.7407\n"
    );
    // Exact binary ties.
    assert_eq!(format_value(1.0 / 32.0), "0.0312");
    assert_eq!(format_value(3.0 / 32.0), "0.0938");
}

fn counts() -> impl Strategy<Value = ConfusionCounts> {
    (0u64..10_000, 0u64..10_000, 0u64..10_000, 0u64..10_000)
        .prop_map(|(a, b, c, d)| ConfusionCounts::new(a, b, c, d))
}

proptest! {
    #[test]
    fn complements_and_ranges(c in counts()) {
        let r = compute(&c);
        if c.tp + c.fn_ > 0 {
            prop_assert!((r.recall + r.fnr - 1.0).abs() < 1e-12);
        }
        if c.fp + c.tn > 0 {
            prop_assert!((r.specificity + r.fpr - 1.0).abs() < 1e-12);
        }
        for v in [r.recall, r.specificity, r.fpr, r.fnr, r.precision, r.fmeasure] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!((0.0..=100.0).contains(&r.pwc));
        if r.precision > 0.0 && r.recall > 0.0 {
            let lo = r.precision.min(r.recall);
            let hi = r.precision.max(r.recall);
            prop_assert!(lo - 1e-12 <= r.fmeasure && r.fmeasure <= hi + 1e-12);
        }
    }

    #[test]
    fn scale_free(c in counts(), k in 1u64..50) {
        let a = compute(&c).values();
        let b = compute(&ConfusionCounts::new(c.tp * k, c.fp * k, c.tn * k, c.fn_ * k)).values();
        for (x, y) in a.iter().zip(b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn additive_and_excluded_labels_neutral(
        labels in prop::collection::vec(prop::sample::select(vec![0u8, 50, 85, 170, 255]), 32),
        a in prop::collection::vec(any::<bool>(), 32),
        b in prop::collection::vec(any::<bool>(), 32),
    ) {
        let g = gt(8, &labels);
        let ma = mask(8, &a.iter().map(|&f| if f { 255 } else { 0 }).collect::<Vec<_>>());
        let mb = mask(8, &b.iter().map(|&f| if f { 255 } else { 0 }).collect::<Vec<_>>());
        let mut both = ConfusionCounts::default();
        both.accumulate(&ma, &g, None, None, 0).unwrap();
        both.accumulate(&mb, &g, None, None, 1).unwrap();
        prop_assert_eq!(both, counts_of(&ma, &g) + counts_of(&mb, &g));

        let flipped: Vec<u8> = a
            .iter()
            .zip(&labels)
            .map(|(&f, &l)| {
                let f = if l == 85 || l == 170 { !f } else { f };
                if f { 255 } else { 0 }
            })
            .collect();
        prop_assert_eq!(counts_of(&mask(8, &flipped), &g), counts_of(&ma, &g));
    }
}
