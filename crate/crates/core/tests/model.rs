use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlbsp::texture::OperatorKind;
use rlbsp::{BackgroundModel, Frame, Mask, ModelParams, Operator, PixelSample, Subtractor};

fn noisy(rng: &mut ChaCha8Rng, w: usize, h: usize, base: u8) -> Frame {
    Frame::from_fn(w, h, |_, _| base.saturating_add(rng.random_range(0..20)))
}

fn frames(seed: u64, count: usize) -> Vec<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|t| {
            let mut f = noisy(&mut rng, 24, 18, 100);
            if t > 2 {
                for y in 5..11 {
                    for x in t..t + 6 {
                        f.set(x.min(23), y, 230);
                    }
                }
            }
            f
        })
        .collect()
}

fn run(op: Operator, params: ModelParams, seed: u64, input: &[Frame]) -> Vec<Mask> {
    let mut s = Subtractor::new(op, params, seed).unwrap();
    input.iter().map(|f| s.process(f).unwrap()).collect()
}

fn describe(f: &Frame) -> rlbsp::DescriptorImage {
    Operator::default().describe_frame(f).unwrap()
}

#[test]
fn same_seed_same_masks() {
    let input = frames(1, 12);
    for kind in OperatorKind::ALL {
        let a = run(kind.with_defaults(), ModelParams::default(), 9, &input);
        let b = run(kind.with_defaults(), ModelParams::default(), 9, &input);
        assert_eq!(a, b, "{kind}");
    }
}

#[test]
fn first_mask_is_background() {
    let input = frames(2, 3);
    let masks = run(Operator::default(), ModelParams::default(), 1, &input);
    assert_eq!(masks[0].foreground_count(), 0);
}

#[test]
fn constant_sequence_stays_background() {
    let input = vec![Frame::filled(16, 12, 77); 10];
    let masks = run(Operator::default(), ModelParams::default(), 3, &input);
    assert!(masks.iter().all(|m| m.foreground_count() == 0));
}

#[test]
fn classify_equals_full_count() {
    let input = frames(3, 2);
    let params = ModelParams {
        samples: 12,
        ..ModelParams::default()
    };
    let model = BackgroundModel::init(&input[0], &describe(&input[0]), &params, 5).unwrap();
    let desc = describe(&input[1]);
    let mask = model.classify(&input[1], &desc, &params).unwrap();
    let (w, h) = input[1].dims();
    for y in 0..h {
        for x in 0..w {
            let observed = PixelSample {
                intensity: input[1].get(x, y),
                descriptor: desc.get(x, y),
            };
            let hits = model
                .samples(x, y)
                .iter()
                .filter(|s| s.matches(&observed, &params))
                .count();
            assert_eq!(mask.is_foreground(y * w + x), hits < params.min_matches);
        }
    }
}

#[test]
fn matching_is_strict_in_both_radii() {
    let params = ModelParams::default();
    let base = PixelSample {
        intensity: 100,
        descriptor: rlbsp::Descriptor16(0),
    };
    let at = |di: u8, bits: u16| PixelSample {
        intensity: 100 + di,
        descriptor: rlbsp::Descriptor16(bits),
    };
    assert!(base.matches(&at(14, 0b1111), &params));
    assert!(!base.matches(&at(15, 0), &params));
    assert!(!base.matches(&at(0, 0b11111), &params));
}

#[test]
fn wider_radii_never_add_foreground() {
    let input = frames(4, 2);
    let tight = ModelParams {
        color_radius: 8,
        texture_radius: 3,
        ..ModelParams::default()
    };
    let loose = ModelParams {
        color_radius: 30,
        texture_radius: 9,
        ..ModelParams::default()
    };
    let model = BackgroundModel::init(&input[0], &describe(&input[0]), &tight, 5).unwrap();
    let desc = describe(&input[1]);
    let a = model.classify(&input[1], &desc, &tight).unwrap();
    let b = model.classify(&input[1], &desc, &loose).unwrap();
    for i in 0..a.as_frame().data().len() {
        assert!(!b.is_foreground(i) || a.is_foreground(i));
    }
}

#[test]
fn init_draws_from_the_neighborhood() {
    let frame = Frame::from_fn(10, 9, |x, y| (y * 10 + x) as u8);
    let params = ModelParams::default();
    let model = BackgroundModel::init(&frame, &describe(&frame), &params, 1).unwrap();
    for y in 0..9 {
        for x in 0..10 {
            let allowed: HashSet<u8> = (-1..=1)
                .flat_map(|dy| (-1..=1).map(move |dx| (dx, dy)))
                .map(|(dx, dy)| frame.get_clamped(x as isize + dx, y as isize + dy))
                .collect();
            let bank = model.samples(x, y);
            assert_eq!(bank.len(), 50);
            assert!(bank.iter().all(|s| allowed.contains(&s.intensity)));
        }
    }
}

#[test]
fn updates_only_write_observed_values() {
    // Each frame is constant with its own value, so every stored intensity
    // identifies the frame it came from.
    let params = ModelParams {
        subsampling: 2,
        ..ModelParams::default()
    };
    let first = Frame::filled(12, 10, 10);
    let mut model = BackgroundModel::init(&first, &describe(&first), &params, 2).unwrap();
    let mut seen = HashSet::from([10u8]);
    for v in [11u8, 12, 13, 14, 15] {
        let f = Frame::filled(12, 10, v);
        let d = describe(&f);
        let mask = model.classify(&f, &d, &params).unwrap();
        model.update(&f, &d, &mask, &params).unwrap();
        seen.insert(v);
    }
    let mut fresh = 0;
    for y in 0..10 {
        for x in 0..12 {
            let bank = model.samples(x, y);
            assert_eq!(bank.len(), 50);
            assert!(bank.iter().all(|s| seen.contains(&s.intensity)));
            fresh += bank.iter().filter(|s| s.intensity != 10).count();
        }
    }
    assert!(fresh > 0);
}

#[test]
fn foreground_everywhere_freezes_the_model() {
    let params = ModelParams {
        subsampling: 1,
        ..ModelParams::default()
    };
    let first = Frame::filled(10, 10, 50);
    let mut model = BackgroundModel::init(&first, &describe(&first), &params, 2).unwrap();
    let before: Vec<_> = (0..100).map(|i| model.samples(i % 10, i / 10).to_vec()).collect();
    let f = Frame::filled(10, 10, 200);
    let all_fg = Mask::from_frame(Frame::filled(10, 10, 255)).unwrap();
    model.update(&f, &describe(&f), &all_fg, &params).unwrap();
    let after: Vec<_> = (0..100).map(|i| model.samples(i % 10, i / 10).to_vec()).collect();
    assert_eq!(before, after);
}

#[test]
fn snapshot_resume_matches_uninterrupted_run() {
    let input = frames(5, 10);
    let params = ModelParams::default();
    let full = run(Operator::default(), params, 4, &input);

    let mut s = Subtractor::new(Operator::default(), params, 4).unwrap();
    for f in &input[..5] {
        s.process(f).unwrap();
    }
    let mut bytes = Vec::new();
    s.model().unwrap().write_snapshot(&mut bytes).unwrap();
    let model = BackgroundModel::read_snapshot(bytes.as_slice()).unwrap();
    assert_eq!(&model, s.model().unwrap());
    let mut resumed = Subtractor::with_model(Operator::default(), params, model).unwrap();
    let tail: Vec<_> = input[5..].iter().map(|f| resumed.process(f).unwrap()).collect();
    assert_eq!(tail, full[5..]);
}

#[test]
fn rejects_bad_inputs() {
    assert!(Subtractor::new(
        Operator::default(),
        ModelParams {
            min_matches: 0,
            ..ModelParams::default()
        },
        1
    )
    .is_err());
    let mut s = Subtractor::new(Operator::default(), ModelParams::default(), 1).unwrap();
    assert!(s.process(&Frame::filled(6, 6, 1)).is_err());
    s.process(&Frame::filled(8, 8, 1)).unwrap();
    assert!(matches!(
        s.process(&Frame::filled(9, 8, 1)),
        Err(rlbsp::Error::DimensionMismatch { .. })
    ));
}
