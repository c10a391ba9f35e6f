mod common;

use common::*;
use msd_core::curation::{motion_quality, plan_segments, split_all, video_quality, FilterConfig};
use msd_core::keyframe::sample_keyframes;
use msd_core::{body18, PersonDetection, PoseFrame, PoseTrack};
use proptest::prelude::*;

fn arb_person() -> impl Strategy<Value = PersonDetection> {
    prop::collection::vec((0.0f64..640.0, 0.0f64..480.0, 0.0f64..1.0), body18::COUNT)
        .prop_map(|pts| person(&pts, [0.0, 0.0, 640.0, 480.0]))
}

fn arb_track() -> impl Strategy<Value = PoseTrack> {
    let frame = prop_oneof![
        8 => arb_person().prop_map(|p| vec![p]),
        1 => Just(vec![]),
        1 => (arb_person(), arb_person()).prop_map(|(a, b)| vec![a, b]),
    ];
    (prop::collection::vec(frame, 1..=60), prop_oneof![Just(1.0), Just(2.0), Just(5.0), Just(7.5), Just(30.0)])
        .prop_map(|(persons, fps)| {
            let frames = persons.into_iter().enumerate().map(|(i, p)| PoseFrame { index: i as u64, persons: p }).collect();
            track(frames, fps)
        })
}

/// Direct evaluation of the selection objectives over a full distance table.
fn oracle(track: &PoseTrack) -> Option<Vec<u64>> {
    let singles: Vec<(u64, &PersonDetection)> =
        track.frames.iter().filter(|f| f.persons.len() == 1).map(|f| (f.index, &f.persons[0])).collect();
    if singles.is_empty() {
        return None;
    }
    let n = singles.len();
    let dist = |a: &PersonDetection, b: &PersonDetection| {
        let mut sq = 0.0;
        let mut shared = 0usize;
        for k in 0..body18::COUNT {
            let (p, q) = (a.keypoints[k], b.keypoints[k]);
            if p.confidence > 0.5 && q.confidence > 0.5 {
                sq += (p.x - q.x).powi(2) + (p.y - q.y).powi(2);
                shared += 1;
            }
        }
        if shared == 0 { 0.0 } else { f64::sqrt(sq) / shared as f64 }
    };
    let table: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| dist(singles[i].1, singles[j].1)).collect()).collect();

    let k = ((track.frames.len() as f64 / track.fps).ceil() as usize).max(1);
    let mut bounds = Vec::new();
    for s in 0..k {
        let lo = s * (n / k) + s.min(n % k);
        let hi = (s + 1) * (n / k) + (s + 1).min(n % k);
        bounds.push(lo..hi);
    }
    let mut picks: Vec<usize> = Vec::new();
    for (s, range) in bounds.into_iter().enumerate() {
        if range.is_empty() {
            continue;
        }
        let objective = |j: usize| {
            if s == 0 { range.clone().map(|i| table[j][i]).sum::<f64>() } else { table[j][*picks.last().unwrap()] }
        };
        let best = range.clone().fold(range.start, |b, j| if objective(j) > objective(b) { j } else { b });
        picks.push(best);
    }
    Some(picks.into_iter().map(|j| singles[j].0).collect())
}

fn transformed(track: &PoseTrack, angle: f64, tx: f64, ty: f64) -> PoseTrack {
    let (sin, cos) = angle.sin_cos();
    let frames = track
        .frames
        .iter()
        .map(|f| {
            let mut f = f.clone();
            for p in &mut f.persons {
                for k in &mut p.keypoints {
                    let (x, y) = (k.x, k.y);
                    k.x = cos * x - sin * y + tx;
                    k.y = sin * x + cos * y + ty;
                }
            }
            f
        })
        .collect();
    track.with_frames(frames)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn keyframes_match_exhaustive_oracle(t in arb_track()) {
        match oracle(&t) {
            None => prop_assert!(sample_keyframes(&t).is_err()),
            Some(expected) => {
                let got: Vec<u64> = sample_keyframes(&t).unwrap().iter().map(|k| k.frame_index).collect();
                prop_assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn keyframes_ignore_rigid_motion(t in arb_track(), angle in 0.0f64..std::f64::consts::TAU, tx in -500.0f64..500.0, ty in -500.0f64..500.0) {
        let a = sample_keyframes(&t);
        let b = sample_keyframes(&transformed(&t, angle, tx, ty));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let fa: Vec<u64> = a.iter().map(|k| k.frame_index).collect();
                let fb: Vec<u64> = b.iter().map(|k| k.frame_index).collect();
                prop_assert_eq!(fa, fb);
            }
            (a, b) => prop_assert!(a.is_err() && b.is_err()),
        }
    }

    #[test]
    fn keyframe_count_and_order(t in arb_track()) {
        if let Ok(ks) = sample_keyframes(&t) {
            let segments = (t.frames.len() as f64 / t.fps).ceil() as usize;
            prop_assert!(ks.len() <= segments);
            prop_assert!(ks.windows(2).all(|w| w[0].segment_index < w[1].segment_index && w[0].frame_index < w[1].frame_index));
        }
    }

    #[test]
    fn motion_quality_ignores_scale_and_translation(
        grid in prop::collection::vec(prop::collection::vec((0u32..6400, 0u32..4800, any::<bool>()), body18::COUNT), 2..20),
        scale_pow in -3i32..4,
        tx in -1000i32..1000,
        ty in -1000i32..1000,
    ) {
        // dyadic coordinates keep every transform exact
        let build = |s: f64, dx: f64, dy: f64| {
            let frames = grid.iter().enumerate().map(|(i, pts)| {
                let pts: Vec<(f64, f64, f64)> = pts.iter()
                    .map(|&(x, y, v)| (x as f64 / 64.0 * s + dx, y as f64 / 64.0 * s + dy, if v { 0.9 } else { 0.1 }))
                    .collect();
                frame(i as u64, vec![person(&pts, [dx, dy, 100.0 * s + dx, 75.0 * s + dy])])
            }).collect();
            track(frames, 25.0)
        };
        let cfg = FilterConfig::default();
        let base = motion_quality(&build(1.0, 0.0, 0.0), &cfg);
        let moved = motion_quality(&build(2f64.powi(scale_pow), tx as f64, ty as f64), &cfg);
        prop_assert_eq!(base, moved);
    }

    #[test]
    fn segments_tile_the_track(n in 0usize..2000, fps in prop_oneof![Just(1.0), Just(12.5), Just(24.0), Just(29.97), Just(60.0)]) {
        let plan = plan_segments(n, fps, &FilterConfig::default());
        let mut next = 0;
        for (range, _) in &plan {
            prop_assert_eq!(range.start, next);
            next = range.end;
        }
        prop_assert_eq!(next, n);
    }

    #[test]
    fn verdict_pass_is_conjunction(t in arb_track()) {
        let cfg = FilterConfig::default();
        for v in [video_quality(&t, &cfg), motion_quality(&t, &cfg)] {
            prop_assert_eq!(v.pass, v.criteria.values().all(|c| c.pass));
        }
    }
}

fn mostly_single(single: usize, total: usize) -> PoseTrack {
    let p = person(&standing(), STANDING_BOX);
    let frames = (0..total)
        .map(|i| frame(i as u64, if i < single { vec![p.clone()] } else { vec![p.clone(), p.clone()] }))
        .collect();
    track(frames, 25.0)
}

#[test]
fn single_person_ratio_boundary() {
    let cfg = FilterConfig::default();
    let pass = |s| video_quality(&mostly_single(s, 100), &cfg).criterion("single_person_ratio").unwrap().pass;
    assert!(!pass(89));
    assert!(pass(90));
    assert!(pass(91));
}

#[test]
fn twenty_five_second_split() {
    let t = PoseTrack { fps: 10.0, ..mostly_single(250, 250) };
    let segs = split_all(&t, &FilterConfig::default());
    let secs: Vec<f64> = segs.iter().map(|s| s.track.duration_seconds()).collect();
    assert_eq!(secs, vec![10.0, 10.0, 5.0]);
    assert!(segs.iter().all(|s| s.retained));
}

#[test]
fn short_clip_is_discarded() {
    let t = PoseTrack { fps: 10.0, ..mostly_single(15, 15) };
    let segs = split_all(&t, &FilterConfig::default());
    assert_eq!(segs.len(), 1);
    assert!(!segs[0].retained);
}

#[test]
fn static_track_fails_and_oscillation_passes() {
    let cfg = FilterConfig::default();
    let still = person(&standing(), STANDING_BOX);
    let static_track = track((0..50).map(|i| frame(i, vec![still.clone()])).collect(), 25.0);
    assert!(!motion_quality(&static_track, &cfg).pass);

    let moved: Vec<usize> = body18::ARMS.iter().chain(&body18::LEGS).copied().collect();
    let swing = person(&shifted(&standing(), &moved, 10.0), STANDING_BOX);
    let oscillating = track(
        (0..50).map(|i| frame(i, vec![if i % 2 == 0 { still.clone() } else { swing.clone() }])).collect(),
        25.0,
    );
    let v = motion_quality(&oscillating, &cfg);
    assert!(v.pass);
    assert_eq!(v.criterion("movement_frame_ratio").unwrap().measured, 1.0);
}
