use proptest::prelude::*;

use streamkg::sampler::{clip_count, Frame, Sampler};

fn emitted(frames: u64, window: usize, hop: usize) -> Vec<(u64, u64)> {
    let mut s = Sampler::new(window, Some(hop)).unwrap();
    (0..frames)
        .filter_map(|i| s.push(Frame::new(i, 30.0, "")).unwrap())
        .map(|c| {
            assert_eq!(c.len(), window);
            assert!(c.frames().windows(2).all(|w| w[1].index == w[0].index + 1));
            (c.start_index(), c.end_index())
        })
        .collect()
}

#[test]
fn emission_count_matches_formula_exhaustively() {
    for window in 2..=40usize {
        for hop in 1..=window {
            let mut s = Sampler::new(window, Some(hop)).unwrap();
            let mut count = 0u64;
            for f in 0..=200u64 {
                assert_eq!(
                    count,
                    clip_count(f, window as u64, hop as u64),
                    "F={f} L={window} hop={hop}"
                );
                if f < 200 && s.push(Frame::new(f, 30.0, "")).unwrap().is_some() {
                    count += 1;
                }
            }
        }
    }
}

#[test]
fn half_overlap_on_105_frames() {
    let clips = emitted(105, 30, 15);
    assert_eq!(clips.len(), 6);
    assert_eq!(clips.last(), Some(&(75, 104)));
}

proptest! {
    #[test]
    fn consecutive_clips_overlap_by_window_minus_hop(
        window in 2usize..40, hop_frac in 0.0f64..1.0, frames in 0u64..300
    ) {
        let hop = 1 + ((window - 1) as f64 * hop_frac) as usize;
        let clips = emitted(frames, window, hop);
        for w in clips.windows(2) {
            prop_assert_eq!(w[1].0 - w[0].0, hop as u64);
            let overlap = (w[0].1 + 1).saturating_sub(w[1].0);
            prop_assert_eq!(overlap, (window - hop) as u64);
        }
        if let Some(first) = clips.first() {
            prop_assert_eq!(*first, (0, window as u64 - 1));
        }
    }

    #[test]
    fn half_hop_covers_interior_twice(half in 1usize..20, extra in 0u64..10) {
        let window = 2 * half;
        let hop = half;
        // a fully consumed stream ends exactly on a clip boundary
        let frames = window as u64 + extra * hop as u64;
        let clips = emitted(frames, window, hop);
        for f in 0..frames {
            let cover = clips.iter().filter(|(s, e)| *s <= f && f <= *e).count();
            let interior = f >= hop as u64 && f + (hop as u64) < frames;
            prop_assert_eq!(cover, if interior { 2 } else { 1 }, "frame {}", f);
        }
    }

    #[test]
    fn gap_restarts_the_window(window in 2usize..20, before in 0u64..40, after in 0u64..40) {
        let mut s = Sampler::new(window, None).unwrap();
        let mut starts = Vec::new();
        for i in (0..before).chain(1000..1000 + after) {
            match s.push(Frame::new(i, 30.0, "")) {
                Ok(Some(c)) => starts.push(c.start_index()),
                Ok(None) => {}
                Err(_) => prop_assert_eq!(i, 1000),
            }
        }
        let post: Vec<_> = starts.iter().filter(|&&x| x >= 1000).collect();
        prop_assert_eq!(post.len() as u64, clip_count(after, window as u64, s.hop() as u64));
    }
}
