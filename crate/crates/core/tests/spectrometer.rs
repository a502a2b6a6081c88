use qcomb_core::biphoton::*;
use qcomb_core::interference::*;
use qcomb_core::io::{read_events, write_events, Header};
use qcomb_core::spectrometer::*;

fn ideal() -> Channel {
    Channel { map: DispersionMap::default(), detector: DetectorSpec::ideal() }
}

fn jittered(ps: f64) -> Channel {
    Channel { map: DispersionMap::default(), detector: DetectorSpec { jitter_fwhm_ps: ps, ..DetectorSpec::ideal() } }
}

fn figure_csi(tau: f64) -> CsiGrid {
    csi(&figure_source().assemble(default_axis()).unwrap(), tau).unwrap()
}

fn run(c: &CsiGrid, n: usize, ch: &Channel, seed: u64) -> EventBatch {
    let p = sample_pairs(c, n, seed).unwrap();
    simulate_events(&p, [ch, ch], TRIGGER_PERIOD_NS, seed + 1).unwrap()
}

#[test]
fn reconstruction_converges_with_sample_count() {
    let c = figure_csi(1.07);
    let ch = ideal();
    let bins = UniformBins::from_axis(c.axis(), 8).unwrap();
    let reference = binned_csi(&c, 8).unwrap();
    let l2: Vec<f64> = [10_000, 100_000, 1_000_000]
        .iter()
        .map(|&n| {
            let h = reconstruct_csi_histogram(&run(&c, n, &ch, 1), [&ch, &ch], bins, bins);
            relative_l2(&h.probabilities(), &reference).unwrap()
        })
        .collect();
    assert!(l2[0] > l2[1] && l2[1] > l2[2], "{l2:?}");
    assert!(l2[2] < 0.05, "{l2:?}");
    // shot noise: roughly √10 per decade
    assert!(l2[0] / l2[2] > 5.0, "{l2:?}");
}

#[test]
fn every_coincidence_is_binned_or_dropped() {
    let c = figure_csi(0.53);
    let ch = ideal();
    let b = run(&c, 50_000, &ch, 3);
    let bins = UniformBins::from_axis(c.axis(), 4).unwrap();
    let h = reconstruct_csi_histogram(&b, [&ch, &ch], bins, bins);
    assert_eq!(h.total() + h.dropped, b.coincidence_count() as u64);
    let narrow = UniformBins::centered(20.0, 500.0).unwrap();
    let toa = toa_histogram(&b, narrow);
    assert_eq!(toa.total() + toa.dropped, b.coincidence_count() as u64);
}

#[test]
fn jittered_toa_matches_blurred_prediction() {
    let c = figure_csi(1.07);
    let ch = jittered(80.0);
    let b = run(&c, 1_000_000, &ch, 5);
    let bins = UniformBins::centered(20.0, 10_000.0).unwrap();
    let s = ch.detector.jitter_sigma_ns() * 1e3;
    let predicted = analytic_toa(&c, [&ch, &ch], bins, [s, s]).unwrap();
    let l2 = relative_l2(&toa_histogram(&b, bins).probabilities(), &predicted).unwrap();
    assert!(l2 < 0.05, "{l2}");
}

#[test]
fn detector_efficiency_multiplies() {
    let c = figure_csi(0.53);
    let ch = Channel { detector: DetectorSpec { efficiency: 0.5, ..DetectorSpec::ideal() }, ..ideal() };
    let n = 200_000;
    let k = run(&c, n, &ch, 7).coincidence_count() as f64;
    let sigma = (n as f64 * 0.25 * 0.75).sqrt();
    assert!((k - 0.25 * n as f64).abs() < 4.0 * sigma, "{k}");
}

#[test]
fn exchanging_channels_transposes_the_map() {
    let c = figure_csi(1.07);
    let ch = ideal();
    let b = run(&c, 100_000, &ch, 9);
    let bins = UniformBins::from_axis(c.axis(), 8).unwrap();
    let h = reconstruct_csi_histogram(&b, [&ch, &ch], bins, bins);
    let m = reconstruct_csi_histogram(&b.mirrored(), [&ch, &ch], bins, bins);
    for i in 0..bins.n {
        for j in 0..bins.n {
            assert_eq!(h.get(i, j), m.get(j, i));
        }
    }
}

#[test]
fn jitter_blurs_reconstructed_comb() {
    let c = figure_csi(2.0);
    let bins = UniformBins::from_axis(c.axis(), 2).unwrap();
    let period = 1.0 / 2.0;
    let contrast = |ch: &Channel| {
        let h = reconstruct_csi_histogram(&run(&c, 400_000, ch, 11), [ch, ch], bins, bins);
        let (x, y) = h.difference_profile().unwrap();
        comb_contrast(&x, &y, period).unwrap()
    };
    let sharp = contrast(&ideal());
    let blurred = contrast(&jittered(50.0));
    assert!(blurred < sharp, "{blurred} vs {sharp}");
}

#[test]
fn resolved_toa_comb_at_two_ps() {
    let c = figure_csi(2.0);
    let ch = ideal();
    let b = run(&c, 1_000_000, &ch, 1);
    let bins = UniformBins::centered(20.0, 10_000.0).unwrap();
    let toa = toa_histogram(&b, bins);
    let period = toa_tooth_period_ps(&ch.map, c.axis().center(), 2.0);
    let y: Vec<f64> = toa.counts.iter().map(|&v| v as f64).collect();
    let sep = (0.5 * period / bins.width).floor() as usize;
    let peaks = find_peaks(&y, &bins.centers(), DEFAULT_PEAK_THRESHOLD, sep).unwrap();
    assert!((peaks.count() as i64 - 14).abs() <= 1, "{}", peaks.count());
}

#[test]
fn toa_is_twice_as_wide_as_one_channel() {
    let c = figure_csi(1.07);
    let ch = ideal();
    let b = run(&c, 1_000_000, &ch, 13);
    let toa = toa_histogram(&b, UniformBins::centered(20.0, 10_000.0).unwrap());
    let arrival = arrival_histogram(&b, 1, UniformBins::new(0.0, 20.0, 660).unwrap());
    let ratio = toa.full_width(0.05).unwrap() / arrival.full_width(0.05).unwrap();
    assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
}

#[test]
fn batches_are_reproducible_and_round_trip() {
    let c = figure_csi(0.53);
    let ch = Channel::default();
    let a = run(&c, 70_000, &ch, 21);
    assert_eq!(a, run(&c, 70_000, &ch, 21));
    let mut buf = Vec::new();
    write_events(&mut buf, &Header::new(), &a).unwrap();
    let back = read_events(&buf[..]).unwrap();
    assert_eq!(back.records, a.records);
    assert_eq!((back.seed, back.triggers), (a.seed, a.triggers));
}
