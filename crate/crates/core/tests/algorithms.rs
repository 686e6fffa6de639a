mod common;

use common::{argmax, constructed, vowel_template};
use ssi_vtl::axis::{hz_to_erbn, hz_to_mel};
use ssi_vtl::frontends::gammatone_ep;
use ssi_vtl::pipeline::weight_spectrum;
use ssi_vtl::spectrum::{center_average, center_average_mid, resample_to_axis};
use ssi_vtl::synth::{synth_vowel, VowelSpec};
use ssi_vtl::vtl::{build_shift_matrix, channel_shift_to_ratio, relative_shifts, xcorr_shift};
use ssi_vtl::{make_axis, AxisKind, Compression, FrequencyAxis, Spectrum, Vowel};

#[test]
fn three_template_shifts_compose() {
    let spectra: Vec<_> = [0.0, 2.0, 5.0].iter().map(|d| constructed(vowel_template, *d)).collect();
    let m = build_shift_matrix(&spectra, 30, 10).unwrap();
    assert_eq!((m.get(0, 1), m.get(0, 2), m.get(1, 2)), (2.0, 5.0, 3.0));
    let s = relative_shifts(&m);
    for (got, want) in s.iter().zip([-7.0 / 3.0, -1.0 / 3.0, 8.0 / 3.0]) {
        assert!((got - want).abs() < 1e-9, "{s:?}");
    }
}

#[test]
fn identical_spectra_give_zero_matrix() {
    let spectra = vec![constructed(vowel_template, 1.3); 4];
    let m = build_shift_matrix(&spectra, 30, 10).unwrap();
    assert!(m.rows().iter().flatten().all(|v| *v == 0.0));
    assert!(relative_shifts(&m).iter().all(|v| *v == 0.0));
}

#[test]
fn half_channel_shift() {
    let a = constructed(vowel_template, 0.0);
    for d in [0.5, -0.5, 3.5, -7.5] {
        let got = xcorr_shift(&a, &constructed(vowel_template, d), 30, 10).unwrap();
        assert!((got - d).abs() <= 0.1 + 1e-9, "{d}: {got}");
    }
}

#[test]
fn axes_are_uniform_in_their_native_coordinate() {
    for kind in [AxisKind::ErbLinear, AxisKind::Log10Hz, AxisKind::MelLinear, AxisKind::LinearHz] {
        let axis = make_axis(kind, 100, 100.0, 8000.0).unwrap();
        let c = axis.centers();
        assert!(c.windows(2).all(|w| w[0] < w[1]), "{kind}");
        let native: Vec<f64> = c.iter().map(|f| kind.to_native(*f)).collect();
        let steps: Vec<f64> = native.windows(2).map(|w| w[1] - w[0]).collect();
        let mean = steps.iter().sum::<f64>() / steps.len() as f64;
        assert!(steps.iter().all(|s| (s - mean).abs() < 1e-9 * mean), "{kind}");
    }
}

#[test]
fn formula_spot_values() {
    assert!((hz_to_mel(1000.0) - 1000.0).abs() < 0.1);
    let e = hz_to_erbn(1000.0).unwrap();
    assert!((e - 15.62).abs() < 0.01, "{e}");
    let log = FrequencyAxis::canonical_log10();
    let r = channel_shift_to_ratio(&log, 6.0, 2000.0).unwrap();
    assert!((r - 80f64.powf(6.0 / 99.0)).abs() < 1e-12);
    assert!((r - 1.304).abs() < 1e-3);
}

#[test]
fn mel_delta_upsamples_to_a_triangle() {
    let src = make_axis(AxisKind::MelLinear, 25, 100.0, 8000.0).unwrap();
    let dst = make_axis(AxisKind::MelLinear, 100, 100.0, 8000.0).unwrap();
    let k = 9;
    let mut v = vec![0.0; 25];
    v[k] = 1.0;
    let up = resample_to_axis(&Spectrum::new(v, src, Compression::None).unwrap(), &dst).unwrap();
    let u = up.values();
    let peak = argmax(u);
    assert_eq!(peak, dst.nearest_channel(src.center_freq(k)));
    let (lo, hi) = (hz_to_mel(src.center_freq(k - 1)), hz_to_mel(src.center_freq(k + 1)));
    for (c, val) in u.iter().enumerate() {
        let m = hz_to_mel(dst.center_freq(c));
        if m <= lo || m >= hi {
            assert!(val.abs() < 1e-12, "channel {c}: {val}");
        } else {
            // linear in mel on each side of the peak
            let want = 1.0 - (m - hz_to_mel(src.center_freq(k))).abs() / (hi - lo) * 2.0;
            assert!((val - want).abs() < 1e-9, "channel {c}: {val} vs {want}");
        }
    }
    assert!(u[..peak].windows(2).all(|w| w[0] <= w[1]) && u[peak..].windows(2).all(|w| w[0] >= w[1]));
}

fn vowel_ep(vowel: Vowel, f0: f64) -> ssi_vtl::Spectrogram {
    let spec = VowelSpec::baseline(vowel, f0);
    gammatone_ep(&synth_vowel(&spec).unwrap(), spec.fs, &FrequencyAxis::canonical_erb(), 0.0005).unwrap()
}

#[test]
fn weight_suppresses_first_harmonic_of_182_hz_vowel() {
    let ep = center_average_mid(&vowel_ep(Vowel::A, 182.0), 0.025).unwrap();
    let ep = Spectrum::new(ep.values().iter().map(|v| 20.0 * v.log10()).collect(), *ep.axis(), Compression::Log).unwrap();
    let weighted = weight_spectrum(&ep, 3.5, 182.0).unwrap();
    let c = ep.axis().nearest_channel(182.0);
    let floor = ep.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let factor = weighted.values()[c] / (ep.values()[c] - floor);
    assert!((factor - ep.axis().center_freq(c) / 637.0).abs() < 1e-12);
    assert!((factor - 182.0 / 637.0).abs() < 0.015, "{factor}");
}

/// At 140 Hz the 50 ms window holds exactly seven periods, so the pitch
/// ripple of the envelope averages out.
#[test]
fn center_average_matches_steady_state_mean() {
    let sg = vowel_ep(Vowel::A, 140.0);
    let (_, end) = sg.span();
    let mid = center_average(&sg, 0.5 * end, 0.025).unwrap();
    // steady portion: after 50 ms of onset to the end
    let start = (0.05 / sg.frame_period()) as usize;
    let rows = &sg.frames()[start..];
    for c in 0..sg.axis().channels() {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / rows.len() as f64;
        let rel = (mid.values()[c] - mean).abs() / mean;
        assert!(rel < 0.01, "channel {c}: {} vs {mean} ({rel:.4})", mid.values()[c]);
    }
}
