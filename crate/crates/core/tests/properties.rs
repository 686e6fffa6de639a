mod common;

use common::{bump, constructed, pinv_relative_shifts, vowel_template};
use proptest::prelude::*;
use ssi_vtl::spectrum::compress;
use ssi_vtl::ssi::{ssi_weight, SsiParams};
use ssi_vtl::vtl::{build_shift_matrix, relative_shifts, xcorr_shift, ShiftMatrix};
use ssi_vtl::{make_axis, AxisKind, Compression, FrequencyAxis, Spectrogram, Spectrum};

fn axis_kind() -> impl Strategy<Value = AxisKind> {
    prop_oneof![
        Just(AxisKind::ErbLinear),
        Just(AxisKind::Log10Hz),
        Just(AxisKind::MelLinear),
        Just(AxisKind::LinearHz)
    ]
}

fn antisymmetric(max_n: usize) -> impl Strategy<Value = ShiftMatrix> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-30.0f64..30.0, n * (n - 1) / 2).prop_map(move |upper| {
            ShiftMatrix::from_upper(n, |i, j| {
                // row-major index into the strict upper triangle
                upper[i * n - i * (i + 1) / 2 + (j - i - 1)]
            })
        })
    })
}

proptest! {
    #[test]
    fn weight_is_bounded_and_monotone(
        kind in axis_kind(),
        channels in 2usize..200,
        h_max in 0.01f64..10.0,
        f0 in 0.0f64..500.0,
    ) {
        let axis = make_axis(kind, channels, 100.0, 8000.0).unwrap();
        let w = ssi_weight(&axis, SsiParams::new(h_max, f0).unwrap());
        prop_assert!(w.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(w.windows(2).all(|p| p[0] <= p[1]));
        for (c, v) in w.iter().enumerate() {
            let f = axis.center_freq(c);
            if f0 == 0.0 || f >= h_max * f0 {
                prop_assert_eq!(*v, 1.0);
            } else {
                prop_assert!(*v < 1.0);
            }
        }
    }

    #[test]
    fn weight_is_nonincreasing_in_f0_and_hmax(
        f in 50.0f64..9000.0,
        h in 0.1f64..6.0,
        dh in 0.0f64..3.0,
        f0 in 50.0f64..400.0,
        df in 0.0f64..200.0,
    ) {
        let w = |h: f64, f0: f64| SsiParams::new(h, f0).unwrap().weight_at(f);
        prop_assert!(w(h + dh, f0) <= w(h, f0));
        prop_assert!(w(h, f0 + df) <= w(h, f0));
    }

    #[test]
    fn relative_shifts_match_pseudo_inverse(m in antisymmetric(5)) {
        let s = relative_shifts(&m);
        let oracle = pinv_relative_shifts(&m);
        for (a, b) in s.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-9, "{s:?} vs {oracle:?}");
        }
    }

    #[test]
    fn shift_matrix_is_antisymmetric_and_shifts_sum_to_zero(m in antisymmetric(8)) {
        let n = m.n();
        for i in 0..n {
            prop_assert_eq!(m.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(m.get(i, j), -m.get(j, i));
            }
        }
        prop_assert!(relative_shifts(&m).iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn constructed_shifts_are_recovered(half_steps in -30i32..=30, tilt in -0.3f64..0.3, f1 in 25.0f64..40.0) {
        let d = half_steps as f64 * 0.5;
        let t = move |x: f64| 10.0 - tilt * x + 8.0 * bump(x, f1, 7.0) + 5.0 * bump(x, f1 + 22.0, 9.0);
        let got = xcorr_shift(&constructed(t, 0.0), &constructed(t, d), 30, 10).unwrap();
        prop_assert!((got - d).abs() <= 0.1 + 1e-9, "shift {d}: got {got}");
    }

    #[test]
    fn xcorr_is_scale_invariant(d in -10.0f64..10.0, k in 0.01f64..100.0) {
        let a = constructed(vowel_template, 0.0);
        let b = constructed(vowel_template, d);
        let scaled = Spectrum::new(b.values().iter().map(|v| v * k).collect(), *b.axis(), b.compression()).unwrap();
        prop_assert_eq!(xcorr_shift(&a, &b, 30, 10).unwrap(), xcorr_shift(&a, &scaled, 30, 10).unwrap());
    }

    #[test]
    fn relabeling_channels_keeps_shift_differences(
        offsets in prop::collection::vec(-6.0f64..6.0, 3..5),
        k in -8i32..=8,
    ) {
        let t = |x: f64| 3.0 * bump(x, 42.0, 7.0) + 2.0 * bump(x, 58.0, 6.0) - 0.02 * x;
        let build = |extra: f64| {
            let spectra: Vec<_> = offsets.iter().map(|o| constructed(t, o + extra)).collect();
            relative_shifts(&build_shift_matrix(&spectra, 30, 10).unwrap())
        };
        let s0 = build(0.0);
        let s1 = build(k as f64);
        for i in 0..s0.len() {
            for j in 0..s0.len() {
                prop_assert!(((s0[i] - s0[j]) - (s1[i] - s1[j])).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn compress_is_monotone_per_element(
        mut vals in prop::collection::vec(0.0f64..1e3, 2..40),
        p_tenths in 1u32..=10,
        log in any::<bool>(),
    ) {
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let axis = FrequencyAxis::new(AxisKind::ErbLinear, vals.len(), 100.0, 8000.0).unwrap();
        let sg = Spectrogram::new(vec![vals.clone()], 0.005, 0.0, axis, Compression::None).unwrap();
        let mode = if log { Compression::Log } else { Compression::Power(p_tenths as f64 / 10.0) };
        let out = compress(&sg, mode).unwrap();
        prop_assert!(out.frames()[0].windows(2).all(|w| w[0] <= w[1]));
        let id = compress(&sg, Compression::Power(1.0)).unwrap();
        prop_assert_eq!(id.frames(), sg.frames());
    }
}
