mod common;

use common::{ladder, pair, reps};
use ssi_vtl::eval::{default_hmax_grid, estimate, exclusion_trials, hmax_sweep, EvalReport};
use ssi_vtl::vtl::{channel_shift_to_ratio, xcorr_shift};
use ssi_vtl::{AnalysisParams, FrontEnd, Vowel};

fn params() -> AnalysisParams {
    AnalysisParams::default()
}

#[test]
fn pair_shift_is_robust_to_f0_errors() {
    let items = pair(&["Ep"]);
    let p = params();
    let rep = reps(&["Ep_SSI"])[0];
    let base = estimate(&items, rep, p.h_max, &p).unwrap().matrices[&Vowel::A].1.get(0, 1);
    for factor in [0.9, 1.1] {
        let mut off = items.clone();
        off.iter_mut().for_each(|it| it.f0 *= factor);
        let c = estimate(&off, rep, p.h_max, &p).unwrap().matrices[&Vowel::A].1.get(0, 1);
        assert!((c - base).abs() < 0.5, "F0 x{factor}: {c} vs {base}");
    }
}

#[test]
fn fitted_q_is_close_to_the_axis_slope() {
    let items = ladder(&["Ep"]);
    let p = params();
    let est = estimate(&items, reps(&["Ep_SSI"])[0], p.h_max, &p).unwrap();
    let axis = p.axis_for(FrontEnd::Ep).unwrap();
    // One channel up in frequency is a proportionally shorter tract.
    let slope = -channel_shift_to_ratio(&axis, 1.0, 2000.0).unwrap().ln();
    assert!(((est.q - slope) / slope).abs() < 0.15, "q {} vs slope {slope}", est.q);
}

#[test]
fn estimated_length_decreases_with_alpha_per_vowel() {
    let items = ladder(&["Ep"]);
    let p = params();
    let est = estimate(&items, reps(&["Ep_SSI"])[0], p.h_max, &p).unwrap();
    for v in Vowel::ALL {
        let mut pts: Vec<_> = est.points.iter().filter(|x| x.vowel == v).collect();
        pts.sort_by(|a, b| b.l_meas_cm.partial_cmp(&a.l_meas_cm).unwrap());
        let l: Vec<f64> = pts.iter().map(|x| x.l_est_cm).collect();
        assert!(l.windows(2).all(|w| w[0] > w[1]), "/{v}/: {l:?}");
    }
}

#[test]
fn exclusion_trials_are_seeded_and_k0_reproduces_the_full_fit() {
    let items = ladder(&["Ep"]);
    let p = params();
    let rep = reps(&["Ep_SSI"])[0];
    let a = exclusion_trials(&items, rep, p.h_max, &p, 3, 10, 7).unwrap();
    let b = exclusion_trials(&items, rep, p.h_max, &p, 3, 10, 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 10);
    assert!(a.iter().all(|t| t.excluded.len() == 3));
    let full = estimate(&items, rep, p.h_max, &p).unwrap().rms_cm();
    let k0 = exclusion_trials(&items, rep, p.h_max, &p, 0, 4, 7).unwrap();
    assert!(k0.iter().all(|t| t.rms_cm == full && t.excluded.is_empty()));
    assert!(exclusion_trials(&items, rep, p.h_max, &p, 7, 1, 0).is_err());
}

#[test]
fn sweep_has_one_row_per_grid_point_and_h0_is_unweighted() {
    let items = ladder(&["Ep"]);
    let p = params();
    let rep = reps(&["Ep"])[0];
    let grid = default_hmax_grid();
    let rows = hmax_sweep(&items, rep, &grid, &p).unwrap();
    assert_eq!(rows.len(), 13);
    let plain = estimate(&items, rep, 0.0, &p).unwrap();
    assert_eq!(rows[0].h_max, 0.0);
    assert_eq!(rows[0].all_r, plain.all_r());
    assert_eq!(rows[0].rms_cm, plain.rms_cm());
}

#[test]
fn full_pipeline_is_bit_identical_across_runs() {
    let ids = ["Ep", "F_log", "M_log"];
    let run = || {
        let items = ladder(&ids);
        let p = params();
        reps(&["Ep_SSI", "F_SSI_log", "M_SSI_log"])
            .into_iter()
            .map(|rep| {
                let est = estimate(&items, rep, p.h_max, &p).unwrap();
                let trials = exclusion_trials(&items, rep, p.h_max, &p, 3, 10, 0).unwrap();
                EvalReport::from_estimation(rep, p.h_max, &est, trials)
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn pair_spectra_with_swapped_order_flip_the_shift() {
    let items = pair(&["Ep"]);
    let (a, b) = (&items[0].spectra["Ep"], &items[1].spectra["Ep"]);
    let p = params();
    let ab = xcorr_shift(a, b, p.max_lag, p.interp).unwrap();
    let ba = xcorr_shift(b, a, p.max_lag, p.interp).unwrap();
    assert_eq!(ab, -ba);
}
