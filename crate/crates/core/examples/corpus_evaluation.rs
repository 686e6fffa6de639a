//! Full evaluation of the 8-speaker synthetic ladder: correlation, RMS
//! error and exclusion trials for each representation.
//!
//! Run with `--release`. Optional arguments are representation ids.

use ssi_vtl::corpus::default_speakers;
use ssi_vtl::eval::{analyze_corpus, estimate, exclusion_trials, EvalReport};
use ssi_vtl::{synthetic_utterances, AnalysisParams, F0Source, Representation, Vowel};

fn main() -> ssi_vtl::Result<()> {
    let mut ids: Vec<String> = std::env::args().skip(1).collect();
    if ids.is_empty() {
        ids = ["Ep", "Ep_SSI", "F_log", "F_SSI_log", "M_log", "M_SSI_log"].map(String::from).to_vec();
    }
    let reps = ids.iter().map(|s| s.parse()).collect::<ssi_vtl::Result<Vec<Representation>>>()?;
    let params = AnalysisParams::default();
    let utts = synthetic_utterances(&default_speakers(), &Vowel::ALL)?;
    let items = analyze_corpus(&utts, &reps, &params, &F0Source::Auto)?;
    println!("{:<12} {:>7} {:>8} {:>9} {:>16}", "rep", "r_all", "RMS cm", "q", "trial RMS");
    for rep in reps {
        let est = estimate(&items, rep, params.h_max, &params)?;
        let trials = exclusion_trials(&items, rep, params.h_max, &params, 3, 10, 0)?;
        let report = EvalReport::from_estimation(rep, params.h_max, &est, trials);
        let (m, s) = report.trial_stats().unwrap_or((f64::NAN, f64::NAN));
        println!(
            "{:<12} {:>7.4} {:>8.4} {:>9.5} {:>7.4} ± {:.4}",
            report.representation_id,
            report.all_r.unwrap_or(f64::NAN),
            report.rms_cm,
            report.q,
            m,
            s
        );
    }
    Ok(())
}
