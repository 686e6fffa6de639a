//! Correlation between estimated and true lengths as h_max varies.
//!
//! Run with `--release`. The optional argument picks the base
//! representation (default `Ep`).

use ssi_vtl::corpus::default_speakers;
use ssi_vtl::eval::{analyze_corpus, default_hmax_grid, hmax_sweep};
use ssi_vtl::{synthetic_utterances, AnalysisParams, F0Source, Representation, Vowel};

fn main() -> ssi_vtl::Result<()> {
    let rep: Representation = std::env::args().nth(1).unwrap_or_else(|| "Ep".into()).parse()?;
    let rep = rep.weighted();
    let params = AnalysisParams::default();
    let utts = synthetic_utterances(&default_speakers(), &Vowel::ALL)?;
    let items = analyze_corpus(&utts, &[rep], &params, &F0Source::Auto)?;
    println!("{rep}\n h_max   r_all   RMS cm");
    for row in hmax_sweep(&items, rep, &default_hmax_grid(), &params)? {
        println!("{:>6} {:>7.4} {:>8.4}", row.h_max, row.all_r.unwrap_or(f64::NAN), row.rms_cm);
    }
    Ok(())
}
