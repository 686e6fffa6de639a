//! Two speakers saying /a/: 15.0 cm at 182 Hz and 18.5 cm at 101 Hz.
//! Compares the length ratio recovered with and without the weight.

use ssi_vtl::corpus::pair_demo_speakers;
use ssi_vtl::eval::{analyze_corpus, estimate};
use ssi_vtl::vtl::channel_shift_to_ratio;
use ssi_vtl::{synthetic_utterances, AnalysisParams, F0Source, Representation, Vowel};

fn main() -> ssi_vtl::Result<()> {
    let speakers = pair_demo_speakers();
    let truth = speakers[1].vtl_cm() / speakers[0].vtl_cm();
    let utts = synthetic_utterances(&speakers, &[Vowel::A])?;
    let reps: Vec<Representation> = vec!["Ep".parse()?, "Ep_SSI".parse()?];
    let params = AnalysisParams::default();
    let items = analyze_corpus(&utts, &reps, &params, &F0Source::Auto)?;
    for it in &items {
        println!("{}: estimated F0 {:.1} Hz", it.speaker_id, it.f0);
    }
    let axis = params.axis_for(reps[0].front)?;
    println!("true length ratio {truth:.4}");
    for rep in reps {
        let est = estimate(&items, rep, params.h_max, &params)?;
        let shift = est.matrices[&Vowel::A].1.get(0, 1);
        let ratio = channel_shift_to_ratio(&axis, -shift, 2000.0)?;
        println!("{rep:<7} shift {shift:+.1} channels -> ratio {ratio:.4}");
    }
    Ok(())
}
