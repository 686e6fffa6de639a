//! Excitation pattern of a synthetic /a/, with and without the weight.
//!
//! Run with `--release`. Writes `ep.csv` and `ep_ssi.csv` when an output
//! directory is given as the first argument.

use std::path::PathBuf;

use ssi_vtl::pipeline::analyze;
use ssi_vtl::synth::{synth_vowel, VowelSpec};
use ssi_vtl::{AnalysisParams, F0Source, Representation, Utterance, UtteranceSource, Vowel};

fn main() -> ssi_vtl::Result<()> {
    let spec = VowelSpec::baseline(Vowel::A, 182.0);
    let utt = Utterance {
        id: "a182".into(),
        speaker_id: "demo".into(),
        vowel: Vowel::A,
        vtl_cm: 16.0,
        f0_hz: None,
        source: UtteranceSource::Samples { samples: synth_vowel(&spec)?, fs: spec.fs },
    };
    let params = AnalysisParams::default();
    let (ep, _) = analyze(&utt, "Ep".parse()?, &params, &F0Source::Auto)?;
    let ssi: Representation = "Ep_SSI".parse()?;
    let (weighted, f0) = analyze(&utt, ssi, &params, &F0Source::Auto)?;
    println!("estimated F0 {f0:.2} Hz");
    println!("channel  center_hz   Ep_dB  Ep_SSI");
    for c in (0..ep.axis().channels()).step_by(4) {
        println!(
            "{c:>7}  {:>9.1}  {:>6.1}  {:>6.2}",
            ep.axis().center_freq(c),
            ep.values()[c],
            weighted.values()[c]
        );
    }
    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        ep.write_csv(&dir.join("ep.csv"))?;
        weighted.write_csv(&dir.join("ep_ssi.csv"))?;
    }
    Ok(())
}
