//! Autocorrelation F0 estimates on synthetic vowels and on noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssi_vtl::ssi::estimate_f0;
use ssi_vtl::synth::{synth_vowel, VowelSpec};
use ssi_vtl::Vowel;

fn main() -> ssi_vtl::Result<()> {
    for f0 in [101.0, 140.0, 182.0, 220.0] {
        for v in [Vowel::A, Vowel::I] {
            let spec = VowelSpec::baseline(v, f0);
            let est = estimate_f0(&synth_vowel(&spec)?, spec.fs)?;
            println!("/{v}/ at {f0} Hz -> {est:?}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise: Vec<f64> = (0..14_400).map(|_| rng.gen_range(-0.5..0.5)).collect();
    println!("white noise -> {:?}", estimate_f0(&noise, 48_000.0)?);
    Ok(())
}
