//! Prints the canonical ERB axis and the F0-adaptive weight for two voices.

use ssi_vtl::ssi::{ssi_weight, SsiParams, DEFAULT_HMAX};
use ssi_vtl::FrequencyAxis;

fn main() -> ssi_vtl::Result<()> {
    let axis = FrequencyAxis::canonical_erb();
    println!(
        "{} channels, {:.0}-{:.0} Hz, spacing {:.6} ERB",
        axis.channels(),
        axis.f_lo(),
        axis.f_hi(),
        axis.spacing()
    );
    let low = ssi_weight(&axis, SsiParams::new(DEFAULT_HMAX, 101.0)?);
    let high = ssi_weight(&axis, SsiParams::new(DEFAULT_HMAX, 182.0)?);
    println!("channel  center_hz  w(f0=101)  w(f0=182)");
    for c in (0..axis.channels()).step_by(9) {
        println!("{c:>7}  {:>9.1}  {:>9.3}  {:>9.3}", axis.center_freq(c), low[c], high[c]);
    }
    Ok(())
}
