//! Pairwise shifts between translated copies of one spectrum, and the
//! relative shifts and lengths derived from them.

use ssi_vtl::vtl::{build_shift_matrix, estimate_vtl, relative_shifts};
use ssi_vtl::{Compression, FrequencyAxis, Spectrum};

fn main() -> ssi_vtl::Result<()> {
    let axis = FrequencyAxis::canonical_erb();
    let offsets = [0.0, 2.0, 5.0, -3.5];
    let spectra = offsets
        .iter()
        .map(|o| {
            let v = (0..axis.channels())
                .map(|c| {
                    let x = c as f64 - o;
                    (-((x - 30.0) / 6.0).powi(2)).exp() + 0.6 * (-((x - 55.0) / 8.0).powi(2)).exp()
                })
                .collect();
            Spectrum::new(v, axis, Compression::None)
        })
        .collect::<ssi_vtl::Result<Vec<_>>>()?;
    let m = build_shift_matrix(&spectra, 30, 10)?;
    print!("shift matrix (channels)\n{}", m.to_csv_string());
    let s = relative_shifts(&m);
    println!("relative shifts {s:?}");
    let l = estimate_vtl(&s, -0.03, 16.0);
    println!("lengths at q = -0.03, mean 16 cm: {:?}", l.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    Ok(())
}
