//! Principal-value transform of a narrow Lorentzian compared with its exact
//! image and with the far-detuned narrow-mode form.

use std::f64::consts::PI;

use cavity_vdw::greens::{kk_real_from_imag, SpectralFunction};
use cavity_vdw::quad::QuadControl;
use cavity_vdw::weakfield::narrow_mode_real_contraction;

fn main() -> cavity_vdw::Result<()> {
    let (w0, gamma) = (1.88e15, 1.2e12);
    let lor = SpectralFunction::lorentzian(w0, gamma)?;
    let quad = QuadControl::default().with_rel_tol(1e-10);
    println!(
        "{:>10} {:>14} {:>14} {:>14}",
        "offset/γ", "PV/π", "exact", "narrow mode"
    );
    for off in [-1e3, -300.0, -100.0, -3.0, 0.5, 100.0, 1e3] {
        let w = w0 + off * gamma;
        let pv = kk_real_from_imag(&lor, w, &quad)? / PI;
        let det = w0 - w;
        let exact = 0.5 * gamma * det / (det * det + 0.25 * gamma * gamma);
        let narrow = narrow_mode_real_contraction(1.0, gamma, w0, w)
            .map(|v| format!("{v:>14.6e}"))
            .unwrap_or_else(|_| format!("{:>14}", "n/a"));
        println!("{off:>10.1} {pv:>14.6e} {exact:>14.6e} {narrow}");
    }
    Ok(())
}
