//! `ω²·Im G_xx` at the cavity centre from the full in-plane wavevector
//! quadrature, next to the single-mode Lorentzian.

use cavity_vdw::greens::{planar_cavity_green, planar_resonant_im_gxx, PlanarCavity, SingleModeWindow};
use cavity_vdw::quad::QuadControl;
use cavity_vdw::Variant;

fn main() -> cavity_vdw::Result<()> {
    let cav = PlanarCavity::new(1e-6, 1e-3, 1)?;
    let (w0, gamma) = (cav.resonance_frequency(), cav.mode_width());
    let z = 0.5 * cav.d();
    let quad = QuadControl::default().with_rel_tol(1e-6);
    let window = SingleModeWindow::default();
    println!("ω_ν = {w0:.6e} rad/s, γ_ν = {gamma:.4e} rad/s");
    println!("{:>8} {:>14} {:>14}", "(ω-ω_ν)/γ", "quadrature", "Lorentzian");
    for off in [-20.0, -5.0, -1.0, -0.5, 0.0, 0.5, 1.0, 5.0, 20.0] {
        let w = w0 + off * gamma;
        let g = planar_cavity_green(&cav, z, z, w, &quad)?;
        let full = w * w * g.entry(0, 0).im;
        let lor = planar_resonant_im_gxx(&cav, z, z, w, &window, Variant::Corrected)?;
        println!("{off:>8.1} {full:>14.6e} {lor:>14.6e}");
    }
    Ok(())
}
