//! Forces on atom B in a planar cavity: the two dressed eigenstates and a
//! prepared superposition, with the as-printed superposition force for
//! comparison.

use cavity_vdw::dressed::{force_eigenstate, force_theta, Atom, Branch, GradientControl, SuperpositionAngle};
use cavity_vdw::greens::PlanarCavity;
use cavity_vdw::planarcavity::PlanarScenario;
use cavity_vdw::Variant;

fn main() -> cavity_vdw::Result<()> {
    let cav = PlanarCavity::new(1e-6, 1e-3, 1)?;
    let template = PlanarScenario::resonant(cav, 0.3e-6, 0.5e-6, 1e-29)?;
    let f0 = (template.rabi_unit()).sqrt();
    let scn = PlanarScenario::detuned(cav, 0.3e-6, 0.5e-6, 1e-29, 0.5 * f0)?;
    let theta = SuperpositionAngle::new(std::f64::consts::PI / 8.0)?;
    let ctl = GradientControl::default();

    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12}",
        "z_B/d", "F+ [N]", "F- [N]", "Fθ [N]", "Fθ printed"
    );
    for i in 1..10 {
        let p = scn.with_positions(0.3e-6, i as f64 * 0.1e-6)?;
        let fp = force_eigenstate(&p, Branch::Plus, Atom::B, &ctl)?.z;
        let fm = force_eigenstate(&p, Branch::Minus, Atom::B, &ctl)?.z;
        let ft = force_theta(&p, theta, Atom::B, Variant::Corrected, &ctl)?.z;
        let fpr = force_theta(&p, theta, Atom::B, Variant::AsPrinted, &ctl)?.z;
        println!(
            "{:>6.2} {fp:>12.4e} {fm:>12.4e} {ft:>12.4e} {fpr:>12.4e}",
            p.z_b() / cav.d()
        );
    }
    Ok(())
}
