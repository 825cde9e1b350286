//! Resonant interaction of two identical atoms in vacuum, once through the
//! Green's tensor contraction and once from the closed form.

use cavity_vdw::constants::C;
use cavity_vdw::greens::{FreeSpace, Vec3};
use cavity_vdw::modecoupling::{AtomPair, AtomSpec};
use cavity_vdw::weakfield::{free_space_resonant_potential, resonant_potential};

fn main() -> cavity_vdw::Result<()> {
    let omega = 2.0 * std::f64::consts::PI * C / 780e-9;
    let k = omega / C;
    let dip = Vec3::new(0.0, 0.0, 2.5e-29);
    let a = AtomSpec::new(Vec3::zeros(), omega, dip)?;

    println!(
        "{:>12} {:>8} {:>14} {:>14}",
        "r [m]", "kr", "U pipeline [J]", "U closed [J]"
    );
    for r in [2e-8, 5e-8, 1e-7, 2e-7, 5e-7, 1e-6] {
        let sep = Vec3::new(r, 0.0, 0.0);
        let pair = AtomPair::new(a, a.at(sep))?;
        let u = resonant_potential(&pair, &FreeSpace)?;
        let closed = free_space_resonant_potential(&dip, &dip, k, &sep)?;
        println!("{r:>12.3e} {:>8.3} {:>14.6e} {closed:>14.6e}", k * r, u.interaction);
    }
    Ok(())
}
