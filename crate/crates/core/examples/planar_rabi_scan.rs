//! Rabi contributions across a planar cavity in its second mode: both atoms
//! moved together, then atom B swept with atom A parked on the central node
//! and on an antinode.

use cavity_vdw::greens::PlanarCavity;
use cavity_vdw::planarcavity::{scan_rabi, uniform_grid, PlanarScenario, Sweep};
use cavity_vdw::Variant;

fn main() -> cavity_vdw::Result<()> {
    let cav = PlanarCavity::new(1e-6, 1e-3, 2)?;
    let scn = PlanarScenario::resonant(cav, 0.5e-6, 0.5e-6, 1e-29)?;
    let grid = uniform_grid(cav.d(), 11);

    for (label, sweep) in [
        ("joint", Sweep::Joint),
        ("A on node", Sweep::AtomB { z_a: 0.5e-6 }),
        ("A on antinode", Sweep::AtomB { z_a: 0.25e-6 }),
    ] {
        println!("# {label}  (Ω² in units of cΓ₀/d)");
        println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "z_B/d", "A", "B", "AB", "total");
        for row in scan_rabi(&scn, sweep, &grid, Variant::Corrected)? {
            let r = row.dimensionless;
            println!(
                "{:>8.3} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
                row.z_b / cav.d(),
                r.omega2_a,
                r.omega2_b,
                r.omega2_ab,
                r.omega2_total
            );
        }
    }
    Ok(())
}
