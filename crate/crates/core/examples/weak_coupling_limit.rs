//! The lower dressed potential approaches −ħΩ_R²/(4Δ) once the detuning
//! dwarfs the vacuum Rabi frequency.

use cavity_vdw::constants::HBAR;
use cavity_vdw::weakfield::eigenstate_shift;

fn main() {
    let omega_r = 2e9;
    println!(
        "{:>8} {:>14} {:>14} {:>10}",
        "Δ/Ω_R", "dressed [J]", "weak [J]", "rel. err"
    );
    for ratio in [1.0, 3.0, 10.0, 30.0, 100.0, 1e3, 1e4] {
        let delta = ratio * omega_r;
        let (_, dressed) = eigenstate_shift(omega_r, 0.0, delta);
        let weak = -HBAR * omega_r * omega_r / (4.0 * delta);
        println!(
            "{ratio:>8.0} {dressed:>14.6e} {weak:>14.6e} {:>10.2e}",
            (dressed / weak - 1.0).abs()
        );
    }
}
