//! Avoided crossing of the dressed energies as the detuning sweeps through
//! resonance at fixed vacuum Rabi frequency.

use cavity_vdw::constants::HBAR;
use cavity_vdw::dressed::{dressed_coefficients, rabi_frequency, DressedSystem};

fn main() -> cavity_vdw::Result<()> {
    let gamma = 1e12;
    let omega_r = rabi_frequency(4e-3, gamma)?;
    println!("Ω_R = {omega_r:.4e} rad/s");
    println!(
        "{:>8} {:>10} {:>10} {:>8} {:>8}",
        "Δ/Ω_R", "E+/ħΩ_R", "E-/ħΩ_R", "θ_c", "|⟨u1|+⟩|²"
    );
    for i in -8..=8 {
        let delta = i as f64 * 0.5 * omega_r;
        let sys = DressedSystem::new(omega_r, delta)?;
        let (ep, em) = sys.eigenenergies();
        let c = dressed_coefficients(sys.coupling_angle());
        println!(
            "{:>8.2} {:>10.4} {:>10.4} {:>8.4} {:>8.4}",
            delta / omega_r,
            ep / (HBAR * omega_r),
            em / (HBAR * omega_r),
            sys.coupling_angle(),
            c[0][0] * c[0][0]
        );
    }
    Ok(())
}
