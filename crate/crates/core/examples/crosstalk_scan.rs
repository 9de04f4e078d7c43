//! Cross-talk between the outer qubits as the shunt capacitance C_R grows.

use spin_transistor::circuit::{crosstalk_scaling_scan, CircuitParams};

fn main() -> spin_transistor::Result<()> {
    let scan = crosstalk_scaling_scan(&CircuitParams::reference(), &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0])?;
    println!("{:>8} {:>12} {:>12}", "C_R x", "|J4/J2|", "|J4/Jz|");
    for r in &scan.rows {
        println!("{:>8} {:>12.4e} {:>12.4e}", r.c_r_multiplier, r.j4_over_j2, r.j4_over_jz);
    }
    println!("strictly decreasing: {}", scan.strictly_decreasing);
    if let Some(f) = scan.first_below_one_percent {
        println!("|J4/Jz| < 1% from C_R x {f}");
    }
    Ok(())
}
