//! Physical constants, unit conversions and quantity parsing.
//!
//! Internally every frequency and energy is an angular frequency in rad/s
//! (energies are divided by ħ), times are seconds, inductances henry and
//! capacitances farad. Display units follow the usual convention that an
//! energy quoted "in 2π·GHz" is E/h in GHz.

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * PI);
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Superconducting flux quantum h / 2e.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

const TWO_PI_GHZ: f64 = 2.0 * PI * 1e9;
const TWO_PI_MHZ: f64 = 2.0 * PI * 1e6;

pub fn from_2pi_ghz(x: f64) -> f64 {
    x * TWO_PI_GHZ
}

pub fn to_2pi_ghz(w: f64) -> f64 {
    w / TWO_PI_GHZ
}

pub fn from_2pi_mhz(x: f64) -> f64 {
    x * TWO_PI_MHZ
}

pub fn to_2pi_mhz(w: f64) -> f64 {
    w / TWO_PI_MHZ
}

pub fn from_us(t: f64) -> f64 {
    t * 1e-6
}

pub fn to_us(t: f64) -> f64 {
    t * 1e6
}

pub fn from_nh(l: f64) -> f64 {
    l * 1e-9
}

pub fn from_ff(c: f64) -> f64 {
    c * 1e-15
}

/// Converts an inverse capacitance in 1/fF to 1/F.
pub fn from_inverse_ff(k: f64) -> f64 {
    k * 1e15
}

pub fn to_inverse_ff(k: f64) -> f64 {
    k * 1e-15
}

/// (Φ0/2π)² / L expressed as an angular frequency.
pub fn inductive_energy(inductance: f64) -> f64 {
    let phi = FLUX_QUANTUM / (2.0 * PI);
    phi * phi / inductance / HBAR
}

/// (2e)² K⁻¹ expressed as an angular frequency, for an inverse capacitance
/// entry in 1/F.
pub fn pair_charge_energy(inverse_capacitance: f64) -> f64 {
    let q = 2.0 * ELEMENTARY_CHARGE;
    q * q * inverse_capacitance / HBAR
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Dimensionless,
    Time,
    AngularFrequency,
    Inductance,
    Capacitance,
    InverseCapacitance,
}

fn unit_factor(unit: &str) -> Option<(Dimension, f64)> {
    use Dimension::*;
    let normalized: String = unit
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .replace(['·', '×'], "*")
        .replace('π', "pi")
        .replace('µ', "u")
        .replace('μ', "u");
    let stripped = normalized
        .strip_prefix("2pi*")
        .or_else(|| normalized.strip_prefix("2pi"))
        .unwrap_or(&normalized);
    let two_pi = 2.0 * PI;
    Some(match stripped {
        "" => (Dimensionless, 1.0),
        "s" => (Time, 1.0),
        "ms" => (Time, 1e-3),
        "us" => (Time, 1e-6),
        "ns" => (Time, 1e-9),
        "ps" => (Time, 1e-12),
        "rad/s" => (AngularFrequency, 1.0),
        "Hz" => (AngularFrequency, two_pi),
        "kHz" => (AngularFrequency, two_pi * 1e3),
        "MHz" => (AngularFrequency, two_pi * 1e6),
        "GHz" => (AngularFrequency, two_pi * 1e9),
        "H" => (Inductance, 1.0),
        "nH" => (Inductance, 1e-9),
        "pH" => (Inductance, 1e-12),
        "F" => (Capacitance, 1.0),
        "pF" => (Capacitance, 1e-12),
        "fF" => (Capacitance, 1e-15),
        "1/F" => (InverseCapacitance, 1.0),
        "1/pF" => (InverseCapacitance, 1e12),
        "1/fF" => (InverseCapacitance, 1e15),
        _ => return None,
    })
    .filter(|_| stripped == normalized || matches!(stripped, "Hz" | "kHz" | "MHz" | "GHz"))
}

/// Parses strings such as `"1.067 2pi*GHz"`, `"-41.99 2π·MHz"`, `"20 nH"` or
/// `"0.7 us"` into SI base units, checking the dimension.
pub fn parse_quantity(input: &str, expected: Dimension) -> Result<f64> {
    let bad = |reason: &str| Error::Quantity {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = input.trim();
    let split = trimmed
        .find(|c: char| c.is_whitespace())
        .unwrap_or(trimmed.len());
    let (number, unit) = trimmed.split_at(split);
    let value: f64 = number.parse().map_err(|_| bad("not a number"))?;
    let (dim, factor) = unit_factor(unit).ok_or_else(|| bad("unknown unit"))?;
    if dim != expected {
        return Err(bad(&format!("expected {expected:?}, found {dim:?}")));
    }
    if !value.is_finite() {
        return Err(bad("value is not finite"));
    }
    Ok(value * factor)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawQuantity {
    Number(f64),
    Text(String),
}

fn deserialize_dim<'de, D: Deserializer<'de>>(d: D, dim: Dimension) -> Result<f64, D::Error> {
    match RawQuantity::deserialize(d)? {
        RawQuantity::Number(x) => Ok(x),
        RawQuantity::Text(s) => parse_quantity(&s, dim).map_err(serde::de::Error::custom),
    }
}

macro_rules! quantity_serde {
    ($name:ident, $dim:expr, $scale:expr, $unit:literal) => {
        /// Serde adapter: bare numbers are SI base units, strings carry a unit.
        pub mod $name {
            use super::*;

            pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&format!("{} {}", v / $scale, $unit))
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
                deserialize_dim(d, $dim)
            }
        }
    };
}

quantity_serde!(angular_ghz, Dimension::AngularFrequency, TWO_PI_GHZ, "2pi*GHz");
quantity_serde!(angular_mhz, Dimension::AngularFrequency, TWO_PI_MHZ, "2pi*MHz");
quantity_serde!(time_us, Dimension::Time, 1e-6, "us");
quantity_serde!(inductance_nh, Dimension::Inductance, 1e-9, "nH");
quantity_serde!(capacitance_ff, Dimension::Capacitance, 1e-15, "fF");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_angular_units() {
        let a = parse_quantity("1.067 2pi*GHz", Dimension::AngularFrequency).unwrap();
        let b = parse_quantity("1.067 2π·GHz", Dimension::AngularFrequency).unwrap();
        let c = parse_quantity("1067 2pi*MHz", Dimension::AngularFrequency).unwrap();
        assert_eq!(a, b);
        assert!((a - c).abs() < 1e-6 * a);
        assert!((a - from_2pi_ghz(1.067)).abs() < 1e-6);
    }

    #[test]
    fn rejects_wrong_dimension_and_junk() {
        assert!(parse_quantity("20 nH", Dimension::Capacitance).is_err());
        assert!(parse_quantity("twenty nH", Dimension::Inductance).is_err());
        assert!(parse_quantity("3 furlongs", Dimension::Time).is_err());
        assert!(parse_quantity("2 2pi*us", Dimension::Time).is_err());
    }

    #[test]
    fn time_and_circuit_units() {
        let t = parse_quantity("0.7 μs", Dimension::Time).unwrap();
        assert!((t - 0.7e-6).abs() < 1e-18);
        let k = parse_quantity("0.02 1/fF", Dimension::InverseCapacitance).unwrap();
        assert!((k - 2e13).abs() < 1.0);
        assert_eq!(parse_quantity("0.5", Dimension::Dimensionless).unwrap(), 0.5);
    }

    #[test]
    fn inductive_energy_of_20nh() {
        // (Φ0/2π)²/L / h for 20 nH is about 8.17 GHz.
        let e = to_2pi_ghz(inductive_energy(20e-9));
        assert!((e - 8.1727).abs() < 1e-3, "{e}");
    }
}
