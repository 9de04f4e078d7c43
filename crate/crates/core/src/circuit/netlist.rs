//! Capacitance network of the transistor circuit.
//!
//! The element-to-node assignment below is an assumption: left transmon A
//! (C_J to ground) couples through C_c to resonator node B (C_R to ground),
//! which couples through C_c to the central node C; nodes C, D and E each
//! have C to ground and D–E are joined by C′; the right side mirrors the
//! left through F and G. Results from this mode are indicative only.

use nalgebra::DMatrix;

use super::{CircuitParams, InverseCapacitance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Node {
    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capacitor {
    pub a: Node,
    /// `None` is ground.
    pub b: Option<Node>,
    pub farad: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Netlist {
    pub capacitors: Vec<Capacitor>,
}

impl Netlist {
    pub fn to_ground(&mut self, a: Node, farad: f64) -> &mut Self {
        self.capacitors.push(Capacitor { a, b: None, farad });
        self
    }

    pub fn between(&mut self, a: Node, b: Node, farad: f64) -> &mut Self {
        self.capacitors.push(Capacitor { a, b: Some(b), farad });
        self
    }

    /// Maxwell capacitance matrix over nodes A..G.
    pub fn node_matrix(&self) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(7, 7);
        for cap in &self.capacitors {
            let i = cap.a.index();
            k[(i, i)] += cap.farad;
            if let Some(b) = cap.b {
                let j = b.index();
                k[(j, j)] += cap.farad;
                k[(i, j)] -= cap.farad;
                k[(j, i)] -= cap.farad;
            }
        }
        k
    }
}

pub fn assumed_netlist(p: &CircuitParams) -> Netlist {
    use Node::*;
    let mut n = Netlist::default();
    n.to_ground(A, p.c_j)
        .between(A, B, p.c_c)
        .to_ground(B, p.c_r)
        .between(B, C, p.c_c)
        .to_ground(C, p.c)
        .to_ground(D, p.c)
        .to_ground(E, p.c)
        .between(D, E, p.c_prime)
        .between(F, C, p.c_c)
        .to_ground(F, p.c_r)
        .between(G, F, p.c_c)
        .to_ground(G, p.c_j);
    n
}

/// Rows give (φ₁, φ₂, φ₃, φ₄, φ_LR, φ_RR, φ_CM) in terms of node fluxes A..G.
#[rustfmt::skip]
pub fn coordinate_transform() -> DMatrix<f64> {
    DMatrix::from_row_slice(7, 7, &[
        1.0, 0.0,  0.0, 0.0,  0.0, 0.0, 0.0,
        0.0, 0.0, -1.0, 1.0, -1.0, 0.0, 0.0,
        0.0, 0.0,  1.0, 1.0, -1.0, 0.0, 0.0,
        0.0, 0.0,  0.0, 0.0,  0.0, 0.0, 1.0,
        0.0, 1.0,  0.0, 0.0,  0.0, 0.0, 0.0,
        0.0, 0.0,  0.0, 0.0,  0.0, 1.0, 0.0,
        0.0, 0.0,  1.0, 1.0,  1.0, 0.0, 0.0,
    ])
}

/// K⁻¹ in the new coordinates, T K_nodes⁻¹ Tᵀ, with every entry filled.
pub fn inverse_capacitance_from_netlist(n: &Netlist) -> Result<InverseCapacitance> {
    let k_nodes = n.node_matrix();
    let chol = nalgebra::Cholesky::new(k_nodes).ok_or(Error::SingularCapacitance)?;
    let t = coordinate_transform();
    let kinv = &t * chol.inverse() * t.transpose();
    let mut out = InverseCapacitance::new();
    for i in 0..7 {
        for j in i..7 {
            out.set(i + 1, j + 1, 0.5 * (kinv[(i, j)] + kinv[(j, i)]))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_matrix_is_symmetric_positive_definite() {
        let k = assumed_netlist(&CircuitParams::reference()).node_matrix();
        assert_eq!(k, k.transpose());
        assert!(k.clone().cholesky().is_some());
    }

    #[test]
    fn floating_node_is_singular() {
        let mut n = Netlist::default();
        n.between(Node::A, Node::B, 1e-15);
        assert!(matches!(inverse_capacitance_from_netlist(&n), Err(Error::SingularCapacitance)));
    }

    #[test]
    fn gate_couplings_are_antisymmetric() {
        // the resonators touch only node C, which enters φ₂ and φ₃ with opposite signs
        let k = inverse_capacitance_from_netlist(&assumed_netlist(&CircuitParams::reference())).unwrap();
        let (k12, k13) = (k.get(1, 2).unwrap(), k.get(1, 3).unwrap());
        assert!((k12 + k13).abs() < 1e-9 * k13.abs());
        assert!(k13.abs() > 0.0);
    }
}
