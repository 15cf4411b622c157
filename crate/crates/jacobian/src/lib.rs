//! Genus-2 Jacobians over small finite fields: Cantor arithmetic, group
//! orders from the Weil polynomial, torsion bases, Frobenius matrices, ideal
//! torsion and Miller-based Tate and Weil pairings.

pub mod curve;
pub mod field;
pub mod frobenius;
pub mod lab;
pub mod pairing;
pub mod poly;
pub mod torsion;
pub mod zeta;
