use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Endpoints closer than this to ±1 are rejected as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-6;

/// Tolerance on |ξ| = 1 for unit-circle inputs.
pub const UNIT_TOL: f64 = 1e-9;

/// The map `T(z) = a (1 - z) / (1 + z)` sending the unit disk onto the upper
/// half-plane when `a` lies on the positive imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusTransform {
    pub a: Complex64,
}

impl MobiusTransform {
    pub fn new(a: Complex64) -> Self {
        Self { a }
    }

    /// Forward map. Returns an infinite value at `z = -1`.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let den = Complex64::new(1.0, 0.0) + z;
        if den == Complex64::new(0.0, 0.0) {
            return Complex64::new(f64::INFINITY, f64::INFINITY);
        }
        self.a * (Complex64::new(1.0, 0.0) - z) / den
    }

    /// Inverse map `z = (a - w) / (a + w)`.
    pub fn invert(&self, w: Complex64) -> Complex64 {
        (self.a - w) / (self.a + w)
    }
}

/// Normalizing transform for a crosscut whose endpoints are `ξ₁` and `conj ξ₁`:
/// `T(ξ₁) = 1`, `T(conj ξ₁) = -1` and `T(1) = 0`.
pub fn mobius_for_endpoints(xi1: Complex64) -> Result<MobiusTransform> {
    if ((xi1.norm()) - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!("|ξ₁| = {} is not 1", xi1.norm())));
    }
    if (xi1 - 1.0).norm() < DEGENERATE_TOL || (xi1 + 1.0).norm() < DEGENERATE_TOL {
        return Err(Error::invalid("ξ₁ is too close to ±1"));
    }
    if !(xi1.im > 0.0 && xi1.re > 0.0) {
        return Err(Error::invalid(format!(
            "ξ₁ = {xi1} must lie in the open first quadrant"
        )));
    }
    let a = (Complex64::new(1.0, 0.0) + xi1) / (Complex64::new(1.0, 0.0) - xi1);
    // On the unit circle a is purely imaginary; drop the rounding residue.
    Ok(MobiusTransform::new(Complex64::new(0.0, a.im)))
}

/// Disk automorphism `z ↦ (z - c) / (1 - conj(c) z)` sending `c` to 0.
pub fn disk_automorphism(c: Complex64, z: Complex64) -> Complex64 {
    (z - c) / (Complex64::new(1.0, 0.0) - c.conj() * z)
}
