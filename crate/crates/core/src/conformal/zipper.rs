//! Geodesic zipper: a composition of elementary slit maps that sends a
//! polygonal Jordan domain onto the upper half-plane, and then onto the disk.
//!
//! Every elementary map has a closed-form inverse, so both directions are
//! evaluated by explicit composition without any iteration.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

const ONE: C = C { re: 1.0, im: 0.0 };
const I: C = C { re: 0.0, im: 1.0 };

/// Principal square root by the algebraic formula, which is faster and more
/// accurate than going through polar form.
#[inline]
fn csqrt(z: C) -> C {
    if z.im == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return z.sqrt();
    }
    let mut m = (z.re * z.re + z.im * z.im).sqrt();
    if !(m.is_finite() && m > 0.0) {
        m = z.re.hypot(z.im);
    }
    if z.re >= 0.0 {
        let t = (0.5 * (m + z.re)).sqrt();
        C::new(t, z.im / (2.0 * t))
    } else {
        let t = (0.5 * (m - z.re)).sqrt();
        C::new(z.im.abs() / (2.0 * t), t.copysign(z.im))
    }
}

/// Square root with nonnegative imaginary part. For real results the sign
/// of `hint` decides the branch.
#[inline]
fn sqrt_h(v: C, hint: f64) -> C {
    let r = csqrt(v);
    if r.im < 0.0 {
        -r
    } else if r.im == 0.0 && hint < 0.0 {
        C::new(-r.re.abs(), 0.0)
    } else if r.im == 0.0 {
        C::new(r.re.abs(), 0.0)
    } else {
        r
    }
}

/// Slit map sending the upper half-plane minus the geodesic arc from 0 to
/// `a` onto the upper half-plane, with `a` going to 0.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct Slit {
    /// `|a|² / Re a`; infinite when the arc is a vertical segment.
    b: f64,
    /// `|a|² / Im a`.
    c: f64,
}

impl Slit {
    fn new(a: C) -> Result<Self> {
        if !(a.im > 0.0) || !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::Numerical {
                iterations: 0,
                residual: a.im,
                reason: format!("boundary sample left the upper half-plane ({a})"),
            });
        }
        let m = a.norm_sqr();
        let b = if a.re == 0.0 { f64::INFINITY } else { m / a.re };
        Ok(Self { b, c: m / a.im })
    }

    #[inline]
    fn forward(&self, z: C) -> C {
        if z.re.is_infinite() || z.im.is_infinite() {
            if self.b.is_infinite() {
                return z;
            }
            // z/(1 - z/b) tends to -b.
            let v = self.b * self.b + self.c * self.c;
            return C::new(-self.b.signum() * v.sqrt(), 0.0);
        }
        let u = if self.b.is_infinite() { z } else { z / (ONE - z / self.b) };
        sqrt_h(u * u + self.c * self.c, u.re)
    }

    /// Image of an already zipped boundary point. For a counterclockwise
    /// boundary the zipped part lies on the negative real axis, so the base
    /// point 0 of the slit goes to `-c`.
    #[inline]
    fn forward_zipped(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return self.forward(C::new(x, 0.0)).re;
        }
        let u = if self.b.is_infinite() { x } else { x / (1.0 - x / self.b) };
        let r = (u * u + self.c * self.c).sqrt();
        if u > 0.0 {
            r
        } else {
            -r
        }
    }

    #[inline]
    fn inverse(&self, r: C) -> C {
        let u = sqrt_h(r * r - self.c * self.c, r.re);
        if self.b.is_infinite() {
            u
        } else {
            // u / (1 + u/b) with a single reciprocal.
            let den = u + self.b;
            (u * self.b) * den.conj() * (1.0 / den.norm_sqr())
        }
    }
}

/// The full zipper chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Zipper {
    z0: C,
    z1: C,
    slits: Vec<Slit>,
    /// Image of the first sample just before the last step.
    zeta_last: f64,
    sign: f64,
    /// Image of the interior center in the upper half-plane.
    center_h: C,
    /// Disk images of the boundary samples, as angles in `[0, 2π)`.
    angles: Vec<f64>,
}

impl Zipper {
    /// Builds the chain for boundary samples listed counterclockwise and an
    /// interior center point.
    pub fn build(samples: &[C], center: C) -> Result<Self> {
        let n = samples.len();
        if n < 3 {
            return Err(Error::invalid("zipper needs at least 3 boundary samples"));
        }
        let (z0, z1) = (samples[0], samples[1]);
        // Current images of the samples 2..n and of the center.
        let mut pts: Vec<C> = samples[2..].iter().map(|&z| first_step(z0, z1, z)).collect();
        let mut images: Vec<f64> = vec![f64::INFINITY, 0.0];
        let mut cen = first_step(z0, z1, center);
        let mut slits = Vec::with_capacity(n - 2);
        for k in 0..pts.len() {
            let slit = Slit::new(pts[k])?;
            for im in images.iter_mut() {
                *im = slit.forward_zipped(*im);
            }
            for p in pts[k..].iter_mut() {
                *p = slit.forward(*p);
            }
            pts[k] = C::new(0.0, 0.0);
            cen = slit.forward(cen);
            images.push(0.0);
            slits.push(slit);
        }
        let zeta_last = images[0];
        if !zeta_last.is_finite() || zeta_last == 0.0 {
            return Err(Error::Numerical {
                iterations: slits.len(),
                residual: zeta_last,
                reason: "degenerate image of the first boundary sample".into(),
            });
        }
        let uc = last_u(cen, zeta_last);
        let sign = if (uc * uc).im >= 0.0 { 1.0 } else { -1.0 };
        let center_h = uc * uc * sign;
        if !(center_h.im > 0.0) {
            return Err(Error::Numerical {
                iterations: slits.len(),
                residual: center_h.im,
                reason: "center is not mapped into the upper half-plane".into(),
            });
        }
        let mut zip = Self {
            z0,
            z1,
            slits,
            zeta_last,
            sign,
            center_h,
            angles: Vec::new(),
        };
        let mut angles = Vec::with_capacity(n);
        angles.push(0.0);
        for im in images.iter().skip(1) {
            let w = last_u(C::new(*im, 0.0), zeta_last);
            let d = zip.half_plane_to_disk(w * w * sign);
            angles.push(d.arg().rem_euclid(std::f64::consts::TAU));
        }
        zip.angles = angles;
        Ok(zip)
    }

    /// Disk angles of the boundary samples (first sample at angle 0).
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    fn half_plane_to_disk(&self, w: C) -> C {
        if w.re.is_infinite() || w.im.is_infinite() {
            return ONE;
        }
        (w - self.center_h) / (w - self.center_h.conj())
    }

    /// Domain point to disk point.
    pub fn to_disk(&self, z: C) -> C {
        let mut w = first_step(self.z0, self.z1, z);
        for s in &self.slits {
            w = s.forward(w);
        }
        let u = last_u(w, self.zeta_last);
        self.half_plane_to_disk(u * u * self.sign)
    }

    /// Disk point to domain point.
    pub fn from_disk(&self, d: C) -> C {
        let mut z = self.from_disk_head(d);
        for s in self.slits.iter().rev() {
            z = s.inverse(z);
        }
        self.from_disk_tail(z)
    }

    /// `from_disk` over many points. The points advance through the chain
    /// together, which hides the latency of each elementary map.
    pub fn from_disk_many(&self, ds: &[C]) -> Vec<C> {
        let mut zs: Vec<C> = ds.iter().map(|&d| self.from_disk_head(d)).collect();
        for s in self.slits.iter().rev() {
            for z in zs.iter_mut() {
                *z = s.inverse(*z);
            }
        }
        zs.into_iter().map(|z| self.from_disk_tail(z)).collect()
    }

    #[inline]
    fn from_disk_head(&self, d: C) -> C {
        let w = (self.center_h - d * self.center_h.conj()) / (ONE - d);
        let u = sqrt_h(w * self.sign, 1.0);
        u / (ONE + u / self.zeta_last)
    }

    #[inline]
    fn from_disk_tail(&self, z: C) -> C {
        let t = -(z * z);
        (t * self.z0 - self.z1) / (t - ONE)
    }
}

/// `i sqrt((z - z1) / (z - z0))`: the complement of the segment `[z0, z1]`
/// onto the upper half-plane, `z1 ↦ 0`, `z0 ↦ ∞`.
#[inline]
fn first_step(z0: C, z1: C, z: C) -> C {
    I * csqrt((z - z1) / (z - z0))
}

/// Möbius step sending the first sample's image to infinity.
#[inline]
fn last_u(w: C, zeta: f64) -> C {
    if w.re.is_infinite() {
        return C::new(-zeta, 0.0);
    }
    w / (ONE - w / zeta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn polygon(n: usize) -> Vec<C> {
        (0..n).map(|k| C::from_polar(1.0, TAU * k as f64 / n as f64)).collect()
    }

    #[test]
    fn algebraic_sqrt_matches_principal_branch() {
        for z in [C::new(3.0, 4.0), C::new(-3.0, 4.0), C::new(-3.0, -4.0), C::new(1e-3, -2.0), C::new(-5.0, 0.0), C::new(-5.0, -0.0)] {
            let (a, b) = (csqrt(z), z.sqrt());
            assert!((a - b).norm() < 1e-14 * b.norm().max(1.0), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn slit_roundtrip() {
        let s = Slit::new(C::new(0.3, 0.7)).unwrap();
        // The square root amplifies rounding right at the tip.
        assert!(s.forward(C::new(0.3, 0.7)).norm() < 1e-7);
        for z in [C::new(1.0, 2.0), C::new(-0.5, 0.1), C::new(3.0, 1e-3)] {
            let w = s.forward(z);
            assert!(w.im > 0.0);
            assert!((s.inverse(w) - z).norm() < 1e-12);
        }
    }

    #[test]
    fn disk_polygon_is_nearly_identity() {
        let zip = Zipper::build(&polygon(128), C::new(0.0, 0.0)).unwrap();
        let a = zip.angles();
        for k in 1..a.len() {
            assert!(a[k] > a[k - 1]);
        }
        for z in [C::new(0.3, 0.1), C::new(-0.5, 0.4), C::new(0.0, -0.8)] {
            let d = zip.to_disk(z);
            assert!((d.norm() - z.norm()).abs() < 2e-3, "{z} -> {d}");
            assert!((zip.from_disk(d) - z).norm() < 1e-10);
        }
        let ds = [C::new(0.1, 0.2), C::new(-0.7, 0.0), C::new(0.0, 0.95)];
        let many = zip.from_disk_many(&ds);
        for (d, m) in ds.iter().zip(&many) {
            assert_eq!(zip.from_disk(*d), *m);
        }
    }
}
