//! Half-plane minus a disk, solved through a Möbius map onto an annulus.
//!
//! Domain: x₂ > 0 outside the disk of centre (0, ε₁) and radius ε₁ε₂; data 0 on
//! the axis and gⁱ((x − ε₁e₂)/(ε₁ε₂)) on the circle.

use std::f64::consts::PI;

use crate::geometry::{BoundaryData, Pt};
use crate::{Error, Result};

/// (a, ρ): pole height of the map z ↦ (z − ia)/(z + ia) and inner radius of the image annulus.
pub fn mobius_params(eps: (f64, f64)) -> Result<(f64, f64)> {
    let (e1, e2) = eps;
    if !(e1 > 0.0 && e1.is_finite()) {
        return Err(Error::Inadmissible(format!("eps1 must be positive, got {e1}")));
    }
    if !(e2 > 0.0 && e2 < 1.0) {
        return Err(Error::Inadmissible(format!("eps2 must lie in (0, 1), got {e2}")));
    }
    let c = (1.0 - e2 * e2).sqrt();
    let a = e1 * c;
    let rho = ((1.0 - c) / (1.0 + c)).sqrt();
    // the hole circle must land on |w| = ρ
    for k in 0..64 {
        let t = 2.0 * PI * k as f64 / 64.0;
        let x = [e1 * e2 * t.cos(), e1 + e1 * e2 * t.sin()];
        let r = norm_c(mobius(a, x));
        if (r - rho).abs() > 1e-12 * (1.0 + rho) {
            return Err(Error::Geometry(format!("circle image radius {r} differs from {rho}")));
        }
    }
    Ok((a, rho))
}

fn norm_c(w: [f64; 2]) -> f64 {
    w[0].hypot(w[1])
}

/// φ_a(z) = (z − ia)/(z + ia)
pub fn mobius(a: f64, z: Pt) -> [f64; 2] {
    let (nr, ni) = (z[0], z[1] - a);
    let (dr, di) = (z[0], z[1] + a);
    let d = dr * dr + di * di;
    [(nr * dr + ni * di) / d, (ni * dr - nr * di) / d]
}

/// z = ia(1 + w)/(1 − w)
pub fn mobius_inverse(a: f64, w: [f64; 2]) -> Pt {
    let (nr, ni) = (1.0 + w[0], w[1]);
    let (dr, di) = (1.0 - w[0], -w[1]);
    let d = dr * dr + di * di;
    let (qr, qi) = ((nr * dr + ni * di) / d, (ni * dr - nr * di) / d);
    [-a * qi, a * qr]
}

fn check_domain(eps: (f64, f64), x: Pt) -> Result<()> {
    let r = x[0].hypot(x[1] - eps.0);
    if x[1] < 0.0 || r < eps.0 * eps.1 * (1.0 - 1e-14) {
        return Err(Error::OutsideDomain(format!("{x:?} is not in the perforated half-plane")));
    }
    Ok(())
}

/// Solution for gⁱ = 1: log|φ_a(x)| / log ρ.
pub fn toy_closed_form(eps: (f64, f64), x: Pt) -> Result<f64> {
    let (a, rho) = mobius_params(eps)?;
    check_domain(eps, x)?;
    Ok(norm_c(mobius(a, x)).ln() / rho.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyConfig {
    pub eps: (f64, f64),
    pub g_inner: BoundaryData,
    /// Fourier truncation
    pub k: usize,
}

impl ToyConfig {
    pub fn new(eps: (f64, f64), g_inner: BoundaryData) -> ToyConfig {
        ToyConfig { eps, g_inner, k: 64 }
    }
}

#[derive(Debug, Clone)]
pub struct ToySolution {
    pub eps: (f64, f64),
    pub a: f64,
    pub rho: f64,
    pub a0: f64,
    pub ak: Vec<f64>,
    pub bk: Vec<f64>,
    /// largest coefficient magnitude among the last quarter of modes
    pub tail: f64,
}

/// Fourier coefficients of the pulled-back data, by the trapezoid rule on 4K points.
pub fn toy_solution(cfg: &ToyConfig) -> Result<ToySolution> {
    if cfg.k < 4 {
        return Err(Error::Config(format!("Fourier truncation must be at least 4, got {}", cfg.k)));
    }
    let (a, rho) = mobius_params(cfg.eps)?;
    let (e1, e2) = cfg.eps;
    let m = 4 * cfg.k;
    let samples: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            let z = mobius_inverse(a, [rho * t.cos(), rho * t.sin()]);
            let xh = [z[0] / (e1 * e2), (z[1] - e1) / (e1 * e2)];
            (t, cfg.g_inner.value(xh))
        })
        .collect();
    let a0 = samples.iter().map(|s| s.1).sum::<f64>() / m as f64;
    let mut ak = Vec::with_capacity(cfg.k);
    let mut bk = Vec::with_capacity(cfg.k);
    for k in 1..=cfg.k {
        let kf = k as f64;
        ak.push(2.0 / m as f64 * samples.iter().map(|(t, g)| g * (kf * t).cos()).sum::<f64>());
        bk.push(2.0 / m as f64 * samples.iter().map(|(t, g)| g * (kf * t).sin()).sum::<f64>());
    }
    let q = (3 * cfg.k) / 4;
    let tail = ak[q..].iter().chain(&bk[q..]).fold(0.0f64, |t, v| t.max(v.abs()));
    Ok(ToySolution { eps: cfg.eps, a, rho, a0, ak, bk, tail })
}

impl ToySolution {
    /// Errors when the coefficient tail exceeds `tol` relative to the data scale.
    pub fn check_tail(&self, tol: f64) -> Result<()> {
        let scale = self.a0.abs().max(self.ak.iter().chain(&self.bk).fold(0.0f64, |t, v| t.max(v.abs())));
        if self.tail > tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Config(format!(
                "Fourier tail {:e} above tolerance {tol:e}; raise the truncation",
                self.tail
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: Pt) -> Result<f64> {
        check_domain(self.eps, x)?;
        let w = mobius(self.a, x);
        let r = norm_c(w).min(1.0);
        let th = w[1].atan2(w[0]);
        let mut u = self.a0 * r.ln() / self.rho.ln();
        let q = self.rho / r;
        for k in 1..=self.ak.len() {
            let kf = k as f64;
            let radial = q.powi(k as i32) * (1.0 - r.powf(2.0 * kf)) / (1.0 - self.rho.powf(2.0 * kf));
            u += (self.ak[k - 1] * (kf * th).cos() + self.bk[k - 1] * (kf * th).sin()) * radial;
        }
        Ok(u)
    }
}
