//! Fundamental solution of the Laplacian, the half-space Green's function and
//! the reflection across the boundary hyperplane.

use std::f64::consts::PI;

use crate::geometry::Pt;
use crate::{Error, Result};

/// Points closer than this to a singular configuration are rejected.
pub const SINGULAR_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue<const N: usize> {
    pub value: f64,
    pub grad_x: [f64; N],
    pub grad_y: [f64; N],
}

/// Surface measure of the unit sphere in dimension `n` (2π or 4π).
pub fn sphere_measure(n: usize) -> Result<f64> {
    match n {
        2 => Ok(2.0 * PI),
        3 => Ok(4.0 * PI),
        _ => Err(Error::Dimension(n)),
    }
}

pub fn reflection<const N: usize>(x: [f64; N]) -> [f64; N] {
    let mut r = x;
    r[N - 1] = -r[N - 1];
    r
}

fn norm<const N: usize>(x: &[f64; N]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn sub<const N: usize>(a: &[f64; N], b: &[f64; N]) -> [f64; N] {
    let mut r = [0.0; N];
    for i in 0..N {
        r[i] = a[i] - b[i];
    }
    r
}

/// S_n(x) with its gradient. `grad_y` is the gradient of y ↦ S_n(x − y) at y = 0.
pub fn fundamental_solution<const N: usize>(x: [f64; N]) -> Result<KernelValue<N>> {
    let sn = sphere_measure(N)?;
    let r = norm(&x);
    if r < SINGULAR_GUARD {
        return Err(Error::Singular(format!("fundamental solution at |x| = {r:e}")));
    }
    let value = match N {
        2 => r.ln() / sn,
        _ => r.powi(2 - N as i32) / ((2.0 - N as f64) * sn),
    };
    let scale = 1.0 / (sn * r.powi(N as i32));
    let mut grad_x = [0.0; N];
    let mut grad_y = [0.0; N];
    for i in 0..N {
        grad_x[i] = x[i] * scale;
        grad_y[i] = -grad_x[i];
    }
    Ok(KernelValue { value, grad_x, grad_y })
}

/// G(x, y) = S_n(x − y) − S_n(ς(x) − y) with gradients in both arguments.
pub fn green_kernel<const N: usize>(x: [f64; N], y: [f64; N]) -> Result<KernelValue<N>> {
    let rx = reflection(x);
    if norm(&sub(&x, &y)) < SINGULAR_GUARD || norm(&sub(&rx, &y)) < SINGULAR_GUARD {
        return Err(Error::Singular("coincident or mirror-coincident points".into()));
    }
    let direct = fundamental_solution(sub(&x, &y))?;
    let image = fundamental_solution(sub(&rx, &y))?;
    let mut grad_x = [0.0; N];
    let mut grad_y = [0.0; N];
    for i in 0..N {
        grad_x[i] = direct.grad_x[i] - image.grad_x[i];
        grad_y[i] = -direct.grad_x[i] + image.grad_x[i];
    }
    grad_x[N - 1] = direct.grad_x[N - 1] + image.grad_x[N - 1];
    Ok(KernelValue { value: direct.value - image.value, grad_x, grad_y })
}

// Unchecked planar versions for assembly loops.

const INV_4PI: f64 = 0.25 / PI;
const INV_2PI: f64 = 0.5 / PI;

#[inline]
pub fn refl(x: Pt) -> Pt {
    [x[0], -x[1]]
}

#[inline]
pub fn s2(z: Pt) -> f64 {
    (z[0] * z[0] + z[1] * z[1]).ln() * INV_4PI
}

#[inline]
pub fn grad_s2(z: Pt) -> Pt {
    let r2 = z[0] * z[0] + z[1] * z[1];
    [z[0] * INV_2PI / r2, z[1] * INV_2PI / r2]
}

/// Hessian of S₂ as [h11, h12, h22].
#[inline]
pub fn hess_s2(z: Pt) -> [f64; 3] {
    let r2 = z[0] * z[0] + z[1] * z[1];
    let c = INV_2PI / (r2 * r2);
    [
        c * (r2 - 2.0 * z[0] * z[0]),
        -2.0 * c * z[0] * z[1],
        c * (r2 - 2.0 * z[1] * z[1]),
    ]
}

#[inline]
pub fn green2(x: Pt, y: Pt) -> f64 {
    let d = [x[0] - y[0], x[1] - y[1]];
    let m = [x[0] - y[0], -x[1] - y[1]];
    ((d[0] * d[0] + d[1] * d[1]) / (m[0] * m[0] + m[1] * m[1])).ln() * INV_4PI
}

/// ∇_x G(x, y) in the plane.
#[inline]
pub fn green2_grad_x(x: Pt, y: Pt) -> Pt {
    let a = grad_s2([x[0] - y[0], x[1] - y[1]]);
    let b = grad_s2([x[0] - y[0], -x[1] - y[1]]);
    [a[0] - b[0], a[1] + b[1]]
}

/// ∇_y G(x, y) in the plane.
#[inline]
pub fn green2_grad_y(x: Pt, y: Pt) -> Pt {
    let a = grad_s2([x[0] - y[0], x[1] - y[1]]);
    let b = grad_s2([x[0] - y[0], -x[1] - y[1]]);
    [-a[0] + b[0], -a[1] + b[1]]
}
