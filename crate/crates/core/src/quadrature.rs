//! Quadrature rules on curves: periodic trapezoid rules for closed analytic
//! curves, composite Gauss–Legendre panels otherwise, and adaptive panel
//! integration for singular and nearly singular kernels.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::geometry::{dist, Curve, CurveKind, Pt, Smoothness};
use crate::{Error, Result};

pub const PANEL_ORDER: usize = 16;
const MAX_DEPTH: usize = 60;

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub struct GlTable {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    /// barycentric interpolation weights
    pub bary: Vec<f64>,
}

pub fn gl16() -> &'static GlTable {
    static T: OnceLock<GlTable> = OnceLock::new();
    T.get_or_init(|| {
        let (x, w) = gauss_legendre(PANEL_ORDER);
        let bary = (0..PANEL_ORDER)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                s * ((1.0 - x[k] * x[k]) * w[k]).sqrt()
            })
            .collect();
        GlTable { x, w, bary }
    })
}

/// Lagrange basis through the panel nodes, evaluated at the reference point r.
pub fn lagrange_basis(r: f64) -> [f64; PANEL_ORDER] {
    let g = gl16();
    let mut out = [0.0; PANEL_ORDER];
    for k in 0..PANEL_ORDER {
        if r == g.x[k] {
            out[k] = 1.0;
            return out;
        }
    }
    let mut total = 0.0;
    for k in 0..PANEL_ORDER {
        out[k] = g.bary[k] / (r - g.x[k]);
        total += out[k];
    }
    for v in out.iter_mut() {
        *v /= total;
    }
    out
}

/// Derivative matrix on the reference panel: (D f)_i = f'(x_i).
pub fn panel_diff_matrix() -> &'static [[f64; PANEL_ORDER]; PANEL_ORDER] {
    static D: OnceLock<[[f64; PANEL_ORDER]; PANEL_ORDER]> = OnceLock::new();
    D.get_or_init(|| {
        let g = gl16();
        let mut d = [[0.0; PANEL_ORDER]; PANEL_ORDER];
        for i in 0..PANEL_ORDER {
            let mut diag = 0.0;
            for j in 0..PANEL_ORDER {
                if i != j {
                    d[i][j] = g.bary[j] / g.bary[i] / (g.x[i] - g.x[j]);
                    diag -= d[i][j];
                }
            }
            d[i][i] = diag;
        }
        d
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    pub x: Pt,
    pub normal: Pt,
    pub tangent: Pt,
    /// |dγ/dt|
    pub speed: f64,
    /// arc-length weight
    pub weight: f64,
    pub curvature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    Periodic,
    /// parameter intervals of the panels, PANEL_ORDER nodes each
    Panels(Vec<[f64; 2]>),
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub curve: Curve,
    pub nodes: Vec<Node>,
    pub layout: Layout,
    /// On-curve single-layer matrix for the log kernel S₂ (with arc-length weights folded in).
    pub singular_correction: Option<DMatrix<f64>>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.layout == Layout::Periodic
    }

    pub fn points(&self) -> Vec<Pt> {
        self.nodes.iter().map(|n| n.x).collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.nodes.iter().zip(f).map(|(n, v)| n.weight * v).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(&Node) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }

    pub fn length(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn panels(&self) -> &[[f64; 2]] {
        match &self.layout {
            Layout::Panels(p) => p,
            Layout::Periodic => &[],
        }
    }

    /// Largest distance between consecutive nodes.
    pub fn spacing(&self) -> f64 {
        let n = self.nodes.len();
        (0..n)
            .map(|i| dist(self.nodes[i].x, self.nodes[(i + 1) % n].x))
            .fold(0.0, f64::max)
    }

    /// Derivative with respect to arc length of a density sampled at the nodes.
    pub fn arc_derivative(&self, f: &[f64]) -> Vec<f64> {
        match &self.layout {
            Layout::Periodic => {
                let d = spectral_diff(self.len());
                let df = d * nalgebra::DVector::from_column_slice(f);
                df.iter().zip(&self.nodes).map(|(v, n)| v / n.speed).collect()
            }
            Layout::Panels(panels) => {
                let dm = panel_diff_matrix();
                let mut out = vec![0.0; f.len()];
                for (p, iv) in panels.iter().enumerate() {
                    let half = 0.5 * (iv[1] - iv[0]);
                    for i in 0..PANEL_ORDER {
                        let mut s = 0.0;
                        for j in 0..PANEL_ORDER {
                            s += dm[i][j] * f[p * PANEL_ORDER + j];
                        }
                        let n = &self.nodes[p * PANEL_ORDER + i];
                        out[p * PANEL_ORDER + i] = s / (half * n.speed);
                    }
                }
                out
            }
        }
    }
}

fn node_at(curve: &Curve, t: f64, weight_dt: f64) -> Node {
    let cp = curve.eval(t);
    Node {
        t,
        x: cp.x,
        normal: cp.normal(),
        tangent: cp.tangent(),
        speed: cp.speed(),
        weight: weight_dt * cp.speed(),
        curvature: cp.curvature(),
    }
}

/// Periodic trapezoid rule with n equispaced nodes.
pub fn closed_rule(curve: &Curve, n: usize) -> Result<QuadratureRule> {
    if curve.kind != CurveKind::Closed {
        return Err(Error::Quadrature("periodic rule needs a closed curve".into()));
    }
    if n < 8 || n % 2 == 1 {
        return Err(Error::Quadrature(format!("node count must be even and at least 8, got {n}")));
    }
    let nodes = (0..n).map(|j| node_at(curve, j as f64 / n as f64, 1.0 / n as f64)).collect();
    Ok(QuadratureRule { curve: curve.clone(), nodes, layout: Layout::Periodic, singular_correction: None })
}

/// Composite Gauss–Legendre rule on the given parameter intervals.
pub fn panel_rule(curve: &Curve, panels: Vec<[f64; 2]>) -> QuadratureRule {
    let g = gl16();
    let mut nodes = Vec::with_capacity(panels.len() * PANEL_ORDER);
    for iv in &panels {
        let half = 0.5 * (iv[1] - iv[0]);
        let mid = 0.5 * (iv[1] + iv[0]);
        for q in 0..PANEL_ORDER {
            nodes.push(node_at(curve, mid + half * g.x[q], half * g.w[q]));
        }
    }
    QuadratureRule { curve: curve.clone(), nodes, layout: Layout::Panels(panels), singular_correction: None }
}

fn sorted_breaks(mut b: Vec<f64>) -> Vec<f64> {
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(b.len());
    for v in b {
        if out.last().is_none_or(|l| v - l > 1e-12) {
            out.push(v);
        }
    }
    out
}

/// Graded composite rule on an open arc: panel ends at g(k/m), g(s) = s^q/(s^q + (1−s)^q),
/// plus the segment junctions of the curve.
pub fn open_arc_rule(curve: &Curve, n: usize, grading: f64) -> Result<QuadratureRule> {
    if curve.kind != CurveKind::OpenArc {
        return Err(Error::Quadrature("graded rule needs an open arc".into()));
    }
    if !(grading >= 1.0 && grading.is_finite()) {
        return Err(Error::Quadrature(format!("grading exponent must be at least 1, got {grading}")));
    }
    if n < 8 {
        return Err(Error::Quadrature(format!("node count must be at least 8, got {n}")));
    }
    let m = n.div_ceil(PANEL_ORDER);
    let mut b: Vec<f64> = (0..=m)
        .map(|k| {
            let s = k as f64 / m as f64;
            let a = s.powf(grading);
            let c = (1.0 - s).powf(grading);
            a / (a + c)
        })
        .collect();
    b.extend_from_slice(curve.breaks());
    let b = sorted_breaks(b);
    let panels = b.windows(2).map(|w| [w[0], w[1]]).collect();
    Ok(panel_rule(curve, panels))
}

fn panel_samples(curve: &Curve, iv: [f64; 2]) -> (f64, Vec<Pt>) {
    let g = gl16();
    let half = 0.5 * (iv[1] - iv[0]);
    let mid = 0.5 * (iv[1] + iv[0]);
    let mut len = 0.0;
    let mut pts = Vec::with_capacity(PANEL_ORDER);
    for q in 0..PANEL_ORDER {
        let cp = curve.eval(mid + half * g.x[q]);
        len += half * g.w[q] * cp.speed();
        pts.push(cp.x);
    }
    (len, pts)
}

/// A refinement target: panels within reach of `point` are split until their
/// length is below `ratio`·distance, but not below `h_min`.
#[derive(Debug, Clone, Copy)]
pub struct Focus {
    pub point: Pt,
    pub ratio: f64,
    pub h_min: f64,
}

/// Composite rule on any curve: starts from the segment pieces and bisects panels
/// longer than `h_max` or too long relative to their distance to a focus point.
pub fn refined_panel_rule(curve: &Curve, h_max: f64, focus: &[Focus]) -> QuadratureRule {
    let mut stack: Vec<[f64; 2]> =
        curve.breaks().windows(2).rev().map(|w| [w[0], w[1]]).collect();
    let mut panels = Vec::new();
    while let Some(iv) = stack.pop() {
        let (len, pts) = panel_samples(curve, iv);
        let mut split = len > h_max;
        for f in focus {
            let d = pts.iter().map(|p| dist(*p, f.point)).fold(f64::INFINITY, f64::min);
            if len > f.h_min && len > f.ratio * d {
                split = true;
            }
        }
        if split && iv[1] - iv[0] > 1e-13 {
            let m = 0.5 * (iv[0] + iv[1]);
            stack.push([m, iv[1]]);
            stack.push([iv[0], m]);
        } else {
            panels.push(iv);
        }
    }
    panel_rule(curve, panels)
}

/// Rule for a closed curve: periodic when analytic, refined panels otherwise.
pub fn auto_closed_rule(curve: &Curve, n: usize) -> Result<QuadratureRule> {
    match curve.smoothness {
        Smoothness::Analytic => closed_rule(curve, n),
        Smoothness::PiecewiseSmooth => {
            let h = curve.length() * PANEL_ORDER as f64 / n as f64;
            Ok(refined_panel_rule(curve, h, &[]))
        }
    }
}

/// Kress weights R_k for the kernel log(4 sin²((θ_i − θ_j)/2)), k = (i − j) mod n.
fn kress_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    (0..n)
        .map(|k| {
            let d = 2.0 * PI * k as f64 / n as f64;
            let mut s = 0.0;
            for m in 1..half {
                s += (m as f64 * d).cos() / m as f64;
            }
            let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
            -4.0 * PI / n as f64 * s - 4.0 * PI / (n * n) as f64 * alt
        })
        .collect()
}

/// Product-quadrature matrix for (1/2π)∫ log|x_i − y| φ(y) dσ_y on a periodic rule.
pub fn log_singular_weights(rule: &QuadratureRule) -> Result<QuadratureRule> {
    if !rule.is_periodic() {
        return Err(Error::Quadrature("log-singular product rule needs a periodic closed rule".into()));
    }
    let n = rule.len();
    let r = kress_weights(n);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let xi = &rule.nodes[i];
        for j in 0..n {
            let yj = &rule.nodes[j];
            // |dx/dθ| with θ = 2πt
            let sp = yj.speed / (2.0 * PI);
            let l2 = if i == j {
                (sp * sp).ln()
            } else {
                let d = PI * (i as f64 - j as f64) / n as f64;
                let s = d.sin();
                let r2 = (xi.x[0] - yj.x[0]).powi(2) + (xi.x[1] - yj.x[1]).powi(2);
                (r2 / (4.0 * s * s)).ln()
            };
            let k = (i + n - j) % n;
            m[(i, j)] = sp / (4.0 * PI) * (r[k] + 2.0 * PI / n as f64 * l2);
        }
    }
    let mut out = rule.clone();
    out.singular_correction = Some(m);
    Ok(out)
}

/// Spectral derivative matrix with respect to t ∈ [0,1) on n equispaced nodes.
pub fn spectral_diff(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let k = i as f64 - j as f64;
            let sgn = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            PI * sgn / (PI * k / n as f64).tan()
        }
    })
}

/// Trigonometric cardinal functions L_j(t) on n equispaced nodes.
pub fn periodic_cardinal(n: usize, t: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let d = PI * (t - j as f64 / n as f64);
            let s = d.sin();
            if s.abs() < 1e-14 {
                1.0
            } else {
                (n as f64 * d).sin() * d.cos() / (s * n as f64)
            }
        })
        .collect()
}

/// Weights of ∫ K(y, ν_y) φ(y) dσ_y for a periodic rule, integrating on an
/// m-times finer grid with φ trigonometrically interpolated.
pub fn periodic_upsampled_row<const M: usize>(
    rule: &QuadratureRule,
    m: usize,
    kern: &dyn Fn(Pt, Pt) -> [f64; M],
) -> Vec<[f64; M]> {
    let n = rule.len();
    let nf = n * m;
    let mut out = vec![[0.0; M]; n];
    for f in 0..nf {
        let t = f as f64 / nf as f64;
        let cp = rule.curve.eval(t);
        let w = cp.speed() / nf as f64;
        let k = kern(cp.x, cp.normal());
        if f % m == 0 {
            let j = f / m;
            for c in 0..M {
                out[j][c] += w * k[c];
            }
        } else {
            let l = periodic_cardinal(n, t);
            for j in 0..n {
                for c in 0..M {
                    out[j][c] += w * k[c] * l[j];
                }
            }
        }
    }
    out
}

/// Upsampling factor needed for a target at distance d from a periodic rule.
pub fn upsample_factor(rule: &QuadratureRule, d: f64) -> usize {
    let h = rule.spacing();
    if d >= 6.0 * h {
        1
    } else {
        ((6.0 * h / d.max(1e-300)).ceil() as usize).clamp(2, 512)
    }
}

/// Weights W_k (per output component) such that ∫_panel K(y, ν_y) φ(y) dσ_y ≈ Σ_k W_k φ_k,
/// with φ the polynomial interpolant of its values at the panel nodes. Subintervals closer
/// than their own length to a point of `sing` are bisected; `split` (a reference coordinate)
/// forces a cut there, used when the singular point lies on the panel.
pub fn panel_weights<const M: usize>(
    curve: &Curve,
    iv: [f64; 2],
    kern: &dyn Fn(Pt, Pt) -> [f64; M],
    sing: &[Pt],
    split: Option<f64>,
) -> [[f64; M]; PANEL_ORDER] {
    let mut out = [[0.0; M]; PANEL_ORDER];
    let (len, pts) = panel_samples(curve, iv);
    // below this, nodes collide with the target in floating point
    let scale = pts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(1.0, f64::max);
    let floor = (1e-12 * len).max(1e-11 * scale);
    match split {
        Some(r) => {
            adapt(curve, iv, -1.0, r, kern, sing, 0, floor, &mut out);
            adapt(curve, iv, r, 1.0, kern, sing, 0, floor, &mut out);
        }
        None => adapt(curve, iv, -1.0, 1.0, kern, sing, 0, floor, &mut out),
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn adapt<const M: usize>(
    curve: &Curve,
    iv: [f64; 2],
    ra: f64,
    rb: f64,
    kern: &dyn Fn(Pt, Pt) -> [f64; M],
    sing: &[Pt],
    depth: usize,
    floor: f64,
    out: &mut [[f64; M]; PANEL_ORDER],
) {
    let g = gl16();
    let half = 0.5 * (iv[1] - iv[0]);
    let mid = 0.5 * (iv[1] + iv[0]);
    let sub = 0.5 * (rb - ra);
    let mut pts = [[0.0; 2]; PANEL_ORDER];
    let mut nus = [[0.0; 2]; PANEL_ORDER];
    let mut ws = [0.0; PANEL_ORDER];
    let mut len = 0.0;
    let mut dmin = f64::INFINITY;
    for q in 0..PANEL_ORDER {
        let r = ra + sub * (1.0 + g.x[q]);
        let cp = curve.eval(mid + half * r);
        pts[q] = cp.x;
        nus[q] = cp.normal();
        ws[q] = g.w[q] * sub * half * cp.speed();
        len += ws[q];
        for s in sing {
            dmin = dmin.min(dist(cp.x, *s));
        }
    }
    if depth < MAX_DEPTH && dmin < len && len > floor {
        let rm = 0.5 * (ra + rb);
        adapt(curve, iv, ra, rm, kern, sing, depth + 1, floor, out);
        adapt(curve, iv, rm, rb, kern, sing, depth + 1, floor, out);
        return;
    }
    let top = ra == -1.0 && rb == 1.0;
    for q in 0..PANEL_ORDER {
        let k = kern(pts[q], nus[q]);
        if top {
            for c in 0..M {
                out[q][c] += ws[q] * k[c];
            }
        } else {
            let basis = lagrange_basis(ra + sub * (1.0 + g.x[q]));
            for (j, b) in basis.iter().enumerate() {
                for c in 0..M {
                    out[j][c] += ws[q] * k[c] * b;
                }
            }
        }
    }
}
