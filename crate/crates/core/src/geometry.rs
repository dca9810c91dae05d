//! Boundary curves, the outer domain and problem configuration.

use std::f64::consts::PI;

use crate::{Error, Result};

pub type Pt = [f64; 2];

#[inline]
pub fn dot(a: Pt, b: Pt) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Pt) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Pt, b: Pt) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { a: Pt, b: Pt },
    Arc { center: Pt, radius: f64, theta0: f64, theta1: f64 },
    Ellipse { a: f64, b: f64 },
    Kite,
}

impl Segment {
    /// Position and first two derivatives with respect to the local parameter s ∈ [0,1].
    fn eval(&self, s: f64) -> (Pt, Pt, Pt) {
        match *self {
            Segment::Line { a, b } => {
                let d = [b[0] - a[0], b[1] - a[1]];
                ([a[0] + s * d[0], a[1] + s * d[1]], d, [0.0, 0.0])
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                let dt = theta1 - theta0;
                let th = theta0 + s * dt;
                let (sn, cs) = th.sin_cos();
                (
                    [center[0] + radius * cs, center[1] + radius * sn],
                    [-radius * dt * sn, radius * dt * cs],
                    [-radius * dt * dt * cs, -radius * dt * dt * sn],
                )
            }
            Segment::Ellipse { a, b } => {
                let w = 2.0 * PI;
                let (sn, cs) = (w * s).sin_cos();
                ([a * cs, b * sn], [-a * w * sn, b * w * cs], [-a * w * w * cs, -b * w * w * sn])
            }
            Segment::Kite => {
                let w = 2.0 * PI;
                let th = w * s;
                let (s1, c1) = th.sin_cos();
                let (s2, c2) = (2.0 * th).sin_cos();
                (
                    [c1 + 0.65 * c2 - 0.65, 1.5 * s1],
                    [w * (-s1 - 1.3 * s2), w * 1.5 * c1],
                    [w * w * (-c1 - 2.6 * c2), -w * w * 1.5 * s1],
                )
            }
        }
    }

    fn is_periodic(&self) -> bool {
        matches!(self, Segment::Ellipse { .. } | Segment::Kite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Closed,
    OpenArc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Analytic,
    PiecewiseSmooth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: Pt,
    /// dγ/dt
    pub d1: Pt,
    /// d²γ/dt²
    pub d2: Pt,
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        norm(self.d1)
    }

    pub fn tangent(&self) -> Pt {
        let s = self.speed();
        [self.d1[0] / s, self.d1[1] / s]
    }

    /// Outward normal for positively oriented curves.
    pub fn normal(&self) -> Pt {
        let s = self.speed();
        [self.d1[1] / s, -self.d1[0] / s]
    }

    pub fn curvature(&self) -> f64 {
        let s = self.speed();
        (self.d1[0] * self.d2[1] - self.d1[1] * self.d2[0]) / (s * s * s)
    }
}

/// Piecewise-parametrized curve on t ∈ [0,1], followed by the affine map x ↦ shift + scale·x.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub kind: CurveKind,
    pub smoothness: Smoothness,
    segments: Vec<Segment>,
    breaks: Vec<f64>,
    shift: Pt,
    scale: f64,
    /// Hölder exponent of the boundary class; carried along but unused numerically.
    pub holder_alpha: Option<f64>,
}

impl Curve {
    fn from_segments(kind: CurveKind, segments: Vec<Segment>) -> Curve {
        let smoothness = if segments.len() == 1 && segments[0].is_periodic() {
            Smoothness::Analytic
        } else {
            Smoothness::PiecewiseSmooth
        };
        let lengths: Vec<f64> = segments.iter().map(segment_length).collect();
        let total: f64 = lengths.iter().sum();
        let mut breaks = vec![0.0];
        let mut acc = 0.0;
        for l in &lengths {
            acc += l;
            breaks.push(acc / total);
        }
        *breaks.last_mut().unwrap() = 1.0;
        Curve {
            kind,
            smoothness,
            segments,
            breaks,
            shift: [0.0, 0.0],
            scale: 1.0,
            holder_alpha: None,
        }
    }

    /// Parameter values where the curve switches segment, including 0 and 1.
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        let t = if self.kind == CurveKind::Closed { t.rem_euclid(1.0) } else { t };
        let k = self.locate(t);
        let (t0, t1) = (self.breaks[k], self.breaks[k + 1]);
        let h = t1 - t0;
        let (x, d1, d2) = self.segments[k].eval((t - t0) / h);
        let c = self.scale;
        CurvePoint {
            x: [self.shift[0] + c * x[0], self.shift[1] + c * x[1]],
            d1: [c * d1[0] / h, c * d1[1] / h],
            d2: [c * d2[0] / (h * h), c * d2[1] / (h * h)],
        }
    }

    /// Index of the segment containing t (right-continuous, last segment at t = 1).
    pub fn locate(&self, t: f64) -> usize {
        let n = self.segments.len();
        let t = if self.kind == CurveKind::Closed { t.rem_euclid(1.0) } else { t };
        (0..n).find(|&k| t < self.breaks[k + 1]).unwrap_or(n - 1)
    }

    pub fn point(&self, t: f64) -> Pt {
        self.eval(t).x
    }

    pub fn normal(&self, t: f64) -> Pt {
        self.eval(t).normal()
    }

    pub fn tangent(&self, t: f64) -> Pt {
        self.eval(t).tangent()
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.eval(t).speed()
    }

    pub fn length(&self) -> f64 {
        self.scale * self.segments.iter().map(segment_length).sum::<f64>()
    }

    pub fn start(&self) -> Pt {
        self.point(0.0)
    }

    pub fn end(&self) -> Pt {
        self.point(1.0)
    }

    /// Image under x ↦ shift + scale·x.
    pub fn affine(&self, shift: Pt, scale: f64) -> Curve {
        let mut c = self.clone();
        c.shift = [shift[0] + scale * self.shift[0], shift[1] + scale * self.shift[1]];
        c.scale = scale * self.scale;
        c
    }

    /// Points at n equispaced parameter values.
    pub fn sample(&self, n: usize) -> Vec<Pt> {
        (0..n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    /// Winding number of a closed curve around x, from a fine polygon.
    pub fn winding_number(&self, x: Pt) -> f64 {
        let pts = self.sample(2048);
        winding(&pts, x)
    }
}

fn winding(poly: &[Pt], x: Pt) -> f64 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = [poly[i][0] - x[0], poly[i][1] - x[1]];
        let b = [poly[(i + 1) % n][0] - x[0], poly[(i + 1) % n][1] - x[1]];
        total += (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b));
    }
    total / (2.0 * PI)
}

fn segment_length(seg: &Segment) -> f64 {
    match *seg {
        Segment::Line { a, b } => dist(a, b),
        Segment::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        _ => {
            // periodic trapezoid rule is spectrally accurate here
            let n = 4096;
            (0..n).map(|i| norm(seg.eval(i as f64 / n as f64).1)).sum::<f64>() / n as f64
        }
    }
}

/// Named shapes. Closed shapes are positively oriented; arcs run from the right
/// axis endpoint to the left one so that the closed outer boundary is positive.
pub fn make_shape(name: &str, params: &[f64]) -> Result<Curve> {
    let get = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
    let positive = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Geometry(format!("{what} must be positive, got {v}")))
        }
    };
    match name {
        "disk" => {
            let r = positive(get(0, 1.0), "radius")?;
            Ok(Curve::from_segments(CurveKind::Closed, vec![Segment::Ellipse { a: r, b: r }]))
        }
        "ellipse" => {
            let a = positive(get(0, 2.0), "semi-axis")?;
            let b = positive(get(1, 1.0), "semi-axis")?;
            Ok(Curve::from_segments(CurveKind::Closed, vec![Segment::Ellipse { a, b }]))
        }
        "kite" => {
            let s = positive(get(0, 1.0), "scale")?;
            Ok(Curve::from_segments(CurveKind::Closed, vec![Segment::Kite]).affine([0.0, 0.0], s))
        }
        "stadium-arc" => {
            let l = positive(get(0, 2.0), "half-length")?;
            let r = positive(get(1, 1.0), "radius")?;
            Ok(Curve::from_segments(
                CurveKind::OpenArc,
                vec![
                    Segment::Arc { center: [l, r], radius: r, theta0: -0.5 * PI, theta1: 0.5 * PI },
                    Segment::Line { a: [l, 2.0 * r], b: [-l, 2.0 * r] },
                    Segment::Arc { center: [-l, r], radius: r, theta0: 0.5 * PI, theta1: 1.5 * PI },
                ],
            ))
        }
        "dome-arc" => {
            let r = positive(get(0, 1.0), "radius")?;
            Ok(Curve::from_segments(
                CurveKind::OpenArc,
                vec![Segment::Arc { center: [0.0, 0.0], radius: r, theta0: 0.0, theta1: PI }],
            ))
        }
        _ => Err(Error::Geometry(format!("unknown shape '{name}'"))),
    }
}

/// ω_ε = ε₁p + ε₁ε₂ω.
pub fn scale_hole(hole: &Curve, p: Pt, eps: (f64, f64)) -> Result<Curve> {
    if !(eps.0 > 0.0 && eps.1 > 0.0) {
        return Err(Error::Geometry(format!("scale factors must be positive, got {eps:?}")));
    }
    Ok(hole.affine([eps.0 * p[0], eps.0 * p[1]], eps.0 * eps.1))
}

/// The outer domain: the arc ∂₊Ω together with the flat part [left, right] × {0}.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterDomain {
    pub arc: Curve,
    pub left: f64,
    pub right: f64,
}

impl OuterDomain {
    pub fn from_arc(arc: Curve) -> Result<OuterDomain> {
        if arc.kind != CurveKind::OpenArc {
            return Err(Error::Geometry("outer boundary must be an open arc".into()));
        }
        let (a, b) = (arc.start(), arc.end());
        if a[1].abs() > 1e-12 || b[1].abs() > 1e-12 {
            return Err(Error::Geometry("arc endpoints must lie on the axis".into()));
        }
        if !(b[0] < 0.0 && 0.0 < a[0]) {
            return Err(Error::Geometry("the origin must lie strictly inside the flat part".into()));
        }
        Ok(OuterDomain { left: b[0], right: a[0], arc })
    }

    /// The full closed boundary: flat segment followed by the arc.
    pub fn closed_boundary(&self) -> Curve {
        let mut segs = vec![Segment::Line { a: [self.left, 0.0], b: [self.right, 0.0] }];
        segs.extend(self.arc.segments.iter().copied());
        let mut c = Curve::from_segments(CurveKind::Closed, segs);
        c.shift = self.arc.shift;
        c.scale = self.arc.scale;
        if self.arc.shift != [0.0, 0.0] || self.arc.scale != 1.0 {
            // the flat segment was given in physical coordinates
            let inv = 1.0 / self.arc.scale;
            c.segments[0] = Segment::Line {
                a: [(self.left - self.arc.shift[0]) * inv, -self.arc.shift[1] * inv],
                b: [(self.right - self.arc.shift[0]) * inv, -self.arc.shift[1] * inv],
            };
        }
        c
    }

    pub fn contains(&self, x: Pt) -> bool {
        x[1] > 0.0 && self.closed_boundary().winding_number(x).abs() > 0.5
    }

    /// Distance from x to ∂Ω.
    pub fn distance_to_boundary(&self, x: Pt) -> f64 {
        let flat = if x[0] < self.left {
            dist(x, [self.left, 0.0])
        } else if x[0] > self.right {
            dist(x, [self.right, 0.0])
        } else {
            x[1].abs()
        };
        flat.min(distance_to_curve(&self.arc, x))
    }
}

/// Distance from x to a curve by sampling followed by golden-section refinement.
pub fn distance_to_curve(c: &Curve, x: Pt) -> f64 {
    let n = 1024;
    let f = |t: f64| dist(c.point(t.clamp(0.0, 1.0)), x);
    let (mut best, mut tb) = (f64::INFINITY, 0.0);
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let d = f(t);
        if d < best {
            best = d;
            tb = t;
        }
    }
    let h = 1.0 / n as f64;
    let (mut a, mut b) = (tb - h, tb + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c1 = b - g * (b - a);
        let c2 = a + g * (b - a);
        if f(c1) < f(c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    best.min(f(0.5 * (a + b)))
}

/// Built-in boundary data, all of them restrictions of simple functions of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryData {
    Constant(f64),
    /// x ↦ x₂
    X2,
    /// x ↦ x₁/|x|
    CosTheta,
    /// x ↦ x₁x₂
    X1X2,
    /// x ↦ x₁² − x₂²
    ReZ2,
}

impl BoundaryData {
    pub fn parse(s: &str) -> Result<BoundaryData> {
        let s = s.trim();
        match s {
            "zero" => Ok(BoundaryData::Constant(0.0)),
            "x2" => Ok(BoundaryData::X2),
            "cos" | "cos_theta" => Ok(BoundaryData::CosTheta),
            "x1x2" => Ok(BoundaryData::X1X2),
            "re_z2" => Ok(BoundaryData::ReZ2),
            _ => {
                if let Some(v) = s.strip_prefix("constant:") {
                    v.trim()
                        .parse::<f64>()
                        .map(BoundaryData::Constant)
                        .map_err(|_| Error::Config(format!("bad constant in data spec '{s}'")))
                } else if s == "constant" {
                    Ok(BoundaryData::Constant(1.0))
                } else {
                    Err(Error::Config(format!("unknown boundary data '{s}'")))
                }
            }
        }
    }

    pub fn value(&self, x: Pt) -> f64 {
        match *self {
            BoundaryData::Constant(c) => c,
            BoundaryData::X2 => x[1],
            BoundaryData::CosTheta => x[0] / norm(x),
            BoundaryData::X1X2 => x[0] * x[1],
            BoundaryData::ReZ2 => x[0] * x[0] - x[1] * x[1],
        }
    }

    pub fn gradient(&self, x: Pt) -> Pt {
        match *self {
            BoundaryData::Constant(_) => [0.0, 0.0],
            BoundaryData::X2 => [0.0, 1.0],
            BoundaryData::CosTheta => {
                let r2 = dot(x, x);
                let r3 = r2 * r2.sqrt();
                [x[1] * x[1] / r3, -x[0] * x[1] / r3]
            }
            BoundaryData::X1X2 => [x[1], x[0]],
            BoundaryData::ReZ2 => [2.0 * x[0], -2.0 * x[1]],
        }
    }

    /// Whether the function is harmonic in the whole plane.
    pub fn is_harmonic(&self) -> bool {
        !matches!(self, BoundaryData::CosTheta)
    }

    pub fn is_zero(&self) -> bool {
        *self == BoundaryData::Constant(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct ProblemConfig {
    pub outer: OuterDomain,
    /// Reference hole ω, containing the origin.
    pub hole: Curve,
    pub p: Pt,
    pub eps: (f64, f64),
    pub g_outer: BoundaryData,
    /// Data on ∂ω in the hole frame.
    pub g_inner: BoundaryData,
}

impl ProblemConfig {
    pub fn scaled_hole(&self) -> Result<Curve> {
        scale_hole(&self.hole, self.p, self.eps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    pub ok: bool,
    pub clearance: f64,
    pub reasons: Vec<String>,
}

/// Clearance required, relative to ε₁.
pub const DEFAULT_CLEARANCE: f64 = 1e-6;

pub fn check_admissible(cfg: &ProblemConfig) -> Admissibility {
    check_admissible_with(cfg, 512, DEFAULT_CLEARANCE)
}

pub fn check_admissible_with(cfg: &ProblemConfig, samples: usize, margin: f64) -> Admissibility {
    let mut reasons = Vec::new();
    let (e1, e2) = cfg.eps;
    if !(e1 > 0.0 && e2 > 0.0) {
        reasons.push(format!("non-positive parameters {:?}", cfg.eps));
    }
    if e1 * e2 >= 1.0 {
        reasons.push(format!("eps1*eps2 = {} is not below 1", e1 * e2));
    }
    if cfg.p[1] <= 0.0 {
        reasons.push("anchor point must lie in the upper half-plane".into());
    }
    if cfg.hole.winding_number([0.0, 0.0]).abs() < 0.5 {
        reasons.push("origin is not inside the reference hole".into());
    }
    let mut clearance = f64::NAN;
    if reasons.is_empty() {
        let hole = scale_hole(&cfg.hole, cfg.p, cfg.eps).expect("positive parameters");
        let closed = cfg.outer.closed_boundary();
        let poly = closed.sample(4096);
        clearance = f64::INFINITY;
        for x in hole.sample(samples) {
            if x[1] <= 0.0 || winding(&poly, x).abs() < 0.5 {
                reasons.push("hole leaves the domain".into());
                clearance = 0.0;
                break;
            }
            // cheap bound first, accurate distance only when close
            let flat = x[1];
            clearance = clearance.min(flat);
        }
        if reasons.is_empty() {
            let arc_d = hole
                .sample(samples.min(128))
                .into_iter()
                .map(|x| distance_to_curve(&cfg.outer.arc, x))
                .fold(f64::INFINITY, f64::min);
            clearance = clearance.min(arc_d);
            if clearance < margin * e1.min(1.0) {
                reasons.push(format!("clearance {clearance:e} below margin {:e}", margin * e1.min(1.0)));
            }
        }
    }
    Admissibility { ok: reasons.is_empty(), clearance, reasons }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn stadium_cfg(eps: (f64, f64)) -> ProblemConfig {
        ProblemConfig {
            outer: OuterDomain::from_arc(make_shape("stadium-arc", &[]).unwrap()).unwrap(),
            hole: make_shape("disk", &[1.0]).unwrap(),
            p: [1.0, 1.0],
            eps,
            g_outer: BoundaryData::X2,
            g_inner: BoundaryData::Constant(0.0),
        }
    }

    #[test]
    fn shapes_and_lengths() {
        let d = make_shape("disk", &[1.0]).unwrap();
        assert_abs_diff_eq!(d.length(), 2.0 * PI, epsilon = 1e-12);
        let dome = make_shape("dome-arc", &[3.0]).unwrap();
        assert_abs_diff_eq!(dome.start()[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dome.end()[0], -3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dome.end()[1], 0.0, epsilon = 1e-14);
        let st = OuterDomain::from_arc(make_shape("stadium-arc", &[]).unwrap()).unwrap();
        assert_abs_diff_eq!(st.closed_boundary().length(), 8.0 + 2.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(st.arc.length(), 4.0 + 2.0 * PI, epsilon = 1e-12);
        assert_eq!((st.left, st.right), (-2.0, 2.0));
    }

    #[test]
    fn bad_shapes() {
        assert!(matches!(make_shape("square", &[]), Err(Error::Geometry(_))));
        assert!(make_shape("disk", &[-1.0]).is_err());
        assert!(make_shape("dome-arc", &[0.0]).is_err());
        assert!(OuterDomain::from_arc(make_shape("disk", &[]).unwrap()).is_err());
    }

    #[test]
    fn normals_are_unit_and_orthogonal() {
        for c in [
            make_shape("kite", &[]).unwrap(),
            make_shape("ellipse", &[2.0, 1.0]).unwrap(),
            make_shape("stadium-arc", &[]).unwrap(),
        ] {
            for i in 0..50 {
                let p = c.eval(i as f64 / 50.0);
                assert_abs_diff_eq!(norm(p.normal()), 1.0, epsilon = 1e-14);
                assert_abs_diff_eq!(dot(p.normal(), p.tangent()), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn stadium_arc_pieces() {
        let c = make_shape("stadium-arc", &[]).unwrap();
        assert_eq!(c.segment_count(), 3);
        let top = c.eval(0.5);
        assert_abs_diff_eq!(top.x[1], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(top.normal()[1], 1.0, epsilon = 1e-14);
        let right = c.eval(c.breaks()[1] * 0.5);
        assert_abs_diff_eq!(right.x[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(right.normal()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(right.curvature(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn scale_hole_affine_image() {
        let d = make_shape("disk", &[1.0]).unwrap();
        let s = scale_hole(&d, [0.0, 1.0], (0.1, 0.5)).unwrap();
        for i in 0..16 {
            let x = s.point(i as f64 / 16.0);
            assert_abs_diff_eq!(dist(x, [0.0, 0.1]), 0.05, epsilon = 1e-15);
        }
        let id = scale_hole(&d, [0.0, 0.0], (1.0, 1.0)).unwrap();
        assert_eq!(id.point(0.3), d.point(0.3));
        assert!(scale_hole(&d, [0.0, 1.0], (0.0, 1.0)).is_err());
        let k = make_shape("kite", &[]).unwrap();
        let ks = scale_hole(&k, [0.2, 1.0], (0.3, 0.7)).unwrap();
        assert_abs_diff_eq!(ks.length(), 0.21 * k.length(), epsilon = 1e-12);
        let (a, b) = (ks.normal(0.37), k.normal(0.37));
        assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-15);
        assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-15);
    }

    #[test]
    fn admissibility() {
        let good = stadium_cfg((2.0 / 3.0, (2.0f64 / 3.0).powi(4)));
        assert!(check_admissible(&good).ok);
        let bad = stadium_cfg((0.9, 2.0));
        let a = check_admissible(&bad);
        assert!(!a.ok);
        let norm_bad = stadium_cfg((2.0, 0.6));
        assert!(!check_admissible(&norm_bad).ok);
    }

    #[test]
    fn containment_and_distance() {
        let st = OuterDomain::from_arc(make_shape("stadium-arc", &[]).unwrap()).unwrap();
        assert!(st.contains([0.0, 1.0]));
        assert!(st.contains([2.9, 1.0]));
        assert!(!st.contains([3.1, 1.0]));
        assert!(!st.contains([0.0, -0.1]));
        assert_abs_diff_eq!(st.distance_to_boundary([0.0, 0.5]), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(st.distance_to_boundary([2.0, 1.0]), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn data_parsing() {
        assert_eq!(BoundaryData::parse("x2").unwrap(), BoundaryData::X2);
        assert_eq!(BoundaryData::parse("constant:2.5").unwrap(), BoundaryData::Constant(2.5));
        assert!(BoundaryData::parse("constant:abc").is_err());
        assert!(BoundaryData::parse("sin").is_err());
        let g = BoundaryData::CosTheta;
        let x = [0.3, 0.8];
        let h = 1e-6;
        let fd = (g.value([x[0] + h, x[1]]) - g.value([x[0] - h, x[1]])) / (2.0 * h);
        assert_abs_diff_eq!(fd, g.gradient(x)[0], epsilon = 1e-8);
    }
}
