//! Limiting problems: the unperturbed solution u₀ on Ω, the bounded exterior
//! solution v₀ on ℝ²∖ω, the half-plane solution w⁎ around p + ω, and the
//! limiting energy and flux values built from them.

use nalgebra::{DMatrix, DVector};

use crate::geometry::{dot, BoundaryData, Curve, OuterDomain, Pt};
use crate::linalg::solve_dense;
use crate::potentials::{
    adjoint_double_layer_matrix, double_layer_full, double_layer_matrix, double_layer_normal_derivative,
    single_layer_full, single_layer_matrix, single_layer_trace, KernelKind,
};
use crate::quadrature::{
    auto_closed_rule, lagrange_basis, panel_diff_matrix, refined_panel_rule, Focus, QuadratureRule, PANEL_ORDER,
};
use crate::solver::Regime;
use crate::{Error, Result};

/// Default node budget for the closed outer boundary.
pub const U0_NODES: usize = 256;

fn matvec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).iter().copied().collect()
}

/// u₀ represented as a double layer on ∂Ω, σ/2 + Kσ = g°.
#[derive(Debug, Clone)]
pub struct U0Solution {
    pub rule: QuadratureRule,
    pub sigma: Vec<f64>,
    pub data: BoundaryData,
    pub energy: f64,
    /// ν·∇u₀ at the boundary nodes
    pub normal_derivative: Vec<f64>,
    pub flat: Vec<FlatPanel>,
    flat_ends: (f64, f64),
    pub residual: f64,
    pub cond_est: f64,
}

pub fn outer_rule(outer: &OuterDomain, n: usize) -> QuadratureRule {
    let curve = outer.closed_boundary();
    let len = curve.length();
    let h = len * crate::quadrature::PANEL_ORDER as f64 / n as f64;
    // segment junctions carry curvature jumps or corners
    let focus: Vec<Focus> =
        curve.breaks()[1..].iter().map(|&t| Focus { point: curve.point(t), ratio: 2.0, h_min: 1e-4 * len }).collect();
    refined_panel_rule(&curve, h, &focus)
}

pub fn solve_u0(outer: &OuterDomain, g: BoundaryData) -> Result<U0Solution> {
    solve_u0_with(outer, g, U0_NODES)
}

pub fn solve_u0_with(outer: &OuterDomain, g: BoundaryData, n: usize) -> Result<U0Solution> {
    let rule = outer_rule(outer, n);
    let mut a = double_layer_matrix(&rule);
    for i in 0..rule.len() {
        a[(i, i)] += 0.5;
    }
    let b = DVector::from_iterator(rule.len(), rule.nodes.iter().map(|n| g.value(n.x)));
    let rep = solve_dense(&a, &b)?;
    let sigma: Vec<f64> = rep.x.iter().copied().collect();
    // ∂_ν w[σ] = d/ds v[∂_s σ]; the energy pairs v[∂_s σ] with ∂_s g°
    let v = single_layer_trace(&rule, &rule.arc_derivative(&sigma));
    let dg: Vec<f64> = rule.nodes.iter().map(|n| dot(g.gradient(n.x), n.tangent)).collect();
    let energy = -rule.integrate(&v.iter().zip(&dg).map(|(a, b)| a * b).collect::<Vec<_>>());
    let dn = rule.arc_derivative(&v);
    let flat = flat_panels(&rule, &dn);
    Ok(U0Solution {
        rule,
        sigma,
        data: g,
        energy,
        normal_derivative: dn,
        flat,
        flat_ends: (outer.left, outer.right),
        residual: rep.residual,
        cond_est: rep.cond_est,
    })
}

/// Below this height over the flat boundary u₀ is expanded in x₂.
pub const NEAR_FLAT: f64 = 1e-4;

/// ∂₂u₀ on one flat panel, with its x₁-derivative, at the panel nodes.
#[derive(Debug, Clone)]
pub struct FlatPanel {
    pub xa: f64,
    pub xb: f64,
    pub d2: [f64; PANEL_ORDER],
    pub d12: [f64; PANEL_ORDER],
}

fn flat_panels(rule: &QuadratureRule, dn: &[f64]) -> Vec<FlatPanel> {
    let dm = panel_diff_matrix();
    let mut out = Vec::new();
    for (p, iv) in rule.panels().iter().enumerate() {
        let (a, b) = (rule.curve.point(iv[0]), rule.curve.point(iv[1]));
        if a[1].abs() > 1e-14 || b[1].abs() > 1e-14 || rule.curve.locate(0.5 * (iv[0] + iv[1])) != 0 {
            continue;
        }
        let mut d2 = [0.0; PANEL_ORDER];
        for q in 0..PANEL_ORDER {
            // outward normal is −e₂ on the flat part
            d2[q] = -dn[p * PANEL_ORDER + q];
        }
        let mut d12 = [0.0; PANEL_ORDER];
        for i in 0..PANEL_ORDER {
            let s: f64 = (0..PANEL_ORDER).map(|j| dm[i][j] * d2[j]).sum();
            d12[i] = s * 2.0 / (b[0] - a[0]);
        }
        out.push(FlatPanel { xa: a[0], xb: b[0], d2, d12 });
    }
    out
}

impl U0Solution {
    /// Value and gradient at a point of Ω.
    pub fn eval(&self, x: Pt) -> Result<[f64; 3]> {
        let (l, r) = self.flat_ends;
        if x[1] < NEAR_FLAT && x[1] >= 0.0 && x[0] - l > 100.0 * NEAR_FLAT && r - x[0] > 100.0 * NEAR_FLAT {
            if let Some(v) = self.eval_near_flat(x) {
                return Ok(v);
            }
        }
        double_layer_full(KernelKind::Classical, &self.rule, &self.sigma, x)
    }

    /// u₀(x₁,x₂) ≈ g°(x₁,0) + x₂ ∂₂u₀ − x₂²/2 ∂₁²g°, using harmonicity for the last term.
    fn eval_near_flat(&self, x: Pt) -> Option<[f64; 3]> {
        let fp = self.flat.iter().find(|f| f.xa <= x[0] && x[0] <= f.xb)?;
        let r = 2.0 * (x[0] - fp.xa) / (fp.xb - fp.xa) - 1.0;
        let l = lagrange_basis(r);
        let d2: f64 = l.iter().zip(&fp.d2).map(|(a, b)| a * b).sum();
        let d12: f64 = l.iter().zip(&fp.d12).map(|(a, b)| a * b).sum();
        let g = |t: f64| self.data.value([t, 0.0]);
        let h = 1e-3;
        let g0 = g(x[0]);
        let g1 = (g(x[0] + h) - g(x[0] - h)) / (2.0 * h);
        let g11 = (g(x[0] + h) - 2.0 * g0 + g(x[0] - h)) / (h * h);
        let y = x[1];
        Some([g0 + y * d2 - 0.5 * y * y * g11, g1 + y * d12, d2 - y * g11])
    }

    pub fn value(&self, x: Pt) -> Result<f64> {
        Ok(self.eval(x)?[0])
    }

    pub fn gradient(&self, x: Pt) -> Result<Pt> {
        let v = self.eval(x)?;
        Ok([v[1], v[2]])
    }
}

/// v₀ = v_S[∂ω, φ] + c with ∫φ = 0.
#[derive(Debug, Clone)]
pub struct V0Solution {
    pub rule: QuadratureRule,
    pub phi: Vec<f64>,
    /// value at infinity
    pub c: f64,
    pub energy: f64,
    pub residual: f64,
}

pub fn solve_v0(hole: &Curve, g: BoundaryData, n: usize) -> Result<V0Solution> {
    let rule = auto_closed_rule(hole, n)?;
    let m = rule.len();
    let sl = single_layer_matrix(KernelKind::Classical, &rule);
    let mut a = DMatrix::zeros(m + 1, m + 1);
    a.view_mut((0, 0), (m, m)).copy_from(&sl);
    for i in 0..m {
        a[(i, m)] = 1.0;
        a[(m, i)] = rule.nodes[i].weight;
    }
    let mut b = DVector::zeros(m + 1);
    for i in 0..m {
        b[i] = g.value(rule.nodes[i].x);
    }
    let rep = solve_dense(&a, &b)?;
    let phi: Vec<f64> = rep.x.iter().take(m).copied().collect();
    let c = rep.x[m];
    let kp = matvec(&adjoint_double_layer_matrix(&rule), &phi);
    let dn: Vec<f64> = kp.iter().zip(&phi).map(|(k, p)| k + 0.5 * p).collect();
    let energy = -rule.nodes.iter().zip(&dn).map(|(n, d)| n.weight * g.value(n.x) * d).sum::<f64>();
    Ok(V0Solution { rule, phi, c, energy, residual: rep.residual })
}

impl V0Solution {
    pub fn value(&self, x: Pt) -> Result<f64> {
        Ok(single_layer_full(KernelKind::Classical, &self.rule, &self.phi, x)?[0] + self.c)
    }
}

/// w⁎ in the hole frame: the solution outside ω in the half-plane {X₂ > −p₂},
/// equal to gⁱ on ∂ω and to g0 on the line X₂ = −p₂. Built from the odd
/// extension across that line.
#[derive(Debug, Clone)]
pub struct WStarSolution {
    pub rule: QuadratureRule,
    pub p: Pt,
    pub g0: f64,
    pub gi: Vec<f64>,
    /// μ + ξ on ∂ω
    pub sigma: Vec<f64>,
    pub mu: Vec<f64>,
    pub xi: f64,
    /// ν·∇w⁎ on ∂ω
    pub normal_derivative: Vec<f64>,
    pub energy: f64,
    pub flux: f64,
    pub residual: f64,
}

fn mirror(p: Pt, x: Pt) -> Pt {
    [x[0], -x[1] - 2.0 * p[1]]
}

/// `hole` is the reference ω; the solution lives around p + scale·ω with data
/// gⁱ read in the reference frame.
pub fn solve_w_star(hole: &Curve, scale: f64, p: Pt, gi: BoundaryData, g0: f64, n: usize) -> Result<WStarSolution> {
    if p[1] <= 0.0 {
        return Err(Error::Inadmissible("anchor must lie above the axis".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::Inadmissible(format!("hole scale must be positive, got {scale}")));
    }
    let rule = auto_closed_rule(&hole.affine([0.0, 0.0], scale), n)?;
    if rule.nodes.iter().any(|n| n.x[1] <= -p[1]) {
        return Err(Error::Inadmissible("hole crosses the boundary line".into()));
    }
    let m = rule.len();
    let sl = single_layer_matrix(KernelKind::Classical, &rule);
    let k = double_layer_matrix(&rule);
    let gv: Vec<f64> = rule.nodes.iter().map(|n| gi.value([n.x[0] / scale, n.x[1] / scale])).collect();
    // mirror images of the collocation points carry the odd part
    let mut a = DMatrix::zeros(m + 1, m + 1);
    let mut b = DVector::zeros(m + 1);
    let kg = matvec(&k, &gv);
    for i in 0..m {
        let xt = mirror(p, rule.nodes[i].x);
        let mut row_one = 0.0;
        for j in 0..m {
            let y = &rule.nodes[j];
            let z = [xt[0] - y.x[0], xt[1] - y.x[1]];
            let v = sl[(i, j)] - y.weight * crate::kernels::s2(z);
            a[(i, j)] = v;
            row_one += v;
        }
        a[(i, m)] = row_one;
        // w_S[∂ω, gⁱ] at the mirrored point enters with the opposite sign
        let mut wm = 0.0;
        for j in 0..m {
            let y = &rule.nodes[j];
            let z = [xt[0] - y.x[0], xt[1] - y.x[1]];
            wm -= y.weight * gv[j] * dot(y.normal, crate::kernels::grad_s2(z));
        }
        b[i] = -g0 + kg[i] + 0.5 * gv[i] - wm;
        a[(m, i)] = rule.nodes[i].weight;
    }
    let rep = solve_dense(&a, &b)?;
    let mu: Vec<f64> = rep.x.iter().take(m).copied().collect();
    let xi = rep.x[m];
    let sigma: Vec<f64> = mu.iter().map(|v| v + xi).collect();

    let maue = double_layer_normal_derivative(&rule, &gv);
    let kp = matvec(&adjoint_double_layer_matrix(&rule), &sigma);
    let mut dn = vec![0.0; m];
    for i in 0..m {
        let node = &rule.nodes[i];
        let xt = mirror(p, node.x);
        let w = double_layer_full(KernelKind::Classical, &rule, &gv, xt)?;
        let v = single_layer_full(KernelKind::Classical, &rule, &sigma, xt)?;
        // ∇_X f(X̃) = ς ∇f(X̃)
        let gw = [w[1], -w[2]];
        let gs = [v[1], -v[2]];
        dn[i] = -maue[i] + dot(node.normal, gw) + 0.5 * sigma[i] + kp[i] - dot(node.normal, gs);
    }
    let flux = rule.integrate(&dn);
    let energy = -rule.nodes.iter().zip(&dn).zip(&gv).map(|((n, d), g)| n.weight * (g - g0) * d).sum::<f64>();
    Ok(WStarSolution { rule, p, g0, gi: gv, sigma, mu, xi, normal_derivative: dn, energy, flux, residual: rep.residual })
}

impl WStarSolution {
    /// w⁎ at X (hole frame), valid anywhere off ∂ω and its mirror.
    pub fn value(&self, x: Pt) -> Result<f64> {
        Ok(self.g0 + self.v_star(x)?)
    }

    /// v⁎ = w⁎ − g0, odd across X₂ = −p₂.
    pub fn v_star(&self, x: Pt) -> Result<f64> {
        let xt = mirror(self.p, x);
        let w = |y: Pt| double_layer_full(KernelKind::Classical, &self.rule, &self.gi, y).map(|v| v[0]);
        let s = |y: Pt| single_layer_full(KernelKind::Classical, &self.rule, &self.sigma, y).map(|v| v[0]);
        Ok(-w(x)? + w(xt)? + s(x)? - s(xt)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRecord {
    pub energy_limit: f64,
    pub flux_limit: f64,
}

#[derive(Debug, Clone)]
pub struct LimitBundle {
    pub u0: std::sync::Arc<U0Solution>,
    pub v0: V0Solution,
    /// present when a fixed ε₂ was given
    pub w_star: Option<WStarSolution>,
}

impl LimitBundle {
    /// v₀ on the reference hole, and w⁎ around p + ε₂ω with limiting value g°(0) when ε₂ is given.
    pub fn new(
        u0: std::sync::Arc<U0Solution>,
        hole: &Curve,
        p: Pt,
        gi: BoundaryData,
        eps2: Option<f64>,
        n: usize,
    ) -> Result<LimitBundle> {
        let g0 = u0.data.value([0.0, 0.0]);
        let v0 = solve_v0(hole, gi, n)?;
        let w_star = eps2.map(|e2| solve_w_star(hole, e2, p, gi, g0, n)).transpose()?;
        Ok(LimitBundle { u0, v0, w_star })
    }

    fn w(&self) -> Result<&WStarSolution> {
        self.w_star
            .as_ref()
            .ok_or_else(|| Error::Config("the fixed regime limit needs a value for eps2".into()))
    }
}

pub fn limiting_values(regime: Regime, bundle: &LimitBundle) -> Result<LimitRecord> {
    Ok(match regime {
        Regime::TwoParam => LimitRecord { energy_limit: bundle.u0.energy + bundle.v0.energy, flux_limit: 0.0 },
        Regime::FixedEps2 => {
            let w = bundle.w()?;
            LimitRecord { energy_limit: bundle.u0.energy + w.energy, flux_limit: w.flux }
        }
    })
}
