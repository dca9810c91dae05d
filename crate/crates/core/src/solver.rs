//! The coupled boundary-integral systems for the perforated domain, their
//! solution, and the field, energy and flux built from the densities.
//!
//! Unknowns: μ₁ on the upper boundary ∂₊Ω, μ₂ on the reference hole boundary ∂ω
//! (mean zero) and a scalar ξ. The hole frame X is related to the physical
//! point by x = ε₁p + ε₁ε₂X.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::geometry::{check_admissible, dot, BoundaryData, Curve, ProblemConfig, Pt};
use crate::kernels::{grad_s2, green2, green2_grad_x, green2_grad_y, hess_s2, s2};
use crate::limits::{solve_u0_with, U0Solution, U0_NODES};
use crate::linalg::{solve_dense, SolveReport};
use crate::potentials::{
    adjoint_double_layer_matrix, double_layer, double_layer_full, double_layer_matrix,
    double_layer_normal_derivative, single_layer, single_layer_matrix, Density, KernelKind,
};
use crate::quadrature::{auto_closed_rule, open_arc_rule, refined_panel_rule, Focus, QuadratureRule};
use crate::{Error, Result};

/// Grading exponent of the rule on ∂₊Ω.
pub const ARC_GRADING: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// both parameters small, log-scaled unknowns
    TwoParam,
    /// ε₂ held fixed
    FixedEps2,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::TwoParam => "M",
            Regime::FixedEps2 => "N",
        }
    }

    pub fn parse(s: &str) -> Result<Regime> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m" | "two_param" | "two-param" => Ok(Regime::TwoParam),
            "n" | "fixed_eps2" | "fixed-eps2" => Ok(Regime::FixedEps2),
            other => Err(Error::Config(format!("unknown regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeState {
    pub eps: (f64, f64),
    /// (1/log(ε₁ε₂), log ε₁/log(ε₁ε₂))
    pub delta: (f64, f64),
    pub lambda: Option<f64>,
    pub regime: Regime,
}

impl RegimeState {
    pub fn new(regime: Regime, eps: (f64, f64)) -> Result<RegimeState> {
        let (e1, e2) = eps;
        if !(e1 > 0.0 && e2 > 0.0 && e1.is_finite() && e2.is_finite()) {
            return Err(Error::Inadmissible(format!("parameters must be positive, got {eps:?}")));
        }
        if regime == Regime::TwoParam && e1 * e2 >= 1.0 {
            return Err(Error::Inadmissible(format!("eps1*eps2 = {} is not below 1", e1 * e2)));
        }
        let l = (e1 * e2).ln();
        let delta = if l != 0.0 { (1.0 / l, e1.ln() / l) } else { (f64::NAN, f64::NAN) };
        Ok(RegimeState { eps, delta, lambda: None, regime })
    }

    /// The ε₁ = 0 endpoint. For the two-parameter regime ε₂ = 0 as well and
    /// δ = (0, λ); for the fixed regime ε₂ keeps its value.
    pub fn limit(regime: Regime, eps2: f64, lambda: f64) -> Result<RegimeState> {
        check_lambda(lambda)?;
        match regime {
            Regime::TwoParam => {
                Ok(RegimeState { eps: (0.0, 0.0), delta: (0.0, lambda), lambda: Some(lambda), regime })
            }
            Regime::FixedEps2 => {
                if !(eps2 > 0.0) {
                    return Err(Error::Inadmissible(format!("eps2 must be positive, got {eps2}")));
                }
                Ok(RegimeState { eps: (0.0, eps2), delta: (0.0, 0.0), lambda: Some(lambda), regime })
            }
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<RegimeState> {
        check_lambda(lambda)?;
        self.lambda = Some(lambda);
        Ok(self)
    }

    pub fn is_limit(&self) -> bool {
        self.eps.0 == 0.0
    }

    /// Factor multiplying ξ in the hole monopole.
    pub fn c1(&self) -> f64 {
        match self.regime {
            Regime::TwoParam => self.delta.0,
            Regime::FixedEps2 => 1.0,
        }
    }

    /// Constant ξ-coefficient on the hole rows: the log ε₂ part of the
    /// rescaled kernel integrated against the monopole.
    pub fn c2(&self, rho_omega: f64) -> f64 {
        match self.regime {
            Regime::TwoParam => rho_omega * (1.0 - self.delta.1),
            Regime::FixedEps2 => rho_omega * self.eps.1.ln(),
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Config(format!("lambda must lie in [0, 1), got {lambda}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discretization {
    pub n_hole: usize,
    pub n_arc: usize,
    pub n_outer: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization::from_nodes(128)
    }
}

impl Discretization {
    pub fn from_nodes(n: usize) -> Discretization {
        Discretization { n_hole: n, n_arc: 2 * n, n_outer: U0_NODES.max(2 * n) }
    }

    pub fn doubled(self) -> Discretization {
        Discretization { n_hole: 2 * self.n_hole, n_arc: 2 * self.n_arc, n_outer: 2 * self.n_outer }
    }

    pub fn total(&self) -> usize {
        self.n_hole + self.n_arc + 1
    }
}

/// Everything that does not depend on ε: rules, self-interaction blocks, u₀.
#[derive(Debug)]
pub struct Problem {
    pub cfg: ProblemConfig,
    pub disc: Discretization,
    pub hole_rule: QuadratureRule,
    pub arc_rule: QuadratureRule,
    pub u0: Arc<U0Solution>,
    pub rho_omega: f64,
    sl_hole: DMatrix<f64>,
    kp_hole: DMatrix<f64>,
    vg_arc: DMatrix<f64>,
    /// gⁱ at the hole nodes
    pub gi: Vec<f64>,
    k_gi: Vec<f64>,
    maue_gi: Vec<f64>,
}

impl Problem {
    pub fn new(cfg: &ProblemConfig, disc: Discretization) -> Result<Problem> {
        let u0 = Arc::new(solve_u0_with(&cfg.outer, cfg.g_outer, disc.n_outer)?);
        Problem::with_u0(cfg, disc, u0)
    }

    /// Reuses an already solved u₀ (sweeps share it).
    pub fn with_u0(cfg: &ProblemConfig, disc: Discretization, u0: Arc<U0Solution>) -> Result<Problem> {
        let hole_rule = auto_closed_rule(&cfg.hole, disc.n_hole)?;
        let arc_rule = open_arc_rule(&cfg.outer.arc, disc.n_arc, ARC_GRADING)?;
        let sl_hole = single_layer_matrix(KernelKind::Classical, &hole_rule);
        let k_hole = double_layer_matrix(&hole_rule);
        let kp_hole = adjoint_double_layer_matrix(&hole_rule);
        let vg_arc = single_layer_matrix(KernelKind::Green, &arc_rule);
        let gi: Vec<f64> = hole_rule.nodes.iter().map(|n| cfg.g_inner.value(n.x)).collect();
        let k_gi = (&k_hole * DVector::from_column_slice(&gi)).iter().copied().collect();
        let maue_gi = double_layer_normal_derivative(&hole_rule, &gi);
        let rho_omega = hole_rule.length() / (2.0 * std::f64::consts::PI);
        Ok(Problem {
            cfg: cfg.clone(),
            disc,
            hole_rule,
            arc_rule,
            u0,
            rho_omega,
            sl_hole,
            kp_hole,
            vg_arc,
            gi,
            k_gi,
            maue_gi,
        })
    }

    pub fn g0_origin(&self) -> f64 {
        self.cfg.g_outer.value([0.0, 0.0])
    }

    fn frame(&self, state: &RegimeState) -> Result<HoleFrame> {
        let (e1, e2) = state.eps;
        let s = e1 * e2;
        let p = self.cfg.p;
        let m = self.hole_rule.len();
        let phys: Vec<Pt> =
            self.hole_rule.nodes.iter().map(|n| [e1 * p[0] + s * n.x[0], e1 * p[1] + s * n.x[1]]).collect();
        let u0: Vec<[f64; 3]> = if state.is_limit() {
            vec![[self.g0_origin(), 0.0, 0.0]; m]
        } else {
            phys.par_iter().map(|x| self.u0.eval(*x)).collect::<Result<Vec<_>>>()?
        };
        Ok(HoleFrame { e1, e2, s, phys, u0 })
    }

    /// Assembles the system for either regime.
    pub fn assemble(&self, state: &RegimeState) -> Result<LinearSystem> {
        let fr = self.frame(state)?;
        let (n1, n2) = (self.arc_rule.len(), self.hole_rule.len());
        let n = n1 + n2 + 1;
        let c1 = state.c1();
        let c2 = state.c2(self.rho_omega);
        let p2 = self.cfg.p[1];
        let arc = &self.arc_rule.nodes;
        let hole = &self.hole_rule.nodes;

        let mut a = DMatrix::zeros(n, n);
        let mut b = DVector::zeros(n);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.vg_arc);

        // arc rows: coupling to the hole
        if fr.s > 0.0 {
            let rows: Vec<(Vec<f64>, f64, f64)> = arc
                .par_iter()
                .map(|xi| {
                    let mut row = Vec::with_capacity(n2);
                    let (mut one, mut rhs) = (0.0, 0.0);
                    for (j, y) in hole.iter().enumerate() {
                        let v = green2(xi.x, fr.phys[j]) * y.weight;
                        row.push(v);
                        one += v;
                        rhs += fr.s * dot(y.normal, green2_grad_y(xi.x, fr.phys[j])) * self.gi[j] * y.weight;
                    }
                    (row, one, rhs)
                })
                .collect();
            for (i, (row, one, rhs)) in rows.into_iter().enumerate() {
                for (j, v) in row.into_iter().enumerate() {
                    a[(i, n1 + j)] = v;
                }
                a[(i, n - 1)] = c1 * one;
                b[i] = rhs;
            }
        }

        // hole rows
        let rows: Vec<(Vec<f64>, Vec<f64>, f64, f64)> = (0..n2)
            .into_par_iter()
            .map(|k| {
                let xk = hole[k].x;
                let mut to_arc = vec![0.0; n1];
                if fr.s > 0.0 {
                    for (j, y) in arc.iter().enumerate() {
                        to_arc[j] = green2(fr.phys[k], y.x) * y.weight;
                    }
                }
                let mut to_hole = Vec::with_capacity(n2);
                let (mut one, mut img) = (0.0, 0.0);
                for (j, y) in hole.iter().enumerate() {
                    let z = image_point(fr.e2, p2, xk, y.x);
                    let v = self.sl_hole[(k, j)] - s2(z) * y.weight;
                    to_hole.push(v);
                    one += v;
                    img += fr.e2 * dot(y.normal, grad_s2(z)) * self.gi[j] * y.weight;
                }
                let rhs = img - fr.u0[k][0] + self.k_gi[k] + 0.5 * self.gi[k];
                (to_arc, to_hole, c2 + c1 * one, rhs)
            })
            .collect();
        for (k, (to_arc, to_hole, xi, rhs)) in rows.into_iter().enumerate() {
            let r = n1 + k;
            for (j, v) in to_arc.into_iter().enumerate() {
                a[(r, j)] = v;
            }
            for (j, v) in to_hole.into_iter().enumerate() {
                a[(r, n1 + j)] = v;
            }
            a[(r, n - 1)] = xi;
            b[r] = rhs;
        }
        for (j, y) in hole.iter().enumerate() {
            a[(n - 1, n1 + j)] = y.weight;
        }
        // graded weights make the raw arc block badly scaled; use √w on both sides
        let mut scale = vec![1.0; n];
        for (i, y) in arc.iter().enumerate() {
            scale[i] = y.weight.sqrt();
        }
        for i in 0..n1 {
            b[i] *= scale[i];
            for j in 0..n {
                a[(i, j)] *= scale[i];
            }
        }
        for j in 0..n1 {
            for i in 0..n {
                a[(i, j)] /= scale[j];
            }
        }
        // rows near the axis are small because G vanishes there
        let mut row_scale = scale.clone();
        row_scale.truncate(n1);
        row_scale.resize(n, 1.0);
        for i in 0..n {
            let m = a.row(i).amax();
            if m > 0.0 {
                row_scale[i] /= m;
                b[i] /= m;
                for j in 0..n {
                    a[(i, j)] /= m;
                }
            }
        }
        Ok(LinearSystem { a, b, n_arc: n1, n_hole: n2, col_scale: scale, row_scale, state: *state })
    }

    pub fn assemble_m(&self, state: &RegimeState) -> Result<LinearSystem> {
        if state.regime != Regime::TwoParam {
            return Err(Error::Config("two-parameter assembly needs the two-parameter regime".into()));
        }
        self.assemble(state)
    }

    pub fn assemble_n(&self, state: &RegimeState) -> Result<LinearSystem> {
        if state.regime != Regime::FixedEps2 {
            return Err(Error::Config("fixed-eps2 assembly needs the fixed-eps2 regime".into()));
        }
        self.assemble(state)
    }

    pub fn solve_state(self: &Arc<Self>, state: &RegimeState) -> Result<FieldEvaluator> {
        if !state.is_limit() {
            admissible(&self.cfg, state.eps)?;
        }
        let sys = self.assemble(state)?;
        let (density, report) = solve(&sys, self.rho_omega)?;
        FieldEvaluator::new(self.clone(), density, report)
    }
}

fn admissible(cfg: &ProblemConfig, eps: (f64, f64)) -> Result<()> {
    let mut c = cfg.clone();
    c.eps = eps;
    let a = check_admissible(&c);
    if a.ok {
        Ok(())
    } else {
        Err(Error::Inadmissible(a.reasons.join("; ")))
    }
}

/// Z = −2p₂e₂ + ε₂(ς(X) − Y)
#[inline]
fn image_point(e2: f64, p2: f64, x: Pt, y: Pt) -> Pt {
    [e2 * (x[0] - y[0]), -2.0 * p2 + e2 * (-x[1] - y[1])]
}

#[derive(Debug, Clone)]
struct HoleFrame {
    e1: f64,
    e2: f64,
    s: f64,
    phys: Vec<Pt>,
    /// u₀ value and gradient at the physical hole nodes
    u0: Vec<[f64; 3]>,
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub n_arc: usize,
    pub n_hole: usize,
    /// unknown = solution component / col_scale
    pub col_scale: Vec<f64>,
    /// factor applied to each equation
    pub row_scale: Vec<f64>,
    pub state: RegimeState,
}

#[derive(Debug, Clone)]
pub struct DensitySolution {
    pub mu1: Density,
    pub mu2: Density,
    pub xi: f64,
    pub rho_omega: f64,
    pub state: RegimeState,
}

pub fn solve(sys: &LinearSystem, rho_omega: f64) -> Result<(DensitySolution, SolveReport)> {
    let rep = solve_dense(&sys.a, &sys.b)?;
    let x = rep.x.component_div(&DVector::from_column_slice(&sys.col_scale));
    let mut mu1 = Density::new(x.rows(0, sys.n_arc).iter().copied().collect());
    mu1.supported_on_plus = true;
    let mut mu2 = Density::new(x.rows(sys.n_arc, sys.n_hole).iter().copied().collect());
    mu2.mean_zero = true;
    let xi = x[sys.n_arc + sys.n_hole];
    Ok((DensitySolution { mu1, mu2, xi, rho_omega, state: sys.state }, rep))
}

/// A solved field: evaluation in both frames, hole normal derivative, energy, flux.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    pub problem: Arc<Problem>,
    pub density: DensitySolution,
    pub report: SolveReport,
    frame: HoleFrame,
    /// μ₂ + c₁ξ
    sigma: Vec<f64>,
    /// ∂_ν V on ∂ω (hole frame)
    pub hole_normal_derivative: Vec<f64>,
    pub energy: f64,
    pub flux: f64,
}

impl FieldEvaluator {
    fn new(problem: Arc<Problem>, density: DensitySolution, report: SolveReport) -> Result<FieldEvaluator> {
        let state = density.state;
        let fr = problem.frame(&state)?;
        let c1 = state.c1();
        let sigma: Vec<f64> = density.mu2.values.iter().map(|v| v + c1 * density.xi).collect();
        let hole = &problem.hole_rule.nodes;
        let arc = &problem.arc_rule.nodes;
        let p2 = problem.cfg.p[1];
        let kp: Vec<f64> = (&problem.kp_hole * DVector::from_column_slice(&sigma)).iter().copied().collect();
        let mu1 = &density.mu1.values;
        let dn: Vec<f64> = (0..hole.len())
            .into_par_iter()
            .map(|k| {
                let xk = hole[k].x;
                let nk = hole[k].normal;
                let mut v = fr.s * (nk[0] * fr.u0[k][1] + nk[1] * fr.u0[k][2]) - problem.maue_gi[k]
                    + 0.5 * sigma[k]
                    + kp[k];
                for (j, y) in hole.iter().enumerate() {
                    let z = image_point(fr.e2, p2, xk, y.x);
                    let h = hess_s2(z);
                    let hv = [h[0] * y.normal[0] + h[1] * y.normal[1], h[1] * y.normal[0] + h[2] * y.normal[1]];
                    let g = grad_s2(z);
                    // ς flips the second component
                    v -= fr.e2 * fr.e2 * (nk[0] * hv[0] - nk[1] * hv[1]) * problem.gi[j] * y.weight;
                    v -= fr.e2 * (nk[0] * g[0] - nk[1] * g[1]) * sigma[j] * y.weight;
                }
                if fr.s > 0.0 {
                    for (j, y) in arc.iter().enumerate() {
                        v += fr.s * dot(nk, green2_grad_x(fr.phys[k], y.x)) * mu1[j] * y.weight;
                    }
                }
                v
            })
            .collect();
        let flux = problem.hole_rule.integrate(&dn);
        let mut energy = problem.u0.energy;
        for (k, y) in hole.iter().enumerate() {
            let g = problem.gi[k];
            let du0 = y.normal[0] * fr.u0[k][1] + y.normal[1] * fr.u0[k][2];
            energy += y.weight * ((fr.u0[k][0] - g) * dn[k] - fr.s * g * du0);
        }
        Ok(FieldEvaluator { problem, density, report, frame: fr, sigma, hole_normal_derivative: dn, energy, flux })
    }

    pub fn state(&self) -> &RegimeState {
        &self.density.state
    }

    fn physical_hole_rule(&self) -> Result<QuadratureRule> {
        let hole = self.problem.cfg.hole.affine(
            [self.frame.e1 * self.problem.cfg.p[0], self.frame.e1 * self.problem.cfg.p[1]],
            self.frame.s,
        );
        auto_closed_rule(&hole, self.problem.disc.n_hole)
    }

    /// u_ε(x) from the representation in physical coordinates.
    pub fn eval_macroscopic(&self, x: Pt) -> Result<f64> {
        if self.state().is_limit() {
            return Err(Error::OutsideDomain("macroscopic field undefined at the limit".into()));
        }
        let pr = &self.problem;
        if !pr.cfg.outer.contains(x) {
            return Err(Error::OutsideDomain(format!("{x:?} is not inside the outer domain")));
        }
        let hole = self.physical_hole_rule()?;
        if hole.curve.winding_number(x).abs() > 0.5 {
            return Err(Error::OutsideDomain(format!("{x:?} lies inside the hole")));
        }
        let s = self.frame.s;
        let rho: Vec<f64> = self.sigma.iter().map(|v| v / s).collect();
        Ok(pr.u0.value(x)? - double_layer(KernelKind::Green, &hole, &pr.gi, x)?
            + single_layer(KernelKind::Green, &pr.arc_rule, &self.density.mu1.values, x)?
            + single_layer(KernelKind::Green, &hole, &rho, x)?)
    }

    /// u_ε(ε₁p + ε₁ε₂X) from the rescaled representation.
    pub fn eval_microscopic(&self, xh: Pt) -> Result<f64> {
        let pr = &self.problem;
        let fr = &self.frame;
        let st = self.state();
        if pr.hole_rule.curve.winding_number(xh).abs() > 0.5 {
            return Err(Error::OutsideDomain(format!("{xh:?} lies inside the hole")));
        }
        let x = [fr.e1 * pr.cfg.p[0] + fr.s * xh[0], fr.e1 * pr.cfg.p[1] + fr.s * xh[1]];
        let mut v = if st.is_limit() {
            pr.g0_origin()
        } else {
            if !pr.cfg.outer.contains(x) {
                return Err(Error::OutsideDomain(format!("{xh:?} maps outside the domain")));
            }
            pr.u0.value(x)? + single_layer(KernelKind::Green, &pr.arc_rule, &self.density.mu1.values, x)?
        };
        v -= double_layer(KernelKind::Classical, &pr.hole_rule, &pr.gi, xh)?;
        v += single_layer(KernelKind::Classical, &pr.hole_rule, &self.sigma, xh)?;
        v += st.c2(pr.rho_omega) * self.density.xi;
        let p2 = pr.cfg.p[1];
        for (j, y) in pr.hole_rule.nodes.iter().enumerate() {
            let z = image_point(fr.e2, p2, xh, y.x);
            v -= fr.e2 * dot(y.normal, grad_s2(z)) * pr.gi[j] * y.weight;
            v -= s2(z) * self.sigma[j] * y.weight;
        }
        Ok(v)
    }

    /// Largest |u − g°| over the ∂₊Ω nodes, from the on-curve operators.
    pub fn outer_boundary_error(&self) -> Result<f64> {
        let pr = &self.problem;
        let n1 = pr.arc_rule.len();
        let sys = pr.assemble(self.state())?;
        let mut x = DVector::zeros(sys.a.ncols());
        for i in 0..n1 {
            x[i] = self.density.mu1.values[i] * sys.col_scale[i];
        }
        for (j, v) in self.density.mu2.values.iter().enumerate() {
            x[n1 + j] = *v;
        }
        x[sys.a.ncols() - 1] = self.density.xi;
        let r = &sys.a * x - &sys.b;
        Ok((0..n1).map(|i| (r[i] / sys.row_scale[i]).abs()).fold(0.0, f64::max))
    }
}

/// Solves, doubling the discretization until the energy and flux of two
/// successive levels agree to `tol` (relative), or `max_hole` nodes are reached.
pub fn solve_converged(
    cfg: &ProblemConfig,
    state: &RegimeState,
    disc: Discretization,
    tol: f64,
    max_hole: usize,
) -> Result<(FieldEvaluator, f64)> {
    let mut pr = Arc::new(Problem::new(cfg, disc)?);
    let mut fe = pr.solve_state(state)?;
    loop {
        if pr.disc.n_hole * 2 > max_hole {
            return Ok((fe, f64::NAN));
        }
        let next = Arc::new(Problem::new(cfg, pr.disc.doubled())?);
        let fe2 = next.solve_state(state)?;
        let scale = fe2.energy.abs().max(fe2.flux.abs()).max(1.0);
        let change = (fe2.energy - fe.energy).abs().max((fe2.flux - fe.flux).abs()) / scale;
        pr = next;
        fe = fe2;
        if change < tol {
            return Ok((fe, change));
        }
    }
}

/// Independent oracle: double layers on both boundary components plus a log
/// source inside the hole, with the free-space kernel only.
#[derive(Debug, Clone)]
pub struct Baseline {
    pub outer_rule: QuadratureRule,
    pub hole_rule: QuadratureRule,
    pub sigma_outer: Vec<f64>,
    pub sigma_hole: Vec<f64>,
    pub source: f64,
    pub anchor: Pt,
    pub energy: f64,
    pub flux: f64,
    pub report: SolveReport,
}

/// Baseline on the configured domain. The outer rule is refined towards the hole.
pub fn baseline_solve(cfg: &ProblemConfig, disc: Discretization) -> Result<Baseline> {
    admissible(cfg, cfg.eps)?;
    let hole = cfg.scaled_hole()?;
    let anchor = [cfg.eps.0 * cfg.p[0], cfg.eps.0 * cfg.p[1]];
    let curve = cfg.outer.closed_boundary();
    let len = curve.length();
    let mut focus: Vec<Focus> =
        curve.breaks()[1..].iter().map(|&t| Focus { point: curve.point(t), ratio: 2.0, h_min: 1e-4 * len }).collect();
    focus.push(Focus { point: anchor, ratio: 1.0, h_min: 0.0 });
    let h = len * crate::quadrature::PANEL_ORDER as f64 / disc.n_outer as f64;
    let rule = refined_panel_rule(&curve, h, &focus);
    let g_in = cfg.g_inner;
    let (e1, e2) = cfg.eps;
    let gi = move |x: Pt| g_in.value([(x[0] - e1 * cfg.p[0]) / (e1 * e2), (x[1] - e1 * cfg.p[1]) / (e1 * e2)]);
    baseline_solve_curve(&rule, &cfg.g_outer, &hole, anchor, &gi, disc.n_hole)
}

/// Baseline for an arbitrary closed outer curve, already discretized.
pub fn baseline_solve_curve(
    outer: &QuadratureRule,
    g_outer: &BoundaryData,
    hole: &Curve,
    anchor: Pt,
    g_inner: &(dyn Fn(Pt) -> f64 + Sync),
    n_hole: usize,
) -> Result<Baseline> {
    let hole_rule = auto_closed_rule(hole, n_hole)?;
    let (n0, n1) = (outer.len(), hole_rule.len());
    let n = n0 + n1 + 1;
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    let k00 = double_layer_matrix(outer);
    let k11 = double_layer_matrix(&hole_rule);
    for i in 0..n0 {
        for j in 0..n0 {
            a[(i, j)] = k00[(i, j)];
        }
        a[(i, i)] += 0.5;
    }
    for i in 0..n1 {
        for j in 0..n1 {
            a[(n0 + i, n0 + j)] = k11[(i, j)];
        }
        a[(n0 + i, n0 + i)] -= 0.5;
    }
    // outer rows see the hole layer
    let rows: Vec<Vec<f64>> = outer
        .nodes
        .par_iter()
        .map(|xi| {
            let kern = |y: Pt, nu: Pt| [crate::potentials::double_layer_kernel(KernelKind::Classical, xi.x, y, nu)[0]];
            crate::potentials::layer_row(&hole_rule, &[xi.x], &kern).iter().map(|v| v[0]).collect()
        })
        .collect();
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            a[(i, n0 + j)] = v;
        }
        a[(i, n - 1)] = s2([outer.nodes[i].x[0] - anchor[0], outer.nodes[i].x[1] - anchor[1]]);
        b[i] = g_outer.value(outer.nodes[i].x);
    }
    let rows: Vec<Vec<f64>> = hole_rule
        .nodes
        .par_iter()
        .map(|xk| {
            let kern = |y: Pt, nu: Pt| [crate::potentials::double_layer_kernel(KernelKind::Classical, xk.x, y, nu)[0]];
            crate::potentials::layer_row(outer, &[xk.x], &kern).iter().map(|v| v[0]).collect()
        })
        .collect();
    for (k, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            a[(n0 + k, j)] = v;
        }
        let x = hole_rule.nodes[k].x;
        a[(n0 + k, n - 1)] = s2([x[0] - anchor[0], x[1] - anchor[1]]);
        b[n0 + k] = g_inner(x);
    }
    for (j, y) in hole_rule.nodes.iter().enumerate() {
        a[(n - 1, n0 + j)] = y.weight;
    }
    let report = solve_dense(&a, &b)?;
    let sigma_outer: Vec<f64> = report.x.rows(0, n0).iter().copied().collect();
    let sigma_hole: Vec<f64> = report.x.rows(n0, n1).iter().copied().collect();
    let source = report.x[n - 1];

    // ∂_ν u on the hole (outward from the hole)
    let maue_h = double_layer_normal_derivative(&hole_rule, &sigma_hole);
    let dn_hole: Vec<f64> = hole_rule
        .nodes
        .par_iter()
        .enumerate()
        .map(|(k, y)| {
            let d = double_layer_full(KernelKind::Classical, outer, &sigma_outer, y.x)?;
            let g = grad_s2([y.x[0] - anchor[0], y.x[1] - anchor[1]]);
            Ok(maue_h[k] + y.normal[0] * (d[1] + source * g[0]) + y.normal[1] * (d[2] + source * g[1]))
        })
        .collect::<Result<_>>()?;
    let flux = hole_rule.integrate(&dn_hole);
    let dg: Vec<f64> = outer.nodes.iter().map(|n| dot(g_outer.gradient(n.x), n.tangent)).collect();
    let mut e_out = crate::potentials::double_layer_flux_pairing(outer, &dg, &sigma_outer);
    let smooth: Vec<f64> = outer
        .nodes
        .par_iter()
        .map(|xi| {
            let d = double_layer_full(KernelKind::Classical, &hole_rule, &sigma_hole, xi.x)?;
            let g = grad_s2([xi.x[0] - anchor[0], xi.x[1] - anchor[1]]);
            Ok(xi.normal[0] * (d[1] + source * g[0]) + xi.normal[1] * (d[2] + source * g[1]))
        })
        .collect::<Result<_>>()?;
    for (i, xi) in outer.nodes.iter().enumerate() {
        e_out += xi.weight * g_outer.value(xi.x) * smooth[i];
    }
    let e_hole: f64 = hole_rule.nodes.iter().zip(&dn_hole).map(|(y, d)| y.weight * g_inner(y.x) * d).sum();
    Ok(Baseline {
        outer_rule: outer.clone(),
        hole_rule,
        sigma_outer,
        sigma_hole,
        source,
        anchor,
        energy: e_out - e_hole,
        flux,
        report,
    })
}

impl Baseline {
    pub fn eval(&self, x: Pt) -> Result<f64> {
        Ok(double_layer(KernelKind::Classical, &self.outer_rule, &self.sigma_outer, x)?
            + double_layer(KernelKind::Classical, &self.hole_rule, &self.sigma_hole, x)?
            + self.source * s2([x[0] - self.anchor[0], x[1] - self.anchor[1]]))
    }

    pub fn gradient(&self, x: Pt) -> Result<Pt> {
        let a = double_layer_full(KernelKind::Classical, &self.outer_rule, &self.sigma_outer, x)?;
        let b = double_layer_full(KernelKind::Classical, &self.hole_rule, &self.sigma_hole, x)?;
        let g = grad_s2([x[0] - self.anchor[0], x[1] - self.anchor[1]]);
        Ok([a[1] + b[1] + self.source * g[0], a[2] + b[2] + self.source * g[1]])
    }
}
