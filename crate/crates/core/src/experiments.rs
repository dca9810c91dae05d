//! Configuration, parameter sweeps, regime paths with extrapolation, and
//! CSV / plot-data output.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Deserialize;

use crate::geometry::{check_admissible, make_shape, BoundaryData, OuterDomain, ProblemConfig, Pt};
use crate::limits::{limiting_values, solve_u0_with, LimitBundle, LimitRecord};
use crate::solver::{Discretization, FieldEvaluator, Problem, Regime, RegimeState};
use crate::toy::{toy_closed_form, toy_solution, ToyConfig};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "eps1,eps2,delta1,delta2,regime,N,energy,sqrt_energy,flux,residual,cond_est,status";
pub const STATUS_OK: &str = "ok";
pub const STATUS_CONTAINMENT: &str = "skipped:containment";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub sweep: Option<SweepSection>,
    pub path: Option<PathSection>,
    pub toy: Option<ToySection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub outer: String,
    #[serde(default)]
    pub outer_params: Vec<f64>,
    #[serde(default = "default_hole")]
    pub hole: String,
    #[serde(default = "default_hole_params")]
    pub hole_params: Vec<f64>,
    pub p: [f64; 2],
}

fn default_hole() -> String {
    "disk".into()
}

fn default_hole_params() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default = "default_outer_data")]
    pub outer: String,
    #[serde(default = "default_inner_data")]
    pub inner: String,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection { outer: default_outer_data(), inner: default_inner_data() }
    }
}

fn default_outer_data() -> String {
    "zero".into()
}

fn default_inner_data() -> String {
    "constant:1".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_regime")]
    pub regime: String,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// self-convergence tolerance; none disables refinement
    pub tol: Option<f64>,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
    /// parameters for a single solve
    pub eps: Option<[f64; 2]>,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            regime: default_regime(),
            nodes: default_nodes(),
            tol: None,
            max_nodes: default_max_nodes(),
            eps: None,
        }
    }
}

fn default_regime() -> String {
    "M".into()
}

fn default_nodes() -> usize {
    128
}

fn default_max_nodes() -> usize {
    512
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_base")]
    pub base: f64,
    /// inclusive index range for ε₁ = base^n₁
    pub n1_range: [i32; 2],
    /// inclusive index range for ε₂ = base^n₂
    pub n2_range: [i32; 2],
}

fn default_base() -> f64 {
    2.0 / 3.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSection {
    pub lambda: f64,
    #[serde(default = "one")]
    pub a1: f64,
    #[serde(default = "one")]
    pub a2: f64,
    pub eta: Vec<f64>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// fixed ε₂ for the fixed regime
    pub eps2: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn default_degree() -> usize {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToySection {
    pub eps: [f64; 2],
    pub points: Vec<[f64; 2]>,
    #[serde(default = "default_k")]
    pub k: usize,
}

fn default_k() -> usize {
    64
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

impl ExperimentConfig {
    /// Problem template; ε is filled in per solve.
    pub fn problem(&self) -> Result<ProblemConfig> {
        let d = &self.domain;
        let outer = OuterDomain::from_arc(make_shape(&d.outer, &d.outer_params)?)?;
        let hole = make_shape(&d.hole, &d.hole_params)?;
        Ok(ProblemConfig {
            outer,
            hole,
            p: d.p,
            eps: (f64::NAN, f64::NAN),
            g_outer: BoundaryData::parse(&self.data.outer)?,
            g_inner: BoundaryData::parse(&self.data.inner)?,
        })
    }

    pub fn inner_data(&self) -> Result<BoundaryData> {
        BoundaryData::parse(&self.data.inner)
    }

    pub fn regime(&self) -> Result<Regime> {
        Regime::parse(&self.solver.regime)
    }

    pub fn discretization(&self) -> Result<Discretization> {
        if self.solver.nodes < 8 || self.solver.nodes % 2 == 1 {
            return Err(Error::Config(format!("nodes must be even and at least 8, got {}", self.solver.nodes)));
        }
        Ok(Discretization::from_nodes(self.solver.nodes))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub eps1: f64,
    pub eps2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub regime: Regime,
    pub n: usize,
    pub energy: f64,
    pub flux: f64,
    pub residual: f64,
    pub cond_est: f64,
    pub status: String,
    /// grid indices when the row comes from a sweep
    pub index: Option<(i32, i32)>,
}

impl Row {
    fn empty(regime: Regime, eps: (f64, f64), status: String) -> Row {
        let st = RegimeState::new(regime, eps).ok();
        Row {
            eps1: eps.0,
            eps2: eps.1,
            delta1: st.map_or(f64::NAN, |s| s.delta.0),
            delta2: st.map_or(f64::NAN, |s| s.delta.1),
            regime,
            n: 0,
            energy: f64::NAN,
            flux: f64::NAN,
            residual: f64::NAN,
            cond_est: f64::NAN,
            status,
            index: None,
        }
    }

    pub fn sqrt_energy(&self) -> f64 {
        self.energy.sqrt()
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            f(self.eps1),
            f(self.eps2),
            f(self.delta1),
            f(self.delta2),
            self.regime.label(),
            self.n,
            f(self.energy),
            f(self.sqrt_energy()),
            f(self.flux),
            f(self.residual),
            f(self.cond_est),
            self.status
        )
    }
}

/// 17 significant digits.
pub fn f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Solver levels N, 2N, 4N, … built on demand and shared across rows.
pub struct Ladder {
    cfg: ProblemConfig,
    base: Discretization,
    max_hole: usize,
    levels: Vec<Mutex<Option<Arc<Problem>>>>,
}

impl Ladder {
    pub fn new(cfg: &ProblemConfig, base: Discretization, max_hole: usize) -> Ladder {
        let mut count = 1;
        let mut n = base.n_hole;
        while n * 2 <= max_hole {
            n *= 2;
            count += 1;
        }
        Ladder { cfg: cfg.clone(), base, max_hole, levels: (0..count).map(|_| Mutex::new(None)).collect() }
    }

    pub fn max_hole(&self) -> usize {
        self.max_hole
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    fn disc(&self, level: usize) -> Discretization {
        (0..level).fold(self.base, |d, _| d.doubled())
    }

    pub fn level(&self, level: usize) -> Result<Arc<Problem>> {
        let slot = self
            .levels
            .get(level)
            .ok_or_else(|| Error::Config(format!("refinement level {level} exceeds the node cap")))?;
        let mut guard = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(p) = guard.as_ref() {
            return Ok(p.clone());
        }
        let d = self.disc(level);
        let u0 = Arc::new(solve_u0_with(&self.cfg.outer, self.cfg.g_outer, d.n_outer)?);
        let p = Arc::new(Problem::with_u0(&self.cfg, d, u0)?);
        *guard = Some(p.clone());
        Ok(p)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Solves at the base level; with a tolerance, doubles until energy and flux
/// settle. Returns the evaluator and whether the tolerance was met.
pub fn solve_row(ladder: &Ladder, state: &RegimeState, tol: Option<f64>) -> Result<(FieldEvaluator, bool)> {
    let mut fe = ladder.level(0)?.solve_state(state)?;
    let Some(tol) = tol else { return Ok((fe, true)) };
    for level in 1..ladder.depth() {
        let next = ladder.level(level)?.solve_state(state)?;
        let scale = next.energy.abs().max(next.flux.abs()).max(1.0);
        let change = (next.energy - fe.energy).abs().max((next.flux - fe.flux).abs()) / scale;
        fe = next;
        if change < tol {
            return Ok((fe, true));
        }
    }
    Ok((fe, false))
}

fn row_from(fe: &FieldEvaluator, converged: bool) -> Row {
    let st = fe.state();
    let d = &fe.problem.disc;
    Row {
        eps1: st.eps.0,
        eps2: st.eps.1,
        delta1: st.delta.0,
        delta2: st.delta.1,
        regime: st.regime,
        n: d.n_hole + d.n_arc + 1,
        energy: fe.energy,
        flux: fe.flux,
        residual: fe.report.residual,
        cond_est: fe.report.cond_est,
        status: if converged { STATUS_OK.into() } else { "unconverged".into() },
        index: None,
    }
}

/// One solve at ε, with admissibility screening. Numerical failures become the row status.
pub fn solve_point(ladder: &Ladder, regime: Regime, eps: (f64, f64), tol: Option<f64>) -> Row {
    let mut cfg = ladder.cfg.clone();
    cfg.eps = eps;
    let adm = check_admissible(&cfg);
    if !adm.ok {
        return Row::empty(regime, eps, STATUS_CONTAINMENT.into());
    }
    let state = match RegimeState::new(regime, eps) {
        Ok(s) => s,
        Err(e) => return Row::empty(regime, eps, format!("skipped:{}", e.to_string().replace(',', " "))),
    };
    match solve_row(ladder, &state, tol) {
        Ok((fe, conv)) => row_from(&fe, conv),
        Err(e) => Row::empty(regime, eps, format!("failed:{}", e.to_string().replace(',', " "))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: f64,
    pub n1: Vec<i32>,
    pub n2: Vec<i32>,
    pub regime: Regime,
}

impl SweepSpec {
    pub fn from_section(s: &SweepSection, regime: Regime) -> Result<SweepSpec> {
        if !(s.base > 0.0 && s.base < 1.0) {
            return Err(Error::Config(format!("sweep base must lie in (0, 1), got {}", s.base)));
        }
        Ok(SweepSpec {
            base: s.base,
            n1: (s.n1_range[0]..=s.n1_range[1]).collect(),
            n2: (s.n2_range[0]..=s.n2_range[1]).collect(),
            regime,
        })
    }
}

/// Rows in (n₁, n₂) lexicographic order.
pub fn run_sweep(spec: &SweepSpec, ladder: &Ladder, tol: Option<f64>) -> Vec<Row> {
    let grid: Vec<(i32, i32)> = spec.n1.iter().flat_map(|&a| spec.n2.iter().map(move |&b| (a, b))).collect();
    grid.par_iter()
        .map(|&(a, b)| {
            let eps = (spec.base.powi(a), spec.base.powi(b));
            let mut row = solve_point(ladder, spec.regime, eps, tol);
            row.index = Some((a, b));
            row
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub lambda: f64,
    pub a1: f64,
    pub a2: f64,
    pub eta: Vec<f64>,
    pub degree: usize,
    pub regime: Regime,
    /// fixed ε₂ of the fixed regime
    pub eps2: f64,
}

impl PathSpec {
    pub fn from_section(s: &PathSection, regime: Regime) -> Result<PathSpec> {
        if !(0.0..1.0).contains(&s.lambda) {
            return Err(Error::Config(format!("lambda must lie in [0, 1), got {}", s.lambda)));
        }
        if s.eta.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("path samples must be positive".into()));
        }
        if !(s.a1 > 0.0 && s.a2 > 0.0) {
            return Err(Error::Config("path coefficients must be positive".into()));
        }
        let eps2 = match (regime, s.eps2) {
            (Regime::FixedEps2, None) => return Err(Error::Config("the fixed regime needs path.eps2".into())),
            (_, Some(e)) if !(e > 0.0) => return Err(Error::Config(format!("eps2 must be positive, got {e}"))),
            (_, e) => e.unwrap_or(f64::NAN),
        };
        Ok(PathSpec { lambda: s.lambda, a1: s.a1, a2: s.a2, eta: s.eta.clone(), degree: s.degree, regime, eps2 })
    }

    /// ε(η): (a₁η, a₂η^{(1−λ)/λ}), or (a₁η, a₂e^{−1/η}) when λ = 0; the fixed regime keeps ε₂.
    pub fn eps(&self, eta: f64) -> (f64, f64) {
        let e1 = self.a1 * eta;
        match self.regime {
            Regime::FixedEps2 => (e1, self.eps2),
            Regime::TwoParam if self.lambda == 0.0 => (e1, self.a2 * (-1.0 / eta).exp()),
            Regime::TwoParam => (e1, self.a2 * eta.powf((1.0 - self.lambda) / self.lambda)),
        }
    }

    /// Extrapolation variable: δ₁ for the two-parameter regime, ε₁ otherwise.
    pub fn variable(&self, row: &Row) -> f64 {
        match self.regime {
            Regime::TwoParam => row.delta1,
            Regime::FixedEps2 => row.eps1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// difference between the degree d and d + 1 fits
    pub tol: f64,
}

/// Least-squares polynomial of the given degree in t, evaluated at t = 0.
pub fn poly_fit(t: &[f64], y: &[f64], degree: usize) -> Result<(Vec<f64>, f64)> {
    let m = t.len();
    if m < degree + 1 || y.len() != m {
        return Err(Error::Config(format!("{m} samples cannot fix a degree-{degree} fit")));
    }
    let scale = t.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let a = DMatrix::from_fn(m, degree + 1, |i, j| (t[i] / scale).powi(j as i32));
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let c = svd.solve(&b, 1e-14).map_err(|e| Error::Config(e.to_string()))?;
    let r = &a * &c - &b;
    let rel = r.norm() / b.norm().max(f64::MIN_POSITIVE);
    let coef = (0..=degree).map(|j| c[j] / scale.powi(j as i32)).collect();
    Ok((coef, rel))
}

pub fn extrapolate(t: &[f64], y: &[f64], degree: usize) -> Result<Extrapolation> {
    let (c, _) = poly_fit(t, y, degree)?;
    let tol = if t.len() > degree + 1 {
        (poly_fit(t, y, degree + 1)?.0[0] - c[0]).abs()
    } else if degree > 0 {
        (poly_fit(t, y, degree - 1)?.0[0] - c[0]).abs()
    } else {
        f64::NAN
    };
    Ok(Extrapolation { value: c[0], tol })
}

#[derive(Debug, Clone)]
pub struct PathResult {
    pub spec: PathSpec,
    pub rows: Vec<Row>,
    pub energy: Extrapolation,
    pub flux: Extrapolation,
    pub reference: LimitRecord,
}

impl PathResult {
    pub fn energy_deviation(&self) -> f64 {
        (self.energy.value - self.reference.energy_limit) / self.reference.energy_limit.abs().max(f64::MIN_POSITIVE)
    }

    pub fn flux_deviation(&self) -> f64 {
        self.flux.value - self.reference.flux_limit
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("quantity,extrapolated,tolerance,reference,deviation\n");
        let _ = writeln!(
            s,
            "energy,{},{},{},{}",
            f(self.energy.value),
            f(self.energy.tol),
            f(self.reference.energy_limit),
            f(self.energy.value - self.reference.energy_limit)
        );
        let _ = writeln!(
            s,
            "flux,{},{},{},{}",
            f(self.flux.value),
            f(self.flux.tol),
            f(self.reference.flux_limit),
            f(self.flux_deviation())
        );
        s
    }
}

/// Limiting values for the configured problem, with the same node count on the hole.
pub fn limit_bundle(ladder: &Ladder, eps2: f64) -> Result<LimitBundle> {
    let pr = ladder.level(0)?;
    let cfg = &pr.cfg;
    let e2 = eps2.is_finite().then_some(eps2);
    LimitBundle::new(pr.u0.clone(), &cfg.hole, cfg.p, cfg.g_inner, e2, pr.disc.n_hole)
}

pub fn run_regime_path(spec: &PathSpec, ladder: &Ladder, tol: Option<f64>) -> Result<PathResult> {
    let rows: Vec<Row> = spec.eta.par_iter().map(|&eta| solve_point(ladder, spec.regime, spec.eps(eta), tol)).collect();
    let ok: Vec<&Row> = rows.iter().filter(|r| r.is_ok()).collect();
    let t: Vec<f64> = ok.iter().map(|r| spec.variable(r)).collect();
    let e: Vec<f64> = ok.iter().map(|r| r.energy).collect();
    let fl: Vec<f64> = ok.iter().map(|r| r.flux).collect();
    let energy = extrapolate(&t, &e, spec.degree)?;
    let flux = extrapolate(&t, &fl, spec.degree)?;
    let bundle = limit_bundle(ladder, spec.eps2)?;
    let reference = limiting_values(spec.regime, &bundle)?;
    Ok(PathResult { spec: spec.clone(), rows, energy, flux, reference })
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut s = String::with_capacity(256 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

/// sqrt-energy against n₂, one block per n₁ (blank-line separated).
pub fn plot_data(rows: &[Row]) -> String {
    let mut s = String::from("# n2 eps2 sqrt_energy\n");
    let mut last = None;
    for r in rows {
        let Some((a, b)) = r.index else { continue };
        if last != Some(a) {
            if last.is_some() {
                s.push_str("\n\n");
            }
            let _ = writeln!(s, "# n1 = {a}");
            last = Some(a);
        }
        let _ = writeln!(s, "{b} {} {}", f(r.eps2), f(r.sqrt_energy()));
    }
    s
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

/// Writes `<name>.csv`, and for sweeps `<name>.dat` with the plot view.
pub fn emit_report(dir: &Path, name: &str, rows: &[Row]) -> Result<()> {
    write(dir, &format!("{name}.csv"), &csv_string(rows))?;
    if rows.iter().any(|r| r.index.is_some()) {
        write(dir, &format!("{name}.dat"), &plot_data(rows))?;
    }
    Ok(())
}

pub fn emit_path_report(dir: &Path, name: &str, res: &PathResult) -> Result<()> {
    emit_report(dir, name, &res.rows)?;
    write(dir, &format!("{name}_limits.csv"), &res.summary_csv())
}

pub fn limits_csv(ladder: &Ladder, eps2: f64) -> Result<String> {
    let b = limit_bundle(ladder, eps2)?;
    let mut s = String::from("regime,energy_limit,flux_limit,u0_energy,v0_energy,w_star_energy,w_star_flux,v0_constant\n");
    let nan = LimitRecord { energy_limit: f64::NAN, flux_limit: f64::NAN };
    for regime in [Regime::TwoParam, Regime::FixedEps2] {
        let l = limiting_values(regime, &b).unwrap_or(nan);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            regime.label(),
            f(l.energy_limit),
            f(l.flux_limit),
            f(b.u0.energy),
            f(b.v0.energy),
            f(b.w_star.as_ref().map_or(f64::NAN, |w| w.energy)),
            f(b.w_star.as_ref().map_or(f64::NAN, |w| w.flux)),
            f(b.v0.c)
        );
    }
    Ok(s)
}

/// Series and closed-form values at the configured points (closed form only for gⁱ = 1).
pub fn toy_csv(sec: &ToySection, g_inner: BoundaryData) -> Result<String> {
    let eps = (sec.eps[0], sec.eps[1]);
    let sol = toy_solution(&ToyConfig { eps, g_inner, k: sec.k })?;
    let mut s = String::from("x1,x2,series,closed_form\n");
    for x in &sec.points {
        let x: Pt = *x;
        let closed = if g_inner == BoundaryData::Constant(1.0) { toy_closed_form(eps, x)? } else { f64::NAN };
        let _ = writeln!(s, "{},{},{},{}", f(x[0]), f(x[1]), f(sol.eval(x)?), f(closed));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const CFG: &str = r#"
[domain]
outer = "stadium-arc"
p = [1.0, 1.0]

[data]
outer = "x2"
inner = "constant:1"

[solver]
nodes = 32

[sweep]
n1_range = [3, 4]
n2_range = [1, 2]
"#;

    #[test]
    fn config_parsing() {
        let c = parse_config(CFG).unwrap();
        assert_eq!(c.domain.hole, "disk");
        assert_eq!(c.regime().unwrap(), Regime::TwoParam);
        assert!(c.problem().is_ok());
        assert!(parse_config("[domain]\nouter = 3").is_err());
        assert!(parse_config(&CFG.replace("nodes = 32", "nodes = 32\nbogus = 1")).is_err());
        let bad = parse_config(&CFG.replace("\"x2\"", "\"sin\"")).unwrap();
        assert!(bad.problem().unwrap_err().is_config());
        let odd = parse_config(&CFG.replace("nodes = 32", "nodes = 33")).unwrap();
        assert!(odd.discretization().is_err());
    }

    #[test]
    fn float_format() {
        assert_eq!(f(1.0), "1.0000000000000000e0");
        assert_eq!(f(-0.1), "-1.0000000000000001e-1");
        assert_eq!(f(f64::NAN), "NaN");
    }

    #[test]
    fn polynomial_extrapolation() {
        let t: Vec<f64> = (1..=6).map(|k| 0.01 * k as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.0 - 3.0 * t + 0.5 * t * t).collect();
        let e = extrapolate(&t, &y, 2).unwrap();
        assert_abs_diff_eq!(e.value, 2.0, epsilon = 1e-12);
        assert!(e.tol < 1e-10);
        assert!(extrapolate(&t[..2], &y[..2], 2).is_err());
        let (c, rel) = poly_fit(&t, &y, 2).unwrap();
        assert_abs_diff_eq!(c[1], -3.0, epsilon = 1e-9);
        assert!(rel < 1e-14);
    }

    #[test]
    fn path_schedules() {
        let sec = PathSection { lambda: 0.5, a1: 1.0, a2: 2.0, eta: vec![0.1], degree: 2, eps2: None };
        let p = PathSpec::from_section(&sec, Regime::TwoParam).unwrap();
        let (e1, e2) = p.eps(0.01);
        assert_abs_diff_eq!(e1, 0.01);
        assert_abs_diff_eq!(e2, 0.02, epsilon = 1e-15);
        let z = PathSpec { lambda: 0.0, ..p.clone() };
        let (e1, e2) = z.eps(0.01);
        let d2 = e1.ln() / (e1 * e2).ln();
        assert!(d2 > 0.0 && d2 < 0.05);
        assert!(PathSpec::from_section(&PathSection { lambda: 1.0, ..sec.clone() }, Regime::TwoParam).is_err());
        assert!(PathSpec::from_section(&sec, Regime::FixedEps2).is_err());
    }

    #[test]
    fn empty_sweep_and_skips() {
        let c = parse_config(CFG).unwrap();
        let ladder = Ladder::new(&c.problem().unwrap(), c.discretization().unwrap(), 32);
        let spec = SweepSpec { base: 0.5, n1: vec![], n2: vec![1], regime: Regime::TwoParam };
        let rows = run_sweep(&spec, &ladder, None);
        assert!(rows.is_empty());
        assert_eq!(csv_string(&rows), format!("{CSV_HEADER}\n"));
        // centre (0.9, 0.9), radius 0.945: crosses the axis
        let row = solve_point(&ladder, Regime::TwoParam, (0.9, 1.05), None);
        assert_eq!(row.status, STATUS_CONTAINMENT);
        assert!(row.csv_line().ends_with(",skipped:containment"));
    }
}
