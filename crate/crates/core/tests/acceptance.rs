//! End-to-end acceptance checks. Prints one line per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use nearhole::experiments::{
    csv_string, extrapolate, parse_config, poly_fit, run_regime_path, run_sweep, ExperimentConfig, Ladder, PathResult,
    PathSpec, SweepSpec,
};
use nearhole::geometry::{make_shape, BoundaryData, OuterDomain, ProblemConfig, Pt};
use nearhole::kernels::{green2, green_kernel};
use nearhole::limits::solve_w_star;
use nearhole::potentials::{
    double_layer_normal_derivative, double_layer_trace, representation_check, single_layer_normal_trace,
    single_layer_trace, Side,
};
use nearhole::quadrature::closed_rule;
use nearhole::solver::{baseline_solve, Discretization, Problem, Regime, RegimeState};
use nearhole::toy::toy_closed_form;

const STADIUM: &str = r#"
[domain]
outer = "stadium-arc"
p = [1.0, 1.0]

[data]
outer = "x2"
inner = "constant:1"

[solver]
nodes = 64
"#;

fn config(extra: &str, inner: &str, regime: &str) -> ExperimentConfig {
    let text = format!("{}\n{extra}", STADIUM)
        .replace("constant:1", inner)
        .replace("nodes = 64", &format!("nodes = 64\nregime = \"{regime}\""));
    parse_config(&text).unwrap()
}

fn ladder(c: &ExperimentConfig) -> Ladder {
    Ladder::new(&c.problem().unwrap(), c.discretization().unwrap(), 64)
}

fn path(c: &ExperimentConfig) -> PathResult {
    let spec = PathSpec::from_section(c.path.as_ref().unwrap(), c.regime().unwrap()).unwrap();
    run_regime_path(&spec, &ladder(c), None).unwrap()
}

const PATH_M: &str = "[path]\nlambda = 0.5\neta = [1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12]\ndegree = 3\n";
const PATH_M_ALT: &str =
    "[path]\nlambda = 0.5\na1 = 0.5\na2 = 2.0\neta = [1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12]\ndegree = 3\n";
const PATH_M0: &str = "[path]\nlambda = 0.0\neta = [0.1, 0.08, 0.06, 0.05, 0.04, 0.03, 0.025, 0.02]\ndegree = 3\n";
const PATH_N: &str = "[path]\nlambda = 0.0\neps2 = 0.5\neta = [0.1, 0.08, 0.06, 0.05, 0.04, 0.03, 0.025, 0.02]\ndegree = 4\n";
const SWEEP_E: &str = "[sweep]\nn1_range = [4, 10]\nn2_range = [20, 20]\n";

struct Pipeline {
    sweep: String,
    m: PathResult,
    m_alt: PathResult,
    m0: PathResult,
    n: PathResult,
    sweep_extrap: f64,
    sweep_time: f64,
}

impl Pipeline {
    fn csvs(&self) -> Vec<String> {
        let mut v = vec![self.sweep.clone()];
        for p in [&self.m, &self.m_alt, &self.m0, &self.n] {
            v.push(csv_string(&p.rows));
            v.push(p.summary_csv());
        }
        v
    }
}

fn pipeline() -> Pipeline {
    let t = Instant::now();
    let c = config(SWEEP_E, "zero", "M");
    let spec = SweepSpec::from_section(c.sweep.as_ref().unwrap(), Regime::TwoParam).unwrap();
    let rows = run_sweep(&spec, &ladder(&c), None);
    let sweep_time = t.elapsed().as_secs_f64();
    let ok: Vec<_> = rows.iter().filter(|r| r.is_ok()).collect();
    let e1: Vec<f64> = ok.iter().map(|r| r.eps1).collect();
    let se: Vec<f64> = ok.iter().map(|r| r.sqrt_energy()).collect();
    let sweep_extrap = extrapolate(&e1, &se, 2).unwrap().value;
    Pipeline {
        sweep: csv_string(&rows),
        m: path(&config(PATH_M, "constant:1", "M")),
        m_alt: path(&config(PATH_M_ALT, "constant:1", "M")),
        m0: path(&config(PATH_M0, "constant:1", "M")),
        n: path(&config(PATH_N, "constant:1", "N")),
        sweep_extrap,
        sweep_time,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn report(results: &mut Vec<(usize, bool)>, k: usize, ok: bool, detail: String) {
    println!("criterion {k}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    results.push((k, ok));
}

fn toy_criterion() -> (bool, String) {
    let t = Instant::now();
    let eps = (0.3, 0.5);
    let cfg = ProblemConfig {
        outer: OuterDomain::from_arc(make_shape("dome-arc", &[30.0]).unwrap()).unwrap(),
        hole: make_shape("disk", &[1.0]).unwrap(),
        p: [0.0, 1.0],
        eps,
        g_outer: BoundaryData::Constant(0.0),
        g_inner: BoundaryData::Constant(1.0),
    };
    // 20 points at distance 0.02 to 0.3 from the hole boundary
    let pts: Vec<Pt> = (0..20)
        .map(|k| {
            let th = -0.4 + (PI + 0.8) * k as f64 / 19.0;
            let r = 0.15 + 0.02 + 0.28 * (k % 5) as f64 / 4.0;
            [r * th.cos(), 0.3 + r * th.sin()]
        })
        .collect();
    assert!(pts.iter().all(|x| x[1] > 0.0));
    let err = |f: &dyn Fn(Pt) -> f64| {
        pts.iter()
            .map(|&x| {
                let e = toy_closed_form(eps, x).unwrap();
                ((f(x) - e) / e).abs()
            })
            .fold(0.0, f64::max)
    };
    let pr = Arc::new(Problem::new(&cfg, Discretization::default()).unwrap());
    let mut errs = Vec::new();
    for regime in [Regime::TwoParam, Regime::FixedEps2] {
        let fe = pr.solve_state(&RegimeState::new(regime, eps).unwrap()).unwrap();
        errs.push(err(&|x| fe.eval_macroscopic(x).unwrap()));
    }
    let b = baseline_solve(&cfg, Discretization::default()).unwrap();
    errs.push(err(&|x| b.eval(x).unwrap()));
    let secs = t.elapsed().as_secs_f64();
    let ok = errs.iter().all(|e| *e < 1e-3) && secs < 10.0;
    (ok, format!("relative errors M {:.2e}, N {:.2e}, baseline {:.2e}; {secs:.1} s", errs[0], errs[1], errs[2]))
}

fn jump_relations() -> f64 {
    let rule = closed_rule(&make_shape("kite", &[]).unwrap(), 128).unwrap();
    // u = Re z², harmonic
    let u: Vec<f64> = rule.nodes.iter().map(|n| n.x[0] * n.x[0] - n.x[1] * n.x[1]).collect();
    let du: Vec<f64> = rule
        .nodes
        .iter()
        .map(|n| 2.0 * n.x[0] * n.normal[0] - 2.0 * n.x[1] * n.normal[1])
        .collect();
    let v = single_layer_trace(&rule, &du);
    let dn_w = double_layer_normal_derivative(&rule, &u);
    let mut worst = 0.0f64;
    for (side, dirichlet, neumann) in [(Side::Interior, 1.0, 1.0), (Side::Exterior, 0.0, 0.0)] {
        let w = double_layer_trace(&rule, side, &u);
        let dn_v = single_layer_normal_trace(&rule, side, &du);
        for i in 0..rule.len() {
            worst = worst.max((w[i] - v[i] - dirichlet * u[i]).abs());
            worst = worst.max((dn_w[i] - dn_v[i] - neumann * du[i]).abs());
        }
    }
    worst
}

fn property_suite() -> (bool, String) {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, v: f64, tol: f64| {
        ok &= v < tol;
        notes.push(format!("{name} {v:.1e}"));
    };
    check("jump", jump_relations(), 1e-8);

    let c = make_shape("ellipse", &[0.6, 0.3]).unwrap().affine([0.2, 1.0], 1.0);
    let rule = closed_rule(&c, 128).unwrap();
    let res = representation_check(
        &rule,
        &|x| x[0] * x[1] + x[0],
        &|x| [x[1] + 1.0, x[0]],
        &[[0.2, 1.0], [0.5, 1.1], [-0.1, 0.85]],
        &[[2.0, 1.0], [0.2, 0.4], [0.2, -2.0], [-3.0, 5.0]],
    )
    .unwrap();
    check("representation", res.interior.max(res.exterior), 1e-8);

    let mut axis = 0.0f64;
    for (a, y) in [(0.3, [0.1, 0.7]), (-5.0, [2.0, 1e-3]), (1e3, [-1.0, 40.0])] {
        axis = axis.max(green2([a, 0.0], y).abs()).max(green2(y, [a, 0.0]).abs());
        axis = axis.max(green_kernel::<3>([a, 1.0, 0.0], [y[0], 0.5, y[1]]).unwrap().value.abs());
    }
    check("axis", axis, f64::MIN_POSITIVE);

    // |x|^{n-1} G along a ray, relative to its value at |x| = 10
    let mut growth = 0.0f64;
    let dir = [0.6f64, 0.8];
    let y2 = [0.3, 0.9];
    let y3 = [0.3, -0.2, 0.9];
    let p2 = |r: f64| r * green2([r * dir[0], r * dir[1]], y2).abs();
    let p3 = |r: f64| r * r * green_kernel::<3>([r * dir[0], 0.0, r * dir[1]], y3).unwrap().value.abs();
    for k in 1..=12 {
        let r = 10f64.powi(k);
        growth = growth.max(p2(r) / p2(10.0)).max(p3(r) / p3(10.0));
    }
    check("decay", (growth - 2.0).max(0.0), 1e-12);

    let w = solve_w_star(&make_shape("kite", &[0.5]).unwrap(), 0.5, [0.0, 1.0], BoundaryData::CosTheta, 0.3, 128).unwrap();
    let mut odd = 0.0f64;
    for x in [[1.0, 0.5], [-0.7, 1.3], [0.2, -0.4], [3.0, 2.0]] {
        let xt = [x[0], -x[1] - 2.0];
        odd = odd.max((w.v_star(x).unwrap() + w.v_star(xt).unwrap()).abs());
    }
    check("odd", odd, 1e-8);

    // maximum principle: data range [0, 2]
    let cfg = ProblemConfig {
        outer: OuterDomain::from_arc(make_shape("stadium-arc", &[]).unwrap()).unwrap(),
        hole: make_shape("disk", &[1.0]).unwrap(),
        p: [1.0, 1.0],
        eps: (0.3, 0.3),
        g_outer: BoundaryData::X2,
        g_inner: BoundaryData::Constant(1.0),
    };
    let pr = Arc::new(Problem::new(&cfg, Discretization::default()).unwrap());
    let fe = pr.solve_state(&RegimeState::new(Regime::TwoParam, cfg.eps).unwrap()).unwrap();
    let mut viol = 0.0f64;
    for i in 0..15 {
        for j in 0..10 {
            let x = [-2.8 + 0.4 * i as f64, 0.01 + 0.2 * j as f64];
            if !cfg.outer.contains(x) || (x[0] - 0.3).hypot(x[1] - 0.3) <= 0.09 {
                continue;
            }
            let v = fe.eval_macroscopic(x).unwrap();
            viol = viol.max(-v).max(v - 2.0);
        }
    }
    check("max principle", viol.max(0.0), 1e-12);

    let pr2 = Arc::new(Problem::with_u0(&cfg, Discretization::default().doubled(), pr.u0.clone()).unwrap());
    let fe2 = pr2.solve_state(fe.state()).unwrap();
    let change = rel(fe2.energy, fe.energy).max((fe2.flux - fe.flux).abs() / fe.flux.abs());
    check("self-convergence", change, 1e-6);
    (ok, notes.join(", "))
}

fn main() {
    let mut results = Vec::new();

    let (ok, d) = toy_criterion();
    report(&mut results, 1, ok, d);

    let p = pipeline();
    let target = (8.0 + PI).sqrt();
    let dev = rel(p.sweep_extrap, target);
    report(
        &mut results,
        2,
        dev < 0.01 && p.sweep_time < 120.0,
        format!("sqrt-energy {:.6} vs {target:.6}, deviation {dev:.1e}; {:.1} s", p.sweep_extrap, p.sweep_time),
    );

    let dm = rel(p.m.energy.value, p.m.reference.energy_limit);
    let dm0 = rel(p.m0.energy.value, p.m0.reference.energy_limit);
    let dn = rel(p.n.energy.value, p.n.reference.energy_limit);
    let gap = (p.m.energy.value - p.n.energy.value).abs();
    let tol = p.m.energy.tol.max(p.n.energy.tol);
    report(
        &mut results,
        3,
        dm < 0.02 && dm0 < 0.02 && dn < 0.02 && gap > 5.0 * tol,
        format!("M {dm:.1e} (lambda 0: {dm0:.1e}), N {dn:.1e}, gap {gap:.3} vs tolerance {tol:.1e}"),
    );

    let scale = p.m.rows.iter().filter(|r| r.is_ok()).map(|r| r.flux.abs()).fold(0.0, f64::max);
    let fm = p.m.flux.value.abs() / scale;
    let fn_ = rel(p.n.flux.value, p.n.reference.flux_limit);
    report(&mut results, 4, fm < 1e-3 && fn_ < 0.02, format!("M flux/scale {fm:.1e}, N flux deviation {fn_:.1e}"));

    let (ok, d) = property_suite();
    report(&mut results, 5, ok, d);

    let n_rows: Vec<_> = p.n.rows.iter().filter(|r| r.is_ok() && r.eps1 >= 0.02 && r.eps1 <= 0.1).collect();
    let t: Vec<f64> = n_rows.iter().map(|r| r.eps1).collect();
    let y: Vec<f64> = n_rows.iter().map(|r| r.energy).collect();
    let (_, fit) = poly_fit(&t, &y, 4).unwrap();
    let indep = (p.m.energy.value - p.m_alt.energy.value).abs();
    let indep_tol = p.m.energy.tol + p.m_alt.energy.tol;
    report(
        &mut results,
        6,
        fit < 1e-3 && indep < indep_tol,
        format!("degree-4 residual {fit:.1e}; path difference {indep:.1e} vs tolerance {indep_tol:.1e}"),
    );

    let again = pipeline();
    let same = p.csvs() == again.csvs();
    report(&mut results, 7, same, format!("{} tables compared", p.csvs().len()));

    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
