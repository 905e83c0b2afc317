//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Runs without the libtest harness so the report is always printed.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdlab::estimates::{holder_constant, sup_bound, sup_bound_report, space_lipschitz_report, time_holder_report};
use rdlab::grid::{cells_to_cover, make_grid};
use rdlab::harness::{instability_demo, refine_study, Reference, Window};
use rdlab::oracle::{quadrature, OracleSolution};
use rdlab::scheme::discrete_residual_max;
use rdlab::testfn::{fd_consistency_report, Region};
use rdlab::weak::{field_for_bumps, pair, sbp_report, weak_residual, ResidualMode};
use rdlab::{make_builtin, solve, solve_region, BumpTestFunction, FieldRegion, InitialData, ProblemSpec, ReactionTerm};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn reactions() -> Vec<ReactionTerm> {
    vec![
        ReactionTerm::zero(),
        make_builtin("linear", &[1.0]).unwrap(),
        make_builtin("linear", &[-0.5]).unwrap(),
        make_builtin("sine", &[]).unwrap(),
        make_builtin("clamped_logistic", &[2.0]).unwrap(),
    ]
}

fn initial_data() -> Vec<InitialData> {
    vec![
        InitialData::Gaussian,
        InitialData::Constant(0.3),
        InitialData::Linear(0.5),
        InitialData::Sine { amplitude: 1.0, wavenumber: 1.0 },
        InitialData::Lorentzian,
        InitialData::Tent,
    ]
}

fn scheme_consistency() -> Outcome {
    let mut worst_ratio = 0.0_f64;
    let mut count = 0;
    for reaction in reactions() {
        for initial in initial_data() {
            for alpha in [0.25, 0.5] {
                let dx = 0.1;
                let spec = make_grid(dx, alpha * dx * dx, 200, 1.0, false).unwrap();
                let problem = ProblemSpec::new(1.0, reaction.clone(), initial.clone()).unwrap();
                let field = solve(&spec, &problem).map_err(|e| e.to_string())?;
                let res = discrete_residual_max(&field, &problem.reaction);
                let tol = 1e-12 * (1.0 + field.max_abs() / spec.dt);
                worst_ratio = worst_ratio.max(res / tol);
                count += 1;
                if res > tol {
                    return Err(format!(
                        "{} + {} at alpha {alpha}: residual {res:e} > {tol:e}",
                        reaction.name,
                        initial.name()
                    ));
                }
            }
        }
    }
    Ok(format!("{count} problems, worst residual/tolerance = {worst_ratio:.3e}"))
}

/// Piecewise-linear profile through random knots on `[-5, 5]`, constant outside.
fn random_profile(rng: &mut ChaCha8Rng) -> (InitialData, f64, f64) {
    let knots: Vec<f64> = (0..21).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let m = knots.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let l = knots.windows(2).fold(0.0_f64, |a, w| a.max((w[1] - w[0]).abs() / 0.5));
    let f = move |x: f64| {
        let s = ((x + 5.0) / 0.5).clamp(0.0, 20.0);
        let i = (s.floor() as usize).min(19);
        let w = s - i as f64;
        knots[i] * (1.0 - w) + knots[i + 1] * w
    };
    (InitialData::custom("piecewise_linear", f), m, l)
}

fn max_principle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0_f64;
    for trial in 0..20 {
        let (initial, m, l) = random_profile(&mut rng);
        for alpha in [0.25, 0.5] {
            let dx = 0.1;
            let spec = make_grid(dx, alpha * dx * dx, 300, 1.0, false).unwrap();
            let problem = ProblemSpec::with_bounds(1.0, ReactionTerm::zero(), initial.clone(), m, l).unwrap();
            let field = solve(&spec, &problem).map_err(|e| e.to_string())?;
            let row0 = field.row(0);
            let lo = row0.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = row0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for row in field.rows() {
                for &u in row {
                    let excess = (u - hi).max(lo - u).max(0.0);
                    worst = worst.max(excess);
                }
            }
            if worst > 1e-12 {
                return Err(format!("trial {trial}, alpha {alpha}: excursion {worst:e} beyond [{lo}, {hi}]"));
            }
        }
    }
    Ok(format!("40 runs, largest excursion {worst:e}"))
}

fn stability_threshold() -> Outcome {
    let unstable = instability_demo(0.6, 60, 1e-8).map_err(|e| e.to_string())?;
    let critical = instability_demo(0.5, 60, 1e-8).map_err(|e| e.to_string())?;
    let dev_u = unstable.ratios.iter().map(|r| (r - 1.4).abs() / 1.4).fold(0.0, f64::max);
    let dev_c = critical.ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    check(
        dev_u <= 1e-10 && dev_c <= 1e-10 && unstable.ratios.len() == 60 && critical.ratios.len() == 60,
        format!("alpha 0.6: max |ratio - 1.4|/1.4 = {dev_u:.2e}; alpha 0.5: max |ratio - 1| = {dev_c:.2e}"),
    )
}

fn heat_convergence() -> Outcome {
    let start = Instant::now();
    let problem = ProblemSpec::new(1.0, ReactionTerm::zero(), InitialData::Gaussian).unwrap();
    let oracle = OracleSolution::for_problem(&problem.initial, &problem.reaction, 1.0).unwrap();
    let window = Window { x_half: 2.0, t_eval: 1.0, stride: 1 };
    let study = refine_study(&problem, &[0.1, 0.05, 0.025], 0.25, window, &Reference::Oracle(oracle))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let orders = &study.observed_orders;
    let ok = orders.iter().all(|q| (1.8..=2.2).contains(q)) && elapsed < 10.0;
    check(
        ok,
        format!(
            "errors {:?}, orders {:?}, {elapsed:.2} s",
            study.errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            orders.iter().map(|q| format!("{q:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn bound_suite() -> Outcome {
    let cases = [
        ("sine", vec![], InitialData::Sine { amplitude: 1.0, wavenumber: 1.0 }),
        ("clamped_logistic", vec![2.0], InitialData::Lorentzian),
        ("linear", vec![1.0], InitialData::Gaussian),
    ];
    let (dx, alpha, tbar, x_window) = (0.05, 0.25, 1.0, 3.0);
    let dt = alpha * dx * dx;
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, params, initial) in cases {
        let reaction = make_builtin(name, &params).unwrap();
        let problem = ProblemSpec::new(1.0, reaction, initial).unwrap();
        let keep = cells_to_cover(x_window, dx);
        let top = cells_to_cover(tbar, dt);
        let spec = make_grid(dx, dt, keep + top, 1.0, false).unwrap();
        problem.check_declared_bounds(&spec).map_err(|e| e.to_string())?;
        let field = solve_region(&spec, &problem, FieldRegion { half_width: keep, top_level: top })
            .map_err(|e| e.to_string())?;

        // the Hoelder constant, recomputed term by term
        let (m, l, k0, k1) = (problem.init_bound, problem.init_lipschitz, problem.reaction.k0, problem.reaction.k1);
        let a0 = sup_bound(m, k0, k1, tbar);
        let a = k0 + k1 * a0;
        let lbar = (k1 * tbar).exp() * l;
        let c = (a + 1.0) * tbar.sqrt() + 2.0 * lbar;
        let constants = holder_constant(m, k0, k1, l, tbar).unwrap();
        let c_ok = (constants.c_holder - c).abs() <= 1e-14 * c;

        let reports = [
            sup_bound_report(&field, &problem),
            space_lipschitz_report(&field, &problem),
            time_holder_report(&field, &problem, tbar).map_err(|e| e.to_string())?,
        ];
        let margins: Vec<String> = reports
            .iter()
            .map(|r| format!("{}={:.3e}", r.estimate_name, r.worst_margin))
            .collect();
        let pass = reports.iter().all(|r| r.pass) && c_ok;
        ok &= pass;
        lines.push(format!("{name}: C={c:.6} [{}]", margins.join(", ")));
    }
    check(ok, lines.join("; "))
}

fn sbp_bumps() -> Vec<BumpTestFunction> {
    vec![
        BumpTestFunction::new(0.0, 0.5, 1.0, 0.4, 1.0),
        BumpTestFunction::new(0.3, 0.0, 0.8, 0.3, 2.0),
        BumpTestFunction::new(-1.2, 0.25, 0.5, 0.5, -1.5),
        BumpTestFunction::new(0.7, 1.0, 1.5, 0.2, 0.5),
        BumpTestFunction::standard(0.0, 0.0),
    ]
}

fn sbp_exactness() -> Outcome {
    let problem = ProblemSpec::new(1.0, ReactionTerm::zero(), InitialData::Gaussian).unwrap();
    let bumps = sbp_bumps();
    let mut lines = Vec::new();
    let mut ok = true;
    for dx in [0.1, 0.05] {
        let field = field_for_bumps(&problem, dx, 0.25 * dx * dx, &bumps, false).map_err(|e| e.to_string())?;
        let mut worst = 0.0_f64;
        for phi in &bumps {
            let r = sbp_report(&field, phi).map_err(|e| e.to_string())?;
            ok &= r.pass;
            worst = worst.max(r.gap / (1.0 + r.t_sum.abs()));
        }
        lines.push(format!("dx {dx}: worst gap/(1+|T|) = {worst:.2e}"));
    }
    check(ok, format!("5 bumps; {}", lines.join(", ")))
}

fn weak_residuals() -> Outcome {
    let phi = BumpTestFunction::new(0.0, 0.25, 1.0, 0.5, 1.0);
    let problems = [
        ("heat", ProblemSpec::new(1.0, ReactionTerm::zero(), InitialData::Gaussian).unwrap()),
        (
            "clamped_logistic(2)",
            ProblemSpec::new(1.0, make_builtin("clamped_logistic", &[2.0]).unwrap(), InitialData::Gaussian).unwrap(),
        ),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, problem) in &problems {
        let mut exact = Vec::new();
        let mut fd = Vec::new();
        for dx in [0.1, 0.05, 0.025] {
            let dt = 0.25 * dx * dx;
            let field = field_for_bumps(problem, dx, dt, &[phi], false).map_err(|e| e.to_string())?;
            let re = weak_residual(&field, problem, &phi, ResidualMode::ExactDerivatives).map_err(|e| e.to_string())?;
            let rf =
                weak_residual(&field, problem, &phi, ResidualMode::FiniteDifferences).map_err(|e| e.to_string())?;
            let s = phi.support();
            let region = Region { x_min: s.x_min - dx, x_max: s.x_max + dx, t_min: 0.0, t_max: s.t_max + dt };
            let eps = fd_consistency_report(&phi, field.spec(), &region);
            let area = (s.x_max - s.x_min) * (s.t_max - s.t_min.max(0.0));
            let allowed = (eps.eps_t_max + eps.eps_xx_max) * field.max_abs() * (area + 1.0);
            let diff = (re.residual - rf.residual).abs();
            ok &= diff <= allowed;
            exact.push(re.residual.abs());
            fd.push(rf.residual.abs());
        }
        let factors = |v: &[f64]| v.windows(2).map(|w| w[0] / w[1]).collect::<Vec<f64>>();
        let (fe, ff) = (factors(&exact), factors(&fd));
        ok &= fe.iter().chain(&ff).all(|&r| r >= 2.0);
        lines.push(format!(
            "{name}: exact {:?} (x{:.2}, x{:.2}), fd {:?} (x{:.2}, x{:.2})",
            exact.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
            fe[0],
            fe[1],
            fd.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
            ff[0],
            ff[1]
        ));
    }
    check(ok, lines.join("; "))
}

fn grid_sum_vs_integral() -> Outcome {
    // the bump straddles t = 0, where the grid sum starts
    let phi = BumpTestFunction::new(0.2, 0.0, 1.0, 0.5, 1.0);
    let s = phi.support();
    let exact = quadrature::integrate_2d(|x, t| phi.value(x, t), (s.x_min, s.x_max), (0.0, s.t_max), 1e-13);
    let ones = ProblemSpec::new(1.0, ReactionTerm::zero(), InitialData::Constant(1.0)).unwrap();
    let mut errors = Vec::new();
    for dx in [0.1, 0.05, 0.025, 0.0125] {
        let field = field_for_bumps(&ones, dx, 0.25 * dx * dx, &[phi], false).map_err(|e| e.to_string())?;
        errors.push((pair(&field, &phi).map_err(|e| e.to_string())? - exact).abs());
    }
    let factors: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    check(
        factors.iter().all(|&r| r >= 2.0),
        format!(
            "errors {:?}, factors {:?}",
            errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            factors.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
        ),
    )
}

const DETERMINISM_CONFIG: &str = "\
problem.initial = gaussian
problem.reaction = clamped_logistic(2)
grid.dx = 0.025
grid.alpha = 0.25
grid.x_window = 2
grid.t_final = 1.5
estimates.tbar = 1
testfn.bump.a = 0, 0.5, 1, 0.4, 1
testfn.bump.b = 0.3, 0, 0.8, 0.3, 2
converge.dx_list = 0.1, 0.05, 0.025
converge.reference = finest
unstable.alpha = 0.6
unstable.steps = 40
output.level_stride = 50
output.column_stride = 4
";

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "4", "4"] {
        let out = tmp.path().join(format!("out_{threads}_{}", outputs.len()));
        let status = Command::new(env!("CARGO_BIN_EXE_rdlab"))
            .args(["all", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env("RDLAB_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        if status.status.code() != Some(0) {
            return Err(format!(
                "rdlab all exited with {:?}: {}",
                status.status.code(),
                String::from_utf8_lossy(&status.stderr)
            ));
        }
        outputs.push(read_dir(&out));
    }
    let names: Vec<&String> = outputs[0].keys().collect();
    let identical = outputs.iter().all(|o| *o == outputs[0]);
    let bytes: usize = outputs[0].values().map(Vec::len).sum();
    check(
        identical && names.len() >= 10,
        format!("{} artifacts ({bytes} bytes) identical across 1, 4, 4 threads: {identical}", names.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("scheme consistency", scheme_consistency),
        ("discrete maximum principle", max_principle),
        ("stability threshold", stability_threshold),
        ("heat oracle convergence", heat_convergence),
        ("a-priori bound suite", bound_suite),
        ("summation-by-parts exactness", sbp_exactness),
        ("weak residual", weak_residuals),
        ("grid sum vs integral", grid_sum_vs_integral),
        ("determinism across thread counts", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.2} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.2} s): {detail}");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
