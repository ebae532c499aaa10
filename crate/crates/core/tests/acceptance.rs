//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;
use spindir::cli::{run, ReportEnvelope, EXIT_OK};
use spindir::fidelity::{
    best_fidelity, build_matrix, char_poly_q, max_eigenpair, optimal_fidelity,
};
use spindir::jacobi::{
    asymptotic_zero, check_zero_inequalities, jacobi_eval, largest_zero, JacobiParams,
    BESSEL_J0_FIRST_ZERO,
};
use spindir::montecarlo::simulate;
use spindir::povm::{
    default_degree, degenerate_povm, octahedron_povm, omega_summary, quadrature_fidelity,
    tetrahedron_povm, verify_completeness, PovmSpec, TwoSpinLabel,
};
use spindir::su2::{seeded_rng, sphere_quadrature};
use spindir::HalfInt;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn cli(args: &[&str]) -> ReportEnvelope {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("spindir").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    assert_eq!(code, EXIT_OK, "{}", String::from_utf8_lossy(&err));
    serde_json::from_slice(&out).expect("report is JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let env = cli(&["table", "--n-max", "7"]);
    let elapsed = start.elapsed();
    let rows = env.results["rows"].as_array().expect("rows");
    let exact = [
        2.0 / 3.0,
        (3.0 + 3f64.sqrt()) / 6.0,
        (6.0 + 6f64.sqrt()) / 10.0,
        (5.0 + 15f64.sqrt()) / 10.0,
    ];
    let closed = rows
        .iter()
        .zip(exact)
        .map(|(r, e)| (num(&r["fidelity"]) - e).abs())
        .fold(0.0, f64::max);
    let decimals = rows[4..]
        .iter()
        .zip([0.9114, 0.9306, 0.9429])
        .map(|(r, e)| (num(&r["fidelity"]) - e).abs())
        .fold(0.0, f64::max);
    let ok =
        rows.len() == 7 && closed < 1e-12 && decimals < 5e-5 && elapsed < Duration::from_secs(1);
    (
        ok,
        format!(
            "closed-form err {closed:.1e}, 4-decimal err {decimals:.1e}, {:.3} s",
            secs(elapsed)
        ),
    )
}

fn jacobi_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for j2 in 0..=30 {
        for ma2 in (j2 % 2..=j2).step_by(2) {
            for mb2 in (j2 % 2..=j2).step_by(2) {
                let matrix = build_matrix(h(j2), h(ma2), h(mb2)).expect("valid");
                let (top, _) = max_eigenpair(&matrix);
                let m2 = ma2.max(mb2);
                let l = ((j2 - m2) / 2 + 1) as u32;
                let params =
                    JacobiParams::new(l, ((mb2 - ma2).abs() / 2) as u32, ((ma2 + mb2) / 2) as u32);
                worst = worst.max((top - largest_zero(params).expect("zero").largest_zero).abs());
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-10 && elapsed < Duration::from_secs(10);
    (
        ok,
        format!(
            "{cases} cases, max |λ - x| {worst:.1e}, {:.3} s",
            secs(elapsed)
        ),
    )
}

fn parallel_spins() -> Outcome {
    let worst = (1..=20)
        .map(|n: i32| {
            (best_fidelity(h(n), h(n), h(n)).expect("valid").fidelity
                - f64::from(n + 1) / f64::from(n + 2))
            .abs()
        })
        .fold(0.0, f64::max);
    (worst < 1e-12, format!("max err {worst:.1e} for N = 1..20"))
}

fn char_poly_proportional() -> Outcome {
    let mut rng = seeded_rng(2024);
    let grid: Vec<f64> = (0..50).map(|i| -1.0 + 2.0 * f64::from(i) / 49.0).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let j2: i32 = rng.random_range(1..=30);
        let pick =
            |rng: &mut spindir::su2::SimRng| j2 % 2 + 2 * rng.random_range(0..=(j2 - j2 % 2) / 2);
        let (ma2, mb2) = (pick(&mut rng), pick(&mut rng));
        let matrix = build_matrix(h(j2), h(ma2), h(mb2)).expect("valid");
        let p = matrix.jacobi_params();
        let ratios: Vec<f64> = grid
            .iter()
            .map(|&x| char_poly_q(&matrix, x)[matrix.size()] / jacobi_eval(p, x))
            .collect();
        let reference = ratios
            .iter()
            .copied()
            .fold(0.0, |acc: f64, r| if r.abs() > acc.abs() { r } else { acc });
        let spread = ratios
            .iter()
            .map(|r| ((r - reference) / reference).abs())
            .fold(0.0, f64::max);
        worst = worst.max(spread);
    }
    (
        worst < 1e-9,
        format!("max relative spread {worst:.1e} over 20 triples"),
    )
}

fn povm_completeness() -> Outcome {
    let tet = verify_completeness(&tetrahedron_povm());
    let oct1 = verify_completeness(&octahedron_povm(h(1)).expect("valid"));
    let oct3 = verify_completeness(&octahedron_povm(h(3)).expect("valid"));
    let mut cont: f64 = 0.0;
    for j2 in 0..=10 {
        for mb2 in (j2 % 2..=j2).step_by(2) {
            cont = cont.max(verify_completeness(
                &PovmSpec::continuous(h(j2), h(mb2)).expect("valid"),
            ));
        }
    }
    let degen = degenerate_povm(4, h(0))
        .and_then(|d| d.verify_completeness(&sphere_quadrature(default_degree(h(4)))))
        .expect("degenerate POVM");
    let ok = tet < 1e-12 && oct1 < 1e-10 && oct3 < 1e-10 && cont < 1e-10 && degen < 1e-9;
    (
        ok,
        format!("tetrahedron {tet:.1e}, octahedron {oct1:.1e}/{oct3:.1e}, continuous J<=5 {cont:.1e}, degenerate N=4 {degen:.1e}"),
    )
}

fn route_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=6u32 {
        let opt = optimal_fidelity(n).expect("valid");
        let j = h(n as i32);
        let povm = PovmSpec::continuous(j, opt.optimal_state.m_a()).expect("valid");
        let q = quadrature_fidelity(
            &opt.optimal_state,
            &povm,
            &sphere_quadrature(default_degree(j)),
        )
        .expect("quadrature");
        worst = worst.max((q.value - opt.fidelity).abs());
    }
    (
        worst < 1e-8,
        format!("max |quadrature - analytic| {worst:.1e} for N = 1..6"),
    )
}

fn monte_carlo() -> Outcome {
    let cases = [
        (2u32, tetrahedron_povm(), (3.0 + 3f64.sqrt()) / 6.0),
        (
            3,
            octahedron_povm(h(1)).expect("valid"),
            (6.0 + 6f64.sqrt()) / 10.0,
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, povm, target) in cases {
        let state = optimal_fidelity(n).expect("valid").optimal_state;
        let start = Instant::now();
        let report = simulate(&state, &povm, 1_000_000, 42).expect("simulation");
        let elapsed = start.elapsed();
        let sigma = (report.mean_fidelity - target).abs() / report.std_error;
        ok &= sigma < 4.0 && elapsed < Duration::from_secs(30);
        parts.push(format!("N={n}: {sigma:.2}σ in {:.2} s", secs(elapsed)));
    }
    (ok, parts.join(", "))
}

fn inequality_sweep() -> Outcome {
    let start = Instant::now();
    let report = check_zero_inequalities(30, 10).expect("sweep");
    let elapsed = start.elapsed();
    let ok = report.passed() && elapsed < Duration::from_secs(60);
    (
        ok,
        format!(
            "{} checks, {} violations, {:.2} s",
            report.checked,
            report.violations.len(),
            secs(elapsed)
        ),
    )
}

fn asymptotics_leading() -> Outcome {
    let xi2 = BESSEL_J0_FIRST_ZERO * BESSEL_J0_FIRST_ZERO;
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, tol) in [(100u32, 0.05), (200, 0.015)] {
        let rel =
            (1.0 - optimal_fidelity(n).expect("valid").fidelity) / (xi2 / f64::from(n * n)) - 1.0;
        ok &= rel.abs() < tol;
        parts.push(format!(
            "N={n}: {:+.2}% (limit {:.1}%)",
            100.0 * rel,
            100.0 * tol
        ));
    }
    (ok, parts.join(", "))
}

fn asymptotics_subleading() -> Outcome {
    let mut ratios = Vec::new();
    for b in [0u32, 1] {
        let errs: Vec<f64> = [25u32, 50, 100, 200]
            .iter()
            .map(|&n| {
                let p = JacobiParams::new(n, 0, b);
                (largest_zero(p).expect("zero").largest_zero - asymptotic_zero(p).expect("a = 0"))
                    .abs()
            })
            .collect();
        ratios.extend(errs.windows(2).map(|w| w[0] / w[1]));
    }
    // O(n⁻⁴) means the error drops by 16 per doubling
    let ok = ratios.iter().all(|r| (14.0..=18.0).contains(r));
    (ok, format!("error ratio per doubling {ratios:.2?}"))
}

fn product_gap() -> Outcome {
    let env = cli(&["decompose", "uudd"]);
    let exact = (15.0 + 5.0 * 2f64.sqrt() + 2.0 * 5f64.sqrt()) / 30.0;
    let err = (num(&env.results["fidelity"]) - exact).abs();
    let gap = num(&env.results["gap"]);
    (
        err < 1e-12 && gap > 0.0,
        format!("F err {err:.1e}, gap to F_4 {gap:.6}"),
    )
}

fn monotonicity() -> Outcome {
    let fs: Vec<f64> = (1..=40)
        .map(|n| optimal_fidelity(n).expect("valid").fidelity)
        .collect();
    let breaks = fs.windows(2).filter(|w| w[0] >= w[1]).count();
    let min_step = fs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    (
        breaks == 0,
        format!("{breaks} violations, smallest step {min_step:.2e}"),
    )
}

fn omega_conditions() -> Outcome {
    use TwoSpinLabel::*;
    let w = omega_summary(&tetrahedron_povm()).expect("omega");
    let ss = (w.get(Singlet, Singlet).re - 1.0).abs();
    let zz = (w.get(Zero, Zero).re - 3.0).abs();
    let zs = (w.get(Zero, Singlet).norm() - 3f64.sqrt()).abs();
    (
        ss.max(zz).max(zs) < 1e-10,
        format!("|ω_ss-1| {ss:.1e}, |ω_00-3| {zz:.1e}, ||ω_0s|-√3| {zs:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("1 table reproduction", table_reproduction),
        ("2 eigenvalue equals Jacobi zero", jacobi_equivalence),
        ("3 parallel-spin oracle", parallel_spins),
        (
            "4 characteristic polynomial proportional to Jacobi",
            char_poly_proportional,
        ),
        ("5 POVM completeness", povm_completeness),
        ("6 quadrature route agreement", route_agreement),
        ("7 Monte Carlo", monte_carlo),
        ("8 zero inequality sweep", inequality_sweep),
        (
            "9a asymptotics, leading order at N = 100, 200",
            asymptotics_leading,
        ),
        (
            "9b asymptotics, subleading zero error O(n^-4)",
            asymptotics_subleading,
        ),
        ("10 product-state gap", product_gap),
        ("11 monotonicity", monotonicity),
        ("12 omega conditions", omega_conditions),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let (ok, detail) =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| (false, "panicked".into()));
        failed += usize::from(!ok);
        println!(
            "[{}] criterion {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of {} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
