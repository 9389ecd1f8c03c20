//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::process::ExitCode;

use prandtl::lagrange::rho_exponents;
use prandtl::oracle::{moment, verify_spectral_identity};
use prandtl::presets::{example_4_1, example_4_1_linear, example_4_2, example_4_3, preset};
use prandtl::{
    build_ortho_system, cond_inf, convergence_study, error_metrics, evaluate_zeta, gauss_jacobi, modified_moments,
    solve, wing_preset, ConvergenceReport, JacobiExponents, Matrix, ProblemSpec, PsiBasis, Reference, ReferencePolicy,
    WeakKernel, WingShape,
};

const ORDERS: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];

// Published cond_inf and Err for the log-kernel example.
const LOG_COND: [f64; 7] = [4.9982, 9.0130, 16.870, 32.465, 63.581, 125.76, 250.11];
const LOG_ERR: [f64; 7] = [
    1.5099e-3, 7.0718e-5, 1.6872e-6, 4.5720e-8, 8.8290e-10, 2.5805e-11, 6.4149e-13,
];
// Published errors for the rectangular wing, b = 10, beta = 1, eps = 0.1.
const RECT_ERR: [f64; 6] = [1.0186e-3, 4.5344e-5, 1.6127e-6, 5.7771e-8, 2.1943e-9, 8.7550e-11];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within_factor(ours: f64, theirs: f64, factor: f64) -> bool {
    ours <= theirs * factor && ours >= theirs / factor
}

fn study(spec: &ProblemSpec, m_list: &[usize], policy: ReferencePolicy) -> ConvergenceReport {
    convergence_study(spec, m_list, &policy).expect("convergence study")
}

fn example_4_1_table() -> Outcome {
    let r = study(&example_4_1(), &ORDERS, ReferencePolicy::Exact);
    let mut bad = Vec::new();
    for (i, row) in r.rows.iter().enumerate() {
        if !within_factor(row.err, LOG_ERR[i], 3.0) {
            bad.push(format!("err m={} {:.4e} vs {:.4e}", row.m, row.err, LOG_ERR[i]));
        }
        if !within_factor(row.cond, LOG_COND[i], 2.0) {
            bad.push(format!("cond m={} {:.4e} vs {:.4e}", row.m, row.cond, LOG_COND[i]));
        }
    }
    for w in r.rows.windows(2) {
        if w[1].err >= w[0].err {
            bad.push(format!("err not decreasing at m={}", w[1].m));
        }
        let ratio = w[1].cond / w[0].cond;
        if !(1.5..=2.5).contains(&ratio) {
            bad.push(format!("cond ratio {ratio:.3} at m={}", w[1].m));
        }
    }
    let last = r.rows.last().unwrap();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("err_512={:.4e} cond_512={:.4e}", last.err, last.cond)
        } else {
            bad.join("; ")
        },
    )
}

fn example_4_1_linear_case() -> Outcome {
    let spec = example_4_1_linear();
    let s = solve(&spec, 2).unwrap();
    let err = error_metrics(&s, Reference::Exact(spec.exact.as_ref().unwrap())).unwrap();
    outcome(err <= 1e-13, format!("err_2={err:.3e} (<= 1e-13)"))
}

fn example_4_2_table() -> Outcome {
    let r = study(&example_4_2(), &ORDERS, ReferencePolicy::SelfRef(1024));
    let mean = r.mean_eoc().unwrap();
    let nu = r.row(512).and_then(|row| row.nu).unwrap();
    let eoc_ok = (mean - 1.13).abs() <= 0.4;
    let nu_ok = (nu - 1.0).abs() <= 0.05;
    outcome(
        eoc_ok && nu_ok,
        format!(
            "mean EOC={mean:.4} (1.13 +/- 0.4: {}), nu(512)={nu:.5} (1.0 +/- 0.05: {})",
            ok(eoc_ok),
            ok(nu_ok)
        ),
    )
}

fn example_4_3_table() -> Outcome {
    let r = study(&example_4_3(), &ORDERS, ReferencePolicy::SelfRef(1024));
    let mean = r.mean_eoc().unwrap();
    let err = r.row(512).unwrap().err;
    let nu = r.mean_nu(64).unwrap();
    let eoc_ok = (mean - 3.93).abs() <= 0.5;
    let err_ok = err <= 1e-10;
    let nu_ok = (0.85..=1.05).contains(&nu);
    outcome(
        eoc_ok && err_ok && nu_ok,
        format!(
            "mean EOC={mean:.4} (3.93 +/- 0.5: {}), err_512={err:.4e} (<= 1e-10: {}), mean nu(m>=64)={nu:.4} ([0.85, 1.05]: {})",
            ok(eoc_ok),
            ok(err_ok),
            ok(nu_ok)
        ),
    )
}

fn elliptic_wing() -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [0.1, 0.0872] {
        let spec = wing_preset(WingShape::Elliptic, 10.0, 1.0, eps).unwrap();
        let s = solve(&spec, 2).unwrap();
        worst = worst.max(error_metrics(&s, Reference::Exact(spec.exact.as_ref().unwrap())).unwrap());
    }
    outcome(
        worst <= 1e-13,
        format!("max err_2 over eps in {{0.1, 0.0872}}={worst:.3e} (<= 1e-13)"),
    )
}

fn rectangular_wing() -> Outcome {
    let p = preset("wing-rect").unwrap();
    let r = study(&p.spec, &ORDERS[..6], ReferencePolicy::SelfRef(1024));
    let cells: Vec<String> = r
        .rows
        .iter()
        .zip(RECT_ERR)
        .map(|(row, published)| format!("m={} {:.3e}/{:.3e}", row.m, row.err, published))
        .collect();
    let pass = r
        .rows
        .iter()
        .zip(RECT_ERR)
        .all(|(row, published)| within_factor(row.err, published, 3.0));
    outcome(pass, format!("ours/published: {}", cells.join(", ")))
}

/// `∫ x^d (1-x)^a (1+x)^b dx` for `d = 0..=n`, by the integration-by-parts
/// recurrence `(a+b+2+d) M_{d+1} = d M_{d-1} + (b-a) M_d`.
fn monomial_moments(a: f64, b: f64, n: usize) -> Vec<f64> {
    let m0 = ((a + b + 1.0) * std::f64::consts::LN_2 + libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0)
        - libm::lgamma(a + b + 2.0))
    .exp();
    let mut m = vec![m0, (b - a) * m0 / (a + b + 2.0)];
    for d in 1..n {
        let df = d as f64;
        m.push((df * m[d - 1] + (b - a) * m[d]) / (a + b + 2.0 + df));
    }
    m.truncate(n + 1);
    m
}

fn property_suite() -> Outcome {
    let mut bad = Vec::new();

    let mut gauss_worst: f64 = 0.0;
    for &(a, b) in &[(0.25f64, 0.75f64), (0.5, 0.5), (-0.5, 0.25), (0.75, -0.3), (0.0, 0.0)] {
        let exact = monomial_moments(a, b, 128);
        for m in [1usize, 2, 5, 8, 16, 33, 64] {
            let rule = gauss_jacobi(a, b, m).unwrap();
            for d in 0..2 * m {
                let q = rule.integrate(|x: f64| x.powi(d as i32));
                // odd moments may vanish; M_{d+1} <= ∫|x|^d v bounds the scale from below
                let scale = if d % 2 == 0 { exact[d] } else { exact[d + 1] };
                gauss_worst = gauss_worst.max((q - exact[d]).abs() / scale);
            }
        }
    }
    if gauss_worst > 1e-12 {
        bad.push(format!("gauss exactness {gauss_worst:.2e}"));
    }

    let mut card_worst: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.75] {
        let u = JacobiExponents::new(0.1f64, 0.05).unwrap();
        for basis in [
            PsiBasis::w_basis(alpha, u, 16).unwrap(),
            PsiBasis::rho_basis(alpha, u, 16).unwrap(),
        ] {
            for i in 0..16 {
                for (k, &x) in basis.nodes().iter().enumerate() {
                    let scaled = basis.psi_eval(i, x).unwrap() * basis.divisors()[i];
                    let want = if i == k { 1.0 } else { 0.0 };
                    card_worst = card_worst.max((scaled - want).abs());
                    // off-node evaluation via the orthogonal expansion, nudged one ulp
                    let nudged = f64::from_bits(x.to_bits() + 1);
                    let scaled = basis.psi_eval(i, nudged).unwrap() * basis.divisors()[i];
                    card_worst = card_worst.max((scaled - want).abs());
                }
            }
        }
    }
    if card_worst > 1e-11 {
        bad.push(format!("psi cardinality {card_worst:.2e}"));
    }

    let mut spectral_worst: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.75] {
        for n in 0..=10 {
            spectral_worst = spectral_worst.max(verify_spectral_identity(n, alpha, 1e-5).unwrap());
        }
    }
    if spectral_worst > 1e-6 {
        bad.push(format!("spectral identity {spectral_worst:.2e}"));
    }

    let mut moment_worst: f64 = 0.0;
    let kernels = [
        WeakKernel::AbsPow(-1.0 / 3.0),
        WeakKernel::AbsPowSgn(-0.5),
        WeakKernel::Log,
        WeakKernel::AbsPowLog(-0.25),
    ];
    for alpha in [0.25, 0.5] {
        let sys = build_ortho_system(rho_exponents(alpha).unwrap(), 12).unwrap();
        let ys = [-0.93, -0.4, 0.0, 0.3, 0.71, 0.995];
        for h in &kernels {
            let table = modified_moments(&sys, h, &ys, 10).unwrap();
            for (i, &y) in ys.iter().enumerate() {
                for j in 0..10 {
                    let reference = moment(&sys, h, y, j, 1e-12).unwrap();
                    moment_worst = moment_worst.max((table.get(i, j) - reference).abs());
                }
            }
        }
    }
    if moment_worst > 1e-8 {
        bad.push(format!("moments {moment_worst:.2e}"));
    }

    let mut cond_bad = 0;
    for seed in 0..20u64 {
        let a = Matrix::from_fn(6, 6, |i, j| {
            let v = ((seed * 37 + i as u64 * 11 + j as u64 * 5) % 17) as f64 - 8.0;
            if i == j {
                v + 20.0
            } else {
                v
            }
        });
        let c = cond_inf(&a).unwrap();
        let c_scaled = cond_inf(&a.scale(-3.5)).unwrap();
        if c < 1.0 || ((c - c_scaled) / c).abs() > 1e-12 {
            cond_bad += 1;
        }
    }
    if (cond_inf(&Matrix::identity(5)).unwrap() - 1.0).abs() > 1e-15 {
        cond_bad += 1;
    }
    if cond_bad > 0 {
        bad.push(format!("cond axioms failed {cond_bad} times"));
    }

    let detail = format!(
        "gauss {gauss_worst:.1e}, cardinality {card_worst:.1e}, spectral {spectral_worst:.1e}, moments {moment_worst:.1e}"
    );
    outcome(bad.is_empty(), if bad.is_empty() { detail } else { bad.join("; ") })
}

fn zero_boundary() -> Outcome {
    let mut specs: Vec<ProblemSpec> = ["4.1", "4.1-linear", "4.2", "4.3", "wing-elliptic", "wing-rect"]
        .iter()
        .map(|name| preset(name).unwrap().spec)
        .collect();
    specs.push(wing_preset(WingShape::Elliptic, 10.0, 1.0, 0.0872).unwrap());
    let mut solves = 0;
    let mut bad = Vec::new();
    for spec in &specs {
        for m in [2usize, 3, 8, 33, 128] {
            let s = solve(spec, m).unwrap();
            solves += 1;
            for end in [-1.0, 1.0] {
                let z = evaluate_zeta(&s, end).unwrap();
                let z2 = s.zeta(end).unwrap();
                if z != 0.0 || z2 != 0.0 {
                    bad.push(format!("{} m={m} zeta({end})={z:e}", spec.label));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{solves} solves")
        } else {
            bad.join("; ")
        },
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "miss"
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("example 4.1 table", example_4_1_table),
        ("example 4.1 linear variant", example_4_1_linear_case),
        ("example 4.2 EOC and nu", example_4_2_table),
        ("example 4.3 EOC, err and nu", example_4_3_table),
        ("elliptic wing", elliptic_wing),
        ("rectangular wing", rectangular_wing),
        ("property suite", property_suite),
        ("zero boundary", zero_boundary),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
