//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use drharmonic::checks::{
    besov_check, converse_hypotheses, default_t_grid, dyadic_shell_equiv, holder_integrability,
    lipcor_two_sided, power_profile, recipe_profile, BesovTruncations, HolderParams,
};
use drharmonic::jacobi::{
    density_large_ratio, density_small_ratio, eigen_residual, phi_bounds_audit, AuditMode,
    JacobiFunction,
};
use drharmonic::moduli::{standard_modulus, Modulus, ModulusKind, ModulusTail};
use drharmonic::radial::{calibrate_plancherel, calibration_lambda_grid, parseval_defect, HELD_OUT_PROFILES};
use drharmonic::{derive_params, Result, Verdict};

const SPACES: [(u32, u32); 2] = [(2, 1), (4, 3)];

struct Outcome {
    pass: bool,
    detail: String,
    /// Full-precision record of every computed quantity, for the rerun comparison.
    digest: String,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn eigen_residuals() -> Result<Outcome> {
    let mut digest = String::new();
    let (mut worst, mut literal_best) = (0.0f64, f64::INFINITY);
    for (m, k) in SPACES {
        let p = derive_params(m, k)?;
        let literal = JacobiFunction::new(0.5 * (m + k + 1) as f64, 0.5 * (k as f64 - 1.0))?;
        let mut literal_worst = 0.0f64;
        for lam in [0.5, 1.0, 2.0] {
            let tol = 1e-4 * (1.0 + lam * lam);
            for t in linspace(0.2, 3.0, 15) {
                let r = eigen_residual(m, k, &p.jacobi(), lam, t)? / tol;
                let rl = eigen_residual(m, k, &literal, lam, t)? / tol;
                worst = worst.max(r);
                literal_worst = literal_worst.max(rl);
                let _ = writeln!(digest, "{m} {k} {lam} {t:.17e} {r:.17e} {rl:.17e}");
            }
        }
        literal_best = literal_best.min(literal_worst);
    }
    Ok(Outcome {
        pass: worst <= 1.0 && literal_best >= 1e3,
        detail: format!(
            "worst residual/tolerance {worst:.2e}; literal candidate fails by {literal_best:.2e}x"
        ),
        digest,
    })
}

fn parseval() -> Result<Outcome> {
    let mut digest = String::new();
    let mut worst = 0.0f64;
    let grid = calibration_lambda_grid()?;
    for (m, k) in SPACES {
        let p = derive_params(m, k)?;
        let cal = calibrate_plancherel(&p)?;
        let _ = writeln!(digest, "{m} {k} constant {:.17e}", cal.constant);
        for prof in HELD_OUT_PROFILES.iter() {
            let e = parseval_defect(&p, &prof.radial(&p)?, &grid)?;
            worst = worst.max(e);
            let _ = writeln!(digest, "{m} {k} {} {e:.17e}", prof.name);
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-3,
        detail: format!("worst held-out relative error {worst:.2e}"),
        digest,
    })
}

fn lemma_bounds() -> Result<Outcome> {
    let mut digest = String::new();
    let grid = linspace(0.1, 10.0, 100);
    let mut pass = true;
    let mut detail = String::new();
    for (m, k) in SPACES {
        let p = derive_params(m, k)?;
        let r = phi_bounds_audit(&p, &grid, &grid, AuditMode::LemmaBounds)?;
        let c = r.summary["lower_bound_constant"];
        pass &= r.verdict == Verdict::Pass && c > 0.01;
        let _ = write!(detail, "({m},{k}) {} lower-bound constant {c:.4}; ", r.verdict.as_str());
        digest.push_str(&r.to_csv());
    }
    Ok(Outcome { pass, detail, digest })
}

fn density_asymptotics() -> Result<Outcome> {
    let mut digest = String::new();
    let mut worst = 0.0f64;
    for (m, k) in SPACES {
        let p = derive_params(m, k)?;
        let small = density_small_ratio(&p, 1e-2)? / density_small_ratio(&p, 1e-3)? - 1.0;
        let large = density_large_ratio(&p, 1e3)? / density_large_ratio(&p, 1e4)? - 1.0;
        worst = worst.max(small.abs()).max(large.abs());
        let _ = writeln!(digest, "{m} {k} {small:.17e} {large:.17e}");
    }
    Ok(Outcome {
        pass: worst <= 0.05,
        detail: format!("worst relative drift {worst:.2e}"),
        digest,
    })
}

fn lipcor() -> Result<Outcome> {
    let p = derive_params(2, 1)?;
    let tg = default_t_grid();
    let plain = lipcor_two_sided(&p, 0.5, 0.0, &tg)?;
    let logged = lipcor_two_sided(&p, 0.5, 1.0, &tg)?;
    let (s0, s1) = (plain.summary["lip_spread"], logged.summary["lip_spread"]);
    let closed = plain.summary["tail_closed_form_error"];
    let positive = |r: &drharmonic::CheckReport| {
        r.ratio_inf > 0.0 && r.ratio_sup.is_finite() && r.verdict == Verdict::Pass
    };
    Ok(Outcome {
        pass: positive(&plain) && positive(&logged) && s0 <= 10.0 && s1 <= 20.0 && closed <= 1e-6,
        detail: format!(
            "spread {s0:.3} (gamma 0), {s1:.3} (gamma 1); tail closed-form error {closed:.1e}"
        ),
        digest: plain.to_csv() + &logged.to_csv(),
    })
}

fn dyadic_shells() -> Result<Outcome> {
    let p = derive_params(2, 1)?;
    let tg = default_t_grid();
    let cases = [
        (
            standard_modulus(ModulusKind::Power, 0.5, 0.0, 1.0, 0.5)?,
            power_profile(&p, 0.5, 1.0)?,
        ),
        (
            standard_modulus(ModulusKind::PowerLog, 0.5, 1.0, 1.0, 0.5)?,
            recipe_profile(&p, 0.5, 1.0)?,
        ),
    ];
    let mut pass = true;
    let mut detail = String::new();
    let mut digest = String::new();
    for (w, f) in &cases {
        let r = dyadic_shell_equiv(&p, f, w, &tg)?;
        let (e, b) = (r.summary["empirical_constant"], r.summary["proof_constant"]);
        pass &= r.verdict == Verdict::Pass && r.hypothesis("shell_le_tail").unwrap().pass && e <= b;
        let _ = write!(detail, "{}: empirical {e:.4} <= proof {b:.4}; ", w.label());
        digest.push_str(&r.to_csv());
    }
    Ok(Outcome { pass, detail, digest })
}

fn converse_engine() -> Result<Outcome> {
    let p = derive_params(2, 1)?;
    let root = standard_modulus(ModulusKind::Power, 0.5, 0.0, 1.0, 0.5)?;
    let r = converse_hypotheses(&p, &root)?;
    let z0 = r.hypothesis("zygmund_z0").unwrap().constant;
    let zk = r.hypothesis("zygmund_zk").unwrap().constant;
    let square = Modulus::new(
        2.0,
        0.5,
        std::sync::Arc::new(|t: f64| t * t),
        ModulusTail::ConstantExtension,
        "t^2",
    )?;
    let rs = converse_hypotheses(&p, &square)?;
    let z2_fails = !rs.hypothesis("zygmund_zk").unwrap().pass;
    Ok(Outcome {
        pass: r.verdict == Verdict::Pass
            && (z0 - 2.0).abs() < 1e-6
            && (zk - 2.0).abs() < 1e-6
            && z2_fails,
        detail: format!("t^1/2: Z0 {z0:.9}, Z1 {zk:.9}; t^2 fails Z2: {z2_fails}"),
        digest: format!("{z0:.17e} {zk:.17e} {z2_fails}\n"),
    })
}

fn holder() -> Result<Outcome> {
    let p = derive_params(2, 1)?;
    let hp = HolderParams::new(0.5, 2.0, 2.0, 1.8)?;
    let f = power_profile(&p, 0.5, 1.0)?;
    let r = holder_integrability(&p, &f, &hp, &[1.4, 1.8, 2.0])?;
    let growth = r.hypothesis("extremal_grows[beta=1.4]").unwrap().constant;
    let mut digest = r.to_csv();
    for h in &r.hypotheses {
        let _ = writeln!(digest, "{} {} {:.17e}", h.name, h.pass, h.constant);
    }
    Ok(Outcome {
        pass: r.verdict == Verdict::Pass && (hp.threshold(p.d()) - 1.6).abs() < 1e-12,
        detail: format!(
            "threshold {:.3}; beta 1.8, 2.0 stable; beta 1.4 growth exponent {growth:.3}; phi majorant holds",
            hp.threshold(p.d())
        ),
        digest,
    })
}

fn besov() -> Result<Outcome> {
    let p = derive_params(2, 1)?;
    let f = recipe_profile(&p, 0.5, -1.0)?;
    let r = besov_check(&p, &f, 0.5, BesovTruncations::default())?;
    let fub = r.hypothesis("fubini_identity").unwrap().constant;
    Ok(Outcome {
        pass: r.verdict == Verdict::Pass,
        detail: format!(
            "LHS -> {:.6e}, RHS -> {:.6e}, Fubini error {fub:.1e}",
            r.summary["lhs_limit"], r.summary["rhs_limit"]
        ),
        digest: r.to_csv(),
    })
}

type Criterion = (u32, &'static str, fn() -> Result<Outcome>, Option<Duration>);

const CRITERIA: [Criterion; 9] = [
    (1, "eigenfunction residual", eigen_residuals, Some(Duration::from_secs(10))),
    (2, "Parseval closure", parseval, Some(Duration::from_secs(30))),
    (3, "spherical function bounds", lemma_bounds, None),
    (4, "density asymptotics", density_asymptotics, None),
    (5, "two-sided power-log equivalence", lipcor, Some(Duration::from_secs(120))),
    (6, "dyadic shells", dyadic_shells, None),
    (7, "converse hypotheses", converse_engine, None),
    (8, "Hölder integrability", holder, None),
    (9, "Besov equivalence", besov, None),
];

fn run_all(report: bool) -> (bool, String) {
    let mut all = true;
    let mut digest = String::new();
    for (n, name, f, limit) in CRITERIA {
        let start = Instant::now();
        let out = f();
        let dt = start.elapsed();
        let (pass, detail) = match &out {
            Ok(o) => {
                let in_time = limit.map_or(true, |l| dt < l);
                let timing = limit.map_or(String::new(), |l| {
                    format!(" [{:.1}s, limit {}s]", dt.as_secs_f64(), l.as_secs())
                });
                (o.pass && in_time, format!("{}{timing}", o.detail))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if let Ok(o) = out {
            digest.push_str(&o.digest);
        }
        all &= pass;
        if report {
            println!(
                "criterion {n:>2} {}: {name}: {detail}",
                if pass { "PASS" } else { "FAIL" }
            );
        }
    }
    (all, digest)
}

fn main() {
    let start = Instant::now();
    let (first_ok, first) = run_all(true);
    let first_time = start.elapsed();
    let (_, second) = run_all(false);
    let identical = first == second;
    let total = start.elapsed();
    let ok10 = identical && total < Duration::from_secs(300);
    println!(
        "criterion 10 {}: determinism and runtime: reruns byte-identical: {identical}; first pass {:.1}s, both passes {:.1}s (limit 300s)",
        if ok10 { "PASS" } else { "FAIL" },
        first_time.as_secs_f64(),
        total.as_secs_f64()
    );
    let ok = first_ok && ok10;
    println!("acceptance: {}", if ok { "all criteria pass" } else { "FAILURES" });
    if !ok {
        std::process::exit(1);
    }
}
