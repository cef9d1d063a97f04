//! One test per acceptance criterion. Each prints a single
//! `ACCEPTANCE <k> PASS|FAIL` line before asserting; run with
//! `cargo test -p qseal-validation --test acceptance -- --test-threads 1`
//! to see them in order.

use std::io::Write;
use std::time::{Duration, Instant};

use qseal::attack::{
    ab_coefficients, average_fidelity, build_attack, conditional_fidelity, evaluate,
    mutual_information, nu,
};
use qseal::discrimination::{check_optimality, solve_discrimination, Povm, SolverConfig};
use qseal::qcore::{c, identity, max_abs, CMatrix, HermitianOp};
use qseal::sampling::{random_povm, random_projective_povm, seeded_rng};
use qseal::seal::{canonical_scheme, SealScheme};
use qseal::theory::{
    asymptotic_fidelity, canonical_joint_distribution, h_function, insecurity_point, lemma_f,
    minmax_avg_fidelity, minmax_cond_fidelity_bound,
};
use qseal_cli::commands::counterexample;
use qseal_cli::probe::probe_optimality;
use qseal_cli::sweep::{run_sweep, Metric, SweepSpec};

/// Written straight to the stderr handle so the line shows up even when the
/// harness captures output of passing tests.
fn report(k: u32, title: &str, passed: bool, detail: String) {
    let line = format!(
        "ACCEPTANCE {k} {} {title}: {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(passed, "criterion {k} ({title}) failed: {detail}");
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| {
            if k + 1 == points {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (points - 1) as f64
            }
        })
        .collect()
}

fn second_differences(v: &[f64]) -> f64 {
    v.windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn criterion_1_counterexample_regression() {
    let start = Instant::now();
    let r = counterexample().unwrap();
    let elapsed = start.elapsed();
    let passed = (r.symmetric_cond_fidelity - 0.980_204).abs() <= 1e-4
        && elapsed < Duration::from_secs(1)
        && r.asymmetric_completeness_residual <= 1e-12
        && r.asymmetric_success_residual <= 1e-9;
    report(
        1,
        "counterexample regression",
        passed,
        format!(
            "symmetric F_cond {:.6}; asymmetric completeness {:.1e}, |p - 0.3| {:.1e}; \
             asymmetric F_cond computed {:.6} vs published {:.6} (discrepancy: {}); {:?}",
            r.symmetric_cond_fidelity,
            r.asymmetric_completeness_residual,
            r.asymmetric_success_residual,
            r.asymmetric_cond_fidelity,
            r.published_asymmetric_cond_fidelity,
            r.asymmetric_discrepancy,
            elapsed
        ),
    );
}

#[test]
fn criterion_2_closed_form_oracle_equivalence() {
    let start = Instant::now();
    let (mut avg_err, mut below, mut tight_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut cases = 0;
    for n in 2..=8 {
        let lo = 1.0 / n as f64;
        for pm in [0.3, 0.5, 0.7, 0.9, 1.0].into_iter().filter(|&pm| pm > lo) {
            let s = canonical_scheme(n, pm).unwrap();
            let ps = grid(lo, pm, 25);
            for (k, &p) in ps.iter().enumerate() {
                let ch = build_attack(&Povm::computational_basis(n), nu(p, pm, n).unwrap()).unwrap();
                let f = average_fidelity(&s, &ch).unwrap();
                avg_err = avg_err.max((f - minmax_avg_fidelity(p, pm, n).unwrap()).abs());
                let fc = conditional_fidelity(&s, &ch).unwrap();
                let bound = minmax_cond_fidelity_bound(p, pm, n).unwrap();
                below = below.max(bound - fc);
                if n <= 5 || k == 0 || k + 1 == ps.len() {
                    tight_err = tight_err.max((fc - bound).abs());
                }
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        2,
        "closed form vs simulation",
        avg_err <= 1e-9 && below <= 1e-9 && tight_err <= 1e-9 && elapsed < Duration::from_secs(120),
        format!(
            "{cases} points, max |dF| {avg_err:.1e}, max (bound - F_cond) {below:.1e}, \
             tight-case error {tight_err:.1e}; {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_3_insecurity_at_half_strength() {
    let mut min_avg = (f64::INFINITY, 0, 0.0);
    let mut min_cond = (f64::INFINITY, 0, 0.0);
    let mut min_info = f64::INFINITY;
    let mut failing_n = Vec::new();
    for n in 2..=64usize {
        let lo = 1.0 / n as f64;
        let mut n_fails = false;
        for &pm in grid(lo, 1.0, 101).iter().skip(1) {
            let (p, b) = insecurity_point(pm, n).unwrap();
            if b.minmax_avg_fidelity < min_avg.0 {
                min_avg = (b.minmax_avg_fidelity, n, pm);
            }
            if b.minmax_cond_fidelity_bound < min_cond.0 {
                min_cond = (b.minmax_cond_fidelity_bound, n, pm);
            }
            n_fails |= !b.exceeds_half();
            let joint = canonical_joint_distribution(p, pm, n).unwrap();
            min_info = min_info.min(mutual_information(&joint, &vec![lo; n]).unwrap());
        }
        if n_fails {
            failing_n.push(n);
        }
    }
    // the closed-form joint distribution agrees with direct simulation
    let mut sim_err: f64 = 0.0;
    for n in 2..=6 {
        for &pm in grid(1.0 / n as f64, 1.0, 6).iter().skip(1) {
            let (p, _) = insecurity_point(pm, n).unwrap();
            let s = canonical_scheme(n, pm).unwrap();
            let ch = build_attack(&Povm::computational_basis(n), nu(p, pm, n).unwrap()).unwrap();
            let sim = evaluate(&s, &ch).unwrap().mutual_information_bits;
            let joint = canonical_joint_distribution(p, pm, n).unwrap();
            sim_err = sim_err.max((sim - mutual_information(&joint, &vec![1.0 / n as f64; n]).unwrap()).abs());
        }
    }
    let passed = failing_n.is_empty() && min_info > 0.0 && sim_err <= 1e-9;
    report(
        3,
        "insecurity at nu = 1/2",
        passed,
        format!(
            "min F {:.6} (N={}, p_max={:.4}); min F_cond bound {:.6} (N={}, p_max={:.4}); \
             N with a bound <= 1/2: {:?}; min information {:.3e} bits; closed-form vs simulated information {:.1e}",
            min_avg.0, min_avg.1, min_avg.2, min_cond.0, min_cond.1, min_cond.2, failing_n, min_info, sim_err
        ),
    );
}

#[test]
fn criterion_4_lemma_property_suite() {
    let xs = grid(0.0, 1.0, 1001);
    let mut min_f = f64::INFINITY;
    for n in 2..=64 {
        for k in 1..=50 {
            let nu_ = k as f64 / 50.0;
            for &x in &xs {
                min_f = min_f.min(lemma_f(x, nu_, n).unwrap());
            }
        }
    }
    let mut rng = seeded_rng(0xacce);
    let mut min_eig = f64::INFINITY;
    let mut proj_gap: f64 = 0.0;
    for trial in 0..1000 {
        let n = 2 + trial % 5;
        let dim = 1 + trial % 6;
        let nu_ = (trial as f64 + 0.5) / 1000.0;
        let (a, b) = ab_coefficients(nu_, n).unwrap();
        let chord = |pi: &HermitianOp| identity(dim) * c(a) + pi.matrix() * c(b);
        let povm = random_povm(&mut rng, n, dim, 1 + trial % dim);
        let ch = build_attack(&povm, nu_).unwrap();
        for (m, pi) in ch.outcome_kraus().iter().zip(povm.elements()) {
            let gap: CMatrix = &m[0] - chord(pi);
            min_eig = min_eig.min(HermitianOp::new(gap).unwrap().min_eigenvalue());
        }
        let proj = random_projective_povm(&mut rng, n, dim);
        let ch = build_attack(&proj, nu_).unwrap();
        for (m, pi) in ch.outcome_kraus().iter().zip(proj.elements()) {
            proj_gap = proj_gap.max(max_abs(&(&m[0] - chord(pi))));
        }
    }
    report(
        4,
        "lemma property suite",
        min_f >= -1e-12 && min_eig >= -1e-10 && proj_gap <= 1e-10,
        format!("min f {min_f:.1e}; min eig over 1000 POVMs {min_eig:.1e}; projector equality gap {proj_gap:.1e}"),
    );
}

#[test]
fn criterion_5_discrimination_correctness() {
    let cfg = SolverConfig::default();
    let h = 0.5f64.sqrt();
    let two = SealScheme::from_public_states(
        vec![0.5, 0.5],
        vec![vec![c(1.0), c(0.0)], vec![c(h), c(h)]],
    )
    .unwrap();
    // trace-norm oracle: eigenvalues of ½(|0><0| - |+><+|) are ±√2/4
    let rho0 = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let rho1 = CMatrix::from_element(2, 2, c(0.5));
    let diff = (rho0 - rho1) * c(0.5);
    let oracle = 0.5 * (1.0 + diff.singular_values().iter().sum::<f64>());
    let sol = solve_discrimination(&two, &cfg).unwrap();
    let helstrom_ok = (sol.p_max - oracle).abs() <= 1e-6 && (sol.p_max - 0.853_553).abs() <= 1e-6;
    let mut all_checked = check_optimality(&two, &sol.povm, 1e-6).unwrap().passed;

    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 2..=8 {
        let lo = 1.0 / n as f64;
        for pm in [0.3, 0.5, 0.7, 0.9, 1.0].into_iter().filter(|&pm| pm > lo) {
            let s = canonical_scheme(n, pm).unwrap();
            let sol = solve_discrimination(&s, &cfg).unwrap();
            worst = worst.max((sol.p_max - pm).abs());
            all_checked &= check_optimality(&s, &sol.povm, 1e-6).unwrap().passed;
            count += 1;
        }
    }
    report(
        5,
        "discrimination correctness",
        helstrom_ok && worst <= 1e-8 && all_checked,
        format!(
            "Helstrom {:.9} (oracle {oracle:.9}); {count} canonical schemes, max |p_max error| {worst:.1e}; \
             all optimality checks passed: {all_checked}",
            sol.p_max
        ),
    );
}

#[test]
fn criterion_6_randomized_optimality_probe() {
    let start = Instant::now();
    let r = probe_optimality(4, 0.8, 10_000, 20, 0xacc6).unwrap();
    let elapsed = start.elapsed();
    let occupied = r.bins.iter().filter(|b| b.samples > 0).count();
    report(
        6,
        "randomized optimality probe",
        r.samples >= 10_000 && r.max_excess <= 1e-6 && elapsed < Duration::from_secs(300),
        format!(
            "{} channels over {occupied}/{} occupied bins, max F - bound {:.2e}; {elapsed:?}",
            r.samples,
            r.bins.len(),
            r.max_excess
        ),
    );
}

#[test]
fn criterion_7_concavity_and_asymptotics() {
    let mut worst = f64::NEG_INFINITY;
    for n in 2..=32 {
        let lo = 1.0 / n as f64;
        for pm in [0.3, 0.5, 0.7, 0.9, 1.0].into_iter().filter(|&pm| pm > lo) {
            let v: Vec<f64> = grid(lo, pm, 400)
                .into_iter()
                .map(|p| minmax_avg_fidelity(p, pm, n).unwrap())
                .collect();
            worst = worst.max(second_differences(&v));
        }
    }
    let gap = (minmax_avg_fidelity(0.7, 0.9, 10_000).unwrap() - asymptotic_fidelity(0.7, 0.9).unwrap()).abs();
    let h = |n: usize| {
        let v: Vec<f64> = grid(1.0 / n as f64, 0.9, 200)
            .into_iter()
            .map(|x| h_function(x, 0.9, n).unwrap())
            .collect();
        second_differences(&v)
    };
    let h_concave = (2..=5).map(h).fold(f64::NEG_INFINITY, f64::max);
    let h8 = h(8);
    report(
        7,
        "concavity and asymptotics",
        worst <= 1e-9 && gap < 1e-3 && h_concave <= 1e-9 && h8 > 0.0,
        format!(
            "max second difference of F {worst:.1e}; |F(N=1e4) - limit| = {gap:.6e} (needs < 1e-3); \
             h max second difference N<=5 {h_concave:.1e}, N=8 witness {h8:.1e}"
        ),
    );
}

#[test]
fn criterion_8_figure_data() {
    let sets: [(usize, &[f64]); 2] = [(2, &[0.6, 0.9, 1.0]), (4, &[0.3, 0.5, 0.7, 0.9, 1.0])];
    let mut endpoint_err: f64 = 0.0;
    let mut step_up = f64::NEG_INFINITY;
    let mut rows_seen = 0;
    for (n, pms) in sets {
        let spec = SweepSpec::new(n, pms.to_vec(), 100, vec![Metric::AvgFidelity, Metric::CondFidelityBound]).unwrap();
        let rows = run_sweep(&spec).unwrap();
        rows_seen += rows.len();
        for &pm in pms {
            let full_avg = pm * pm + (1.0 - pm).powi(2) / (n as f64 - 1.0);
            for (metric, at_p_max) in [(Metric::AvgFidelity, full_avg), (Metric::CondFidelityBound, pm)] {
                let curve: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.p_max == pm && r.metric == metric)
                    .map(|r| r.value)
                    .collect();
                step_up = step_up.max(curve.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
                endpoint_err = endpoint_err
                    .max((curve[0] - 1.0).abs())
                    .max((curve[curve.len() - 1] - at_p_max).abs());
            }
        }
    }
    report(
        8,
        "figure data",
        endpoint_err <= 1e-9 && step_up <= 1e-9,
        format!("{rows_seen} rows, endpoint error {endpoint_err:.1e}, largest step up {step_up:.1e}"),
    );
}
