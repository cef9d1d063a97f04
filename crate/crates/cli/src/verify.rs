//! Named invariant checks with switchable tolerance profiles.

use clap::ValueEnum;
use serde::Serialize;

use qseal::attack::{
    ab_coefficients, average_fidelity, build_attack, channel_success_probability,
    conditional_fidelity, evaluate, he_mixed_attack, mutual_information, nu,
};
use qseal::discrimination::{solve_discrimination, Povm, SolverConfig};
use qseal::qcore::{c, identity, max_abs, HermitianOp, Ket};
use qseal::sampling::{random_channel, random_ket, random_povm, random_projective_povm, seeded_rng};
use qseal::seal::{canonical_scheme, load_scheme, save_scheme, SealScheme};
use qseal::theory::{
    asymptotic_fidelity, canonical_joint_distribution, h_function, insecurity_point, lemma_f, minmax_avg_fidelity,
    minmax_cond_fidelity_bound, mixed_attack_closed_form,
};

use crate::commands::counterexample;
use crate::probe::probe_optimality;
use crate::sweep::{run_sweep, Metric, SweepSpec};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TolProfile {
    Default,
    /// Every tolerance set to zero; round-off alone makes equality checks
    /// fail.
    Zero,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerance {
    /// Closed form against simulation, and exact identities.
    pub equality: f64,
    /// Slack on operator inequalities.
    pub psd: f64,
    /// Slack on scalar inequalities such as `f >= 0`.
    pub scalar: f64,
    /// Randomized probes and solver optimality.
    pub probe: f64,
    /// Regression against published six-digit values.
    pub regression: f64,
}

impl TolProfile {
    pub fn tolerance(self) -> Tolerance {
        match self {
            TolProfile::Default => Tolerance {
                equality: 1e-9,
                psd: 1e-10,
                scalar: 1e-12,
                probe: 1e-6,
                regression: 1e-4,
            },
            TolProfile::Zero => Tolerance {
                equality: 0.0,
                psd: 0.0,
                scalar: 0.0,
                probe: 0.0,
                regression: 0.0,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub notes: Vec<String>,
}

pub struct Check {
    pub name: &'static str,
    pub description: &'static str,
    run: fn(&Tolerance) -> CliResult<Outcome>,
}

struct Outcome {
    passed: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn worst(passed: bool, detail: String) -> Self {
        Outcome { passed, detail, notes: Vec::new() }
    }

    fn note(mut self, s: String) -> Self {
        self.notes.push(s);
        self
    }
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { name: "lemma1", description: "scalar and operator forms of the square-root chord inequality", run: lemma1 },
        Check { name: "interpolation", description: "attack success probability equals the requested p", run: interpolation },
        Check { name: "theorem1", description: "closed-form fidelities against simulation on canonical schemes", run: theorem1 },
        Check { name: "concavity", description: "concavity of the average-fidelity curve and of h", run: concavity },
        Check { name: "insecurity", description: "average fidelity above one half at nu = 1/2", run: insecurity },
        Check { name: "asymptotics", description: "convergence of the average fidelity as N grows", run: asymptotics },
        Check { name: "discrimination", description: "solver against Helstrom and canonical p_max", run: discrimination },
        Check { name: "optimality_probe", description: "random channels never beat the closed-form average fidelity", run: optimality },
        Check { name: "counterexample", description: "symmetric and asymmetric conditional-fidelity channels", run: counterexample_check },
        Check { name: "mixed_attack", description: "half-measure half-guess attack closed forms", run: mixed_attack },
        Check { name: "metric_ranges", description: "fidelities in [0, 1] and information below H(eta)", run: metric_ranges },
        Check { name: "figure_endpoints", description: "sweep curves decrease in p with the expected endpoints", run: figure_endpoints },
        Check { name: "scheme_document", description: "scheme documents round-trip", run: scheme_document },
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub profile: TolProfile,
    pub tolerance: Tolerance,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl VerifySummary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{} {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
            for n in &c.notes {
                s.push_str(&format!("     note: {n}\n"));
            }
        }
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        if failed.is_empty() {
            s.push_str(&format!("{} checks passed\n", self.checks.len()));
        } else {
            s.push_str(&format!("{} of {} checks failed: {}\n", failed.len(), self.checks.len(), failed.join(", ")));
        }
        s
    }
}

pub fn run_verify(profile: TolProfile, only: &[String]) -> CliResult<VerifySummary> {
    let all = checks();
    if let Some(bad) = only.iter().find(|o| !all.iter().any(|c| c.name == o.as_str())) {
        let names: Vec<&str> = all.iter().map(|c| c.name).collect();
        return Err(CliError::Usage(format!(
            "unknown check '{bad}'; available: {}",
            names.join(", ")
        )));
    }
    let tol = profile.tolerance();
    let outcomes = all
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| o == c.name))
        .map(|c| {
            let o = (c.run)(&tol).unwrap_or_else(|e| Outcome::worst(false, format!("error: {e}")));
            CheckOutcome { name: c.name, passed: o.passed, detail: o.detail, notes: o.notes }
        })
        .collect::<Vec<_>>();
    Ok(VerifySummary {
        profile,
        tolerance: tol,
        passed: outcomes.iter().all(|o| o.passed),
        checks: outcomes,
    })
}

fn grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |k| {
        if k + 1 == points {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (points - 1) as f64
        }
    })
}

const P_MAX_SET: [f64; 5] = [0.3, 0.5, 0.7, 0.9, 1.0];

fn canonical_points(max_n: usize, p_points: usize) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let lo = 1.0 / n as f64;
        for &pm in P_MAX_SET.iter().filter(|&&pm| pm > lo) {
            out.extend(grid(lo, pm, p_points).map(|p| (n, pm, p)));
        }
    }
    out
}

fn lemma1(tol: &Tolerance) -> CliResult<Outcome> {
    let mut worst_f = f64::INFINITY;
    for n in 2..=64 {
        for k in 1..=20 {
            let nu_ = k as f64 / 20.0;
            for x in grid(0.0, 1.0, 1000) {
                worst_f = worst_f.min(lemma_f(x, nu_, n)?);
            }
        }
    }
    let mut rng = seeded_rng(0x1e44a);
    let mut worst_op = f64::INFINITY;
    let mut worst_eq: f64 = 0.0;
    for trial in 0..200 {
        let n = 2 + trial % 4;
        let dim = 1 + trial % 5;
        let nu_ = (trial as f64 + 0.5) / 200.0;
        let (a, b) = ab_coefficients(nu_, n)?;
        let povm = random_povm(&mut rng, n, dim, 1 + trial % 3);
        let proj = random_projective_povm(&mut rng, n, dim);
        for (povm, equality) in [(povm, false), (proj, true)] {
            let ch = build_attack(&povm, nu_)?;
            for (m, pi) in ch.outcome_kraus().iter().zip(povm.elements()) {
                let gap = &m[0] - (identity(dim) * c(a) + pi.matrix() * c(b));
                if equality {
                    worst_eq = worst_eq.max(max_abs(&gap));
                } else {
                    worst_op = worst_op.min(HermitianOp::new(gap)?.min_eigenvalue());
                }
            }
        }
    }
    let passed = worst_f >= -tol.scalar && worst_op >= -tol.psd && worst_eq <= tol.psd;
    Ok(Outcome::worst(
        passed,
        format!("min f = {worst_f:.3e}, min eig(M - aI - bPi) = {worst_op:.3e}, projector gap = {worst_eq:.3e}"),
    ))
}

fn interpolation(tol: &Tolerance) -> CliResult<Outcome> {
    let mut worst: f64 = 0.0;
    for (n, pm, p) in canonical_points(8, 11) {
        let s = canonical_scheme(n, pm)?;
        let ch = build_attack(&Povm::computational_basis(n), nu(p, pm, n)?)?;
        worst = worst.max((channel_success_probability(&s, &ch)? - p).abs());
    }
    Ok(Outcome::worst(worst <= tol.equality, format!("max |p_sim - p| = {worst:.3e}")))
}

fn theorem1(tol: &Tolerance) -> CliResult<Outcome> {
    let mut avg_err: f64 = 0.0;
    let mut cond_below: f64 = 0.0;
    let mut tight_err: f64 = 0.0;
    for (n, pm, p) in canonical_points(8, 25) {
        let s = canonical_scheme(n, pm)?;
        let ch = build_attack(&Povm::computational_basis(n), nu(p, pm, n)?)?;
        avg_err = avg_err.max((average_fidelity(&s, &ch)? - minmax_avg_fidelity(p, pm, n)?).abs());
        let cond = conditional_fidelity(&s, &ch)?;
        let bound = minmax_cond_fidelity_bound(p, pm, n)?;
        cond_below = cond_below.max(bound - cond);
        let lo = 1.0 / n as f64;
        if n <= 5 || p == lo || p == pm {
            tight_err = tight_err.max((cond - bound).abs());
        }
    }
    Ok(Outcome::worst(
        avg_err <= tol.equality && cond_below <= tol.equality && tight_err <= tol.equality,
        format!(
            "max |F_sim - F_closed| = {avg_err:.3e}, max (bound - F_cond) = {cond_below:.3e}, tight-case error = {tight_err:.3e}"
        ),
    ))
}

fn second_differences(values: &[f64]) -> f64 {
    values
        .windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::NEG_INFINITY, f64::max)
}

fn concavity(tol: &Tolerance) -> CliResult<Outcome> {
    let mut worst = f64::NEG_INFINITY;
    for n in 2..=16 {
        let lo = 1.0 / n as f64;
        for &pm in P_MAX_SET.iter().filter(|&&pm| pm > lo) {
            let v: Vec<f64> = grid(lo, pm, 200)
                .map(|p| minmax_avg_fidelity(p, pm, n))
                .collect::<qseal::Result<_>>()?;
            worst = worst.max(second_differences(&v));
        }
    }
    let h = |n: usize| -> CliResult<f64> {
        let v: Vec<f64> = grid(1.0 / n as f64, 0.9, 200)
            .map(|x| h_function(x, 0.9, n))
            .collect::<qseal::Result<_>>()?;
        Ok(second_differences(&v))
    };
    let (h4, h8) = (h(4)?, h(8)?);
    Ok(Outcome::worst(
        worst <= tol.equality && h4 <= tol.equality && h8 > 0.0,
        format!("max second difference: F {worst:.3e}, h(N=4) {h4:.3e}, h(N=8) {h8:.3e} (witness)"),
    ))
}

fn insecurity(_tol: &Tolerance) -> CliResult<Outcome> {
    let mut min_avg = f64::INFINITY;
    let mut min_cond = (f64::INFINITY, 0usize, 0.0);
    let mut first_cond_below: Option<usize> = None;
    let mut min_info = f64::INFINITY;
    for n in 2..=64 {
        let lo = 1.0 / n as f64;
        for pm in grid(lo, 1.0, 41).skip(1) {
            let (p, b) = insecurity_point(pm, n)?;
            min_avg = min_avg.min(b.minmax_avg_fidelity);
            if b.minmax_cond_fidelity_bound < min_cond.0 {
                min_cond = (b.minmax_cond_fidelity_bound, n, pm);
            }
            if b.minmax_cond_fidelity_bound <= 0.5 && first_cond_below.is_none() {
                first_cond_below = Some(n);
            }
            let joint = canonical_joint_distribution(p, pm, n)?;
            min_info = min_info.min(mutual_information(&joint, &vec![1.0 / n as f64; n])?);
        }
    }
    let mut o = Outcome::worst(
        min_avg > 0.5 && min_info > 0.0,
        format!("min F at nu = 1/2 over N <= 64: {min_avg:.6}; min information: {min_info:.3e} bits"),
    );
    o = o.note(format!(
        "conditional-fidelity bound at nu = 1/2 reaches {:.6} (N = {}, p_max = {:.4})",
        min_cond.0, min_cond.1, min_cond.2
    ));
    if let Some(n) = first_cond_below {
        o = o.note(format!("conditional-fidelity bound first drops to 1/2 or below at N = {n}"));
    }
    Ok(o)
}

fn asymptotics(_tol: &Tolerance) -> CliResult<Outcome> {
    let limit = asymptotic_fidelity(0.7, 0.9)?;
    let ns = [100usize, 10_000, 1_000_000, 100_000_000];
    let gaps: Vec<f64> = ns
        .iter()
        .map(|&n| Ok((minmax_avg_fidelity(0.7, 0.9, n)? - limit).abs()))
        .collect::<CliResult<_>>()?;
    let nu_inf = 0.7 / 0.9;
    let lead = 2.0 * f64::sqrt(nu_inf * (1.0 - nu_inf)) * (1.0 - 0.81);
    let scaled = gaps[3] * (ns[3] as f64).sqrt();
    let passed = gaps.windows(2).all(|w| w[1] < w[0]) && (scaled - lead).abs() <= 0.05 * lead;
    Ok(Outcome::worst(
        passed,
        format!("|F - limit| at N = 1e2..1e8: {:.3e} {:.3e} {:.3e} {:.3e}", gaps[0], gaps[1], gaps[2], gaps[3]),
    )
    .note(format!(
        "gap * sqrt(N) at N = 1e8 is {scaled:.5} against the leading coefficient {lead:.5}"
    ))
    .note(format!(
        "gap at N = 1e4 is {:.3e}; it first drops below 1e-3 at N = {}",
        gaps[1],
        first_n_below(1e-3, |n| Ok((minmax_avg_fidelity(0.7, 0.9, n)? - limit).abs()))?
    )))
}

/// Smallest `N` with `gap(N) < target`, for `gap` decreasing in `N`.
fn first_n_below(target: f64, gap: impl Fn(usize) -> CliResult<f64>) -> CliResult<usize> {
    let (mut lo, mut hi) = (2usize, 2usize);
    while gap(hi)? >= target {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if gap(mid)? < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn discrimination(tol: &Tolerance) -> CliResult<Outcome> {
    let cfg = SolverConfig::default();
    let h = 0.5f64.sqrt();
    let two = SealScheme::from_public_states(
        vec![0.5, 0.5],
        vec![vec![c(1.0), c(0.0)], vec![c(h), c(h)]],
    )?;
    let sol = solve_discrimination(&two, &cfg)?;
    let helstrom_err = (sol.p_max - 0.5 * (1.0 + h)).abs();
    let mut worst_canon: f64 = 0.0;
    let mut all_pass = sol.report.passed;
    for &(n, pm) in &[(2usize, 0.9), (3, 0.5), (4, 0.8), (5, 0.3), (8, 0.9)] {
        let s = canonical_scheme(n, pm)?;
        let sol = solve_discrimination(&s, &cfg)?;
        worst_canon = worst_canon.max((sol.p_max - pm).abs());
        let report = qseal::discrimination::check_optimality(&s, &sol.povm, tol.probe)?;
        all_pass &= report.passed;
    }
    Ok(Outcome::worst(
        helstrom_err <= tol.probe && worst_canon <= 1e-8_f64.min(tol.probe) && all_pass,
        format!("Helstrom error {helstrom_err:.3e}, canonical p_max error {worst_canon:.3e}, optimality checks {}", if all_pass { "pass" } else { "fail" }),
    ))
}

fn optimality(tol: &Tolerance) -> CliResult<Outcome> {
    let r = probe_optimality(4, 0.8, 2000, 10, 0x5eed)?;
    Ok(Outcome::worst(
        r.max_excess <= tol.probe,
        format!("{} channels on canonical(4, 0.8), max F - bound = {:.3e}", r.samples, r.max_excess),
    ))
}

fn counterexample_check(tol: &Tolerance) -> CliResult<Outcome> {
    let r = counterexample()?;
    let passed = (r.symmetric_cond_fidelity - r.published_symmetric_cond_fidelity).abs() <= tol.regression
        && r.asymmetric_completeness_residual <= 1e-12_f64.min(tol.equality)
        && r.asymmetric_success_residual <= tol.equality;
    let o = Outcome::worst(
        passed,
        format!(
            "symmetric F_cond {:.6}, asymmetric completeness {:.3e}, |p - 0.3| = {:.3e}",
            r.symmetric_cond_fidelity, r.asymmetric_completeness_residual, r.asymmetric_success_residual
        ),
    );
    Ok(o.note(format!(
        "asymmetric F_cond computed {:.6}, published {:.6}",
        r.asymmetric_cond_fidelity, r.published_asymmetric_cond_fidelity
    )))
}

fn mixed_attack(tol: &Tolerance) -> CliResult<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let lo = 1.0 / n as f64;
        for &pm in P_MAX_SET.iter().filter(|&&pm| pm > lo) {
            let s = canonical_scheme(n, pm)?;
            let r = evaluate(&s, &he_mixed_attack(&Povm::computational_basis(n))?)?;
            let (p, f, fc) = mixed_attack_closed_form(pm, n);
            worst = worst
                .max((r.p - p).abs())
                .max((r.avg_fidelity - f).abs())
                .max((r.cond_fidelity - fc).abs());
        }
    }
    let (_, _, far) = mixed_attack_closed_form(0.9, 1_000_000);
    Ok(Outcome::worst(worst <= tol.equality, format!("max closed-form error {worst:.3e}"))
        .note(format!("F_cond at p_max = 0.9, N = 1e6 is {far:.6}; the large-N limit is p_max")))
}

fn entropy_bits(priors: &[f64]) -> f64 {
    -priors.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

fn metric_ranges(tol: &Tolerance) -> CliResult<Outcome> {
    let mut rng = seeded_rng(0xf1de);
    let mut worst: f64 = 0.0;
    for trial in 0..300 {
        let n = 2 + trial % 3;
        let (db, da) = (1 + trial % 4, 1 + trial % 3);
        let states: Vec<Ket> = (0..n).map(|_| random_ket(&mut rng, db * da)).collect();
        let s = SealScheme::new(vec![1.0 / n as f64; n], db, da, states)?;
        let ch = random_channel(&mut rng, n, 2, db);
        let r = evaluate(&s, &ch)?;
        for v in [r.avg_fidelity, r.cond_fidelity] {
            worst = worst.max(-v).max(v - 1.0);
        }
        worst = worst.max(r.mutual_information_bits - entropy_bits(s.priors()));
    }
    Ok(Outcome::worst(worst <= tol.equality, format!("max range violation {worst:.3e}")))
}

fn figure_endpoints(tol: &Tolerance) -> CliResult<Outcome> {
    let sets: [(usize, &[f64]); 2] = [(2, &[0.6, 0.9, 1.0]), (4, &[0.4, 0.6, 0.8, 1.0])];
    let mut endpoint_err: f64 = 0.0;
    let mut rise = f64::NEG_INFINITY;
    for (n, pms) in sets {
        let spec = SweepSpec::new(n, pms.to_vec(), 100, vec![Metric::AvgFidelity, Metric::CondFidelityBound])?;
        let rows = run_sweep(&spec)?;
        for &pm in pms {
            for (m, full) in [
                (Metric::AvgFidelity, pm * pm + (1.0 - pm).powi(2) / (n as f64 - 1.0)),
                (Metric::CondFidelityBound, pm),
            ] {
                let curve: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.p_max == pm && r.metric == m)
                    .map(|r| r.value)
                    .collect();
                rise = rise.max(curve.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
                endpoint_err = endpoint_err
                    .max((curve[0] - 1.0).abs())
                    .max((curve[curve.len() - 1] - full).abs());
            }
        }
    }
    Ok(Outcome::worst(
        endpoint_err <= tol.equality && rise <= tol.equality,
        format!("endpoint error {endpoint_err:.3e}, largest step up {rise:.3e}"),
    ))
}

fn scheme_document(tol: &Tolerance) -> CliResult<Outcome> {
    let mut worst: f64 = 0.0;
    for &(n, pm) in &[(2usize, 0.9), (4, 0.7), (6, 0.5)] {
        let s = canonical_scheme(n, pm)?;
        let mut buf = Vec::new();
        save_scheme(&s, &mut buf)?;
        let back = load_scheme(buf.as_slice())?;
        for (a, b) in back.states().iter().zip(s.states()) {
            worst = worst.max((a.amplitudes() - b.amplitudes()).camax());
        }
    }
    Ok(Outcome::worst(worst <= tol.scalar, format!("max amplitude change {worst:.3e}")))
}
