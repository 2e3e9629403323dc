use std::collections::BTreeMap;

use serde_json::{json, Value};

use qudit_lab::channel::{
    conjugation_fidelity, estimation_bound, min_kraus_count, optimal_conjugator, random_channel,
    validate_channel,
};
use qudit_lab::fidelity::{
    f_local, f_parallel, mean_fidelity, ordering_holds, round4, table1, PSI_PERP_NOTE,
    TABLE_MC_MAX_D,
};
use qudit_lab::optimizer::{optimize, verify_result, OptimizerConfig};
use qudit_lab::povm::{
    hermitian_expand, reference_operator, trace_conditions, MeasurementCase, ReferenceOperator,
    SeedOperator,
};
use qudit_lab::sampler::Sampler;
use qudit_lab::symmetric::{bose_dim, sym_projector, sym_projector_by_permutations};
use qudit_lab::tensor::haar::ginibre;
use qudit_lab::tensor::{partial_transpose_second, vec_identity_residuals};
use qudit_lab::{Error, Result, RngStream, VERSION};

use crate::args::{CaseArg, Command, GlobalArgs, OperatorArg};
use crate::report::{num, Report, Table};

pub const MAX_OPTIMIZE_D: usize = 12;
pub const MAX_SIMULATE_D: usize = 16;

fn config_value(global: &GlobalArgs, command: &Command) -> Value {
    json!({ "global": global, "run": command })
}

fn check_d(d: usize, max: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("--d must be >= 2, got {d}")));
    }
    if d > max {
        return Err(Error::InvalidArgument(format!(
            "--d {d} exceeds the supported maximum {max}"
        )));
    }
    Ok(())
}

pub fn run(global: &GlobalArgs, command: &Command) -> Result<Report> {
    let mut report = match command {
        Command::Table1 { d_list, samples } => table(global, d_list, *samples)?,
        Command::Optimize { d, case, restarts } => optimize_cmd(global, *d, *case, *restarts)?,
        Command::Bound { d, n, fuzz } => bound(global, *d, *n, *fuzz)?,
        Command::Simulate {
            d,
            case,
            samples,
            operator,
        } => simulate(global, *d, *case, *samples, *operator)?,
        Command::Selftest => selftest(global)?,
    };
    report.config = config_value(global, command);
    Ok(report)
}

fn empty(results: Value) -> Report {
    Report {
        version: VERSION.to_string(),
        config: Value::Null,
        results,
        flags: Vec::new(),
        residuals: BTreeMap::new(),
        passed: true,
        table: Table::default(),
    }
}

fn table(global: &GlobalArgs, d_list: &[usize], samples: usize) -> Result<Report> {
    if d_list.is_empty() {
        return Err(Error::InvalidArgument("--d-list is empty".into()));
    }
    let rows = table1(d_list, samples, global.seed)?;
    let mut report = empty(serde_json::to_value(&rows).expect("serializable rows"));
    let mut csv = Table::new(&["d", "F_parallel", "F_local", "F_perp", "flag"]);
    for row in &rows {
        csv.push(vec![
            row.d.to_string(),
            format!("{:.4}", round4(row.f_parallel)),
            format!("{:.4}", round4(row.f_local)),
            format!("{:.4}", round4(row.f_perp)),
            row.flag_column(),
        ]);
        report.flags.extend(row.flags.iter().cloned());
        if let Some([a, b]) = row.exact {
            report.residuals.insert(
                format!("d{}_case_one_exact_vs_closed", row.d),
                (a - row.f_parallel).abs(),
            );
            report.residuals.insert(
                format!("d{}_psi_local_exact_vs_closed", row.d),
                (b - row.f_local).abs(),
            );
            if let Some([ma, mb]) = row.mc {
                let (za, zb) = (ma.z_score(a), mb.z_score(b));
                report
                    .residuals
                    .insert(format!("d{}_case_one_mc_z", row.d), za);
                report
                    .residuals
                    .insert(format!("d{}_psi_local_mc_z", row.d), zb);
                report.passed &= za <= 4.0 && zb <= 4.0;
            }
        }
    }
    if d_list.iter().any(|&d| d <= TABLE_MC_MAX_D) && samples == 0 {
        report
            .flags
            .push("Monte-Carlo confirmation disabled (--samples 0)".into());
    }
    report.flags.push(PSI_PERP_NOTE.into());
    report.table = csv;
    Ok(report)
}

fn optimize_cmd(global: &GlobalArgs, d: usize, case: CaseArg, restarts: usize) -> Result<Report> {
    check_d(d, MAX_OPTIMIZE_D)?;
    let config = OptimizerConfig {
        restarts,
        seed: global.seed,
        ..OptimizerConfig::default()
    };
    let case: MeasurementCase = case.into();
    let r = optimize(d, case, &config)?;
    let v = verify_result(&r)?;
    let mut report = empty(json!({
        "optimizer_config": config,
        "result": r,
        "distance_to_f_local": r.distance_to_local(),
        "distance_to_f_perp": r.distance_to_perp(),
        "verification": v,
    }));
    report.passed = v.passed;
    report
        .residuals
        .insert("completeness_trace".into(), r.completeness_residuals.0);
    report
        .residuals
        .insert("completeness_swap".into(), r.completeness_residuals.1);
    report.residuals.insert("min_eig".into(), r.min_eig);
    if case == MeasurementCase::Conjugate {
        report.flags.push(PSI_PERP_NOTE.into());
    }
    let p = r.best_params;
    let mut csv = Table::new(&[
        "d",
        "case",
        "alpha",
        "beta",
        "gamma",
        "delta",
        "best_fidelity",
        "min_eig",
        "trace_residual",
        "swap_residual",
        "restarts",
    ]);
    csv.push(vec![
        d.to_string(),
        case.to_string(),
        num(p.alpha),
        num(p.beta),
        num(p.gamma),
        num(p.delta),
        num(r.best_fidelity),
        num(r.min_eig),
        num(r.completeness_residuals.0),
        num(r.completeness_residuals.1),
        r.restarts_used.to_string(),
    ]);
    report.table = csv;
    Ok(report)
}

fn bound(global: &GlobalArgs, d: usize, n: usize, fuzz: usize) -> Result<Report> {
    if d < 2 || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "bound needs d >= 2 and n >= 1, got d={d}, n={n}"
        )));
    }
    let b = estimation_bound(d, n);
    let opt = optimal_conjugator(d, n)?;
    let opt_res = validate_channel(&opt)?;
    let f_opt = conjugation_fidelity(&opt)?;
    let mut rng = RngStream::new(global.seed);
    let k0 = min_kraus_count(d, n);
    let mut max_f = f64::NEG_INFINITY;
    let mut violations = 0usize;
    for trial in 0..fuzz {
        let ch = random_channel(d, n, k0 + trial % 4, &mut rng)?;
        let f = conjugation_fidelity(&ch)?;
        max_f = max_f.max(f);
        if f > b + 1e-9 {
            violations += 1;
        }
    }
    let mut report = empty(json!({
        "d": d,
        "n": n,
        "bound": b,
        "optimal_fidelity": f_opt,
        "fuzz": {
            "trials": fuzz,
            "max_fidelity": (fuzz > 0).then_some(max_f),
            "violations": violations,
        },
    }));
    report
        .residuals
        .insert("optimal_saturation".into(), (f_opt - b).abs());
    report
        .residuals
        .insert("optimal_trace_preservation".into(), opt_res.tp);
    report
        .residuals
        .insert("optimal_complete_positivity".into(), opt_res.cp);
    if fuzz > 0 {
        report.residuals.insert("fuzz_max_excess".into(), max_f - b);
    }
    report.passed = violations == 0 && (f_opt - b).abs() <= 1e-9;
    let mut csv = Table::new(&[
        "d",
        "n",
        "bound",
        "optimal_fidelity",
        "fuzz_trials",
        "fuzz_max_fidelity",
        "violations",
    ]);
    csv.push(vec![
        d.to_string(),
        n.to_string(),
        num(b),
        num(f_opt),
        fuzz.to_string(),
        if fuzz > 0 { num(max_f) } else { String::new() },
        violations.to_string(),
    ]);
    report.table = csv;
    Ok(report)
}

fn seed_for(d: usize, case: MeasurementCase, op: OperatorArg) -> Result<(String, SeedOperator)> {
    let name = match (op, case) {
        (OperatorArg::Identity, _) => return Ok(("identity".into(), SeedOperator::identity(d))),
        (OperatorArg::CaseOneOpt, _) | (OperatorArg::Optimal, MeasurementCase::Parallel) => {
            ReferenceOperator::CaseOneOpt
        }
        (OperatorArg::PsiLocal, _) | (OperatorArg::Optimal, MeasurementCase::Conjugate) => {
            ReferenceOperator::PsiLocal
        }
    };
    Ok((name.to_string(), reference_operator(name, d)?))
}

fn simulate(
    global: &GlobalArgs,
    d: usize,
    case: CaseArg,
    samples: usize,
    op: OperatorArg,
) -> Result<Report> {
    check_d(d, MAX_SIMULATE_D)?;
    let case: MeasurementCase = case.into();
    let (name, seed) = seed_for(d, case, op)?;
    let exact = mean_fidelity(&seed)?;
    let sampler = Sampler::new(&seed, case)?;
    let r = sampler.simulate_accepted(samples, global.seed)?;
    let z = (r.empirical_fidelity - exact).abs() / r.stderr.max(f64::MIN_POSITIVE);
    let rate_z =
        (r.acceptance_rate - 1.0 / r.envelope).abs() / r.acceptance_stderr().max(f64::MIN_POSITIVE);
    let (trace, swap) = trace_conditions(&seed.matrix, d)?;
    let mut report = empty(json!({
        "operator": name,
        "simulation": r,
        "exact_fidelity": exact,
        "expected_acceptance_rate": 1.0 / r.envelope,
    }));
    report.residuals.insert("fidelity_z".into(), z);
    report.residuals.insert("acceptance_z".into(), rate_z);
    report.residuals.insert("completeness_trace".into(), trace);
    report.residuals.insert("completeness_swap".into(), swap);
    report.passed = z <= 3.0 || (r.stderr == 0.0 && (r.empirical_fidelity - exact).abs() < 1e-12);
    let mut csv = Table::new(&[
        "d",
        "case",
        "operator",
        "requested",
        "accepted",
        "empirical_fidelity",
        "stderr",
        "acceptance_rate",
        "exact_fidelity",
    ]);
    csv.push(vec![
        d.to_string(),
        case.to_string(),
        name,
        r.requested.to_string(),
        r.accepted.to_string(),
        num(r.empirical_fidelity),
        num(r.stderr),
        num(r.acceptance_rate),
        num(exact),
    ]);
    report.table = csv;
    Ok(report)
}

struct Suite {
    checks: Vec<(String, f64, f64)>,
}

impl Suite {
    fn add(&mut self, name: &str, value: f64, tol: f64) {
        self.checks.push((name.to_string(), value, tol));
    }
}

fn selftest(global: &GlobalArgs) -> Result<Report> {
    let mut rng = RngStream::new(global.seed);
    let mut s = Suite { checks: Vec::new() };

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rows = 1 + (rng.next_u64() % 4) as usize;
        let cols = 1 + (rng.next_u64() % 4) as usize;
        let m = ginibre(rows, rows, &mut rng);
        let n = ginibre(cols, cols, &mut rng);
        let a = ginibre(rows, cols, &mut rng);
        let b = ginibre(rows, cols, &mut rng);
        worst = worst.max(vec_identity_residuals(&m, &n, &a, &b)?.max());
    }
    s.add("vectorization_identities", worst, 1e-12);

    let (mut idem, mut trace, mut perm) = (0.0f64, 0.0f64, 0.0f64);
    for d in 2..=4 {
        for n in 1..=4 {
            let p = sym_projector(d, n)?;
            idem = idem.max(p.matmul(&p)?.max_abs_diff(&p));
            trace = trace.max((p.trace().re - bose_dim(d, n) as f64).abs());
            if d.pow(n as u32) <= 27 {
                perm = perm.max(sym_projector_by_permutations(d, n)?.max_abs_diff(&p));
            }
        }
    }
    s.add("sym_projector_idempotency", idem, 1e-12);
    s.add("sym_projector_trace", trace, 1e-12);
    s.add("sym_projector_vs_permutations", perm, 1e-12);

    let (mut expand, mut duality) = (0.0f64, 0.0f64);
    for trial in 0..60 {
        let d = 2 + trial % 3;
        let x = ginibre(d * d, d * d, &mut rng).hermitian_part();
        expand = expand.max(hermitian_expand(&x, d)?.reconstruct().max_abs_diff(&x));
        let rho = ginibre(d * d, d * d, &mut rng).hermitian_part();
        let lhs =
            partial_transpose_second(&x, d)?.trace_product(&partial_transpose_second(&rho, d)?)?;
        duality = duality.max((lhs - x.trace_product(&rho)?).norm());
    }
    s.add("hermitian_expansion_round_trip", expand, 1e-12);
    s.add("partial_transpose_duality", duality, 1e-12);

    let (mut complete, mut moment) = (0.0f64, 0.0f64);
    for d in 2..=8 {
        for (name, target) in [
            (ReferenceOperator::CaseOneOpt, f_parallel(d)),
            (ReferenceOperator::PsiLocal, f_local(d)),
        ] {
            let op = reference_operator(name, d)?;
            let (t, w) = trace_conditions(&op.matrix, d)?;
            complete = complete.max(t).max(w);
            moment = moment.max((mean_fidelity(&op)? - target).abs());
        }
    }
    s.add("reference_completeness", complete, 1e-10);
    s.add("moment_operator_vs_closed_forms", moment, 1e-10);

    let mut saturation = 0.0f64;
    for d in [2, 3] {
        for n in [1, 2] {
            let f = conjugation_fidelity(&optimal_conjugator(d, n)?)?;
            saturation = saturation.max((f - estimation_bound(d, n)).abs());
        }
    }
    s.add("optimal_conjugator_saturation", saturation, 1e-9);

    let ordering_failures = (2..=50).filter(|&d| !ordering_holds(d)).count();
    s.add("fidelity_ordering_failures", ordering_failures as f64, 0.0);

    let mut csv = Table::new(&["check", "value", "tolerance", "passed"]);
    let mut report = empty(Value::Null);
    let mut results = Vec::new();
    for (name, value, tol) in &s.checks {
        let ok = *value <= *tol;
        report.passed &= ok;
        report.residuals.insert(name.clone(), *value);
        csv.push(vec![name.clone(), num(*value), num(*tol), ok.to_string()]);
        results.push(json!({ "check": name, "value": value, "tolerance": tol, "passed": ok }));
    }
    report.results = Value::Array(results);
    report.table = csv;
    Ok(report)
}
