//! Sweep orchestration: one task per cutoff, results merged in input order.

use std::fs;
use std::path::Path;

use kcc_core::bath::build_rate_profile;
use kcc_core::dynamics::{Hamiltonian, OdeOptions, Propagator, QubitState};
use kcc_core::format::fmt_f64;
use kcc_core::kcc::{kcc_violation, kcc_violation_closed_form, viol_upper_bound, MeasurementBasis};
use kcc_core::nonmarkov::{blp_viol_sandwich, rhp_measure, viol_rhp_identity};
use kcc_core::thermo::{heat, thermo_snapshot};
use kcc_core::witnesses::{kd_distribution, lgi_correlators};
use kcc_core::Error;
use rayon::prelude::*;

use crate::config::{Case, ExperimentConfig, Group};
use crate::{CliError, EXIT_INVARIANT, EXIT_NUMERIC, EXIT_OK};

pub const SUMMARY_HEADER: &str = "omega_c,viol,M,N,G,N_blp,Q,K3";
pub const VIOL_HEADER: &str = "omega_c,t1,t2,viol,S_factor,M,N,bound";
pub const NONMARKOV_HEADER: &str = "omega_c,N_rhp,N1_tilde,N2_tilde,N_blp,viol,lower,upper";
pub const THERMO_HEADER: &str = "t,S_vn,I_sr,F_x,Q,sigma,sigma_approx";
pub const WITNESSES_HEADER: &str = "omega_c,t1,t2,C01,C12,C02,K3,viol,residual,max_abs_interference";
pub const ERRORS_HEADER: &str = "omega_c,kind,message";

/// Approximate number of rows in each trajectory CSV.
const THERMO_ROWS: usize = 300;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, Default)]
struct Point {
    omega_c: f64,
    summary: Vec<f64>,
    viol: Option<Vec<f64>>,
    nonmarkov: Option<Vec<f64>>,
    witnesses: Option<Vec<f64>>,
    rates_csv: Option<String>,
    thermo_csv: Option<String>,
    failures: Vec<String>,
}

/// In-memory result of a sweep.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub files: Vec<OutputFile>,
    pub numeric_errors: usize,
    pub invariant_failures: usize,
    pub points: usize,
}

impl RunReport {
    /// 0 on success, 3 if any point hit a numeric error, otherwise 1 if an invariant failed.
    pub fn exit_code(&self) -> i32 {
        if self.numeric_errors > 0 {
            EXIT_NUMERIC
        } else if self.invariant_failures > 0 {
            EXIT_INVARIANT
        } else {
            EXIT_OK
        }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let io = |path: &Path, source| CliError::Io { path: path.display().to_string(), source };
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for f in &self.files {
            let path = dir.join(&f.name);
            fs::write(&path, &f.contents).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}

fn row(values: &[f64]) -> String {
    let fields: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
    fields.join(",") + "\n"
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn evaluate(cfg: &ExperimentConfig, omega_c: f64) -> Result<Point, Error> {
    let profile = build_rate_profile(&cfg.bath(omega_c), cfg.horizon, cfg.grid_steps)?;
    let (t1, t2, w0) = (cfg.t1, cfg.t2, cfg.omega0);
    let mut p = Point { omega_c, ..Default::default() };
    let at_t2 = profile.integrals_at(t2)?;
    let closed = kcc_violation_closed_form(t1, t2, &profile, w0)?;
    let plus = QubitState::plus();
    let x = MeasurementBasis::x_basis();
    let diagonal = Propagator::new(&profile, Hamiltonian::sigma_z(w0), OdeOptions::permissive(cfg.ode_step));

    let viol = match cfg.case {
        Case::Case1 => {
            let tree = kcc_violation(&diagonal, &plus, &x, t1, t2)?.viol;
            check(&mut p.failures, (tree - closed.viol).abs() < 1e-8, || {
                format!("probability tree {tree} differs from closed form {}", closed.viol)
            });
            closed.viol
        }
        Case::Case2 => {
            let options = OdeOptions { step: cfg.ode_step, positivity: cfg.positivity };
            let driven = Propagator::new(&profile, Hamiltonian::new(w0, cfg.big_omega), options);
            kcc_violation(&driven, &QubitState::ground(), &MeasurementBasis::z_basis(), t1, t2)?.viol
        }
    };

    if cfg.wants(Group::Rates) {
        p.rates_csv = Some(profile.to_csv());
    }
    if cfg.wants(Group::Viol) {
        let (s, bound) = match cfg.case {
            Case::Case1 => (closed.s_factor.unwrap_or(f64::NAN), viol_upper_bound(&profile, t2)?),
            Case::Case2 => (f64::NAN, f64::NAN),
        };
        p.viol = Some(vec![omega_c, t1, t2, viol, s, at_t2.m, at_t2.n, bound]);
    }
    let mut n_blp = f64::NAN;
    if cfg.wants(Group::Nonmarkov) {
        let (rebuilt, direct) = viol_rhp_identity(t1, t2, &profile, w0)?;
        check(&mut p.failures, (rebuilt - direct).abs() < 1e-10, || {
            format!("RHP factorization {rebuilt} differs from {direct}")
        });
        let n_rhp = rhp_measure(&profile, t2)?;
        match blp_viol_sandwich(t1, t2, &profile, w0) {
            Ok(r) => {
                n_blp = r.n_blp;
                p.nonmarkov = Some(vec![omega_c, n_rhp, r.n1_tilde, r.n2_tilde, r.n_blp, r.viol, r.lower, r.upper]);
            }
            Err(Error::Invariant(msg)) => {
                p.failures.push(msg);
                let nan = f64::NAN;
                p.nonmarkov = Some(vec![omega_c, n_rhp, at_t2.n1_tilde, at_t2.n2_tilde, nan, closed.viol, nan, nan]);
            }
            Err(e) => return Err(e),
        }
    }
    let mut q = f64::NAN;
    if cfg.wants(Group::Thermo) {
        let beta = 1.0 / cfg.temperature;
        let stride = (profile.n_steps() / THERMO_ROWS).max(1);
        let mut csv = format!("{THERMO_HEADER}\n");
        let last = profile.t.len() - 1;
        for (k, &t) in profile.t.iter().enumerate() {
            if k % stride == 0 || k == last {
                let s = thermo_snapshot(t1, t, &profile, beta, w0)?;
                csv.push_str(&row(&[s.t, s.s_vn, s.i_sr, s.f_x, s.q, s.sigma, s.sigma_approx]));
            }
        }
        p.thermo_csv = Some(csv);
        q = heat(t2, &profile, w0)?;
        let direct = thermo_snapshot(t1, t2, &profile, beta, w0)?.q;
        check(&mut p.failures, (q - direct).abs() <= 1e-8 * q.abs().max(1.0), || {
            format!("heat formula {q} differs from energy change {direct}")
        });
    }
    let mut k3 = f64::NAN;
    if cfg.wants(Group::Witnesses) {
        let lgi = lgi_correlators(t1, t2, &profile, w0)?;
        let kd = kd_distribution(&diagonal, &plus, &x, t1, t2)?;
        k3 = lgi.k3;
        check(&mut p.failures, lgi.decomposition_residual < 1e-10, || {
            format!("K3 decomposition residual {}", lgi.decomposition_residual)
        });
        let scale = kd.entries.iter().flatten().map(|e| e.norm()).fold(1.0, f64::max);
        for i in 0..2 {
            let over_a = (kd.entries[i][0] + kd.entries[i][1] - kd.p_t2[i]).norm();
            let over_b = (kd.entries[0][i] + kd.entries[1][i] - kd.p_t1[i]).norm();
            check(&mut p.failures, over_a.max(over_b) <= 1e-10 * scale, || {
                format!("KD marginal error {}", over_a.max(over_b))
            });
        }
        p.witnesses = Some(vec![
            omega_c,
            t1,
            t2,
            lgi.c01,
            lgi.c12,
            lgi.c02,
            lgi.k3,
            lgi.viol,
            lgi.decomposition_residual,
            kd.max_abs_interference(),
        ]);
    }
    p.summary = vec![omega_c, viol, at_t2.m, at_t2.n, at_t2.g, n_blp, q, k3];
    Ok(p)
}

fn profile_tag(index: usize, omega_c: f64) -> String {
    format!("{index:02}_wc{omega_c:.4}")
}

/// Evaluates every sweep point on `jobs` threads (all cores when `None`).
pub fn run_experiment(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::ThreadPool(e.to_string()))?;
    let results: Vec<Result<Point, Error>> =
        pool.install(|| cfg.omega_c_sweep.par_iter().map(|&wc| evaluate(cfg, wc)).collect());

    let mut files = Vec::new();
    let mut summary = format!("{SUMMARY_HEADER}\n");
    let mut viol = format!("{VIOL_HEADER}\n");
    let mut nonmarkov = format!("{NONMARKOV_HEADER}\n");
    let mut witnesses = format!("{WITNESSES_HEADER}\n");
    let mut errors = format!("{ERRORS_HEADER}\n");
    let (mut numeric_errors, mut invariant_failures) = (0, 0);
    for (k, (result, &wc)) in results.into_iter().zip(&cfg.omega_c_sweep).enumerate() {
        let point = match result {
            Ok(p) => p,
            Err(e) => {
                numeric_errors += 1;
                errors.push_str(&format!("{},numeric,{}\n", fmt_f64(wc), quote(&e.to_string())));
                continue;
            }
        };
        for msg in &point.failures {
            invariant_failures += 1;
            errors.push_str(&format!("{},invariant,{}\n", fmt_f64(wc), quote(msg)));
        }
        summary.push_str(&row(&point.summary));
        if let Some(r) = &point.viol {
            viol.push_str(&row(r));
        }
        if let Some(r) = &point.nonmarkov {
            nonmarkov.push_str(&row(r));
        }
        if let Some(r) = &point.witnesses {
            witnesses.push_str(&row(r));
        }
        if let Some(csv) = point.rates_csv {
            files.push(OutputFile { name: format!("rates_{}.csv", profile_tag(k, point.omega_c)), contents: csv });
        }
        if let Some(csv) = point.thermo_csv {
            files.push(OutputFile { name: format!("thermo_{}.csv", profile_tag(k, point.omega_c)), contents: csv });
        }
    }
    let groups = [(Group::Viol, viol), (Group::Nonmarkov, nonmarkov), (Group::Witnesses, witnesses)];
    for (group, contents) in groups {
        if cfg.wants(group) {
            files.push(OutputFile { name: format!("{}.csv", group.name()), contents });
        }
    }
    files.push(OutputFile { name: "summary.csv".into(), contents: summary });
    files.push(OutputFile { name: "errors.csv".into(), contents: errors });
    Ok(RunReport { files, numeric_errors, invariant_failures, points: cfg.omega_c_sweep.len() })
}
