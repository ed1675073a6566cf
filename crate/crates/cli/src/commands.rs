use std::fmt::Write as _;

use mgcert_core::linalg::identity;
use mgcert_core::multigrid::theorem42_certify;
use mgcert_core::suite::run_property_suite;
use mgcert_core::{theorem33_bounds, BoundsReport, SpdMatrix};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Format, RunArgs};
use crate::problem::{alpha_setup, exact_setup, hierarchy, two_grid_setup};
use crate::CliError;

/// Rendered output and whether the command's own check passed.
pub struct Outcome {
    pub body: String,
    pub ok: bool,
}

const OMEGA_GRID: [f64; 4] = [1e2, 1e4, 1e6, 1e8];
const ALPHA_GRID: [f64; 6] = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9];
const ALPHA_TOL: f64 = 1e-8;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Maps sweep points in input order, in parallel if asked.
fn sweep<T: Send>(
    grid: &[f64],
    parallel: bool,
    f: impl Fn(f64) -> Result<T, CliError> + Sync + Send,
) -> Result<Vec<T>, CliError> {
    if parallel {
        grid.par_iter().map(|&x| f(x)).collect()
    } else {
        grid.iter().map(|&x| f(x)).collect()
    }
}

pub fn analyze(args: &RunArgs) -> Result<Outcome, CliError> {
    let r = theorem33_bounds(&two_grid_setup(args)?)?;
    let body = match args.format {
        Format::Json => pretty(&r),
        Format::Csv => {
            let q = &r.quantities;
            csv(
                "n,n_c,case_id,K_TG,lam_max_AinvMt,lam_min_AinvMt,lam_max_AinvMtPi,d1,d2,lower,upper,actual,notay_upper,sandwich_ok",
                [vec![
                    r.n.to_string(),
                    r.n_c.to_string(),
                    r.case_id.as_str().to_string(),
                    num(q.k_tg),
                    num(q.lam_max_ainv_mt),
                    num(q.lam_min_ainv_mt),
                    num(q.lam_max_ainv_mt_pi),
                    num(q.d1),
                    num(q.d2),
                    num(r.lower),
                    num(r.upper),
                    num(r.actual),
                    num(r.notay_upper),
                    r.sandwich_ok.to_string(),
                ]],
            )
        }
    };
    Ok(Outcome {
        body,
        ok: r.sandwich_ok,
    })
}

pub fn sweep_omega(args: &RunArgs) -> Result<Outcome, CliError> {
    let grid = args.grid.clone().unwrap_or_else(|| OMEGA_GRID.to_vec());
    if let Some(w) = grid.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(CliError::Config(format!("omega grid values must be positive, got {w}")));
    }
    let base = exact_setup(args)?;
    let n_c = base.coarse_order();
    let sentinel = theorem33_bounds(&base)?;
    let reports = sweep(&grid, args.parallel, |w| {
        let bc = SpdMatrix::new(identity(n_c) * w)?;
        Ok(theorem33_bounds(&base.with_bc(bc)?)?)
    })?;

    let labelled: Vec<(Option<f64>, &BoundsReport)> = std::iter::once((None, &sentinel))
        .chain(grid.iter().map(|&w| Some(w)).zip(&reports))
        .collect();
    let ok = labelled.iter().all(|(_, r)| r.sandwich_ok);
    let body = match args.format {
        Format::Json => pretty(&Value::Array(
            labelled
                .iter()
                .map(|(w, r)| {
                    json!({
                        "omega": w.map_or(json!("exact"), |w| json!(w)),
                        "d1": r.quantities.d1,
                        "d2": r.quantities.d2,
                        "lower": r.lower,
                        "upper": r.upper,
                        "actual": r.actual,
                        "notay": r.notay_upper,
                    })
                })
                .collect(),
        )),
        Format::Csv => csv(
            "omega,d1,d2,lower,upper,actual,notay",
            labelled.iter().map(|(w, r)| {
                vec![
                    w.map_or("exact".to_string(), num),
                    num(r.quantities.d1),
                    num(r.quantities.d2),
                    num(r.lower),
                    num(r.upper),
                    num(r.actual),
                    num(r.notay_upper),
                ]
            }),
        ),
    };
    Ok(Outcome { body, ok })
}

struct AlphaRow {
    alpha: f64,
    actual: f64,
    lower: f64,
    upper: f64,
    notay: f64,
    relative_gap: f64,
}

impl AlphaRow {
    /// Columns match `a^2, a^2, a^2, a^2 (2 - a^2), 1 - a^2`.
    /// The gap is `0/0` at `alpha = 0`, reported as 0 and not checked.
    fn matches_closed_form(&self) -> bool {
        let a2 = self.alpha * self.alpha;
        let close = |x: f64, y: f64| (x - y).abs() <= ALPHA_TOL;
        close(self.actual, a2)
            && close(self.lower, a2)
            && close(self.upper, a2)
            && close(self.notay, a2 * (2.0 - a2))
            && (self.alpha == 0.0 || close(self.relative_gap, 1.0 - a2))
    }
}

pub fn sweep_alpha(args: &RunArgs) -> Result<Outcome, CliError> {
    let grid = args.grid.clone().unwrap_or_else(|| ALPHA_GRID.to_vec());
    if let Some(a) = grid.iter().find(|a| !(0.0..1.0).contains(*a)) {
        return Err(CliError::Config(format!(
            "alpha grid values must lie in [0, 1), got {a}"
        )));
    }
    let rows = sweep(&grid, args.parallel, |alpha| {
        let r = theorem33_bounds(&alpha_setup(alpha, args.n_f, args.n_c)?)?;
        let relative_gap = if r.actual > 0.0 {
            (r.notay_upper - r.actual) / r.actual
        } else {
            0.0
        };
        Ok(AlphaRow {
            alpha,
            actual: r.actual,
            lower: r.lower,
            upper: r.upper,
            notay: r.notay_upper,
            relative_gap,
        })
    })?;
    let ok = rows.iter().all(AlphaRow::matches_closed_form);
    let body = match args.format {
        Format::Json => pretty(&Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "alpha": r.alpha,
                        "actual": r.actual,
                        "lower": r.lower,
                        "upper": r.upper,
                        "notay": r.notay,
                        "relative_gap": r.relative_gap,
                    })
                })
                .collect(),
        )),
        Format::Csv => csv(
            "alpha,actual,lower,upper,notay,relative_gap",
            rows.iter().map(|r| {
                [r.alpha, r.actual, r.lower, r.upper, r.notay, r.relative_gap]
                    .map(num)
                    .to_vec()
            }),
        ),
    };
    Ok(Outcome { body, ok })
}

pub fn mg_certify(args: &RunArgs) -> Result<Outcome, CliError> {
    let c = theorem42_certify(&hierarchy(args)?, args.gamma)?;
    let body = match args.format {
        Format::Json => pretty(&c),
        Format::Csv => csv(
            "k,n_k,sigma_tg,sigma_img,x_gamma",
            c.levels.iter().map(|l| {
                vec![
                    l.k.to_string(),
                    l.n_k.to_string(),
                    num(l.sigma_tg),
                    num(l.sigma_img),
                    num(c.x_gamma),
                ]
            }),
        ),
    };
    Ok(Outcome { body, ok: c.verified })
}

pub fn verify(args: &RunArgs) -> Result<Outcome, CliError> {
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let summary = run_property_suite(args.seed, args.trials);
    let body = match args.format {
        Format::Json => pretty(&summary),
        Format::Csv => csv(
            "name,passed,trials,worst_slack",
            summary.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    c.passed.to_string(),
                    c.trials.to_string(),
                    num(c.worst_slack),
                ]
            }),
        ),
    };
    Ok(Outcome {
        body,
        ok: summary.all_passed(),
    })
}
