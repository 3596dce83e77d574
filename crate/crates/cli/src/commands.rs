use std::collections::BTreeMap;

use caustic_core::caustics::{curve_values, locate_cusp, CurveKind};
use caustic_core::density::density_point;
use caustic_core::oracle::exact_rho_diag;
use caustic_core::trajectories::{
    find_complex_pair, find_real_turning_points, periodic_amplitude, periodic_saddle, q0_of_qt, q0_of_qt_real,
};
use caustic_core::validation::{criterion_ids, run_criterion, CriterionReport, ValidationConfig};
use caustic_core::{Error, Grid, PhysParams, TrajectorySolution};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::table::{Cell, Table};

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    /// Bad input; exit code 2.
    Config(String),
    /// A point could not be evaluated; exit code 3.
    Numerical { at: String, err: Error },
}

type Out<T> = std::result::Result<T, Failure>;

fn at(point: String) -> impl FnOnce(Error) -> Failure {
    move |err| Failure::Numerical { at: point, err }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Usual,
    Improved,
    Both,
    Oracle,
}

fn check_domain(thetas: &[f64], q0s: &[f64]) -> Out<()> {
    if let Some(t) = thetas.iter().find(|t| !(**t > 0.0)) {
        return Err(Failure::Config(format!("--theta must be positive, got {t}")));
    }
    if let Some(q) = q0s.iter().find(|q| !(q.abs() < 1.0)) {
        return Err(Failure::Config(format!("--q0 must satisfy |q0| < 1, got {q}")));
    }
    Ok(())
}

pub fn rho(g: f64, thetas: &[f64], q0s: &[f64], method: Method) -> Out<Table> {
    if !(g > 0.0) {
        return Err(Failure::Config(format!("--g must be positive, got {g}")));
    }
    check_domain(thetas, q0s)?;
    let points: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| q0s.iter().map(move |&q| (q, t))).collect();
    let exact: BTreeMap<u64, caustic_core::SpectralSolution> = if method == Method::Oracle {
        thetas
            .par_iter()
            .map(|&t| {
                let p = PhysParams::new(g, t).map_err(at(format!("theta = {t}")))?;
                let s = exact_rho_diag(p, Grid::default()).map_err(at(format!("oracle at theta = {t}")))?;
                Ok((t.to_bits(), s))
            })
            .collect::<Out<_>>()?
    } else {
        BTreeMap::new()
    };
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(q0, theta)| {
            let p = density_point(q0, theta, g).map_err(at(format!("q0 = {q0}, theta = {theta}, g = {g}")))?;
            let (a, b) = p.effpot.parameters();
            let mut row = vec![Cell::Num(q0), Cell::Num(theta), Cell::Num(g), Cell::Int(p.region.n_solutions as i64)];
            let improved = [Cell::Num(p.rho_improved), Cell::Num(p.f_factor), Cell::Num(a), Cell::Num(b)];
            match method {
                Method::Usual => row.push(Cell::Num(p.rho_usual)),
                Method::Improved => row.extend(improved),
                Method::Both | Method::Oracle => {
                    row.push(Cell::Num(p.rho_usual));
                    row.extend(improved);
                }
            }
            if method == Method::Oracle {
                row.push(Cell::Num(exact[&theta.to_bits()].density_at(q0)));
            }
            Ok(row)
        })
        .collect::<Out<_>>()?;
    let mut columns = vec!["q0", "theta", "g", "n_solutions"];
    let improved = ["rho_improved", "F_factor", "xi_or_phi", "mu_or_chi"];
    match method {
        Method::Usual => columns.push("rho_usual"),
        Method::Improved => columns.extend(improved),
        Method::Both => {
            columns.push("rho_usual");
            columns.extend(improved);
        }
        Method::Oracle => {
            columns.push("rho_usual");
            columns.extend(improved);
            columns.push("rho_exact");
        }
    }
    Ok(Table { columns, rows })
}

fn kind_of(c: u32) -> CurveKind {
    CurveKind::from_index(c)
}

pub fn caustic(thetas: &[f64], single: bool) -> Out<Table> {
    check_domain(thetas, &[])?;
    let mut table = Table::new(vec!["curve_id", "kind", "theta", "q0"]);
    if single {
        for &t in thetas {
            let v = curve_values(t).map_err(at(format!("theta = {t}")))?;
            let (_, q) = v
                .iter()
                .find(|p| p.0 == 1)
                .copied()
                .ok_or_else(|| Failure::Config(format!("no caustic at theta = {t}; need theta > pi")))?;
            table.rows.push(vec![Cell::Int(1), Cell::Text(kind_of(1).to_string()), Cell::Num(t), Cell::Num(q)]);
        }
        return Ok(table);
    }
    let values: Vec<Vec<(u32, f64)>> = thetas
        .par_iter()
        .map(|&t| curve_values(t).map_err(at(format!("theta = {t}"))))
        .collect::<Out<_>>()?;
    let mut rows: Vec<(u32, f64, f64, String)> = Vec::new();
    for (&t, vs) in thetas.iter().zip(&values) {
        for &(c, v) in vs {
            rows.push((c, t, -v, kind_of(c).to_string()));
            if v != 0.0 {
                rows.push((c, t, v, kind_of(c).to_string()));
            }
        }
    }
    // a cusp lies between consecutive samples where a curve first appears
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
    for w in order.windows(2) {
        let (lo, hi) = (thetas[w[0]], thetas[w[1]]);
        for &(c, _) in &values[w[1]] {
            if values[w[0]].iter().any(|p| p.0 == c) {
                continue;
            }
            let cusp = locate_cusp(kind_of(c), lo, hi).map_err(at(format!("cusp of curve {c} in [{lo}, {hi}]")))?;
            rows.push((c, cusp, 0.0, "cusp".into()));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    rows.dedup();
    table.rows = rows
        .into_iter()
        .map(|(c, t, q, k)| vec![Cell::Int(c as i64), Cell::Text(k), Cell::Num(t), Cell::Num(q)])
        .collect();
    Ok(table)
}

/// What `branches` sweeps over.
pub enum Sweep<'a> {
    TurningPoint(&'a [f64]),
    Imaginary(&'a [f64]),
    EndPoint(&'a [f64]),
}

fn solution_row(theta: f64, q0: f64, s: &TrajectorySolution) -> Vec<Cell> {
    vec![
        Cell::Num(theta),
        Cell::Num(q0),
        Cell::Text(s.kind.to_string()),
        Cell::Int(s.branch.map_or(-1, |b| b as i64)),
        Cell::Num(s.q_t.re),
        Cell::Num(s.q_t.im),
        Cell::Num(s.action.re),
        Cell::Num(s.action.im),
    ]
}

pub fn branches(thetas: &[f64], sweep: Sweep) -> Out<Table> {
    check_domain(thetas, if let Sweep::EndPoint(q) = sweep { q } else { &[] })?;
    match sweep {
        Sweep::TurningPoint(qts) => {
            let pts: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| qts.iter().map(move |&q| (t, q))).collect();
            let rows = pts
                .par_iter()
                .map(|&(t, qt)| {
                    let q0 = q0_of_qt_real(qt, t).map_err(at(format!("q_t = {qt}, theta = {t}")))?;
                    Ok(vec![Cell::Num(t), Cell::Num(qt), Cell::Num(q0)])
                })
                .collect::<Out<_>>()?;
            Ok(Table { columns: vec!["theta", "q_t", "q0"], rows })
        }
        Sweep::Imaginary(xis) => {
            let pts: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| xis.iter().map(move |&x| (t, x))).collect();
            let rows = pts
                .par_iter()
                .map(|&(t, xi)| {
                    let q0 = q0_of_qt(Complex64::new(0.0, xi), t).map_err(at(format!("xi = {xi}, theta = {t}")))?;
                    // q0(iξ) is purely imaginary; report −i·q0
                    Ok(vec![Cell::Num(t), Cell::Num(xi), Cell::Num(q0.im)])
                })
                .collect::<Out<_>>()?;
            Ok(Table { columns: vec!["theta", "xi", "minus_i_q0"], rows })
        }
        Sweep::EndPoint(q0s) => {
            let pts: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| q0s.iter().map(move |&q| (t, q))).collect();
            let groups: Vec<Vec<Vec<Cell>>> = pts
                .par_iter()
                .map(|&(t, q0)| {
                    let here = || format!("q0 = {q0}, theta = {t}");
                    let mut rows: Vec<Vec<Cell>> = find_real_turning_points(q0, t)
                        .map_err(at(here()))?
                        .iter()
                        .map(|s| solution_row(t, q0, s))
                        .collect();
                    if periodic_amplitude(t, 1).is_ok_and(|a| q0.abs() <= a) {
                        rows.push(solution_row(t, q0, &periodic_saddle(q0, t).map_err(at(here()))?));
                    }
                    // no complex pair between the fold arms
                    match find_complex_pair(q0, t) {
                        Ok((a, b)) => {
                            rows.push(solution_row(t, q0, &a));
                            rows.push(solution_row(t, q0, &b));
                        }
                        Err(Error::Region { .. }) => {}
                        Err(e) => return Err(at(here())(e)),
                    }
                    Ok(rows)
                })
                .collect::<Out<_>>()?;
            Ok(Table {
                columns: vec!["theta", "q0", "kind", "branch", "q_t_re", "q_t_im", "action_re", "action_im"],
                rows: groups.into_iter().flatten().collect(),
            })
        }
    }
}

pub fn validate(only: &[String], oracle_g: Option<f64>) -> Out<Vec<CriterionReport>> {
    let mut config = ValidationConfig::default();
    if let Some(g) = oracle_g {
        if !(g > 0.0) {
            return Err(Failure::Config(format!("--g must be positive, got {g}")));
        }
        config.oracle_g = g;
    }
    let ids: Vec<String> = if only.is_empty() {
        criterion_ids().into_iter().map(String::from).collect()
    } else {
        only.to_vec()
    };
    ids.iter()
        .map(|id| {
            run_criterion(id, &config).ok_or_else(|| {
                Failure::Config(format!("unknown criterion {id:?}; known: {}", criterion_ids().join(", ")))
            })
        })
        .collect()
}
