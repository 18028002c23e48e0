//! Orbits, projective distances and the approximant sequences built from the
//! criterion witnesses.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{norm, segal_series, GridFunction, NormKind, PiecewiseMap};
use crate::operator::CompositionOperator;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `min_{lambda != 0} ||lambda f - g||` and a minimizing `lambda`.
///
/// L2 is solved in closed form. For the sup and Segal norms the objective is
/// convex in `lambda`, so a nested golden-section search over `(Re, Im)` in the
/// disc that must contain the minimizer converges to it.
pub fn projective_distance(f: &GridFunction, g: &GridFunction, kind: &NormKind) -> Result<(f64, Complex64)> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    if f.is_zero() {
        return Err(Error::ZeroVector);
    }
    match kind {
        NormKind::L2 => {
            let ff = f.l2_norm().powi(2);
            let lambda = g.inner(f)? / ff;
            // the residual form is stable when g is nearly colinear with f
            let d = f.combine(lambda, g, -ONE)?.l2_norm();
            Ok((d, lambda))
        }
        NormKind::Sup | NormKind::Segal { .. } => minimize_convex(f, g, kind),
    }
}

fn minimize_convex(f: &GridFunction, g: &GridFunction, kind: &NormKind) -> Result<(f64, Complex64)> {
    let grid = f.grid();
    let idx: Vec<usize> = (0..grid.len())
        .filter(|&i| f.value(i) != Complex64::new(0.0, 0.0) || g.value(i) != Complex64::new(0.0, 0.0))
        .collect();
    let fs: Vec<Complex64> = idx.iter().map(|&i| f.value(i)).collect();
    let gs: Vec<Complex64> = idx.iter().map(|&i| g.value(i)).collect();
    let (taus, tail_tol) = match kind {
        NormKind::Segal { tau, tail_tol } => {
            let t: Vec<f64> = idx.iter().map(|&i| tau.eval(grid.point(i)).abs()).collect();
            if let Some(&rho) = t.iter().max_by(|a, b| a.total_cmp(b)) {
                if rho >= 1.0 {
                    return Err(Error::DivergentSegalNorm { sup_tau: rho });
                }
            }
            (Some(t), *tail_tol)
        }
        _ => (None, 0.0),
    };
    let phi = |lambda: Complex64| -> f64 {
        let r = fs.iter().zip(&gs).map(|(x, y)| (lambda * x - y).norm());
        match &taus {
            None => r.fold(0.0, f64::max),
            Some(t) => segal_series(r.zip(t.iter().copied()).collect(), tail_tol).expect("support bound checked above"),
        }
    };
    // |lambda| ||f||_inf - ||g||_inf <= ||lambda f - g|| and phi(0) bound the minimizer
    let radius = (phi(Complex64::new(0.0, 0.0)) + g.sup_norm()) / f.sup_norm();
    let tol = 1e-10 * radius.max(1e-300);
    let (re, _) = golden_min(-radius, radius, tol, |x| {
        golden_min(-radius, radius, tol, |y| phi(Complex64::new(x, y))).1
    });
    let (im, _) = golden_min(-radius, radius, tol, |y| phi(Complex64::new(re, y)));
    let lambda = Complex64::new(re, im);
    Ok((phi(lambda), lambda))
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`.
fn golden_min(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub n: u64,
    pub norm: f64,
    pub cesaro_norm: f64,
    pub scaled_dist: Option<f64>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub kind: NormKind,
    pub rows: Vec<OrbitRow>,
}

impl OrbitTrace {
    /// Columns `n, norm, cesaro_norm, scaled_dist`; the last is empty without a target.
    pub fn write_csv<W: Write>(&self, w: W) -> std::result::Result<(), csv::Error> {
        #[derive(Serialize)]
        struct Row {
            n: u64,
            norm: f64,
            cesaro_norm: f64,
            scaled_dist: Option<f64>,
        }
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(Row {
                n: r.n,
                norm: r.norm,
                cesaro_norm: r.cesaro_norm,
                scaled_dist: r.scaled_dist,
            })?;
        }
        out.flush()?;
        Ok(())
    }
}

fn orbit(op: &CompositionOperator, f: &GridFunction, horizon: u64) -> Result<Vec<GridFunction>> {
    (1..=horizon as usize).into_par_iter().map(|n| op.apply_tn(f, n as u64)).collect()
}

/// `||T^n f||`, `||T^n f|| / n` and, with a target, the projective distance
/// from `T^n f` to it, for `n = 1..=horizon`.
pub fn orbit_trace(
    op: &CompositionOperator,
    f: &GridFunction,
    horizon: u64,
    kind: &NormKind,
    target: Option<&GridFunction>,
) -> Result<OrbitTrace> {
    assert!(horizon >= 1);
    let rows = orbit(op, f, horizon)?
        .into_par_iter()
        .enumerate()
        .map(|(i, tn)| {
            let n = i as u64 + 1;
            let nv = norm(&tn, kind)?;
            let scaled_dist = match target {
                Some(g) => Some(scaled_distance(&tn, g, kind)?),
                None => None,
            };
            Ok(OrbitRow {
                n,
                norm: nv,
                cesaro_norm: nv / n as f64,
                scaled_dist,
                truncated: tn.is_truncated(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitTrace { kind: kind.clone(), rows })
}

/// Projective distance, with the `lambda -> 0` limit `||g||` when `x` vanished.
fn scaled_distance(x: &GridFunction, g: &GridFunction, kind: &NormKind) -> Result<f64> {
    if x.is_zero() {
        return norm(g, kind);
    }
    Ok(projective_distance(x, g, kind)?.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Approximant {
    pub v: GridFunction,
    pub lambda: f64,
    pub n: u64,
}

/// `(||v - f||, ||lambda T^n v - g||)`.
pub fn approximant_errors(
    op: &CompositionOperator,
    ap: &Approximant,
    f: &GridFunction,
    g: &GridFunction,
    kind: &NormKind,
) -> Result<(f64, f64)> {
    let tv = op.apply_tn(&ap.v, ap.n)?;
    let e1 = norm(&ap.v.sub(f)?, kind)?;
    let e2 = norm(&tv.combine(Complex64::new(ap.lambda, 0.0), g, -ONE)?, kind)?;
    Ok((e1, e2))
}

fn restricted(f: &GridFunction, g: &GridFunction, mask: Option<&[usize]>) -> Result<(GridFunction, GridFunction)> {
    let (fx, gx) = match mask {
        Some(m) => (f.restrict(m), g.restrict(m)),
        None => (f.clone(), g.clone()),
    };
    if fx.is_zero() {
        return Err(Error::Degenerate("f vanishes on the kept set"));
    }
    if gx.is_zero() {
        return Err(Error::Degenerate("g vanishes on the kept set"));
    }
    Ok((fx, gx))
}

/// `v = f chi + c S^n(g chi)`, `lambda = 1/c`, `c = (||T^n(f chi)|| / ||S^n(g chi)||)^{1/2}`.
///
/// `mask` lists the kept grid indices (the complement of the exceptional set);
/// `None` keeps everything.
pub fn supercyclic_approximant(
    op: &CompositionOperator,
    f: &GridFunction,
    g: &GridFunction,
    n: u64,
    mask: Option<&[usize]>,
    kind: &NormKind,
) -> Result<Approximant> {
    let (fx, gx) = restricted(f, g, mask)?;
    let tn = norm(&op.apply_tn(&fx, n)?, kind)?;
    let sg = op.apply_sn(&gx, n)?;
    let sn = norm(&sg, kind)?;
    if tn == 0.0 || sn == 0.0 {
        return Err(Error::Degenerate("an orbit leg left the grid"));
    }
    let c = (tn / sn).sqrt();
    Ok(Approximant {
        v: fx.combine(ONE, &sg, Complex64::new(c, 0.0))?,
        lambda: (sn / tn).sqrt(),
        n,
    })
}

/// `v = f chi + n S^n(g chi)` with `lambda = 1/n`.
pub fn cesaro_approximant(
    op: &CompositionOperator,
    f: &GridFunction,
    g: &GridFunction,
    n: u64,
    mask: Option<&[usize]>,
) -> Result<Approximant> {
    assert!(n >= 1);
    let (fx, gx) = restricted(f, g, mask)?;
    let sg = op.apply_sn(&gx, n)?;
    Ok(Approximant {
        v: fx.combine(ONE, &sg, Complex64::new(n as f64, 0.0))?,
        lambda: 1.0 / n as f64,
        n,
    })
}

/// The supercyclic construction in the Segal norm `||.||_tau`; `tau` must be
/// invariant under `alpha` on the grid within `invariance_tol`.
pub fn segal_approximant(
    op: &CompositionOperator,
    f: &GridFunction,
    g: &GridFunction,
    n: u64,
    tau: &PiecewiseMap,
    tail_tol: f64,
    invariance_tol: f64,
) -> Result<Approximant> {
    let deviation = op.segal_deviation(tau, &f.grid());
    if deviation > invariance_tol {
        return Err(Error::SegalIncompatible { deviation });
    }
    supercyclic_approximant(op, f, g, n, None, &NormKind::segal(tau.clone(), tail_tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeMode {
    Plain,
    Scaled,
    Cesaro,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub target: usize,
    pub n: u64,
    pub distance: f64,
}

/// For every target, the `n <= horizon` whose orbit point comes closest
/// (earliest `n` on ties).
pub fn empirical_best(
    op: &CompositionOperator,
    f: &GridFunction,
    targets: &[GridFunction],
    horizon: u64,
    kind: &NormKind,
    mode: ProbeMode,
) -> Result<Vec<BestRow>> {
    assert!(horizon >= 1);
    let orbit = orbit(op, f, horizon)?;
    targets
        .iter()
        .enumerate()
        .map(|(ti, g)| {
            let dists = orbit
                .par_iter()
                .enumerate()
                .map(|(i, tn)| (i as u64 + 1, tn))
                .map(|(n, tn)| match mode {
                    ProbeMode::Plain => norm(&tn.sub(g)?, kind),
                    ProbeMode::Scaled => scaled_distance(tn, g, kind),
                    ProbeMode::Cesaro => norm(&tn.combine(Complex64::new(1.0 / n as f64, 0.0), g, -ONE)?, kind),
                })
                .collect::<Result<Vec<f64>>>()?;
            let (i, d) = dists
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |(bi, bd), (i, &d)| if d < bd { (i, d) } else { (bi, bd) });
            Ok(BestRow {
                target: ti,
                n: i as u64 + 1,
                distance: d,
            })
        })
        .collect()
}
