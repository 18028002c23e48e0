//! Sets `Gamma_g = {f : |f(m)| >= g(m) for every integer m}` in `C_0`, the
//! functions `h`, `E` and `gamma` that refill balls around their members, a
//! sampling probe for porosity, and the weight-product set whose members have
//! `||T^n f||_inf >= 1` for all `n`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::FactorSweep;
use crate::error::{Error, Result};
use crate::funcspace::{Grid, GridFunction};
use crate::operator::CompositionOperator;
use crate::product::ScaledProduct;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorosityParams {
    pub lambda: f64,
    pub beta: f64,
    pub delta: f64,
    pub r_tilde: f64,
    pub r: f64,
    pub n_cut: i64,
}

impl PorosityParams {
    /// Checks `0 < beta < lambda <= 1/2`, `0 < delta < r/100` and `0 < r < r_tilde - ||k - f||`.
    pub fn validate(&self, k: &GridFunction, f: &GridFunction) -> Result<()> {
        let p = self;
        if !(0.0 < p.beta && p.beta < p.lambda && p.lambda <= 0.5) {
            return Err(Error::PreconditionViolated(format!(
                "need 0 < beta < lambda <= 1/2, got beta = {}, lambda = {}",
                p.beta, p.lambda
            )));
        }
        if !(p.delta > 0.0 && p.delta < p.r / 100.0) {
            return Err(Error::PreconditionViolated(format!(
                "need 0 < delta < r/100, got delta = {}, r = {}",
                p.delta, p.r
            )));
        }
        let gap = p.r_tilde - k.sub(f)?.sup_norm();
        if !(p.r > 0.0 && p.r < gap) {
            return Err(Error::PreconditionViolated(format!(
                "need 0 < r < r_tilde - ||k - f|| = {gap}, got r = {}",
                p.r
            )));
        }
        if p.n_cut < 1 {
            return Err(Error::PreconditionViolated(format!("cut N must be >= 1, got {}", p.n_cut)));
        }
        Ok(())
    }
}

/// `Gamma_g`, described by a nonnegative `g` sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    g: GridFunction,
}

impl GammaSet {
    pub fn new(g: GridFunction) -> Result<Self> {
        let grid = g.grid();
        if let Some((m, _)) = grid.integer_points().find(|&(_, i)| {
            let z = g.value(i);
            z.im != 0.0 || z.re < 0.0
        }) {
            return Err(Error::PreconditionViolated(format!("g({m}) is not a nonnegative real")));
        }
        Ok(GammaSet { g })
    }

    pub fn g(&self) -> &GridFunction {
        &self.g
    }

    pub fn contains(&self, f: &GridFunction) -> Result<bool> {
        gamma_membership(f, self)
    }
}

fn level(g: &GridFunction, i: usize) -> f64 {
    g.value(i).norm()
}

/// Relative slack for `|f(m)| >= g(m)`; the constructions land on the
/// boundary up to a rounding error.
pub const MEMBERSHIP_RTOL: f64 = 1e-12;

/// `|f(m)| >= g(m)` at every integer grid point.
pub fn gamma_membership(f: &GridFunction, set: &GammaSet) -> Result<bool> {
    let g = &set.g;
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(g.grid().integer_points().all(|(_, i)| f.value(i).norm() >= level(g, i) * (1.0 - MEMBERSHIP_RTOL)))
}

/// Smallest integer `N >= 1` with `|k|, |f|, g/beta < r/6` at all grid points `|t| >= N`.
pub fn choose_n(f: &GridFunction, k: &GridFunction, g: &GridFunction, beta: f64, r: f64) -> Result<i64> {
    let grid = f.grid();
    if k.grid() != grid || g.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let bound = r / 6.0;
    // scan from the edge inward for the last offending point
    let worst = (0..grid.len())
        .filter(|&i| {
            f.value(i).norm() >= bound || k.value(i).norm() >= bound || level(g, i) / beta >= bound
        })
        .map(|i| grid.point(i).abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let n = if worst == f64::NEG_INFINITY {
        1
    } else {
        // every |t| >= N must lie strictly beyond the offending point
        (worst.floor() as i64 + 1).max(1)
    };
    if n > grid.max_integer() {
        return Err(Error::NoValidN);
    }
    Ok(n)
}

/// `g + delta` on `[-N, N]`, `g / beta` outside `[-N-1, N+1]`, affine in between.
pub fn build_h(g: &GridFunction, n: i64, delta: f64, beta: f64) -> GridFunction {
    let grid = g.grid();
    let nf = n as f64;
    let at = |t: f64| g.interpolate(t).norm();
    let left_end = at(-nf - 1.0) / beta;
    let right_end = at(nf + 1.0) / beta;
    let (left_in, right_in) = (at(-nf) + delta, at(nf) + delta);
    GridFunction::from_real_fn(grid, |t| {
        if t.abs() <= nf {
            at(t) + delta
        } else if t.abs() >= nf + 1.0 {
            at(t) / beta
        } else if t > 0.0 {
            left_in_bridge(right_in, right_end, t - nf)
        } else {
            left_in_bridge(left_end, left_in, t + nf + 1.0)
        }
    })
}

/// Affine path from `a` (at `s = 0`) to `b` (at `s = 1`).
fn left_in_bridge(a: f64, b: f64, s: f64) -> f64 {
    a + s * (b - a)
}

fn phase(z: Complex64) -> Complex64 {
    if z == ZERO {
        ONE
    } else {
        z / z.norm()
    }
}

/// Piecewise-linear interpolation of `nodes(m)` between consecutive integers.
fn integer_interp(t: f64, node: impl Fn(i64) -> Complex64) -> Complex64 {
    let m0 = t.floor();
    let s = t - m0;
    let a = node(m0 as i64);
    if s == 0.0 {
        return a;
    }
    a + (node(m0 as i64 + 1) - a) * s
}

/// The raised function `E`: `k + delta * eta~` on `[-N, N]`, `h` outside
/// `[-N-1, N+1]`, affine bridges; `eta~` interpolates the phases of `k` at the
/// integers of `[-N, N]`. All three contracts are checked before returning.
pub fn build_script_e(
    k: &GridFunction,
    f: &GridFunction,
    h: &GridFunction,
    g: &GridFunction,
    params: &PorosityParams,
) -> Result<GridFunction> {
    let grid = k.grid();
    if [f.grid(), h.grid(), g.grid()].iter().any(|x| *x != grid) {
        return Err(Error::GridMismatch);
    }
    let n = params.n_cut;
    let nf = n as f64;
    let delta = params.delta;
    let eta = |m: i64| phase(k.interpolate(m as f64));
    let eta_t = |t: f64| integer_interp(t, |m| eta(m.clamp(-n, n)));
    let inner_end = |t: f64| k.interpolate(t) + eta_t(t) * delta;
    let h_at = |t: f64| Complex64::new(h.interpolate(t).re, 0.0);
    let e = GridFunction::from_fn(grid, |t| {
        if t.abs() <= nf {
            k.interpolate(t) + eta_t(t) * delta
        } else if t.abs() >= nf + 1.0 {
            h_at(t)
        } else if t > 0.0 {
            let a = inner_end(nf);
            a + (h_at(nf + 1.0) - a) * (t - nf)
        } else {
            let b = h_at(-nf - 1.0);
            b + (inner_end(-nf) - b) * (t + nf + 1.0)
        }
    });
    for m in -n..=n {
        if let Some(i) = grid.index_of(m as f64) {
            let want = k.value(i).norm() + delta;
            let got = e.value(i).norm();
            if (got - want).abs() > 1e-12 * want.max(1.0) {
                return Err(Error::ContractViolated(format!("|E({m})| = {got}, expected |k({m})| + delta = {want}")));
            }
        }
    }
    let h_set = GammaSet { g: h.clone() };
    if !gamma_membership(&e, &h_set)? {
        return Err(Error::ContractViolated("E is not in Gamma_h".into()));
    }
    let dist = e.sub(f)?.sup_norm();
    if dist >= params.r_tilde {
        return Err(Error::ContractViolated(format!(
            "||E - f|| = {dist} is not below r_tilde = {}",
            params.r_tilde
        )));
    }
    Ok(e)
}

/// The refill `gamma`: `v` on `[-N, N]`, `v + beta |u - v| Theta~` outside
/// `[-N-1, N+1]`, with bridges; `Theta~` interpolates the phases of `v` at the
/// outer integers. Checks `||gamma - v|| <= beta ||u - v||` and `gamma in Gamma_g`.
pub fn build_gamma(
    u: &GridFunction,
    v: &GridFunction,
    f: &GridFunction,
    g: &GridFunction,
    h: &GridFunction,
    params: &PorosityParams,
) -> Result<GridFunction> {
    let grid = u.grid();
    if [v.grid(), f.grid(), g.grid(), h.grid()].iter().any(|x| *x != grid) {
        return Err(Error::GridMismatch);
    }
    if !gamma_membership(u, &GammaSet { g: h.clone() })? {
        return Err(Error::PreconditionViolated("u is not in Gamma_h".into()));
    }
    let uv = u.sub(v)?.sup_norm();
    let r_prime = params.delta.min(params.lambda * (params.r_tilde - f.sub(u)?.sup_norm()));
    if uv > r_prime {
        return Err(Error::PreconditionViolated(format!(
            "||u - v|| = {uv} exceeds r' = min(delta, lambda (r_tilde - ||f - u||)) = {r_prime}"
        )));
    }
    let n = params.n_cut;
    let nf = n as f64;
    let beta = params.beta;
    let last = grid.max_integer();
    // phases at the outer integers, held constant past the last grid integer
    let theta = |m: i64| phase(v.interpolate(m.clamp(-last, last) as f64));
    let theta_t = |t: f64| integer_interp(t, theta);
    let gap = |t: f64| (u.interpolate(t) - v.interpolate(t)).norm();
    let gamma = GridFunction::from_fn(grid, |t| {
        let vt = v.interpolate(t);
        if t.abs() <= nf {
            vt
        } else if t.abs() >= nf + 1.0 {
            vt + theta_t(t) * (beta * gap(t))
        } else if t > 0.0 {
            vt + theta(n + 1) * ((t - nf) * beta * gap(nf + 1.0))
        } else {
            vt - theta(-n - 1) * ((t + nf) * beta * gap(-nf - 1.0))
        }
    });
    let moved = gamma.sub(v)?.sup_norm();
    if moved > beta * uv * (1.0 + 1e-12) {
        return Err(Error::ContractViolated(format!(
            "||gamma - v|| = {moved} exceeds beta ||u - v|| = {}",
            beta * uv
        )));
    }
    if !gamma_membership(&gamma, &GammaSet::new(g.clone())?)? {
        return Err(Error::ContractViolated("gamma is not in Gamma_g".into()));
    }
    Ok(gamma)
}

/// Raises `|f(m)|` to `g(m)` at each integer grid point where it falls short,
/// keeping the phase of `f(m)`; other samples are untouched.
pub fn project_to_gamma(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let mut values = f.values().to_vec();
    for (_, i) in f.grid().integer_points() {
        let need = level(g, i);
        if values[i].norm() < need {
            values[i] = phase(values[i]) * need;
        }
    }
    GridFunction::new(f.grid(), values)
}

/// Default proof inputs for `(f, g)`: `k` the projection of `f` into
/// `Gamma_g` and `r = (r_tilde - ||k - f||) / 2`.
pub fn default_inputs(f: &GridFunction, g: &GridFunction, r_tilde: f64) -> Result<(GridFunction, f64)> {
    let k = project_to_gamma(f, g)?;
    let r = (r_tilde - k.sub(f)?.sup_norm()) / 2.0;
    Ok((k, r))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub seed: u64,
    pub y_found: bool,
    pub d: f64,
    pub inner_hits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeOutcome {
    pub witness: Option<GridFunction>,
    pub records: Vec<ProbeRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeBudget {
    pub outer: usize,
    pub inner: usize,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        ProbeBudget { outer: 256, inner: 256 }
    }
}

/// Random perturbation with sup norm exactly `size`: either independent values
/// at the integers (linear in between) or a single tent.
fn perturbation(grid: Grid, rng: &mut ChaCha8Rng, size: f64) -> GridFunction {
    let p = if rng.gen_bool(0.5) {
        let last = grid.max_integer();
        let nodes: Vec<Complex64> = (-last..=last + 1)
            .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        GridFunction::from_fn(grid, |t| integer_interp(t, |m| nodes[(m.clamp(-last, last + 1) + last) as usize]))
    } else {
        let c = rng.gen_range(-grid.half_width()..grid.half_width());
        let w = rng.gen_range(0.25..4.0);
        GridFunction::bump(grid, c, w, 1.0).scale(Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
    };
    let s = p.sup_norm();
    if s == 0.0 {
        return GridFunction::from_real_fn(grid, |t| if t == 0.0 { size } else { 0.0 });
    }
    p.scale(Complex64::new(size / s, 0.0))
}

/// Looks for `y` in `B(x, delta) \ {x}` whose ball `B(y, lambda ||x - y||)`
/// contains no sampled member of `E`.
///
/// Inner samples are `y` itself, the phase-aligned push
/// `y + kappa |x - y| phase(y)` with `kappa` just below `lambda`, and random
/// points of the ball. A `None` witness is evidence, not proof, that `E` is not
/// porous at `x`.
pub fn porosity_probe(
    member: &(dyn Fn(&GridFunction) -> bool + Sync),
    x: &GridFunction,
    lambda: f64,
    delta: f64,
    budget: ProbeBudget,
    seed: u64,
) -> ProbeOutcome {
    assert!(lambda > 0.0 && lambda < 1.0 && delta > 0.0 && budget.outer >= 1);
    let grid = x.grid();
    let mut root = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..budget.outer).map(|_| root.gen()).collect();
    let kappa = lambda * (1.0 - 1e-6);
    let results: Vec<(ProbeRecord, GridFunction)> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let d = delta * rng.gen_range(0.05..1.0);
            let y = x.add(&perturbation(grid, &mut rng, d)).expect("same grid");
            let diff: Vec<f64> = (0..grid.len()).map(|i| (x.value(i) - y.value(i)).norm()).collect();
            let push = GridFunction::new(
                grid,
                (0..grid.len()).map(|i| y.value(i) + phase(y.value(i)) * (kappa * diff[i])).collect(),
            )
            .expect("finite");
            let mut hits = usize::from(member(&y)) + usize::from(member(&push));
            for _ in 0..budget.inner {
                let rad = lambda * d * rng.gen_range(0.0..1.0);
                let z = y.add(&perturbation(grid, &mut rng, rad)).expect("same grid");
                hits += usize::from(member(&z));
            }
            (
                ProbeRecord {
                    seed: s,
                    y_found: hits == 0,
                    d,
                    inner_hits: hits,
                },
                y,
            )
        })
        .collect();
    let witness = results.iter().find(|(r, _)| r.y_found).map(|(_, y)| y.clone());
    ProbeOutcome {
        witness,
        records: results.into_iter().map(|(r, _)| r).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorollaryG {
    pub gamma: GammaSet,
    /// Node values `1 / b_n(n)`, `n = 1..=L`.
    pub nodes: Vec<f64>,
    pub warning: Option<String>,
}

/// `g` through `(n, 1 / prod_{k=1}^{n} w(alpha^{-k} n))`, `t * g(1)` on `[0, 1]`
/// and `0` for `t <= 0`.
pub fn corollary_g(op: &CompositionOperator, grid: Grid) -> CorollaryG {
    let last = grid.max_integer();
    let nodes: Vec<f64> = (1..=last)
        .map(|n| op.backward_product(n as u64, n as f64).recip().value())
        .collect();
    let node = |m: i64| if m <= 0 { 0.0 } else { nodes[(m.min(last) - 1) as usize] };
    let g = GridFunction::from_real_fn(grid, |t| {
        if t <= 0.0 {
            0.0
        } else {
            integer_interp(t, |m| Complex64::new(node(m), 0.0)).re
        }
    });
    let tail = *nodes.last().unwrap_or(&0.0);
    let warning = (tail > 1e-6).then(|| {
        format!("weight products do not decay: last node value {tail:e} at n = {last} exceeds 1e-6")
    });
    CorollaryG {
        gamma: GammaSet { g },
        nodes,
        warning,
    }
}

/// `min_{1 <= n <= horizon} ||T^n f||_inf` for `f` in `Gamma_g`, using
/// `||T^n f||_inf = max_x |f(x)| b_n(x)`.
pub fn corollary_check(op: &CompositionOperator, set: &GammaSet, f: &GridFunction, horizon: u64) -> Result<f64> {
    if !gamma_membership(f, set)? {
        return Err(Error::PreconditionViolated("f is not in Gamma_g".into()));
    }
    if horizon as i64 > f.grid().max_integer() {
        return Err(Error::PreconditionViolated(format!(
            "grid holds integers up to {}, horizon is {horizon}",
            f.grid().max_integer()
        )));
    }
    let grid = f.grid();
    let support: Vec<usize> = f.support().collect();
    if support.is_empty() {
        return Ok(0.0);
    }
    let sites: Vec<f64> = support.iter().map(|&i| grid.point(i)).collect();
    let mut sweep = FactorSweep::new(op, &[], &sites);
    let mut best = f64::INFINITY;
    for _ in 0..horizon {
        sweep.advance();
        let peak = sweep
            .backward()
            .zip(&support)
            .map(|(b, &i)| b.times(f.value(i).norm()))
            .reduce(|a, b| if b > a { b } else { a })
            .unwrap_or(ScaledProduct::ONE);
        best = best.min(peak.value());
    }
    Ok(best)
}

/// Random instance of the refilling construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub f: GridFunction,
    pub k: GridFunction,
    pub g: GridFunction,
    pub params: PorosityParams,
}

/// Sampled `amplitude * exp(-rate |t|)`, cut to zero at the grid edge.
pub fn exp_decay(grid: Grid, amplitude: f64, rate: f64) -> GridFunction {
    let l = grid.half_width();
    GridFunction::from_real_fn(grid, |t| if t.abs() >= l { 0.0 } else { amplitude * (-rate * t.abs()).exp() })
}

/// A seeded scene satisfying the construction's preconditions.
pub fn random_scene(grid: Grid, seed: u64) -> Result<Scene> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = exp_decay(grid, rng.gen_range(0.2..2.0), rng.gen_range(0.3..2.0));
    let l = grid.half_width() / 3.0;
    let mut f = GridFunction::zeros(grid);
    for _ in 0..rng.gen_range(1..4) {
        let b = GridFunction::bump(grid, rng.gen_range(-l..l), rng.gen_range(0.5..3.0), rng.gen_range(0.1..2.0))
            .scale(Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)));
        f = f.add(&b)?;
    }
    let r_tilde_extra = rng.gen_range(0.1..1.0);
    let r_tilde = project_to_gamma(&f, &g)?.sub(&f)?.sup_norm() + r_tilde_extra;
    let (k, r) = default_inputs(&f, &g, r_tilde)?;
    let lambda = rng.gen_range(0.05..=0.5);
    let beta = lambda * rng.gen_range(0.1..0.9);
    let delta = r / 100.0 * rng.gen_range(0.05..0.95);
    let n_cut = choose_n(&f, &k, &g, beta, r)?;
    let params = PorosityParams {
        lambda,
        beta,
        delta,
        r_tilde,
        r,
        n_cut,
    };
    params.validate(&k, &f)?;
    Ok(Scene { f, k, g, params })
}

/// A perturbation of `u` with sup norm `fraction * r'` for `build_gamma`.
pub fn random_partner(scene: &Scene, u: &GridFunction, seed: u64, fraction: f64) -> Result<GridFunction> {
    let p = &scene.params;
    let r_prime = p.delta.min(p.lambda * (p.r_tilde - scene.f.sub(u)?.sup_norm()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    u.add(&perturbation(u.grid(), &mut rng, fraction * r_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{Homeo, Weight};

    fn grid() -> Grid {
        Grid::uniform(16, 4)
    }

    fn zero() -> GridFunction {
        GridFunction::zeros(grid())
    }

    #[test]
    fn membership_cases() {
        let g = GammaSet::new(exp_decay(grid(), 1.0, 0.5)).unwrap();
        assert!(gamma_membership(&zero(), &GammaSet::new(zero()).unwrap()).unwrap());
        assert!(gamma_membership(g.g(), &g).unwrap());
        let i0 = grid().index_of(0.0).unwrap();
        let mut v = g.g().values().to_vec();
        v[i0] -= 1e-9;
        // within rounding of the boundary still counts
        let mut w = g.g().values().to_vec();
        w[i0] *= 1.0 - 1e-15;
        assert!(gamma_membership(&GridFunction::new(grid(), w).unwrap(), &g).unwrap());
        let below = GridFunction::new(grid(), v).unwrap();
        assert!(!gamma_membership(&below, &g).unwrap());
        let other = GridFunction::zeros(Grid::uniform(8, 4));
        assert_eq!(gamma_membership(&other, &g), Err(Error::GridMismatch));
    }

    #[test]
    fn choose_n_examples() {
        assert_eq!(choose_n(&zero(), &zero(), &zero(), 0.25, 1.0).unwrap(), 1);
        let g = exp_decay(grid(), 1.0, 1.0);
        assert_eq!(choose_n(&zero(), &zero(), &g, 0.25, 1.0).unwrap(), 4);
        let plateau = GridFunction::from_real_fn(grid(), |t| 10.0 * (1.0 - (t.abs() - 2.0).max(0.0) / 0.25).clamp(0.0, 1.0));
        assert_eq!(choose_n(&zero(), &plateau, &zero(), 0.25, 1.0).unwrap(), 3);
        let wide = GridFunction::from_real_fn(grid(), |_| 1.0);
        assert_eq!(choose_n(&wide, &zero(), &zero(), 0.25, 1.0), Err(Error::NoValidN));
    }

    #[test]
    fn build_h_examples() {
        let d = 0.005;
        let h = build_h(&zero(), 2, d, 0.25);
        let want = GridFunction::from_real_fn(grid(), |t| {
            if t.abs() <= 2.0 {
                d
            } else if t.abs() >= 3.0 {
                0.0
            } else {
                d * (3.0 - t.abs())
            }
        });
        for (a, b) in h.values().iter().zip(want.values()) {
            assert!((a - b).norm() < 1e-15);
        }
        let c = 0.7;
        let flat = GridFunction::from_real_fn(grid(), |_| c);
        let h = build_h(&flat, 1, c, 0.5);
        assert!(h.values().iter().all(|z| (z.re - 2.0 * c).abs() < 1e-15));
        let g = exp_decay(grid(), 1.3, 0.4);
        let (delta, beta) = (0.01, 0.3);
        let h = build_h(&g, 3, delta, beta);
        for (_, i) in grid().integer_points() {
            let gm = g.value(i).re;
            assert!(h.value(i).re >= gm + delta.min((1.0 / beta - 1.0) * gm) - 1e-15);
        }
    }

    fn params(n: i64, delta: f64) -> PorosityParams {
        PorosityParams {
            lambda: 0.5,
            beta: 0.25,
            delta,
            r_tilde: 10.0,
            r: 1.0,
            n_cut: n,
        }
    }

    #[test]
    fn script_e_examples() {
        let p = params(3, 0.005);
        let k = GridFunction::bump(grid(), 0.0, 2.5, 1.0);
        let g = zero();
        let h = build_h(&g, 3, p.delta, p.beta);
        let e = build_script_e(&k, &k, &h, &g, &p).unwrap();
        for m in -3..=3 {
            let i = grid().index_of(m as f64).unwrap();
            assert!((e.value(i).re - (k.value(i).re + p.delta)).abs() < 1e-15);
        }
        let e0 = build_script_e(&zero(), &zero(), &h, &g, &p).unwrap();
        for i in grid().indices_in(-3.0, 3.0) {
            assert!((e0.value(i) - Complex64::new(p.delta, 0.0)).norm() < 1e-15);
        }
        let neg = GridFunction::from_real_fn(grid(), |t| if t == 0.0 { -1.0 } else { 0.0 });
        let e = build_script_e(&neg, &neg, &h, &g, &p).unwrap();
        let i0 = grid().index_of(0.0).unwrap();
        assert_eq!(e.value(i0), Complex64::new(-1.0 - p.delta, 0.0));
    }

    #[test]
    fn gamma_examples() {
        let p = params(2, 0.01);
        let g = exp_decay(grid(), 0.05, 1.0);
        let h = build_h(&g, 2, p.delta, p.beta);
        let u = h.clone();
        let same = build_gamma(&u, &u, &u, &g, &h, &p).unwrap();
        assert_eq!(same, u);
        // v = u - r' pushed back up by beta (u - v) beyond N
        let v = u.map_values(|_, z| z - p.delta * 0.5);
        let v = v.map_values(|t, z| if z.re < 0.0 && t.abs() > 3.0 { ZERO } else { z });
        let gamma = build_gamma(&u, &v, &u, &g, &h, &p).unwrap();
        for (m, i) in grid().integer_points() {
            assert!(gamma.value(i).norm() >= g.value(i).re, "m = {m}");
        }
        let far = u.map_values(|_, z| z + 1.0);
        assert!(matches!(build_gamma(&u, &far, &u, &g, &h, &p), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn random_scenes_meet_contracts() {
        for seed in 0..10 {
            let s = random_scene(grid(), seed).unwrap();
            let h = build_h(&s.g, s.params.n_cut, s.params.delta, s.params.beta);
            let e = build_script_e(&s.k, &s.f, &h, &s.g, &s.params).unwrap();
            let v = random_partner(&s, &e, seed + 100, 0.9).unwrap();
            build_gamma(&e, &v, &s.f, &s.g, &h, &s.params).unwrap();
        }
    }

    #[test]
    fn probe_cases() {
        let x = zero();
        let all = |_: &GridFunction| true;
        let out = porosity_probe(&all, &x, 0.5, 0.1, ProbeBudget { outer: 8, inner: 8 }, 1);
        assert!(out.witness.is_none());
        assert!(out.records.iter().all(|r| r.inner_hits == 10));
        let origin = |z: &GridFunction| z.is_zero();
        let out = porosity_probe(&origin, &x, 0.5, 0.1, ProbeBudget { outer: 8, inner: 8 }, 1);
        let y = out.witness.unwrap();
        assert!(!y.is_zero() && y.sup_norm() < 0.1);
        let again = porosity_probe(&origin, &x, 0.5, 0.1, ProbeBudget { outer: 8, inner: 8 }, 1);
        assert_eq!(again.records, out.records);
    }

    #[test]
    fn probe_on_gamma_set() {
        let lambda = 0.5;
        let g = GammaSet::new(exp_decay(grid(), 1.0, 0.5)).unwrap();
        let x = g.g().scale(Complex64::new(1.0 / (0.9 * lambda), 0.0));
        let member = |z: &GridFunction| gamma_membership(z, &g).unwrap();
        for seed in 0..5 {
            for delta in [0.1, 0.01] {
                let out = porosity_probe(&member, &x, lambda, delta, ProbeBudget { outer: 16, inner: 4 }, seed);
                assert!(out.witness.is_none());
            }
        }
    }

    fn doubling() -> CompositionOperator {
        CompositionOperator::new(Homeo::translation(-1.0).unwrap(), Weight::constant(2.0)).unwrap()
    }

    #[test]
    fn corollary_nodes() {
        let wide = Grid::uniform(32, 4);
        let c = corollary_g(&doubling(), wide);
        let g = c.gamma.g();
        let at = |t: f64| g.value(wide.index_of(t).unwrap()).re;
        assert_eq!((at(1.0), at(3.0), at(0.5), at(-2.0)), (0.5, 0.125, 0.25, 0.0));
        assert!(c.warning.is_none());
        let one = CompositionOperator::new(Homeo::translation(-1.0).unwrap(), Weight::constant(1.0)).unwrap();
        assert!(corollary_g(&one, grid()).warning.is_some());
        let ex38 = CompositionOperator::new(Homeo::translation(-1.0).unwrap(), Weight::harmonic_steps(0.5)).unwrap();
        let c = corollary_g(&ex38, grid());
        assert_eq!(c.nodes[4], 32.0);
        assert!(c.warning.is_some());
    }

    #[test]
    fn corollary_check_cases() {
        let grid = Grid::uniform(64, 4);
        let c = corollary_g(&doubling(), grid);
        let f = c.gamma.g().clone();
        assert_eq!(corollary_check(&doubling(), &c.gamma, &f, 60).unwrap(), 1.0);
        let f10 = f.scale(Complex64::new(10.0, 0.0));
        assert!(corollary_check(&doubling(), &c.gamma, &f10, 60).unwrap() >= 10.0);
        let i = grid.index_of(5.0).unwrap();
        let mut v = f.values().to_vec();
        v[i] *= 0.5;
        let bad = GridFunction::new(grid, v).unwrap();
        assert!(matches!(
            corollary_check(&doubling(), &c.gamma, &bad, 60),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(corollary_check(&doubling(), &c.gamma, &f, 65).is_err());
    }
}
