//! Finitely atomic complex measures with the total variation norm, and the
//! adjoints `T*`, `S*` acting on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria::{evaluate_on_sites, CompactWindow, CriterionKind, CriterionVerdict, Sites, TrimPolicy};
use crate::error::{Error, Result};
use crate::funcspace::GridFunction;
use crate::operator::CompositionOperator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct AtomSpec {
    x: f64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureSpec {
    atoms: Vec<AtomSpec>,
}

/// `sum c_i delta_{x_i}` with strictly increasing `x_i` and nonzero `c_i`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub struct AtomicMeasure {
    atoms: Vec<(f64, Complex64)>,
}

impl TryFrom<MeasureSpec> for AtomicMeasure {
    type Error = Error;

    fn try_from(spec: MeasureSpec) -> Result<Self> {
        AtomicMeasure::new(spec.atoms.into_iter().map(|a| (a.x, Complex64::new(a.re, a.im))).collect())
    }
}

impl From<AtomicMeasure> for MeasureSpec {
    fn from(m: AtomicMeasure) -> Self {
        MeasureSpec {
            atoms: m.atoms.into_iter().map(|(x, c)| AtomSpec { x, re: c.re, im: c.im }).collect(),
        }
    }
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(f64, Complex64)>) -> Result<Self> {
        if let Some(&(x, c)) = atoms.iter().find(|(x, c)| !x.is_finite() || !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::PreconditionViolated(format!("non-finite atom {c} at {x}")));
        }
        Ok(Self::canonical(atoms))
    }

    fn canonical(mut atoms: Vec<(f64, Complex64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, Complex64)> = Vec::with_capacity(atoms.len());
        for (x, c) in atoms {
            match out.last_mut() {
                Some((y, d)) if *y == x => *d += c,
                _ => out.push((x, c)),
            }
        }
        out.retain(|(_, c)| c.re != 0.0 || c.im != 0.0);
        AtomicMeasure { atoms: out }
    }

    pub fn zero() -> Self {
        AtomicMeasure::default()
    }

    pub fn dirac(x: f64) -> Self {
        Self::canonical(vec![(x, Complex64::new(1.0, 0.0))])
    }

    pub fn atoms(&self) -> &[(f64, Complex64)] {
        &self.atoms
    }

    pub fn locations(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::canonical(self.atoms.iter().map(|&(x, c)| (x, c * s)).collect())
    }

    pub fn add(&self, other: &AtomicMeasure) -> Self {
        Self::canonical(self.atoms.iter().chain(&other.atoms).copied().collect())
    }

    pub fn sub(&self, other: &AtomicMeasure) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Drops the atoms located at any of `xs`.
    pub fn without(&self, xs: &[f64]) -> Self {
        AtomicMeasure {
            atoms: self.atoms.iter().filter(|(x, _)| !xs.contains(x)).copied().collect(),
        }
    }

    /// `|mu|(A)` for `A = {t : keep(t)}`.
    pub fn variation_on(&self, keep: impl Fn(f64) -> bool) -> f64 {
        self.atoms.iter().filter(|(x, _)| keep(*x)).map(|(_, c)| c.norm()).sum()
    }

    /// `<f, mu> = sum c_i f(x_i)`, with `f` interpolated on its grid.
    pub fn pair(&self, f: &GridFunction) -> Complex64 {
        self.atoms.iter().map(|&(x, c)| c * f.interpolate(x)).sum()
    }
}

pub fn tv_norm(mu: &AtomicMeasure) -> f64 {
    mu.atoms.iter().map(|(_, c)| c.norm()).sum()
}

/// `T* delta_x = w(x) delta_{alpha(x)}`.
pub fn adjoint_t(op: &CompositionOperator, mu: &AtomicMeasure) -> AtomicMeasure {
    adjoint_tn(op, mu, 1)
}

/// `T*^n delta_x = a_n(x) delta_{alpha^n(x)}`.
pub fn adjoint_tn(op: &CompositionOperator, mu: &AtomicMeasure, n: u64) -> AtomicMeasure {
    if n == 0 {
        return mu.clone();
    }
    AtomicMeasure::canonical(
        mu.atoms
            .iter()
            .map(|&(x, c)| (op.alpha().iterate(x, n as i64), c * op.forward_product(n, x).value()))
            .collect(),
    )
}

/// `S*^n delta_x = delta_{alpha^{-n}(x)} / b_n(x)`.
pub fn adjoint_sn(op: &CompositionOperator, mu: &AtomicMeasure, n: u64) -> AtomicMeasure {
    if n == 0 {
        return mu.clone();
    }
    AtomicMeasure::canonical(
        mu.atoms
            .iter()
            .map(|&(x, c)| (op.alpha().iterate(x, -(n as i64)), c * op.backward_product(n, x).recip().value()))
            .collect(),
    )
}

/// `|<T f, mu> - <f, T* mu>| <= tol`. Atoms of `mu` must sit on grid points of `f`.
pub fn duality_check(op: &CompositionOperator, f: &GridFunction, mu: &AtomicMeasure, tol: f64) -> Result<bool> {
    let grid = f.grid();
    if let Some(&(x, _)) = mu.atoms.iter().find(|(x, _)| grid.index_of(*x).is_none()) {
        return Err(Error::PreconditionViolated(format!("atom at {x} is not a grid point")));
    }
    let tf = op.apply_t(f)?;
    let lhs = mu.pair(&tf);
    let rhs: Complex64 = mu
        .atoms
        .iter()
        .map(|&(x, c)| c * op.weight().eval(x) * f.interpolate(op.alpha().forward(x)))
        .sum();
    let pushed = adjoint_t(op, mu).pair(f);
    Ok((lhs - rhs).norm() <= tol && (lhs - pushed).norm() <= tol)
}

fn check_inside(mu: &AtomicMeasure, window: &CompactWindow) -> Result<()> {
    let m = window.half_width();
    match mu.atoms.iter().find(|(x, _)| x.abs() > m) {
        Some(&(x, _)) => Err(Error::SupportOutsideK(x)),
        None => Ok(()),
    }
}

/// Adjoint criterion with `a_n` ranging over the atoms of `mu` and `1/b_n`
/// over the atoms of `nu`. The trim report's `mass` bounds the removed
/// variation by the largest atom weight per removed atom.
#[allow(clippy::too_many_arguments)]
pub fn adjoint_criterion(
    kind: CriterionKind,
    op: &CompositionOperator,
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    window: &CompactWindow,
    horizon: u64,
    tol: f64,
    trim: &TrimPolicy,
) -> Result<CriterionVerdict> {
    if !kind.is_adjoint() {
        return Err(Error::PreconditionViolated(format!("{kind} is not an adjoint criterion")));
    }
    check_inside(mu, window)?;
    check_inside(nu, window)?;
    if mu.is_zero() || nu.is_zero() {
        return Err(Error::ZeroVector);
    }
    let heaviest = mu.atoms.iter().chain(&nu.atoms).map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let sites = Sites {
        forward: mu.locations(),
        backward: nu.locations(),
        cell: heaviest,
    };
    Ok(evaluate_on_sites(kind, op, &sites, horizon, tol, trim))
}

/// Atom locations removed from `mu` and `nu` before building an approximant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AtomTrim {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureApproximant {
    pub eta: AtomicMeasure,
    pub lambda: f64,
    pub n: u64,
}

/// `eta = mu~ + c S*^n nu~`, `lambda = 1/c`, `c = (||T*^n mu~|| / ||S*^n nu~||)^{1/2}`.
pub fn measure_approximant(
    op: &CompositionOperator,
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    n: u64,
    trim: &AtomTrim,
) -> Result<MeasureApproximant> {
    let mu_t = mu.without(&trim.mu);
    let nu_t = nu.without(&trim.nu);
    if mu_t.is_zero() {
        return Err(Error::Degenerate("mu is trimmed to zero"));
    }
    if nu_t.is_zero() {
        return Err(Error::Degenerate("nu is trimmed to zero"));
    }
    let tn = tv_norm(&adjoint_tn(op, &mu_t, n));
    let s_nu = adjoint_sn(op, &nu_t, n);
    let sn = tv_norm(&s_nu);
    if tn == 0.0 || sn == 0.0 || !tn.is_finite() || !sn.is_finite() {
        return Err(Error::Degenerate("an orbit leg vanished or overflowed"));
    }
    let c = (tn / sn).sqrt();
    Ok(MeasureApproximant {
        eta: mu_t.add(&s_nu.scale(Complex64::new(c, 0.0))),
        lambda: (sn / tn).sqrt(),
        n,
    })
}

/// `(||eta - mu||_TV, ||lambda T*^n eta - nu||_TV)`.
pub fn measure_errors(op: &CompositionOperator, ap: &MeasureApproximant, mu: &AtomicMeasure, nu: &AtomicMeasure) -> (f64, f64) {
    let image = adjoint_tn(op, &ap.eta, ap.n).scale(Complex64::new(ap.lambda, 0.0));
    (tv_norm(&ap.eta.sub(mu)), tv_norm(&image.sub(nu)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{Grid, Homeo, PiecewiseMap, Weight};
    use crate::operator::Orientation;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn op(shift: f64, w: Weight) -> CompositionOperator {
        CompositionOperator::new(Homeo::translation(shift).unwrap(), w).unwrap()
    }

    fn ramp(left: f64, right: f64) -> Weight {
        Weight::Map(PiecewiseMap::ramp(-1.0, left, 1.0, right).unwrap())
    }

    #[test]
    fn tv_norm_examples() {
        assert_eq!(tv_norm(&AtomicMeasure::zero()), 0.0);
        let m = AtomicMeasure::new(vec![(0.0, c(1.0, 0.0)), (1.0, c(-1.0, 0.0))]).unwrap();
        assert_eq!(tv_norm(&m), 2.0);
        let merged = AtomicMeasure::new(vec![(0.0, c(3.0, 0.0)), (0.0, c(0.0, -4.0))]).unwrap();
        assert_eq!(merged.atoms().len(), 1);
        assert_eq!(tv_norm(&merged), 5.0);
        let cancel = AtomicMeasure::new(vec![(2.0, c(1.0, 0.0)), (2.0, c(-1.0, 0.0))]).unwrap();
        assert!(cancel.is_zero());
        assert!(AtomicMeasure::new(vec![(f64::NAN, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn json_shape() {
        let m = AtomicMeasure::new(vec![(1.0, c(0.5, -2.0)), (-1.0, c(1.0, 0.0))]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"atoms":[{"x":-1.0,"re":1.0,"im":0.0},{"x":1.0,"re":0.5,"im":-2.0}]}"#);
        let back: AtomicMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn adjoint_examples() {
        let w = Weight::Map(PiecewiseMap::constant(0.75));
        let t = adjoint_t(&op(1.0, w), &AtomicMeasure::dirac(0.0));
        assert_eq!(t.atoms(), &[(1.0, c(0.75, 0.0))]);
        let one = op(1.0, Weight::constant(1.0));
        let m = AtomicMeasure::new(vec![(0.5, c(2.0, 1.0)), (3.0, c(-1.0, 0.0))]).unwrap();
        assert_eq!(adjoint_t(&one, &m), AtomicMeasure::new(vec![(1.5, c(2.0, 1.0)), (4.0, c(-1.0, 0.0))]).unwrap());
        assert!(adjoint_t(&one, &AtomicMeasure::zero()).is_zero());
        let two = op(1.0, Weight::constant(2.0));
        assert_eq!(adjoint_tn(&two, &AtomicMeasure::dirac(0.0), 3).atoms(), &[(3.0, c(8.0, 0.0))]);
        assert_eq!(adjoint_tn(&two, &m, 0), m);
        assert_eq!(adjoint_sn(&two, &m, 0), m);
        let back = adjoint_sn(&two, &adjoint_tn(&two, &AtomicMeasure::dirac(0.25), 7), 7);
        assert_eq!(back, AtomicMeasure::dirac(0.25));
    }

    #[test]
    fn cocycle_multiplier_matches_operator() {
        let o = op(-1.0, ramp(2.0, 1.0));
        for x in [-3.0, -0.5, 0.0, 0.25, 2.0] {
            for n in [1u64, 4, 9] {
                let atom = adjoint_tn(&o, &AtomicMeasure::dirac(x), n).atoms()[0].1;
                assert_eq!(atom.re, o.cocycle(n, x, Orientation::Forward));
            }
        }
    }

    /// The adjoint as a functional on test functions: `(T* mu)(phi) = mu(w phi o alpha)`.
    fn functional_oracle(o: &CompositionOperator, mu: &AtomicMeasure, n: u32, phi: &dyn Fn(f64) -> f64) -> Complex64 {
        if n == 0 {
            return mu.atoms().iter().map(|&(x, c)| c * phi(x)).sum();
        }
        let pulled = |t: f64| o.weight().eval(t) * phi(o.alpha().forward(t));
        functional_oracle(o, mu, n - 1, &pulled)
    }

    #[test]
    fn closed_form_matches_integral_oracle() {
        let o = op(1.0, ramp(2.0, 0.5));
        let mu = AtomicMeasure::new(vec![(-2.0, c(1.0, 0.5)), (0.0, c(-0.25, 0.0)), (0.5, c(0.0, 2.0))]).unwrap();
        for n in 0..=5u64 {
            let closed = adjoint_tn(&o, &mu, n);
            for lo in [-6.0, -1.5, 0.0, 1.0, 2.25] {
                for width in [0.5, 1.0, 3.0, 10.0] {
                    let hi = lo + width;
                    let ind = |t: f64| if (lo..hi).contains(&t) { 1.0 } else { 0.0 };
                    let want = functional_oracle(&o, &mu, n as u32, &ind);
                    let got: Complex64 = closed.atoms().iter().filter(|(x, _)| (lo..hi).contains(x)).map(|a| a.1).sum();
                    assert!((want - got).norm() <= 1e-14 * (1.0 + want.norm()), "n = {n}, [{lo}, {hi})");
                }
            }
        }
    }

    #[test]
    fn duality_examples() {
        let grid = Grid::uniform(8, 4);
        let o = op(1.0, ramp(2.0, 0.5));
        let f = GridFunction::bump(grid, 0.5, 2.0, 1.5);
        assert!(duality_check(&o, &f, &AtomicMeasure::dirac(0.0), 1e-12).unwrap());
        assert!(duality_check(&o, &f, &AtomicMeasure::zero(), 1e-12).unwrap());
        assert!(duality_check(&o, &f, &AtomicMeasure::dirac(0.1), 1e-12).is_err());
    }

    #[test]
    fn adjoint_criterion_examples() {
        let k = CompactWindow::interval(1.0, 4);
        let d = AtomicMeasure::dirac(0.0);
        let first = op(1.0, ramp(2.0, 1.0));
        // the Cesaro quantity is 1.5/n here, so it needs the loose tolerance
        for (kind, tol) in [(CriterionKind::AdjointCesaro, 1e-2), (CriterionKind::AdjointSuper, 1e-6)] {
            let v = adjoint_criterion(kind, &first, &d, &d, &k, 200, tol, &TrimPolicy::OFF).unwrap();
            assert!(v.satisfied(), "{kind}");
        }
        let strict = adjoint_criterion(CriterionKind::AdjointCesaro, &first, &d, &d, &k, 200, 1e-6, &TrimPolicy::OFF).unwrap();
        assert_eq!(strict.q(200), Some(1.5 / 200.0));
        let second = op(-1.0, ramp(0.5, 1.0));
        let sup = adjoint_criterion(CriterionKind::AdjointSuper, &second, &d, &d, &k, 200, 1e-6, &TrimPolicy::OFF).unwrap();
        let ces = adjoint_criterion(CriterionKind::AdjointCesaro, &second, &d, &d, &k, 200, 1e-6, &TrimPolicy::OFF).unwrap();
        assert!(sup.satisfied() && !ces.satisfied());
        let flat = op(1.0, Weight::constant(1.0));
        for kind in [CriterionKind::AdjointCesaro, CriterionKind::AdjointSuper] {
            assert!(!adjoint_criterion(kind, &flat, &d, &d, &k, 200, 1e-6, &TrimPolicy::OFF).unwrap().satisfied());
        }
        let outside = AtomicMeasure::dirac(1.5);
        assert_eq!(
            adjoint_criterion(CriterionKind::AdjointSuper, &first, &outside, &d, &k, 10, 1e-6, &TrimPolicy::OFF),
            Err(Error::SupportOutsideK(1.5))
        );
        assert!(adjoint_criterion(CriterionKind::CesaroC0, &first, &d, &d, &k, 10, 1e-6, &TrimPolicy::OFF).is_err());
    }

    #[test]
    fn approximant_examples() {
        let id = CompositionOperator::new(Homeo::identity(), Weight::constant(1.0)).unwrap();
        let mu = AtomicMeasure::new(vec![(0.0, c(4.0, 0.0))]).unwrap();
        let nu = AtomicMeasure::new(vec![(1.0, c(0.0, 1.0))]).unwrap();
        let ap = measure_approximant(&id, &mu, &nu, 1, &AtomTrim::default()).unwrap();
        assert_eq!(ap.eta, mu.add(&nu.scale(c(2.0, 0.0))));
        assert_eq!(ap.lambda, 0.5);
        let trim = AtomTrim { mu: vec![], nu: vec![1.0] };
        assert!(matches!(measure_approximant(&id, &mu, &nu, 1, &trim), Err(Error::Degenerate(_))));

        let first = op(1.0, ramp(2.0, 1.0));
        let d = AtomicMeasure::dirac(0.0);
        let mut last = f64::INFINITY;
        for n in [5u64, 10, 20, 40] {
            let ap = measure_approximant(&first, &d, &d, n, &AtomTrim::default()).unwrap();
            let (e1, e2) = measure_errors(&first, &ap, &d, &d);
            let worst = e1.max(e2);
            assert!(worst < last);
            last = worst;
        }
        assert!(last < 1e-5);
    }
}
