use crate::operator::{CompositionOperator, Orbit};
use crate::product::ScaledProduct;

struct Track<'a> {
    orbit: Orbit<'a>,
    prod: ScaledProduct,
}

/// Incremental cocycle products over two point sets.
///
/// After `n` calls to [`FactorSweep::advance`], forward sites hold
/// `a_n(t) = prod_{j<n} w(alpha^j t)` and backward sites hold
/// `b_n(t) = prod_{j=1}^{n} w(alpha^{-j} t)`.
pub struct FactorSweep<'a> {
    op: &'a CompositionOperator,
    n: u64,
    fwd: Vec<Track<'a>>,
    bwd: Vec<Track<'a>>,
}

impl<'a> FactorSweep<'a> {
    pub fn new(op: &'a CompositionOperator, forward_sites: &[f64], backward_sites: &[f64]) -> Self {
        let alpha = op.alpha();
        FactorSweep {
            op,
            n: 0,
            fwd: forward_sites
                .iter()
                .map(|&t| Track {
                    orbit: Orbit::new(alpha, t, 0, 1),
                    prod: ScaledProduct::ONE,
                })
                .collect(),
            bwd: backward_sites
                .iter()
                .map(|&t| Track {
                    orbit: Orbit::new(alpha, t, -1, -1),
                    prod: ScaledProduct::ONE,
                })
                .collect(),
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn advance(&mut self) {
        let w = self.op.weight();
        for tr in self.fwd.iter_mut().chain(self.bwd.iter_mut()) {
            let x = tr.orbit.next().expect("orbits are infinite");
            tr.prod.mul_f64(w.eval(x));
        }
        self.n += 1;
    }

    pub fn forward(&self) -> impl Iterator<Item = ScaledProduct> + '_ {
        self.fwd.iter().map(|t| t.prod)
    }

    pub fn backward(&self) -> impl Iterator<Item = ScaledProduct> + '_ {
        self.bwd.iter().map(|t| t.prod)
    }

    /// `sup 1/a_n`.
    pub fn max_inv_forward(&self) -> ScaledProduct {
        max_of(self.forward().map(ScaledProduct::recip))
    }

    /// `sup a_n`.
    pub fn max_forward(&self) -> ScaledProduct {
        max_of(self.forward())
    }

    /// `sup b_n`.
    pub fn max_backward(&self) -> ScaledProduct {
        max_of(self.backward())
    }

    /// `sup 1/b_n`.
    pub fn max_inv_backward(&self) -> ScaledProduct {
        max_of(self.backward().map(ScaledProduct::recip))
    }
}

pub(crate) fn max_of(it: impl Iterator<Item = ScaledProduct>) -> ScaledProduct {
    it.reduce(|a, b| if b > a { b } else { a })
        .expect("criterion sites must be nonempty")
}

pub(crate) fn max2(a: ScaledProduct, b: ScaledProduct) -> ScaledProduct {
    if b > a {
        b
    } else {
        a
    }
}

/// Greedy removal of at most `budget` sites to lower `q(max first, max second)`.
///
/// With `aligned`, index `i` of both lists is the same point and is removed from
/// both. At least one site always remains in each list. Returns the new
/// quantity and the number of removed points.
pub(crate) fn greedy_trim(
    first: &[ScaledProduct],
    second: &[ScaledProduct],
    aligned: bool,
    budget: usize,
    q: impl Fn(ScaledProduct, ScaledProduct) -> ScaledProduct,
) -> (ScaledProduct, usize) {
    let mut on1 = vec![true; first.len()];
    let mut on2 = vec![true; second.len()];
    let argmax = |v: &[ScaledProduct], on: &[bool]| {
        (0..v.len())
            .filter(|&i| on[i])
            .reduce(|a, b| if v[b] > v[a] { b } else { a })
    };
    let sup = |v: &[ScaledProduct], on: &[bool]| max_of((0..v.len()).filter(|&i| on[i]).map(|i| v[i]));
    let mut cur = q(sup(first, &on1), sup(second, &on2));
    let mut removed = 0;
    for _ in 0..budget {
        let mut best: Option<(ScaledProduct, Vec<bool>, Vec<bool>)> = None;
        for pick_first in [true, false] {
            let i = if pick_first { argmax(first, &on1) } else { argmax(second, &on2) };
            let Some(i) = i else { continue };
            let (mut a, mut b) = (on1.clone(), on2.clone());
            if pick_first || aligned {
                a[i] = false;
            }
            if !pick_first || aligned {
                b[i] = false;
            }
            if !a.contains(&true) || !b.contains(&true) {
                continue;
            }
            let qq = q(sup(first, &a), sup(second, &b));
            if qq < cur && best.as_ref().map_or(true, |(bq, _, _)| qq < *bq) {
                best = Some((qq, a, b));
            }
        }
        match best {
            Some((qq, a, b)) => {
                cur = qq;
                on1 = a;
                on2 = b;
                removed += 1;
            }
            None => break,
        }
    }
    (cur, removed)
}
