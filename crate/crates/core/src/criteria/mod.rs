//! Finite-horizon evaluation of the dynamical criteria.
//!
//! Every criterion reduces to a scalar `q(n)` built from the cocycle products
//! `a_n` and `b_n` over a compact window. A criterion holds along a sequence
//! `n_k` when `q(n_k) -> 0`; up to a horizon `N` this is reported as
//! [`Status::Satisfied`] once `q` drops to `tol`, with the record minima of `q`
//! as the witness sequence.

mod sweep;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::funcspace::{Grid, PiecewiseMap};
use crate::operator::{BilateralShift, CompositionOperator, Orbit};
use crate::product::ScaledProduct;

pub use sweep::FactorSweep;
use sweep::{greedy_trim, max2, max_of};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionKind {
    SupercyclicSolid,
    CesaroSolid,
    SupercyclicSegal,
    CesaroSegal,
    SupercyclicC0,
    CesaroC0,
    HypercyclicSolid,
    AdjointSuper,
    AdjointCesaro,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 9] = [
        CriterionKind::SupercyclicSolid,
        CriterionKind::CesaroSolid,
        CriterionKind::SupercyclicSegal,
        CriterionKind::CesaroSegal,
        CriterionKind::SupercyclicC0,
        CriterionKind::CesaroC0,
        CriterionKind::HypercyclicSolid,
        CriterionKind::AdjointSuper,
        CriterionKind::AdjointCesaro,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::SupercyclicSolid => "SUPERCYCLIC_SOLID",
            CriterionKind::CesaroSolid => "CESARO_SOLID",
            CriterionKind::SupercyclicSegal => "SUPERCYCLIC_SEGAL",
            CriterionKind::CesaroSegal => "CESARO_SEGAL",
            CriterionKind::SupercyclicC0 => "SUPERCYCLIC_C0",
            CriterionKind::CesaroC0 => "CESARO_C0",
            CriterionKind::HypercyclicSolid => "HYPERCYCLIC_SOLID",
            CriterionKind::AdjointSuper => "ADJOINT_SUPER",
            CriterionKind::AdjointCesaro => "ADJOINT_CESARO",
        }
    }

    pub fn is_cesaro(self) -> bool {
        matches!(
            self,
            CriterionKind::CesaroSolid | CriterionKind::CesaroSegal | CriterionKind::CesaroC0 | CriterionKind::AdjointCesaro
        )
    }

    pub fn is_adjoint(self) -> bool {
        matches!(self, CriterionKind::AdjointSuper | CriterionKind::AdjointCesaro)
    }

    pub fn needs_segal(self) -> bool {
        matches!(self, CriterionKind::SupercyclicSegal | CriterionKind::CesaroSegal)
    }

    /// Kinds whose exceptional sets may be trimmed. Sup-norm kinds cannot
    /// shrink `||chi_{K \ E}||` by removing points, so they are never trimmed.
    pub fn trimmable(self) -> bool {
        matches!(
            self,
            CriterionKind::SupercyclicSolid
                | CriterionKind::CesaroSolid
                | CriterionKind::HypercyclicSolid
                | CriterionKind::AdjointSuper
                | CriterionKind::AdjointCesaro
        )
    }

    /// `q(n)` from the four window sups:
    /// `inv_a = sup 1/a_n`, `b = sup b_n`, `a = sup a_n`, `inv_b = sup 1/b_n`.
    fn combine(self, n: u64, inv_a: ScaledProduct, b: ScaledProduct, a: ScaledProduct, inv_b: ScaledProduct) -> ScaledProduct {
        let nf = n as f64;
        match self {
            CriterionKind::SupercyclicSolid | CriterionKind::SupercyclicSegal | CriterionKind::SupercyclicC0 => inv_a.mul(b),
            CriterionKind::CesaroSolid | CriterionKind::CesaroSegal | CriterionKind::CesaroC0 => {
                max2(inv_a.times(nf), b.times(1.0 / nf))
            }
            CriterionKind::HypercyclicSolid => max2(inv_a, b),
            CriterionKind::AdjointSuper => a.mul(inv_b),
            CriterionKind::AdjointCesaro => max2(a.times(1.0 / nf), inv_b.times(nf)),
        }
    }
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `tau` and the bound `eps` with `|tau| <= eps < 1` on the window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegalContext {
    pub tau: PiecewiseMap,
    pub epsilon: f64,
    /// Tolerance for `tau o alpha = tau`, checked on `grid`.
    pub invariance_tol: f64,
    pub grid: Grid,
}

/// Sample points of a compact window `[-m, m]` (or an explicit point set).
#[derive(Clone, Debug, PartialEq)]
pub struct CompactWindow {
    half_width: f64,
    points: Vec<f64>,
    cell: f64,
    segal: Option<SegalContext>,
}

impl CompactWindow {
    /// Points `k / per_unit` inside `[-m, m]`.
    pub fn interval(m: f64, per_unit: u32) -> Self {
        assert!(m >= 0.0 && per_unit > 0);
        let k = (m * per_unit as f64 + 1e-9).floor() as i64;
        CompactWindow {
            half_width: m,
            points: (-k..=k).map(|i| i as f64 / per_unit as f64).collect(),
            cell: 1.0 / per_unit as f64,
            segal: None,
        }
    }

    /// The grid points of `[-m, m]`.
    pub fn on_grid(m: f64, grid: &Grid) -> Self {
        Self::interval(m.min(grid.half_width()), grid.per_unit())
    }

    /// An explicit finite point set, each point carrying quadrature weight `cell`.
    pub fn from_points(points: Vec<f64>, cell: f64) -> Self {
        assert!(!points.is_empty(), "window needs at least one point");
        CompactWindow {
            half_width: points.iter().fold(0.0, |m, t| f64::max(m, t.abs())),
            points,
            cell,
            segal: None,
        }
    }

    pub fn single(t: f64) -> Self {
        Self::from_points(vec![t], 1.0)
    }

    pub fn with_segal(mut self, ctx: SegalContext) -> Result<Self> {
        if !(ctx.epsilon > 0.0 && ctx.epsilon < 1.0) {
            return Err(Error::PreconditionViolated(format!("Segal bound must lie in (0, 1), got {}", ctx.epsilon)));
        }
        let worst = self.points.iter().map(|&t| ctx.tau.eval(t).abs()).fold(0.0, f64::max);
        if worst > ctx.epsilon {
            return Err(Error::PreconditionViolated(format!(
                "|tau| reaches {worst} on the window, above the bound {}",
                ctx.epsilon
            )));
        }
        self.segal = Some(ctx);
        Ok(self)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn segal(&self) -> Option<&SegalContext> {
        self.segal.as_ref()
    }
}

/// Trimming of exceptional sets: up to `budget` worst sites removed per `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrimPolicy {
    pub budget: usize,
}

impl TrimPolicy {
    pub const OFF: TrimPolicy = TrimPolicy { budget: 0 };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Satisfied,
    NotSatisfiedUpToHorizon,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub n: u64,
    pub q: f64,
    pub log10_q: f64,
    pub record_min: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPoint {
    pub n: u64,
    pub q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrimStep {
    pub n: u64,
    pub removed: usize,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub kind: String,
    pub status: Status,
    pub witness: Vec<WitnessPoint>,
    pub trace: Vec<Sample>,
    pub horizon: u64,
    pub tol: f64,
    pub trim: Vec<TrimStep>,
}

impl CriterionVerdict {
    pub fn satisfied(&self) -> bool {
        self.status == Status::Satisfied
    }

    /// First `n` with `q(n) <= tol`.
    pub fn first_hit(&self) -> Option<u64> {
        self.trace.iter().find(|s| s.q <= self.tol).map(|s| s.n)
    }

    pub fn q(&self, n: u64) -> Option<f64> {
        self.trace.get((n as usize).checked_sub(1)?).map(|s| s.q)
    }

    pub fn min_q(&self) -> f64 {
        self.witness.last().map_or(f64::INFINITY, |w| w.q)
    }

    /// One record per `n`, then a summary record with `params` attached.
    /// Non-finite `q` is written as `null`; `log10_q` is always present.
    pub fn json_lines(&self, params: Value) -> Vec<Value> {
        let mut out: Vec<Value> = self
            .trace
            .iter()
            .map(|s| {
                json!({
                    "kind": self.kind,
                    "n": s.n,
                    "q": if s.q.is_finite() { json!(s.q) } else { Value::Null },
                    "log10_q": s.log10_q,
                    "record_min": s.record_min,
                })
            })
            .collect();
        let witness: Vec<Value> = self.witness.iter().map(|w| json!({"n": w.n, "q": w.q})).collect();
        out.push(json!({
            "kind": self.kind,
            "status": self.status,
            "witness": witness,
            "params": params,
        }));
        out
    }
}

/// Evaluates `q(1..=horizon)` and keeps the strictly decreasing record minima.
pub fn record_minima(
    label: &str,
    horizon: u64,
    tol: f64,
    mut q: impl FnMut(u64) -> ScaledProduct,
) -> CriterionVerdict {
    assert!(horizon >= 1 && tol > 0.0, "need horizon >= 1 and tol > 0");
    let mut best: Option<ScaledProduct> = None;
    let mut trace = Vec::with_capacity(horizon as usize);
    let mut witness = Vec::new();
    for n in 1..=horizon {
        let v = q(n);
        let record = best.map_or(true, |b| v < b);
        if record {
            best = Some(v);
            witness.push(WitnessPoint { n, q: v.value() });
        }
        trace.push(Sample {
            n,
            q: v.value(),
            log10_q: v.ln() / std::f64::consts::LN_10,
            record_min: record,
        });
    }
    let status = match best {
        Some(b) if b <= ScaledProduct::from_f64(tol) => Status::Satisfied,
        _ => Status::NotSatisfiedUpToHorizon,
    };
    CriterionVerdict {
        kind: label.to_string(),
        status,
        witness,
        trace,
        horizon,
        tol,
        trim: Vec::new(),
    }
}

/// `(P_minus, P_plus) = (sup_K 1/a_n, sup_K b_n)`.
pub fn product_factors(op: &CompositionOperator, window: &CompactWindow, n: u64) -> (f64, f64) {
    assert!(n >= 1);
    let inv_a = max_of(window.points().iter().map(|&t| op.forward_product(n, t).recip()));
    let b = max_of(window.points().iter().map(|&t| op.backward_product(n, t)));
    (inv_a.value(), b.value())
}

/// `(Q_back, Q_inv) = (sup_K prod_{j<n} w(alpha^{j-n} t), sup_K prod_{j<n} w(alpha^j t)^{-1})`.
pub fn segal_factors(op: &CompositionOperator, window: &CompactWindow, n: u64) -> Result<(f64, f64)> {
    assert!(n >= 1);
    check_segal(CriterionKind::SupercyclicSegal, op, window)?;
    let w = op.weight();
    let back = max_of(window.points().iter().map(|&t| {
        Orbit::new(op.alpha(), t, -(n as i64), 1)
            .take(n as usize)
            .fold(ScaledProduct::ONE, |acc, x| acc.times(w.eval(x)))
    }));
    let inv = max_of(window.points().iter().map(|&t| op.forward_product(n, t).recip()));
    Ok((back.value(), inv.value()))
}

fn check_segal(kind: CriterionKind, op: &CompositionOperator, window: &CompactWindow) -> Result<()> {
    let ctx = window.segal().ok_or(Error::MissingSegalContext(kind.name()))?;
    let deviation = op.segal_deviation(&ctx.tau, &ctx.grid);
    if deviation > ctx.invariance_tol {
        return Err(Error::SegalIncompatible { deviation });
    }
    Ok(())
}

/// Point sets the forward and backward products range over.
#[derive(Clone, Debug, PartialEq)]
pub struct Sites {
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
    /// Quadrature weight per removed point in the trim report.
    pub cell: f64,
}

impl Sites {
    pub fn from_window(window: &CompactWindow) -> Self {
        Sites {
            forward: window.points().to_vec(),
            backward: window.points().to_vec(),
            cell: window.cell(),
        }
    }
}

/// `q(n)` for one `n`, computed from scratch.
pub fn quantity(kind: CriterionKind, op: &CompositionOperator, window: &CompactWindow, n: u64, trim: &TrimPolicy) -> Result<f64> {
    assert!(n >= 1);
    if kind.needs_segal() {
        check_segal(kind, op, window)?;
    }
    let sites = Sites::from_window(window);
    let a: Vec<ScaledProduct> = sites.forward.iter().map(|&t| op.forward_product(n, t)).collect();
    let b: Vec<ScaledProduct> = sites.backward.iter().map(|&t| op.backward_product(n, t)).collect();
    let budget = if kind.trimmable() { trim.budget } else { 0 };
    Ok(quantity_from_products(kind, n, &a, &b, budget, !kind.is_adjoint()).0.value())
}

fn quantity_from_products(
    kind: CriterionKind,
    n: u64,
    a: &[ScaledProduct],
    b: &[ScaledProduct],
    budget: usize,
    aligned: bool,
) -> (ScaledProduct, usize) {
    if kind.is_adjoint() {
        // forward leg uses a_n itself, backward leg 1/b_n
        let inv_b: Vec<ScaledProduct> = b.iter().map(|x| x.recip()).collect();
        greedy_trim(a, &inv_b, aligned, budget, |sa, sib| {
            kind.combine(n, ScaledProduct::ONE, ScaledProduct::ONE, sa, sib)
        })
    } else {
        let inv_a: Vec<ScaledProduct> = a.iter().map(|x| x.recip()).collect();
        greedy_trim(&inv_a, b, aligned, budget, |sia, sb| {
            kind.combine(n, sia, sb, ScaledProduct::ONE, ScaledProduct::ONE)
        })
    }
}

/// Sweeps `n = 1..=horizon` over the window's grid points.
pub fn evaluate(
    kind: CriterionKind,
    op: &CompositionOperator,
    window: &CompactWindow,
    horizon: u64,
    tol: f64,
    trim: &TrimPolicy,
) -> Result<CriterionVerdict> {
    if kind.needs_segal() {
        check_segal(kind, op, window)?;
    }
    Ok(evaluate_on_sites(kind, op, &Sites::from_window(window), horizon, tol, trim))
}

/// Sweep over explicit site sets. For adjoint kinds the trim budget at step
/// `n` is `budget * 2^{-k}`, `k` the number of witnesses found so far.
pub fn evaluate_on_sites(
    kind: CriterionKind,
    op: &CompositionOperator,
    sites: &Sites,
    horizon: u64,
    tol: f64,
    trim: &TrimPolicy,
) -> CriterionVerdict {
    let mut sweep = FactorSweep::new(op, &sites.forward, &sites.backward);
    let base = if kind.trimmable() { trim.budget } else { 0 };
    let aligned = !kind.is_adjoint() && sites.forward == sites.backward;
    let mut steps = Vec::new();
    let mut witnesses = 0u32;
    let mut best: Option<ScaledProduct> = None;
    let mut verdict = record_minima(kind.name(), horizon, tol, |n| {
        sweep.advance();
        let budget = if kind.is_adjoint() { base >> witnesses.min(63) } else { base };
        let a: Vec<ScaledProduct> = sweep.forward().collect();
        let b: Vec<ScaledProduct> = sweep.backward().collect();
        let (q, removed) = quantity_from_products(kind, n, &a, &b, budget, aligned);
        if budget > 0 {
            let mass = if kind.is_adjoint() {
                removed as f64 * sites.cell
            } else {
                (removed as f64 * sites.cell).sqrt()
            };
            steps.push(TrimStep { n, removed, mass });
        }
        if best.map_or(true, |b| q < b) {
            best = Some(q);
            witnesses += 1;
        }
        q
    });
    verdict.trim = steps;
    verdict
}

/// One Cesàro/supercyclic pair checked by [`implication_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationPair {
    pub cesaro: CriterionKind,
    pub supercyclic: CriterionKind,
    pub cesaro_status: Status,
    pub supercyclic_status: Status,
    /// First `n` where the Cesàro quantity reached `tol`.
    pub cesaro_hit: Option<u64>,
    /// Supercyclic quantity at that `n`.
    pub supercyclic_at_hit: Option<f64>,
    /// `n` with `q_ces(n) <= 1` but `q_super(n) > q_ces(n)^2`.
    pub violations: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub pairs: Vec<ImplicationPair>,
    pub consistent: bool,
}

/// Checks that a satisfied Cesàro criterion forces the supercyclic one.
pub fn implication_check(op: &CompositionOperator, window: &CompactWindow, horizon: u64, tol: f64) -> Result<ImplicationReport> {
    let mut kinds = vec![
        (CriterionKind::CesaroSolid, CriterionKind::SupercyclicSolid),
        (CriterionKind::CesaroC0, CriterionKind::SupercyclicC0),
    ];
    if window.segal().is_some() {
        kinds.push((CriterionKind::CesaroSegal, CriterionKind::SupercyclicSegal));
    }
    let mut pairs = Vec::new();
    for (ck, sk) in kinds {
        let c = evaluate(ck, op, window, horizon, tol, &TrimPolicy::OFF)?;
        let s = evaluate(sk, op, window, horizon, tol, &TrimPolicy::OFF)?;
        let violations = c
            .trace
            .iter()
            .zip(&s.trace)
            .filter(|(qc, qs)| qc.q <= 1.0 && qs.q > qc.q * qc.q * (1.0 + 1e-10))
            .map(|(qc, _)| qc.n)
            .collect();
        let hit = c.first_hit();
        pairs.push(ImplicationPair {
            cesaro: ck,
            supercyclic: sk,
            cesaro_status: c.status,
            supercyclic_status: s.status,
            cesaro_hit: hit,
            supercyclic_at_hit: hit.and_then(|n| s.q(n)),
            violations,
        });
    }
    let consistent = pairs.iter().all(|p| {
        p.violations.is_empty()
            && (p.cesaro_status != Status::Satisfied
                || (p.supercyclic_status == Status::Satisfied && p.supercyclic_at_hit.is_some_and(|q| q <= tol)))
    });
    Ok(ImplicationReport { pairs, consistent })
}

/// Criteria for a bilateral shift over the indices `|j| <= q`.
///
/// `||T^n e_j||` plays the role of `b_n` and `||S^n e_j||` that of `1/a_n`;
/// accepted kinds are the solid supercyclic, Cesàro and hypercyclic ones.
pub fn evaluate_shift(
    kind: CriterionKind,
    shift: &BilateralShift,
    q: i64,
    horizon: u64,
    tol: f64,
) -> Result<CriterionVerdict> {
    if !matches!(
        kind,
        CriterionKind::SupercyclicSolid | CriterionKind::CesaroSolid | CriterionKind::HypercyclicSolid
    ) {
        return Err(Error::PreconditionViolated(format!("{kind} is not defined for shifts")));
    }
    let idx: Vec<i64> = (-q..=q).collect();
    let step = match shift.orientation {
        crate::operator::Orientation::Forward => 1,
        crate::operator::Orientation::Backward => -1,
    };
    let mut fwd = vec![ScaledProduct::ONE; idx.len()];
    let mut inv = vec![ScaledProduct::ONE; idx.len()];
    Ok(record_minima(kind.name(), horizon, tol, |n| {
        let k = n as i64;
        for (slot, &j) in idx.iter().enumerate() {
            fwd[slot].mul_f64(shift.w(j + step * (k - 1)));
            inv[slot].mul_f64(shift.w(j - step * k));
        }
        let t_norm = max_of(fwd.iter().copied());
        let s_norm = max_of(inv.iter().map(|x| x.recip()));
        kind.combine(n, s_norm, t_norm, ScaledProduct::ONE, ScaledProduct::ONE)
    }))
}
