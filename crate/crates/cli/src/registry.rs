//! Expected verdicts for the named example operators.
//!
//! Supercyclic and wedge checks run to `n = 200` at `1e-6`. Cesàro and
//! hypercyclic quantities decay like `1/n` at best, so those run to
//! `n = 2000` at `1e-2`.

use lindyn_core::criteria::{evaluate, evaluate_shift, CompactWindow, CriterionKind, CriterionVerdict, SegalContext, Status, TrimPolicy};
use lindyn_core::funcspace::{Grid, PiecewiseMap};
use lindyn_core::measure::{adjoint_criterion, AtomicMeasure};
use lindyn_core::operator::wedge_condition;
use lindyn_core::presets::{harmonic_shift, preset};
use lindyn_core::Result;
use rayon::prelude::*;
use serde::Serialize;

pub const FAST: (u64, f64) = (200, 1e-6);
pub const SLOW: (u64, f64) = (2000, 1e-2);

/// Registry window `K = [-2, 2]`.
pub const WINDOW: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    /// Criterion on `T` (or on `S` when `inverse`) over `K`.
    Criterion { kind: CriterionKind, inverse: bool },
    /// Same, in the Segal algebra with `tau = 1/2`.
    Segal { kind: CriterionKind },
    /// Adjoint criterion with `mu = nu = delta_0`, `K = [-1, 1]`.
    Adjoint { kind: CriterionKind },
    /// Harmonic bilateral shift over `|j| <= 2`.
    Shift { kind: CriterionKind },
    /// Product condition for the induced maps on compact operators, `m = 2`.
    Wedge { preset: &'static str },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub check: Check,
    pub expected: Status,
    /// The claim being checked, in words.
    pub claim: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub id: &'static str,
    pub expectations: Vec<Expectation>,
}

const SAT: Status = Status::Satisfied;
const NOT: Status = Status::NotSatisfiedUpToHorizon;

fn crit(kind: CriterionKind, inverse: bool, expected: Status, claim: &'static str) -> Expectation {
    Expectation {
        check: Check::Criterion { kind, inverse },
        expected,
        claim,
    }
}

fn other(check: Check, expected: Status, claim: &'static str) -> Expectation {
    Expectation { check, expected, claim }
}

pub const EXAMPLE_IDS: [&str; 8] = ["ex3.5", "ex3.6", "ex3.7", "ex3.8", "rem3.10", "ex4.3a", "ex4.3b", "ex3.12"];

pub fn registry() -> Vec<Example> {
    use CriterionKind::*;
    vec![
        Example {
            id: "ex3.5",
            expectations: vec![
                crit(SupercyclicSolid, false, SAT, "supercyclic on L2"),
                crit(SupercyclicC0, false, SAT, "supercyclic on C0"),
                crit(CesaroSolid, false, SAT, "Cesàro hyper-transitive on L2"),
                crit(CesaroC0, false, SAT, "Cesàro hyper-transitive on C0"),
                crit(HypercyclicSolid, false, NOT, "not hypercyclic"),
                other(Check::Segal { kind: SupercyclicSegal }, SAT, "supercyclic on a Segal algebra with 1-periodic tau"),
                other(Check::Segal { kind: CesaroSegal }, SAT, "Cesàro hyper-transitive on a Segal algebra with 1-periodic tau"),
            ],
        },
        Example {
            id: "ex3.6",
            expectations: vec![
                crit(SupercyclicSolid, false, SAT, "T supercyclic on L2"),
                crit(SupercyclicC0, false, SAT, "T supercyclic on C0"),
                crit(CesaroSolid, false, NOT, "T not Cesàro hyper-transitive on L2"),
                crit(CesaroC0, false, NOT, "T not Cesàro hyper-transitive on C0"),
                crit(HypercyclicSolid, false, NOT, "T not hypercyclic"),
                crit(SupercyclicSolid, true, SAT, "S supercyclic"),
                crit(CesaroSolid, true, SAT, "S Cesàro hyper-transitive on L2"),
                crit(CesaroC0, true, SAT, "S Cesàro hyper-transitive on C0"),
            ],
        },
        Example {
            id: "ex3.7",
            expectations: vec![
                crit(SupercyclicSolid, false, SAT, "T supercyclic"),
                crit(SupercyclicC0, false, SAT, "T supercyclic on C0"),
                crit(SupercyclicSolid, true, SAT, "S supercyclic"),
                crit(SupercyclicC0, true, SAT, "S supercyclic on C0"),
                crit(CesaroSolid, false, NOT, "T not Cesàro hyper-transitive"),
                crit(CesaroC0, false, NOT, "T not Cesàro hyper-transitive on C0"),
                crit(CesaroSolid, true, NOT, "S not Cesàro hyper-transitive"),
                crit(CesaroC0, true, NOT, "S not Cesàro hyper-transitive on C0"),
                crit(HypercyclicSolid, false, NOT, "T not hypercyclic"),
                crit(HypercyclicSolid, true, NOT, "S not hypercyclic"),
            ],
        },
        Example {
            id: "ex3.8",
            expectations: vec![
                crit(HypercyclicSolid, false, SAT, "hypercyclic on L2"),
                crit(CesaroSolid, false, NOT, "not Cesàro hyper-transitive on L2"),
                crit(SupercyclicSolid, false, SAT, "supercyclic, being hypercyclic"),
            ],
        },
        Example {
            id: "rem3.10",
            expectations: vec![
                other(Check::Shift { kind: HypercyclicSolid }, SAT, "weighted forward shift is hypercyclic"),
                other(Check::Shift { kind: CesaroSolid }, NOT, "weighted forward shift is not Cesàro hypercyclic"),
            ],
        },
        Example {
            id: "ex4.3a",
            expectations: vec![
                other(Check::Adjoint { kind: AdjointCesaro }, SAT, "adjoint Cesàro criterion holds"),
                other(Check::Adjoint { kind: AdjointSuper }, SAT, "adjoint supercyclic criterion holds"),
            ],
        },
        Example {
            id: "ex4.3b",
            expectations: vec![
                other(Check::Adjoint { kind: AdjointSuper }, SAT, "adjoint supercyclic criterion holds"),
                other(Check::Adjoint { kind: AdjointCesaro }, NOT, "adjoint not Cesàro hyper-transitive"),
            ],
        },
        Example {
            id: "ex3.12",
            expectations: ["ex3.5", "ex3.6", "ex3.7"]
                .into_iter()
                .map(|p| other(Check::Wedge { preset: p }, SAT, "product condition for the induced maps on compact operators"))
                .collect(),
        },
    ]
}

pub fn lookup(id: &str) -> Option<Example> {
    registry().into_iter().find(|e| e.id == id)
}

fn budget(kind: CriterionKind) -> (u64, f64) {
    if kind.is_cesaro() || kind == CriterionKind::HypercyclicSolid {
        SLOW
    } else {
        FAST
    }
}

impl Check {
    pub fn label(&self) -> String {
        match self {
            Check::Criterion { kind, inverse } => format!("{kind}[{}]", if *inverse { "S" } else { "T" }),
            Check::Segal { kind } => kind.to_string(),
            Check::Adjoint { kind } => kind.to_string(),
            Check::Shift { kind } => format!("SHIFT_{kind}"),
            Check::Wedge { preset } => format!("WEDGE[{preset}]"),
        }
    }

    /// Runs the check for the example `id`.
    pub fn run(&self, id: &str) -> Result<CriterionVerdict> {
        let op = || preset(id).map(|p| p.operator);
        let k = CompactWindow::interval(WINDOW, 4);
        match self {
            Check::Criterion { kind, inverse } => {
                let op = if *inverse { op()?.inverse() } else { op()? };
                let (n, tol) = budget(*kind);
                evaluate(*kind, &op, &k, n, tol, &TrimPolicy::OFF)
            }
            Check::Segal { kind } => {
                let ctx = SegalContext {
                    tau: PiecewiseMap::constant(0.5),
                    epsilon: 0.5,
                    invariance_tol: 1e-12,
                    grid: Grid::uniform(16, 4),
                };
                let (n, tol) = budget(*kind);
                evaluate(*kind, &op()?, &k.with_segal(ctx)?, n, tol, &TrimPolicy::OFF)
            }
            Check::Adjoint { kind } => {
                let d = AtomicMeasure::dirac(0.0);
                let (n, tol) = budget(*kind);
                adjoint_criterion(*kind, &op()?, &d, &d, &CompactWindow::interval(1.0, 4), n, tol, &TrimPolicy::OFF)
            }
            Check::Shift { kind } => {
                let (n, tol) = budget(*kind);
                evaluate_shift(*kind, &harmonic_shift((-10, 10)), 2, n, tol)
            }
            Check::Wedge { preset: p } => {
                let (n, tol) = FAST;
                Ok(wedge_condition(&preset(p)?.operator, 2, n, tol))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub id: &'static str,
    pub check: String,
    pub claim: &'static str,
    pub expected: Status,
    pub observed: Status,
    pub first_hit: Option<u64>,
    pub min_q: f64,
    pub horizon: u64,
    pub tol: f64,
    pub pass: bool,
}

pub fn run_example(example: &Example) -> Result<Vec<Row>> {
    example
        .expectations
        .par_iter()
        .map(|e| {
            let v = e.check.run(example.id)?;
            Ok(Row {
                id: example.id,
                check: e.check.label(),
                claim: e.claim,
                expected: e.expected,
                observed: v.status,
                first_hit: v.first_hit(),
                min_q: v.min_q(),
                horizon: v.horizon,
                tol: v.tol,
                pass: v.status == e.expected,
            })
        })
        .collect()
}
