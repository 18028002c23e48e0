use lindyn_core::criteria::{quantity, CompactWindow, CriterionKind, TrimPolicy};
use lindyn_core::funcspace::{norm, Grid, GridFunction, Homeo, NormKind, PiecewiseMap, Weight};
use lindyn_core::measure::{adjoint_tn, tv_norm, AtomicMeasure};
use lindyn_core::operator::{CompositionOperator, Orientation};
use lindyn_core::porosity::{build_h, exp_decay};
use lindyn_core::presets::{preset, PRESET_IDS};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::uniform(8, 4)
}

fn values() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), grid().len())
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn gridfn() -> impl Strategy<Value = GridFunction> {
    values().prop_map(|v| GridFunction::new(grid(), v).unwrap())
}

/// Positive continuous weight with breakpoints at integers in `[-3, 3]`.
fn weight() -> impl Strategy<Value = Weight> {
    prop::collection::vec(0.25..4.0f64, 7).prop_map(|v| {
        let bps: Vec<f64> = (-3..=3).map(f64::from).collect();
        Weight::Map(PiecewiseMap::new(bps, v).unwrap())
    })
}

fn shift() -> impl Strategy<Value = f64> {
    prop_oneof![Just(-1.0), Just(1.0), Just(0.5), Just(-2.0)]
}

fn operator() -> impl Strategy<Value = CompositionOperator> {
    (shift(), weight()).prop_map(|(c, w)| CompositionOperator::new(Homeo::translation(c).unwrap(), w).unwrap())
}

fn kinds() -> [NormKind; 3] {
    [NormKind::Sup, NormKind::L2, NormKind::segal(PiecewiseMap::constant(0.5), 1e-12)]
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b.abs().max(a.abs())).abs()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_norms(f in gridfn(), g in gridfn(), s in (-4.0..4.0f64, -4.0..4.0f64)) {
        let s = Complex64::new(s.0, s.1);
        for kind in kinds() {
            let nf = norm(&f, &kind).unwrap();
            let ng = norm(&g, &kind).unwrap();
            prop_assert!(nf >= 0.0);
            prop_assert!(rel(norm(&f.scale(s), &kind).unwrap(), s.norm() * nf) < 1e-12);
            prop_assert!(norm(&f.add(&g).unwrap(), &kind).unwrap() <= (nf + ng) * (1.0 + 1e-12));
        }
        prop_assert_eq!(norm(&GridFunction::zeros(grid()), &NormKind::L2).unwrap(), 0.0);
    }

    #[test]
    fn segal_dominates_sup(f in gridfn()) {
        let s = norm(&f, &kinds()[2]).unwrap();
        prop_assert!(s >= f.sup_norm());
    }

    #[test]
    fn cocycle_identity(op in operator(), n in 1u64..30, m in 1u64..30, t in -4.0..4.0f64) {
        let left = op.cocycle(n + m, t, Orientation::Forward);
        let right = op.cocycle(n, t, Orientation::Forward) * op.cocycle(m, op.alpha().iterate(t, n as i64), Orientation::Forward);
        prop_assert!(rel(left, right) < 1e-10);
        let back = op.cocycle(n + m, t, Orientation::Backward);
        let split = op.cocycle(n, t, Orientation::Backward) * op.cocycle(m, op.alpha().iterate(t, -(n as i64)), Orientation::Backward);
        prop_assert!(rel(back, split) < 1e-10);
    }

    #[test]
    fn t_and_s_invert_each_other(op in operator(), f in gridfn()) {
        // keep f away from the edge so neither leg leaves the grid
        let inner = f.restrict_where(|t| t.abs() <= 5.0);
        for g in [op.apply_t(&op.apply_s(&inner).unwrap()).unwrap(), op.apply_s(&op.apply_t(&inner).unwrap()).unwrap()] {
            for (a, b) in g.values().iter().zip(inner.values()) {
                prop_assert!((a - b).norm() <= 1e-15 * b.norm().max(1e-300) * 4.0);
            }
        }
    }

    #[test]
    fn power_matches_iteration(op in operator(), f in gridfn(), n in 1u64..6) {
        let direct = op.apply_tn(&f, n).unwrap();
        let mut it = f.clone();
        for _ in 0..n {
            it = op.apply_t(&it).unwrap();
        }
        for (a, b) in direct.values().iter().zip(it.values()) {
            prop_assert!((a - b).norm() <= 1e-14 * b.norm());
        }
    }

    #[test]
    fn quantities_grow_with_the_window(op in operator(), n in 1u64..40) {
        let small = CompactWindow::interval(1.0, 4);
        let large = CompactWindow::interval(2.0, 4);
        for kind in [CriterionKind::SupercyclicSolid, CriterionKind::CesaroSolid, CriterionKind::HypercyclicSolid] {
            let a = quantity(kind, &op, &small, n, &TrimPolicy::OFF).unwrap();
            let b = quantity(kind, &op, &large, n, &TrimPolicy::OFF).unwrap();
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn tv_is_a_norm(a in prop::collection::vec((-5i32..5, -2.0..2.0f64, -2.0..2.0f64), 0..12),
                    b in prop::collection::vec((-5i32..5, -2.0..2.0f64, -2.0..2.0f64), 0..12),
                    s in -3.0..3.0f64) {
        let mk = |v: &[(i32, f64, f64)]| AtomicMeasure::new(v.iter().map(|&(x, re, im)| (x as f64 * 0.5, Complex64::new(re, im))).collect()).unwrap();
        let (mu, nu) = (mk(&a), mk(&b));
        prop_assert!(rel(tv_norm(&mu.scale(Complex64::new(s, 0.0))), s.abs() * tv_norm(&mu)) < 1e-14);
        prop_assert!(tv_norm(&mu.add(&nu)) <= tv_norm(&mu) + tv_norm(&nu) + 1e-14);
        prop_assert!(mu.atoms().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn pushforward_composes(a in prop::collection::vec((-20i32..20, -2.0..2.0f64), 1..10), c in shift()) {
        let mu = AtomicMeasure::new(a.iter().map(|&(x, re)| (x as f64 * 0.25, Complex64::new(re, 0.0))).collect()).unwrap();
        let op = CompositionOperator::new(Homeo::translation(c).unwrap(), Weight::constant(1.0)).unwrap();
        prop_assert_eq!(adjoint_tn(&op, &adjoint_tn(&op, &mu, 1), 1), adjoint_tn(&op, &mu, 2));
    }

    #[test]
    fn gamma_h_sits_inside_gamma_g(amp in 0.1..3.0f64, rate in 0.1..2.0f64, n in 1i64..6, delta in 1e-4..0.1f64, beta in 0.05..0.49f64) {
        let g = exp_decay(grid(), amp, rate);
        let h = build_h(&g, n, delta, beta);
        for (_, i) in grid().integer_points() {
            prop_assert!(h.value(i).re >= g.value(i).re);
        }
    }
}

#[test]
fn preset_weights_meet_their_bounds() {
    // includes the integers -10..=10 and their neighbours
    let sample = |k: usize| if k < 21 { k as f64 - 10.0 } else { -10.0 + 20.0 * k as f64 / 999.0 };
    for id in PRESET_IDS {
        let p = preset(id).unwrap();
        let w = p.operator.weight();
        for t in (0..1000).map(sample) {
            let v = w.eval(t);
            let ok = match id {
                "ex3.5" | "ex4.3a" => (t > -1.0 || (1.5..=2.0).contains(&v)) && (t < 1.0 || v == 1.0),
                "ex3.6" | "ex4.3b" => (t > -1.0 || (0.5..=1.0).contains(&v)) && (t < 1.0 || v == 1.0),
                "ex3.7" => {
                    let want = if t <= -1.0 {
                        4.0
                    } else if t >= 1.0 {
                        2.0
                    } else {
                        4.0 + (t + 1.0) / 2.0 * (1.0 + 1.0 - 4.0)
                    };
                    (v - want).abs() < 1e-14
                }
                "ex3.8" => {
                    let want = if t >= 0.0 {
                        0.5
                    } else {
                        // t in [-m, -m + 1)
                        let m = (-t).ceil();
                        (m + 1.0) / m
                    };
                    (v - want).abs() < 1e-15
                }
                _ => unreachable!(),
            };
            assert!(ok, "{id}: w({t}) = {v}");
        }
    }
}
