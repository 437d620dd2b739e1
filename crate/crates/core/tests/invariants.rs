use pfsdm_core::analysis::{shape_moments, PipelineConfig};
use pfsdm_core::eikonal::{solve_eikonal_traced, SolverConfig};
use pfsdm_core::moments::{
    centered_moments, distance_matrix, normalizing_constants, pf_sdm_distance, MomentCurves,
};
use pfsdm_core::shapes::{
    augment, generate_shape, normalize_contour, resample_contour, AugmentParams, Contour, ShapeKind,
};
use pfsdm_core::Point;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = ShapeKind> {
    prop::sample::select(ShapeKind::ALL.to_vec())
}

fn params() -> impl Strategy<Value = AugmentParams> {
    (0.0..std::f64::consts::TAU, 0.6..1.0f64, any::<bool>(), -0.2..0.2f64, -0.2..0.2f64).prop_map(
        |(rotation, scale, reflect, tx, ty)| AugmentParams {
            rotation,
            translation: (tx, ty),
            scale,
            reflect,
            seed: 0,
        },
    )
}

fn curves(n: usize, k: usize, r: usize) -> impl Strategy<Value = Vec<MomentCurves>> {
    prop::collection::vec(prop::collection::vec(-2.0..2.0f64, k * r), n).prop_map(move |tables| {
        tables
            .into_iter()
            .enumerate()
            .map(|(i, t)| MomentCurves {
                shape_id: format!("s{i}"),
                r_grid: (0..r).map(|j| 0.05 + 0.9 * j as f64 / (r - 1) as f64).collect(),
                values: t.chunks(r).map(|c| c.to_vec()).collect(),
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_contract(k in kind(), p in params(), seed in 1u64..1000) {
        let base = generate_shape(k, 128, seed).unwrap();
        let moved = augment(&base, &p).unwrap();
        let n = normalize_contour(&moved).unwrap();
        prop_assert!(n.centroid().unwrap().norm() < 1e-12);
        prop_assert!((n.max_radius() - 0.7).abs() < 1e-12);
        prop_assert!(n.is_counterclockwise());
        // normalization removes scale: areas agree with the unaugmented shape
        prop_assert!((n.signed_area() / base.signed_area() - 1.0).abs() < 1e-9);
        let again = normalize_contour(&n).unwrap();
        for (a, b) in again.points().iter().zip(n.points()) {
            prop_assert!(a.distance(*b) < 1e-12);
        }
    }

    #[test]
    fn resampling_preserves_shape(k in kind(), m in 16usize..300) {
        let base = generate_shape(k, 256, 0).unwrap();
        let r = resample_contour(&base, m).unwrap();
        prop_assert_eq!(r.len(), m);
        prop_assert!(r.perimeter() <= base.perimeter() + 1e-12);
        for p in r.points() {
            let d = pfsdm_core::shapes::signed_distance_oracle(*p, &base);
            prop_assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn even_moments_nonnegative(samples in prop::collection::vec(0.0..50.0f64, 1..300)) {
        let m = centered_moments(&samples, 4);
        prop_assert!(m[0] >= 0.0);
        prop_assert!(m[1] >= 0.0);
        prop_assert!(m[3] >= 0.0);
    }

    #[test]
    fn distance_matrix_properties(cs in curves(6, 3, 9)) {
        let m = normalizing_constants(&cs).unwrap();
        for c in &cs {
            for (row, mk) in c.values.iter().zip(&m.values) {
                prop_assert!(row.iter().all(|v| v.abs() <= *mk));
            }
        }
        let d = distance_matrix(&cs, &m, 3).unwrap();
        for i in 0..cs.len() {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..cs.len() {
                prop_assert_eq!(d.get(i, j).to_bits(), d.get(j, i).to_bits());
                prop_assert!(d.get(i, j) >= 0.0);
            }
        }
        prop_assert_eq!(pf_sdm_distance(&cs[0], &cs[1], &m, 3).unwrap(), pf_sdm_distance(&cs[1], &cs[0], &m, 3).unwrap());
        prop_assert_eq!(pf_sdm_distance(&cs[2], &cs[2], &m, 3).unwrap(), 0.0);
    }
}

#[test]
fn accepted_steps_never_increase_loss() {
    for k in ShapeKind::ALL {
        let c = generate_shape(k, 256, 0).unwrap();
        let (model, trace) = solve_eikonal_traced(&c, &SolverConfig::default(), k.name()).unwrap();
        assert!(!trace.accepted_losses.is_empty());
        let mut prev = model.initial_loss;
        for &l in &trace.accepted_losses {
            assert!(l <= prev, "{}: {l} > {prev}", k.name());
            prev = l;
        }
        assert_eq!(prev, model.loss);
    }
}

#[test]
fn pipeline_is_deterministic() {
    let cfg = PipelineConfig::default();
    let c = generate_shape(ShapeKind::Folded, 256, 17).unwrap();
    let a = shape_moments(&c, "f", &cfg).unwrap();
    let b = shape_moments(&c, "f", &cfg).unwrap();
    let bits = |m: &MomentCurves| m.values.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let norm: f64 = a.iter().map(|x| x * x).sum();
    (diff / norm).sqrt()
}

#[test]
fn reflection_preserves_moment_curves() {
    let cfg = PipelineConfig::default();
    for k in [ShapeKind::Star, ShapeKind::Folded, ShapeKind::RoundedSquare, ShapeKind::Ellipse] {
        let c = generate_shape(k, 256, 0).unwrap();
        let mirrored = Contour::new(
            c.points().iter().rev().map(|p| Point::new(-p.x, p.y)).collect(),
        )
        .unwrap();
        let a = shape_moments(&c, "a", &cfg).unwrap();
        let b = shape_moments(&mirrored, "b", &cfg).unwrap();
        for (k_row, (ra, rb)) in a.values.iter().zip(&b.values).enumerate() {
            let e = rel_l2(ra, rb);
            assert!(e < 0.05, "{} M{}: relative L2 {e}", k.name(), k_row + 1);
        }
    }
}

#[test]
fn self_distance_is_exactly_zero() {
    let cfg = PipelineConfig::default();
    let c = generate_shape(ShapeKind::Star, 256, 0).unwrap();
    let a = shape_moments(&c, "a", &cfg).unwrap();
    let m = normalizing_constants(std::slice::from_ref(&a)).unwrap();
    assert_eq!(pf_sdm_distance(&a, &a, &m, 3).unwrap(), 0.0);
    let d = distance_matrix(&[a.clone(), a.clone()], &m, 3).unwrap();
    assert!(d.get(0, 1) <= 1e-10);
}
