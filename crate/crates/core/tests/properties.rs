use maxop_core::euclidean_max::{hl_maximal, RadiiSet};
use maxop_core::grid::{forward_transform, inverse_transform, make_grid, GridFunction, VectorField};
use maxop_core::grushin::{koranyi_distance, GrushinPoint};
use maxop_core::multiplier::{phi, DyadicIndex};
use maxop_core::norms::{lp_norm, lq_pointwise, mixed_norm, Exponent};
use maxop_core::rotations::{dimension_split, haar_rotation};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![(1.05f64..8.0).prop_map(Exponent::Finite), Just(Exponent::Infinity)]
}

fn values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

fn point(d: usize) -> impl Strategy<Value = GrushinPoint> {
    (prop::collection::vec(-3.0f64..3.0, d), -5.0f64..5.0).prop_map(|(x, u)| GrushinPoint::new(x, u).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_roundtrip(v in values(64)) {
        let spec = make_grid(2, 2.0, 8).unwrap();
        let f = GridFunction::from_real(spec, v).unwrap();
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn plancherel(v in values(16)) {
        let spec = make_grid(1, 3.0, 16).unwrap();
        let f = GridFunction::from_real(spec, v).unwrap();
        let hat = forward_transform(&f).unwrap();
        let freq: f64 = hat.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * spec.frequency_cell_volume();
        prop_assert!((freq.sqrt() - f.l2_norm()).abs() <= 1e-12 * (1.0 + f.l2_norm()));
    }

    #[test]
    fn norm_is_homogeneous(v in values(32), c in -5.0f64..5.0, p in exponent()) {
        let spec = make_grid(1, 2.0, 32).unwrap();
        let f = GridFunction::from_real(spec, v).unwrap();
        let a = lp_norm(&f.scale(c), p).unwrap();
        let b = c.abs() * lp_norm(&f, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
    }

    #[test]
    fn triangle_inequality(u in values(32), v in values(32), p in exponent()) {
        let spec = make_grid(1, 2.0, 32).unwrap();
        let f = GridFunction::from_real(spec, u).unwrap();
        let g = GridFunction::from_real(spec, v).unwrap();
        let lhs = lp_norm(&f.add(&g).unwrap(), p).unwrap();
        let rhs = lp_norm(&f, p).unwrap() + lp_norm(&g, p).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn pointwise_lq_is_monotone_in_q(u in values(16), v in values(16), q in 1.05f64..6.0) {
        let spec = make_grid(1, 1.0, 16).unwrap();
        let field = VectorField::new(vec![
            GridFunction::from_real(spec, u).unwrap(),
            GridFunction::from_real(spec, v).unwrap(),
        ]).unwrap();
        let small = lq_pointwise(&field, Exponent::Finite(q)).unwrap().real_parts();
        let large = lq_pointwise(&field, Exponent::Finite(q + 1.0)).unwrap().real_parts();
        let sup = lq_pointwise(&field, Exponent::Infinity).unwrap().real_parts();
        for i in 0..16 {
            prop_assert!(large[i] <= small[i] * (1.0 + 1e-12));
            prop_assert!(sup[i] <= large[i] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn mixed_norm_of_single_member(v in values(32), p in exponent(), q in exponent()) {
        let spec = make_grid(1, 2.0, 32).unwrap();
        let f = GridFunction::from_real(spec, v).unwrap();
        let field = VectorField::new(vec![f.clone()]).unwrap();
        let a = mixed_norm(&field, p, q).unwrap();
        let b = lp_norm(&f, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
    }

    #[test]
    fn maximal_function_dominates(v in values(64), r in 0.3f64..3.0) {
        let spec = make_grid(2, 2.0, 8).unwrap();
        let f = GridFunction::from_real(spec, v).unwrap();
        let m = hl_maximal(&f, &RadiiSet::new(vec![r, 2.0 * r]).unwrap()).unwrap().real_parts();
        let sup = f.sup_norm();
        for (mi, fi) in m.iter().zip(f.abs_values()) {
            prop_assert!(*mi >= fi);
            prop_assert!(*mi <= sup);
        }
    }

    #[test]
    fn maximal_function_grows_with_radii(v in values(64), r in 0.3f64..2.0) {
        let spec = make_grid(2, 2.0, 8).unwrap();
        let f = GridFunction::from_real(spec, v).unwrap();
        let few = hl_maximal(&f, &RadiiSet::new(vec![r]).unwrap()).unwrap().real_parts();
        let more = hl_maximal(&f, &RadiiSet::new(vec![r, 1.5 * r]).unwrap()).unwrap().real_parts();
        for (a, b) in few.iter().zip(&more) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn partition_of_unity(s in 0.0f64..500.0) {
        let total: f64 = (0..=12).map(|l| phi(DyadicIndex(l), s)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn gauge_symmetry_and_dilation(g in point(2), h in point(2), k in -3i32..3) {
        let s = 2f64.powi(k);
        let a = koranyi_distance(&g, &h).unwrap();
        prop_assert_eq!(a, koranyi_distance(&h, &g).unwrap());
        prop_assert_eq!(koranyi_distance(&g.dilate(s), &h.dilate(s)).unwrap(), s * a);
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn haar_rotation_is_orthogonal(d in 1usize..8, seed in any::<u64>()) {
        let theta = haar_rotation(d, seed).unwrap();
        prop_assert!(theta.orthogonality_defect() <= 1e-10);
        prop_assert!((theta.determinant().abs() - 1.0).abs() <= 1e-10);
        let x: Vec<f64> = (0..d).map(|i| i as f64 - 1.5).collect();
        let y = theta.apply(&x);
        let nx: f64 = x.iter().map(|v| v * v).sum();
        let ny: f64 = y.iter().map(|v| v * v).sum();
        prop_assert!((nx - ny).abs() <= 1e-10 * (1.0 + nx));
    }

    #[test]
    fn dimension_split_brackets_exponents(p in 1.01f64..20.0, q in 1.01f64..20.0) {
        let d = dimension_split(Exponent::Finite(p), Exponent::Finite(q)).unwrap() as f64;
        prop_assert!(d >= 3.0);
        for t in [p, q] {
            prop_assert!(d / (d - 1.0) < t && t < d);
        }
    }
}
