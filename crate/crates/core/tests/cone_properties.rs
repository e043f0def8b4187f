use cone_spectra::cones::{
    chain_iterate, double_dual_check, dual_cone, extremal_rays, image_cone, separate,
    PolyhedralCone, CONE_TOL,
};
use cone_spectra::linalg::{vector, Matrix};
use proptest::prelude::*;

fn cone_strategy() -> impl Strategy<Value = PolyhedralCone> {
    (2usize..=4).prop_flat_map(|d| {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), 2..=5)
            .prop_filter_map("zero generator", move |gens| {
                if gens.iter().any(|g| vector::norm(g) < 1e-3) {
                    return None;
                }
                PolyhedralCone::new(d, gens).ok()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn double_dual_returns_the_cone(c in cone_strategy()) {
        prop_assert!(double_dual_check(&c).unwrap());
    }

    #[test]
    fn dual_generators_pair_nonnegatively(c in cone_strategy()) {
        let d = dual_cone(&c).unwrap();
        for phi in d.generators() {
            for g in c.generators() {
                prop_assert!(vector::dot(phi, g) >= -1e-10);
            }
        }
    }

    #[test]
    fn separation_is_sound(
        c in cone_strategy(),
        seed in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let a = &seed[..c.ambient_dim()];
        prop_assume!(!c.contains(a, CONE_TOL));
        let phi = separate(&c, a).unwrap();
        for g in c.generators() {
            prop_assert!(phi.eval(g) >= -1e-10);
        }
        prop_assert!(phi.eval(a) <= -1e-10 * vector::norm(a));
    }

    #[test]
    fn extremal_rays_regenerate(c in cone_strategy()) {
        if let Ok(rays) = extremal_rays(&c) {
            let back = PolyhedralCone::new(c.ambient_dim(), rays).unwrap();
            prop_assert!(back.same_set(&c, CONE_TOL));
        }
    }

    #[test]
    fn nonnegative_maps_keep_the_orthant_nested(
        entries in prop::collection::vec(0.0f64..1.0, 9),
    ) {
        let mut rows: Vec<Vec<f64>> = entries.chunks(3).map(|r| r.to_vec()).collect();
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] += 1.0;
        }
        let u = Matrix::from_rows(&rows).unwrap();
        let ch = chain_iterate(&u, &PolyhedralCone::orthant(3), 12).unwrap();
        for (k, step) in ch.steps.iter().enumerate() {
            prop_assert!(step.nested);
            prop_assert!(ch.cones[k].contains_cone(&ch.cones[k + 1], 1e-9));
            prop_assert!(!ch.cones[k + 1].is_zero());
        }
    }

    #[test]
    fn injective_images_are_nonzero(
        c in cone_strategy(),
        entries in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let d = c.ambient_dim();
        let mut rows: Vec<Vec<f64>> = (0..d).map(|i| entries[i * 4..i * 4 + d].to_vec()).collect();
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] += 3.0;
        }
        let u = Matrix::from_rows(&rows).unwrap();
        let img = image_cone(&u, &c).unwrap();
        prop_assert!(!img.is_zero());
    }
}
