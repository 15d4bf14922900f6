use dihedral_core::group::{apply_element, conjugate_element};
use dihedral_core::orbit::{element_set_cost, occam_criterion, stability_bound};
use dihedral_core::transport::{brute_force_wasserstein, cost_matrix};
use dihedral_core::{group_cost, wasserstein, DihedralGroup, ElementKind, GroupElement, Point, PointCloud, TransportConfig};
use proptest::prelude::*;

fn cloud_of(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PointCloud> {
    len.prop_flat_map(|n| prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n))
        .prop_map(|pairs| PointCloud::from_pairs(pairs).unwrap())
}

fn cloud_triple(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (PointCloud, PointCloud, PointCloud)> {
    len.prop_flat_map(|n| {
        let c = || prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n).prop_map(|p| PointCloud::from_pairs(p).unwrap());
        (c(), c(), c())
    })
}

fn element() -> impl Strategy<Value = GroupElement> {
    (1usize..=12)
        .prop_flat_map(|n| (0..n, any::<bool>(), Just(n)))
        .prop_map(|(k, refl, n)| {
            let kind = if refl { ElementKind::Reflection } else { ElementKind::Rotation };
            GroupElement::new(kind, k, n).unwrap()
        })
}

fn cfg() -> TransportConfig {
    TransportConfig::default()
}

fn max_coord_diff(a: &PointCloud, b: &PointCloud) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(p, q)| (p.x - q.x).abs().max((p.y - q.y).abs()))
        .fold(0.0, f64::max)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn action_is_isometric(g in element(), a in (-5.0..5.0f64, -5.0..5.0f64), b in (-5.0..5.0f64, -5.0..5.0f64)) {
        let (p, q) = (Point::from(a), Point::from(b));
        let before = p.dist_sq(q).sqrt();
        let after = g.apply_point(p).dist_sq(g.apply_point(q)).sqrt();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn inverse_undoes_action(g in element(), x in cloud_of(1..=20)) {
        let back = apply_element(&g, &apply_element(&g.inverse(), &x));
        prop_assert!(max_coord_diff(&back, &x) < 1e-12);
    }

    #[test]
    fn action_respects_composition(n in 1usize..=8, a in 0usize..16, b in 0usize..16, x in cloud_of(1..=10)) {
        let elements = DihedralGroup::new(n).unwrap().elements();
        let (g, h) = (elements[a % elements.len()], elements[b % elements.len()]);
        let stepwise = apply_element(&h, &apply_element(&g, &x));
        let composed = apply_element(&h.compose(&g).unwrap(), &x);
        prop_assert!(max_coord_diff(&stepwise, &composed) < 1e-12);
    }

    #[test]
    fn solver_matches_exhaustive_search((x, y, _) in cloud_triple(1..=6)) {
        let fast = wasserstein(&x, &y, &cfg()).unwrap();
        let slow = brute_force_wasserstein(&x, &y, &cfg()).unwrap();
        prop_assert!((fast.total_cost - slow.total_cost).abs() < 1e-9);
    }

    #[test]
    fn metric_axioms((x, y, z) in cloud_triple(1..=12)) {
        let d = |a: &PointCloud, b: &PointCloud| wasserstein(a, b, &cfg()).unwrap().distance;
        let (xy, yx, yz, xz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
        prop_assert!(xy >= 0.0);
        prop_assert!((xy - yx).abs() < 1e-9);
        prop_assert!(xz <= xy + yz + 1e-9);
        prop_assert!(d(&x, &x) < 1e-9);
    }

    #[test]
    fn distance_is_isometry_invariant((x, y, _) in cloud_triple(1..=12), g in element()) {
        let base = wasserstein(&x, &y, &cfg()).unwrap().distance;
        let moved = wasserstein(&apply_element(&g, &x), &apply_element(&g, &y), &cfg()).unwrap().distance;
        prop_assert!((base - moved).abs() < 1e-9);
    }

    #[test]
    fn distance_ignores_ordering((x, y, _) in cloud_triple(2..=12), shift in 1usize..12) {
        let base = wasserstein(&x, &y, &cfg()).unwrap().distance;
        let mut pts = x.points().to_vec();
        let len = pts.len();
        pts.rotate_left(shift % len);
        pts.reverse();
        let shuffled = PointCloud::new(pts).unwrap();
        let mut ypts = y.points().to_vec();
        let last = ypts.len() - 1;
        ypts.swap(0, last);
        let yshuffled = PointCloud::new(ypts).unwrap();
        let other = wasserstein(&shuffled, &yshuffled, &cfg()).unwrap().distance;
        prop_assert!((base - other).abs() < 1e-9);
    }

    #[test]
    fn optimum_beats_identity_pairing((x, y, _) in cloud_triple(1..=15)) {
        let r = wasserstein(&x, &y, &cfg()).unwrap();
        let identity: Vec<usize> = (0..x.len()).collect();
        let bound = cost_matrix(&x, &y, 2.0).unwrap().pairing_cost(&identity);
        prop_assert!(r.total_cost <= bound + 1e-12);
        let mut seen = r.assignment.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, identity);
    }

    #[test]
    fn distances_for_higher_orders_agree_with_oracle((x, y, _) in cloud_triple(1..=5), p in 1.0..4.0f64) {
        let c = TransportConfig { p, ..cfg() };
        let fast = wasserstein(&x, &y, &c).unwrap();
        let slow = brute_force_wasserstein(&x, &y, &c).unwrap();
        prop_assert!((fast.total_cost - slow.total_cost).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cost_is_invariant_under_own_elements(n in 2usize..=8, pick in 0usize..16, x in cloud_of(3..=14)) {
        let group = DihedralGroup::new(n).unwrap();
        let g = group.elements()[pick % group.order()];
        let base = group_cost(&group, &x, &cfg()).unwrap().mean_cost;
        let moved = group_cost(&group, &apply_element(&g, &x), &cfg()).unwrap().mean_cost;
        prop_assert!((base - moved).abs() < 1e-9);
    }

    // C(D_n, gX) = mean over the conjugated element set g^-1 D_n g of d(X, σX)^2,
    // for g from an unrelated D_m, working in D_lcm(n, m).
    #[test]
    fn cost_transforms_by_conjugation(n in 2usize..=6, m in 2usize..=6, pick in 0usize..12, x in cloud_of(3..=12)) {
        let l = n * m / gcd(n, m);
        let g_small = DihedralGroup::new(m).unwrap().elements()[pick % (2 * m)];
        let g = g_small.embed(l).unwrap();
        let conjugated: Vec<GroupElement> = DihedralGroup::new(n)
            .unwrap()
            .elements()
            .iter()
            .map(|h| conjugate_element(&g, &h.embed(l).unwrap()).unwrap())
            .collect();
        let lhs = group_cost(&DihedralGroup::new(n).unwrap(), &apply_element(&g, &x), &cfg()).unwrap().mean_cost;
        let rhs = element_set_cost(&conjugated, &x, &cfg()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn cost_is_stable_under_perturbation(n in 2usize..=6, x in cloud_of(4..=12), shifts in prop::collection::vec((-0.3..0.3f64, -0.3..0.3f64), 12)) {
        let y = PointCloud::new(
            x.iter().zip(&shifts).map(|(p, s)| Point::new(p.x + s.0, p.y + s.1)).collect(),
        ).unwrap();
        let group = DihedralGroup::new(n).unwrap();
        let cx = group_cost(&group, &x, &cfg()).unwrap();
        let cy = group_cost(&group, &y, &cfg()).unwrap().mean_cost;
        let m = cx.per_element.iter().map(|e| e.squared_distance.sqrt()).fold(0.0, f64::max);
        let d = wasserstein(&x, &y, &cfg()).unwrap().distance;
        prop_assert!((cx.mean_cost - cy).abs() <= stability_bound(m, d) + 1e-9);
    }

    #[test]
    fn occam_matches_direct_comparison(small in 1usize..=4, factor in 2usize..=3, x in cloud_of(3..=12)) {
        let (s, l) = (DihedralGroup::new(small).unwrap(), DihedralGroup::new(small * factor).unwrap());
        let strict = TransportConfig { tolerance: f64::MIN_POSITIVE, ..cfg() };
        let occam = occam_criterion(&s, &l, &x, &strict).unwrap();
        let cs = group_cost(&s, &x, &cfg()).unwrap().mean_cost;
        let cl = group_cost(&l, &x, &cfg()).unwrap().mean_cost;
        prop_assert_eq!(occam.simpler_preferred, cs < cl);
        prop_assert!((occam.lhs - cs).abs() < 1e-12);
    }

    #[test]
    fn cost_report_is_consistent(n in 1usize..=8, x in cloud_of(1..=12)) {
        let r = group_cost(&DihedralGroup::new(n).unwrap(), &x, &cfg()).unwrap();
        prop_assert_eq!(r.per_element.len(), 2 * n);
        prop_assert!(r.per_element[0].squared_distance.abs() < 1e-12);
        let mean = r.per_element.iter().map(|e| e.squared_distance).sum::<f64>() / (2 * n) as f64;
        prop_assert!((mean - r.mean_cost).abs() < 1e-15);
        prop_assert!(r.per_element.iter().all(|e| e.squared_distance >= 0.0));
    }
}

#[test]
fn conjugation_preserves_kind_exhaustively() {
    for n in 1..=8 {
        let elements = DihedralGroup::new(n).unwrap().elements();
        for g in &elements {
            for h in &elements {
                let c = conjugate_element(g, h).unwrap();
                assert_eq!(c.kind(), h.kind(), "n={n} g={g} h={h}");
                assert_eq!(c, g.inverse().compose(h).unwrap().compose(g).unwrap());
            }
        }
    }
}
