mod common;

use tree_poisson::boundary::{
    beta, check_eigen_characterization, limit_recover_clopen, reconstruct_function,
    EdgeCoefficients,
};
use tree_poisson::hoelder::{boundary_distance, lipschitz_seminorm, Theta};
use tree_poisson::poisson::{eigen_residual, laplacian, potential};
use tree_poisson::{
    poisson_transform, BoundaryMeasure, ClopenSet, Complex64, CylinderFunction, SpectralParam,
    Tree, UnitSquareSampler, VertexFunction, ROOT,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zp(re: f64, im: f64) -> SpectralParam {
    SpectralParam::new(c(re, im)).unwrap()
}

#[test]
fn build_examples() {
    assert_eq!(Tree::regular(2, 1).unwrap().len(), 4);
    let t = Tree::regular(2, 3).unwrap();
    assert_eq!(t.len(), 22);
    let mut count = 0;
    let mut stack = vec![ROOT];
    while let Some(v) = stack.pop() {
        count += 1;
        stack.extend_from_slice(t.children(v));
    }
    assert_eq!(count, 22);
    let line = Tree::regular(1, 5).unwrap();
    assert_eq!((line.len(), line.children(ROOT).len()), (11, 2));
}

#[test]
fn bracket_and_meet_against_path_oracle() {
    for seed in 0..5 {
        let t = common::random_tree(seed, 4, 3);
        for x in 0..t.len() {
            for &l in t.leaves() {
                assert_eq!(
                    t.horocycle_bracket(x, l).unwrap() as i32,
                    common::bracket(&t, x, l)
                );
            }
            for y in (0..t.len()).step_by(3) {
                assert_eq!(t.meet(x, y), common::common_vertex(&t, x, y));
                assert_eq!(t.distance(x, y), common::bfs_distance(&t, x, y));
            }
        }
    }
}

#[test]
fn bracket_examples() {
    let t = Tree::regular(2, 4).unwrap();
    let leaf = t.leaves()[5];
    let path = t.path_from_root(leaf);
    for &x in &path {
        assert_eq!(t.horocycle_bracket(x, leaf).unwrap(), t.depth(x) as i64);
    }
    let other = *t.children(ROOT).iter().find(|&&v| v != path[1]).unwrap();
    let deep = t.children(t.children(other)[0])[1];
    assert_eq!(t.horocycle_bracket(deep, leaf).unwrap(), -3);
    assert_eq!(t.horocycle_bracket(ROOT, leaf).unwrap(), 0);
}

#[test]
fn cylinder_masses_against_leaf_sums() {
    let t = common::random_tree(11, 4, 3);
    let mu = BoundaryMeasure::random(&t, 4);
    for v in 0..t.len() {
        assert!((mu.cylinder(v) - common::cylinder_mass(&mu, v)).norm() < 1e-12);
    }
}

#[test]
fn transform_against_leaf_sum() {
    for (seed, zz) in [
        (1, c(2.0, 0.0)),
        (2, c(0.5, 0.5)),
        (3, c(-1.5, 0.0)),
        (4, c(1.7, 0.3)),
    ] {
        let t = common::random_tree(seed, 5, 3);
        let mu = BoundaryMeasure::random(&t, seed);
        let f = poisson_transform(SpectralParam::new(zz).unwrap(), &mu).unwrap();
        let oracle = common::transform(zz, &mu);
        let scale = oracle.iter().map(|v| v.norm()).fold(1.0, f64::max);
        assert!(common::max_abs_diff(f.values(), &oracle) < 1e-12 * scale);
    }
}

#[test]
fn rotation_invariant_transform_depth_one() {
    let t = Tree::regular(2, 5).unwrap();
    let mu = BoundaryMeasure::rotation_invariant(&t, ROOT).unwrap();
    let oracle = common::transform(c(2.0, 0.0), &mu);
    for &x in t.level(1) {
        assert!((oracle[x] - 1.0).norm() < 1e-14);
    }
}

#[test]
fn laplacian_and_potential_against_direct_average() {
    let t = Tree::regular(2, 3).unwrap();
    let mut s = UnitSquareSampler::new(6);
    let vals: Vec<Complex64> = (0..t.len()).map(|_| s.next_complex()).collect();
    let f = VertexFunction::new(&t, vals.clone()).unwrap();
    let lap = laplacian(&f);
    for &x in t.level(1) {
        let nbrs = [ROOT, t.children(x)[0], t.children(x)[1]];
        let mean = nbrs.iter().map(|&u| vals[u]).sum::<Complex64>() / 3.0;
        assert!((lap.get(x).unwrap() - mean).norm() < 1e-15);
    }
    let chi = potential(&t, zp(0.5, 0.5));
    let z = c(0.5, 0.5);
    assert!((chi.get(ROOT).unwrap() - (z + 2.0 / z) / 3.0).norm() < 1e-15);
}

#[test]
fn beta_against_direct_formula() {
    let t = common::random_tree(21, 5, 3);
    let zz = c(1.3, -0.7);
    let mut s = UnitSquareSampler::new(3);
    let vals: Vec<Complex64> = (0..t.len()).map(|_| s.next_complex()).collect();
    let f = VertexFunction::new(&t, vals.clone()).unwrap();
    let b = beta(SpectralParam::new(zz).unwrap(), &f).unwrap();
    let oracle = common::beta(&t, zz, &vals);
    for (v, want) in oracle.iter().enumerate().skip(1) {
        assert!((b.at_child(v) - want).norm() < 1e-13 * want.norm().max(1.0));
    }
}

#[test]
fn beta_of_transform_is_edge_flow_exhaustively() {
    // every edge of small trees, transform taken from the leaf-sum oracle
    for (q, d) in [(1, 4), (2, 2), (2, 3), (2, 4)] {
        let t = Tree::regular(q, d).unwrap();
        for seed in 0..3 {
            let mu = BoundaryMeasure::random(&t, seed);
            for zz in [c(2.0, 0.0), c(0.5, 0.5), c(-1.5, 0.0)] {
                let f = common::transform(zz, &mu);
                let flow = common::beta(&t, zz, &f);
                for (v, got) in flow.iter().enumerate().skip(1) {
                    let e = t.edge_into(v).unwrap();
                    assert!((got - mu.edge_flow(e)).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn random_function_fails_eigen_characterization() {
    let t = Tree::regular(2, 4).unwrap();
    let mut s = UnitSquareSampler::new(12);
    let f = VertexFunction::new(&t, (0..t.len()).map(|_| s.next_complex()).collect()).unwrap();
    let r = check_eigen_characterization(zp(2.0, 0.0), &f).unwrap();
    assert!(r.compat_gap > 1e-3 && r.root_gap > 1e-3);
    assert!(eigen_residual(&f, zp(2.0, 0.0)).max_raw() > 1e-3);
}

#[test]
fn perturbation_by_zero_flow_solution() {
    // adding z^{-depth} keeps every compatibility law and moves only the root condition
    let t = Tree::regular(2, 5).unwrap();
    let z = zp(1.5, 0.5);
    let f = poisson_transform(z, &BoundaryMeasure::random(&t, 8)).unwrap();
    let h = reconstruct_function(z, &EdgeCoefficients::zero(&t), c(1.0, 0.0)).unwrap();
    let g = f.linear_combination(c(1.0, 0.0), &h, c(1.0, 0.0)).unwrap();
    let r = check_eigen_characterization(z, &g).unwrap();
    assert!(r.compat_gap < 1e-12);
    assert!((r.root_gap - 1.0).abs() < 1e-12);
    // and the perturbation is still an eigenfunction off the root
    let res = eigen_residual(&h, z);
    for v in 1..t.len() {
        if let Some(x) = res.raw.get(v) {
            assert!(x.norm() < 1e-12);
        }
    }
}

#[test]
fn clopen_recovery_uses_comparable_vertices() {
    let t = Tree::regular(2, 6).unwrap();
    let u = ClopenSet::new(&t, [t.level(2)[1], t.level(3)[9], 2]).unwrap();
    for n in 0..=6 {
        assert_eq!(
            u.rays_at_depth(n).unwrap(),
            common::rays_at_depth(&t, u.members(), n)
        );
    }
    let z = zp(3.0, 0.0);
    let mu = BoundaryMeasure::random(&t, 14);
    let f = poisson_transform(z, &mu).unwrap();
    let whole = limit_recover_clopen(z, &f, &ClopenSet::whole(&t), 6).unwrap();
    let last = whole.last().unwrap();
    assert!((last - mu.total()).norm() < 1e-2 * mu.total().norm());
}

#[test]
fn seminorm_against_pairwise_oracle() {
    let t = common::random_tree(5, 4, 3);
    let mut s = UnitSquareSampler::new(77);
    for theta in [0.2, 0.5, 0.9] {
        let th = Theta::new(theta).unwrap();
        for level in 0..=4 {
            let vals: Vec<Complex64> = (0..t.level(level).len())
                .map(|_| s.next_complex())
                .collect();
            let p = CylinderFunction::new(&t, level, vals.clone()).unwrap();
            let oracle = common::seminorm(&t, theta, level, &vals);
            assert!((lipschitz_seminorm(th, &p) - oracle).abs() <= 1e-13 * oracle.max(1.0));
        }
    }
}

#[test]
fn metric_changes_by_bounded_factor_under_rerooting() {
    let t = Tree::regular(2, 6).unwrap();
    let d = t.max_depth();
    for &nbr in t.children(ROOT) {
        let rr = t.reroot_at_neighbor(nbr).unwrap();
        // the cylinder of an old leaf lies in the cylinder of this new leaf
        let image = |l: usize| {
            let kept = if t.is_ancestor_or_equal(nbr, l) {
                l
            } else {
                t.ancestor_at(l, d - 2)
            };
            rr.new_id(kept).unwrap()
        };
        for theta in [0.3, 0.7] {
            let th = Theta::new(theta).unwrap();
            for &a in t.leaves() {
                for &b in t.leaves().iter().step_by(5) {
                    let (na, nb) = (image(a), image(b));
                    assert!(rr.tree.is_leaf(na) && rr.tree.is_leaf(nb));
                    if na == nb {
                        continue;
                    }
                    let d_old = boundary_distance(&t, th, a, b).unwrap();
                    let d_new = boundary_distance(&rr.tree, th, na, nb).unwrap();
                    assert!(theta * d_new <= d_old * (1.0 + 1e-15));
                    assert!(d_old <= d_new / theta * (1.0 + 1e-15));
                }
            }
        }
    }
}
