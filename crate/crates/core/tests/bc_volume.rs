use std::collections::BTreeMap;

use ogw_core::bc_volume::{
    bc_volume, bc_volume_with, omega_basis_with, tree_bc_graphs, BcGraph, MetricPolytope, VolumeBackend,
};
use ogw_core::exactalg::{int, rat_pow};
use ogw_core::Rational;
use rand::seq::SliceRandom;
use rand::{rngs::StdRng, SeedableRng};

fn shapes() -> Vec<Vec<(usize, usize)>> {
    vec![vec![], vec![(0, 1)], vec![(0, 1), (1, 2)], vec![(0, 1), (1, 2), (2, 3)], vec![(0, 1), (0, 2), (0, 3)]]
}

fn vertex_count(edges: &[(usize, usize)]) -> usize {
    edges.len() + 1
}

fn nonzero_nets(r: usize, max: i64) -> Vec<Vec<i64>> {
    let vals: Vec<i64> = (-max..=max).filter(|&x| x != 0).collect();
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out.into_iter().flat_map(|v| vals.iter().map(move |&x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn tree_rhs(nets: &[i64], edges: &[(usize, usize)]) -> Rational {
    let mut val = vec![0i64; nets.len()];
    for &(a, b) in edges {
        val[a] += 1;
        val[b] += 1;
    }
    nets.iter().zip(&val).map(|(&d, &k)| rat_pow(&int(d), k)).product()
}

#[test]
fn tree_identity_small() {
    for edges in shapes() {
        let r = vertex_count(&edges);
        for nets in nonzero_nets(r, 2) {
            let graphs = tree_bc_graphs(&nets, &edges);
            let lhs: Rational = graphs.iter().map(|g| bc_volume(g).unwrap()).sum();
            assert_eq!(lhs, tree_rhs(&nets, &edges), "nets {nets:?} edges {edges:?}");
        }
    }
}

#[test]
fn basis_independence() {
    let mut rng = StdRng::seed_from_u64(7);
    for edges in shapes() {
        let r = vertex_count(&edges);
        for nets in nonzero_nets(r, 2).into_iter().step_by(5) {
            for g in tree_bc_graphs(&nets, &edges) {
                let base = bc_volume(&g).unwrap();
                let mut order: Vec<usize> = (0..g.vertex_count()).collect();
                for _ in 0..3 {
                    order.shuffle(&mut rng);
                    assert_eq!(bc_volume_with(&g, &order, VolumeBackend::Lasserre).unwrap(), base);
                }
            }
        }
    }
}

#[test]
fn backends_agree() {
    for edges in shapes() {
        let r = vertex_count(&edges);
        for nets in nonzero_nets(r, 3).into_iter().step_by(7) {
            for g in tree_bc_graphs(&nets, &edges) {
                let order: Vec<usize> = (0..g.vertex_count()).collect();
                assert_eq!(
                    bc_volume_with(&g, &order, VolumeBackend::Lasserre).unwrap(),
                    bc_volume_with(&g, &order, VolumeBackend::Triangulation).unwrap()
                );
            }
        }
    }
}

#[test]
fn scaling() {
    for edges in shapes().into_iter().skip(1) {
        let r = vertex_count(&edges);
        for nets in nonzero_nets(r, 2).into_iter().step_by(3) {
            for g in tree_bc_graphs(&nets, &edges) {
                let order: Vec<usize> = (0..g.vertex_count()).collect();
                let chart = MetricPolytope::new(&g, omega_basis_with(&g, &order));
                let base = chart.integral(VolumeBackend::Lasserre);
                for k in 2..=3i64 {
                    let mut h = g.clone();
                    h.new_perimeter.values_mut().for_each(|p| *p *= k);
                    h.old_perimeter.values_mut().for_each(|p| *p *= k);
                    let c = MetricPolytope::new(&h, omega_basis_with(&h, &order));
                    assert_eq!(c.integral(VolumeBackend::Lasserre), &base * rat_pow(&int(k), chart.dim() as i64));
                }
            }
        }
    }
}

#[test]
fn self_wavy_face() {
    // one new face with two vertices joined by a wavy edge: two old faces
    let g = BcGraph {
        next: vec![1, 0],
        mate: vec![1, 0],
        loops: vec![],
        new_perimeter: BTreeMap::from([(0, 3)]),
        old_perimeter: BTreeMap::from([(0, 1), (1, 2)]),
    };
    g.validate().unwrap();
    assert_eq!(g.old_faces().len(), 2);
    // x_0 = 1, x_1 = 2 forced by integrality
    assert_eq!(bc_volume(&g).unwrap(), int(3));
}
