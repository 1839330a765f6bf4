//! Boundary contribution graphs and their volumes.
//!
//! Vertices are `0..n`. The directed edge leaving `v` is `v -> next[v]` and is identified
//! with `v`; its length is `x_v`. The wavy edge at `v` joins it to `mate[v]`.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::UnionFind;
use crate::error::{Error, Result};
use crate::exactalg::{int, Rational};
use crate::polytope::HPolytope;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BcLoop {
    pub new: i64,
    pub old: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BcGraph {
    pub next: Vec<usize>,
    pub mate: Vec<usize>,
    pub loops: Vec<BcLoop>,
    /// New-face perimeters keyed by the smallest vertex of the face.
    pub new_perimeter: BTreeMap<usize, i64>,
    /// Old-face perimeters keyed by the smallest directed-edge tail of the face.
    pub old_perimeter: BTreeMap<usize, i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BcJson {
    vertices: usize,
    #[serde(default)]
    directed: Vec<(usize, usize)>,
    #[serde(default)]
    wavy: Vec<(usize, usize)>,
    #[serde(default)]
    loops: Vec<BcLoop>,
    #[serde(default)]
    new: BTreeMap<String, i64>,
    #[serde(default)]
    old: BTreeMap<String, i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VolumeBackend {
    #[default]
    Lasserre,
    Triangulation,
}

fn cycles_of(f: impl Fn(usize) -> usize, n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut v = s;
        while !seen[v] {
            seen[v] = true;
            c.push(v);
            v = f(v);
        }
        out.push(c);
    }
    out
}

fn is_permutation(p: &[usize]) -> bool {
    let mut hit = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut hit[x], true))
}

impl BcGraph {
    pub fn vertex_count(&self) -> usize {
        self.next.len()
    }

    pub fn loop_only(loops: Vec<BcLoop>) -> Self {
        Self { next: vec![], mate: vec![], loops, new_perimeter: BTreeMap::new(), old_perimeter: BTreeMap::new() }
    }

    /// Cycles of `next`, each starting at its smallest vertex.
    pub fn new_faces(&self) -> Vec<Vec<usize>> {
        cycles_of(|v| self.next[v], self.vertex_count())
    }

    /// Old faces as lists of directed-edge tails, orbits of `mate . next`.
    pub fn old_faces(&self) -> Vec<Vec<usize>> {
        cycles_of(|v| self.mate[self.next[v]], self.vertex_count())
    }

    /// New face (smallest vertex) of every vertex.
    pub fn face_of(&self) -> Vec<usize> {
        let mut f = vec![0; self.vertex_count()];
        for c in self.new_faces() {
            for &v in &c {
                f[v] = c[0];
            }
        }
        f
    }

    pub fn wavy_edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count()).filter(|&v| v < self.mate[v]).map(|v| (v, self.mate[v])).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count();
        if self.mate.len() != n {
            return Err(Error::InvalidBc("wavy: every vertex needs exactly one wavy edge".into()));
        }
        if !is_permutation(&self.next) {
            return Err(Error::InvalidBc(
                "directed: every vertex needs exactly one incoming and one outgoing edge".into(),
            ));
        }
        for v in 0..n {
            let m = self.mate[v];
            if m >= n || self.mate[m] != v {
                return Err(Error::InvalidBc(format!("wavy: vertex {v} is not matched consistently")));
            }
            if m == v {
                return Err(Error::InvalidBc(format!("wavy: edge at vertex {v} needs distinct endpoints")));
            }
        }
        let new = self.new_faces();
        let keys: Vec<usize> = new.iter().map(|c| c[0]).collect();
        if keys.iter().copied().ne(self.new_perimeter.keys().copied()) {
            return Err(Error::InvalidBc(format!("new: perimeters must be given exactly for faces {keys:?}")));
        }
        for (f, &p) in &self.new_perimeter {
            if p == 0 {
                return Err(Error::InvalidBc(format!("new: face {f} has perimeter 0")));
            }
        }
        let old = self.old_faces();
        let okeys: Vec<usize> = old.iter().map(|c| *c.iter().min().unwrap()).collect();
        let mut sorted = okeys.clone();
        sorted.sort_unstable();
        if sorted.iter().copied().ne(self.old_perimeter.keys().copied()) {
            return Err(Error::InvalidBc(format!("old: perimeters must be given exactly for faces {sorted:?}")));
        }
        for (i, l) in self.loops.iter().enumerate() {
            if l.new == 0 {
                return Err(Error::InvalidBc(format!("loops: loop {i} has perimeter 0")));
            }
            if l.new != l.old {
                return Err(Error::InvalidBc(format!("loops: loop {i} has new perimeter {} but old {}", l.new, l.old)));
            }
        }
        let mut uf = UnionFind::new(n);
        for v in 0..n {
            uf.union(v, self.next[v]);
            uf.union(v, self.mate[v]);
        }
        let mut sums: BTreeMap<usize, i64> = BTreeMap::new();
        for (f, &p) in &self.new_perimeter {
            *sums.entry(uf.find(*f)).or_insert(0) += p;
        }
        for (f, &p) in &self.old_perimeter {
            *sums.entry(uf.find(*f)).or_insert(0) -= p;
        }
        if let Some((c, s)) = sums.iter().find(|(_, &s)| s != 0) {
            return Err(Error::InvalidBc(format!(
                "perimeters: component of vertex {c} has new minus old perimeter sum {s}"
            )));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: BcJson = crate::spec_core::parse_json(s, "BC graph")?;
        let n = raw.vertices;
        let mut next = vec![usize::MAX; n];
        for &(u, v) in &raw.directed {
            if u >= n || v >= n {
                return Err(Error::InvalidBc(format!("directed: edge [{u},{v}] out of range")));
            }
            if next[u] != usize::MAX {
                return Err(Error::InvalidBc(format!("directed: vertex {u} has two outgoing edges")));
            }
            next[u] = v;
        }
        if let Some(v) = next.iter().position(|&x| x == usize::MAX) {
            return Err(Error::InvalidBc(format!("directed: vertex {v} has no outgoing edge")));
        }
        let mut mate = vec![usize::MAX; n];
        for &(u, v) in &raw.wavy {
            if u >= n || v >= n {
                return Err(Error::InvalidBc(format!("wavy: edge [{u},{v}] out of range")));
            }
            if mate[u] != usize::MAX || mate[v] != usize::MAX {
                return Err(Error::InvalidBc(format!("wavy: edge [{u},{v}] reuses a vertex")));
            }
            mate[u] = v;
            mate[v] = u;
        }
        if let Some(v) = mate.iter().position(|&x| x == usize::MAX) {
            return Err(Error::InvalidBc(format!("wavy: vertex {v} has no wavy edge")));
        }
        let keyed = |m: BTreeMap<String, i64>, field: &str| -> Result<BTreeMap<usize, i64>> {
            m.into_iter()
                .map(|(k, v)| {
                    k.parse::<usize>()
                        .map(|k| (k, v))
                        .map_err(|_| Error::InvalidBc(format!("{field}: face key {k:?} is not a vertex index")))
                })
                .collect()
        };
        let g = BcGraph {
            next,
            mate,
            loops: raw.loops,
            new_perimeter: keyed(raw.new, "new")?,
            old_perimeter: keyed(raw.old, "old")?,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let raw = BcJson {
            vertices: self.vertex_count(),
            directed: (0..self.vertex_count()).map(|v| (v, self.next[v])).collect(),
            wavy: self.wavy_edges(),
            loops: self.loops.clone(),
            new: self.new_perimeter.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            old: self.old_perimeter.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        };
        serde_json::to_string(&raw).expect("serializable")
    }
}

pub fn validate_bc(g: &BcGraph) -> Result<()> {
    g.validate()
}

/// Directed edges completing the wavy edges to a spanning forest, scanning in `order`.
pub fn omega_basis_with(g: &BcGraph, order: &[usize]) -> Vec<usize> {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    for v in 0..n {
        uf.union(v, g.mate[v]);
    }
    let mut out = Vec::new();
    for &e in order {
        if uf.union(e, g.next[e]) {
            out.push(e);
        }
    }
    out
}

pub fn omega_basis(g: &BcGraph) -> Vec<usize> {
    let order: Vec<usize> = (0..g.vertex_count()).collect();
    omega_basis_with(g, &order)
}

/// Coordinates of the metric space in a spanning-forest chart.
///
/// Tree edge `basis[k]` has length `y_k`. A non-tree edge `e` has length
/// `s_e - sum_k coeff[e][k] y_k`, where `s_e` is the (integer) signed length of its
/// fundamental circuit.
#[derive(Clone, Debug)]
pub struct MetricPolytope {
    pub basis: Vec<usize>,
    pub non_tree: Vec<usize>,
    pub coeff: Vec<Vec<i64>>,
    /// Sign of the new-face perimeter at every vertex.
    pub sign: Vec<i64>,
    /// For each face, new then old, positions in `non_tree` of its edges and its perimeter.
    /// Every face is a circuit, so these are linear conditions on the circuit values.
    pub faces: Vec<(Vec<usize>, i64)>,
    /// Perimeter of the new face of every vertex.
    pub perimeter: Vec<i64>,
    pub bound: i64,
}

impl MetricPolytope {
    pub fn new(g: &BcGraph, basis: Vec<usize>) -> Self {
        let n = g.vertex_count();
        let m = basis.len();
        // forest adjacency: (neighbor, Some((k, forward)) for tree edges, None for wavy)
        let mut adj: Vec<Vec<(usize, Option<(usize, bool)>)>> = vec![Vec::new(); n];
        for v in 0..n {
            adj[v].push((g.mate[v], None));
        }
        let mut in_tree = vec![None; n];
        for (k, &e) in basis.iter().enumerate() {
            in_tree[e] = Some(k);
            adj[e].push((g.next[e], Some((k, true))));
            adj[g.next[e]].push((e, Some((k, false))));
        }
        let non_tree: Vec<usize> = (0..n).filter(|&e| in_tree[e].is_none()).collect();
        let mut coeff = Vec::with_capacity(non_tree.len());
        for &e in &non_tree {
            // path in the forest from head(e) back to e
            let (start, goal) = (g.next[e], e);
            let mut prev: Vec<Option<(usize, Option<(usize, bool)>)>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut q = VecDeque::from([start]);
            while let Some(v) = q.pop_front() {
                if v == goal {
                    break;
                }
                for &(w, lab) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        prev[w] = Some((v, lab));
                        q.push_back(w);
                    }
                }
            }
            assert!(seen[goal], "basis does not span the circuit of edge {e}");
            let mut c = vec![0i64; m];
            let mut v = goal;
            while v != start {
                let (p, lab) = prev[v].unwrap();
                if let Some((k, fwd)) = lab {
                    c[k] += if fwd { 1 } else { -1 };
                }
                v = p;
            }
            coeff.push(c);
        }
        let face_of = g.face_of();
        let perimeter: Vec<i64> = (0..n).map(|v| g.new_perimeter[&face_of[v]]).collect();
        let sign: Vec<i64> = perimeter.iter().map(|p| p.signum()).collect();
        let pos: BTreeMap<usize, usize> = non_tree.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut faces: Vec<(Vec<usize>, i64)> = g
            .new_faces()
            .into_iter()
            .map(|c| (c.iter().filter_map(|v| pos.get(v).copied()).collect(), g.new_perimeter[&c[0]]))
            .collect();
        for c in g.old_faces() {
            let key = *c.iter().min().unwrap();
            faces.push((c.iter().filter_map(|v| pos.get(v).copied()).collect(), g.old_perimeter[&key]));
        }
        let bound = g.new_perimeter.values().map(|p| p.abs()).sum();
        Self { basis, non_tree, coeff, sign, faces, perimeter, bound }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Integer range of each circuit value, from `0 <= sign * x <= |perimeter|` on every edge.
    pub fn circuit_ranges(&self) -> Vec<(i64, i64)> {
        let span = |e: usize| {
            let p = self.perimeter[e];
            (p.min(0), p.max(0))
        };
        self.non_tree
            .iter()
            .zip(&self.coeff)
            .map(|(&e, c)| {
                let (mut lo, mut hi) = span(e);
                for (k, &ck) in c.iter().enumerate() {
                    let (a, b) = span(self.basis[k]);
                    let (a, b) = if ck >= 0 { (ck * a, ck * b) } else { (ck * b, ck * a) };
                    lo += a;
                    hi += b;
                }
                (lo.max(-self.bound), hi.min(self.bound))
            })
            .collect()
    }

    /// All integer circuit values compatible with the face perimeters.
    pub fn circuit_assignments(&self) -> Vec<Vec<i64>> {
        let ranges = self.circuit_ranges();
        let k = self.non_tree.len();
        let mut member = vec![vec![false; self.faces.len()]; k];
        for (r, (edges, _)) in self.faces.iter().enumerate() {
            for &i in edges {
                member[i][r] = true;
            }
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        let mut partial = vec![0i64; self.faces.len()];
        self.assign(&ranges, &member, &mut cur, &mut partial, &mut out);
        out
    }

    fn assign(
        &self,
        ranges: &[(i64, i64)],
        member: &[Vec<bool>],
        cur: &mut Vec<i64>,
        partial: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let i = cur.len();
        if i == ranges.len() {
            out.push(cur.clone());
            return;
        }
        let (lo, hi) = ranges[i];
        'values: for v in lo..=hi {
            for (r, (edges, p)) in self.faces.iter().enumerate() {
                if !member[i][r] {
                    continue;
                }
                let rest = p - partial[r] - v;
                let (a, b) =
                    edges.iter().filter(|&&j| j > i).fold((0, 0), |(a, b), &j| (a + ranges[j].0, b + ranges[j].1));
                if rest < a || rest > b {
                    continue 'values;
                }
            }
            for r in 0..self.faces.len() {
                if member[i][r] {
                    partial[r] += v;
                }
            }
            cur.push(v);
            self.assign(ranges, member, cur, partial, out);
            cur.pop();
            for r in 0..self.faces.len() {
                if member[i][r] {
                    partial[r] -= v;
                }
            }
        }
    }

    /// Closed polytope of the slice with circuit values `s`, or `None` when the open slice is empty
    /// for a reason invisible to the closure (a coordinate forced to the boundary).
    pub fn slice(&self, s: &[i64]) -> Option<HPolytope> {
        let m = self.dim();
        let mut rows = Vec::new();
        for (k, &e) in self.basis.iter().enumerate() {
            let mut a = vec![Rational::zero(); m];
            a[k] = int(-self.sign[e]);
            rows.push((a, Rational::zero()));
        }
        for (i, &e) in self.non_tree.iter().enumerate() {
            let sg = self.sign[e];
            // sg * (s_e - c.y) > 0
            let b = sg * s[i];
            if self.coeff[i].iter().all(|&c| c == 0) {
                if b <= 0 {
                    return None;
                }
                continue;
            }
            rows.push((self.coeff[i].iter().map(|&c| int(sg * c)).collect(), int(b)));
        }
        Some(HPolytope::new(m, rows))
    }

    pub fn integral(&self, backend: VolumeBackend) -> Rational {
        self.circuit_assignments()
            .par_iter()
            .map(|s| match self.slice(s) {
                None => Rational::zero(),
                Some(p) if p.dim == 0 => Rational::one(),
                Some(p) => match backend {
                    VolumeBackend::Lasserre => p.volume_lasserre(),
                    VolumeBackend::Triangulation => p.volume_triangulation(),
                },
            })
            .reduce(Rational::zero, |a, b| a + b)
    }
}

/// Number of wavy edges joining new faces of opposite perimeter sign.
pub fn alternations(g: &BcGraph) -> usize {
    let f = g.face_of();
    g.wavy_edges()
        .into_iter()
        .filter(|&(u, v)| g.new_perimeter[&f[u]].signum() != g.new_perimeter[&f[v]].signum())
        .count()
}

pub fn bc_volume_with(g: &BcGraph, order: &[usize], backend: VolumeBackend) -> Result<Rational> {
    g.validate()?;
    let chart = MetricPolytope::new(g, omega_basis_with(g, order));
    let integral = chart.integral(backend);
    let prod: Rational = g.new_perimeter.values().map(|&p| int(p)).product();
    let v = (prod * integral).abs();
    Ok(if alternations(g) % 2 == 1 { -v } else { v })
}

/// Signed volume of a BC graph.
pub fn bc_volume(g: &BcGraph) -> Result<Rational> {
    let order: Vec<usize> = (0..g.vertex_count()).collect();
    bc_volume_with(g, &order, VolumeBackend::Lasserre)
}

/// All BC graphs over a tree with the given net vertex degrees, one per choice of cyclic
/// orders at the vertices.
pub fn tree_bc_graphs(nets: &[i64], edges: &[(usize, usize)]) -> Vec<BcGraph> {
    let r = nets.len();
    if edges.is_empty() {
        return nets.iter().map(|&d| BcLoop { new: d, old: d }).map(|l| BcGraph::loop_only(vec![l])).collect();
    }
    let n = 2 * edges.len();
    let mut mate = vec![0; n];
    let mut flags: Vec<Vec<usize>> = vec![Vec::new(); r];
    for (i, &(a, b)) in edges.iter().enumerate() {
        mate[2 * i] = 2 * i + 1;
        mate[2 * i + 1] = 2 * i;
        flags[a].push(2 * i);
        flags[b].push(2 * i + 1);
    }
    let mut orders: Vec<Vec<usize>> = vec![vec![0; n]];
    for fl in &flags {
        let mut grown = Vec::new();
        for rest in crate::combinat::permutations(fl.len().saturating_sub(1)) {
            let cyc: Vec<usize> = std::iter::once(fl[0]).chain(rest.iter().map(|&i| fl[i + 1])).collect();
            for base in &orders {
                let mut next = base.clone();
                for (j, &f) in cyc.iter().enumerate() {
                    next[f] = cyc[(j + 1) % cyc.len()];
                }
                grown.push(next);
            }
        }
        orders = grown;
    }
    let total: i64 = nets.iter().sum();
    orders
        .into_iter()
        .map(|next| {
            let new_perimeter = flags.iter().zip(nets).map(|(fl, &d)| (*fl.iter().min().unwrap(), d)).collect();
            let mut g =
                BcGraph { next, mate: mate.clone(), loops: vec![], new_perimeter, old_perimeter: BTreeMap::new() };
            for c in g.old_faces() {
                g.old_perimeter.insert(*c.iter().min().unwrap(), 0);
            }
            let first = *g.old_perimeter.keys().next().unwrap();
            g.old_perimeter.insert(first, total);
            g
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_face(p1: i64, p2: i64) -> BcGraph {
        BcGraph {
            next: vec![0, 1],
            mate: vec![1, 0],
            loops: vec![],
            new_perimeter: BTreeMap::from([(0, p1), (1, p2)]),
            old_perimeter: BTreeMap::from([(0, p1 + p2)]),
        }
    }

    #[test]
    fn validation() {
        assert!(BcGraph::loop_only(vec![BcLoop { new: 3, old: 3 }]).validate().is_ok());
        assert!(two_face(1, 2).validate().is_ok());
        let e = two_face(0, 2).validate().unwrap_err();
        assert!(e.to_string().contains("perimeter 0"));
        let mut g = two_face(1, 2);
        g.old_perimeter.insert(0, 4);
        assert!(g.validate().is_err());
        assert!(BcGraph::loop_only(vec![BcLoop { new: 3, old: 2 }]).validate().is_err());
    }

    #[test]
    fn basis_examples() {
        assert!(omega_basis(&two_face(1, 2)).is_empty());
        // faces {0}, {1,2}, {3}: wavy 0-1, 2-3
        let g = BcGraph {
            next: vec![0, 2, 1, 3],
            mate: vec![1, 0, 3, 2],
            loops: vec![],
            new_perimeter: BTreeMap::from([(0, 1), (1, 2), (3, 1)]),
            old_perimeter: BTreeMap::from([(0, 4)]),
        };
        assert_eq!(g.old_faces().len(), 1);
        g.validate().unwrap();
        assert_eq!(omega_basis(&g).len(), 1);
        assert!(omega_basis(&BcGraph::loop_only(vec![BcLoop { new: 1, old: 1 }])).is_empty());
    }

    #[test]
    fn volume_examples() {
        assert_eq!(bc_volume(&two_face(1, 2)).unwrap(), int(2));
        assert_eq!(bc_volume(&two_face(1, -1)).unwrap(), int(-1));
        assert_eq!(bc_volume(&BcGraph::loop_only(vec![BcLoop { new: 5, old: 5 }])).unwrap(), int(1));
    }

    #[test]
    fn json_round_trip() {
        let g = two_face(1, 2);
        let s = g.to_json();
        assert_eq!(BcGraph::from_json(&s).unwrap(), g);
        let e = BcGraph::from_json(r#"{"vertices":1,"directed":[[0,0]],"wavy":[]}"#).unwrap_err();
        assert!(e.to_string().contains("wavy"));
    }
}
