//! Fixed-point graphs of the circle action and their localization contributions.
//!
//! A graph has vertices over the two fixed points, sphere edges (covers of the
//! full sphere of degree `(d,d)`) joining vertices of opposite sign, and disk
//! edges (covers of one hemisphere) hanging off a single vertex.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinat::{block_permutations, compositions, factorial_u64, functions, UnionFind};
use crate::error::{Error, Result};
use crate::exactalg::{factorial, int, rat, rat_pow, Laurent, Rational};
use crate::psi_hodge::hodge_descendent_integral;
use crate::spec_core::{DescendentProblem, LabelSet, ModuliSpec, Sign, SpecComponent};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FpVertex {
    pub gamma: u32,
    pub mu: Sign,
    pub labels: LabelSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SphereEdge {
    pub plus: usize,
    pub minus: usize,
    pub d: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DiskEdge {
    pub vertex: usize,
    pub d: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Default)]
pub struct FixedPointGraph {
    pub vertices: Vec<FpVertex>,
    pub sphere_edges: Vec<SphereEdge>,
    pub disk_edges: Vec<DiskEdge>,
}

type Deco = (u32, Sign, Vec<String>, Vec<u32>);
pub type CanonKey = (Vec<Deco>, Vec<(usize, usize, u32)>);

/// Tangent weight `mu * 2u / d` of a flag.
pub fn omega(mu: Sign, d: u32) -> Laurent {
    Laurent::monomial(1, rat(2 * mu.value(), d as i64))
}

fn sphere_edge_factor(d: u32) -> Laurent {
    let d64 = d as i64;
    let sign = if d % 2 == 0 { 1 } else { -1 };
    let num = BigInt::from(sign) * num_traits::pow(BigInt::from(d64), 2 * d as usize);
    let f = factorial(d as u64);
    let den = &f * &f * num_traits::pow(BigInt::from(4), d as usize);
    Laurent::monomial(-2 * d64, Rational::new(num, den))
}

fn disk_edge_factor(mu: Sign, d: u32) -> Laurent {
    let d64 = d as i64;
    let sign = if mu == Sign::Minus && d % 2 == 0 { -1 } else { 1 };
    let num = BigInt::from(sign) * num_traits::pow(BigInt::from(d64), d as usize);
    let den = factorial(d as u64) * num_traits::pow(BigInt::from(2), d as usize);
    Laurent::monomial(-d64, Rational::new(num, den))
}

/// Sphere-edge weight including the `1/d` covering factor.
pub fn edge_weight(d: u32) -> Result<Laurent> {
    if d < 1 {
        return Err(Error::Domain("edge degree must be at least 1".into()));
    }
    let two_u = Laurent::monomial(1, int(2));
    let sign = if d % 2 == 0 { 1 } else { -1 };
    let c = Rational::new(
        BigInt::from(sign) * num_traits::pow(BigInt::from(d as i64), 2 * d as usize),
        BigInt::from(d as i64) * factorial(d as u64) * factorial(d as u64),
    );
    Ok(two_u.powi(-2 * d as i64).unwrap().scale(&c))
}

/// Disk-edge weight including the `1/d` covering factor.
pub fn halfedge_weight(mu: Sign, d: u32) -> Result<Laurent> {
    if d < 1 {
        return Err(Error::Domain("edge degree must be at least 1".into()));
    }
    let c = Rational::new(BigInt::from(mu.value()), BigInt::from(d as i64) * factorial(d as u64));
    Ok(omega(mu, d).powi(-(d as i64)).unwrap().scale(&c))
}

impl FixedPointGraph {
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for e in &self.sphere_edges {
            if e.plus >= n || e.minus >= n || e.d == 0 {
                return Err(Error::Domain("sphere edge out of range or of degree 0".into()));
            }
            if self.vertices[e.plus].mu != Sign::Plus || self.vertices[e.minus].mu != Sign::Minus {
                return Err(Error::Domain("sphere edge must join a + vertex to a - vertex".into()));
            }
        }
        for h in &self.disk_edges {
            if h.vertex >= n || h.d == 0 {
                return Err(Error::Domain("disk edge out of range or of degree 0".into()));
            }
        }
        let mut seen = LabelSet::new();
        for v in &self.vertices {
            for l in &v.labels {
                if !seen.insert(l.clone()) {
                    return Err(Error::Domain(format!("label {l:?} on two vertices")));
                }
            }
        }
        Ok(())
    }

    /// Degrees of the flags at `v`: sphere edges first, then disk edges.
    pub fn flag_degrees(&self, v: usize) -> Vec<u32> {
        let mut out: Vec<u32> = self.sphere_edges.iter().filter(|e| e.plus == v || e.minus == v).map(|e| e.d).collect();
        out.extend(self.disk_edges.iter().filter(|h| h.vertex == v).map(|h| h.d));
        out
    }

    pub fn val_plus(&self, v: usize) -> usize {
        self.flag_degrees(v).len() + self.vertices[v].labels.len()
    }

    /// Vertex corresponding to a single point of the domain.
    pub fn is_point_vertex(&self, v: usize) -> bool {
        matches!((self.vertices[v].gamma, self.val_plus(v)), (0, 0) | (0, 1) | (0, 2) | (1, 0))
    }

    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut uf = UnionFind::new(n);
        for e in &self.sphere_edges {
            uf.union(e.plus, e.minus);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            groups.entry(uf.find(v)).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// The moduli specification this graph is of type, one component per connected component.
    pub fn contraction(&self) -> ModuliSpec {
        let mut comps = Vec::new();
        for vs in self.connected_components() {
            let inside = |v: usize| vs.contains(&v);
            let edges: Vec<&SphereEdge> = self.sphere_edges.iter().filter(|e| inside(e.plus)).collect();
            let tails: Vec<&DiskEdge> = self.disk_edges.iter().filter(|h| inside(h.vertex)).collect();
            let h1 = edges.len() as u32 + 1 - vs.len() as u32;
            let gs = h1 + vs.iter().map(|&v| self.vertices[v].gamma).sum::<u32>();
            let labels: LabelSet = vs.iter().flat_map(|&v| self.vertices[v].labels.iter().cloned()).collect();
            let sphere: u32 = edges.iter().map(|e| e.d).sum();
            let mut d = (sphere, sphere);
            let mut boundary = Vec::new();
            for h in tails {
                match self.vertices[h.vertex].mu {
                    Sign::Plus => {
                        d.0 += h.d;
                        boundary.push(h.d as i64);
                    }
                    Sign::Minus => {
                        d.1 += h.d;
                        boundary.push(-(h.d as i64));
                    }
                }
            }
            comps.push(SpecComponent::new(gs, labels, d, boundary));
        }
        ModuliSpec::new(comps)
    }

    /// Order of the group of covering automorphisms.
    pub fn covering_order(&self) -> u64 {
        self.sphere_edges.iter().map(|e| e.d as u64).product::<u64>()
            * self.disk_edges.iter().map(|h| h.d as u64).product::<u64>()
    }

    fn decorations(&self) -> Vec<Deco> {
        (0..self.vertices.len())
            .map(|v| {
                let x = &self.vertices[v];
                let mut tails: Vec<u32> = self.disk_edges.iter().filter(|h| h.vertex == v).map(|h| h.d).collect();
                tails.sort_unstable();
                (x.gamma, x.mu, x.labels.iter().cloned().collect(), tails)
            })
            .collect()
    }

    fn relabeled_edges(&self, new_index: &[usize]) -> Vec<(usize, usize, u32)> {
        let mut e: Vec<(usize, usize, u32)> =
            self.sphere_edges.iter().map(|e| (new_index[e.plus], new_index[e.minus], e.d)).collect();
        e.sort_unstable();
        e
    }

    /// Canonical form and automorphism order, by search over decoration-preserving vertex permutations.
    pub fn canonical_form(&self) -> (CanonKey, u64) {
        let decos = self.decorations();
        let n = decos.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| decos[a].cmp(&decos[b]));
        let sorted_decos: Vec<Deco> = order.iter().map(|&v| decos[v].clone()).collect();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if i > 0 && sorted_decos[i] == sorted_decos[i - 1] {
                blocks.last_mut().unwrap().push(i);
            } else {
                blocks.push(vec![i]);
            }
        }
        let mut best: Option<Vec<(usize, usize, u32)>> = None;
        let mut base: Option<Vec<(usize, usize, u32)>> = None;
        let mut stabilizer = 0u64;
        for p in block_permutations(&blocks, n) {
            let mut new_index = vec![0; n];
            for (pos, &src) in p.iter().enumerate() {
                new_index[order[src]] = pos;
            }
            let edges = self.relabeled_edges(&new_index);
            match &base {
                None => {
                    base = Some(edges.clone());
                    stabilizer = 1;
                }
                Some(b) if *b == edges => stabilizer += 1,
                _ => {}
            }
            if best.as_ref().is_none_or(|b| edges < *b) {
                best = Some(edges);
            }
        }
        let edges = best.unwrap_or_default();
        let mut parallel: BTreeMap<(usize, usize, u32), u64> = BTreeMap::new();
        for e in &edges {
            *parallel.entry(*e).or_insert(0) += 1;
        }
        let mut aut = stabilizer;
        for m in parallel.values() {
            aut *= factorial_u64(*m);
        }
        for d in &sorted_decos {
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for t in &d.3 {
                *counts.entry(*t).or_insert(0) += 1;
            }
            for m in counts.values() {
                aut *= factorial_u64(*m);
            }
        }
        ((sorted_decos, edges), aut)
    }

    pub fn aut_order(&self) -> u64 {
        self.canonical_form().1
    }

    pub fn is_isomorphic(&self, other: &FixedPointGraph) -> bool {
        self.canonical_form().0 == other.canonical_form().0
    }

    /// Returns the first contracted vertex whose genus exceeds the Hodge kernel.
    pub fn unsupported_vertex(&self) -> Option<usize> {
        (0..self.vertices.len()).find(|&v| !self.is_point_vertex(v) && self.vertices[v].gamma >= 2)
    }

    pub fn describe(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

fn edge_multisets(n_plus: usize, n_minus: usize, m: usize, total: u32) -> Vec<Vec<SphereEdge>> {
    let mut cands = Vec::new();
    for i in 0..n_plus {
        for j in 0..n_minus {
            for d in 1..=total {
                cands.push((i, n_plus + j, d));
            }
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(
        cands: &[(usize, usize, u32)],
        start: usize,
        m: usize,
        left: u32,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<SphereEdge>>,
    ) {
        if cur.len() == m {
            if left == 0 {
                out.push(
                    cur.iter().map(|&k| SphereEdge { plus: cands[k].0, minus: cands[k].1, d: cands[k].2 }).collect(),
                );
            }
            return;
        }
        let remaining = (m - cur.len()) as u32;
        for k in start..cands.len() {
            let d = cands[k].2;
            if d + (remaining - 1) > left {
                continue;
            }
            cur.push(k);
            rec(cands, k, m, left - d, cur, out);
            cur.pop();
        }
    }
    rec(&cands, 0, m, total, &mut cur, &mut out);
    out
}

fn enumerate_uncached(c: &SpecComponent) -> Vec<(FixedPointGraph, u64)> {
    if c.boundary.contains(&0) {
        return vec![];
    }
    let pos: Vec<u32> = c.boundary.iter().filter(|&&b| b > 0).map(|&b| b as u32).collect();
    let neg: Vec<u32> = c.boundary.iter().filter(|&&b| b < 0).map(|&b| (-b) as u32).collect();
    let dp = c.d.0 as i64 - pos.iter().map(|&x| x as i64).sum::<i64>();
    let dm = c.d.1 as i64 - neg.iter().map(|&x| x as i64).sum::<i64>();
    if dp != dm || dp < 0 {
        return vec![];
    }
    let d_e = dp as u32;
    let labels: Vec<String> = c.labels.iter().cloned().collect();
    let mut found: BTreeMap<CanonKey, (FixedPointGraph, u64)> = BTreeMap::new();

    let mut shapes: Vec<(usize, usize, Vec<SphereEdge>, u32)> = Vec::new();
    if d_e == 0 {
        if neg.is_empty() {
            shapes.push((1, 0, vec![], 0));
        }
        if pos.is_empty() {
            shapes.push((0, 1, vec![], 0));
        }
    } else {
        for h1 in 0..=c.gs {
            for m in 1..=d_e as usize {
                let n = m as i64 + 1 - h1 as i64;
                if n < 2 {
                    continue;
                }
                let n = n as usize;
                for n_plus in 1..n {
                    let n_minus = n - n_plus;
                    for edges in edge_multisets(n_plus, n_minus, m, d_e) {
                        let mut uf = UnionFind::new(n);
                        let mut joins = 0;
                        for e in &edges {
                            if uf.union(e.plus, e.minus) {
                                joins += 1;
                            }
                        }
                        if joins == n - 1 {
                            shapes.push((n_plus, n_minus, edges, h1));
                        }
                    }
                }
            }
        }
    }

    for (n_plus, n_minus, edges, h1) in shapes {
        let n = n_plus + n_minus;
        let genus_left = c.gs - h1;
        for pos_at in functions(pos.len(), n_plus) {
            for neg_at in functions(neg.len(), n_minus) {
                let mut disk_edges: Vec<DiskEdge> =
                    pos.iter().zip(&pos_at).map(|(&d, &v)| DiskEdge { vertex: v, d }).collect();
                disk_edges.extend(neg.iter().zip(&neg_at).map(|(&d, &v)| DiskEdge { vertex: n_plus + v, d }));
                for gammas in compositions(genus_left, n) {
                    for lab_at in functions(labels.len(), n) {
                        let vertices: Vec<FpVertex> = (0..n)
                            .map(|v| FpVertex {
                                gamma: gammas[v],
                                mu: if v < n_plus { Sign::Plus } else { Sign::Minus },
                                labels: labels
                                    .iter()
                                    .zip(&lab_at)
                                    .filter(|(_, &w)| w == v)
                                    .map(|(l, _)| l.clone())
                                    .collect(),
                            })
                            .collect();
                        let g =
                            FixedPointGraph { vertices, sphere_edges: edges.clone(), disk_edges: disk_edges.clone() };
                        // a lone vertex with nothing attached is not a stable map
                        if g.sphere_edges.is_empty() && g.disk_edges.is_empty() && g.is_point_vertex(0) {
                            continue;
                        }
                        let (key, aut) = g.canonical_form();
                        found.entry(key).or_insert((g, aut));
                    }
                }
            }
        }
    }
    found.into_values().collect()
}

static GRAPHS: LazyLock<RwLock<HashMap<SpecComponent, Arc<Vec<(FixedPointGraph, u64)>>>>> =
    LazyLock::new(Default::default);

/// One representative per isomorphism class of fixed-point graphs of type `c`, with `|Aut|`.
pub fn enumerate_fp_graphs(c: &SpecComponent) -> Arc<Vec<(FixedPointGraph, u64)>> {
    if let Some(v) = GRAPHS.read().unwrap().get(c) {
        return v.clone();
    }
    let v = Arc::new(enumerate_uncached(c));
    GRAPHS.write().unwrap().insert(c.clone(), v.clone());
    v
}

fn lookup(p: &DescendentProblem, label: &str) -> Result<(i64, Sign)> {
    let a =
        p.a.get(label).ok_or_else(|| Error::InvalidProblem(format!("no descendent exponent for label {label:?}")))?;
    let e =
        p.eps.get(label).ok_or_else(|| Error::InvalidProblem(format!("no point constraint for label {label:?}")))?;
    Ok((*a, *e))
}

/// Integral over a contracted vertex of genus `gamma` with the given flag degrees and label exponents.
fn contracted_vertex(gamma: u32, mu: Sign, flags: &[u32], label_a: &[u32]) -> Result<Laurent> {
    let s = flags.len();
    let n = s + label_a.len();
    let dim = 3 * gamma as i64 - 3 + n as i64;
    let a_sum: i64 = label_a.iter().map(|&x| x as i64).sum();
    let m = mu.value();
    let mut total = Laurent::zero();
    for k in 0..=gamma {
        let r = dim - a_sum - k as i64;
        if r < 0 {
            continue;
        }
        let hodge_coeff = rat_pow(&rat(-m, 2), k as i64);
        for b in compositions(r as u32, s) {
            let mut ins: Vec<u32> = b.clone();
            ins.extend_from_slice(label_a);
            let integral = hodge_descendent_integral(gamma, &ins, k)?;
            if integral.is_zero() {
                continue;
            }
            let mut coeff = integral * &hodge_coeff;
            let mut exp = -(k as i64);
            for (bf, &df) in b.iter().zip(flags) {
                // omega_f^{-b-1}
                coeff *= rat_pow(&rat(df as i64, 2 * m), *bf as i64 + 1);
                exp -= *bf as i64 + 1;
            }
            total.add_term(exp, coeff);
        }
    }
    let pref = Laurent::monomial(s as i64, rat_pow(&int(2 * m), s as i64))
        * Laurent::monomial(gamma as i64 - 1, rat_pow(&int(2 * m), gamma as i64 - 1));
    Ok(&total * &pref)
}

/// Localization contribution of a single fixed-point graph.
pub fn graph_contribution(g: &FixedPointGraph, p: &DescendentProblem) -> Result<Laurent> {
    g.validate()?;
    for v in &g.vertices {
        for l in &v.labels {
            let (a, e) = lookup(p, l)?;
            if a < 0 || e != v.mu {
                return Ok(Laurent::zero());
            }
        }
    }
    let mut out = Laurent::constant(Rational::new(BigInt::one(), BigInt::from(g.covering_order())));
    for e in &g.sphere_edges {
        out *= &sphere_edge_factor(e.d);
    }
    for h in &g.disk_edges {
        out *= &disk_edge_factor(g.vertices[h.vertex].mu, h.d);
    }
    for (v, vert) in g.vertices.iter().enumerate() {
        let flags = g.flag_degrees(v);
        let mu = vert.mu;
        let label_a: Vec<u32> = vert.labels.iter().map(|l| p.a[l] as u32).collect();
        let factor = if g.is_point_vertex(v) {
            match (flags.len(), label_a.len()) {
                (2, 0) => {
                    (omega(mu, flags[0]) + omega(mu, flags[1])).inverse_monomial().unwrap()
                        * Laurent::monomial(1, int(2 * mu.value()))
                }
                (1, 0) => omega(mu, flags[0]),
                (1, 1) => (-omega(mu, flags[0])).pow(label_a[0]) * Laurent::monomial(1, int(2 * mu.value())),
                _ => {
                    return Err(Error::Domain(format!(
                        "vertex {v} of graph {} is an unstable point vertex",
                        g.describe()
                    )))
                }
            }
        } else {
            let mut f = contracted_vertex(vert.gamma, mu, &flags, &label_a).map_err(|e| match e {
                Error::HodgeUnsupported { g: gg, k, .. } => {
                    Error::HodgeUnsupported { g: gg, k, context: format!(" (vertex {v} of graph {})", g.describe()) }
                }
                other => other,
            })?;
            f *= &Laurent::monomial(label_a.len() as i64, rat_pow(&int(2 * mu.value()), label_a.len() as i64));
            f
        };
        out *= &factor;
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

type ContributionKey = (SpecComponent, DescendentProblem);
static CONTRIBUTIONS: LazyLock<RwLock<HashMap<ContributionKey, Laurent>>> = LazyLock::new(Default::default);

/// `|Aut c| * sum_Gamma I(Gamma) / |Aut Gamma|` for one connected component.
pub fn component_contribution(c: &SpecComponent, p: &DescendentProblem) -> Result<Laurent> {
    let p = p.restrict(&c.labels);
    p.check_domain(&c.labels)?;
    let key = (c.clone(), p);
    if let Some(v) = CONTRIBUTIONS.read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let mut total = Laurent::zero();
    for (g, aut) in enumerate_fp_graphs(c).iter() {
        let contrib = graph_contribution(g, &key.1)?;
        total += &contrib.scale(&rat(1, *aut as i64));
    }
    let total = total.scale(&int(c.boundary_aut_order() as i64));
    CONTRIBUTIONS.write().unwrap().insert(key, total.clone());
    Ok(total)
}

/// Product of the component contributions.
pub fn spec_contribution(s: &ModuliSpec, p: &DescendentProblem) -> Result<Laurent> {
    s.validate()?;
    let mut out = Laurent::one();
    for c in &s.components {
        out *= &component_contribution(c, p)?;
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_core::label_set;

    fn prob(labels: &[&str], a: &[i64], eps: &[Sign]) -> DescendentProblem {
        let names: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        DescendentProblem::from_lists(&names, a, eps)
    }

    fn disk(labels: &[&str], d: (u32, u32)) -> SpecComponent {
        SpecComponent::disk(label_set(labels.iter().copied()), d)
    }

    #[test]
    fn small_enumerations() {
        let g = enumerate_fp_graphs(&disk(&["1"], (1, 0)));
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].0.disk_edges, vec![DiskEdge { vertex: 0, d: 1 }]);
        assert_eq!(enumerate_fp_graphs(&disk(&["1"], (2, 0))).len(), 1);
        assert!(enumerate_fp_graphs(&disk(&[], (1, 1))).is_empty());
        // sphere of degree 1 with one label: label over either fixed point
        let s = SpecComponent::sphere(label_set(["1"]), 1);
        assert_eq!(enumerate_fp_graphs(&s).len(), 2);
    }

    #[test]
    fn contraction_is_type() {
        let specs = [
            SpecComponent::sphere(label_set(["1", "2"]), 3),
            SpecComponent::new(1, label_set(["1"]), (2, 0), vec![1, 1]),
            SpecComponent::new(1, label_set(["1"]), (2, 2), vec![]),
            disk(&["1"], (3, 1)),
        ];
        for c in specs {
            let graphs = enumerate_fp_graphs(&c);
            assert!(!graphs.is_empty());
            for (g, _) in graphs.iter() {
                assert_eq!(g.contraction(), ModuliSpec::single(c.clone()));
            }
            for i in 0..graphs.len() {
                for j in i + 1..graphs.len() {
                    assert!(!graphs[i].0.is_isomorphic(&graphs[j].0));
                }
            }
        }
    }

    #[test]
    fn contribution_examples() {
        let plus = [Sign::Plus];
        let p0 = prob(&["1"], &[0], &plus);
        let p1 = prob(&["1"], &[1], &plus);
        let g = &enumerate_fp_graphs(&disk(&["1"], (1, 0)))[0].0;
        assert_eq!(graph_contribution(g, &p0).unwrap(), Laurent::one());
        let g = &enumerate_fp_graphs(&disk(&["1"], (2, 0)))[0].0;
        assert_eq!(graph_contribution(g, &p1).unwrap(), Laurent::constant(rat(-1, 2)));
        let s = SpecComponent::sphere(label_set(["1"]), 1);
        for e in [Sign::Plus, Sign::Minus] {
            let total: Laurent = enumerate_fp_graphs(&s)
                .iter()
                .map(|(g, _)| graph_contribution(g, &prob(&["1"], &[0], &[e])).unwrap())
                .sum();
            assert_eq!(total, Laurent::one());
        }
    }

    #[test]
    fn spec_contribution_examples() {
        let plus = [Sign::Plus];
        let s = ModuliSpec::single(disk(&["1"], (1, 0)));
        assert_eq!(spec_contribution(&s, &prob(&["1"], &[1], &plus)).unwrap(), Laurent::monomial(1, int(-2)));
        let s = ModuliSpec::single(disk(&[], (0, 1)));
        assert_eq!(spec_contribution(&s, &prob(&[], &[], &[])).unwrap(), Laurent::constant(int(-1)));
        let s = ModuliSpec::single(disk(&["1"], (1, 0)));
        assert!(spec_contribution(&s, &prob(&["1"], &[0], &[Sign::Minus])).unwrap().is_zero());
    }

    #[test]
    fn product_over_components() {
        let a = disk(&["1"], (2, 1));
        let b = disk(&["2"], (0, 2));
        let p = prob(&["1", "2"], &[2, 1], &[Sign::Plus, Sign::Minus]);
        let both = spec_contribution(&ModuliSpec::new(vec![a.clone(), b.clone()]), &p).unwrap();
        let sep = component_contribution(&a, &p).unwrap() * component_contribution(&b, &p).unwrap();
        assert_eq!(both, sep);
    }

    #[test]
    fn weights() {
        assert_eq!(edge_weight(1).unwrap(), Laurent::monomial(-2, rat(-1, 4)));
        assert_eq!(halfedge_weight(Sign::Plus, 1).unwrap(), Laurent::monomial(-1, rat(1, 2)));
        for d in 1..=10 {
            let rhs = halfedge_weight(Sign::Plus, d).unwrap()
                * halfedge_weight(Sign::Minus, d).unwrap()
                * Laurent::constant(int(-(d as i64)));
            assert_eq!(edge_weight(d).unwrap(), rhs);
            assert_eq!(edge_weight(d).unwrap(), sphere_edge_factor(d).scale(&rat(1, d as i64)));
            for mu in [Sign::Plus, Sign::Minus] {
                assert_eq!(halfedge_weight(mu, d).unwrap(), disk_edge_factor(mu, d).scale(&rat(1, d as i64)));
            }
        }
    }

    #[test]
    fn relabeling_invariance() {
        let c = SpecComponent::sphere(label_set(["1", "2"]), 2);
        let p = prob(&["1", "2"], &[1, 1], &[Sign::Plus, Sign::Minus]);
        for (g, aut) in enumerate_fp_graphs(&c).iter() {
            let n = g.vertices.len();
            let perm: Vec<usize> = (0..n).rev().collect();
            let h = FixedPointGraph {
                vertices: (0..n).map(|i| g.vertices[perm[i]].clone()).collect(),
                sphere_edges: g
                    .sphere_edges
                    .iter()
                    .rev()
                    .map(|e| SphereEdge { plus: perm[e.plus], minus: perm[e.minus], d: e.d })
                    .collect(),
                disk_edges: g.disk_edges.iter().map(|x| DiskEdge { vertex: perm[x.vertex], d: x.d }).collect(),
            };
            assert!(g.is_isomorphic(&h));
            assert_eq!(h.aut_order(), *aut);
            assert_eq!(graph_contribution(g, &p).unwrap(), graph_contribution(&h, &p).unwrap());
        }
    }

    #[test]
    fn automorphisms_of_parallel_edges() {
        // two vertices joined by two degree-1 equators
        let g = FixedPointGraph {
            vertices: vec![
                FpVertex { gamma: 0, mu: Sign::Plus, labels: LabelSet::new() },
                FpVertex { gamma: 0, mu: Sign::Minus, labels: LabelSet::new() },
            ],
            sphere_edges: vec![SphereEdge { plus: 0, minus: 1, d: 1 }, SphereEdge { plus: 0, minus: 1, d: 1 }],
            disk_edges: vec![],
        };
        assert_eq!(g.aut_order(), 2);
        assert_eq!(g.contraction(), ModuliSpec::single(SpecComponent::new(1, LabelSet::new(), (2, 2), vec![])));
    }

    #[test]
    fn closed_invariants() {
        // genus 0: <tau_{2d-2}(pt)>_{0,d} = 1/(d!)^2
        for d in 1..=3u32 {
            let c = SpecComponent::sphere(label_set(["1"]), d);
            for e in [Sign::Plus, Sign::Minus] {
                let p = prob(&["1"], &[2 * d as i64 - 2], &[e]);
                let f = factorial_u64(d as u64) as i64;
                assert_eq!(component_contribution(&c, &p).unwrap(), Laurent::constant(rat(1, f * f)));
            }
        }
        // genus 1, degree 1: <tau_2(pt)> = 1/24 and <tau_0(pt) tau_2(pt)> = 0 by dimension
        let c = SpecComponent::new(1, label_set(["1"]), (1, 1), vec![]);
        let p = prob(&["1"], &[2], &[Sign::Plus]);
        assert_eq!(component_contribution(&c, &p).unwrap(), Laurent::constant(rat(1, 24)));
        let p = prob(&["1"], &[2], &[Sign::Minus]);
        assert_eq!(component_contribution(&c, &p).unwrap(), Laurent::constant(rat(1, 24)));
    }
}
