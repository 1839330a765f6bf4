//! Genus-0 open invariants as sums over decorated trees and over ordered partitions.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinat::{factorial_u64, functions, labeled_trees};
use crate::error::{Error, Result};
use crate::exactalg::{factorial, int, rat, Laurent, Rational};
use crate::fixed_point::component_contribution;
use crate::spec_core::{DescendentProblem, LabelSet, SpecComponent};

/// A vertex decoration: labels and degree of a disk.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Decoration {
    pub labels: LabelSet,
    pub d: (u32, u32),
}

impl Decoration {
    pub fn spec(&self) -> SpecComponent {
        SpecComponent::disk(self.labels.clone(), self.d)
    }

    /// `d+ - d-`, the boundary degree.
    pub fn net(&self) -> i64 {
        self.d.0 as i64 - self.d.1 as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecoratedTree {
    pub vertices: Vec<Decoration>,
    pub edges: Vec<(usize, usize)>,
}

fn rooted_code(adj: &[Vec<usize>], ids: &[usize], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| rooted_code(adj, ids, w, v)).collect();
    kids.sort();
    format!("({}{})", ids[v], kids.concat())
}

impl DecoratedTree {
    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Canonical string: minimum over roots of the rooted encoding.
    pub fn canonical_code(&self) -> String {
        let mut decos: Vec<&Decoration> = self.vertices.iter().collect();
        decos.sort();
        decos.dedup();
        let ids: Vec<usize> = self.vertices.iter().map(|d| decos.binary_search(&d).unwrap()).collect();
        let adj = self.adjacency();
        let prefix: Vec<String> = decos.iter().map(|d| format!("{:?}{:?}", d.labels, d.d)).collect();
        (0..self.vertices.len())
            .map(|r| rooted_code(&adj, &ids, r, usize::MAX))
            .min()
            .map(|c| format!("{}|{}", prefix.join(";"), c))
            .unwrap_or_default()
    }

    /// Size of the automorphism group, by brute force over decoration-preserving permutations.
    pub fn aut_order(&self) -> u64 {
        let n = self.vertices.len();
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        let mut count = 0;
        for p in crate::combinat::permutations(n) {
            if (0..n).any(|i| self.vertices[p[i]] != self.vertices[i]) {
                continue;
            }
            let mut e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
            e.sort_unstable();
            if e == edges {
                count += 1;
            }
        }
        count
    }

    pub fn is_tree(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 || self.edges.len() + 1 != n {
            return false;
        }
        let mut uf = crate::combinat::UnionFind::new(n);
        self.edges.iter().all(|&(a, b)| a < n && b < n && uf.union(a, b))
    }
}

/// Multisets of nonzero-degree decorations partitioning `labels` and summing to `d`,
/// each listed in nondecreasing order.
pub fn decoration_multisets(labels: &LabelSet, d: (u32, u32)) -> Vec<Vec<Decoration>> {
    let labels: Vec<String> = labels.iter().cloned().collect();
    let mut out = Vec::new();
    let mut cur: Vec<Decoration> = Vec::new();
    fn rec(
        labels: &[String],
        used: &mut Vec<bool>,
        left: (u32, u32),
        cur: &mut Vec<Decoration>,
        out: &mut Vec<Vec<Decoration>>,
    ) {
        if left == (0, 0) {
            if used.iter().all(|&u| u) {
                out.push(cur.clone());
            }
            return;
        }
        let free: Vec<usize> = (0..labels.len()).filter(|&i| !used[i]).collect();
        for mask in 0..(1usize << free.len()) {
            let subset: LabelSet =
                free.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| labels[i].clone()).collect();
            for dp in 0..=left.0 {
                for dm in 0..=left.1 {
                    if dp == 0 && dm == 0 {
                        continue;
                    }
                    let deco = Decoration { labels: subset.clone(), d: (dp, dm) };
                    if cur.last().is_some_and(|last| *last > deco) {
                        continue;
                    }
                    for (k, &i) in free.iter().enumerate() {
                        if mask >> k & 1 == 1 {
                            used[i] = true;
                        }
                    }
                    cur.push(deco);
                    rec(labels, used, (left.0 - dp, left.1 - dm), cur, out);
                    cur.pop();
                    for (k, &i) in free.iter().enumerate() {
                        if mask >> k & 1 == 1 {
                            used[i] = false;
                        }
                    }
                }
            }
        }
    }
    let mut used = vec![false; labels.len()];
    rec(&labels, &mut used, d, &mut cur, &mut out);
    out
}

fn enumerate_uncached(labels: &LabelSet, d: (u32, u32)) -> Vec<(DecoratedTree, u64)> {
    let mut found: BTreeMap<String, (DecoratedTree, u64)> = BTreeMap::new();
    for multiset in decoration_multisets(labels, d) {
        let r = multiset.len();
        let mut group = 1u64;
        let mut i = 0;
        while i < r {
            let j = (i..r).find(|&j| multiset[j] != multiset[i]).unwrap_or(r);
            group *= factorial_u64((j - i) as u64);
            i = j;
        }
        let mut classes: BTreeMap<String, (DecoratedTree, u64)> = BTreeMap::new();
        for edges in labeled_trees(r) {
            let t = DecoratedTree { vertices: multiset.clone(), edges };
            let code = t.canonical_code();
            classes.entry(code).or_insert((t, 0)).1 += 1;
        }
        for (code, (t, count)) in classes {
            found.insert(code, (t, group / count));
        }
    }
    found.into_values().collect()
}

type TreeKey = (LabelSet, (u32, u32));
static TREES: LazyLock<RwLock<HashMap<TreeKey, Arc<Vec<(DecoratedTree, u64)>>>>> = LazyLock::new(Default::default);

/// One representative per isomorphism class of decorated trees, with `|Aut|`, in canonical order.
pub fn enumerate_trees(labels: &LabelSet, d: (u32, u32)) -> Arc<Vec<(DecoratedTree, u64)>> {
    let key = (labels.clone(), d);
    if let Some(v) = TREES.read().unwrap().get(&key) {
        return v.clone();
    }
    let v = Arc::new(enumerate_uncached(labels, d));
    TREES.write().unwrap().insert(key, v.clone());
    v
}

/// Trees grouped by their vertex decorations and edge count, with the summed weight
/// `sum 1/|Aut| * prod net^val * (-1/2)^|E|`.
struct TreeTable {
    decos: Vec<Decoration>,
    groups: Vec<TreeGroup>,
}

struct TreeGroup {
    vertices: Vec<usize>,
    edges: usize,
    weight: Rational,
}

static TABLES: LazyLock<RwLock<HashMap<(LabelSet, (u32, u32)), Arc<TreeTable>>>> = LazyLock::new(Default::default);

fn tree_table(labels: &LabelSet, d: (u32, u32)) -> Arc<TreeTable> {
    let key = (labels.clone(), d);
    if let Some(v) = TABLES.read().unwrap().get(&key) {
        return v.clone();
    }
    let mut index: HashMap<Decoration, usize> = HashMap::new();
    let mut decos = Vec::new();
    let mut groups: BTreeMap<(Vec<usize>, usize), Rational> = BTreeMap::new();
    for (t, aut) in enumerate_trees(labels, d).iter() {
        let mut w =
            Rational::new(BigInt::from(1), BigInt::from(*aut) * num_traits::pow(BigInt::from(-2), t.edges.len()));
        let mut vs = Vec::with_capacity(t.vertices.len());
        for (v, deco) in t.vertices.iter().enumerate() {
            w *= Rational::from_integer(num_traits::pow(BigInt::from(deco.net()), t.valence(v)));
            let i = *index.entry(deco.clone()).or_insert_with(|| {
                decos.push(deco.clone());
                decos.len() - 1
            });
            vs.push(i);
        }
        vs.sort_unstable();
        *groups.entry((vs, t.edges.len())).or_insert_with(|| rat(0, 1)) += w;
    }
    let groups = groups
        .into_iter()
        .filter(|(_, w)| *w != rat(0, 1))
        .map(|((vertices, edges), weight)| TreeGroup { vertices, edges, weight })
        .collect();
    let v = Arc::new(TreeTable { decos, groups });
    TABLES.write().unwrap().insert(key, v.clone());
    v
}

fn check_target(labels: &LabelSet, d: (u32, u32), p: &DescendentProblem) -> Result<DescendentProblem> {
    SpecComponent::disk(labels.clone(), d).validate()?;
    let p = p.restrict(labels);
    p.check_domain(labels)?;
    Ok(p)
}

fn vertex_contributions<'a, I>(decos: I, p: &DescendentProblem) -> Result<HashMap<Decoration, Laurent>>
where
    I: IntoIterator<Item = &'a Decoration>,
{
    let mut out = HashMap::new();
    for deco in decos {
        if !out.contains_key(deco) {
            out.insert(deco.clone(), component_contribution(&deco.spec(), p)?);
        }
    }
    Ok(out)
}

fn amplitude_with_aut(t: &DecoratedTree, aut: u64, contrib: &HashMap<Decoration, Laurent>) -> Laurent {
    let mut out = Laurent::constant(rat(1, aut as i64));
    for (v, deco) in t.vertices.iter().enumerate() {
        let c = &contrib[deco];
        if c.is_zero() || deco.net() == 0 && t.valence(v) > 0 {
            return Laurent::zero();
        }
        out = out.scale(&Rational::from_integer(num_traits::pow(BigInt::from(deco.net()), t.valence(v))));
        out *= c;
    }
    let e = t.edges.len() as i64;
    out * Laurent::monomial(-e, Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(-2), e as usize)))
}

pub fn tree_amplitude(t: &DecoratedTree, p: &DescendentProblem) -> Result<Laurent> {
    if !t.is_tree() || t.vertices.iter().any(|v| v.d == (0, 0)) {
        return Err(Error::Domain("not a decorated tree with nonzero vertex degrees".into()));
    }
    let contrib = vertex_contributions(&t.vertices, p)?;
    Ok(amplitude_with_aut(t, t.aut_order(), &contrib))
}

/// `[d+ = d-] (d+/2u) I_sphere`.
pub fn exceptional_term(labels: &LabelSet, d: (u32, u32), p: &DescendentProblem) -> Result<Laurent> {
    if d.0 != d.1 || d.0 == 0 {
        return Ok(Laurent::zero());
    }
    let sphere = SpecComponent::sphere(labels.clone(), d.0);
    if sphere.validate().is_err() {
        return Ok(Laurent::zero());
    }
    let i = component_contribution(&sphere, p)?;
    Ok(i * Laurent::monomial(-1, rat(d.0 as i64, 2)))
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeTerm {
    pub tree: DecoratedTree,
    pub aut: u64,
    pub amplitude: Laurent,
}

/// Tree sum plus the exceptional sphere term, with the per-tree breakdown.
pub fn ogw_genus0_traced(
    labels: &LabelSet,
    d: (u32, u32),
    p: &DescendentProblem,
) -> Result<(Laurent, Vec<TreeTerm>, Laurent)> {
    let p = check_target(labels, d, p)?;
    let trees = enumerate_trees(labels, d);
    let contrib = vertex_contributions(trees.iter().flat_map(|(t, _)| &t.vertices), &p)?;
    let terms: Vec<TreeTerm> = trees
        .par_iter()
        .map(|(t, aut)| TreeTerm { tree: t.clone(), aut: *aut, amplitude: amplitude_with_aut(t, *aut, &contrib) })
        .collect();
    let exceptional = exceptional_term(labels, d, &p)?;
    let mut total = exceptional.clone();
    for t in &terms {
        total += &t.amplitude;
    }
    Ok((total, terms, exceptional))
}

type ResultKey = (LabelSet, (u32, u32), DescendentProblem);
static OGW0: LazyLock<RwLock<HashMap<ResultKey, Laurent>>> = LazyLock::new(Default::default);

/// Genus-0 open invariant of a disk target.
pub fn ogw_genus0(labels: &LabelSet, d: (u32, u32), p: &DescendentProblem) -> Result<Laurent> {
    let key = (labels.clone(), d, p.restrict(labels));
    if let Some(v) = OGW0.read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let q = check_target(labels, d, p)?;
    let v = exceptional_term(labels, d, &q)? + table_sum(&tree_table(labels, d), &q)?;
    OGW0.write().unwrap().insert(key, v.clone());
    Ok(v)
}

/// Ordered sequences of nonzero-degree decorations, of length `r`, partitioning the data.
pub fn ordered_partitions(labels: &LabelSet, d: (u32, u32), r: usize) -> Vec<Vec<Decoration>> {
    let names: Vec<String> = labels.iter().cloned().collect();
    let mut degree_seqs: Vec<Vec<(u32, u32)>> = Vec::new();
    fn rec(left: (u32, u32), r: usize, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if cur.len() == r {
            if left == (0, 0) {
                out.push(cur.clone());
            }
            return;
        }
        for a in 0..=left.0 {
            for b in 0..=left.1 {
                if a + b == 0 {
                    continue;
                }
                cur.push((a, b));
                rec((left.0 - a, left.1 - b), r, cur, out);
                cur.pop();
            }
        }
    }
    rec(d, r, &mut Vec::new(), &mut degree_seqs);
    let mut out = Vec::new();
    for degs in &degree_seqs {
        for f in functions(names.len(), r) {
            out.push(
                (0..r)
                    .map(|i| Decoration {
                        labels: names.iter().zip(&f).filter(|(_, &j)| j == i).map(|(l, _)| l.clone()).collect(),
                        d: degs[i],
                    })
                    .collect(),
            );
        }
    }
    out
}

/// Weight of one ordered partition in the partition form.
pub fn partition_amplitude(parts: &[Decoration], d: (u32, u32), p: &DescendentProblem) -> Result<Laurent> {
    let r = parts.len();
    let mut prod = Laurent::one();
    for part in parts {
        prod *= &component_contribution(&part.spec(), p)?;
        if prod.is_zero() {
            return Ok(prod);
        }
    }
    if r == 1 {
        return Ok(prod);
    }
    let net = d.0 as i64 - d.1 as i64;
    let mut c = Rational::from_integer(num_traits::pow(BigInt::from(net), r - 2));
    for part in parts {
        c *= int(part.net());
    }
    c /= Rational::from_integer(num_traits::pow(BigInt::from(-2), r - 1) * factorial(r as u64));
    Ok(prod.scale(&c).shift(-(r as i64 - 1)))
}

/// Ordered partitions grouped by their multiset of parts, with multiplicity and the
/// closed-form coefficient folded into the weight.
static PARTITIONS: LazyLock<RwLock<HashMap<(LabelSet, (u32, u32)), Arc<TreeTable>>>> = LazyLock::new(Default::default);

fn partition_table(labels: &LabelSet, d: (u32, u32)) -> Arc<TreeTable> {
    let key = (labels.clone(), d);
    if let Some(v) = PARTITIONS.read().unwrap().get(&key) {
        return v.clone();
    }
    let mut index: HashMap<Decoration, usize> = HashMap::new();
    let mut decos = Vec::new();
    let mut groups: BTreeMap<(Vec<usize>, usize), Rational> = BTreeMap::new();
    let net = d.0 as i64 - d.1 as i64;
    for r in 1..=(d.0 + d.1) as usize {
        if d.0 == d.1 && r >= 3 {
            break;
        }
        for parts in ordered_partitions(labels, d, r) {
            let mut c = if r == 1 {
                rat(1, 1)
            } else {
                let mut c = Rational::from_integer(num_traits::pow(BigInt::from(net), r - 2));
                for part in &parts {
                    c *= int(part.net());
                }
                c / Rational::from_integer(num_traits::pow(BigInt::from(-2), r - 1) * factorial(r as u64))
            };
            if c == rat(0, 1) {
                continue;
            }
            let mut vs: Vec<usize> = parts
                .iter()
                .map(|x| {
                    *index.entry(x.clone()).or_insert_with(|| {
                        decos.push(x.clone());
                        decos.len() - 1
                    })
                })
                .collect();
            vs.sort_unstable();
            let e = groups.entry((vs, r - 1)).or_insert_with(|| rat(0, 1));
            std::mem::swap(e, &mut c);
            *e += c;
        }
    }
    let groups = groups
        .into_iter()
        .filter(|(_, w)| *w != rat(0, 1))
        .map(|((vertices, edges), weight)| TreeGroup { vertices, edges, weight })
        .collect();
    let v = Arc::new(TreeTable { decos, groups });
    PARTITIONS.write().unwrap().insert(key, v.clone());
    v
}

fn table_sum(table: &TreeTable, p: &DescendentProblem) -> Result<Laurent> {
    let contrib: Vec<Laurent> =
        table.decos.iter().map(|x| component_contribution(&x.spec(), p)).collect::<Result<_>>()?;
    let mut v = Laurent::zero();
    for g in &table.groups {
        if g.vertices.iter().any(|&i| contrib[i].is_zero()) {
            continue;
        }
        let mut term = Laurent::monomial(-(g.edges as i64), g.weight.clone());
        for &i in &g.vertices {
            term *= &contrib[i];
        }
        v += &term;
    }
    Ok(v)
}

/// Partition form of the genus-0 invariant.
pub fn ogw_genus0_partitions(labels: &LabelSet, d: (u32, u32), p: &DescendentProblem) -> Result<Laurent> {
    let p = check_target(labels, d, p)?;
    Ok(exceptional_term(labels, d, &p)? + table_sum(&partition_table(labels, d), &p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_core::{label_set, Sign};

    fn prob(labels: &[&str], a: &[i64], eps: &[Sign]) -> DescendentProblem {
        let names: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        DescendentProblem::from_lists(&names, a, eps)
    }

    #[test]
    fn tree_counts() {
        assert_eq!(enumerate_trees(&label_set(["1"]), (1, 0)).len(), 1);
        let t = enumerate_trees(&label_set(["1"]), (2, 0));
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|(_, a)| *a == 1));
        assert_eq!(enumerate_trees(&label_set(["1"]), (1, 1)).len(), 3);
        // three unlabeled (1,0) vertices: only the path, with the reflection
        let t = enumerate_trees(&LabelSet::new(), (3, 0));
        let path = t.iter().find(|(t, _)| t.vertices.len() == 3).unwrap();
        assert_eq!(path.1, 2);
        assert_eq!(path.0.aut_order(), 2);
    }

    #[test]
    fn amplitudes() {
        let plus = [Sign::Plus];
        let t = DecoratedTree { vertices: vec![Decoration { labels: label_set(["1"]), d: (2, 0) }], edges: vec![] };
        assert_eq!(tree_amplitude(&t, &prob(&["1"], &[1], &plus)).unwrap(), Laurent::constant(rat(-1, 2)));
        let t = DecoratedTree {
            vertices: vec![
                Decoration { labels: label_set(["1"]), d: (1, 0) },
                Decoration { labels: LabelSet::new(), d: (1, 0) },
            ],
            edges: vec![(0, 1)],
        };
        assert_eq!(tree_amplitude(&t, &prob(&["1"], &[1], &plus)).unwrap(), Laurent::one());
        let t = DecoratedTree {
            vertices: vec![
                Decoration { labels: label_set(["1"]), d: (1, 0) },
                Decoration { labels: LabelSet::new(), d: (0, 1) },
            ],
            edges: vec![(0, 1)],
        };
        assert_eq!(tree_amplitude(&t, &prob(&["1"], &[0], &plus)).unwrap(), Laurent::monomial(-1, rat(-1, 2)));
    }

    #[test]
    fn examples() {
        let plus = [Sign::Plus];
        let one = label_set(["1"]);
        assert_eq!(ogw_genus0(&one, (2, 0), &prob(&["1"], &[1], &plus)).unwrap(), Laurent::constant(rat(1, 2)));
        assert_eq!(ogw_genus0(&LabelSet::new(), (1, 0), &prob(&[], &[], &[])).unwrap(), Laurent::one());
        assert!(ogw_genus0(&one, (1, 1), &prob(&["1"], &[0], &plus)).unwrap().is_zero());
        for (d, a) in [((2, 0), 1), ((1, 1), 0)] {
            let p = prob(&["1"], &[a], &plus);
            assert_eq!(ogw_genus0(&one, d, &p).unwrap(), ogw_genus0_partitions(&one, d, &p).unwrap());
        }
        assert_eq!(ogw_genus0_partitions(&LabelSet::new(), (1, 0), &prob(&[], &[], &[])).unwrap(), Laurent::one());
    }

    #[test]
    fn label_permutation_invariance() {
        let ab = label_set(["a", "b"]);
        let p = prob(&["a", "b"], &[2, 0], &[Sign::Plus, Sign::Minus]);
        let q = prob(&["a", "b"], &[0, 2], &[Sign::Minus, Sign::Plus]);
        assert_eq!(ogw_genus0(&ab, (2, 1), &p).unwrap(), ogw_genus0(&ab, (2, 1), &q).unwrap());
    }
}
