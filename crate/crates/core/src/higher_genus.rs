//! All-genera localization sums over morphisms of specifications.
//!
//! A morphism is stored in labeled form: the source components in canonical order, their
//! white vertices in boundary order, `flags[w]` wavy flags at white vertex `w` numbered
//! consecutively with the cyclic order taken as the standard rotation, the involution `tau`
//! on flags, the old degree of the `sigma^-1 tau` cycle through each flag, and the number of
//! contracted boundary half-edges on each source component.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bc_volume::{bc_volume, BcGraph, BcLoop};
use crate::combinat::{block_permutations, compositions, multiset_permutations, perfect_matchings, UnionFind};
use crate::error::{Error, Result};
use crate::exactalg::{int, rat, rat_pow, Laurent, Rational};
use crate::fixed_point::{enumerate_fp_graphs, graph_contribution, FixedPointGraph};
use crate::spec_core::{DescendentProblem, LabelSet, ModuliSpec, SpecComponent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EvalPath {
    #[default]
    Compact,
    GraphSum,
}

/// Wavy-edge data over an ordered list of white vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WavyData {
    pub flags: Vec<usize>,
    pub tau: Vec<usize>,
    pub old: Vec<i64>,
}

impl WavyData {
    fn offsets(&self) -> Vec<usize> {
        let mut o = Vec::with_capacity(self.flags.len() + 1);
        o.push(0);
        for &k in &self.flags {
            o.push(o.last().unwrap() + k);
        }
        o
    }

    pub fn flag_count(&self) -> usize {
        self.tau.len()
    }

    pub fn wavy_count(&self) -> usize {
        self.tau.len() / 2
    }

    /// White vertex of every flag.
    pub fn owner(&self) -> Vec<usize> {
        self.flags.iter().enumerate().flat_map(|(w, &k)| std::iter::repeat(w).take(k)).collect()
    }

    pub fn sigma(&self) -> Vec<usize> {
        let o = self.offsets();
        let mut s = vec![0; self.flag_count()];
        for w in 0..self.flags.len() {
            for f in o[w]..o[w + 1] {
                s[f] = if f + 1 == o[w + 1] { o[w] } else { f + 1 };
            }
        }
        s
    }

    /// Cycles of `sigma^-1 tau` on flags. White vertices without flags are not included.
    pub fn flag_cycles(&self) -> Vec<Vec<usize>> {
        // same orbits as tau . sigma
        let s = self.sigma();
        let n = self.flag_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for st in 0..n {
            if seen[st] {
                continue;
            }
            let mut c = Vec::new();
            let mut f = st;
            while !seen[f] {
                seen[f] = true;
                c.push(f);
                f = self.tau[s[f]];
            }
            out.push(c);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.flag_cycles().len() + self.flags.iter().filter(|&&k| k == 0).count()
    }

    /// BC graph for white vertices of the given degrees.
    pub fn bc(&self, degrees: &[i64]) -> BcGraph {
        let o = self.offsets();
        let mut g = BcGraph {
            next: self.sigma(),
            mate: self.tau.clone(),
            loops: vec![],
            new_perimeter: BTreeMap::new(),
            old_perimeter: BTreeMap::new(),
        };
        for (w, &k) in self.flags.iter().enumerate() {
            if k == 0 {
                g.loops.push(BcLoop { new: degrees[w], old: degrees[w] });
            } else {
                g.new_perimeter.insert(o[w], degrees[w]);
            }
        }
        for c in self.flag_cycles() {
            g.old_perimeter.insert(*c.iter().min().unwrap(), self.old[c[0]]);
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Morphism {
    pub source: ModuliSpec,
    pub wavy: WavyData,
    pub cb: Vec<u32>,
}

fn whites_of(source: &ModuliSpec) -> (Vec<usize>, Vec<i64>) {
    let mut owner = Vec::new();
    let mut degree = Vec::new();
    for (j, c) in source.components.iter().enumerate() {
        for &b in &c.boundary {
            owner.push(j);
            degree.push(b);
        }
    }
    (owner, degree)
}

impl Morphism {
    pub fn identity(c: &SpecComponent) -> Self {
        let source = ModuliSpec::single(c.clone());
        let h = c.h();
        Morphism { source, wavy: WavyData { flags: vec![0; h], tau: vec![], old: vec![] }, cb: vec![0] }
    }

    pub fn white_degrees(&self) -> Vec<i64> {
        whites_of(&self.source).1
    }

    pub fn cb_count(&self) -> u32 {
        self.cb.iter().sum()
    }

    /// Desingularization. Small genus follows from the Euler characteristic of the glued surface.
    pub fn desingularization(&self) -> ModuliSpec {
        let (owner, degree) = whites_of(&self.source);
        let r = self.source.components.len();
        let mut uf = UnionFind::new(r);
        let fo = self.wavy.owner();
        for f in 0..self.wavy.flag_count() {
            uf.union(owner[fo[f]], owner[fo[self.wavy.tau[f]]]);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for j in 0..r {
            groups.entry(uf.find(j)).or_default().push(j);
        }
        let cycles = self.wavy.flag_cycles();
        let mut out = Vec::new();
        for members in groups.values() {
            let root = uf.find(members[0]);
            let mut labels = LabelSet::new();
            let (mut dp, mut dm, mut gs) = (0u32, 0u32, 0i64);
            let mut boundary = Vec::new();
            let mut v_w = 0i64;
            let mut cyc = 0i64;
            for &j in members {
                let c = &self.source.components[j];
                labels.extend(c.labels.iter().cloned());
                dp += c.d.0;
                dm += c.d.1;
                gs += c.gs as i64;
                boundary.extend(std::iter::repeat(0).take(self.cb[j] as usize));
            }
            for (w, &k) in self.wavy.flags.iter().enumerate() {
                if uf.find(owner[w]) == root {
                    v_w += 1;
                    if k == 0 {
                        boundary.push(degree[w]);
                        cyc += 1;
                    }
                }
            }
            let mut e2 = 0i64;
            for c in &cycles {
                if uf.find(owner[fo[c[0]]]) == root {
                    boundary.push(self.wavy.old[c[0]]);
                    e2 += c.len() as i64;
                    cyc += 1;
                }
            }
            // chi' = sum chi - |wavy| - |cb| gives g' = sum g + 1 - |V_b| + (|V_w| + |wavy| - cyc) / 2
            let wavy = e2 / 2;
            let g = gs + 1 - members.len() as i64 + (v_w + wavy - cyc) / 2;
            out.push(SpecComponent::new(g as u32, labels, (dp, dm), boundary));
        }
        ModuliSpec::new(out).canonical()
    }

    pub fn bc(&self) -> BcGraph {
        self.wavy.bc(&self.white_degrees())
    }

    /// `delta^morph` of a contracted boundary half-edge on source component `j`.
    pub fn delta_morph(&self, j: usize) -> i64 {
        delta_morph_of(&self.source.components[j])
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or_default()
    }
}

pub fn bc_of_morphism(m: &Morphism) -> BcGraph {
    m.bc()
}

/// `d+ - (sum of positive boundary degrees)` of a black vertex.
pub fn delta_morph_of(c: &SpecComponent) -> i64 {
    c.d.0 as i64 - c.positive_boundary_sum()
}

/// A fixed-point graph (one per source component) decorated with wavy data on its
/// boundaries and contracted boundary half-edges on its equators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalizationGraph {
    pub components: Vec<FixedPointGraph>,
    pub wavy: WavyData,
    /// Contracted boundary half-edges per sphere edge of each component.
    pub cb: Vec<Vec<u32>>,
}

impl LocalizationGraph {
    fn whites(&self) -> (Vec<usize>, Vec<i64>) {
        let mut owner = Vec::new();
        let mut degree = Vec::new();
        for (j, g) in self.components.iter().enumerate() {
            for h in &g.disk_edges {
                owner.push(j);
                degree.push(g.vertices[h.vertex].mu.value() * h.d as i64);
            }
        }
        (owner, degree)
    }

    /// The induced morphism, with white vertices reordered to boundary order.
    pub fn contract(&self) -> Morphism {
        let (owner, degree) = self.whites();
        let mut perm: Vec<usize> = (0..owner.len()).collect();
        // stable sort by (component, degree) moves each disk edge to its boundary slot
        perm.sort_by_key(|&w| (owner[w], degree[w]));
        let o = self.wavy.offsets();
        let mut new_off = BTreeMap::new();
        let mut flags = Vec::new();
        let mut at = 0;
        for &w in &perm {
            new_off.insert(w, at);
            flags.push(self.wavy.flags[w]);
            at += self.wavy.flags[w];
        }
        let fo = self.wavy.owner();
        let relabel = |f: usize| new_off[&fo[f]] + (f - o[fo[f]]);
        let n = self.wavy.flag_count();
        let mut tau = vec![0; n];
        let mut old = vec![0; n];
        for f in 0..n {
            tau[relabel(f)] = relabel(self.wavy.tau[f]);
            old[relabel(f)] = self.wavy.old[f];
        }
        let source = ModuliSpec::new(self.components.iter().map(|g| g.contraction().components[0].clone()).collect());
        Morphism { source, wavy: WavyData { flags, tau, old }, cb: self.cb.iter().map(|v| v.iter().sum()).collect() }
    }
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn subsets(labels: &LabelSet) -> Vec<LabelSet> {
    let v: Vec<&String> = labels.iter().collect();
    (0..1usize << v.len())
        .map(|m| v.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, s)| (*s).clone()).collect())
        .collect()
}

/// Pure connected components that may appear in a source of `target`.
fn candidate_components(target: &SpecComponent) -> Vec<SpecComponent> {
    let mut out = Vec::new();
    for gs in 0..=target.gs {
        for labels in subsets(&target.labels) {
            for dp in 0..=target.d.0 {
                for dm in 0..=target.d.1 {
                    for p in 0..=dp {
                        for q in 0..=dm {
                            if dp - p != dm - q {
                                continue;
                            }
                            for pos in partitions(p, p) {
                                for neg in partitions(q, q) {
                                    let boundary: Vec<i64> =
                                        pos.iter().map(|&x| x as i64).chain(neg.iter().map(|&x| -(x as i64))).collect();
                                    let c = SpecComponent::new(gs, labels.clone(), (dp, dm), boundary);
                                    if c.validate().is_ok() {
                                        out.push(c);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Pure sources whose Euler characteristic allows a connected morphism onto `target`.
pub fn enumerate_pure_sources(target: &SpecComponent) -> Vec<ModuliSpec> {
    let cands = candidate_components(target);
    let mut out = Vec::new();
    fn rec(
        cands: &[SpecComponent],
        start: usize,
        target: &SpecComponent,
        used: &LabelSet,
        d: (u32, u32),
        gs: u32,
        cur: &mut Vec<SpecComponent>,
        out: &mut Vec<ModuliSpec>,
    ) {
        if d == target.d && *used == target.labels && !cur.is_empty() {
            let s = ModuliSpec::new(cur.clone());
            let chi = s.euler_characteristic() - target.euler_characteristic();
            let closed = cur.iter().any(|c| c.is_closed());
            if chi >= cur.len() as i64 - 1 && !(closed && cur.len() > 1) {
                out.push(s);
            }
        }
        for i in start..cands.len() {
            let c = &cands[i];
            if c.labels.iter().any(|l| used.contains(l)) || c.d.0 + d.0 > target.d.0 || c.d.1 + d.1 > target.d.1 {
                continue;
            }
            if c.gs + gs > target.gs || (c.d == (0, 0) && c.labels.is_empty()) {
                continue;
            }
            let mut u = used.clone();
            u.extend(c.labels.iter().cloned());
            cur.push(c.clone());
            rec(cands, i, target, &u, (d.0 + c.d.0, d.1 + c.d.1), gs + c.gs, cur, out);
            cur.pop();
        }
    }
    rec(&cands, 0, target, &LabelSet::new(), (0, 0), 0, &mut Vec::new(), &mut out);
    out
}

/// Wavy data over the given white vertices with `e` wavy edges that connect all `ncomp`
/// components and whose cycles carry the old degrees `olds` (in some arrangement), keeping
/// only those with a valid BC graph.
pub fn wavy_configs(owner: &[usize], degrees: &[i64], ncomp: usize, e: usize, olds: &[i64]) -> Vec<WavyData> {
    let nw = owner.len();
    let mut out = Vec::new();
    if nw == 0 {
        if e == 0 && olds.is_empty() && ncomp == 1 {
            out.push(WavyData { flags: vec![], tau: vec![], old: vec![] });
        }
        return out;
    }
    let mut arrangements = multiset_permutations(olds);
    arrangements.sort();
    for flags in compositions(2 * e as u32, nw) {
        let flags: Vec<usize> = flags.into_iter().map(|k| k as usize).collect();
        for tau in perfect_matchings(2 * e) {
            let w = WavyData { flags: flags.clone(), tau, old: vec![0; 2 * e] };
            let fo = w.owner();
            let mut uf = UnionFind::new(ncomp);
            for f in 0..2 * e {
                uf.union(owner[fo[f]], owner[fo[w.tau[f]]]);
            }
            if (0..ncomp).any(|j| uf.find(j) != uf.find(0)) {
                continue;
            }
            let cycles = w.flag_cycles();
            let empty: Vec<usize> = (0..nw).filter(|&i| flags[i] == 0).collect();
            if cycles.len() + empty.len() != olds.len() {
                continue;
            }
            // arrangement order: flag cycles by smallest flag, then flagless whites
            for arr in &arrangements {
                if empty.iter().zip(&arr[cycles.len()..]).any(|(&i, &d)| d != degrees[i]) {
                    continue;
                }
                let mut cand = w.clone();
                for (c, &d) in cycles.iter().zip(arr) {
                    for &f in c {
                        cand.old[f] = d;
                    }
                }
                if cand.bc(degrees).validate().is_ok() {
                    out.push(cand);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn zero_count(c: &SpecComponent) -> usize {
    c.boundary.iter().filter(|&&b| b == 0).count()
}

fn olds_for(target: &SpecComponent, ncb: usize) -> Vec<i64> {
    let mut v = target.boundary.clone();
    for _ in 0..ncb {
        let i = v.iter().position(|&b| b == 0).unwrap();
        v.remove(i);
    }
    v
}

fn wavy_edge_count(source: &ModuliSpec, target: &SpecComponent, ncb: usize) -> Option<usize> {
    let e = source.euler_characteristic() - target.euler_characteristic() - ncb as i64;
    (e >= 0).then_some(e as usize)
}

/// All labeled morphisms onto a connected target, by source.
fn labeled_morphisms(target: &SpecComponent, source: &ModuliSpec) -> Vec<Morphism> {
    let (owner, degree) = whites_of(source);
    let r = source.components.len();
    let mut out = Vec::new();
    for ncb in 0..=zero_count(target) {
        let Some(e) = wavy_edge_count(source, target, ncb) else { continue };
        let olds = olds_for(target, ncb);
        let configs = wavy_configs(&owner, &degree, r, e, &olds);
        if configs.is_empty() {
            continue;
        }
        for cb in compositions(ncb as u32, r) {
            for w in &configs {
                out.push(Morphism { source: source.clone(), wavy: w.clone(), cb: cb.clone() });
            }
        }
    }
    out
}

/// Relabelings of a morphism: automorphisms of the source spec combined with rotations.
fn relabelings(m: &Morphism) -> Vec<Morphism> {
    let comps = &m.source.components;
    let r = comps.len();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < r {
        let mut j = i;
        while j + 1 < r && comps[j + 1] == comps[i] && comps[i].labels.is_empty() {
            j += 1;
        }
        blocks.push((i..=j).collect());
        i = j + 1;
    }
    let (owner, degree) = whites_of(&m.source);
    let nw = owner.len();
    let mut first_white = vec![0; r + 1];
    for j in 0..r {
        first_white[j + 1] = first_white[j] + comps[j].h();
    }
    let mut wblocks: Vec<Vec<usize>> = Vec::new();
    let mut w = 0;
    while w < nw {
        let mut x = w;
        while x + 1 < nw && owner[x + 1] == owner[w] && degree[x + 1] == degree[w] {
            x += 1;
        }
        wblocks.push((w..=x).collect());
        w = x + 1;
    }
    let o = m.wavy.offsets();
    let fo = m.wavy.owner();
    let mut out = Vec::new();
    for cp in block_permutations(&blocks, r) {
        for wp in block_permutations(&wblocks, nw) {
            // white w goes to slot pi[w]
            let pi: Vec<usize> = (0..nw)
                .map(|w| {
                    let j = owner[w];
                    let t = wp[w] - first_white[j];
                    first_white[cp[j]] + t
                })
                .collect();
            let mut flags = vec![0; nw];
            for w in 0..nw {
                flags[pi[w]] = m.wavy.flags[w];
            }
            let mut no = vec![0; nw + 1];
            for w in 0..nw {
                no[w + 1] = no[w] + flags[w];
            }
            let rots: Vec<Vec<usize>> =
                m.wavy.flags.iter().map(|&k| if k == 0 { vec![0] } else { (0..k).collect() }).collect();
            let mut choice = vec![0usize; nw];
            loop {
                let relabel = |f: usize| {
                    let w = fo[f];
                    let k = m.wavy.flags[w];
                    no[pi[w]] + (f - o[w] + rots[w][choice[w]]) % k
                };
                let n = m.wavy.flag_count();
                let mut tau = vec![0; n];
                let mut old = vec![0; n];
                for f in 0..n {
                    tau[relabel(f)] = relabel(m.wavy.tau[f]);
                    old[relabel(f)] = m.wavy.old[f];
                }
                let mut cb = vec![0; r];
                for j in 0..r {
                    cb[cp[j]] = m.cb[j];
                }
                out.push(Morphism { source: m.source.clone(), wavy: WavyData { flags: flags.clone(), tau, old }, cb });
                let mut k = 0;
                while k < nw {
                    choice[k] += 1;
                    if choice[k] < rots[k].len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == nw {
                    break;
                }
            }
        }
    }
    out
}

/// Smallest relabeling, and the number of relabelings fixing the morphism.
pub fn canonical_morphism(m: &Morphism) -> (Morphism, u64) {
    let all = relabelings(m);
    let stab = all.iter().filter(|x| *x == m).count() as u64;
    (all.into_iter().min().unwrap(), stab)
}

fn cb_factorials(m: &Morphism) -> u64 {
    m.cb.iter().map(|&c| (1..=c as u64).product::<u64>()).product()
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismClass {
    pub morphism: Morphism,
    pub aut: u64,
}

/// One morphism per isomorphism class onto a connected target, with `|Aut M|`.
pub fn enumerate_morphisms(target: &ModuliSpec) -> Result<Vec<MorphismClass>> {
    target.validate()?;
    if target.components.len() != 1 {
        return Err(Error::Domain("morphism listing needs a connected target".into()));
    }
    let t = &target.components[0];
    let mut out = Vec::new();
    for s in enumerate_pure_sources(t) {
        let mut classes: BTreeSet<Morphism> = BTreeSet::new();
        for m in labeled_morphisms(t, &s) {
            let (c, _) = canonical_morphism(&m);
            classes.insert(c);
        }
        for c in classes {
            let (_, stab) = canonical_morphism(&c);
            let aut = stab * cb_factorials(&c);
            out.push(MorphismClass { morphism: c, aut });
        }
    }
    Ok(out)
}

/// Refuses sources whose fixed-point graphs need Hodge integrals beyond genus 1.
fn check_supported(source: &ModuliSpec) -> Result<()> {
    for c in &source.components {
        for (g, _) in enumerate_fp_graphs(c).iter() {
            if let Some(v) = g.unsupported_vertex() {
                let gamma = g.vertices[v].gamma;
                return Err(Error::HodgeUnsupported {
                    g: gamma,
                    k: gamma,
                    context: format!(" (vertex {v} of graph {} for source component {c})", g.describe()),
                });
            }
        }
    }
    Ok(())
}

fn wavy_factor(e: usize) -> Laurent {
    Laurent::monomial(-(e as i64), rat_pow(&rat(-1, 2), e as i64))
}

fn cb_factor(delta: i64, n: u32) -> Laurent {
    Laurent::monomial(-(n as i64), rat_pow(&rat(delta, 2), n as i64))
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismTerm {
    pub morphism: Morphism,
    pub aut: u64,
    #[serde(serialize_with = "ser_rational")]
    pub volume: Rational,
    pub value: Laurent,
}

/// Compact-form sum for a connected target, with its nonzero terms.
pub fn ogw_compact_traced(target: &SpecComponent, p: &DescendentProblem) -> Result<(Laurent, Vec<MorphismTerm>)> {
    let spec = ModuliSpec::single(target.clone());
    let classes = enumerate_morphisms(&spec)?;
    let mut sources: Vec<&ModuliSpec> = classes.iter().map(|c| &c.morphism.source).collect();
    sources.dedup();
    for s in &sources {
        check_supported(s)?;
    }
    let mut contributions: BTreeMap<&ModuliSpec, Laurent> = BTreeMap::new();
    for s in sources {
        contributions.insert(s, crate::fixed_point::spec_contribution(s, p)?);
    }
    let terms: Vec<Result<Option<MorphismTerm>>> = classes
        .par_iter()
        .map(|c| {
            let m = &c.morphism;
            let i = &contributions[&m.source];
            if i.is_zero() {
                return Ok(None);
            }
            let volume = bc_volume(&m.bc())?;
            if volume.is_zero() {
                return Ok(None);
            }
            let mut v = wavy_factor(m.wavy.wavy_count()).scale(&(&volume / int(c.aut as i64)));
            for (j, &n) in m.cb.iter().enumerate() {
                if n > 0 {
                    v *= &cb_factor(m.delta_morph(j), n);
                }
            }
            v *= i;
            Ok((!v.is_zero()).then(|| MorphismTerm { morphism: m.clone(), aut: c.aut, volume, value: v }))
        })
        .collect();
    let mut total = Laurent::zero();
    let mut kept = Vec::new();
    for t in terms {
        if let Some(t) = t? {
            total += &t.value;
            kept.push(t);
        }
    }
    Ok((total, kept))
}

fn fp_tuples(source: &ModuliSpec) -> Vec<Vec<(FixedPointGraph, u64)>> {
    let mut out: Vec<Vec<(FixedPointGraph, u64)>> = vec![vec![]];
    for c in &source.components {
        let gs = enumerate_fp_graphs(c);
        let mut grown = Vec::with_capacity(out.len() * gs.len());
        for base in &out {
            for g in gs.iter() {
                let mut t = base.clone();
                t.push(g.clone());
                grown.push(t);
            }
        }
        out = grown;
    }
    out
}

/// Multisets of `n` contracted boundary half-edges on the equators of `g`, as counts.
fn equator_counts(g: &FixedPointGraph, n: u32) -> Vec<Vec<u32>> {
    compositions(n, g.sphere_edges.len())
}

/// Graph-sum form for a connected target: labeled localization graphs over every tuple of
/// fixed-point graphs, weighted by the inverse of their relabeling group.
pub fn ogw_graph_sum(target: &SpecComponent, p: &DescendentProblem) -> Result<Laurent> {
    let mut total = Laurent::zero();
    for source in enumerate_pure_sources(target) {
        let r = source.components.len();
        let comp_perms = source.aut_order() / source.components.iter().map(|c| c.boundary_aut_order()).product::<u64>();
        let mut supported = false;
        for tuple in fp_tuples(&source) {
            let mut owner = Vec::new();
            let mut degree = Vec::new();
            for (j, (g, _)) in tuple.iter().enumerate() {
                for h in &g.disk_edges {
                    owner.push(j);
                    degree.push(g.vertices[h.vertex].mu.value() * h.d as i64);
                }
            }
            let mut weight: Option<Laurent> = None;
            for ncb in 0..=zero_count(target) {
                let Some(e) = wavy_edge_count(&source, target, ncb) else { continue };
                let configs = wavy_configs(&owner, &degree, r, e, &olds_for(target, ncb));
                if configs.is_empty() {
                    continue;
                }
                if !supported {
                    check_supported(&source)?;
                    supported = true;
                }
                let w = match &weight {
                    Some(w) => w.clone(),
                    None => {
                        let mut w = Laurent::constant(Rational::one() / int(comp_perms as i64));
                        for (g, aut) in &tuple {
                            w *= &graph_contribution(g, p)?.scale(&rat(1, *aut as i64));
                        }
                        weight = Some(w.clone());
                        w
                    }
                };
                if w.is_zero() {
                    break;
                }
                let mut wavy_sum = Rational::zero();
                for c in &configs {
                    let vol = bc_volume(&c.bc(&degree))?;
                    let rot: u64 = c.flags.iter().map(|&k| k.max(1) as u64).product();
                    wavy_sum += vol / int(rot as i64);
                }
                if wavy_sum.is_zero() {
                    continue;
                }
                // contracted boundary half-edges spread over equators, each with weight |d_e| / 2u
                let mut cb_sum = Laurent::zero();
                let per_comp: Vec<Vec<Vec<u32>>> = compositions(ncb as u32, r)
                    .into_iter()
                    .flat_map(|dist| {
                        let opts: Vec<Vec<Vec<u32>>> =
                            tuple.iter().zip(&dist).map(|((g, _), &n)| equator_counts(g, n)).collect();
                        let mut acc: Vec<Vec<Vec<u32>>> = vec![vec![]];
                        for o in opts {
                            let mut grown = Vec::new();
                            for a in &acc {
                                for x in &o {
                                    let mut b = a.clone();
                                    b.push(x.clone());
                                    grown.push(b);
                                }
                            }
                            acc = grown;
                        }
                        acc
                    })
                    .collect();
                for placement in per_comp {
                    let mut term = Laurent::one();
                    for ((g, _), counts) in tuple.iter().zip(&placement) {
                        for (edge, &c) in g.sphere_edges.iter().zip(counts) {
                            if c > 0 {
                                let fact: u64 = (1..=c as u64).product();
                                term *= &cb_factor(edge.d as i64, c).scale(&rat(1, fact as i64));
                            }
                        }
                    }
                    cb_sum += &term;
                }
                total += &(wavy_factor(e).scale(&wavy_sum) * cb_sum * w);
            }
        }
    }
    Ok(total)
}

/// Localization definition of the invariant.
pub fn ogw(target: &ModuliSpec, p: &DescendentProblem, path: EvalPath) -> Result<Laurent> {
    target.validate()?;
    p.check_domain(&target.labels())?;
    let target = target.canonical();
    if target.components.is_empty() {
        return Ok(Laurent::one());
    }
    // Rooted morphisms factor over target components, giving
    // OGW(S) |Aut S| = prod_i |Aut T_i| OGW(T_i).
    let mut out = Laurent::one();
    for t in &target.components {
        let v = match path {
            EvalPath::Compact => ogw_compact_traced(t, p)?.0,
            EvalPath::GraphSum => ogw_graph_sum(t, p)?,
        };
        out = out * v.scale(&int(t.boundary_aut_order() as i64));
        if out.is_zero() {
            return Ok(out);
        }
    }
    Ok(out.scale(&rat(1, target.aut_order() as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_core::{label_set, Sign};

    fn disk(labels: &[&str], d: (u32, u32)) -> SpecComponent {
        SpecComponent::disk(label_set(labels.iter().copied()), d)
    }

    #[test]
    fn morphism_counts() {
        let m = enumerate_morphisms(&ModuliSpec::single(disk(&["1"], (2, 0)))).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|c| c.aut == 1));
        let w = m.iter().find(|c| c.morphism.wavy.wavy_count() == 1).unwrap();
        assert_eq!(w.morphism.source.components.len(), 2);
        assert_eq!(w.morphism.wavy.old, vec![2, 2]);

        let m = enumerate_morphisms(&ModuliSpec::single(disk(&[], (1, 1)))).unwrap();
        assert!(m.iter().any(|c| c.morphism.cb_count() == 1
            && c.morphism.source == ModuliSpec::single(SpecComponent::sphere(LabelSet::new(), 1))));

        let closed = ModuliSpec::single(SpecComponent::sphere(label_set(["1"]), 1));
        let m = enumerate_morphisms(&closed).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].morphism, Morphism::identity(&closed.components[0]));
    }

    #[test]
    fn bc_construction() {
        let id = Morphism::identity(&disk(&[], (2, 0)));
        let g = id.bc();
        assert_eq!(g.loops, vec![BcLoop { new: 2, old: 2 }]);
        assert_eq!(g.vertex_count(), 0);

        let source = ModuliSpec::new(vec![disk(&["1"], (1, 0)), disk(&[], (1, 0))]);
        let m =
            Morphism { source, wavy: WavyData { flags: vec![1, 1], tau: vec![1, 0], old: vec![2, 2] }, cb: vec![0, 0] };
        let g = m.bc();
        assert_eq!(g.next, vec![0, 1]);
        assert_eq!(g.wavy_edges(), vec![(0, 1)]);
        assert_eq!(g.new_perimeter, BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(g.old_faces().len(), 1);
        assert_eq!(m.desingularization(), ModuliSpec::single(disk(&["1"], (2, 0))));

        // self wavy edge: two vertices on one new face, and an annulus
        let m = Morphism {
            source: ModuliSpec::single(disk(&[], (2, 0))),
            wavy: WavyData { flags: vec![2], tau: vec![1, 0], old: vec![1, 1] },
            cb: vec![0],
        };
        let g = m.bc();
        assert_eq!(g.next, vec![1, 0]);
        assert_eq!(g.new_faces().len(), 1);
        assert_eq!(m.desingularization().components[0], SpecComponent::new(0, LabelSet::new(), (2, 0), vec![1, 1]));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_morph_of(&SpecComponent::sphere(LabelSet::new(), 1)), 1);
        assert_eq!(delta_morph_of(&SpecComponent::new(0, LabelSet::new(), (3, 1), vec![2])), 1);
        assert_eq!(delta_morph_of(&SpecComponent::new(0, LabelSet::new(), (2, 2), vec![0])), 2);
    }

    #[test]
    fn ogw_examples() {
        let p = DescendentProblem::from_lists(&["1".to_string()], &[1], &[Sign::Plus]);
        let t = ModuliSpec::single(disk(&["1"], (2, 0)));
        let (total, terms) = ogw_compact_traced(&t.components[0], &p).unwrap();
        assert_eq!(total, Laurent::constant(rat(1, 2)));
        let mut vals: Vec<Rational> = terms.iter().map(|t| t.value.coeff(0)).collect();
        vals.sort();
        assert_eq!(vals, vec![rat(-1, 2), int(1)]);
        assert_eq!(ogw(&t, &p, EvalPath::GraphSum).unwrap(), total);

        let p0 = DescendentProblem::from_lists(&["1".to_string()], &[0], &[Sign::Plus]);
        assert!(ogw(&ModuliSpec::single(disk(&["1"], (1, 1))), &p0, EvalPath::Compact).unwrap().is_zero());
        let s = ModuliSpec::single(SpecComponent::sphere(label_set(["1"]), 1));
        assert_eq!(ogw(&s, &p0, EvalPath::Compact).unwrap(), Laurent::one());
    }

    #[test]
    fn class_weights_match_labeled_count() {
        for t in [disk(&["1"], (2, 1)), disk(&[], (2, 1)), SpecComponent::new(0, LabelSet::new(), (2, 0), vec![1, 1])] {
            let classes = enumerate_morphisms(&ModuliSpec::single(t.clone())).unwrap();
            let lhs: Rational = classes.iter().map(|c| rat(1, c.aut as i64)).sum();
            let mut rhs = Rational::zero();
            for s in enumerate_pure_sources(&t) {
                for m in labeled_morphisms(&t, &s) {
                    let rot: u64 = m.wavy.flags.iter().map(|&k| k.max(1) as u64).product();
                    rhs += rat(1, (s.aut_order() * rot * cb_factorials(&m)) as i64);
                }
            }
            assert_eq!(lhs, rhs, "{t}");
        }
    }

    #[test]
    fn desingularization_recovers_target() {
        let t = SpecComponent::new(0, label_set(["1"]), (2, 1), vec![1, 0]);
        for c in enumerate_morphisms(&ModuliSpec::single(t.clone())).unwrap() {
            assert_eq!(c.morphism.desingularization(), ModuliSpec::single(t.clone()));
        }
    }
}
