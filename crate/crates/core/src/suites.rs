//! Verification suites over finite grids. Each suite stops at the first counterexample.

use std::fmt;

use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;

use crate::bc_volume::{bc_volume, tree_bc_graphs};
use crate::combinat::compositions;
use crate::error::{Error, Result};
use crate::exactalg::{int, laurent_mul, rat, rat_pow, Laurent, Monomial, Rational};
use crate::fixed_point::{edge_weight, halfedge_weight, spec_contribution};
use crate::genus0::{ogw_genus0, ogw_genus0_partitions};
use crate::higher_genus::{ogw, EvalPath};
use crate::oracles::{check_disk_identity, check_disk_identity_symbolic, check_divisor, check_trr, disk_cover_closed};
use crate::psi_hodge::{descendent_integral, psi_integral_g0};
use crate::spec_core::{label_set, DescendentProblem, Label, LabelSet, ModuliSpec, Sign, SpecComponent};

pub const SUITES: &[&str] = &[
    "disk-cover",
    "dd-vanish",
    "underdetermined",
    "homogeneity",
    "divisor",
    "trr",
    "cayley",
    "edge-identity",
    "tree-volume",
    "genus0-agreement",
    "graph-sum",
    "closed-sphere",
    "psi",
    "disk-identity",
];

/// Grid bounds shared by all suites. `max_a` caps the total exponent where a suite has a free one.
#[derive(Clone, Copy, Debug)]
pub struct Grid {
    pub max_d: u32,
    pub max_labels: usize,
    pub max_a: Option<u32>,
}

impl Grid {
    pub fn new(max_d: u32, max_labels: usize) -> Self {
        Self { max_d, max_labels, max_a: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub suite: String,
    pub checked: usize,
    pub counterexample: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// A genus-0 disk input.
#[derive(Clone, Debug)]
pub struct Instance {
    pub labels: LabelSet,
    pub d: (u32, u32),
    pub p: DescendentProblem,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d=({},{})", self.d.0, self.d.1)?;
        for l in &self.labels {
            write!(f, " {l}:a={},eps={}", self.p.a[l], self.p.eps[l].symbol())?;
        }
        Ok(())
    }
}

fn names(n: usize) -> Vec<Label> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn sign_vectors(n: usize) -> Vec<Vec<Sign>> {
    (0..1usize << n).map(|m| (0..n).map(|i| if m >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect()).collect()
}

fn push_all(out: &mut Vec<Instance>, d: (u32, u32), n: usize, total: u32, signs: &[Vec<Sign>]) {
    let ids = names(n);
    let labels: LabelSet = ids.iter().cloned().collect();
    for a in compositions(total, n) {
        let a: Vec<i64> = a.iter().map(|&x| x as i64).collect();
        for eps in signs {
            out.push(Instance { labels: labels.clone(), d, p: DescendentProblem::from_lists(&ids, &a, eps) });
        }
    }
}

/// `(d,0)`, `d <= max_d`, `n <= max_labels`, `sum a = d - 1`, all constraints `+`.
pub fn disk_cover_instances(max_d: u32, max_labels: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        for n in 0..=max_labels {
            push_all(&mut out, (d, 0), n, d - 1, &[vec![Sign::Plus; n]]);
        }
    }
    out
}

/// `(d,d)`, `d <= max_d`, `n <= max_labels`, `sum a <= 2d - 1`, all constraints.
pub fn dd_instances(max_d: u32, max_labels: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        for n in 0..=max_labels {
            let signs = sign_vectors(n);
            for total in 0..2 * d {
                push_all(&mut out, (d, d), n, total, &signs);
            }
        }
    }
    out
}

fn degrees(max_total: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for s in 1..=max_total {
        for dp in 0..=s {
            out.push((dp, s - dp));
        }
    }
    out
}

/// `d+ + d- <= max_d`, `n <= max_labels`, `1 + sum a < d+ + d-`, all constraints.
pub fn underdetermined_instances(max_d: u32, max_labels: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for d in degrees(max_d) {
        let sum = d.0 + d.1;
        for n in 0..=max_labels {
            let signs = sign_vectors(n);
            for total in 0..sum.saturating_sub(1) {
                push_all(&mut out, d, n, total, &signs);
            }
        }
    }
    out
}

/// Dimension-matched disks: `d+ + d- <= max_d`, `n <= max_labels`, `sum a = d+ + d- - 1`.
pub fn matched_disk_instances(max_d: u32, max_labels: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for d in degrees(max_d) {
        for n in 0..=max_labels {
            let signs = sign_vectors(n);
            push_all(&mut out, d, n, d.0 + d.1 - 1, &signs);
        }
    }
    out
}

fn valid(i: &Instance) -> bool {
    SpecComponent::disk(i.labels.clone(), i.d).validate().is_ok()
}

/// Runs `check` over `items` in parallel and reports the first failure in input order.
fn first_failure<T: Sync, F>(suite: &str, items: &[T], check: F) -> Outcome
where
    F: Fn(&T) -> Result<Option<String>> + Sync,
{
    let fails: Vec<Option<String>> = items
        .par_iter()
        .map(|x| match check(x) {
            Ok(r) => r,
            Err(e) => Some(format!("error: {e}")),
        })
        .collect();
    Outcome { suite: suite.to_string(), checked: items.len(), counterexample: fails.into_iter().flatten().next() }
}

fn expect_eq(lhs: &Laurent, rhs: &Laurent, what: impl fmt::Display) -> Option<String> {
    (lhs != rhs).then(|| format!("{what}: {lhs} != {rhs}"))
}

pub fn disk_cover(max_d: u32, max_labels: usize) -> Outcome {
    let inst = disk_cover_instances(max_d, max_labels);
    first_failure("disk-cover", &inst, |i| {
        if !valid(i) {
            return Ok(None);
        }
        let a: Vec<u32> = i.labels.iter().map(|l| i.p.a[l] as u32).collect();
        let want = Laurent::constant(disk_cover_closed(&a));
        Ok(expect_eq(&ogw_genus0(&i.labels, i.d, &i.p)?, &want, i))
    })
}

fn vanish(suite: &str, inst: &[Instance]) -> Outcome {
    first_failure(suite, inst, |i| {
        if !valid(i) {
            return Ok(None);
        }
        Ok(expect_eq(&ogw_genus0(&i.labels, i.d, &i.p)?, &Laurent::zero(), i))
    })
}

pub fn dd_vanish(max_d: u32, max_labels: usize) -> Outcome {
    vanish("dd-vanish", &dd_instances(max_d, max_labels))
}

pub fn underdetermined(max_d: u32, max_labels: usize) -> Outcome {
    vanish("underdetermined", &underdetermined_instances(max_d, max_labels))
}

/// Exponent `sum a + 1 - (d+ + d-)` for every nonzero value on `inst`.
pub fn homogeneity_on(inst: &[Instance]) -> Outcome {
    first_failure("homogeneity", inst, |i| {
        if !valid(i) {
            return Ok(None);
        }
        let v = ogw_genus0(&i.labels, i.d, &i.p)?;
        let want = i.p.total_a() + 1 - (i.d.0 + i.d.1) as i64;
        Ok(match v.is_monomial() {
            Monomial::Zero => None,
            Monomial::Term(k, _) if k == want => None,
            _ => Some(format!("{i}: {v} is not a multiple of u^{want}")),
        })
    })
}

/// The union of the disk-cover, (d,d) and underdetermined grids.
pub fn closed_form_instances(g: Grid) -> Vec<Instance> {
    let mut inst = disk_cover_instances(g.max_d, g.max_labels);
    inst.extend(dd_instances(g.max_d, g.max_labels));
    inst.extend(underdetermined_instances(g.max_d, g.max_labels));
    inst
}

pub fn cayley_on(inst: &[Instance]) -> Outcome {
    first_failure("cayley", inst, |i| {
        if !valid(i) {
            return Ok(None);
        }
        Ok(expect_eq(&ogw_genus0(&i.labels, i.d, &i.p)?, &ogw_genus0_partitions(&i.labels, i.d, &i.p)?, i))
    })
}

/// Divisor equation with `|labels| <= max_labels` counted after adding the new point.
pub fn divisor(max_d: u32, max_labels: usize, max_a: u32) -> Outcome {
    let mut inst = Vec::new();
    for d in degrees(max_d) {
        for n in 0..max_labels {
            let signs = sign_vectors(n);
            for total in 0..=max_a {
                for e1 in [Sign::Plus, Sign::Minus] {
                    let mut v = Vec::new();
                    push_all(&mut v, d, n, total, &signs);
                    inst.extend(v.into_iter().map(|i| (i, e1)));
                }
            }
        }
    }
    first_failure("divisor", &inst, |(i, e1)| {
        let c = check_divisor(&i.labels, i.d, &i.p, "0", *e1)?;
        Ok((!c.holds).then(|| format!("{i} new:eps={}: {} != {}", e1.symbol(), c.lhs, c.rhs)))
    })
}

/// Recursion in the `(d,0)` sector, `2 <= n <= max_labels`, `sum a <= max_a` (default `d + 1`).
pub fn trr(max_d: u32, max_labels: usize, max_a: Option<u32>) -> Outcome {
    let mut inst = Vec::new();
    for d in 1..=max_d {
        for n in 2..=max_labels {
            for total in 0..=max_a.unwrap_or(d + 1) {
                inst.extend(compositions(total, n).into_iter().map(|a| (a, d)));
            }
        }
    }
    first_failure("trr", &inst, |(a, d)| {
        let c = check_trr(a, *d)?;
        Ok((!c.holds).then(|| format!("a={a:?} d={d}: {} != {}", c.lhs, c.rhs)))
    })
}

pub fn edge_identity(max_d: u32) -> Outcome {
    let ds: Vec<u32> = (1..=max_d).collect();
    first_failure("edge-identity", &ds, |&d| {
        let rhs =
            laurent_mul(&halfedge_weight(Sign::Plus, d)?, &halfedge_weight(Sign::Minus, d)?).scale(&int(-(d as i64)));
        Ok(expect_eq(&edge_weight(d)?, &rhs, format!("d={d}")))
    })
}

/// Tree shapes with at most `max_vertices <= 4` vertices, one per isomorphism class.
pub fn tree_shapes(max_vertices: usize) -> Vec<Vec<(usize, usize)>> {
    let all =
        vec![vec![], vec![(0, 1)], vec![(0, 1), (1, 2)], vec![(0, 1), (1, 2), (2, 3)], vec![(0, 1), (0, 2), (0, 3)]];
    all.into_iter().filter(|e| e.len() < max_vertices).collect()
}

fn nonzero_nets(r: usize, max: i64) -> Vec<Vec<i64>> {
    let vals: Vec<i64> = (-max..=max).filter(|&x| x != 0).collect();
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out.into_iter().flat_map(|v| vals.iter().map(move |&x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Volume sum over the BC graphs of each tree against `prod net_v^val(v)`.
pub fn tree_volume(max_net: u32, max_vertices: usize) -> Outcome {
    let mut inst = Vec::new();
    for edges in tree_shapes(max_vertices) {
        for nets in nonzero_nets(edges.len() + 1, max_net as i64) {
            inst.push((nets, edges.clone()));
        }
    }
    first_failure("tree-volume", &inst, |(nets, edges)| {
        let mut lhs = Rational::from_integer(0.into());
        for g in tree_bc_graphs(nets, edges) {
            lhs += bc_volume(&g)?;
        }
        let mut val = vec![0i64; nets.len()];
        for &(a, b) in edges {
            val[a] += 1;
            val[b] += 1;
        }
        let rhs: Rational = nets.iter().zip(&val).map(|(&d, &k)| rat_pow(&int(d), k)).product();
        Ok((lhs != rhs).then(|| format!("nets={nets:?} edges={edges:?}: {lhs} != {rhs}")))
    })
}

/// Higher-genus compact form against the tree sum on dimension-matched disks.
pub fn genus0_agreement(max_d: u32, max_labels: usize) -> Outcome {
    let inst = matched_disk_instances(max_d, max_labels);
    first_failure("genus0-agreement", &inst, |i| {
        let t = SpecComponent::disk(i.labels.clone(), i.d);
        if t.validate().is_err() {
            return Ok(None);
        }
        let got = ogw(&ModuliSpec::single(t), &i.p, EvalPath::Compact)?;
        Ok(expect_eq(&got, &ogw_genus0(&i.labels, i.d, &i.p)?, i))
    })
}

/// Genus-1 targets (in the `2gs + h - 1` sense) small enough for both evaluation paths.
pub fn genus_one_targets() -> Vec<SpecComponent> {
    vec![
        SpecComponent::new(0, label_set(["1"]), (2, 0), vec![1, 1]),
        SpecComponent::new(1, label_set(["1"]), (1, 0), vec![1]),
    ]
}

fn problems(labels: &LabelSet, total: u32) -> Vec<DescendentProblem> {
    let ids: Vec<Label> = labels.iter().cloned().collect();
    let mut out = Vec::new();
    for a in compositions(total, ids.len()) {
        let a: Vec<i64> = a.iter().map(|&x| x as i64).collect();
        for eps in sign_vectors(ids.len()) {
            out.push(DescendentProblem::from_lists(&ids, &a, &eps));
        }
    }
    out
}

/// Compact and graph-sum paths on matched disks plus the genus-1 targets.
pub fn graph_sum(max_d: u32, max_labels: usize) -> Outcome {
    let mut inst: Vec<(SpecComponent, DescendentProblem)> = matched_disk_instances(max_d, max_labels)
        .into_iter()
        .map(|i| (SpecComponent::disk(i.labels, i.d), i.p))
        .filter(|(t, _)| t.validate().is_ok())
        .collect();
    for t in genus_one_targets() {
        // matched exponent is d+ + d- - 1 + genus
        let total = (t.d.0 + t.d.1) as i64 - 1 + t.genus();
        for p in problems(&t.labels, total as u32) {
            inst.push((t.clone(), p));
        }
    }
    first_failure("graph-sum", &inst, |(t, p)| {
        let s = ModuliSpec::single(t.clone());
        let a = ogw(&s, p, EvalPath::Compact)?;
        let b = ogw(&s, p, EvalPath::GraphSum)?;
        Ok(expect_eq(&a, &b, format!("{t} {p:?}")))
    })
}

pub fn closed_sphere() -> Outcome {
    let cases = [Sign::Plus, Sign::Minus];
    first_failure("closed-sphere", &cases, |&e| {
        let s = ModuliSpec::single(SpecComponent::sphere(label_set(["1"]), 1));
        let p = DescendentProblem::from_lists(&names(1), &[0], &[e]);
        Ok(expect_eq(&spec_contribution(&s, &p)?, &Laurent::one(), format!("eps={}", e.symbol())))
    })
}

/// Genus-0 closed form against the recursion for `3 <= n <= max_points`, string and dilaton
/// on random inputs, and the genus-1 one-point value.
pub fn psi(max_points: usize, samples: usize, seed: u64) -> Outcome {
    let mut vecs = Vec::new();
    for n in 3..=max_points {
        vecs.extend(compositions(n as u32 - 3, n));
    }
    let base = first_failure("psi", &vecs, |b| {
        let x = psi_integral_g0(b)?;
        let y = descendent_integral(0, b)?;
        Ok((x != y).then(|| format!("g=0 b={b:?}: {x} != {y}")))
    });
    if !base.passed() {
        return base;
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cases = Vec::new();
    while cases.len() < samples {
        let g: u32 = rng.gen_range(0..=2);
        let n = rng.gen_range(1..=4usize);
        if 3 * g as usize + n < 3 {
            continue;
        }
        // pick a vector near the dimension so that both sides are usually nonzero
        let dim = 3 * g as i64 - 2 + n as i64;
        if dim < 0 {
            continue;
        }
        let mut b = vec![0u32; n];
        for _ in 0..dim {
            b[rng.gen_range(0..n)] += 1;
        }
        if rng.gen_bool(0.2) {
            b[0] += 1;
        }
        cases.push((g, b));
    }
    let closure = first_failure("psi", &cases, |(g, b)| {
        let g = *g;
        let mut with0 = b.clone();
        with0.push(0);
        let lhs = descendent_integral(g, &with0)?;
        let mut rhs = Rational::from_integer(0.into());
        for i in 0..b.len() {
            if b[i] > 0 {
                let mut c = b.clone();
                c[i] -= 1;
                rhs += descendent_integral(g, &c)?;
            }
        }
        if lhs != rhs {
            return Ok(Some(format!("string g={g} b={b:?}: {lhs} != {rhs}")));
        }
        let mut with1 = b.clone();
        with1.push(1);
        let lhs = descendent_integral(g, &with1)?;
        let rhs = int(2 * g as i64 - 2 + b.len() as i64) * descendent_integral(g, b)?;
        Ok((lhs != rhs).then(|| format!("dilaton g={g} b={b:?}: {lhs} != {rhs}")))
    });
    if !closure.passed() {
        return closure;
    }
    let t1 = match descendent_integral(1, &[1]) {
        Ok(v) => (v != rat(1, 24)).then(|| format!("<tau_1>_1 = {v}")),
        Err(e) => Some(format!("error: {e}")),
    };
    Outcome { suite: "psi".into(), checked: base.checked + closure.checked + 1, counterexample: t1 }
}

/// Symbolic check for `2 <= n <= max_n` plus random integer points.
pub fn disk_identity(max_n: usize, samples: usize, seed: u64) -> Outcome {
    let ns: Vec<usize> = (2..=max_n).collect();
    let sym = first_failure("disk-identity", &ns, |&n| {
        Ok((!check_disk_identity_symbolic(n)).then(|| format!("symbolic check fails at n={n}")))
    });
    if !sym.passed() {
        return sym;
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let pts: Vec<Vec<Rational>> = (0..samples)
        .map(|_| {
            let n = rng.gen_range(2..=max_n.max(2));
            (0..n).map(|_| int(rng.gen_range(-20..=20))).collect()
        })
        .collect();
    let rand = first_failure("disk-identity", &pts, |a| {
        Ok((!check_disk_identity(a)).then(|| format!("a={:?}", a.iter().map(|x| x.to_string()).collect::<Vec<_>>())))
    });
    Outcome { suite: "disk-identity".into(), checked: sym.checked + rand.checked, counterexample: rand.counterexample }
}

/// Dispatches a suite by name.
pub fn run_suite(name: &str, g: Grid) -> Result<Outcome> {
    Ok(match name {
        "disk-cover" => disk_cover(g.max_d, g.max_labels),
        "dd-vanish" => dd_vanish(g.max_d, g.max_labels),
        "underdetermined" => underdetermined(g.max_d, g.max_labels),
        "homogeneity" => homogeneity_on(&closed_form_instances(g)),
        "divisor" => divisor(g.max_d, g.max_labels, g.max_a.unwrap_or(4)),
        "trr" => trr(g.max_d, g.max_labels, g.max_a),
        "cayley" => cayley_on(&closed_form_instances(g)),
        "edge-identity" => edge_identity(g.max_d),
        "tree-volume" if g.max_labels > 4 => {
            return Err(Error::Domain("max-labels: tree shapes are tabulated up to 4 vertices".into()))
        }
        "tree-volume" => tree_volume(g.max_d, g.max_labels),
        "genus0-agreement" => genus0_agreement(g.max_d, g.max_labels),
        "graph-sum" => graph_sum(g.max_d, g.max_labels),
        "closed-sphere" => closed_sphere(),
        "psi" => psi(g.max_labels, 200, 13),
        "disk-identity" => disk_identity(g.max_labels, 200, 17),
        other => {
            return Err(Error::Domain(format!("suite: unknown suite {other:?}; expected one of {}", SUITES.join(", "))))
        }
    })
}
