//! Bounded rational H-polytopes `{y : A y <= b}` and their exact volumes.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::exactalg::{factorial, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    pub dim: usize,
    pub rows: Vec<(Vec<Rational>, Rational)>,
}

/// Solves a square system, returning `None` when singular.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] * &inv;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

pub fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    det
}

/// Rank of a list of vectors.
pub fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn affine_rank(points: &[&Vec<Rational>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let base = points[0];
    rank(points[1..].iter().map(|p| p.iter().zip(base).map(|(x, y)| x - y).collect()).collect())
}

/// Drops zero rows (or reports infeasibility) and scales each row so its first nonzero
/// entry is +-1, keeping the tightest bound per direction.
fn normalize(rows: &[(Vec<Rational>, Rational)]) -> Option<Vec<(Vec<Rational>, Rational)>> {
    let mut best: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    for (a, b) in rows {
        let Some(j) = a.iter().position(|x| !x.is_zero()) else {
            if b.is_negative() {
                return None;
            }
            continue;
        };
        let s = a[j].abs();
        let a: Vec<Rational> = a.iter().map(|x| x / &s).collect();
        let b = b / &s;
        match best.get_mut(&a) {
            Some(old) if *old <= b => {}
            Some(old) => *old = b,
            None => {
                best.insert(a, b);
            }
        }
    }
    Some(best.into_iter().collect())
}

fn lasserre(dim: usize, rows: &[(Vec<Rational>, Rational)]) -> Rational {
    let Some(rows) = normalize(rows) else {
        return Rational::zero();
    };
    if dim == 0 {
        return Rational::one();
    }
    if dim == 1 {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for (a, b) in &rows {
            let v = b / &a[0];
            if a[0].is_positive() {
                hi = Some(hi.map_or(v.clone(), |h| h.min(v)));
            } else {
                lo = Some(lo.map_or(v.clone(), |l| l.max(v)));
            }
        }
        let (lo, hi) = (lo.expect("unbounded polytope"), hi.expect("unbounded polytope"));
        return if hi > lo { hi - lo } else { Rational::zero() };
    }
    let mut total = Rational::zero();
    for (i, (ai, bi)) in rows.iter().enumerate() {
        if bi.is_zero() {
            continue;
        }
        let j = ai.iter().position(|x| !x.is_zero()).unwrap();
        // ai[j] = +-1; substitute y_j = (bi - sum_{k != j} ai_k y_k) / ai_j
        let mut sub = Vec::with_capacity(rows.len() - 1);
        for (r, (ar, br)) in rows.iter().enumerate() {
            if r == i {
                continue;
            }
            let f = &ar[j] / &ai[j];
            let a: Vec<Rational> = (0..dim).filter(|&k| k != j).map(|k| &ar[k] - &f * &ai[k]).collect();
            sub.push((a, br - &f * bi));
        }
        let facet = lasserre(dim - 1, &sub);
        total += bi * facet;
    }
    total / Rational::from_integer((dim as i64).into())
}

impl HPolytope {
    pub fn new(dim: usize, rows: Vec<(Vec<Rational>, Rational)>) -> Self {
        Self { dim, rows }
    }

    /// Axis box `[lo_i, hi_i]`.
    pub fn cube(lo: &[Rational], hi: &[Rational]) -> Self {
        let dim = lo.len();
        let mut rows = Vec::new();
        for i in 0..dim {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            rows.push((e.clone(), hi[i].clone()));
            rows.push((e.iter().map(|x| -x).collect(), -lo[i].clone()));
        }
        Self { dim, rows }
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        self.rows.iter().all(|(a, b)| a.iter().zip(y).map(|(x, z)| x * z).sum::<Rational>() <= *b)
    }

    /// Volume by recursive facet decomposition.
    pub fn volume_lasserre(&self) -> Rational {
        lasserre(self.dim, &self.rows)
    }

    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let n = self.dim;
        let rows = normalize(&self.rows).unwrap_or_default();
        let mut out: BTreeSet<Vec<Rational>> = BTreeSet::new();
        if n == 0 {
            return vec![vec![]];
        }
        let m = rows.len();
        if m < n {
            return vec![];
        }
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let a: Vec<Vec<Rational>> = idx.iter().map(|&i| rows[i].0.clone()).collect();
            let b: Vec<Rational> = idx.iter().map(|&i| rows[i].1.clone()).collect();
            if let Some(y) = solve(a, b) {
                if self.contains(&y) {
                    out.insert(y);
                }
            }
            // next combination
            let mut k = n;
            loop {
                if k == 0 {
                    return out.into_iter().collect();
                }
                k -= 1;
                if idx[k] < m - n + k {
                    idx[k] += 1;
                    for t in k + 1..n {
                        idx[t] = idx[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Volume by vertex enumeration and a pulling triangulation.
    pub fn volume_triangulation(&self) -> Rational {
        let n = self.dim;
        let verts = self.vertices();
        if n == 0 {
            return if verts.is_empty() || !self.contains(&[]) { Rational::zero() } else { Rational::one() };
        }
        if verts.len() < n + 1 || affine_rank(&verts.iter().collect::<Vec<_>>()) < n {
            return Rational::zero();
        }
        let rows = normalize(&self.rows).unwrap_or_default();
        let tight: Vec<BTreeSet<usize>> = rows
            .iter()
            .map(|(a, b)| {
                (0..verts.len())
                    .filter(|&v| a.iter().zip(&verts[v]).map(|(x, y)| x * y).sum::<Rational>() == *b)
                    .collect()
            })
            .collect();
        let all: BTreeSet<usize> = (0..verts.len()).collect();
        let simplices = pull(&all, n, &verts, &tight);
        let mut total = Rational::zero();
        for s in simplices {
            let v0 = &verts[s[0]];
            let m: Vec<Vec<Rational>> =
                s[1..].iter().map(|&v| verts[v].iter().zip(v0).map(|(x, y)| x - y).collect()).collect();
            total += determinant(m).abs();
        }
        total / Rational::from_integer(factorial(n as u64))
    }
}

fn pull(face: &BTreeSet<usize>, k: usize, verts: &[Vec<Rational>], tight: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![*face.iter().next().unwrap()]];
    }
    let v0 = *face.iter().next().unwrap();
    let mut facets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for t in tight {
        let sub: BTreeSet<usize> = face.intersection(t).copied().collect();
        if sub.len() < k || sub.len() == face.len() || sub.contains(&v0) {
            continue;
        }
        let pts: Vec<&Vec<Rational>> = sub.iter().map(|&v| &verts[v]).collect();
        if affine_rank(&pts) == k - 1 {
            facets.insert(sub);
        }
    }
    let mut out = Vec::new();
    for f in facets {
        for mut s in pull(&f, k - 1, verts, tight) {
            s.insert(0, v0);
            out.push(s);
        }
    }
    out
}
