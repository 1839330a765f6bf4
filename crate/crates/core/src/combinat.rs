//! Small enumeration helpers shared by the graph and tree generators.

/// Weak compositions of `total` into `parts` nonnegative summands.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(left: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == parts {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, parts, cur, out);
            cur.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(total, parts, &mut cur, &mut out);
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

/// Distinct arrangements of a multiset.
pub fn multiset_permutations<T: Ord + Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut v = items.to_vec();
    v.sort();
    let n = v.len();
    let mut out = vec![v.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| v[i - 1] < v[i]) else { break };
        let j = (i..n).rev().find(|&j| v[j] > v[i - 1]).unwrap();
        v.swap(i - 1, j);
        v[i..].reverse();
        out.push(v.clone());
    }
    out
}

/// Perfect matchings of `0..n` as involutions `m[i] = partner`.
pub fn perfect_matchings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n % 2 == 1 {
        return out;
    }
    let mut m = vec![usize::MAX; n];
    fn rec(m: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(i) = m.iter().position(|&x| x == usize::MAX) else {
            out.push(m.clone());
            return;
        };
        for j in i + 1..m.len() {
            if m[j] == usize::MAX {
                m[i] = j;
                m[j] = i;
                rec(m, out);
                m[i] = usize::MAX;
                m[j] = usize::MAX;
            }
        }
    }
    rec(&mut m, &mut out);
    out
}

/// All maps `0..n -> 0..k`.
pub fn functions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(vec![]);
        }
        return out;
    }
    let mut f = vec![0; n];
    loop {
        out.push(f.clone());
        let mut i = 0;
        while i < n {
            f[i] += 1;
            if f[i] < k {
                break;
            }
            f[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    out
}

/// Cartesian product of per-block permutation lists (each block acting on its own indices).
pub fn block_permutations(blocks: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![(0..n).collect::<Vec<usize>>()];
    for block in blocks {
        if block.len() < 2 {
            continue;
        }
        let perms = permutations(block.len());
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for base in &out {
            for p in &perms {
                let mut q = base.clone();
                for (i, &pi) in p.iter().enumerate() {
                    q[block[i]] = block[pi];
                }
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Labeled trees on `0..r` via Prufer sequences, as edge lists.
pub fn labeled_trees(r: usize) -> Vec<Vec<(usize, usize)>> {
    match r {
        0 => return vec![],
        1 => return vec![vec![]],
        2 => return vec![vec![(0, 1)]],
        _ => {}
    }
    let mut out = Vec::new();
    for seq in functions(r - 2, r) {
        let mut degree = vec![1usize; r];
        for &x in &seq {
            degree[x] += 1;
        }
        let mut edges = Vec::with_capacity(r - 1);
        for &x in &seq {
            let leaf = (0..r).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf.min(x), leaf.max(x)));
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..r).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

pub fn factorial_u64(n: u64) -> u64 {
    (1..=n).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(compositions(3, 2).len(), 4);
        assert_eq!(compositions(0, 0).len(), 1);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(multiset_permutations(&[1, 1, 2]).len(), 3);
        assert_eq!(perfect_matchings(6).len(), 15);
        assert_eq!(functions(3, 2).len(), 8);
        assert_eq!(labeled_trees(5).len(), 125);
        assert_eq!(block_permutations(&[vec![0, 2], vec![1, 3, 4]], 5).len(), 12);
    }

    #[test]
    fn prufer_trees_are_trees() {
        for t in labeled_trees(5) {
            let mut uf = UnionFind::new(5);
            assert!(t.iter().all(|&(a, b)| uf.union(a, b)));
        }
    }
}
