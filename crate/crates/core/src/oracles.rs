//! Identity checkers and closed-form evaluators for the genus-0 theory.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinat::{compositions, labeled_trees};
use crate::error::{Error, Result};
use crate::exactalg::{factorial, int, rat_pow, Laurent, Rational};
use crate::genus0::ogw_genus0;
use crate::psi_hodge::psi_integral_g0;
use crate::spec_core::{DescendentProblem, Label, LabelSet, Sign, SpecComponent};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: Laurent,
    pub rhs: Laurent,
    pub holds: bool,
}

impl IdentityCheck {
    fn new(lhs: Laurent, rhs: Laurent) -> Self {
        let holds = lhs == rhs;
        Self { lhs, rhs, holds }
    }
}

/// `(1 + sum a)^(n-2) / prod a_i!`.
pub fn disk_cover_closed(a: &[u32]) -> Rational {
    let d = 1 + a.iter().map(|&x| x as i64).sum::<i64>();
    let mut den = BigInt::one();
    for &x in a {
        den *= factorial(x as u64);
    }
    rat_pow(&int(d), a.len() as i64 - 2) / Rational::from_integer(den)
}

/// Genus-0 bracket, zero when the disk target is not a valid specification.
fn bracket(labels: &LabelSet, d: (u32, u32), p: &DescendentProblem) -> Result<Laurent> {
    if SpecComponent::disk(labels.clone(), d).validate().is_err() {
        return Ok(Laurent::zero());
    }
    ogw_genus0(labels, d, p)
}

/// Divisor equation: adds `new_label` with `a = 0` and constraint `eps_new`.
pub fn check_divisor(
    labels: &LabelSet,
    d: (u32, u32),
    p: &DescendentProblem,
    new_label: &str,
    eps_new: Sign,
) -> Result<IdentityCheck> {
    if labels.contains(new_label) {
        return Err(Error::InvalidProblem(format!("label {new_label:?} already present")));
    }
    let p = p.restrict(labels);
    p.check_domain(labels)?;
    let mut big = labels.clone();
    big.insert(new_label.to_string());
    let mut q = p.clone();
    q.a.insert(new_label.to_string(), 0);
    q.eps.insert(new_label.to_string(), eps_new);
    let lhs = bracket(&big, d, &q)?;
    let de = match eps_new {
        Sign::Plus => d.0,
        Sign::Minus => d.1,
    };
    let mut rhs = bracket(labels, d, &p)?.scale(&int(de as i64));
    let two_u = Laurent::monomial(1, int(2 * eps_new.value()));
    for (l, &a) in &p.a {
        if p.eps[l] == eps_new && a > 0 {
            let mut r = p.clone();
            *r.a.get_mut(l).unwrap() -= 1;
            rhs += &(bracket(labels, d, &r)? * two_u.clone());
        }
    }
    Ok(IdentityCheck::new(lhs, rhs))
}

fn names(n: usize) -> Vec<Label> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn plus_problem(names: &[Label], a: &[i64]) -> DescendentProblem {
    DescendentProblem::from_lists(names, a, &vec![Sign::Plus; names.len()])
}

/// Topological recursion in the disk-cover sector for `<tau_{a1+1} tau_{a2} ... tau_{al}>_{(d,0)}`.
pub fn check_trr(a: &[u32], d: u32) -> Result<IdentityCheck> {
    let l = a.len();
    if l < 2 {
        return Err(Error::Domain("recursion needs at least two insertions".into()));
    }
    let ids = names(l);
    let all: LabelSet = ids.iter().cloned().collect();
    let mut lifted: Vec<i64> = a.iter().map(|&x| x as i64).collect();
    lifted[0] += 1;
    let lhs = bracket(&all, (d, 0), &plus_problem(&ids, &lifted))?;

    let rest: Vec<usize> = (2..l).collect();
    let fresh = "0".to_string();
    let mut rhs = Laurent::zero();
    for mask in 0..(1usize << rest.len()) {
        let r: Vec<usize> = rest.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect();
        let s: Vec<usize> = rest.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 0).map(|(_, &i)| i).collect();

        // closed bracket <tau_{a1} prod_R tau tau_0>_0 times the open bracket with the new point
        if r.len() + 2 >= 3 {
            let mut closed: Vec<u32> = vec![a[0]];
            closed.extend(r.iter().map(|&i| a[i]));
            closed.push(0);
            let c = psi_integral_g0(&closed)?;
            if !c.is_zero() {
                let mut labs = vec![fresh.clone(), ids[1].clone()];
                let mut exps = vec![0, a[1] as i64];
                for &i in &s {
                    labs.push(ids[i].clone());
                    exps.push(a[i] as i64);
                }
                let set: LabelSet = labs.iter().cloned().collect();
                let open = bracket(&set, (d, 0), &plus_problem(&labs, &exps))?;
                rhs += &(open * Laurent::monomial(r.len() as i64, c * rat_pow(&int(2), r.len() as i64)));
            }
        }

        for d1 in 0..=d {
            let d2 = d - d1;
            if d2 == 0 {
                continue;
            }
            let mut l1 = vec![ids[0].clone()];
            let mut e1 = vec![a[0] as i64];
            for &i in &r {
                l1.push(ids[i].clone());
                e1.push(a[i] as i64);
            }
            let mut l2 = vec![ids[1].clone()];
            let mut e2 = vec![a[1] as i64];
            for &i in &s {
                l2.push(ids[i].clone());
                e2.push(a[i] as i64);
            }
            let b1 = bracket(&l1.iter().cloned().collect(), (d1, 0), &plus_problem(&l1, &e1))?;
            if b1.is_zero() {
                continue;
            }
            let b2 = bracket(&l2.iter().cloned().collect(), (d2, 0), &plus_problem(&l2, &e2))?;
            rhs += &(b1 * b2).scale(&int(d2 as i64));
        }
    }
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Underdetermined or balanced-degree genus-0 inputs, where the invariant must vanish.
pub fn predict_vanishing(labels: &LabelSet, d: (u32, u32), p: &DescendentProblem) -> bool {
    let total: i64 = labels.iter().map(|l| p.a.get(l).copied().unwrap_or(0)).sum();
    1 + total < (d.0 + d.1) as i64 || d.0 == d.1
}

/// Left side of the disk-to-disk identity, with the `|I| = 1` term read as the polynomial `1`.
pub fn disk_identity_lhs(a: &[Rational]) -> Rational {
    let n = a.len();
    let mut total = Rational::zero();
    let middle = n.saturating_sub(2);
    for mask in 0..(1usize << middle) {
        let mut a_i = a[0].clone();
        let mut a_j = a[n - 1].clone();
        let (mut size_i, mut size_j) = (1i64, 1i64);
        for k in 0..middle {
            if mask >> k & 1 == 1 {
                a_i += &a[k + 1];
                size_i += 1;
            } else {
                a_j += &a[k + 1];
                size_j += 1;
            }
        }
        let first = if size_i == 1 { Rational::one() } else { &a[0] * rat_pow(&a_i, size_i - 2) };
        total += first * rat_pow(&(a_j + int(1)), size_j - 1);
    }
    total
}

pub fn disk_identity_rhs(a: &[Rational]) -> Rational {
    let s: Rational = a.iter().cloned().sum();
    rat_pow(&(s + int(1)), a.len() as i64 - 2)
}

pub fn check_disk_identity(a: &[Rational]) -> bool {
    a.len() >= 2 && disk_identity_lhs(a) == disk_identity_rhs(a)
}

/// Both sides are polynomials of degree at most `n-2` in each variable, so agreement on
/// the grid `{0..n-2}^n` proves the identity for that `n`.
pub fn check_disk_identity_symbolic(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let k = (n - 1) as u32;
    let mut point = vec![0u32; n];
    loop {
        let a: Vec<Rational> = point.iter().map(|&x| int(x as i64)).collect();
        if !check_disk_identity(&a) {
            return false;
        }
        let mut i = 0;
        while i < n {
            point[i] += 1;
            if point[i] < k {
                break;
            }
            point[i] = 0;
            i += 1;
        }
        if i == n {
            return true;
        }
    }
}

/// Weighted Cayley formula: `sum_T prod_v x_v^{val(v)} = (sum x)^{r-2} prod x_v`.
pub fn check_weighted_cayley(x: &[Rational]) -> bool {
    let r = x.len();
    if r < 2 {
        return true;
    }
    let mut lhs = Rational::zero();
    for t in labeled_trees(r) {
        let mut val = vec![0i64; r];
        for &(a, b) in &t {
            val[a] += 1;
            val[b] += 1;
        }
        lhs += (0..r).map(|v| rat_pow(&x[v], val[v])).product::<Rational>();
    }
    let s: Rational = x.iter().cloned().sum();
    lhs == rat_pow(&s, r as i64 - 2) * x.iter().cloned().product::<Rational>()
}

/// All exponent vectors of length `n` with the given total.
pub fn exponent_vectors(total: u32, n: usize) -> Vec<Vec<u32>> {
    compositions(total, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::spec_core::label_set;

    #[test]
    fn closed_disk_cover() {
        assert_eq!(disk_cover_closed(&[1]), rat(1, 2));
        assert_eq!(disk_cover_closed(&[0]), int(1));
        assert_eq!(disk_cover_closed(&[2, 1]), rat(1, 2));
    }

    #[test]
    fn divisor_examples() {
        let one = label_set(["1"]);
        let p = DescendentProblem::from_lists(&names(1), &[1], &[Sign::Plus]);
        let c = check_divisor(&one, (2, 0), &p, "0", Sign::Plus).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, Laurent::one());
        let p = DescendentProblem::from_lists(&names(1), &[0], &[Sign::Plus]);
        let c = check_divisor(&one, (1, 0), &p, "0", Sign::Plus).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, Laurent::one());
        for e in [Sign::Plus, Sign::Minus] {
            let p = DescendentProblem::from_lists(&names(1), &[1], &[e]);
            let c = check_divisor(&one, (1, 1), &p, "0", e).unwrap();
            assert!(c.holds && c.lhs.is_zero());
        }
    }

    #[test]
    fn trr_examples() {
        let c = check_trr(&[0, 0], 2).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, Laurent::one());
        let c = check_trr(&[0, 0], 1).unwrap();
        assert!(c.holds && c.lhs.is_zero());
        assert!(check_trr(&[1, 0, 1], 4).unwrap().holds);
    }

    #[test]
    fn vanishing_prediction() {
        let one = label_set(["1"]);
        let p = |a| DescendentProblem::from_lists(&names(1), &[a], &[Sign::Plus]);
        assert!(predict_vanishing(&one, (2, 0), &p(0)));
        assert!(predict_vanishing(&one, (1, 1), &p(1)));
        assert!(!predict_vanishing(&one, (2, 0), &p(1)));
    }

    #[test]
    fn identities() {
        for n in 2..=5 {
            assert!(check_disk_identity_symbolic(n));
        }
        let x: Vec<Rational> = [1, 2, 3, 5].iter().map(|&v| int(v)).collect();
        assert!(check_weighted_cayley(&x));
    }
}
