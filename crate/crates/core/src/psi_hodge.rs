//! Descendent and Hodge integrals over moduli of stable curves.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{factorial, rat, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kernel {
    Psi,
    Dvv,
    Hodge(u32),
}

type Key = (Kernel, u32, Vec<u32>);

static MEMO: LazyLock<RwLock<HashMap<Key, Rational>>> = LazyLock::new(Default::default);

fn memoized(key: Key, f: impl FnOnce() -> Result<Rational>) -> Result<Rational> {
    if let Some(v) = MEMO.read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = f()?;
    MEMO.write().unwrap().insert(key, v.clone());
    Ok(v)
}

fn sorted(b: &[u32]) -> Vec<u32> {
    let mut v = b.to_vec();
    v.sort_unstable();
    v
}

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

fn dim(g: u32, n: usize) -> i64 {
    3 * g as i64 - 3 + n as i64
}

fn sum(b: &[u32]) -> i64 {
    b.iter().map(|&x| x as i64).sum()
}

/// `(n-3)! / prod b_i!` when `sum b = n - 3`, else 0.
pub fn psi_integral_g0(b: &[u32]) -> Result<Rational> {
    let n = b.len();
    if n < 3 {
        return Err(Error::Domain(format!(
            "genus-0 psi integral needs at least 3 points, got {n}; unstable vertex must be handled by caller"
        )));
    }
    if sum(b) != n as i64 - 3 {
        return Ok(Rational::zero());
    }
    let den: BigInt = b.iter().map(|&x| factorial(x as u64)).product();
    Ok(Rational::new(factorial(n as u64 - 3), den))
}

/// `int psi^b` over the moduli space of genus `g` curves with `b.len()` points.
pub fn descendent_integral(g: u32, b: &[u32]) -> Result<Rational> {
    let n = b.len();
    if !stable(g, n) {
        return Err(Error::Domain(format!("unstable moduli space (g={g}, n={n})")));
    }
    if sum(b) != dim(g, n) {
        return Ok(Rational::zero());
    }
    match g {
        0 => psi_integral_g0(b),
        1 => genus_one(&sorted(b)),
        _ => dvv_integral(g, b),
    }
}

fn genus_one(b: &[u32]) -> Result<Rational> {
    memoized((Kernel::Psi, 1, b.to_vec()), || {
        let n = b.len();
        if sum(b) != n as i64 {
            return Ok(Rational::zero());
        }
        if n == 1 {
            return Ok(rat(1, 24));
        }
        if let Some(z) = b.iter().position(|&x| x == 0) {
            let mut rest = b.to_vec();
            rest.remove(z);
            string_reduce(&rest, genus_one)
        } else {
            // all entries equal 1: dilaton
            let rest = &b[1..];
            Ok(Rational::from_integer(BigInt::from(n as i64 - 1)) * genus_one(rest)?)
        }
    })
}

/// `sum_j <... tau_{b_j - 1} ...>` over entries with `b_j > 0`.
fn string_reduce(rest: &[u32], f: impl Fn(&[u32]) -> Result<Rational>) -> Result<Rational> {
    let mut total = Rational::zero();
    for j in 0..rest.len() {
        if rest[j] > 0 {
            let mut c = rest.to_vec();
            c[j] -= 1;
            c.sort_unstable();
            total += f(&c)?;
        }
    }
    Ok(total)
}

fn odd_double_factorial(m: i64) -> BigInt {
    // (2m+1)!! style argument: product of odd numbers up to m, with (-1)!! = 1
    let mut acc = BigInt::one();
    let mut k = m;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

/// Pure psi integrals for any genus via the Virasoro (DVV) recursion.
pub fn dvv_integral(g: u32, b: &[u32]) -> Result<Rational> {
    let n = b.len();
    if !stable(g, n) {
        return Err(Error::Domain(format!("unstable moduli space (g={g}, n={n})")));
    }
    Ok(dvv(g, &sorted(b)))
}

fn dvv(g: u32, b: &[u32]) -> Rational {
    let n = b.len();
    if !stable(g, n) || sum(b) != dim(g, n) {
        return Rational::zero();
    }
    if g == 0 && n == 3 {
        return Rational::one();
    }
    if g == 1 && n == 1 {
        return rat(1, 24);
    }
    let key = (Kernel::Dvv, g, b.to_vec());
    if let Some(v) = MEMO.read().unwrap().get(&key) {
        return v.clone();
    }
    // b is sorted; recurse on the largest insertion tau_{k+1}
    let top = *b.last().unwrap() as i64;
    let k = top - 1;
    let rest = &b[..n - 1];
    let mut total = Rational::zero();
    for j in 0..rest.len() {
        let dj = rest[j] as i64;
        let coeff = Rational::new(odd_double_factorial(2 * k + 2 * dj + 1), odd_double_factorial(2 * dj - 1));
        let mut c = rest.to_vec();
        c[j] = (dj + k) as u32;
        c.sort_unstable();
        total += coeff * dvv(g, &c);
    }
    let half = rat(1, 2);
    for r in 0..k {
        let s = k - 1 - r;
        let w = Rational::from_integer(odd_double_factorial(2 * r + 1) * odd_double_factorial(2 * s + 1));
        if g >= 1 {
            let mut c = rest.to_vec();
            c.push(r as u32);
            c.push(s as u32);
            c.sort_unstable();
            total += &half * &w * dvv(g - 1, &c);
        }
        let m = rest.len();
        for mask in 0..(1u64 << m) {
            let mut left = vec![r as u32];
            let mut right = vec![s as u32];
            for (i, &x) in rest.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(x);
                } else {
                    right.push(x);
                }
            }
            left.sort_unstable();
            right.sort_unstable();
            for g1 in 0..=g {
                let a = dvv(g1, &left);
                if a.is_zero() {
                    continue;
                }
                total += &half * &w * a * dvv(g - g1, &right);
            }
        }
    }
    let v = total / Rational::from_integer(odd_double_factorial(2 * k + 3));
    MEMO.write().unwrap().insert(key, v.clone());
    v
}

/// `int psi^b lambda_k`, with `c(E^vee)(t) = sum (-1)^k lambda_k t^k`.
pub fn hodge_descendent_integral(g: u32, b: &[u32], k: u32) -> Result<Rational> {
    let n = b.len();
    if !stable(g, n) {
        return Err(Error::Domain(format!("unstable moduli space (g={g}, n={n})")));
    }
    if k > g {
        return Err(Error::Domain(format!("lambda index {k} exceeds genus {g}")));
    }
    if k == 0 {
        return descendent_integral(g, b);
    }
    if g == 1 {
        return hodge_genus_one(&sorted(b));
    }
    Err(Error::HodgeUnsupported { g, k, context: String::new() })
}

fn hodge_genus_one(b: &[u32]) -> Result<Rational> {
    memoized((Kernel::Hodge(1), 1, b.to_vec()), || {
        let n = b.len();
        if sum(b) != n as i64 - 1 {
            return Ok(Rational::zero());
        }
        if n == 1 {
            return Ok(rat(1, 24));
        }
        let z = b.iter().position(|&x| x == 0).expect("sum b = n - 1 forces a zero entry");
        let mut rest = b.to_vec();
        rest.remove(z);
        string_reduce(&rest, hodge_genus_one)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn genus_zero_examples() {
        assert_eq!(psi_integral_g0(&[0, 0, 0]).unwrap(), rat(1, 1));
        assert_eq!(psi_integral_g0(&[1, 0, 0, 0]).unwrap(), rat(1, 1));
        assert_eq!(psi_integral_g0(&[1, 1, 0, 0, 0]).unwrap(), rat(2, 1));
        assert!(psi_integral_g0(&[0, 0]).is_err());
    }

    #[test]
    fn descendent_examples() {
        assert_eq!(descendent_integral(1, &[1]).unwrap(), rat(1, 24));
        assert_eq!(descendent_integral(1, &[0, 2]).unwrap(), rat(1, 24));
        assert_eq!(descendent_integral(0, &[0, 0, 0, 1]).unwrap(), rat(1, 1));
        assert!(descendent_integral(1, &[]).is_err());
        assert!(descendent_integral(0, &[0, 0]).is_err());
    }

    #[test]
    fn known_higher_genus_values() {
        // standard Witten-Kontsevich numbers
        assert_eq!(descendent_integral(2, &[4]).unwrap(), rat(1, 1152));
        assert_eq!(descendent_integral(2, &[2, 3]).unwrap(), rat(29, 5760));
        assert_eq!(descendent_integral(3, &[7]).unwrap(), rat(1, 82944));
        assert_eq!(descendent_integral(1, &[1, 1]).unwrap(), rat(1, 24));
    }

    #[test]
    fn dvv_matches_lower_genus_paths() {
        for n in 3..=8usize {
            for b in compositions((n - 3) as u32, n) {
                assert_eq!(dvv_integral(0, &b).unwrap(), psi_integral_g0(&b).unwrap());
            }
        }
        for n in 1..=6usize {
            for b in compositions(n as u32, n) {
                assert_eq!(dvv_integral(1, &b).unwrap(), descendent_integral(1, &b).unwrap());
            }
        }
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(hodge_descendent_integral(1, &[0], 1).unwrap(), rat(1, 24));
        assert_eq!(hodge_descendent_integral(1, &[1, 0], 1).unwrap(), rat(1, 24));
        assert_eq!(hodge_descendent_integral(0, &[0, 1, 0, 0], 0).unwrap(), psi_integral_g0(&[0, 1, 0, 0]).unwrap());
        assert!(matches!(hodge_descendent_integral(2, &[1], 1), Err(Error::HodgeUnsupported { g: 2, k: 1, .. })));
    }

    #[test]
    fn hodge_genus_one_multinomial() {
        for n in 1..=6usize {
            for b in compositions(n as u32 - 1, n) {
                let den: BigInt = b.iter().map(|&x| factorial(x as u64)).product();
                let expect = Rational::new(factorial(n as u64 - 1), den) * rat(1, 24);
                assert_eq!(hodge_descendent_integral(1, &b, 1).unwrap(), expect);
            }
        }
    }

    pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
        if parts == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = vec![];
        for first in 0..=total {
            for mut rest in compositions(total - first, parts - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    fn string_rhs(g: u32, b: &[u32], k: u32) -> Rational {
        let mut total = Rational::zero();
        for j in 0..b.len() {
            if b[j] > 0 {
                let mut c = b.to_vec();
                c[j] -= 1;
                total += hodge_descendent_integral(g, &c, k).unwrap();
            }
        }
        total
    }

    proptest! {
        #[test]
        fn string_equation(g in 0u32..4, b in proptest::collection::vec(0u32..5, 1..6)) {
            prop_assume!(stable(g, b.len()));
            let mut with0 = b.clone();
            with0.push(0);
            prop_assert_eq!(descendent_integral(g, &with0).unwrap(), string_rhs(g, &b, 0));
        }

        #[test]
        fn hodge_string_equation(b in proptest::collection::vec(0u32..4, 1..6)) {
            let mut with0 = b.clone();
            with0.push(0);
            prop_assert_eq!(hodge_descendent_integral(1, &with0, 1).unwrap(), string_rhs(1, &b, 1));
        }

        #[test]
        fn dilaton_equation(g in 0u32..4, b in proptest::collection::vec(0u32..6, 1..5)) {
            prop_assume!(stable(g, b.len()));
            let mut with1 = b.clone();
            with1.push(1);
            let factor = rat(2 * g as i64 - 2 + b.len() as i64, 1);
            prop_assert_eq!(dvv_integral(g, &with1).unwrap(), factor * dvv_integral(g, &b).unwrap());
        }
    }
}
