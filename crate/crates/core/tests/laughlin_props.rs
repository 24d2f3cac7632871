use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use toric_lll::laughlin::{expand, LaughlinExpansion, SlaterIndex};

type Poly = BTreeMap<Vec<u32>, BigInt>;

/// `∏_{i<j} (w_j − w_i)^m`, one linear factor at a time.
fn laughlin_polynomial(n: usize, m: u32) -> Poly {
    let mut poly: Poly = BTreeMap::from([(vec![0; n], BigInt::one())]);
    for j in 0..n {
        for i in 0..j {
            for _ in 0..m {
                let mut next = Poly::new();
                for (e, c) in &poly {
                    let mut ej = e.clone();
                    ej[j] += 1;
                    *next.entry(ej).or_insert_with(BigInt::zero) += c;
                    let mut ei = e.clone();
                    ei[i] += 1;
                    *next.entry(ei).or_insert_with(BigInt::zero) -= c;
                }
                next.retain(|_, c| !c.is_zero());
                poly = next;
            }
        }
    }
    poly
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    if n == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, sign) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let flips = (p.len() - pos) as i32;
            out.push((q, if flips % 2 == 0 { sign } else { -sign }));
        }
    }
    out
}

/// `Σ_λ a_λ det(w_i^{λ_j})`
fn resum(exp: &LaughlinExpansion) -> Poly {
    let n = exp.particles() as usize;
    let perms = permutations(n);
    let mut poly = Poly::new();
    for (idx, a) in exp.terms() {
        for (perm, sign) in &perms {
            let e: Vec<u32> = perm.iter().map(|&k| idx.levels()[k]).collect();
            *poly.entry(e).or_insert_with(BigInt::zero) += a * BigInt::from(*sign);
        }
    }
    poly.retain(|_, c| !c.is_zero());
    poly
}

#[test]
fn slater_sum_reproduces_the_polynomial() {
    for (n, m) in [(1u32, 3u32), (2, 1), (2, 3), (2, 5), (3, 1), (3, 3), (3, 5), (4, 1), (4, 3)] {
        let exp = expand(n, m).unwrap();
        assert_eq!(resum(&exp), laughlin_polynomial(n as usize, m), "N_e={n} m={m}");
    }
}

#[test]
fn degree_and_range_laws() {
    for n in 2..=6u32 {
        let exp = expand(n, 3).unwrap();
        let total = u64::from(3 * n * (n - 1) / 2);
        for (idx, c) in exp.terms() {
            assert_eq!(idx.degree(), total);
            assert!(idx.max_level() <= 3 * (n - 1));
            assert!(!c.is_zero());
        }
    }
}

#[test]
fn most_uniform_coefficient_is_unit() {
    let mut signs = Vec::new();
    for n in 2..=6u32 {
        let exp = expand(n, 3).unwrap();
        let a = exp.coefficient(&SlaterIndex::most_uniform(n, 3));
        assert!(a == BigInt::one() || a == -BigInt::one(), "N_e={n}: {a}");
        signs.push(a);
    }
    // measured: +1 for every N_e in 2..=6
    assert!(signs.iter().all(|a| a.is_one()), "{signs:?}");
}

#[test]
fn five_particle_expansion_is_sorted_and_exact() {
    let exp = expand(5, 3).unwrap();
    let keys: Vec<_> = exp.terms().map(|(k, _)| k.clone()).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    let json = exp.to_json();
    assert_eq!(json.terms.len(), exp.len());
    assert_eq!(LaughlinExpansion::from_json(&json).unwrap(), exp);
}
