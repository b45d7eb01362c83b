//! k-combinations of `{0, ..., n-1}` in lexicographic order.

use num_bigint::BigUint;

/// Streaming iterator over the k-subsets of `0..n`, each as a strictly
/// increasing index vector, in lexicographic order.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    first: bool,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (0..k).collect(),
            first: true,
            done: k > n,
        }
    }
}

/// Steps `c` to its lexicographic successor among k-subsets of `0..n`.
/// Returns false (leaving `c` unspecified) when `c` was the last one.
pub fn advance(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.first {
            self.first = false;
        } else if !advance(&mut self.current, self.n) {
            self.done = true;
            return None;
        }
        Some(self.current.clone())
    }
}

/// `C(n, k)` as an exact integer, or `None` past `u128`.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// 0-based position of `c` in the lexicographic enumeration of the
/// `c.len()`-subsets of `0..n`.
pub fn rank(c: &[usize], n: usize) -> u128 {
    let k = c.len();
    let mut r = 0u128;
    let mut lo = 0usize;
    for (i, &ci) in c.iter().enumerate() {
        for v in lo..ci {
            r += binomial(n - 1 - v, k - 1 - i).expect("rank overflow");
        }
        lo = ci + 1;
    }
    r
}
