//! Exact integer combinatorics and the two canonical index orderings used by
//! tensors (sorted multisets) and jets (bounded exponent vectors).

use crate::error::{Error, Result};

/// Largest supported dimension n.
pub const MAX_DIM: usize = 16;
/// Largest supported derivative order / jet degree.
pub const MAX_ORDER: usize = 10;

pub(crate) fn check_guards(dim: usize, order: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Size(format!("dimension {dim} not in 1..={MAX_DIM}")));
    }
    if order > MAX_ORDER {
        return Err(Error::Size(format!("order {order} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

/// n! in exact arithmetic. Exact for n ≤ 34.
pub fn factorial(n: u32) -> u128 {
    (2..=n as u128).product()
}

/// C(n, k) in exact arithmetic (0 when k > n).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// Generalized binomial coefficient C(p, j) = p (p-1) ... (p-j+1) / j! for real p.
pub fn generalized_binomial(p: f64, j: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..j {
        acc *= (p - i as f64) / (i as f64 + 1.0);
    }
    acc
}

/// α! = Π αᵢ! for an exponent vector.
pub fn exponent_factorial(alpha: &[u8]) -> u128 {
    alpha.iter().map(|&a| factorial(a as u32)).product()
}

/// Number of multisets of size k drawn from n symbols, C(n+k-1, k).
pub fn multiset_count(n: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    if n == 0 {
        return 0;
    }
    binomial((n + k - 1) as u64, k as u64) as usize
}

/// All non-decreasing index sequences of length k over 0..n, in lexicographic order.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(multiset_count(n, k));
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    if n == 0 {
        return out;
    }
    let mut cur = vec![0usize; k];
    loop {
        out.push(cur.clone());
        // rightmost position that can still be bumped
        let mut pos = k;
        while pos > 0 && cur[pos - 1] == n - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        let v = cur[pos - 1] + 1;
        for c in &mut cur[pos - 1..] {
            *c = v;
        }
    }
    out
}

/// Position of a sorted index sequence in the order produced by [`multisets`].
pub fn multiset_rank(sorted: &[usize], n: usize) -> usize {
    let k = sorted.len();
    let mut rank = 0;
    let mut lo = 0;
    for (p, &mu) in sorted.iter().enumerate() {
        let rest = k - p - 1;
        for v in lo..mu {
            rank += multiset_count(n - v, rest);
        }
        lo = mu;
    }
    rank
}

/// Converts a sorted multiset of indices into its exponent (count) vector.
pub fn multiset_to_exponent(sorted: &[usize], n: usize) -> Vec<u8> {
    let mut alpha = vec![0u8; n];
    for &i in sorted {
        alpha[i] += 1;
    }
    alpha
}

/// Multinomial k! / α! : the number of distinct orderings of a multiset.
pub fn multinomial(alpha: &[u8]) -> u128 {
    let k: u32 = alpha.iter().map(|&a| a as u32).sum();
    factorial(k) / exponent_factorial(alpha)
}

/// Dense lexicographic enumeration of exponent vectors α ∈ ℕⁿ with |α| ≤ m,
/// together with an O(n) ranking function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentSet {
    dim: usize,
    max_degree: usize,
    exponents: Vec<Vec<u8>>,
    degrees: Vec<usize>,
    // offsets[(i * (m+1) + d) * (m+1) + a] = Σ_{v<a} C(r + d - v, r), r = n - i - 1
    offsets: Vec<usize>,
}

impl ExponentSet {
    pub fn new(dim: usize, max_degree: usize) -> Result<Self> {
        check_guards(dim, max_degree)?;
        let m1 = max_degree + 1;
        let count = |r: usize, d: usize| binomial((r + d) as u64, d as u64) as usize;
        let mut offsets = vec![0usize; dim * m1 * m1];
        for i in 0..dim {
            let r = dim - i - 1;
            for d in 0..=max_degree {
                let mut acc = 0;
                for a in 0..=d {
                    offsets[(i * m1 + d) * m1 + a] = acc;
                    acc += count(r, d - a);
                }
            }
        }
        let mut exponents = Vec::with_capacity(count(dim, max_degree));
        let mut cur = vec![0u8; dim];
        enumerate_exponents(&mut cur, 0, max_degree, &mut exponents);
        let degrees = exponents.iter().map(|a| a.iter().map(|&x| x as usize).sum()).collect();
        Ok(Self { dim, max_degree, exponents, degrees, offsets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponent(&self, idx: usize) -> &[u8] {
        &self.exponents[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.degrees[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.exponents.iter().map(|e| e.as_slice())
    }

    /// Rank of α; `None` if |α| exceeds the maximum degree.
    pub fn rank(&self, alpha: &[u8]) -> Option<usize> {
        debug_assert_eq!(alpha.len(), self.dim);
        let m1 = self.max_degree + 1;
        let mut budget = self.max_degree;
        let mut rank = 0;
        for (i, &a) in alpha.iter().enumerate() {
            let a = a as usize;
            if a > budget {
                return None;
            }
            rank += self.offsets[(i * m1 + budget) * m1 + a];
            budget -= a;
        }
        Some(rank)
    }

    /// Rank of α + β without materializing the sum.
    pub fn rank_of_sum(&self, lhs: usize, rhs: usize) -> Option<usize> {
        if self.degrees[lhs] + self.degrees[rhs] > self.max_degree {
            return None;
        }
        let m1 = self.max_degree + 1;
        let (a, b) = (&self.exponents[lhs], &self.exponents[rhs]);
        let mut budget = self.max_degree;
        let mut rank = 0;
        for i in 0..self.dim {
            let s = (a[i] + b[i]) as usize;
            rank += self.offsets[(i * m1 + budget) * m1 + s];
            budget -= s;
        }
        Some(rank)
    }
}

fn enumerate_exponents(cur: &mut Vec<u8>, pos: usize, budget: usize, out: &mut Vec<Vec<u8>>) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for a in 0..=budget {
        cur[pos] = a as u8;
        enumerate_exponents(cur, pos + 1, budget - a, out);
    }
    cur[pos] = 0;
}
