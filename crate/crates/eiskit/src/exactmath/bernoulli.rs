//! Bernoulli numbers and Bernoulli polynomial values, exact.

use super::rat::Rat;
use std::sync::Mutex;

static CACHE: Mutex<Vec<Rat>> = Mutex::new(Vec::new());

/// Bernoulli numbers `B_0..=B_n` with the convention `B_1 = -1/2`.
///
/// Computed by the defining recurrence
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0` for `m >= 1`, cached across calls.
pub fn bernoulli_numbers(n: usize) -> Vec<Rat> {
    let mut cache = CACHE.lock().unwrap();
    if cache.is_empty() {
        cache.push(Rat::one());
    }
    while cache.len() <= n {
        let m = cache.len(); // computing B_m
        let mut acc = Rat::zero();
        for (j, bj) in cache.iter().enumerate() {
            acc += Rat::binomial(m as i64 + 1, j as u64) * bj;
        }
        let bm = -acc / Rat::from_int(m as i64 + 1);
        cache.push(bm);
    }
    cache[..=n].to_vec()
}

pub fn bernoulli(n: usize) -> Rat {
    bernoulli_numbers(n)[n].clone()
}

/// Bernoulli polynomial value `B_k(x) = sum_j C(k, j) B_j x^{k-j}`,
/// with binomials updated iteratively (single pass).
pub fn bernoulli_poly(k: usize, x: &Rat) -> Rat {
    let b = bernoulli_numbers(k);
    let mut acc = Rat::zero();
    let mut xpow = Rat::one(); // x^{k-j} built from the top
    let mut binom = Rat::one(); // C(k, k) going down to C(k, 0)
    for j in (0..=k).rev() {
        if !b[j].is_zero() {
            acc += binom.clone() * &b[j] * &xpow;
        }
        xpow = xpow * x.clone();
        // C(k, j-1) = C(k, j) * j / (k - j + 1)
        if j > 0 {
            binom = binom * Rat::new(j as i64, (k - j + 1) as i64);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bernoulli() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[0], Rat::one());
        assert_eq!(b[1], Rat::new(-1, 2));
        assert_eq!(b[2], Rat::new(1, 6));
        assert_eq!(b[3], Rat::zero());
        assert_eq!(b[4], Rat::new(-1, 30));
        assert_eq!(b[12], Rat::new(-691, 2730));
    }

    #[test]
    fn poly_at_zero_and_one() {
        for k in 0..10usize {
            assert_eq!(bernoulli_poly(k, &Rat::zero()), bernoulli(k));
            // B_k(1) = B_k for k != 1, and B_1(1) = 1/2
            let at_one = bernoulli_poly(k, &Rat::one());
            if k == 1 {
                assert_eq!(at_one, Rat::new(1, 2));
            } else {
                assert_eq!(at_one, bernoulli(k));
            }
        }
    }

    #[test]
    fn multiplication_theorem_m2() {
        // B_k(2x) = 2^{k-1} (B_k(x) + B_k(x + 1/2))
        for k in 0..8usize {
            let x = Rat::new(3, 7);
            let lhs = bernoulli_poly(k, &(x.clone() + x.clone()));
            let rhs = Rat::from_int(2).pow(k as i64 - 1)
                * (bernoulli_poly(k, &x) + bernoulli_poly(k, &(x + Rat::new(1, 2))));
            assert_eq!(lhs, rhs);
        }
    }
}
