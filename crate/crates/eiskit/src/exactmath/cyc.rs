//! Exact cyclotomic numbers.
//!
//! A [`CycNum`] is an element of `Q(zeta_n)` for an explicit order `n`,
//! written as `sum_j c_j zeta_n^j` with rational coefficients. Values of
//! different orders are promoted to the lcm before any mixed operation, so
//! characters of different moduli, Gauss sums, and L-values can be combined
//! freely.
//!
//! Internally coefficients live on the cyclic basis `zeta^0..zeta^{n-1}`
//! (multiplication is a cyclic convolution, cheap and sparse-friendly); the
//! canonical form demanded by equality tests and serialization reduces the
//! coefficient vector modulo the n-th cyclotomic polynomial, so two equal
//! values of the same order always expose identical coefficient vectors.

use super::rat::Rat;
use num_integer::Integer;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};
use std::sync::Mutex;

/// Integer coefficients of the cyclotomic polynomial `Phi_n`, cached.
static PHI_CACHE: Lazy<Mutex<HashMap<u64, Vec<i64>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Coefficients of `Phi_n(x)`, lowest degree first.
///
/// Built by dividing `x^n - 1` by all `Phi_d` for proper divisors `d | n`.
/// Coefficients fit in `i64` comfortably for the orders this crate touches.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    if let Some(p) = PHI_CACHE.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = poly_div_exact_int(&num, &phi_d);
        }
    }
    PHI_CACHE.lock().unwrap().insert(n, num.clone());
    num
}

/// Exact division of integer polynomials (panics on nonzero remainder).
fn poly_div_exact_int(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem: Vec<i64> = num.to_vec();
    let dd = den.len() - 1;
    assert_eq!(den[dd], 1, "divisor must be monic");
    let nd = rem.len() - 1;
    if nd < dd {
        assert!(rem.iter().all(|&c| c == 0));
        return vec![0];
    }
    let mut quot = vec![0i64; nd - dd + 1];
    for i in (dd..=nd).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dd] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i - dd + j] -= c * dc;
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "non-exact polynomial division");
    quot
}

/// An exact element of the cyclotomic field of the given order.
#[derive(Clone)]
pub struct CycNum {
    order: u64,
    /// Coefficients on `zeta^0..zeta^{order-1}` (cyclic basis, not
    /// necessarily reduced).
    coeffs: Vec<Rat>,
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum { order: 1, coeffs: vec![Rat::zero()] }
    }

    pub fn one() -> Self {
        CycNum::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        CycNum { order: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        CycNum::from_rat(Rat::from_int(n))
    }

    /// `zeta_n^j`.
    pub fn root_of_unity(n: u64, j: i64) -> Self {
        assert!(n >= 1);
        let jj = j.rem_euclid(n as i64) as usize;
        let mut coeffs = vec![Rat::zero(); n as usize];
        coeffs[jj] = Rat::one();
        CycNum { order: n, coeffs }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// View in `Q(zeta_m)` for `m` a multiple of the current order.
    pub fn promote(&self, m: u64) -> CycNum {
        assert!(m % self.order == 0, "promotion target must be a multiple");
        if m == self.order {
            return self.clone();
        }
        let k = (m / self.order) as usize;
        let mut coeffs = vec![Rat::zero(); m as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[j * k] = c.clone();
            }
        }
        CycNum { order: m, coeffs }
    }

    fn common_order(&self, other: &CycNum) -> u64 {
        self.order.lcm(&other.order)
    }

    /// Canonical coefficient vector: the residue modulo `Phi_order`, as a
    /// vector of length `order` padded with zeros above degree
    /// `phi(order) - 1`. Equal values of equal order produce identical
    /// vectors.
    pub fn canonical_coeffs(&self) -> Vec<Rat> {
        let phi = cyclotomic_poly(self.order);
        let deg = phi.len() - 1;
        // integer fast path: the common case for character sums
        if self.coeffs.iter().all(|c| c.is_integer()) {
            use num_bigint::BigInt;
            use num_traits::Zero;
            let mut rem: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
            for i in (deg..rem.len()).rev() {
                if rem[i].is_zero() {
                    continue;
                }
                let c = std::mem::take(&mut rem[i]);
                for (j, &pc) in phi.iter().enumerate().take(deg) {
                    if pc != 0 {
                        rem[i - deg + j] -= &c * pc;
                    }
                }
            }
            rem.truncate(self.order as usize);
            let mut out: Vec<Rat> = rem.into_iter().map(|n| Rat::new(n, 1)).collect();
            out.resize(self.order as usize, Rat::zero());
            return out;
        }
        let mut rem = self.coeffs.clone();
        for i in (deg..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            rem[i] = Rat::zero();
            for (j, &pc) in phi.iter().enumerate().take(deg) {
                let t = &c * &Rat::from_int(pc);
                rem[i - deg + j] -= t;
            }
        }
        rem.truncate(self.order as usize);
        while rem.len() < self.order as usize {
            rem.push(Rat::zero());
        }
        rem
    }

    pub fn is_zero(&self) -> bool {
        self.canonical_coeffs().iter().all(|c| c.is_zero())
    }

    /// The rational number this value equals, if it lies in `Q`.
    pub fn as_rat(&self) -> Option<Rat> {
        let can = self.canonical_coeffs();
        if can.iter().skip(1).all(|c| c.is_zero()) {
            Some(can[0].clone())
        } else {
            None
        }
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> CycNum {
        let n = self.order as usize;
        let mut coeffs = vec![Rat::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[(n - j) % n] = c.clone();
            }
        }
        CycNum { order: self.order, coeffs }
    }

    /// Galois twist `zeta -> zeta^t` for `gcd(t, order) = 1`.
    pub fn galois(&self, t: i64) -> CycNum {
        let n = self.order as usize;
        let tt = t.rem_euclid(self.order as i64) as u64;
        assert!(tt.gcd(&self.order) == 1, "galois exponent must be a unit");
        let mut coeffs = vec![Rat::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[(j as u64 * tt % self.order) as usize] = c.clone();
            }
        }
        CycNum { order: self.order, coeffs }
    }

    pub fn scale(&self, r: &Rat) -> CycNum {
        let coeffs = self.coeffs.iter().map(|c| c * r).collect();
        CycNum { order: self.order, coeffs }
    }

    /// Multiplicative inverse in `Q(zeta_order)`. Panics on zero.
    pub fn inv(&self) -> CycNum {
        let can = self.canonical_coeffs();
        assert!(can.iter().any(|c| !c.is_zero()), "inverse of zero");
        let phi: Vec<Rat> = cyclotomic_poly(self.order)
            .iter()
            .map(|&c| Rat::from_int(c))
            .collect();
        let deg = phi.len() - 1;
        let a: Vec<Rat> = can[..deg.min(can.len())].to_vec();
        let (g, _, t) = poly_ext_gcd(&phi, &a);
        // g is a nonzero constant since Phi_n is irreducible over Q
        assert!(poly_deg(&g) == Some(0), "cyclotomic inverse failed");
        let ginv = g[0].inv();
        let mut coeffs: Vec<Rat> = t.iter().map(|c| c * &ginv).collect();
        coeffs.resize(self.order as usize, Rat::zero());
        CycNum { order: self.order, coeffs }
    }

    pub fn pow(&self, e: i64) -> CycNum {
        if e == 0 {
            return CycNum::one().promote(self.order);
        }
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = CycNum::one().promote(self.order);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        acc
    }

    /// `x * conj(x)`, exact.
    pub fn norm_to_conj(&self) -> CycNum {
        self * &self.conj()
    }

    /// Nonzero coefficient count on the cyclic basis (pre-reduction).
    pub fn support_len(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

fn poly_deg(p: &[Rat]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Extended gcd over `Q[x]`: returns `(g, s, t)` with `s*a + t*b = g`.
fn poly_ext_gcd(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut s0 = vec![Rat::one()];
    let mut s1 = vec![Rat::zero()];
    let mut t0 = vec![Rat::zero()];
    let mut t1 = vec![Rat::one()];
    while poly_deg(&r1).is_some() {
        let (q, r) = poly_divmod(&r0, &r1);
        let ns = poly_sub(&s0, &poly_mul(&q, &s1));
        let nt = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
        t0 = t1;
        t1 = nt;
    }
    (r0, s0, t0)
}

fn poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dd = poly_deg(den).expect("division by zero polynomial");
    let lead = den[dd].inv();
    let mut rem = num.to_vec();
    let nd = match poly_deg(&rem) {
        Some(d) => d,
        None => return (vec![Rat::zero()], rem),
    };
    if nd < dd {
        return (vec![Rat::zero()], rem);
    }
    let mut quot = vec![Rat::zero(); nd - dd + 1];
    for i in (dd..=nd).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] * &lead;
        quot[i - dd] = c.clone();
        for (j, dc) in den.iter().enumerate().take(dd + 1) {
            let t = &c * dc;
            rem[i - dd + j] -= t;
        }
    }
    (quot, rem)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len()];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                let t = ai * bj;
                out[i + j] += t;
            }
        }
    }
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = a.to_vec();
    out.resize(a.len().max(b.len()), Rat::zero());
    for (j, bj) in b.iter().enumerate() {
        out[j] -= bj.clone();
    }
    out
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        let m = self.common_order(other);
        let a = self.promote(m).canonical_coeffs();
        let b = other.promote(m).canonical_coeffs();
        a == b
    }
}

impl Eq for CycNum {}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rat() {
            return write!(f, "{}", r);
        }
        let can = self.canonical_coeffs();
        let mut first = true;
        for (j, c) in can.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "{}*z{}^{}", c, self.order, j)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        let m = self.common_order(rhs);
        let mut a = self.promote(m);
        let b = rhs.promote(m);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Add for CycNum {
    type Output = CycNum;
    fn add(self, rhs: CycNum) -> CycNum {
        &self + &rhs
    }
}

impl AddAssign for CycNum {
    fn add_assign(&mut self, rhs: CycNum) {
        *self = &*self + &rhs;
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self + &(-rhs)
    }
}

impl Sub for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: CycNum) -> CycNum {
        &self - &rhs
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        let m = self.common_order(rhs);
        let a = self.promote(m);
        let b = rhs.promote(m);
        let n = m as usize;
        let mut coeffs = vec![Rat::zero(); n];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                if !bj.is_zero() {
                    let t = ai * bj;
                    coeffs[(i + j) % n] += t;
                }
            }
        }
        CycNum { order: m, coeffs }
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        &self * &rhs
    }
}

impl MulAssign for CycNum {
    fn mul_assign(&mut self, rhs: CycNum) {
        *self = &*self * &rhs;
    }
}

/// Serialized form: canonical coefficients with the explicit order.
#[derive(Serialize, Deserialize)]
struct CycNumSerde {
    order: u64,
    coeffs: Vec<Rat>,
}

impl Serialize for CycNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycNumSerde { order: self.order, coeffs: self.canonical_coeffs() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CycNumSerde::deserialize(d)?;
        if raw.order == 0 || raw.coeffs.len() != raw.order as usize {
            return Err(serde::de::Error::custom("coefficient vector must have length = order"));
        }
        Ok(CycNum { order: raw.order, coeffs: raw.coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_sum_to_zero() {
        // 1 + zeta_3 + zeta_3^2 = 0
        let s = CycNum::one()
            + CycNum::root_of_unity(3, 1)
            + CycNum::root_of_unity(3, 2);
        assert!(s.is_zero());
    }

    #[test]
    fn conj_involution_and_fixed_field() {
        let x = CycNum::root_of_unity(3, 1);
        assert_eq!(x.conj(), CycNum::root_of_unity(3, 2));
        assert_eq!(x.conj().conj(), x);
        let five = CycNum::from_int(5);
        assert_eq!(five.conj(), five);
        let y = CycNum::root_of_unity(3, 1) - CycNum::root_of_unity(3, 2);
        assert_eq!(y.conj(), -&y);
    }

    #[test]
    fn cross_order_equality() {
        // zeta_6^3 = -1
        let a = CycNum::root_of_unity(6, 3);
        assert_eq!(a, CycNum::from_int(-1));
        // zeta_6 - zeta_3 - 1 = 0 since zeta_6 = 1 + zeta_3 ... check: zeta_6 = -zeta_3^2
        let z6 = CycNum::root_of_unity(6, 1);
        let z3 = CycNum::root_of_unity(3, 2);
        assert_eq!(z6, -&z3);
    }

    #[test]
    fn inverse_of_root_and_generic() {
        let z = CycNum::root_of_unity(5, 2);
        assert_eq!(z.inv(), CycNum::root_of_unity(5, 3));
        let x = CycNum::root_of_unity(12, 7) + CycNum::from_int(3);
        let y = x.inv();
        assert_eq!(&x * &y, CycNum::one());
    }

    #[test]
    fn golden_sqrt5() {
        // (zeta_5 + zeta_5^4 - zeta_5^2 - zeta_5^3)^2 = 5
        let g = CycNum::root_of_unity(5, 1) + CycNum::root_of_unity(5, 4)
            - CycNum::root_of_unity(5, 2)
            - CycNum::root_of_unity(5, 3);
        assert_eq!(&g * &g, CycNum::from_int(5));
    }

    #[test]
    fn serde_roundtrip() {
        let x = CycNum::root_of_unity(12, 5) + CycNum::from_rat(Rat::new(2, 3));
        let s = serde_json::to_string(&x).unwrap();
        let y: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
