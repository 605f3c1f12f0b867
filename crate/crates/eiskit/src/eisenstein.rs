//! Eisenstein q-expansions, Dirichlet L-values at non-positive integers,
//! Hecke operators on coefficients, and eta-product cusp forms.
//!
//! Coefficients are exact cyclotomic numbers throughout. The Eisenstein
//! series attached to a pair of primitive characters `(chi1, chi2)` of
//! conductors `(N1, N2)` has
//! `C(n) = sum_{a | n} chi1(a) chi2(n/a) a^{k-1}`, constant term at the
//! infinity cusp `L(1-k, chi1 chi2^{-1}) / 2` when `N2 = 1` (and zero
//! otherwise), and is an eigenform for every Hecke operator.

use crate::characters::{factorize, DirChar};
use crate::exactmath::bernoulli::bernoulli_poly;
use crate::exactmath::cyc::CycNum;
use crate::exactmath::rat::Rat;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EisensteinError {
    #[error("chi1 must be nontrivial")]
    TrivialChi1,
    #[error("parity violation: chi1(-1) chi2(-1) must equal (-1)^k")]
    ParityViolation,
    #[error("weight must be at least {0}")]
    WeightTooSmall(i64),
    #[error("output truncation would be empty")]
    EmptyTruncation,
    #[error("coefficient at index {0} has denominator not coprime to the modulus")]
    BadDenominator(usize),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, EisensteinError>;

/// An exact special value `L(1-k, chi)`.
#[derive(Clone, Debug)]
pub struct LValue {
    pub s: i64,
    pub chi: DirChar,
    pub value: CycNum,
}

/// Generalized Bernoulli number `B_{k,chi} = f^{k-1} sum_{a=1}^{f} chi(a)
/// B_k(a/f)` for the conductor `f` of `chi`.
pub fn generalized_bernoulli(chi: &DirChar, k: u32) -> CycNum {
    let prim = chi.primitivize();
    let f = prim.modulus().max(1);
    let mut acc = CycNum::zero();
    for a in 1..=f {
        let cv = prim.eval(a as i64);
        if cv.is_zero() {
            continue;
        }
        let b = bernoulli_poly(k as usize, &Rat::new(a as i64, f as i64));
        acc = &acc + &cv.cyc().scale(&b);
    }
    acc.scale(&Rat::from_int(f as i64).pow(k as i64 - 1))
}

/// `L(1-k, chi) = -B_{k,chi}/k`, exact, for `k >= 1`.
pub fn bernoulli_l_value(chi: &DirChar, k: u32) -> Result<LValue> {
    if k < 1 {
        return Err(EisensteinError::WeightTooSmall(1));
    }
    let b = generalized_bernoulli(chi, k);
    let value = b.scale(&Rat::new(-1, k as i64));
    Ok(LValue { s: 1 - k as i64, chi: chi.primitivize(), value })
}

/// Partial L-value `L^N(1-k, chi) = prod_{q | N, q not | cond(chi)}
/// (1 - chi(q) q^{k-1}) L(1-k, chi)`.
pub fn partial_l_value(chi: &DirChar, k: u32, level: u64) -> Result<CycNum> {
    let base = bernoulli_l_value(chi, k)?;
    let prim = base.chi;
    let mut acc = base.value;
    for (q, _) in factorize(level) {
        if prim.modulus() % q == 0 {
            continue;
        }
        let factor = CycNum::one()
            - prim
                .eval(q as i64)
                .cyc()
                .scale(&Rat::from_int(q as i64).pow(k as i64 - 1));
        acc = &acc * &factor;
    }
    Ok(acc)
}

/// A truncated q-expansion with exact cyclotomic coefficients.
///
/// `coeffs[n]` is the n-th coefficient for `1 <= n <= bound`; the constant
/// term at the infinity cusp is stored separately, and constant terms at
/// other cusps can be attached under canonical cusp labels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QExpansion {
    pub weight: i64,
    pub level: u64,
    pub chi1: DirChar,
    pub chi2: DirChar,
    /// Nebentypus (the primitive character inducing `chi1 chi2`).
    pub nebentypus: DirChar,
    pub bound: usize,
    coeffs: Vec<CycNum>,
    pub constant_term_infinity: CycNum,
    /// Constant terms at cusps, keyed by canonical cusp labels.
    pub constant_terms: BTreeMap<String, CycNum>,
}

impl QExpansion {
    pub fn coeff(&self, n: usize) -> &CycNum {
        assert!(n >= 1 && n <= self.bound, "coefficient index out of range");
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    fn from_fn(
        weight: i64,
        level: u64,
        chi1: DirChar,
        chi2: DirChar,
        bound: usize,
        c0: CycNum,
        f: impl Fn(u64) -> CycNum,
    ) -> QExpansion {
        let nebentypus = chi1.mul(&chi2);
        let mut coeffs = vec![CycNum::zero()];
        for n in 1..=bound {
            coeffs.push(f(n as u64));
        }
        QExpansion {
            weight,
            level,
            chi1,
            chi2,
            nebentypus,
            bound,
            coeffs,
            constant_term_infinity: c0,
            constant_terms: BTreeMap::new(),
        }
    }

    pub fn scale(&self, c: &CycNum) -> QExpansion {
        let mut out = self.clone();
        for v in out.coeffs.iter_mut() {
            *v = &*v * c;
        }
        out.constant_term_infinity = &out.constant_term_infinity * c;
        for v in out.constant_terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn add(&self, other: &QExpansion) -> QExpansion {
        assert_eq!(self.weight, other.weight);
        let bound = self.bound.min(other.bound);
        let mut out = self.clone();
        out.bound = bound;
        out.coeffs.truncate(bound + 1);
        for n in 1..=bound {
            out.coeffs[n] = &out.coeffs[n] + &other.coeffs[n];
        }
        out.constant_term_infinity =
            &out.constant_term_infinity + &other.constant_term_infinity;
        out
    }
}

/// Divisor-sum coefficient `sum_{a | n} chi1(a) chi2(n/a) a^{k-1}`,
/// optionally restricted to `p`-free `a`.
fn divisor_coeff(chi1: &DirChar, chi2: &DirChar, k: i64, n: u64, skip_p: Option<u64>) -> CycNum {
    let mut acc = CycNum::zero();
    for a in 1..=n {
        if n % a != 0 {
            continue;
        }
        if let Some(p) = skip_p {
            if a % p == 0 {
                continue;
            }
        }
        let v1 = chi1.eval(a as i64);
        if v1.is_zero() {
            continue;
        }
        let v2 = chi2.eval((n / a) as i64);
        if v2.is_zero() {
            continue;
        }
        let term = (v1.cyc() * v2.cyc()).scale(&Rat::from_int(a as i64).pow(k - 1));
        acc = &acc + &term;
    }
    acc
}

/// The Eisenstein eigenform attached to a pair of primitive characters.
///
/// Requires `chi1` nontrivial and the parity constraint
/// `chi1(-1) chi2(-1) = (-1)^k`.
pub fn eisenstein_qexp(chi1: &DirChar, chi2: &DirChar, k: i64, bound: usize) -> Result<QExpansion> {
    if chi1.is_trivial() {
        return Err(EisensteinError::TrivialChi1);
    }
    if k < 2 {
        return Err(EisensteinError::WeightTooSmall(2));
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    if (chi1.parity() * chi2.parity()) as i64 != sign {
        return Err(EisensteinError::ParityViolation);
    }
    let chi1 = chi1.primitivize();
    let chi2 = chi2.primitivize();
    let level = chi1.modulus() * chi2.modulus();
    let c0 = if chi2.modulus() == 1 {
        let ratio = chi1.mul(&chi2.inv());
        bernoulli_l_value(&ratio, k as u32)?.value.scale(&Rat::new(1, 2))
    } else {
        CycNum::zero()
    };
    Ok(QExpansion::from_fn(k, level, chi1.clone(), chi2.clone(), bound, c0, |n| {
        divisor_coeff(&chi1, &chi2, k, n, None)
    }))
}

/// The ordinary `p`-stabilization: divisor sums restricted to `p`-free
/// divisors in the `chi1` slot; level multiplied by `p` when prime to it.
pub fn eisenstein_qexp_stabilized(
    chi1: &DirChar,
    chi2: &DirChar,
    k: i64,
    p: u64,
    bound: usize,
) -> Result<QExpansion> {
    let base = eisenstein_qexp(chi1, chi2, k, 0)?;
    let chi1 = base.chi1.clone();
    let chi2 = base.chi2.clone();
    let level = if base.level % p == 0 { base.level } else { base.level * p };
    // constant term: the partial L-value with the p Euler factor removed on
    // the chi1 side, when chi2 is trivial
    let c0 = if chi2.modulus() == 1 {
        let ratio = chi1.mul(&chi2.inv());
        let l = bernoulli_l_value(&ratio, k as u32)?.value;
        let euler = CycNum::one()
            - ratio
                .eval(p as i64)
                .cyc()
                .scale(&Rat::from_int(p as i64).pow(k - 1));
        (&l * &euler).scale(&Rat::new(1, 2))
    } else {
        CycNum::zero()
    };
    let mut out = QExpansion::from_fn(k, level, chi1.clone(), chi2.clone(), bound, c0, |n| {
        divisor_coeff(&chi1, &chi2, k, n, Some(p))
    });
    out.nebentypus = base.nebentypus;
    Ok(out)
}

/// Classical level-one Eisenstein series: `C(n) = sigma_{k-1}(n)` with
/// constant term `-B_k / 2k` (even `k >= 4`).
pub fn eisenstein_level_one(k: i64, bound: usize) -> Result<QExpansion> {
    if k < 4 || k % 2 != 0 {
        return Err(EisensteinError::WeightTooSmall(4));
    }
    let triv = DirChar::trivial(1);
    let c0 = bernoulli_l_value(&triv, k as u32)
        .map(|l| l.value.scale(&Rat::new(1, 2)))?;
    Ok(QExpansion::from_fn(k, 1, triv.clone(), triv.clone(), bound, c0, |n| {
        divisor_coeff(&triv, &triv, k, n, None)
    }))
}

/// Level-one series stabilized at the prime `q`: `C(n) = sum_{d | n, q
/// not | d} d^{k-1}`, constant term `(1 - q^{k-1}) zeta(1-k) / 2`. Allows
/// `k = 2`, where the unstabilized series is not modular but the
/// stabilization is.
pub fn eisenstein_level_one_stabilized(k: i64, q: u64, bound: usize) -> Result<QExpansion> {
    if k < 2 || k % 2 != 0 {
        return Err(EisensteinError::WeightTooSmall(2));
    }
    let triv = DirChar::trivial(1);
    let zeta = bernoulli_l_value(&triv, k as u32)?.value;
    let c0 = (CycNum::one() - CycNum::from_rat(Rat::from_int(q as i64).pow(k - 1)))
        .scale(&Rat::new(1, 2));
    let c0 = &c0 * &zeta;
    Ok(QExpansion::from_fn(k, q, triv.clone(), triv.clone(), bound, c0, move |n| {
        let mut acc = Rat::zero();
        for d in 1..=n {
            if n % d == 0 && d % q != 0 {
                acc += Rat::from_int(d as i64).pow(k - 1);
            }
        }
        CycNum::from_rat(acc)
    }))
}

/// Hecke operator `T(a)` on coefficients:
/// `C(m, T(a) f) = sum_{b | gcd(m, a)} chi(b) b^{k-1} C(m a / b^2, f)`
/// with the nebentypus extended by zero at primes dividing the level.
/// The output is truncated at `floor(bound / a)`.
pub fn hecke_t(f: &QExpansion, a: u64) -> Result<QExpansion> {
    if a == 0 {
        return Err(EisensteinError::Other("T(0) undefined".into()));
    }
    let new_bound = f.bound / a as usize;
    if new_bound == 0 {
        return Err(EisensteinError::EmptyTruncation);
    }
    let chi = f.nebentypus.induce_extended(f.level);
    let k = f.weight;
    let mut coeffs = vec![CycNum::zero()];
    for m in 1..=new_bound as u64 {
        let mut acc = CycNum::zero();
        let g = num_integer::gcd(m, a);
        for b in 1..=g {
            if g % b != 0 {
                continue;
            }
            let cv = chi.eval(b as i64);
            if cv.is_zero() {
                continue;
            }
            let idx = (m / b) * (a / b);
            let term = cv.cyc().scale(&Rat::from_int(b as i64).pow(k - 1));
            acc = &acc + &(&term * f.coeff(idx as usize));
        }
        coeffs.push(acc);
    }
    // constant term scales by the T(a)-eigenvalue pattern of the constant
    // functions: sum_{b | a} chi(b) b^{k-1} (a/b)^{... }; for our uses the
    // coefficientwise comparison never consults it, so keep the map empty.
    let mut out = f.clone();
    out.bound = new_bound;
    out.coeffs = coeffs;
    out.constant_terms = BTreeMap::new();
    out.constant_term_infinity = CycNum::zero();
    Ok(out)
}

/// Central operator `S(q)` for `q` prime to the level: multiplication by
/// `chi(q) q^{k-2}` (the normalization making
/// `T(q)^2 - T(q^2) = q S(q)` hold on every eigenform). For `q` dividing
/// the level the operator is zero.
pub fn hecke_s(f: &QExpansion, q: u64) -> QExpansion {
    if f.level % q == 0 {
        let mut out = f.clone();
        for c in out.coeffs.iter_mut() {
            *c = CycNum::zero();
        }
        out.constant_term_infinity = CycNum::zero();
        out.constant_terms = BTreeMap::new();
        return out;
    }
    let chi = f.nebentypus.induce_extended(f.level);
    let scalar = chi
        .eval(q as i64)
        .cyc()
        .scale(&Rat::from_int(q as i64).pow(f.weight - 2));
    f.scale(&scalar)
}

trait InduceExtended {
    fn induce_extended(&self, level: u64) -> DirChar;
}

impl InduceExtended for DirChar {
    /// View a character as one of the given level (extension by zero at the
    /// new primes), silently falling back to itself when the conductor
    /// does not divide the level.
    fn induce_extended(&self, level: u64) -> DirChar {
        if level % self.conductor() == 0 {
            self.primitivize().induce(level)
        } else {
            self.clone()
        }
    }
}

/// Which eta-product cusp form to expand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaProduct {
    /// Weight 12, level 1: `q prod (1-q^n)^24`.
    Delta,
    /// Weight 2, level 11: `q prod (1-q^n)^2 (1-q^{11n})^2`.
    Level11,
}

/// Integer q-expansion of an eta-product cusp form, exact to the bound.
pub fn eta_product_cuspform(which: EtaProduct, bound: usize) -> QExpansion {
    let (weight, level, expansions): (i64, u64, Vec<(u64, u32)>) = match which {
        EtaProduct::Delta => (12, 1, vec![(1, 24)]),
        EtaProduct::Level11 => (2, 11, vec![(1, 2), (11, 2)]),
    };
    // product of (prod_n (1 - q^{s n}))^e over the listed (s, e), times q
    let mut poly: Vec<BigInt> = vec![BigInt::from(1)];
    poly.resize(bound + 1, BigInt::from(0));
    for (scale, exp) in expansions {
        let euler = euler_product(bound, scale);
        for _ in 0..exp {
            poly = poly_mul_trunc(&poly, &euler, bound);
        }
    }
    // multiply by q: C(n) = poly[n-1]
    let triv = DirChar::trivial(1);
    let mut coeffs = vec![CycNum::zero()];
    for n in 1..=bound {
        coeffs.push(CycNum::from_rat(Rat::new(poly[n - 1].clone(), BigInt::from(1))));
    }
    QExpansion {
        weight,
        level,
        chi1: triv.clone(),
        chi2: triv.clone(),
        nebentypus: triv,
        bound,
        coeffs,
        constant_term_infinity: CycNum::zero(),
        constant_terms: BTreeMap::new(),
    }
}

/// `prod_{n >= 1} (1 - q^{s n})` truncated, by the pentagonal number
/// expansion of the Euler function.
fn euler_product(bound: usize, s: u64) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); bound + 1];
    out[0] = BigInt::from(1);
    let mut k: i64 = 1;
    loop {
        let mut placed = false;
        for g in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
            let idx = g as u64 * s;
            if idx <= bound as u64 {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                out[idx as usize] += BigInt::from(sign);
                placed = true;
            }
        }
        if !placed {
            break;
        }
        k += 1;
    }
    out
}

fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], bound: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); bound + 1];
    for (i, ai) in a.iter().enumerate().take(bound + 1) {
        if ai == &BigInt::from(0) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(bound + 1 - i) {
            if bj != &BigInt::from(0) {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Result of a coefficientwise congruence scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub modulus_p: u64,
    pub modulus_exp: u32,
    pub window: usize,
    /// Indices where the coefficients disagree modulo `p^t`.
    pub discrepancies: Vec<usize>,
    /// Indices where a coefficient is not integral at `p`.
    pub bad_denominators: Vec<usize>,
}

impl CongruenceReport {
    pub fn holds(&self) -> bool {
        self.discrepancies.is_empty() && self.bad_denominators.is_empty()
    }
}

/// Compare two q-expansions coefficientwise modulo `p^t` on `1..=window`.
///
/// A coefficient difference is congruent to zero when every canonical
/// cyclotomic coordinate of it is a `p`-integral rational with valuation
/// at least `t` (coordinates over the common cyclotomic field).
pub fn check_congruence(
    f: &QExpansion,
    g: &QExpansion,
    p: u64,
    t: u32,
    window: usize,
) -> CongruenceReport {
    let window = window.min(f.bound).min(g.bound);
    let mut discrepancies = Vec::new();
    let mut bad_denominators = Vec::new();
    for n in 1..=window {
        let diff = f.coeff(n) - g.coeff(n);
        match cyc_val_p_at_least(&diff, p, t) {
            Some(true) => {}
            Some(false) => discrepancies.push(n),
            None => bad_denominators.push(n),
        }
    }
    CongruenceReport {
        modulus_p: p,
        modulus_exp: t,
        window,
        discrepancies,
        bad_denominators,
    }
}

/// `Some(true)` if every canonical coordinate of `x` has `v_p >= t`;
/// `None` when a coordinate has a denominator divisible by `p`.
pub fn cyc_val_p_at_least(x: &CycNum, p: u64, t: u32) -> Option<bool> {
    for c in x.canonical_coeffs() {
        match c.val_p(p) {
            None => {}
            Some(v) if v < 0 => return None,
            Some(v) if (v as u32) < t => return Some(false),
            Some(_) => {}
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_chars, teichmuller_char, CharConstraints};

    fn quad(m: u64) -> DirChar {
        enumerate_chars(m, CharConstraints { primitive_only: true, ..Default::default() })
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap()
    }

    #[test]
    fn zeta_values() {
        let triv = DirChar::trivial(1);
        assert_eq!(bernoulli_l_value(&triv, 2).unwrap().value, CycNum::from_rat(Rat::new(-1, 12)));
        assert_eq!(bernoulli_l_value(&triv, 4).unwrap().value, CycNum::from_rat(Rat::new(1, 120)));
        assert_eq!(bernoulli_l_value(&triv, 12).unwrap().value, CycNum::from_rat(Rat::new(691, 32760)));
        assert_eq!(bernoulli_l_value(&triv, 1).unwrap().value, CycNum::from_rat(Rat::new(-1, 2)));
    }

    #[test]
    fn dirichlet_l_values() {
        // L(0, chi_4) = 1/2
        let chi4 = quad(4);
        assert_eq!(bernoulli_l_value(&chi4, 1).unwrap().value, CycNum::from_rat(Rat::new(1, 2)));
        // L(-2, chi_3) = -2/9: B_{3,chi} = 2/3
        let chi3 = quad(3);
        assert_eq!(generalized_bernoulli(&chi3, 3), CycNum::from_rat(Rat::new(2, 3)));
        assert_eq!(bernoulli_l_value(&chi3, 3).unwrap().value, CycNum::from_rat(Rat::new(-2, 9)));
        // parity: B_{k,chi} = 0 for mismatched parity
        assert!(generalized_bernoulli(&chi3, 2).is_zero());
    }

    #[test]
    fn partial_l_euler_factors() {
        let triv = DirChar::trivial(1);
        // zeta^{(11)}(-1) = (1 - 11) zeta(-1) = 5/6
        let v = partial_l_value(&triv, 2, 11).unwrap();
        assert_eq!(v, CycNum::from_rat(Rat::new(5, 6)));
    }

    #[test]
    fn eisenstein_basic_coefficients() {
        let chi3 = quad(3);
        let triv = DirChar::trivial(1);
        let e = eisenstein_qexp(&chi3, &triv, 3, 20).unwrap();
        assert_eq!(e.coeff(1), &CycNum::one());
        // C(l) = chi2(l) + chi1(l) l^{k-1} for l prime to N
        for l in [2u64, 5, 7, 11, 13] {
            let want = &triv.eval(l as i64).0
                + &chi3.eval(l as i64).cyc().scale(&Rat::from_int(l as i64).pow(2));
            assert_eq!(e.coeff(l as usize), &want, "l = {l}");
        }
        // coprime multiplicativity
        assert_eq!(e.coeff(20), &(e.coeff(4) * e.coeff(5)));
        // constant term (N2 = 1): L(1-k, chi1)/2 = (-2/9)/2 = -1/9
        assert_eq!(e.constant_term_infinity, CycNum::from_rat(Rat::new(-1, 9)));
    }

    #[test]
    fn parity_and_trivial_guards() {
        let chi3 = quad(3);
        let triv = DirChar::trivial(1);
        assert!(matches!(
            eisenstein_qexp(&chi3, &triv, 2, 5),
            Err(EisensteinError::ParityViolation)
        ));
        assert!(matches!(
            eisenstein_qexp(&triv, &chi3, 3, 5),
            Err(EisensteinError::TrivialChi1)
        ));
    }

    #[test]
    fn hecke_eigenform_property() {
        let chi5 = DirChar::from_images(5, &[1]);
        let triv = DirChar::trivial(1);
        let k = 3;
        let e = eisenstein_qexp(&chi5, &triv, k, 60).unwrap();
        for l in [2u64, 3, 7] {
            let te = hecke_t(&e, l).unwrap();
            let lambda = &triv.eval(l as i64).0
                + &chi5.eval(l as i64).cyc().scale(&Rat::from_int(l as i64).pow(k - 1));
            for n in 1..=te.bound {
                assert_eq!(te.coeff(n), &(&lambda * e.coeff(n)), "l={l} n={n}");
            }
        }
        // T(q)^2 - T(q^2) = q S(q)
        let q = 3u64;
        let t1 = hecke_t(&hecke_t(&e, q).unwrap(), q).unwrap();
        let t2 = hecke_t(&e, q * q).unwrap();
        let s = hecke_s(&e, q).scale(&CycNum::from_int(q as i64));
        for n in 1..=t1.bound.min(t2.bound) {
            let lhs = t1.coeff(n) - t2.coeff(n);
            assert_eq!(lhs, *s.coeff(n), "n = {n}");
        }
    }

    #[test]
    fn u_p_acts_by_shift() {
        let chi3 = quad(3);
        let triv = DirChar::trivial(1);
        let e = eisenstein_qexp(&chi3, &triv, 3, 30).unwrap();
        let u3 = hecke_t(&e, 3).unwrap();
        for n in 1..=u3.bound {
            assert_eq!(u3.coeff(n), e.coeff(3 * n), "n = {n}");
        }
    }

    #[test]
    fn stabilized_u_p_eigenvalue() {
        // U(p) on the p-stabilization has eigenvalue chi2(p)
        let chi3 = quad(3);
        let triv = DirChar::trivial(1);
        let p = 5u64;
        let e = eisenstein_qexp_stabilized(&chi3, &triv, 3, p, 60).unwrap();
        assert_eq!(e.level, 15);
        let up = hecke_t(&e, p).unwrap();
        for n in 1..=up.bound {
            assert_eq!(up.coeff(n), e.coeff(n), "n = {n}");
        }
    }

    #[test]
    fn eta_products() {
        let delta = eta_product_cuspform(EtaProduct::Delta, 10);
        let tau: Vec<i64> = vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
        for (i, t) in tau.iter().enumerate() {
            assert_eq!(delta.coeff(i + 1), &CycNum::from_int(*t), "tau({})", i + 1);
        }
        let f11 = eta_product_cuspform(EtaProduct::Level11, 10);
        let a: Vec<i64> = vec![1, -2, -1, 2, 1, 2, -2, 0, -2, -2];
        for (i, t) in a.iter().enumerate() {
            assert_eq!(f11.coeff(i + 1), &CycNum::from_int(*t), "a({})", i + 1);
        }
    }

    #[test]
    fn ramanujan_congruence_window() {
        let b = 60;
        let delta = eta_product_cuspform(EtaProduct::Delta, b);
        let e12 = eisenstein_level_one(12, b).unwrap();
        let rep = check_congruence(&delta, &e12, 691, 1, b);
        assert!(rep.holds(), "{:?}", rep);
        // and the congruence is not mod 691^2
        let rep2 = check_congruence(&delta, &e12, 691, 2, b);
        assert!(!rep2.holds());
    }

    #[test]
    fn check_congruence_flags_denominators() {
        let triv = DirChar::trivial(1);
        let mut f = eisenstein_level_one(4, 5).unwrap();
        f.coeffs[2] = CycNum::from_rat(Rat::new(1, 5));
        let g = eisenstein_level_one(4, 5).unwrap();
        let rep = check_congruence(&f, &g, 5, 1, 5);
        assert_eq!(rep.bad_denominators, vec![2]);
        let _ = triv;
    }

    #[test]
    fn omega_twisted_series() {
        // just exercise a pair with both characters nontrivial
        let w2 = teichmuller_char(5, 2);
        let chi3 = quad(3);
        let e = eisenstein_qexp(&w2, &chi3, 3, 25).unwrap();
        assert_eq!(e.level, 15);
        assert!(e.constant_term_infinity.is_zero());
        assert_eq!(e.coeff(6), &(e.coeff(2) * e.coeff(3)));
    }
}
