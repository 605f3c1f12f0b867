//! Finite-place machinery: Gauss and Jacobi sums, local epsilon factors,
//! degenerate intertwining values, and a brute-force integral oracle.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - The additive character at a finite prime `l` is
//!   `psi(x) = e^{-2 pi i [x]_l}` where `[x]_l` is the l-adic fractional
//!   part. With this choice the additive conductor exponent is `r = 0` at
//!   every prime. The resulting Gauss sum
//!   `tau(theta) = sum_x theta(x) zeta_{p^e}^{-x}` differs from the
//!   classical one (which uses `zeta^{+x}`) by the factor `theta(-1)`;
//!   every identity checked here is stated and verified in this convention.
//! - Symbolic objects in the complex parameter `s` are finite Laurent sums
//!   in `X = q^{-s}` with an optional `sqrt(q)` carried per term. All
//!   intertwining values have even `X`-exponents, so specializing at
//!   `s = (1-k)/2` (that is `X^2 = q^{k-1}`) stays inside `Q(zeta)`.
//! - A [`LocalChar`] is a character of `Q_p^x`: a primitive unit-part
//!   character of conductor `p^e` together with an arbitrary root-of-unity
//!   value at the uniformizer. Local components of global Hecke characters
//!   are produced by [`hecke_local`], which inverts the Dirichlet component
//!   on units and pins the uniformizer value by the product formula.

use crate::characters::DirChar;
use crate::exactmath::cyc::CycNum;
use crate::exactmath::rat::Rat;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LocalError {
    #[error("character must be ramified")]
    Unramified,
    #[error("residue characteristics differ")]
    MixedResidueChar,
    #[error("level parameter too small: need at least {0}")]
    LevelTooSmall(u32),
    #[error("integrand not locally constant at this depth")]
    DepthTooSmall,
    #[error("unpaired square root of q in specialization")]
    UnpairedSqrt,
    #[error("index {0} outside the allowed range")]
    BadIndex(u32),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, LocalError>;

/// The additive character `psi(x) = e^{-2 pi i [x]_p}` evaluated exactly.
pub fn psi_p(x: &Rat, p: u64) -> CycNum {
    if x.is_zero() {
        return CycNum::one();
    }
    let t = (-x.val_p(p).unwrap()).max(0) as u32;
    if t == 0 {
        return CycNum::one();
    }
    let pt = p.pow(t);
    // x = n / (p^t d') with gcd(d', p) = 1; [x]_p = (n (d')^{-1} mod p^t)/p^t
    let scaled = x * &Rat::from_int(pt as i64);
    debug_assert_eq!(scaled.val_p(p).map(|v| v >= 0), Some(true));
    let a = scaled
        .mod_int(&num_bigint::BigInt::from(pt))
        .expect("denominator prime to p after scaling");
    use num_traits::ToPrimitive;
    CycNum::root_of_unity(pt, -(a.to_i64().unwrap()))
}

/// A character of `Q_p^x`: primitive unit part of conductor `p^e`, plus an
/// explicit value at the uniformizer `p`.
#[derive(Clone)]
pub struct LocalChar {
    p: u64,
    e: u32,
    unit_char: DirChar,
    unif_value: CycNum,
}

impl fmt::Debug for LocalChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theta_{}(e={}, order {})", self.p, self.e, self.unit_char.order())
    }
}

fn trailing_zeros_in(n: u64, p: u64) -> u32 {
    let mut n = n;
    let mut e = 0;
    while n > 1 && n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

impl LocalChar {
    /// Build from a primitive Dirichlet character of prime-power modulus.
    pub fn new(p: u64, unit_char: DirChar, unif_value: CycNum) -> LocalChar {
        let m = unit_char.modulus();
        let mut e = 0u32;
        let mut mm = m;
        while mm % p == 0 {
            mm /= p;
            e += 1;
        }
        assert!(mm == 1, "unit character modulus must be a power of p");
        assert!(unit_char.is_primitive(), "unit character must be primitive");
        LocalChar { p, e, unit_char, unif_value }
    }

    pub fn unramified(p: u64, unif_value: CycNum) -> LocalChar {
        LocalChar { p, e: 0, unit_char: DirChar::trivial(1), unif_value }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn conductor_exponent(&self) -> u32 {
        self.e
    }

    pub fn is_ramified(&self) -> bool {
        self.e > 0
    }

    pub fn unit_char(&self) -> &DirChar {
        &self.unit_char
    }

    pub fn unif_value(&self) -> &CycNum {
        &self.unif_value
    }

    pub fn inv(&self) -> LocalChar {
        LocalChar {
            p: self.p,
            e: self.e,
            unit_char: self.unit_char.inv().induce(self.unit_char.modulus()),
            unif_value: self.unif_value.inv(),
        }
    }

    /// Product (primitivized unit parts, multiplied uniformizer values).
    pub fn mul(&self, other: &LocalChar) -> Result<LocalChar> {
        if self.p != other.p {
            return Err(LocalError::MixedResidueChar);
        }
        let prod = self.unit_char.mul(&other.unit_char);
        let e = trailing_zeros_in(prod.modulus(), self.p);
        Ok(LocalChar {
            p: self.p,
            e,
            unit_char: prod,
            unif_value: &self.unif_value * &other.unif_value,
        })
    }

    /// Value on a unit residue class (zero off units).
    pub fn eval_unit(&self, a: i64) -> CycNum {
        if self.e == 0 {
            return if a.rem_euclid(self.p as i64) == 0 {
                CycNum::zero()
            } else {
                CycNum::one()
            };
        }
        self.unit_char.eval(a).into_cyc()
    }

    /// Value at a nonzero rational, via `x = p^v u`.
    pub fn eval_rational(&self, x: &Rat) -> CycNum {
        assert!(!x.is_zero());
        let v = x.val_p(self.p).unwrap();
        let u = x * &Rat::from_int(self.p as i64).pow(-v);
        let pe = self.p.pow(self.e.max(1));
        let ures = u
            .mod_int(&num_bigint::BigInt::from(pe))
            .expect("unit part has denominator prime to p");
        use num_traits::ToPrimitive;
        let unit_val = self.eval_unit(ures.to_i64().unwrap());
        &self.unif_value.pow(v) * &unit_val
    }
}

/// The local component at `p` of the Hecke character attached to a
/// primitive Dirichlet character: on units it is the inverse of the
/// Dirichlet local component, and its value at the uniformizer is fixed by
/// the global product formula (the components away from `p` evaluated
/// at `p`).
pub fn hecke_local(chi: &DirChar, p: u64) -> LocalChar {
    let prim = chi.primitivize();
    let comp = prim.local_component(p);
    let e = trailing_zeros_in(comp.modulus(), p);
    let mut unif = CycNum::one();
    for (q, c) in prim.local_components() {
        if q != p {
            unif = &unif * &c.eval(p as i64).into_cyc();
        }
    }
    LocalChar { p, e, unit_char: comp.inv().induce(comp.modulus()), unif_value: unif }
}

/// Gauss sum `tau(theta) = sum_{x in (Z/p^e)^x} theta(x) psi(x / p^e)`,
/// an exact element of `Q(zeta_{ord(theta) p^e})`. Requires ramification.
pub fn gauss_sum(theta: &LocalChar) -> Result<CycNum> {
    if !theta.is_ramified() {
        return Err(LocalError::Unramified);
    }
    let pe = theta.p.pow(theta.e);
    let mut acc = CycNum::zero();
    for x in 1..pe {
        if x % theta.p == 0 {
            continue;
        }
        let cv = theta.eval_unit(x as i64);
        if cv.is_zero() {
            continue;
        }
        // psi(x/p^e) = zeta_{p^e}^{-x}
        let add = CycNum::root_of_unity(pe, -(x as i64));
        acc = &acc + &(&cv * &add);
    }
    Ok(acc)
}

/// Jacobi-type sum `J_a(theta1, theta2, p^k) = sum_{x in (Z/p^k)^x}
/// theta1(x) theta2(a - x)` with extension by zero.
pub fn jacobi_sum(theta1: &LocalChar, theta2: &LocalChar, a: i64, k: u32) -> Result<CycNum> {
    if theta1.p != theta2.p {
        return Err(LocalError::MixedResidueChar);
    }
    let emax = theta1.e.max(theta2.e);
    if emax == 0 || k < emax {
        return Err(LocalError::LevelTooSmall(emax.max(1)));
    }
    let p = theta1.p;
    let pk = p.pow(k);
    let mut acc = CycNum::zero();
    for x in 1..pk {
        if x % p == 0 {
            continue;
        }
        let v1 = theta1.eval_unit(x as i64);
        if v1.is_zero() {
            continue;
        }
        let diff = a - x as i64;
        if diff.rem_euclid(p as i64) == 0 {
            continue; // extension by zero
        }
        let v2 = theta2.eval_unit(diff);
        if v2.is_zero() {
            continue;
        }
        acc = &acc + &(&v1 * &v2);
    }
    Ok(acc)
}

// ---- symbolic Laurent data in X = q^{-s} ---------------------------------

/// A single monomial `scalar * q^{qpower} * (q^{-s})^{exponent}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMonomial {
    pub scalar: CycNum,
    pub exponent: i64,
    pub qpower: Rat,
}

impl LaurentMonomial {
    pub fn unit() -> LaurentMonomial {
        LaurentMonomial { scalar: CycNum::one(), exponent: 0, qpower: Rat::zero() }
    }

    pub fn mul(&self, other: &LaurentMonomial) -> LaurentMonomial {
        LaurentMonomial {
            scalar: &self.scalar * &other.scalar,
            exponent: self.exponent + other.exponent,
            qpower: self.qpower.clone() + other.qpower.clone(),
        }
    }

    /// Evaluate at an integer `s`, for a fixed prime `q = p`.
    pub fn at_integer_s(&self, p: u64, s: i64) -> Result<CycNum> {
        if !self.qpower.is_integer() {
            return Err(LocalError::UnpairedSqrt);
        }
        use num_traits::ToPrimitive;
        let qp = self.qpower.numer().to_i64().unwrap();
        let total = qp - s * self.exponent;
        Ok(self.scalar.scale(&Rat::from_int(p as i64).pow(total)))
    }
}

/// Finite Laurent sum in `X = q^{-s}`: per `X`-exponent a plain scalar and
/// a scalar carrying one factor `sqrt(q)`.
#[derive(Clone, PartialEq)]
pub struct LaurentSum {
    p: u64,
    terms: BTreeMap<i64, (CycNum, CycNum)>,
}

impl fmt::Debug for LaurentSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSum(p={})[", self.p)?;
        for (e, (a, b)) in &self.terms {
            if !a.is_zero() {
                write!(f, " ({:?}) X^{e}", a)?;
            }
            if !b.is_zero() {
                write!(f, " ({:?}) sqrt(q) X^{e}", b)?;
            }
        }
        write!(f, " ]")
    }
}

impl LaurentSum {
    pub fn zero(p: u64) -> LaurentSum {
        LaurentSum { p, terms: BTreeMap::new() }
    }

    pub fn scalar(p: u64, c: CycNum) -> LaurentSum {
        let mut s = LaurentSum::zero(p);
        s.add_term(0, c, false);
        s
    }

    pub fn monomial(p: u64, exponent: i64, c: CycNum) -> LaurentSum {
        let mut s = LaurentSum::zero(p);
        s.add_term(exponent, c, false);
        s
    }

    pub fn add_term(&mut self, exponent: i64, c: CycNum, sqrt_q: bool) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(exponent)
            .or_insert_with(|| (CycNum::zero(), CycNum::zero()));
        if sqrt_q {
            entry.1 = &entry.1 + &c;
        } else {
            entry.0 = &entry.0 + &c;
        }
    }

    pub fn add(&self, other: &LaurentSum) -> LaurentSum {
        assert_eq!(self.p, other.p);
        let mut out = self.clone();
        for (&e, (a, b)) in &other.terms {
            out.add_term(e, a.clone(), false);
            out.add_term(e, b.clone(), true);
        }
        out.prune();
        out
    }

    pub fn mul(&self, other: &LaurentSum) -> LaurentSum {
        assert_eq!(self.p, other.p);
        let q = Rat::from_int(self.p as i64);
        let mut out = LaurentSum::zero(self.p);
        for (&e1, (a1, b1)) in &self.terms {
            for (&e2, (a2, b2)) in &other.terms {
                out.add_term(e1 + e2, a1 * a2, false);
                out.add_term(e1 + e2, a1 * b2, true);
                out.add_term(e1 + e2, b1 * a2, true);
                // sqrt(q) * sqrt(q) = q
                out.add_term(e1 + e2, (b1 * b2).scale(&q), false);
            }
        }
        out.prune();
        out
    }

    pub fn scale(&self, c: &CycNum) -> LaurentSum {
        let mut out = LaurentSum::zero(self.p);
        for (&e, (a, b)) in &self.terms {
            out.add_term(e, a * c, false);
            out.add_term(e, b * c, true);
        }
        out
    }

    /// Multiply by `q^{h/2}` (`h` counted in half units).
    pub fn shift_q_half(&self, h: i64) -> LaurentSum {
        let q = Rat::from_int(self.p as i64);
        let whole = h.div_euclid(2);
        let frac = h.rem_euclid(2) == 1;
        let mut out = LaurentSum::zero(self.p);
        for (&e, (a, b)) in &self.terms {
            let a2 = a.scale(&q.pow(whole));
            let b2 = b.scale(&q.pow(whole));
            if frac {
                // plain picks up sqrt; sqrt*sqrt folds a whole q into plain
                out.add_term(e, b2.scale(&q), false);
                out.add_term(e, a2, true);
            } else {
                out.add_term(e, a2, false);
                out.add_term(e, b2, true);
            }
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.terms.retain(|_, (a, b)| !(a.is_zero() && b.is_zero()));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|(a, b)| a.is_zero() && b.is_zero())
    }

    /// Coefficient of `X^e` (errors if a square root survives there).
    pub fn coefficient(&self, e: i64) -> Result<CycNum> {
        match self.terms.get(&e) {
            None => Ok(CycNum::zero()),
            Some((a, b)) => {
                if !b.is_zero() {
                    return Err(LocalError::UnpairedSqrt);
                }
                Ok(a.clone())
            }
        }
    }

    pub fn exponents(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }

    /// Evaluate at `s = (1-k)/2`, i.e. `X^2 = q^{k-1}`. Every term must
    /// end up with an even number of half-powers of `q`.
    pub fn eval_at_weight(&self, k: i64) -> Result<CycNum> {
        let mut acc = CycNum::zero();
        for (&e, (a, b)) in &self.terms {
            let h_plain = e * (k - 1);
            if h_plain.rem_euclid(2) == 0 {
                acc = &acc + &a.scale(&Rat::from_int(self.p as i64).pow(h_plain / 2));
            } else if !a.is_zero() {
                return Err(LocalError::UnpairedSqrt);
            }
            let h_sqrt = e * (k - 1) + 1;
            if h_sqrt.rem_euclid(2) == 0 {
                acc = &acc + &b.scale(&Rat::from_int(self.p as i64).pow(h_sqrt / 2));
            } else if !b.is_zero() {
                return Err(LocalError::UnpairedSqrt);
            }
        }
        Ok(acc)
    }

    /// Evaluate at an integer value of `s`.
    pub fn at_integer_s(&self, s: i64) -> Result<CycNum> {
        let mut acc = CycNum::zero();
        for (&e, (a, b)) in &self.terms {
            if !b.is_zero() {
                return Err(LocalError::UnpairedSqrt);
            }
            acc = &acc + &a.scale(&Rat::from_int(self.p as i64).pow(-s * e));
        }
        Ok(acc)
    }
}

// ---- local epsilon factor -------------------------------------------------

/// The epsilon factor of the *inverse* of `theta`, as a function of `s`:
/// `eps(s, theta^{-1}, psi) = q^{-s e} theta(p)^{-e} tau(theta)`.
/// For unramified `theta` this is the constant 1.
#[derive(Clone, Debug)]
pub struct EpsilonFactor {
    p: u64,
    e: u32,
    scalar: CycNum,
}

impl EpsilonFactor {
    pub fn symbolic(&self) -> LaurentMonomial {
        LaurentMonomial {
            scalar: self.scalar.clone(),
            exponent: self.e as i64,
            qpower: Rat::zero(),
        }
    }

    /// Value at an integer argument `s0`.
    pub fn at(&self, s0: i64) -> CycNum {
        self.scalar
            .scale(&Rat::from_int(self.p as i64).pow(-s0 * self.e as i64))
    }
}

/// Inverse of the epsilon-factor value at argument `2 - k`, computed by
/// the conjugation identity `tau conj(tau) = q^e` instead of a generic
/// field inversion.
pub fn epsilon_factor_inverse_value(theta: &LocalChar, k: i64) -> CycNum {
    if !theta.is_ramified() {
        return CycNum::one();
    }
    let e = theta.e as i64;
    let p = theta.p as i64;
    let tau_inv = gauss_sum(theta)
        .expect("ramified")
        .conj()
        .scale(&Rat::from_int(p).pow(-e));
    (&theta.unif_value.pow(e) * &tau_inv).scale(&Rat::from_int(p).pow((2 - k) * e))
}

/// Epsilon factor data for `theta^{-1}`, together with its value at
/// argument `2 - k` (the point appearing in weight-`k` constant terms).
pub fn epsilon_factor(theta: &LocalChar, k: i64) -> (EpsilonFactor, CycNum) {
    let eps = if theta.is_ramified() {
        let tau = gauss_sum(theta).expect("ramified");
        EpsilonFactor {
            p: theta.p,
            e: theta.e,
            scalar: &theta.unif_value.pow(-(theta.e as i64)) * &tau,
        }
    } else {
        EpsilonFactor { p: theta.p, e: 0, scalar: CycNum::one() }
    };
    let value = eps.at(2 - k);
    (eps, value)
}

// ---- principal series section, evaluated from the definition --------------

pub type Mat2 = [[Rat; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out: Mat2 = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        }
    }
    out
}

pub fn mat_det(a: &Mat2) -> Rat {
    &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0])
}

fn val_or_inf(x: &Rat, p: u64) -> i64 {
    x.val_p(p).unwrap_or(i64::MAX / 4)
}

/// Value of the normalized new-vector section attached to
/// `(chi1 |.|^s, chi2 |.|^{-s})` at an arbitrary invertible rational
/// matrix, straight from the definition: Iwasawa-decompose, locate the
/// lower-triangular cell of the integral part, and read off the value.
///
/// The result is a Laurent sum in `X = q^{-s}`; scalars may carry a formal
/// `sqrt(q)` from the half-integral modulus power of the unnormalized
/// section.
pub fn section_value(chi1: &LocalChar, chi2: &LocalChar, g: &Mat2) -> Result<LaurentSum> {
    if chi1.p != chi2.p {
        return Err(LocalError::MixedResidueChar);
    }
    let p = chi1.p;
    let det = mat_det(g);
    assert!(!det.is_zero(), "singular matrix");
    let e1 = chi1.e as i64;
    let e2 = chi2.e as i64;
    let n_level = e1 + e2;

    // Iwasawa: g = b * g0, b upper triangular, g0 integral with unit det
    let c = g[1][0].clone();
    let d = g[1][1].clone();
    let (b_a, b_d, g0): (Rat, Rat, Mat2) = if val_or_inf(&c, p) >= val_or_inf(&d, p) {
        let cd = &c / d.clone();
        let g0 = [[Rat::one(), Rat::zero()], [cd, Rat::one()]];
        (det.clone() / d.clone(), d.clone(), g0)
    } else {
        let dc = &d / c.clone();
        let g0 = [[Rat::zero(), Rat::one()], [Rat::one(), dc]];
        (-(&det / c.clone()), c.clone(), g0)
    };

    // the diagonal of b acts by chi1(a) chi2(d) |a/d|^{s + 1/2}
    let va = val_or_inf(&b_a, p);
    let vd = val_or_inf(&b_d, p);
    let delta = va - vd;
    let pref_scalar = &chi1.eval_rational(&b_a) * &chi2.eval_rational(&b_d);
    if pref_scalar.is_zero() {
        return Ok(LaurentSum::zero(p));
    }
    // |a/d|^{s+1/2} = q^{-delta/2} X^{delta}
    let mut prefactor = LaurentSum::zero(p);
    prefactor.add_term(delta, pref_scalar, false);
    let prefactor = prefactor.shift_q_half(-delta);

    // section value on the integral part
    let c0 = &g0[1][0];
    let d0 = &g0[1][1];
    let det0 = mat_det(&g0);
    debug_assert_eq!(det0.val_p(p), Some(0));
    let vc0 = val_or_inf(c0, p);
    let cell = vc0.min(n_level);
    if n_level == 0 {
        return Ok(prefactor);
    }
    if cell != e2 {
        return Ok(LaurentSum::zero(p));
    }
    let (a_part, d_part) = if cell == n_level {
        // full-level cell (identity coset); d0 is a unit here
        (det0.clone() / d0.clone(), d0.clone())
    } else if cell == 0 {
        (det0.clone() / c0.clone(), c0.clone())
    } else {
        let pc = Rat::from_int(p as i64).pow(cell);
        ((&det0 * &pc) / c0.clone(), d0.clone())
    };
    let val = &(&chi1.unif_value.pow(-e2) * &chi1.eval_rational(&a_part))
        * &chi2.eval_rational(&d_part);
    Ok(prefactor.scale(&val))
}

// ---- brute-force integral oracle ------------------------------------------

/// Integrands the oracle evaluates by exact finite summation.
#[derive(Clone, Debug)]
pub enum IntegrandSpec {
    /// `int_{Z_p^x} 1 dx`
    UnitVolume { p: u64 },
    /// `int_{p^k Z_p^x} |x|^s dx` at an integer `s`
    ShellAbsPower { p: u64, k: i64, s: i64 },
    /// `gamma(u) = int_{Z_p} psi(-ux) dx`
    Gamma { p: u64, u: Rat },
    /// `int_{p^k Z_p} psi(-ux) dx`
    BallPsi { p: u64, k: i64, u: Rat },
    /// `int_{p^m Z_p^x} theta(x) psi(x) dx`
    ThetaPsiShell { theta: LocalChar, m: i64 },
    /// `int_{Z_p^x} theta1(1 + p^{e1-e2} x) theta2(x) dx` (`e1 > e2`)
    UnitTwistA { theta1: LocalChar, theta2: LocalChar },
    /// `int_{Z_p^x} theta1(p^{k-e1} + x) theta2(x) dx` (`e1 = e2`, `k >= e1`)
    UnitTwistB { theta1: LocalChar, theta2: LocalChar, k: u32 },
}

/// Evaluate a catalog integrand as an exact finite sum over residues mod
/// `p^depth`. The sum is recomputed one level deeper and must agree,
/// otherwise the depth is rejected as below the constancy radius.
pub fn riemann_sum_oracle(spec: &IntegrandSpec, depth: u32) -> Result<CycNum> {
    let v1 = riemann_sum_once(spec, depth)?;
    let v2 = riemann_sum_once(spec, depth + 1)?;
    if v1 != v2 {
        return Err(LocalError::DepthTooSmall);
    }
    Ok(v1)
}

fn riemann_sum_once(spec: &IntegrandSpec, depth: u32) -> Result<CycNum> {
    match spec {
        IntegrandSpec::UnitVolume { p } => {
            let pd = p.pow(depth);
            let meas = Rat::from_int(pd as i64).inv();
            let mut acc = Rat::zero();
            for x in 0..pd {
                if x % p != 0 {
                    acc += meas.clone();
                }
            }
            Ok(CycNum::from_rat(acc))
        }
        IntegrandSpec::ShellAbsPower { p, k, s } => {
            let pd = p.pow(depth);
            let meas = Rat::from_int(*p as i64).pow(-(depth as i64) - k);
            let absval = Rat::from_int(*p as i64).pow(-k * s);
            let mut acc = Rat::zero();
            for u in 0..pd {
                if u % p != 0 {
                    acc += meas.clone() * absval.clone();
                }
            }
            Ok(CycNum::from_rat(acc))
        }
        IntegrandSpec::Gamma { p, u } => {
            riemann_sum_once(&IntegrandSpec::BallPsi { p: *p, k: 0, u: u.clone() }, depth)
        }
        IntegrandSpec::BallPsi { p, k, u } => {
            let pd = p.pow(depth);
            let meas = Rat::from_int(*p as i64).pow(-(depth as i64) - k);
            let pk = Rat::from_int(*p as i64).pow(*k);
            let mut acc = CycNum::zero();
            for y in 0..pd {
                let x = &pk * &Rat::from_int(y as i64);
                let val = psi_p(&(-&(u * &x)), *p);
                acc = &acc + &val.scale(&meas);
            }
            Ok(acc)
        }
        IntegrandSpec::ThetaPsiShell { theta, m } => {
            let p = theta.p;
            let pd = p.pow(depth);
            let meas = Rat::from_int(p as i64).pow(-(depth as i64) - m);
            let pm = Rat::from_int(p as i64).pow(*m);
            let mut acc = CycNum::zero();
            for uu in 0..pd {
                if uu % p == 0 {
                    continue;
                }
                let x = &pm * &Rat::from_int(uu as i64);
                let tv = theta.eval_rational(&x);
                let pv = psi_p(&x, p);
                acc = &acc + &(&tv * &pv).scale(&meas);
            }
            Ok(acc)
        }
        IntegrandSpec::UnitTwistA { theta1, theta2 } => {
            if theta1.p != theta2.p {
                return Err(LocalError::MixedResidueChar);
            }
            let p = theta1.p;
            assert!(theta1.e > theta2.e);
            let shift = Rat::from_int(p as i64).pow((theta1.e - theta2.e) as i64);
            let pd = p.pow(depth);
            let meas = Rat::from_int(p as i64).pow(-(depth as i64));
            let mut acc = CycNum::zero();
            for x in 0..pd {
                if x % p == 0 {
                    continue;
                }
                let arg = Rat::one() + &shift * &Rat::from_int(x as i64);
                let v = &theta1.eval_rational(&arg) * &theta2.eval_unit(x as i64);
                acc = &acc + &v.scale(&meas);
            }
            Ok(acc)
        }
        IntegrandSpec::UnitTwistB { theta1, theta2, k } => {
            if theta1.p != theta2.p {
                return Err(LocalError::MixedResidueChar);
            }
            let p = theta1.p;
            assert!(theta1.e == theta2.e && *k >= theta1.e);
            let shift = Rat::from_int(p as i64).pow((*k - theta1.e) as i64);
            let pd = p.pow(depth);
            let meas = Rat::from_int(p as i64).pow(-(depth as i64));
            let mut acc = CycNum::zero();
            for x in 0..pd {
                if x % p == 0 {
                    continue;
                }
                let arg = &shift + &Rat::from_int(x as i64);
                if arg.val_p(p).map_or(true, |v| v != 0) {
                    continue;
                }
                let v = &theta1.eval_rational(&arg) * &theta2.eval_unit(x as i64);
                acc = &acc + &v.scale(&meas);
            }
            Ok(acc)
        }
    }
}

/// One shell of the degenerate intertwining integral
/// `int f(w n(x) gamma_i) dx`: the ball `Z_p` for `shell = 0`, the sphere
/// `p^{-shell} Z_p^x` for `shell >= 1`. Exact finite sum of section
/// values; the sum is recomputed one level shallower and must agree
/// (the integrands are locally constant strictly below any adequate
/// depth), otherwise the depth is rejected.
pub fn m_integral_shell(
    chi1: &LocalChar,
    chi2: &LocalChar,
    i: u32,
    shell: u32,
    depth: u32,
) -> Result<LaurentSum> {
    assert!(depth >= 2);
    let a = m_integral_shell_once(chi1, chi2, i, shell, depth - 1)?;
    let b = m_integral_shell_once(chi1, chi2, i, shell, depth)?;
    if a != b {
        return Err(LocalError::DepthTooSmall);
    }
    Ok(b)
}

fn m_integral_shell_once(
    chi1: &LocalChar,
    chi2: &LocalChar,
    i: u32,
    shell: u32,
    depth: u32,
) -> Result<LaurentSum> {
    let p = chi1.p;
    let pd = p.pow(depth);
    let n_level = chi1.e + chi2.e;
    let gamma_i = if i >= n_level {
        [[Rat::one(), Rat::zero()], [Rat::zero(), Rat::one()]]
    } else {
        [
            [Rat::one(), Rat::zero()],
            [Rat::from_int(p as i64).pow(i as i64), Rat::one()],
        ]
    };
    let w = [[Rat::zero(), Rat::from_int(-1)], [Rat::one(), Rat::zero()]];
    let mut acc = LaurentSum::zero(p);
    if shell == 0 {
        let meas = Rat::from_int(p as i64).pow(-(depth as i64));
        for x in 0..pd {
            let n = [[Rat::one(), Rat::from_int(x as i64)], [Rat::zero(), Rat::one()]];
            let m = mat_mul(&mat_mul(&w, &n), &gamma_i);
            let v = section_value(chi1, chi2, &m)?;
            acc = acc.add(&v.scale(&CycNum::from_rat(meas.clone())));
        }
    } else {
        let meas = Rat::from_int(p as i64).pow(shell as i64 - depth as i64);
        let scale = Rat::from_int(p as i64).pow(-(shell as i64));
        for u in 0..pd {
            if u % p == 0 {
                continue;
            }
            let x = &scale * &Rat::from_int(u as i64);
            let n = [[Rat::one(), x], [Rat::zero(), Rat::one()]];
            let m = mat_mul(&mat_mul(&w, &n), &gamma_i);
            let v = section_value(chi1, chi2, &m)?;
            acc = acc.add(&v.scale(&CycNum::from_rat(meas.clone())));
        }
    }
    Ok(acc)
}

// ---- intertwining constants (closed forms) --------------------------------

/// Which branch of the case analysis an intertwining value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntertwiningCase {
    RamUnramZero,
    UnramRamZero,
    UnramRamInterior,
    RamRamOffDiagonal,
    RamRamE1GtE2,
    RamRamE1LtE2,
    RamRamEqualPrimitive,
    RamRamEqualMiddle,
    RamRamEqualUnramifiedTwist,
}

/// Geometric tail `sum_{k >= start} coeff * ratio^{k-start} X^{2k}`.
#[derive(Clone, Debug)]
pub struct GeometricTail {
    pub start: i64,
    pub coeff: CycNum,
    pub ratio: CycNum,
}

/// A degenerate intertwining value: finite Laurent data, an optional
/// geometric tail, the case tag, and the specialization at `s = (1-k)/2`.
#[derive(Clone, Debug)]
pub struct IntertwiningConstant {
    pub case: IntertwiningCase,
    pub finite: LaurentSum,
    pub tail: Option<GeometricTail>,
    pub value: CycNum,
}

impl IntertwiningConstant {
    /// Coefficient of `X^{2k}` (shell `k`), including the tail.
    pub fn shell_coefficient(&self, k: i64) -> Result<CycNum> {
        let mut c = self.finite.coefficient(2 * k)?;
        if let Some(t) = &self.tail {
            if k >= t.start {
                c = &c + &(&t.coeff * &t.ratio.pow(k - t.start));
            }
        }
        Ok(c)
    }

    fn finish(p: u64, case: IntertwiningCase, finite: LaurentSum, tail: Option<GeometricTail>, k: i64) -> Result<IntertwiningConstant> {
        let mut value = finite.eval_at_weight(k)?;
        if let Some(t) = &tail {
            // sum_{j >= start} coeff ratio^{j-start} X^{2j} at X^2 = q^{k-1}
            let x2 = Rat::from_int(p as i64).pow(k - 1);
            let denom = CycNum::one() - t.ratio.scale(&x2);
            let num = t.coeff.scale(&x2.pow(t.start));
            value = &value + &(&num * &denom.inv());
        }
        Ok(IntertwiningConstant { case, finite, tail, value })
    }
}

/// Closed-form intertwining value `M_{v,s,i}` specialized at
/// `s = (1-k)/2`, with full symbolic data for shell-by-shell checks.
///
/// `i` indexes the lower-triangular coset of the evaluation point and must
/// satisfy `0 <= i < e1 + e2`.
pub fn intertwining_constant(
    chi1: &LocalChar,
    chi2: &LocalChar,
    i: u32,
    k: i64,
) -> Result<IntertwiningConstant> {
    if chi1.p != chi2.p {
        return Err(LocalError::MixedResidueChar);
    }
    let p = chi1.p;
    let e1 = chi1.e;
    let e2 = chi2.e;
    let n_level = e1 + e2;
    if n_level == 0 || i >= n_level {
        return Err(LocalError::BadIndex(i));
    }
    let qpow = |e: i64| Rat::from_int(p as i64).pow(e);
    let zero = |case: IntertwiningCase| {
        Ok(IntertwiningConstant {
            case,
            finite: LaurentSum::zero(p),
            tail: None,
            value: CycNum::zero(),
        })
    };
    if e1 == 0 && e2 > 0 {
        if i == 0 {
            // M = chi1^{-1}(p^{e2}) chi2(-1) q^{-e2}
            let scalar = (&chi1.unif_value.pow(-(e2 as i64)) * &chi2.eval_unit(-1))
                .scale(&qpow(-(e2 as i64)));
            let finite = LaurentSum::scalar(p, scalar.clone());
            return Ok(IntertwiningConstant {
                case: IntertwiningCase::UnramRamZero,
                finite,
                tail: None,
                value: scalar,
            });
        }
        return zero(IntertwiningCase::UnramRamInterior);
    }
    if e1 > 0 && e2 == 0 {
        return zero(IntertwiningCase::RamUnramZero);
    }
    // both ramified
    if i != e1 {
        return zero(IntertwiningCase::RamRamOffDiagonal);
    }
    let chi1_inv = chi1.inv();
    if e1 > e2 {
        // chi2(-p^{-e2}) q^{-e2} X^{2 e2} sum_x chi2(x) chi1^{-1}(1 - p^{e1-e2} x)
        let pe = p.pow(e2);
        let shift = p.pow(e1 - e2) as i64;
        let mut s = CycNum::zero();
        for x in 1..pe {
            if x % p == 0 {
                continue;
            }
            let v = &chi2.eval_unit(x as i64) * &chi1_inv.eval_unit(1 - shift * x as i64);
            s = &s + &v;
        }
        let scalar = (&chi2.eval_unit(-1) * &chi2.unif_value.pow(-(e2 as i64)))
            .scale(&qpow(-(e2 as i64)));
        let finite = LaurentSum::monomial(p, 2 * e2 as i64, &scalar * &s);
        return IntertwiningConstant::finish(p, IntertwiningCase::RamRamE1GtE2, finite, None, k);
    }
    if e1 < e2 {
        // chi1^{-1}(p^{e2-e1}) chi2(-p^{-e1}) q^{-e2} X^{2 e1}
        //   sum_x chi1^{-1}(x) chi2(1 - p^{e2-e1} x)
        let pe = p.pow(e1);
        let shift = p.pow(e2 - e1) as i64;
        let mut s = CycNum::zero();
        for x in 1..pe {
            if x % p == 0 {
                continue;
            }
            let v = &chi1_inv.eval_unit(x as i64) * &chi2.eval_unit(1 - shift * x as i64);
            s = &s + &v;
        }
        let scalar = (&(&chi1.unif_value.pow(-((e2 - e1) as i64)) * &chi2.eval_unit(-1))
            * &chi2.unif_value.pow(-(e1 as i64)))
            .scale(&qpow(-(e2 as i64)));
        let finite = LaurentSum::monomial(p, 2 * e1 as i64, &scalar * &s);
        return IntertwiningConstant::finish(p, IntertwiningCase::RamRamE1LtE2, finite, None, k);
    }
    // e1 == e2: shell expansion over kk >= e1 of
    //   chi1^{-1}(p^{e1-kk}) chi2(p^{-kk}) q^{-e1} X^{2 kk} S_kk,
    //   S_kk = sum_{x unit mod p^{e1}} chi2(x) chi1^{-1}(p^{kk-e1} + x);
    // S_kk vanishes except at kk = 2 e1 - t (conductor exponent t of
    // chi1^{-1} chi2 on units), and is eventually constant when t = 0.
    let t_cond = chi1_inv.unit_char().mul(chi2.unit_char());
    let t = trailing_zeros_in(t_cond.conductor(), p);
    let pe = p.pow(e1);
    let s_at = |kk: i64| -> CycNum {
        let shift = Rat::from_int(p as i64).pow(kk - e1 as i64);
        let mut s = CycNum::zero();
        for x in 1..pe {
            if x % p == 0 {
                continue;
            }
            let arg = &shift + &Rat::from_int(x as i64);
            if arg.val_p(p).map_or(true, |v| v != 0) {
                continue;
            }
            let v = &chi2.eval_unit(x as i64) * &chi1_inv.eval_rational(&arg);
            s = &s + &v;
        }
        s
    };
    let prefix = |kk: i64| -> CycNum {
        (&chi1.unif_value.pow(-(e1 as i64 - kk)) * &chi2.unif_value.pow(-kk))
            .scale(&qpow(-(e1 as i64)))
    };
    let mut finite = LaurentSum::zero(p);
    let k_hi = 2 * e1 as i64 - 1;
    for kk in e1 as i64..=k_hi.max(e1 as i64) {
        finite.add_term(2 * kk, &prefix(kk) * &s_at(kk), false);
    }
    let (case, tail) = if t == 0 {
        let start = 2 * e1 as i64;
        let coeff = &prefix(start) * &s_at(start);
        let ratio = &chi1.unif_value * &chi2.unif_value.inv();
        debug_assert_eq!(s_at(start), s_at(start + 1));
        (
            IntertwiningCase::RamRamEqualUnramifiedTwist,
            Some(GeometricTail { start, coeff, ratio }),
        )
    } else if t == e1 {
        (IntertwiningCase::RamRamEqualPrimitive, None)
    } else {
        (IntertwiningCase::RamRamEqualMiddle, None)
    };
    IntertwiningConstant::finish(p, case, finite, tail, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_chars, CharConstraints};

    fn quadratic_local(p: u64) -> LocalChar {
        let chi = enumerate_chars(p, CharConstraints { primitive_only: true, ..Default::default() })
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap();
        LocalChar::new(p, chi, CycNum::one())
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi_p(&Rat::new(1, 3), 3), CycNum::root_of_unity(3, -1));
        assert_eq!(psi_p(&Rat::new(1, 2), 3), CycNum::one());
        assert_eq!(psi_p(&Rat::new(7, 9), 3), CycNum::root_of_unity(9, -7));
        assert_eq!(psi_p(&Rat::from_int(5), 3), CycNum::one());
    }

    #[test]
    fn gauss_sum_mod_3() {
        // tau = chi(1) z3^{-1} + chi(2) z3^{-2} = z3^2 - z3
        let theta = quadratic_local(3);
        let tau = gauss_sum(&theta).unwrap();
        let want = CycNum::root_of_unity(3, 2) - CycNum::root_of_unity(3, 1);
        assert_eq!(tau, want);
        assert_eq!(&tau * &tau, CycNum::from_int(-3));
        assert_eq!(tau.norm_to_conj(), CycNum::from_int(3));
    }

    #[test]
    fn gauss_sum_mod_5_squares_to_5() {
        let theta = quadratic_local(5);
        let tau = gauss_sum(&theta).unwrap();
        assert_eq!(&tau * &tau, CycNum::from_int(5));
        assert_eq!(tau.norm_to_conj(), CycNum::from_int(5));
    }

    #[test]
    fn gauss_norm_various() {
        for (m, base) in [(3u64, 3u64), (5, 5), (7, 7), (9, 3), (4, 2), (8, 2)] {
            for chi in
                enumerate_chars(m, CharConstraints { primitive_only: true, ..Default::default() })
            {
                let theta = LocalChar::new(base, chi, CycNum::one());
                let tau = gauss_sum(&theta).unwrap();
                assert_eq!(tau.norm_to_conj(), CycNum::from_int(m as i64), "modulus {m}");
            }
        }
    }

    #[test]
    fn jacobi_symmetry() {
        let p = 5;
        let prim =
            enumerate_chars(p, CharConstraints { primitive_only: true, ..Default::default() });
        for c1 in &prim {
            for c2 in &prim {
                let t1 = LocalChar::new(p, c1.clone(), CycNum::one());
                let t2 = LocalChar::new(p, c2.clone(), CycNum::root_of_unity(4, 1));
                for a in 0..5 {
                    let j12 = jacobi_sum(&t1, &t2, a, 1).unwrap();
                    let j21 = jacobi_sum(&t2, &t1, a, 1).unwrap();
                    assert_eq!(j12, j21);
                }
            }
        }
        // J_1 for the quadratic pair mod 3: single term x=2, chi(2)chi(-1)=1
        let t = quadratic_local(3);
        assert_eq!(jacobi_sum(&t, &t, 1, 1).unwrap(), CycNum::one());
    }

    #[test]
    fn oracle_basic_volumes() {
        let v = riemann_sum_oracle(&IntegrandSpec::UnitVolume { p: 5 }, 2).unwrap();
        assert_eq!(v, CycNum::from_rat(Rat::new(4, 5)));
        let v = riemann_sum_oracle(&IntegrandSpec::ShellAbsPower { p: 3, k: 2, s: 4 }, 2).unwrap();
        assert_eq!(v, CycNum::from_rat(Rat::new(2, 3) * Rat::from_int(3).pow(-10)));
        let g1 =
            riemann_sum_oracle(&IntegrandSpec::Gamma { p: 3, u: Rat::from_int(2) }, 3).unwrap();
        assert_eq!(g1, CycNum::one());
        let g2 =
            riemann_sum_oracle(&IntegrandSpec::Gamma { p: 3, u: Rat::new(1, 3) }, 3).unwrap();
        assert!(g2.is_zero());
    }

    #[test]
    fn oracle_theta_psi_matches_gauss_sum() {
        let theta = quadratic_local(5);
        let val = riemann_sum_oracle(
            &IntegrandSpec::ThetaPsiShell { theta: theta.clone(), m: -1 },
            3,
        )
        .unwrap();
        // |p^{-r}| theta(p^{-r-e}) tau(theta) with r = 0
        let tau = gauss_sum(&theta).unwrap();
        let want = &theta.unif_value().pow(-1) * &tau;
        assert_eq!(val, want);
        for m in [-3i64, -2, 0, 1] {
            let v = riemann_sum_oracle(
                &IntegrandSpec::ThetaPsiShell { theta: theta.clone(), m },
                4,
            )
            .unwrap();
            assert!(v.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn section_value_unramified() {
        let chi1 = LocalChar::unramified(5, CycNum::one());
        let chi2 = LocalChar::unramified(5, CycNum::from_int(-1));
        let g = [[Rat::one(), Rat::zero()], [Rat::from_int(3), Rat::one()]];
        let v = section_value(&chi1, &chi2, &g).unwrap();
        assert_eq!(v.coefficient(0).unwrap(), CycNum::one());
        // x = 1/5: chi1^{-1}chi2(x) |x|^{-(2s+1)} = -(1/5) X^2
        let g = [[Rat::one(), Rat::zero()], [Rat::new(1, 5), Rat::one()]];
        let v = section_value(&chi1, &chi2, &g).unwrap();
        assert_eq!(v.coefficient(2).unwrap(), CycNum::from_rat(Rat::new(-1, 5)));
    }

    #[test]
    fn section_value_ramified_cells() {
        let t = quadratic_local(3);
        let g = |x: Rat| [[Rat::one(), Rat::zero()], [x, Rat::one()]];
        // both ramified (e2 = 1): nonzero iff val(x) = 1, value chi1^{-1}(x)
        let v = section_value(&t, &t, &g(Rat::from_int(3))).unwrap();
        assert_eq!(v.coefficient(0).unwrap(), t.inv().eval_rational(&Rat::from_int(3)));
        assert!(section_value(&t, &t, &g(Rat::from_int(1))).unwrap().is_zero());
        assert!(section_value(&t, &t, &g(Rat::from_int(9))).unwrap().is_zero());
    }

    #[test]
    fn intertwining_case_unram_ram_matches_oracle() {
        let chi1 = LocalChar::unramified(3, CycNum::root_of_unity(4, 1));
        let chi2 = quadratic_local(3);
        let m = intertwining_constant(&chi1, &chi2, 0, 2).unwrap();
        assert_eq!(m.case, IntertwiningCase::UnramRamZero);
        // expected value: chi1^{-1}(3) chi2(-1) / 3 = (-i)(-1)/3 = i/3
        let want = CycNum::root_of_unity(4, 1).scale(&Rat::new(1, 3));
        assert_eq!(m.value, want);
        // oracle shells: the whole mass sits in shell 0 at X^0
        let mut total = LaurentSum::zero(3);
        for shell in 0..4u32 {
            total = total.add(&m_integral_shell(&chi1, &chi2, 0, shell, 4).unwrap());
        }
        assert_eq!(total.coefficient(0).unwrap(), want);
        assert_eq!(total.exponents(), vec![0]);
    }

    #[test]
    fn intertwining_vanishing_cases() {
        let chi_r = quadratic_local(3);
        let chi_u = LocalChar::unramified(3, CycNum::one());
        let m = intertwining_constant(&chi_r, &chi_u, 0, 2).unwrap();
        assert!(m.value.is_zero());
        for s in 0..4u32 {
            assert!(m_integral_shell(&chi_r, &chi_u, 0, s, 4).unwrap().is_zero());
        }
    }

    #[test]
    fn intertwining_equal_conductors_matches_oracle() {
        // chi1 = chi2 = quadratic mod 3: unramified twist branch (t = 0)
        let t = quadratic_local(3);
        let m = intertwining_constant(&t, &t, 1, 2).unwrap();
        assert_eq!(m.case, IntertwiningCase::RamRamEqualUnramifiedTwist);
        for shell in 0..5u32 {
            let o = m_integral_shell(&t, &t, 1, shell, 4).unwrap();
            let want = m.shell_coefficient(shell as i64).unwrap();
            assert_eq!(o.coefficient(2 * shell as i64).unwrap(), want, "shell {shell}");
        }
        // distinct quadratic-ish pair with t = e1: primitive branch
        let prim5: Vec<_> =
            enumerate_chars(5, CharConstraints { primitive_only: true, ..Default::default() });
        let a = LocalChar::new(5, prim5[0].clone(), CycNum::one());
        let quad5 = prim5.iter().find(|c| c.order() == 2).unwrap();
        let b = LocalChar::new(5, quad5.clone(), CycNum::one());
        if a.unit_char() != b.unit_char() {
            let m = intertwining_constant(&a, &b, 1, 3).unwrap();
            for shell in 0..5u32 {
                let o = m_integral_shell(&a, &b, 1, shell, 4).unwrap();
                let want = m.shell_coefficient(shell as i64).unwrap();
                assert_eq!(o.coefficient(2 * shell as i64).unwrap(), want, "shell {shell}");
            }
        }
    }

    #[test]
    fn epsilon_unramified_is_one() {
        let chi = LocalChar::unramified(7, CycNum::root_of_unity(6, 1));
        let (eps, val) = epsilon_factor(&chi, 4);
        assert_eq!(val, CycNum::one());
        assert_eq!(eps.symbolic(), LaurentMonomial::unit());
    }
}
