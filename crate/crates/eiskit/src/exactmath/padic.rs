//! Truncated p-adic arithmetic.
//!
//! [`PadicRing`] describes a finite coefficient ring `(Z/p^m)[x]/(h(x))`
//! where `h` is a Hensel-lifted irreducible factor of the `L`-th cyclotomic
//! polynomial mod `p` (`L` prime to `p`, with `p-1 | L`). For `L = 1` this
//! is plain `Z/p^m`. The ring carries a distinguished primitive `L`-th root
//! of unity chosen so that its `L/(p-1)` power is the honest Teichmüller
//! lift of the least primitive root mod `p`; root-of-unity values of
//! Dirichlet characters embed through it, and Teichmüller-character values
//! agree with the residue-lifting convention.
//!
//! [`PadicSeries`] is an element of `Ring[T]/(T^n)`, the working truncation
//! of a one-variable Iwasawa algebra. Units are exactly the series with
//! unit constant coefficient; evaluation is restricted to arguments
//! divisible by `p`, which makes every result exact mod `p^m` once the
//! truncation is at least `m`.

use super::cyc::{cyclotomic_poly, CycNum};
use super::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("argument must be divisible by {0}")]
    NotDivisible(u64),
    #[error("value is not a unit")]
    NotAUnit,
    #[error("denominator not coprime to p")]
    BadDenominator,
    #[error("root of unity of order {0} does not embed in this ring (L = {1})")]
    MissingRoot(u64, u64),
    #[error("exponent precision {have} insufficient, need at least {need} digits")]
    ExponentPrecision { have: u32, need: u32 },
    #[error("rings differ")]
    RingMismatch,
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, PadicError>;

/// Ring descriptor for `(Z/p^m)[x]/(h(x))`, `h | Phi_L`.
pub struct PadicRing {
    p: u64,
    m: u32,
    pm: u64,
    zeta_order: u64,
    /// Monic modulus `h` (coefficients mod p^m, length f+1); `None` when f = 1.
    modulus: Option<Vec<u64>>,
    f: usize,
    /// Distinguished primitive `L`-th root of unity (coefficient vector).
    zeta: Vec<u64>,
}

impl PartialEq for PadicRing {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.m == other.m
            && self.zeta_order == other.zeta_order
            && self.modulus == other.modulus
    }
}

impl fmt::Debug for PadicRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Z/{}^{}[zeta_{}] (residue degree {})",
            self.p, self.m, self.zeta_order, self.f
        )
    }
}

// ---- small F_p[x] helpers ----------------------------------------------

fn fp_poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
}

fn fp_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (_, r) = fp_poly_divmod(a, b, p);
    r
}

fn fp_poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let t = (ai as u128 * bj as u128 + out[i + j] as u128) % p as u128;
            out[i + j] = t as u64;
        }
    }
    fp_poly_trim(&mut out);
    out
}

fn fp_poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp_poly_trim(&mut x);
    fp_poly_trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = fp_poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn fp_poly_powmod(base: &[u64], mut e: BigInt, modp: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fp_poly_rem(base, modp, p);
    while e.is_positive() {
        if e.is_odd() {
            acc = fp_poly_rem(&fp_poly_mul(&acc, &b, p), modp, p);
        }
        b = fp_poly_rem(&fp_poly_mul(&b, &b, p), modp, p);
        e >>= 1;
    }
    acc
}

fn mod_inv_u64(a: u64, m: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(m));
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

fn mult_order_u64(a: u64, modulus: u64) -> u64 {
    let mut x = a % modulus;
    let mut k = 1;
    while x != 1 {
        x = (x as u128 * a as u128 % modulus as u128) as u64;
        k += 1;
        assert!(k <= modulus, "element not a unit");
    }
    k
}

fn least_primitive_root(p: u64) -> u64 {
    for g in 2..p {
        if mult_order_u64(g, p) == p - 1 {
            return g;
        }
    }
    unreachable!("no primitive root mod prime")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic search for a monic irreducible polynomial of degree `f`
/// over `F_p`.
fn irreducible_poly(p: u64, f: usize) -> Vec<u64> {
    if f == 1 {
        return vec![0, 1];
    }
    let mut counter = 0u64;
    loop {
        // candidate x^f + (base-p digits of counter)
        let mut cand = vec![0u64; f + 1];
        cand[f] = 1;
        let mut c = counter;
        for coef in cand.iter_mut().take(f) {
            *coef = c % p;
            c /= p;
        }
        counter += 1;
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
}

fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let f = poly.len() - 1;
    // x^{p^f} == x mod poly
    let xq = fp_poly_powmod(&[0, 1], BigInt::from(p).pow(f as u32), poly, p);
    let mut diff = xq.clone();
    diff.resize(diff.len().max(2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    fp_poly_trim(&mut diff);
    if !(diff.len() == 1 && diff[0] == 0) {
        return false;
    }
    // gcd(x^{p^{f/q}} - x, poly) constant for each prime q | f
    for q in prime_factors(f as u64) {
        let e = BigInt::from(p).pow((f as u64 / q) as u32);
        let xe = fp_poly_powmod(&[0, 1], e, poly, p);
        let mut d = xe;
        d.resize(d.len().max(2), 0);
        d[1] = (d[1] + p - 1) % p;
        fp_poly_trim(&mut d);
        let g = fp_poly_gcd(poly, &d, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

// ---- Hensel lifting of a factor of Phi_L --------------------------------

/// Find the minimal polynomial over `F_p` of an element of exact order `L`
/// in `F_{p^f}`, then Hensel-lift it to a monic factor of `Phi_L` mod `p^m`.
fn lift_cyclotomic_factor(p: u64, m: u32, big_l: u64, f: usize) -> Vec<u64> {
    // Build F_{p^f} = F_p[t]/(g0)
    let g0 = irreducible_poly(p, f);
    let q_minus_1 = BigInt::from(p).pow(f as u32) - 1;
    let cof: BigInt = &q_minus_1 / BigInt::from(big_l);
    // find an element whose (q-1)/L power has exact order L
    let mut zeta_ff: Option<Vec<u64>> = None;
    'outer: for trial in 1..10_000u64 {
        // candidate t + trial (and t itself for trial pattern)
        let cand = if f == 1 { vec![trial % p] } else { vec![trial % p, 1] };
        let z = fp_poly_powmod(&cand, cof.clone(), &g0, p);
        if z.len() == 1 && z[0] <= 1 {
            continue;
        }
        for qf in prime_factors(big_l) {
            let zq = fp_poly_powmod(&z, BigInt::from(big_l / qf), &g0, p);
            if zq.len() == 1 && zq[0] == 1 {
                continue 'outer;
            }
        }
        zeta_ff = Some(z);
        break;
    }
    let z = zeta_ff.expect("no element of requested order found");
    // minimal polynomial prod_{i<f} (y - z^{p^i}) computed in F_{p^f}[y]
    let mut minpoly: Vec<Vec<u64>> = vec![vec![1u64]]; // coefficients in F_{p^f}
    let mut conj = z.clone();
    for _ in 0..f {
        let mut next: Vec<Vec<u64>> = vec![vec![0u64]; minpoly.len() + 1];
        for (i, c) in minpoly.iter().enumerate() {
            // * y
            let t = c.clone();
            let mut cur = std::mem::take(&mut next[i + 1]);
            cur = fp_add_poly(&cur, &t, p);
            next[i + 1] = cur;
            // * (-conj)
            let prod = fp_poly_rem(&fp_poly_mul(c, &conj, p), &g0, p);
            let negged: Vec<u64> = prod.iter().map(|&x| (p - x % p) % p).collect();
            next[i] = fp_add_poly(&next[i], &negged, p);
        }
        minpoly = next;
        conj = fp_poly_powmod(&conj, BigInt::from(p), &g0, p);
    }
    // coefficients must be constants of F_{p^f}
    let mut h0: Vec<u64> = minpoly
        .iter()
        .map(|c| {
            let mut cc = c.clone();
            fp_poly_trim(&mut cc);
            assert!(cc.len() == 1, "minimal polynomial coefficient not in F_p");
            cc[0]
        })
        .collect();
    fp_poly_trim(&mut h0);
    assert_eq!(h0.len(), f + 1);

    // Hensel-lift h0 against Phi_L from mod p to mod p^m.
    let phi: Vec<BigInt> = cyclotomic_poly(big_l).iter().map(|&c| BigInt::from(c)).collect();
    let h0_fp: Vec<u64> = h0.clone();
    let phi_fp: Vec<u64> = phi
        .iter()
        .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
        .collect();
    let q0 = fp_poly_div_exact(&phi_fp, &h0_fp, p);
    // Bezout: a*h0 + b*q0 = 1 over F_p
    let (g, a_bez, b_bez) = fp_poly_ext_gcd(&h0_fp, &q0, p);
    assert!(g.len() == 1 && g[0] != 0, "factor not coprime to cofactor");
    let ginv = mod_inv_u64(g[0], p);
    let a_bez: Vec<u64> = a_bez.iter().map(|&c| (c as u128 * ginv as u128 % p as u128) as u64).collect();
    let b_bez: Vec<u64> = b_bez.iter().map(|&c| (c as u128 * ginv as u128 % p as u128) as u64).collect();

    let mut h: Vec<BigInt> = h0.iter().map(|&c| BigInt::from(c)).collect();
    let mut qq: Vec<BigInt> = q0.iter().map(|&c| BigInt::from(c)).collect();
    for k in 1..m {
        let pk = BigInt::from(p).pow(k);
        let pk1 = &pk * BigInt::from(p);
        // e = (Phi - h*q)/p^k mod p
        let prod = bigpoly_mul(&h, &qq);
        let mut e_fp: Vec<u64> = Vec::new();
        for i in 0..phi.len().max(prod.len()) {
            let a = phi.get(i).cloned().unwrap_or_else(BigInt::zero);
            let b = prod.get(i).cloned().unwrap_or_else(BigInt::zero);
            let diff = (a - b).mod_floor(&pk1);
            let (quo, rem) = diff.div_mod_floor(&pk);
            assert!(rem.is_zero(), "hensel defect not divisible");
            e_fp.push(quo.mod_floor(&BigInt::from(p)).to_u64().unwrap());
        }
        fp_poly_trim(&mut e_fp);
        // u = b*e mod h0 ; v = a*e + (b*e div h0) * q0
        let be = fp_poly_mul(&b_bez, &e_fp, p);
        let (be_div, u) = fp_poly_divmod(&be, &h0_fp, p);
        let ae = fp_poly_mul(&a_bez, &e_fp, p);
        let v = fp_add_poly(&ae, &fp_poly_mul(&be_div, &q0, p), p);
        for (i, &ui) in u.iter().enumerate() {
            if ui != 0 {
                h[i] += &pk * BigInt::from(ui);
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0 {
                if i >= qq.len() {
                    qq.resize(i + 1, BigInt::zero());
                }
                qq[i] += &pk * BigInt::from(vi);
            }
        }
    }
    let pm = BigInt::from(p).pow(m);
    h.iter().map(|c| c.mod_floor(&pm).to_u64().unwrap()).collect()
}

fn fp_add_poly(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + y) % p;
    }
    out
}

fn fp_poly_divmod(num: &[u64], den: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r: Vec<u64> = num.iter().map(|&c| c % p).collect();
    fp_poly_trim(&mut r);
    let mut d = den.to_vec();
    fp_poly_trim(&mut d);
    let dd = d.len() - 1;
    assert!(!(dd == 0 && d[0] == 0), "division by zero polynomial");
    let lead_inv = mod_inv_u64(d[dd], p);
    if r.len() - 1 < dd || (r.len() == 1 && r[0] == 0) {
        return (vec![0], r);
    }
    let mut q = vec![0u64; r.len() - dd];
    for da in (dd..r.len()).rev() {
        let c = (r[da] as u128 * lead_inv as u128 % p as u128) as u64;
        q[da - dd] = c;
        if c != 0 {
            for j in 0..=dd {
                let sub = (c as u128 * d[j] as u128 % p as u128) as u64;
                r[da - dd + j] = (r[da - dd + j] + p - sub) % p;
            }
        }
    }
    r.truncate(dd.max(1));
    fp_poly_trim(&mut r);
    fp_poly_trim(&mut q);
    (q, r)
}

fn fp_poly_div_exact(num: &[u64], den: &[u64], p: u64) -> Vec<u64> {
    let (q, r) = fp_poly_divmod(num, den, p);
    assert!(r.len() == 1 && r[0] == 0, "non-exact division");
    q
}

fn fp_poly_ext_gcd(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut s0 = vec![1u64];
    let mut s1 = vec![0u64];
    let mut t0 = vec![0u64];
    let mut t1 = vec![1u64];
    fp_poly_trim(&mut r0);
    fp_poly_trim(&mut r1);
    while !(r1.len() == 1 && r1[0] == 0) {
        let (q, r) = fp_poly_divmod(&r0, &r1, p);
        let qs = fp_poly_mul(&q, &s1, p);
        let qt = fp_poly_mul(&q, &t1, p);
        let ns = fp_sub_poly(&s0, &qs, p);
        let nt = fp_sub_poly(&t0, &qt, p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
        t0 = t1;
        t1 = nt;
    }
    (r0, s0, t0)
}

fn fp_sub_poly(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    let mut v = out;
    fp_poly_trim(&mut v);
    v
}

fn bigpoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

impl PadicRing {
    /// Plain `Z/p^m`.
    pub fn plain(p: u64, m: u32) -> Arc<PadicRing> {
        PadicRing::with_roots(p, m, 1)
    }

    /// `(Z/p^m)` extended by a primitive `L`-th root of unity, where the
    /// stored `L` is `lcm(orders..., p-1)` with any `p`-part removed.
    pub fn for_orders(p: u64, m: u32, orders: &[u64]) -> Arc<PadicRing> {
        let mut l: u64 = p - 1;
        for &o in orders {
            let mut o = o;
            while o % p == 0 {
                o /= p;
            }
            l = l.lcm(&o);
        }
        PadicRing::with_roots(p, m, l)
    }

    /// Explicit construction; `l` must be prime to `p` and a multiple of
    /// `p-1` (use 1 only together with `p = 2`-free callers that need no
    /// roots at all).
    pub fn with_roots(p: u64, m: u32, l: u64) -> Arc<PadicRing> {
        assert!(p >= 2 && m >= 1);
        assert!(l >= 1 && l % p != 0);
        let pm_big = BigInt::from(p).pow(m);
        let pm = pm_big.to_u64().expect("p^m must fit in u64");
        assert!(pm.leading_zeros() >= 1, "p^m too large");
        if l == 1 {
            let ring = PadicRing { p, m, pm, zeta_order: 1, modulus: None, f: 1, zeta: vec![1 % pm] };
            return Arc::new(ring);
        }
        assert!(l % (p - 1) == 0, "root order must be a multiple of p-1");
        let f = mult_order_u64(p % l, l) as usize;
        let (modulus, f) = if f == 1 {
            (None, 1)
        } else {
            (Some(lift_cyclotomic_factor(p, m, l, f)), f)
        };
        let mut ring = PadicRing { p, m, pm, zeta_order: l, modulus, f, zeta: vec![1] };
        // primitive L-th root: x itself when f > 1, else an element of Z/p^m
        let x_root = if f > 1 {
            let mut v = vec![0u64; f];
            v[1] = 1;
            PadicInt { ring: Arc::new(ring_clone(&ring)), c: v }
        } else {
            // L | p-1: the Teichmüller lift of an order-L element of F_p^*
            let g = least_primitive_root(p);
            let base = PadicInt {
                ring: Arc::new(ring_clone(&ring)),
                c: vec![g % pm],
            };
            let t = base.teichmuller();
            t.pow_u64((p - 1) / l)
        };
        // calibrate: find zeta = x_root^e with zeta^{L/(p-1)} = teich(g)
        let g = least_primitive_root(p);
        let tg = PadicInt { ring: x_root.ring.clone(), c: embed_scalar(&ring_clone(&ring), g) }.teichmuller();
        let mut zeta = None;
        for e in 1..l {
            if e.gcd(&l) != 1 {
                continue;
            }
            let cand = x_root.pow_u64(e);
            if cand.pow_u64(l / (p - 1)) == tg {
                zeta = Some(cand);
                break;
            }
        }
        let zeta = zeta.expect("no compatible root-of-unity generator");
        ring.zeta = zeta.c;
        Arc::new(ring)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn pm(&self) -> u64 {
        self.pm
    }

    pub fn zeta_order(&self) -> u64 {
        self.zeta_order
    }

    pub fn residue_degree(&self) -> usize {
        self.f
    }
}

fn ring_clone(r: &PadicRing) -> PadicRing {
    PadicRing {
        p: r.p,
        m: r.m,
        pm: r.pm,
        zeta_order: r.zeta_order,
        modulus: r.modulus.clone(),
        f: r.f,
        zeta: r.zeta.clone(),
    }
}

fn embed_scalar(r: &PadicRing, v: u64) -> Vec<u64> {
    let mut c = vec![0u64; r.f];
    c[0] = v % r.pm;
    c
}

/// Element of a [`PadicRing`].
#[derive(Clone)]
pub struct PadicInt {
    ring: Arc<PadicRing>,
    c: Vec<u64>,
}

impl PartialEq for PadicInt {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.c == other.c
    }
}

impl Eq for PadicInt {}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ring.f == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?}", self.c)
        }
    }
}

impl PadicInt {
    pub fn ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    pub fn zero(ring: &Arc<PadicRing>) -> Self {
        PadicInt { ring: ring.clone(), c: vec![0; ring.f] }
    }

    pub fn one(ring: &Arc<PadicRing>) -> Self {
        let mut c = vec![0; ring.f];
        c[0] = 1 % ring.pm;
        PadicInt { ring: ring.clone(), c }
    }

    pub fn from_u64(ring: &Arc<PadicRing>, v: u64) -> Self {
        let mut c = vec![0; ring.f];
        c[0] = v % ring.pm;
        PadicInt { ring: ring.clone(), c }
    }

    pub fn from_bigint(ring: &Arc<PadicRing>, v: &BigInt) -> Self {
        let r = v.mod_floor(&BigInt::from(ring.pm)).to_u64().unwrap();
        PadicInt::from_u64(ring, r)
    }

    pub fn from_rat(ring: &Arc<PadicRing>, v: &Rat) -> Result<Self> {
        let r = v
            .mod_int(&BigInt::from(ring.pm))
            .ok_or(PadicError::BadDenominator)?;
        Ok(PadicInt::from_u64(ring, r.to_u64().unwrap()))
    }

    /// The ring's distinguished primitive `L`-th root of unity.
    pub fn zeta(ring: &Arc<PadicRing>) -> Self {
        PadicInt { ring: ring.clone(), c: ring.zeta.clone() }
    }

    /// Embed an exact cyclotomic number whose order divides `L` (or which
    /// is plainly rational) with `p`-integral coefficients.
    ///
    /// Power-basis coordinates may carry denominators divisible by `p`
    /// even when the embedded value is integral at the place the ring
    /// selects; such values are handled by clearing denominators, lifting
    /// to a scratch ring of higher precision (the tower of rings with one
    /// `L` is compatible), and dividing back down. A value genuinely
    /// non-integral at the selected place is rejected.
    pub fn embed_cyc(ring: &Arc<PadicRing>, z: &CycNum) -> Result<Self> {
        if let Some(r) = z.as_rat() {
            return PadicInt::from_rat(ring, &r);
        }
        let n = z.order();
        if ring.zeta_order % n != 0 {
            return Err(PadicError::MissingRoot(n, ring.zeta_order));
        }
        let can = z.canonical_coeffs();
        let p = ring.p;
        let denom_val: u32 = can
            .iter()
            .filter_map(|c| c.val_p(p))
            .map(|v| (-v).max(0) as u32)
            .max()
            .unwrap_or(0);
        if denom_val == 0 {
            return Self::embed_cyc_integral(ring, &can, n);
        }
        // scale by p^t, embed at precision m + t, require valuation >= t
        let t = denom_val;
        let scratch = PadicRing::with_roots(p, ring.m + t, ring.zeta_order);
        let scale = Rat::from_int(p as i64).pow(t as i64);
        let scaled: Vec<Rat> = can.iter().map(|c| c * &scale).collect();
        let up = Self::embed_cyc_integral(&scratch, &scaled, n)?;
        if up.val() < t {
            return Err(PadicError::BadDenominator);
        }
        // divide the coefficient vector by p^t and reduce to the base ring
        let pt = BigInt::from(p).pow(t);
        let pm = BigInt::from(ring.pm);
        let c = up
            .c
            .iter()
            .map(|&x| {
                let q = BigInt::from(x) / &pt;
                q.mod_floor(&pm).to_u64().unwrap()
            })
            .collect();
        Ok(PadicInt { ring: ring.clone(), c })
    }

    fn embed_cyc_integral(ring: &Arc<PadicRing>, can: &[Rat], order: u64) -> Result<Self> {
        let step = ring.zeta_order / order;
        let zeta = PadicInt::zeta(ring);
        let mut acc = PadicInt::zero(ring);
        for (j, cj) in can.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let s = PadicInt::from_rat(ring, cj)?;
            acc = &acc + &(&s * &zeta.pow_u64(step * j as u64));
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.c.iter().any(|&x| x % self.ring.p != 0)
    }

    /// p-adic valuation, capped at the precision `m`.
    pub fn val(&self) -> u32 {
        let p = self.ring.p;
        let mut v = self.ring.m;
        for &x in &self.c {
            if x == 0 {
                continue;
            }
            let mut k = 0u32;
            let mut y = x;
            while y % p == 0 {
                y /= p;
                k += 1;
            }
            v = v.min(k);
        }
        v
    }

    pub fn pow_u64(&self, mut e: u64) -> Self {
        let mut acc = PadicInt::one(&self.ring);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    pub fn pow_bigint(&self, e: &BigInt) -> Self {
        assert!(!e.is_negative());
        let mut acc = PadicInt::one(&self.ring);
        let mut b = self.clone();
        let mut e = e.clone();
        while e.is_positive() {
            if e.is_odd() {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    /// Teichmüller lift: the unique root of unity of prime-to-p order
    /// congruent to this unit mod p. Computed as the `q^{m-1}` power with
    /// `q = p^f`.
    pub fn teichmuller(&self) -> Self {
        let q = BigInt::from(self.ring.p).pow(self.ring.f as u32);
        let e = q.pow(self.ring.m - 1);
        self.pow_bigint(&e)
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(PadicError::NotAUnit);
        }
        let p = self.ring.p;
        // inverse in the residue field, then Newton lift
        let inv0 = match &self.ring.modulus {
            None => vec![mod_inv_u64(self.c[0] % p, p)],
            Some(h) => {
                let hp: Vec<u64> = h.iter().map(|&c| c % p).collect();
                let ap: Vec<u64> = self.c.iter().map(|&c| c % p).collect();
                let (g, _, t) = fp_poly_ext_gcd(&hp, &ap, p);
                assert!(g.len() == 1 && g[0] != 0);
                let gi = mod_inv_u64(g[0], p);
                t.iter().map(|&c| (c as u128 * gi as u128 % p as u128) as u64).collect()
            }
        };
        let mut x = PadicInt { ring: self.ring.clone(), c: { let mut v = inv0; v.resize(self.ring.f, 0); v } };
        // Newton: x <- x(2 - a x); doubles correct digits each pass
        let passes = 32 - (self.ring.m as u32).leading_zeros() + 1;
        for _ in 0..passes {
            let two = PadicInt::from_u64(&self.ring, 2);
            let t = &two - &(self * &x);
            x = &x * &t;
        }
        debug_assert!((self * &x) == PadicInt::one(&self.ring));
        Ok(x)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    /// Interpret as a plain residue when the ring is unextended.
    pub fn as_u64(&self) -> Option<u64> {
        if self.ring.f == 1 || self.c.iter().skip(1).all(|&x| x == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }
}

impl std::ops::Add for &PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: &PadicInt) -> PadicInt {
        assert!(*self.ring == *rhs.ring, "ring mismatch");
        let pm = self.ring.pm;
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(&a, &b)| ((a as u128 + b as u128) % pm as u128) as u64)
            .collect();
        PadicInt { ring: self.ring.clone(), c }
    }
}

impl std::ops::Sub for &PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: &PadicInt) -> PadicInt {
        assert!(*self.ring == *rhs.ring, "ring mismatch");
        let pm = self.ring.pm;
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(&a, &b)| ((a as u128 + pm as u128 - b as u128) % pm as u128) as u64)
            .collect();
        PadicInt { ring: self.ring.clone(), c }
    }
}

impl std::ops::Neg for &PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        &PadicInt::zero(&self.ring) - self
    }
}

impl std::ops::Mul for &PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: &PadicInt) -> PadicInt {
        assert!(*self.ring == *rhs.ring, "ring mismatch");
        let pm = self.ring.pm as u128;
        let f = self.ring.f;
        if f == 1 {
            let v = (self.c[0] as u128 * rhs.c[0] as u128 % pm) as u64;
            return PadicInt { ring: self.ring.clone(), c: vec![v] };
        }
        let mut wide = vec![0u128; 2 * f - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.c.iter().enumerate() {
                wide[i + j] = (wide[i + j] + a as u128 * b as u128) % pm;
            }
        }
        // reduce by the monic modulus
        let h = self.ring.modulus.as_ref().unwrap();
        for i in (f..wide.len()).rev() {
            let c = wide[i];
            if c == 0 {
                continue;
            }
            wide[i] = 0;
            for (j, &hj) in h.iter().enumerate().take(f) {
                let sub = c * (hj as u128) % pm;
                wide[i - f + j] = (wide[i - f + j] + pm - sub) % pm;
            }
        }
        let c = wide[..f].iter().map(|&x| x as u64).collect();
        PadicInt { ring: self.ring.clone(), c }
    }
}

/// Element of `Ring[T]/(T^n)`.
#[derive(Clone, PartialEq)]
pub struct PadicSeries {
    ring: Arc<PadicRing>,
    trunc: usize,
    coeffs: Vec<PadicInt>,
}

impl fmt::Debug for PadicSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", c)?;
        }
        write!(f, "] + O(T^{})", self.trunc)
    }
}

impl PadicSeries {
    pub fn zero(ring: &Arc<PadicRing>, trunc: usize) -> Self {
        assert!(trunc >= 1);
        PadicSeries {
            ring: ring.clone(),
            trunc,
            coeffs: vec![PadicInt::zero(ring); trunc],
        }
    }

    pub fn constant(ring: &Arc<PadicRing>, c: PadicInt, trunc: usize) -> Self {
        let mut s = PadicSeries::zero(ring, trunc);
        s.coeffs[0] = c;
        s
    }

    pub fn one(ring: &Arc<PadicRing>, trunc: usize) -> Self {
        PadicSeries::constant(ring, PadicInt::one(ring), trunc)
    }

    /// The variable `T`.
    pub fn var(ring: &Arc<PadicRing>, trunc: usize) -> Self {
        let mut s = PadicSeries::zero(ring, trunc);
        if trunc > 1 {
            s.coeffs[1] = PadicInt::one(ring);
        }
        s
    }

    pub fn from_coeffs(ring: &Arc<PadicRing>, coeffs: Vec<PadicInt>, trunc: usize) -> Self {
        let mut c = coeffs;
        c.resize(trunc, PadicInt::zero(ring));
        c.truncate(trunc);
        PadicSeries { ring: ring.clone(), trunc, coeffs: c }
    }

    pub fn ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, i: usize) -> &PadicInt {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs[0].is_unit()
    }

    pub fn scale(&self, s: &PadicInt) -> Self {
        PadicSeries {
            ring: self.ring.clone(),
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Evaluate at `t0` with `p | t0`; exact mod `p^m` once the truncation
    /// reaches the precision, since `t0^i = 0 mod p^m` for `i >= m`.
    pub fn eval(&self, t0: &PadicInt) -> Result<PadicInt> {
        if t0.val() < 1 {
            return Err(PadicError::NotDivisible(self.ring.p));
        }
        let mut acc = PadicInt::zero(&self.ring);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t0) + c;
        }
        Ok(acc)
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(PadicError::NotAUnit);
        }
        let c0inv = self.coeffs[0].inv()?;
        let mut out = vec![PadicInt::zero(&self.ring); self.trunc];
        out[0] = c0inv.clone();
        for i in 1..self.trunc {
            let mut s = PadicInt::zero(&self.ring);
            for j in 1..=i {
                s = &s + &(&self.coeffs[j] * &out[i - j]);
            }
            out[i] = &(-&s) * &c0inv;
        }
        Ok(PadicSeries { ring: self.ring.clone(), trunc: self.trunc, coeffs: out })
    }

    /// Compose with another series having `p`-divisible constant term.
    ///
    /// The result is exact mod `(p^m, T^n)` up to the usual truncation
    /// caveat: dropped tail terms of `self` contribute only valuations
    /// at least the truncation order.
    pub fn substitute(&self, inner: &PadicSeries) -> Result<Self> {
        if inner.coeffs[0].val() < 1 {
            return Err(PadicError::NotDivisible(self.ring.p));
        }
        let mut acc = PadicSeries::zero(&self.ring, self.trunc);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &PadicSeries::constant(&self.ring, c.clone(), self.trunc);
        }
        Ok(acc)
    }
}

impl std::ops::Add for &PadicSeries {
    type Output = PadicSeries;
    fn add(self, rhs: &PadicSeries) -> PadicSeries {
        assert!(*self.ring == *rhs.ring);
        let trunc = self.trunc.min(rhs.trunc);
        let coeffs = (0..trunc).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect();
        PadicSeries { ring: self.ring.clone(), trunc, coeffs }
    }
}

impl std::ops::Sub for &PadicSeries {
    type Output = PadicSeries;
    fn sub(self, rhs: &PadicSeries) -> PadicSeries {
        assert!(*self.ring == *rhs.ring);
        let trunc = self.trunc.min(rhs.trunc);
        let coeffs = (0..trunc).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect();
        PadicSeries { ring: self.ring.clone(), trunc, coeffs }
    }
}

impl std::ops::Mul for &PadicSeries {
    type Output = PadicSeries;
    fn mul(self, rhs: &PadicSeries) -> PadicSeries {
        assert!(*self.ring == *rhs.ring);
        let trunc = self.trunc.min(rhs.trunc);
        let mut coeffs = vec![PadicInt::zero(&self.ring); trunc];
        for i in 0..trunc.min(self.coeffs.len()) {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..(trunc - i).min(rhs.coeffs.len()) {
                let t = &self.coeffs[i] * &rhs.coeffs[j];
                coeffs[i + j] = &coeffs[i + j] + &t;
            }
        }
        PadicSeries { ring: self.ring.clone(), trunc, coeffs }
    }
}

/// `(1+T)^s` for a p-adic exponent `s` given modulo `p^{s_prec}`:
/// `sum_{i<n} C(s, i) T^i` with interpolated binomial coefficients, exact
/// mod `p^m`. Fails when `s_prec` cannot support the requested precision.
pub fn binomial_power(
    s: &BigInt,
    s_prec: u32,
    ring: &Arc<PadicRing>,
    trunc: usize,
) -> Result<PadicSeries> {
    let p = ring.p();
    let m = ring.precision();
    // v_p((trunc-1)!) bound
    let mut vfact: u32 = 0;
    {
        let mut q = p;
        let nm1 = (trunc as u64).saturating_sub(1);
        while q <= nm1 {
            vfact += (nm1 / q) as u32;
            match q.checked_mul(p) {
                Some(nq) => q = nq,
                None => break,
            }
        }
    }
    let need = m + vfact;
    if s_prec < need {
        return Err(PadicError::ExponentPrecision { have: s_prec, need });
    }
    let big_mod = BigInt::from(p).pow(need);
    let s_red = s.mod_floor(&big_mod);
    let mut coeffs = Vec::with_capacity(trunc);
    coeffs.push(PadicInt::one(ring));
    let mut num = BigInt::one(); // prod_{j<i} (s - j) mod p^need
    let mut fact_val: u32 = 0;
    let mut fact_unit = BigInt::one(); // unit part of i! mod p^need
    for i in 1..trunc {
        num = (&num * (&s_red - BigInt::from(i as i64 - 1))).mod_floor(&big_mod);
        let mut ii = BigInt::from(i as u64);
        while (&ii % p).is_zero() {
            ii /= p;
            fact_val += 1;
        }
        fact_unit = (&fact_unit * ii).mod_floor(&big_mod);
        // C(s,i) = num / (p^fact_val * fact_unit)
        let pv = BigInt::from(p).pow(fact_val);
        let (quo, rem) = num.div_mod_floor(&pv);
        if !rem.is_zero() {
            return Err(PadicError::Other(format!(
                "binomial coefficient at index {i} not p-integral at this precision"
            )));
        }
        let inv = fact_unit.extended_gcd(&big_mod).x.mod_floor(&big_mod);
        let c = (quo * inv).mod_floor(&big_mod);
        coeffs.push(PadicInt::from_bigint(ring, &c));
    }
    Ok(PadicSeries::from_coeffs(ring, coeffs, trunc))
}

/// Solve `(1+p)^s = <a> mod p^{prec}` for the weight exponent `s`, where
/// `<a> = a / teich(a)` is the 1-unit part of `a`. Errors when `p | a`.
pub fn weight_exponent(a: &BigInt, p: u64, prec: u32) -> Result<BigInt> {
    let pm = BigInt::from(p).pow(prec);
    let a_red = a.mod_floor(&pm);
    if (&a_red % p).is_zero() {
        return Err(PadicError::NotDivisible(p));
    }
    // teichmuller: a^(p^{prec-1})
    let teich = a_red.modpow(&BigInt::from(p).pow(prec - 1), &pm);
    let tinv = teich.extended_gcd(&pm).x.mod_floor(&pm);
    let target = (&a_red * tinv).mod_floor(&pm);
    let u = BigInt::from(p + 1);
    // digit-by-digit discrete log in 1 + pZ/p^prec
    let mut s = BigInt::zero();
    let mut acc_inv_exp = BigInt::zero(); // running exponent
    for j in 0..(prec - 1) {
        let pj2 = BigInt::from(p).pow(j + 2);
        let uexp = u.modpow(&acc_inv_exp, &pj2);
        let uinv = uexp.extended_gcd(&pj2).x.mod_floor(&pj2);
        let r = (target.mod_floor(&pj2) * uinv).mod_floor(&pj2);
        // r = 1 + c p^{j+1}
        let c = ((r - BigInt::one()) / BigInt::from(p).pow(j + 1)).mod_floor(&BigInt::from(p));
        // u^{p^j} = 1 + lambda p^{j+1} mod p^{j+2}
        let upj = u.modpow(&BigInt::from(p).pow(j), &pj2);
        let lam = ((upj - BigInt::one()) / BigInt::from(p).pow(j + 1)).mod_floor(&BigInt::from(p));
        let lam_inv = lam.extended_gcd(&BigInt::from(p)).x.mod_floor(&BigInt::from(p));
        let d = (c * lam_inv).mod_floor(&BigInt::from(p));
        s += &d * BigInt::from(p).pow(j);
        acc_inv_exp = s.clone();
    }
    debug_assert_eq!(u.modpow(&s, &pm), target);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_ring_ops() {
        let r = PadicRing::plain(5, 3);
        let a = PadicInt::from_u64(&r, 42);
        let b = PadicInt::from_u64(&r, 100);
        assert_eq!((&a * &b).as_u64(), Some(4200 % 125));
        assert_eq!((&a + &b).as_u64(), Some(17));
        let inv = a.inv().unwrap();
        assert_eq!((&a * &inv).as_u64(), Some(1));
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        let r = PadicRing::plain(5, 4);
        for a in [2u64, 3, 4, 7, 123] {
            let t = PadicInt::from_u64(&r, a).teichmuller();
            assert_eq!(t.pow_u64(4), PadicInt::one(&r));
            assert_eq!(t.as_u64().unwrap() % 5, a % 5);
        }
    }

    #[test]
    fn extension_ring_zeta6_mod5() {
        // order 12 = lcm(6, 4): 5 has order 2 mod 12 -> quadratic extension
        let r = PadicRing::for_orders(5, 4, &[6]);
        assert_eq!(r.zeta_order(), 12);
        assert_eq!(r.residue_degree(), 2);
        let z = PadicInt::zeta(&r);
        assert_eq!(z.pow_u64(12), PadicInt::one(&r));
        assert!(z.pow_u64(6) != PadicInt::one(&r));
        assert!(z.pow_u64(4) != PadicInt::one(&r));
        // zeta^{12/4} must be the Teichmüller lift of the primitive root 2
        let t2 = PadicInt::from_u64(&r, 2).teichmuller();
        assert_eq!(z.pow_u64(3), t2);
        // arithmetic sanity: (zeta^2 + 1) * its inverse = 1
        let x = &z.pow_u64(2) + &PadicInt::one(&r);
        assert!(x.is_unit());
        assert_eq!(&x * &x.inv().unwrap(), PadicInt::one(&r));
    }

    #[test]
    fn embed_cyclotomic() {
        let r = PadicRing::for_orders(7, 3, &[4]);
        // zeta_4 embeds; zeta_4^2 = -1
        let i = CycNum::root_of_unity(4, 1);
        let e = PadicInt::embed_cyc(&r, &i).unwrap();
        assert_eq!(&e * &e, -&PadicInt::one(&r));
        // a rational with denominator prime to 7
        let x = CycNum::from_rat(Rat::new(1, 3));
        let ex = PadicInt::embed_cyc(&r, &x).unwrap();
        assert_eq!(&(&ex + &ex) + &ex, PadicInt::one(&r));
    }

    #[test]
    fn series_eval_and_inverse() {
        let r = PadicRing::plain(5, 4);
        // f = sum T^i, truncation 4: at T=5: 1 + 5 + 25 + 125 mod 625 = 156
        let f = PadicSeries::from_coeffs(&r, vec![PadicInt::one(&r); 4], 4);
        let v = f.eval(&PadicInt::from_u64(&r, 5)).unwrap();
        assert_eq!(v.as_u64(), Some(156));
        // (1+T)^2 at 5 = 36
        let one_plus_t = &PadicSeries::one(&r, 4) + &PadicSeries::var(&r, 4);
        let sq = &one_plus_t * &one_plus_t;
        assert_eq!(sq.eval(&PadicInt::from_u64(&r, 5)).unwrap().as_u64(), Some(36));
        // inverse of 1 - T is sum T^i
        let one_minus_t = &PadicSeries::one(&r, 4) - &PadicSeries::var(&r, 4);
        assert_eq!(one_minus_t.inv().unwrap(), f);
        // rejects non-divisible argument
        assert!(f.eval(&PadicInt::from_u64(&r, 2)).is_err());
    }

    #[test]
    fn binomial_power_integer_exponent() {
        let r = PadicRing::plain(5, 4);
        let s = binomial_power(&BigInt::from(3), 12, &r, 6).unwrap();
        let want: Vec<u64> = vec![1, 3, 3, 1, 0, 0];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(s.coeff(i).as_u64(), Some(*w));
        }
        assert!(binomial_power(&BigInt::from(3), 2, &r, 30).is_err());
    }

    #[test]
    fn binomial_power_additivity() {
        let r = PadicRing::plain(5, 3);
        let s1 = BigInt::from(7_220_031u64);
        let s2 = BigInt::from(91u64);
        let a = binomial_power(&s1, 12, &r, 6).unwrap();
        let b = binomial_power(&s2, 12, &r, 6).unwrap();
        let ab = binomial_power(&(&s1 + &s2), 12, &r, 6).unwrap();
        assert_eq!(&a * &b, ab);
    }

    #[test]
    fn weight_exponent_roundtrip() {
        let p = 5u64;
        let prec = 6u32;
        let pm = BigInt::from(p).pow(prec);
        for a in [2i64, 3, 7, 11, 101] {
            let s = weight_exponent(&BigInt::from(a), p, prec).unwrap();
            let u = BigInt::from(p + 1);
            let teich = BigInt::from(a).modpow(&BigInt::from(p).pow(prec - 1), &pm);
            let lhs = (u.modpow(&s, &pm) * teich).mod_floor(&pm);
            assert_eq!(lhs, BigInt::from(a).mod_floor(&pm));
        }
        assert!(weight_exponent(&BigInt::from(10), 5, 4).is_err());
    }

    #[test]
    fn binomial_power_matches_weight_exponent() {
        // (1+T)^{s(7)} at T = u^{k-2}-1 equals <7>^{k-2} mod p^m
        let p = 5u64;
        let m = 4u32;
        let r = PadicRing::plain(p, m);
        let prec = 12u32;
        let s7 = weight_exponent(&BigInt::from(7), p, prec).unwrap();
        let pm = BigInt::from(p).pow(m);
        let bp = binomial_power(&s7, prec, &r, 8).unwrap();
        for k in 2u32..=6 {
            let u = BigInt::from(p + 1);
            let t0 = (u.modpow(&BigInt::from(k - 2), &pm) - BigInt::one()).mod_floor(&pm);
            let got = bp.eval(&PadicInt::from_bigint(&r, &t0)).unwrap();
            // <7>^{k-2} = (7/omega(7))^{k-2}
            let teich7 = BigInt::from(7).modpow(&BigInt::from(p).pow(prec - 1), &BigInt::from(p).pow(prec));
            let t7 = teich7.mod_floor(&pm);
            let t7inv = t7.extended_gcd(&pm).x.mod_floor(&pm);
            let unit_part = (BigInt::from(7) * t7inv).mod_floor(&pm);
            let want = unit_part.modpow(&BigInt::from(k - 2), &pm);
            assert_eq!(got.as_u64().unwrap(), want.to_u64().unwrap());
        }
    }
}
