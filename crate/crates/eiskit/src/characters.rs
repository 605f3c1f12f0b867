//! Dirichlet characters with exact cyclotomic values.
//!
//! A [`DirChar`] is stored through its images on canonical generators of
//! `(Z/M)^x` (one generator per odd prime power, the pair `{-1, 5}` for
//! `2^e` with `e >= 3`), together with a full exponent table for fast
//! evaluation. Values are roots of unity in `Q(zeta_D)` where `D` is the
//! order of the character; evaluation extends by zero to arguments sharing
//! a factor with the modulus.

use crate::exactmath::cyc::CycNum;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Canonical generators of `(Z/M)^x` with their orders.
///
/// For each odd `p^e || M` the least primitive root mod `p^e`; for the
/// 2-part: none for 2, the class of 3 for 4, and `{-1, 5}` for `2^e`,
/// `e >= 3`. Each generator is lifted through the CRT to be 1 in the other
/// components.
pub fn unit_group_generators(modulus: u64) -> Vec<(u64, u64)> {
    assert!(modulus >= 1);
    let mut gens = Vec::new();
    for (p, e) in factorize(modulus) {
        let pe = p.pow(e);
        let rest = modulus / pe;
        if p == 2 {
            if e == 1 {
                continue;
            }
            if e == 2 {
                gens.push((crt_lift(3, pe, 1, rest), 2));
            } else {
                gens.push((crt_lift(pe - 1, pe, 1, rest), 2));
                gens.push((crt_lift(5, pe, 1, rest), 1 << (e - 2)));
            }
        } else {
            let g = primitive_root_mod_pe(p, e);
            gens.push((crt_lift(g, pe, 1, rest), pe / p * (p - 1)));
        }
    }
    gens
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    let mut r = n;
    for (p, _) in factorize(n) {
        r = r / p * (p - 1);
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

fn mult_order(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = (x as u128 * a as u128 % m as u128) as u64;
        k += 1;
        assert!(k <= m, "not a unit");
    }
    k
}

fn primitive_root_mod_pe(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let target = pe / p * (p - 1);
    for g in 2..pe {
        if g.gcd(&pe) == 1 && mult_order(g, pe) == target {
            return g;
        }
    }
    unreachable!("no primitive root mod {}^{}", p, e)
}

fn crt_lift(a: u64, ma: u64, b: u64, mb: u64) -> u64 {
    // value = a mod ma, = b mod mb
    if mb == 1 {
        return a % ma.max(1);
    }
    if ma == 1 {
        return b % mb;
    }
    use num_integer::Integer as _;
    use num_traits::{One, ToPrimitive};
    let m = ma * mb;
    let e = num_bigint::BigInt::from(ma).extended_gcd(&num_bigint::BigInt::from(mb));
    assert!(e.gcd.is_one());
    let inv_ma_mod_mb = e.x.mod_floor(&num_bigint::BigInt::from(mb)).to_u64().unwrap();
    let diff = (b + mb - a % mb) % mb;
    let t = (diff as u128 * inv_ma_mod_mb as u128 % mb as u128) as u64;
    ((a as u128 + ma as u128 * t as u128) % m as u128) as u64
}

/// Value of a Dirichlet character: a root of unity, or zero off the units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharValue(pub CycNum);

impl CharValue {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn cyc(&self) -> &CycNum {
        &self.0
    }

    pub fn into_cyc(self) -> CycNum {
        self.0
    }
}

/// A Dirichlet character of explicit modulus.
#[derive(Clone)]
pub struct DirChar {
    modulus: u64,
    /// Canonical generators and their orders.
    gens: Vec<(u64, u64)>,
    /// Image exponents: `chi(g_i) = zeta_{d_i}^{img[i]}`.
    img: Vec<u64>,
    /// Order of the character (lcm of image orders, at least 1).
    order: u64,
    /// `table[a] = Some(exponent)` with value `zeta_order^exponent` for
    /// units `a`, `None` otherwise.
    table: Vec<Option<u64>>,
    conductor: u64,
}

impl fmt::Debug for DirChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chi_{}[{:?}] (order {}, conductor {})",
            self.modulus, self.img, self.order, self.conductor,
        )
    }
}

impl DirChar {
    /// Build from image exponents on the canonical generators.
    ///
    /// `images[i]` is the exponent of the image on the `d_i`-th roots of
    /// unity: `chi(g_i) = zeta_{d_i}^{images[i]}` where `d_i` is the order
    /// of the i-th generator.
    pub fn from_images(modulus: u64, images: &[u64]) -> DirChar {
        let gens = unit_group_generators(modulus);
        assert_eq!(gens.len(), images.len(), "one image per generator");
        let img: Vec<u64> = gens.iter().zip(images).map(|((_, d), &a)| a % d).collect();
        let mut order = 1u64;
        for ((_, d), &a) in gens.iter().zip(&img) {
            if a != 0 {
                order = order.lcm(&(d / d.gcd(&a)));
            }
        }
        let mut table = vec![None; modulus.max(1) as usize];
        let dims: Vec<u64> = gens.iter().map(|&(_, d)| d).collect();
        let mut idx = vec![0u64; dims.len()];
        loop {
            let mut a: u128 = 1 % modulus.max(1) as u128;
            let mut ex: u64 = 0;
            for (i, &k) in idx.iter().enumerate() {
                a = a * mod_pow(gens[i].0, k, modulus.max(1)) as u128 % modulus.max(1) as u128;
                let d = dims[i];
                // chi(g_i) = zeta_d^{a_i} = zeta_order^{a_i * order / d}
                debug_assert!(img[i] as u128 * order as u128 % d as u128 == 0);
                let base = img[i] as u128 * order as u128 / d as u128;
                ex = ((ex as u128 + (k % d) as u128 * base) % order as u128) as u64;
            }
            table[a as usize] = Some(ex);
            let mut i = 0;
            loop {
                if i == dims.len() {
                    break;
                }
                idx[i] += 1;
                if idx[i] < dims[i] {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == dims.len() {
                break;
            }
        }
        if modulus == 1 {
            table = vec![Some(0)];
        }
        let mut chi = DirChar { modulus, gens, img, order, table, conductor: 1 };
        chi.conductor = chi.compute_conductor();
        chi
    }

    pub fn trivial(modulus: u64) -> DirChar {
        let n = unit_group_generators(modulus).len();
        DirChar::from_images(modulus, &vec![0; n])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.gens
    }

    pub fn image_exponents(&self) -> &[u64] {
        &self.img
    }

    /// Exponent `j` with `chi(a) = zeta_order^j`, or `None` off the units.
    pub fn eval_exp(&self, a: i64) -> Option<u64> {
        let m = self.modulus.max(1) as i64;
        let r = a.rem_euclid(m) as usize;
        self.table[r]
    }

    /// `chi(a)` as an exact cyclotomic number (zero off the units).
    pub fn eval(&self, a: i64) -> CharValue {
        match self.eval_exp(a) {
            None => CharValue(CycNum::zero()),
            Some(e) => CharValue(CycNum::root_of_unity(self.order, e as i64)),
        }
    }

    /// Parity: `chi(-1)`, always `+1` or `-1`.
    pub fn parity(&self) -> i8 {
        match self.eval_exp(-1) {
            Some(0) => 1,
            Some(e) if 2 * e == self.order => -1,
            _ => unreachable!("chi(-1) must be a square root of 1"),
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == -1
    }

    fn compute_conductor(&self) -> u64 {
        let m = self.modulus;
        for f in 1..=m {
            if m % f != 0 {
                continue;
            }
            let mut ok = true;
            for a in 1..=m {
                let a = a % m.max(1);
                if let Some(e) = self.table[a as usize] {
                    if a % f == 1 % f.max(1) && e != 0 {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return f;
            }
        }
        m
    }

    /// The primitive character inducing this one.
    pub fn primitivize(&self) -> DirChar {
        if self.conductor == self.modulus {
            return self.clone();
        }
        let f = self.conductor;
        let gens = unit_group_generators(f);
        let images: Vec<u64> = gens
            .iter()
            .map(|&(g, d)| {
                // lift g to a unit mod modulus congruent to g mod f
                let mut lift = g;
                while lift.gcd(&self.modulus.max(1)) != 1 {
                    lift += f;
                }
                let e = self.table[(lift % self.modulus.max(1)) as usize].expect("unit lift");
                debug_assert!(e as u128 * d as u128 % self.order as u128 == 0);
                (e as u128 * d as u128 / self.order as u128) as u64
            })
            .collect();
        DirChar::from_images(f, &images)
    }

    /// The character mod `new_modulus` induced by this one (requires the
    /// conductor to divide `new_modulus`).
    pub fn induce(&self, new_modulus: u64) -> DirChar {
        assert!(new_modulus % self.conductor == 0, "conductor must divide new modulus");
        if new_modulus == self.modulus {
            return self.clone();
        }
        let prim = self.primitivize();
        let f = prim.modulus;
        let gens = unit_group_generators(new_modulus);
        let images: Vec<u64> = gens
            .iter()
            .map(|&(g, d)| {
                let e = prim.eval_exp(g as i64).expect("generator stays a unit mod conductor");
                debug_assert!(e as u128 * d as u128 % prim.order.max(1) as u128 == 0);
                if prim.order == 1 {
                    0
                } else {
                    (e as u128 * d as u128 / prim.order as u128) as u64
                }
            })
            .collect();
        let _ = f;
        DirChar::from_images(new_modulus, &images)
    }

    /// Pointwise product, returned as the primitive character inducing it.
    pub fn mul(&self, other: &DirChar) -> DirChar {
        let m = self.modulus.max(1).lcm(&other.modulus.max(1));
        let a = self.induce(m);
        let b = other.induce(m);
        let gens = unit_group_generators(m);
        let ord = a.order.lcm(&b.order);
        let images: Vec<u64> = gens
            .iter()
            .map(|&(g, d)| {
                let ea = a.eval_exp(g as i64).unwrap();
                let eb = b.eval_exp(g as i64).unwrap();
                let e = (ea as u128 * (ord / a.order) as u128
                    + eb as u128 * (ord / b.order) as u128)
                    % ord as u128;
                debug_assert!(e * d as u128 % ord as u128 == 0);
                (e * d as u128 / ord as u128) as u64
            })
            .collect();
        DirChar::from_images(m, &images).primitivize()
    }

    /// Inverse character (complex conjugate), primitive.
    pub fn inv(&self) -> DirChar {
        let images: Vec<u64> = self
            .gens
            .iter()
            .zip(&self.img)
            .map(|(&(_, d), &a)| (d - a % d) % d)
            .collect();
        DirChar::from_images(self.modulus, &images).primitivize()
    }

    pub fn pow(&self, e: u64) -> DirChar {
        let images: Vec<u64> = self
            .gens
            .iter()
            .zip(&self.img)
            .map(|(&(_, d), &a)| (a as u128 * e as u128 % d as u128) as u64)
            .collect();
        DirChar::from_images(self.modulus, &images).primitivize()
    }

    /// Local component at `p`: the character mod `p^{e_p}` with
    /// `prod_p chi^(p) = chi` via the CRT.
    pub fn local_component(&self, p: u64) -> DirChar {
        let mut pe = 1u64;
        let mut m = self.modulus;
        while m % p == 0 {
            pe *= p;
            m /= p;
        }
        let gens = unit_group_generators(pe);
        let images: Vec<u64> = gens
            .iter()
            .map(|&(g, d)| {
                let lift = crt_lift(g % pe, pe, 1 % m.max(1), m);
                let e = self.eval_exp(lift as i64).expect("CRT lift is a unit");
                if self.order == 1 {
                    return 0;
                }
                debug_assert!(e as u128 * d as u128 % self.order as u128 == 0);
                (e as u128 * d as u128 / self.order as u128) as u64
            })
            .collect();
        DirChar::from_images(pe, &images)
    }

    /// All local components, one per prime dividing the modulus.
    pub fn local_components(&self) -> Vec<(u64, DirChar)> {
        factorize(self.modulus)
            .into_iter()
            .map(|(p, _)| (p, self.local_component(p)))
            .collect()
    }
}

impl PartialEq for DirChar {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.order == other.order && self.table == other.table
    }
}

impl Eq for DirChar {}

/// The Teichmüller character mod `p` raised to `exponent`: values in the
/// `(p-1)`-st roots of unity, `omega(a) = zeta_{p-1}^{dlog_g(a)}` for the
/// least primitive root `g` mod `p`. Returned reduced to its conductor.
pub fn teichmuller_char(p: u64, exponent: i64) -> DirChar {
    assert!(p % 2 == 1 && is_prime(p), "p must be an odd prime");
    let d = p - 1;
    let e = exponent.rem_euclid(d as i64) as u64;
    DirChar::from_images(p, &[e]).primitivize()
}

/// Constraints for [`enumerate_chars`].
#[derive(Clone, Copy, Default)]
pub struct CharConstraints {
    /// Keep only characters with this parity (`+1` or `-1`).
    pub parity: Option<i8>,
    /// Keep only characters whose order divides this.
    pub order_divides: Option<u64>,
    /// Keep only primitive characters (conductor = modulus).
    pub primitive_only: bool,
}

/// All characters mod `modulus` meeting the constraints, each exactly once.
pub fn enumerate_chars(modulus: u64, constraints: CharConstraints) -> Vec<DirChar> {
    let gens = unit_group_generators(modulus);
    let dims: Vec<u64> = gens.iter().map(|&(_, d)| d).collect();
    let mut out = Vec::new();
    let mut idx = vec![0u64; dims.len()];
    loop {
        let chi = DirChar::from_images(modulus, &idx);
        let ok = (!constraints.primitive_only || chi.conductor == modulus)
            && constraints.parity.map_or(true, |s| chi.parity() == s)
            && constraints.order_divides.map_or(true, |d| d % chi.order == 0);
        if ok {
            out.push(chi);
        }
        let mut i = 0;
        loop {
            if i == dims.len() {
                return out;
            }
            idx[i] += 1;
            if idx[i] < dims[i] {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Conrey-style index: the character `m -> chi_M(n, m)` built from the
/// crate's canonical generators via the symmetric pairing
/// `chi_M(n, m) = prod_i zeta_{d_i}^{dlog_i(n) dlog_i(m)}`.
/// `None` when `gcd(n, M) > 1`.
pub fn char_from_index(modulus: u64, n: u64) -> Option<DirChar> {
    if modulus > 1 && n.gcd(&modulus) != 1 {
        return None;
    }
    let gens = unit_group_generators(modulus);
    let dlogs = dlog_on_generators(modulus, n % modulus.max(1), &gens)?;
    let images: Vec<u64> = dlogs.iter().zip(&gens).map(|(&k, &(_, d))| k % d).collect();
    Some(DirChar::from_images(modulus, &images))
}

fn dlog_on_generators(modulus: u64, n: u64, gens: &[(u64, u64)]) -> Option<Vec<u64>> {
    let dims: Vec<u64> = gens.iter().map(|&(_, d)| d).collect();
    if dims.is_empty() {
        return Some(Vec::new());
    }
    let mut idx = vec![0u64; dims.len()];
    loop {
        let mut a: u128 = 1 % modulus as u128;
        for (i, &k) in idx.iter().enumerate() {
            a = a * mod_pow(gens[i].0, k, modulus) as u128 % modulus as u128;
        }
        if a as u64 == n % modulus {
            return Some(idx);
        }
        let mut i = 0;
        loop {
            if i == dims.len() {
                return None;
            }
            idx[i] += 1;
            if idx[i] < dims[i] {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Serialized character data.
#[derive(Serialize, Deserialize)]
pub struct DirCharSerde {
    pub modulus: u64,
    pub generator_images: Vec<GeneratorImage>,
    pub parity: i8,
}

#[derive(Serialize, Deserialize)]
pub struct GeneratorImage {
    pub generator: u64,
    pub order: u64,
    pub image_exponent: u64,
    pub image_order: u64,
}

impl Serialize for DirChar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let generator_images = self
            .gens
            .iter()
            .zip(&self.img)
            .map(|(&(g, d), &a)| GeneratorImage {
                generator: g,
                order: d,
                image_exponent: a,
                image_order: if a == 0 { 1 } else { d / d.gcd(&a) },
            })
            .collect();
        DirCharSerde { modulus: self.modulus, generator_images, parity: self.parity() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirChar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = DirCharSerde::deserialize(d)?;
        let images: Vec<u64> = raw.generator_images.iter().map(|g| g.image_exponent).collect();
        let chi = DirChar::from_images(raw.modulus, &images);
        if chi.parity() != raw.parity {
            return Err(serde::de::Error::custom("parity does not match images"));
        }
        Ok(chi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_mod_3() {
        let chis =
            enumerate_chars(3, CharConstraints { primitive_only: true, ..Default::default() });
        assert_eq!(chis.len(), 1);
        let chi = &chis[0];
        assert_eq!(chi.eval(2).cyc(), &CycNum::from_int(-1));
        assert_eq!(chi.eval(3).cyc(), &CycNum::zero());
        assert_eq!(chi.parity(), -1);
    }

    #[test]
    fn quartic_mod_5() {
        let g = unit_group_generators(5);
        assert_eq!(g, vec![(2, 4)]);
        let chi = DirChar::from_images(5, &[1]);
        assert_eq!(chi.order(), 4);
        let i = CycNum::root_of_unity(4, 1);
        assert_eq!(chi.eval(2).cyc(), &i);
        // 3 = 2^3 mod 5
        assert_eq!(chi.eval(3).cyc(), &(-&i));
    }

    #[test]
    fn counts() {
        assert_eq!(
            enumerate_chars(5, CharConstraints { primitive_only: true, ..Default::default() })
                .len(),
            3
        );
        assert_eq!(enumerate_chars(12, CharConstraints::default()).len(), 4);
        // exactly one primitive character mod 12, and it is even
        let prim12 =
            enumerate_chars(12, CharConstraints { primitive_only: true, ..Default::default() });
        assert_eq!(prim12.len(), 1);
        assert_eq!(prim12[0].parity(), 1);
        let odd12 = enumerate_chars(
            12,
            CharConstraints { primitive_only: true, parity: Some(-1), ..Default::default() },
        );
        assert!(odd12.is_empty());
    }

    #[test]
    fn conductor_and_primitivize() {
        let chi_a = DirChar::from_images(12, &[1, 0]);
        let chi_b = DirChar::from_images(12, &[0, 1]);
        let conductors = [chi_a.conductor(), chi_b.conductor()];
        assert!(conductors.contains(&4) && conductors.contains(&3));
        for chi in [chi_a, chi_b] {
            let p = chi.primitivize();
            assert_eq!(p.modulus(), chi.conductor());
            assert_eq!(p.primitivize(), p);
            let ind = p.induce(12);
            for a in 1..12u64 {
                if a.gcd(&12) == 1 {
                    assert_eq!(ind.eval(a as i64), chi.eval(a as i64));
                }
            }
        }
    }

    #[test]
    fn products() {
        let q3 = enumerate_chars(3, CharConstraints { primitive_only: true, ..Default::default() })
            .remove(0);
        let q4 = enumerate_chars(4, CharConstraints { primitive_only: true, ..Default::default() })
            .remove(0);
        let prod = q3.mul(&q4);
        assert_eq!(prod.modulus(), 12);
        assert_eq!(prod.conductor(), 12);
        assert_eq!(prod.order(), 2);
        let quartic = DirChar::from_images(5, &[1]);
        let triv = quartic.mul(&quartic.inv());
        assert_eq!(triv.conductor(), 1);
        assert!(triv.is_trivial());
        let cube = quartic.mul(&quartic.pow(2));
        assert_eq!(cube, quartic.inv());
        assert_eq!(cube.conductor(), 5);
    }

    #[test]
    fn multiplicativity_and_zero_extension() {
        let chi = DirChar::from_images(35, &[2, 1]);
        for a in 0..35i64 {
            for b in 0..35i64 {
                let lhs = chi.eval(a * b).0;
                let rhs = &chi.eval(a).0 * &chi.eval(b).0;
                assert_eq!(lhs, rhs);
            }
        }
        assert!(chi.eval(70).is_zero());
    }

    #[test]
    fn local_component_product() {
        let chi = DirChar::from_images(45, &[1, 3]);
        let comps = chi.local_components();
        assert_eq!(comps.len(), 2);
        for a in 1..45i64 {
            let mut prod = CycNum::one();
            for (_, c) in &comps {
                prod = &prod * c.eval(a).cyc();
            }
            assert_eq!(prod, chi.eval(a).0, "mismatch at {a}");
        }
    }

    #[test]
    fn teichmuller_values() {
        assert!(teichmuller_char(5, 0).is_trivial());
        let w2 = teichmuller_char(5, 2);
        assert_eq!(w2.order(), 2);
        assert_eq!(w2.eval(2).cyc(), &CycNum::from_int(-1));
        // p = 7, least primitive root 3: omega(3) = zeta_6, omega(2) = zeta_6^2
        let w = teichmuller_char(7, 1);
        assert_eq!(w.order(), 6);
        assert_eq!(w.eval(3).cyc(), &CycNum::root_of_unity(6, 1));
        assert_eq!(w.eval(2).cyc(), &CycNum::root_of_unity(6, 2));
    }

    #[test]
    fn parity_matches_eval_at_minus_one() {
        for m in [3u64, 4, 5, 7, 8, 9, 11, 12, 15, 16] {
            for chi in enumerate_chars(m, CharConstraints::default()) {
                let v = chi.eval(-1).0;
                let want =
                    if chi.parity() == 1 { CycNum::one() } else { CycNum::from_int(-1) };
                assert_eq!(v, want);
            }
        }
    }

    #[test]
    fn conrey_style_index() {
        let chi = char_from_index(7, 3).unwrap();
        assert_eq!(chi.eval(3).cyc(), &CycNum::root_of_unity(6, 1));
        assert!(char_from_index(7, 7).is_none());
    }

    #[test]
    fn modulus_one_is_constant_one() {
        let chi = DirChar::trivial(1);
        assert_eq!(chi.eval(0).cyc(), &CycNum::one());
        assert_eq!(chi.eval(5).cyc(), &CycNum::one());
        assert_eq!(chi.conductor(), 1);
    }

    #[test]
    fn serde_roundtrip() {
        let chi = DirChar::from_images(35, &[2, 1]);
        let s = serde_json::to_string(&chi).unwrap();
        let back: DirChar = serde_json::from_str(&s).unwrap();
        assert_eq!(chi, back);
    }
}
