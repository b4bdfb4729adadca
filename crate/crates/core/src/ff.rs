//! Exact arithmetic in GF(p) and GF(p^s).
//!
//! A [`FieldSpec`] is a pure function of `(p, s)`: the modulus polynomial is
//! the first monic irreducible of degree `s` in enumeration order, so two
//! specs built from the same parameters are identical. Elements are stored
//! as their index in the canonical enumeration (coefficient vectors ordered
//! with the low-degree coefficient varying fastest, zero first), which makes
//! them `Copy` and makes equality coincide with coefficient-vector equality.

use std::fmt;

use thiserror::Error;

/// Default upper bound on the field size `q = p^s`.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeOutOfRange,
    #[error("field size {q} exceeds the cap {cap}")]
    FieldTooLarge { q: u64, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("quadratic character is undefined in even characteristic")]
    EvenCharacteristicUndefined,
    #[error("discrete logarithm of zero")]
    ZeroArgument,
    #[error("element is not a generator")]
    NotAGenerator,
    #[error("element index {index} out of range for field of {q} elements")]
    IndexOutOfRange { index: u64, q: u64 },
    #[error("coefficient vector is malformed for this field")]
    MalformedElement,
}

/// One element of a finite field, identified by its enumeration index.
///
/// The index encodes the coefficient vector `(c_0, ..., c_{s-1})` as
/// `c_0 + c_1 p + ... + c_{s-1} p^{s-1}`, so index equality is exactly
/// coefficient-vector equality and the derived `Ord` is enumeration order.
/// All arithmetic goes through the owning [`FieldSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub(crate) u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Index of this element in the field's enumeration order.
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Value of the quadratic character: +1 on nonzero squares, -1 on
/// non-squares, 0 only at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    MinusOne,
    Zero,
    PlusOne,
}

impl CharValue {
    pub fn value(self) -> i64 {
        match self {
            CharValue::MinusOne => -1,
            CharValue::Zero => 0,
            CharValue::PlusOne => 1,
        }
    }
}

/// A finite field GF(p^s) with a fixed modulus polynomial and a
/// deterministic element enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    s: u32,
    q: u64,
    /// Monic irreducible of degree `s` over GF(p), coefficients low-to-high
    /// (length `s + 1`, last entry 1). For `s = 1` this is the polynomial x.
    modulus: Vec<u64>,
}

/// Builds GF(p^s) with the default size cap.
pub fn make_field(p: u64, s: u32) -> Result<FieldSpec, FfError> {
    make_field_with_cap(p, s, DEFAULT_FIELD_CAP)
}

/// Builds GF(p^s), rejecting fields with more than `cap` elements.
///
/// The modulus is the first monic irreducible of degree `s` when candidates
/// are enumerated by the index of their non-leading coefficient vector, so
/// the result is a pure function of `(p, s)`.
pub fn make_field_with_cap(p: u64, s: u32, cap: u64) -> Result<FieldSpec, FfError> {
    if !is_prime(p) {
        return Err(FfError::NotPrime(p));
    }
    if s == 0 {
        return Err(FfError::DegreeOutOfRange);
    }
    let q = checked_pow(p, s).ok_or(FfError::FieldTooLarge { q: u64::MAX, cap })?;
    if q > cap {
        return Err(FfError::FieldTooLarge { q, cap });
    }
    let modulus = smallest_irreducible(p, s, q);
    Ok(FieldSpec { p, s, q, modulus })
}

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus polynomial coefficients, low-to-high (monic, degree `s`).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Embeds an integer residue into the prime subfield.
    pub fn scalar(&self, v: u64) -> FieldElement {
        FieldElement(v % self.p)
    }

    /// Element with the given enumeration index.
    pub fn element_from_index(&self, index: u64) -> Result<FieldElement, FfError> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(FfError::IndexOutOfRange { index, q: self.q })
        }
    }

    /// Element with the given coefficient vector (length `s`, entries < p).
    pub fn element_from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement, FfError> {
        if coeffs.len() != self.s as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FfError::MalformedElement);
        }
        let mut index = 0;
        for &c in coeffs.iter().rev() {
            index = index * self.p + c;
        }
        Ok(FieldElement(index))
    }

    /// Coefficient vector of an element, low-to-high, length `s`.
    pub fn coeffs(&self, x: FieldElement) -> Vec<u64> {
        self.check(x);
        let mut out = Vec::with_capacity(self.s as usize);
        let mut v = x.0;
        for _ in 0..self.s {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    /// All `q` elements in enumeration order (zero first).
    pub fn elements(&self) -> impl DoubleEndedIterator<Item = FieldElement> + Clone + '_ {
        (0..self.q).map(FieldElement)
    }

    /// Nonzero elements in enumeration order.
    pub fn nonzero_elements(&self) -> impl DoubleEndedIterator<Item = FieldElement> + Clone + '_ {
        (1..self.q).map(FieldElement)
    }

    fn check(&self, x: FieldElement) {
        assert!(x.0 < self.q, "element index {} outside GF({})", x.0, self.q);
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if self.p == 2 {
            // base-2 digits add without carry == xor
            return FieldElement(a.0 ^ b.0);
        }
        if self.s == 1 {
            let v = a.0 + b.0;
            return FieldElement(if v >= self.p { v - self.p } else { v });
        }
        let mut out = 0;
        let mut mult = 1;
        let (mut x, mut y) = (a.0, b.0);
        while x != 0 || y != 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * mult;
            mult *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.check(a);
        if self.p == 2 {
            return a;
        }
        if self.s == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let mut out = 0;
        let mut mult = 1;
        let mut x = a.0;
        while x != 0 {
            let d = x % self.p;
            out += if d == 0 { 0 } else { self.p - d } * mult;
            mult *= self.p;
            x /= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if self.s == 1 {
            return FieldElement(mul_mod(a.0, b.0, self.p));
        }
        let xa = self.coeffs(a);
        let xb = self.coeffs(b);
        let s = self.s as usize;
        // schoolbook product, then reduction by the monic modulus
        let mut prod = vec![0u64; 2 * s - 1];
        for (i, &ca) in xa.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in xb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(ca, cb, self.p)) % self.p;
            }
        }
        for i in (s..2 * s - 1).rev() {
            let t = prod[i];
            if t == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..s {
                let sub = mul_mod(t, self.modulus[j], self.p);
                prod[i - s + j] = (prod[i - s + j] + self.p - sub) % self.p;
            }
        }
        prod.truncate(s);
        self.element_from_coeffs(&prod)
            .expect("reduced product is canonical")
    }

    /// `a^e` by square-and-multiply; `pow(0, 0) = 1` so monomial evaluation
    /// is total.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        self.check(a);
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let mut base = a;
        let mut exp = e;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FfError> {
        if a.is_zero() {
            return Err(FfError::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// First element in enumeration order whose multiplicative order is
    /// `q - 1`, checked against the prime factorization of `q - 1`.
    pub fn generator(&self) -> FieldElement {
        let order = self.q - 1;
        let primes = prime_factors(order);
        for g in self.nonzero_elements() {
            let ok = primes
                .iter()
                .all(|&l| self.pow(g, order / l) != FieldElement::ONE);
            if ok {
                return g;
            }
        }
        unreachable!("every finite field has a generator")
    }

    /// Quadratic character: 0 at zero, +1 on nonzero squares, -1 on
    /// non-squares. Undefined for even q.
    pub fn quadratic_character(&self, x: FieldElement) -> Result<CharValue, FfError> {
        if self.q.is_multiple_of(2) {
            return Err(FfError::EvenCharacteristicUndefined);
        }
        self.check(x);
        if x.is_zero() {
            return Ok(CharValue::Zero);
        }
        let half = self.pow(x, (self.q - 1) / 2);
        if half == FieldElement::ONE {
            Ok(CharValue::PlusOne)
        } else {
            debug_assert_eq!(half, self.neg(FieldElement::ONE));
            Ok(CharValue::MinusOne)
        }
    }

    /// The unique `t` in `[0, q-2]` with `g^t = x`, by linear scan.
    pub fn discrete_log(&self, g: FieldElement, x: FieldElement) -> Result<u64, FfError> {
        if x.is_zero() {
            return Err(FfError::ZeroArgument);
        }
        self.check(g);
        self.check(x);
        let mut acc = FieldElement::ONE;
        for t in 0..self.q - 1 {
            if acc == x {
                return Ok(t);
            }
            acc = self.mul(acc, g);
        }
        Err(FfError::NotAGenerator)
    }

    /// Human-readable polynomial form `c0+c1*a+...` (bare residue for s = 1).
    pub fn poly_string(&self, x: FieldElement) -> String {
        if self.s == 1 {
            return x.0.to_string();
        }
        let coeffs = self.coeffs(x);
        let mut parts = Vec::new();
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let part = match (i, c) {
                (0, _) => c.to_string(),
                (1, 1) => "a".to_string(),
                (1, _) => format!("{c}*a"),
                (_, 1) => format!("a^{i}"),
                (_, _) => format!("{c}*a^{i}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s == 1 {
            write!(out, "GF({})", self.p)
        } else {
            write!(out, "GF({}^{})", self.p, self.s)
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factors of `n`, each listed once, ascending.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

/// First monic irreducible of degree `s` over GF(p), scanning non-leading
/// coefficient vectors in index order.
fn smallest_irreducible(p: u64, s: u32, q: u64) -> Vec<u64> {
    for low_index in 0..q {
        let mut poly = Vec::with_capacity(s as usize + 1);
        let mut v = low_index;
        for _ in 0..s {
            poly.push(v % p);
            v /= p;
        }
        poly.push(1);
        if poly_is_irreducible(p, &poly) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}

fn poly_is_irreducible(p: u64, poly: &[u64]) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    // a degree-1 factor means a root
    for r in 0..p {
        if poly_eval(p, poly, r) == 0 {
            return false;
        }
    }
    if deg <= 3 {
        return true;
    }
    // trial division by every monic polynomial of degree 2..=deg/2
    for d in 2..=deg / 2 {
        let count = checked_pow(p, d as u32).expect("divisor space fits u64");
        for low_index in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut v = low_index;
            for _ in 0..d {
                div.push(v % p);
                v /= p;
            }
            div.push(1);
            if poly_rem_is_zero(p, poly, &div) {
                return false;
            }
        }
    }
    true
}

fn poly_eval(p: u64, poly: &[u64], x: u64) -> u64 {
    let mut acc = 0;
    for &c in poly.iter().rev() {
        acc = (mul_mod(acc, x, p) + c) % p;
    }
    acc
}

/// Remainder test of `poly` by monic `div` over GF(p).
fn poly_rem_is_zero(p: u64, poly: &[u64], div: &[u64]) -> bool {
    let mut rem: Vec<u64> = poly.to_vec();
    let dd = div.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().expect("nonempty");
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in div.iter().enumerate() {
                let sub = mul_mod(lead, c, p);
                rem[shift + i] = (rem[shift + i] + p - sub) % p;
            }
        }
        rem.pop();
        while rem.len() > dd && *rem.last().expect("nonempty") == 0 {
            rem.pop();
        }
    }
    rem.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, s: u32) -> FieldSpec {
        make_field(p, s).expect("valid field")
    }

    #[test]
    fn make_field_prime_field_modulus_is_x() {
        let f = gf(7, 1);
        assert_eq!(f.q(), 7);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn make_field_gf4_modulus() {
        // the unique irreducible quadratic over GF(2)
        let f = gf(2, 2);
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn make_field_known_moduli() {
        assert_eq!(gf(3, 2).modulus(), &[1, 0, 1]); // x^2 + 1
        assert_eq!(gf(2, 3).modulus(), &[1, 1, 0, 1]); // x^3 + x + 1
        assert_eq!(gf(2, 4).modulus(), &[1, 1, 0, 0, 1]); // x^4 + x + 1
        assert_eq!(gf(5, 2).modulus(), &[2, 0, 1]); // x^2 + 2
        assert_eq!(gf(3, 3).modulus(), &[1, 2, 0, 1]); // x^3 + 2x + 1
    }

    #[test]
    fn make_field_rejects_composite() {
        assert_eq!(make_field(4, 1).unwrap_err(), FfError::NotPrime(4));
    }

    #[test]
    fn make_field_rejects_degree_zero() {
        assert_eq!(make_field(3, 0).unwrap_err(), FfError::DegreeOutOfRange);
    }

    #[test]
    fn make_field_respects_cap() {
        assert!(matches!(
            make_field_with_cap(2, 21, 1 << 20).unwrap_err(),
            FfError::FieldTooLarge { .. }
        ));
        assert!(make_field_with_cap(2, 20, 1 << 20).is_ok());
    }

    #[test]
    fn make_field_is_deterministic() {
        let a = gf(3, 4);
        let b = gf(3, 4);
        assert_eq!(a, b);
        assert_eq!(a.modulus(), b.modulus());
    }

    #[test]
    fn add_in_gf7() {
        let f = gf(7, 1);
        assert_eq!(f.add(f.scalar(3), f.scalar(5)), f.scalar(1));
    }

    #[test]
    fn mul_alpha_squared_in_gf4() {
        let f = gf(2, 2);
        let alpha = f.element_from_coeffs(&[0, 1]).unwrap();
        let alpha_plus_one = f.element_from_coeffs(&[1, 1]).unwrap();
        assert_eq!(f.mul(alpha, alpha), alpha_plus_one);
    }

    #[test]
    fn mul_identity() {
        for f in [gf(2, 1), gf(11, 1), gf(3, 2), gf(2, 4)] {
            for x in f.elements() {
                assert_eq!(f.mul(x, f.one()), x);
            }
        }
    }

    #[test]
    fn inv_examples() {
        let f7 = gf(7, 1);
        assert_eq!(f7.inv(f7.scalar(3)).unwrap(), f7.scalar(5));
        let f4 = gf(2, 2);
        let alpha = f4.element_from_coeffs(&[0, 1]).unwrap();
        let alpha_plus_one = f4.element_from_coeffs(&[1, 1]).unwrap();
        assert_eq!(f4.inv(alpha).unwrap(), alpha_plus_one);
        assert_eq!(f4.inv(f4.zero()).unwrap_err(), FfError::DivisionByZero);
    }

    #[test]
    fn pow_examples() {
        let f7 = gf(7, 1);
        assert_eq!(f7.pow(f7.scalar(3), 6), f7.one());
        assert_eq!(f7.pow(f7.zero(), 0), f7.one());
        let f5 = gf(5, 1);
        assert_eq!(f5.pow(f5.scalar(2), 3), f5.scalar(3));
    }

    #[test]
    fn elements_enumeration_order() {
        let f3 = gf(3, 1);
        let idx: Vec<u64> = f3.elements().map(|x| x.index()).collect();
        assert_eq!(idx, vec![0, 1, 2]);

        // GF(4): 0, 1, a, a+1 in index order
        let f4 = gf(2, 2);
        let coeffs: Vec<Vec<u64>> = f4.elements().map(|x| f4.coeffs(x)).collect();
        assert_eq!(coeffs, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);

        assert_eq!(gf(3, 2).elements().count(), 9);
    }

    #[test]
    fn generator_examples() {
        assert_eq!(gf(7, 1).generator().index(), 3);
        assert_eq!(gf(2, 1).generator().index(), 1);
        assert_eq!(gf(5, 1).generator().index(), 2);
    }

    #[test]
    fn generator_powers_cover_nonzero_elements() {
        for f in [gf(7, 1), gf(2, 2), gf(3, 2), gf(2, 4), gf(13, 1)] {
            let g = f.generator();
            let mut seen = vec![false; f.q() as usize];
            let mut acc = f.one();
            for _ in 0..f.q() - 1 {
                seen[acc.index() as usize] = true;
                acc = f.mul(acc, g);
            }
            assert!(!seen[0]);
            assert!(seen[1..].iter().all(|&v| v));
        }
    }

    #[test]
    fn quadratic_character_examples() {
        let f7 = gf(7, 1);
        assert_eq!(
            f7.quadratic_character(f7.scalar(2)).unwrap(),
            CharValue::PlusOne
        );
        assert_eq!(
            f7.quadratic_character(f7.scalar(3)).unwrap(),
            CharValue::MinusOne
        );
        assert_eq!(f7.quadratic_character(f7.zero()).unwrap(), CharValue::Zero);
        let f9 = gf(3, 2);
        assert_eq!(f9.quadratic_character(f9.zero()).unwrap(), CharValue::Zero);
        assert_eq!(
            gf(2, 2).quadratic_character(FieldElement::ONE).unwrap_err(),
            FfError::EvenCharacteristicUndefined
        );
    }

    #[test]
    fn quadratic_character_is_multiplicative_and_balanced() {
        let odd_fields: Vec<FieldSpec> = all_fields_up_to_64()
            .into_iter()
            .filter(|f| f.q() % 2 == 1 && f.q() <= 49)
            .collect();
        for f in odd_fields {
            let eta: Vec<i64> = f
                .elements()
                .map(|x| f.quadratic_character(x).unwrap().value())
                .collect();
            for x in f.elements() {
                for y in f.elements() {
                    let xy = f.mul(x, y);
                    assert_eq!(
                        eta[xy.index() as usize],
                        eta[x.index() as usize] * eta[y.index() as usize]
                    );
                }
            }
            let plus = eta.iter().filter(|&&v| v == 1).count() as u64;
            assert_eq!(plus, (f.q() - 1) / 2);
        }
    }

    #[test]
    fn discrete_log_examples() {
        let f7 = gf(7, 1);
        let g = f7.generator();
        assert_eq!(f7.discrete_log(g, f7.one()).unwrap(), 0);
        assert_eq!(f7.discrete_log(g, f7.scalar(6)).unwrap(), 3);
        assert_eq!(
            f7.discrete_log(g, f7.zero()).unwrap_err(),
            FfError::ZeroArgument
        );
        // 2 has order 3 mod 7, so 3 is never reached
        assert_eq!(
            f7.discrete_log(f7.scalar(2), f7.scalar(3)).unwrap_err(),
            FfError::NotAGenerator
        );
    }

    /// Every prime power up to 64 as (p, s).
    fn all_fields_up_to_64() -> Vec<FieldSpec> {
        let mut out = Vec::new();
        for q in 2..=64u64 {
            let p = (2..=q).find(|d| q % d == 0).unwrap();
            let mut rest = q;
            let mut s = 0;
            while rest % p == 0 {
                rest /= p;
                s += 1;
            }
            if rest == 1 {
                out.push(gf(p, s));
            }
        }
        out
    }

    #[test]
    fn field_axioms_exhaustive_up_to_64() {
        let fields = all_fields_up_to_64();
        assert_eq!(fields.len(), 27); // prime powers up to 64
        for f in fields {
            let q = f.q() as usize;
            let elems: Vec<FieldElement> = f.elements().collect();
            let mut add = vec![vec![FieldElement::ZERO; q]; q];
            let mut mul = vec![vec![FieldElement::ZERO; q]; q];
            for &a in &elems {
                for &b in &elems {
                    add[a.0 as usize][b.0 as usize] = f.add(a, b);
                    mul[a.0 as usize][b.0 as usize] = f.mul(a, b);
                }
            }
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(add[a][b], add[b][a]);
                    assert_eq!(mul[a][b], mul[b][a]);
                    for c in 0..q {
                        assert_eq!(add[add[a][b].0 as usize][c], add[a][add[b][c].0 as usize]);
                        assert_eq!(mul[mul[a][b].0 as usize][c], mul[a][mul[b][c].0 as usize]);
                        assert_eq!(
                            mul[a][add[b][c].0 as usize],
                            add[mul[a][b].0 as usize][mul[a][c].0 as usize]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fermat_and_absorbing_power() {
        for f in [gf(7, 1), gf(2, 2), gf(3, 2), gf(2, 4), gf(11, 1)] {
            for x in f.elements() {
                if !x.is_zero() {
                    assert_eq!(f.pow(x, f.q() - 1), f.one());
                }
                assert_eq!(f.pow(x, f.q()), x);
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        for f in [gf(7, 1), gf(3, 2), gf(2, 4)] {
            for x in f.nonzero_elements() {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
            }
        }
    }

    #[test]
    fn coeffs_roundtrip_and_poly_strings() {
        let f9 = gf(3, 2);
        for x in f9.elements() {
            let c = f9.coeffs(x);
            assert_eq!(f9.element_from_coeffs(&c).unwrap(), x);
        }
        let alpha = f9.element_from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.poly_string(alpha), "a");
        assert_eq!(f9.poly_string(f9.zero()), "0");
        let x = f9.element_from_coeffs(&[1, 2]).unwrap();
        assert_eq!(f9.poly_string(x), "1+2*a");
        assert_eq!(gf(7, 1).poly_string(FieldElement(5)), "5");
    }

    #[test]
    fn element_constructors_validate() {
        let f = gf(3, 2);
        assert!(f.element_from_index(8).is_ok());
        assert_eq!(
            f.element_from_index(9).unwrap_err(),
            FfError::IndexOutOfRange { index: 9, q: 9 }
        );
        assert_eq!(
            f.element_from_coeffs(&[3, 0]).unwrap_err(),
            FfError::MalformedElement
        );
        assert_eq!(
            f.element_from_coeffs(&[1]).unwrap_err(),
            FfError::MalformedElement
        );
    }
}
