//! Equation families and the arithmetic conditions that gate each closed
//! form: reduced exponents, coprimality tests, the unit-exponent gcd tests,
//! the odd/even exponent split, and quasi-homogeneity.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::ff::{FieldElement, FieldSpec};
use crate::DEFAULT_WORK_CAP;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquationError {
    #[error("equation needs at least 2 variables, got {0}")]
    TooFewVariables(usize),
    #[error("coefficient vectors and exponent vectors must have equal length")]
    LengthMismatch,
    #[error("coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("exponents and powers must be positive")]
    ZeroExponent,
    #[error("polynomial must not have a constant term")]
    ConstantTerm,
    #[error("duplicate monomial in polynomial")]
    DuplicateTerm,
    #[error("polynomial is not quasi-homogeneous for the given weights")]
    NotQuasiHomogeneous,
    #[error("derived weight does not fit a machine word")]
    WeightOverflow,
    #[error("element does not belong to the field")]
    ForeignElement,
}

/// `a_1 x_1^{m_1} + ... + a_n x_n^{m_n} = 0` with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalEquation {
    coeffs: Vec<FieldElement>,
    exponents: Vec<u64>,
}

impl DiagonalEquation {
    pub fn new(
        f: &FieldSpec,
        coeffs: Vec<FieldElement>,
        exponents: Vec<u64>,
    ) -> Result<Self, EquationError> {
        validate_coeffs(f, &coeffs)?;
        if coeffs.len() != exponents.len() {
            return Err(EquationError::LengthMismatch);
        }
        if coeffs.len() < 2 {
            return Err(EquationError::TooFewVariables(coeffs.len()));
        }
        if exponents.contains(&0) {
            return Err(EquationError::ZeroExponent);
        }
        Ok(Self { coeffs, exponents })
    }

    pub fn var_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn derived(&self, f: &FieldSpec) -> DerivedQuantities {
        reduce_exponents(&self.exponents, f.q())
    }

    /// Same equation with each exponent replaced by gcd(m_j, q-1).
    pub fn reduced(&self, f: &FieldSpec) -> DiagonalEquation {
        DiagonalEquation {
            coeffs: self.coeffs.clone(),
            exponents: self.derived(f).reduced,
        }
    }
}

/// `(a_1 x_1^{m_1} + ... + a_n x_n^{m_n})^k = b x_1^{k_1} ... x_n^{k_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarlitzEquation {
    coeffs: Vec<FieldElement>,
    exponents: Vec<u64>,
    outer_power: u64,
    rhs_coeff: FieldElement,
    rhs_exponents: Vec<u64>,
}

impl CarlitzEquation {
    pub fn new(
        f: &FieldSpec,
        coeffs: Vec<FieldElement>,
        exponents: Vec<u64>,
        outer_power: u64,
        rhs_coeff: FieldElement,
        rhs_exponents: Vec<u64>,
    ) -> Result<Self, EquationError> {
        validate_coeffs(f, &coeffs)?;
        if coeffs.len() != exponents.len() || coeffs.len() != rhs_exponents.len() {
            return Err(EquationError::LengthMismatch);
        }
        if coeffs.len() < 2 {
            return Err(EquationError::TooFewVariables(coeffs.len()));
        }
        if outer_power == 0 || exponents.contains(&0) || rhs_exponents.contains(&0) {
            return Err(EquationError::ZeroExponent);
        }
        if rhs_coeff.is_zero() {
            return Err(EquationError::ZeroCoefficient);
        }
        Ok(Self {
            coeffs,
            exponents,
            outer_power,
            rhs_coeff,
            rhs_exponents,
        })
    }

    pub fn var_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn outer_power(&self) -> u64 {
        self.outer_power
    }

    pub fn rhs_coeff(&self) -> FieldElement {
        self.rhs_coeff
    }

    pub fn rhs_exponents(&self) -> &[u64] {
        &self.rhs_exponents
    }

    pub fn derived(&self, f: &FieldSpec) -> DerivedQuantities {
        reduce_exponents(&self.exponents, f.q())
    }

    /// The diagonal equation on the left-hand side (same coefficients and
    /// inner exponents, right-hand side zero).
    pub fn diagonal_part(&self, f: &FieldSpec) -> DiagonalEquation {
        DiagonalEquation::new(f, self.coeffs.clone(), self.exponents.clone())
            .expect("diagonal part of a valid equation is valid")
    }
}

/// One monomial `coeff * x_1^{e_1} ... x_n^{e_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: FieldElement,
    pub exponents: Vec<u64>,
}

/// `f(x_1, ..., x_n) = b x_1^{k_1} ... x_n^{k_n}` where `f` scales as
/// `f(c^{r_1} x_1, ..., c^{r_n} x_n) = c^r f(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiHomogeneousEquation {
    terms: Vec<Term>,
    degree: u64,
    weights: Vec<u64>,
    rhs_coeff: FieldElement,
    rhs_exponents: Vec<u64>,
}

impl QuasiHomogeneousEquation {
    pub fn new(
        f: &FieldSpec,
        terms: Vec<Term>,
        degree: u64,
        weights: Vec<u64>,
        rhs_coeff: FieldElement,
        rhs_exponents: Vec<u64>,
    ) -> Result<Self, EquationError> {
        let n = weights.len();
        if n < 2 {
            return Err(EquationError::TooFewVariables(n));
        }
        if rhs_exponents.len() != n {
            return Err(EquationError::LengthMismatch);
        }
        if terms.is_empty() {
            return Err(EquationError::ZeroCoefficient);
        }
        for term in &terms {
            if term.coeff.is_zero() {
                return Err(EquationError::ZeroCoefficient);
            }
            if term.exponents.len() != n {
                return Err(EquationError::LengthMismatch);
            }
            if term.exponents.iter().all(|&e| e == 0) {
                return Err(EquationError::ConstantTerm);
            }
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].exponents == terms[j].exponents {
                    return Err(EquationError::DuplicateTerm);
                }
            }
        }
        if degree == 0 || weights.contains(&0) || rhs_exponents.contains(&0) {
            return Err(EquationError::ZeroExponent);
        }
        if rhs_coeff.is_zero() {
            return Err(EquationError::ZeroCoefficient);
        }
        validate_coeffs(f, &[rhs_coeff])?;
        Ok(Self {
            terms,
            degree,
            weights,
            rhs_coeff,
            rhs_exponents,
        })
    }

    /// Views a diagonal equation as quasi-homogeneous with weights M/m_j
    /// and degree M.
    pub fn from_diagonal(
        f: &FieldSpec,
        diag: &DiagonalEquation,
        rhs_coeff: FieldElement,
        rhs_exponents: Vec<u64>,
    ) -> Result<Self, EquationError> {
        let lcm = lcm_of(diag.exponents());
        let degree = lcm.to_u64().ok_or(EquationError::WeightOverflow)?;
        let weights: Vec<u64> = diag.exponents().iter().map(|&m| degree / m).collect();
        let n = diag.var_count();
        let terms = diag
            .coeffs()
            .iter()
            .zip(diag.exponents())
            .enumerate()
            .map(|(j, (&a, &m))| {
                let mut exps = vec![0; n];
                exps[j] = m;
                Term {
                    coeff: a,
                    exponents: exps,
                }
            })
            .collect();
        Self::new(f, terms, degree, weights, rhs_coeff, rhs_exponents)
    }

    pub fn var_count(&self) -> usize {
        self.weights.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn rhs_coeff(&self) -> FieldElement {
        self.rhs_coeff
    }

    pub fn rhs_exponents(&self) -> &[u64] {
        &self.rhs_exponents
    }

    /// Evaluates `f` at a point.
    pub fn eval_at(&self, f: &FieldSpec, x: &[FieldElement]) -> FieldElement {
        assert_eq!(x.len(), self.var_count());
        let mut acc = f.zero();
        for term in &self.terms {
            let mut v = term.coeff;
            for (&xi, &e) in x.iter().zip(&term.exponents) {
                v = f.mul(v, f.pow(xi, e));
            }
            acc = f.add(acc, v);
        }
        acc
    }
}

fn validate_coeffs(f: &FieldSpec, coeffs: &[FieldElement]) -> Result<(), EquationError> {
    for &a in coeffs {
        if a.is_zero() {
            return Err(EquationError::ZeroCoefficient);
        }
        f.element_from_index(a.index())
            .map_err(|_| EquationError::ForeignElement)?;
    }
    Ok(())
}

/// Reduced exponents d_j = gcd(m_j, q-1) together with the two lcms that
/// drive the hypothesis checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedQuantities {
    /// d_j = gcd(m_j, q-1); counting with d_j in place of m_j is exact.
    pub reduced: Vec<u64>,
    /// lcm of the original exponents.
    pub exponent_lcm: BigUint,
    /// lcm of the reduced exponents; always divides q-1.
    pub reduced_lcm: u64,
}

/// Computes d_j = gcd(m_j, q-1), lcm(m_j), lcm(d_j).
pub fn reduce_exponents(exponents: &[u64], q: u64) -> DerivedQuantities {
    let reduced: Vec<u64> = exponents.iter().map(|&m| m.gcd(&(q - 1))).collect();
    let reduced_lcm = reduced.iter().fold(1u64, |acc, &d| acc.lcm(&d));
    DerivedQuantities {
        reduced,
        exponent_lcm: lcm_of(exponents),
        reduced_lcm,
    }
}

fn lcm_of(values: &[u64]) -> BigUint {
    values
        .iter()
        .fold(BigUint::from(1u32), |acc, &m| acc.lcm(&BigUint::from(m)))
}

/// Smallest index j with d_j coprime to the product of the other entries,
/// if any. Coprimality to the product is checked factor by factor, so the
/// product itself is never formed.
pub fn thm1_applicable(reduced: &[u64]) -> Option<usize> {
    (0..reduced.len()).find(|&j| {
        reduced
            .iter()
            .enumerate()
            .all(|(i, &d)| i == j || reduced[j].gcd(&d) == 1)
    })
}

pub fn pairwise_coprime(values: &[u64]) -> bool {
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[i].gcd(&values[j]) != 1 {
                return false;
            }
        }
    }
    true
}

/// gcd of an integer exponent with the group order, under the convention
/// gcd(0, x) = x: an exponent that is 0 mod the order never generates.
fn exponent_gcd(e: &BigInt, order: u64) -> u64 {
    let r = (e.abs() % BigInt::from(order))
        .to_u64()
        .expect("residue fits u64");
    if r == 0 {
        order
    } else {
        r.gcd(&order)
    }
}

/// The unit-exponent signed integer `sum_j k_j M / m_j - k M` for a
/// Carlitz-type equation.
pub(crate) fn carlitz_scaling_exponent(eq: &CarlitzEquation, f: &FieldSpec) -> BigInt {
    let lcm = BigInt::from(eq.derived(f).exponent_lcm);
    let mut e = BigInt::zero();
    for (&kj, &mj) in eq.rhs_exponents().iter().zip(eq.exponents()) {
        e += BigInt::from(kj) * (&lcm / BigInt::from(mj));
    }
    e - BigInt::from(eq.outer_power()) * lcm
}

/// gcd(sum_j k_j M/m_j - k M, q-1) = 1, the lcm form of the scaling
/// hypothesis.
pub fn carlitz_gcd_condition(eq: &CarlitzEquation, f: &FieldSpec) -> bool {
    exponent_gcd(&carlitz_scaling_exponent(eq, f), f.q() - 1) == 1
}

/// gcd(sum_j k_j m_1...m_n / m_j - k m_1...m_n, q-1) = 1, the product form
/// of the same hypothesis.
pub fn pzc_condition(eq: &CarlitzEquation, f: &FieldSpec) -> bool {
    let prod: BigInt = eq
        .exponents()
        .iter()
        .fold(BigInt::from(1u32), |acc, &m| acc * BigInt::from(m));
    let mut e = BigInt::zero();
    for (&kj, &mj) in eq.rhs_exponents().iter().zip(eq.exponents()) {
        e += BigInt::from(kj) * (&prod / BigInt::from(mj));
    }
    e -= BigInt::from(eq.outer_power()) * prod;
    exponent_gcd(&e, f.q() - 1) == 1
}

/// The product-form condition holds exactly when the lcm-form condition and
/// pairwise coprimality of the reduced exponents both hold. Must always be
/// true; exposed so the property test is a one-liner.
pub fn conditions_equivalence(eq: &CarlitzEquation, f: &FieldSpec) -> bool {
    let lhs = pzc_condition(eq, f);
    let rhs = carlitz_gcd_condition(eq, f) && pairwise_coprime(&eq.derived(f).reduced);
    lhs == rhs
}

/// Stable reordering that puts odd reduced exponents first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thm4Split {
    /// Number of odd entries, placed first.
    pub odd_count: usize,
    /// `permutation[i]` is the original index of the i-th entry after the
    /// reorder; coefficient vectors are permuted alongside with `apply`.
    pub permutation: Vec<usize>,
}

impl Thm4Split {
    pub fn apply<T: Copy>(&self, items: &[T]) -> Vec<T> {
        self.permutation.iter().map(|&i| items[i]).collect()
    }
}

/// Splits the reduced exponents into odd ones followed by even ones, when
/// d_1, ..., d_t, d_{t+1}/2, ..., d_n/2 (in the permuted order) are
/// pairwise coprime. Returns `None` otherwise.
pub fn thm4_split(reduced: &[u64]) -> Option<Thm4Split> {
    let mut permutation: Vec<usize> = (0..reduced.len())
        .filter(|&i| reduced[i] % 2 == 1)
        .collect();
    let odd_count = permutation.len();
    permutation.extend((0..reduced.len()).filter(|&i| reduced[i].is_multiple_of(2)));
    let halved: Vec<u64> = permutation
        .iter()
        .enumerate()
        .map(|(pos, &i)| {
            if pos < odd_count {
                reduced[i]
            } else {
                reduced[i] / 2
            }
        })
        .collect();
    if pairwise_coprime(&halved) {
        Some(Thm4Split {
            odd_count,
            permutation,
        })
    } else {
        None
    }
}

/// The restricted-shape condition (all coefficients 1, all right-hand
/// exponents 1): gcd(sum_j M/m_j - k M, (q-1)/D) = 1 together with pairwise
/// coprime reduced exponents. Returns false when the equation is not of
/// that shape.
pub fn baoulina_condition(eq: &CarlitzEquation, f: &FieldSpec) -> bool {
    let shape_ok =
        eq.coeffs().iter().all(|&a| a == f.one()) && eq.rhs_exponents().iter().all(|&k| k == 1);
    if !shape_ok {
        return false;
    }
    let derived = eq.derived(f);
    if !pairwise_coprime(&derived.reduced) {
        return false;
    }
    let lcm = BigInt::from(derived.exponent_lcm.clone());
    let mut e = BigInt::zero();
    for &mj in eq.exponents() {
        e += &lcm / BigInt::from(mj);
    }
    e -= BigInt::from(eq.outer_power()) * lcm;
    exponent_gcd(&e, (f.q() - 1) / derived.reduced_lcm) == 1
}

/// Verifies the scaling identity `f(c^{r_1} x_1, ...) = c^r f(x)` for every
/// `c`, with the default tuple-evaluation budget.
pub fn quasihomogeneity_check(eq: &QuasiHomogeneousEquation, f: &FieldSpec) -> bool {
    quasihomogeneity_check_with_cap(eq, f, DEFAULT_WORK_CAP)
}

/// Same as [`quasihomogeneity_check`] with an explicit budget: the identity
/// is checked for all `(c, x)` when `q^{n+1}` fits the budget, otherwise on
/// a fixed-seed sample of 1000 pairs. The structural test (every term
/// satisfies `sum_j r_j e_j = r (mod q-1)`, no constant term) must agree
/// with the evaluation test; a mismatch is an arithmetic bug, not an input
/// error, and panics.
pub fn quasihomogeneity_check_with_cap(
    eq: &QuasiHomogeneousEquation,
    f: &FieldSpec,
    cap: u64,
) -> bool {
    let q = f.q();
    let order = q - 1;
    let structural = eq.terms().iter().all(|term| {
        let mut sum = 0u64;
        for (&r, &e) in eq.weights().iter().zip(&term.exponents) {
            if order > 1 {
                sum = (sum + (r % order) * (e % order)) % order;
            }
        }
        order <= 1 || sum == eq.degree() % order
    });

    let n = eq.var_count();
    let exhaustive_cost = checked_pow_u128(q, n as u32 + 1);
    let by_evaluation = match exhaustive_cost {
        Some(cost) if cost <= cap as u128 => {
            let mut ok = true;
            let mut x = vec![f.zero(); n];
            'outer: loop {
                for c in f.elements() {
                    if !scaling_identity_holds(eq, f, c, &x) {
                        ok = false;
                        break 'outer;
                    }
                }
                if !advance(&mut x, q) {
                    break;
                }
            }
            ok
        }
        _ => {
            let mut rng = StdRng::seed_from_u64(0x7146_5EED ^ q);
            (0..1000).all(|_| {
                let c = FieldElement(rng.gen_range(0..q));
                let x: Vec<FieldElement> =
                    (0..n).map(|_| FieldElement(rng.gen_range(0..q))).collect();
                scaling_identity_holds(eq, f, c, &x)
            })
        }
    };

    assert_eq!(
        structural, by_evaluation,
        "quasi-homogeneity checks disagree for {eq:?} over {f}"
    );
    structural
}

fn scaling_identity_holds(
    eq: &QuasiHomogeneousEquation,
    f: &FieldSpec,
    c: FieldElement,
    x: &[FieldElement],
) -> bool {
    let scaled: Vec<FieldElement> = x
        .iter()
        .zip(eq.weights())
        .map(|(&xi, &r)| f.mul(f.pow(c, r), xi))
        .collect();
    eq.eval_at(f, &scaled) == f.mul(f.pow(c, eq.degree()), eq.eval_at(f, x))
}

fn advance(x: &mut [FieldElement], q: u64) -> bool {
    for xi in x.iter_mut() {
        if xi.0 + 1 < q {
            xi.0 += 1;
            return true;
        }
        xi.0 = 0;
    }
    false
}

fn checked_pow_u128(base: u64, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// gcd(sum_j k_j r_j - r, q-1) = 1 for a quasi-homogeneous equation.
pub fn quasihomog_gcd_condition(
    eq: &QuasiHomogeneousEquation,
    f: &FieldSpec,
) -> Result<bool, EquationError> {
    if !quasihomogeneity_check(eq, f) {
        return Err(EquationError::NotQuasiHomogeneous);
    }
    Ok(quasihomog_exponent_coprime(eq, f))
}

/// The bare gcd test, for callers that have already verified
/// quasi-homogeneity.
pub(crate) fn quasihomog_exponent_coprime(eq: &QuasiHomogeneousEquation, f: &FieldSpec) -> bool {
    let mut e = BigInt::zero();
    for (&k, &r) in eq.rhs_exponents().iter().zip(eq.weights()) {
        e += BigInt::from(k) * BigInt::from(r);
    }
    e -= BigInt::from(eq.degree());
    exponent_gcd(&e, f.q() - 1) == 1
}
