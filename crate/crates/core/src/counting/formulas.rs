//! Closed-form solution counts. All arithmetic is exact and unbounded;
//! results like q^{n-1} are valid far beyond machine-word counts even
//! though the enumeration oracle never gets there.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::counting::CountError;
use crate::equations::thm4_split;
use crate::ff::{FieldElement, FieldSpec};

fn big(q: u64) -> BigInt {
    BigInt::from(q)
}

fn sign(n: usize) -> BigInt {
    if n.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn to_count(value: BigInt) -> Result<BigUint, CountError> {
    value.to_biguint().ok_or(CountError::InconsistentSubcounts)
}

/// `q^{n-1}`: the diagonal count when some reduced exponent is coprime to
/// the product of the others.
pub fn formula_thm1(q: u64, n: usize) -> BigUint {
    big(q).pow(n as u32 - 1).to_biguint().expect("positive")
}

/// `((q-1)^n + (-1)^n (q-1)) / q`: the all-nonzero diagonal count for
/// pairwise coprime reduced exponents. The division is always exact.
pub fn formula_cor1(q: u64, n: usize) -> BigUint {
    let qm1 = big(q) - BigInt::one();
    let numerator = qm1.pow(n as u32) + sign(n) * &qm1;
    let (quot, rem) = num_integer::Integer::div_rem(&numerator, &big(q));
    assert!(rem.is_zero(), "q always divides (q-1)^n + (-1)^n (q-1)");
    quot.to_biguint().expect("count is nonnegative")
}

/// `q^{n-1} + (-1)^{n-1}`: the Carlitz-type count under the scaling-gcd
/// condition with pairwise coprime reduced exponents.
pub fn formula_thm2(q: u64, n: usize) -> BigUint {
    to_count(big(q).pow(n as u32 - 1) + sign(n - 1)).expect("q^{n-1} >= 1")
}

/// Same count as [`formula_thm2`], reached through the restricted-shape
/// condition on (q-1)/D.
pub fn formula_baoulina(q: u64, n: usize) -> BigUint {
    formula_thm2(q, n)
}

/// `(q-1)^{n-1} + N - q N* / (q-1)` where N and N* are the full and
/// all-nonzero counts of the reduced diagonal equation.
pub fn formula_thm3(
    q: u64,
    n: usize,
    n_diag: &BigUint,
    nstar_diag: &BigUint,
) -> Result<BigUint, CountError> {
    let qm1 = BigUint::from(q - 1);
    if !(nstar_diag % &qm1).is_zero() {
        return Err(CountError::DivisibilityViolation);
    }
    let scaled = BigInt::from(nstar_diag / &qm1) * big(q);
    let value = (big(q) - BigInt::one()).pow(n as u32 - 1) + BigInt::from(n_diag.clone()) - scaled;
    to_count(value)
}

/// The quadratic-character count for split reduced exponents:
/// `q^{n-1} + (-1)^{n-1} (1 + sum_j eta((-1)^j) sigma_{2j}(eta(a_{t+1}), ..., eta(a_n)) q^j)`
/// plus `eta((-1)^{n/2} a_1 ... a_n) q^{(n-2)/2} (q-1)` when every reduced
/// exponent is even and n is even.
pub fn formula_thm4(
    f: &FieldSpec,
    coeffs: &[FieldElement],
    reduced: &[u64],
) -> Result<BigUint, CountError> {
    let n = reduced.len();
    let split = thm4_split(reduced).ok_or(CountError::HypothesisFailed { name: "thm4_split" })?;
    let t = split.odd_count;
    let q = f.q();
    let mut value = big(q).pow(n as u32 - 1) + sign(n - 1);
    if t == n {
        // no even exponents: the character sum is empty, valid for even q too
        return to_count(value);
    }
    if q.is_multiple_of(2) {
        // even reduced exponents cannot divide the odd group order q - 1
        return Err(CountError::Field(
            crate::ff::FfError::EvenCharacteristicUndefined,
        ));
    }

    let eta = |x: FieldElement| -> Result<BigInt, CountError> {
        Ok(BigInt::from(f.quadratic_character(x)?.value()))
    };
    let permuted = split.apply(coeffs);
    let even_part: Vec<BigInt> = permuted[t..]
        .iter()
        .map(|&a| eta(a))
        .collect::<Result<_, _>>()?;
    let minus_one = f.neg(f.one());
    for j in 1..=(n - t) / 2 {
        let eta_sign = eta(f.pow(minus_one, j as u64))?;
        let sym = elementary_symmetric(&even_part, 2 * j)?;
        value += sign(n - 1) * eta_sign * sym * big(q).pow(j as u32);
    }
    if t == 0 && n.is_multiple_of(2) {
        let mut arg = f.pow(minus_one, (n / 2) as u64);
        for &a in coeffs {
            arg = f.mul(arg, a);
        }
        value += eta(arg)? * big(q).pow((n as u32 - 2) / 2) * (big(q) - BigInt::one());
    }
    to_count(value)
}

/// `(q-1)^{n-1} + N0 - q N0* / (q-1)` where N0 and N0* count `f(x) = 0`.
pub fn formula_quasihomog(
    q: u64,
    n: usize,
    n_zero: &BigUint,
    nstar_zero: &BigUint,
) -> Result<BigUint, CountError> {
    formula_thm3(q, n, n_zero, nstar_zero)
}

/// sigma_degree of the given values, by the product recurrence
/// (coefficient extraction from prod_i (1 + v_i z)); sigma_0 = 1.
pub fn elementary_symmetric(values: &[BigInt], degree: usize) -> Result<BigInt, CountError> {
    if degree > values.len() {
        return Err(CountError::DegreeOutOfRange {
            degree,
            len: values.len(),
        });
    }
    let mut dp = vec![BigInt::zero(); degree + 1];
    dp[0] = BigInt::one();
    for v in values {
        for k in (1..=degree).rev() {
            let add = &dp[k - 1] * v;
            dp[k] += add;
        }
    }
    Ok(dp.pop().expect("degree + 1 entries"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn thm1_values() {
        assert_eq!(formula_thm1(7, 2), n(7));
        assert_eq!(formula_thm1(2, 5), n(16));
        assert_eq!(formula_thm1(9, 3), n(81));
    }

    #[test]
    fn cor1_values() {
        assert_eq!(formula_cor1(7, 2), n(6));
        assert_eq!(formula_cor1(5, 3), n(12));
        assert_eq!(formula_cor1(2, 2), n(1));
    }

    #[test]
    fn thm2_values() {
        assert_eq!(formula_thm2(5, 3), n(26));
        assert_eq!(formula_thm2(7, 2), n(6));
        assert_eq!(formula_thm2(4, 4), n(63));
    }

    #[test]
    fn baoulina_values() {
        assert_eq!(formula_baoulina(7, 3), n(50));
        assert_eq!(formula_baoulina(5, 3), n(26));
        assert_eq!(formula_baoulina(4, 2), n(3));
    }

    #[test]
    fn thm3_arithmetic() {
        // diagonal x1^2 + x2^2 over GF(5): N = 9, N* = 8
        assert_eq!(formula_thm3(5, 2, &n(9), &n(8)).unwrap(), n(3));
        assert_eq!(
            formula_thm3(5, 2, &n(9), &n(7)).unwrap_err(),
            CountError::DivisibilityViolation
        );
    }

    #[test]
    fn thm3_reproduces_thm2_on_coprime_inputs() {
        for (q, nn) in [(5u64, 2usize), (7, 3), (9, 2), (13, 4), (4, 3)] {
            let got = formula_thm3(q, nn, &formula_thm1(q, nn), &formula_cor1(q, nn)).unwrap();
            assert_eq!(got, formula_thm2(q, nn));
        }
    }

    #[test]
    fn thm4_reduces_to_thm2_when_all_exponents_odd() {
        let f = make_field(7, 1).unwrap();
        let coeffs = vec![f.one(), f.scalar(3), f.scalar(5)];
        assert_eq!(
            formula_thm4(&f, &coeffs, &[1, 3, 1]).unwrap(),
            formula_thm2(7, 3)
        );
        // even q is fine when every reduced exponent is odd
        let f4 = make_field(2, 2).unwrap();
        let coeffs = vec![f4.one(), f4.element_from_index(2).unwrap()];
        assert_eq!(
            formula_thm4(&f4, &coeffs, &[1, 3]).unwrap(),
            formula_thm2(4, 2)
        );
    }

    #[test]
    fn thm4_two_even_squares_over_gf5() {
        // t = 0, n = 2, a = (1, 1), d = (2, 2):
        // 5 - 1 - eta(-1) sigma_2(1,1) * 5 + eta(-1) * (5-1) = 3
        let f = make_field(5, 1).unwrap();
        let coeffs = vec![f.one(), f.one()];
        assert_eq!(formula_thm4(&f, &coeffs, &[2, 2]).unwrap(), n(3));
    }

    #[test]
    fn thm4_single_even_exponent_has_empty_sum() {
        // q = 7, d = (1, 2): floor((n-t)/2) = 0 and t != 0, so only the base
        let f = make_field(7, 1).unwrap();
        let coeffs = vec![f.one(), f.one()];
        assert_eq!(formula_thm4(&f, &coeffs, &[1, 2]).unwrap(), n(6));
    }

    #[test]
    fn thm4_rejects_impossible_split() {
        let f = make_field(5, 1).unwrap();
        let coeffs = vec![f.one(), f.one()];
        assert_eq!(
            formula_thm4(&f, &coeffs, &[4, 4]).unwrap_err(),
            CountError::HypothesisFailed { name: "thm4_split" }
        );
    }

    #[test]
    fn elementary_symmetric_values() {
        let vals: Vec<BigInt> = [1i64, -1, -1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(elementary_symmetric(&vals, 2).unwrap(), BigInt::from(-1));
        assert_eq!(elementary_symmetric(&vals, 0).unwrap(), BigInt::from(1));
        let ones: Vec<BigInt> = std::iter::repeat_with(|| BigInt::from(1)).take(4).collect();
        assert_eq!(elementary_symmetric(&ones, 2).unwrap(), BigInt::from(6));
        assert!(matches!(
            elementary_symmetric(&ones, 5).unwrap_err(),
            CountError::DegreeOutOfRange { .. }
        ));
    }

    #[test]
    fn formula_values_exceed_machine_words() {
        // (2^20)^4 does not fit u64; exact arithmetic must not care
        let v = formula_thm1(1 << 20, 5);
        assert_eq!(v, BigUint::from(1u64 << 20).pow(4));
    }
}
