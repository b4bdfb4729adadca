//! Random equation instances for sweeps and randomized checks. Everything
//! is driven by a caller-supplied RNG, so fixed seeds give fixed instances.

use rand::Rng;

use crate::equations::{CarlitzEquation, DiagonalEquation};
use crate::ff::{FieldElement, FieldSpec};

pub fn random_nonzero_element(f: &FieldSpec, rng: &mut impl Rng) -> FieldElement {
    f.element_from_index(rng.gen_range(1..f.q()))
        .expect("index below q")
}

/// Diagonal equation with random nonzero coefficients and exponents in
/// `1..=max_exp`.
pub fn random_diagonal(
    f: &FieldSpec,
    n: usize,
    max_exp: u64,
    rng: &mut impl Rng,
) -> DiagonalEquation {
    let coeffs = (0..n).map(|_| random_nonzero_element(f, rng)).collect();
    let exponents = (0..n).map(|_| rng.gen_range(1..=max_exp)).collect();
    DiagonalEquation::new(f, coeffs, exponents).expect("sampled equation is valid")
}

/// Carlitz-type equation with random nonzero coefficients, inner exponents
/// in `1..=max_exp`, and outer power and right-hand exponents in
/// `1..=max_power`.
pub fn random_carlitz(
    f: &FieldSpec,
    n: usize,
    max_exp: u64,
    max_power: u64,
    rng: &mut impl Rng,
) -> CarlitzEquation {
    let coeffs = (0..n).map(|_| random_nonzero_element(f, rng)).collect();
    let exponents = (0..n).map(|_| rng.gen_range(1..=max_exp)).collect();
    let outer = rng.gen_range(1..=max_power);
    let b = random_nonzero_element(f, rng);
    let rhs_exponents = (0..n).map(|_| rng.gen_range(1..=max_power)).collect();
    CarlitzEquation::new(f, coeffs, exponents, outer, b, rhs_exponents)
        .expect("sampled equation is valid")
}

/// Rejection-samples until `accept` passes, up to `attempts` tries.
pub fn sample_until<T>(
    attempts: usize,
    mut draw: impl FnMut() -> T,
    mut accept: impl FnMut(&T) -> bool,
) -> Option<T> {
    for _ in 0..attempts {
        let candidate = draw();
        if accept(&candidate) {
            return Some(candidate);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn sampling_is_deterministic_under_a_fixed_seed() {
        let f = make_field(7, 1).unwrap();
        let draw = || {
            let mut rng = StdRng::seed_from_u64(11);
            random_carlitz(&f, 3, 6, 6, &mut rng)
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn sampled_instances_respect_bounds() {
        let f = make_field(3, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let eq = random_carlitz(&f, 2, 5, 3, &mut rng);
            assert!(eq.exponents().iter().all(|&m| (1..=5).contains(&m)));
            assert!((1..=3).contains(&eq.outer_power()));
            assert!(eq.rhs_exponents().iter().all(|&k| (1..=3).contains(&k)));
            assert!(!eq.rhs_coeff().is_zero());
            assert!(eq.coeffs().iter().all(|a| !a.is_zero()));
        }
    }

    #[test]
    fn sample_until_gives_up() {
        let mut counter = 0;
        let result = sample_until(
            10,
            || {
                counter += 1;
                counter
            },
            |_| false,
        );
        assert_eq!(result, None);
        assert_eq!(counter, 10);
    }
}
