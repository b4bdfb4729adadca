//! Materialized solution-set fibrations and the explicit bijections
//! between fibers.
//!
//! For a diagonal equation with a pivot exponent coprime to the others, the
//! fibers are the solution sets S_c of `a_p c x_p^{d_p} + sum_j a_j x_j^{d_j} = 0`
//! as c runs over the field, with S'_c the solutions having `x_p != 0`. For
//! a Carlitz-type equation the fibers scale the right-hand side by c and
//! S*_c keeps the all-nonzero solutions. In both cases the restricted
//! fibers partition their tuple space, the unrestricted remainders are the
//! same set for every c, and an explicit coordinate scaling is a bijection
//! between any two restricted fibers. This module builds those sets,
//! applies the maps, and checks every claim by direct enumeration.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::counting::ensure_within_cap;
use crate::equations::{
    carlitz_scaling_exponent, thm1_applicable, CarlitzEquation, DiagonalEquation, EquationError,
};
use crate::ff::{FfError, FieldElement, FieldSpec};
use crate::DEFAULT_WORK_CAP;

/// Certificates carry an explicit pairing only up to this many solutions;
/// larger fibers are verified streaming and keep a fingerprint instead.
pub const CERTIFICATE_PAIR_LIMIT: usize = 100_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BijectionError {
    #[error("moduli are not coprime")]
    NotCoprime,
    #[error("scaling exponent is not integral for these reduced exponents")]
    ExponentNotIntegral,
    #[error("hypothesis {name} does not hold")]
    HypothesisFailed { name: &'static str },
    #[error("map is not a bijection for c = {c}: {reason}")]
    NotABijection { c: u64, reason: String },
    #[error("identity {name} violated")]
    IdentityViolated { name: &'static str },
    #[error("enumeration needs {needed} tuple evaluations, cap is {cap}")]
    WorkCapExceeded { needed: u128, cap: u64 },
    #[error("scaling constant must be nonzero")]
    ZeroScale,
    #[error("tuple is outside the restricted fiber (zero coordinate)")]
    ZeroCoordinate,
    #[error("exponent does not fit a machine word")]
    ExponentOverflow,
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}

fn check_cap(q: u64, n: usize, cap: u64) -> Result<(), BijectionError> {
    ensure_within_cap(q, n, cap).map_err(|err| match err {
        crate::counting::CountError::WorkCapExceeded { needed, cap } => {
            BijectionError::WorkCapExceeded { needed, cap }
        }
        _ => unreachable!("cap check only fails on the cap"),
    })
}

/// Smallest positive t with `t = 0 (mod d1)` and `t = 1 (mod rest)`.
pub fn crt_exponent(d1: u64, rest: u64) -> Result<u64, BijectionError> {
    if d1.gcd(&rest) != 1 {
        return Err(BijectionError::NotCoprime);
    }
    let t = crt_exponent_big(&BigUint::from(d1), &BigUint::from(rest));
    t.to_u64().ok_or(BijectionError::ExponentOverflow)
}

/// Exact-width version used internally: coprimality already checked.
fn crt_exponent_big(d1: &BigUint, rest: &BigUint) -> BigUint {
    if rest.is_one() {
        return d1.clone();
    }
    let inv = modular_inverse(&BigInt::from(d1.clone()), &BigInt::from(rest.clone()))
        .expect("coprime moduli");
    let t = d1 * inv.to_biguint().expect("canonical inverse");
    debug_assert!(!t.is_zero());
    t
}

fn modular_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let ext = a.extended_gcd(modulus);
    if !ext.gcd.is_one() {
        return None;
    }
    let mut x = ext.x % modulus;
    if x.is_negative() {
        x += modulus;
    }
    Some(x)
}

fn inverse_mod_u64(a: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    modular_inverse(&BigInt::from(a), &BigInt::from(modulus))
        .expect("unit residue")
        .to_u64()
        .expect("inverse below modulus")
}

/// Per-coordinate multipliers `(c^{t/d_p}, c^{(t-1)/d_j})` for the diagonal
/// fiber map with pivot `p`. Fails unless d_p | t and d_j | t - 1.
fn diag_scale_factors(
    f: &FieldSpec,
    c: FieldElement,
    reduced: &[u64],
    pivot: usize,
    t: &BigUint,
) -> Result<Vec<FieldElement>, BijectionError> {
    if c.is_zero() {
        return Err(BijectionError::ZeroScale);
    }
    let order = f.q() - 1;
    let t_minus_1 = t
        .checked_sub(&BigUint::one())
        .ok_or(BijectionError::ExponentNotIntegral)?;
    let mut factors = Vec::with_capacity(reduced.len());
    for (j, &d) in reduced.iter().enumerate() {
        let d = BigUint::from(d);
        let numerator = if j == pivot {
            t.clone()
        } else {
            t_minus_1.clone()
        };
        let (quot, rem) = numerator.div_rem(&d);
        if !rem.is_zero() {
            return Err(BijectionError::ExponentNotIntegral);
        }
        let e = (quot % BigUint::from(order))
            .to_u64()
            .expect("reduced exponent fits");
        factors.push(f.pow(c, e));
    }
    Ok(factors)
}

/// The scaling map between restricted diagonal fibers, pivot first
/// coordinate:
/// `(x_1, ..., x_n) -> (c^{t/d_1} x_1, c^{(t-1)/d_2} x_2, ...)`, which sends
/// solutions with right-hand scale c to solutions with scale 1.
pub fn thm1_map(
    f: &FieldSpec,
    c: FieldElement,
    reduced: &[u64],
    t: u64,
    x: &[FieldElement],
) -> Result<Vec<FieldElement>, BijectionError> {
    if x.first().is_some_and(|x1| x1.is_zero()) {
        return Err(BijectionError::ZeroCoordinate);
    }
    let factors = diag_scale_factors(f, c, reduced, 0, &BigUint::from(t))?;
    Ok(x.iter()
        .zip(&factors)
        .map(|(&xi, &m)| f.mul(m, xi))
        .collect())
}

/// Generator-power multipliers `g^{t M/m_j}` for the Carlitz fiber map,
/// where t solves `g^{t e} = c` for the scaling exponent e.
fn carlitz_scale_factors(
    f: &FieldSpec,
    c: FieldElement,
    eq: &CarlitzEquation,
) -> Result<Vec<FieldElement>, BijectionError> {
    if c.is_zero() {
        return Err(BijectionError::ZeroScale);
    }
    let order = f.q() - 1;
    let e = carlitz_scaling_exponent(eq, f);
    let e_mod = e
        .mod_floor(&BigInt::from(order))
        .to_u64()
        .expect("residue fits");
    if e_mod.gcd(&order) != 1 {
        return Err(BijectionError::HypothesisFailed {
            name: "carlitz_gcd_condition",
        });
    }
    // the multipliers g^{t M/m_j} scale the right-hand side by g^{-t e},
    // so the fiber of c is reached from the logarithm of c^{-1}
    let g = f.generator();
    let log_c_inv = f.discrete_log(g, f.inv(c)?)?;
    let t = log_c_inv * inverse_mod_u64(e_mod, order) % order;
    Ok(carlitz_factors_with_t(f, eq, t))
}

/// Multipliers for an explicit t; t only matters modulo q - 1.
fn carlitz_factors_with_t(f: &FieldSpec, eq: &CarlitzEquation, t: u64) -> Vec<FieldElement> {
    let order = f.q() - 1;
    let g = f.generator();
    let lcm = crate::equations::reduce_exponents(eq.exponents(), f.q()).exponent_lcm;
    eq.exponents()
        .iter()
        .map(|&m| {
            let weight = (&lcm / BigUint::from(m)) % BigUint::from(order);
            let e = t % order * weight.to_u64().expect("below order") % order;
            f.pow(g, e)
        })
        .collect()
}

/// The scaling map between restricted Carlitz fibers:
/// `(x_1, ..., x_n) -> (g^{t M/m_1} x_1, ..., g^{t M/m_n} x_n)` where
/// `c = g^{t e}`; sends all-nonzero solutions at scale 1 to scale c.
pub fn thm2_map(
    f: &FieldSpec,
    c: FieldElement,
    eq: &CarlitzEquation,
    x: &[FieldElement],
) -> Result<Vec<FieldElement>, BijectionError> {
    if x.iter().any(|xi| xi.is_zero()) {
        return Err(BijectionError::ZeroCoordinate);
    }
    let factors = carlitz_scale_factors(f, c, eq)?;
    Ok(x.iter()
        .zip(&factors)
        .map(|(&xi, &m)| f.mul(m, xi))
        .collect())
}

/// Which family of fibers a [`FiberFamily`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberKind {
    #[serde(rename = "diag-prime-variable")]
    DiagPrimeVariable,
    #[serde(rename = "carlitz-all-variables")]
    CarlitzAllVariables,
}

type Tuple = Vec<u32>;

#[derive(Debug)]
enum FamilyEquation {
    /// Reduced diagonal equation plus the pivot index whose exponent is
    /// coprime to the others.
    Diag {
        eq: DiagonalEquation,
        pivot: usize,
    },
    Carlitz(CarlitzEquation),
}

/// All fibers of one equation, materialized: for every c the restricted
/// solution set, plus the common remainder shared by every unrestricted
/// fiber.
#[derive(Debug)]
pub struct FiberFamily {
    field: FieldSpec,
    equation: FamilyEquation,
    work_cap: u64,
    /// restricted[c] is S'_c (pivot coordinate nonzero) or S*_c (all
    /// coordinates nonzero), in enumeration order.
    restricted: Vec<Vec<Tuple>>,
    /// Tuples lying in S_c \ S'_c for every c simultaneously.
    complement: Vec<Tuple>,
}

impl FiberFamily {
    /// Fibers of a diagonal equation. The exponents are reduced first; the
    /// pivot is the first coordinate whose reduced exponent is coprime to
    /// all others.
    pub fn diagonal(f: &FieldSpec, eq: &DiagonalEquation) -> Result<Self, BijectionError> {
        Self::diagonal_with_cap(f, eq, DEFAULT_WORK_CAP)
    }

    pub fn diagonal_with_cap(
        f: &FieldSpec,
        eq: &DiagonalEquation,
        cap: u64,
    ) -> Result<Self, BijectionError> {
        let reduced = eq.reduced(f);
        let pivot =
            thm1_applicable(reduced.exponents()).ok_or(BijectionError::HypothesisFailed {
                name: "thm1_applicable",
            })?;
        let n = eq.var_count();
        check_cap(f.q(), n, cap)?;

        let q = f.q();
        let mut restricted = vec![Vec::new(); q as usize];
        let mut complement = Vec::new();
        let coeffs = reduced.coeffs().to_vec();
        let exps = reduced.exponents().to_vec();
        for_each_tuple(q, n, |tuple| {
            let mut rest = f.zero();
            for (j, &x) in tuple.iter().enumerate() {
                if j != pivot {
                    rest = f.add(
                        rest,
                        f.mul(coeffs[j], f.pow(FieldElement(x as u64), exps[j])),
                    );
                }
            }
            let xp = FieldElement(tuple[pivot] as u64);
            if xp.is_zero() {
                if rest.is_zero() {
                    complement.push(tuple.to_vec());
                }
            } else {
                // unique c with a_p c x_p^{d_p} = -rest
                let denom = f.mul(coeffs[pivot], f.pow(xp, exps[pivot]));
                let c = f.div(f.neg(rest), denom).expect("pivot term is nonzero");
                restricted[c.index() as usize].push(tuple.to_vec());
            }
        });
        Ok(FiberFamily {
            field: f.clone(),
            equation: FamilyEquation::Diag { eq: reduced, pivot },
            work_cap: cap,
            restricted,
            complement,
        })
    }

    /// Fibers of a Carlitz-type equation, scaling the right-hand side by c.
    pub fn carlitz(f: &FieldSpec, eq: &CarlitzEquation) -> Result<Self, BijectionError> {
        Self::carlitz_with_cap(f, eq, DEFAULT_WORK_CAP)
    }

    pub fn carlitz_with_cap(
        f: &FieldSpec,
        eq: &CarlitzEquation,
        cap: u64,
    ) -> Result<Self, BijectionError> {
        let n = eq.var_count();
        check_cap(f.q(), n, cap)?;
        let q = f.q();
        let mut restricted = vec![Vec::new(); q as usize];
        let mut complement = Vec::new();
        for_each_tuple(q, n, |tuple| {
            let mut lhs = f.zero();
            for (j, &x) in tuple.iter().enumerate() {
                lhs = f.add(
                    lhs,
                    f.mul(
                        eq.coeffs()[j],
                        f.pow(FieldElement(x as u64), eq.exponents()[j]),
                    ),
                );
            }
            let lhs = f.pow(lhs, eq.outer_power());
            if tuple.contains(&0) {
                if lhs.is_zero() {
                    complement.push(tuple.to_vec());
                }
            } else {
                let mut monomial = eq.rhs_coeff();
                for (j, &x) in tuple.iter().enumerate() {
                    monomial = f.mul(
                        monomial,
                        f.pow(FieldElement(x as u64), eq.rhs_exponents()[j]),
                    );
                }
                let c = f.div(lhs, monomial).expect("monomial is nonzero");
                restricted[c.index() as usize].push(tuple.to_vec());
            }
        });
        Ok(FiberFamily {
            field: f.clone(),
            equation: FamilyEquation::Carlitz(eq.clone()),
            work_cap: cap,
            restricted,
            complement,
        })
    }

    pub fn kind(&self) -> FiberKind {
        match self.equation {
            FamilyEquation::Diag { .. } => FiberKind::DiagPrimeVariable,
            FamilyEquation::Carlitz(_) => FiberKind::CarlitzAllVariables,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn var_count(&self) -> usize {
        match &self.equation {
            FamilyEquation::Diag { eq, .. } => eq.var_count(),
            FamilyEquation::Carlitz(eq) => eq.var_count(),
        }
    }

    /// S'_c (or S*_c) for the fiber scaled by the element with index c.
    pub fn restricted_fiber(&self, c: u64) -> &[Tuple] {
        &self.restricted[c as usize]
    }

    /// Tuples belonging to every unrestricted fiber.
    pub fn common_complement(&self) -> &[Tuple] {
        &self.complement
    }

    pub fn full_fiber_size(&self, c: u64) -> u64 {
        (self.restricted[c as usize].len() + self.complement.len()) as u64
    }

    /// Membership test straight from the equation, independent of the
    /// materialized sets.
    pub fn is_solution(&self, c: FieldElement, tuple: &[u32]) -> bool {
        let f = &self.field;
        match &self.equation {
            FamilyEquation::Diag { eq, pivot } => {
                let mut acc = f.zero();
                for (j, &x) in tuple.iter().enumerate() {
                    let mut term = f.mul(
                        eq.coeffs()[j],
                        f.pow(FieldElement(x as u64), eq.exponents()[j]),
                    );
                    if j == *pivot {
                        term = f.mul(term, c);
                    }
                    acc = f.add(acc, term);
                }
                acc.is_zero()
            }
            FamilyEquation::Carlitz(eq) => {
                let mut lhs = f.zero();
                for (j, &x) in tuple.iter().enumerate() {
                    lhs = f.add(
                        lhs,
                        f.mul(
                            eq.coeffs()[j],
                            f.pow(FieldElement(x as u64), eq.exponents()[j]),
                        ),
                    );
                }
                let lhs = f.pow(lhs, eq.outer_power());
                let mut rhs = f.mul(eq.rhs_coeff(), c);
                for (j, &x) in tuple.iter().enumerate() {
                    rhs = f.mul(rhs, f.pow(FieldElement(x as u64), eq.rhs_exponents()[j]));
                }
                lhs == rhs
            }
        }
    }

    fn restricted_support(&self, tuple: &[u32]) -> bool {
        match &self.equation {
            FamilyEquation::Diag { pivot, .. } => tuple[*pivot] != 0,
            FamilyEquation::Carlitz(_) => tuple.iter().all(|&x| x != 0),
        }
    }

    /// Per-coordinate multipliers of the fiber bijection for scale c, and
    /// the direction it maps: diagonal fibers map S'_c -> S'_1, Carlitz
    /// fibers map S*_1 -> S*_c.
    fn bijection_factors(
        &self,
        c: FieldElement,
    ) -> Result<(Vec<FieldElement>, u64, u64), BijectionError> {
        let f = &self.field;
        match &self.equation {
            FamilyEquation::Diag { eq, pivot } => {
                let reduced = eq.exponents();
                let rest = reduced
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != *pivot)
                    .fold(BigUint::one(), |acc, (_, &d)| acc * BigUint::from(d));
                let t = crt_exponent_big(&BigUint::from(reduced[*pivot]), &rest);
                let factors = diag_scale_factors(f, c, reduced, *pivot, &t)?;
                Ok((factors, c.index(), 1))
            }
            FamilyEquation::Carlitz(eq) => {
                let factors = carlitz_scale_factors(f, c, eq)?;
                Ok((factors, 1, c.index()))
            }
        }
    }
}

fn for_each_tuple(q: u64, n: usize, mut visit: impl FnMut(&[u32])) {
    let mut tuple = vec![0u32; n];
    loop {
        visit(&tuple);
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            tuple[pos] += 1;
            if u64::from(tuple[pos]) < q {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// An explicitly verified pairing between two restricted fibers.
#[derive(Debug, Clone, Serialize)]
pub struct BijectionCertificate {
    /// Element index of the source fiber's scale.
    pub source_c: u64,
    /// Element index of the target fiber's scale.
    pub target_c: u64,
    /// Common cardinality of source and target.
    pub size: u64,
    /// Explicit pairs when the fiber is small enough to store them.
    #[serde(skip)]
    pub pairs: Option<Vec<(Tuple, Tuple)>>,
    /// Order-sensitive fingerprint of the full pairing.
    pub pairing_hash: String,
}

/// Applies the fiber bijection for scale `c`, checking totality, injectivity,
/// surjectivity, and that the inverse scaling takes the target back into the
/// source.
pub fn verify_bijection(
    family: &FiberFamily,
    c: FieldElement,
) -> Result<BijectionCertificate, BijectionError> {
    let f = family.field();
    if c.is_zero() {
        return Err(BijectionError::ZeroScale);
    }
    let (factors, source_c, target_c) = family.bijection_factors(c)?;
    let source = family.restricted_fiber(source_c);
    let target = family.restricted_fiber(target_c);
    let fail = |reason: &str| BijectionError::NotABijection {
        c: c.index(),
        reason: reason.to_string(),
    };

    if source.len() != target.len() {
        return Err(fail("source and target cardinalities differ"));
    }
    let target_set: HashSet<&[u32]> = target.iter().map(|t| t.as_slice()).collect();
    let source_set: HashSet<&[u32]> = source.iter().map(|t| t.as_slice()).collect();

    let apply = |tuple: &[u32], mults: &[FieldElement]| -> Tuple {
        tuple
            .iter()
            .zip(mults)
            .map(|(&x, &m)| f.mul(m, FieldElement(x as u64)).index() as u32)
            .collect()
    };

    let mut image_set: HashSet<Tuple> = HashSet::with_capacity(source.len());
    let mut pairs = Vec::new();
    let keep_pairs = source.len() <= CERTIFICATE_PAIR_LIMIT;
    let mut hasher = DefaultHasher::new();
    for tuple in source {
        let image = apply(tuple, &factors);
        if !target_set.contains(image.as_slice()) {
            return Err(fail("image leaves the target fiber"));
        }
        if !image_set.insert(image.clone()) {
            return Err(fail("two sources share an image"));
        }
        (tuple, &image).hash(&mut hasher);
        if keep_pairs {
            pairs.push((tuple.clone(), image));
        }
    }

    // inverse scaling must be total on the target and land in the source
    let inverse_factors: Vec<FieldElement> = factors
        .iter()
        .map(|&m| f.inv(m).expect("scale factors are nonzero"))
        .collect();
    for tuple in target {
        let back = apply(tuple, &inverse_factors);
        if !source_set.contains(back.as_slice()) {
            return Err(fail("inverse image leaves the source fiber"));
        }
    }

    Ok(BijectionCertificate {
        source_c,
        target_c,
        size: source.len() as u64,
        pairs: keep_pairs.then_some(pairs),
        pairing_hash: format!("{:016x}", hasher.finish()),
    })
}

/// One verified counting identity, with both sides.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: u64,
    pub rhs: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberSize {
    pub c: u64,
    pub full: u64,
    pub restricted: u64,
}

/// The counting identities of a fiber family, each recomputed by direct
/// enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub kind: FiberKind,
    pub q: u64,
    pub n: usize,
    pub fiber_sizes: Vec<FiberSize>,
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
}

/// Checks the difference identity, the partition sums, the zero-fiber
/// scaling identities, uniqueness of the fiber a tuple belongs to, and the
/// invariance of the unrestricted remainder. Every count on the
/// left-hand sides is recomputed from the equation, not read off the
/// stored sets.
pub fn verify_identities(family: &FiberFamily) -> Result<IdentityReport, BijectionError> {
    let f = family.field();
    let q = f.q();
    let n = family.var_count();
    let mut checks = Vec::new();

    // independent recounts of S_1, S'_1, S_0, S'_0
    let (mut s1, mut s1r, mut s0, mut s0r) = (0u64, 0u64, 0u64, 0u64);
    for_each_tuple(q, n, |tuple| {
        let in_support = family.restricted_support(tuple);
        if family.is_solution(f.one(), tuple) {
            s1 += 1;
            if in_support {
                s1r += 1;
            }
        }
        if family.is_solution(f.zero(), tuple) {
            s0 += 1;
            if in_support {
                s0r += 1;
            }
        }
    });

    checks.push(IdentityCheck {
        name: "fiber_difference",
        lhs: s1,
        rhs: s1r + s0 - s0r,
        pass: s1 == s1r + s0 - s0r,
    });

    let partition_sum: u64 = family.restricted.iter().map(|s| s.len() as u64).sum();
    let expected_sum = match family.kind() {
        // q^{n-1} (q-1) tuples with the pivot coordinate nonzero
        FiberKind::DiagPrimeVariable => q.pow(n as u32 - 1) * (q - 1),
        // (q-1)^n all-nonzero tuples
        FiberKind::CarlitzAllVariables => (q - 1).pow(n as u32),
    };
    checks.push(IdentityCheck {
        name: "fiber_partition_sum",
        lhs: partition_sum,
        rhs: expected_sum,
        pass: partition_sum == expected_sum,
    });

    if family.kind() == FiberKind::DiagPrimeVariable {
        // |S'_1| = q^{n-1} - |S'_0| / (q-1)
        let divisible = s0r % (q - 1) == 0;
        let rhs = q.pow(n as u32 - 1).saturating_sub(s0r / (q - 1));
        checks.push(IdentityCheck {
            name: "restricted_vs_zero_fiber",
            lhs: s1r,
            rhs,
            pass: divisible && s1r == rhs,
        });
        // |S_0| = q |S'_0| / (q-1)
        let rhs = q * (s0r / (q - 1));
        checks.push(IdentityCheck {
            name: "zero_fiber_scaling",
            lhs: s0,
            rhs,
            pass: divisible && s0 == rhs,
        });
    }

    // every supported tuple lies in exactly one restricted fiber, and the
    // remainder is the same set for every c
    let scan_cost = (q as u128).pow(n as u32 + 1);
    if scan_cost <= family.work_cap as u128 {
        let mut unique_ok = 0u64;
        let mut support_total = 0u64;
        let complement_set: HashSet<&[u32]> =
            family.complement.iter().map(|t| t.as_slice()).collect();
        let mut complement_matches = 0u64;
        let mut complement_counts_ok = true;
        let mut per_c_complements = vec![0u64; q as usize];
        for_each_tuple(q, n, |tuple| {
            if family.restricted_support(tuple) {
                support_total += 1;
                let members = f
                    .elements()
                    .filter(|&c| family.is_solution(c, tuple))
                    .count();
                if members == 1 {
                    unique_ok += 1;
                }
            } else {
                for c in f.elements() {
                    if family.is_solution(c, tuple) {
                        per_c_complements[c.index() as usize] += 1;
                        if complement_set.contains(tuple) {
                            complement_matches += 1;
                        } else {
                            complement_counts_ok = false;
                        }
                    }
                }
            }
        });
        checks.push(IdentityCheck {
            name: "unique_fiber_partition",
            lhs: unique_ok,
            rhs: support_total,
            pass: unique_ok == support_total,
        });
        let expected_matches = family.complement.len() as u64 * q;
        let complements_equal = per_c_complements
            .iter()
            .all(|&v| v == family.complement.len() as u64);
        checks.push(IdentityCheck {
            name: "complement_invariance",
            lhs: complement_matches,
            rhs: expected_matches,
            pass: complement_counts_ok
                && complements_equal
                && complement_matches == expected_matches,
        });
    }

    let fiber_sizes: Vec<FiberSize> = (0..q)
        .map(|c| FiberSize {
            c,
            full: family.full_fiber_size(c),
            restricted: family.restricted[c as usize].len() as u64,
        })
        .collect();
    let pass = checks.iter().all(|check| check.pass);
    let report = IdentityReport {
        kind: family.kind(),
        q,
        n,
        fiber_sizes,
        checks,
        pass,
    };
    if pass {
        Ok(report)
    } else {
        let name = report
            .checks
            .iter()
            .find(|c| !c.pass)
            .map(|c| c.name)
            .expect("some check failed");
        Err(BijectionError::IdentityViolated { name })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    fn gf(p: u64, s: u32) -> FieldSpec {
        make_field(p, s).unwrap()
    }

    #[test]
    fn crt_exponent_examples() {
        assert_eq!(crt_exponent(3, 4).unwrap(), 9);
        assert_eq!(crt_exponent(1, 5).unwrap(), 1);
        assert_eq!(crt_exponent(2, 2).unwrap_err(), BijectionError::NotCoprime);
        assert_eq!(crt_exponent(3, 1).unwrap(), 3);
        assert_eq!(crt_exponent(5, 6).unwrap() % 5, 0);
        assert_eq!(crt_exponent(5, 6).unwrap() % 6, 1);
    }

    #[test]
    fn thm1_map_with_unit_scale_is_identity() {
        let f = gf(7, 1);
        let x = vec![f.scalar(3), f.scalar(4)];
        let y = thm1_map(&f, f.one(), &[1, 3], 1, &x).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn thm1_map_scales_first_coordinate_for_linear_pivot() {
        // d = (1, 3), t = 1: map is (c x_1, x_2)
        let f = gf(7, 1);
        let c = f.scalar(4);
        let x = vec![f.scalar(3), f.scalar(2)];
        let y = thm1_map(&f, c, &[1, 3], 1, &x).unwrap();
        assert_eq!(y, vec![f.mul(c, x[0]), x[1]]);
    }

    #[test]
    fn maps_reject_zero_coordinates() {
        let f = gf(7, 1);
        assert_eq!(
            thm1_map(&f, f.scalar(2), &[1, 3], 1, &[f.zero(), f.one()]).unwrap_err(),
            BijectionError::ZeroCoordinate
        );
        let eq = classical_carlitz(&f, 2);
        assert_eq!(
            thm2_map(&f, f.scalar(2), &eq, &[f.one(), f.zero()]).unwrap_err(),
            BijectionError::ZeroCoordinate
        );
    }

    #[test]
    fn thm1_map_rejects_non_integral_exponents() {
        let f = gf(7, 1);
        let x = vec![f.one(), f.one()];
        assert_eq!(
            thm1_map(&f, f.scalar(2), &[2, 3], 3, &x).unwrap_err(),
            BijectionError::ExponentNotIntegral
        );
    }

    fn classical_carlitz(f: &FieldSpec, n: usize) -> CarlitzEquation {
        CarlitzEquation::new(f, vec![f.one(); n], vec![1; n], 2, f.one(), vec![1; n]).unwrap()
    }

    #[test]
    fn thm2_map_with_unit_scale_is_identity() {
        let f = gf(5, 1);
        let eq = classical_carlitz(&f, 3);
        let x = vec![f.scalar(2), f.scalar(3), f.scalar(4)];
        assert_eq!(thm2_map(&f, f.one(), &eq, &x).unwrap(), x);
    }

    #[test]
    fn thm2_map_requires_unit_scaling_exponent() {
        // m = (2, 2), k = 1, kv = (1, 1): e = 0
        let f = gf(5, 1);
        let eq =
            CarlitzEquation::new(&f, vec![f.one(); 2], vec![2, 2], 1, f.one(), vec![1, 1]).unwrap();
        assert_eq!(
            thm2_map(&f, f.scalar(2), &eq, &[f.one(), f.one()]).unwrap_err(),
            BijectionError::HypothesisFailed {
                name: "carlitz_gcd_condition"
            }
        );
    }

    #[test]
    fn thm2_factors_depend_on_t_only_modulo_group_order() {
        let f = gf(5, 1);
        let eq = classical_carlitz(&f, 3);
        for t in 0..4 {
            assert_eq!(
                carlitz_factors_with_t(&f, &eq, t),
                carlitz_factors_with_t(&f, &eq, t + (f.q() - 1))
            );
        }
    }

    #[test]
    fn thm2_map_sends_unit_fiber_to_scaled_fiber() {
        let f = gf(5, 1);
        let eq = classical_carlitz(&f, 3);
        let family = FiberFamily::carlitz(&f, &eq).unwrap();
        for c in f.nonzero_elements() {
            for tuple in family.restricted_fiber(1) {
                let x: Vec<FieldElement> =
                    tuple.iter().map(|&v| FieldElement(u64::from(v))).collect();
                let y = thm2_map(&f, c, &eq, &x).unwrap();
                let y_idx: Vec<u32> = y.iter().map(|e| e.index() as u32).collect();
                assert!(family.is_solution(c, &y_idx));
            }
        }
    }

    #[test]
    fn diag_bijections_all_scales_gf7() {
        let f = gf(7, 1);
        let eq = DiagonalEquation::new(&f, vec![f.one(), f.one()], vec![1, 3]).unwrap();
        let family = FiberFamily::diagonal(&f, &eq).unwrap();
        let base = family.restricted_fiber(1).len();
        for c in f.nonzero_elements() {
            let cert = verify_bijection(&family, c).unwrap();
            assert_eq!(cert.size as usize, base);
            assert_eq!(cert.target_c, 1);
        }
    }

    #[test]
    fn diag_bijection_certificate_for_unit_scale_is_identity_pairing() {
        let f = gf(7, 1);
        let eq = DiagonalEquation::new(&f, vec![f.one(), f.one()], vec![1, 3]).unwrap();
        let family = FiberFamily::diagonal(&f, &eq).unwrap();
        let cert = verify_bijection(&family, f.one()).unwrap();
        for (src, dst) in cert.pairs.as_ref().unwrap() {
            assert_eq!(src, dst);
        }
    }

    #[test]
    fn carlitz_bijections_all_scales_gf5() {
        let f = gf(5, 1);
        let eq = classical_carlitz(&f, 3);
        let family = FiberFamily::carlitz(&f, &eq).unwrap();
        let base = family.restricted_fiber(1).len();
        for c in f.nonzero_elements() {
            let cert = verify_bijection(&family, c).unwrap();
            assert_eq!(cert.size as usize, base);
            assert_eq!(cert.source_c, 1);
        }
    }

    #[test]
    fn composition_with_inverse_closes() {
        let f = gf(7, 1);
        let eq = DiagonalEquation::new(&f, vec![f.scalar(2), f.scalar(3)], vec![1, 3]).unwrap();
        let family = FiberFamily::diagonal(&f, &eq).unwrap();
        for c in f.nonzero_elements() {
            let (factors, source_c, _) = family.bijection_factors(c).unwrap();
            let inverse: Vec<FieldElement> = factors.iter().map(|&m| f.inv(m).unwrap()).collect();
            for tuple in family.restricted_fiber(source_c) {
                let forward: Vec<u32> = tuple
                    .iter()
                    .zip(&factors)
                    .map(|(&x, &m)| f.mul(m, FieldElement(u64::from(x))).index() as u32)
                    .collect();
                let back: Vec<u32> = forward
                    .iter()
                    .zip(&inverse)
                    .map(|(&x, &m)| f.mul(m, FieldElement(u64::from(x))).index() as u32)
                    .collect();
                assert_eq!(&back, tuple);
            }
        }
    }

    #[test]
    fn identities_diag_gf7() {
        let f = gf(7, 1);
        let eq = DiagonalEquation::new(&f, vec![f.one(), f.one()], vec![1, 3]).unwrap();
        let family = FiberFamily::diagonal(&f, &eq).unwrap();
        let report = verify_identities(&family).unwrap();
        assert!(report.pass);
        let partition = report
            .checks
            .iter()
            .find(|c| c.name == "fiber_partition_sum")
            .unwrap();
        assert_eq!(partition.rhs, 7 * 6); // q^{n-1} (q-1)
    }

    #[test]
    fn identities_carlitz_gf5() {
        let f = gf(5, 1);
        let family = FiberFamily::carlitz(&f, &classical_carlitz(&f, 3)).unwrap();
        let report = verify_identities(&family).unwrap();
        assert!(report.pass);
        let partition = report
            .checks
            .iter()
            .find(|c| c.name == "fiber_partition_sum")
            .unwrap();
        assert_eq!(partition.lhs, 64); // (q-1)^n
        assert_eq!(partition.rhs, 64);
    }

    #[test]
    fn identities_degenerate_gf2() {
        let f = gf(2, 1);
        let eq = DiagonalEquation::new(&f, vec![f.one(), f.one()], vec![1, 1]).unwrap();
        let family = FiberFamily::diagonal(&f, &eq).unwrap();
        let report = verify_identities(&family).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn family_requires_pivot_hypothesis() {
        let f = gf(5, 1);
        let eq = DiagonalEquation::new(&f, vec![f.one(), f.one()], vec![2, 2]).unwrap();
        assert_eq!(
            FiberFamily::diagonal(&f, &eq).unwrap_err(),
            BijectionError::HypothesisFailed {
                name: "thm1_applicable"
            }
        );
    }

    #[test]
    fn family_respects_work_cap() {
        let f = gf(7, 1);
        let eq = DiagonalEquation::new(&f, vec![f.one(), f.one()], vec![1, 3]).unwrap();
        assert!(matches!(
            FiberFamily::diagonal_with_cap(&f, &eq, 10).unwrap_err(),
            BijectionError::WorkCapExceeded { .. }
        ));
    }

    #[test]
    fn verify_bijection_rejects_zero_scale() {
        let f = gf(7, 1);
        let eq = DiagonalEquation::new(&f, vec![f.one(), f.one()], vec![1, 3]).unwrap();
        let family = FiberFamily::diagonal(&f, &eq).unwrap();
        assert_eq!(
            verify_bijection(&family, f.zero()).unwrap_err(),
            BijectionError::ZeroScale
        );
    }
}
