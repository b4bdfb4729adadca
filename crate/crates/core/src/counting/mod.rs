//! Solution counting: the enumeration oracle, the closed forms, and the
//! dispatcher that picks between them while recording every hypothesis it
//! evaluated.

mod formulas;
mod oracle;
mod tables;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::equations::{
    self, CarlitzEquation, DiagonalEquation, EquationError, QuasiHomogeneousEquation,
};
use crate::ff::{FfError, FieldSpec};

pub use formulas::{
    elementary_symmetric, formula_baoulina, formula_cor1, formula_quasihomog, formula_thm1,
    formula_thm2, formula_thm3, formula_thm4,
};
pub(crate) use oracle::ensure_within_cap;
pub use oracle::{
    brute_count, count_carlitz, count_diagonal, count_quasihomog, count_quasihomog_zero,
    BruteForceSettings,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("enumeration needs {needed} tuple evaluations, cap is {cap}")]
    WorkCapExceeded { needed: u128, cap: u64 },
    #[error("hypothesis {name} does not hold")]
    HypothesisFailed { name: &'static str },
    #[error("no closed form applies to this equation")]
    NoApplicableFormula,
    #[error("q - 1 does not divide the restricted subcount")]
    DivisibilityViolation,
    #[error("subcounts are inconsistent with any solution count")]
    InconsistentSubcounts,
    #[error("symmetric polynomial degree {degree} exceeds {len} values")]
    DegreeOutOfRange { degree: usize, len: usize },
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}

/// Which route produced a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Thm1,
    Cor1,
    Thm2,
    Thm3,
    Thm4,
    Baoulina,
    Quasihomog,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Thm1 => "thm1",
            Method::Cor1 => "cor1",
            Method::Thm2 => "thm2",
            Method::Thm3 => "thm3",
            Method::Thm4 => "thm4",
            Method::Baoulina => "baoulina",
            Method::Quasihomog => "quasihomog",
        }
    }
}

/// One hypothesis the dispatcher actually evaluated, and its outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub holds: bool,
}

fn serialize_decimal<S: Serializer>(v: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&v.to_string())
}

/// A count plus the provenance needed to audit it: the method used and the
/// hypotheses checked on the way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub q: u64,
    pub n: usize,
    /// Decimal string in JSON; closed forms are exact beyond u64.
    #[serde(serialize_with = "serialize_decimal")]
    pub value: BigUint,
    pub method: Method,
    pub restricted: bool,
    pub hypotheses: Vec<Hypothesis>,
}

/// Any of the three supported equation families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equation {
    Diagonal(DiagonalEquation),
    Carlitz(CarlitzEquation),
    QuasiHomogeneous(QuasiHomogeneousEquation),
}

impl Equation {
    pub fn var_count(&self) -> usize {
        match self {
            Equation::Diagonal(eq) => eq.var_count(),
            Equation::Carlitz(eq) => eq.var_count(),
            Equation::QuasiHomogeneous(eq) => eq.var_count(),
        }
    }
}

/// Dispatch policy for [`count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    /// Closed form when one applies, enumeration otherwise.
    Auto,
    /// Always enumerate.
    ForceBrute,
    /// Closed form or [`CountError::NoApplicableFormula`].
    ForceFormula,
}

struct Ledger(Vec<Hypothesis>);

impl Ledger {
    fn record(&mut self, name: &'static str, holds: bool) -> bool {
        self.0.push(Hypothesis { name, holds });
        holds
    }
}

/// Counts solutions of `eq` over `f`, restricted to all-nonzero tuples when
/// `restricted` is set.
///
/// In `Auto` mode the closed forms are tried from cheapest hypotheses to
/// most expensive — the scaling counts with coprime exponents, then the
/// quadratic-character form, then the fiber identity with oracle diagonal
/// subcounts — before falling back to enumeration. Every condition
/// evaluated along the way lands in the report.
pub fn count(
    f: &FieldSpec,
    eq: &Equation,
    restricted: bool,
    method: CountMethod,
    settings: &BruteForceSettings,
) -> Result<CountReport, CountError> {
    let mut ledger = Ledger(Vec::new());
    let formula = match method {
        CountMethod::ForceBrute => None,
        CountMethod::Auto | CountMethod::ForceFormula => {
            try_formula(f, eq, restricted, settings, &mut ledger)?
        }
    };
    let (value, used) = match formula {
        Some(found) => found,
        None => {
            if method == CountMethod::ForceFormula {
                return Err(CountError::NoApplicableFormula);
            }
            let raw = match eq {
                Equation::Diagonal(eq) => count_diagonal(f, eq, restricted, settings)?,
                Equation::Carlitz(eq) => count_carlitz(f, eq, restricted, settings)?,
                Equation::QuasiHomogeneous(eq) => count_quasihomog(f, eq, restricted, settings)?,
            };
            (BigUint::from(raw), Method::Brute)
        }
    };
    Ok(CountReport {
        q: f.q(),
        n: eq.var_count(),
        value,
        method: used,
        restricted,
        hypotheses: ledger.0,
    })
}

fn try_formula(
    f: &FieldSpec,
    eq: &Equation,
    restricted: bool,
    settings: &BruteForceSettings,
    ledger: &mut Ledger,
) -> Result<Option<(BigUint, Method)>, CountError> {
    let q = f.q();
    match eq {
        Equation::Diagonal(eq) => {
            let derived = eq.derived(f);
            if restricted {
                if ledger.record(
                    "pairwise_coprime",
                    equations::pairwise_coprime(&derived.reduced),
                ) {
                    return Ok(Some((formula_cor1(q, eq.var_count()), Method::Cor1)));
                }
            } else if ledger.record(
                "thm1_applicable",
                equations::thm1_applicable(&derived.reduced).is_some(),
            ) {
                return Ok(Some((formula_thm1(q, eq.var_count()), Method::Thm1)));
            }
            Ok(None)
        }
        Equation::Carlitz(eq) => {
            if restricted {
                // the closed forms count over all of F_q^n
                return Ok(None);
            }
            let n = eq.var_count();
            let derived = eq.derived(f);
            let gcd_ok = ledger.record(
                "carlitz_gcd_condition",
                equations::carlitz_gcd_condition(eq, f),
            );
            let coprime = ledger.record(
                "pairwise_coprime",
                equations::pairwise_coprime(&derived.reduced),
            );
            if gcd_ok && coprime {
                return Ok(Some((formula_thm2(q, n), Method::Thm2)));
            }
            if ledger.record("baoulina_condition", equations::baoulina_condition(eq, f)) {
                return Ok(Some((formula_baoulina(q, n), Method::Baoulina)));
            }
            if !gcd_ok {
                return Ok(None);
            }
            let split = equations::thm4_split(&derived.reduced);
            if ledger.record("thm4_split", split.is_some()) {
                let value = formula_thm4(f, eq.coeffs(), &derived.reduced)?;
                return Ok(Some((value, Method::Thm4)));
            }
            // fiber identity with diagonal subcounts, shortcut through the
            // diagonal closed forms when their hypotheses hold
            let diag = eq.diagonal_part(f);
            let n_diag = if ledger.record(
                "thm1_applicable",
                equations::thm1_applicable(&derived.reduced).is_some(),
            ) {
                formula_thm1(q, n)
            } else {
                BigUint::from(count_diagonal(f, &diag, false, settings)?)
            };
            let nstar_diag = if coprime {
                formula_cor1(q, n)
            } else {
                BigUint::from(count_diagonal(f, &diag, true, settings)?)
            };
            let value = formula_thm3(q, n, &n_diag, &nstar_diag)?;
            Ok(Some((value, Method::Thm3)))
        }
        Equation::QuasiHomogeneous(eq) => {
            if restricted {
                return Ok(None);
            }
            let n = eq.var_count();
            let quasi = ledger.record(
                "quasi_homogeneous",
                equations::quasihomogeneity_check_with_cap(eq, f, settings.work_cap),
            );
            if !quasi {
                return Ok(None);
            }
            let gcd_ok = ledger.record(
                "quasihomog_gcd_condition",
                equations::quasihomog_exponent_coprime(eq, f),
            );
            if !gcd_ok {
                return Ok(None);
            }
            let n_zero = BigUint::from(count_quasihomog_zero(f, eq, false, settings)?);
            let nstar_zero = BigUint::from(count_quasihomog_zero(f, eq, true, settings)?);
            let value = formula_quasihomog(q, n, &n_zero, &nstar_zero)?;
            Ok(Some((value, Method::Quasihomog)))
        }
    }
}
