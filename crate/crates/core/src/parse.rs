//! Text formats for fields and equations, shared by the CLI and file
//! inputs.
//!
//! Fields: `7` or `3^2`. Equations:
//!
//! ```text
//! diag a=1,2,3 m=2,3,4
//! carlitz a=1,1 m=1,2 k=1 b=1 kv=1,1
//! qh terms=1:2,0;1:0,3 rv=3,2 r=6 b=1 kv=1,1
//! ```
//!
//! Coefficients are element indices in the field's enumeration order, so
//! the notation is unambiguous in extension fields; `show-elements` prints
//! the index-to-polynomial table.

use std::collections::HashMap;

use thiserror::Error;

use crate::counting::Equation;
use crate::equations::{
    CarlitzEquation, DiagonalEquation, EquationError, QuasiHomogeneousEquation, Term,
};
use crate::ff::{FfError, FieldElement, FieldSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty specification")]
    Empty,
    #[error("malformed integer {0:?}")]
    BadInteger(String),
    #[error("malformed field notation {0:?} (expected p or p^s)")]
    BadField(String),
    #[error("unknown equation family {0:?} (expected diag, carlitz or qh)")]
    UnknownFamily(String),
    #[error("malformed key=value token {0:?}")]
    BadToken(String),
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("unknown key {0:?} for this equation family")]
    UnknownKey(String),
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("malformed term {0:?} (expected coeff:e1,...,en)")]
    BadTerm(String),
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}

fn int(s: &str) -> Result<u64, ParseError> {
    s.parse().map_err(|_| ParseError::BadInteger(s.to_string()))
}

fn int_list(s: &str) -> Result<Vec<u64>, ParseError> {
    s.split(',').map(int).collect()
}

/// Parses `p` or `p^s` into a field with the given size cap.
pub fn parse_field_with_cap(text: &str, cap: u64) -> Result<FieldSpec, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseError::Empty);
    }
    let (p, s) = match text.split_once('^') {
        None => (int(text)?, 1),
        Some((p, s)) => {
            let s: u32 = s
                .parse()
                .map_err(|_| ParseError::BadField(text.to_string()))?;
            (int(p)?, s)
        }
    };
    Ok(crate::ff::make_field_with_cap(p, s, cap)?)
}

pub fn parse_field(text: &str) -> Result<FieldSpec, ParseError> {
    parse_field_with_cap(text, crate::ff::DEFAULT_FIELD_CAP)
}

/// Parses a field given by its size: `9` means GF(9) = GF(3^2). Accepts
/// the `p^s` notation too. Used by sweep lists, where entries are sizes;
/// `--field` itself stays strict (`4` is rejected, `2^2` is not).
pub fn parse_field_size(text: &str) -> Result<FieldSpec, ParseError> {
    let text = text.trim();
    if text.contains('^') {
        return parse_field(text);
    }
    let q = int(text)?;
    if q < 2 {
        return Err(ParseError::BadField(text.to_string()));
    }
    let p = (2..=q).find(|d| q % d == 0).expect("q >= 2 has a divisor");
    let mut s = 0u32;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        s += 1;
    }
    if rest != 1 {
        // not a prime power
        return Err(ParseError::Field(FfError::NotPrime(q)));
    }
    Ok(crate::ff::make_field(p, s)?)
}

struct KeyValues(HashMap<String, String>);

impl KeyValues {
    fn parse(tokens: &[&str], allowed: &[&str]) -> Result<Self, ParseError> {
        let mut map = HashMap::new();
        for token in tokens {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| ParseError::BadToken(token.to_string()))?;
            if !allowed.contains(&key) {
                return Err(ParseError::UnknownKey(key.to_string()));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ParseError::DuplicateKey(key.to_string()));
            }
        }
        Ok(KeyValues(map))
    }

    fn get(&self, key: &'static str) -> Result<&str, ParseError> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or(ParseError::MissingKey(key))
    }
}

fn elements(f: &FieldSpec, s: &str) -> Result<Vec<FieldElement>, ParseError> {
    int_list(s)?
        .into_iter()
        .map(|idx| f.element_from_index(idx).map_err(ParseError::from))
        .collect()
}

/// Parses one equation in the text format against a concrete field.
pub fn parse_equation(text: &str, f: &FieldSpec) -> Result<Equation, ParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let (family, rest) = tokens.split_first().ok_or(ParseError::Empty)?;
    match *family {
        "diag" => {
            let kv = KeyValues::parse(rest, &["a", "m"])?;
            let coeffs = elements(f, kv.get("a")?)?;
            let exponents = int_list(kv.get("m")?)?;
            Ok(Equation::Diagonal(DiagonalEquation::new(
                f, coeffs, exponents,
            )?))
        }
        "carlitz" => {
            let kv = KeyValues::parse(rest, &["a", "m", "k", "b", "kv"])?;
            let coeffs = elements(f, kv.get("a")?)?;
            let exponents = int_list(kv.get("m")?)?;
            let outer = int(kv.get("k")?)?;
            let b = f.element_from_index(int(kv.get("b")?)?)?;
            let rhs_exponents = int_list(kv.get("kv")?)?;
            Ok(Equation::Carlitz(CarlitzEquation::new(
                f,
                coeffs,
                exponents,
                outer,
                b,
                rhs_exponents,
            )?))
        }
        "qh" => {
            let kv = KeyValues::parse(rest, &["terms", "rv", "r", "b", "kv"])?;
            let mut terms = Vec::new();
            for part in kv.get("terms")?.split(';') {
                let (coeff, exps) = part
                    .split_once(':')
                    .ok_or_else(|| ParseError::BadTerm(part.to_string()))?;
                terms.push(Term {
                    coeff: f.element_from_index(int(coeff)?)?,
                    exponents: int_list(exps)?,
                });
            }
            let weights = int_list(kv.get("rv")?)?;
            let degree = int(kv.get("r")?)?;
            let b = f.element_from_index(int(kv.get("b")?)?)?;
            let rhs_exponents = int_list(kv.get("kv")?)?;
            Ok(Equation::QuasiHomogeneous(QuasiHomogeneousEquation::new(
                f,
                terms,
                degree,
                weights,
                b,
                rhs_exponents,
            )?))
        }
        other => Err(ParseError::UnknownFamily(other.to_string())),
    }
}

fn join(values: impl IntoIterator<Item = u64>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Renders an equation back into the text format parsed by
/// [`parse_equation`].
pub fn format_equation(eq: &Equation) -> String {
    match eq {
        Equation::Diagonal(eq) => format!(
            "diag a={} m={}",
            join(eq.coeffs().iter().map(|a| a.index())),
            join(eq.exponents().iter().copied()),
        ),
        Equation::Carlitz(eq) => format!(
            "carlitz a={} m={} k={} b={} kv={}",
            join(eq.coeffs().iter().map(|a| a.index())),
            join(eq.exponents().iter().copied()),
            eq.outer_power(),
            eq.rhs_coeff().index(),
            join(eq.rhs_exponents().iter().copied()),
        ),
        Equation::QuasiHomogeneous(eq) => {
            let terms = eq
                .terms()
                .iter()
                .map(|t| format!("{}:{}", t.coeff.index(), join(t.exponents.iter().copied())))
                .collect::<Vec<_>>()
                .join(";");
            format!(
                "qh terms={} rv={} r={} b={} kv={}",
                terms,
                join(eq.weights().iter().copied()),
                eq.degree(),
                eq.rhs_coeff().index(),
                join(eq.rhs_exponents().iter().copied()),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    #[test]
    fn parses_prime_and_extension_fields() {
        assert_eq!(parse_field("7").unwrap().q(), 7);
        let f9 = parse_field("3^2").unwrap();
        assert_eq!((f9.p(), f9.s(), f9.q()), (3, 2, 9));
        assert_eq!(
            parse_field("4").unwrap_err(),
            ParseError::Field(FfError::NotPrime(4))
        );
        assert!(matches!(parse_field("x"), Err(ParseError::BadInteger(_))));
        assert!(matches!(parse_field("3^"), Err(ParseError::BadField(_))));
    }

    #[test]
    fn parses_field_sizes() {
        assert_eq!(parse_field_size("9").unwrap().q(), 9);
        assert_eq!(parse_field_size("7").unwrap().q(), 7);
        assert_eq!(parse_field_size("16").unwrap().q(), 16);
        assert_eq!(parse_field_size("2^3").unwrap().q(), 8);
        assert_eq!(
            parse_field_size("12").unwrap_err(),
            ParseError::Field(FfError::NotPrime(12))
        );
    }

    #[test]
    fn parses_diagonal() {
        let f = make_field(7, 1).unwrap();
        let eq = parse_equation("diag a=1,2,3 m=2,3,4", &f).unwrap();
        match &eq {
            Equation::Diagonal(d) => {
                assert_eq!(d.exponents(), &[2, 3, 4]);
                assert_eq!(d.coeffs()[1], f.scalar(2));
            }
            _ => panic!("expected diagonal"),
        }
        assert_eq!(format_equation(&eq), "diag a=1,2,3 m=2,3,4");
    }

    #[test]
    fn parses_carlitz() {
        let f = make_field(5, 1).unwrap();
        let eq = parse_equation("carlitz a=1,1,1 m=1,1,1 k=2 b=1 kv=1,1,1", &f).unwrap();
        match &eq {
            Equation::Carlitz(c) => {
                assert_eq!(c.outer_power(), 2);
                assert_eq!(c.rhs_coeff(), f.one());
            }
            _ => panic!("expected carlitz"),
        }
        assert_eq!(
            format_equation(&eq),
            "carlitz a=1,1,1 m=1,1,1 k=2 b=1 kv=1,1,1"
        );
    }

    #[test]
    fn parses_quasihomogeneous() {
        let f = make_field(7, 1).unwrap();
        let eq = parse_equation("qh terms=1:2,0;1:0,3 rv=3,2 r=6 b=1 kv=1,1", &f).unwrap();
        match &eq {
            Equation::QuasiHomogeneous(q) => {
                assert_eq!(q.terms().len(), 2);
                assert_eq!(q.degree(), 6);
            }
            _ => panic!("expected qh"),
        }
        assert_eq!(
            format_equation(&eq),
            "qh terms=1:2,0;1:0,3 rv=3,2 r=6 b=1 kv=1,1"
        );
    }

    #[test]
    fn rejects_malformed_input() {
        let f = make_field(7, 1).unwrap();
        assert_eq!(
            parse_equation("ellipse a=1 m=1", &f).unwrap_err(),
            ParseError::UnknownFamily("ellipse".to_string())
        );
        assert_eq!(
            parse_equation("diag a=1,1", &f).unwrap_err(),
            ParseError::MissingKey("m")
        );
        assert_eq!(
            parse_equation("diag a=1,1 m=1,1 m=2,2", &f).unwrap_err(),
            ParseError::DuplicateKey("m".to_string())
        );
        assert_eq!(
            parse_equation("diag a=1,1 m=1,1 z=3", &f).unwrap_err(),
            ParseError::UnknownKey("z".to_string())
        );
        // index 0 is the zero element: invalid coefficient
        assert_eq!(
            parse_equation("diag a=0,1 m=1,1", &f).unwrap_err(),
            ParseError::Equation(EquationError::ZeroCoefficient)
        );
        // element index out of range
        assert!(matches!(
            parse_equation("diag a=1,9 m=1,1", &f).unwrap_err(),
            ParseError::Field(FfError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn roundtrip_through_format() {
        let f = make_field(3, 2).unwrap();
        for text in [
            "diag a=1,8 m=2,4",
            "carlitz a=1,2 m=1,2 k=3 b=4 kv=2,1",
            "qh terms=2:1,1 rv=1,1 r=2 b=1 kv=1,1",
        ] {
            let eq = parse_equation(text, &f).unwrap();
            assert_eq!(format_equation(&eq), text);
            assert_eq!(parse_equation(&format_equation(&eq), &f).unwrap(), eq);
        }
    }
}
