//! Brute-force enumeration counters. These define ground truth for every
//! closed form in the crate: they walk all of F_q^n (or (F_q^*)^n) and
//! count tuples satisfying the equation, exactly.

use crate::counting::tables::FieldTables;
use crate::counting::CountError;
use crate::equations::{CarlitzEquation, DiagonalEquation, QuasiHomogeneousEquation};
use crate::ff::{FieldElement, FieldSpec};
use crate::DEFAULT_WORK_CAP;

/// Knobs for the enumeration oracle.
#[derive(Debug, Clone)]
pub struct BruteForceSettings {
    /// Budget in tuple evaluations; enumeration refuses to start when
    /// `q^n` exceeds it.
    pub work_cap: u64,
    /// Worker threads for the outermost variable; the count is a sum of
    /// per-worker accumulators, so the result never depends on this.
    pub workers: usize,
    /// Replace diagonal exponents m_j by gcd(m_j, q-1) before enumerating.
    /// Count-preserving; disabled only by the test that checks exactly that.
    pub reduce_diagonal_exponents: bool,
}

impl Default for BruteForceSettings {
    fn default() -> Self {
        BruteForceSettings {
            work_cap: DEFAULT_WORK_CAP,
            workers: 1,
            reduce_diagonal_exponents: true,
        }
    }
}

pub(crate) fn ensure_within_cap(q: u64, n: usize, cap: u64) -> Result<(), CountError> {
    let mut needed: u128 = 1;
    for _ in 0..n {
        needed = needed.saturating_mul(q as u128);
    }
    if needed > cap as u128 {
        Err(CountError::WorkCapExceeded { needed, cap })
    } else {
        Ok(())
    }
}

/// Enumerates all tuples over the element indices and counts hits of
/// `test`, splitting the outermost variable range across workers. Each
/// worker owns a `state` created by `init`; the innermost position varies
/// fastest.
fn parallel_count<S, I, T>(
    q: u64,
    n: usize,
    restricted: bool,
    workers: usize,
    init: I,
    test: T,
) -> u64
where
    I: Fn() -> S + Sync,
    T: Fn(&mut S, &[u64]) -> bool + Sync,
{
    assert!(n >= 1);
    let lo: u64 = if restricted { 1 } else { 0 };
    if lo >= q {
        return 0;
    }
    let outer: Vec<u64> = (lo..q).collect();
    let workers = workers.max(1).min(outer.len());
    if workers == 1 {
        let mut state = init();
        return count_chunk(&outer, q, lo, n, &mut state, &test);
    }
    let chunk_len = outer.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for piece in outer.chunks(chunk_len) {
            let init = &init;
            let test = &test;
            handles.push(scope.spawn(move || {
                let mut state = init();
                count_chunk(piece, q, lo, n, &mut state, test)
            }));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle worker panicked"))
            .sum()
    })
}

fn count_chunk<S, T>(outer: &[u64], q: u64, lo: u64, n: usize, state: &mut S, test: &T) -> u64
where
    T: Fn(&mut S, &[u64]) -> bool,
{
    let mut tuple = vec![lo; n];
    let mut count = 0u64;
    for &v in outer {
        tuple[0] = v;
        for t in tuple[1..].iter_mut() {
            *t = lo;
        }
        'tuples: loop {
            if test(state, &tuple) {
                count += 1;
            }
            let mut pos = n;
            while pos > 1 {
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < q {
                    continue 'tuples;
                }
                tuple[pos] = lo;
            }
            break;
        }
    }
    count
}

/// Counts solutions of `lhs(x) = rhs(x)` by definition, with arbitrary
/// evaluators. This is the slowest and most general route; the per-family
/// counters below must always agree with it.
pub fn brute_count<L, R>(
    f: &FieldSpec,
    n: usize,
    restricted: bool,
    settings: &BruteForceSettings,
    lhs: L,
    rhs: R,
) -> Result<u64, CountError>
where
    L: Fn(&FieldSpec, &[FieldElement]) -> FieldElement + Sync,
    R: Fn(&FieldSpec, &[FieldElement]) -> FieldElement + Sync,
{
    ensure_within_cap(f.q(), n, settings.work_cap)?;
    Ok(parallel_count(
        f.q(),
        n,
        restricted,
        settings.workers,
        || vec![FieldElement::ZERO; n],
        |buf: &mut Vec<FieldElement>, tuple: &[u64]| {
            for (slot, &idx) in buf.iter_mut().zip(tuple) {
                *slot = FieldElement(idx);
            }
            lhs(f, buf) == rhs(f, buf)
        },
    ))
}

/// Per-variable lookup tables `x -> coeff * x^e`.
fn term_tables(t: &FieldTables, coeffs: &[FieldElement], exponents: &[u64]) -> Vec<Vec<u32>> {
    coeffs
        .iter()
        .zip(exponents)
        .map(|(&a, &e)| {
            (0..t.q)
                .map(|x| t.mul(a.index() as u32, t.pow(x as u32, e)))
                .collect()
        })
        .collect()
}

fn power_tables(t: &FieldTables, exponents: &[u64]) -> Vec<Vec<u32>> {
    exponents
        .iter()
        .map(|&e| (0..t.q).map(|x| t.pow(x as u32, e)).collect())
        .collect()
}

/// N or N* of a diagonal equation, by enumeration.
pub fn count_diagonal(
    f: &FieldSpec,
    eq: &DiagonalEquation,
    restricted: bool,
    settings: &BruteForceSettings,
) -> Result<u64, CountError> {
    let n = eq.var_count();
    ensure_within_cap(f.q(), n, settings.work_cap)?;
    let exponents = if settings.reduce_diagonal_exponents {
        eq.derived(f).reduced
    } else {
        eq.exponents().to_vec()
    };
    let t = FieldTables::new(f);
    let terms = term_tables(&t, eq.coeffs(), &exponents);
    Ok(parallel_count(
        f.q(),
        n,
        restricted,
        settings.workers,
        || (),
        |_, tuple| {
            let mut acc = 0u32;
            for (table, &x) in terms.iter().zip(tuple) {
                acc = t.add(acc, table[x as usize]);
            }
            acc == 0
        },
    ))
}

/// N or N* of a Carlitz-type equation, by enumeration.
pub fn count_carlitz(
    f: &FieldSpec,
    eq: &CarlitzEquation,
    restricted: bool,
    settings: &BruteForceSettings,
) -> Result<u64, CountError> {
    let n = eq.var_count();
    ensure_within_cap(f.q(), n, settings.work_cap)?;
    let t = FieldTables::new(f);
    let lhs_terms = term_tables(&t, eq.coeffs(), eq.exponents());
    let outer: Vec<u32> = (0..t.q)
        .map(|v| t.pow(v as u32, eq.outer_power()))
        .collect();
    let rhs_powers = power_tables(&t, eq.rhs_exponents());
    let b = eq.rhs_coeff().index() as u32;
    Ok(parallel_count(
        f.q(),
        n,
        restricted,
        settings.workers,
        || (),
        |_, tuple| {
            let mut acc = 0u32;
            for (table, &x) in lhs_terms.iter().zip(tuple) {
                acc = t.add(acc, table[x as usize]);
            }
            let mut rhs = b;
            for (table, &x) in rhs_powers.iter().zip(tuple) {
                rhs = t.mul(rhs, table[x as usize]);
            }
            outer[acc as usize] == rhs
        },
    ))
}

/// N or N* of `f(x) = 0` for a quasi-homogeneous polynomial.
pub fn count_quasihomog_zero(
    f: &FieldSpec,
    eq: &QuasiHomogeneousEquation,
    restricted: bool,
    settings: &BruteForceSettings,
) -> Result<u64, CountError> {
    let n = eq.var_count();
    ensure_within_cap(f.q(), n, settings.work_cap)?;
    let t = FieldTables::new(f);
    let term_tabs = sparse_term_tables(eq, &t);
    Ok(parallel_count(
        f.q(),
        n,
        restricted,
        settings.workers,
        || (),
        |_, tuple| sparse_eval(&t, &term_tabs, tuple) == 0,
    ))
}

/// N or N* of `f(x) = b x_1^{k_1} ... x_n^{k_n}`, by enumeration.
pub fn count_quasihomog(
    f: &FieldSpec,
    eq: &QuasiHomogeneousEquation,
    restricted: bool,
    settings: &BruteForceSettings,
) -> Result<u64, CountError> {
    let n = eq.var_count();
    ensure_within_cap(f.q(), n, settings.work_cap)?;
    let t = FieldTables::new(f);
    let term_tabs = sparse_term_tables(eq, &t);
    let rhs_powers = power_tables(&t, eq.rhs_exponents());
    let b = eq.rhs_coeff().index() as u32;
    Ok(parallel_count(
        f.q(),
        n,
        restricted,
        settings.workers,
        || (),
        |_, tuple| {
            let mut rhs = b;
            for (table, &x) in rhs_powers.iter().zip(tuple) {
                rhs = t.mul(rhs, table[x as usize]);
            }
            sparse_eval(&t, &term_tabs, tuple) == rhs
        },
    ))
}

/// Per-term, per-variable tables for a sparse polynomial; the coefficient
/// is folded into the first variable of each term.
fn sparse_term_tables(eq: &QuasiHomogeneousEquation, t: &FieldTables) -> Vec<Vec<Vec<u32>>> {
    eq.terms()
        .iter()
        .map(|term| {
            let mut tabs = power_tables(t, &term.exponents);
            let c = term.coeff.index() as u32;
            for v in tabs[0].iter_mut() {
                *v = t.mul(*v, c);
            }
            tabs
        })
        .collect()
}

#[inline]
fn sparse_eval(t: &FieldTables, term_tabs: &[Vec<Vec<u32>>], tuple: &[u64]) -> u32 {
    let mut acc = 0u32;
    for tabs in term_tabs {
        let mut v = 1u32;
        for (table, &x) in tabs.iter().zip(tuple) {
            v = t.mul(v, table[x as usize]);
        }
        acc = t.add(acc, v);
    }
    acc
}
