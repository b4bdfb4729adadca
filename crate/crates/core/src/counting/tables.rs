//! Dense index-level arithmetic tables for the enumeration hot loops.
//!
//! Multiplication goes through exponential/logarithm tables over a fixed
//! generator (O(q) memory); addition works digit-wise on element indices
//! with fast paths for characteristic 2 and prime fields.

use crate::ff::FieldSpec;

pub(crate) const LOG_ZERO: u32 = u32::MAX;

pub(crate) struct FieldTables {
    p: u64,
    s: u32,
    pub q: u64,
    order: u64,
    /// exp[i] = index of g^i, doubled so `log a + log b` never needs a mod.
    exp: Vec<u32>,
    /// log[x] for nonzero x; LOG_ZERO at index 0.
    log: Vec<u32>,
}

impl FieldTables {
    pub fn new(f: &FieldSpec) -> Self {
        let q = f.q();
        let order = q - 1;
        let g = f.generator();
        let mut exp = vec![0u32; (2 * order) as usize];
        let mut log = vec![LOG_ZERO; q as usize];
        let mut acc = f.one();
        for i in 0..order {
            exp[i as usize] = acc.index() as u32;
            exp[(i + order) as usize] = acc.index() as u32;
            log[acc.index() as usize] = i as u32;
            acc = f.mul(acc, g);
        }
        FieldTables {
            p: f.p(),
            s: f.s(),
            q,
            order,
            exp,
            log,
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = (self.log[a as usize] as u64 * (e % self.order)) % self.order;
        self.exp[t as usize]
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.s == 1 {
            let v = a as u64 + b as u64;
            return if v >= self.p {
                (v - self.p) as u32
            } else {
                v as u32
            };
        }
        let mut out = 0u64;
        let mut mult = 1u64;
        let (mut x, mut y) = (a as u64, b as u64);
        while x != 0 || y != 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * mult;
            mult *= self.p;
            x /= self.p;
            y /= self.p;
        }
        out as u32
    }
}
