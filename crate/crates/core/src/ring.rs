//! Scalar arithmetic in Z/p^k, viewed as a truncation of the p-adic integers.
//!
//! A [`RingContext`] fixes the odd prime `p`, the certificate precision `prec`
//! (invariants and certificates are stated modulo `p^prec`), the torsion guard
//! separating honest torsion from truncation noise, and a working exponent
//! `work >= prec` at which all scalar arithmetic actually happens. For
//! contexts created with [`RingContext::new`], `work == prec` and the
//! semantics are plain arithmetic mod `p^prec`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The modulus must stay below 2^63 so products fit in u128.
const MAX_MODULUS_BITS: u32 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingContext {
    p: u64,
    prec: u32,
    torsion_guard: u32,
    work: u32,
    modulus: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
        if acc >= (1u64 << MAX_MODULUS_BITS) {
            return None;
        }
    }
    Some(acc)
}

impl RingContext {
    /// Plain context: arithmetic, certificates and classification all at `prec`.
    pub fn new(p: u64, prec: u32, torsion_guard: u32) -> Result<Self> {
        Self::with_work(p, prec, torsion_guard, prec)
    }

    /// Context with a padded working exponent. Certificates and the
    /// free/torsion classification stay at `prec`; scalars live mod `p^work`
    /// so that solve ambiguity sits above the certificate precision.
    pub fn padded(p: u64, prec: u32, torsion_guard: u32) -> Result<Self> {
        let mut slack = 2 * torsion_guard;
        // Clamp so the modulus still fits in u64.
        while slack > 0 && checked_pow(p, prec + slack).is_none() {
            slack -= 1;
        }
        Self::with_work(p, prec, torsion_guard, prec + slack)
    }

    pub fn with_work(p: u64, prec: u32, torsion_guard: u32, work: u32) -> Result<Self> {
        if !is_prime(p) || p < 3 {
            return Err(Error::InvalidContext(format!(
                "p must be an odd prime, got {p}"
            )));
        }
        if prec == 0 || torsion_guard == 0 || torsion_guard >= prec {
            return Err(Error::InvalidContext(format!(
                "need 0 < torsion_guard < prec, got guard {torsion_guard}, prec {prec}"
            )));
        }
        if work < prec {
            return Err(Error::InvalidContext(
                "working exponent below certificate precision".into(),
            ));
        }
        let modulus = checked_pow(p, work).ok_or_else(|| {
            Error::InvalidContext(format!("p^{work} does not fit in 63 bits for p = {p}"))
        })?;
        Ok(RingContext {
            p,
            prec,
            torsion_guard,
            work,
            modulus,
        })
    }

    /// Scratch context over Z/p^e with no guard semantics (internal solves at
    /// a fixed small modulus, e.g. cochain algebra at p^{e_max}).
    pub fn raw(p: u64, exponent: u32) -> Self {
        let modulus = checked_pow(p, exponent).expect("raw modulus overflow");
        RingContext {
            p,
            prec: exponent,
            torsion_guard: exponent.saturating_sub(1).max(1).min(exponent),
            work: exponent,
            modulus,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn torsion_guard(&self) -> u32 {
        self.torsion_guard
    }
    pub fn work(&self) -> u32 {
        self.work
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Same p/prec/guard but arithmetic truncated to `prec` (certificate world).
    pub fn cert(&self) -> RingContext {
        RingContext {
            p: self.p,
            prec: self.prec,
            torsion_guard: self.torsion_guard,
            work: self.prec,
            modulus: self.pow_p(self.prec),
        }
    }

    pub fn pow_p(&self, e: u32) -> u64 {
        let mut acc = 1u64;
        for _ in 0..e.min(self.work) {
            acc *= self.p;
        }
        acc
    }

    #[inline]
    pub fn reduce_i128(&self, x: i128) -> u64 {
        let m = self.modulus as i128;
        (((x % m) + m) % m) as u64
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.modulus
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.modulus as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// p-adic valuation of the residue; val(0) = work.
    #[inline]
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.work;
        }
        let mut v = 0u32;
        let mut x = a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// Writes a = p^v * u with u a unit; returns (v, u).
    #[inline]
    pub fn val_unit(&self, a: u64) -> (u32, u64) {
        if a == 0 {
            return (self.work, 1);
        }
        let mut v = 0u32;
        let mut x = a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        (v, x)
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    /// Inverse of a unit mod p^work (extended Euclid).
    pub fn inv_unit(&self, a: u64) -> u64 {
        assert!(self.is_unit(a), "inverse of non-unit");
        let m = self.modulus as i128;
        let (mut r0, mut r1) = (m, (a % self.modulus) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            let r = r0 - q * r1;
            r0 = r1;
            r1 = r;
            let s = s0 - q * s1;
            s0 = s1;
            s1 = s;
        }
        debug_assert_eq!(r0, 1);
        self.reduce_i128(s0)
    }

    /// Exact division by p^v (caller guarantees val(a) >= v).
    #[inline]
    pub fn div_pow(&self, a: u64, v: u32) -> u64 {
        if a == 0 {
            return 0;
        }
        let q = self.pow_p(v);
        debug_assert_eq!(a % q, 0, "inexact division by p^{v}");
        a / q
    }

    /// Quotient a = q * p^e + r with r in [0, p^e); returns q (used to reduce
    /// entries above a Howell pivot p^e).
    #[inline]
    pub fn div_floor_pow(&self, a: u64, e: u32) -> u64 {
        a / self.pow_p(e)
    }

    /// Balanced representative in (-p^work/2, p^work/2].
    pub fn balanced(&self, a: u64) -> i64 {
        if a as u128 * 2 > self.modulus as u128 {
            -((self.modulus - a) as i64)
        } else {
            a as i64
        }
    }

    /// Congruence at certificate precision.
    #[inline]
    pub fn cert_eq(&self, a: u64, b: u64) -> bool {
        let q = self.pow_p(self.prec);
        a % q == b % q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_p_equal_two() {
        assert!(RingContext::new(2, 16, 8).is_err());
    }

    #[test]
    fn rejects_composite_p() {
        assert!(RingContext::new(9, 16, 8).is_err());
        assert!(RingContext::new(1, 16, 8).is_err());
    }

    #[test]
    fn rejects_bad_guard() {
        assert!(RingContext::new(3, 8, 8).is_err());
        assert!(RingContext::new(3, 8, 0).is_err());
    }

    #[test]
    fn arithmetic_basics() {
        let ctx = RingContext::new(3, 4, 2).unwrap();
        assert_eq!(ctx.modulus(), 81);
        assert_eq!(ctx.add(80, 2), 1);
        assert_eq!(ctx.sub(0, 1), 80);
        assert_eq!(ctx.mul(27, 3), 0);
        assert_eq!(ctx.val(0), 4);
        assert_eq!(ctx.val(18), 2);
        assert_eq!(ctx.val_unit(18), (2, 2));
        let inv = ctx.inv_unit(2);
        assert_eq!(ctx.mul(2, inv), 1);
    }

    #[test]
    fn padded_context_keeps_cert_precision() {
        let ctx = RingContext::padded(3, 16, 8).unwrap();
        assert_eq!(ctx.prec(), 16);
        assert!(ctx.work() > 16);
        let c = ctx.cert();
        assert_eq!(c.work(), 16);
        assert_eq!(c.modulus(), 3u64.pow(16));
    }

    #[test]
    fn padded_clamps_for_large_p() {
        // 5^32 would overflow; the slack must be clamped, not fail.
        let ctx = RingContext::padded(5, 16, 8).unwrap();
        assert!(ctx.work() >= 16 && ctx.work() <= 27);
    }

    #[test]
    fn balanced_representatives() {
        let ctx = RingContext::new(3, 4, 2).unwrap();
        assert_eq!(ctx.balanced(80), -1);
        assert_eq!(ctx.balanced(2), 2);
    }
}
