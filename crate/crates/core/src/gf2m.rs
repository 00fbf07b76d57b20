//! Binary field arithmetic GF(2^m) in polynomial-basis representation.
//!
//! Elements are m-bit masks over a fixed irreducible polynomial; addition is
//! XOR, multiplication is carryless polynomial multiplication followed by
//! reduction. Supports m up to 16, which is plenty for the frame sizes this
//! crate can materialize.
//!
//! # Example
//! ```
//! use frame_forge_core::gf2m::FieldContext;
//!
//! let f8 = FieldContext::default_for(3).unwrap();
//! let x = f8.element(0b010).unwrap();
//! let x2 = f8.element(0b100).unwrap();
//! // x * x^2 = x^3 = x + 1 under x^3 + x + 1
//! assert_eq!(x.mul(x2).unwrap().bits(), 0b011);
//! ```

use crate::error::{FrameError, Result};

/// Maximum supported extension degree.
pub const MAX_M: u32 = 16;

/// Conventional low-weight irreducible polynomial for each m in 1..=16,
/// encoded as a bitmask with the degree-m term set.
const DEFAULT_POLYS: [u32; 16] = [
    0b11,      // x + 1
    0b111,     // x^2 + x + 1
    0b1011,    // x^3 + x + 1
    0b10011,   // x^4 + x + 1
    0b100101,  // x^5 + x^2 + 1
    0x43,      // x^6 + x + 1
    0x83,      // x^7 + x + 1
    0x11B,     // x^8 + x^4 + x^3 + x + 1
    0x203,     // x^9 + x + 1
    0x409,     // x^10 + x^3 + 1
    0x805,     // x^11 + x^2 + 1
    0x1009,    // x^12 + x^3 + 1
    0x201B,    // x^13 + x^4 + x^3 + x + 1
    0x4443,    // x^14 + x^10 + x^6 + x + 1
    0x8003,    // x^15 + x + 1
    0x1100B,   // x^16 + x^12 + x^3 + x + 1
];

/// A concrete field GF(2^m): extension degree plus reduction polynomial.
///
/// Cheap to copy; every [`FieldElement`] carries its context so binary
/// operations can reject cross-field operands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldContext {
    m: u32,
    poly: u32,
}

/// One element of GF(2^m), in polynomial-basis coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    bits: u32,
    ctx: FieldContext,
}

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

/// Remainder of a modulo b over GF(2)[x].
fn poly_mod(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn is_irreducible(p: u64, m: u32) -> bool {
    if poly_degree(p) != m as i32 {
        return false;
    }
    if m == 1 {
        return true;
    }
    // constant term must be 1, else x divides p
    if p & 1 == 0 {
        return false;
    }
    // trial division by every polynomial of degree 1..=m/2
    for cand in 2u64..(1u64 << (m / 2 + 1)) {
        if poly_degree(cand) >= 1 && poly_mod(p, cand) == 0 {
            return false;
        }
    }
    true
}

impl FieldContext {
    /// Builds a field over an explicit degree-m irreducible polynomial.
    ///
    /// Rejects m outside 1..=16, wrong-degree masks, and reducible
    /// polynomials (checked by exhaustive trial division, fast at these m).
    pub fn new(m: u32, irreducible: u32) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(FrameError::Domain(format!(
                "field degree m={m} outside supported range 1..={MAX_M}"
            )));
        }
        if !is_irreducible(irreducible as u64, m) {
            return Err(FrameError::Domain(format!(
                "polynomial {irreducible:#x} is not irreducible of degree {m}"
            )));
        }
        Ok(Self { m, poly: irreducible })
    }

    /// Builds GF(2^m) over the crate's fixed conventional polynomial.
    pub fn default_for(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(FrameError::Domain(format!(
                "field degree m={m} outside supported range 1..={MAX_M}"
            )));
        }
        Self::new(m, DEFAULT_POLYS[(m - 1) as usize])
    }

    /// Extension degree m.
    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Reduction polynomial bitmask.
    pub fn polynomial(&self) -> u32 {
        self.poly
    }

    /// Field order 2^m.
    pub fn order(&self) -> u64 {
        1u64 << self.m
    }

    /// Wraps an m-bit mask as an element of this field.
    pub fn element(&self, bits: u32) -> Result<FieldElement> {
        if u64::from(bits) >= self.order() {
            return Err(FrameError::Domain(format!(
                "bits {bits:#x} exceed field order 2^{}",
                self.m
            )));
        }
        Ok(FieldElement { bits, ctx: *self })
    }

    /// Additive identity.
    pub fn zero(&self) -> FieldElement {
        FieldElement { bits: 0, ctx: *self }
    }

    /// Multiplicative identity.
    pub fn one(&self) -> FieldElement {
        FieldElement { bits: 1, ctx: *self }
    }

    /// All 2^m elements in increasing bitmask order.
    pub fn enumerate(&self) -> Vec<FieldElement> {
        (0..self.order())
            .map(|b| FieldElement { bits: b as u32, ctx: *self })
            .collect()
    }
}

impl FieldElement {
    /// Polynomial-basis coordinates of this element.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The field this element lives in.
    pub fn context(&self) -> FieldContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    fn check_ctx(&self, other: &FieldElement) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(FrameError::Mismatch(format!(
                "field contexts differ: GF(2^{})/{:#x} vs GF(2^{})/{:#x}",
                self.ctx.m, self.ctx.poly, other.ctx.m, other.ctx.poly
            )));
        }
        Ok(())
    }

    /// Field addition (XOR of coordinate masks).
    pub fn add(&self, other: FieldElement) -> Result<FieldElement> {
        self.check_ctx(&other)?;
        Ok(FieldElement { bits: self.bits ^ other.bits, ctx: self.ctx })
    }

    /// Field multiplication: carryless multiply, then reduce.
    pub fn mul(&self, other: FieldElement) -> Result<FieldElement> {
        self.check_ctx(&other)?;
        let mut acc: u64 = 0;
        let a = u64::from(self.bits);
        let mut b = u64::from(other.bits);
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a << shift;
            }
            b >>= 1;
            shift += 1;
        }
        let reduced = poly_mod(acc, u64::from(self.ctx.poly));
        Ok(FieldElement { bits: reduced as u32, ctx: self.ctx })
    }

    /// Exponentiation by square-and-multiply; `pow(0)` is one, including 0^0.
    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = *self;
        let mut acc = self.ctx.one();
        while e != 0 {
            if e & 1 == 1 {
                // same context by construction, cannot fail
                acc = acc.mul(base).expect("context invariant");
            }
            base = base.mul(base).expect("context invariant");
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element, via z^(2^m - 2).
    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(FrameError::Domain("zero has no multiplicative inverse".into()));
        }
        Ok(self.pow(self.ctx.order() - 2))
    }

    /// Trace map onto GF(2): Tr(z) = z + z^2 + z^4 + ... + z^(2^(m-1)).
    ///
    /// The accumulated sum must land in the prime subfield {0, 1}; anything
    /// else means the context is corrupted and surfaces as an error.
    pub fn trace(&self) -> Result<u8> {
        let mut acc = self.ctx.zero();
        let mut pow = *self;
        for _ in 0..self.ctx.m {
            acc = acc.add(pow)?;
            pow = pow.mul(pow)?;
        }
        match acc.bits {
            0 => Ok(0),
            1 => Ok(1),
            other => Err(FrameError::Internal(format!(
                "trace accumulated to {other:#x}, not an element of GF(2)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_table_is_irreducible_for_all_m() {
        for m in 1..=MAX_M {
            let ctx = FieldContext::default_for(m).unwrap();
            assert_eq!(ctx.degree(), m);
        }
    }

    #[test]
    fn reducible_polynomial_rejected() {
        // x^4 + 1 = (x+1)^4 over GF(2)
        assert!(FieldContext::new(4, 0b10001).is_err());
        // degree mismatch
        assert!(FieldContext::new(3, 0b10011).is_err());
    }

    #[test]
    fn hand_reduced_products() {
        // GF(2^3), x^3 + x + 1: x * x^2 = x^3 = x + 1
        let f8 = FieldContext::default_for(3).unwrap();
        let p = f8.element(0b010).unwrap().mul(f8.element(0b100).unwrap()).unwrap();
        assert_eq!(p.bits(), 0b011);

        // GF(2^4), x^4 + x + 1: x^3 * x = x^4 = x + 1
        let f16 = FieldContext::default_for(4).unwrap();
        let p = f16.element(0b1000).unwrap().mul(f16.element(0b0010).unwrap()).unwrap();
        assert_eq!(p.bits(), 0b0011);
    }

    #[test]
    fn multiplicative_group_order_divides() {
        // GF(2^2): the generator w = x satisfies w^3 = 1
        let f4 = FieldContext::default_for(2).unwrap();
        let w = f4.element(0b10).unwrap();
        assert_eq!(w.pow(3).bits(), 1);
        // and every nonzero z in GF(2^5) satisfies z^31 = 1
        let f32 = FieldContext::default_for(5).unwrap();
        for z in f32.enumerate().into_iter().skip(1) {
            assert_eq!(z.pow(31).bits(), 1);
        }
    }

    #[test]
    fn zero_pow_zero_is_one() {
        let f = FieldContext::default_for(6).unwrap();
        assert_eq!(f.zero().pow(0).bits(), 1);
    }

    #[test]
    fn cross_context_operands_rejected() {
        let a = FieldContext::default_for(3).unwrap().one();
        let b = FieldContext::default_for(4).unwrap().one();
        assert!(a.mul(b).is_err());
        assert!(a.add(b).is_err());
    }

    #[test]
    fn trace_is_balanced_and_square_invariant_small_m() {
        // exhaustive for the sizes unit tests can afford; the acceptance
        // suite extends this to m = 12
        for m in 1..=8 {
            let ctx = FieldContext::default_for(m).unwrap();
            let mut zeros = 0u64;
            for z in ctx.enumerate() {
                let t = z.trace().unwrap();
                let t_sq = z.mul(z).unwrap().trace().unwrap();
                assert_eq!(t, t_sq, "Tr(z) != Tr(z^2) at m={m}, z={:#x}", z.bits());
                if t == 0 {
                    zeros += 1;
                }
            }
            assert_eq!(zeros, ctx.order() / 2, "trace not balanced at m={m}");
        }
    }

    #[test]
    fn trace_is_additive() {
        let ctx = FieldContext::default_for(6).unwrap();
        let all = ctx.enumerate();
        for &a in all.iter().step_by(5) {
            for &b in all.iter().step_by(7) {
                let lhs = a.add(b).unwrap().trace().unwrap();
                let rhs = (a.trace().unwrap() + b.trace().unwrap()) % 2;
                assert_eq!(lhs, rhs);
            }
        }
    }

    proptest! {
        #[test]
        fn field_axioms(m in 1u32..=8, a_raw in 0u32..256, b_raw in 0u32..256, c_raw in 0u32..256) {
            let ctx = FieldContext::default_for(m).unwrap();
            let mask = (ctx.order() - 1) as u32;
            let a = ctx.element(a_raw & mask).unwrap();
            let b = ctx.element(b_raw & mask).unwrap();
            let c = ctx.element(c_raw & mask).unwrap();

            // commutativity
            prop_assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
            prop_assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
            // associativity
            prop_assert_eq!(a.mul(b).unwrap().mul(c).unwrap(), a.mul(b.mul(c).unwrap()).unwrap());
            // distributivity
            let lhs = a.mul(b.add(c).unwrap()).unwrap();
            let rhs = a.mul(b).unwrap().add(a.mul(c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            // identities
            prop_assert_eq!(a.mul(ctx.one()).unwrap(), a);
            prop_assert_eq!(a.add(ctx.zero()).unwrap(), a);
            // inverses for nonzero elements
            if !a.is_zero() {
                prop_assert_eq!(a.mul(a.inverse().unwrap()).unwrap(), ctx.one());
            }
        }
    }
}
