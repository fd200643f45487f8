//! Fixed-width multiprecision unsigned arithmetic.
//!
//! A [`BigUint`] is `W` little-endian 32-bit limbs and nothing else: no
//! length field, no heap. Carries are tracked explicitly with 32-bit
//! operations, and modular multiplication is interleaved shift-and-add, so
//! nothing here needs a double-width multiplier or an allocator.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PmpError {
    #[error("modulus is zero")]
    DivisionByZero,
    #[error("operand is not reduced modulo the modulus")]
    NotReduced,
    #[error("invalid hex digit {0:?}")]
    InvalidHex(char),
    #[error("value does not fit in the configured width")]
    Overflow,
}

/// Unsigned integer of `32 * W` bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BigUint<const W: usize = 8> {
    limbs: [u32; W],
}

/// The default 256-bit width.
pub type U256 = BigUint<8>;

impl<const W: usize> Default for BigUint<W> {
    fn default() -> Self {
        Self::ZERO
    }
}

impl<const W: usize> BigUint<W> {
    pub const BITS: u32 = 32 * W as u32;
    pub const ZERO: Self = BigUint { limbs: [0; W] };
    pub const MAX: Self = BigUint {
        limbs: [u32::MAX; W],
    };

    /// Builds a value from limbs, least significant first.
    pub const fn from_limbs(limbs: [u32; W]) -> Self {
        BigUint { limbs }
    }

    pub const fn limbs(&self) -> &[u32; W] {
        &self.limbs
    }

    /// Low 32W bits of `value`.
    pub fn from_u64(value: u64) -> Self {
        let mut out = Self::ZERO;
        for (i, limb) in out.limbs.iter_mut().take(2).enumerate() {
            *limb = (value >> (32 * i)) as u32;
        }
        out
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn bit(&self, index: u32) -> bool {
        let limb = (index / 32) as usize;
        limb < W && (self.limbs[limb] >> (index % 32)) & 1 == 1
    }

    /// Number of significant bits.
    pub fn bit_len(&self) -> u32 {
        self.limbs
            .iter()
            .rposition(|&l| l != 0)
            .map_or(0, |i| 32 * i as u32 + 32 - self.limbs[i].leading_zeros())
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = *self;
        for (o, b) in out.limbs.iter_mut().zip(other.limbs) {
            *o ^= b;
        }
        out
    }

    /// `self * 2^bits mod 2^(32W)`, plus whether any set bit was shifted out.
    pub fn shl(&self, bits: u32) -> (Self, bool) {
        if bits >= Self::BITS {
            return (Self::ZERO, !self.is_zero());
        }
        let overflow = bits > 0 && self.bit_len() + bits > Self::BITS;
        let limb_shift = (bits / 32) as usize;
        let bit_shift = bits % 32;
        let mut out = Self::ZERO;
        for i in (limb_shift..W).rev() {
            let src = i - limb_shift;
            let mut limb = self.limbs[src] << bit_shift;
            if bit_shift > 0 && src > 0 {
                limb |= self.limbs[src - 1] >> (32 - bit_shift);
            }
            out.limbs[i] = limb;
        }
        (out, overflow)
    }

    fn shl1_or(&self, low_bit: bool) -> (Self, bool) {
        let mut out = Self::ZERO;
        let mut carry = u32::from(low_bit);
        for (o, &l) in out.limbs.iter_mut().zip(&self.limbs) {
            *o = (l << 1) | carry;
            carry = l >> 31;
        }
        (out, carry == 1)
    }

    /// Schoolbook addition. The flag is the carry out of the top limb.
    pub fn add(&self, other: &Self) -> (Self, bool) {
        let mut out = Self::ZERO;
        let mut carry = false;
        for i in 0..W {
            let (s, c1) = self.limbs[i].overflowing_add(other.limbs[i]);
            let (s, c2) = s.overflowing_add(u32::from(carry));
            out.limbs[i] = s;
            carry = c1 || c2;
        }
        (out, carry)
    }

    /// Schoolbook subtraction. The flag is the borrow out of the top limb.
    pub fn sub(&self, other: &Self) -> (Self, bool) {
        let mut out = Self::ZERO;
        let mut borrow = false;
        for i in 0..W {
            let (d, b1) = self.limbs[i].overflowing_sub(other.limbs[i]);
            let (d, b2) = d.overflowing_sub(u32::from(borrow));
            out.limbs[i] = d;
            borrow = b1 || b2;
        }
        (out, borrow)
    }

    /// Remainder by binary long division.
    pub fn rem(&self, modulus: &Self) -> Result<Self, PmpError> {
        if modulus.is_zero() {
            return Err(PmpError::DivisionByZero);
        }
        let mut r = Self::ZERO;
        for i in (0..self.bit_len()).rev() {
            let (shifted, carry) = r.shl1_or(self.bit(i));
            r = reduce_once(shifted, carry, modulus);
        }
        Ok(r)
    }

    /// `(self + other) mod modulus` for reduced operands.
    pub fn add_mod(&self, other: &Self, modulus: &Self) -> Result<Self, PmpError> {
        check_reduced(&[self, other], modulus)?;
        let (sum, carry) = self.add(other);
        Ok(reduce_once(sum, carry, modulus))
    }

    /// `(self * other) mod modulus` for reduced operands, by interleaved
    /// shift-and-add over the bits of `other`, most significant first.
    pub fn mul_mod(&self, other: &Self, modulus: &Self) -> Result<Self, PmpError> {
        check_reduced(&[self, other], modulus)?;
        let mut acc = Self::ZERO;
        for i in (0..Self::BITS).rev() {
            let (doubled, carry) = acc.shl1_or(false);
            acc = reduce_once(doubled, carry, modulus);
            if other.bit(i) {
                let (sum, carry) = acc.add(self);
                acc = reduce_once(sum, carry, modulus);
            }
        }
        Ok(acc)
    }

    pub fn from_hex(text: &str) -> Result<Self, PmpError> {
        let digits = text
            .strip_prefix("0x")
            .or_else(|| text.strip_prefix("0X"))
            .unwrap_or(text);
        let mut out = Self::ZERO;
        for c in digits.chars() {
            let d = c.to_digit(16).ok_or(PmpError::InvalidHex(c))?;
            let (shifted, overflow) = out.shl(4);
            if overflow {
                return Err(PmpError::Overflow);
            }
            out = shifted;
            out.limbs[0] |= d;
        }
        Ok(out)
    }

    /// Lowercase big-endian hex without leading zeros ("0" for zero).
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(8 * W);
        for limb in self.limbs.iter().rev() {
            s.push_str(&format!("{limb:08x}"));
        }
        let trimmed = s.trim_start_matches('0');
        if trimmed.is_empty() {
            "0".to_string()
        } else {
            trimmed.to_string()
        }
    }
}

/// Given `value` < 2m, possibly with a carry bit above the top limb,
/// returns `value mod m`.
fn reduce_once<const W: usize>(value: BigUint<W>, carry: bool, m: &BigUint<W>) -> BigUint<W> {
    if carry || value >= *m {
        value.sub(m).0
    } else {
        value
    }
}

fn check_reduced<const W: usize>(
    operands: &[&BigUint<W>],
    modulus: &BigUint<W>,
) -> Result<(), PmpError> {
    if modulus.is_zero() {
        return Err(PmpError::DivisionByZero);
    }
    if operands.iter().any(|x| *x >= modulus) {
        return Err(PmpError::NotReduced);
    }
    Ok(())
}

impl<const W: usize> Ord for BigUint<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.limbs.iter().rev().cmp(other.limbs.iter().rev())
    }
}

impl<const W: usize> PartialOrd for BigUint<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const W: usize> std::ops::BitXor for BigUint<W> {
    type Output = Self;

    fn bitxor(self, rhs: Self) -> Self {
        self.xor(&rhs)
    }
}

impl<const W: usize> FromStr for BigUint<W> {
    type Err = PmpError;

    fn from_str(s: &str) -> Result<Self, PmpError> {
        Self::from_hex(s)
    }
}

impl<const W: usize> fmt::Display for BigUint<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", self.to_hex())
    }
}

impl<const W: usize> fmt::Debug for BigUint<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigUint(0x{})", self.to_hex())
    }
}
