use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Maximum number of variables a packed monomial can hold.
pub const MAX_VARS: usize = 16;
/// Exponents must stay below this bound so that the byte-parallel tests are valid.
pub const MAX_EXP: u32 = 127;

const HIGH: u128 = 0x8080_8080_8080_8080_8080_8080_8080_8080;
const ONES: u128 = 0x0101_0101_0101_0101_0101_0101_0101_0101;
const LOW7: u128 = 0x7f7f_7f7f_7f7f_7f7f_7f7f_7f7f_7f7f_7f7f;

#[inline]
fn shift(i: usize) -> u32 {
    8 * (15 - i as u32)
}

#[inline]
fn byte_sum(x: u128) -> u32 {
    (x.wrapping_mul(ONES) >> 120) as u32
}

/// Mask keeping variables `lo..hi`.
#[inline]
fn var_mask(lo: usize, hi: usize) -> u128 {
    #[inline]
    fn top(k: usize) -> u128 {
        match k {
            0 => 0,
            k if k >= MAX_VARS => !0,
            k => !0u128 << (128 - 8 * k as u32),
        }
    }
    if lo >= hi {
        return 0;
    }
    top(hi) & !top(lo)
}

/// Exponent vector packed one byte per variable, variable 0 in the top byte.
#[derive(Clone, Copy, Default)]
pub struct Monomial {
    packed: u128,
    deg: u16,
}

impl PartialEq for Monomial {
    #[inline]
    fn eq(&self, other: &Self) -> bool {
        self.packed == other.packed
    }
}
impl Eq for Monomial {}

impl Hash for Monomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.packed.hash(state)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<u32> = (0..MAX_VARS).map(|i| self.exp(i)).collect();
        let last = e.iter().rposition(|&x| x != 0).map_or(0, |p| p + 1);
        write!(f, "Monomial{:?}", &e[..last])
    }
}

impl Monomial {
    #[inline]
    pub fn one() -> Self {
        Monomial { packed: 0, deg: 0 }
    }

    pub fn var(i: usize) -> Self {
        assert!(i < MAX_VARS, "variable index {i} out of range");
        Monomial {
            packed: 1u128 << shift(i),
            deg: 1,
        }
    }

    pub fn from_exps(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_VARS {
            return Err(Error::TooManyVariables(exps.len()));
        }
        let mut packed = 0u128;
        let mut deg = 0u32;
        for (i, &e) in exps.iter().enumerate() {
            if e > MAX_EXP {
                return Err(Error::ExponentOverflow);
            }
            packed |= (e as u128) << shift(i);
            deg += e;
        }
        Ok(Monomial {
            packed,
            deg: deg as u16,
        })
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        ((self.packed >> shift(i)) & 0xff) as u32
    }

    pub fn exps(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exp(i)).collect()
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg as u32
    }

    #[inline]
    pub fn packed(&self) -> u128 {
        self.packed
    }

    /// Product; panics on exponent overflow.
    #[inline]
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("exponent overflow")
    }

    #[inline]
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let p = self.packed + other.packed;
        if p & HIGH != 0 {
            return Err(Error::ExponentOverflow);
        }
        Ok(Monomial {
            packed: p,
            deg: self.deg + other.deg,
        })
    }

    /// Whether `self` divides `other`.
    #[inline]
    pub fn divides(&self, other: &Self) -> bool {
        self.deg <= other.deg && ((other.packed | HIGH) - self.packed) & HIGH == HIGH
    }

    /// `self / other`, assuming `other` divides `self`.
    #[inline]
    pub fn div(&self, other: &Self) -> Self {
        debug_assert!(other.divides(self));
        Monomial {
            packed: self.packed - other.packed,
            deg: self.deg - other.deg,
        }
    }

    pub fn try_div(&self, other: &Self) -> Option<Self> {
        other.divides(self).then(|| self.div(other))
    }

    #[inline]
    fn support_mask(&self) -> u128 {
        (self.packed + LOW7) & HIGH
    }

    #[inline]
    pub fn is_coprime(&self, other: &Self) -> bool {
        self.support_mask() & other.support_mask() == 0
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut packed = 0u128;
        for i in 0..MAX_VARS {
            let s = shift(i);
            let a = (self.packed >> s) & 0xff;
            let b = (other.packed >> s) & 0xff;
            packed |= a.max(b) << s;
        }
        Monomial {
            packed,
            deg: byte_sum(packed) as u16,
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut packed = 0u128;
        for i in 0..MAX_VARS {
            let s = shift(i);
            let a = (self.packed >> s) & 0xff;
            let b = (other.packed >> s) & 0xff;
            packed |= a.min(b) << s;
        }
        Monomial {
            packed,
            deg: byte_sum(packed) as u16,
        }
    }

    /// Index of the first variable with a positive exponent.
    pub fn first_var(&self) -> Option<usize> {
        if self.packed == 0 {
            None
        } else {
            Some((self.packed.leading_zeros() / 8) as usize)
        }
    }

    /// Index of the last variable with a positive exponent.
    pub fn last_var(&self) -> Option<usize> {
        if self.packed == 0 {
            None
        } else {
            Some(15 - (self.packed.trailing_zeros() / 8) as usize)
        }
    }

    /// Degree in the variables `lo..hi`.
    pub fn partial_degree(&self, lo: usize, hi: usize) -> u32 {
        byte_sum(self.packed & var_mask(lo, hi))
    }

    /// Keep only the variables in `lo..hi`.
    pub fn restrict(&self, lo: usize, hi: usize) -> Self {
        let packed = self.packed & var_mask(lo, hi);
        Monomial {
            packed,
            deg: byte_sum(packed) as u16,
        }
    }

    /// Move variable `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        let mut packed = 0u128;
        for (i, &j) in map.iter().enumerate().take(nvars) {
            packed |= ((self.packed >> shift(i)) & 0xff) << shift(j);
        }
        Monomial {
            packed,
            deg: self.deg,
        }
    }
}

/// A monomial order on a polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic.
    Grevlex,
    /// Lexicographic with `x0 > x1 > ...`.
    Lex,
    /// Two grevlex blocks: variables `0..k` are eliminated first.
    Block(usize),
    /// Weighted degree, ties broken by grevlex.
    Weighted(Arc<[u32]>),
}

impl Default for MonomialOrder {
    fn default() -> Self {
        MonomialOrder::Grevlex
    }
}

#[inline]
fn revlex(a: u128, b: u128) -> Ordering {
    b.swap_bytes().cmp(&a.swap_bytes())
}

impl MonomialOrder {
    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Grevlex => a.deg.cmp(&b.deg).then_with(|| revlex(a.packed, b.packed)),
            MonomialOrder::Lex => a.packed.cmp(&b.packed),
            MonomialOrder::Block(k) => {
                let m1 = var_mask(0, *k);
                let (a1, b1) = (a.packed & m1, b.packed & m1);
                let (a2, b2) = (a.packed & !m1, b.packed & !m1);
                byte_sum(a1)
                    .cmp(&byte_sum(b1))
                    .then_with(|| revlex(a1, b1))
                    .then_with(|| byte_sum(a2).cmp(&byte_sum(b2)))
                    .then_with(|| revlex(a2, b2))
            }
            MonomialOrder::Weighted(w) => {
                let wa: u64 = w.iter().enumerate().map(|(i, &x)| x as u64 * a.exp(i) as u64).sum();
                let wb: u64 = w.iter().enumerate().map(|(i, &x)| x as u64 * b.exp(i) as u64).sum();
                wa.cmp(&wb)
                    .then_with(|| a.deg.cmp(&b.deg))
                    .then_with(|| revlex(a.packed, b.packed))
            }
        }
    }

    /// Whether every monomial involving one of the first `k` variables is
    /// larger than every monomial free of them.
    pub fn eliminates(&self, k: usize) -> bool {
        match self {
            MonomialOrder::Lex => true,
            MonomialOrder::Block(b) => *b == k,
            _ => k == 0,
        }
    }
}
