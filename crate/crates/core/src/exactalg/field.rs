use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{FpReducer, GenericReducer, RowReducer};
use crate::par::Exec;

/// Default modulus for all prime-field computations.
pub const DEFAULT_PRIME: u32 = 10007;

/// An exact field, used as a context object: elements are plain values and
/// every operation goes through the field.
pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Square root inside the field, if one exists.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// A random element; over the rationals this draws small integers.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a + b * c`
    fn mul_add(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Self::Elem {
        self.add(a, &self.mul(b, c))
    }

    /// `sum_i c_i v_i` for dense vectors of length `len`.
    fn linear_combination(&self, len: usize, terms: &[(Self::Elem, &[Self::Elem])]) -> Vec<Self::Elem> {
        let mut acc = vec![self.zero(); len];
        for (c, v) in terms {
            if self.is_zero(c) {
                continue;
            }
            for (a, x) in acc.iter_mut().zip(v.iter()) {
                if !self.is_zero(x) {
                    *a = self.mul_add(a, c, x);
                }
            }
        }
        acc
    }

    /// An empty row space of the given width.
    fn row_reducer(&self, ncols: usize, exec: Exec) -> Box<dyn RowReducer<Self::Elem>> {
        Box::new(GenericReducer::new(self.clone(), ncols, exec))
    }

    /// The element as a rational number, in characteristic zero.
    fn to_rational(&self, _a: &Self::Elem) -> Option<BigRational> {
        None
    }

    /// The image of a rational number, if its denominator is invertible.
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem> {
        let n = self.parse(&q.numer().to_string())?;
        let d = self.parse(&q.denom().to_string())?;
        self.div(&n, &d)
    }

    /// A random element that is not zero.
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let v = self.random(rng);
            if !self.is_zero(&v) {
                return v;
            }
        }
    }
}

/// The prime field with `p` elements, `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn reduce_u64(&self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    /// Signed representative in `(-p/2, p/2]`.
    pub fn centered(&self, a: u32) -> i64 {
        let p = self.p as i64;
        let a = a as i64;
        if a > p / 2 {
            a - p
        } else {
            a
        }
    }

    fn tonelli_shanks(&self, a: u32) -> Option<u32> {
        let p = self.p as u64;
        if a == 0 {
            return Some(0);
        }
        if p == 2 {
            return Some(a);
        }
        let a = a as u64;
        if mod_pow(a, (p - 1) / 2, p) != 1 {
            return None;
        }
        let mut q = p - 1;
        let mut s = 0;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while mod_pow(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = mod_pow(z, q, p);
        let mut t = mod_pow(a, q, p);
        let mut r = mod_pow(a, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = t2 * t2 % p;
                i += 1;
            }
            let b = mod_pow(c, 1 << (m - i - 1), p);
            m = i;
            c = b * b % p;
            t = t * c % p;
            r = r * b % p;
        }
        Some(r as u32)
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let r = n.sqrt();
    let mut d = 3;
    while d <= r {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Inverse modulo `p` by the extended Euclidean algorithm.
pub fn inverse_mod(a: u32, p: u32) -> Option<u32> {
    let (mut r0, mut r1) = (p as i64, a as i64 % p as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i64) as u32)
}

impl Field for PrimeField {
    type Elem = u32;

    #[inline]
    fn zero(&self) -> u32 {
        0
    }
    #[inline]
    fn one(&self) -> u32 {
        1
    }
    #[inline]
    fn from_i64(&self, v: i64) -> u32 {
        self.reduce_i64(v)
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (*a as u64 + self.p as u64 - *b as u64) as u32
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> Result<u32> {
        if *a == 0 {
            return Err(Error::DivisionByZero);
        }
        inverse_mod(*a, self.p).ok_or(Error::DivisionByZero)
    }
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn sqrt(&self, a: &u32) -> Option<u32> {
        self.tonelli_shanks(*a)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }
    fn characteristic(&self) -> u64 {
        self.p as u64
    }
    fn format(&self, a: &u32) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<u32> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = self.parse(n)?;
            let d = self.parse(d)?;
            return self.div(&n, &d);
        }
        let v: i64 = s.parse().map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))?;
        Ok(self.reduce_i64(v))
    }
    fn linear_combination(&self, len: usize, terms: &[(u32, &[u32])]) -> Vec<u32> {
        let p = self.p as u64;
        let sq = (p - 1) * (p - 1);
        let limit = ((u64::MAX - p) / sq.max(1)).max(1);
        let mut acc = vec![0u64; len];
        let mut pending = 0u64;
        for (c, v) in terms {
            if *c == 0 {
                continue;
            }
            let c = *c as u64;
            for (a, &x) in acc.iter_mut().zip(v.iter()) {
                *a += c * x as u64;
            }
            pending += 1;
            if pending + 1 >= limit {
                for a in acc.iter_mut() {
                    *a %= p;
                }
                pending = 0;
            }
        }
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }
    fn row_reducer(&self, ncols: usize, exec: Exec) -> Box<dyn RowReducer<u32>> {
        Box::new(FpReducer::new(self.p, ncols, exec))
    }
    #[inline]
    fn mul_add(&self, a: &u32, b: &u32, c: &u32) -> u32 {
        ((*a as u64 + *b as u64 * *c as u64) % self.p as u64) as u32
    }
}

/// The rational numbers, with arbitrary-precision entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

/// Small-integer range used when drawing random rationals.
const RATIONAL_SAMPLE_BOUND: i64 = 50;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sqrt(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_negative() {
            return None;
        }
        let n = a.numer().sqrt();
        let d = a.denom().sqrt();
        if &(&n * &n) == a.numer() && &(&d * &d) == a.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }
    fn to_rational(&self, a: &BigRational) -> Option<BigRational> {
        Some(a.clone())
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND))
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad rational `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(BigRational::new(n, d))
            }
            None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
        }
    }
}

/// Exact conversion of a rational with small parts to an `i64`, if integral.
pub fn rational_to_i64(q: &BigRational) -> Option<i64> {
    if q.denom().is_one() {
        q.numer().to_i64()
    } else {
        None
    }
}

/// `n / d` with `n = a d (mod m)` and `|n|, d <= sqrt(m / 2)`.
pub fn rational_reconstruction(a: u64, m: u64) -> Option<BigRational> {
    let bound = ((m / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (n, d) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    if (n.rem_euclid(m as i128) - (a as i128 * d).rem_euclid(m as i128)).rem_euclid(m as i128) != 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// `gcd(|num|, den) = 1` and `den > 0`.
pub fn is_reduced(q: &BigRational) -> bool {
    q.denom().is_positive() && q.numer().gcd(q.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_of_three_mod_default_prime() {
        let f = PrimeField::default();
        // 3 * 3336 = 10008 = 1 + 10007
        assert_eq!(inverse_mod(3, 10007), Some(3336));
        assert_eq!(f.mul(&3, &3336), 1);
        assert_eq!(f.inv(&3).unwrap(), 3336);
    }

    #[test]
    fn rational_sum_is_reduced() {
        let q = Rationals;
        let a = q.parse("2/4").unwrap();
        let b = q.parse("1/4").unwrap();
        let s = q.add(&a, &b);
        assert_eq!(s, q.parse("3/4").unwrap());
        assert!(is_reduced(&s));
        assert_eq!(q.format(&s), "3/4");
    }

    #[test]
    fn reconstruction_recovers_small_fractions() {
        let f = PrimeField::new(2147483647).unwrap();
        for (n, d) in [(3i64, 7i64), (-5, 12), (0, 1), (30000, 1), (-1, 30000)] {
            let a = f.div(&f.from_i64(n), &f.from_i64(d)).unwrap();
            let q = rational_reconstruction(a as u64, f.modulus() as u64).unwrap();
            assert_eq!(q, BigRational::new(BigInt::from(n), BigInt::from(d)));
        }
        let q = BigRational::new(BigInt::from(-4), BigInt::from(6));
        assert_eq!(Rationals.from_rational(&q).unwrap(), q);
        assert_eq!(f.from_rational(&q).unwrap(), f.div(&f.from_i64(-2), &f.from_i64(3)).unwrap());
    }

    #[test]
    fn random_elements_invert() {
        let f = PrimeField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = f.random_nonzero(&mut rng);
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let f = PrimeField::default();
        assert_eq!(f.inv(&0), Err(Error::DivisionByZero));
        assert_eq!(f.div(&5, &0), Err(Error::DivisionByZero));
        assert_eq!(Rationals.inv(&Rationals.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert_eq!(PrimeField::new(10005), Err(Error::NotPrime(10005)));
        assert!(PrimeField::new(101).is_ok());
    }

    #[test]
    fn square_roots() {
        let f = PrimeField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let a = f.random(&mut rng);
            let sq = f.mul(&a, &a);
            let r = f.sqrt(&sq).unwrap();
            assert_eq!(f.mul(&r, &r), sq);
        }
        let q = Rationals;
        assert_eq!(q.sqrt(&q.parse("9/4").unwrap()), Some(q.parse("3/2").unwrap()));
        assert_eq!(q.sqrt(&q.from_i64(2)), None);
    }

    #[test]
    fn centered_representatives() {
        let f = PrimeField::new(101).unwrap();
        assert_eq!(f.centered(100), -1);
        assert_eq!(f.centered(50), 50);
        assert_eq!(f.from_i64(-1), 100);
    }
}
