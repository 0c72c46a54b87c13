//! Word-size prime fields in Montgomery form, plus keyed random streams.
//!
//! Elements are stored as `a·2^64 mod p`. Only the owning [`PrimeField`]
//! knows how to interpret them, so every operation goes through the field.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// An element of a prime field, in Montgomery representation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp(u64);

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fp[{}]", self.0)
    }
}

/// The prime field `Z/pZ` for an odd prime `p < 2^63`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    /// `-p^{-1} mod 2^64`.
    p_inv: u64,
    /// `2^64 mod p`, the Montgomery form of one.
    one: u64,
    /// `2^128 mod p`.
    r2: u64,
}

impl PrimeField {
    /// Largest prime below 2^62.
    pub const DEFAULT_PRIME: u64 = 4_611_686_018_427_387_847;

    /// Creates the field, rejecting even, composite or oversized moduli.
    pub fn new(p: u64) -> Result<PrimeField> {
        if p < 3 || p % 2 == 0 || p >= 1 << 63 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let one = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((one as u128 * one as u128) % p as u128) as u64;
        Ok(PrimeField {
            p,
            p_inv: inv.wrapping_neg(),
            one,
            r2,
        })
    }

    /// The field with [`Self::DEFAULT_PRIME`].
    pub fn default_field() -> PrimeField {
        PrimeField::new(Self::DEFAULT_PRIME).expect("default prime is prime")
    }

    #[inline]
    pub fn prime(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.p_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    pub fn zero(&self) -> Fp {
        Fp(0)
    }

    #[inline]
    pub fn one(&self) -> Fp {
        Fp(self.one)
    }

    /// Maps an integer into the field.
    #[inline]
    pub fn from_u64(&self, a: u64) -> Fp {
        Fp(self.reduce((a % self.p) as u128 * self.r2 as u128))
    }

    pub fn from_i64(&self, a: i64) -> Fp {
        let x = self.from_u64(a.unsigned_abs());
        if a < 0 {
            self.neg(x)
        } else {
            x
        }
    }

    /// Canonical representative in `[0, p)`.
    #[inline]
    pub fn to_u64(&self, a: Fp) -> u64 {
        self.reduce(a.0 as u128)
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn to_i64(&self, a: Fp) -> i64 {
        let v = self.to_u64(a);
        if v > self.p / 2 {
            -((self.p - v) as i64)
        } else {
            v as i64
        }
    }

    #[inline]
    pub fn is_zero(&self, a: Fp) -> bool {
        a.0 == 0
    }

    #[inline]
    pub fn is_one(&self, a: Fp) -> bool {
        a.0 == self.one
    }

    #[inline]
    pub fn add(&self, a: Fp, b: Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fp, b: Fp) -> Fp {
        Fp(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.p - b.0
        })
    }

    #[inline]
    pub fn neg(&self, a: Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Fp, b: Fp) -> Fp {
        Fp(self.reduce(a.0 as u128 * b.0 as u128))
    }

    pub fn pow(&self, mut a: Fp, mut e: u64) -> Fp {
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: Fp) -> Result<Fp> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i128, self.to_u64(a) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.from_u64(t0.rem_euclid(self.p as i128) as u64))
    }

    pub fn div(&self, a: Fp, b: Fp) -> Result<Fp> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        self.from_u64(rng.gen_range(0..self.p))
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        self.from_u64(rng.gen_range(1..self.p))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Miller-Rabin with the first twelve prime bases, which is exact below 2^64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Key for a reproducible random stream: a run seed plus a branch path.
///
/// Each child key hashes its tag into the stream id, so sibling branches
/// draw independent streams regardless of the order they are visited in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngKey {
    seed: u64,
    stream: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngKey {
    pub fn new(seed: u64) -> RngKey {
        RngKey { seed, stream: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives the key of a sub-branch.
    pub fn child(&self, tag: u64) -> RngKey {
        RngKey {
            seed: self.seed,
            stream: splitmix(self.stream ^ splitmix(tag.wrapping_add(0x5851_f42d_4c95_7f2d))),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}
