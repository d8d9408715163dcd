//! Exact modular arithmetic for odd prime moduli.
//!
//! Everything here is branch-on-value exact integer arithmetic: products are
//! taken in `u128`, so no silent overflow is possible for any 64-bit modulus.

use crate::error::{Error, Result};

/// A validated odd prime modulus, optionally backed by a quadratic-residue
/// bit table for O(1) Legendre symbols at small `p`.
///
/// Construction runs a deterministic Miller-Rabin test; a composite or even
/// modulus is rejected. Values are immutable afterwards and safe to share
/// across threads.
#[derive(Clone, Debug)]
pub struct PrimeModulus {
    p: u64,
    qr_table: Option<Box<[u64]>>,
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p % 2 == 0 {
            return Err(Error::UnsupportedModulus(p));
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeModulus { p, qr_table: None })
    }

    /// Like [`PrimeModulus::new`] but precomputes the set of nonzero squares
    /// mod `p` (one bit per residue). Callers observe no behavioral
    /// difference, only faster `legendre`.
    pub fn with_residue_table(p: u64) -> Result<Self> {
        let mut m = Self::new(p)?;
        let words = (p as usize + 63) / 64;
        let mut bits = vec![0u64; words];
        for x in 1..=(p - 1) / 2 {
            let sq = mul_mod(x, x, p);
            bits[(sq / 64) as usize] |= 1 << (sq % 64);
        }
        m.qr_table = Some(bits.into_boxed_slice());
        Ok(m)
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Reduce an arbitrary integer to its canonical residue in `[0, p)`.
    #[inline]
    pub fn reduce_int(&self, a: i128) -> u64 {
        a.rem_euclid(self.p as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }

    /// Modular inverse of `a`, for `0 < a < p`.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::DivisionByZero(self.p));
        }
        // extended Euclid on (a, p); p prime so gcd is 1
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (self.p as i64, a as i64);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        debug_assert_eq!(r, 1);
        Ok(if t < 0 {
            (t + self.p as i64) as u64
        } else {
            t as u64
        })
    }

    /// Legendre symbol (a/p) for any integer `a`: 0 iff p | a, +1 for nonzero
    /// squares, -1 otherwise.
    pub fn legendre(&self, a: i128) -> i32 {
        let r = self.reduce_int(a);
        if r == 0 {
            return 0;
        }
        if let Some(bits) = &self.qr_table {
            return if bits[(r / 64) as usize] >> (r % 64) & 1 == 1 {
                1
            } else {
                -1
            };
        }
        // Euler's criterion
        let e = self.pow(r, (self.p - 1) / 2);
        if e == 1 {
            1
        } else {
            debug_assert_eq!(e, self.p - 1);
            -1
        }
    }

    /// Canonical square root of `a` mod `p` (Tonelli-Shanks). Returns the
    /// smaller of the two roots so downstream point construction is
    /// deterministic.
    pub fn sqrt(&self, a: u64) -> Result<u64> {
        let p = self.p;
        let a = a % p;
        if a == 0 {
            return Ok(0);
        }
        if self.legendre(a as i128) != 1 {
            return Err(Error::NotASquare(a, p));
        }
        let r = if p % 4 == 3 {
            self.pow(a, (p + 1) / 4)
        } else {
            // p = 1 mod 4: full Tonelli-Shanks
            let mut q = p - 1;
            let mut s = 0u32;
            while q % 2 == 0 {
                q /= 2;
                s += 1;
            }
            let mut z = 2;
            while self.legendre(z as i128) != -1 {
                z += 1;
            }
            let mut m = s;
            let mut c = self.pow(z, q);
            let mut t = self.pow(a, q);
            let mut r = self.pow(a, (q + 1) / 2);
            while t != 1 {
                let mut i = 0u32;
                let mut t2 = t;
                while t2 != 1 {
                    t2 = self.mul(t2, t2);
                    i += 1;
                }
                let mut b = c;
                for _ in 0..m - i - 1 {
                    b = self.mul(b, b);
                }
                m = i;
                c = self.mul(b, b);
                t = self.mul(t, c);
                r = self.mul(r, b);
            }
            r
        };
        Ok(r.min(p - r))
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    a %= m;
    let mut acc: u64 = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit integers. The witness set
/// {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is complete below 3.3e24.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= x`, ascending (sieve of Eratosthenes).
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Prime factorization of `n`, ascending, as (prime, exponent) pairs.
///
/// Trial division up to 2^16 covers everything below 2^32 (the scan scale);
/// larger leftovers go through Brent's rho.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut fac: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let push = |q: u64, fac: &mut Vec<(u64, u32)>| match fac.iter_mut().find(|(f, _)| *f == q) {
        Some((_, e)) => *e += 1,
        None => fac.push((q, 1)),
    };
    for d in std::iter::once(2).chain((3..=65536u64).step_by(2)) {
        if d * d > m {
            break;
        }
        while m % d == 0 {
            m /= d;
            push(d, &mut fac);
        }
    }
    if m > 1 {
        if m < (1u64 << 32) || is_prime_u64(m) {
            push(m, &mut fac);
        } else {
            let mut stack = vec![m];
            while let Some(v) = stack.pop() {
                if is_prime_u64(v) {
                    push(v, &mut fac);
                    continue;
                }
                let d = pollard_rho(v);
                stack.push(d);
                stack.push(v / d);
            }
        }
    }
    fac.sort_unstable();
    fac
}

/// Brent-cycle Pollard rho; `n` must be odd, composite, and free of factors
/// below 2^16. Deterministic: the polynomial offset is stepped in order.
fn pollard_rho(n: u64) -> u64 {
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
            count += 1;
            if count > n.isqrt() + 1 {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
    }
    unreachable!("rho failed to split {n}");
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}
