//! Dense univariate polynomials over F_p (internal substrate).
//!
//! Coefficients ascend by degree and the representation is always trimmed.
//! Degrees stay tiny here (a few dozen), so schoolbook arithmetic is right.

use crate::modmath::{mul_mod, PrimeModulus};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for v in &mut c {
            *v %= p;
        }
        let mut f = FpPoly { p, c };
        f.trim();
        f
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn constant(p: u64, v: u64) -> Self {
        Self::new(p, vec![v])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> u64 {
        *self
            .c
            .last()
            .expect("leading coefficient of zero polynomial")
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let p = self.p;
        let mut c = vec![0u64; self.c.len().max(o.c.len())];
        for (i, v) in c.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = o.c.get(i).copied().unwrap_or(0);
            *v = (a + p - b) % p;
        }
        FpPoly::new(p, c)
    }

    pub fn scale(&self, k: u64) -> FpPoly {
        let p = self.p;
        FpPoly::new(p, self.c.iter().map(|&v| mul_mod(v, k, p)).collect())
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        FpPoly::new(p, c)
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        let p = self.p;
        let dd = d.deg().expect("division by zero polynomial");
        let m = PrimeModulus::new(p).expect("valid modulus");
        let lc_inv = m.inv(d.lc()).expect("unit leading coefficient");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let coef = mul_mod(r[i], lc_inv, p);
            if coef == 0 {
                continue;
            }
            q[i - dd] = coef;
            for (j, &dc) in d.c.iter().enumerate() {
                let idx = i - dd + j;
                r[idx] = (r[idx] + p - mul_mod(coef, dc, p)) % p;
            }
        }
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let m = PrimeModulus::new(self.p).expect("valid modulus");
        self.scale(m.inv(self.lc()).expect("unit leading coefficient"))
    }

    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn derivative(&self) -> FpPoly {
        let p = self.p;
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &v)| mul_mod(v, (i as u64) % p, p))
            .collect();
        FpPoly::new(p, c)
    }

    /// `self^e mod m` by binary exponentiation.
    pub fn pow_mod(&self, mut e: u64, m: &FpPoly) -> FpPoly {
        let mut base = self.rem(m);
        let mut acc = FpPoly::constant(self.p, 1).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Product of the distinct irreducible factors (the radical).
    ///
    /// Char-p subtlety: when the derivative vanishes the polynomial is a
    /// p-th power h(x^p) with identical coefficients (Frobenius on F_p is
    /// the identity), so we recurse on h.
    pub fn radical(&self) -> FpPoly {
        let p = self.p;
        match self.deg() {
            None | Some(0) => return FpPoly::constant(p, 1),
            _ => {}
        }
        let d = self.derivative();
        if d.is_zero() {
            let mut h = Vec::new();
            for (i, &v) in self.c.iter().enumerate() {
                if i % p as usize == 0 {
                    h.push(v);
                } else {
                    debug_assert_eq!(v, 0);
                }
            }
            return FpPoly::new(p, h).radical();
        }
        let g = self.gcd(&d);
        if g.deg() == Some(0) {
            return self.monic();
        }
        let w = self.divrem(&g).0.monic();
        let r2 = g.radical();
        let extra = r2.divrem(&w.gcd(&r2)).0;
        w.mul(&extra).monic()
    }

    /// Number of distinct roots in F_p, via deg gcd(x^p - x, self).
    pub fn count_roots(&self) -> usize {
        match self.deg() {
            None | Some(0) => return 0,
            _ => {}
        }
        let xp = FpPoly::x(self.p).pow_mod(self.p, self);
        let g = xp.sub(&FpPoly::x(self.p).rem(self)).gcd(self);
        g.deg().unwrap_or(0)
    }

    /// All roots in F_p, ascending. Multiple roots are reported once.
    pub fn roots(&self) -> Vec<u64> {
        let p = self.p;
        match self.deg() {
            None | Some(0) => return Vec::new(),
            _ => {}
        }
        let xp = FpPoly::x(p).pow_mod(p, self);
        let lin = xp.sub(&FpPoly::x(p).rem(self)).gcd(self);
        let mut out = Vec::new();
        split_linear(&lin, &mut out);
        out.sort_unstable();
        out
    }

    /// Degrees of the irreducible factors of the radical, ascending
    /// (distinct-degree factorization).
    pub fn factor_degrees(&self) -> Vec<usize> {
        let p = self.p;
        let mut g = self.radical();
        let mut out = Vec::new();
        let mut h = FpPoly::x(p).rem(&g);
        let mut d = 0usize;
        while g.deg().unwrap_or(0) > 0 {
            d += 1;
            if 2 * d > g.deg().unwrap() {
                out.push(g.deg().unwrap());
                break;
            }
            h = h.pow_mod(p, &g);
            let u = h.sub(&FpPoly::x(p).rem(&g)).gcd(&g);
            if u.deg().unwrap_or(0) > 0 {
                for _ in 0..u.deg().unwrap() / d {
                    out.push(d);
                }
                g = g.divrem(&u).0;
                if g.deg().unwrap_or(0) > 0 {
                    h = h.rem(&g);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Extract the roots of a product of distinct monic linear factors by
/// character splitting on deterministic shifts.
fn split_linear(g: &FpPoly, out: &mut Vec<u64>) {
    let p = g.p;
    match g.deg() {
        None | Some(0) => return,
        Some(1) => {
            let f = g.monic();
            out.push((p - f.c[0]) % p);
            return;
        }
        _ => {}
    }
    for shift in 0..p {
        let xc = FpPoly::new(p, vec![shift, 1]);
        let ch = xc.pow_mod((p - 1) / 2, g).sub(&FpPoly::constant(p, 1));
        let h = ch.gcd(g);
        let dh = h.deg().unwrap_or(0);
        if dh > 0 && dh < g.deg().unwrap() {
            split_linear(&h, out);
            split_linear(&g.divrem(&h).0, out);
            return;
        }
    }
    unreachable!("no splitting shift found");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec())
    }

    #[test]
    fn divrem_and_gcd() {
        // (x^2 + 1)(x + 3) over F_7
        let a = poly(7, &[1, 0, 1]).mul(&poly(7, &[3, 1]));
        let (q, r) = a.divrem(&poly(7, &[3, 1]));
        assert!(r.is_zero());
        assert_eq!(q, poly(7, &[1, 0, 1]));
        assert_eq!(a.gcd(&poly(7, &[1, 0, 1])), poly(7, &[1, 0, 1]));
    }

    #[test]
    fn roots_and_counts() {
        // x^2 + 1 over F_5: roots 2, 3
        let f = poly(5, &[1, 0, 1]);
        assert_eq!(f.count_roots(), 2);
        assert_eq!(f.roots(), vec![2, 3]);
        // x^2 + 1 over F_7: irreducible
        let g = poly(7, &[1, 0, 1]);
        assert_eq!(g.count_roots(), 0);
        assert!(g.roots().is_empty());
        // (x - 1)^2 (x - 4) over F_7: distinct roots {1, 4}
        let sq = poly(7, &[6, 1])
            .mul(&poly(7, &[6, 1]))
            .mul(&poly(7, &[3, 1]));
        assert_eq!(sq.roots(), vec![1, 4]);
    }

    #[test]
    fn radical_handles_vanishing_derivative() {
        // (x + 1)^5 over F_5 has zero derivative; radical is x + 1
        let mut f = poly(5, &[1, 1]);
        let base = f.clone();
        for _ in 0..4 {
            f = f.mul(&base);
        }
        assert_eq!(f.radical(), poly(5, &[1, 1]));
    }

    #[test]
    fn factor_degrees_examples() {
        assert_eq!(poly(5, &[1, 0, 1]).factor_degrees(), vec![1, 1]);
        assert_eq!(poly(7, &[1, 0, 1]).factor_degrees(), vec![2]);
        // x^4 + 1 = (x^2 + x + 2)(x^2 + 2x + 2) mod 3
        assert_eq!(poly(3, &[1, 0, 0, 0, 1]).factor_degrees(), vec![2, 2]);
        let check = poly(3, &[2, 1, 1]).mul(&poly(3, &[2, 2, 1]));
        assert_eq!(check, poly(3, &[1, 0, 0, 0, 1]));
    }

    #[test]
    fn roots_of_larger_split_polynomial() {
        // prod (x - k) for k = 0..6 over F_101
        let p = 101;
        let mut f = FpPoly::constant(p, 1);
        for k in 0..7u64 {
            f = f.mul(&poly(p, &[(p - k) % p, 1]));
        }
        assert_eq!(f.roots(), vec![0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(f.factor_degrees(), vec![1; 7]);
    }
}
