//! Short-Weierstrass elliptic curves over F_p: group law, order counting,
//! point orders, and the (L, M) group structure.
//!
//! Everything assumes p >= 5; the chord-tangent law degenerates in
//! characteristics 2 and 3.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::modmath::{factor_u64, lcm_u64, PrimeModulus};
use crate::polyfp::FpPoly;

/// Point counting switches from the exhaustive Legendre sum to
/// baby-step/giant-step at this modulus size.
const BSGS_THRESHOLD: u64 = 1 << 16;

/// An elliptic curve y^2 = x^3 + Ax + B over Q with integer coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveQ {
    a: i64,
    b: i64,
}

impl CurveQ {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        let curve = CurveQ { a, b };
        if curve.disc_core() == BigInt::from(0) {
            return Err(Error::SingularCurve);
        }
        Ok(curve)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// 4A^3 + 27B^2, exact.
    pub(crate) fn disc_core(&self) -> BigInt {
        let a = BigInt::from(self.a);
        let b = BigInt::from(self.b);
        4 * a.pow(3) + 27 * b.pow(2)
    }

    /// The curve discriminant -16(4A^3 + 27B^2), exact.
    pub fn discriminant(&self) -> BigInt {
        -16 * self.disc_core()
    }

    /// True when p does not divide the curve discriminant.
    pub fn good_reduction_at(&self, p: u64) -> bool {
        use num_integer::Integer;
        use num_traits::Zero;
        !self.discriminant().mod_floor(&BigInt::from(p)).is_zero()
    }
}

impl std::fmt::Display for CurveQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "y^2 = x^3 ")?;
        match self.a {
            0 => {}
            1 => write!(f, "+ x ")?,
            -1 => write!(f, "- x ")?,
            a if a > 0 => write!(f, "+ {a}x ")?,
            a => write!(f, "- {}x ", -a)?,
        }
        match self.b {
            0 => {}
            b if b > 0 => write!(f, "+ {b} ")?,
            b => write!(f, "- {} ", -b)?,
        }
        write!(f, "over Q")
    }
}

/// A point of E(F_p): either the point at infinity or an affine pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Infinity,
    Affine { x: u64, y: u64 },
}

impl Point {
    pub fn affine(x: u64, y: u64) -> Self {
        Point::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

/// Bare Weierstrass group over F_p, used internally so the quadratic twist
/// (which has no Q-model here) shares the arithmetic.
#[derive(Clone, Debug)]
pub(crate) struct Wei {
    pub m: PrimeModulus,
    pub a: u64,
    pub b: u64,
}

impl Wei {
    pub fn p(&self) -> u64 {
        self.m.p()
    }

    /// f(x) = x^3 + ax + b mod p.
    pub fn f(&self, x: u64) -> u64 {
        let m = &self.m;
        m.add(m.add(m.mul(m.mul(x, x), x), m.mul(self.a, x)), self.b)
    }

    pub fn is_on_curve(&self, pt: Point) -> bool {
        match pt {
            Point::Infinity => true,
            Point::Affine { x, y } => x < self.p() && y < self.p() && self.m.mul(y, y) == self.f(x),
        }
    }

    pub fn neg(&self, pt: Point) -> Point {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::Affine {
                x,
                y: self.m.neg(y),
            },
        }
    }

    /// Chord-tangent addition. Inputs must lie on the curve.
    pub fn add(&self, p1: Point, p2: Point) -> Point {
        let m = &self.m;
        let (x1, y1, x2, y2) = match (p1, p2) {
            (Point::Infinity, q) => return q,
            (q, Point::Infinity) => return q,
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if m.add(y1, y2) == 0 {
                return Point::Infinity;
            }
            // tangent: (3x^2 + a) / 2y
            let num = m.add(m.mul(3 % m.p(), m.mul(x1, x1)), self.a);
            let den = m.mul(2, y1);
            m.mul(num, m.inv(den).expect("2y != 0 off 2-torsion"))
        } else {
            let num = m.sub(y2, y1);
            let den = m.sub(x2, x1);
            m.mul(num, m.inv(den).expect("x1 != x2"))
        };
        let x3 = m.sub(m.sub(m.mul(lambda, lambda), x1), x2);
        let y3 = m.sub(m.mul(lambda, m.sub(x1, x3)), y1);
        Point::Affine { x: x3, y: y3 }
    }

    /// k-fold sum by double-and-add; 0*P is the identity.
    pub fn mul(&self, mut k: u64, pt: Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = pt;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// A uniformly sampled affine point (canonical lift, smaller y).
    pub fn random_affine(&self, rng: &mut ChaCha8Rng) -> Point {
        let p = self.p();
        loop {
            let x = rng.gen_range(0..p);
            let v = self.f(x);
            if v == 0 {
                return Point::Affine { x, y: 0 };
            }
            if self.m.legendre(v as i128) == 1 {
                let y = self.m.sqrt(v).expect("legendre = 1");
                return Point::Affine { x, y };
            }
        }
    }

    /// Quadratic twist by the least non-residue.
    pub fn twist(&self) -> Wei {
        let m = &self.m;
        let d = (2..)
            .find(|&d| m.legendre(d as i128) == -1)
            .expect("non-residue exists");
        let d2 = m.mul(d, d);
        Wei {
            m: self.m.clone(),
            a: m.mul(self.a, d2),
            b: m.mul(self.b, m.mul(d2, d)),
        }
    }

    pub fn f_poly(&self) -> FpPoly {
        FpPoly::new(self.p(), vec![self.b, self.a, 0, 1])
    }
}

/// A curve over Q reduced at a good prime p >= 5.
#[derive(Clone, Debug)]
pub struct ReducedCurve {
    curve: CurveQ,
    w: Wei,
}

impl ReducedCurve {
    pub fn curve(&self) -> &CurveQ {
        &self.curve
    }

    pub fn p(&self) -> u64 {
        self.w.p()
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.w.m
    }

    /// A mod p.
    pub fn a(&self) -> u64 {
        self.w.a
    }

    /// B mod p.
    pub fn b(&self) -> u64 {
        self.w.b
    }

    /// f(x) = x^3 + ax + b mod p.
    pub fn f(&self, x: u64) -> u64 {
        self.w.f(x)
    }

    pub fn is_on_curve(&self, pt: Point) -> bool {
        self.w.is_on_curve(pt)
    }

    pub(crate) fn wei(&self) -> &Wei {
        &self.w
    }
}

/// Group order, structure pair, and trace data for one reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupInfo {
    /// |E(F_p)|
    pub n: u64,
    /// E(F_p) = Z/L x Z/M with L | M; M is the group exponent.
    pub l: u64,
    pub m: u64,
    /// Trace of Frobenius a_p = p + 1 - n.
    pub trace: i64,
    /// a_p = 0 (equivalent to n = p + 1 for p >= 5).
    pub supersingular: bool,
    /// Prime factorization of n, ascending.
    pub n_factored: Vec<(u64, u32)>,
}

/// Reduce E mod p. Rejects composite p, primes dividing the discriminant
/// (bad reduction), and p < 5.
pub fn reduce_curve(curve: &CurveQ, p: u64) -> Result<ReducedCurve> {
    use num_integer::Integer;
    if p < 2 || !crate::modmath::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let disc = curve.discriminant();
    if disc.mod_floor(&BigInt::from(p)) == BigInt::from(0) {
        return Err(Error::BadReduction(p));
    }
    if p < 5 {
        return Err(Error::UnsupportedPrime(p));
    }
    let m = PrimeModulus::new(p)?;
    let a = m.reduce_int(curve.a as i128);
    let b = m.reduce_int(curve.b as i128);
    Ok(ReducedCurve {
        curve: *curve,
        w: Wei { m, a, b },
    })
}

/// Group sum of two points. Fails on off-curve input.
pub fn point_add(p1: Point, p2: Point, c: &ReducedCurve) -> Result<Point> {
    if !c.is_on_curve(p1) || !c.is_on_curve(p2) {
        return Err(Error::InvalidPoint);
    }
    Ok(c.w.add(p1, p2))
}

/// k-fold sum of a point. Fails on off-curve input.
pub fn scalar_mul(k: u64, pt: Point, c: &ReducedCurve) -> Result<Point> {
    if !c.is_on_curve(pt) {
        return Err(Error::InvalidPoint);
    }
    Ok(c.w.mul(k, pt))
}

/// The x-coordinate of 2(x, y) as the rational function r(x)/s(x) with
/// r(x) = x^4 - 2ax^2 - 8bx + a^2 and s(x) = 4x^3 + 4ax + 4b. Fails when
/// s(x) = 0, i.e. x belongs to a 2-torsion point or to no curve point.
pub fn double_x_rational(x: u64, c: &ReducedCurve) -> Result<u64> {
    let m = c.modulus();
    let s = m.mul(4, c.f(x));
    if s == 0 {
        return Err(Error::TwoTorsionX(x));
    }
    let x2 = m.mul(x, x);
    let r = m.add(
        m.sub(
            m.sub(m.mul(x2, x2), m.mul(2, m.mul(c.a(), x2))),
            m.mul(8, m.mul(c.b(), x)),
        ),
        m.mul(c.a(), c.a()),
    );
    Ok(m.mul(r, m.inv(s)?))
}

/// The rational points with the given x-coordinate: none, one (y = 0), or a
/// conjugate pair, ascending by y.
pub fn lift_points_at_x(x: u64, c: &ReducedCurve) -> Vec<Point> {
    let v = c.f(x);
    if v == 0 {
        return vec![Point::Affine { x, y: 0 }];
    }
    match c.modulus().legendre(v as i128) {
        1 => {
            let y = c.modulus().sqrt(v).expect("legendre = 1");
            vec![
                Point::Affine { x, y },
                Point::Affine {
                    x,
                    y: c.modulus().neg(y),
                },
            ]
        }
        _ => Vec::new(),
    }
}

fn isqrt_u128(n: u128) -> u64 {
    let mut r = (n as f64).sqrt() as u128;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r as u64
}

/// Hasse window [p + 1 - 2 sqrt(p), p + 1 + 2 sqrt(p)].
fn hasse_window(p: u64) -> (u64, u64) {
    let s = isqrt_u128(4 * p as u128);
    (p + 1 - s, p + 1 + s)
}

fn rng_for(seed: u64, p: u64, stream: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[0..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&p.to_le_bytes());
    bytes[16..24].copy_from_slice(&stream.to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

/// Exact order of `pt`, found by locating one annihilating multiple in the
/// Hasse window by baby-step/giant-step and stripping its prime factors.
fn order_in_window(w: &Wei, pt: Point) -> u64 {
    if pt.is_infinity() {
        return 1;
    }
    let p = w.p();
    let (lo, hi) = hasse_window(p);
    let width = hi - lo;
    let m = isqrt_u128(width as u128) + 1;

    let mut baby: HashMap<(u64, u64), u64> = HashMap::with_capacity(m as usize);
    let mut cur = Point::Infinity;
    for j in 0..m {
        if j > 0 && cur.is_infinity() {
            return strip_order(w, pt, j);
        }
        if let Point::Affine { x, y } = cur {
            baby.insert((x, y), j);
        }
        cur = w.add(cur, pt);
    }
    let big = cur; // m * pt
    let mut giant = w.mul(lo, pt);
    for i in 0..=width / m + 1 {
        match giant {
            Point::Infinity => return strip_order(w, pt, lo + i * m),
            _ => {
                if let Point::Affine { x, y } = w.neg(giant) {
                    if let Some(&j) = baby.get(&(x, y)) {
                        return strip_order(w, pt, lo + i * m + j);
                    }
                }
            }
        }
        giant = w.add(giant, big);
    }
    unreachable!("no multiple of the point order found in the Hasse window");
}

/// Reduce a known annihilating multiple t (t * pt = 0) to the exact order.
fn strip_order(w: &Wei, pt: Point, t: u64) -> u64 {
    debug_assert!(w.mul(t, pt).is_infinity());
    let mut d = t;
    for (q, _) in factor_u64(t) {
        while d % q == 0 && w.mul(d / q, pt).is_infinity() {
            d /= q;
        }
    }
    d
}

fn multiples_in(e: u64, lo: u64, hi: u64) -> Vec<u64> {
    let first = lo.div_ceil(e) * e;
    (first..=hi).step_by(e as usize).collect()
}

/// |E(F_p)| by the exhaustive character sum, with a per-prime residue table.
pub fn curve_order_legendre(c: &ReducedCurve) -> u64 {
    let p = c.p();
    let tm = PrimeModulus::with_residue_table(p).expect("p validated");
    let w = Wei {
        m: tm,
        a: c.a(),
        b: c.b(),
    };
    let mut n = 1u64; // infinity
    for x in 0..p {
        let v = w.f(x);
        if v == 0 {
            n += 1;
        } else if w.m.legendre(v as i128) == 1 {
            n += 2;
        }
    }
    n
}

/// |E(F_p)| by baby-step/giant-step on sampled points, with quadratic-twist
/// disambiguation. Falls back to the character sum in the rare small-p case
/// where the candidate set stays ambiguous.
pub fn curve_order_bsgs(c: &ReducedCurve) -> u64 {
    bsgs_order(c.wei()).unwrap_or_else(|| curve_order_legendre(c))
}

fn bsgs_order(w: &Wei) -> Option<u64> {
    let p = w.p();
    let (lo, hi) = hasse_window(p);
    let mut rng = rng_for(0x6d61786f72646572, p, 1);
    let twist = w.twist();
    let mut e_main = 1u64;
    let mut e_twist = 1u64;
    for _ in 0..24 {
        e_main = lcm_u64(e_main, order_in_window(w, w.random_affine(&mut rng)));
        // Avoid materializing huge candidate lists while e is still tiny.
        if (hi - lo) / e_main <= 64 {
            let cands = multiples_in(e_main, lo, hi);
            debug_assert!(!cands.is_empty());
            if cands.len() == 1 {
                return Some(cands[0]);
            }
            e_twist = lcm_u64(
                e_twist,
                order_in_window(&twist, twist.random_affine(&mut rng)),
            );
            let filtered: Vec<u64> = cands
                .into_iter()
                .filter(|&n| (2 * p as u128 + 2 - n as u128) % e_twist as u128 == 0)
                .collect();
            debug_assert!(!filtered.is_empty());
            if filtered.len() == 1 {
                return Some(filtered[0]);
            }
        }
    }
    None
}

/// |E(F_p)|: character sum below 2^16, baby-step/giant-step above.
pub fn curve_order(c: &ReducedCurve) -> u64 {
    if c.p() < BSGS_THRESHOLD {
        curve_order_legendre(c)
    } else {
        curve_order_bsgs(c)
    }
}

/// Exact multiplicative order of a point, dividing out the prime factors of
/// the group order.
pub fn point_order(pt: Point, info: &GroupInfo, c: &ReducedCurve) -> Result<u64> {
    if !c.is_on_curve(pt) {
        return Err(Error::InvalidPoint);
    }
    Ok(order_from_factored(c.wei(), pt, info.n, &info.n_factored))
}

fn order_from_factored(w: &Wei, pt: Point, n: u64, fac: &[(u64, u32)]) -> u64 {
    debug_assert!(w.mul(n, pt).is_infinity());
    let mut d = n;
    for (q, _) in fac {
        while d % q == 0 && w.mul(d / q, pt).is_infinity() {
            d /= q;
        }
    }
    d
}

fn valuation(mut n: u64, q: u64) -> u32 {
    let mut v = 0;
    while n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}

/// x-only division polynomial for odd ell in {3, 5, 7}; its roots are the
/// x-coordinates of the nonzero ell-torsion.
pub(crate) fn division_poly_x(ell: u64, w: &Wei) -> FpPoly {
    let p = w.p();
    let (a, b) = (w.a, w.b);
    let m = &w.m;
    let f = w.f_poly();
    // psi3 = 3x^4 + 6a x^2 + 12b x - a^2
    let psi3 = FpPoly::new(p, vec![m.neg(m.mul(a, a)), m.mul(12, b), m.mul(6, a), 0, 3]);
    if ell == 3 {
        return psi3;
    }
    // psi4 = 4y * q4 with q4 = x^6 + 5a x^4 + 20b x^3 - 5a^2 x^2 - 4ab x - (8b^2 + a^3)
    let q4 = FpPoly::new(
        p,
        vec![
            m.neg(m.add(m.mul(8, m.mul(b, b)), m.mul(a, m.mul(a, a)))),
            m.neg(m.mul(4, m.mul(a, b))),
            m.neg(m.mul(5, m.mul(a, a))),
            m.mul(20, b),
            m.mul(5, a),
            0,
            1,
        ],
    );
    let f2 = f.mul(&f);
    // psi5 = 32 f^2 q4 - psi3^3
    let psi3_cubed = psi3.mul(&psi3).mul(&psi3);
    let psi5 = f2.mul(&q4).scale(32 % p).sub(&psi3_cubed);
    if ell == 5 {
        debug_assert_eq!(psi5.deg(), Some(12));
        return psi5;
    }
    assert_eq!(
        ell, 7,
        "division polynomials implemented for ell in {{3, 5, 7}}"
    );
    // psi7 = psi5 psi3^3 - 128 f^2 q4^3
    let q4_cubed = q4.mul(&q4).mul(&q4);
    let psi7 = psi5.mul(&psi3_cubed).sub(&f2.mul(&q4_cubed).scale(128 % p));
    debug_assert_eq!(psi7.deg(), Some(24));
    psi7
}

/// Exact test for E[ell] being contained in E(F_p).
pub(crate) fn full_torsion_rational(w: &Wei, ell: u64) -> bool {
    if ell == 2 {
        return w.f_poly().count_roots() == 3;
    }
    let psi = division_poly_x(ell, w);
    let expected = ((ell * ell - 1) / 2) as usize;
    let roots = psi.roots();
    roots.len() == expected && roots.iter().all(|&x| w.m.legendre(w.f(x) as i128) == 1)
}

/// Compute |E(F_p)| and the structure pair (L, M).
///
/// M starts as the lcm of the orders of 32 sampled points, the 2-part is
/// settled exactly by counting the roots of f mod p, per-prime floors from
/// L | M and L | p - 1 are enforced, and any claimed ell-part of L for
/// ell <= 7 is confirmed against the ell-division polynomial. Deterministic
/// for a fixed seed.
pub fn group_structure(c: &ReducedCurve, seed: u64) -> GroupInfo {
    let w = c.wei();
    let p = c.p();
    let n = curve_order(c);
    let fac = factor_u64(n);

    let mut rng = rng_for(seed, p, 2);
    let mut m = 1u64;
    for _ in 0..32 {
        let pt = w.random_affine(&mut rng);
        m = lcm_u64(m, order_from_factored(w, pt, n, &fac));
        if m == n {
            break;
        }
    }

    // Theory floors: v_q(L) <= v_q(M) and v_q(L) <= v_q(p - 1), so
    // v_q(M) >= ceil(v_q(n) / 2) and v_q(M) >= v_q(n) - v_q(p - 1).
    for &(q, e) in &fac {
        let have = valuation(m, q);
        let need = e.div_ceil(2).max(e.saturating_sub(valuation(p - 1, q)));
        if have < need {
            m *= q.pow(need - have);
        }
    }

    // Exact 2-part: a single rational 2-torsion point means L is odd.
    let roots2 = w.f_poly().count_roots();
    let v2n = valuation(n, 2);
    if roots2 == 1 {
        let have = valuation(m, 2);
        if have < v2n {
            m *= 1 << (v2n - have);
        }
    } else if roots2 == 0 {
        debug_assert_eq!(v2n, 0);
    }

    // Division-polynomial confirmation for small ell dividing the candidate L.
    for ell in [2u64, 3, 5, 7] {
        let e = valuation(n, ell);
        if e >= 2 && (p - 1) % ell == 0 {
            let claimed = e - valuation(m, ell);
            if claimed >= 1 && !full_torsion_rational(w, ell) {
                m *= ell.pow(e - valuation(m, ell));
            }
        }
    }

    let l = n / m;
    debug_assert_eq!(l * m, n);
    debug_assert_eq!(m % l, 0, "L | M");
    debug_assert_eq!((p - 1) % l, 0, "L | p - 1");
    // the difference is at most 2 sqrt(p) by Hasse, so it fits i64
    let trace = (p as i128 + 1 - n as i128) as i64;
    GroupInfo {
        n,
        l,
        m,
        trace,
        supersingular: trace == 0,
        n_factored: fac,
    }
}

/// All rational points Q with 2Q = P, ascending; empty when P is not a
/// rational double.
pub fn preimages_of_doubling(pt: Point, c: &ReducedCurve) -> Result<Vec<Point>> {
    if !c.is_on_curve(pt) {
        return Err(Error::InvalidPoint);
    }
    let w = c.wei();
    let p = c.p();
    let m = c.modulus();
    let mut out = Vec::new();
    match pt {
        Point::Infinity => {
            out.push(Point::Infinity);
            for x in w.f_poly().roots() {
                out.push(Point::Affine { x, y: 0 });
            }
        }
        Point::Affine { x: xp, .. } => {
            // Roots of r(z) - x_P s(z); good reduction rules out s(z) = 0 there.
            let a = c.a();
            let b = c.b();
            let quartic = FpPoly::new(
                p,
                vec![
                    m.sub(m.mul(a, a), m.mul(4, m.mul(b, xp))),
                    m.sub(0, m.add(m.mul(8, b), m.mul(4, m.mul(a, xp)))),
                    m.neg(m.mul(2, a)),
                    m.neg(m.mul(4, xp)),
                    1,
                ],
            );
            for z in quartic.roots() {
                for q in lift_points_at_x(z, c) {
                    if w.mul(2, q) == pt {
                        out.push(q);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
