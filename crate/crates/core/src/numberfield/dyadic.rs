//! Certified dyadic interval arithmetic.
//!
//! `Dyadic` is m * 2^e exactly. `RInt` is a closed real interval with
//! dyadic endpoints; operations take a mantissa width `p` and round
//! outward, so the exact result is always enclosed. `CInt` is a
//! rectangle in the complex plane. Intervals certify strict signs only:
//! equality questions are settled by the exact field layer before an
//! interval is consulted.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

type Rat = BigRational;

/// Working precisions for sign refinement, in increasing order.
pub const SIGN_PREC_LADDER: &[u64] = &[
    64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536,
];

/// m * 2^e, with m odd or zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub m: BigInt,
    pub e: i64,
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        if m.is_zero() {
            return Dyadic { m, e: 0 };
        }
        match m.trailing_zeros() {
            Some(tz) if tz > 0 => Dyadic {
                m: m >> (tz as usize),
                e: e + tz as i64,
            },
            _ => Dyadic { m, e },
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            m: BigInt::zero(),
            e: 0,
        }
    }

    pub fn from_bigint(m: BigInt) -> Self {
        Self::new(m, 0)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn signum(&self) -> i8 {
        match self.m.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            m: -&self.m,
            e: self.e,
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.e.min(other.e);
        (
            &self.m << ((self.e - e) as usize),
            &other.m << ((other.e - e) as usize),
            e,
        )
    }

    pub fn cmp_val(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a - b, e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Dyadic::new(&self.m * &other.m, self.e + other.e)
    }

    /// Round toward -inf to at most p mantissa bits.
    pub fn round_down(&self, p: u64) -> Self {
        let bits = self.m.bits();
        if bits <= p {
            return self.clone();
        }
        let s = (bits - p) as usize;
        // BigInt shift-right rounds toward -inf
        Dyadic::new(&self.m >> s, self.e + s as i64)
    }

    /// Round toward +inf to at most p mantissa bits.
    pub fn round_up(&self, p: u64) -> Self {
        let bits = self.m.bits();
        if bits <= p {
            return self.clone();
        }
        let s = (bits - p) as usize;
        Dyadic::new(-((-&self.m) >> s), self.e + s as i64)
    }

    pub fn floor_int(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << (self.e as usize)
        } else {
            &self.m >> ((-self.e) as usize)
        }
    }

    pub fn ceil_int(&self) -> BigInt {
        -self.neg().floor_int()
    }

    pub fn to_rational(&self) -> Rat {
        if self.e >= 0 {
            Rat::from_integer(&self.m << (self.e as usize))
        } else {
            Rat::new(self.m.clone(), BigInt::one() << ((-self.e) as usize))
        }
    }
}

/// Closed interval [lo, hi] with dyadic endpoints.
#[derive(Clone, Debug)]
pub struct RInt {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl RInt {
    pub fn point(d: Dyadic) -> Self {
        RInt {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::point(Dyadic::from_i64(1))
    }

    pub fn from_i64(v: i64) -> Self {
        Self::point(Dyadic::from_i64(v))
    }

    pub fn from_rat(q: &Rat, p: u64) -> Self {
        if q.denom().is_one() {
            return Self::point(Dyadic::from_bigint(q.numer().clone()));
        }
        let s = p + q.denom().bits() + 1;
        let scaled: BigInt = q.numer() << (s as usize);
        let (quo, rem) = scaled.div_mod_floor(q.denom());
        let lo = Dyadic::new(quo.clone(), -(s as i64));
        if rem.is_zero() {
            Self::point(lo)
        } else {
            RInt {
                lo,
                hi: Dyadic::new(quo + 1, -(s as i64)),
            }
        }
    }

    fn out(lo: Dyadic, hi: Dyadic, p: u64) -> Self {
        debug_assert!(lo.cmp_val(&hi) != Ordering::Greater);
        RInt {
            lo: lo.round_down(p),
            hi: hi.round_up(p),
        }
    }

    pub fn neg(&self) -> Self {
        RInt {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        Self::out(self.lo.add(&o.lo), self.hi.add(&o.hi), p)
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        self.add(&o.neg(), p)
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        let cands = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c.cmp_val(&lo) == Ordering::Less {
                lo = c.clone();
            }
            if c.cmp_val(&hi) == Ordering::Greater {
                hi = c.clone();
            }
        }
        Self::out(lo, hi, p)
    }

    pub fn mul_rat(&self, q: &Rat, p: u64) -> Self {
        self.mul(&Self::from_rat(q, p + 4), p)
    }

    pub fn pow(&self, k: u32, p: u64) -> Self {
        let mut acc = RInt::one();
        for _ in 0..k {
            acc = acc.mul(self, p);
        }
        acc
    }

    pub fn widen(&self, b: &Dyadic) -> Self {
        debug_assert!(b.signum() >= 0);
        RInt {
            lo: self.lo.sub(b),
            hi: self.hi.add(b),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    /// Some(sign) when certain; None when the interval straddles zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.signum() > 0 {
            return Some(1);
        }
        if self.hi.signum() < 0 {
            return Some(-1);
        }
        if self.lo.is_zero() && self.hi.is_zero() {
            return Some(0);
        }
        None
    }

    /// Requires the true value to be nonnegative (hi must not be negative).
    pub fn sqrt(&self, p: u64) -> Self {
        assert!(self.hi.signum() >= 0, "sqrt of a negative interval");
        let lo = if self.lo.signum() <= 0 {
            Dyadic::zero()
        } else {
            sqrt_down(&self.lo, p)
        };
        RInt {
            lo,
            hi: sqrt_up(&self.hi, p),
        }
    }

    pub fn checked_div(&self, o: &Self, p: u64) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let (al, ah) = (self.lo.to_rational(), self.hi.to_rational());
        let (bl, bh) = (o.lo.to_rational(), o.hi.to_rational());
        let mut qs = [&al / &bl, &al / &bh, &ah / &bl, &ah / &bh];
        qs.sort();
        Some(RInt {
            lo: Self::from_rat(&qs[0], p).lo,
            hi: Self::from_rat(&qs[3], p).hi,
        })
    }
}

fn sqrt_down(v: &Dyadic, p: u64) -> Dyadic {
    debug_assert!(v.signum() > 0);
    let target = 2 * p + 2;
    let bits = v.m.bits();
    let mut s: u64 = if bits >= target { 0 } else { target - bits };
    if ((v.e - s as i64) & 1) != 0 {
        s += 1;
    }
    let mm: BigInt = &v.m << (s as usize);
    Dyadic::new(mm.sqrt(), (v.e - s as i64) >> 1)
}

fn sqrt_up(v: &Dyadic, p: u64) -> Dyadic {
    if v.is_zero() {
        return Dyadic::zero();
    }
    let target = 2 * p + 2;
    let bits = v.m.bits();
    let mut s: u64 = if bits >= target { 0 } else { target - bits };
    if ((v.e - s as i64) & 1) != 0 {
        s += 1;
    }
    let mm: BigInt = &v.m << (s as usize);
    let mut r = mm.sqrt();
    if &r * &r != mm {
        r += 1;
    }
    Dyadic::new(r, (v.e - s as i64) >> 1)
}

/// Rectangle re + i*im enclosing a complex value.
#[derive(Clone, Debug)]
pub struct CInt {
    pub re: RInt,
    pub im: RInt,
}

impl CInt {
    pub fn new(re: RInt, im: RInt) -> Self {
        CInt { re, im }
    }

    pub fn zero() -> Self {
        CInt {
            re: RInt::zero(),
            im: RInt::zero(),
        }
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        CInt {
            re: self.re.add(&o.re, p),
            im: self.im.add(&o.im, p),
        }
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        CInt {
            re: self.re.sub(&o.re, p),
            im: self.im.sub(&o.im, p),
        }
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        CInt {
            re: self.re.mul(&o.re, p).sub(&self.im.mul(&o.im, p), p),
            im: self.re.mul(&o.im, p).add(&self.im.mul(&o.re, p), p),
        }
    }

    pub fn conj(&self) -> Self {
        CInt {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn scale(&self, r: &RInt, p: u64) -> Self {
        CInt {
            re: self.re.mul(r, p),
            im: self.im.mul(r, p),
        }
    }

    pub fn scale_rat(&self, q: &Rat, p: u64) -> Self {
        CInt {
            re: self.re.mul_rat(q, p),
            im: self.im.mul_rat(q, p),
        }
    }

    pub fn norm_sqr(&self, p: u64) -> RInt {
        let s = self.re.mul(&self.re, p).add(&self.im.mul(&self.im, p), p);
        // squares of enclosures may dip below zero; the true value cannot
        if s.lo.signum() < 0 {
            RInt {
                lo: Dyadic::zero(),
                hi: s.hi,
            }
        } else {
            s
        }
    }
}

static PI_CACHE: Mutex<BTreeMap<u64, RInt>> = Mutex::new(BTreeMap::new());

/// pi as a certified interval with mantissa width about p.
pub fn pi(p: u64) -> RInt {
    if let Some(v) = PI_CACHE.lock().unwrap().get(&p) {
        return v.clone();
    }
    let wp = p + 16;
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let v = RInt::from_i64(16)
        .mul(&atan_inv(5, wp), wp)
        .sub(&RInt::from_i64(4).mul(&atan_inv(239, wp), wp), wp);
    PI_CACHE.lock().unwrap().insert(p, v.clone());
    v
}

/// atan(1/x) for integer x >= 2, certified.
fn atan_inv(x: i64, p: u64) -> RInt {
    let xb = BigInt::from(x);
    let x2 = &xb * &xb;
    // terms up to the first one below 2^-(p+4)
    let limit: BigInt = BigInt::one() << ((p + 4) as usize);
    let mut k: u64 = 0;
    let mut pw = xb.clone(); // x^(2k+1)
    while &pw * BigInt::from(2 * k + 1) <= limit {
        k += 1;
        pw = &pw * &x2;
    }
    // Horner over y = 1/x^2: sum_{j<k} (-1)^j y^j / (2j+1)
    let y = Rat::new(BigInt::one(), x2);
    let mut s = Rat::zero();
    for j in (0..k).rev() {
        s = Rat::new(BigInt::one(), BigInt::from(2 * j + 1)) - &y * &s;
    }
    let val = s / Rat::from_integer(xb);
    // alternating series: remainder within the first omitted term
    let err = Rat::new(BigInt::one(), &pw * BigInt::from(2 * k + 1));
    RInt {
        lo: RInt::from_rat(&(&val - &err), p + 8).lo,
        hi: RInt::from_rat(&(&val + &err), p + 8).hi,
    }
}

/// (sin(pi f), cos(pi f)) as certified intervals.
pub fn sin_cos_pi(f: &Rat, p: u64) -> (RInt, RInt) {
    let wp = p + 16;
    let two = Rat::from_integer(BigInt::from(2));
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let quarter = Rat::new(BigInt::one(), BigInt::from(4));
    let mut t = f % &two;
    if t < Rat::zero() {
        t = t + &two;
    }
    let q = (&t * &two).floor().to_integer().to_u8().unwrap(); // 0..=3
    let r = &t - Rat::new(BigInt::from(q), BigInt::from(2));
    let (sr, cr) = if r <= quarter {
        sincos_taylor(&r, wp)
    } else {
        // sin(pi r) = cos(pi (1/2 - r)) and vice versa
        let (s2, c2) = sincos_taylor(&(&half - &r), wp);
        (c2, s2)
    };
    match q {
        0 => (sr, cr),
        1 => (cr, sr.neg()),
        2 => (sr.neg(), cr.neg()),
        3 => (cr.neg(), sr),
        _ => unreachable!(),
    }
}

/// Taylor series at pi*r for r in [0, 1/4].
fn sincos_taylor(r: &Rat, p: u64) -> (RInt, RInt) {
    if r.is_zero() {
        return (RInt::zero(), RInt::one());
    }
    let x = pi(p).mul(&RInt::from_rat(r, p), p);
    let x2 = x.mul(&x, p);
    let eps = Dyadic::new(BigInt::one(), -((p + 8) as i64));
    let mut sin = x.clone();
    let mut cos = RInt::one();
    let mut term_s = x; // x^(2k+1)/(2k+1)!
    let mut term_c = RInt::one(); // x^(2k)/(2k)!
    let mut k: u64 = 0;
    loop {
        let nc = term_c.mul(&x2, p).mul_rat(
            &Rat::new(BigInt::one(), BigInt::from((2 * k + 1) * (2 * k + 2))),
            p,
        );
        let ns = term_s.mul(&x2, p).mul_rat(
            &Rat::new(BigInt::one(), BigInt::from((2 * k + 2) * (2 * k + 3))),
            p,
        );
        k += 1;
        if nc.hi.cmp_val(&eps) == Ordering::Less && ns.hi.cmp_val(&eps) == Ordering::Less {
            // terms alternate and decrease (x < 1), so the remainder is
            // within the first omitted term
            sin = sin.widen(&ns.hi);
            cos = cos.widen(&nc.hi);
            break;
        }
        if k % 2 == 1 {
            cos = cos.sub(&nc, p);
            sin = sin.sub(&ns, p);
        } else {
            cos = cos.add(&nc, p);
            sin = sin.add(&ns, p);
        }
        term_c = nc;
        term_s = ns;
    }
    (sin, cos)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn rounding_is_directed() {
        let d = Dyadic::new(BigInt::from(-5), 0);
        assert!(d.round_down(2).to_rational() <= rat(-5, 1));
        assert!(d.round_up(2).to_rational() >= rat(-5, 1));
        let u = Dyadic::new(BigInt::from(5), 0);
        assert!(u.round_down(2).to_rational() <= rat(5, 1));
        assert!(u.round_up(2).to_rational() >= rat(5, 1));
    }

    #[test]
    fn floor_ceil() {
        let d = Dyadic::new(BigInt::from(-5), -1); // -2.5
        assert_eq!(d.floor_int(), BigInt::from(-3));
        assert_eq!(d.ceil_int(), BigInt::from(-2));
        let u = Dyadic::new(BigInt::from(7), -2); // 1.75
        assert_eq!(u.floor_int(), BigInt::from(1));
        assert_eq!(u.ceil_int(), BigInt::from(2));
    }

    #[test]
    fn interval_mul_signs() {
        let a = RInt {
            lo: Dyadic::from_i64(-2),
            hi: Dyadic::from_i64(3),
        };
        let b = RInt {
            lo: Dyadic::from_i64(-5),
            hi: Dyadic::from_i64(7),
        };
        let m = a.mul(&b, 64);
        assert_eq!(m.lo.to_rational(), rat(-15, 1));
        assert_eq!(m.hi.to_rational(), rat(21, 1));
    }

    #[test]
    fn from_rat_encloses() {
        let q = rat(1, 3);
        let r = RInt::from_rat(&q, 64);
        assert!(r.lo.to_rational() < q && q < r.hi.to_rational());
        let w = r.hi.sub(&r.lo).to_rational();
        assert!(w <= Rat::new(BigInt::one(), BigInt::one() << 64));
    }

    #[test]
    fn pi_brackets() {
        let v = pi(64);
        assert!(v.lo.to_rational() > rat(314159265358979, 100000000000000));
        assert!(v.hi.to_rational() < rat(314159265358980, 100000000000000));
        let v2 = pi(256);
        let w = v2.hi.sub(&v2.lo).to_rational();
        assert!(w < Rat::new(BigInt::one(), BigInt::one() << 250));
    }

    #[test]
    fn sqrt_two() {
        let x = RInt::from_i64(2).sqrt(128);
        let sq = x.mul(&x, 256);
        assert!(sq.lo.to_rational() <= rat(2, 1) && rat(2, 1) <= sq.hi.to_rational());
        let w = x.hi.sub(&x.lo).to_rational();
        assert!(w < Rat::new(BigInt::one(), BigInt::one() << 100));
    }

    #[test]
    fn sqrt_exact_square() {
        let x = RInt::from_i64(4).sqrt(64);
        assert_eq!(x.lo.to_rational(), rat(2, 1));
        assert_eq!(x.hi.to_rational(), rat(2, 1));
    }

    #[test]
    fn sin_cos_at_quarters() {
        let (s, c) = sin_cos_pi(&rat(1, 2), 64);
        assert_eq!(s.lo.to_rational(), rat(1, 1));
        assert_eq!(s.hi.to_rational(), rat(1, 1));
        assert_eq!(c.lo.to_rational(), rat(0, 1));
        let (s, c) = sin_cos_pi(&rat(1, 1), 64);
        assert_eq!(s.lo.to_rational(), rat(0, 1));
        assert_eq!(c.lo.to_rational(), rat(-1, 1));
        let (s, c) = sin_cos_pi(&rat(3, 2), 64);
        assert_eq!(s.hi.to_rational(), rat(-1, 1));
        assert_eq!(c.hi.to_rational(), rat(0, 1));
        let (s, c) = sin_cos_pi(&rat(-1, 2), 64);
        assert_eq!(s.lo.to_rational(), rat(-1, 1));
        assert_eq!(c.lo.to_rational(), rat(0, 1));
    }

    #[test]
    fn sin_pi_over_six() {
        let (s, c) = sin_cos_pi(&rat(1, 6), 128);
        assert!(s.lo.to_rational() < rat(1, 2) && rat(1, 2) < s.hi.to_rational());
        let w = s.hi.sub(&s.lo).to_rational();
        assert!(w < Rat::new(BigInt::one(), BigInt::one() << 100));
        // cos(pi/6)^2 = 3/4
        let c2 = c.mul(&c, 128);
        assert!(c2.lo.to_rational() < rat(3, 4) && rat(3, 4) < c2.hi.to_rational());
    }

    #[test]
    fn division() {
        let a = RInt::from_i64(1);
        let b = RInt::from_i64(3);
        let q = a.checked_div(&b, 64).unwrap();
        assert!(q.lo.to_rational() <= rat(1, 3) && rat(1, 3) <= q.hi.to_rational());
        let z = RInt {
            lo: Dyadic::from_i64(-1),
            hi: Dyadic::from_i64(1),
        };
        assert!(a.checked_div(&z, 64).is_none());
    }
}
