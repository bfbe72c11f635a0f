//! Cyclotomic number fields Q(xi_2n) and their real quadratic extension
//! by the inflation scale lambda, lambda^2 = c.
//!
//! Elements carry integer coefficient vectors over the power basis of
//! xi = xi_2n with a common positive denominator, so the ring operations
//! are pure integer arithmetic with one gcd pass per result. Signs of
//! real values are decided exactly (structural zero tests) or by
//! certified interval refinement; no uncertified floating point enters
//! any decision.

pub mod dyadic;
pub mod guard;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use self::dyadic::{sin_cos_pi, CInt, RInt, SIGN_PREC_LADDER};

pub type Rat = BigRational;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("unsupported symmetry order n={0} (supported: 3, 4, 5, 6, 8)")]
    UnsupportedOrder(u32),
    #[error("inflation scale is degenerate: lambda = {root} lies in Q(xi_{nn})")]
    DegenerateScale { nn: u32, root: String },
    #[error("could not certify that lambda lies outside Q(xi_{nn})")]
    GuardUndecided { nn: u32 },
}

/// Coefficient vector over the power basis with a common denominator.
/// Normal form: den > 0, gcd(content, den) = 1, zero has den = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
struct RawEl {
    num: Vec<BigInt>,
    den: BigInt,
}

impl RawEl {
    fn make(mut num: Vec<BigInt>, mut den: BigInt) -> RawEl {
        assert!(!den.is_zero(), "zero denominator");
        if den.sign() == Sign::Minus {
            den = -den;
            for x in &mut num {
                *x = -std::mem::take(x);
            }
        }
        let mut g = den.clone();
        for x in &num {
            if g.is_one() {
                break;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if !g.is_one() {
            den /= &g;
            for x in &mut num {
                *x /= &g;
            }
        }
        if num.iter().all(|x| x.is_zero()) {
            den = BigInt::one();
        }
        RawEl { num, den }
    }

    fn zero(phi: usize) -> RawEl {
        RawEl {
            num: vec![BigInt::zero(); phi],
            den: BigInt::one(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(|x| x.is_zero())
    }
}

/// Multiplication/automorphism tables of Q(xi_nn).
struct Tables {
    nn: u32,
    phi: usize,
    /// Phi_nn, monic, ascending, integer coefficients.
    min_poly: Vec<BigInt>,
    /// xi^(phi+i) over the power basis, i = 0..phi-1.
    red: Vec<Vec<BigInt>>,
    /// xi^k over the power basis, k = 0..nn-1.
    xi_pow: Vec<Vec<BigInt>>,
}

fn reduce_with(red: &[Vec<BigInt>], phi: usize, mut conv: Vec<BigInt>) -> Vec<BigInt> {
    for i in (phi..conv.len()).rev() {
        if conv[i].is_zero() {
            continue;
        }
        let t = std::mem::take(&mut conv[i]);
        let row = &red[i - phi];
        for j in 0..phi {
            let a = &row[j] * &t;
            conv[j] += a;
        }
    }
    conv.truncate(phi);
    conv
}

impl Tables {
    fn mul(&self, a: &RawEl, b: &RawEl) -> RawEl {
        let mut conv = vec![BigInt::zero(); 2 * self.phi - 1];
        for i in 0..self.phi {
            if a.num[i].is_zero() {
                continue;
            }
            for j in 0..self.phi {
                if b.num[j].is_zero() {
                    continue;
                }
                conv[i + j] += &a.num[i] * &b.num[j];
            }
        }
        RawEl::make(reduce_with(&self.red, self.phi, conv), &a.den * &b.den)
    }

    /// Image under xi -> xi^k; k must be a valid exponent map (conjugation
    /// uses k = nn - 1, automorphisms any k coprime to nn).
    fn exp_map(&self, a: &RawEl, k: u32) -> RawEl {
        let mut out = vec![BigInt::zero(); self.phi];
        for j in 0..self.phi {
            if a.num[j].is_zero() {
                continue;
            }
            let row = &self.xi_pow[((k as usize * j) % self.nn as usize) % self.nn as usize];
            for l in 0..self.phi {
                let t = &row[l] * &a.num[j];
                out[l] += t;
            }
        }
        RawEl::make(out, a.den.clone())
    }

    fn conj(&self, a: &RawEl) -> RawEl {
        self.exp_map(a, self.nn - 1)
    }

    fn inv(&self, a: &RawEl) -> Option<RawEl> {
        if a.is_zero() {
            return None;
        }
        let apoly: Vec<Rat> = a
            .num
            .iter()
            .map(|n| Rat::new(n.clone(), a.den.clone()))
            .collect();
        let inv = poly_inverse_mod(&apoly, &self.min_poly)
            .expect("cyclotomic polynomial is irreducible");
        // clear denominators
        let mut den = BigInt::one();
        for c in &inv {
            den = den.lcm(c.denom());
        }
        let mut num = vec![BigInt::zero(); self.phi];
        for (j, c) in inv.iter().enumerate() {
            num[j] = c.numer() * (&den / c.denom());
        }
        Some(RawEl::make(num, den))
    }
}

fn poly_trim(v: &mut Vec<Rat>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn poly_sub(mut a: Vec<Rat>, b: Vec<Rat>) -> Vec<Rat> {
    if b.len() > a.len() {
        a.resize(b.len(), Rat::zero());
    }
    for (j, c) in b.into_iter().enumerate() {
        a[j] -= c;
    }
    poly_trim(&mut a);
    a
}

fn poly_mul_rat(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Divides in place: num becomes num mod den; returns the quotient.
fn poly_divrem(num: &mut Vec<Rat>, den: &[Rat]) -> Vec<Rat> {
    let dl = den.len() - 1;
    let lead = den.last().unwrap();
    let mut q = vec![Rat::zero(); num.len().saturating_sub(dl)];
    loop {
        poly_trim(num);
        if num.len() <= dl {
            break;
        }
        let k = num.len() - 1 - dl;
        let f = num.last().unwrap() / lead;
        for j in 0..=dl {
            let t = &den[j] * &f;
            num[k + j] -= t;
        }
        q[k] = f;
    }
    q
}

/// Inverse of a modulo the (irreducible, monic) modulus, in Q[x].
fn poly_inverse_mod(a: &[Rat], modulus: &[BigInt]) -> Option<Vec<Rat>> {
    let mut r0: Vec<Rat> = modulus
        .iter()
        .map(|c| Rat::from_integer(c.clone()))
        .collect();
    let mut r1 = a.to_vec();
    poly_trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    // invariant: r_i = s_i * modulus + t_i * a
    let mut t0: Vec<Rat> = vec![];
    let mut t1: Vec<Rat> = vec![Rat::one()];
    while r1.len() > 1 {
        let q = poly_divrem(&mut r0, &r1);
        t0 = poly_sub(t0, poly_mul_rat(&q, &t1));
        std::mem::swap(&mut r0, &mut r1);
        std::mem::swap(&mut t0, &mut t1);
    }
    assert!(!r1.is_empty(), "modulus must be irreducible");
    let c = r1[0].clone();
    Some(t1.into_iter().map(|x| x / &c).collect())
}

/// Phi_n, ascending coefficients, monic.
fn cyclotomic(n: u64) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = int_poly_div_exact(&p, &cyclotomic(d));
        }
    }
    p
}

/// a / b for monic b; the division must be exact.
fn int_poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    let dq = a.len() - 1 - db;
    let mut q = vec![BigInt::zero(); dq + 1];
    for k in (0..=dq).rev() {
        let f = rem[k + db].clone();
        if f.is_zero() {
            continue;
        }
        for j in 0..=db {
            let t = &b[j] * &f;
            rem[k + j] -= t;
        }
        q[k] = f;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    q
}

struct EmbedTable {
    xi: Vec<CInt>, // xi^j, j = 0..phi
    lambda: RInt,
}

fn embed_raw(r: &RawEl, xi: &[CInt], p: u64) -> CInt {
    let mut acc = CInt::zero();
    for (j, nj) in r.num.iter().enumerate() {
        if nj.is_zero() {
            continue;
        }
        let q = Rat::new(nj.clone(), r.den.clone());
        acc = acc.add(&xi[j].scale_rat(&q, p), p);
    }
    acc
}

pub struct FieldCore {
    n: u32,
    t: Tables,
    w_raw: RawEl,
    zeta_raw: RawEl,
    zeta_conj_raw: RawEl,
    c_raw: RawEl,
    mu_raw: RawEl,
    embed_tables: Mutex<BTreeMap<u64, Arc<EmbedTable>>>,
}

impl FieldCore {
    fn new(n: u32) -> Result<FieldCore, FieldError> {
        if ![3, 4, 5, 6, 8].contains(&n) {
            return Err(FieldError::UnsupportedOrder(n));
        }
        let nn = 2 * n;
        let min_poly = cyclotomic(nn as u64);
        let phi = min_poly.len() - 1;

        let mut red: Vec<Vec<BigInt>> = Vec::with_capacity(phi - 1);
        red.push(min_poly[..phi].iter().map(|c| -c).collect());
        for i in 1..phi - 1 {
            let mut next = vec![BigInt::zero(); phi];
            let top = red[i - 1][phi - 1].clone();
            for j in (1..phi).rev() {
                next[j] = red[i - 1][j - 1].clone();
            }
            if !top.is_zero() {
                for j in 0..phi {
                    let t = &red[0][j] * &top;
                    next[j] += t;
                }
            }
            red.push(next);
        }

        let mut xi_pow: Vec<Vec<BigInt>> = Vec::with_capacity(nn as usize);
        for k in 0..nn as usize {
            if k < phi {
                let mut v = vec![BigInt::zero(); phi];
                v[k] = BigInt::one();
                xi_pow.push(v);
            } else {
                let mut conv = vec![BigInt::zero(); phi + 1];
                for j in 0..phi {
                    conv[j + 1] = xi_pow[k - 1][j].clone();
                }
                xi_pow.push(reduce_with(&red, phi, conv));
            }
        }

        let t = Tables {
            nn,
            phi,
            min_poly,
            red,
            xi_pow,
        };

        // w is the rotation between the two marked legs of the base
        // right-triangle prototile: xi for odd n, xi^2 for even n, so
        // that w generates the primitive 2n-th or n-th roots as needed
        // and zeta = 2 + w satisfies |zeta|^2 = 5 + 2 Re'(w) = c.
        let w_idx = if n % 2 == 1 { 1 } else { 2 };
        let w_raw = RawEl {
            num: t.xi_pow[w_idx].clone(),
            den: BigInt::one(),
        };
        let mut zeta_num = t.xi_pow[w_idx].clone();
        zeta_num[0] += BigInt::from(2);
        let zeta_raw = RawEl::make(zeta_num, BigInt::one());
        let zeta_conj_raw = t.conj(&zeta_raw);
        let c_raw = t.mul(&zeta_raw, &zeta_conj_raw);
        let mu_raw = t.mul(&zeta_conj_raw, &t.inv(&zeta_raw).expect("zeta is nonzero"));

        Ok(FieldCore {
            n,
            t,
            w_raw,
            zeta_raw,
            zeta_conj_raw,
            c_raw,
            mu_raw,
            embed_tables: Mutex::new(BTreeMap::new()),
        })
    }
}

/// Handle to a field context; cheap to clone, compared by n.
#[derive(Clone)]
pub struct Field(Arc<FieldCore>);

impl PartialEq for Field {
    fn eq(&self, o: &Self) -> bool {
        self.0.n == o.0.n
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(n={})", self.0.n)
    }
}

impl Field {
    pub fn new(n: u32) -> Result<Field, FieldError> {
        let f = Field(Arc::new(FieldCore::new(n)?));
        match guard::lambda_in_field(&f)? {
            guard::LambdaCheck::NotInField => Ok(f),
            guard::LambdaCheck::Root(r) => Err(FieldError::DegenerateScale {
                nn: 2 * n,
                root: r.to_string(),
            }),
        }
    }

    pub fn n(&self) -> u32 {
        self.0.n
    }

    pub fn nn(&self) -> u32 {
        self.0.t.nn
    }

    pub fn phi(&self) -> usize {
        self.0.t.phi
    }

    fn ck(&self, o: &Field) {
        assert!(
            self.0.n == o.0.n,
            "mixing elements of different fields (n={} vs n={})",
            self.0.n,
            o.0.n
        );
    }

    fn from_raw(&self, r: RawEl) -> CycNum {
        CycNum {
            f: self.clone(),
            r,
        }
    }

    pub fn zero(&self) -> CycNum {
        self.from_raw(RawEl::zero(self.phi()))
    }

    pub fn one(&self) -> CycNum {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> CycNum {
        let mut num = vec![BigInt::zero(); self.phi()];
        num[0] = BigInt::from(v);
        self.from_raw(RawEl::make(num, BigInt::one()))
    }

    pub fn from_rat(&self, q: &Rat) -> CycNum {
        let mut num = vec![BigInt::zero(); self.phi()];
        num[0] = q.numer().clone();
        self.from_raw(RawEl::make(num, q.denom().clone()))
    }

    /// Element from rational coefficients over the power basis.
    pub fn cyc(&self, coeffs: &[Rat]) -> CycNum {
        assert!(coeffs.len() <= self.phi(), "too many coefficients");
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut num = vec![BigInt::zero(); self.phi()];
        for (j, c) in coeffs.iter().enumerate() {
            num[j] = c.numer() * (&den / c.denom());
        }
        self.from_raw(RawEl::make(num, den))
    }

    /// xi^j for any integer j.
    pub fn xi(&self, j: i64) -> CycNum {
        let k = j.rem_euclid(self.nn() as i64) as usize;
        self.from_raw(RawEl {
            num: self.0.t.xi_pow[k].clone(),
            den: BigInt::one(),
        })
    }

    /// The step rotation w: xi for odd n, xi^2 for even n.
    pub fn w(&self) -> CycNum {
        self.from_raw(self.0.w_raw.clone())
    }

    /// Inflation multiplier zeta = 2 + w.
    pub fn zeta(&self) -> CycNum {
        self.from_raw(self.0.zeta_raw.clone())
    }

    pub fn zeta_conj(&self) -> CycNum {
        self.from_raw(self.0.zeta_conj_raw.clone())
    }

    /// c = zeta * conj(zeta) = lambda^2.
    pub fn c(&self) -> CycNum {
        self.from_raw(self.0.c_raw.clone())
    }

    /// mu = conj(zeta) / zeta, the unit rotation of reflected children.
    pub fn mu(&self) -> CycNum {
        self.from_raw(self.0.mu_raw.clone())
    }

    /// The imaginary unit, available exactly when 4 | 2n.
    pub fn i_unit(&self) -> Option<CycNum> {
        if self.nn() % 4 == 0 {
            Some(self.xi(self.nn() as i64 / 4))
        } else {
            None
        }
    }

    fn table(&self, p: u64) -> Arc<EmbedTable> {
        if let Some(t) = self.0.embed_tables.lock().unwrap().get(&p) {
            return t.clone();
        }
        let nn = self.nn();
        let mut xi = Vec::with_capacity(self.phi());
        for j in 0..self.phi() {
            let frac = Rat::new(BigInt::from(2 * j as i64), BigInt::from(nn));
            let (s, c) = sin_cos_pi(&frac, p);
            xi.push(CInt::new(c, s));
        }
        let c_ci = embed_raw(&self.0.c_raw, &xi, p);
        let lambda = c_ci.re.sqrt(p);
        let t = Arc::new(EmbedTable { xi, lambda });
        self.0.embed_tables.lock().unwrap().insert(p, t.clone());
        t
    }

    pub fn embed_cyc(&self, x: &CycNum, p: u64) -> CInt {
        self.ck(&x.f);
        embed_raw(&x.r, &self.table(p).xi, p)
    }

    pub fn embed_ext(&self, x: &ExtScalar, p: u64) -> CInt {
        let t = self.table(p);
        let mut acc = embed_raw(&x.u.r, &t.xi, p);
        if let Some(v) = &x.v {
            acc = acc.add(&embed_raw(&v.r, &t.xi, p).scale(&t.lambda, p), p);
        }
        acc
    }

    /// Certified enclosure of lambda = sqrt(c).
    pub fn lambda_interval(&self, p: u64) -> RInt {
        self.table(p).lambda.clone()
    }
}

/// Element of Q(xi_2n).
#[derive(Clone)]
pub struct CycNum {
    f: Field,
    r: RawEl,
}

impl CycNum {
    pub fn field(&self) -> &Field {
        &self.f
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.r.den.is_one()
            && self.r.num[0].is_one()
            && self.r.num[1..].iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.r.num[1..].iter().all(|x| x.is_zero())
    }

    pub fn to_rat(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(Rat::new(self.r.num[0].clone(), self.r.den.clone()))
        } else {
            None
        }
    }

    pub fn coeff(&self, j: usize) -> Rat {
        Rat::new(self.r.num[j].clone(), self.r.den.clone())
    }

    pub fn coeffs(&self) -> Vec<Rat> {
        (0..self.f.phi()).map(|j| self.coeff(j)).collect()
    }

    pub fn conj(&self) -> CycNum {
        self.f.from_raw(self.f.0.t.conj(&self.r))
    }

    pub fn inv(&self) -> Option<CycNum> {
        self.f.0.t.inv(&self.r).map(|r| self.f.from_raw(r))
    }

    pub fn pow(&self, k: i64) -> CycNum {
        if k < 0 {
            return self
                .inv()
                .expect("negative power of zero")
                .pow(k.checked_neg().expect("exponent overflow"));
        }
        let mut acc = self.f.one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// The automorphism xi -> xi^k; k must be coprime to 2n.
    pub fn automorphism(&self, k: u32) -> CycNum {
        debug_assert!(k.gcd(&self.f.nn()) == 1, "not an automorphism exponent");
        self.f.from_raw(self.f.0.t.exp_map(&self.r, k % self.f.nn()))
    }

    pub fn scale(&self, q: &Rat) -> CycNum {
        let num: Vec<BigInt> = self.r.num.iter().map(|x| x * q.numer()).collect();
        self.f.from_raw(RawEl::make(num, &self.r.den * q.denom()))
    }

    pub fn is_conj_fixed(&self) -> bool {
        *self == self.conj()
    }
}

impl PartialEq for CycNum {
    fn eq(&self, o: &Self) -> bool {
        self.f.n() == o.f.n() && self.r == o.r
    }
}
impl Eq for CycNum {}

impl Hash for CycNum {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.f.n().hash(h);
        self.r.num.hash(h);
        self.r.den.hash(h);
    }
}

impl PartialOrd for CycNum {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Structural order on (n, coefficients); used for canonical keys, not
/// a numeric order.
impl Ord for CycNum {
    fn cmp(&self, o: &Self) -> Ordering {
        self.f
            .n()
            .cmp(&o.f.n())
            .then_with(|| self.r.num.cmp(&o.r.num))
            .then_with(|| self.r.den.cmp(&o.r.den))
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum({})", self)
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs().iter().map(rat_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl<'b> Add<&'b CycNum> for &CycNum {
    type Output = CycNum;
    fn add(self, o: &'b CycNum) -> CycNum {
        self.f.ck(&o.f);
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let r = if self.r.den == o.r.den {
            RawEl::make(
                self.r
                    .num
                    .iter()
                    .zip(&o.r.num)
                    .map(|(a, b)| a + b)
                    .collect(),
                self.r.den.clone(),
            )
        } else {
            RawEl::make(
                self.r
                    .num
                    .iter()
                    .zip(&o.r.num)
                    .map(|(a, b)| a * &o.r.den + b * &self.r.den)
                    .collect(),
                &self.r.den * &o.r.den,
            )
        };
        self.f.from_raw(r)
    }
}

impl<'b> Sub<&'b CycNum> for &CycNum {
    type Output = CycNum;
    fn sub(self, o: &'b CycNum) -> CycNum {
        self + &(-o)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            f: self.f.clone(),
            r: RawEl {
                num: self.r.num.iter().map(|x| -x).collect(),
                den: self.r.den.clone(),
            },
        }
    }
}

impl<'b> Mul<&'b CycNum> for &CycNum {
    type Output = CycNum;
    fn mul(self, o: &'b CycNum) -> CycNum {
        self.f.ck(&o.f);
        if self.is_rational() {
            return o.scale(&Rat::new(self.r.num[0].clone(), self.r.den.clone()));
        }
        if o.is_rational() {
            return self.scale(&Rat::new(o.r.num[0].clone(), o.r.den.clone()));
        }
        self.f.from_raw(self.f.0.t.mul(&self.r, &o.r))
    }
}

/// u + v * lambda with u, v in Q(xi_2n); v = None encodes v = 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtScalar {
    pub u: CycNum,
    v: Option<CycNum>,
}

fn opt(v: CycNum) -> Option<CycNum> {
    if v.is_zero() {
        None
    } else {
        Some(v)
    }
}

impl ExtScalar {
    pub fn from_cyc(u: CycNum) -> ExtScalar {
        ExtScalar { u, v: None }
    }

    pub fn new(u: CycNum, v: CycNum) -> ExtScalar {
        u.field().ck(v.field());
        ExtScalar { u, v: opt(v) }
    }

    pub fn zero(f: &Field) -> ExtScalar {
        ExtScalar {
            u: f.zero(),
            v: None,
        }
    }

    pub fn field(&self) -> &Field {
        self.u.field()
    }

    pub fn v(&self) -> Option<&CycNum> {
        self.v.as_ref()
    }

    pub fn v_or_zero(&self) -> CycNum {
        self.v.clone().unwrap_or_else(|| self.u.field().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_none() && self.u.is_zero()
    }

    pub fn is_cyc(&self) -> bool {
        self.v.is_none()
    }

    pub fn to_rat(&self) -> Option<Rat> {
        if self.v.is_none() {
            self.u.to_rat()
        } else {
            None
        }
    }

    pub fn conj(&self) -> ExtScalar {
        ExtScalar {
            u: self.u.conj(),
            v: self.v.as_ref().map(|v| v.conj()),
        }
    }

    pub fn is_conj_fixed(&self) -> bool {
        *self == self.conj()
    }

    pub fn scale(&self, q: &Rat) -> ExtScalar {
        ExtScalar {
            u: self.u.scale(q),
            v: self.v.as_ref().map(|v| v.scale(q)),
        }
    }

    pub fn inv(&self) -> Option<ExtScalar> {
        match &self.v {
            None => self.u.inv().map(ExtScalar::from_cyc),
            Some(v) => {
                // (u + v L)^-1 = (u - v L) / (u^2 - c v^2); the
                // denominator is nonzero because lambda is not in the
                // base field
                let c = self.u.field().c();
                let d = &(&self.u * &self.u) - &(&c * &(v * v));
                let di = d.inv().expect("lambda guard violated");
                Some(ExtScalar {
                    u: &self.u * &di,
                    v: opt(-&(v * &di)),
                })
            }
        }
    }

    pub fn pow(&self, k: i64) -> ExtScalar {
        if k < 0 {
            return self
                .inv()
                .expect("negative power of zero")
                .pow(k.checked_neg().expect("exponent overflow"));
        }
        let f = self.field().clone();
        let mut acc = ExtScalar::from_cyc(f.one());
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.v {
            None => write!(f, "Ext({})", self.u),
            Some(v) => write!(f, "Ext({} + {}*L)", self.u, v),
        }
    }
}

impl<'b> Add<&'b ExtScalar> for &ExtScalar {
    type Output = ExtScalar;
    fn add(self, o: &'b ExtScalar) -> ExtScalar {
        let v = match (&self.v, &o.v) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => opt(a + b),
        };
        ExtScalar {
            u: &self.u + &o.u,
            v,
        }
    }
}

impl<'b> Sub<&'b ExtScalar> for &ExtScalar {
    type Output = ExtScalar;
    fn sub(self, o: &'b ExtScalar) -> ExtScalar {
        self + &(-o)
    }
}

impl Neg for &ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        ExtScalar {
            u: -&self.u,
            v: self.v.as_ref().map(|v| -v),
        }
    }
}

impl<'b> Mul<&'b ExtScalar> for &ExtScalar {
    type Output = ExtScalar;
    fn mul(self, o: &'b ExtScalar) -> ExtScalar {
        match (&self.v, &o.v) {
            (None, None) => ExtScalar {
                u: &self.u * &o.u,
                v: None,
            },
            (Some(a), None) => ExtScalar {
                u: &self.u * &o.u,
                v: opt(a * &o.u),
            },
            (None, Some(b)) => ExtScalar {
                u: &self.u * &o.u,
                v: opt(&self.u * b),
            },
            (Some(a), Some(b)) => {
                let c = self.u.field().c();
                ExtScalar {
                    u: &(&self.u * &o.u) + &(&c * &(a * b)),
                    v: opt(&(&self.u * b) + &(a * &o.u)),
                }
            }
        }
    }
}

/// A real value s + i*t where s is conjugation-fixed and t is
/// conjugation-negated; i*t is then real even when i is outside the
/// field (odd n). Every geometric predicate bottoms out in a sign of
/// one of these.
#[derive(Clone, PartialEq, Eq)]
pub struct GScalar {
    pub s: ExtScalar,
    pub t: ExtScalar,
}

impl GScalar {
    fn half() -> Rat {
        Rat::new(BigInt::one(), BigInt::from(2))
    }

    pub fn zero(f: &Field) -> GScalar {
        GScalar {
            s: ExtScalar::zero(f),
            t: ExtScalar::zero(f),
        }
    }

    pub fn from_rat(f: &Field, q: &Rat) -> GScalar {
        GScalar {
            s: ExtScalar::from_cyc(f.from_rat(q)),
            t: ExtScalar::zero(f),
        }
    }

    /// Wraps an already-real element.
    pub fn from_real(s: ExtScalar) -> GScalar {
        debug_assert!(s.is_conj_fixed());
        let f = s.field().clone();
        GScalar {
            s,
            t: ExtScalar::zero(&f),
        }
    }

    /// Re(z) as an exact real.
    pub fn re_of(z: &ExtScalar) -> GScalar {
        let f = z.field().clone();
        GScalar {
            s: (z + &z.conj()).scale(&Self::half()),
            t: ExtScalar::zero(&f),
        }
    }

    /// Im(z) as an exact real: Im(z) = i * (conj z - z) / 2.
    pub fn im_of(z: &ExtScalar) -> GScalar {
        let f = z.field().clone();
        GScalar {
            s: ExtScalar::zero(&f),
            t: (&z.conj() - z).scale(&Self::half()),
        }
    }

    pub fn field(&self) -> &Field {
        self.s.field()
    }

    pub fn neg(&self) -> GScalar {
        GScalar {
            s: -&self.s,
            t: -&self.t,
        }
    }

    pub fn add(&self, o: &GScalar) -> GScalar {
        GScalar {
            s: &self.s + &o.s,
            t: &self.t + &o.t,
        }
    }

    pub fn sub(&self, o: &GScalar) -> GScalar {
        GScalar {
            s: &self.s - &o.s,
            t: &self.t - &o.t,
        }
    }

    pub fn mul(&self, o: &GScalar) -> GScalar {
        GScalar {
            s: &(&self.s * &o.s) - &(&self.t * &o.t),
            t: &(&self.s * &o.t) + &(&self.t * &o.s),
        }
    }

    pub fn sqr(&self) -> GScalar {
        self.mul(self)
    }

    pub fn is_zero(&self) -> bool {
        match self.field().i_unit() {
            Some(i) => {
                // value = s + i t directly in the field
                (&self.s + &(&ExtScalar::from_cyc(i) * &self.t)).is_zero()
            }
            // i is not in F(lambda) for n = 3, 5 (no quadratic subfield
            // Q(i), and -c is not a square in F), so s + i t = 0 forces
            // s = t = 0 componentwise
            None => self.s.is_zero() && self.t.is_zero(),
        }
    }

    /// Certified sign of the real value.
    pub fn sign(&self) -> i8 {
        debug_assert!(self.s.is_conj_fixed(), "s component must be real");
        debug_assert!(self.t == -&self.t.conj(), "t component must be anti-fixed");
        if self.is_zero() {
            return 0;
        }
        let f = self.field().clone();
        for &p in SIGN_PREC_LADDER {
            let es = f.embed_ext(&self.s, p);
            let val = if self.t.is_zero() {
                es.re
            } else {
                let et = f.embed_ext(&self.t, p);
                es.re.sub(&et.im, p)
            };
            match val.sign() {
                Some(s) if s != 0 => return s,
                _ => {}
            }
        }
        unreachable!("sign refinement exhausted on a nonzero value");
    }
}

impl fmt::Debug for GScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GScalar(s={:?}, t={:?})", self.s, self.t)
    }
}

/// Sign of a conjugation-fixed (real-valued) element.
pub fn real_sign(x: &ExtScalar) -> i8 {
    GScalar::from_real(x.clone()).sign()
}

pub fn real_sign_cyc(x: &CycNum) -> i8 {
    real_sign(&ExtScalar::from_cyc(x.clone()))
}

/// Sign of the imaginary part of any element.
pub fn imag_sign(x: &ExtScalar) -> i8 {
    GScalar::im_of(x).sign()
}

pub fn imag_sign_cyc(x: &CycNum) -> i8 {
    imag_sign(&ExtScalar::from_cyc(x.clone()))
}

/// "p" when integral, else "p/q"; the canonical textual form.
pub fn rat_string(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Accepts "p", "p/q", and decimal notation like "-1.25".
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.trim_start().starts_with('-');
        let ip: BigInt = if int == "-" || int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let fp: BigInt = frac.parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let num = &ip * &scale + if neg { -fp } else { fp };
        return Some(Rat::new(num, scale));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rat::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }

    fn all_fields() -> Vec<Field> {
        [3u32, 4, 5, 6, 8]
            .iter()
            .map(|&n| Field::new(n).unwrap())
            .collect()
    }

    #[test]
    fn degrees() {
        let want = [(3u32, 2usize), (4, 4), (5, 4), (6, 4), (8, 8)];
        for (n, phi) in want {
            let f = Field::new(n).unwrap();
            assert_eq!(f.phi(), phi, "n={}", n);
            assert_eq!(f.nn(), 2 * n);
        }
    }

    #[test]
    fn unsupported_orders() {
        assert!(Field::new(2).is_err());
        assert!(Field::new(7).is_err());
        assert!(Field::new(12).is_err());
    }

    #[test]
    fn xi_has_order_nn() {
        for f in all_fields() {
            let x = f.xi(1);
            assert!(x.pow(f.nn() as i64).is_one());
            for k in 1..f.nn() as i64 {
                assert!(!x.pow(k).is_one(), "n={} k={}", f.n(), k);
            }
        }
    }

    #[test]
    fn zeta_norm_is_c() {
        for f in all_fields() {
            let z = f.zeta();
            assert_eq!(&z * &z.conj(), f.c(), "n={}", f.n());
            assert!(f.c().is_conj_fixed());
        }
    }

    #[test]
    fn c_values() {
        // c = 7, 5, 6+sqrt5, 7, 5+2sqrt2 for n = 3,4,5,6,8
        let f3 = Field::new(3).unwrap();
        assert_eq!(f3.c(), f3.from_int(7));
        let f4 = Field::new(4).unwrap();
        assert_eq!(f4.c(), f4.from_int(5));
        let f6 = Field::new(6).unwrap();
        assert_eq!(f6.c(), f6.from_int(7));
        // n=5: c - 6 squares to 5
        let f5 = Field::new(5).unwrap();
        let s5 = &f5.c() - &f5.from_int(6);
        assert_eq!(&s5 * &s5, f5.from_int(5));
        assert_eq!(real_sign_cyc(&s5), 1);
        // n=8: (c - 5)^2 = 8
        let f8 = Field::new(8).unwrap();
        let s8 = &f8.c() - &f8.from_int(5);
        assert_eq!(&s8 * &s8, f8.from_int(8));
        assert_eq!(real_sign_cyc(&s8), 1);
    }

    #[test]
    fn c_embeds_to_known_values() {
        // 6 + sqrt 5 = 8.2360679...; 5 + 2 sqrt 2 = 7.8284271...
        let f5 = Field::new(5).unwrap();
        let e = f5.embed_cyc(&f5.c(), 128);
        assert!(e.re.lo.to_rational() > rat(82360679, 10000000));
        assert!(e.re.hi.to_rational() < rat(82360680, 10000000));
        let f8 = Field::new(8).unwrap();
        let e = f8.embed_cyc(&f8.c(), 128);
        assert!(e.re.lo.to_rational() > rat(78284271, 10000000));
        assert!(e.re.hi.to_rational() < rat(78284272, 10000000));
    }

    #[test]
    fn mu_is_a_unit_rotation() {
        for f in all_fields() {
            let m = f.mu();
            assert!((&m * &m.conj()).is_one(), "n={}", f.n());
            assert_eq!(&m * &f.zeta(), f.zeta_conj());
        }
    }

    #[test]
    fn inverses() {
        for f in all_fields() {
            for x in [
                f.zeta(),
                &f.xi(1) + &f.from_int(3),
                &f.xi(2) - &f.xi(1),
                f.from_rat(&rat(-7, 3)),
            ] {
                let xi = x.inv().unwrap();
                assert!((&x * &xi).is_one(), "n={} x={}", f.n(), x);
            }
            assert!(f.zero().inv().is_none());
        }
    }

    #[test]
    fn conj_is_ring_automorphism() {
        for f in all_fields() {
            let a = &f.xi(1) + &f.from_int(2);
            let b = &f.xi(3) - &f.from_rat(&rat(1, 2));
            assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
            assert_eq!(a.conj().conj(), a);
        }
    }

    #[test]
    fn automorphisms_act_on_xi() {
        for f in all_fields() {
            let nn = f.nn();
            for k in 1..nn {
                if num_integer::gcd(k, nn) != 1 {
                    continue;
                }
                assert_eq!(f.xi(1).automorphism(k), f.xi(k as i64));
                let a = &f.xi(1) + &f.from_int(5);
                let b = &f.xi(2) + &f.xi(1);
                assert_eq!(
                    (&a * &b).automorphism(k),
                    &a.automorphism(k) * &b.automorphism(k)
                );
            }
        }
    }

    #[test]
    fn real_signs() {
        let f5 = Field::new(5).unwrap();
        // 2 cos(pi/5) = golden ratio = 1.618... > 0
        let e1 = &f5.xi(1) + &f5.xi(-1);
        assert_eq!(real_sign_cyc(&e1), 1);
        assert_eq!(real_sign_cyc(&(&e1 - &f5.from_int(2))), -1);
        // exact zeros
        let f3 = Field::new(3).unwrap();
        assert_eq!(real_sign_cyc(&(&f3.c() - &f3.from_int(7))), 0);
        let f8 = Field::new(8).unwrap();
        assert_eq!(real_sign_cyc(&(&f8.c() - &f8.from_int(7))), 1);
        assert_eq!(real_sign_cyc(&(&f8.c() - &f8.from_int(8))), -1);
    }

    #[test]
    fn lambda_arithmetic() {
        let f5 = Field::new(5).unwrap();
        let lam = ExtScalar::new(f5.zero(), f5.one());
        // lambda^2 = c structurally
        assert_eq!(&lam * &lam, ExtScalar::from_cyc(f5.c()));
        // lambda = sqrt(6 + sqrt 5) = 2.869... > 2
        let two = ExtScalar::from_cyc(f5.from_int(2));
        assert_eq!(real_sign(&(&lam - &two)), 1);
        assert_eq!(real_sign(&(&lam - &ExtScalar::from_cyc(f5.from_int(3)))), -1);
        // inversion in the extension
        let x = &lam + &ExtScalar::from_cyc(&f5.xi(1) + &f5.from_int(1));
        let xi = x.inv().unwrap();
        assert!((&(&x * &xi) - &ExtScalar::from_cyc(f5.one())).is_zero());
    }

    #[test]
    fn imag_signs() {
        for f in all_fields() {
            assert_eq!(imag_sign_cyc(&f.xi(1)), 1, "n={}", f.n());
            assert_eq!(imag_sign_cyc(&f.xi(1).conj()), -1);
            assert_eq!(imag_sign_cyc(&f.from_int(12)), 0);
        }
    }

    #[test]
    fn gscalar_modulus_identity() {
        // Re(zeta)^2 + Im(zeta)^2 = c, structurally
        for f in all_fields() {
            let z = ExtScalar::from_cyc(f.zeta());
            let m = GScalar::re_of(&z).sqr().add(&GScalar::im_of(&z).sqr());
            let c = GScalar::from_real(ExtScalar::from_cyc(f.c()));
            assert_eq!(m.sub(&c).is_zero(), true, "n={}", f.n());
            assert_eq!(m.sub(&c).sign(), 0);
        }
    }

    #[test]
    fn gscalar_signs() {
        let f = Field::new(5).unwrap();
        let z = ExtScalar::from_cyc(f.xi(1));
        assert_eq!(GScalar::im_of(&z).sign(), 1);
        assert_eq!(GScalar::re_of(&z).sign(), 1); // cos 36 > 0
        let z3 = ExtScalar::from_cyc(f.xi(3));
        assert_eq!(GScalar::re_of(&z3).sign(), -1); // cos 108 < 0
        let prod = GScalar::re_of(&z).mul(&GScalar::re_of(&z3));
        assert_eq!(prod.sign(), -1);
    }

    #[test]
    fn i_unit_parity() {
        assert!(Field::new(3).unwrap().i_unit().is_none());
        assert!(Field::new(5).unwrap().i_unit().is_none());
        for n in [4u32, 6, 8] {
            let f = Field::new(n).unwrap();
            let i = f.i_unit().unwrap();
            assert_eq!(&i * &i, f.from_int(-1));
        }
    }

    #[test]
    #[should_panic(expected = "mixing elements of different fields")]
    fn cross_field_mixing_panics() {
        let f3 = Field::new(3).unwrap();
        let f4 = Field::new(4).unwrap();
        let _ = &f3.xi(1) + &f4.xi(1);
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rat_string(&rat(5, 1)), "5");
        assert_eq!(rat_string(&rat(-3, 7)), "-3/7");
        assert_eq!(parse_rat("5"), Some(rat(5, 1)));
        assert_eq!(parse_rat("-3/7"), Some(rat(-3, 7)));
        assert_eq!(parse_rat("6/4"), Some(rat(3, 2)));
        assert_eq!(parse_rat("-1.25"), Some(rat(-5, 4)));
        assert_eq!(parse_rat("0.5"), Some(rat(1, 2)));
        assert_eq!(parse_rat("2."), None);
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
    }

    #[test]
    fn coefficient_roundtrip() {
        let f = Field::new(8).unwrap();
        let x = f.cyc(&[rat(1, 3), rat(-2, 1), rat(0, 1), rat(7, 5)]);
        let back = f.cyc(&x.coeffs());
        assert_eq!(x, back);
    }
}
