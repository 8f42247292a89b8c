//! Exact scalars: arbitrary-precision rationals and single-radicand quadratic
//! irrationals `p + q·√d`.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// `n / d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles huge numerators/denominators without overflowing
    // to inf/inf.
    r.to_f64().unwrap_or(f64::NAN)
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn rat_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = exact_isqrt(r.numer())?;
    let d = exact_isqrt(r.denom())?;
    Some(Rational::new(n, d))
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

fn sign_of(r: &Rational) -> Ordering {
    r.cmp(&Rational::zero())
}

/// Sign of `a + b·√d` for rational `a, b` and rational `d ≥ 0`, decided by
/// squaring; never by floating point.
pub fn sign_of_surd(a: &Rational, b: &Rational, d: &Rational) -> Ordering {
    let sb = if d.is_zero() { Ordering::Equal } else { sign_of(b) };
    let sa = sign_of(a);
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // opposite signs: compare magnitudes a² vs b²d
    match (a * a).cmp(&(b * b * d)) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Exact number `p + q·√d` with rational `p, q` and rational `d ≥ 0`.
///
/// Values are normalized on construction: the radicand is reduced to an
/// integer with small square factors pulled into `q`, and a perfectly square
/// radicand collapses to a plain rational (`q = 0`, `d = 0`). Arithmetic is
/// only defined between scalars sharing a radicand; ordering is exact across
/// radicands.
#[derive(Clone, Debug)]
pub struct AlgebraicScalar {
    p: Rational,
    q: Rational,
    d: Rational,
}

const TRIAL_PRIMES_UP_TO: u32 = 100;

impl AlgebraicScalar {
    pub fn new(p: Rational, q: Rational, d: Rational) -> Self {
        assert!(!d.is_negative(), "negative radicand");
        if q.is_zero() || d.is_zero() {
            return Self::from_rational(p);
        }
        if let Some(s) = rational_sqrt(&d) {
            return Self::from_rational(p + q * s);
        }
        // √(n/m) = √(n·m) / m
        let mut radicand = d.numer() * d.denom();
        let mut q = q / Rational::from_integer(d.denom().clone());
        let mut f = 2u32;
        while f <= TRIAL_PRIMES_UP_TO {
            let f2 = BigInt::from(f * f);
            while (&radicand % &f2).is_zero() {
                radicand /= &f2;
                q *= Rational::from_integer(BigInt::from(f));
            }
            f += if f == 2 { 1 } else { 2 };
        }
        if let Some(s) = exact_isqrt(&radicand) {
            return Self::from_rational(p + q * Rational::from_integer(s));
        }
        AlgebraicScalar {
            p,
            q,
            d: Rational::from_integer(radicand),
        }
    }

    pub fn from_rational(p: Rational) -> Self {
        AlgebraicScalar {
            p,
            q: Rational::zero(),
            d: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    /// `√d`.
    pub fn sqrt(d: Rational) -> Self {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.p
    }

    pub fn surd_coefficient(&self) -> &Rational {
        &self.q
    }

    pub fn radicand(&self) -> &Rational {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.p.clone())
    }

    pub fn signum(&self) -> Ordering {
        sign_of_surd(&self.p, &self.q, &self.d)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        AlgebraicScalar {
            p: &self.p + r,
            q: self.q.clone(),
            d: self.d.clone(),
        }
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        AlgebraicScalar {
            p: &self.p * r,
            q: &self.q * r,
            d: self.d.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.mul_rational(&Rational::from_integer(BigInt::from(-1)))
    }

    fn radicand_compatible(&self, other: &Self) -> bool {
        self.is_rational() || other.is_rational() || self.d == other.d
    }

    fn common_radicand(&self, other: &Self) -> Rational {
        if self.is_rational() {
            other.d.clone()
        } else {
            self.d.clone()
        }
    }

    /// Sum; `None` when the radicands differ.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if !self.radicand_compatible(other) {
            return None;
        }
        Some(Self::new(
            &self.p + &other.p,
            &self.q + &other.q,
            self.common_radicand(other),
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.neg())
    }

    /// Product; `None` when the radicands differ.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        if !self.radicand_compatible(other) {
            return None;
        }
        let d = self.common_radicand(other);
        let p = &self.p * &other.p + &self.q * &other.q * &d;
        let q = &self.p * &other.q + &self.q * &other.p;
        Some(Self::new(p, q, d))
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        sign_of_surd(&(&self.p - r), &self.q, &self.d)
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.p) + rat_to_f64(&self.q) * rat_to_f64(&self.d).sqrt()
    }

    /// Rational approximation with absolute error below `2^-bits · |q|`.
    pub fn approximate(&self, bits: u32) -> Rational {
        if self.is_rational() {
            return self.p.clone();
        }
        // d is an integer after normalization.
        let scale = BigInt::one() << (2 * bits as usize);
        let root = (self.d.numer() * scale).sqrt();
        let sqrt_d = Rational::new(root, BigInt::one() << bits as usize);
        &self.p + &self.q * sqrt_d
    }
}

impl PartialEq for AlgebraicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AlgebraicScalar {}

impl PartialOrd for AlgebraicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.radicand_compatible(other) {
            let d = self.common_radicand(other);
            return sign_of_surd(&(&self.p - &other.p), &(&self.q - &other.q), &d);
        }
        // sign(u - v) with u = Δp + q1√d1 and v = q2√d2
        let u = AlgebraicScalar {
            p: &self.p - &other.p,
            q: self.q.clone(),
            d: self.d.clone(),
        };
        let v_sign = sign_of(&other.q);
        let u_sign = u.signum();
        if u_sign != v_sign {
            return sign_difference(u_sign, v_sign);
        }
        // same sign: compare squares, flipping for negatives
        let u2 = u.checked_mul(&u).expect("same radicand");
        let v2 = &other.q * &other.q * &other.d;
        let by_square = u2.cmp_rational(&v2);
        if u_sign == Ordering::Less {
            by_square.reverse()
        } else {
            by_square
        }
    }
}

fn sign_difference(a: Ordering, b: Ordering) -> Ordering {
    // sign(u - v) when sign(u) != sign(v)
    match (a, b) {
        (Ordering::Greater, _) => Ordering::Greater,
        (_, Ordering::Greater) => Ordering::Less,
        (Ordering::Equal, Ordering::Less) => Ordering::Greater,
        (Ordering::Less, Ordering::Equal) => Ordering::Less,
        _ => unreachable!("signs are equal"),
    }
}

impl fmt::Display for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", rat_to_string(&self.p));
        }
        let d = rat_to_string(&self.d);
        if self.p.is_zero() {
            write!(f, "{}*sqrt({})", rat_to_string(&self.q), d)
        } else if self.q.is_negative() {
            write!(
                f,
                "{} - {}*sqrt({})",
                rat_to_string(&self.p),
                rat_to_string(&-self.q.clone()),
                d
            )
        } else {
            write!(f, "{} + {}*sqrt({})", rat_to_string(&self.p), rat_to_string(&self.q), d)
        }
    }
}

/// All real roots `t > 0` of `a·t² + b·t + c = 0`, ascending.
///
/// The identically-zero equation has no isolated roots and yields an empty
/// list.
pub fn solve_quadratic_positive(a: &Rational, b: &Rational, c: &Rational) -> Vec<AlgebraicScalar> {
    let mut roots = Vec::new();
    if a.is_zero() {
        if !b.is_zero() {
            let t = -c / b;
            if t.is_positive() {
                roots.push(AlgebraicScalar::from_rational(t));
            }
        }
        return roots;
    }
    let disc = b * b - int(4) * a * c;
    if disc.is_negative() {
        return roots;
    }
    let two_a = int(2) * a;
    let center = -b / &two_a;
    if disc.is_zero() {
        if center.is_positive() {
            roots.push(AlgebraicScalar::from_rational(center));
        }
        return roots;
    }
    let half_width = Rational::one() / &two_a;
    let r1 = AlgebraicScalar::new(center.clone(), -half_width.clone(), disc.clone());
    let r2 = AlgebraicScalar::new(center, half_width, disc);
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    for r in [lo, hi] {
        if r.is_positive() {
            roots.push(r);
        }
    }
    roots
}
