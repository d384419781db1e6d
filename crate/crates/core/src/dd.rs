//! Double-double arithmetic.
//!
//! [`Dd`] represents a value as an unevaluated sum `hi + lo` of two `f64`s,
//! giving roughly 31 significant decimal digits. The controllability-cost
//! studies need this: the smallest Gramian eigenvalue of a path network at
//! `N = 12`, `T = 1` is of order `1e-29`, far below what `f64` can resolve
//! against a unit-norm matrix.
//!
//! Field operations, `sqrt`, `exp`, `ln`, `hypot` and comparisons carry full
//! double-double precision (Dekker/Knuth error-free transforms, QD-style
//! `exp`). Trigonometric functions fall back to `f64` precision; no numerical
//! kernel in this crate calls them.

use crate::scalar::Scalar;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

/// Double-double float: `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

impl Dd {
    pub const LN_2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    pub const PI_DD: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    /// 2^-104, the relative rounding unit of the format.
    pub const EPS: f64 = 4.930_380_657_631_324e-32;

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn approx(self) -> f64 {
        self.hi + self.lo
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, mut e) = two_prod(self.hi, b);
        e += self.lo * b;
        let (s, lo) = quick_two_sum(p, e);
        Dd { hi: s, lo }
    }

    /// Exact multiplication by a power of two.
    fn mul_pwr2(self, b: f64) -> Self {
        Dd {
            hi: self.hi * b,
            lo: self.lo * b,
        }
    }

    fn ldexp(self, n: i32) -> Self {
        let f = f64::powi(2.0, n);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    fn sqr(self) -> Self {
        let (p, mut e) = two_prod(self.hi, self.hi);
        e += 2.0 * self.hi * self.lo;
        e += self.lo * self.lo;
        let (s, lo) = quick_two_sum(p, e);
        Dd { hi: s, lo }
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, mut e) = two_prod(self.hi, b.hi);
        e += self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Dd::from_f64(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e) + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        let n = (self / b).trunc();
        self - b * n
    }
}

macro_rules! impl_assign {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Dd {
            fn $method(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    };
}
impl_assign!(AddAssign, add_assign, +);
impl_assign!(SubAssign, sub_assign, -);
impl_assign!(MulAssign, mul_assign, *);
impl_assign!(DivAssign, div_assign, /);
impl_assign!(RemAssign, rem_assign, %);

impl Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.approx())
    }
}

impl fmt::LowerExp for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerExp::fmt(&self.approx(), f)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd { hi: 0.0, lo: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd { hi: 1.0, lo: 0.0 }
    }
}

impl Num for Dd {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Dd::from_f64)
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        self.approx().to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.approx().to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.approx())
    }
}

impl FromPrimitive for Dd {
    fn from_i64(n: i64) -> Option<Self> {
        // i64 may exceed 2^53; split into two exactly representable halves
        let hi = (n >> 31) as f64 * 2f64.powi(31);
        let lo = (n & 0x7fff_ffff) as f64;
        Some(Dd::from_f64(hi) + Dd::from_f64(lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = (n >> 31) as f64 * 2f64.powi(31);
        let lo = (n & 0x7fff_ffff) as f64;
        Some(Dd::from_f64(hi) + Dd::from_f64(lo))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(Dd::from_f64(n))
    }
}

impl NumCast for Dd {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        n.to_f64().map(Dd::from_f64)
    }
}

impl Float for Dd {
    fn nan() -> Self {
        Dd::from_f64(f64::NAN)
    }
    fn infinity() -> Self {
        Dd::from_f64(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Dd::from_f64(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Dd::from_f64(-0.0)
    }
    fn min_value() -> Self {
        Dd::from_f64(f64::MIN)
    }
    fn min_positive_value() -> Self {
        Dd::from_f64(f64::MIN_POSITIVE)
    }
    fn epsilon() -> Self {
        Dd::from_f64(Dd::EPS)
    }
    fn max_value() -> Self {
        Dd::from_f64(f64::MAX)
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }

    fn floor(self) -> Self {
        let f = self.hi.floor();
        if f == self.hi {
            Dd::new(f, self.lo.floor())
        } else {
            Dd::from_f64(f)
        }
    }
    fn ceil(self) -> Self {
        let c = self.hi.ceil();
        if c == self.hi {
            Dd::new(c, self.lo.ceil())
        } else {
            Dd::from_f64(c)
        }
    }
    fn round(self) -> Self {
        if self >= Dd::zero() {
            (self + Dd::of(0.5)).floor()
        } else {
            (self - Dd::of(0.5)).ceil()
        }
    }
    fn trunc(self) -> Self {
        if self >= Dd::zero() {
            self.floor()
        } else {
            self.ceil()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        if self.is_nan() {
            Dd::nan()
        } else if self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0) {
            Dd::one()
        } else if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -Dd::one()
        } else {
            Dd::from_f64(self.hi.signum())
        }
    }
    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Dd::one() / self
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dd::one();
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Dd::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }
    fn powf(self, n: Self) -> Self {
        if self.is_zero() {
            return if n.is_zero() { Dd::one() } else { Dd::zero() };
        }
        (n * self.ln()).exp()
    }
    fn sqrt(self) -> Self {
        if self.is_zero() {
            return Dd::zero();
        }
        if self.hi < 0.0 {
            return Dd::nan();
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Dd::from_f64(ax);
        let err = (self - ax_dd.sqr()).hi * (x * 0.5);
        Dd::new(ax, err)
    }
    fn exp(self) -> Self {
        // e^x = 2^m * (e^r)^512 with r = (x - m ln2)/512, |r| small
        if self.hi <= -709.0 {
            return Dd::zero();
        }
        if self.hi >= 709.0 {
            return Dd::infinity();
        }
        if self.is_zero() {
            return Dd::one();
        }
        let m = (self.hi / Dd::LN_2.hi + 0.5).floor();
        let r = (self - Dd::LN_2.mul_f64(m)).mul_pwr2(1.0 / 512.0);
        // Taylor series for e^r - 1; factorials are exact in f64 so the
        // divisions keep full double-double precision
        let mut p = r.sqr();
        let mut s = r + p.mul_pwr2(0.5);
        p *= r;
        const FACT: [f64; 10] = [
            6.0,
            24.0,
            120.0,
            720.0,
            5040.0,
            40320.0,
            362880.0,
            3628800.0,
            39916800.0,
            479001600.0,
        ];
        let thresh = Dd::EPS / 512.0;
        let mut t = p / Dd::from_f64(FACT[0]);
        let mut i = 1;
        loop {
            s += t;
            p *= r;
            if i >= FACT.len() {
                break;
            }
            t = p / Dd::from_f64(FACT[i]);
            i += 1;
            if t.hi.abs() <= thresh {
                s += t;
                break;
            }
        }
        // undo the 512 = 2^9 scaling: (1+s) <- (1+s)^2, nine times, tracked as s <- 2s + s^2
        for _ in 0..9 {
            s = s.mul_pwr2(2.0) + s.sqr();
        }
        (s + Dd::one()).ldexp(m as i32)
    }
    fn exp2(self) -> Self {
        (self * Dd::LN_2).exp()
    }
    fn ln(self) -> Self {
        if self.is_zero() {
            return Dd::neg_infinity();
        }
        if self.hi < 0.0 {
            return Dd::nan();
        }
        // Newton refinement of the f64 logarithm: y <- y + x e^{-y} - 1
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::one();
        }
        y
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        self.ln() / Dd::LN_2
    }
    fn log10(self) -> Self {
        self.ln() / Dd::of(10.0).ln()
    }
    fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Dd::zero()
        }
    }
    fn cbrt(self) -> Self {
        if self.is_zero() {
            return Dd::zero();
        }
        // Newton on y^3 = x from the f64 seed
        let mut y = Dd::from_f64(self.hi.cbrt());
        for _ in 0..2 {
            y = y + (self / y.sqr() - y) / Dd::of(3.0);
        }
        y
    }
    fn hypot(self, other: Self) -> Self {
        let (a, b) = (self.abs(), other.abs());
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return Dd::zero();
        }
        let q = small / big;
        big * (Dd::one() + q.sqr()).sqrt()
    }
    // Trigonometric group: f64 precision only; unused by the numeric kernels.
    fn sin(self) -> Self {
        Dd::from_f64(self.approx().sin())
    }
    fn cos(self) -> Self {
        Dd::from_f64(self.approx().cos())
    }
    fn tan(self) -> Self {
        Dd::from_f64(self.approx().tan())
    }
    fn asin(self) -> Self {
        Dd::from_f64(self.approx().asin())
    }
    fn acos(self) -> Self {
        Dd::from_f64(self.approx().acos())
    }
    fn atan(self) -> Self {
        Dd::from_f64(self.approx().atan())
    }
    fn atan2(self, other: Self) -> Self {
        Dd::from_f64(self.approx().atan2(other.approx()))
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn exp_m1(self) -> Self {
        if self.abs() < Dd::of(0.25) {
            // series keeps full precision near zero
            let mut term = self;
            let mut s = self;
            let mut k = 2.0;
            loop {
                term = term * self / Dd::from_f64(k);
                s += term;
                if term.hi.abs() <= Dd::EPS * s.hi.abs().max(1e-300) || k > 40.0 {
                    break;
                }
                k += 1.0;
            }
            s
        } else {
            self.exp() - Dd::one()
        }
    }
    fn ln_1p(self) -> Self {
        (Dd::one() + self).ln()
    }
    fn sinh(self) -> Self {
        Dd::from_f64(self.approx().sinh())
    }
    fn cosh(self) -> Self {
        Dd::from_f64(self.approx().cosh())
    }
    fn tanh(self) -> Self {
        Dd::from_f64(self.approx().tanh())
    }
    fn asinh(self) -> Self {
        Dd::from_f64(self.approx().asinh())
    }
    fn acosh(self) -> Self {
        Dd::from_f64(self.approx().acosh())
    }
    fn atanh(self) -> Self {
        Dd::from_f64(self.approx().atanh())
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi.integer_decode()
    }
}

impl FloatConst for Dd {
    fn E() -> Self {
        Dd::new(std::f64::consts::E, 1.4456468917292502e-16)
    }
    fn FRAC_1_PI() -> Self {
        Dd::one() / Self::PI()
    }
    fn FRAC_1_SQRT_2() -> Self {
        Dd::one() / Self::SQRT_2()
    }
    fn FRAC_2_PI() -> Self {
        Dd::of(2.0) / Self::PI()
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Dd::of(2.0) / Self::PI().sqrt()
    }
    fn FRAC_PI_2() -> Self {
        Self::PI().mul_pwr2(0.5)
    }
    fn FRAC_PI_3() -> Self {
        Self::PI() / Dd::of(3.0)
    }
    fn FRAC_PI_4() -> Self {
        Self::PI().mul_pwr2(0.25)
    }
    fn FRAC_PI_6() -> Self {
        Self::PI() / Dd::of(6.0)
    }
    fn FRAC_PI_8() -> Self {
        Self::PI().mul_pwr2(0.125)
    }
    fn LN_10() -> Self {
        Dd::of(10.0).ln()
    }
    fn LN_2() -> Self {
        Dd::LN_2
    }
    fn LOG10_E() -> Self {
        Self::E().log10()
    }
    fn LOG2_E() -> Self {
        Self::E().log2()
    }
    fn PI() -> Self {
        Dd::PI_DD
    }
    fn SQRT_2() -> Self {
        Dd::of(2.0).sqrt()
    }
}

impl Scalar for Dd {}
