//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 106 bits of significand. Only the operations needed by the zeta
//! oracle are provided: the four field operations, `sqrt`, `exp`, `ln` and a
//! joint `sin_cos`.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
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
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: 3.141592653589793,
        lo: 1.2246467991473532e-16,
    };
    pub const TWO_PI: Dd = Dd {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };
    pub const HALF_PI: Dd = Dd {
        hi: 1.5707963267948966,
        lo: 6.123233995736766e-17,
    };
    pub const LN2: Dd = Dd {
        hi: 0.6931471805599453,
        lo: 2.3190468138462996e-17,
    };
    pub const LN10: Dd = Dd {
        hi: 2.302585092994046,
        lo: -2.1707562233822494e-16,
    };

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    /// Multiply by an exact power of two.
    #[inline]
    pub fn ldexp(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    #[inline]
    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Dd::ZERO
            } else {
                Dd::from_f64(f64::NAN)
            };
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let resid = (self - Dd { hi: p, lo: e }).to_f64();
        let (hi, lo) = quick_two_sum(x, resid * 0.5 / x);
        Dd { hi, lo }
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.7 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / Dd::LN2.hi).round();
        // |r| <= ln2/2, then scaled down by 2^9 so the series converges in a few terms.
        let r = (self - Dd::LN2.mul_f64(k)).ldexp(-9);
        let inv = inv_factorials();
        let mut s = inv[10];
        for j in (2..10).rev() {
            s = s * r + inv[j];
        }
        // s = expm1(r)
        let mut s = (s * r + Dd::ONE) * r;
        for _ in 0..9 {
            s = s.ldexp(1) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        let y0 = Dd::from_f64(self.hi.ln());
        y0 + self * (-y0).exp() - Dd::ONE
    }

    /// `(sin x, cos x)`. Absolute accuracy is about `2^-106 * max(1, |x|)`.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.hi / Dd::TWO_PI.hi).round();
        let r = self - Dd::TWO_PI.mul_f64(k);
        let j = (r.hi / Dd::HALF_PI.hi).round();
        let r = r - Dd::HALF_PI.mul_f64(j);
        let r2 = r.sqr();
        let inv = inv_factorials();
        // |r| <= pi/4: terms through r^29 leave a remainder below 1e-34.
        let mut sin = inv[29];
        let mut n = 27;
        while n >= 1 {
            sin = inv[n] - r2 * sin;
            if n == 1 {
                break;
            }
            n -= 2;
        }
        let sin = sin * r;
        let mut cos = inv[28];
        let mut n = 26;
        loop {
            cos = inv[n] - r2 * cos;
            if n == 0 {
                break;
            }
            n -= 2;
        }
        match (j as i64).rem_euclid(4) {
            0 => (sin, cos),
            1 => (cos, -sin),
            2 => (-sin, -cos),
            _ => (-cos, sin),
        }
    }
}

fn inv_factorials() -> &'static [Dd; 32] {
    static TABLE: OnceLock<[Dd; 32]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [Dd::ONE; 32];
        for n in 1..32 {
            t[n] = t[n - 1] / Dd::from_f64(n as f64);
        }
        t
    })
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
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

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
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

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    /// `exp(re) * (cos im + i sin im)`
    pub fn exp(self) -> DdComplex {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        DdComplex {
            re: m * c,
            im: m * s,
        }
    }

    pub fn conj(self) -> DdComplex {
        DdComplex {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn scale(self, k: Dd) -> DdComplex {
        DdComplex {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, b: DdComplex) -> DdComplex {
        let den = b.norm_sqr();
        let num = self * b.conj();
        DdComplex {
            re: num.re / den,
            im: num.im / den,
        }
    }
}
