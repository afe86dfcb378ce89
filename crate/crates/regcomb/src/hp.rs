//! High-precision real evaluation at the presentation boundary.
//!
//! All core arithmetic elsewhere is exact; this module exponentiates,
//! square-roots and logs exact rationals at a configurable mantissa
//! precision (200 bits by default).

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::Signed;

use crate::exact::{Int, Rat};

const RM: RoundingMode = RoundingMode::ToEven;

pub struct HpCtx {
    pub prec: usize,
    cc: Consts,
}

impl HpCtx {
    pub fn new(prec: usize) -> Self {
        HpCtx {
            prec,
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn with_default_precision() -> Self {
        Self::new(crate::config::precision_bits())
    }

    pub fn from_int(&mut self, v: &Int) -> BigFloat {
        BigFloat::parse(&v.to_string(), Radix::Dec, self.prec, RM, &mut self.cc)
    }

    pub fn from_rat(&mut self, v: &Rat) -> BigFloat {
        let n = self.from_int(v.numer());
        let d = self.from_int(v.denom());
        n.div(&d, self.prec, RM)
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_i64(0, self.prec)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_i64(1, self.prec)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.prec, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.prec, RM, &mut self.cc)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.prec, RM, &mut self.cc)
    }

    pub fn log10(&mut self, a: &BigFloat) -> BigFloat {
        a.log10(self.prec, RM, &mut self.cc)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec, RM)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.prec, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.prec, RM, &mut self.cc)
    }

    /// ln of a positive exact rational.
    pub fn ln_rat(&mut self, v: &Rat) -> BigFloat {
        assert!(v.is_positive(), "ln of non-positive rational");
        let x = self.from_rat(v);
        self.ln(&x)
    }

    pub fn to_f64(&mut self, v: &BigFloat) -> f64 {
        if v.is_nan() {
            return f64::NAN;
        }
        if v.is_zero() {
            return 0.0;
        }
        let s = v
            .format(Radix::Dec, RM, &mut self.cc)
            .unwrap_or_else(|_| "nan".into());
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    pub fn to_string(&mut self, v: &BigFloat) -> String {
        v.format(Radix::Dec, RM, &mut self.cc)
            .unwrap_or_else(|_| "nan".into())
    }
}

/// Complex value at working precision.
#[derive(Debug, Clone)]
pub struct HpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl HpComplex {
    pub fn one(ctx: &HpCtx) -> Self {
        HpComplex {
            re: ctx.one(),
            im: ctx.zero(),
        }
    }

    pub fn zero(ctx: &HpCtx) -> Self {
        HpComplex {
            re: ctx.zero(),
            im: ctx.zero(),
        }
    }

    pub fn real(v: &Rat, ctx: &mut HpCtx) -> Self {
        HpComplex {
            re: ctx.from_rat(v),
            im: ctx.zero(),
        }
    }

    pub fn mul(&self, rhs: &Self, ctx: &HpCtx) -> Self {
        let re = ctx.sub(&ctx.mul(&self.re, &rhs.re), &ctx.mul(&self.im, &rhs.im));
        let im = ctx.add(&ctx.mul(&self.re, &rhs.im), &ctx.mul(&self.im, &rhs.re));
        HpComplex { re, im }
    }

    pub fn add(&self, rhs: &Self, ctx: &HpCtx) -> Self {
        HpComplex {
            re: ctx.add(&self.re, &rhs.re),
            im: ctx.add(&self.im, &rhs.im),
        }
    }

    pub fn scale(&self, f: &BigFloat, ctx: &HpCtx) -> Self {
        HpComplex {
            re: ctx.mul(&self.re, f),
            im: ctx.mul(&self.im, f),
        }
    }

    /// e^{2π i x} for an exact rational x.
    pub fn unit(x: &Rat, ctx: &mut HpCtx) -> Self {
        let two_pi = {
            let pi = ctx.pi();
            let two = BigFloat::from_i64(2, ctx.prec);
            ctx.mul(&two, &pi)
        };
        // reduce x mod 1 first so the argument stays small
        let frac = x - Rat::from_integer(x.floor().to_integer());
        let xf = ctx.from_rat(&frac);
        let arg = ctx.mul(&two_pi, &xf);
        HpComplex {
            re: ctx.cos(&arg),
            im: ctx.sin(&arg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int;

    #[test]
    fn rational_round_trip() {
        let mut ctx = HpCtx::new(200);
        let v = Rat::new(int(1), int(3));
        let f = ctx.from_rat(&v);
        let x = ctx.to_f64(&f);
        assert!((x - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ln_and_exp_inverse() {
        let mut ctx = HpCtx::new(200);
        let v = Rat::new(int(7), int(2));
        let l = ctx.ln_rat(&v);
        let back = ctx.exp(&l);
        assert!((ctx.to_f64(&back) - 3.5).abs() < 1e-14);
    }

    #[test]
    fn unit_circle_quarter_turn() {
        let mut ctx = HpCtx::new(200);
        let z = HpComplex::unit(&Rat::new(int(1), int(4)), &mut ctx);
        assert!(ctx.to_f64(&z.re).abs() < 1e-50);
        assert!((ctx.to_f64(&z.im) - 1.0).abs() < 1e-15);
    }
}
