//! Normalized rational functions over Q.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gcd::{gcd, lcm, normalize};
use super::poly::Polynomial;

/// A quotient `num / den` of polynomials kept in canonical form: coprime,
/// denominator with graded-lex leading coefficient 1, zero stored as `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        assert_eq!(num.nvars(), den.nvars());
        if num.is_zero() {
            return Self::zero(num.nvars());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        Self::from_coprime(num, den)
    }

    /// Build from a numerator and denominator already known to be coprime.
    pub(crate) fn from_coprime(num: Polynomial, den: Polynomial) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lc.recip();
            RationalFunction {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn zero(nvars: usize) -> Self {
        RationalFunction {
            num: Polynomial::zero(nvars),
            den: Polynomial::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Polynomial::one(nvars))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let nvars = p.nvars();
        RationalFunction {
            num: p,
            den: Polynomial::one(nvars),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::from_poly(Polynomial::from_int(nvars, c))
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        Self::from_poly(Polynomial::var(nvars, var))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_constant() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn involves(&self, var: usize) -> bool {
        self.num.involves(var) || self.den.involves(var)
    }

    /// Highest-indexed variable occurring in numerator or denominator.
    pub fn max_var(&self) -> Option<usize> {
        match (self.num.max_var(), self.den.max_var()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }

    /// Whether only variables with index `<= var` occur.
    pub fn lies_in_level(&self, var: usize) -> bool {
        self.max_var().is_none_or(|m| m <= var)
    }

    /// Proper in `var`: numerator degree strictly below denominator degree.
    /// Zero is proper.
    pub fn is_proper_in(&self, var: usize) -> bool {
        self.is_zero() || self.num.degree_in(var) < self.den.degree_in(var)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::from_coprime(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        self * &Self::from_poly(p.clone())
    }

    pub fn pow(&self, k: i32) -> Self {
        if k < 0 {
            return self.inv().pow(-k);
        }
        let k = k as u32;
        RationalFunction {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
        .renormalized()
    }

    fn renormalized(self) -> Self {
        Self::from_coprime(self.num, self.den)
    }

    /// Formal partial derivative with respect to `var`.
    pub fn partial(&self, var: usize) -> Self {
        let dn = self.num.partial(var);
        let dd = self.den.partial(var);
        if dd.is_zero() {
            return Self::new(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::new(num, self.den.pow(2))
    }

    /// Substitute an image for every variable.
    pub fn substitute(&self, images: &[RationalFunction]) -> RationalFunction {
        let nvars = images
            .first()
            .map(RationalFunction::nvars)
            .unwrap_or(self.nvars());
        let zero = RationalFunction::zero(nvars);
        let one = RationalFunction::one(nvars);
        let lift = |c: &BigRational| RationalFunction::constant(nvars, c.clone());
        let n = self.num.substitute(images, zero.clone(), one.clone(), lift);
        let d = self.den.substitute(images, zero, one, lift);
        &n / &d
    }

    /// Re-embed into another variable count; variable `i` becomes `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        Self::new(self.num.remap(nvars, map), self.den.remap(nvars, map))
    }

    /// Split into a part proper in `var` and a part polynomial in `var`.
    /// The polynomial part may have a denominator free of `var`.
    pub fn split_proper_poly(&self, var: usize) -> (RationalFunction, RationalFunction) {
        if self.is_proper_in(var) {
            return (self.clone(), Self::zero(self.nvars()));
        }
        if !self.den.involves(var) {
            return (Self::zero(self.nvars()), self.clone());
        }
        let (q, r, k) = self.num.pseudo_div_rem(&self.den, var);
        let lc = self.den.lc_in(var).pow(k);
        let poly = Self::new(q, lc.clone());
        let proper = Self::new(r, &lc * &self.den);
        (proper, poly)
    }

    /// Coefficients in `var` when the denominator is free of `var`, each as a
    /// rational function free of `var`, lowest degree first.
    pub fn poly_coeffs_in(&self, var: usize) -> Option<Vec<RationalFunction>> {
        if self.den.involves(var) {
            return None;
        }
        Some(
            self.num
                .coeffs_in(var)
                .into_iter()
                .map(|c| Self::new(c, self.den.clone()))
                .collect(),
        )
    }

    /// Write `self` as `a / b` with `a` and `b` having integer coefficients,
    /// `b` having a positive leading coefficient and content 1 overall.
    pub fn integer_form(&self) -> (Polynomial, Polynomial) {
        let mut scale = BigRational::one();
        for (_, c) in self.num.terms().chain(self.den.terms()) {
            let l = num_integer::Integer::lcm(scale.numer(), c.denom());
            scale = BigRational::from_integer(l);
        }
        let n = self.num.scale(&scale);
        let d = self.den.scale(&scale);
        let mut g = BigInt::zero();
        for (_, c) in n.terms().chain(d.terms()) {
            g = num_integer::Integer::gcd(&g, c.numer());
        }
        let g = BigRational::from_integer(g).recip();
        (n.scale(&g), d.scale(&g))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &'a RationalFunction) -> RationalFunction {
        if let Some(out) = constant_shortcut(self, rhs, |a, b| a + b) {
            return out;
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_constant() || rhs.den.is_constant() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            // A constant denominator cannot share a factor with the sum.
            if num.is_zero() {
                return RationalFunction::zero(self.nvars());
            }
            return RationalFunction::from_coprime(num, &self.den * &rhs.den);
        }
        // With g = gcd(b, d), the sum a/b + c/d can only cancel against g.
        let g = gcd(&self.den, &rhs.den);
        let bp = self.den.div_exact(&g).expect("gcd divides");
        let dp = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &dp) + &(&rhs.num * &bp);
        if num.is_zero() {
            return RationalFunction::zero(self.nvars());
        }
        let den = &self.den * &dp;
        if g.is_constant() {
            return RationalFunction::from_coprime(num, den);
        }
        let h = gcd(&num, &g);
        if h.is_constant() {
            return RationalFunction::from_coprime(num, den);
        }
        RationalFunction::from_coprime(
            num.div_exact(&h).expect("gcd divides"),
            den.div_exact(&h).expect("gcd divides"),
        )
    }
}

/// Two constant operands skip gcd work.
fn constant_shortcut(
    a: &RationalFunction,
    b: &RationalFunction,
    op: impl Fn(&BigRational, &BigRational) -> BigRational,
) -> Option<RationalFunction> {
    let ca = a.constant_value()?;
    let cb = b.constant_value()?;
    Some(RationalFunction::constant(a.nvars(), op(&ca, &cb)))
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &'a RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &'a RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.nvars());
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let an = self.num.div_exact(&g1).expect("gcd divides");
        let bd = rhs.den.div_exact(&g1).expect("gcd divides");
        let bn = rhs.num.div_exact(&g2).expect("gcd divides");
        let ad = self.den.div_exact(&g2).expect("gcd divides");
        RationalFunction::from_coprime(&an * &bn, &ad * &bd)
    }
}

impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a RationalFunction) -> RationalFunction {
        self * &rhs.inv()
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: &'a RationalFunction) -> RationalFunction {
                (&self).$m(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

/// Least common multiple of the denominators of `items`.
pub fn common_denominator<'a, I>(nvars: usize, items: I) -> Polynomial
where
    I: IntoIterator<Item = &'a RationalFunction>,
{
    let mut l = Polynomial::one(nvars);
    for f in items {
        if !f.den().is_constant() {
            l = lcm(&l, f.den());
        }
    }
    normalize(&l)
}
