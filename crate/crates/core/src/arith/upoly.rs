//! Univariate polynomials in one tower variable whose coefficients are
//! rational functions in the lower variables.

use std::ops::{Add, Mul, Neg, Sub};

use super::poly::Polynomial;
use super::ratfun::{common_denominator, RationalFunction};

/// Dense univariate polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    nvars: usize,
    coeffs: Vec<RationalFunction>,
}

impl UniPoly {
    pub fn zero(nvars: usize) -> Self {
        UniPoly {
            nvars,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: RationalFunction) -> Self {
        Self::from_coeffs(c.nvars(), vec![c])
    }

    pub fn from_coeffs(nvars: usize, coeffs: Vec<RationalFunction>) -> Self {
        let mut p = UniPoly { nvars, coeffs };
        p.trim();
        p
    }

    /// `x^k` with unit coefficient.
    pub fn monomial(nvars: usize, k: usize, c: RationalFunction) -> Self {
        let mut coeffs = vec![RationalFunction::zero(nvars); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(nvars, coeffs)
    }

    /// View a rational function whose denominator is free of `var` as a
    /// polynomial in `var`.
    pub fn from_rf(f: &RationalFunction, var: usize) -> Option<Self> {
        Some(Self::from_coeffs(f.nvars(), f.poly_coeffs_in(var)?))
    }

    pub fn to_rf(&self, var: usize) -> RationalFunction {
        // Each coefficient is reduced, so the numerator over the lcm of their
        // denominators shares no factor with it.
        let den = common_denominator(self.nvars, self.coeffs.iter());
        let t = Polynomial::var(self.nvars, var);
        let mut num = Polynomial::zero(self.nvars);
        for c in self.coeffs.iter().rev() {
            let scaled = c.num() * &den.div_exact(c.den()).expect("lcm");
            num = &(&num * &t) + &scaled;
        }
        RationalFunction::from_coprime(num, den)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(RationalFunction::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> RationalFunction {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(self.nvars))
    }

    pub fn leading_coeff(&self) -> RationalFunction {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(self.nvars))
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        Self::from_coeffs(self.nvars, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading_coeff().inv())
    }

    /// Formal derivative in the main variable.
    pub fn formal_derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&num_rational::BigRational::from_integer(k.into())))
            .collect();
        Self::from_coeffs(self.nvars, coeffs)
    }

    pub fn div_rem(&self, b: &UniPoly) -> (UniPoly, UniPoly) {
        let db = b.degree().expect("division by zero polynomial");
        let lc_inv = b.leading_coeff().inv();
        let mut r = self.clone();
        let mut q = vec![RationalFunction::zero(self.nvars); self.coeffs.len().saturating_sub(db)];
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let c = &r.coeffs[dr] * &lc_inv;
            for (k, bk) in b.coeffs.iter().enumerate() {
                let idx = k + dr - db;
                r.coeffs[idx] = &r.coeffs[idx] - &(bk * &c);
            }
            r.coeffs[dr] = RationalFunction::zero(self.nvars);
            r.trim();
            q[dr - db] = c;
        }
        (UniPoly::from_coeffs(self.nvars, q), r)
    }

    pub fn rem(&self, b: &UniPoly) -> UniPoly {
        self.div_rem(b).1
    }

    /// Monic gcd.
    pub fn gcd(&self, b: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended Euclid: returns `(g, s)` with `g` monic gcd and `s * self ≡ g`
    /// modulo `b`.
    pub fn half_gcdex(&self, b: &UniPoly) -> (UniPoly, UniPoly) {
        let n = self.nvars;
        let (mut a0, mut a1) = (self.clone(), b.clone());
        let (mut s0, mut s1) = (
            UniPoly::constant(RationalFunction::one(n)),
            UniPoly::zero(n),
        );
        while !a1.is_zero() {
            let (q, r) = a0.div_rem(&a1);
            let s2 = &s0 - &(&q * &s1);
            a0 = a1;
            a1 = r;
            s0 = s1;
            s1 = s2;
        }
        if a0.is_zero() {
            return (a0, s0);
        }
        let inv = a0.leading_coeff().inv();
        (a0.scale(&inv), s0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, when they are coprime.
    pub fn inverse_mod(&self, m: &UniPoly) -> Option<UniPoly> {
        let (g, s) = self.half_gcdex(m);
        if g.degree() == Some(0) {
            Some(s.rem(m))
        } else {
            None
        }
    }

    /// Solve `s * self + t * b = c` with `deg s < deg b`, assuming
    /// `gcd(self, b) = 1`. Returns `(s, t)`.
    pub fn solve_diophantine(&self, b: &UniPoly, c: &UniPoly) -> (UniPoly, UniPoly) {
        let (g, s0) = self.half_gcdex(b);
        assert_eq!(
            g.degree(),
            Some(0),
            "diophantine equation with non-coprime moduli"
        );
        let s = (&s0 * c).rem(b);
        let (t, r) = (c - &(&s * self)).div_rem(b);
        debug_assert!(r.is_zero());
        (s, t)
    }
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &'a UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect();
        UniPoly::from_coeffs(self.nvars, coeffs)
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &'a UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect();
        UniPoly::from_coeffs(self.nvars, coeffs)
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &'a UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(self.nvars);
        }
        let mut coeffs =
            vec![RationalFunction::zero(self.nvars); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        UniPoly::from_coeffs(self.nvars, coeffs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::from_coeffs(self.nvars, self.coeffs.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: usize, k: i64) -> RationalFunction {
        RationalFunction::from_int(n, k)
    }

    #[test]
    fn division_and_gcd() {
        let n = 2;
        let x = RationalFunction::var(n, 0);
        // (t - x)(t + 1) and (t - x)(t - 2)
        let a = UniPoly::from_coeffs(n, vec![-&x, &rf(n, 1) - &x, rf(n, 1)]);
        let b = UniPoly::from_coeffs(n, vec![&x * &rf(n, 2), &rf(n, -2) - &x, rf(n, 1)]);
        let g = a.gcd(&b);
        assert_eq!(g, UniPoly::from_coeffs(n, vec![-&x, rf(n, 1)]));
        let (q, r) = a.div_rem(&g);
        assert!(r.is_zero());
        assert_eq!(&q * &g, a);
    }

    #[test]
    fn diophantine_solution() {
        let n = 2;
        let x = RationalFunction::var(n, 0);
        let a = UniPoly::from_coeffs(n, vec![x.clone(), rf(n, 1)]);
        let b = UniPoly::from_coeffs(n, vec![rf(n, 0), rf(n, 0), rf(n, 1)]);
        let c = UniPoly::from_coeffs(n, vec![rf(n, 1), x.clone(), rf(n, 3)]);
        let (s, t) = a.solve_diophantine(&b, &c);
        assert!(s.degree().unwrap_or(0) < 2);
        assert_eq!(&(&s * &a) + &(&t * &b), c);
    }

    #[test]
    fn round_trip_through_rational_function() {
        let n = 2;
        let x = RationalFunction::var(n, 0);
        let p = UniPoly::from_coeffs(n, vec![x.inv(), rf(n, 0), x.clone()]);
        let f = p.to_rf(1);
        assert_eq!(UniPoly::from_rf(&f, 1), Some(p));
    }
}
