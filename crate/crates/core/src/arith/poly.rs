//! Sparse distributed polynomials over Q.
//!
//! Variable 0 is `x`; variables `1..nvars` are the tower generators. Terms are
//! kept in a `BTreeMap` keyed by exponent vectors ordered graded-lex with the
//! highest-indexed variable most significant, so the last entry is always the
//! leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector of a single term.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponents(Vec<u32>);

impl Exponents {
    pub fn zero(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Exponents(e)
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        Exponents(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, var: usize) -> u32 {
        self.0[var]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if every exponent of `other` is at most the one in `self`.
    fn checked_div(&self, other: &Exponents) -> Option<Exponents> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Exponents(out))
    }

    fn with(&self, var: usize, e: u32) -> Exponents {
        let mut v = self.0.clone();
        v[var] = e;
        Exponents(v)
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A multivariate polynomial with rational coefficients.
///
/// No zero coefficient is ever stored; the zero polynomial has no terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Exponents::zero(nvars), c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    /// The polynomial consisting of the single variable `var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        assert!(
            var < nvars,
            "variable {var} out of range for {nvars} variables"
        );
        let mut p = Self::zero(nvars);
        p.terms
            .insert(Exponents::unit(nvars, var), BigRational::one());
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: BigRational) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Exponents(exps), c);
        }
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.0.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(e, c)| e.is_zero() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().is_some_and(Exponents::is_zero),
            _ => false,
        }
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    /// Leading term under graded-lex.
    pub fn leading_term(&self) -> Option<(&Exponents, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e.0[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Exponents::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e.0[var] > 0)
    }

    /// Highest-indexed variable occurring in the polynomial.
    pub fn max_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.involves(v))
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    /// Scale so the graded-lex leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
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

    /// Formal partial derivative.
    pub fn partial(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[var];
            if k > 0 {
                let c = c * BigRational::from_integer(BigInt::from(k));
                out.add_term(e.with(var, k - 1), c);
            }
        }
        out
    }

    /// Coefficients with respect to `var`, lowest degree first. Each coefficient
    /// is free of `var`.
    pub fn coeffs_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Polynomial::zero(self.nvars); deg + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (e, c) in &self.terms {
            let k = e.0[var] as usize;
            out[k].terms.insert(e.with(var, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(nvars: usize, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut out = Polynomial::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, v) in &c.terms {
                debug_assert_eq!(e.0[var], 0);
                out.add_term(e.with(var, k as u32), v.clone());
            }
        }
        out
    }

    /// Leading coefficient as a polynomial in `var`.
    pub fn lc_in(&self, var: usize) -> Polynomial {
        let deg = self.degree_in(var);
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.0[var] == deg {
                out.terms.insert(e.with(var, 0), c.clone());
            }
        }
        out
    }

    /// `self * var^k`.
    pub fn shift(&self, var: usize, k: u32) -> Polynomial {
        if k == 0 {
            return self.clone();
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.with(var, e.0[var] + k), c.clone()))
                .collect(),
        }
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Polynomial) -> Option<Polynomial> {
        assert!(!other.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(self.clone());
        }
        if let Some(c) = other.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lt_e, lt_c) = other.leading_term().expect("nonzero");
        let lt_e = lt_e.clone();
        let lt_c_inv = lt_c.recip();
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while let Some((e, c)) = rem.leading_term() {
            let qe = e.checked_div(&lt_e)?;
            let qc = c * &lt_c_inv;
            for (oe, oc) in &other.terms {
                rem.add_term(oe.mul(&qe), -(oc * &qc));
            }
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    /// Pseudo-division with respect to `var`: returns `(q, r, k)` such that
    /// `lc(b)^k * self = q * b + r` with `deg_var r < deg_var b`.
    pub fn pseudo_div_rem(&self, b: &Polynomial, var: usize) -> (Polynomial, Polynomial, u32) {
        assert!(!b.is_zero());
        let db = b.degree_in(var);
        let lcb = b.lc_in(var);
        let mut r = self.clone();
        let mut q = Polynomial::zero(self.nvars);
        let mut k = 0;
        while !r.is_zero() && r.degree_in(var) >= db {
            let dr = r.degree_in(var);
            let t = r.lc_in(var).shift(var, dr - db);
            q = &(&q * &lcb) + &t;
            r = &(&r * &lcb) - &(&t * b);
            k += 1;
        }
        (q, r, k)
    }

    /// Evaluate with every variable replaced by the given image.
    pub fn substitute<T, F>(&self, images: &[T], zero: T, one: T, lift: F) -> T
    where
        T: Clone,
        for<'a> &'a T: Add<&'a T, Output = T> + Mul<&'a T, Output = T>,
        F: Fn(&BigRational) -> T,
    {
        assert_eq!(images.len(), self.nvars);
        let mut powers: Vec<Vec<T>> = images
            .iter()
            .map(|i| vec![one.clone(), i.clone()])
            .collect();
        let mut acc = zero;
        for (e, c) in &self.terms {
            let mut term = lift(c);
            for (v, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[v].len() <= k as usize {
                    let next = powers[v].last().expect("seeded") * &images[v];
                    powers[v].push(next);
                }
                term = &term * &powers[v][k as usize];
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Re-embed into a ring with a different number of variables; variable `i`
    /// maps to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Polynomial {
        assert_eq!(map.len(), self.nvars);
        let mut out = Polynomial::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    ne[map[i]] += k;
                }
            }
            out.add_term(Exponents(ne), c.clone());
        }
        out
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients with a positive leading coefficient.
    pub fn rational_content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return BigRational::one();
        }
        let mut content = BigRational::new(num, den);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        content
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (v, k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*v{v}")?,
                    _ => write!(f, "*v{v}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ambient variable count mismatch");
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (e, c) in &small.terms {
            big.add_term(e.clone(), c.clone());
        }
        big
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ambient variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "ambient variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.mul(eb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn grlex_puts_highest_variable_first() {
        let a = Exponents(vec![2, 0]);
        let b = Exponents(vec![0, 1]);
        let c = Exponents(vec![1, 1]);
        assert!(a > b);
        assert!(c > a);
        assert!(Exponents(vec![0, 2]) > Exponents(vec![2, 0]));
    }

    #[test]
    fn exact_division() {
        let x = Polynomial::var(2, 0);
        let t = Polynomial::var(2, 1);
        let a = &(&t - &x) * &(&t + &x);
        let b = &t - &x;
        assert_eq!(a.div_exact(&b), Some(&t + &x));
        assert_eq!(a.div_exact(&(&t + &Polynomial::one(2))), None);
    }

    #[test]
    fn pseudo_division_identity() {
        let x = Polynomial::var(2, 0);
        let t = Polynomial::var(2, 1);
        let a = &(&t.pow(3) * &x) + &Polynomial::one(2);
        let b = &(&x.scale(&q(2)) * &t) - &Polynomial::one(2);
        let (qq, r, k) = a.pseudo_div_rem(&b, 1);
        let lhs = &b.lc_in(1).pow(k) * &a;
        assert_eq!(lhs, &(&qq * &b) + &r);
        assert!(r.degree_in(1) < b.degree_in(1));
    }

    #[test]
    fn coefficient_views_round_trip() {
        let x = Polynomial::var(3, 0);
        let t = Polynomial::var(3, 2);
        let p = &(&t.pow(2) * &x) + &(&t + &x.pow(3));
        let cs = p.coeffs_in(2);
        assert_eq!(cs.len(), 3);
        assert_eq!(Polynomial::from_coeffs_in(3, 2, &cs), p);
        assert_eq!(p.lc_in(2), x);
    }

    #[test]
    fn partials_and_content() {
        let x = Polynomial::var(1, 0);
        let p = &x.pow(3).scale(&BigRational::new(3.into(), 2.into())) - &x.scale(&q(6));
        assert_eq!(
            p.partial(0),
            &x.pow(2).scale(&BigRational::new(9.into(), 2.into())) - &Polynomial::from_int(1, 6)
        );
        assert_eq!(p.rational_content(), BigRational::new(3.into(), 2.into()));
    }
}
