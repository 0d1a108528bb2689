//! Hermite reduction with respect to one primitive generator of a tower.
//!
//! Level `i ≥ 1` works in `K_{i-1}(t_i)`; level 0 works in Q(x) with the
//! usual derivation and also integrates polynomial parts.

use thiserror::Error;

use crate::arith::gcd::squarefree_decomposition;
use crate::arith::{Rational, RationalFunction, UniPoly};
use crate::matryoshka::is_t_simple;
use crate::tower::Tower;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HermiteError {
    #[error("input is not proper in generator {0}")]
    NotProper(usize),
    #[error("input involves generators above level {0}")]
    HigherGeneratorPresent(usize),
    #[error("internal error: reduction at level {0} produced a non-simple part")]
    NonSimpleOutput(usize),
}

/// `f = g′ + h` with `h` simple at `level`; for `level ≥ 1`, `f` must be
/// proper in `t_level` and free of higher generators, and then `g` is proper
/// too. At level 0 any element of Q(x) is accepted.
pub fn hermite_reduce_proper(
    tower: &Tower,
    f: &RationalFunction,
    level: usize,
) -> Result<(RationalFunction, RationalFunction), HermiteError> {
    let nvars = tower.nvars();
    if !f.lies_in_level(level) {
        return Err(if level == 0 {
            HermiteError::HigherGeneratorPresent(0)
        } else {
            HermiteError::NotProper(level)
        });
    }
    if f.is_zero() {
        return Ok((f.clone(), f.clone()));
    }
    let (proper, poly) = f.split_proper_poly(level);
    let mut g = RationalFunction::zero(nvars);
    if !poly.is_zero() {
        if level != 0 {
            return Err(HermiteError::NotProper(level));
        }
        g = integrate_polynomial_in_x(&poly);
    }
    let (gr, h) = reduce(tower, &proper, level);
    g = &g + &gr;
    if !is_t_simple(&h, level) {
        return Err(HermiteError::NonSimpleOutput(level));
    }
    debug_assert_eq!(&tower.differentiate(&g) + &h, *f);
    Ok((g, h))
}

/// Hermitian part: `f = g′ + h + p` with `h` simple and `p` polynomial in
/// `t_level`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPart {
    pub h: RationalFunction,
    pub g: RationalFunction,
    pub p: RationalFunction,
}

pub fn hermitian_part(
    tower: &Tower,
    f: &RationalFunction,
    level: usize,
) -> Result<HermitianPart, HermiteError> {
    if !f.lies_in_level(level) {
        return Err(HermiteError::HigherGeneratorPresent(level));
    }
    let (proper, p) = f.split_proper_poly(level);
    let (g, h) = hermite_reduce_proper(tower, &proper, level)?;
    Ok(HermitianPart { h, g, p })
}

fn integrate_polynomial_in_x(p: &RationalFunction) -> RationalFunction {
    let nvars = p.nvars();
    let coeffs = p.poly_coeffs_in(0).expect("polynomial in x");
    let mut acc = RationalFunction::zero(nvars);
    let x = RationalFunction::var(nvars, 0);
    for (k, c) in coeffs.iter().enumerate().rev() {
        let k1 = Rational::from_integer((k + 1).into());
        acc = &(&acc + &c.scale(&k1.recip())) * &x;
    }
    acc
}

/// Quadratic Hermite reduction of a proper fraction over the squarefree
/// decomposition of its denominator.
fn reduce(
    tower: &Tower,
    f: &RationalFunction,
    level: usize,
) -> (RationalFunction, RationalFunction) {
    let nvars = tower.nvars();
    let zero = RationalFunction::zero(nvars);
    if f.is_zero() {
        return (zero.clone(), zero);
    }
    let factors = squarefree_decomposition(f.den(), level);
    if factors.iter().all(|(_, k)| *k == 1) {
        return (zero, f.clone());
    }
    let as_uni = |p: &crate::arith::Polynomial| {
        UniPoly::from_rf(&RationalFunction::from_poly(p.clone()), level).expect("polynomial")
    };
    // Everything of the denominator free of t_level moves into the numerator.
    let mut product = crate::arith::Polynomial::one(nvars);
    for (d, k) in &factors {
        product = &product * &d.pow(*k);
    }
    let unit = f
        .den()
        .div_exact(&product)
        .expect("squarefree factors divide");
    let mut a = UniPoly::from_rf(&RationalFunction::new(f.num().clone(), unit), level)
        .expect("numerator over a unit");
    let mut dd = as_uni(&product);
    let mut g = zero;
    for (d, k) in &factors {
        let k = *k as usize;
        if k < 2 {
            continue;
        }
        let v = as_uni(d);
        let v_rf = RationalFunction::from_poly(d.clone());
        let mut vk = UniPoly::constant(RationalFunction::one(nvars));
        for _ in 0..k {
            vk = &vk * &v;
        }
        let (u, rem) = dd.div_rem(&vk);
        debug_assert!(rem.is_zero());
        let uv = &u * &tower.derive_unipoly(&v, level);
        // Numerator of the g contribution over v^(k-1).
        let mut acc = UniPoly::zero(nvars);
        let mut vpow = UniPoly::constant(RationalFunction::one(nvars));
        for j in (1..k).rev() {
            let jq = Rational::from_integer(j.into());
            let rhs = a.scale(&RationalFunction::constant(nvars, -jq.recip()));
            let (b, c) = uv.solve_diophantine(&v, &rhs);
            acc = &acc + &(&b * &vpow);
            vpow = &vpow * &v;
            let jc = c.scale(&RationalFunction::constant(nvars, -jq));
            a = &jc - &(&u * &tower.derive_unipoly(&b, level));
        }
        let part = &acc.to_rf(level) / &v_rf.pow(k as i32 - 1);
        g = &g + &part;
        dd = &u * &v;
    }
    let h = &a.to_rf(level) / &dd.to_rf(level);
    (g, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::examples;

    #[test]
    fn reduction_examples() {
        let tower = examples::li_tower();
        let p = |s| tower.parse(s).unwrap();
        let (g, h) = hermite_reduce_proper(&tower, &p("1/t1^2"), 1).unwrap();
        assert_eq!((g, h), (p("-x/t1"), p("1/t1")));
        let (g, h) = hermite_reduce_proper(&tower, &p("1/x^2"), 0).unwrap();
        assert_eq!((g, h), (p("-1/x"), p("0")));
        let f = p("1/(t1*t2)");
        assert_eq!(hermite_reduce_proper(&tower, &f, 2).unwrap(), (p("0"), f));
    }

    #[test]
    fn level_zero_integrates_polynomials() {
        let tower = examples::li_tower();
        let p = |s| tower.parse(s).unwrap();
        let (g, h) = hermite_reduce_proper(&tower, &p("3*x^2 + 1/x + 1/(x+1)^3"), 0).unwrap();
        assert_eq!(g, p("x^3 - 1/(2*(x+1)^2)"));
        assert_eq!(h, p("1/x"));
    }

    #[test]
    fn precondition_errors() {
        let tower = examples::li_tower();
        let p = |s| tower.parse(s).unwrap();
        assert_eq!(
            hermite_reduce_proper(&tower, &p("t1"), 1),
            Err(HermiteError::NotProper(1))
        );
        assert_eq!(
            hermite_reduce_proper(&tower, &p("1/t2"), 1),
            Err(HermiteError::NotProper(1))
        );
        assert_eq!(
            hermitian_part(&tower, &p("t3"), 2),
            Err(HermiteError::HigherGeneratorPresent(2))
        );
    }

    #[test]
    fn hermitian_parts() {
        let tower = examples::li_tower();
        let p = |s| tower.parse(s).unwrap();
        let hp = hermitian_part(&tower, &p("1/t2^2 + t2"), 2).unwrap();
        assert_eq!(hp.h, p("1/(x*t2)"));
        assert_eq!(hp.g, p("-t1/t2"));
        assert_eq!(hp.p, p("t2"));
        let s = p("1/(t1*t2)");
        let hp = hermitian_part(&tower, &s, 2).unwrap();
        assert_eq!((hp.h, hp.g.is_zero(), hp.p.is_zero()), (s, true, true));
        let low = p("x/t1");
        let hp = hermitian_part(&tower, &low, 2).unwrap();
        assert_eq!((hp.h.is_zero(), hp.g.is_zero(), hp.p), (true, true, low));
    }
}
