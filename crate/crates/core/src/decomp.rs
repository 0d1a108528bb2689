//! Additive decomposition `f = g′ + r` in an S-primitive tower, where `r` is
//! a remainder: minimal in its coset modulo derivatives.

use thiserror::Error;

use crate::arith::{constant_combination, Rational, RationalFunction};
use crate::hermite::{hermite_reduce_proper, HermiteError};
use crate::matryoshka::{
    head_data, head_data_of, indicator, is_simple, is_t_simple, project, OrderKey,
};
use crate::tower::Tower;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompError {
    #[error("tower is not S-primitive")]
    TowerNotSPrimitive,
    #[error(transparent)]
    Hermite(#[from] HermiteError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// `input = g′ + r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub input: RationalFunction,
    pub g: RationalFunction,
    pub r: RationalFunction,
}

/// Constants `c` with `h = Σ c_j basis_j`, if they exist.
pub fn solve_constant_combination(
    h: &RationalFunction,
    basis: &[RationalFunction],
) -> Option<Vec<Rational>> {
    constant_combination(h, basis)
}

fn require_s_primitive(tower: &Tower) -> Result<(), DecompError> {
    if tower.is_s_primitive() {
        Ok(())
    } else {
        Err(DecompError::TowerNotSPrimitive)
    }
}

fn key_of(tower: &Tower, f: &RationalFunction, hm: crate::matryoshka::HeadMonomial) -> OrderKey {
    let n = tower.len();
    OrderKey {
        den_degree: if n == 0 { 0 } else { f.den().degree_in(n) },
        hm,
    }
}

/// Decompose `f` as `g′ + r` with `r` a remainder.
pub fn add_decomp_in_field(
    tower: &Tower,
    f: &RationalFunction,
) -> Result<Decomposition, DecompError> {
    require_s_primitive(tower)?;
    let n = tower.len();
    let nvars = tower.nvars();
    let zero = RationalFunction::zero(nvars);
    let mut g = zero.clone();
    let mut r = zero.clone();
    let mut current = f.clone();
    let mut last_key: Option<OrderKey> = None;
    while !current.is_zero() {
        let layers = project(tower, &current);
        let head = head_data_of(&layers);
        let key = key_of(tower, &current, head.hm.clone());
        if let Some(prev) = &last_key {
            if key >= *prev {
                return Err(DecompError::Internal(format!(
                    "order did not descend: {key:?} after {prev:?}"
                )));
            }
        }
        last_key = Some(key);
        let mono = head.hm.expect("nonzero element has a head monomial");
        let m = indicator(&mono);
        let d = if mono.is_unit() { 0 } else { mono.exponent(m) };
        let basis = tower.derivatives_upto(m);

        let mut b = zero.clone();
        let mut c_top = Rational::from_integer(0.into());
        let mut to_remainder = zero.clone();
        let mut unabsorbed = zero.clone();
        let mut absorb = |coeffs: Vec<Rational>, b: &mut RationalFunction| {
            for (j, c) in coeffs.iter().enumerate().take(m.saturating_sub(1)) {
                *b = &*b + &tower.var(j + 1).scale(c);
            }
            if m >= 1 {
                c_top += &coeffs[m - 1];
            }
        };
        for &i in &head.index_set {
            let (bi, hi) = hermite_reduce_proper(tower, &head.hc_i[i], i)?;
            b = &b + &bi;
            if hi.is_zero() {
                continue;
            }
            if i == n {
                to_remainder = &to_remainder + &hi;
                continue;
            }
            match constant_combination(&hi, &basis) {
                Some(coeffs) => absorb(coeffs, &mut b),
                None => unabsorbed = &unabsorbed + &hi,
            }
        }
        if !unabsorbed.is_zero() {
            match constant_combination(&unabsorbed, &basis) {
                Some(coeffs) => absorb(coeffs, &mut b),
                None => to_remainder = &to_remainder + &unabsorbed,
            }
        }

        let mono_rf = mono.to_rf();
        let mut step_g = &b * &mono_rf;
        if m >= 1 && c_top != Rational::from_integer(0.into()) {
            let scale = &c_top / Rational::from_integer((d + 1).into());
            step_g = &step_g + &(&tower.var(m) * &mono_rf).scale(&scale);
        }
        let step_r = &to_remainder * &mono_rf;
        current = &(&current - &tower.differentiate(&step_g)) - &step_r;
        g = &g + &step_g;
        r = &r + &step_r;
    }
    if &tower.differentiate(&g) + &r != *f {
        return Err(DecompError::Internal(
            "decomposition does not differentiate back to its input".into(),
        ));
    }
    Ok(Decomposition {
        input: f.clone(),
        g,
        r,
    })
}

/// Why a candidate fails the sufficient remainder conditions.
#[derive(Clone, Debug, PartialEq)]
pub enum NotRemainder {
    TopProjectionNotSimple,
    HeadCoefficientNotSimple,
    /// The head coefficient of `r − π_n(r)` is this nonzero combination of
    /// `t_1′, …, t_m′`.
    HeadCoefficientInSpan(Vec<Rational>),
}

/// Check the sufficient conditions for `r` to be a remainder.
pub fn is_remainder(
    tower: &Tower,
    r: &RationalFunction,
) -> Result<Result<(), NotRemainder>, DecompError> {
    require_s_primitive(tower)?;
    if r.is_zero() {
        return Ok(Ok(()));
    }
    let n = tower.len();
    let layers = project(tower, r);
    let top = layers.projection(n);
    if !is_t_simple(&top, n) {
        return Ok(Err(NotRemainder::TopProjectionNotSimple));
    }
    let rest = r - &top;
    let hc = head_data(tower, &rest).hc;
    if !is_simple(tower, &hc) {
        return Ok(Err(NotRemainder::HeadCoefficientNotSimple));
    }
    if !hc.is_zero() {
        let hm = head_data_of(&layers).hm.expect("nonzero");
        let basis = tower.derivatives_upto(indicator(&hm));
        if let Some(coeffs) = constant_combination(&hc, &basis) {
            return Ok(Err(NotRemainder::HeadCoefficientInSpan(coeffs)));
        }
    }
    Ok(Ok(()))
}

/// Outcome of in-field integration.
#[derive(Clone, Debug, PartialEq)]
pub enum InFieldIntegral {
    Integrable(RationalFunction),
    /// No antiderivative in the tower; the nonzero remainder certifies it.
    NotIntegrable {
        remainder: RationalFunction,
    },
}

pub fn integrate_in_field(
    tower: &Tower,
    f: &RationalFunction,
) -> Result<InFieldIntegral, DecompError> {
    let dec = add_decomp_in_field(tower, f)?;
    Ok(if dec.r.is_zero() {
        InFieldIntegral::Integrable(dec.g)
    } else {
        InFieldIntegral::NotIntegrable { remainder: dec.r }
    })
}
