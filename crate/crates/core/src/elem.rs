//! Elementary integrability: `f` has an elementary integral over an
//! S-primitive tower iff its remainder is a constant combination of the
//! generator derivatives plus a constant combination of logarithmic
//! derivatives.
//!
//! Logarithmic parts are found by residues. At each level the residues of a
//! simple fraction `a/q` are the values of `ρ = a·D(q)⁻¹ mod q` at the roots of
//! `q`; they are all constant iff `Δ(ρ) = ρ^D − ρ_t·q^D·q_t⁻¹ ≡ 0 mod q`, a
//! condition linear over Q. Solving these conditions jointly over all levels
//! determines the span coefficients; the residues themselves are then the
//! roots of the characteristic polynomial of multiplication by `ρ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::gcd::{lcm, primitive_part_in};
use crate::arith::{LinearSystem, Polynomial, Rational, RationalFunction, UniPoly};
use crate::decomp::{add_decomp_in_field, DecompError};
use crate::matryoshka::{head_data_of, is_t_simple, project, Monomial};
use crate::tower::Tower;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElemError {
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("input is not simple at level {0}")]
    NotSimple(usize),
    #[error("internal error: {0}")]
    Internal(String),
}

/// `Σ c_k log(g_k)` as `(c_k, g_k)` pairs.
pub type LogWitness = Vec<(Rational, RationalFunction)>;

#[derive(Clone, Debug, PartialEq)]
pub enum NotElementary {
    /// The remainder has a head monomial above 1, which no combination of
    /// derivatives and logarithmic derivatives can produce.
    HeadMonomial(Monomial),
    /// Every admissible choice leaves a residue at `level` that is not
    /// constant; `coefficient` is a non-constant coefficient of the monic
    /// polynomial whose roots are those residues.
    NonConstantResidue {
        level: usize,
        residue_polynomial: Vec<RationalFunction>,
        coefficient: RationalFunction,
    },
    /// Each level alone admits constant residues, but no single combination
    /// of generator derivatives works for all levels at once.
    SpanObstruction,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Undecided {
    /// Constant residues that are not all rational.
    IrrationalResidues {
        level: usize,
        residue_polynomial: Vec<Rational>,
    },
    /// Rational root search skipped because of coefficient size.
    ResidueSearchTooLarge { level: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ElementaryVerdict {
    /// `∫ f = rational_part + Σ c_k log g_k`, where `rational_part` already
    /// includes `Σ span_coeffs_j t_j`.
    Yes {
        witness: LogWitness,
        span_coeffs: Vec<Rational>,
        rational_part: RationalFunction,
    },
    No(NotElementary),
    Undecided(Undecided),
}

/// Result of recognizing a simple fraction as a logarithmic derivative
/// combination.
#[derive(Clone, Debug, PartialEq)]
pub enum LogCombination {
    Witness(LogWitness),
    NonConstantResidue {
        residue_polynomial: Vec<RationalFunction>,
        coefficient: RationalFunction,
    },
    Undecided(Undecided),
}

/// Decide whether `f` has an elementary integral over the tower.
pub fn elementary_integrability(
    tower: &Tower,
    f: &RationalFunction,
) -> Result<ElementaryVerdict, ElemError> {
    let n = tower.len();
    let dec = add_decomp_in_field(tower, f)?;
    let r = &dec.r;
    let zeros = vec![Rational::zero(); n];
    if r.is_zero() {
        return Ok(ElementaryVerdict::Yes {
            witness: Vec::new(),
            span_coeffs: zeros,
            rational_part: dec.g,
        });
    }
    let r_layers = project(tower, r);
    let hm = head_data_of(&r_layers).hm.expect("nonzero remainder");
    if !hm.is_unit() {
        return Ok(ElementaryVerdict::No(NotElementary::HeadMonomial(hm)));
    }

    let unit = Monomial::unit(n);
    let d_layers: Vec<_> = (1..=n)
        .map(|j| project(tower, tower.derivative(j)))
        .collect();
    let level_part = |m: &crate::matryoshka::Matryoshka, level: usize| {
        m.layer(level)
            .get(&unit)
            .cloned()
            .unwrap_or_else(|| tower.zero())
    };

    let mut system = LinearSystem::new(n);
    // Parts of t_j′ on non-unit monomials must cancel.
    let off_unit: Vec<(usize, RationalFunction)> = (0..n)
        .map(|j| {
            let unit_sum = (0..=n).fold(tower.zero(), |acc, l| &acc + &level_part(&d_layers[j], l));
            (j, tower.derivative(j + 1) - &unit_sum)
        })
        .filter(|(_, e)| !e.is_zero())
        .collect();
    if !off_unit.is_empty() {
        system.add_identity(&tower.zero(), &off_unit);
    }
    let mut level_conditions = Vec::new();
    for level in 1..=n {
        let r_part = level_part(&r_layers, level);
        let parts: Vec<(usize, RationalFunction)> = (0..n)
            .map(|j| (j, level_part(&d_layers[j], level)))
            .filter(|(_, e)| !e.is_zero())
            .collect();
        if r_part.is_zero() && parts.is_empty() {
            continue;
        }
        let ctx = LevelContext::new(tower, level, parts.iter().map(|p| &p.1).chain([&r_part]));
        let target = ctx.residue_defect(&r_part);
        let terms: Vec<(usize, UniPoly)> = parts
            .iter()
            .map(|(j, e)| (*j, ctx.residue_defect(e)))
            .collect();
        let mut single = LinearSystem::new(n);
        for k in 0..ctx.degree() {
            let row: Vec<(usize, RationalFunction)> =
                terms.iter().map(|(j, p)| (*j, p.coeff(k))).collect();
            system.add_identity(&target.coeff(k), &row);
            single.add_identity(&target.coeff(k), &row);
        }
        level_conditions.push((level, single, r_part));
    }

    let Some(span_coeffs) = system.solve() else {
        for (level, single, r_part) in &level_conditions {
            if single.solve().is_none() {
                let (residue_polynomial, coefficient) =
                    non_constant_residue(tower, r_part, *level)?;
                return Ok(ElementaryVerdict::No(NotElementary::NonConstantResidue {
                    level: *level,
                    residue_polynomial,
                    coefficient,
                }));
            }
        }
        return Ok(ElementaryVerdict::No(NotElementary::SpanObstruction));
    };

    let mut rest = r.clone();
    let mut rational_part = dec.g.clone();
    for (j, c) in span_coeffs.iter().enumerate() {
        if !c.is_zero() {
            rest = &rest - &tower.derivative(j + 1).scale(c);
            rational_part = &rational_part + &tower.var(j + 1).scale(c);
        }
    }
    let rest_layers = project(tower, &rest);
    let mut witness = Vec::new();
    for level in 0..=n {
        let part = level_part(&rest_layers, level);
        match recognize_log_derivative_combo(tower, &part, level)? {
            LogCombination::Witness(w) => witness.extend(w),
            LogCombination::Undecided(u) => return Ok(ElementaryVerdict::Undecided(u)),
            LogCombination::NonConstantResidue { .. } => {
                return Err(ElemError::Internal(format!(
                    "residues at level {level} not constant after solving for them"
                )))
            }
        }
    }
    let check = witness.iter().fold(rest.clone(), |acc, (c, g)| {
        &acc - &(&tower.differentiate(g) / g).scale(c)
    });
    if !check.is_zero() {
        return Err(ElemError::Internal(
            "logarithmic witness does not verify".into(),
        ));
    }
    Ok(ElementaryVerdict::Yes {
        witness,
        span_coeffs,
        rational_part,
    })
}

/// Write a simple fraction at `level` as `Σ c_k g_k′/g_k` with rational `c_k`.
pub fn recognize_log_derivative_combo(
    tower: &Tower,
    h: &RationalFunction,
    level: usize,
) -> Result<LogCombination, ElemError> {
    if h.is_zero() {
        return Ok(LogCombination::Witness(Vec::new()));
    }
    if !h.lies_in_level(level) || !is_t_simple(h, level) {
        return Err(ElemError::NotSimple(level));
    }
    let ctx = LevelContext::new(tower, level, [h]);
    let rho = ctx.residue_function(h);
    let residue_poly = ctx.char_poly(&rho);
    let mut rational = Vec::with_capacity(residue_poly.len());
    for c in &residue_poly {
        match c.constant_value() {
            Some(v) => rational.push(v),
            None => {
                let coefficient = first_non_constant(tower, &residue_poly).ok_or_else(|| {
                    ElemError::Internal("non-constant residues without witness".into())
                })?;
                return Ok(LogCombination::NonConstantResidue {
                    residue_polynomial: residue_poly,
                    coefficient,
                });
            }
        }
    }
    let roots = match rational_roots(&rational) {
        Some(r) => r,
        None => {
            return Ok(LogCombination::Undecided(
                Undecided::ResidueSearchTooLarge { level },
            ))
        }
    };
    let found: usize = roots.iter().map(|(_, m)| *m as usize).sum();
    if found + 1 < rational.len() {
        return Ok(LogCombination::Undecided(Undecided::IrrationalResidues {
            level,
            residue_polynomial: rational,
        }));
    }
    let a = ctx.numerator(h);
    let dq = tower.derive_unipoly(&ctx.q, level);
    let mut witness = Vec::new();
    for (c, _) in roots {
        let shifted = &a - &dq.scale(&RationalFunction::constant(tower.nvars(), c.clone()));
        let g = shifted.gcd(&ctx.q);
        if g.degree().unwrap_or(0) > 0 {
            witness.push((c, g.to_rf(level)));
        }
    }
    let check = witness.iter().fold(h.clone(), |acc, (c, g)| {
        &acc - &(&tower.differentiate(g) / g).scale(c)
    });
    if !check.is_zero() {
        return Err(ElemError::Internal(format!(
            "residue witness at level {level} does not verify"
        )));
    }
    Ok(LogCombination::Witness(witness))
}

fn non_constant_residue(
    tower: &Tower,
    part: &RationalFunction,
    level: usize,
) -> Result<(Vec<RationalFunction>, RationalFunction), ElemError> {
    match recognize_log_derivative_combo(tower, part, level)? {
        LogCombination::NonConstantResidue {
            residue_polynomial,
            coefficient,
        } => Ok((residue_polynomial, coefficient)),
        _ => Err(ElemError::Internal(format!(
            "level {level} rejected by residue conditions but residues are constant"
        ))),
    }
}

fn first_non_constant(tower: &Tower, coeffs: &[RationalFunction]) -> Option<RationalFunction> {
    coeffs
        .iter()
        .find(|c| c.constant_value().is_none() && !tower.differentiate(c).is_zero())
        .cloned()
}

/// A common squarefree denominator at one level, made monic in `t_level`.
struct LevelContext<'a> {
    tower: &'a Tower,
    level: usize,
    q: UniPoly,
    q_rf: RationalFunction,
    dq_inv: UniPoly,
    /// `q^D · q_t⁻¹ mod q`.
    root_motion: UniPoly,
}

impl<'a> LevelContext<'a> {
    fn new<'b, I>(tower: &'a Tower, level: usize, parts: I) -> Self
    where
        I: IntoIterator<Item = &'b RationalFunction>,
    {
        let nvars = tower.nvars();
        let mut den = Polynomial::one(nvars);
        for p in parts {
            if !p.is_zero() {
                den = lcm(&den, p.den());
            }
        }
        let den = if den.involves(level) {
            primitive_part_in(&den, level)
        } else {
            Polynomial::one(nvars)
        };
        let q = UniPoly::from_rf(&RationalFunction::from_poly(den), level)
            .expect("polynomial")
            .monic();
        let q_rf = q.to_rf(level);
        let dq = tower.derive_unipoly(&q, level);
        let dq_inv = if q.degree() == Some(0) {
            UniPoly::zero(nvars)
        } else {
            dq.inverse_mod(&q)
                .expect("squarefree denominator is coprime to its derivative")
        };
        let root_motion = if level == 0 || q.degree() == Some(0) {
            UniPoly::zero(nvars)
        } else {
            let coeff_d = UniPoly::from_coeffs(
                nvars,
                q.coeffs().iter().map(|c| tower.differentiate(c)).collect(),
            );
            let qt_inv = q
                .formal_derivative()
                .inverse_mod(&q)
                .expect("squarefree in the level variable");
            (&coeff_d * &qt_inv).rem(&q)
        };
        LevelContext {
            tower,
            level,
            q,
            q_rf,
            dq_inv,
            root_motion,
        }
    }

    fn degree(&self) -> usize {
        self.q.degree().unwrap_or(0)
    }

    fn numerator(&self, h: &RationalFunction) -> UniPoly {
        UniPoly::from_rf(&(h * &self.q_rf), self.level).expect("denominator divides the common one")
    }

    /// `ρ = a·D(q)⁻¹ mod q` for `h = a/q`.
    fn residue_function(&self, h: &RationalFunction) -> UniPoly {
        (&self.numerator(h) * &self.dq_inv).rem(&self.q)
    }

    /// `Δ(ρ)`, zero iff every residue of `h` is constant.
    fn residue_defect(&self, h: &RationalFunction) -> UniPoly {
        let rho = self.residue_function(h);
        let nvars = self.tower.nvars();
        let coeff_d = UniPoly::from_coeffs(
            nvars,
            rho.coeffs()
                .iter()
                .map(|c| self.tower.differentiate(c))
                .collect(),
        );
        let motion = (&rho.formal_derivative() * &self.root_motion).rem(&self.q);
        (&coeff_d - &motion).rem(&self.q)
    }

    /// Characteristic polynomial of multiplication by `rho` modulo `q`,
    /// lowest coefficient first.
    fn char_poly(&self, rho: &UniPoly) -> Vec<RationalFunction> {
        let d = self.degree();
        let nvars = self.tower.nvars();
        let zero = RationalFunction::zero(nvars);
        let one = RationalFunction::one(nvars);
        // Column k holds rho·t^k mod q.
        let mut cols = Vec::with_capacity(d);
        let mut power = UniPoly::constant(one.clone());
        let t = UniPoly::monomial(nvars, 1, one.clone());
        for _ in 0..d {
            cols.push((&power * rho).rem(&self.q));
            power = (&power * &t).rem(&self.q);
        }
        let a: Vec<Vec<RationalFunction>> = (0..d)
            .map(|i| (0..d).map(|j| cols[j].coeff(i)).collect())
            .collect();
        let matmul = |x: &Vec<Vec<RationalFunction>>, y: &Vec<Vec<RationalFunction>>| {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            (0..d).fold(zero.clone(), |acc, k| {
                                if x[i][k].is_zero() || y[k][j].is_zero() {
                                    acc
                                } else {
                                    &acc + &(&x[i][k] * &y[k][j])
                                }
                            })
                        })
                        .collect()
                })
                .collect::<Vec<Vec<RationalFunction>>>()
        };
        let mut coeffs = vec![zero.clone(); d + 1];
        coeffs[d] = one;
        let mut mk = vec![vec![zero.clone(); d]; d];
        for k in 1..=d {
            let mut next = matmul(&a, &mk);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] = &row[i] + &coeffs[d + 1 - k];
            }
            mk = next;
            let am = matmul(&a, &mk);
            let trace = (0..d).fold(zero.clone(), |acc, i| &acc + &am[i][i]);
            let kq = Rational::from_integer(BigInt::from(k));
            coeffs[d - k] = trace.scale(&(-kq.recip()));
        }
        coeffs
    }
}

/// Rational roots with multiplicities of a polynomial over Q given lowest
/// coefficient first. `None` when the coefficients are too large to search.
fn rational_roots(coeffs: &[Rational]) -> Option<Vec<(Rational, u32)>> {
    let mut p: Vec<Rational> = coeffs.to_vec();
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut roots = Vec::new();
    let mut zero_mult = 0;
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }
    if p.len() <= 1 {
        return Some(roots);
    }
    let den_lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * Rational::from_integer(den_lcm.clone())).to_integer())
        .collect();
    let lead = ints.last().expect("nonempty").abs();
    let tail = ints[0].abs();
    let ps = divisors(&tail)?;
    let qs = divisors(&lead)?;
    for num in &ps {
        for den in &qs {
            if num.gcd(den) != BigInt::one() {
                continue;
            }
            for sign in [1, -1] {
                let cand = Rational::new(num * BigInt::from(sign), den.clone());
                let mut mult = 0;
                while p.len() > 1 {
                    let (q, rem) = synthetic_division(&p, &cand);
                    if !rem.is_zero() {
                        break;
                    }
                    p = q;
                    mult += 1;
                }
                if mult > 0 {
                    roots.push((cand, mult));
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}

fn synthetic_division(p: &[Rational], c: &Rational) -> (Vec<Rational>, Rational) {
    let d = p.len() - 1;
    let mut q = vec![Rational::zero(); d];
    let mut acc = Rational::zero();
    for k in (0..=d).rev() {
        acc = &acc * c + &p[k];
        if k > 0 {
            q[k - 1] = acc.clone();
        }
    }
    (q, acc)
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n > 1u64 << 40 {
        return None;
    }
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(BigInt::from(k));
            if k * k != n {
                out.push(BigInt::from(n / k));
            }
        }
        k += 1;
    }
    out.sort();
    Some(out)
}
