//! Differential towers `Q(x)(t_1, …, t_n)` of primitive generators: the
//! derivation, validation of S-primitivity, and normalization of generator
//! derivatives to simple ones.

use std::fmt;

use thiserror::Error;

use crate::arith::{constant_combination, Rational, RationalFunction, UniPoly};
use crate::cli::parse::{parse_expression, ParseError};
use crate::hermite::{hermite_reduce_proper, HermiteError};
use crate::matryoshka::{self, Monomial};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error(
        "generator {index}: derivative involves generator {found} which is not declared earlier"
    )]
    NotInEarlierLevel { index: usize, found: usize },
    #[error("generator {index}: logarithm of zero")]
    ZeroLogArgument { index: usize },
    #[error("logarithmic derivative of zero")]
    ZeroArgument,
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("generator {0}: derivative has a head monomial other than 1")]
    HeadMonomialNotOne(usize),
    #[error("generator {index}: reduction failed: {source}")]
    Reduction { index: usize, source: HermiteError },
}

/// How a generator is declared.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    /// `t = log(argument)`.
    Logarithmic { argument: RationalFunction },
    /// `t′` given explicitly.
    ExplicitPrimitive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
    pub derivative: RationalFunction,
}

impl Generator {
    pub fn is_logarithmic(&self) -> bool {
        matches!(self.kind, GeneratorKind::Logarithmic { .. })
    }

    pub fn argument(&self) -> Option<&RationalFunction> {
        match &self.kind {
            GeneratorKind::Logarithmic { argument } => Some(argument),
            GeneratorKind::ExplicitPrimitive => None,
        }
    }
}

/// A generator declaration before its derivative is known.
#[derive(Clone, Debug)]
pub enum GeneratorSpec {
    Log(RationalFunction),
    Primitive(RationalFunction),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RejectionReason {
    ZeroDerivative,
    NotSimple,
    /// `t_i′ = Σ_{j<i} coeffs[j-1]·t_j′`.
    Dependence {
        coeffs: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rejection {
    pub index: usize,
    pub reason: RejectionReason,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            RejectionReason::ZeroDerivative => {
                write!(
                    f,
                    "not S-primitive: generator {} has zero derivative",
                    self.index
                )
            }
            RejectionReason::NotSimple => {
                write!(
                    f,
                    "not S-primitive: derivative of generator {} is not simple",
                    self.index
                )
            }
            RejectionReason::Dependence { coeffs } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(
                    f,
                    "not S-primitive: dependence, derivative of generator {} has coefficients ({}) on earlier derivatives",
                    self.index,
                    cs.join(", ")
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Validation {
    Unchecked,
    SPrimitive,
    Rejected(Rejection),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tower {
    var: String,
    generators: Vec<Generator>,
    validation: Validation,
}

impl Tower {
    /// Build a tower from declarations whose expressions live in the ambient
    /// field with `specs.len() + 1` variables.
    pub fn new(var: &str, specs: Vec<(String, GeneratorSpec)>) -> Result<Tower, TowerError> {
        check_name(var)?;
        let mut names = vec![var.to_string()];
        let mut generators: Vec<Generator> = Vec::with_capacity(specs.len());
        for (pos, (name, spec)) in specs.into_iter().enumerate() {
            let index = pos + 1;
            check_name(&name)?;
            if names.contains(&name) {
                return Err(TowerError::DuplicateName(name));
            }
            names.push(name.clone());
            let (kind, derivative) = match spec {
                GeneratorSpec::Log(argument) => {
                    check_level(&argument, index)?;
                    if argument.is_zero() {
                        return Err(TowerError::ZeroLogArgument { index });
                    }
                    let derivative = &derive_with(&generators, &argument) / &argument;
                    (GeneratorKind::Logarithmic { argument }, derivative)
                }
                GeneratorSpec::Primitive(derivative) => {
                    check_level(&derivative, index)?;
                    (GeneratorKind::ExplicitPrimitive, derivative)
                }
            };
            generators.push(Generator {
                name,
                kind,
                derivative,
            });
        }
        Ok(Tower {
            var: var.to_string(),
            generators,
            validation: Validation::Unchecked,
        })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Ambient variable count, `n + 1`.
    pub fn nvars(&self) -> usize {
        self.generators.len() + 1
    }

    pub fn var_name(&self) -> &str {
        &self.var
    }

    /// Name of variable `i`; 0 is `x`.
    pub fn name(&self, i: usize) -> &str {
        if i == 0 {
            &self.var
        } else {
            &self.generators[i - 1].name
        }
    }

    pub fn names(&self) -> Vec<&str> {
        (0..self.nvars()).map(|i| self.name(i)).collect()
    }

    /// Generator `t_i`, counted from 1.
    pub fn generator(&self, i: usize) -> &Generator {
        &self.generators[i - 1]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// `t_i′`, counted from 1.
    pub fn derivative(&self, i: usize) -> &RationalFunction {
        &self.generators[i - 1].derivative
    }

    /// `(t_1′, …, t_m′)`.
    pub fn derivatives_upto(&self, m: usize) -> Vec<RationalFunction> {
        (1..=m).map(|i| self.derivative(i).clone()).collect()
    }

    pub fn is_logarithmic(&self) -> bool {
        self.generators.iter().all(Generator::is_logarithmic)
    }

    pub fn zero(&self) -> RationalFunction {
        RationalFunction::zero(self.nvars())
    }

    pub fn one(&self) -> RationalFunction {
        RationalFunction::one(self.nvars())
    }

    /// Variable `i` as an element; 0 is `x`.
    pub fn var(&self, i: usize) -> RationalFunction {
        RationalFunction::var(self.nvars(), i)
    }

    pub fn constant(&self, c: Rational) -> RationalFunction {
        RationalFunction::constant(self.nvars(), c)
    }

    /// Parse an expression over the tower's names.
    pub fn parse(&self, src: &str) -> Result<RationalFunction, ParseError> {
        parse_expression(src, &self.names(), self.nvars())
    }

    pub fn differentiate(&self, f: &RationalFunction) -> RationalFunction {
        derive_with(&self.generators, f)
    }

    /// `arg′ / arg`.
    pub fn log_derivative(&self, arg: &RationalFunction) -> Result<RationalFunction, TowerError> {
        if arg.is_zero() {
            return Err(TowerError::ZeroArgument);
        }
        Ok(&self.differentiate(arg) / arg)
    }

    /// The tower derivation applied to a polynomial in `t_level` with
    /// coefficients in `K_{level-1}`; level 0 means `x` over Q.
    pub fn derive_unipoly(&self, p: &UniPoly, level: usize) -> UniPoly {
        let coeff_part = if level == 0 {
            UniPoly::zero(p.nvars())
        } else {
            UniPoly::from_coeffs(
                p.nvars(),
                p.coeffs().iter().map(|c| self.differentiate(c)).collect(),
            )
        };
        let chain = p.formal_derivative();
        let chain = if level == 0 {
            chain
        } else {
            chain.scale(self.derivative(level))
        };
        &coeff_part + &chain
    }

    pub fn validation(&self) -> &Validation {
        &self.validation
    }

    pub fn is_s_primitive(&self) -> bool {
        self.validation == Validation::SPrimitive
    }

    /// Check that every derivative is nonzero and simple, and that the
    /// derivatives are Q-linearly independent.
    pub fn check_s_primitive(&self) -> Validation {
        for i in 1..=self.len() {
            let d = self.derivative(i);
            if d.is_zero() {
                return Validation::Rejected(Rejection {
                    index: i,
                    reason: RejectionReason::ZeroDerivative,
                });
            }
            if !matryoshka::is_simple(self, d) {
                return Validation::Rejected(Rejection {
                    index: i,
                    reason: RejectionReason::NotSimple,
                });
            }
            if let Some(coeffs) = constant_combination(d, &self.derivatives_upto(i - 1)) {
                return Validation::Rejected(Rejection {
                    index: i,
                    reason: RejectionReason::Dependence { coeffs },
                });
            }
        }
        Validation::SPrimitive
    }

    /// The same tower with its validation state filled in.
    pub fn validated(mut self) -> Tower {
        self.validation = self.check_s_primitive();
        self
    }
}

/// Result of rewriting generators so that their derivatives are simple.
#[derive(Clone, Debug)]
pub struct NormalizedTower {
    pub tower: Tower,
    /// `(i, g_i)` with the old `t_i = u_i + g_i`; only nonzero shifts listed.
    pub shifts: Vec<(usize, RationalFunction)>,
}

/// Replace each `t_i` by `u_i = t_i − g_i` where `t_i′ = g_i′ + h_i` with `h_i`
/// simple, so that `u_i′ = h_i`. The returned tower carries its validation.
pub fn normalize_generators(tower: &Tower) -> Result<NormalizedTower, TowerError> {
    let n = tower.len();
    let nvars = tower.nvars();
    let mut work = tower.clone();
    // Images of the old variables in the new coordinates.
    let mut images: Vec<RationalFunction> = (0..nvars).map(|i| tower.var(i)).collect();
    let mut shifts = Vec::new();
    for i in 1..=n {
        let old = tower.generator(i);
        let d = old.derivative.substitute(&images);
        let mut g = RationalFunction::zero(nvars);
        let mut h = RationalFunction::zero(nvars);
        if !d.is_zero() {
            let m = matryoshka::project(&work, &d);
            if matryoshka::head_data_of(&m).hm != Some(Monomial::unit(n)) {
                return Err(TowerError::HeadMonomialNotOne(i));
            }
            for level in 0..i {
                let Some(c) = m.layer(level).get(&Monomial::unit(n)) else {
                    continue;
                };
                let (gl, hl) = hermite_reduce_proper(&work, c, level)
                    .map_err(|source| TowerError::Reduction { index: i, source })?;
                g = &g + &gl;
                h = &h + &hl;
            }
        }
        let kind = match &old.kind {
            GeneratorKind::Logarithmic { argument } if g.is_zero() => GeneratorKind::Logarithmic {
                argument: argument.substitute(&images),
            },
            _ => GeneratorKind::ExplicitPrimitive,
        };
        work.generators[i - 1] = Generator {
            name: old.name.clone(),
            kind,
            derivative: h,
        };
        images[i] = &tower.var(i) + &g;
        if !g.is_zero() {
            shifts.push((i, g));
        }
    }
    work.validation = Validation::Unchecked;
    Ok(NormalizedTower {
        tower: work.validated(),
        shifts,
    })
}

fn check_name(name: &str) -> Result<(), TowerError> {
    let mut chars = name.chars();
    let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(TowerError::InvalidName(name.to_string()))
    }
}

fn check_level(f: &RationalFunction, index: usize) -> Result<(), TowerError> {
    match f.max_var() {
        Some(found) if found >= index => Err(TowerError::NotInEarlierLevel { index, found }),
        _ => Ok(()),
    }
}

/// Derivation determined by the derivatives of the given generators; `f` must
/// not involve later variables.
fn derive_with(generators: &[Generator], f: &RationalFunction) -> RationalFunction {
    let derive_poly = |p: &crate::arith::Polynomial| -> RationalFunction {
        let mut acc = RationalFunction::from_poly(p.partial(0));
        for i in 1..p.nvars() {
            if !p.involves(i) {
                continue;
            }
            let t_prime = &generators
                .get(i - 1)
                .expect("element involves an undeclared generator")
                .derivative;
            acc = &acc + &(&RationalFunction::from_poly(p.partial(i)) * t_prime);
        }
        acc
    };
    let dn = derive_poly(f.num());
    if f.den().is_constant() {
        return dn.scale(&f.den().leading_coeff().recip());
    }
    let dd = derive_poly(f.den());
    let den = RationalFunction::from_poly(f.den().clone());
    let num_part = &(&dn * &den) - &(&RationalFunction::from_poly(f.num().clone()) * &dd);
    &num_part / &RationalFunction::from_poly(f.den().pow(2))
}

/// Towers used throughout the documentation and tests.
pub mod examples {
    use super::*;

    fn build(var: &str, decls: &[(&str, &str, bool)]) -> Tower {
        let names: Vec<&str> = std::iter::once(var)
            .chain(decls.iter().map(|d| d.0))
            .collect();
        let nvars = names.len();
        let specs = decls
            .iter()
            .enumerate()
            .map(|(k, (name, src, is_log))| {
                let e = parse_expression(src, &names[..k + 1], nvars).expect("example parses");
                let spec = if *is_log {
                    GeneratorSpec::Log(e)
                } else {
                    GeneratorSpec::Primitive(e)
                };
                (name.to_string(), spec)
            })
            .collect();
        Tower::new(var, specs).expect("example tower").validated()
    }

    /// `t1 = log x`, `t2 = li(x)` with `t2′ = 1/t1`, `t3 = log log x`.
    pub fn li_tower() -> Tower {
        build(
            "x",
            &[("t1", "x", true), ("t2", "1/t1", false), ("t3", "t1", true)],
        )
    }

    /// `u1 = log x`, `u2 = log(x+1)`, `u3 = log u1`.
    pub fn well_generated_three() -> Tower {
        build(
            "x",
            &[("u1", "x", true), ("u2", "x+1", true), ("u3", "u1", true)],
        )
    }

    /// `t1 = log x`, `t2 = log t1`, `t3 = log((x+1) t1)`.
    pub fn dependent_significant() -> Tower {
        build(
            "x",
            &[
                ("t1", "x", true),
                ("t2", "t1", true),
                ("t3", "(x+1)*t1", true),
            ],
        )
    }

    /// `t1 = log x`, `t2 = log(x t1)`, `t3 = log((x+1)(t1+1) t2)`.
    pub fn three_column_source() -> Tower {
        build(
            "x",
            &[
                ("t1", "x", true),
                ("t2", "x*t1", true),
                ("t3", "(x+1)*(t1+1)*t2", true),
            ],
        )
    }

    /// Five logarithms `log x, log(x+1), log u1, log(u1+1), log(u1+u3)`.
    pub fn five_generator_target() -> Tower {
        build(
            "x",
            &[
                ("u1", "x", true),
                ("u2", "x+1", true),
                ("u3", "u1", true),
                ("u4", "u1+1", true),
                ("u5", "u1+u3", true),
            ],
        )
    }

    /// A tower with a single generator `t1 = log x`.
    pub fn log_x() -> Tower {
        build("x", &[("t1", "x", true)])
    }

    /// Build an arbitrary tower from `(name, expression, is_log)` triples.
    pub fn custom(decls: &[(&str, &str, bool)]) -> Tower {
        build("x", decls)
    }
}
