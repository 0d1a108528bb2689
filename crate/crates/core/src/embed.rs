//! Logarithmic towers: associated matrices, significant data, normalization,
//! and embedding into a well-generated tower where remainders can be finer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{constant_combination, Rational, RationalFunction};
use crate::elem::{recognize_log_derivative_combo, LogCombination};
use crate::matryoshka::project;
use crate::tower::{GeneratorSpec, Tower, TowerError, Validation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("tower is not logarithmic (generator {0} is an explicit primitive)")]
    NotLogarithmic(usize),
    #[error("tower does not satisfy the embedding precondition: {0}")]
    Precondition(WellGeneratedFailure),
    #[error("generator {0} has zero derivative after eliminating a dependence")]
    Degenerate(usize),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Entry `(i, j)` is `π_i(t_{j+1}′)` for `0 ≤ i < n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociatedMatrix {
    pub entries: Vec<Vec<RationalFunction>>,
}

impl AssociatedMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Entry in row `i` (projection level) and column `j` (generator, from 1).
    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[i][j - 1]
    }
}

pub fn associated_matrix(tower: &Tower) -> AssociatedMatrix {
    let n = tower.len();
    let mut entries = vec![vec![tower.zero(); n]; n];
    for j in 1..=n {
        let m = project(tower, tower.derivative(j));
        for (i, row) in entries.iter_mut().enumerate() {
            row[j - 1] = m.projection(i);
        }
    }
    AssociatedMatrix { entries }
}

/// Significant indices and components of the generator derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct SignificantData {
    pub sv: Vec<usize>,
    pub sc: Vec<RationalFunction>,
}

pub fn significant_data(tower: &Tower) -> SignificantData {
    let n = tower.len();
    let mut sv = Vec::with_capacity(n);
    let mut sc = Vec::with_capacity(n);
    for j in 1..=n {
        let projections = project(tower, tower.derivative(j)).projections();
        match projections.iter().rposition(|p| !p.is_zero()) {
            Some(i) => {
                sv.push(i);
                sc.push(projections[i].clone());
            }
            None => {
                sv.push(0);
                sc.push(tower.zero());
            }
        }
    }
    SignificantData { sv, sc }
}

/// The first condition of well-generatedness that fails.
#[derive(Clone, Debug, PartialEq)]
pub enum WellGeneratedFailure {
    NotLogarithmic(usize),
    /// `sc_index = Σ coeffs[j]·sc_{j+1}` over earlier components.
    Cli {
        index: usize,
        coeffs: Vec<Rational>,
    },
    /// `sv_{index+1} < sv_index`.
    Mi {
        index: usize,
    },
    /// Column `column` does not have exactly one nonzero entry.
    One {
        column: usize,
        nonzeros: usize,
    },
}

impl std::fmt::Display for WellGeneratedFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WellGeneratedFailure::NotLogarithmic(i) => {
                write!(f, "generator {i} is not logarithmic")
            }
            WellGeneratedFailure::Cli { index, .. } => write!(
                f,
                "(CLI) fails: significant component {index} depends on earlier ones"
            ),
            WellGeneratedFailure::Mi { index } => write!(
                f,
                "(MI) fails: significant index drops after generator {index}"
            ),
            WellGeneratedFailure::One { column, nonzeros } => write!(
                f,
                "(ONE) fails: column {column} has {nonzeros} nonzero entries"
            ),
        }
    }
}

fn check_logarithmic(tower: &Tower) -> Result<(), WellGeneratedFailure> {
    match tower.generators().iter().position(|g| !g.is_logarithmic()) {
        Some(i) => Err(WellGeneratedFailure::NotLogarithmic(i + 1)),
        None => Ok(()),
    }
}

fn check_cli_mi(sd: &SignificantData) -> Result<(), WellGeneratedFailure> {
    for i in 1..sd.sc.len() {
        if let Some(coeffs) = constant_combination(&sd.sc[i], &sd.sc[..i]) {
            return Err(WellGeneratedFailure::Cli {
                index: i + 1,
                coeffs,
            });
        }
    }
    for i in 1..sd.sv.len() {
        if sd.sv[i] < sd.sv[i - 1] {
            return Err(WellGeneratedFailure::Mi { index: i });
        }
    }
    Ok(())
}

/// Check (CLI), (MI) and (ONE), in that order.
pub fn is_well_generated(tower: &Tower) -> Result<(), WellGeneratedFailure> {
    check_logarithmic(tower)?;
    check_cli_mi(&significant_data(tower))?;
    let a = associated_matrix(tower);
    for j in 1..=tower.len() {
        let nonzeros = (0..a.size()).filter(|&i| !a.get(i, j).is_zero()).count();
        if nonzeros != 1 {
            return Err(WellGeneratedFailure::One {
                column: j,
                nonzeros,
            });
        }
    }
    Ok(())
}

/// One rewriting step of [`normalize_tower`].
#[derive(Clone, Debug, PartialEq)]
pub enum NormalizationStep {
    /// `t_index` replaced by `scale·(t_index − Σ coeffs[j]·t_{j+1})`.
    Eliminate {
        index: usize,
        scale: Rational,
        coeffs: Vec<Rational>,
    },
    /// Generators `index` and `index + 1` exchanged.
    Swap { index: usize },
}

/// A logarithmic tower rewritten to satisfy (CLI) and (MI).
#[derive(Clone, Debug)]
pub struct NormalizedLogTower {
    pub tower: Tower,
    pub steps: Vec<NormalizationStep>,
    /// Image of each original variable in the new coordinates.
    pub images: Vec<RationalFunction>,
}

impl NormalizedLogTower {
    /// Rewrite an element of the original tower in the new coordinates.
    pub fn apply(&self, f: &RationalFunction) -> RationalFunction {
        f.substitute(&self.images)
    }
}

fn log_specs(tower: &Tower) -> Vec<(String, RationalFunction)> {
    tower
        .generators()
        .iter()
        .map(|g| {
            (
                g.name.clone(),
                g.argument().expect("logarithmic tower").clone(),
            )
        })
        .collect()
}

fn rebuild(var: &str, specs: Vec<(String, RationalFunction)>) -> Result<Tower, TowerError> {
    Ok(Tower::new(
        var,
        specs
            .into_iter()
            .map(|(n, a)| (n, GeneratorSpec::Log(a)))
            .collect(),
    )?
    .validated())
}

/// Rewrite a logarithmic tower until its significant components are
/// independent and its significant vector is weakly increasing.
pub fn normalize_tower(tower: &Tower) -> Result<NormalizedLogTower, EmbedError> {
    if let Err(WellGeneratedFailure::NotLogarithmic(i)) = check_logarithmic(tower) {
        return Err(EmbedError::NotLogarithmic(i));
    }
    let nvars = tower.nvars();
    let mut current = tower.clone();
    let mut images: Vec<RationalFunction> = (0..nvars).map(|i| tower.var(i)).collect();
    let mut steps = Vec::new();
    loop {
        let sd = significant_data(&current);
        if let Some(i) = sd.sc.iter().position(RationalFunction::is_zero) {
            return Err(EmbedError::Degenerate(i + 1));
        }
        let (next, step, sub) = match check_cli_mi(&sd) {
            Ok(()) => break,
            Err(WellGeneratedFailure::Cli { index, coeffs }) => {
                eliminate(&current, index, &coeffs)?
            }
            Err(WellGeneratedFailure::Mi { index }) => swap(&current, index)?,
            Err(other) => return Err(EmbedError::Precondition(other)),
        };
        let next_sd = significant_data(&next);
        if next_sd.sc.iter().any(RationalFunction::is_zero) {
            let i = next_sd
                .sc
                .iter()
                .position(RationalFunction::is_zero)
                .expect("found");
            return Err(EmbedError::Degenerate(i + 1));
        }
        if next_sd.sv >= sd.sv {
            return Err(EmbedError::Internal(format!(
                "significant vector did not decrease: {:?} -> {:?}",
                sd.sv, next_sd.sv
            )));
        }
        images = images.iter().map(|f| f.substitute(&sub)).collect();
        current = next;
        steps.push(step);
    }
    Ok(NormalizedLogTower {
        tower: current,
        steps,
        images,
    })
}

/// Replace `t_index` by `L·(t_index − Σ c_j t_j)` with `L` clearing the
/// denominators of `c`. Returns the new tower, the step, and the images of the
/// old variables in the new coordinates.
fn eliminate(
    tower: &Tower,
    index: usize,
    coeffs: &[Rational],
) -> Result<(Tower, NormalizationStep, Vec<RationalFunction>), EmbedError> {
    let scale = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scale_q = Rational::from_integer(scale.clone());
    let mut specs = log_specs(tower);
    let mut arg = specs[index - 1].1.pow(to_i32(&scale)?);
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = (c * &scale_q).to_integer();
        arg = &arg / &specs[j].1.pow(to_i32(&e)?);
    }
    specs[index - 1].1 = arg;
    // Old t_index = new/L + Σ c_j t_j.
    let mut sub: Vec<RationalFunction> = (0..tower.nvars()).map(|i| tower.var(i)).collect();
    let mut old = tower.var(index).scale(&scale_q.recip());
    for (j, c) in coeffs.iter().enumerate() {
        old = &old + &tower.var(j + 1).scale(c);
    }
    sub[index] = old;
    for spec in specs.iter_mut().skip(index) {
        spec.1 = spec.1.substitute(&sub);
    }
    let next = rebuild(tower.var_name(), specs)?;
    if next.derivative(index).is_zero() {
        return Err(EmbedError::Degenerate(index));
    }
    Ok((
        next,
        NormalizationStep::Eliminate {
            index,
            scale: scale_q,
            coeffs: coeffs.to_vec(),
        },
        sub,
    ))
}

fn swap(
    tower: &Tower,
    index: usize,
) -> Result<(Tower, NormalizationStep, Vec<RationalFunction>), EmbedError> {
    let nvars = tower.nvars();
    let mut map: Vec<usize> = (0..nvars).collect();
    map.swap(index, index + 1);
    let mut specs = log_specs(tower);
    specs.swap(index - 1, index);
    for spec in specs.iter_mut() {
        spec.1 = spec.1.remap(nvars, &map);
    }
    let next = rebuild(tower.var_name(), specs)?;
    let sub: Vec<RationalFunction> = map.iter().map(|&i| tower.var(i)).collect();
    Ok((next, NormalizationStep::Swap { index }, sub))
}

fn to_i32(k: &BigInt) -> Result<i32, EmbedError> {
    i32::try_from(k).map_err(|_| EmbedError::Internal("exponent out of range".into()))
}

/// A differential embedding of a logarithmic tower into a well-generated one.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub source: Tower,
    pub target: Tower,
    /// `b_1, …, b_w` in the source field; `u_k′ = φ(b_k)`.
    pub basis: Vec<RationalFunction>,
    /// `ℓ_j`, counted from 1.
    pub ell: Vec<usize>,
    /// `coeffs[j][k]` is `c_{j+1,k+1}` for `k + 1 < ℓ_{j+1}`.
    pub coeffs: Vec<Vec<Rational>>,
    /// `φ(x), φ(t_1), …, φ(t_n)`.
    pub images: Vec<RationalFunction>,
}

impl Embedding {
    pub fn width(&self) -> usize {
        self.target.len()
    }

    pub fn is_identity(&self) -> bool {
        self.width() == self.source.len()
            && self
                .images
                .iter()
                .enumerate()
                .all(|(i, f)| *f == self.target.var(i))
    }
}

/// `φ(f)`.
pub fn apply_homomorphism(e: &Embedding, f: &RationalFunction) -> RationalFunction {
    f.substitute(&e.images)
}

/// Embed a logarithmic tower satisfying (CLI) and (MI) into a well-generated
/// logarithmic tower.
pub fn embed_well_generated(tower: &Tower) -> Result<Embedding, EmbedError> {
    check_logarithmic(tower).map_err(EmbedError::Precondition)?;
    let sd = significant_data(tower);
    check_cli_mi(&sd).map_err(EmbedError::Precondition)?;
    let n = tower.len();
    let a = associated_matrix(tower);

    // Rows top to bottom, each row left to right.
    let mut basis: Vec<RationalFunction> = Vec::new();
    let mut basis_level: Vec<usize> = Vec::new();
    for i in 0..n {
        for j in 1..=n {
            let e = a.get(i, j);
            if e.is_zero() || constant_combination(e, &basis).is_some() {
                continue;
            }
            basis.push(e.clone());
            basis_level.push(i);
        }
    }
    let w = basis.len();

    let mut ell = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    for j in 1..=n {
        let k = basis
            .iter()
            .position(|b| *b == sd.sc[j - 1])
            .ok_or_else(|| {
                EmbedError::Internal(format!("significant component {j} not in basis"))
            })?;
        let rest = tower.derivative(j) - &basis[k];
        let c = constant_combination(&rest, &basis[..k]).ok_or_else(|| {
            EmbedError::Internal(format!("derivative {j} not spanned by the earlier basis"))
        })?;
        ell.push(k + 1);
        coeffs.push(c);
    }
    if ell[0] != 1 || ell[n - 1] != w || ell.windows(2).any(|p| p[0] >= p[1]) {
        return Err(EmbedError::Internal(format!(
            "index map {ell:?} is not admissible"
        )));
    }

    let tnvars = w + 1;
    let u = |k: usize| RationalFunction::var(tnvars, k);
    let mut images = vec![u(0)];
    for j in 0..n {
        let mut img = u(ell[j]);
        for (k, c) in coeffs[j].iter().enumerate() {
            if !c.is_zero() {
                img = &img + &u(k + 1).scale(c);
            }
        }
        images.push(img);
    }
    let phi = |f: &RationalFunction| f.substitute(&images);

    let mut specs = Vec::with_capacity(w);
    for (k, b) in basis.iter().enumerate() {
        let name = format!("u{}", k + 1);
        let derivative = phi(b);
        let spec = match log_argument(tower, b, basis_level[k]) {
            Some(arg) => GeneratorSpec::Log(phi(&arg)),
            None => GeneratorSpec::Primitive(derivative.clone()),
        };
        specs.push((name, spec, derivative));
    }
    // A recovered argument is kept only if it reproduces the derivative.
    let mut accepted = Vec::with_capacity(w);
    for (k, (name, spec, derivative)) in specs.into_iter().enumerate() {
        let spec = match spec {
            GeneratorSpec::Log(arg) => {
                let mut trial: Vec<(String, GeneratorSpec)> = accepted.clone();
                trial.push((name.clone(), GeneratorSpec::Log(arg.clone())));
                let probe = extend_probe(trial, tnvars)?;
                if probe.derivative(k + 1) == &derivative {
                    GeneratorSpec::Log(arg)
                } else {
                    GeneratorSpec::Primitive(derivative)
                }
            }
            other => other,
        };
        accepted.push((name, spec));
    }
    let target = Tower::new(tower.var_name(), accepted)?.validated();

    let embedding = Embedding {
        source: tower.clone(),
        target,
        basis,
        ell,
        coeffs,
        images,
    };
    verify_embedding(&embedding)?;
    Ok(embedding)
}

/// Build a tower over the first few target generators, padding the rest with
/// placeholders so that expressions keep the full variable count.
fn extend_probe(
    mut specs: Vec<(String, GeneratorSpec)>,
    nvars: usize,
) -> Result<Tower, EmbedError> {
    let have = specs.len();
    for k in have..nvars - 1 {
        specs.push((
            format!("pad{}", k + 1),
            GeneratorSpec::Primitive(RationalFunction::zero(nvars)),
        ));
    }
    Ok(Tower::new("x", specs)?)
}

/// Recover `g` with `b = g′/g` from the source tower, when the residues are
/// integers.
fn log_argument(tower: &Tower, b: &RationalFunction, level: usize) -> Option<RationalFunction> {
    let LogCombination::Witness(w) = recognize_log_derivative_combo(tower, b, level).ok()? else {
        return None;
    };
    let mut arg = tower.one();
    for (c, g) in &w {
        if !c.is_integer() {
            return None;
        }
        arg = &arg * &g.pow(i32::try_from(c.to_integer()).ok()?);
    }
    let rest = b - &tower.log_derivative(&arg).ok()?;
    if rest.is_zero() {
        Some(arg)
    } else {
        None
    }
}

fn verify_embedding(e: &Embedding) -> Result<(), EmbedError> {
    let n = e.source.len();
    let w = e.width();
    if w < n || w > n * (n + 1) / 2 {
        return Err(EmbedError::Internal(format!(
            "width {w} outside [{n}, {}]",
            n * (n + 1) / 2
        )));
    }
    if e.target.validation() != &Validation::SPrimitive {
        return Err(EmbedError::Internal(format!(
            "target tower is not S-primitive: {:?}",
            e.target.validation()
        )));
    }
    if let Err(failure) = is_well_generated(&e.target) {
        return Err(EmbedError::Internal(format!(
            "target is not well generated: {failure}"
        )));
    }
    for (k, b) in e.basis.iter().enumerate() {
        if e.target.derivative(k + 1) != &apply_homomorphism(e, b) {
            return Err(EmbedError::Internal(format!(
                "u{}′ differs from φ(b_{})",
                k + 1,
                k + 1
            )));
        }
    }
    for j in 1..=n {
        let lhs = e.target.differentiate(&e.images[j]);
        let rhs = apply_homomorphism(e, e.source.derivative(j));
        if lhs != rhs {
            return Err(EmbedError::Internal(format!(
                "φ does not commute with ′ on t{j}"
            )));
        }
    }
    Ok(())
}

/// Number of Q-linearly independent entries of the associated matrix; the
/// width of the embedding.
pub fn embedding_width(tower: &Tower) -> usize {
    let a = associated_matrix(tower);
    let mut basis = Vec::new();
    for row in &a.entries {
        for e in row {
            if !e.is_zero() && constant_combination(e, &basis).is_none() {
                basis.push(e.clone());
            }
        }
    }
    basis.len()
}
