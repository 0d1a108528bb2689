//! Random towers and elements, and a differentiation oracle written directly
//! from the quotient rule.

#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use towerdecomp::arith::{Polynomial, Rational, RationalFunction};
use towerdecomp::tower::{GeneratorSpec, Tower};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn q(k: i64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let k = rng.gen_range(-bound..=bound);
        if k != 0 {
            return k;
        }
    }
}

/// `v + a`, or `x·v + a` for a generator `v`, with `v < upto`.
fn random_linear(rng: &mut ChaCha8Rng, nvars: usize, upto: usize) -> Polynomial {
    let v = rng.gen_range(0..upto);
    let a = Polynomial::from_int(nvars, rng.gen_range(-2..=2));
    let base = if v > 0 && rng.gen_bool(0.25) {
        &Polynomial::var(nvars, 0) * &Polynomial::var(nvars, v)
    } else {
        Polynomial::var(nvars, v)
    };
    &base + &a
}

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("t{i}")).collect()
}

/// An S-primitive tower with `n` generators, logarithmic or explicit.
pub fn random_tower(rng: &mut ChaCha8Rng, n: usize) -> Tower {
    random_tower_with(rng, n, false)
}

/// An S-primitive tower with `n` logarithmic generators.
pub fn random_log_tower(rng: &mut ChaCha8Rng, n: usize) -> Tower {
    random_tower_with(rng, n, true)
}

fn random_tower_with(rng: &mut ChaCha8Rng, n: usize, log_only: bool) -> Tower {
    let nvars = n + 1;
    loop {
        let mut specs = Vec::with_capacity(n);
        for (i, name) in names(n).into_iter().enumerate() {
            let level = i + 1;
            let spec = if log_only || rng.gen_range(0..3) < 2 {
                let mut arg = RationalFunction::one(nvars);
                for _ in 0..rng.gen_range(1..=2) {
                    let p = random_linear(rng, nvars, level);
                    arg = &arg * &RationalFunction::from_poly(p);
                }
                GeneratorSpec::Log(arg)
            } else {
                let c = RationalFunction::from_int(nvars, nonzero(rng, 2));
                let d = RationalFunction::from_poly(random_linear(rng, nvars, level));
                GeneratorSpec::Primitive(&c / &d)
            };
            specs.push((name, spec));
        }
        let Ok(tower) = Tower::new("x", specs) else {
            continue;
        };
        let tower = tower.validated();
        if tower.is_s_primitive() {
            return tower;
        }
    }
}

fn random_poly(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    vars: usize,
    max_deg: u32,
    max_terms: usize,
) -> Polynomial {
    loop {
        let mut p = Polynomial::zero(nvars);
        for _ in 0..rng.gen_range(1..=max_terms) {
            let mut exps = vec![0u32; nvars];
            for _ in 0..rng.gen_range(0..=max_deg) {
                exps[rng.gen_range(0..vars)] += 1;
            }
            p = &p + &Polynomial::monomial(nvars, exps, q(nonzero(rng, 3)));
        }
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random element with numerator and denominator of total degree at most 3.
pub fn random_element(rng: &mut ChaCha8Rng, tower: &Tower) -> RationalFunction {
    let nvars = tower.nvars();
    let num = random_poly(rng, nvars, nvars, 3, 3);
    let mut den = Polynomial::one(nvars);
    if rng.gen_bool(0.7) {
        let mut budget = 3u32;
        while budget > 0 {
            let f = random_linear(rng, nvars, nvars);
            let fd = f.total_degree();
            if fd > budget {
                break;
            }
            let k = rng.gen_range(1..=budget / fd);
            den = &den * &f.pow(k);
            budget -= k * fd;
            if rng.gen_bool(0.5) {
                break;
            }
        }
    }
    if den.is_zero() {
        den = Polynomial::one(nvars);
    }
    RationalFunction::new(num, den)
}

/// A random element of `K_level` that is proper in `t_level` (any element of
/// Q(x) when `level = 0`).
pub fn random_proper(rng: &mut ChaCha8Rng, tower: &Tower, level: usize) -> RationalFunction {
    let nvars = tower.nvars();
    if level == 0 {
        let num = random_poly(rng, nvars, 1, 3, 3);
        let mut den = Polynomial::one(nvars);
        for _ in 0..rng.gen_range(0..=2) {
            let a = Polynomial::from_int(nvars, rng.gen_range(-2..=2));
            den = &den * &(&Polynomial::var(nvars, 0) + &a).pow(rng.gen_range(1..=3));
        }
        return RationalFunction::new(num, den);
    }
    let t = Polynomial::var(nvars, level);
    loop {
        let mut den = Polynomial::one(nvars);
        let mut deg = 0;
        while deg < 3 {
            let shift = if rng.gen_bool(0.5) {
                random_linear(rng, nvars, level)
            } else {
                Polynomial::from_int(nvars, rng.gen_range(-2..=2))
            };
            let k = rng.gen_range(1..=3 - deg);
            den = &den * &(&t + &shift).pow(k);
            deg += k;
            if rng.gen_bool(0.4) {
                break;
            }
        }
        if rng.gen_bool(0.3) {
            den = &den * &random_linear(rng, nvars, 1);
        }
        let mut num = Polynomial::zero(nvars);
        for k in 0..deg {
            if rng.gen_bool(0.6) {
                let c = random_poly(rng, nvars, level, 1, 2);
                num = &num + &(&c * &t.pow(k));
            }
        }
        if num.is_zero() || den.is_zero() {
            continue;
        }
        return RationalFunction::new(num, den);
    }
}

fn oracle_poly_derivative(tower: &Tower, p: &Polynomial) -> RationalFunction {
    let mut acc = RationalFunction::from_poly(p.partial(0));
    for i in 1..tower.nvars() {
        let dp = RationalFunction::from_poly(p.partial(i));
        acc = &acc + &(&dp * tower.derivative(i));
    }
    acc
}

/// `(a/b)′ = (a′b − ab′)/b²`, with `p′ = ∂_x p + Σ ∂_{t_i} p · t_i′`.
pub fn oracle_derivative(tower: &Tower, f: &RationalFunction) -> RationalFunction {
    let a = RationalFunction::from_poly(f.num().clone());
    let b = RationalFunction::from_poly(f.den().clone());
    let da = oracle_poly_derivative(tower, f.num());
    let db = oracle_poly_derivative(tower, f.den());
    &(&(&da * &b) - &(&a * &db)) / &(&b * &b)
}
