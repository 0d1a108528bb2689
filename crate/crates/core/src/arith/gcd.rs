//! Multivariate gcd by a heuristic evaluation method with recursive primitive
//! remainder sequences as fallback, and Yun's squarefree decomposition.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::poly::{Exponents, Polynomial};

/// Scale a nonzero polynomial so its graded-lex leading coefficient is 1.
pub fn normalize(p: &Polynomial) -> Polynomial {
    p.monic()
}

/// Full polynomial gcd over Q, normalized to graded-lex leading coefficient 1.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.nvars());
    }
    if a.div_exact(b).is_some() {
        return normalize(b);
    }
    if b.div_exact(a).is_some() {
        return normalize(a);
    }
    let (ca, cb) = (a.rational_content(), b.rational_content());
    if let Some(g) = heuristic_gcd(&a.scale(&ca.recip()), &b.scale(&cb.recip())) {
        return normalize(&g);
    }
    // A variable the gcd cannot involve is removed by taking contents.
    let nvars = a.nvars();
    let mut shared = None;
    for v in (0..nvars).rev() {
        let (ia, ib) = (a.involves(v), b.involves(v));
        if !ia && !ib {
            continue;
        }
        if !ia || !ib || specialized_gcd_degree(a, b, v) == Some(0) {
            let ca = if ia { content_in(a, v) } else { a.clone() };
            let cb = if ib { content_in(b, v) } else { b.clone() };
            return gcd(&ca, &cb);
        }
        shared.get_or_insert(v);
    }
    let v = shared.expect("non-constant inputs share a variable");
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    let g = primitive_prs(&pa, &pb, v);
    normalize(&(&c * &g))
}

/// Size cap, in bits, on evaluation points before giving up on the heuristic.
const HEURISTIC_BITS: u64 = 4096;

/// Gcd over Z of integer polynomials by evaluating the top
/// variable at a large integer, recursing, and reading the result back
/// in balanced base `xi`. A candidate is accepted only if it divides both
/// inputs; `None` means fall back to remainder sequences.
fn heuristic_gcd(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    let nvars = a.nvars();
    if let (Some(x), Some(y)) = (a.constant_value(), b.constant_value()) {
        let g = x.numer().gcd(y.numer());
        return Some(Polynomial::constant(nvars, BigRational::from_integer(g)));
    }
    let (ca, cb) = (a.rational_content(), b.rational_content());
    let content = BigRational::from_integer(ca.numer().gcd(cb.numer()));
    let (a, b) = (&a.scale(&ca.recip()), &b.scale(&cb.recip()));
    let v = a.max_var().max(b.max_var()).expect("non-constant input");
    let norm = |p: &Polynomial| {
        p.terms()
            .map(|(_, c)| c.numer().abs())
            .max()
            .expect("nonzero")
    };
    let mut xi = BigInt::from(2) * norm(a).min(norm(b)) + BigInt::from(29);
    for _ in 0..6 {
        if xi.bits() > HEURISTIC_BITS {
            return None;
        }
        let ea = evaluate_at(a, v, &xi);
        let eb = evaluate_at(b, v, &xi);
        if !ea.is_zero() && !eb.is_zero() {
            let h = heuristic_gcd(&ea, &eb)?;
            let g = interpolate(&h, v, &xi);
            if !g.is_zero() {
                let g = g.scale(&g.rational_content().recip());
                if a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                    return Some(g.scale(&content));
                }
            }
        }
        xi = xi * BigInt::from(73794) / BigInt::from(27011);
    }
    None
}

fn evaluate_at(p: &Polynomial, v: usize, xi: &BigInt) -> Polynomial {
    let terms = p.terms().map(|(e, c)| {
        let mut exps = e.as_slice().to_vec();
        let k = std::mem::replace(&mut exps[v], 0);
        let value = c * BigRational::from_integer(num_traits::pow(xi.clone(), k as usize));
        (Exponents::from_vec(exps), value)
    });
    Polynomial::from_terms(p.nvars(), terms)
}

/// Inverse of `evaluate_at` on the balanced base-`xi` digits of `h`.
fn interpolate(h: &Polynomial, v: usize, xi: &BigInt) -> Polynomial {
    let half = xi / BigInt::from(2);
    let mut rest: Vec<(Vec<u32>, BigInt)> = h
        .terms()
        .map(|(e, c)| (e.as_slice().to_vec(), c.numer().clone()))
        .collect();
    let mut out = Vec::new();
    let mut k = 0u32;
    while !rest.is_empty() {
        for (e, c) in rest.iter_mut() {
            let mut digit = c.mod_floor(xi);
            if digit > half {
                digit -= xi;
            }
            if !digit.is_zero() {
                let mut exps = e.clone();
                exps[v] = k;
                out.push((
                    Exponents::from_vec(exps),
                    BigRational::from_integer(digit.clone()),
                ));
            }
            *c = (&*c - digit) / xi;
        }
        rest.retain(|(_, c)| !c.is_zero());
        k += 1;
    }
    Polynomial::from_terms(h.nvars(), out)
}

/// Dense coefficients in `v` of `p` with every other variable `w` set to
/// `point[w]`.
fn specialize(p: &Polynomial, v: usize, point: &[BigRational]) -> Vec<BigRational> {
    let mut dense = vec![BigRational::zero(); p.degree_in(v) as usize + 1];
    for (e, c) in p.terms() {
        let mut value = c.clone();
        for (w, x) in point.iter().enumerate() {
            let k = e.get(w);
            if w != v && k > 0 {
                value *= num_traits::pow(x.clone(), k as usize);
            }
        }
        dense[e.get(v) as usize] += value;
    }
    while dense.len() > 1 && dense.last().is_some_and(Zero::is_zero) {
        dense.pop();
    }
    dense
}

fn univariate_gcd_degree(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> usize {
    let is_zero = |p: &[BigRational]| p.iter().all(Zero::is_zero);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !is_zero(&b) {
        while b.len() > 1 && b.last().is_some_and(Zero::is_zero) {
            b.pop();
        }
        let lb = b.last().expect("nonzero").clone();
        while a.len() >= b.len() && !is_zero(&a) {
            let shift = a.len() - b.len();
            let factor = a.last().expect("nonempty").clone() / &lb;
            for (i, c) in b.iter().enumerate() {
                a[shift + i] -= &factor * c;
            }
            a.pop();
            while a.len() > 1 && a.last().is_some_and(Zero::is_zero) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

/// Degree in `v` of the gcd of `a` and `b` after specializing the other
/// variables at a point where the leading coefficient of `a` in `v` survives.
/// This bounds the degree in `v` of the true gcd from above.
fn specialized_gcd_degree(a: &Polynomial, b: &Polynomial, v: usize) -> Option<usize> {
    let da = a.degree_in(v) as usize;
    for attempt in 0..4i64 {
        let point: Vec<BigRational> = (0..a.nvars() as i64)
            .map(|w| {
                BigRational::from_integer(BigInt::from(3 + 2 * w + 5 * attempt + w * w * attempt))
            })
            .collect();
        let sa = specialize(a, v, &point);
        if sa.len() - 1 != da {
            continue;
        }
        let sb = specialize(b, v, &point);
        return Some(univariate_gcd_degree(sa, sb));
    }
    None
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `v`; free of `v`.
pub fn content_in(p: &Polynomial, v: usize) -> Polynomial {
    let mut coeffs = p.coeffs_in(v);
    coeffs.retain(|c| !c.is_zero());
    // Sparse coefficients first keeps the intermediate gcds cheap.
    coeffs.sort_by_key(|c| (c.num_terms(), c.total_degree()));
    let mut acc = Polynomial::zero(p.nvars());
    for c in &coeffs {
        acc = gcd(&acc, c);
        if acc.is_constant() {
            return Polynomial::one(p.nvars());
        }
    }
    acc
}

/// Primitive part of `p` with respect to `v`, normalized.
pub fn primitive_part_in(p: &Polynomial, v: usize) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, v);
    normalize(&p.div_exact(&c).expect("content divides"))
}

/// Gcd of two polynomials primitive in `v` that both involve `v`.
fn primitive_prs(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    loop {
        let (_, r, _) = a.pseudo_div_rem(&b, v);
        if r.is_zero() {
            return primitive_part_in(&b, v);
        }
        if r.degree_in(v) == 0 {
            return Polynomial::one(a.nvars());
        }
        a = b;
        b = primitive_part_in(&r, v);
    }
}

/// Gcd of `a` and `b` as univariate polynomials in `v` over the fraction field
/// of the other variables: the primitive part in `v` of the full gcd.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    if a.is_zero() && b.is_zero() {
        return Polynomial::zero(a.nvars());
    }
    if a.is_zero() {
        return primitive_part_in(b, v);
    }
    if b.is_zero() {
        return primitive_part_in(a, v);
    }
    let g = gcd(a, b);
    if !g.involves(v) {
        return Polynomial::one(a.nvars());
    }
    primitive_part_in(&g, v)
}

/// Least common multiple, normalized.
pub fn lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero(a.nvars());
    }
    let g = gcd(a, b);
    normalize(&(&a.div_exact(&g).expect("gcd divides") * b))
}

/// Yun's squarefree decomposition of `p` with respect to `v`.
///
/// Factors are primitive in `v`, pairwise coprime, squarefree, normalized,
/// and listed by strictly increasing multiplicity; factors free of `v` are
/// dropped, so `p` equals their product times a factor free of `v`.
pub fn squarefree_decomposition(p: &Polynomial, v: usize) -> Vec<(Polynomial, u32)> {
    assert!(!p.is_zero(), "squarefree decomposition of zero");
    let mut out = Vec::new();
    if !p.involves(v) {
        return out;
    }
    let p = primitive_part_in(p, v);
    let dp = p.partial(v);
    let g = gcd(&p, &dp);
    let mut c = p.div_exact(&g).expect("gcd divides");
    let mut d = &dp.div_exact(&g).expect("gcd divides") - &c.partial(v);
    let mut k = 1;
    while c.involves(v) {
        let a = gcd(&c, &d);
        c = c.div_exact(&a).expect("gcd divides");
        d = &d.div_exact(&a).expect("gcd divides") - &c.partial(v);
        if a.involves(v) {
            out.push((normalize(&a), k));
        }
        k += 1;
    }
    out
}

/// Whether `p` is squarefree as a polynomial in `v`.
pub fn is_squarefree_in(p: &Polynomial, v: usize) -> bool {
    if p.is_zero() {
        return false;
    }
    if !p.involves(v) {
        return true;
    }
    !gcd(p, &p.partial(v)).involves(v)
}
