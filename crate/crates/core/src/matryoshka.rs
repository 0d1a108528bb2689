//! The direct-sum view of a tower element: projections onto the nested
//! proper/polynomial layers, head monomials and coefficients, the indicator,
//! the remainder order, and simplicity.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::arith::gcd::is_squarefree_in;
use crate::arith::{int, Polynomial, RationalFunction};
use crate::tower::Tower;

/// A power product of `t_1, …, t_n`; `x` is excluded.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Exponent of `t_i`, with `i` counted from 1.
    pub fn exponent(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn times_power(&self, i: usize, k: u32) -> Monomial {
        let mut e = self.0.clone();
        e[i - 1] += k;
        Monomial(e)
    }

    /// Divide out `t_i^k`.
    pub fn without_power(&self, i: usize, k: u32) -> Monomial {
        let mut e = self.0.clone();
        e[i - 1] -= k;
        Monomial(e)
    }

    /// `self` as an element of the ambient field with `n + 1` variables.
    pub fn to_rf(&self) -> RationalFunction {
        let nvars = self.0.len() + 1;
        let mut exps = vec![0];
        exps.extend_from_slice(&self.0);
        RationalFunction::from_poly(Polynomial::monomial(nvars, exps, int(1)))
    }
}

/// Pure lex with `t_n` most significant.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Head monomial; `None` stands for the zero marker, which sorts below every
/// monomial.
pub type HeadMonomial = Option<Monomial>;

/// Projections of an element onto the summands `P_0, …, P_n`.
///
/// Layer `i` maps monomials in `t_{i+1}, …, t_n` to coefficients that are
/// `t_i`-proper elements of `K_i` (for `i = 0`, arbitrary elements of Q(x)).
#[derive(Clone, Debug, PartialEq)]
pub struct Matryoshka {
    nvars: usize,
    layers: Vec<BTreeMap<Monomial, RationalFunction>>,
}

impl Matryoshka {
    pub fn levels(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, i: usize) -> &BTreeMap<Monomial, RationalFunction> {
        &self.layers[i]
    }

    /// `π_i(f)` as a single rational function.
    pub fn projection(&self, i: usize) -> RationalFunction {
        let mut acc = RationalFunction::zero(self.nvars);
        for (m, c) in &self.layers[i] {
            if m.is_unit() {
                acc = &acc + c;
            } else {
                acc = &acc + &(c * &m.to_rf());
            }
        }
        acc
    }

    pub fn projections(&self) -> Vec<RationalFunction> {
        (0..self.layers.len()).map(|i| self.projection(i)).collect()
    }

    /// Head monomial and coefficient of layer `i`.
    pub fn head(&self, i: usize) -> Option<(&Monomial, &RationalFunction)> {
        self.layers[i].iter().next_back()
    }
}

/// Matryoshka decomposition of `f`.
pub fn project(tower: &Tower, f: &RationalFunction) -> Matryoshka {
    let n = tower.len();
    let nvars = n + 1;
    assert_eq!(f.nvars(), nvars, "element does not live in this tower");
    let mut layers = vec![BTreeMap::new(); n + 1];
    let mut pending: BTreeMap<Monomial, RationalFunction> = BTreeMap::new();
    if !f.is_zero() {
        pending.insert(Monomial::unit(n), f.clone());
    }
    for level in (1..=n).rev() {
        let mut next: BTreeMap<Monomial, RationalFunction> = BTreeMap::new();
        for (m, c) in pending {
            let (proper, poly) = c.split_proper_poly(level);
            if !proper.is_zero() {
                layers[level].insert(m.clone(), proper);
            }
            if poly.is_zero() {
                continue;
            }
            let coeffs = poly
                .poly_coeffs_in(level)
                .expect("polynomial part has a denominator free of the level variable");
            for (k, coeff) in coeffs.into_iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                add_into(&mut next, m.times_power(level, k as u32), coeff);
            }
        }
        pending = next;
    }
    layers[0] = pending;
    Matryoshka { nvars, layers }
}

fn add_into(map: &mut BTreeMap<Monomial, RationalFunction>, m: Monomial, c: RationalFunction) {
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// Per-layer and overall head data of an element.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadData {
    pub hm_i: Vec<HeadMonomial>,
    pub hc_i: Vec<RationalFunction>,
    pub hm: HeadMonomial,
    pub hc: RationalFunction,
    /// Layers whose head monomial equals `hm`, ascending.
    pub index_set: Vec<usize>,
}

pub fn head_data(tower: &Tower, f: &RationalFunction) -> HeadData {
    head_data_of(&project(tower, f))
}

pub fn head_data_of(m: &Matryoshka) -> HeadData {
    let zero = RationalFunction::zero(m.nvars);
    let mut hm_i = Vec::with_capacity(m.levels());
    let mut hc_i = Vec::with_capacity(m.levels());
    for i in 0..m.levels() {
        match m.head(i) {
            Some((mono, c)) => {
                hm_i.push(Some(mono.clone()));
                hc_i.push(c.clone());
            }
            None => {
                hm_i.push(None);
                hc_i.push(zero.clone());
            }
        }
    }
    let hm = hm_i.iter().max().cloned().flatten();
    let (index_set, hc) = if hm.is_none() {
        (Vec::new(), zero)
    } else {
        let set: Vec<usize> = (0..hm_i.len()).filter(|&i| hm_i[i] == hm).collect();
        let mut hc = zero;
        for &i in &set {
            hc = &hc + &hc_i[i];
        }
        (set, hc)
    };
    HeadData {
        hm_i,
        hc_i,
        hm,
        hc,
        index_set,
    }
}

/// Lowest generator index occurring in `m`, or `n` for the unit monomial.
pub fn indicator(m: &Monomial) -> usize {
    let n = m.0.len();
    m.0.iter().position(|&e| e != 0).map_or(n, |i| i + 1)
}

/// Sort key of the remainder order: denominator degree in `t_n`, then head
/// monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrderKey {
    pub den_degree: u32,
    pub hm: HeadMonomial,
}

pub fn order_key(tower: &Tower, f: &RationalFunction) -> OrderKey {
    let n = tower.len();
    let den_degree = if n == 0 { 0 } else { f.den().degree_in(n) };
    OrderKey {
        den_degree,
        hm: head_data(tower, f).hm,
    }
}

/// `Less` when `f` is lower than `g`; `Equal` when neither is lower.
pub fn compare_order(tower: &Tower, f: &RationalFunction, g: &RationalFunction) -> Ordering {
    order_key(tower, f).cmp(&order_key(tower, g))
}

/// Proper in variable `var` with a denominator squarefree in `var`.
pub fn is_t_simple(f: &RationalFunction, var: usize) -> bool {
    f.is_zero() || (f.is_proper_in(var) && is_squarefree_in(f.den(), var))
}

/// Every projection `π_i(f)` is `t_i`-simple, with `t_0 = x`.
pub fn is_simple(tower: &Tower, f: &RationalFunction) -> bool {
    let m = project(tower, f);
    (0..m.levels()).all(|i| m.layer(i).values().all(|c| is_t_simple(c, i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::examples;

    #[test]
    fn lex_order_on_monomials() {
        let t3 = Monomial(vec![0, 0, 1]);
        let t2sq = Monomial(vec![0, 2, 0]);
        assert!(t3 > t2sq);
        assert!(Some(Monomial::unit(3)) > None);
        assert_eq!(indicator(&Monomial(vec![0, 1, 2])), 2);
        assert_eq!(indicator(&Monomial::unit(3)), 3);
        assert_eq!(indicator(&Monomial(vec![1, 0, 0, 0, 0])), 1);
    }

    #[test]
    fn projections_of_example_element() {
        let tower = examples::li_tower();
        let f = tower.parse("1/(t1*t2) + (t2 - 2*x*t1)/t1^2 + t3").unwrap();
        let m = project(&tower, &f);
        let expected = [
            tower.parse("t3").unwrap(),
            tower.parse("t2/t1^2 - 2*x/t1").unwrap(),
            tower.parse("1/(t1*t2)").unwrap(),
            tower.parse("0").unwrap(),
        ];
        assert_eq!(m.projections(), expected);
        let hd = head_data_of(&m);
        assert_eq!(hd.hm, Some(Monomial(vec![0, 0, 1])));
        assert!(hd.hc.is_one());
        assert_eq!(hd.index_set, vec![0]);
    }

    #[test]
    fn projection_of_base_field_element() {
        let tower = examples::li_tower();
        let f = tower.parse("1/(x+1)").unwrap();
        let m = project(&tower, &f);
        assert_eq!(m.projection(0), f);
        assert!((1..4).all(|i| m.projection(i).is_zero()));
        let d = tower.parse("1/(x*t1)").unwrap();
        assert_eq!(project(&tower, &d).projection(1), d);
    }

    #[test]
    fn heads_and_order() {
        let tower = examples::li_tower();
        let f = tower.parse("1/(t1*t2)").unwrap();
        let hd = head_data(&tower, &f);
        assert_eq!(hd.hm, Some(Monomial::unit(3)));
        assert_eq!(hd.hc, f);
        let z = head_data(&tower, &tower.parse("0").unwrap());
        assert_eq!(z.hm, None);
        assert!(z.hc.is_zero());
        let a = tower.parse("1/t3").unwrap();
        let b = tower.parse("1/t3^2").unwrap();
        assert_eq!(compare_order(&tower, &a, &b), Ordering::Less);
        assert_eq!(compare_order(&tower, &a, &a), Ordering::Equal);
    }

    #[test]
    fn simplicity() {
        let tower = examples::li_tower();
        assert!(is_simple(&tower, &tower.parse("1/(x*t1)").unwrap()));
        assert!(!is_simple(&tower, &tower.parse("1/t1^2").unwrap()));
        assert!(is_simple(&tower, &tower.parse("0").unwrap()));
        assert!(!is_simple(&tower, &tower.parse("t3").unwrap()));
    }
}
