//! Exact linear algebra over Q, and reduction of rational-function identities
//! with unknown constant coefficients to linear systems.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{Exponents, Polynomial};
use super::ratfun::{common_denominator, RationalFunction};

/// A linear system `A c = b` over Q with a fixed number of unknowns.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    unknowns: usize,
    rows: Vec<(Vec<BigRational>, BigRational)>,
}

impl LinearSystem {
    pub fn new(unknowns: usize) -> Self {
        LinearSystem {
            unknowns,
            rows: Vec::new(),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn add_equation(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.unknowns);
        if coeffs.iter().all(Zero::is_zero) && rhs.is_zero() {
            return;
        }
        self.rows.push((coeffs, rhs));
    }

    /// Add the equations expressing `target = Σ c_j terms_j` where `terms_j`
    /// are the rational functions multiplying the unknowns listed in
    /// `indices`.
    pub fn add_identity(&mut self, target: &RationalFunction, terms: &[(usize, RationalFunction)]) {
        let nvars = target.nvars();
        let den = common_denominator(nvars, terms.iter().map(|(_, t)| t).chain([target]));
        let denf = RationalFunction::from_poly(den);
        let cleared = |f: &RationalFunction| -> Polynomial {
            let p = f * &denf;
            debug_assert!(p.is_polynomial());
            p.num().scale(&p.den().leading_coeff().recip())
        };
        let mut table: BTreeMap<Exponents, (Vec<BigRational>, BigRational)> = BTreeMap::new();
        let blank = || {
            (
                vec![BigRational::zero(); self.unknowns],
                BigRational::zero(),
            )
        };
        for (e, c) in cleared(target).terms() {
            table.entry(e.clone()).or_insert_with(blank).1 += c;
        }
        for (j, t) in terms {
            for (e, c) in cleared(t).terms() {
                table.entry(e.clone()).or_insert_with(blank).0[*j] += c;
            }
        }
        for (_, (row, rhs)) in table {
            self.add_equation(row, rhs);
        }
    }

    /// One solution (free unknowns set to zero), or `None` if inconsistent.
    pub fn solve(&self) -> Option<Vec<BigRational>> {
        let m = self.unknowns;
        let mut rows: Vec<Vec<BigRational>> = self
            .rows
            .iter()
            .map(|(c, r)| {
                let mut row = c.clone();
                row.push(r.clone());
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..m {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][col].recip();
            for entry in &mut rows[r][col..=m] {
                *entry = &*entry * &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (entry, p) in row[col..=m].iter_mut().zip(&pivot_row[col..=m]) {
                        *entry -= p * &f;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        if rows[r..].iter().any(|row| !row[m].is_zero()) {
            return None;
        }
        let mut sol = vec![BigRational::zero(); m];
        for (i, &col) in pivots.iter().enumerate() {
            sol[col] = rows[i][m].clone();
        }
        Some(sol)
    }
}

/// Constants `c` with `h = Σ c_j basis_j`, if any exist.
pub fn constant_combination(
    h: &RationalFunction,
    basis: &[RationalFunction],
) -> Option<Vec<BigRational>> {
    let mut sys = LinearSystem::new(basis.len());
    let terms: Vec<(usize, RationalFunction)> = basis.iter().cloned().enumerate().collect();
    sys.add_identity(h, &terms);
    let sol = sys.solve()?;
    debug_assert!({
        let mut acc = RationalFunction::zero(h.nvars());
        for (c, b) in sol.iter().zip(basis) {
            acc = &acc + &b.scale(c);
        }
        &acc == h
    });
    Some(sol)
}

/// Whether a vector of rationals is all zero.
pub fn is_zero_vector(v: &[BigRational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `Σ c_j f_j`.
pub fn linear_combination(
    nvars: usize,
    coeffs: &[BigRational],
    items: &[RationalFunction],
) -> RationalFunction {
    let mut acc = RationalFunction::zero(nvars);
    for (c, f) in coeffs.iter().zip(items) {
        if c.is_one() {
            acc = &acc + f;
        } else if !c.is_zero() {
            acc = &acc + &f.scale(c);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn gaussian_elimination() {
        let mut s = LinearSystem::new(2);
        s.add_equation(vec![q(1, 1), q(2, 1)], q(5, 1));
        s.add_equation(vec![q(3, 1), q(-1, 1)], q(1, 1));
        assert_eq!(s.solve(), Some(vec![q(1, 1), q(2, 1)]));
        s.add_equation(vec![q(1, 1), q(1, 1)], q(4, 1));
        assert_eq!(s.solve(), None);
    }

    #[test]
    fn combinations_of_rational_functions() {
        let n = 2;
        let x = RationalFunction::var(n, 0);
        let t = RationalFunction::var(n, 1);
        let basis = vec![x.inv(), t.inv(), (&x * &t).inv()];
        assert_eq!(
            constant_combination(&t.inv(), &basis),
            Some(vec![q(0, 1), q(1, 1), q(0, 1)])
        );
        let one = RationalFunction::one(n);
        assert_eq!(constant_combination(&(&x + &one).inv(), &basis[..2]), None);
        assert_eq!(
            constant_combination(&RationalFunction::zero(n), &basis),
            Some(vec![q(0, 1); 3])
        );
    }
}
