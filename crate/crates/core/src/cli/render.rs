//! Text and LaTeX rendering of tower elements. Text output is in the
//! expression grammar and parses back to the same element.

use num_traits::{One, Signed, Zero};

use crate::arith::{Exponents, Polynomial, Rational, RationalFunction};
use crate::embed::AssociatedMatrix;

fn ordered_terms(p: &Polynomial) -> Vec<(&Exponents, &Rational)> {
    let mut terms: Vec<_> = p.terms().collect();
    terms.reverse();
    terms
}

fn monomial_text(e: &Exponents, names: &[&str]) -> Vec<String> {
    (0..names.len())
        .filter_map(|v| match e.get(v) {
            0 => None,
            1 => Some(names[v].to_string()),
            k => Some(format!("{}^{k}", names[v])),
        })
        .collect()
}

/// A polynomial as a sum of terms, leading term first.
pub fn poly_text(p: &Polynomial, names: &[&str]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (e, c)) in ordered_terms(p).into_iter().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let mut factors = monomial_text(e, names);
        if factors.is_empty() || !a.is_one() {
            factors.insert(0, a.to_string());
        }
        out.push_str(&factors.join("*"));
    }
    out
}

fn is_single_factor(p: &Polynomial) -> bool {
    p.num_terms() == 1 && {
        let (e, c) = p.leading_term().expect("one term");
        c.is_one() && (0..p.nvars()).filter(|&v| e.get(v) > 0).count() <= 1
    }
}

/// `f` in the expression grammar.
pub fn expr_text(f: &RationalFunction, names: &[&str]) -> String {
    let num = poly_text(f.num(), names);
    if f.den().is_one() {
        return num;
    }
    let num = if f.num().num_terms() > 1 {
        format!("({num})")
    } else {
        num
    };
    let den = poly_text(f.den(), names);
    if is_single_factor(f.den()) {
        format!("{num}/{den}")
    } else {
        format!("{num}/({den})")
    }
}

fn latex_name(name: &str) -> String {
    let split = name.find(|c: char| c.is_ascii_digit());
    match split {
        Some(k) if k > 0 && name[k..].chars().all(|c| c.is_ascii_digit()) => {
            format!("{}_{{{}}}", &name[..k], &name[k..])
        }
        _ => name.replace('_', "\\_"),
    }
}

fn latex_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn latex_poly(p: &Polynomial, names: &[&str]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (e, c)) in ordered_terms(p).into_iter().enumerate() {
        let neg = c.is_negative();
        if neg {
            out.push_str(if i == 0 { "-" } else { " - " });
        } else if i > 0 {
            out.push_str(" + ");
        }
        let a = c.abs();
        let vars: Vec<String> = (0..names.len())
            .filter_map(|v| match e.get(v) {
                0 => None,
                1 => Some(latex_name(names[v])),
                k => Some(format!("{}^{{{k}}}", latex_name(names[v]))),
            })
            .collect();
        if vars.is_empty() || !a.is_one() {
            out.push_str(&latex_rational(&a));
        }
        out.push_str(&vars.join(" "));
    }
    out
}

/// `f` as a LaTeX formula.
pub fn expr_latex(f: &RationalFunction, names: &[&str]) -> String {
    let num = latex_poly(f.num(), names);
    if f.den().is_one() {
        num
    } else {
        format!("\\frac{{{num}}}{{{}}}", latex_poly(f.den(), names))
    }
}

/// The associated matrix with rows `P_0, …, P_{n-1}` and columns `t_j′`.
pub fn matrix_latex(a: &AssociatedMatrix, names: &[&str]) -> String {
    let n = a.size();
    let mut out = format!("\\begin{{array}}{{c|{}}}\n", "c".repeat(n));
    let header: Vec<String> = (1..=n)
        .map(|j| format!("{}'", latex_name(names[j])))
        .collect();
    out.push_str(&format!("  & {} \\\\\n  \\hline\n", header.join(" & ")));
    for i in 0..n {
        let row: Vec<String> = (1..=n).map(|j| expr_latex(a.get(i, j), names)).collect();
        out.push_str(&format!("  P_{{{i}}} & {} \\\\\n", row.join(" & ")));
    }
    out.push_str("\\end{array}");
    out
}

/// The associated matrix as aligned text rows.
pub fn matrix_text(a: &AssociatedMatrix, names: &[&str]) -> String {
    let n = a.size();
    let cells: Vec<Vec<String>> = (0..n)
        .map(|i| (1..=n).map(|j| expr_text(a.get(i, j), names)).collect())
        .collect();
    let widths: Vec<usize> = (0..n)
        .map(|j| {
            cells
                .iter()
                .map(|r| r[j].chars().count())
                .chain(std::iter::once(names[j + 1].len() + 1))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w - s.chars().count()));
    let label_width = format!("P_{}", n.saturating_sub(1)).len();
    let mut lines = Vec::with_capacity(n + 1);
    let header: Vec<String> = (0..n)
        .map(|j| pad(&format!("{}'", names[j + 1]), widths[j]))
        .collect();
    lines.push(format!(
        "{}  | {}",
        " ".repeat(label_width),
        header.join(" | ")
    ));
    for (i, row) in cells.iter().enumerate() {
        let row: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, s)| pad(s, widths[j]))
            .collect();
        lines.push(format!(
            "{}  | {}",
            pad(&format!("P_{i}"), label_width),
            row.join(" | ")
        ));
    }
    lines
        .into_iter()
        .map(|l| l.trim_end().to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

/// A rational number in the expression grammar.
pub fn rational_text(c: &Rational) -> String {
    if c.is_zero() {
        "0".into()
    } else {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse::parse_expression;
    use crate::embed::associated_matrix;
    use crate::tower::examples;

    const NAMES: [&str; 3] = ["x", "t1", "t2"];

    fn round_trip(src: &str) -> String {
        let f = parse_expression(src, &NAMES, 3).unwrap();
        let text = expr_text(&f, &NAMES);
        assert_eq!(parse_expression(&text, &NAMES, 3).unwrap(), f, "{text}");
        text
    }

    #[test]
    fn text_forms() {
        assert_eq!(round_trip("1/(t1*t2)"), "1/(t1*t2)");
        assert_eq!(round_trip("-3/2*x^2 + 1"), "-3/2*x^2 + 1");
        assert_eq!(round_trip("1/x^2"), "1/x^2");
        assert_eq!(round_trip("-x/(2*x+1)"), "-1/2*x/(x + 1/2)");
        assert_eq!(round_trip("0"), "0");
        assert_eq!(round_trip("(x+t1)/t2"), "(t1 + x)/t2");
    }

    #[test]
    fn latex_forms() {
        let f = parse_expression("(t1+1)/(x*t1*t2)", &NAMES, 3).unwrap();
        assert_eq!(expr_latex(&f, &NAMES), "\\frac{t_{1} + 1}{x t_{1} t_{2}}");
        let tower = examples::log_x();
        let a = associated_matrix(&tower);
        let tex = matrix_latex(&a, &tower.names());
        assert!(tex.contains("P_{0} & \\frac{1}{x}"));
    }
}
