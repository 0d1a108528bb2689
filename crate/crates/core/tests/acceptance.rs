//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on failure.

mod common;

use std::cmp::Ordering;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use serde_json::Value;

use towerdecomp::arith::gcd::primitive_part_in;
use towerdecomp::arith::RationalFunction;
use towerdecomp::cli::commands::{execute, Command, Format, Request};
use towerdecomp::decomp::{add_decomp_in_field, is_remainder};
use towerdecomp::elem::{elementary_integrability, ElementaryVerdict};
use towerdecomp::embed::{
    apply_homomorphism, associated_matrix, embed_well_generated, is_well_generated,
    normalize_tower, significant_data, WellGeneratedFailure,
};
use towerdecomp::hermite::hermite_reduce_proper;
use towerdecomp::matryoshka::{compare_order, is_t_simple};
use towerdecomp::tower::{examples, normalize_generators, RejectionReason, Tower, Validation};

use common::{
    oracle_derivative, q, random_element, random_log_tower, random_proper, random_tower, rng,
};

const LI_TOWER: &str = include_str!("../../../towers/li.tower");
const DEPENDENT_TOWER: &str = include_str!("../../../towers/dependent.tower");
const NOT_SIMPLE_TOWER: &str = include_str!("../../../towers/not_simple.tower");
const THREE_COLUMN_TOWER: &str = include_str!("../../../towers/three_column.tower");

const LI_INPUT: &str = "1/(t1*t2) + (t2 - 2*x*t1)/t1^2 + t3";

type Remainders = Vec<(Tower, RationalFunction)>;
type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn request(command: Command, tower: &str, exprs: &[&str], format: Format) -> Request {
    Request {
        command,
        tower_src: tower.to_string(),
        exprs: exprs.iter().map(|s| s.to_string()).collect(),
        format,
        normalize: false,
        matrix: false,
    }
}

fn differs_by_constant(a: &RationalFunction, b: &RationalFunction) -> bool {
    (a - b).constant_value().is_some()
}

fn li_example(found: &mut Remainders) -> Outcome {
    let tower = examples::li_tower();
    let p = |s| tower.parse(s).unwrap();
    let f = p(LI_INPUT);
    let dec = add_decomp_in_field(&tower, &f).map_err(|e| e.to_string())?;
    ensure!(dec.r == p("1/(t1*t2)"), "r = {:?}", dec.r);
    ensure!(
        oracle_derivative(&tower, &dec.g) + dec.r.clone() == f,
        "g' + r differs from f"
    );
    let expected_g = p("x*t3 + t2^2/2 - t2 - (x*t2 + x^2)/t1");
    ensure!(
        differs_by_constant(&dec.g, &expected_g),
        "g differs from the expected value by a non-constant"
    );

    let out = execute(&request(
        Command::Decomp,
        LI_TOWER,
        &[LI_INPUT],
        Format::Json,
    ))
    .map_err(|e| e.to_string())?;
    let doc: Value = serde_json::from_str(&out.output).map_err(|e| e.to_string())?;
    let field = |k: &str| {
        tower
            .parse(doc[k].as_str().unwrap_or_default())
            .map_err(|e| e.to_string())
    };
    ensure!(field("r")? == dec.r, "CLI remainder differs");
    ensure!(
        differs_by_constant(&field("g")?, &expected_g),
        "CLI g differs"
    );
    ensure!(doc["verified"] == Value::Bool(true), "CLI did not verify");
    found.push((tower, dec.r));
    Ok(())
}

fn li_elementary(_: &mut Remainders) -> Outcome {
    let tower = examples::li_tower();
    let f = tower.parse(LI_INPUT).unwrap();
    let verdict = elementary_integrability(&tower, &f).map_err(|e| e.to_string())?;
    let ElementaryVerdict::Yes {
        witness,
        rational_part,
        ..
    } = verdict
    else {
        return Err(format!("expected Yes, got {verdict:?}"));
    };
    let t2 = tower.parse("t2").unwrap();
    ensure!(witness == vec![(q(1), t2.clone())], "witness {witness:?}");
    let dlog = &oracle_derivative(&tower, &t2) / &t2;
    ensure!(
        oracle_derivative(&tower, &rational_part) + dlog == f,
        "antiderivative does not differentiate back"
    );
    let out = execute(&request(
        Command::Elementary,
        LI_TOWER,
        &[LI_INPUT],
        Format::Text,
    ))
    .map_err(|e| e.to_string())?;
    ensure!(
        out.output.contains("elementary: yes") && out.output.contains("log(t2)"),
        "CLI output {}",
        out.output
    );
    Ok(())
}

fn finer_remainder(found: &mut Remainders) -> Outcome {
    let tower = examples::well_generated_three();
    let f = tower.parse("(u2+u3)/(x*u1)").unwrap();
    let dec = add_decomp_in_field(&tower, &f).map_err(|e| e.to_string())?;
    ensure!(
        dec.r == tower.parse("u2/(x*u1)").unwrap(),
        "r = {:?}",
        dec.r
    );
    ensure!(
        compare_order(&tower, &dec.r, &f) == Ordering::Less,
        "remainder is not lower than f"
    );
    ensure!(
        oracle_derivative(&tower, &dec.g) + dec.r.clone() == f,
        "g' + r differs from f"
    );
    found.push((tower, dec.r));
    Ok(())
}

fn significant(_: &mut Remainders) -> Outcome {
    let tower = examples::dependent_significant();
    let p = |s| tower.parse(s).unwrap();
    let sd = significant_data(&tower);
    ensure!(sd.sv == vec![0, 1, 1], "sv = {:?}", sd.sv);
    ensure!(
        sd.sc == vec![p("1/x"), p("1/(x*t1)"), p("1/(x*t1)")],
        "sc = {:?}",
        sd.sc
    );
    match is_well_generated(&tower) {
        Err(WellGeneratedFailure::Cli { index: 3, coeffs }) => {
            ensure!(coeffs == vec![q(0), q(1)], "certificate {coeffs:?}");
        }
        other => return Err(format!("expected (CLI) failure, got {other:?}")),
    }
    Ok(())
}

fn embedding(found: &mut Remainders) -> Outcome {
    let source = examples::three_column_source();
    let p = |s| source.parse(s).unwrap();
    let a = associated_matrix(&source);
    let expected_f = [
        ["1/x", "1/x", "1/(x+1)"],
        ["0", "(1/x)/t1", "(1/x)/(t1+1)"],
        ["0", "0", "(1+t1)/(x*t1*t2)"],
    ];
    for (i, row) in expected_f.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            ensure!(
                a.get(i, j + 1) == &p(e),
                "F entry ({i}, {}) = {:?}",
                j + 1,
                a.get(i, j + 1)
            );
        }
    }

    let e = embed_well_generated(&source).map_err(|e| e.to_string())?;
    let target = &e.target;
    let u = |s| target.parse(s).unwrap();
    ensure!(e.width() == 5, "w = {}", e.width());
    ensure!(
        e.images[1..] == [u("u1"), u("u1+u3"), u("u2+u4+u5")],
        "images {:?}",
        e.images
    );
    let expected_args = ["x", "x+1", "u1", "u1+1", "u1+u3"];
    for (k, s) in expected_args.iter().enumerate() {
        ensure!(
            target.generator(k + 1).argument() == Some(&u(s)),
            "u{} has argument {:?}",
            k + 1,
            target.generator(k + 1).argument()
        );
    }
    let b = associated_matrix(target);
    let du1 = target.derivative(1).clone();
    let du13 = oracle_derivative(target, &u("u1+u3"));
    let staircase = [
        (0, 1, u("1/x")),
        (0, 2, u("1/(x+1)")),
        (1, 3, &du1 / &u("u1")),
        (1, 4, &du1 / &u("u1+1")),
        (3, 5, &du13 / &u("u1+u3")),
    ];
    for i in 0..5 {
        for j in 1..=5 {
            let want = staircase
                .iter()
                .find(|(r, c, _)| *r == i && *c == j)
                .map(|(_, _, v)| v.clone())
                .unwrap_or_else(|| target.zero());
            ensure!(
                b.get(i, j) == &want,
                "E entry ({i}, {j}) = {:?}",
                b.get(i, j)
            );
        }
    }

    let f1 = p("((t1+1)^2 + t1*t2)/(x*t1*(t1+1)*t2)");
    let f2 = p("t3/x");
    let r1 = add_decomp_in_field(&source, &f1)
        .map_err(|e| e.to_string())?
        .r;
    let r2 = add_decomp_in_field(&source, &f2)
        .map_err(|e| e.to_string())?
        .r;
    let rt1 = add_decomp_in_field(target, &apply_homomorphism(&e, &f1))
        .map_err(|e| e.to_string())?
        .r;
    let rt2 = add_decomp_in_field(target, &apply_homomorphism(&e, &f2))
        .map_err(|e| e.to_string())?
        .r;
    ensure!(
        apply_homomorphism(&e, &f1) == u("((u1+1)^2 + u1*(u1+u3))/(x*u1*(u1+1)*(u1+u3))"),
        "phi(f1)"
    );
    ensure!(r1 == f1, "r1 = {r1:?}");
    ensure!(rt1.is_zero(), "r~1 = {rt1:?}");
    ensure!(
        r2 == p("-t1/(x+1) + 1/(x*(t1+1)) - (t1+1)/(x*t2)"),
        "r2 = {r2:?}"
    );
    ensure!(rt2 == u("-u1/(x+1) - (u1+1)/(x*(u1+u3))"), "r~2 = {rt2:?}");

    let out = execute(&request(
        Command::Embed,
        THREE_COLUMN_TOWER,
        &["t3/x"],
        Format::Json,
    ))
    .map_err(|e| e.to_string())?;
    let doc: Value = serde_json::from_str(&out.output).map_err(|e| e.to_string())?;
    let cli_r = u(doc["decompositions"][0]["r"].as_str().unwrap_or_default());
    ensure!(cli_r == rt2, "CLI remainder in the target differs");

    found.push((source.clone(), r1));
    found.push((source, r2));
    found.push((target.clone(), rt2));
    Ok(())
}

fn differentiation_oracle(found: &mut Remainders) -> Outcome {
    let mut rng = rng(6);
    let mut count = 0;
    for round in 0..40 {
        let n = 1 + round % 3;
        let tower = random_tower(&mut rng, n);
        for _ in 0..5 {
            let g = random_element(&mut rng, &tower);
            let f = oracle_derivative(&tower, &g);
            ensure!(
                tower.differentiate(&g) == f,
                "differentiate disagrees with the oracle on {g:?}"
            );
            let dec = add_decomp_in_field(&tower, &f).map_err(|e| format!("{e} on g = {g:?}"))?;
            ensure!(
                dec.r.is_zero(),
                "nonzero remainder {:?} for g = {g:?}",
                dec.r
            );
            ensure!(
                differs_by_constant(&dec.g, &g),
                "primitive {:?} for g = {g:?}",
                dec.g
            );
            found.push((tower.clone(), dec.r));
            count += 1;
        }
    }
    ensure!(count >= 200, "only {count} samples");
    Ok(())
}

fn fixed_point(found: &Remainders) -> Outcome {
    ensure!(
        found.len() >= 200,
        "only {} remainders collected",
        found.len()
    );
    for (tower, r) in found {
        let dec = add_decomp_in_field(tower, r).map_err(|e| e.to_string())?;
        ensure!(&dec.r == r, "remainder {r:?} is not a fixed point");
        ensure!(
            dec.g.constant_value().is_some(),
            "nonconstant g {:?} for {r:?}",
            dec.g
        );
        ensure!(
            is_remainder(tower, r).map_err(|e| e.to_string())? == Ok(()),
            "{r:?} fails is_remainder"
        );
    }
    Ok(())
}

fn validation(_: &mut Remainders) -> Outcome {
    ensure!(
        examples::li_tower().validation() == &Validation::SPrimitive,
        "li tower rejected"
    );
    let dep = examples::custom(&[("t1", "1/x", false), ("t2", "2/x", false)]);
    match dep.validation() {
        Validation::Rejected(r) => {
            ensure!(r.index == 2, "rejected at {}", r.index);
            ensure!(
                r.reason == RejectionReason::Dependence { coeffs: vec![q(2)] },
                "reason {:?}",
                r.reason
            );
        }
        other => return Err(format!("dependent tower: {other:?}")),
    }
    let ns = examples::custom(&[("t1", "x", true), ("t2", "1/t1^2", false)]);
    match ns.validation() {
        Validation::Rejected(r) if r.reason == RejectionReason::NotSimple => {}
        other => return Err(format!("non-simple tower: {other:?}")),
    }
    let normalized = normalize_generators(&ns).map_err(|e| e.to_string())?;
    ensure!(
        normalized.tower.is_s_primitive(),
        "normalized tower rejected"
    );
    ensure!(
        normalized.shifts == vec![(2, ns.parse("-x/t1").unwrap())],
        "shifts {:?}",
        normalized.shifts
    );

    let code = |cmd, src: &str, normalize| {
        let mut req = request(cmd, src, &["1"], Format::Text);
        req.normalize = normalize;
        match execute(&req) {
            Ok(r) => (r.code, r.output),
            Err(e) => (e.exit_code(), e.to_string()),
        }
    };
    let (c, msg) = code(Command::Decomp, DEPENDENT_TOWER, false);
    ensure!(
        c == 2 && msg.contains("not S-primitive: dependence"),
        "CLI on dependent tower: {c} {msg}"
    );
    let (c, _) = code(Command::Check, LI_TOWER, false);
    ensure!(c == 0, "CLI check on li tower: {c}");
    let (c, _) = code(Command::Check, NOT_SIMPLE_TOWER, false);
    ensure!(c == 2, "CLI check on non-simple tower: {c}");
    let (c, msg) = code(Command::Check, NOT_SIMPLE_TOWER, true);
    ensure!(
        c == 0 && msg.contains("shift t2: -x/t1"),
        "CLI check --normalize: {c} {msg}"
    );
    Ok(())
}

fn hermite_reconstruction(_: &mut Remainders) -> Outcome {
    let mut rng = rng(9);
    let mut count = 0;
    for round in 0..70 {
        let n = 1 + round % 3;
        let tower = random_tower(&mut rng, n);
        for level in 0..=n {
            let f = random_proper(&mut rng, &tower, level);
            let (g, h) =
                hermite_reduce_proper(&tower, &f, level).map_err(|e| format!("{e} on {f:?}"))?;
            ensure!(
                oracle_derivative(&tower, &g) + h.clone() == f,
                "f != g' + h for {f:?}"
            );
            ensure!(
                is_t_simple(&h, level),
                "h = {h:?} not simple at level {level}"
            );
            if !h.is_zero() {
                let dh = primitive_part_in(h.den(), level);
                let df = primitive_part_in(f.den(), level);
                ensure!(
                    df.div_exact(&dh).is_some(),
                    "den(h) does not divide den(f) for {f:?}"
                );
            }
            count += 1;
        }
    }
    ensure!(count >= 200, "only {count} samples");
    Ok(())
}

fn embedding_homomorphism(_: &mut Remainders) -> Outcome {
    let source = examples::three_column_source();
    let e = embed_well_generated(&source).map_err(|e| e.to_string())?;
    let mut rng = rng(10);
    for _ in 0..100 {
        let f = random_element(&mut rng, &source);
        let lhs = oracle_derivative(&e.target, &apply_homomorphism(&e, &f));
        let rhs = apply_homomorphism(&e, &oracle_derivative(&source, &f));
        ensure!(
            lhs == rhs,
            "phi does not commute with the derivation on {f:?}"
        );
    }
    let mut towers = 0;
    for k in 0..24 {
        let n = 1 + k % 3;
        let tower = random_log_tower(&mut rng, n);
        let normalized = normalize_tower(&tower).map_err(|e| format!("{e} on {tower:?}"))?;
        let e = embed_well_generated(&normalized.tower).map_err(|e| format!("{e} on {tower:?}"))?;
        let w = e.width();
        ensure!(n <= w && w <= n * (n + 1) / 2, "w = {w} for n = {n}");
        for j in 1..=n {
            let img = apply_homomorphism(&e, &normalized.images[j]);
            let lhs = oracle_derivative(&e.target, &img);
            let rhs = apply_homomorphism(&e, &normalized.apply(tower.derivative(j)));
            ensure!(lhs == rhs, "composite map does not commute on t{j}");
        }
        towers += 1;
    }
    ensure!(towers >= 20, "only {towers} towers");
    Ok(())
}

fn run(name: &str, check: impl FnOnce() -> Outcome) -> bool {
    let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    match result {
        Ok(()) => {
            println!("PASS {name}");
            true
        }
        Err(msg) => {
            println!("FAIL {name}: {msg}");
            false
        }
    }
}

type Criterion = (&'static str, fn(&mut Remainders) -> Outcome);

fn main() -> ExitCode {
    let mut found = Remainders::new();
    let criteria: [Criterion; 6] = [
        ("1 li example decomposition", li_example),
        ("2 li example elementary integral", li_elementary),
        (
            "3 finer remainder in a well-generated tower",
            finer_remainder,
        ),
        ("4 significant data", significant),
        ("5 embedding and remainders", embedding),
        ("6 differentiation oracle", differentiation_oracle),
    ];
    let mut ok = true;
    for (name, check) in criteria {
        ok &= run(name, || check(&mut found));
    }
    ok &= run("7 remainder fixed point", || fixed_point(&found));
    let rest: [Criterion; 3] = [
        ("8 validation", validation),
        ("9 hermite reconstruction", hermite_reconstruction),
        ("10 embedding homomorphism", embedding_homomorphism),
    ];
    for (name, check) in rest {
        ok &= run(name, || check(&mut found));
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
