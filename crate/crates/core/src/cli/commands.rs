//! Command implementations. Every printed decomposition or antiderivative is
//! checked by differentiation first.

use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::RationalFunction;
use crate::cli::parse::ParseError;
use crate::cli::render::{expr_latex, expr_text, matrix_latex, matrix_text, rational_text};
use crate::cli::towerfile::{parse_tower_file, render_tower_file, TowerFileError};
use crate::decomp::{add_decomp_in_field, Decomposition};
use crate::elem::{elementary_integrability, ElementaryVerdict, NotElementary, Undecided};
use crate::embed::{
    associated_matrix, embed_well_generated, is_well_generated, normalize_tower, significant_data,
    NormalizationStep,
};
use crate::tower::{normalize_generators, Tower, TowerError, Validation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Decomp,
    Integrate,
    Elementary,
    Embed,
    Matrix,
    Check,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Latex,
}

#[derive(Clone, Debug)]
pub struct Request {
    pub command: Command,
    pub tower_src: String,
    pub exprs: Vec<String>,
    pub format: Format,
    pub normalize: bool,
    pub matrix: bool,
}

/// Output text and process exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub output: String,
    pub code: i32,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("tower file: {0}")]
    TowerFile(TowerFileError),
    #[error("expression `{src}`: {source}")]
    Expression { src: String, source: ParseError },
    #[error("{0}")]
    Validation(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Expression { .. } => 1,
            CliError::TowerFile(TowerFileError::Tower(_)) => 2,
            CliError::TowerFile(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        if let CliError::Input(_) = self {
            return "input";
        }
        match self.exit_code() {
            1 => "parse",
            2 => "validation",
            _ => "verification",
        }
    }

    /// Machine-readable form of the error.
    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "reason": self.to_string() })
    }
}

impl From<TowerFileError> for CliError {
    fn from(e: TowerFileError) -> Self {
        CliError::TowerFile(e)
    }
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Verification(e.to_string())
}

pub fn execute(req: &Request) -> Result<Report, CliError> {
    let tower = parse_tower_file(&req.tower_src)?;
    match req.command {
        Command::Decomp | Command::Integrate => decomp(req, tower),
        Command::Elementary => elementary(req, tower),
        Command::Embed => embed(req, tower),
        Command::Matrix => matrix(req, tower),
        Command::Check => check(req, tower),
    }
}

/// A validated tower plus the images of the file's variables in it.
struct Prepared {
    tower: Tower,
    images: Vec<RationalFunction>,
    shifts: Vec<(usize, RationalFunction)>,
}

impl Prepared {
    fn parse(&self, src: &str) -> Result<RationalFunction, CliError> {
        self.tower
            .parse(src)
            .map(|f| f.substitute(&self.images))
            .map_err(|source| CliError::Expression {
                src: src.to_string(),
                source,
            })
    }

    fn names(&self) -> Vec<&str> {
        self.tower.names()
    }
}

fn prepare(tower: Tower, normalize: bool) -> Result<Prepared, CliError> {
    let identity: Vec<_> = (0..tower.nvars()).map(|i| tower.var(i)).collect();
    let (tower, images, shifts) = if normalize {
        let out = normalize_generators(&tower).map_err(|e| match e {
            TowerError::HeadMonomialNotOne(_) => {
                CliError::Validation(format!("cannot normalize: {e}"))
            }
            other => internal(other),
        })?;
        let mut images = identity;
        for (i, g) in &out.shifts {
            images[*i] = &out.tower.var(*i) + g;
        }
        (out.tower, images, out.shifts)
    } else {
        (tower.validated(), identity, Vec::new())
    };
    if let Validation::Rejected(rejection) = tower.validation() {
        return Err(CliError::Validation(rejection.to_string()));
    }
    Ok(Prepared {
        tower,
        images,
        shifts,
    })
}

fn single_expr(req: &Request) -> Result<&str, CliError> {
    match req.exprs.as_slice() {
        [e] => Ok(e),
        [] => Err(CliError::Input("this command needs --expr".into())),
        _ => Err(CliError::Input("this command takes a single --expr".into())),
    }
}

fn render(f: &RationalFunction, names: &[&str], format: Format) -> String {
    match format {
        Format::Latex => expr_latex(f, names),
        _ => expr_text(f, names),
    }
}

fn shift_lines(p: &Prepared, format: Format) -> Vec<String> {
    let names = p.names();
    p.shifts
        .iter()
        .map(|(i, g)| format!("shift {}: {}", names[*i], render(g, &names, format)))
        .collect()
}

fn shifts_json(p: &Prepared) -> Value {
    let names = p.names();
    Value::Array(
        p.shifts
            .iter()
            .map(|(i, g)| json!({ "generator": names[*i], "shift": expr_text(g, &names) }))
            .collect(),
    )
}

fn verified_decomposition(tower: &Tower, f: &RationalFunction) -> Result<Decomposition, CliError> {
    let dec = add_decomp_in_field(tower, f).map_err(internal)?;
    if &tower.differentiate(&dec.g) + &dec.r != *f {
        return Err(CliError::Verification("f differs from g' + r".into()));
    }
    Ok(dec)
}

fn decomp(req: &Request, tower: Tower) -> Result<Report, CliError> {
    let src = single_expr(req)?;
    let p = prepare(tower, req.normalize)?;
    let f = p.parse(src)?;
    let dec = verified_decomposition(&p.tower, &f)?;
    let names = p.names();
    let integrable = dec.r.is_zero();
    let output = match req.format {
        Format::Json => {
            let mut doc = json!({
                "tower": render_tower_file(&p.tower),
                "input": expr_text(&f, &names),
                "g": expr_text(&dec.g, &names),
                "r": expr_text(&dec.r, &names),
                "integrable": integrable,
                "verified": true,
            });
            if req.normalize {
                doc["shifts"] = shifts_json(&p);
            }
            doc.to_string()
        }
        format => {
            let mut lines = shift_lines(&p, format);
            lines.push(format!("f = {}", render(&f, &names, format)));
            if req.command == Command::Integrate {
                if integrable {
                    lines.push(format!("integral = {}", render(&dec.g, &names, format)));
                } else {
                    lines.push("no antiderivative in the tower".into());
                    lines.push(format!("remainder = {}", render(&dec.r, &names, format)));
                }
            } else {
                lines.push(format!("g = {}", render(&dec.g, &names, format)));
                lines.push(format!("r = {}", render(&dec.r, &names, format)));
                lines.push(format!("integrable: {}", yes_no(integrable)));
            }
            lines.push("verified: yes".into());
            lines.join("\n")
        }
    };
    Ok(Report { output, code: 0 })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn elementary(req: &Request, tower: Tower) -> Result<Report, CliError> {
    let src = single_expr(req)?;
    let p = prepare(tower, req.normalize)?;
    let f = p.parse(src)?;
    let names = p.names();
    let verdict = elementary_integrability(&p.tower, &f).map_err(internal)?;
    let text = |g: &RationalFunction| expr_text(g, &names);
    let (word, mut lines, mut doc) = match &verdict {
        ElementaryVerdict::Yes {
            witness,
            rational_part,
            ..
        } => {
            let mut derivative = p.tower.differentiate(rational_part);
            for (c, g) in witness {
                derivative = &derivative + &p.tower.log_derivative(g).map_err(internal)?.scale(c);
            }
            if derivative != f {
                return Err(CliError::Verification(
                    "antiderivative does not differentiate back".into(),
                ));
            }
            let mut lines = vec![format!(
                "rational part = {}",
                render(rational_part, &names, req.format)
            )];
            for (c, g) in witness {
                lines.push(format!(
                    "log term: {} * log({})",
                    rational_text(c),
                    render(g, &names, req.format)
                ));
            }
            let doc = json!({
                "rational_part": text(rational_part),
                "witness": witness.iter().map(|(c, g)| json!({
                    "coefficient": rational_text(c),
                    "argument": text(g),
                })).collect::<Vec<_>>(),
            });
            ("yes", lines, doc)
        }
        ElementaryVerdict::No(reason) => {
            let reason = match reason {
                NotElementary::HeadMonomial(m) => format!(
                    "remainder has head monomial {}",
                    expr_text(&m.to_rf(), &names)
                ),
                NotElementary::NonConstantResidue {
                    level, coefficient, ..
                } => format!(
                    "residue at level {level} is not constant (coefficient {})",
                    text(coefficient)
                ),
                NotElementary::SpanObstruction => {
                    "no combination of generator derivatives makes all residues constant".into()
                }
            };
            (
                "no",
                vec![format!("reason: {reason}")],
                json!({ "reason": reason }),
            )
        }
        ElementaryVerdict::Undecided(why) => {
            let reason = match why {
                Undecided::IrrationalResidues { level, .. } => {
                    format!("residues at level {level} are not all rational")
                }
                Undecided::ResidueSearchTooLarge { level } => {
                    format!("rational residue search at level {level} is too large")
                }
            };
            (
                "undecided",
                vec![format!("reason: {reason}")],
                json!({ "reason": reason }),
            )
        }
    };
    let output = match req.format {
        Format::Json => {
            doc["tower"] = json!(render_tower_file(&p.tower));
            doc["input"] = json!(text(&f));
            doc["verdict"] = json!(word);
            doc.to_string()
        }
        _ => {
            lines.insert(0, format!("elementary: {word}"));
            lines.insert(0, format!("f = {}", render(&f, &names, req.format)));
            lines.join("\n")
        }
    };
    Ok(Report { output, code: 0 })
}

fn matrix_block(tower: &Tower, format: Format) -> String {
    let a = associated_matrix(tower);
    let names = tower.names();
    match format {
        Format::Latex => matrix_latex(&a, &names),
        _ => matrix_text(&a, &names),
    }
}

fn matrix_json(tower: &Tower) -> Value {
    let a = associated_matrix(tower);
    let names = tower.names();
    Value::Array(
        a.entries
            .iter()
            .map(|row| Value::Array(row.iter().map(|e| json!(expr_text(e, &names))).collect()))
            .collect(),
    )
}

fn matrix(req: &Request, tower: Tower) -> Result<Report, CliError> {
    let p = prepare(tower, req.normalize)?;
    let output = match req.format {
        Format::Json => json!({
            "tower": render_tower_file(&p.tower),
            "matrix": matrix_json(&p.tower),
        })
        .to_string(),
        format => matrix_block(&p.tower, format),
    };
    Ok(Report { output, code: 0 })
}

fn check(req: &Request, tower: Tower) -> Result<Report, CliError> {
    let (p, rejection) = match prepare(tower, req.normalize) {
        Ok(p) => (Some(p), None),
        Err(CliError::Validation(reason)) => (None, Some(reason)),
        Err(e) => return Err(e),
    };
    let mut lines = Vec::new();
    let mut doc = json!({});
    match (&p, &rejection) {
        (Some(p), _) => {
            lines.extend(shift_lines(p, req.format));
            lines.push("S-primitive: yes".into());
            doc["s_primitive"] = json!(true);
            doc["tower"] = json!(render_tower_file(&p.tower));
            if req.normalize {
                doc["shifts"] = shifts_json(p);
            }
            if p.tower.is_logarithmic() {
                let sd = significant_data(&p.tower);
                let sv: Vec<String> = sd.sv.iter().map(usize::to_string).collect();
                lines.push(format!("significant vector: ({})", sv.join(", ")));
                doc["significant_vector"] = json!(sd.sv);
                match is_well_generated(&p.tower) {
                    Ok(()) => {
                        lines.push("well-generated: yes".into());
                        doc["well_generated"] = json!(true);
                    }
                    Err(failure) => {
                        lines.push(format!("well-generated: no ({failure})"));
                        doc["well_generated"] = json!(false);
                        doc["well_generated_failure"] = json!(failure.to_string());
                    }
                }
            }
        }
        (None, Some(reason)) => {
            lines.push(format!("S-primitive: no ({reason})"));
            doc["s_primitive"] = json!(false);
            doc["reason"] = json!(reason);
        }
        (None, None) => unreachable!("either prepared or rejected"),
    }
    let output = match req.format {
        Format::Json => doc.to_string(),
        _ => lines.join("\n"),
    };
    Ok(Report {
        output,
        code: if rejection.is_some() { 2 } else { 0 },
    })
}

/// Describe normalization steps, tracking generator names through swaps.
fn steps_text(steps: &[NormalizationStep], tower: &Tower) -> Vec<String> {
    let mut names: Vec<String> = tower.names().iter().map(|s| s.to_string()).collect();
    let nvars = tower.nvars();
    steps
        .iter()
        .map(|step| match step {
            NormalizationStep::Eliminate {
                index,
                scale,
                coeffs,
            } => {
                let mut combo = RationalFunction::var(nvars, *index);
                for (j, c) in coeffs.iter().enumerate() {
                    combo = &combo - &RationalFunction::var(nvars, j + 1).scale(c);
                }
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                format!(
                    "eliminate: {} -> {}",
                    names[*index],
                    expr_text(&combo.scale(scale), &refs)
                )
            }
            NormalizationStep::Swap { index } => {
                let line = format!("swap: {} and {}", names[*index], names[index + 1]);
                names.swap(*index, index + 1);
                line
            }
        })
        .collect()
}

fn embed(req: &Request, tower: Tower) -> Result<Report, CliError> {
    if let Some(i) = tower.generators().iter().position(|g| !g.is_logarithmic()) {
        return Err(CliError::Validation(format!(
            "tower is not logarithmic: generator {} is an explicit primitive",
            tower.name(i + 1)
        )));
    }
    let source = tower.validated();
    if let Validation::Rejected(rejection) = source.validation() {
        return Err(CliError::Validation(rejection.to_string()));
    }
    let normalized = normalize_tower(&source).map_err(|e| CliError::Validation(e.to_string()))?;
    let e = embed_well_generated(&normalized.tower).map_err(internal)?;
    let src_names = source.names();
    let tgt_names = e.target.names();
    let identity = normalized.steps.is_empty() && e.is_identity();
    let fmt = req.format;

    let mut lines = Vec::new();
    let mut doc = json!({
        "tower": render_tower_file(&source),
        "normalization": steps_text(&normalized.steps, &source),
        "target": render_tower_file(&e.target),
        "identity": identity,
    });
    if identity {
        lines.push("tower is already well-generated; the embedding is the identity".into());
    }
    lines.extend(steps_text(&normalized.steps, &source));
    if !normalized.steps.is_empty() {
        lines.push("normalized tower:".into());
        lines.extend(
            render_tower_file(&normalized.tower)
                .lines()
                .map(|l| format!("  {l}")),
        );
    }
    lines.push(format!("target tower ({} generators):", e.width()));
    lines.extend(
        render_tower_file(&e.target)
            .lines()
            .map(|l| format!("  {l}")),
    );
    let mut images = Vec::new();
    for (name, image) in src_names.iter().zip(&normalized.images).skip(1) {
        let img = crate::embed::apply_homomorphism(&e, image);
        lines.push(format!("phi({name}) = {}", render(&img, &tgt_names, fmt)));
        images.push(json!({ "generator": name, "image": expr_text(&img, &tgt_names) }));
    }
    doc["images"] = Value::Array(images);
    if req.matrix {
        lines.push("source matrix:".into());
        lines.push(matrix_block(&normalized.tower, fmt));
        lines.push("target matrix:".into());
        lines.push(matrix_block(&e.target, fmt));
        doc["source_matrix"] = matrix_json(&normalized.tower);
        doc["target_matrix"] = matrix_json(&e.target);
    }
    let mut decomps = Vec::new();
    for src in &req.exprs {
        let f = source.parse(src).map_err(|source| CliError::Expression {
            src: src.clone(),
            source,
        })?;
        let before = verified_decomposition(&source, &f)?;
        let mapped = crate::embed::apply_homomorphism(&e, &normalized.apply(&f));
        let after = verified_decomposition(&e.target, &mapped)?;
        lines.push(format!("f = {}", render(&f, &src_names, fmt)));
        lines.push(format!(
            "  r in source = {}",
            render(&before.r, &src_names, fmt)
        ));
        lines.push(format!("  phi(f) = {}", render(&mapped, &tgt_names, fmt)));
        lines.push(format!(
            "  g in target = {}",
            render(&after.g, &tgt_names, fmt)
        ));
        lines.push(format!(
            "  r in target = {}",
            render(&after.r, &tgt_names, fmt)
        ));
        decomps.push(json!({
            "input": expr_text(&f, &src_names),
            "r_source": expr_text(&before.r, &src_names),
            "image": expr_text(&mapped, &tgt_names),
            "g": expr_text(&after.g, &tgt_names),
            "r": expr_text(&after.r, &tgt_names),
            "verified": true,
        }));
    }
    if !req.exprs.is_empty() {
        doc["decompositions"] = Value::Array(decomps);
    }
    let output = match fmt {
        Format::Json => doc.to_string(),
        _ => lines.join("\n"),
    };
    Ok(Report { output, code: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LI: &str = "var x\ngen t1 : log(x)\ngen t2 : prim 1/t1\ngen t3 : log(t1)\n";

    fn request(command: Command, tower: &str, exprs: &[&str]) -> Request {
        Request {
            command,
            tower_src: tower.to_string(),
            exprs: exprs.iter().map(|s| s.to_string()).collect(),
            format: Format::Text,
            normalize: false,
            matrix: false,
        }
    }

    #[test]
    fn decomp_text_and_json() {
        let mut req = request(
            Command::Decomp,
            LI,
            &["1/(t1*t2) + (t2 - 2*x*t1)/t1^2 + t3"],
        );
        let out = execute(&req).unwrap();
        assert!(out.output.contains("r = 1/(t1*t2)"), "{}", out.output);
        req.format = Format::Json;
        let v: Value = serde_json::from_str(&execute(&req).unwrap().output).unwrap();
        for key in ["tower", "input", "g", "r", "integrable", "verified"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["integrable"], json!(false));
    }

    #[test]
    fn error_codes() {
        let dep = "var x\ngen t1 : prim 1/x\ngen t2 : prim 2/x\n";
        let err = execute(&request(Command::Decomp, dep, &["1"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("not S-primitive: dependence"));
        let err = execute(&request(Command::Decomp, LI, &["(x"])).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let err = execute(&request(Command::Decomp, "var x\ngen t1 log(x)\n", &["1"])).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let err = execute(&request(Command::Embed, LI, &[])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn check_reports() {
        let out = execute(&request(Command::Check, LI, &[])).unwrap();
        assert!(out.output.contains("S-primitive: yes"));
        let ns = "var x\ngen t1 : log(x)\ngen t2 : prim 1/t1^2\n";
        assert_eq!(execute(&request(Command::Check, ns, &[])).unwrap().code, 2);
        let mut req = request(Command::Check, ns, &[]);
        req.normalize = true;
        let out = execute(&req).unwrap();
        assert_eq!(out.code, 0);
        assert!(out.output.contains("shift t2: -x/t1"), "{}", out.output);
    }

    #[test]
    fn elementary_and_embed() {
        let out = execute(&request(
            Command::Elementary,
            LI,
            &["1/(t1*t2) + (t2 - 2*x*t1)/t1^2 + t3"],
        ))
        .unwrap();
        assert!(out.output.contains("elementary: yes"));
        assert!(
            out.output.contains("log term: 1 * log(t2)"),
            "{}",
            out.output
        );
        let f = "var x\ngen t1 : log(x)\ngen t2 : log(x*t1)\ngen t3 : log((x+1)*(t1+1)*t2)\n";
        let out = execute(&request(Command::Embed, f, &["t3/x"])).unwrap();
        assert!(
            out.output.contains("phi(t3) = u5 + u4 + u2"),
            "{}",
            out.output
        );
        assert!(out.output.contains("r in target = "), "{}", out.output);
        let wg = "var x\ngen t1 : log(x)\n";
        let out = execute(&request(Command::Embed, wg, &[])).unwrap();
        assert!(out.output.contains("identity"));
    }
}
