//! Tower files.
//!
//! ```text
//! # comment
//! var x
//! gen t1 : log(x)
//! gen t2 : prim 1/t1
//! ```

use thiserror::Error;

use crate::cli::parse::{parse_expression, ParseError};
use crate::cli::render::expr_text;
use crate::tower::{GeneratorKind, GeneratorSpec, Tower, TowerError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Expression { line: usize, source: ParseError },
    #[error("{0}")]
    Tower(#[from] TowerError),
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parse a tower file. The result is not yet validated.
pub fn parse_tower_file(src: &str) -> Result<Tower, TowerFileError> {
    let lines: Vec<(usize, &str)> = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let Some(&(first, header)) = lines.first() else {
        return Err(TowerFileError::Syntax {
            line: 1,
            msg: "empty tower file".into(),
        });
    };
    let var = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["var", name] => name.to_string(),
        _ => {
            return Err(TowerFileError::Syntax {
                line: first,
                msg: "expected `var <name>`".into(),
            })
        }
    };
    let decls: Vec<(usize, String, bool, &str)> = lines[1..]
        .iter()
        .map(|&(line, l)| parse_declaration(line, l))
        .collect::<Result<_, _>>()?;

    let mut names = vec![var.clone()];
    names.extend(decls.iter().map(|d| d.1.clone()));
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let nvars = names.len();
    let mut specs = Vec::with_capacity(decls.len());
    for (k, (line, name, is_log, body)) in decls.into_iter().enumerate() {
        let expr = parse_expression(body, &name_refs[..k + 1], nvars)
            .map_err(|source| TowerFileError::Expression { line, source })?;
        let spec = if is_log {
            GeneratorSpec::Log(expr)
        } else {
            GeneratorSpec::Primitive(expr)
        };
        specs.push((name, spec));
    }
    Ok(Tower::new(&var, specs)?)
}

fn parse_declaration(line: usize, l: &str) -> Result<(usize, String, bool, &str), TowerFileError> {
    let syntax = |msg: &str| TowerFileError::Syntax {
        line,
        msg: msg.to_string(),
    };
    let rest = l
        .strip_prefix("gen")
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or_else(|| {
            syntax("expected `gen <name> : log(<expr>)` or `gen <name> : prim <expr>`")
        })?;
    let (name, body) = rest.split_once(':').ok_or_else(|| syntax("missing `:`"))?;
    let name = name.trim();
    let body = body.trim();
    if let Some(arg) = body.strip_prefix("log") {
        let arg = arg.trim();
        let inner = arg
            .strip_prefix('(')
            .and_then(|a| a.strip_suffix(')'))
            .ok_or_else(|| syntax("expected `log(<expr>)`"))?;
        Ok((line, name.to_string(), true, inner))
    } else if let Some(d) = body.strip_prefix("prim") {
        if !d.starts_with(char::is_whitespace) {
            return Err(syntax("expected `prim <expr>`"));
        }
        Ok((line, name.to_string(), false, d.trim()))
    } else {
        Err(syntax("generator must be `log(<expr>)` or `prim <expr>`"))
    }
}

/// A tower file describing `tower`.
pub fn render_tower_file(tower: &Tower) -> String {
    let names = tower.names();
    let mut out = format!("var {}\n", tower.var_name());
    for g in tower.generators() {
        let body = match &g.kind {
            GeneratorKind::Logarithmic { argument } => {
                format!("log({})", expr_text(argument, &names))
            }
            GeneratorKind::ExplicitPrimitive => {
                format!("prim {}", expr_text(&g.derivative, &names))
            }
        };
        out.push_str(&format!("gen {} : {}\n", g.name, body));
    }
    out
}
