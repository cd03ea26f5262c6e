//! Text formats: instance `n_left n_right m` header then `u v c` per edge
//! (0-based node indices); demand files hold one integer per node.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::instance::{BipartiteInstance, Edge};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Whitespace-separated tokens tagged with their 1-based line number.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |tok| (i + 1, tok)))
}

fn next_int<'a, T: std::str::FromStr>(
    it: &mut impl Iterator<Item = (usize, &'a str)>,
    path: &Path,
    what: &str,
) -> Result<T> {
    let (line, tok) = it
        .next()
        .ok_or_else(|| parse_err(path, 0, format!("unexpected end of file, expected {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(path, line, format!("expected integer {what}, found {tok:?}")))
}

pub fn parse_instance(text: &str, path: &Path) -> Result<BipartiteInstance> {
    let mut it = tokens(text);
    let n_left: usize = next_int(&mut it, path, "n_left")?;
    let n_right: usize = next_int(&mut it, path, "n_right")?;
    let m: usize = next_int(&mut it, path, "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        edges.push(Edge {
            left: next_int(&mut it, path, "left node")?,
            right: next_int(&mut it, path, "right node")?,
            cost: next_int(&mut it, path, "cost")?,
        });
    }
    if let Some((line, tok)) = it.next() {
        return Err(parse_err(path, line, format!("trailing token {tok:?}")));
    }
    BipartiteInstance::new(n_left, n_right, edges).map_err(|e| parse_err(path, 1, e.to_string()))
}

pub fn format_instance(instance: &BipartiteInstance) -> String {
    let mut out = format!(
        "{} {} {}\n",
        instance.n_left(),
        instance.n_right(),
        instance.edges().len()
    );
    for e in instance.edges() {
        let _ = writeln!(out, "{} {} {}", e.left, e.right, e.cost);
    }
    out
}

pub fn parse_demand(text: &str, path: &Path) -> Result<Vec<u32>> {
    let mut it = tokens(text).peekable();
    let mut out = Vec::new();
    while it.peek().is_some() {
        out.push(next_int(&mut it, path, "demand")?);
    }
    Ok(out)
}

pub fn read_instance(path: &Path) -> Result<BipartiteInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text, path)
}

pub fn read_demand(path: &Path) -> Result<Vec<u32>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_demand(&text, path)
}
