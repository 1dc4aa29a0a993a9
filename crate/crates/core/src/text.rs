//! Line-oriented text formats for posets, valuations, representation maps
//! and quantile maps. Blank lines and `#` comments are ignored everywhere.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::cantor::{CantorError, Word};
use crate::chain::{ChainError, QuantileMap};
use crate::dyadic::{Dyadic, DyadicError};
use crate::poset::{ElementId, Poset, PosetError};
use crate::skorohod::{Layer, RepresentationMap, SkorohodError};
use crate::valuation::{SimpleValuation, ValuationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown element {name}")]
    UnknownElement { line: usize, name: String },
    #[error("line {line}: {source}")]
    Value { line: usize, source: DyadicError },
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Skorohod(#[from] SkorohodError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

pub type Result<T, E = TextError> = std::result::Result<T, E>;

fn syntax(line: usize, message: impl Into<String>) -> TextError {
    TextError::Syntax { line, message: message.into() }
}

/// Numbered, trimmed, non-empty lines with comments removed, split on whitespace.
fn directives(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            None
        } else {
            Some((i + 1, content.split_whitespace().collect()))
        }
    })
}

fn lookup(p: &Poset, line: usize, name: &str) -> Result<ElementId> {
    p.id(name).map_err(|_| TextError::UnknownElement { line, name: name.to_string() })
}

fn dyadic(line: usize, s: &str) -> Result<Dyadic> {
    s.parse().map_err(|source| TextError::Value { line, source })
}

/// `element <id>`, `cover <lower> <upper>`, `bottom <id>`.
pub fn parse_poset(text: &str) -> Result<Poset> {
    let mut names: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    let mut covers: Vec<(usize, String, String)> = Vec::new();
    let mut bottom: Option<String> = None;
    for (line, words) in directives(text) {
        match words.as_slice() {
            ["element", name] => {
                if !seen.insert(name.to_string()) {
                    return Err(syntax(line, format!("duplicate element {name}")));
                }
                names.push(name.to_string());
            }
            ["cover", lo, hi] => covers.push((line, lo.to_string(), hi.to_string())),
            ["bottom", name] => {
                if bottom.replace(name.to_string()).is_some() {
                    return Err(syntax(line, "second bottom directive"));
                }
            }
            _ => return Err(syntax(line, format!("unrecognized directive {:?}", words.join(" ")))),
        }
    }
    for (line, lo, hi) in &covers {
        for name in [lo, hi] {
            if !seen.contains(name) {
                return Err(TextError::UnknownElement { line: *line, name: name.clone() });
            }
        }
    }
    let bottom = bottom.ok_or_else(|| TextError::OrderViolation("no bottom element declared".into()))?;
    if !seen.contains(&bottom) {
        return Err(TextError::OrderViolation(format!("bottom {bottom} is not a declared element")));
    }
    let pairs: Vec<(String, String)> = covers.into_iter().map(|(_, lo, hi)| (lo, hi)).collect();
    Poset::from_covers(&names, &pairs, &bottom).map_err(|e| match e {
        PosetError::OrderViolation(m) => TextError::OrderViolation(m),
        other => TextError::OrderViolation(other.to_string()),
    })
}

/// Elements in declaration order, then the bottom, then the Hasse covers.
pub fn write_poset(p: &Poset) -> String {
    let mut s = String::new();
    for x in p.elements() {
        let _ = writeln!(s, "element {}", p.name(x));
    }
    let _ = writeln!(s, "bottom {}", p.name(p.bottom()));
    for (lo, hi) in p.covers() {
        let _ = writeln!(s, "cover {} {}", p.name(lo), p.name(hi));
    }
    s
}

/// `<element> <dyadic>` per line.
pub fn parse_valuation(text: &str, base: &Arc<Poset>) -> Result<SimpleValuation> {
    let mut atoms = Vec::new();
    for (line, words) in directives(text) {
        match words.as_slice() {
            [name, weight] => atoms.push((lookup(base, line, name)?, dyadic(line, weight)?)),
            _ => return Err(syntax(line, "expected `<element> <dyadic>`")),
        }
    }
    Ok(SimpleValuation::new(base, atoms)?)
}

/// Atoms in declaration order.
pub fn write_valuation(v: &SimpleValuation) -> String {
    v.to_string()
}

fn word_token(w: &Word) -> String {
    if w.is_empty() { "-".to_string() } else { w.to_string() }
}

fn parse_word(line: usize, s: &str) -> Result<Word> {
    if s == "-" {
        return Ok(Word::empty());
    }
    s.parse().map_err(|e: CantorError| syntax(line, e.to_string()))
}

/// `layers <count>`, then per layer `layer <depth>` and one `map <word> <element>`
/// line per word. The empty word is written `-`.
pub fn write_map(map: &RepresentationMap) -> String {
    let p = map.base();
    let mut s = String::new();
    let _ = writeln!(s, "layers {}", map.layers().len());
    for layer in map.layers() {
        let _ = writeln!(s, "layer {}", layer.depth());
        for (i, y) in layer.table().iter().enumerate() {
            let w = Word::from_index(i as u64, layer.depth());
            let _ = writeln!(s, "map {} {}", word_token(&w), p.name(*y));
        }
    }
    s
}

pub fn parse_map(text: &str, base: &Arc<Poset>) -> Result<RepresentationMap> {
    let mut lines = directives(text);
    let (line, header) = lines.next().ok_or_else(|| syntax(0, "empty map file"))?;
    let count: usize = match header.as_slice() {
        ["layers", n] => n.parse().map_err(|_| syntax(line, "bad layer count"))?,
        _ => return Err(syntax(line, "expected `layers <count>`")),
    };
    let mut layers: Vec<(usize, u32, Vec<Option<ElementId>>)> = Vec::new();
    for (line, words) in lines {
        match words.as_slice() {
            ["layer", d] => {
                let depth: u32 = d.parse().map_err(|_| syntax(line, "bad depth"))?;
                let size = crate::cantor::Level::new(depth).map_err(|e| syntax(line, e.to_string()))?.len();
                layers.push((line, depth, vec![None; size]));
            }
            ["map", w, name] => {
                let (_, depth, table) = layers.last_mut().ok_or_else(|| syntax(line, "map line before any layer"))?;
                let word = parse_word(line, w)?;
                if word.len() != *depth as usize {
                    return Err(syntax(line, format!("word {w} does not have length {depth}")));
                }
                let slot = &mut table[word.index() as usize];
                if slot.is_some() {
                    return Err(syntax(line, format!("word {w} mapped twice")));
                }
                *slot = Some(lookup(base, line, name)?);
            }
            _ => return Err(syntax(line, "expected `layer <depth>` or `map <word> <element>`")),
        }
    }
    if layers.len() != count {
        return Err(syntax(line, format!("header announces {count} layers, found {}", layers.len())));
    }
    let mut built = Vec::with_capacity(layers.len());
    for (line, depth, table) in layers {
        let table: Option<Vec<ElementId>> = table.into_iter().collect();
        let table = table.ok_or_else(|| syntax(line, format!("layer {depth} leaves some words unmapped")))?;
        built.push(Layer::new(depth, table)?);
    }
    Ok(RepresentationMap::new(base, built)?)
}

/// `break <dyadic> <element>`, thresholds ascending.
pub fn write_quantile(g: &QuantileMap) -> String {
    let p = g.base();
    let mut s = String::new();
    for (t, x) in g.breaks() {
        let _ = writeln!(s, "break {} {}", t, p.name(*x));
    }
    s
}

pub fn parse_quantile(text: &str, base: &Arc<Poset>) -> Result<QuantileMap> {
    let mut breaks = Vec::new();
    for (line, words) in directives(text) {
        match words.as_slice() {
            ["break", t, name] => breaks.push((dyadic(line, t)?, lookup(base, line, name)?)),
            _ => return Err(syntax(line, "expected `break <dyadic> <element>`")),
        }
    }
    Ok(QuantileMap::new(base, breaks)?)
}
