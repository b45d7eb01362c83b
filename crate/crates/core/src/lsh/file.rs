//! `LSH v1` family descriptor.
//!
//! ```text
//! LSH v1 n=<n> L=<L> w=<w> seed=<seed>
//! <w space-separated coordinate indices>   (L lines)
//! ```

use std::fmt::Write as _;

use super::LshFamily;
use crate::error::{Error, Result};

pub fn write_family(family: &LshFamily) -> String {
    let mut out = format!(
        "LSH v1 n={} L={} w={} seed={}\n",
        family.n(),
        family.count(),
        family.width(),
        family.seed()
    );
    for set in family.index_sets() {
        let line: Vec<String> = set.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

fn header_field<'a>(parts: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<u64> {
    let raw = parts
        .next()
        .and_then(|p| p.strip_prefix(key))
        .and_then(|p| p.strip_prefix('='))
        .ok_or_else(|| Error::parse(1, format!("expected `{key}=<value>` in LSH header")))?;
    raw.parse()
        .map_err(|_| Error::parse(1, format!("invalid value for {key}: {raw:?}")))
}

pub fn parse_family(text: &str) -> Result<LshFamily> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| Error::parse(0, "file must end with a newline"))?;
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or("");
    let mut parts = header
        .strip_prefix("LSH v1 ")
        .ok_or_else(|| Error::parse(1, format!("expected `LSH v1 ...` header, found {header:?}")))?
        .split(' ');
    let n = header_field(&mut parts, "n")? as usize;
    let count = header_field(&mut parts, "L")? as usize;
    let width = header_field(&mut parts, "w")? as usize;
    let seed = header_field(&mut parts, "seed")?;
    if parts.next().is_some() {
        return Err(Error::parse(1, "trailing fields in LSH header"));
    }

    let mut sets = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let set = line
            .split(' ')
            .map(|x| {
                x.parse::<usize>()
                    .map_err(|_| Error::parse(i + 2, format!("invalid index {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        sets.push(set);
    }
    if sets.len() != count {
        return Err(Error::parse(
            sets.len() + 1,
            format!("expected {count} index lines, found {}", sets.len()),
        ));
    }
    LshFamily::from_index_sets(n, width, seed, sets)
}
