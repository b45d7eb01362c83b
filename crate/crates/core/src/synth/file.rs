//! `TPL v1` template list.
//!
//! ```text
//! TPL v1 n=<n>
//! <n-character 0/1 string>   (one per template)
//! ```

use crate::bits::BinaryTemplate;
use crate::error::{Error, Result};

pub fn write_templates(n: usize, templates: &[BinaryTemplate]) -> Result<String> {
    let mut out = format!("TPL v1 n={n}\n");
    for b in templates {
        crate::error::check_len(n, b.len())?;
        out.push_str(&b.to_string());
        out.push('\n');
    }
    Ok(out)
}

/// Returns `n` and the templates.
pub fn parse_templates(text: &str) -> Result<(usize, Vec<BinaryTemplate>)> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| Error::parse(0, "file must end with a newline"))?;
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or("");
    let n: usize = header
        .strip_prefix("TPL v1 n=")
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::parse(
                1,
                format!("expected `TPL v1 n=<n>` header, found {header:?}"),
            )
        })?;
    let mut templates = Vec::new();
    for (i, line) in lines.enumerate() {
        let b: BinaryTemplate = line
            .parse()
            .map_err(|e| Error::parse(i + 2, format!("{e}")))?;
        if b.len() != n {
            return Err(Error::parse(
                i + 2,
                format!("expected {n} bits, found {}", b.len()),
            ));
        }
        templates.push(b);
    }
    Ok((n, templates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let ts: Vec<BinaryTemplate> = ["0101", "1100"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let text = write_templates(4, &ts).unwrap();
        assert_eq!(text, "TPL v1 n=4\n0101\n1100\n");
        assert_eq!(parse_templates(&text).unwrap(), (4, ts));
        assert_eq!(parse_templates("TPL v1 n=4\n").unwrap(), (4, vec![]));
        assert!(write_templates(5, &["0101".parse().unwrap()]).is_err());
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "TPL v1 n=4\n010\n",
            "TPL v1 n=4\n01a1\n",
            "TPL v1 n=0\n",
            "TPL v2 n=4\n",
            "TPL v1 n=4\n0101",
            "TPL v1 n=4\n0101\n\n",
        ] {
            assert!(parse_templates(bad).is_err(), "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..80, rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 80), 0..6)) {
            let ts: Vec<BinaryTemplate> = rows.iter().map(|r| BinaryTemplate::from_bits(r[..n].iter().copied())).collect();
            let text = write_templates(n, &ts).unwrap();
            let (m, back) = parse_templates(&text).unwrap();
            prop_assert_eq!(m, n);
            prop_assert_eq!(write_templates(m, &back).unwrap(), text);
        }
    }
}
