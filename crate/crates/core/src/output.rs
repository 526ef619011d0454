//! CSV helpers shared by every writer in the crate.

use std::path::Path;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == 0.0 {
        // avoid "-0.0000000000000000e0" noise in diffs
        "0".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Prefixes `body` with `# key: value` comment lines.
pub fn with_header(comments: &[(&str, String)], body: &str) -> String {
    let mut out = String::new();
    for (k, v) in comments {
        for line in v.lines() {
            out.push_str(&format!("# {k}: {line}\n"));
        }
    }
    out.push_str(body);
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::Io {
                path: parent.display().to_string(),
                reason: e.to_string(),
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(-0.0), "0");
    }

    #[test]
    fn header_lines() {
        let s = with_header(&[("config", "{\"L\":4}".into())], "a,b\n1,2\n");
        assert!(s.starts_with("# config: {\"L\":4}\n"));
        assert!(s.ends_with("a,b\n1,2\n"));
    }
}
