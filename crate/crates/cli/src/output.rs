//! Writing artifacts. Every file is parsed back against its schema before
//! the command reports success.

use std::path::{Path, PathBuf};

use lipnodal::{Error, Result};
use serde_json::Value;

/// Names the file in I/O errors.
pub fn at<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })
}

pub fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let p = dir.join(name);
    std::fs::write(&p, body)?;
    println!("wrote {}", p.display());
    Ok(p)
}

fn schema(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Schema { what, detail: detail.into() }
}

/// The object must carry every key in `keys`.
pub fn check_json(what: &'static str, body: &str, keys: &[&str]) -> Result<Value> {
    let v: Value = serde_json::from_str(body)?;
    let obj = v.as_object().ok_or_else(|| schema(what, "not an object"))?;
    if let Some(k) = keys.iter().find(|k| !obj.contains_key(**k)) {
        return Err(schema(what, format!("missing key {k:?}")));
    }
    Ok(v)
}

/// Header must equal `header` (when given) and all records must have its width.
pub fn check_csv(what: &'static str, body: &str, header: Option<&[&str]>) -> Result<usize> {
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let h = r.headers()?.clone();
    if let Some(want) = header {
        if h.iter().ne(want.iter().copied()) {
            return Err(schema(what, format!("header {h:?}")));
        }
    }
    let mut rows = 0;
    for rec in r.records() {
        if rec?.len() != h.len() {
            return Err(schema(what, format!("row {rows} has the wrong width")));
        }
        rows += 1;
    }
    Ok(rows)
}

pub fn check_svg(what: &'static str, body: &str) -> Result<()> {
    let head = body.trim_start();
    if (head.starts_with("<svg") || head.starts_with("<?xml")) && head.contains("<svg") && body.trim_end().ends_with("</svg>") {
        Ok(())
    } else {
        Err(schema(what, "not an svg document"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_width_is_checked() {
        assert_eq!(check_csv("t", "a,b\n1,2\n3,4\n", Some(&["a", "b"])).unwrap(), 2);
        assert!(check_csv("t", "a,b\n1,2\n3\n", None).is_err());
        assert!(check_csv("t", "a,c\n1,2\n", Some(&["a", "b"])).is_err());
    }

    #[test]
    fn json_keys_are_checked() {
        assert!(check_json("t", r#"{"a": 1, "b": 2}"#, &["a", "b"]).is_ok());
        assert!(check_json("t", r#"{"a": 1}"#, &["a", "b"]).is_err());
        assert!(check_json("t", "[1]", &[]).is_err());
    }
}
