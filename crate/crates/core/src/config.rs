//! Field definition files.
//!
//! A field file is TOML with a `[field]` section, optional `[params]` and an
//! optional `[domain]` box:
//!
//! ```toml
//! [field]
//! name = "wavy"
//! stream = "-x2 + eps*sin(x1)"
//!
//! [params]
//! eps = 0.1
//!
//! [domain]
//! min = [-6, -6]
//! max = [6, 6]
//! ```
//!
//! The `[field]` section holds exactly one of `builtin`, `stream`, or the
//! pair `v1`/`v2` (which may be accompanied by `stream`). Built-ins take
//! their parameters from `[params]` and, for `shear`, a `profile` written
//! in `x2` plus an optional `angle`. Errors carry the file and the line of
//! the offending entry.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::expr::{parse, ParamEnv};
use crate::field::{Builtin, VectorField};
use crate::geom::Rect;

/// A field-file problem located at `path:line`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    /// 1-based line, when the problem has a location.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.path.display(), l, self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
}

impl Number {
    fn value(self) -> f64 {
        match self {
            Number::Int(i) => i as f64,
            Number::Float(x) => x,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    field: FieldSection,
    #[serde(default)]
    params: BTreeMap<String, Spanned<Number>>,
    domain: Option<Spanned<DomainSection>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSection {
    name: Option<String>,
    builtin: Option<Spanned<String>>,
    v1: Option<Spanned<String>>,
    v2: Option<Spanned<String>>,
    stream: Option<Spanned<String>>,
    pressure: Option<Spanned<String>>,
    profile: Option<Spanned<String>>,
    angle: Option<Number>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSection {
    min: [Number; 2],
    max: [Number; 2],
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Parses field-file text; `path` is only used in error messages.
pub fn parse_field(text: &str, path: &Path) -> Result<VectorField, ConfigError> {
    let err = |span: Option<Range<usize>>, message: String| ConfigError {
        path: path.to_path_buf(),
        line: span.map(|s| line_of(text, s)),
        message,
    };
    let file: FieldFile = toml::from_str(text).map_err(|e| err(e.span(), e.message().to_string()))?;
    let mut env = ParamEnv::new();
    for (k, v) in &file.params {
        env.insert(k.clone(), v.get_ref().value()).map_err(|e| err(Some(v.span()), e.to_string()))?;
    }
    let domain = match &file.domain {
        Some(d) => {
            let r = Rect::new(
                [d.get_ref().min[0].value(), d.get_ref().min[1].value()],
                [d.get_ref().max[0].value(), d.get_ref().max[1].value()],
            );
            if !r.is_valid() {
                return Err(err(Some(d.span()), format!("domain box {r:?} is empty or not finite")));
            }
            Some(r)
        }
        None => None,
    };
    let fs = &file.field;
    let expr = |s: &Spanned<String>| parse(s.get_ref()).map_err(|e| err(Some(s.span()), e.to_string()));
    let field = if let Some(b) = &fs.builtin {
        if fs.v1.is_some() || fs.v2.is_some() || fs.stream.is_some() {
            return Err(err(Some(b.span()), "`builtin` excludes `v1`, `v2` and `stream`".into()));
        }
        if let Some(a) = fs.angle {
            env.insert("angle", a.value()).map_err(|e| err(Some(b.span()), e.to_string()))?;
        }
        if let Some(p) = &fs.profile {
            expr(p)?;
        }
        let builtin = Builtin::from_name(b.get_ref(), &env, fs.profile.as_ref().map(|p| p.get_ref().as_str()))
            .map_err(|e| err(Some(b.span()), e.to_string()))?;
        let dom = domain.unwrap_or_else(|| builtin.default_domain());
        builtin.build_on(dom).map_err(|e| err(Some(b.span()), e.to_string()))?
    } else {
        let name = fs.name.clone().unwrap_or_else(|| "field".into());
        let dom = domain.unwrap_or_else(|| Rect::square(10.0));
        let pressure = fs.pressure.as_ref().map(expr).transpose()?;
        let anchor = fs.v1.as_ref().or(fs.stream.as_ref()).map(|s| s.span());
        match (&fs.v1, &fs.v2, &fs.stream) {
            (Some(a), Some(b), u) => {
                let u = u.as_ref().map(expr).transpose()?;
                VectorField::from_components(name, expr(a)?, expr(b)?, env, dom, u, pressure)
            }
            (None, None, Some(u)) => VectorField::from_stream(name, expr(u)?, env, dom, pressure),
            _ => {
                return Err(err(
                    anchor,
                    "[field] needs `builtin`, `stream`, or both `v1` and `v2`".into(),
                ))
            }
        }
        .map_err(|e| err(anchor, e.to_string()))?
    };
    Ok(match &fs.name {
        Some(n) => field.with_name(n.clone()),
        None => field,
    })
}

/// Reads and parses a field file.
pub fn load_field(path: &Path) -> Result<VectorField, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        path: path.to_path_buf(),
        line: None,
        message: e.to_string(),
    })?;
    parse_field(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Result<VectorField, ConfigError> {
        parse_field(text, Path::new("f.toml"))
    }

    #[test]
    fn builtin_and_stream_files() {
        let f = p("[field]\nbuiltin = \"cellular\"\n[params]\nalpha = 1\nbeta = 2.0\n").unwrap();
        assert_eq!(f.name(), "cellular");
        let w = p("[field]\nname = \"wavy\"\nstream = \"-x2 + eps*sin(x1)\"\n[params]\neps = 0.1\n[domain]\nmin = [-6, -6]\nmax = [6, 6]\n")
            .unwrap();
        let v = w.velocity([0.0, 0.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 0.1).abs() < 1e-15);
        assert_eq!(w.domain(), Rect::square(6.0));
        let s = p("[field]\nbuiltin = \"shear\"\nprofile = \"2+sin(x2)\"\nangle = 0.5\n").unwrap();
        let v = s.velocity([0.0, 0.0]).unwrap();
        assert!((v[0] - 2.0 * 0.5f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn errors_name_the_line() {
        let e = p("[field]\nname = \"x\"\nv1 = \"1 +\"\nv2 = \"0\"\n").unwrap_err();
        assert_eq!(e.line, Some(3), "{e}");
        assert!(e.to_string().starts_with("f.toml:3: "));
        let e = p("[field]\nbuiltin = \"cellular\"\n[params]\nalpha = 1\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = p("[field]\nname = \"x\"\n\nbogus = 1\n").unwrap_err();
        assert_eq!(e.line, Some(4), "{e}");
        let e = p("[field]\nstream = \"x1\"\n[domain]\nmin = [1, 1]\nmax = [0, 2]\n").unwrap_err();
        assert!(e.line.is_some());
        let e = p("[field]\nname = \"x\"\n").unwrap_err();
        assert!(e.message.contains("needs"));
    }
}
