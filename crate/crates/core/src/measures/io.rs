//! Plain-text curve files.
//!
//! ```text
//! burgers 0 1 0
//! 0.0 0.0 0.0
//! 1.0 0.0 0.0
//! 1.0 1.0 0.0
//!
//! burgers 1 0 0 open
//! 0 0 0
//! 0 0 8
//! ```
//!
//! A blank line separates curves. The optional `open` keyword marks a curve
//! without a closing segment. Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Vec3;

use super::curve::DislocationCurve;

fn parse_floats(words: &[&str], line: usize) -> Result<Vec3> {
    if words.len() != 3 {
        return Err(Error::Parse {
            line,
            message: format!("expected 3 numbers, found {}", words.len()),
        });
    }
    let mut v = [0.0; 3];
    for (k, w) in words.iter().enumerate() {
        v[k] = w.parse().map_err(|_| Error::Parse {
            line,
            message: format!("'{w}' is not a number"),
        })?;
    }
    Ok(Vec3(v))
}

pub fn parse_curves(text: &str) -> Result<Vec<DislocationCurve>> {
    let mut curves = Vec::new();
    // (header line, burgers, open, vertices)
    let mut current: Option<(usize, Vec3, bool, Vec<Vec3>)> = None;
    let finish = |cur: Option<(usize, Vec3, bool, Vec<Vec3>)>, out: &mut Vec<DislocationCurve>| -> Result<()> {
        if let Some((line, b, open, verts)) = cur {
            let c = if open {
                DislocationCurve::open(verts, b)
            } else {
                DislocationCurve::closed(verts, b)
            };
            out.push(c.map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?);
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            finish(current.take(), &mut curves)?;
            continue;
        }
        let words: Vec<&str> = t.split_whitespace().collect();
        if words[0] == "burgers" {
            finish(current.take(), &mut curves)?;
            let (nums, open) = match words.last() {
                Some(&"open") => (&words[1..words.len() - 1], true),
                _ => (&words[1..], false),
            };
            current = Some((line, parse_floats(nums, line)?, open, Vec::new()));
        } else {
            match current.as_mut() {
                Some(cur) => cur.3.push(parse_floats(&words, line)?),
                None => {
                    return Err(Error::Parse {
                        line,
                        message: "vertex before any 'burgers' header".into(),
                    })
                }
            }
        }
    }
    finish(current.take(), &mut curves)?;
    Ok(curves)
}

/// Writes curves with full round-trip precision.
pub fn format_curves(curves: &[DislocationCurve]) -> String {
    let mut s = String::new();
    for (k, c) in curves.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        let b = c.burgers();
        let _ = write!(s, "burgers {:?} {:?} {:?}", b[0], b[1], b[2]);
        if !c.is_closed() {
            s.push_str(" open");
        }
        s.push('\n');
        for v in c.vertices() {
            let _ = writeln!(s, "{:?} {:?} {:?}", v[0], v[1], v[2]);
        }
    }
    s
}

pub fn read_curves(path: &Path) -> Result<Vec<DislocationCurve>> {
    parse_curves(&std::fs::read_to_string(path)?)
}

pub fn write_curves(path: &Path, curves: &[DislocationCurve]) -> Result<()> {
    std::fs::write(path, format_curves(curves))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let a = DislocationCurve::circle(Vec3::ZERO, 1.0 / 3.0, 7, Vec3::E1, Vec3::E2, 0.5, Vec3::new(0.0, 1.0, 0.0)).unwrap();
        let b = DislocationCurve::open(vec![Vec3::ZERO, Vec3::new(0.0, 0.0, 8.0)], Vec3::E1).unwrap();
        let text = format_curves(&[a.clone(), b.clone()]);
        let back = parse_curves(&text).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_curves("burgers 1 0 0\n0 0 0\n1 x 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_curves("0 0 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        assert!(parse_curves("burgers 1 0 0\n0 0 0\n1 0 0\n").is_err());
    }
}
