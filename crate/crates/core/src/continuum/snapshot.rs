//! Binary grid snapshots.
//!
//! Text header lines `dislosim-grid v1`, `dims n1 n2 n3`,
//! `spacing h1 h2 h3`, `field <name>`, `components <k>`, `end`, followed by
//! little-endian f64 values, node-major with x1 fastest and the `k`
//! components of a node contiguous.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::PeriodicCell;
use crate::tensor::{SymTensor3, Vec3};

pub const MAGIC: &str = "dislosim-grid v1";

#[derive(Debug, Clone, PartialEq)]
pub struct GridSnapshot {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub field: String,
    pub components: usize,
    pub data: Vec<f64>,
}

impl GridSnapshot {
    pub fn new(cell: &PeriodicCell, field: &str, components: usize, data: Vec<f64>) -> Result<Self> {
        if field.is_empty() || field.contains(char::is_whitespace) {
            return Err(Error::invalid(format!("field name '{field}' must be a single nonempty word")));
        }
        if components == 0 || data.len() != components * cell.node_count() {
            return Err(Error::invalid("snapshot data size does not match the cell"));
        }
        Ok(GridSnapshot {
            dims: cell.dims(),
            spacing: cell.spacing(),
            field: field.to_string(),
            components,
            data,
        })
    }

    pub fn scalar(cell: &PeriodicCell, field: &str, f: &[f64]) -> Result<Self> {
        Self::new(cell, field, 1, f.to_vec())
    }

    pub fn vector(cell: &PeriodicCell, field: &str, f: &[Vec3]) -> Result<Self> {
        Self::new(cell, field, 3, f.iter().flat_map(|v| v.0).collect())
    }

    /// Symmetric tensor field in the order 11, 22, 33, 23, 13, 12.
    pub fn sym(cell: &PeriodicCell, field: &str, f: &[SymTensor3]) -> Result<Self> {
        Self::new(cell, field, 6, f.iter().flat_map(|t| t.components()).collect())
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let [n1, n2, n3] = self.dims;
        let [h1, h2, h3] = self.spacing;
        write!(
            w,
            "{MAGIC}\ndims {n1} {n2} {n3}\nspacing {h1:?} {h2:?} {h3:?}\nfield {}\ncomponents {}\nend\n",
            self.field, self.components
        )?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl BufRead) -> Result<Self> {
        let mut line_no = 0;
        let mut next = |r: &mut dyn BufRead| -> Result<(usize, String)> {
            let mut s = String::new();
            line_no += 1;
            if r.read_line(&mut s)? == 0 {
                return Err(Error::Parse { line: line_no, message: "unexpected end of header".into() });
            }
            Ok((line_no, s.trim_end_matches('\n').to_string()))
        };
        let (l, magic) = next(r)?;
        if magic != MAGIC {
            return Err(Error::Parse { line: l, message: format!("expected '{MAGIC}'") });
        }
        let mut dims = None;
        let mut spacing = None;
        let mut field = None;
        let mut components = None;
        loop {
            let (l, s) = next(r)?;
            let mut it = s.split_whitespace();
            let key = it.next().unwrap_or("");
            let rest: Vec<&str> = it.collect();
            let bad = |m: &str| Error::Parse { line: l, message: m.to_string() };
            match key {
                "end" => break,
                "dims" => {
                    let v: Vec<usize> = rest.iter().map(|x| x.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad("bad dims"))?;
                    dims = Some(<[usize; 3]>::try_from(v).map_err(|_| bad("dims needs three values"))?);
                }
                "spacing" => {
                    let v: Vec<f64> = rest.iter().map(|x| x.parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad("bad spacing"))?;
                    spacing = Some(<[f64; 3]>::try_from(v).map_err(|_| bad("spacing needs three values"))?);
                }
                "field" if rest.len() == 1 => field = Some(rest[0].to_string()),
                "components" if rest.len() == 1 => components = Some(rest[0].parse::<usize>().map_err(|_| bad("bad components"))?),
                _ => return Err(bad(&format!("unexpected header line '{s}'"))),
            }
        }
        let missing = |k: &str| Error::Parse { line: line_no, message: format!("header lacks '{k}'") };
        let dims = dims.ok_or_else(|| missing("dims"))?;
        let spacing = spacing.ok_or_else(|| missing("spacing"))?;
        let field = field.ok_or_else(|| missing("field"))?;
        let components = components.unwrap_or(1);
        let count = components * dims.iter().product::<usize>();
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * count {
            return Err(Error::invalid(format!("snapshot body has {} bytes, expected {}", bytes.len(), 8 * count)));
        }
        let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(GridSnapshot { dims, spacing, field, components, data })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_identical() {
        let cell = PeriodicCell::new([1.0, 0.7, 0.3], [8, 10, 8]).unwrap();
        let f: Vec<Vec3> = (0..cell.node_count()).map(|i| Vec3::new((i as f64).sin(), 1.0 / (i as f64 + 3.0), -0.0)).collect();
        let snap = GridSnapshot::vector(&cell, "hp", &f).unwrap();
        let mut buf = Vec::new();
        snap.write_to(&mut buf).unwrap();
        let back = GridSnapshot::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back.dims, snap.dims);
        assert_eq!(back.field, "hp");
        assert_eq!(back.spacing.map(f64::to_bits), snap.spacing.map(f64::to_bits));
        assert!(back.data.iter().zip(&snap.data).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn rejects_truncated_body() {
        let cell = PeriodicCell::cube(1.0, 8).unwrap();
        let snap = GridSnapshot::scalar(&cell, "eps_p", &vec![1.0; cell.node_count()]).unwrap();
        let mut buf = Vec::new();
        snap.write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(GridSnapshot::read_from(&mut buf.as_slice()).is_err());
        assert!(GridSnapshot::read_from(&mut &b"nonsense\n"[..]).is_err());
    }
}
