//! Text formats for modal fields (`MFLD 1`) and wavelet decompositions (`MWDC 1`).
//!
//! ```text
//! MFLD 1 <d> <N> <p> <a> <b>
//! <coefficient>        one per line, 17 significant digits,
//! ...                  element-lex-major, then mode-lex
//! ```
//!
//! A decomposition file starts with `MWDC 1 <detail count>`, followed by the
//! MFLD block of the coarse field and then the detail coefficients in
//! (coarse element, detail index) order.

use std::io::{BufRead, Write};

use crate::basis::mode_count;
use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::mesh::UniformMesh;
use crate::mra::WaveletDecomposition;

fn write_value<W: Write>(out: &mut W, v: f64) -> Result<()> {
    writeln!(out, "{v:.16e}")?;
    Ok(())
}

pub fn write_field<W: Write>(out: &mut W, field: &ModalField) -> Result<()> {
    let m = field.mesh();
    writeln!(
        out,
        "MFLD 1 {} {} {} {:?} {:?}",
        m.dim(),
        m.n(),
        field.degree(),
        m.lower(),
        m.upper()
    )?;
    for &c in field.coeffs() {
        write_value(out, c)?;
    }
    Ok(())
}

struct Lines<R> {
    inner: R,
    line_no: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_nonempty(&mut self) -> Result<Option<String>> {
        loop {
            let mut s = String::new();
            if self.inner.read_line(&mut s)? == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let t = s.trim();
            if !t.is_empty() {
                return Ok(Some(t.to_string()));
            }
        }
    }

    fn values(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(count);
        for _ in 0..count {
            let line = self.next_nonempty()?.ok_or_else(|| {
                Error::Format(format!("expected {count} {what} values, found {}", v.len()))
            })?;
            let x: f64 = line
                .parse()
                .map_err(|_| Error::Format(format!("line {}: bad number `{line}`", self.line_no)))?;
            v.push(x);
        }
        Ok(v)
    }
}

fn parse_header(line: &str) -> Result<(UniformMesh, usize)> {
    let tok: Vec<&str> = line.split_whitespace().collect();
    if tok.len() != 7 || tok[0] != "MFLD" || tok[1] != "1" {
        return Err(Error::Format(format!("bad MFLD header `{line}`")));
    }
    let bad = |t: &str| Error::Format(format!("bad header field `{t}`"));
    let dim: usize = tok[2].parse().map_err(|_| bad(tok[2]))?;
    let n: usize = tok[3].parse().map_err(|_| bad(tok[3]))?;
    let p: usize = tok[4].parse().map_err(|_| bad(tok[4]))?;
    let a: f64 = tok[5].parse().map_err(|_| bad(tok[5]))?;
    let b: f64 = tok[6].parse().map_err(|_| bad(tok[6]))?;
    Ok((UniformMesh::new(dim, n, a, b)?, p))
}

fn read_field_block<R: BufRead>(lines: &mut Lines<R>) -> Result<ModalField> {
    let header = lines
        .next_nonempty()?
        .ok_or_else(|| Error::Format("empty input".into()))?;
    let (mesh, p) = parse_header(&header)?;
    if p > crate::MAX_DEGREE {
        return Err(Error::UnsupportedDegree(p));
    }
    let count = mesh.num_elements() * mode_count(mesh.dim(), p);
    let coeffs = lines.values(count, "coefficient")?;
    ModalField::new(mesh, p, coeffs)
}

pub fn read_field<R: BufRead>(input: R) -> Result<ModalField> {
    let mut lines = Lines { inner: input, line_no: 0 };
    let field = read_field_block(&mut lines)?;
    if let Some(extra) = lines.next_nonempty()? {
        return Err(Error::Format(format!(
            "trailing data after {} coefficients: `{extra}`",
            field.coeffs().len()
        )));
    }
    Ok(field)
}

pub fn write_decomposition<W: Write>(out: &mut W, dec: &WaveletDecomposition) -> Result<()> {
    writeln!(out, "MWDC 1 {}", dec.details().len())?;
    write_field(out, dec.coarse())?;
    for &d in dec.details() {
        write_value(out, d)?;
    }
    Ok(())
}

pub fn read_decomposition<R: BufRead>(input: R) -> Result<WaveletDecomposition> {
    let mut lines = Lines { inner: input, line_no: 0 };
    let header = lines
        .next_nonempty()?
        .ok_or_else(|| Error::Format("empty input".into()))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 3 || tok[0] != "MWDC" || tok[1] != "1" {
        return Err(Error::Format(format!("bad MWDC header `{header}`")));
    }
    let count: usize = tok[2]
        .parse()
        .map_err(|_| Error::Format(format!("bad detail count `{}`", tok[2])))?;
    let coarse = read_field_block(&mut lines)?;
    let details = lines.values(count, "detail")?;
    if let Some(extra) = lines.next_nonempty()? {
        return Err(Error::Format(format!("trailing data after details: `{extra}`")));
    }
    WaveletDecomposition::new(coarse, details)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip_is_bit_exact() {
        let mesh = UniformMesh::new(2, 3, -0.5, 1.25).unwrap();
        let coeffs: Vec<f64> = (0..36).map(|i| (i as f64 * 1.37).sin() / 3.0).collect();
        let f = ModalField::new(mesh, 1, coeffs).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("MFLD 1 2 3 1 -0.5 1.25\n"));
        let g = read_field(buf.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn mismatched_counts_are_rejected() {
        let short = "MFLD 1 1 2 0 0.0 1.0\n1.0\n";
        assert!(matches!(read_field(short.as_bytes()), Err(Error::Format(_))));
        let long = "MFLD 1 1 1 0 0.0 1.0\n1.0\n2.0\n";
        assert!(matches!(read_field(long.as_bytes()), Err(Error::Format(_))));
        let bad = "MFLD 2 1 1 0 0.0 1.0\n1.0\n";
        assert!(matches!(read_field(bad.as_bytes()), Err(Error::Format(_))));
    }
}
