use std::io::Write;

use crate::error::{Error, Result};
use crate::field::ModalField;

use super::functions::TestFunction;

/// Pointwise `|f - field|` on a cell-centred `grid x grid` sample of a 2D field.
pub fn emit_contour<W: Write>(field: &ModalField, f: &TestFunction, grid: usize, out: &mut W) -> Result<()> {
    if field.dim() != 2 || f.dim() != 2 {
        return Err(Error::UnsupportedDimension(field.dim()));
    }
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    let mesh = field.mesh();
    let step = mesh.length() / grid as f64;
    writeln!(out, "x,y,abs_err")?;
    for i in 0..grid {
        let x = mesh.lower() + (i as f64 + 0.5) * step;
        for j in 0..grid {
            let y = mesh.lower() + (j as f64 + 0.5) * step;
            let e = (f.eval(&[x, y]) - field.eval(&[x, y])).abs();
            if !e.is_finite() {
                return Err(Error::NonFinite(format!("error at ({x}, {y})")));
            }
            writeln!(out, "{x:.10e},{y:.10e},{e:.10e}")?;
        }
    }
    Ok(())
}
