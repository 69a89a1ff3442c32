//! Mesh and table export of sampled families.

use std::fmt::Write;

use crate::catalog::SolutionFamily;
use crate::error::{Error, Result};
use crate::verify::GridSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct Export {
    pub text: String,
    pub vertices: usize,
    pub faces: usize,
    /// Grid points (CSV) or cells (OBJ) left out because they leave the domain.
    pub skipped: usize,
}

fn samples(fam: &SolutionFamily, grid: &GridSpec) -> Vec<Option<f64>> {
    grid.points()
        .into_iter()
        .map(|(s, t)| fam.eval(s, t).ok().filter(|u| u.is_finite()))
        .collect()
}

/// Rows `s,t,u` for the in-domain grid points.
pub fn to_csv(fam: &SolutionFamily, grid: &GridSpec) -> Result<Export> {
    let vals = samples(fam, grid);
    let mut text = String::from("s,t,u\n");
    let mut rows = 0;
    for (k, v) in vals.iter().enumerate() {
        if let Some(u) = v {
            let (s, t) = grid.point(k);
            writeln!(text, "{s},{t},{u}").expect("string write");
            rows += 1;
        }
    }
    if rows == 0 {
        return Err(Error::EmptyGrid);
    }
    Ok(Export {
        text,
        vertices: rows,
        faces: 0,
        skipped: vals.len() - rows,
    })
}

/// Triangulated height field in the ambient coordinates of the family's axis.
/// A cell is emitted as two triangles only when all four corners are in the domain.
pub fn to_obj(fam: &SolutionFamily, grid: &GridSpec) -> Result<Export> {
    let vals = samples(fam, grid);
    let mut index = vec![0usize; vals.len()];
    let mut text = format!("# {}\n", fam.subject());
    let mut vertices = 0;
    for (k, v) in vals.iter().enumerate() {
        if let Some(u) = v {
            let (s, t) = grid.point(k);
            let p = fam.axis.embed(s, t, *u);
            writeln!(text, "v {} {} {}", p.x, p.y, p.z).expect("string write");
            vertices += 1;
            index[k] = vertices;
        }
    }
    if vertices == 0 {
        return Err(Error::EmptyGrid);
    }
    let (mut faces, mut skipped) = (0, 0);
    for i in 0..grid.n - 1 {
        for j in 0..grid.m - 1 {
            let k = [
                i * grid.m + j,
                (i + 1) * grid.m + j,
                (i + 1) * grid.m + j + 1,
                i * grid.m + j + 1,
            ];
            if k.iter().any(|&x| vals[x].is_none()) {
                skipped += 1;
                continue;
            }
            let [a, b, c, d] = k.map(|x| index[x]);
            writeln!(text, "f {a} {b} {c}\nf {a} {c} {d}").expect("string write");
            faces += 2;
        }
    }
    Ok(Export {
        text,
        vertices,
        faces,
        skipped,
    })
}
