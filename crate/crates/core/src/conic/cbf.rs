use std::io::Write;

use super::{Cone, ConicProblem};
use crate::error::Result;

/// Writes `problem` in the Conic Benchmark Format (version 3).
///
/// Rotated blocks use the `QR` cone, which is `2 x1 x2 >= ||x3..||^2`, so
/// their first row is halved on output. Variable names are emitted as
/// comments for cross-referencing.
pub fn write_cbf<W: Write>(problem: &ConicProblem, mut out: W) -> Result<()> {
    let n = problem.num_vars();
    let m = problem.num_rows();
    writeln!(out, "# {} variables, {} rows, {} cone blocks", n, m, problem.blocks.len())?;
    for (j, name) in problem.var_names.iter().enumerate() {
        writeln!(out, "# var {j} {name}")?;
    }
    for block in &problem.blocks {
        writeln!(out, "# block {} {:?}", block.label, block.cone)?;
    }
    writeln!(out, "VER\n3\n")?;
    writeln!(out, "OBJSENSE\nMIN\n")?;
    writeln!(out, "VAR\n{n} 1\nF {n}\n")?;

    // Merge consecutive blocks of the same kind into one CBF cone entry.
    let mut cones: Vec<(&str, usize)> = Vec::new();
    for block in &problem.blocks {
        let (tag, d) = match block.cone {
            Cone::Nonnegative(d) => ("L+", d),
            Cone::SecondOrder(d) => ("Q", d),
            Cone::RotatedSecondOrder(d) => ("QR", d),
        };
        match cones.last_mut() {
            Some((last, size)) if *last == "L+" && tag == "L+" => *size += d,
            _ => cones.push((tag, d)),
        }
    }
    writeln!(out, "CON\n{m} {}", cones.len())?;
    for (tag, d) in &cones {
        writeln!(out, "{tag} {d}")?;
    }
    writeln!(out)?;

    let obj: Vec<(usize, f64)> = problem
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (j, *c))
        .collect();
    writeln!(out, "OBJACOORD\n{}", obj.len())?;
    for (j, c) in obj {
        writeln!(out, "{j} {c:e}")?;
    }
    writeln!(out)?;
    if problem.objective_offset != 0.0 {
        writeln!(out, "OBJBCOORD\n{:e}\n", problem.objective_offset)?;
    }

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut row = 0;
    for block in &problem.blocks {
        for (r, expr) in block.rows.iter().enumerate() {
            let scale = match block.cone {
                Cone::RotatedSecondOrder(_) if r == 0 => 0.5,
                _ => 1.0,
            };
            for &(v, c) in expr.terms() {
                a.push((row, v.0, c * scale));
            }
            if expr.constant_part() != 0.0 {
                b.push((row, expr.constant_part() * scale));
            }
            row += 1;
        }
    }
    writeln!(out, "ACOORD\n{}", a.len())?;
    for (i, j, c) in a {
        writeln!(out, "{i} {j} {c:e}")?;
    }
    writeln!(out)?;
    writeln!(out, "BCOORD\n{}", b.len())?;
    for (i, c) in b {
        writeln!(out, "{i} {c:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::LinExpr;

    #[test]
    fn cbf_sections_present() {
        let mut p = ConicProblem::new();
        let x = p.add_var("x");
        let q = p.add_var("q");
        p.minimize(&(LinExpr::var(x) + LinExpr::var(q)));
        p.nonneg("a", vec![LinExpr::var(x) - 1.0]);
        p.nonneg("b", vec![LinExpr::var(q)]);
        p.rotated_soc("r", LinExpr::var(q), LinExpr::constant(2.0), vec![LinExpr::var(x)]);
        let mut buf = Vec::new();
        write_cbf(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("VER\n3\n"));
        assert!(text.contains("VAR\n2 1\nF 2\n"));
        // the two nonnegative blocks merge
        assert!(text.contains("CON\n5 2\nL+ 2\nQR 3\n"));
        // q row of the rotated cone is halved
        assert!(text.contains("2 1 5e-1"));
    }
}
