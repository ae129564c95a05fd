//! Trajectory dumps.
//!
//! One row per node per frame, columns
//! `t, x_1..x_d, u_1..u_d, udot_1..udot_d, phi, phidot, theta`.
//! The binary form is the same table as raw little-endian f64 values,
//! row-major, without a header. With a time stride, every stride-th frame
//! and the last one are written.

use super::integrator::Trajectory;
use std::io::{self, Write};

pub fn columns(dim: usize) -> Vec<String> {
    let mut c = vec!["t".to_string()];
    for prefix in ["x", "u", "udot"] {
        for i in 1..=dim {
            c.push(format!("{prefix}_{i}"));
        }
    }
    c.extend(["phi", "phidot", "theta"].map(String::from));
    c
}

fn rows(trajectory: &Trajectory, t_stride: usize, mut emit: impl FnMut(&[f64]) -> io::Result<()>) -> io::Result<()> {
    let g = &trajectory.scenario.grid;
    let d = g.dim;
    let mut row = Vec::with_capacity(1 + 3 * d + 3);
    let last = trajectory.frames.len().saturating_sub(1);
    let keep = |n: usize| n % t_stride.max(1) == 0 || n == last;
    for (_, f) in trajectory.frames.iter().enumerate().filter(|(n, _)| keep(*n)) {
        let t = f.time();
        for k in 0..g.len() {
            row.clear();
            row.push(t);
            row.extend_from_slice(&g.position(k)[..d]);
            row.extend_from_slice(&f.u[k][..d]);
            row.extend_from_slice(&f.v[k][..d]);
            row.extend([f.phi[k], f.w[k], f.theta[k]]);
            emit(&row)?;
        }
    }
    Ok(())
}

pub fn write_csv(trajectory: &Trajectory, t_stride: usize, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{}", columns(trajectory.scenario.grid.dim).join(","))?;
    rows(trajectory, t_stride, |r| {
        let line: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", line.join(","))
    })
}

pub fn write_binary(trajectory: &Trajectory, t_stride: usize, out: &mut impl Write) -> io::Result<()> {
    rows(trajectory, t_stride, |r| {
        for x in r {
            out.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_order() {
        assert_eq!(
            columns(2),
            ["t", "x_1", "x_2", "u_1", "u_2", "udot_1", "udot_2", "phi", "phidot", "theta"]
        );
    }
}
