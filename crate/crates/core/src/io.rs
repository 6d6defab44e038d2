//! CSV tables and the binary space-time dump.
//!
//! Numbers are written in shortest round-trip form (plain decimals, or
//! exponent notation outside `[1e-4, 1e15)`), so equal inputs give
//! byte-identical files. Failed rows carry `NaN`.

use std::io::{self, Write};

use crate::coefficients::MeanSet;
use crate::propagation::{ConvergenceRow, FrontField};
use crate::speed::SpeedRow;
use crate::steady::{FrontProfile, StationaryRow};

pub const MEANS_HEADER: &str = "a_arith,a_harm,mu_arith,p0,c_star_hom";
pub const SPEED_HEADER: &str = "L,c_star,lambda_star,c_hom,gap";
pub const STEADY_HEADER: &str = "L,p_min,p_max,sup_gap";
pub const PROFILE_HEADER: &str = "x,U0";
pub const SPACE_TIME_HEADER: &str = "t,x,u";
pub const TRACE_HEADER: &str = "t,x_theta";
pub const CONVERGENCE_HEADER: &str = "L,c_measured,phase_shift,distance";

fn row<W: Write>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        let a = v.abs();
        if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
            write!(w, "{v}")?;
        } else {
            write!(w, "{v:e}")?;
        }
    }
    w.write_all(b"\n")
}

pub fn write_means<W: Write>(w: &mut W, m: &MeanSet) -> io::Result<()> {
    writeln!(w, "{MEANS_HEADER}")?;
    row(w, &[m.a_arith, m.a_harm, m.mu_arith, m.p0, m.c_star_hom])
}

pub fn write_speed_sweep<W: Write>(w: &mut W, rows: &[SpeedRow], c_hom: f64) -> io::Result<()> {
    writeln!(w, "{SPEED_HEADER}")?;
    for r in rows {
        match &r.result {
            Ok(s) => row(w, &[r.l, s.c_star, s.lambda_star, c_hom, s.c_star - c_hom])?,
            Err(_) => row(w, &[r.l, f64::NAN, f64::NAN, c_hom, f64::NAN])?,
        }
    }
    Ok(())
}

pub fn write_steady_sweep<W: Write>(w: &mut W, rows: &[StationaryRow], p0: f64) -> io::Result<()> {
    writeln!(w, "{STEADY_HEADER}")?;
    for r in rows {
        match &r.result {
            Ok(s) => row(w, &[r.l, s.min(), s.max(), s.sup_gap(p0)])?,
            Err(_) => row(w, &[r.l, f64::NAN, f64::NAN, f64::NAN])?,
        }
    }
    Ok(())
}

pub fn write_profile<W: Write>(w: &mut W, p: &FrontProfile) -> io::Result<()> {
    writeln!(w, "{PROFILE_HEADER}")?;
    for (x, u) in p.xs.iter().zip(&p.values) {
        row(w, &[*x, *u])?;
    }
    Ok(())
}

/// Long format, one line per stored `(t, x)` pair.
pub fn write_space_time<W: Write>(w: &mut W, f: &FrontField) -> io::Result<()> {
    writeln!(w, "{SPACE_TIME_HEADER}")?;
    for (t, values) in f.times.iter().zip(&f.values) {
        for (x, u) in f.xs.iter().zip(values) {
            row(w, &[*t, *x, *u])?;
        }
    }
    Ok(())
}

pub fn write_trace<W: Write>(w: &mut W, f: &FrontField) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for (t, x) in f.trace_times.iter().zip(&f.trace_positions) {
        row(w, &[*t, x.unwrap_or(f64::NAN)])?;
    }
    Ok(())
}

pub fn write_convergence<W: Write>(w: &mut W, rows: &[ConvergenceRow]) -> io::Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    for r in rows {
        row(w, &[r.l, r.c_measured, r.phase_shift, r.distance])?;
    }
    Ok(())
}

/// Little-endian: `u64 nx`, `u64 nt`, `nt` times, `nx` positions, then
/// `nt * nx` values row by row (one row per time).
pub fn write_grid_binary<W: Write>(w: &mut W, f: &FrontField) -> io::Result<()> {
    w.write_all(&(f.xs.len() as u64).to_le_bytes())?;
    w.write_all(&(f.times.len() as u64).to_le_bytes())?;
    for v in f.times.iter().chain(&f.xs).chain(f.values.iter().flatten()) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads back [`write_grid_binary`] output as `(times, xs, values)`.
pub fn read_grid_binary(bytes: &[u8]) -> io::Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let bad = || io::Error::new(io::ErrorKind::InvalidData, "truncated grid file");
    let word = |k: usize| -> io::Result<[u8; 8]> {
        bytes
            .get(8 * k..8 * k + 8)
            .and_then(|s| s.try_into().ok())
            .ok_or_else(bad)
    };
    let nx = u64::from_le_bytes(word(0)?) as usize;
    let nt = u64::from_le_bytes(word(1)?) as usize;
    if bytes.len() != 8 * (2 + nt + nx + nt * nx) {
        return Err(bad());
    }
    let f = |k: usize| word(k).map(f64::from_le_bytes);
    let times = (0..nt).map(|j| f(2 + j)).collect::<io::Result<_>>()?;
    let xs = (0..nx).map(|i| f(2 + nt + i)).collect::<io::Result<_>>()?;
    let values = (0..nt)
        .map(|j| (0..nx).map(|i| f(2 + nt + nx + j * nx + i)).collect())
        .collect::<io::Result<_>>()?;
    Ok((times, xs, values))
}
