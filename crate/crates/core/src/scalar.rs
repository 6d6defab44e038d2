//! One-dimensional minimization and root finding.

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    /// Final bracket `(a, b)` containing `x`.
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Counts calls and propagates the first error.
struct Counted<F> {
    f: F,
    calls: usize,
}

impl<F: FnMut(f64) -> Result<f64>> Counted<F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.calls += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("objective is {v} at {x}")));
        }
        Ok(v)
    }
}

/// Minimizes `f` over `[lo, hi]`, starting the search at `start`.
///
/// The bracket grows geometrically (factor 2) from `start` until the middle
/// point is below both ends, then Brent's method refines it to relative
/// tolerance `rel_tol`. If the walk hits `lo` or `hi` without a bracket, the
/// minimum sits on the boundary and `NoBracket` is returned. A flat
/// objective (all three bracket values equal) yields the bracket midpoint.
pub fn minimize_bracketed<F>(f: F, start: f64, lo: f64, hi: f64, rel_tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    assert!(lo > 0.0 && lo < hi && start >= lo && start <= hi);
    let mut fc = Counted { f, calls: 0 };
    let factor = 2.0;
    let mut m = start;
    let mut fm = fc.eval(m)?;
    let mut left = (m / factor).max(lo);
    let mut fl = fc.eval(left)?;
    let mut right = (m * factor).min(hi);
    let mut fr = fc.eval(right)?;
    loop {
        if fm <= fl && fm <= fr {
            break;
        }
        if fl < fr {
            if left <= lo {
                return Err(Error::NoBracket { lo, hi });
            }
            right = m;
            fr = fm;
            m = left;
            fm = fl;
            left = (left / factor).max(lo);
            fl = fc.eval(left)?;
        } else {
            if right >= hi {
                return Err(Error::NoBracket { lo, hi });
            }
            left = m;
            fl = fm;
            m = right;
            fm = fr;
            right = (right * factor).min(hi);
            fr = fc.eval(right)?;
        }
    }
    if fl == fm && fm == fr {
        let x = 0.5 * (left + right);
        let value = fc.eval(x)?;
        return Ok(Minimum {
            x,
            value,
            bracket: (left, right),
            evaluations: fc.calls,
        });
    }
    let found = brent(&mut fc, left, m, fm, right, rel_tol)?;
    Ok(Minimum {
        evaluations: fc.calls,
        ..found
    })
}

fn brent<F>(
    fc: &mut Counted<F>,
    a0: f64,
    x0: f64,
    fx0: f64,
    b0: f64,
    rel_tol: f64,
) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a0, b0);
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (fx0, fx0, fx0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = rel_tol * x.abs() + 1e-300;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = fc.eval(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(Minimum {
        x,
        value: fx,
        bracket: (a, b),
        evaluations: 0,
    })
}

/// Root of `f` in `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidInput(format!(
            "no sign change on [{a}, {b}]: f = {fa}, {fb}"
        )));
    }
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
