//! Discretization of the perturbation kernels: the smooth part `k(x, y)` is
//! sampled at the nodes, the weakly singular part `h(x, y)` enters through
//! the modified moments `c_j(y) = ∫ h(x, y) p_j^ρ(x) ρ(x) dx`.
//!
//! Moments are computed by splitting the integral at `x = y` and working in
//! the distance `t = |x - y|` on each side. Algebraic endpoint factors are
//! absorbed into Gauss–Jacobi weights; logarithms are resolved by geometric
//! panels toward `t = 0`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcdsl::Expr;
use crate::jacobi::{gauss_jacobi, GaussRule, OrthoSystem};
use crate::linalg::Matrix;

/// The regular part `k(x, y)` of the perturbation.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SmoothKernel {
    #[default]
    Zero,
    Expr(Expr),
}

impl SmoothKernel {
    pub fn is_zero(&self) -> bool {
        match self {
            SmoothKernel::Zero => true,
            SmoothKernel::Expr(e) => e.is_zero_literal(),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            SmoothKernel::Zero => Ok(0.0),
            SmoothKernel::Expr(e) => e.eval(x, y),
        }
    }
}

/// Weakly singular kernels `h(x, y)` as functions of `d = x - y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "mu", rename_all = "snake_case")]
pub enum WeakKernel {
    /// `|d|^μ`
    AbsPow(f64),
    /// `|d|^μ sgn(d)`
    AbsPowSgn(f64),
    /// `log |d|`
    Log,
    /// `|d|^μ log |d|`
    AbsPowLog(f64),
}

impl WeakKernel {
    /// Checks `μ ∈ (-1, 0)` for the power kinds.
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeakKernel::Log => Ok(()),
            WeakKernel::AbsPow(mu) | WeakKernel::AbsPowSgn(mu) | WeakKernel::AbsPowLog(mu) => {
                if mu > -1.0 && mu < 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("{self}: exponent mu must lie in (-1, 0)")))
                }
            }
        }
    }

    /// Exponent of the algebraic factor `|d|^μ` (zero for `Log`).
    pub fn mu(&self) -> f64 {
        match *self {
            WeakKernel::Log => 0.0,
            WeakKernel::AbsPow(mu) | WeakKernel::AbsPowSgn(mu) | WeakKernel::AbsPowLog(mu) => mu,
        }
    }

    pub fn has_log(&self) -> bool {
        matches!(self, WeakKernel::Log | WeakKernel::AbsPowLog(_))
    }

    pub fn is_odd(&self) -> bool {
        matches!(self, WeakKernel::AbsPowSgn(_))
    }

    /// `h` at offset `d = x - y`.
    pub fn eval_offset(&self, d: f64) -> f64 {
        let t = d.abs();
        match *self {
            WeakKernel::AbsPow(mu) => t.powf(mu),
            WeakKernel::AbsPowSgn(mu) => t.powf(mu) * sign(d),
            WeakKernel::Log => t.ln(),
            WeakKernel::AbsPowLog(mu) => t.powf(mu) * t.ln(),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_offset(x - y)
    }
}

fn sign(d: f64) -> f64 {
    if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl fmt::Display for WeakKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeakKernel::AbsPow(mu) => write!(f, "|x-y|^{mu}"),
            WeakKernel::AbsPowSgn(mu) => write!(f, "|x-y|^{mu} sgn(x-y)"),
            WeakKernel::Log => f.write_str("log|x-y|"),
            WeakKernel::AbsPowLog(mu) => write!(f, "|x-y|^{mu} log|x-y|"),
        }
    }
}

/// `c_j(y_i)` for `j < m`, one row per abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    y: Vec<f64>,
    values: Matrix,
}

impl MomentTable {
    pub fn y_points(&self) -> &[f64] {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.values.cols()
    }

    /// `c_j(y_i)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.values
    }
}

/// Panel orders for the moment quadrature: `base + ceil(per_angle · m · Δθ)`
/// points on a panel subtending the angle `Δθ` in `x = cos θ`, rounded up to
/// a multiple of 8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    pub base_order: usize,
    pub per_angle: f64,
    /// Size below which the innermost logarithmic panel may be dropped
    /// into a single Gauss–Jacobi panel without loss.
    pub log_floor: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            base_order: 16,
            per_angle: 0.6,
            log_floor: 1e-17,
        }
    }
}

type RuleKey = (u64, u64, usize);

fn cached_rule(alpha: f64, beta: f64, q: usize) -> Result<Arc<GaussRule>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (alpha.to_bits(), beta.to_bits(), q);
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi(alpha, beta, q)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// One side of the split integral, in `t = |x - y| ∈ (0, len)`.
struct Side {
    y: f64,
    /// `+1` for `x = y + t`, `-1` for `x = y - t`.
    dir: f64,
    len: f64,
    /// Exponent of `(len - t)`, the weight factor vanishing at the far end.
    far: f64,
    /// `(ext + t)^ext_exp` is the weight factor at the opposite endpoint.
    ext: f64,
    ext_exp: f64,
}

struct MomentWork<'a> {
    sys: &'a OrthoSystem,
    kernel: WeakKernel,
    m: usize,
    opts: MomentOptions,
    p: Vec<f64>,
    acc: Vec<f64>,
}

impl MomentWork<'_> {
    fn order(&self, x0: f64, x1: f64) -> usize {
        let dtheta = (x0.clamp(-1.0, 1.0).acos() - x1.clamp(-1.0, 1.0).acos()).abs();
        let q = self.opts.base_order + (self.opts.per_angle * self.m as f64 * dtheta).ceil() as usize;
        q.div_ceil(8) * 8
    }

    /// Adds `∫_{t0}^{t1} h(t) (len - t)^far (ext + t)^ext_exp p_j(x(t)) dt` to
    /// the accumulator. `absorb_mu` puts `t^μ` into the weight (needs
    /// `t0 = 0`); `absorb_far` does the same with `(len - t)^far`
    /// (needs `t1 = len`).
    fn panel(&mut self, side: &Side, t0: f64, t1: f64, absorb_mu: bool, absorb_far: bool) -> Result<()> {
        let mu = self.kernel.mu();
        let beta = if absorb_mu { mu } else { 0.0 };
        let alpha = if absorb_far { side.far } else { 0.0 };
        let q = self.order(side.y + side.dir * t0, side.y + side.dir * t1);
        let rule = cached_rule(alpha, beta, q)?;
        let half = 0.5 * (t1 - t0);
        let scale = half.powf(1.0 + alpha + beta);
        let odd = if self.kernel.is_odd() { side.dir } else { 1.0 };
        for (&s, &lambda) in rule.nodes().iter().zip(rule.weights()) {
            let t = t0 + half * (1.0 + s);
            let x = side.y + side.dir * t;
            let mut f = lambda * scale * odd;
            if !absorb_mu && mu != 0.0 {
                f *= t.powf(mu);
            }
            if self.kernel.has_log() {
                f *= t.ln();
            }
            if !absorb_far && side.far != 0.0 {
                f *= (side.len - t).powf(side.far);
            }
            if side.ext_exp != 0.0 {
                f *= (side.ext + t).powf(side.ext_exp);
            }
            self.sys.eval_all(x, &mut self.p)?;
            for (a, &pj) in self.acc.iter_mut().zip(&self.p) {
                *a += f * pj;
            }
        }
        Ok(())
    }

    /// Breakpoints grow geometrically away from `t = 0`, starting at the
    /// distance to the opposite endpoint so that its singularity stays
    /// outside every panel's convergence region.
    fn side(&mut self, side: &Side) -> Result<()> {
        if side.len <= 0.0 {
            return Ok(());
        }
        let first = if side.ext_exp == 0.0 {
            side.len
        } else {
            side.len.min(side.ext)
        };
        let mut breaks = vec![0.0, first];
        let mut t = first;
        while t < side.len {
            let next = if side.len - t <= 1.5 * t { side.len } else { 2.0 * t };
            breaks.push(next);
            t = next;
        }
        let panels = breaks.len() - 1;
        for k in 0..panels {
            let (t0, t1) = (breaks[k], breaks[k + 1]);
            let last = k + 1 == panels;
            if k == 0 && self.kernel.has_log() {
                self.log_panels(side, t1, last)?;
            } else {
                self.panel(side, t0, t1, k == 0, last)?;
            }
        }
        Ok(())
    }

    /// `[0, t1]` split at `t1/2, t1/4, …` down to a size where the remaining
    /// contribution is negligible; the innermost panel absorbs `t^μ`.
    fn log_panels(&mut self, side: &Side, t1: f64, absorb_far: bool) -> Result<()> {
        let e = 1.0 + self.kernel.mu();
        let floor = self.opts.log_floor;
        let negligible = |d: f64| d.powf(e) * (d.ln().abs() + 1.0 / e) / e <= floor;
        let mut hi = t1;
        let mut outer = true;
        while !negligible(hi) {
            let lo = 0.5 * hi;
            self.panel(side, lo, hi, false, outer && absorb_far)?;
            outer = false;
            hi = lo;
        }
        self.panel(side, 0.0, hi, true, outer && absorb_far)
    }
}

/// `c_j(y) = ∫_{-1}^{1} h(x, y) p_j(x) w(x) dx` for `j < m` at every `y`,
/// where `w` is the weight of `sys`.
pub fn modified_moments(sys: &OrthoSystem, h: &WeakKernel, y_points: &[f64], m: usize) -> Result<MomentTable> {
    modified_moments_with(sys, h, y_points, m, &MomentOptions::default())
}

pub fn modified_moments_with(
    sys: &OrthoSystem,
    h: &WeakKernel,
    y_points: &[f64],
    m: usize,
    opts: &MomentOptions,
) -> Result<MomentTable> {
    h.validate()?;
    if m == 0 || m > sys.n_max() + 1 {
        return Err(Error::DegreeOutOfRange {
            degree: m.saturating_sub(1),
            max: sys.n_max(),
        });
    }
    if let Some(&bad) = y_points.iter().find(|y| !(y.abs() < 1.0)) {
        return Err(Error::Domain(format!(
            "moment abscissa must satisfy |y| < 1, got {bad}"
        )));
    }
    let (a, b) = (sys.exponents().alpha(), sys.exponents().beta());
    let rows: Vec<Vec<f64>> = y_points
        .par_iter()
        .map(|&y| {
            let mut work = MomentWork {
                sys,
                kernel: *h,
                m,
                opts: *opts,
                p: vec![0.0; m],
                acc: vec![0.0; m],
            };
            let right = Side {
                y,
                dir: 1.0,
                len: 1.0 - y,
                far: a,
                ext: 1.0 + y,
                ext_exp: b,
            };
            let left = Side {
                y,
                dir: -1.0,
                len: 1.0 + y,
                far: b,
                ext: 1.0 - y,
                ext_exp: a,
            };
            work.side(&right)?;
            work.side(&left)?;
            if let Some(j) = work.acc.iter().position(|c| !c.is_finite()) {
                return Err(Error::Moment { j, y });
            }
            Ok(work.acc)
        })
        .collect::<Result<_>>()?;
    Ok(MomentTable {
        y: y_points.to_vec(),
        values: Matrix::from_rows(&rows)?,
    })
}

/// `k(t_k, x_i) / π`, rows over `x_points`, columns over the rule's nodes.
pub fn k_block(rule: &GaussRule, k: &SmoothKernel, x_points: &[f64]) -> Result<Matrix> {
    let n = rule.m();
    if k.is_zero() {
        return Ok(Matrix::zeros(x_points.len(), n));
    }
    let rows: Vec<Vec<f64>> = x_points
        .par_iter()
        .map(|&x| {
            rule.nodes()
                .iter()
                .map(|&t| k.eval(t, x).map(|v| v / PI))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Matrix::from_rows(&rows)
}

/// `Σ_j p_j(t_k) c_j(x_i) / π`, rows over the moment abscissae, columns over
/// the rule's nodes.
pub fn h_block(moments: &MomentTable, sys: &OrthoSystem, rule: &GaussRule) -> Result<Matrix> {
    let m = rule.m();
    if moments.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: moments.m(),
        });
    }
    let mut p = Matrix::zeros(m, m);
    for (k, &t) in rule.nodes().iter().enumerate() {
        sys.eval_all(t, p.row_mut(k))?;
    }
    Ok(moments.values.mul_transposed(&p)?.scale(1.0 / PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{build_ortho_system, JacobiExponents};

    fn phi_sys(n: usize) -> OrthoSystem {
        build_ortho_system(JacobiExponents::phi(), n).unwrap()
    }

    #[test]
    fn mu_range_enforced() {
        assert!(WeakKernel::AbsPow(-1.0).validate().is_err());
        assert!(WeakKernel::AbsPowSgn(0.0).validate().is_err());
        assert!(WeakKernel::AbsPowLog(-0.5).validate().is_ok());
        assert!(modified_moments(&phi_sys(4), &WeakKernel::AbsPow(0.5), &[0.0], 4).is_err());
    }

    #[test]
    fn odd_kernel_even_moments_vanish() {
        let sys = phi_sys(8);
        let t = modified_moments(&sys, &WeakKernel::AbsPowSgn(-0.5), &[0.0], 8).unwrap();
        for j in (0..8).step_by(2) {
            assert!(t.get(0, j).abs() < 1e-15, "j={j}: {}", t.get(0, j));
        }
        assert!(t.get(0, 1).abs() > 1e-3);
    }

    #[test]
    fn boundary_abscissa_rejected() {
        let sys = phi_sys(4);
        assert!(matches!(
            modified_moments(&sys, &WeakKernel::Log, &[1.0], 4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn constant_weight_log_moment() {
        // ∫_{-1}^{1} log|x - y| dx = (1-y)log(1-y) + (1+y)log(1+y) - 2
        let sys = build_ortho_system(JacobiExponents::new(0.0, 0.0).unwrap(), 2).unwrap();
        for &y in &[0.0, 0.3, -0.97, 0.999] {
            let t = modified_moments(&sys, &WeakKernel::Log, &[y], 1).unwrap();
            let exact = ((1.0 - y) * (1.0 - y).ln() + (1.0 + y) * (1.0 + y).ln() - 2.0) * sys.p0();
            assert!((t.get(0, 0) - exact).abs() < 1e-14, "y={y}");
        }
    }

    #[test]
    fn smooth_kernel_sampling() {
        let rule = gauss_jacobi(0.5, 0.5, 3).unwrap();
        let zero = k_block(&rule, &SmoothKernel::Zero, &[0.1, 0.2]).unwrap();
        assert_eq!(zero, Matrix::zeros(2, 3));
        let k = SmoothKernel::Expr(crate::funcdsl::parse("cos(x+y)/(x^2+y^2+20)^2").unwrap());
        // a one-point rule for a symmetric weight has its node at the origin
        let rule0 = gauss_jacobi(0.5, 0.5, 1).unwrap();
        let blk = k_block(&rule0, &k, &[0.0]).unwrap();
        assert!((blk[(0, 0)] - 1.0 / (400.0 * PI)).abs() < 1e-18);
    }
}
