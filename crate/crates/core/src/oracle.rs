//! Brute-force reference integrators used to cross-check the production
//! quadratures. Nothing here shares code with the Gauss–Jacobi machinery:
//! integrals come from globally adaptive Gauss–Kronrod (7/15) bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jacobi::{build_ortho_system, JacobiExponents, OrthoSystem};
use crate::kernel::WeakKernel;
use crate::lagrange::{rho_exponents, w_exponents};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Target absolute error.
    pub tol: f64,
    /// Every piece between breakpoints starts as `2^min_depth` equal panels.
    pub min_depth: u32,
    pub max_panels: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            min_depth: 0,
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = WGK[7] * f(c);
    let mut g = WG[3] * f(c);
    for i in 0..7 {
        let d = h * XGK[i];
        let s = f(c - d) + f(c + d);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    Panel {
        a,
        b,
        value,
        error: if error.is_finite() { error } else { f64::INFINITY },
    }
}

/// `∫_a^b f` with breakpoints at the interior `singular` points; `f` is never
/// evaluated at a breakpoint or at `a`, `b`.
pub fn adaptive_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, singular: &[f64], tol: f64) -> Result<f64> {
    let opts = OracleOptions {
        tol,
        ..OracleOptions::default()
    };
    adaptive_integral_with(f, a, b, singular, &opts).map(|e| e.value)
}

pub fn adaptive_integral_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singular: &[f64],
    opts: &OracleOptions,
) -> Result<OracleEstimate> {
    if !(a < b) {
        return Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")));
    }
    let mut breaks = vec![a];
    let mut inner: Vec<f64> = singular.iter().copied().filter(|&s| s > a && s < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    breaks.extend(inner);
    breaks.push(b);

    let mut heap = BinaryHeap::new();
    let pieces = 1usize << opts.min_depth.min(20);
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / pieces as f64;
        for k in 0..pieces {
            let lo = w[0] + h * k as f64;
            let hi = if k + 1 == pieces { w[1] } else { lo + h };
            heap.push(kronrod(&f, lo, hi));
        }
    }
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    loop {
        let total_error: f64 = frozen_error + heap.iter().map(|p| p.error).sum::<f64>();
        let panels = heap.len();
        if total_error <= opts.tol {
            let value = frozen_value + heap.iter().map(|p| p.value).sum::<f64>();
            return Ok(OracleEstimate {
                value,
                error: total_error,
                panels,
            });
        }
        if panels >= opts.max_panels {
            return Err(Error::Quadrature {
                a,
                b,
                tol: opts.tol,
                estimate: total_error,
            });
        }
        let worst = heap.pop().expect("non-empty panel set");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // cannot split further in floating point
            frozen_value += worst.value;
            frozen_error += worst.error;
            if heap.is_empty() {
                return Err(Error::Quadrature {
                    a,
                    b,
                    tol: opts.tol,
                    estimate: frozen_error,
                });
            }
            continue;
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

fn jacobi_weight(a: f64, b: f64, x: f64) -> f64 {
    (1.0 - x).powf(a) * (1.0 + x).powf(b)
}

/// Principal value `PV ∫_{-1}^{1} f(x) ρ(x) / (x - y) dx` by subtracting the
/// value at `y`:
/// `∫ (F(x) - F(y)) / (x - y) dx + F(y) log((1-y)/(1+y))`, `F = f ρ`.
pub fn pv_cauchy<F: Fn(f64) -> f64>(f: F, rho: &JacobiExponents, y: f64, tol: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("principal value needs |y| < 1, got {y}")));
    }
    let (a, b) = (rho.alpha(), rho.beta());
    let fy = f(y) * jacobi_weight(a, b, y);
    let regular = adaptive_integral(|x| (f(x) * jacobi_weight(a, b, x) - fy) / (x - y), -1.0, 1.0, &[y], tol)?;
    Ok(regular + fy * ((1.0 - y) / (1.0 + y)).ln())
}

/// Checks `d/dy [a ρ p_n^ρ + (b/π) PV∫ p_n^ρ ρ/(x-y)] = (n+1) p_n^w` with
/// `a = cos πα`, `b = -sin πα`, by central differences of step `step` at 20
/// interior points. Returns `max |lhs - rhs| / max |rhs|`.
pub fn verify_spectral_identity(n: usize, alpha: f64, step: f64) -> Result<f64> {
    if n > 20 {
        return Err(Error::InvalidInput(format!("degree {n} above 20")));
    }
    let rho = rho_exponents(alpha)?;
    let sys_rho: OrthoSystem = build_ortho_system(rho, n)?;
    let sys_w: OrthoSystem = build_ortho_system(w_exponents(alpha)?, n)?;
    let (ca, cb) = ((PI * alpha).cos(), -(PI * alpha).sin());
    let pn = |x: f64| sys_rho.eval(n, x).unwrap_or(f64::NAN);
    let outer = |y: f64| -> Result<f64> {
        let local = ca * jacobi_weight(rho.alpha(), rho.beta(), y) * pn(y);
        Ok(local + cb / PI * pv_cauchy(pn, &rho, y, 1e-14)?)
    };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..20 {
        let y = 0.9 * ((i as f64 + 0.5) * PI / 20.0).cos();
        let lhs = (outer(y + step)? - outer(y - step)?) / (2.0 * step);
        let rhs = (n as f64 + 1.0) * sys_w.eval(n, y)?;
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(rhs.abs());
    }
    Ok(worst / scale)
}

/// Reference value of `c_j(y) = ∫ h(x, y) p_j^ρ(x) ρ(x) dx`, integrated in the
/// distance `t = |x - y|` on each side of `y` so nothing cancels near the
/// singularity.
pub fn moment(sys: &OrthoSystem, kernel: &WeakKernel, y: f64, j: usize, tol: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("moment abscissa must satisfy |y| < 1, got {y}")));
    }
    let (a, b) = (sys.exponents().alpha(), sys.exponents().beta());
    let p = |x: f64| sys.eval(j, x).unwrap_or(f64::NAN);
    let right = adaptive_integral(
        |t| kernel.eval_offset(t) * (1.0 - y - t).max(0.0).powf(a) * (1.0 + y + t).powf(b) * p(y + t),
        0.0,
        1.0 - y,
        &[],
        tol,
    )?;
    let left = adaptive_integral(
        |t| kernel.eval_offset(-t) * (1.0 - y + t).powf(a) * (1.0 + y - t).max(0.0).powf(b) * p(y - t),
        0.0,
        1.0 + y,
        &[],
        tol,
    )?;
    Ok(left + right)
}
