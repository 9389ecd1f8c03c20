//! End-to-end solves, weighted error metrics and convergence studies.

use std::fmt;

use rayon::prelude::*;

use crate::assembler::{assemble, DiscreteSystem};
use crate::error::{Error, Result};
use crate::funcdsl::{BinOp, Expr};
use crate::jacobi::{weight_value, JacobiExponents};
use crate::kernel::{SmoothKernel, WeakKernel};
use crate::lagrange::{validate_exponents, ExponentReport, Method, PsiBasis};
use crate::linalg::LuFactors;

/// The coefficient of the local term, given either as `σ(y)` or directly as
/// the product `(σφ)(y)`, `φ(y) = sqrt(1 - y²)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Sigma {
    Plain(Expr),
    TimesPhi(Expr),
}

impl Sigma {
    /// `(σφ)(y)`.
    pub fn times_phi(&self, y: f64) -> Result<f64> {
        match self {
            Sigma::Plain(e) => Ok(e.eval_y(y)? * (1.0 - y * y).max(0.0).sqrt()),
            Sigma::TimesPhi(e) => e.eval_y(y),
        }
    }
}

/// One instance of the equation: exponents, coefficient, kernels and data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub label: String,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub sigma: Option<Sigma>,
    pub k: SmoothKernel,
    pub h: Option<WeakKernel>,
    pub g: Expr,
    /// Closed-form `ζ`, when known.
    pub exact: Option<Expr>,
}

impl ProblemSpec {
    /// A method-1 problem with `γ = δ = 0`, no kernels.
    pub fn new(label: impl Into<String>, alpha: f64, g: Expr) -> Self {
        Self {
            label: label.into(),
            alpha,
            gamma: 0.0,
            delta: 0.0,
            sigma: None,
            k: SmoothKernel::Zero,
            h: None,
            g,
            exact: None,
        }
    }

    pub fn method(&self) -> Method {
        if self.sigma.is_some() {
            Method::Method2
        } else {
            Method::Method1
        }
    }

    /// `u = v^{γ,δ}`.
    pub fn u_exponents(&self) -> Result<JacobiExponents> {
        JacobiExponents::new(self.gamma, self.delta)
    }

    /// `ρ = v^{α,1-α}`.
    pub fn rho_exponents(&self) -> Result<JacobiExponents> {
        JacobiExponents::new(self.alpha, 1.0 - self.alpha)
    }

    pub fn exponent_report(&self) -> ExponentReport {
        validate_exponents(self.alpha, self.gamma, self.delta, self.method())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.gamma.is_finite() || !self.delta.is_finite() {
            return Err(Error::Config("alpha, gamma and delta must be finite".into()));
        }
        if let Some(h) = &self.h {
            h.validate()?;
        }
        self.exponent_report().into_result()
    }
}

/// `f_m = Σ_k ψ_k a_k` on the ρ basis, and through it `ζ_m = ρ f_m`.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub m: usize,
    pub method: Method,
    /// The unknowns `a_k = (uρ)(t_k) f_m(t_k)`.
    pub coeffs: Vec<f64>,
    /// `f_m = Σ_j expansion[j] p_j^ρ`.
    pub expansion: Vec<f64>,
    pub basis: PsiBasis,
    pub spec: ProblemSpec,
    /// `‖A a − b‖_∞` of the solved system.
    pub residual: f64,
}

impl ApproxSolution {
    /// `f_m(y)`.
    pub fn eval_f(&self, y: f64) -> Result<f64> {
        self.basis.system().eval_series(&self.expansion, y)
    }

    pub fn zeta(&self, y: f64) -> Result<f64> {
        evaluate_zeta(self, y)
    }
}

/// Solution together with `cond_∞` of its system matrix.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: ApproxSolution,
    pub cond: f64,
}

pub fn solve(p: &ProblemSpec, m: usize) -> Result<ApproxSolution> {
    let (sys, lu) = factor(p, m)?;
    finish(p, sys, &lu)
}

/// Like [`solve`], additionally reporting `‖A‖_∞ ‖A⁻¹‖_∞` from the same factors.
pub fn solve_with_cond(p: &ProblemSpec, m: usize) -> Result<SolveOutcome> {
    let (sys, lu) = factor(p, m)?;
    let cond = sys.matrix.norm_inf() * lu.inverse()?.norm_inf();
    Ok(SolveOutcome {
        solution: finish(p, sys, &lu)?,
        cond,
    })
}

fn factor(p: &ProblemSpec, m: usize) -> Result<(DiscreteSystem, LuFactors)> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("m must be at least 2, got {m}")));
    }
    p.validate()?;
    let sys = assemble(p, m)?;
    let lu = LuFactors::new(&sys.matrix)?;
    Ok((sys, lu))
}

fn finish(p: &ProblemSpec, sys: DiscreteSystem, lu: &LuFactors) -> Result<ApproxSolution> {
    let coeffs = lu.solve(&sys.rhs)?;
    let ax = sys.matrix.mul_vec(&coeffs)?;
    let residual = ax
        .iter()
        .zip(&sys.rhs)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let expansion = sys.rho.expansion(&coeffs)?;
    if coeffs.iter().chain(&expansion).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite solution at m = {}", sys.m)));
    }
    Ok(ApproxSolution {
        m: sys.m,
        method: sys.method,
        coeffs,
        expansion,
        basis: sys.rho,
        spec: p.clone(),
        residual,
    })
}

/// `ζ_m(y) = ρ(y) f_m(y)`; exactly zero at `y = ±1`.
pub fn evaluate_zeta(s: &ApproxSolution, y: f64) -> Result<f64> {
    if !(y.abs() <= 1.0) {
        return Err(Error::Domain(format!("zeta evaluated outside [-1, 1] at {y}")));
    }
    if y.abs() == 1.0 {
        return Ok(0.0);
    }
    let rho = weight_value(s.basis.system().exponents(), y)?;
    Ok(rho * s.eval_f(y)?)
}

/// What `ζ_m` is compared against.
#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    Exact(&'a Expr),
    Approx(&'a ApproxSolution),
}

impl Reference<'_> {
    pub fn zeta(&self, y: f64) -> Result<f64> {
        match self {
            Reference::Exact(e) => e.eval_y(y),
            Reference::Approx(s) => evaluate_zeta(s, y),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Reference::Exact(e) => format!("exact {e}"),
            Reference::Approx(s) => format!("zeta_{}", s.m),
        }
    }
}

/// `y_i = -1 + i/100`, `i = 0..=200`.
pub fn error_grid() -> impl Iterator<Item = f64> {
    (0..=200).map(|i| -1.0 + i as f64 / 100.0)
}

/// `max_i u(y_i) |ζ_ref(y_i) − ζ_m(y_i)|` over [`error_grid`].
pub fn error_metrics(s: &ApproxSolution, reference: Reference<'_>) -> Result<f64> {
    let u = s.spec.u_exponents()?;
    let mut worst = 0.0f64;
    for y in error_grid() {
        let diff = (reference.zeta(y)? - evaluate_zeta(s, y)?).abs();
        if diff == 0.0 {
            continue;
        }
        worst = worst.max(weight_value(&u, y)? * diff);
    }
    Ok(worst)
}

/// `log2(err_m / err_2m)`.
pub fn eoc(err_m: f64, err_2m: f64) -> Result<f64> {
    if !(err_m > 0.0 && err_2m > 0.0) {
        return Err(Error::InvalidInput(format!(
            "EOC needs positive errors, got {err_m} and {err_2m}"
        )));
    }
    Ok((err_m / err_2m).log2())
}

/// `log2(cond_2m / cond_m)`.
pub fn nu_estimator(cond_m: f64, cond_2m: f64) -> Result<f64> {
    if !(cond_m >= 1.0 && cond_2m >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "condition numbers must be >= 1, got {cond_m} and {cond_2m}"
        )));
    }
    Ok((cond_2m / cond_m).log2())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferencePolicy {
    /// Compare with the spec's closed-form `exact` ζ.
    Exact,
    /// Compare with the approximation of order `m_ref`.
    SelfRef(usize),
}

impl Default for ReferencePolicy {
    fn default() -> Self {
        ReferencePolicy::SelfRef(1024)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub m: usize,
    pub cond: f64,
    pub err: f64,
    /// From the previous row when it has order `m/2`.
    pub eoc: Option<f64>,
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub label: String,
    pub reference: String,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    pub fn mean_eoc(&self) -> Option<f64> {
        mean(self.rows.iter().filter_map(|r| r.eoc))
    }

    /// Mean of `ν` over doublings whose smaller order is at least `m_min`.
    pub fn mean_nu(&self, m_min: usize) -> Option<f64> {
        mean(self.rows.iter().filter(|r| r.m / 2 >= m_min).filter_map(|r| r.nu))
    }

    pub fn row(&self, m: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.m == m)
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (reference: {})", self.label, self.reference)?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.5}"));
            writeln!(
                f,
                "{:>5}  {:.4e}  {:.4e}  {:>8}  {:>8}",
                r.m,
                r.cond,
                r.err,
                opt(r.eoc),
                opt(r.nu)
            )?;
        }
        Ok(())
    }
}

/// Solves at every `m` (concurrently) and tabulates conditioning, error,
/// EOC and `ν`. Rows come out in the order of `m_list`.
pub fn convergence_study(p: &ProblemSpec, m_list: &[usize], policy: &ReferencePolicy) -> Result<ConvergenceReport> {
    if m_list.is_empty() {
        return Err(Error::InvalidInput("empty m list".into()));
    }
    if m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("m list must be strictly ascending".into()));
    }
    if let Some(&bad) = m_list.iter().find(|&&m| m < 2) {
        return Err(Error::InvalidInput(format!("m must be at least 2, got {bad}")));
    }
    p.validate()?;
    let reference_solution;
    let reference = match policy {
        ReferencePolicy::Exact => match &p.exact {
            Some(e) => Reference::Exact(e),
            None => {
                return Err(Error::Config(format!(
                    "{}: exact reference requested but no exact solution given",
                    p.label
                )))
            }
        },
        ReferencePolicy::SelfRef(m_ref) => {
            reference_solution = solve(p, *m_ref)?;
            Reference::Approx(&reference_solution)
        }
    };
    let measured: Vec<(usize, f64, f64)> = m_list
        .par_iter()
        .map(|&m| {
            let out = solve_with_cond(p, m)?;
            Ok((m, out.cond, error_metrics(&out.solution, reference)?))
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<ReportRow> = Vec::with_capacity(measured.len());
    for (idx, &(m, cond, err)) in measured.iter().enumerate() {
        let prev = idx
            .checked_sub(1)
            .map(|i| measured[i])
            .filter(|&(pm, _, _)| 2 * pm == m);
        let eoc_v = prev.and_then(|(_, _, pe)| eoc(pe, err).ok());
        let nu_v = prev.and_then(|(_, pc, _)| nu_estimator(pc, cond).ok());
        rows.push(ReportRow {
            m,
            cond,
            err,
            eoc: eoc_v,
            nu: nu_v,
        });
    }
    Ok(ConvergenceReport {
        label: p.label.clone(),
        reference: reference.describe(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WingShape {
    Elliptic,
    Rectangular,
}

impl std::str::FromStr for WingShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elliptic" => Ok(WingShape::Elliptic),
            "rectangular" => Ok(WingShape::Rectangular),
            other => Err(Error::Config(format!(
                "unknown wing shape `{other}` (expected elliptic or rectangular)"
            ))),
        }
    }
}

/// Lifting-line problem for a wing of half-span `b` at angle of attack `eps`,
/// with compressibility factor `beta = sqrt(1 - M²)`.
///
/// Elliptic planform: `σφ ≡ 2bβ/π` and the closed form
/// `ζ(y) = sqrt(1 - y²) · 4εb / (1 + 2bβ/π)` is attached. Rectangular:
/// `σ ≡ 2bβ/π`, no closed form.
pub fn wing_preset(shape: WingShape, b: f64, beta: f64, eps: f64) -> Result<ProblemSpec> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Config(format!("half-span must be positive, got {b}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("angle of attack must be positive, got {eps}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Config(format!("beta must lie in (0, 1], got {beta}")));
    }
    let c = 2.0 * b * beta / std::f64::consts::PI;
    let g = Expr::num(4.0 * b * eps);
    let mut spec = ProblemSpec::new(
        format!("{shape:?} wing b={b} beta={beta} eps={eps}").to_lowercase(),
        0.5,
        g,
    );
    match shape {
        WingShape::Elliptic => {
            spec.sigma = Some(Sigma::TimesPhi(Expr::num(c)));
            let amplitude = 4.0 * eps * b / (1.0 + c);
            let phi = crate::funcdsl::parse("sqrt(1 - y^2)")?;
            spec.exact = Some(Expr::bin(BinOp::Mul, Expr::num(amplitude), phi));
        }
        WingShape::Rectangular => {
            spec.sigma = Some(Sigma::Plain(Expr::num(c)));
        }
    }
    Ok(spec)
}
