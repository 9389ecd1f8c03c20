//! Weighted fundamental Lagrange bases `ψ_i` and the interpolation
//! operators they represent.
//!
//! For a Gauss rule `(node_i, λ_i)` of a Jacobi weight `θ` and a per-node
//! divisor `d_i = (u·μ)(node_i)`,
//!
//! ```text
//! ψ_i(x) = λ_i Σ_{j<m} p_j(node_i) p_j(x) / d_i
//! ```
//!
//! so that `ψ_i(node_k) = δ_ik / d_i` and `L_m(G, x) = Σ_i ψ_i(x) d_i G(node_i)`.
//! The `w` basis uses `θ = w = v^{1-α,α}` with modulation `μ = φ`; the `ρ`
//! basis uses `θ = ρ = v^{α,1-α}` with modulation `μ = ρ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{build_ortho_system, gauss_rule, GaussRule, JacobiExponents, OrthoSystem};
use crate::scalar::Real;

/// Which of the two interpolation processes a basis realises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Zeros of `p_m^w`, divisor `(uφ)(x_i)`.
    W,
    /// Zeros of `p_m^ρ`, divisor `(uρ)(t_i)`.
    Rho,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiBasis<T = f64> {
    kind: BasisKind,
    system: OrthoSystem<T>,
    rule: GaussRule<T>,
    u: JacobiExponents<T>,
    divisors: Vec<T>,
    /// Row-major `m × m`, entry `(i, j) = p_j(node_i)`.
    table: Vec<T>,
}

/// `w = v^{1-α, α}`.
pub fn w_exponents<T: Real>(alpha: T) -> Result<JacobiExponents<T>> {
    JacobiExponents::new(T::one() - alpha, alpha)
}

/// `ρ = v^{α, 1-α}`.
pub fn rho_exponents<T: Real>(alpha: T) -> Result<JacobiExponents<T>> {
    JacobiExponents::new(alpha, T::one() - alpha)
}

impl<T: Real> PsiBasis<T> {
    /// Basis on the `m` zeros of `p_m^w`, `w = v^{1-α,α}`.
    pub fn w_basis(alpha: T, u: JacobiExponents<T>, m: usize) -> Result<Self> {
        let sys = build_ortho_system(w_exponents(alpha)?, m)?;
        Self::new(BasisKind::W, sys, m, u, JacobiExponents::phi())
    }

    /// Basis on the `m` zeros of `p_m^ρ`, `ρ = v^{α,1-α}`.
    pub fn rho_basis(alpha: T, u: JacobiExponents<T>, m: usize) -> Result<Self> {
        let rho = rho_exponents(alpha)?;
        let sys = build_ortho_system(rho, m)?;
        Self::new(BasisKind::Rho, sys, m, u, rho)
    }

    /// General constructor; `modulation` is the weight multiplying `u` in the divisors.
    pub fn new(
        kind: BasisKind,
        system: OrthoSystem<T>,
        m: usize,
        u: JacobiExponents<T>,
        modulation: JacobiExponents<T>,
    ) -> Result<Self> {
        let rule = gauss_rule(&system, m)?;
        let scale = u.product(&modulation)?;
        let divisors = rule
            .nodes()
            .iter()
            .map(|&x| scale.value(x))
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = divisors.iter().position(|d| !(*d > T::zero())) {
            return Err(Error::Domain(format!(
                "non-positive divisor at node {bad} of the {kind:?} basis"
            )));
        }
        let mut table = vec![T::zero(); m * m];
        for (row, &x) in table.chunks_mut(m).zip(rule.nodes()) {
            system.eval_all(x, row)?;
        }
        Ok(Self {
            kind,
            system,
            rule,
            u,
            divisors,
            table,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.rule.m()
    }

    pub fn system(&self) -> &OrthoSystem<T> {
        &self.system
    }

    pub fn rule(&self) -> &GaussRule<T> {
        &self.rule
    }

    pub fn nodes(&self) -> &[T] {
        self.rule.nodes()
    }

    pub fn christoffel(&self) -> &[T] {
        self.rule.weights()
    }

    pub fn u(&self) -> &JacobiExponents<T> {
        &self.u
    }

    /// `d_i`, the per-node divisors.
    pub fn divisors(&self) -> &[T] {
        &self.divisors
    }

    /// `p_j(node_i)` for `j < m`.
    pub fn table_row(&self, i: usize) -> &[T] {
        let m = self.m();
        &self.table[i * m..(i + 1) * m]
    }

    fn exact_node(&self, x: T) -> Option<usize> {
        self.nodes()
            .binary_search_by(|n| n.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less))
            .ok()
    }

    /// `ψ_i(x)` for the zero-based node index `i`.
    pub fn psi_eval(&self, i: usize, x: T) -> Result<T> {
        let m = self.m();
        if i >= m {
            return Err(Error::IndexOutOfRange { index: i, len: m });
        }
        if !(x.abs() <= T::one()) {
            return Err(Error::Domain(format!("basis evaluated at x = {x}")));
        }
        if let Some(k) = self.exact_node(x) {
            return Ok(if k == i { T::one() / self.divisors[i] } else { T::zero() });
        }
        let mut p = vec![T::zero(); m];
        self.system.eval_all(x, &mut p)?;
        let sum = self
            .table_row(i)
            .iter()
            .zip(&p)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        Ok(self.christoffel()[i] * sum / self.divisors[i])
    }

    /// Orthonormal expansion `β_j` of `Σ_i coeffs[i] ψ_i`, i.e.
    /// `Σ_i coeffs[i] ψ_i(x) = Σ_j β_j p_j(x)`.
    pub fn expansion(&self, coeffs: &[T]) -> Result<Vec<T>> {
        let m = self.m();
        if coeffs.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: coeffs.len(),
            });
        }
        let mut beta = vec![T::zero(); m];
        for (i, &a) in coeffs.iter().enumerate() {
            let scale = a * self.christoffel()[i] / self.divisors[i];
            for (b, &p) in beta.iter_mut().zip(self.table_row(i)) {
                *b = *b + scale * p;
            }
        }
        Ok(beta)
    }

    /// `Σ_i coeffs[i] ψ_i(x)`.
    pub fn eval_combination(&self, coeffs: &[T], x: T) -> Result<T> {
        let beta = self.expansion(coeffs)?;
        self.system.eval_series(&beta, x)
    }

    /// `L_m(G, x) = Σ_i ψ_i(x) d_i G(node_i)` from samples `G(node_i)`.
    pub fn interpolate(&self, samples: &[T], x: T) -> Result<T> {
        let m = self.m();
        if samples.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: samples.len(),
            });
        }
        if !(x.abs() <= T::one()) {
            return Err(Error::Domain(format!("interpolant evaluated at x = {x}")));
        }
        if let Some(k) = self.exact_node(x) {
            return Ok(samples[k]);
        }
        let coeffs: Vec<T> = samples.iter().zip(&self.divisors).map(|(&g, &d)| g * d).collect();
        self.eval_combination(&coeffs, x)
    }
}

fn require_kind<T: Real>(basis: &PsiBasis<T>, kind: BasisKind) -> Result<()> {
    if basis.kind() == kind {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "expected a {kind:?} basis, got {:?}",
            basis.kind()
        )))
    }
}

/// `L_m^w(G, x)` from samples `G(x_i)` at the zeros of `p_m^w`.
pub fn interpolate_w<T: Real>(basis: &PsiBasis<T>, samples: &[T], x: T) -> Result<T> {
    require_kind(basis, BasisKind::W)?;
    basis.interpolate(samples, x)
}

/// `L_m^ρ(G, x)` from samples `G(t_i)` at the zeros of `p_m^ρ`.
pub fn interpolate_rho<T: Real>(basis: &PsiBasis<T>, samples: &[T], x: T) -> Result<T> {
    require_kind(basis, BasisKind::Rho)?;
    basis.interpolate(samples, x)
}

/// Which collocation method the exponent constraints are checked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// `σ ≡ 0`, `0 < α < 1`.
    Method1,
    /// `σ` present, `α = 1/2`.
    Method2,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Method1 => f.write_str("method1"),
            Method::Method2 => f.write_str("method2"),
        }
    }
}

/// One failed inequality of the exponent constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Human-readable inequality, e.g. `gamma < -alpha/2 + 1/2`.
    pub constraint: String,
    pub value: f64,
    pub bound: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails (value {}, bound {})",
            self.constraint, self.value, self.bound
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub method: Method,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub violations: Vec<Violation>,
}

impl ExponentReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ExponentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} alpha={} gamma={} delta={}: ",
            self.method, self.alpha, self.gamma, self.delta
        )?;
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the admissible range of `(γ, δ)` for the chosen method.
///
/// Method 1: `max{0, 1/4 - α/2} <= γ < 1/2 - α/2` and `max{0, α/2 - 1/4} <= δ < α/2`.
/// Method 2 (α = 1/2): `0 <= γ < 1/4` and `0 <= δ < 1/4`.
pub fn validate_exponents(alpha: f64, gamma: f64, delta: f64, method: Method) -> ExponentReport {
    let mut violations = Vec::new();
    let mut check = |holds: bool, constraint: &str, value: f64, bound: f64| {
        if !holds {
            violations.push(Violation {
                constraint: constraint.to_string(),
                value,
                bound,
            });
        }
    };
    check(alpha > 0.0 && alpha < 1.0, "0 < alpha < 1", alpha, 0.0);
    match method {
        Method::Method1 => {
            let g_lo = (0.25 - alpha / 2.0).max(0.0);
            let g_hi = 0.5 - alpha / 2.0;
            let d_lo = (alpha / 2.0 - 0.25).max(0.0);
            let d_hi = alpha / 2.0;
            check(gamma >= g_lo, "gamma >= max{0, -alpha/2 + 1/4}", gamma, g_lo);
            check(gamma < g_hi, "gamma < -alpha/2 + 1/2", gamma, g_hi);
            check(delta >= d_lo, "delta >= max{0, alpha/2 - 1/4}", delta, d_lo);
            check(delta < d_hi, "delta < alpha/2", delta, d_hi);
        }
        Method::Method2 => {
            check(alpha == 0.5, "alpha = 1/2", alpha, 0.5);
            check(gamma >= 0.0, "gamma >= 0", gamma, 0.0);
            check(gamma < 0.25, "gamma < 1/4", gamma, 0.25);
            check(delta >= 0.0, "delta >= 0", delta, 0.0);
            check(delta < 0.25, "delta < 1/4", delta, 0.25);
        }
    }
    ExponentReport {
        method,
        alpha,
        gamma,
        delta,
        violations,
    }
}
