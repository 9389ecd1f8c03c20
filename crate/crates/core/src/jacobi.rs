//! Jacobi weights, orthonormal Jacobi polynomials and Gauss–Jacobi rules.
//!
//! A Jacobi weight is `v^{a,b}(x) = (1-x)^a (1+x)^b` on `[-1, 1]`. The
//! orthonormal polynomials `p_n` (positive leading coefficient) satisfy
//!
//! ```text
//! x p_n(x) = a_{n+1} p_{n+1}(x) + b_n p_n(x) + a_n p_{n-1}(x)
//! ```
//!
//! and the Gauss rule of order `m` uses the zeros of `p_m` as nodes with the
//! Christoffel numbers `λ_k = 1 / Σ_{j<m} p_j(x_k)^2` as weights.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exponents `(alpha, beta)` of the Jacobi weight `(1-x)^alpha (1+x)^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiExponents<T = f64> {
    alpha: T,
    beta: T,
}

impl<T: Real> JacobiExponents<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        let ok = |e: T| e.is_finite() && e > -T::one();
        if ok(alpha) && ok(beta) {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::InvalidExponents {
                alpha: alpha.as_f64(),
                beta: beta.as_f64(),
            })
        }
    }

    /// The Chebyshev weight of the second kind, `sqrt(1 - x^2)`.
    pub fn phi() -> Self {
        let half = T::lit(0.5);
        Self {
            alpha: half,
            beta: half,
        }
    }

    /// Exponent at `x = +1`.
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Exponent at `x = -1`.
    pub fn beta(&self) -> T {
        self.beta
    }

    /// Pointwise product of two Jacobi weights.
    pub fn product(&self, other: &Self) -> Result<Self> {
        Self::new(self.alpha + other.alpha, self.beta + other.beta)
    }

    /// `∫_{-1}^{1} (1-x)^alpha (1+x)^beta dx = 2^{alpha+beta+1} B(alpha+1, beta+1)`.
    pub fn mass(&self) -> T {
        let a = self.alpha.as_f64();
        let b = self.beta.as_f64();
        let value = (a + b + 1.0).exp2() * libm::tgamma(a + 1.0) * libm::tgamma(b + 1.0) / libm::tgamma(a + b + 2.0);
        T::lit(value)
    }

    pub fn value(&self, x: T) -> Result<T> {
        weight_value(self, x)
    }
}

fn endpoint_factor<T: Real>(base: T, exponent: T, x: T) -> Result<T> {
    if exponent == T::zero() {
        return Ok(T::one());
    }
    if base == T::zero() {
        if exponent > T::zero() {
            return Ok(T::zero());
        }
        return Err(Error::Domain(format!(
            "negative exponent {exponent} evaluated at endpoint x = {x}"
        )));
    }
    Ok(base.powf(exponent))
}

/// Evaluates `(1-x)^alpha (1+x)^beta` for `|x| <= 1`.
pub fn weight_value<T: Real>(exps: &JacobiExponents<T>, x: T) -> Result<T> {
    if !(x.abs() <= T::one()) {
        return Err(Error::Domain(format!("Jacobi weight evaluated at x = {x}")));
    }
    let right = endpoint_factor(T::one() - x, exps.alpha, x)?;
    let left = endpoint_factor(T::one() + x, exps.beta, x)?;
    Ok(right * left)
}

/// Orthonormal Jacobi polynomials up to a fixed maximum degree.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoSystem<T = f64> {
    exponents: JacobiExponents<T>,
    mu0: T,
    n_max: usize,
    /// `b_n`, n = 0..=n_max
    diag: Vec<T>,
    /// `a_n`, n = 0..=n_max+1 (`a_0` unused and stored as zero)
    offdiag: Vec<T>,
    inv_offdiag: Vec<T>,
}

fn recurrence_diag<T: Real>(a: T, b: T, n: usize) -> T {
    let two = T::lit(2.0);
    if n == 0 {
        return (b - a) / (a + b + two);
    }
    let s = two * T::from_usize_lossy(n) + a + b;
    (b * b - a * a) / (s * (s + two))
}

fn recurrence_offdiag<T: Real>(a: T, b: T, n: usize) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    if n == 1 {
        // (1+a+b) cancels between numerator and denominator
        let s = two + a + b;
        return (four * (one + a) * (one + b) / (s * s * (s + one))).sqrt();
    }
    let nf = T::from_usize_lossy(n);
    let s = two * nf + a + b;
    (four * nf * (nf + a) * (nf + b) * (nf + a + b) / (s * s * (s + one) * (s - one))).sqrt()
}

impl<T: Real> OrthoSystem<T> {
    pub fn exponents(&self) -> &JacobiExponents<T> {
        &self.exponents
    }

    /// `∫ v^{alpha,beta}`.
    pub fn mu0(&self) -> T {
        self.mu0
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `b_n` of the orthonormal recurrence.
    pub fn diag(&self, n: usize) -> T {
        self.diag[n]
    }

    /// `a_n` of the orthonormal recurrence (`n >= 1`).
    pub fn offdiag(&self, n: usize) -> T {
        self.offdiag[n]
    }

    pub fn p0(&self) -> T {
        T::one() / self.mu0.sqrt()
    }

    /// Value of `p_n(x)` by forward recurrence.
    pub fn eval(&self, n: usize, x: T) -> Result<T> {
        if n > self.n_max {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                max: self.n_max,
            });
        }
        let mut prev = T::zero();
        let mut cur = self.p0();
        for k in 0..n {
            let next = ((x - self.diag[k]) * cur - self.offdiag[k] * prev) * self.inv_offdiag[k + 1];
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// Fills `out[j] = p_j(x)` for `j < out.len()`.
    pub fn eval_all(&self, x: T, out: &mut [T]) -> Result<()> {
        if out.is_empty() {
            return Ok(());
        }
        if out.len() > self.n_max + 1 {
            return Err(Error::DegreeOutOfRange {
                degree: out.len() - 1,
                max: self.n_max,
            });
        }
        let mut prev = T::zero();
        let mut cur = self.p0();
        out[0] = cur;
        #[allow(clippy::needless_range_loop)]
        for k in 1..out.len() {
            let next = ((x - self.diag[k - 1]) * cur - self.offdiag[k - 1] * prev) * self.inv_offdiag[k];
            prev = cur;
            cur = next;
            out[k] = cur;
        }
        Ok(())
    }

    /// `Σ_j coeffs[j] p_j(x)`.
    pub fn eval_series(&self, coeffs: &[T], x: T) -> Result<T> {
        if coeffs.is_empty() {
            return Ok(T::zero());
        }
        if coeffs.len() > self.n_max + 1 {
            return Err(Error::DegreeOutOfRange {
                degree: coeffs.len() - 1,
                max: self.n_max,
            });
        }
        let mut prev = T::zero();
        let mut cur = self.p0();
        let mut sum = coeffs[0] * cur;
        for (k, &c) in coeffs.iter().enumerate().skip(1) {
            let next = ((x - self.diag[k - 1]) * cur - self.offdiag[k - 1] * prev) * self.inv_offdiag[k];
            prev = cur;
            cur = next;
            sum = sum + c * cur;
        }
        Ok(sum)
    }

    /// `(p_n(x), p_n'(x))`.
    pub fn eval_with_derivative(&self, n: usize, x: T) -> Result<(T, T)> {
        if n > self.n_max {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                max: self.n_max,
            });
        }
        let (mut p_prev, mut p) = (T::zero(), self.p0());
        let (mut d_prev, mut d) = (T::zero(), T::zero());
        for k in 0..n {
            let inv = self.inv_offdiag[k + 1];
            let p_next = ((x - self.diag[k]) * p - self.offdiag[k] * p_prev) * inv;
            let d_next = (p + (x - self.diag[k]) * d - self.offdiag[k] * d_prev) * inv;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
        Ok((p, d))
    }

    /// Number of zeros of `p_n` strictly greater than `x`, from the sign
    /// changes of `p_0(x), ..., p_n(x)`.
    fn zeros_above(&self, n: usize, x: T) -> usize {
        let mut prev = T::zero();
        let mut cur = self.p0();
        let mut changes = 0;
        let mut last_sign = cur > T::zero();
        for k in 0..n {
            let next = ((x - self.diag[k]) * cur - self.offdiag[k] * prev) * self.inv_offdiag[k + 1];
            prev = cur;
            cur = next;
            if cur != T::zero() {
                let sign = cur > T::zero();
                if sign != last_sign {
                    changes += 1;
                }
                last_sign = sign;
            } else {
                // a zero takes the sign opposite to the previous term
                changes += 1;
                last_sign = !last_sign;
            }
        }
        changes
    }

    /// Gauss rule with `m` nodes for this weight.
    pub fn gauss_rule(&self, m: usize) -> Result<GaussRule<T>> {
        gauss_rule(self, m)
    }
}

/// Builds the orthonormal recurrence for `v^{alpha,beta}` valid for degrees `0..=n_max`.
pub fn build_ortho_system<T: Real>(exps: JacobiExponents<T>, n_max: usize) -> Result<OrthoSystem<T>> {
    let (a, b) = (exps.alpha, exps.beta);
    JacobiExponents::new(a, b)?;
    let diag: Vec<T> = (0..=n_max).map(|n| recurrence_diag(a, b, n)).collect();
    let mut offdiag = Vec::with_capacity(n_max + 2);
    offdiag.push(T::zero());
    for n in 1..=n_max + 1 {
        offdiag.push(recurrence_offdiag(a, b, n));
    }
    let inv_offdiag = offdiag
        .iter()
        .map(|&v| if v == T::zero() { T::zero() } else { T::one() / v })
        .collect();
    Ok(OrthoSystem {
        exponents: exps,
        mu0: exps.mass(),
        n_max,
        diag,
        offdiag,
        inv_offdiag,
    })
}

/// Nodes (ascending) and Christoffel numbers of an `m`-point Gauss–Jacobi rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule<T = f64> {
    exponents: JacobiExponents<T>,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn exponents(&self) -> &JacobiExponents<T> {
        &self.exponents
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Christoffel numbers, aligned with [`nodes`](Self::nodes).
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `Σ λ_k f(x_k)`, an approximation of `∫ f v^{alpha,beta}`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

const MAX_NEWTON_ITERATIONS: usize = 100;

fn newton_nodes<T: Real>(sys: &OrthoSystem<T>, m: usize) -> Option<Vec<T>> {
    let (a, b) = (sys.exponents.alpha, sys.exponents.beta);
    let tol = T::node_tolerance();
    let denom = T::from_usize_lossy(m) + (a + b + T::one()) * T::lit(0.5);
    let mut nodes = Vec::with_capacity(m);
    for k in 1..=m {
        let theta = T::PI() * (T::from_usize_lossy(k) - T::lit(0.25) + a * T::lit(0.5)) / denom;
        let mut x = theta.cos();
        let mut converged = false;
        for _ in 0..MAX_NEWTON_ITERATIONS {
            let (p, dp) = sys.eval_with_derivative(m, x).ok()?;
            if dp == T::zero() || !dp.is_finite() {
                return None;
            }
            let step = p / dp;
            x = x - step;
            if step.abs() <= tol {
                converged = true;
                break;
            }
        }
        if !converged || !(x.abs() < T::one()) {
            return None;
        }
        nodes.push(x);
    }
    nodes.reverse();
    Some(nodes)
}

/// Checks that the computed nodes are the `m` distinct zeros of `p_m`, in order.
fn nodes_separate_zeros<T: Real>(sys: &OrthoSystem<T>, nodes: &[T]) -> bool {
    let m = nodes.len();
    if nodes.iter().any(|x| !(x.abs() < T::one())) {
        return false;
    }
    for i in 0..m.saturating_sub(1) {
        if !(nodes[i] < nodes[i + 1]) {
            return false;
        }
        let mid = (nodes[i] + nodes[i + 1]) * T::lit(0.5);
        if sys.zeros_above(m, mid) != m - i - 1 {
            return false;
        }
    }
    true
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples rows `i` and `i+1`), by implicit QL.
pub(crate) fn tridiagonal_eigenvalues<T: Real>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    if e.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: e.len(),
        });
    }
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= T::epsilon() * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    m: n,
                    detail: "tridiagonal QL iteration limit".into(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[mm] - d[l] + e[l] / (g + signed);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = mm;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[mm] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[mm] = T::zero();
        }
    }
    d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(())
}

/// Golub–Welsch nodes: eigenvalues of the Jacobi matrix, polished by Newton.
pub(crate) fn eigen_nodes<T: Real>(sys: &OrthoSystem<T>, m: usize) -> Result<Vec<T>> {
    let mut d: Vec<T> = (0..m).map(|n| sys.diag[n]).collect();
    let mut e: Vec<T> = (0..m).map(|n| sys.offdiag[n + 1]).collect();
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    for x in d.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = sys.eval_with_derivative(m, *x)?;
            if dp == T::zero() {
                break;
            }
            let step = p / dp;
            // only accept polishing that stays near the eigenvalue
            if step.abs() > T::lit(1e-6) {
                break;
            }
            *x = *x - step;
        }
    }
    Ok(d)
}

/// Gauss–Jacobi rule with `m` nodes.
///
/// Nodes come from Newton's method on the orthonormal recurrence started at
/// Chebyshev-angle guesses; if any node fails to converge or the zero count
/// check fails, the Jacobi-matrix eigenvalues are used instead. Weights are
/// the reciprocal Christoffel function.
pub fn gauss_rule<T: Real>(sys: &OrthoSystem<T>, m: usize) -> Result<GaussRule<T>> {
    if m == 0 {
        return Err(Error::InvalidInput("Gauss rule needs at least one node".into()));
    }
    if m > sys.n_max {
        return Err(Error::DegreeOutOfRange {
            degree: m,
            max: sys.n_max,
        });
    }
    let nodes = match newton_nodes(sys, m) {
        Some(nodes) if nodes_separate_zeros(sys, &nodes) => nodes,
        _ => {
            let nodes = eigen_nodes(sys, m)?;
            if !nodes_separate_zeros(sys, &nodes) {
                return Err(Error::NoConvergence {
                    m,
                    detail: "Newton and eigenvalue nodes both failed the zero-count check".into(),
                });
            }
            nodes
        }
    };
    Ok(GaussRule {
        exponents: sys.exponents,
        weights: christoffel_numbers(sys, &nodes)?,
        nodes,
    })
}

fn christoffel_numbers<T: Real>(sys: &OrthoSystem<T>, nodes: &[T]) -> Result<Vec<T>> {
    let m = nodes.len();
    let mut values = vec![T::zero(); m];
    nodes
        .iter()
        .map(|&x| {
            sys.eval_all(x, &mut values)?;
            let sum = values.iter().fold(T::zero(), |acc, &p| acc + p * p);
            Ok(T::one() / sum)
        })
        .collect()
}

/// Convenience: Gauss–Jacobi rule for `v^{alpha,beta}` without keeping the system.
pub fn gauss_jacobi<T: Real>(alpha: T, beta: T, m: usize) -> Result<GaussRule<T>> {
    let sys = build_ortho_system(JacobiExponents::new(alpha, beta)?, m)?;
    gauss_rule(&sys, m)
}
