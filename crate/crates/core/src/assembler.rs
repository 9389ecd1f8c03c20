//! Collocation systems. Rows are collocation points `x_i` (zeros of
//! `p_m^w`), columns are the unknowns `a_k = (uρ)(t_k) f(t_k)` at the zeros
//! `t_k` of `p_m^ρ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernel::{k_block, modified_moments};
use crate::lagrange::{validate_exponents, Method, PsiBasis};
use crate::linalg::Matrix;
use crate::solver::ProblemSpec;

/// An assembled collocation system together with the bases it was built on.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub m: usize,
    pub matrix: Matrix,
    pub rhs: Vec<f64>,
    pub method: Method,
    /// Trial basis on the zeros `t_k` of `p_m^ρ`.
    pub rho: PsiBasis,
    /// Collocation basis on the zeros `x_i` of `p_m^w`.
    pub w: PsiBasis,
}

impl DiscreteSystem {
    pub fn collocation_points(&self) -> &[f64] {
        self.w.nodes()
    }
}

/// Builds the system for the method implied by `p` (method 2 iff σ is present).
pub fn assemble(p: &ProblemSpec, m: usize) -> Result<DiscreteSystem> {
    if p.sigma.is_some() {
        assemble_method2(p, m)
    } else {
        assemble_method1(p, m)
    }
}

pub fn assemble_method1(p: &ProblemSpec, m: usize) -> Result<DiscreteSystem> {
    if p.sigma.is_some() {
        return Err(Error::Config("method 1 requires sigma to be absent".into()));
    }
    validate_exponents(p.alpha, p.gamma, p.delta, Method::Method1).into_result()?;
    build(p, m, Method::Method1)
}

/// `Ā = Γ + A` with `Γ = diag((σφ)(x_i))`; requires `α = 1/2`, so both node
/// sets are the Chebyshev points of the second kind.
pub fn assemble_method2(p: &ProblemSpec, m: usize) -> Result<DiscreteSystem> {
    let Some(sigma) = &p.sigma else {
        return Err(Error::Config("method 2 requires sigma".into()));
    };
    validate_exponents(p.alpha, p.gamma, p.delta, Method::Method2).into_result()?;
    let mut sys = build(p, m, Method::Method2)?;
    for (i, &x) in sys.w.nodes().iter().enumerate() {
        sys.matrix[(i, i)] += sigma.times_phi(x)?;
    }
    if !sys.matrix.is_finite() {
        return Err(Error::InvalidInput("non-finite entry in the sigma term".into()));
    }
    Ok(sys)
}

fn build(p: &ProblemSpec, m: usize, method: Method) -> Result<DiscreteSystem> {
    if m < 1 {
        return Err(Error::InvalidInput("system order must be positive".into()));
    }
    if let Some(h) = &p.h {
        h.validate()?;
    }
    let u = p.u_exponents()?;
    let rho = PsiBasis::rho_basis(p.alpha, u, m)?;
    let w = PsiBasis::w_basis(p.alpha, u, m)?;
    let x = w.nodes();

    // Q(i, j) = (j + 1) p_j^w(x_i) + c_j(x_i) / π
    let mut q = Matrix::from_fn(m, m, |i, j| (j as f64 + 1.0) * w.table_row(i)[j]);
    if let Some(h) = &p.h {
        let c = modified_moments(rho.system(), h, x, m)?;
        for i in 0..m {
            for (qij, &cij) in q.row_mut(i).iter_mut().zip(c.row(i)) {
                *qij += cij / PI;
            }
        }
    }
    let p_rho = Matrix::from_fn(m, m, |k, j| rho.table_row(k)[j]);
    let mut inner = q.mul_transposed(&p_rho)?;
    if !p.k.is_zero() {
        let kb = k_block(rho.rule(), &p.k, x)?;
        for i in 0..m {
            for (a, &b) in inner.row_mut(i).iter_mut().zip(kb.row(i)) {
                *a += b;
            }
        }
    }

    // U_i = (uφ)(x_i), Λ_k = λ_k / (uρ)(t_k)
    let row_scale = w.divisors();
    let col_scale: Vec<f64> = rho
        .christoffel()
        .iter()
        .zip(rho.divisors())
        .map(|(&l, &d)| l / d)
        .collect();
    let mut matrix = inner;
    for (i, &ui) in row_scale.iter().enumerate() {
        for (a, &lk) in matrix.row_mut(i).iter_mut().zip(&col_scale) {
            *a *= ui * lk;
        }
    }
    let rhs = x
        .iter()
        .zip(row_scale)
        .map(|(&xi, &ui)| p.g.eval_y(xi).map(|g| ui * g))
        .collect::<Result<Vec<_>>>()?;
    if !matrix.is_finite() || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite entries assembling m = {m}")));
    }
    Ok(DiscreteSystem {
        m,
        matrix,
        rhs,
        method,
        rho,
        w,
    })
}
