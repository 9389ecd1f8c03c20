//! JSON problem files.
//!
//! ```json
//! {
//!   "label": "example 4.3",
//!   "alpha": 0.5, "gamma": 0, "delta": 0,
//!   "sigma_phi": "y^2+1",
//!   "k": "cos(x+y)/(x^2+y^2+20)^2",
//!   "h": {"kind": "abs_pow", "mu": -0.3333333333333333},
//!   "g": "abs(y+3/10)^(7/2)+y*sin(y)",
//!   "m_ref": 1024
//! }
//! ```
//!
//! `sigma` gives `σ(y)`, `sigma_phi` gives `(σφ)(y)`; at most one may be
//! present. `exact` optionally gives the closed-form `ζ(y)`. Weak kernel
//! kinds are `abs_pow`, `abs_pow_sgn`, `log` and `abs_pow_log`.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::funcdsl::{parse, Expr};
use crate::kernel::{SmoothKernel, WeakKernel};
use crate::solver::{ProblemSpec, Sigma};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakKernelConfig {
    pub kind: String,
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub alpha: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
    pub sigma: Option<String>,
    pub sigma_phi: Option<String>,
    pub k: Option<String>,
    pub h: Option<WeakKernelConfig>,
    pub g: String,
    pub exact: Option<String>,
    pub m_ref: Option<usize>,
}

fn field(name: &str, src: &str) -> Result<Expr> {
    parse(src).map_err(|e| Error::Config(format!("field `{name}`: {e}")))
}

impl WeakKernelConfig {
    pub fn to_kernel(&self) -> Result<WeakKernel> {
        let need_mu = || {
            self.mu
                .ok_or_else(|| Error::Config(format!("weak kernel `{}` needs `mu`", self.kind)))
        };
        let kernel = match self.kind.as_str() {
            "abs_pow" => WeakKernel::AbsPow(need_mu()?),
            "abs_pow_sgn" => WeakKernel::AbsPowSgn(need_mu()?),
            "abs_pow_log" => WeakKernel::AbsPowLog(need_mu()?),
            "log" => {
                if self.mu.is_some() {
                    return Err(Error::Config("weak kernel `log` takes no `mu`".into()));
                }
                WeakKernel::Log
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown weak kernel kind `{other}` (expected abs_pow, abs_pow_sgn, log or abs_pow_log)"
                )))
            }
        };
        kernel.validate()?;
        Ok(kernel)
    }
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_spec(&self) -> Result<ProblemSpec> {
        let sigma = match (&self.sigma, &self.sigma_phi) {
            (Some(_), Some(_)) => return Err(Error::Config("give at most one of `sigma` and `sigma_phi`".into())),
            (Some(s), None) => Some(Sigma::Plain(field("sigma", s)?)),
            (None, Some(s)) => Some(Sigma::TimesPhi(field("sigma_phi", s)?)),
            (None, None) => None,
        };
        let k = match &self.k {
            Some(src) => SmoothKernel::Expr(field("k", src)?),
            None => SmoothKernel::Zero,
        };
        if self.m_ref == Some(0) || self.m_ref == Some(1) {
            return Err(Error::Config("`m_ref` must be at least 2".into()));
        }
        Ok(ProblemSpec {
            label: self.label.clone().unwrap_or_else(|| "problem".into()),
            alpha: self.alpha,
            gamma: self.gamma,
            delta: self.delta,
            sigma,
            k,
            h: self.h.as_ref().map(WeakKernelConfig::to_kernel).transpose()?,
            g: field("g", &self.g)?,
            exact: self.exact.as_deref().map(|s| field("exact", s)).transpose()?,
        })
    }
}
