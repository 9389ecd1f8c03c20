//! The worked examples: problem data, order lists and reference policies.

use crate::error::{Error, Result};
use crate::funcdsl::{parse, Expr};
use crate::kernel::{SmoothKernel, WeakKernel};
use crate::solver::{wing_preset, ProblemSpec, ReferencePolicy, Sigma, WingShape};

/// Doubling orders 8, 16, …, 512.
pub const TABLE_ORDERS: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];

#[derive(Debug, Clone)]
pub struct Preset {
    pub spec: ProblemSpec,
    pub m_list: Vec<usize>,
    pub policy: ReferencePolicy,
}

pub const PRESET_NAMES: [&str; 6] = ["4.1", "4.1-linear", "4.2", "4.3", "wing-elliptic", "wing-rect"];

fn expr(src: &str) -> Expr {
    parse(src).unwrap_or_else(|e| panic!("built-in expression `{src}`: {e}"))
}

/// `σ ≡ 2`, `h = log|x-y|`, `ζ(y) = (1-y²)²`, with `g` obtained in closed form.
pub fn example_4_1() -> ProblemSpec {
    // σζ = 2(1-y²)²
    // D A^φ f = (4y(1-y²)L - 8y² + 16/3)/π,  L = log((1-y)/(1+y))
    // H f = (M0 - 2 M2 + M4)/π,  M_k = ∫ x^k log|x-y| dx
    let l1 = "log(1-y)";
    let l2 = "log(1+y)";
    let m0 = format!("((1-y)*{l1} + (1+y)*{l2} - 2)");
    let m2 = format!("(((1-y^3)*{l1} + (1+y^3)*{l2} - (2*y^2 + 2/3))/3)");
    let m4 = format!("(((1-y^5)*{l1} + (1+y^5)*{l2} - (2*y^4 + 2*y^2/3 + 2/5))/5)");
    let g = format!("2*(1-y^2)^2 + (4*y*(1-y^2)*({l1} - {l2}) - 8*y^2 + 16/3)/pi + ({m0} - 2*{m2} + {m4})/pi");
    ProblemSpec {
        sigma: Some(Sigma::Plain(Expr::num(2.0))),
        h: Some(WeakKernel::Log),
        exact: Some(expr("(1-y^2)^2")),
        ..ProblemSpec::new("example 4.1", 0.5, expr(&g))
    }
}

/// Same operator as [`example_4_1`] with `ζ(y) = y sqrt(1-y²)`, which lies
/// in the trial space for every `m ≥ 2`.
pub fn example_4_1_linear() -> ProblemSpec {
    ProblemSpec {
        sigma: Some(Sigma::Plain(Expr::num(2.0))),
        h: Some(WeakKernel::Log),
        exact: Some(expr("y*sqrt(1-y^2)")),
        ..ProblemSpec::new("example 4.1, f(x) = x", 0.5, expr("2*y*sqrt(1-y^2) + 3*y/2 + y^3/3"))
    }
}

pub fn example_4_2() -> ProblemSpec {
    ProblemSpec {
        gamma: 0.125,
        delta: 0.0,
        k: SmoothKernel::Expr(expr("abs(cos(y-pi/4))^(9/2) + abs(sin(x))^(7/2)")),
        h: Some(WeakKernel::AbsPow(-1.0 / 3.0)),
        ..ProblemSpec::new("example 4.2", 0.25, expr("abs(y)^(11/2)"))
    }
}

pub fn example_4_3() -> ProblemSpec {
    ProblemSpec {
        sigma: Some(Sigma::TimesPhi(expr("y^2+1"))),
        k: SmoothKernel::Expr(expr("cos(x+y)/(x^2+y^2+20)^2")),
        ..ProblemSpec::new("example 4.3", 0.5, expr("abs(y+3/10)^(7/2)+y*sin(y)"))
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    let table = TABLE_ORDERS.to_vec();
    let reference = ReferencePolicy::SelfRef(1024);
    Ok(match name {
        "4.1" => Preset {
            spec: example_4_1(),
            m_list: table,
            policy: ReferencePolicy::Exact,
        },
        "4.1-linear" => Preset {
            spec: example_4_1_linear(),
            m_list: vec![2, 4, 8],
            policy: ReferencePolicy::Exact,
        },
        "4.2" => Preset {
            spec: example_4_2(),
            m_list: table,
            policy: reference,
        },
        "4.3" => Preset {
            spec: example_4_3(),
            m_list: table,
            policy: reference,
        },
        "wing-elliptic" => Preset {
            spec: wing_preset(WingShape::Elliptic, 10.0, 1.0, 0.1)?,
            m_list: vec![2, 4, 8],
            policy: ReferencePolicy::Exact,
        },
        "wing-rect" => Preset {
            spec: wing_preset(WingShape::Rectangular, 10.0, 1.0, 0.1)?,
            m_list: TABLE_ORDERS[..6].to_vec(),
            policy: reference,
        },
        other => {
            return Err(Error::Config(format!(
                "unknown example `{other}` (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            p.spec.validate().unwrap();
            assert!(p.m_list.windows(2).all(|w| w[1] == 2 * w[0]));
        }
        assert!(matches!(preset("4.4"), Err(Error::Config(_))));
    }

    #[test]
    fn example_4_1_rhs_is_even() {
        let g = example_4_1().g;
        for &y in &[0.1, 0.5, 0.93] {
            let (a, b) = (g.eval_y(y).unwrap(), g.eval_y(-y).unwrap());
            assert!((a - b).abs() < 1e-14 * a.abs().max(1.0));
        }
    }
}
