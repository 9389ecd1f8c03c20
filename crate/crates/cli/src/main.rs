use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prandtl::config::ProblemConfig;
use prandtl::presets::preset;
use prandtl::solver::error_grid;
use prandtl::{
    convergence_study, error_metrics, evaluate_zeta, modified_moments, oracle, solve_with_cond, wing_preset,
    ConvergenceReport, Error, ProblemSpec, Reference, ReferencePolicy, Result, WingShape,
};

#[derive(Parser)]
#[command(
    name = "prandtl",
    version,
    about = "Collocation solver for Prandtl-type integro-differential equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and write zeta_m on the grid y = -1 + i/100
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence study over a list of orders
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
        /// `exact`, or the reference order (default: exact if the config has one, else m_ref or 1024)
        #[arg(long = "ref")]
        reference: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lifting-line study for an elliptic or rectangular wing
    Wing {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
        #[arg(long = "ref")]
        reference: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a built-in example table (4.1, 4.1-linear, 4.2, 4.3, wing-elliptic, wing-rect)
    Tables {
        #[arg(long)]
        example: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the exponent constraints of a config
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cross-check the modified moments at the collocation points against the brute-force integrator
    #[command(hide = true)]
    Moments {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

/// Scientific notation with five significant digits and a two-digit exponent.
fn sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn report_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from("m,cond_inf,err,EOC,nu\n");
    let opt = |v: Option<f64>| v.map(sci).unwrap_or_default();
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m,
            sci(r.cond),
            sci(r.err),
            opt(r.eoc),
            opt(r.nu)
        ));
    }
    out
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("stdout: {e}"))),
    }
}

fn load(path: &PathBuf) -> Result<(ProblemSpec, Option<usize>)> {
    let cfg = ProblemConfig::from_file(path)?;
    Ok((cfg.to_spec()?, cfg.m_ref))
}

fn policy(spec: &ProblemSpec, flag: Option<&str>, m_ref: Option<usize>) -> Result<ReferencePolicy> {
    match flag {
        Some("exact") => Ok(ReferencePolicy::Exact),
        Some(n) => {
            let m: usize = n
                .parse()
                .map_err(|_| Error::Config(format!("--ref expects `exact` or an order, got `{n}`")))?;
            Ok(ReferencePolicy::SelfRef(m))
        }
        None if spec.exact.is_some() => Ok(ReferencePolicy::Exact),
        None => Ok(ReferencePolicy::SelfRef(m_ref.unwrap_or(1024))),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { config, m, out } => {
            let (spec, _) = load(&config)?;
            let outcome = solve_with_cond(&spec, m)?;
            let mut text = String::from("y,zeta\n");
            for y in error_grid() {
                text.push_str(&format!("{y:.2},{:.16e}\n", evaluate_zeta(&outcome.solution, y)?));
            }
            emit(&text, out.as_ref())?;
            let mut summary = format!("m={m} cond_inf={}", sci(outcome.cond));
            if let Some(exact) = &spec.exact {
                let err = error_metrics(&outcome.solution, Reference::Exact(exact))?;
                summary.push_str(&format!(" err={}", sci(err)));
            }
            eprintln!("{summary}");
        }
        Command::Study {
            config,
            m_list,
            reference,
            out,
        } => {
            let (spec, m_ref) = load(&config)?;
            let policy = policy(&spec, reference.as_deref(), m_ref)?;
            emit(&report_csv(&convergence_study(&spec, &m_list, &policy)?), out.as_ref())?;
        }
        Command::Wing {
            shape,
            b,
            beta,
            eps,
            m_list,
            reference,
            out,
        } => {
            let spec = wing_preset(shape.parse::<WingShape>()?, b, beta, eps)?;
            let policy = policy(&spec, reference.as_deref(), None)?;
            emit(&report_csv(&convergence_study(&spec, &m_list, &policy)?), out.as_ref())?;
        }
        Command::Tables { example, out } => {
            let p = preset(&example)?;
            emit(
                &report_csv(&convergence_study(&p.spec, &p.m_list, &p.policy)?),
                out.as_ref(),
            )?;
        }
        Command::Check { config } => {
            let (spec, _) = load(&config)?;
            let report = spec.exponent_report();
            println!("{report}");
            report.into_result()?;
            if let Some(h) = &spec.h {
                h.validate()?;
            }
        }
        Command::Moments { config, m, tol } => {
            let (spec, _) = load(&config)?;
            let Some(h) = spec.h else {
                return Err(Error::Config("config has no weak kernel `h`".into()));
            };
            let u = spec.u_exponents()?;
            let rho = prandtl::PsiBasis::rho_basis(spec.alpha, u, m)?;
            let w = prandtl::PsiBasis::w_basis(spec.alpha, u, m)?;
            let table = modified_moments(rho.system(), &h, w.nodes(), m)?;
            let mut text = String::from("i,j,y,c,oracle,abs_diff\n");
            for (i, &y) in w.nodes().iter().enumerate() {
                for j in 0..m {
                    let c = table.get(i, j);
                    let reference = oracle::moment(rho.system(), &h, y, j, tol)?;
                    text.push_str(&format!(
                        "{i},{j},{y:.17e},{c:.17e},{reference:.17e},{}\n",
                        sci((c - reference).abs())
                    ));
                }
            }
            emit(&text, None)?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Validation(_)
        | Error::Syntax { .. }
        | Error::UnknownIdentifier { .. }
        | Error::InvalidExponents { .. }
        | Error::InvalidInput(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("PRANDTL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // ignore failure: the pool may already be initialised
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", e.kind());
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::sci;

    #[test]
    fn scientific_format() {
        assert_eq!(sci(7.0718e-5), "7.0718e-05");
        assert_eq!(sci(250.11), "2.5011e+02");
        assert_eq!(sci(1.0), "1.0000e+00");
        assert_eq!(sci(0.0), "0.0000e+00");
    }
}
