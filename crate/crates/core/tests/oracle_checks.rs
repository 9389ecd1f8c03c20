use prandtl::oracle::verify_spectral_identity;

#[test]
fn spectral_identity_holds_for_low_degrees() {
    for &alpha in &[0.25, 0.5, 0.75] {
        for n in 0..=10 {
            let r = verify_spectral_identity(n, alpha, 1e-5).unwrap();
            assert!(r <= 1e-6, "alpha={alpha} n={n}: residual {r:e}");
        }
    }
}

#[test]
fn spectral_identity_chebyshev_constant() {
    assert!(verify_spectral_identity(0, 0.5, 1e-5).unwrap() <= 1e-7);
    assert!(verify_spectral_identity(3, 0.25, 1e-5).unwrap() <= 1e-6);
}

#[test]
fn spectral_identity_differencing_converges() {
    let coarse = verify_spectral_identity(4, 0.25, 1e-4).unwrap();
    let fine = verify_spectral_identity(4, 0.25, 1e-5).unwrap();
    assert!(fine < coarse, "{fine:e} !< {coarse:e}");
}

mod residual {
    use std::f64::consts::PI;

    use prandtl::lagrange::w_exponents;
    use prandtl::oracle::adaptive_integral;
    use prandtl::presets::example_4_2;
    use prandtl::{build_ortho_system, evaluate_zeta, solve, SmoothKernel};

    /// Plugs `f_m` back into the continuous equation at points that are not
    /// collocation nodes; the perturbation integrals come from the oracle.
    #[test]
    fn example_4_2_solution_satisfies_equation_off_nodes() {
        let spec = example_4_2();
        let s = solve(&spec, 64).unwrap();
        let w = build_ortho_system(w_exponents(spec.alpha).unwrap(), 64).unwrap();
        let SmoothKernel::Expr(k) = &spec.k else { unreachable!() };
        let h = spec.h.unwrap();
        let fr = |x: f64| evaluate_zeta(&s, x).unwrap();
        let mut worst: f64 = 0.0;
        for &y in &[-0.83, -0.41, 0.07, 0.36, 0.77] {
            let da: f64 = s
                .expansion
                .iter()
                .enumerate()
                .map(|(j, b)| b * (j as f64 + 1.0) * w.eval(j, y).unwrap())
                .sum();
            let kf = adaptive_integral(|x| k.eval(x, y).unwrap() * fr(x), -1.0, 1.0, &[], 1e-13).unwrap() / PI;
            // split at y and integrate in the offset so no node rounds onto the singularity
            let right = adaptive_integral(|t| h.eval_offset(t) * fr((y + t).min(1.0)), 0.0, 1.0 - y, &[], 1e-13);
            let left = adaptive_integral(|t| h.eval_offset(-t) * fr((y - t).max(-1.0)), 0.0, 1.0 + y, &[], 1e-13);
            let hf = (right.unwrap() + left.unwrap()) / PI;
            let r = da + kf + hf - spec.g.eval_y(y).unwrap();
            worst = worst.max(r.abs());
        }
        assert!(worst < 1e-8, "continuous residual {worst:e}");
    }
}
