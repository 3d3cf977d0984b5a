use num_traits::{One, Zero};
use polyfactor_core::cli_app::{
    generate_instance, parse_polynomial, product_expression, run_pipeline, GeneratorParams, InputFormat,
    PipelineError, RunConfig,
};
use polyfactor_core::exact_arith::Rat;
use polyfactor_core::lifting::{chart_polynomial, facet_polynomial, ChartPoly};
use polyfactor_core::polytope_fan::{check_h1, lattice_points, newton_polytope};
use polyfactor_core::{PipelineRun, SparseBivariate, UniPoly};
use proptest::prelude::*;

fn planted(seed: u64, k: usize) -> (polyfactor_core::cli_app::Instance, PipelineRun) {
    let inst = generate_instance(seed, k, &GeneratorParams::default()).unwrap();
    let out = run_pipeline(&inst.f, &RunConfig::default()).unwrap();
    (inst, out)
}

// plain rational series, coefficient k at index k

fn smul(a: &[Rat], b: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn sinv(a: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::one() / &a[0]];
    for k in 1..n {
        let acc: Rat = (1..=k).filter(|&j| j < a.len()).map(|j| &a[j] * &out[k - j]).sum();
        out.push(-acc / &a[0]);
    }
    out
}

fn seval(c: &ChartPoly, phi: &[Rat], n: usize, dy: bool) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    for (&(a, b), coef) in c.terms() {
        let (b, coef) = if dy {
            if b == 0 {
                continue;
            }
            (b - 1, coef * Rat::from_integer((b as i64).into()))
        } else {
            (b, coef.clone())
        };
        let mut pow = vec![Rat::one()];
        for _ in 0..b {
            pow = smul(&pow, phi, n);
        }
        for (k, v) in pow.iter().enumerate() {
            if a + k < n {
                out[a + k] += &coef * v;
            }
        }
    }
    out
}

/// Scalar Newton iteration for the branch through the rational root `rho`.
fn scalar_lift(c: &ChartPoly, rho: Rat, n: usize) -> Vec<Rat> {
    let mut phi = vec![rho];
    phi.resize(n, Rat::zero());
    for _ in 0..=n {
        let step = smul(&seval(c, &phi, n, false), &sinv(&seval(c, &phi, n, true), n), n);
        for (p, s) in phi.iter_mut().zip(step) {
            *p -= s;
        }
    }
    phi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn facet_data_is_consistent(seed in any::<u64>(), k in 2usize..=4) {
        let (_, out) = planted(seed, k);
        let t = &out.trace;
        for c in &t.charts {
            let i = c.ray_index;
            let p = facet_polynomial(c);
            let sum: usize = t.lifts.iter().filter(|l| l.ray_index == i).map(|l| l.degree()).sum();
            if t.fan.in_normal_fan(i) {
                let facet = t.polytope.facets().unwrap().into_iter().find(|f| f.normal == t.fan.ray(i)).unwrap();
                prop_assert_eq!(p.degree(), Some(facet.lattice_length as usize));
                prop_assert_eq!(sum as i64, facet.lattice_length);
            } else {
                prop_assert_eq!(p.degree(), Some(0));
                prop_assert_eq!(sum, 0);
            }
        }
    }

    #[test]
    fn rational_branches_match_scalar_newton(seed in any::<u64>()) {
        let (_, out) = planted(seed, 2);
        for lr in out.trace.lifts.iter().filter(|l| l.degree() == 1) {
            let rho = -lr.factor.coeff(0);
            let c = &out.trace.charts[lr.ray_index - 1];
            let want = scalar_lift(c, rho, lr.precision());
            let got: Vec<Rat> = lr.series.residues().iter().map(|r| r.coeff(0)).collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn matrix_shape_and_kernel_dimension(seed in any::<u64>(), k in 2usize..=4) {
        let (inst, out) = planted(seed, k);
        let t = &out.trace;
        let a = &t.outcome.matrix.entries;
        prop_assert_eq!(a.rows(), t.lifts.len());
        prop_assert_eq!(a.cols(), lattice_points(&t.polytope, 2, true).len());
        let l_total: i64 = t.polytope.facets().unwrap().iter()
            .filter(|f| f.normal.m1 < 0 || f.normal.m2 < 0)
            .map(|f| f.lattice_length)
            .sum();
        prop_assert!(a.rows() as i64 <= l_total);
        prop_assert_eq!(t.outcome.kernel_basis.rows(), inst.factors.len());
    }

    #[test]
    fn factors_match_their_blocks(seed in any::<u64>(), k in 2usize..=3) {
        let (_, out) = planted(seed, k);
        let t = &out.trace;
        for c in &t.candidates {
            let q = &c.coefficients;
            prop_assert_eq!(&newton_polytope(q).unwrap(), &c.support_polytope);
            for i in 1..=t.fan.boundary_count() {
                let chart = chart_polynomial(q, &t.fan, i).unwrap();
                let want = t.lifts.iter().zip(&c.gamma)
                    .filter(|(l, &g)| g && l.ray_index == i)
                    .fold(UniPoly::one(), |acc, (l, _)| &acc * &l.factor);
                prop_assert_eq!(facet_polynomial(&chart).monic(), want);
            }
            if check_h1(&c.support_polytope) {
                let again = run_pipeline(q, &RunConfig::default()).unwrap();
                prop_assert_eq!(again.report.s, 1);
            }
        }
    }

    #[test]
    fn printed_factorization_is_a_fixed_point(seed in any::<u64>()) {
        let (inst, out) = planted(seed, 2);
        let printed = product_expression(&out.factorization);
        let reparsed = parse_polynomial(&printed, InputFormat::Expr).unwrap();
        prop_assert_eq!(&reparsed, &inst.f);
        let again = run_pipeline(&reparsed, &RunConfig::default()).unwrap();
        prop_assert_eq!(product_expression(&again.factorization), printed);
        let text = inst.f.to_string();
        prop_assert_eq!(parse_polynomial(&text, InputFormat::Expr).unwrap(), inst.f);
    }

    #[test]
    fn scaling_rides_on_the_constant(seed in any::<u64>(), n in 1i64..=20, d in 1i64..=20) {
        let (inst, out) = planted(seed, 2);
        let c = Rat::new(n.into(), d.into());
        let scaled = run_pipeline(&inst.f.scale(&c), &RunConfig::default()).unwrap();
        prop_assert_eq!(&scaled.factorization.factors, &out.factorization.factors);
        prop_assert_eq!(scaled.factorization.constant, out.factorization.constant * c);
    }
}

#[test]
fn shifted_inputs_fail_h1() {
    let f = SparseBivariate::from_i64(&[(1, 1, 0), (1, 1, 1)]);
    assert!(matches!(run_pipeline(&f, &RunConfig::default()), Err(PipelineError::H1Violated)));
}
