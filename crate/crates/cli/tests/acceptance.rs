//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use polyfactor_core::cli_app::{
    emit_output, generate_instance, parse_polynomial, run_pipeline, Family, GeneratorParams, InputFormat, Instance,
    OutputFormat, PipelineError, PipelineRun, ProbeStatus, RunConfig,
};
use polyfactor_core::exact_arith::RatMatrix;
use polyfactor_core::lifting::lift_residual;
use polyfactor_core::polytope_fan::{exterior_facets, newton_polytope, refine_fan};
use polyfactor_core::unifactor::factor_univariate_rational;
use polyfactor_core::{LatticePoint, Rat, SparseBivariate, UniPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0xacce_97ed;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

fn parse(text: &str) -> SparseBivariate {
    parse_polynomial(text, InputFormat::Expr).expect("fixture parses")
}

fn run(f: &SparseBivariate) -> Result<PipelineRun, PipelineError> {
    run_pipeline(f, &RunConfig::default())
}

fn sorted_strings(v: &[SparseBivariate]) -> Vec<String> {
    let mut s: Vec<String> = v.iter().map(|q| q.to_string()).collect();
    s.sort();
    s
}

/// Structural checks shared by every successful run.
fn check_structure(out: &PipelineRun) -> Result<(), String> {
    let basis = &out.trace.outcome.kernel_basis;
    let n = out.trace.lifts.len();
    let mut cover = vec![0u32; n];
    for r in 0..basis.rows() {
        for (j, v) in basis.row(r).iter().enumerate() {
            ensure!(v.is_zero() || v.is_one(), "kernel entry {v} is not 0/1");
            if v.is_one() {
                cover[j] += 1;
            }
        }
    }
    ensure!(cover.iter().all(|&c| c == 1), "kernel rows do not partition the facet factors: {cover:?}");
    let ones = vec![Rat::one(); n];
    ensure!(
        out.trace.outcome.matrix.entries.left_mul(&ones).iter().all(Zero::is_zero),
        "all-ones vector is not in the kernel"
    );
    Ok(())
}

fn check_residuals(out: &PipelineRun) -> Result<(), String> {
    for lr in &out.trace.lifts {
        let i = lr.ray_index;
        let chart = &out.trace.charts[i - 1];
        ensure!(chart.ray_index == i, "chart order");
        let res = lift_residual(chart, lr);
        ensure!(res.is_zero(), "nonzero lifting residual at ray {i} for {}", lr.factor);
        ensure!(
            lr.precision() == 2 * out.trace.d[i] as usize || out.report.probe == ProbeStatus::Accepted,
            "lift at ray {i} has precision {}",
            lr.precision()
        );
    }
    Ok(())
}

/// Support vector of the actual Newton polytope of `q` over the fan rays.
fn support_vector(q: &SparseBivariate, rays: &[LatticePoint]) -> Vec<i64> {
    rays.iter()
        .map(|&eta| -q.support().iter().map(|m| m.dot(eta)).min().unwrap())
        .collect()
}

fn check_e_vectors(out: &PipelineRun, planted: &[SparseBivariate]) -> Result<(), String> {
    let rays = out.trace.fan.rays();
    for c in &out.trace.candidates {
        let prim = c.coefficients.primitive_integer_form().1;
        let q = planted
            .iter()
            .find(|q| q.primitive_integer_form().1 == prim)
            .ok_or_else(|| format!("reconstructed {prim} is not planted"))?;
        let want = support_vector(q, rays);
        ensure!(c.e == want, "e-vector {:?} differs from planted support vector {want:?} for {q}", c.e);
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f1 = run(&parse("1 + t1 + t2")).map_err(|e| e.to_string())?;
    ensure!(f1.report.s == 1, "F1 not irreducible");
    ensure!(f1.factorization.factors == vec![parse("1 + t1 + t2")], "F1 factor");

    let f2 = run(&parse("(1+t1)*(1+t2)")).map_err(|e| e.to_string())?;
    ensure!(f2.trace.outcome.matrix.entries == RatMatrix::from_i64(&[&[0], &[0]]), "F2 matrix");
    ensure!(f2.trace.outcome.kernel_basis == RatMatrix::identity(2), "F2 kernel basis");
    let mut e: Vec<Vec<i64>> = f2.trace.candidates.iter().map(|c| c.e[1..=2].to_vec()).collect();
    e.sort();
    ensure!(e == vec![vec![0, 1], vec![1, 0]], "F2 e-vectors {e:?}");
    ensure!(
        sorted_strings(&f2.factorization.factors) == ["1 + t1", "1 + t2"],
        "F2 factors {:?}",
        sorted_strings(&f2.factorization.factors)
    );

    let f4 = run(&parse("(1+t1+t2)*(1+t1*t2)")).map_err(|e| e.to_string())?;
    ensure!(f4.report.s == 2, "F4 s = {}", f4.report.s);
    ensure!(
        sorted_strings(&f4.factorization.factors) == ["1 + t1 + t2", "1 + t1*t2"],
        "F4 factors"
    );
    let elapsed = start.elapsed();
    ensure!(elapsed.as_secs_f64() < 1.0, "fixtures took {elapsed:?}");
    Ok(format!("F1, F2, F4 exact in {:.3}s", elapsed.as_secs_f64()))
}

struct Batch {
    runs: Vec<(Instance, PipelineRun)>,
    json: String,
}

fn round_trip_batch(count: u64) -> Result<Batch, String> {
    let params = GeneratorParams::default();
    let mut runs = Vec::new();
    let mut json = String::new();
    for k in 0..count {
        let inst = generate_instance(SEED ^ k, 2 + (k % 3) as usize, &params).map_err(|e| e.to_string())?;
        let out = run(&inst.f).map_err(|e| format!("instance {k} ({}): {e}", inst.f))?;
        json.push_str(&emit_output(&out.factorization, &out.report, OutputFormat::Json));
        runs.push((inst, out));
    }
    Ok(Batch { runs, json })
}

fn criterion_2(batch: &Batch, secs: f64) -> Outcome {
    for (k, (inst, out)) in batch.runs.iter().enumerate() {
        let fac = &out.factorization;
        ensure!(fac.expand() == inst.f, "instance {k}: product identity fails");
        let normalized = SparseBivariate::product(&fac.normalized).scale(&fac.normalized_constant);
        ensure!(normalized == inst.f, "instance {k}: normalized product identity fails");
        let mut got = fac.factors.clone();
        got.sort();
        ensure!(got == inst.primitive_factors(), "instance {k}: factor multiset differs");
        for q in &inst.factors {
            for (_, c) in q.terms() {
                ensure!(
                    c.numer().abs() <= 1_000_000.into() && c.denom() <= &1_000_000.into(),
                    "coefficient bound"
                );
            }
        }
    }
    ensure!(secs < 120.0, "round trips took {secs:.1}s");
    Ok(format!("{} instances in {secs:.2}s", batch.runs.len()))
}

fn criterion_3(runs: &[&PipelineRun]) -> Outcome {
    for out in runs {
        check_structure(out)?;
    }
    Ok(format!("{} runs", runs.len()))
}

fn random_h1_polytope(rng: &mut ChaCha8Rng) -> SparseBivariate {
    let mut terms = vec![(1, 0, 0), (1, 1, 0), (1, 0, 1)];
    for _ in 0..rng.gen_range(1..=5) {
        terms.push((1, rng.gen_range(0..=7), rng.gen_range(0..=7)));
    }
    SparseBivariate::from_i64(&terms)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut done = 0;
    while done < 100 {
        let f = random_h1_polytope(&mut rng);
        let n = newton_polytope(&f).map_err(|e| e.to_string())?;
        if n.dimension() < 2 {
            continue;
        }
        let v = n.vertices();
        let doubled: i64 = (1..v.len() - 1)
            .map(|k| {
                let (a, b) = (v[k] - v[0], v[k + 1] - v[0]);
                (a.m1 * b.m2 - a.m2 * b.m1).abs()
            })
            .sum();
        let fan = refine_fan(&n).map_err(|e| e.to_string())?;
        let mut total = 0;
        for i in 1..=fan.boundary_count() {
            let eta = fan.ray(i);
            let d = -v.iter().map(|m| m.dot(eta)).min().unwrap();
            let on_face: Vec<LatticePoint> = v.iter().copied().filter(|m| m.dot(eta) == -d).collect();
            let l = if on_face.len() == 2 {
                let e = on_face[1] - on_face[0];
                num_integer::gcd(e.m1.abs(), e.m2.abs())
            } else {
                0
            };
            ensure!(fan.in_normal_fan(i) == (l > 0), "ray {eta} misclassified for {f}");
            total += d * l;
        }
        let facets = exterior_facets(&n).map_err(|e| e.to_string())?;
        let normal_rays: Vec<LatticePoint> = (1..=fan.boundary_count())
            .filter(|&i| fan.in_normal_fan(i))
            .map(|i| fan.ray(i))
            .collect();
        ensure!(
            facets.iter().map(|f| f.normal).collect::<Vec<_>>() == normal_rays,
            "exterior facets differ from normal-fan rays for {f}"
        );
        ensure!(total == doubled, "sum d*l = {total} but 2*area = {doubled} for {f}");
        done += 1;
    }
    Ok(format!("{done} polytopes"))
}

fn criterion_5(runs: &[(Instance, PipelineRun)]) -> Outcome {
    let mut factors = 0;
    for (inst, out) in runs {
        check_e_vectors(out, &inst.factors)?;
        let mut sum = vec![0; out.trace.d.len()];
        for c in &out.trace.candidates {
            for (s, e) in sum.iter_mut().zip(&c.e) {
                *s += e;
            }
        }
        ensure!(sum == out.trace.d, "e-vectors do not add up to d for {}", inst.f);
        factors += out.trace.candidates.len();
    }
    Ok(format!("{factors} factors over {} instances", runs.len()))
}

fn criterion_6(runs: &[&PipelineRun]) -> Outcome {
    let mut lifts = 0;
    for out in runs {
        check_residuals(out)?;
        lifts += out.trace.lifts.len();
    }
    Ok(format!("{lifts} lifts"))
}

// exhaustive small-degree factorization over the integers

type IPoly = Vec<i128>;

fn itrim(mut p: IPoly) -> IPoly {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    p
}

fn imul(a: &[i128], b: &[i128]) -> IPoly {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    itrim(out)
}

fn iprimitive(p: &[i128]) -> IPoly {
    let g = p.iter().fold(0i128, |g, &c| num_integer::gcd(g, c));
    let sign = if *p.last().unwrap() < 0 { -1 } else { 1 };
    p.iter().map(|c| c / g * sign).collect()
}

/// Exact quotient `p / d`, or `None` if `d` does not divide `p` over Z.
fn idiv(p: &[i128], d: &[i128]) -> Option<IPoly> {
    let mut r = p.to_vec();
    let (n, m) = (p.len() - 1, d.len() - 1);
    if n < m {
        return None;
    }
    let mut q = vec![0; n - m + 1];
    for k in (0..=n - m).rev() {
        let lead = r[k + m];
        if lead % d[m] != 0 {
            return None;
        }
        q[k] = lead / d[m];
        for j in 0..=m {
            r[k + j] -= q[k] * d[j];
        }
    }
    r.iter().all(|&c| c == 0).then_some(q)
}

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    (1..=n).filter(|k| n % k == 0).collect()
}

fn oracle_factor(p: &[i128]) -> Vec<IPoly> {
    let p = iprimitive(&itrim(p.to_vec()));
    let deg = p.len() - 1;
    if deg <= 1 {
        return vec![p];
    }
    if p[0] == 0 {
        let mut rest = oracle_factor(&p[1..]);
        rest.push(vec![0, 1]);
        return rest;
    }
    for q in divisors(p[deg]) {
        for r in divisors(p[0]) {
            for r in [r, -r] {
                let lin = iprimitive(&[-r, q]);
                if let Some(rest) = idiv(&p, &lin) {
                    let mut out = oracle_factor(&rest);
                    out.push(lin);
                    return out;
                }
            }
        }
    }
    if deg == 4 {
        let norm = (p.iter().map(|c| (c * c) as f64).sum::<f64>()).sqrt().ceil() as i128;
        let bound = 2 * norm + 1;
        for p2 in divisors(p[4]) {
            let q2 = p[4] / p2;
            for p0 in divisors(p[0]).into_iter().flat_map(|v| [v, -v]) {
                let q0 = p[0] / p0;
                let det = q2 * p0 - p2 * q0;
                let mut tries: Vec<(i128, i128)> = Vec::new();
                if det != 0 {
                    let (n1, n2) = (p[3] * p0 - p2 * p[1], q2 * p[1] - q0 * p[3]);
                    if n1 % det == 0 && n2 % det == 0 {
                        tries.push((n1 / det, n2 / det));
                    }
                } else {
                    for p1 in -bound..=bound {
                        if (p[3] - p1 * q2) % p2 == 0 {
                            tries.push((p1, (p[3] - p1 * q2) / p2));
                        }
                    }
                }
                for (p1, q1) in tries {
                    let (a, b) = (vec![p0, p1, p2], vec![q0, q1, q2]);
                    if imul(&a, &b) == p {
                        let mut out = oracle_factor(&a);
                        out.extend(oracle_factor(&b));
                        return out;
                    }
                }
            }
        }
    }
    vec![p]
}

fn to_uni(p: &[i128]) -> UniPoly {
    UniPoly::new(p.iter().map(|&c| Rat::from_integer((c as i64).into())).collect())
}

fn monic_multiset(factors: impl IntoIterator<Item = (UniPoly, u32)>) -> BTreeMap<Vec<Rat>, u32> {
    let mut m = BTreeMap::new();
    for (f, k) in factors {
        *m.entry(f.monic().coeffs().to_vec()).or_insert(0) += k;
    }
    m
}

fn random_ipoly(rng: &mut ChaCha8Rng, deg: usize, c: i128) -> IPoly {
    let mut p: IPoly = (0..=deg).map(|_| rng.gen_range(-c..=c)).collect();
    while p[deg] == 0 {
        p[deg] = rng.gen_range(-c..=c);
    }
    p
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut split = 0;
    for k in 0..300 {
        let p = if k % 2 == 0 {
            let deg = rng.gen_range(1..=4);
            random_ipoly(&mut rng, deg, 12)
        } else {
            // products of small pieces exercise repeated and quadratic factors
            let mut p = vec![1];
            let mut deg = 0;
            while deg < 4 {
                let d = rng.gen_range(1..=2.min(4 - deg));
                let piece = random_ipoly(&mut rng, d, 4);
                p = imul(&p, &piece);
                deg += d;
                if rng.gen_bool(0.3) {
                    break;
                }
            }
            p
        };
        let uni = to_uni(&p);
        let got = factor_univariate_rational(&uni).map_err(|e| format!("{uni}: {e}"))?;
        ensure!(&got.content == uni.leading().unwrap(), "content of {uni}");
        let want = monic_multiset(oracle_factor(&p).iter().map(|q| (to_uni(q), 1)));
        let have = monic_multiset(got.factors.iter().cloned());
        ensure!(have == want, "factorization of {uni} differs from the oracle");
        ensure!(got.expand() == uni, "expansion of {uni}");
        if want.len() > 1 {
            split += 1;
        }
    }
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let mut p = UniPoly::one();
        let mut want = Vec::new();
        for _ in 0..n {
            let a = rng.gen_range(1..=6i64);
            let b = rng.gen_range(-9..=9i64);
            let lin = UniPoly::from_i64(&[b, a]);
            p = &p * &lin;
            want.push((lin, 1));
        }
        let got = factor_univariate_rational(&p).map_err(|e| format!("{p}: {e}"))?;
        ensure!(got.expand() == p, "reconstruction of {p}");
        ensure!(got.factors.iter().all(|(f, _)| f.degree() == Some(1)), "nonlinear factor of {p}");
        ensure!(monic_multiset(got.factors.iter().cloned()) == monic_multiset(want), "linear factors of {p}");
    }
    Ok(format!("300 oracle comparisons ({split} reducible), 200 linear products"))
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polyfactor"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn criterion_8() -> Outcome {
    match run(&parse("(1+t1)^2")) {
        Err(e @ PipelineError::H1Violated) => ensure!(e.exit_code() == 3, "exit code"),
        other => return Err(format!("(1+t1)^2 gave {:?}", other.map(|r| r.report))),
    }
    match run(&parse("t1*(1+t2)")) {
        Err(e @ PipelineError::H1Violated) => ensure!(e.exit_code() == 3, "exit code"),
        other => return Err(format!("t1*(1+t2) gave {:?}", other.map(|r| r.report))),
    }
    match run(&parse("(1+t1)*(1+t2)^2")) {
        Err(e @ PipelineError::H2Violated { .. }) => {
            let PipelineError::H2Violated { normal, .. } = &e else { unreachable!() };
            ensure!(*normal == LatticePoint::new(-1, 0), "H2 named ray {normal}");
            ensure!(e.exit_code() == 3, "exit code");
        }
        other => return Err(format!("(1+t1)*(1+t2)^2 gave {:?}", other.map(|r| r.report))),
    }
    for (expr, needle) in [("(1+t1)^2", "H1"), ("t1*(1+t2)", "H1"), ("(1+t1)*(1+t2)^2", "(-1,0)")] {
        let (code, _, err) = binary(&["--expr", expr]);
        ensure!(code == 3, "`polyfactor --expr {expr}` exited {code}");
        ensure!(err.contains(needle), "stderr for {expr} lacks {needle}: {err}");
    }
    let (code, _, _) = binary(&["--expr", "1 + (t1"]);
    ensure!(code == 2, "parse error exited {code}");
    Ok("H1 and H2 rejections exit with code 3".into())
}

fn criterion_9() -> Outcome {
    let params = GeneratorParams {
        families: vec![Family::Trinomial { max_exp: 3 }],
        negative_normals: true,
        ..GeneratorParams::default()
    };
    let probe = RunConfig {
        reduced_precision: true,
        ..RunConfig::default()
    };
    let mut accepted = 0;
    for k in 0..50u64 {
        let inst = generate_instance(SEED.wrapping_mul(31) ^ k, 2 + (k % 2) as usize, &params)
            .map_err(|e| e.to_string())?;
        let full = run(&inst.f).map_err(|e| format!("{}: {e}", inst.f))?;
        let fast = run_pipeline(&inst.f, &probe).map_err(|e| format!("{}: {e}", inst.f))?;
        ensure!(fast.report.probe != ProbeStatus::NotApplicable, "probe refused {}", inst.f);
        ensure!(fast.factorization == full.factorization, "probe output differs for {}", inst.f);
        check_structure(&fast)?;
        if fast.report.probe == ProbeStatus::Accepted {
            accepted += 1;
        }
    }
    Ok(format!("50 instances, probe accepted on {accepted}"))
}

fn criterion_10(first: &Batch) -> Outcome {
    let again = round_trip_batch(first.runs.len() as u64)?;
    ensure!(again.json == first.json, "JSON artifacts differ between runs");
    let dir = env!("CARGO_TARGET_TMPDIR");
    let a = format!("{dir}/acceptance_run1.json");
    let b = format!("{dir}/acceptance_run2.json");
    std::fs::write(&a, &first.json).map_err(|e| e.to_string())?;
    std::fs::write(&b, &again.json).map_err(|e| e.to_string())?;
    ensure!(
        std::fs::read(&a).map_err(|e| e.to_string())? == std::fs::read(&b).map_err(|e| e.to_string())?,
        "artifact files differ"
    );
    let args = ["--expr", "(1+t1+t2)*(1+t1*t2)*(2-t1+3*t2^2)", "--output", "json", "--seed", "7"];
    let (c1, o1, _) = binary(&args);
    let (c2, o2, _) = binary(&args);
    ensure!(c1 == 0 && c2 == 0 && o1 == o2, "binary JSON differs between runs");
    Ok(format!("{} bytes identical across two runs", first.json.len()))
}

fn report(results: &mut Vec<bool>, n: usize, name: &str, f: impl FnOnce() -> Outcome) {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match &outcome {
        Ok(detail) => println!("PASS  [{n:>2}] {name}: {detail}"),
        Err(why) => println!("FAIL  [{n:>2}] {name}: {why}"),
    }
    results.push(outcome.is_ok());
}

fn main() {
    let mut results = Vec::new();
    report(&mut results, 1, "fixture exactness", criterion_1);

    let start = Instant::now();
    let batch = round_trip_batch(200);
    let secs = start.elapsed().as_secs_f64();
    let fixtures: Vec<PipelineRun> = ["1 + t1 + t2", "(1+t1)*(1+t2)", "(1+t1+t2)*(1+t1*t2)"]
        .iter()
        .filter_map(|t| run(&parse(t)).ok())
        .collect();
    match &batch {
        Ok(batch) => {
            let all: Vec<&PipelineRun> = batch.runs.iter().map(|(_, r)| r).chain(&fixtures).collect();
            report(&mut results, 2, "round-trip property", || criterion_2(batch, secs));
            report(&mut results, 3, "kernel basis structure", || criterion_3(&all));
            report(&mut results, 4, "degree identity", criterion_4);
            report(&mut results, 5, "support vector convention", || criterion_5(&batch.runs));
            report(&mut results, 6, "lifting residual", || criterion_6(&all));
            report(&mut results, 7, "univariate oracle equivalence", criterion_7);
            report(&mut results, 8, "hypothesis rejection", criterion_8);
            report(&mut results, 9, "reduced-precision probe soundness", criterion_9);
            report(&mut results, 10, "determinism", || criterion_10(batch));
        }
        Err(e) => {
            for (n, name) in [(2, "round-trip property"), (3, "kernel basis structure"), (5, "support vector convention"), (6, "lifting residual"), (10, "determinism")] {
                report(&mut results, n, name, || Err(e.clone()));
            }
            report(&mut results, 4, "degree identity", criterion_4);
            report(&mut results, 7, "univariate oracle equivalence", criterion_7);
            report(&mut results, 8, "hypothesis rejection", criterion_8);
            report(&mut results, 9, "reduced-precision probe soundness", criterion_9);
        }
    }
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
