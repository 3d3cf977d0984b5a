//! Random products of irreducible factors with known structure, for
//! round-trip testing.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bivariate::SparseBivariate;
use crate::exact_arith::{Rat, UniPoly};
use crate::lifting::{chart_polynomial, check_h2};
use crate::polytope_fan::{check_h1, doubled_area, newton_polytope, refine_fan, LatticePoint};

/// Factor shapes that are irreducible over the rationals for every nonzero
/// choice of the sampled coefficients (subject to the noted side conditions).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `1 + a*t1` or `1 + a*t2`.
    AxisLinear,
    /// `1 + a*t1^i + b*t2^j`, `1 <= i, j <= max_exp`.
    Trinomial { max_exp: i64 },
    /// `1 + a*t1*t2`.
    Binomial,
    /// `1 + a*t1 + b*t2 + c*t1*t2` with `c != a*b`.
    Bilinear,
    /// `A(t1) + t2*B(t1)` with `A(0) = 1`, `gcd(A, B) = 1`, degrees at most 2;
    /// or the same with the variables swapped.
    LinearInOneVariable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorParams {
    pub families: Vec<Family>,
    /// Numerators are drawn from `[-max_coeff, max_coeff] \ {0}`.
    pub max_coeff: i64,
    /// Denominators are drawn from `1..=max_den`.
    pub max_den: i64,
    /// Bound on twice the area of the product's Newton polytope.
    pub max_doubled_area: i64,
    /// Require every exterior normal of the product to have both
    /// coordinates negative.
    pub negative_normals: bool,
    pub max_retries: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            families: vec![
                Family::AxisLinear,
                Family::Trinomial { max_exp: 3 },
                Family::Binomial,
                Family::Bilinear,
                Family::LinearInOneVariable,
            ],
            max_coeff: 9,
            max_den: 3,
            max_doubled_area: 120,
            negative_normals: false,
            max_retries: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("no valid instance after {0} attempts")]
    GenerationExhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    /// Planted factors, each normalized to constant term 1.
    pub factors: Vec<SparseBivariate>,
    pub f: SparseBivariate,
}

impl Instance {
    /// Planted factors in primitive integer form, sorted.
    pub fn primitive_factors(&self) -> Vec<SparseBivariate> {
        let mut v: Vec<_> = self.factors.iter().map(|q| q.primitive_integer_form().1).collect();
        v.sort();
        v
    }
}

fn coefficient(rng: &mut ChaCha8Rng, p: &GeneratorParams) -> Rat {
    let mut n = rng.gen_range(1..=p.max_coeff);
    if rng.gen_bool(0.5) {
        n = -n;
    }
    let d = if p.max_den > 1 && rng.gen_bool(0.3) {
        rng.gen_range(2..=p.max_den)
    } else {
        1
    };
    Rat::new(n.into(), d.into())
}

fn poly(terms: &[(Rat, i64, i64)]) -> SparseBivariate {
    SparseBivariate::from_terms(terms.iter().map(|(c, a, b)| (LatticePoint::new(*a, *b), c.clone())))
}

fn swap(q: &SparseBivariate) -> SparseBivariate {
    SparseBivariate::from_terms(q.terms().map(|(m, c)| (LatticePoint::new(m.m2, m.m1), c.clone())))
}

fn sample_factor(rng: &mut ChaCha8Rng, family: Family, p: &GeneratorParams) -> SparseBivariate {
    let one = Rat::one();
    match family {
        Family::AxisLinear => {
            let q = poly(&[(one, 0, 0), (coefficient(rng, p), 1, 0)]);
            if rng.gen_bool(0.5) {
                swap(&q)
            } else {
                q
            }
        }
        Family::Trinomial { max_exp } => {
            let i = rng.gen_range(1..=max_exp);
            let j = rng.gen_range(1..=max_exp);
            poly(&[(one, 0, 0), (coefficient(rng, p), i, 0), (coefficient(rng, p), 0, j)])
        }
        Family::Binomial => poly(&[(one, 0, 0), (coefficient(rng, p), 1, 1)]),
        Family::Bilinear => loop {
            let (a, b, c) = (coefficient(rng, p), coefficient(rng, p), coefficient(rng, p));
            if c != &a * &b {
                break poly(&[(one, 0, 0), (a, 1, 0), (b, 0, 1), (c, 1, 1)]);
            }
        },
        Family::LinearInOneVariable => loop {
            let mut a = vec![one.clone()];
            for _ in 0..rng.gen_range(0..=2) {
                a.push(if rng.gen_bool(0.7) { coefficient(rng, p) } else { Rat::zero() });
            }
            let b: Vec<Rat> = (0..rng.gen_range(1..=3))
                .map(|_| if rng.gen_bool(0.7) { coefficient(rng, p) } else { Rat::zero() })
                .collect();
            let (ua, ub) = (UniPoly::new(a.clone()), UniPoly::new(b.clone()));
            if ub.is_zero() || !ua.gcd(&ub).is_constant() {
                continue;
            }
            let mut terms = Vec::new();
            for (k, c) in a.into_iter().enumerate() {
                terms.push((c, k as i64, 0));
            }
            for (k, c) in b.into_iter().enumerate() {
                terms.push((c, k as i64, 1));
            }
            let q = poly(&terms);
            break if rng.gen_bool(0.5) { swap(&q) } else { q };
        },
    }
}

fn acceptable(f: &SparseBivariate, p: &GeneratorParams) -> bool {
    let Ok(n) = newton_polytope(f) else { return false };
    if !check_h1(&n) || doubled_area(&n) > p.max_doubled_area {
        return false;
    }
    let Ok(fan) = refine_fan(&n) else { return false };
    if p.negative_normals
        && (1..=fan.boundary_count())
            .filter(|&i| fan.in_normal_fan(i))
            .any(|i| fan.ray(i).m1 >= 0 || fan.ray(i).m2 >= 0)
    {
        return false;
    }
    let charts: Result<Vec<_>, _> = (1..=fan.boundary_count())
        .map(|i| chart_polynomial(f, &fan, i))
        .collect();
    charts.is_ok_and(|c| check_h2(&c, &fan).passed())
}

/// Draws `num_factors` distinct planted factors and their product,
/// resampling until the product satisfies both hypotheses and the size
/// bounds. Deterministic in `seed`.
pub fn generate_instance(seed: u64, num_factors: usize, params: &GeneratorParams) -> Result<Instance, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..params.max_retries {
        let mut factors: Vec<SparseBivariate> = Vec::with_capacity(num_factors);
        while factors.len() < num_factors {
            let family = *params.families.choose(&mut rng).expect("at least one family");
            factors.push(sample_factor(&mut rng, family, params));
        }
        let mut prims: Vec<_> = factors.iter().map(|q| q.primitive_integer_form().1).collect();
        prims.sort();
        prims.dedup();
        if prims.len() < num_factors {
            continue;
        }
        let f = SparseBivariate::product(&factors);
        if acceptable(&f, params) {
            return Ok(Instance { factors, f });
        }
    }
    Err(GenerateError::GenerationExhausted(params.max_retries))
}
