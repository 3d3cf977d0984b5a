//! End-to-end driver: hypotheses, fan, lifts, recombination, reconstruction.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bivariate::SparseBivariate;
use crate::cli_app::parse::{InputFormat, ParseError};
use crate::exact_arith::{Rat, UniPoly};
use crate::lifting::{chart_polynomial, check_h2, facet_polynomial, lift_series, ChartPoly, LiftError, LiftRecord};
use crate::polytope_fan::{
    check_h1, doubled_area, euclidean_area, lattice_points, newton_polytope, refine_fan, LatticePoint,
    LatticePolytope, PolytopeError, RefinedFan,
};
use crate::recombine::{recombination_partition, reduced_precision_probe, RecombinationOutcome, RecombineError};
use crate::reconstruct::{assemble_factorization, reconstruct_candidate, FactorCandidate, Factorization, ReconstructError};
use crate::unifactor::{factor_univariate_rational, UniFactorError};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum InputSource {
    Expr(String),
    File(PathBuf),
    #[default]
    Stdin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub input: InputSource,
    pub input_format: InputFormat,
    pub output_format: OutputFormat,
    /// Re-multiply the primitive factors against the input.
    pub verify: bool,
    pub reduced_precision: bool,
    pub seed: u64,
    /// Reject inputs of larger total degree before any work.
    pub max_degree: Option<i64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: InputSource::default(),
            input_format: InputFormat::default(),
            output_format: OutputFormat::default(),
            verify: true,
            reduced_precision: false,
            seed: DEFAULT_SEED,
            max_degree: None,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("cannot read input: {0}")]
    Io(String),
    #[error("input has total degree {degree}, above the limit {limit}")]
    TooLarge { degree: i64, limit: i64 },
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("H1 violated: the Newton polytope must contain (0,0), (1,0) and (0,1)")]
    H1Violated,
    #[error("H2 violated: facet polynomial {facet} on ray {normal} (index {ray}) is not squarefree")]
    H2Violated { ray: usize, normal: LatticePoint, facet: String },
    #[error("internal geometry error: {0}")]
    Geometry(#[from] PolytopeError),
    #[error("lifting failed: {0}")]
    Lift(#[from] LiftError),
    #[error("facet factorization failed: {0}")]
    UniFactor(#[from] UniFactorError),
    #[error("recombination failed: {0}")]
    Recombine(#[from] RecombineError),
    #[error("reconstruction failed: {0}")]
    Reconstruct(#[from] ReconstructError),
    #[error("verification failed: constant times factors differs from the input")]
    VerificationFailed,
}

impl PipelineError {
    /// 2 for unreadable input, 3 for hypothesis violations, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) | Self::Io(_) | Self::TooLarge { .. } => 2,
            Self::ZeroPolynomial | Self::H1Violated | Self::H2Violated { .. } => 3,
            _ => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeStatus {
    Disabled,
    /// Some exterior normal has a nonnegative coordinate.
    NotApplicable,
    Accepted,
    /// The kernel basis was not a partition, or reconstruction failed.
    Declined,
}

impl ProbeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Disabled => "disabled",
            Self::NotApplicable => "not_applicable",
            Self::Accepted => "accepted",
            Self::Declined => "declined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    /// Number of irreducible factors.
    pub s: usize,
    pub area: Rat,
    pub num_rays: usize,
    pub num_facet_factors: usize,
    pub num_columns: usize,
    pub probe: ProbeStatus,
    pub seed: u64,
    pub timings: Vec<(&'static str, Duration)>,
}

/// Intermediate data kept for inspection and testing.
#[derive(Debug, Clone)]
pub struct PipelineTrace {
    pub polytope: LatticePolytope,
    pub fan: RefinedFan,
    /// Support values indexed by ray.
    pub d: Vec<i64>,
    /// Chart polynomials of rays `1..=r`, in order.
    pub charts: Vec<ChartPoly>,
    pub lifts: Vec<LiftRecord>,
    pub outcome: RecombinationOutcome,
    pub candidates: Vec<FactorCandidate>,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub factorization: Factorization,
    pub report: RunReport,
    pub trace: PipelineTrace,
}

struct Timer {
    laps: Vec<(&'static str, Duration)>,
    last: Instant,
}

impl Timer {
    fn new() -> Self {
        Self {
            laps: Vec::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, name: &'static str) {
        let now = Instant::now();
        self.laps.push((name, now - self.last));
        self.last = now;
    }
}

fn lift_all(
    charts: &[ChartPoly],
    factors: &[(usize, UniPoly)],
    precision: impl Fn(usize) -> usize,
) -> Result<Vec<LiftRecord>, LiftError> {
    factors
        .iter()
        .map(|(i, p)| lift_series(&charts[i - 1], p, precision(*i)))
        .collect()
}

fn reconstruct_all(
    f: &SparseBivariate,
    outcome: &RecombinationOutcome,
    lifts: &[LiftRecord],
    fan: &RefinedFan,
    d: &[i64],
    polytope: &LatticePolytope,
) -> Result<(Vec<FactorCandidate>, Factorization), ReconstructError> {
    let candidates = outcome
        .partition
        .iter()
        .map(|block| {
            let gamma: Vec<bool> = (0..lifts.len()).map(|k| block.contains(&k)).collect();
            reconstruct_candidate(&gamma, lifts, fan, d, polytope)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let factorization = assemble_factorization(f, &candidates)?;
    Ok((candidates, factorization))
}

/// Sorts factors by total degree, then by their printed form.
fn canonical_order(fac: &mut Factorization, candidates: &mut Vec<FactorCandidate>) {
    let mut idx: Vec<usize> = (0..fac.factors.len()).collect();
    idx.sort_by_cached_key(|&k| (fac.factors[k].total_degree(), fac.factors[k].to_string()));
    let pick = |v: &Vec<SparseBivariate>| idx.iter().map(|&k| v[k].clone()).collect::<Vec<_>>();
    fac.factors = pick(&fac.factors);
    fac.normalized = pick(&fac.normalized);
    *candidates = idx.iter().map(|&k| candidates[k].clone()).collect();
}

pub fn run_pipeline(f: &SparseBivariate, config: &RunConfig) -> Result<PipelineRun, PipelineError> {
    let mut timer = Timer::new();
    if f.is_zero() {
        return Err(PipelineError::ZeroPolynomial);
    }
    if let (Some(limit), Some(degree)) = (config.max_degree, f.total_degree()) {
        if degree > limit {
            return Err(PipelineError::TooLarge { degree, limit });
        }
    }
    let polytope = newton_polytope(f)?;
    if !check_h1(&polytope) {
        return Err(PipelineError::H1Violated);
    }
    let fan = refine_fan(&polytope)?;
    let d = fan.support_values(&polytope);
    timer.lap("fan");

    let r = fan.boundary_count();
    let charts = (1..=r)
        .map(|i| chart_polynomial(f, &fan, i))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some((ray, normal, p)) = check_h2(&charts, &fan).offending.into_iter().next() {
        return Err(PipelineError::H2Violated {
            ray,
            normal,
            facet: p.to_string(),
        });
    }
    let mut facet_factors = Vec::new();
    for c in &charts {
        let p = facet_polynomial(c);
        if p.degree().unwrap_or(0) == 0 {
            continue;
        }
        for (g, _) in factor_univariate_rational(&p)?.factors {
            facet_factors.push((c.ray_index, g));
        }
    }
    timer.lap("facets");

    let mut probe = if config.reduced_precision {
        ProbeStatus::NotApplicable
    } else {
        ProbeStatus::Disabled
    };
    let mut probed = None;
    if config.reduced_precision {
        let lifts = lift_all(&charts, &facet_factors, |i| d[i] as usize + 1)?;
        match reduced_precision_probe(&polytope, &fan, &d, &lifts) {
            Err(RecombineError::PreconditionNotMet(_)) => {}
            Err(e) => return Err(e.into()),
            Ok(None) => probe = ProbeStatus::Declined,
            Ok(Some(outcome)) => match reconstruct_all(f, &outcome, &lifts, &fan, &d, &polytope) {
                Ok((candidates, fac)) => {
                    probe = ProbeStatus::Accepted;
                    probed = Some((lifts, outcome, candidates, fac));
                }
                Err(_) => probe = ProbeStatus::Declined,
            },
        }
        timer.lap("probe");
    }

    let (lifts, outcome, mut candidates, mut factorization) = match probed {
        Some(found) => found,
        None => {
            let lifts = lift_all(&charts, &facet_factors, |i| 2 * d[i] as usize)?;
            timer.lap("lift");
            let columns = lattice_points(&polytope, 2, true);
            let outcome = recombination_partition(&lifts, &fan, &columns)?;
            timer.lap("recombine");
            let (candidates, fac) = reconstruct_all(f, &outcome, &lifts, &fan, &d, &polytope)?;
            (lifts, outcome, candidates, fac)
        }
    };
    canonical_order(&mut factorization, &mut candidates);
    timer.lap("reconstruct");

    if config.verify && &factorization.expand() != f {
        return Err(PipelineError::VerificationFailed);
    }
    debug_assert!(doubled_area(&polytope) > 0);

    let report = RunReport {
        s: factorization.factors.len(),
        area: euclidean_area(&polytope),
        num_rays: fan.rays().len(),
        num_facet_factors: lifts.len(),
        num_columns: outcome.matrix.col_index.len(),
        probe,
        seed: config.seed,
        timings: timer.laps,
    };
    Ok(PipelineRun {
        factorization,
        report,
        trace: PipelineTrace {
            polytope,
            fan,
            d,
            charts,
            lifts,
            outcome,
            candidates,
        },
    })
}
