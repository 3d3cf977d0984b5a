use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use polyfactor_core::cli_app::{
    emit_output, parse_polynomial, run_pipeline, timing_lines, InputFormat, InputSource, OutputFormat, PipelineError,
    RunConfig, DEFAULT_SEED,
};

/// Irreducible factorization of a bivariate polynomial over the rationals.
#[derive(Debug, Parser)]
#[command(name = "polyfactor", version)]
struct Args {
    /// Polynomial given inline, e.g. "(1+t1)*(1+t2)".
    #[arg(long, conflicts_with = "input")]
    expr: Option<String>,
    /// Read the polynomial from a file instead of stdin.
    #[arg(long)]
    input: Option<PathBuf>,
    /// expr or sparse ("num den m1 m2" per line).
    #[arg(long, default_value = "expr")]
    format: InputFormat,
    /// text or json.
    #[arg(long, default_value = "text")]
    output: OutputFormat,
    /// Skip re-multiplying the factors against the input.
    #[arg(long)]
    no_verify: bool,
    /// Try the reduced-precision recombination first.
    #[arg(long)]
    reduced_precision: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Reject inputs above this total degree.
    #[arg(long)]
    max_degree: Option<i64>,
    /// Print run statistics and timings to stderr.
    #[arg(long)]
    report: bool,
}

fn read_input(source: &InputSource) -> Result<String, PipelineError> {
    match source {
        InputSource::Expr(s) => Ok(s.clone()),
        InputSource::File(path) => {
            std::fs::read_to_string(path).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))
        }
        InputSource::Stdin => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| PipelineError::Io(e.to_string()))?;
            Ok(s)
        }
    }
}

fn run(config: &RunConfig, report: bool) -> Result<String, PipelineError> {
    let text = read_input(&config.input)?;
    let f = parse_polynomial(&text, config.input_format)?;
    let out = run_pipeline(&f, config)?;
    if report {
        let r = &out.report;
        eprintln!(
            "s: {}\narea: {}\nrays: {}\nfacet factors: {}\ncolumns: {}\nprobe: {}",
            r.s,
            r.area,
            r.num_rays,
            r.num_facet_factors,
            r.num_columns,
            r.probe.as_str()
        );
        eprint!("{}", timing_lines(r));
    }
    Ok(emit_output(&out.factorization, &out.report, config.output_format))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let input = match (args.expr, args.input) {
        (Some(e), _) => InputSource::Expr(e),
        (None, Some(p)) => InputSource::File(p),
        (None, None) => InputSource::Stdin,
    };
    let config = RunConfig {
        input,
        input_format: args.format,
        output_format: args.output,
        verify: !args.no_verify,
        reduced_precision: args.reduced_precision,
        seed: args.seed,
        max_degree: args.max_degree,
    };
    match run(&config, args.report) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
