//! Parsing, orchestration, output and instance generation behind the
//! `polyfactor` binary.

pub mod generate;
pub mod output;
pub mod parse;
pub mod pipeline;

pub use generate::{generate_instance, Family, GenerateError, GeneratorParams, Instance};
pub use output::{emit_output, product_expression, timing_lines, to_json, JSON_SCHEMA};
pub use parse::{parse_polynomial, InputFormat, ParseError};
pub use pipeline::{
    run_pipeline, InputSource, OutputFormat, PipelineError, PipelineRun, PipelineTrace, ProbeStatus, RunConfig,
    RunReport, DEFAULT_SEED,
};
