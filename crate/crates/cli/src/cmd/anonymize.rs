use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use serde::Serialize;

use nseg_core::anonymize::{apply, make_permutation, shuffle_quality, write_key};
use nseg_core::edge::io::{detect_format, read_edges, write_edges};

use super::{format_name, usage_error, FormatArg};
use crate::queries::timed;

#[derive(Args)]
pub struct AnonymizeArgs {
    /// Edge file to anonymize (CSV or binary, detected by content)
    pub edges: PathBuf,
    /// Output edge file
    #[arg(short, long)]
    pub out: PathBuf,
    /// Permutation seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Shuffle iterations (>= 1)
    #[arg(long, default_value_t = 1)]
    pub rounds: u32,
    /// Export the permutation and original dictionary for audited
    /// de-anonymization (off by default)
    #[arg(long)]
    pub key_out: Option<PathBuf>,
    /// Output format (default: same as the input)
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Serialize)]
struct AnonymizeSummary {
    input: String,
    output: String,
    output_format: &'static str,
    vertices: u64,
    seed: u64,
    rounds: u32,
    fixed_points: u64,
    mean_displacement: f64,
    key_out: Option<String>,
    load_s: f64,
    permute_s: f64,
    apply_s: f64,
    write_s: f64,
    output_bytes: u64,
}

pub fn run(args: &AnonymizeArgs) -> anyhow::Result<()> {
    if args.rounds < 1 {
        usage_error("--rounds must be >= 1");
    }
    let input_format =
        detect_format(&args.edges).with_context(|| format!("opening {}", args.edges.display()))?;
    let ((dict, table), load_s) = {
        let (result, s) = timed(|| read_edges(&args.edges));
        (
            result.with_context(|| format!("reading {}", args.edges.display()))?,
            s,
        )
    };
    let (map, permute_s) = timed(|| make_permutation(dict.len() as u32, args.seed, args.rounds));
    let ((anon_table, anon_dict), apply_s) = {
        let (result, s) = timed(|| apply(&map, &table, &dict));
        (result.context("applying the permutation")?, s)
    };
    let output_format = args.format.map(Into::into).unwrap_or(input_format);
    let (written, write_s) =
        timed(|| write_edges(&anon_table, &anon_dict, &args.out, output_format));
    let output_bytes = written.with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(key_path) = &args.key_out {
        write_key(&map, &dict, key_path)
            .with_context(|| format!("writing key file {}", key_path.display()))?;
    }

    let quality = shuffle_quality(&map);
    let summary = AnonymizeSummary {
        input: args.edges.display().to_string(),
        output: args.out.display().to_string(),
        output_format: format_name(output_format),
        vertices: dict.len() as u64,
        seed: args.seed,
        rounds: args.rounds,
        fixed_points: quality.fixed_points,
        mean_displacement: quality.mean_displacement,
        key_out: args.key_out.as_ref().map(|p| p.display().to_string()),
        load_s,
        permute_s,
        apply_s,
        write_s,
        output_bytes,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
