pub mod analyze;
pub mod anonymize;
pub mod bench;
pub mod gen;
pub mod ingest;

use clap::ValueEnum;
use nseg_core::edge::io::EdgeFileFormat;

/// Prints a usage error and exits with code 2.
pub fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Binary,
}

impl From<FormatArg> for EdgeFileFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Csv => EdgeFileFormat::Csv,
            FormatArg::Binary => EdgeFileFormat::Binary,
        }
    }
}

pub fn format_name(format: EdgeFileFormat) -> &'static str {
    match format {
        EdgeFileFormat::Csv => "csv",
        EdgeFileFormat::Binary => "binary",
    }
}

/// Operator-declared page-cache state; recorded, never auto-detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CacheHint {
    Cold,
    Warm,
}

impl CacheHint {
    pub fn as_str(self) -> &'static str {
        match self {
            CacheHint::Cold => "cold",
            CacheHint::Warm => "warm",
        }
    }
}
