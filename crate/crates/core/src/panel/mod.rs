//! Trade/covariate ingestion and the joined panel table.
//!
//! Raw inputs are two CSV snapshots: directed trade flows
//! (`origin_iso3,dest_iso3,commodity,year,value_usd`) and bilateral economic
//! covariates (`origin_iso3,dest_iso3,year,<feature...>`). [`inner_join`]
//! merges them on `(origin, dest, year)` into a [`PanelTable`] keyed by
//! `(origin, dest, commodity, year)`.

mod ops;
mod parse;
mod table;

pub use ops::inner_join;
pub use parse::{parse_econ_csv, parse_trade_csv};
pub use table::{ColumnData, FeatureColumn, PanelTable};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

/// The seven tracked commodities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Commodity {
    Wheat,
    Milk,
    Rice,
    Corn,
    Beef,
    Soy,
    Sugar,
}

impl Commodity {
    pub const ALL: [Commodity; 7] = [
        Commodity::Wheat,
        Commodity::Milk,
        Commodity::Rice,
        Commodity::Corn,
        Commodity::Beef,
        Commodity::Soy,
        Commodity::Sugar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Commodity::Wheat => "Wheat",
            Commodity::Milk => "Milk",
            Commodity::Rice => "Rice",
            Commodity::Corn => "Corn",
            Commodity::Beef => "Beef",
            Commodity::Soy => "Soy",
            Commodity::Sugar => "Sugar",
        }
    }
}

impl fmt::Display for Commodity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Commodity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Commodity::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown commodity `{s}` (expected one of Wheat, Milk, Rice, Corn, Beef, Soy, Sugar)"))
    }
}

/// One directed trade flow in nominal USD.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeRecord {
    pub origin: String,
    pub dest: String,
    pub commodity: Commodity,
    pub year: i32,
    pub value: f64,
}

/// One feature cell of an [`EconRecord`]. The kind is decided per column:
/// a column whose non-missing cells all parse as finite numbers is numeric,
/// anything else is categorical.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Number(f64),
    Label(String),
    Missing,
}

/// Economic covariates for one (origin, dest, year) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EconRecord {
    pub origin: String,
    pub dest: String,
    pub year: i32,
    /// Feature name/value pairs in file column order. All records parsed from
    /// one snapshot share the same names in the same order.
    pub features: Vec<(String, FeatureValue)>,
}

pub const YEAR_MIN: i32 = 1900;
pub const YEAR_MAX: i32 = 2100;

pub(crate) fn valid_iso3(code: &str) -> bool {
    code.len() == 3 && code.bytes().all(|b| b.is_ascii_uppercase())
}

#[derive(Debug, Error)]
pub enum PanelError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("line {line}: {reason}")]
    RowError { line: usize, reason: String },
    #[error("duplicate key ({origin},{dest},{year})")]
    DuplicateKey {
        origin: String,
        dest: String,
        year: i32,
    },
    #[error("duplicate panel key ({origin},{dest},{commodity},{year})")]
    DuplicatePanelKey {
        origin: String,
        dest: String,
        commodity: Commodity,
        year: i32,
    },
    #[error("econ records disagree on feature names or order")]
    FeatureMismatch,
    #[error("panel spans {distinct} distinct years, cannot hold out {holdout}")]
    InsufficientYears { distinct: usize, holdout: usize },
}

impl PanelError {
    /// Stable machine-readable code, one per variant.
    pub fn code(&self) -> &'static str {
        match self {
            PanelError::MissingFile(_) => "MissingFile",
            PanelError::Io { .. } => "Io",
            PanelError::HeaderMismatch { .. } => "HeaderMismatch",
            PanelError::RowError { .. } => "RowError",
            PanelError::DuplicateKey { .. } => "DuplicateKey",
            PanelError::DuplicatePanelKey { .. } => "DuplicatePanelKey",
            PanelError::FeatureMismatch => "FeatureMismatch",
            PanelError::InsufficientYears { .. } => "InsufficientYears",
        }
    }
}
