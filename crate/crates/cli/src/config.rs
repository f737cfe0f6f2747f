//! Run configuration: flat `key = value` file, flag overrides, defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use tradecast::panel::Commodity;

use crate::error::CliError;

#[derive(Debug)]
pub struct Ctx {
    file: BTreeMap<String, String>,
    pub out_dir: PathBuf,
    pub seed: u64,
    commodity: Option<Commodity>,
}

impl Ctx {
    pub fn new(
        config: Option<&Path>,
        out: Option<PathBuf>,
        seed: Option<u64>,
        commodity: Option<String>,
    ) -> Result<Ctx, CliError> {
        let file = match config {
            Some(path) => parse_config(path)?,
            None => BTreeMap::new(),
        };
        let mut ctx = Ctx {
            file,
            out_dir: PathBuf::new(),
            seed: 0,
            commodity: None,
        };
        ctx.out_dir = match out {
            Some(dir) => dir,
            None => ctx
                .file_value::<PathBuf>("out")?
                .unwrap_or_else(|| PathBuf::from(".")),
        };
        ctx.seed = match seed {
            Some(s) => s,
            None => ctx.file_value("seed")?.unwrap_or(0),
        };
        let commodity_name = commodity.or_else(|| ctx.file.get("commodity").cloned());
        ctx.commodity = match commodity_name {
            Some(name) => Some(name.parse().map_err(CliError::Usage)?),
            None => None,
        };
        std::fs::create_dir_all(&ctx.out_dir).map_err(CliError::io(&ctx.out_dir))?;
        Ok(ctx)
    }

    fn file_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::Config(format!("config key `{key}` has unusable value `{raw}`"))
            }),
        }
    }

    /// flag > config file > default.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.resolve_opt(flag, key)?.unwrap_or(default))
    }

    pub fn resolve_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file_value(key),
        }
    }

    pub fn commodity(&self) -> Option<Commodity> {
        self.commodity
    }

    pub fn require_commodity(&self) -> Result<Commodity, CliError> {
        self.commodity
            .ok_or_else(|| CliError::Usage("--commodity is required for this command".to_string()))
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn parse_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "{}:{}: expected `key = value`, found `{raw}`",
                path.display(),
                i + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}
