use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use spacelike::weierstrass::Projection;
use spacelike::{Grid, Params, Rep};

use crate::CliError;

/// Options shared by every subcommand. Each may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON file with the same keys as the long flags; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Representation: h, w, g, xi, theta, eta
    #[arg(long)]
    pub rep: Option<Rep>,
    /// First generator (for theta/eta: the holomorphic half A of A + conj(B))
    #[arg(long, allow_hyphen_values = true)]
    pub f1: Option<String>,
    /// Second generator (for theta/eta: B)
    #[arg(long, allow_hyphen_values = true)]
    pub f2: Option<String>,
    /// Rectangle u0,u1,v0,v1
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Points per side
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    /// Admissibility tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub rep: Option<Rep>,
    pub f1: Option<String>,
    pub f2: Option<String>,
    pub domain: Option<String>,
    pub n: Option<usize>,
    pub nu: Option<usize>,
    pub nv: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub refine: Option<usize>,
    pub proj: Option<String>,
    pub from_field: Option<PathBuf>,
    pub params: Option<serde_json::Value>,
    pub other_f1: Option<String>,
    pub other_f2: Option<String>,
    pub rel_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }
}

pub const DEFAULT_DOMAIN: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];
pub const DEFAULT_N: usize = 101;
pub const DEFAULT_TOL: f64 = spacelike::DEFAULT_TOL;
pub const DEFAULT_SEED: u64 = 0;

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub rep: Rep,
    pub f1: Option<String>,
    pub f2: Option<String>,
    pub grid: Grid,
    pub tol: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub file: FileConfig,
}

fn parse_domain(s: &str) -> Result<[f64; 4], CliError> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let parts = parts.map_err(|_| CliError::Input(format!("invalid --domain {s:?}")))?;
    parts.try_into().map_err(|_| CliError::Input(format!("--domain needs four numbers, got {s:?}")))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = FileConfig::load(args.config.as_deref())?;
        let domain = match args.domain.as_ref().or(file.domain.as_ref()) {
            Some(s) => parse_domain(s)?,
            None => DEFAULT_DOMAIN,
        };
        let n = args.n.or(file.n);
        let nu = args.nu.or(file.nu).or(n).unwrap_or(DEFAULT_N);
        let nv = args.nv.or(file.nv).or(n).unwrap_or(DEFAULT_N);
        let grid = Grid::new(domain[0], domain[1], domain[2], domain[3], nu, nv)
            .map_err(|e| CliError::Input(format!("grid: {e}")))?;
        let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Input(format!("--tol must be positive, got {tol}")));
        }
        Ok(Self {
            rep: args.rep.or(file.rep).unwrap_or(Rep::G),
            f1: args.f1.clone().or_else(|| file.f1.clone()),
            f2: args.f2.clone().or_else(|| file.f2.clone()),
            grid,
            tol,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: args.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("spacelike-out")),
            file,
        })
    }

    pub fn exprs(&self) -> Result<(&str, &str), CliError> {
        match (self.f1.as_deref(), self.f2.as_deref()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(CliError::Input("both --f1 and --f2 are required".into())),
        }
    }

    pub fn projection(&self, flag: Option<&str>) -> Result<Projection, CliError> {
        match flag.or(self.file.proj.as_deref()) {
            Some(s) => s.parse().map_err(|e| CliError::Input(format!("{e}"))),
            None => Ok(Projection::default()),
        }
    }

    /// Params from a JSON string, a path to a JSON file, or the config file.
    pub fn params(&self, flag: Option<&str>) -> Result<Option<Params>, CliError> {
        let value = match flag {
            Some(s) => {
                let text = if Path::new(s).is_file() {
                    std::fs::read_to_string(s).map_err(|e| CliError::Input(format!("cannot read {s}: {e}")))?
                } else {
                    s.to_string()
                };
                serde_json::from_str::<serde_json::Value>(&text).map_err(|e| CliError::Input(format!("--params: {e}")))?
            }
            None => match &self.file.params {
                Some(v) => v.clone(),
                None => return Ok(None),
            },
        };
        serde_json::from_value(value).map(Some).map_err(|e| CliError::Input(format!("--params: {e}")))
    }
}
