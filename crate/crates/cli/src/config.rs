use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nhwind::{BlochModel, BoundaryCondition, Gauge, DEFAULT_GRID};

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "nhwind", version, about = "Band braiding, winding numbers and finite-chain spectra of non-Hermitian two-band models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Branch-tracked energies over one detected loop period.
    Bands,
    /// Berry phase and winding number of the closed loop.
    Winding,
    /// Per-band windings over one Brillouin zone, per gauge.
    BandWindings,
    /// Loop winding next to the zone-normalized value.
    Reductio,
    /// Spectrum, IPRs and diagnostics of one finite chain.
    Chain,
    /// Open/periodic summary for a list of chain lengths.
    Scan,
    /// Site densities of every left and right eigenstate.
    Localize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Lee,
    Demo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GaugeArg {
    First,
    Second,
    Transpose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BcArg {
    Open,
    Periodic,
}

#[derive(Args, Debug)]
pub struct Options {
    #[arg(long, value_enum, default_value_t = ModelKind::Lee, global = true)]
    pub model: ModelKind,
    /// Intra-cell hopping (lee only) [default: 0.52]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v: Option<f64>,
    /// Inter-cell hopping (lee only) [default: 0.5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Gain/loss strength (lee only) [default: 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Eigenvector gauge [default: transpose for lee, first for demo]
    #[arg(long, value_enum, global = true)]
    pub gauge: Option<GaugeArg>,
    /// k-samples per 2*pi; even and at least 64
    #[arg(long, default_value_t = DEFAULT_GRID, global = true)]
    pub grid: usize,
    /// Unit cells of the chain
    #[arg(long, default_value_t = 30, global = true)]
    pub n: usize,
    /// Comma-separated chain lengths for `scan`
    #[arg(long, value_delimiter = ',', default_value = "30,100,200,400,800", global = true)]
    pub n_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = BcArg::Open, global = true)]
    pub bc: BcArg,
    /// Zone-crossing factor A in w_lee = w / A [default: 2 for lee, 0.5 for demo]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lee_normalization: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Output file, written atomically; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Validated parameters for one run.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub model_kind: ModelKind,
    pub model: BlochModel,
    /// `None` only for `band-windings` without `--gauge`: every valid gauge.
    pub gauge: Option<Gauge>,
    pub grid: usize,
    pub n_cells: usize,
    pub n_list: Vec<usize>,
    pub bc: BoundaryCondition,
    pub zone_factor: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn default_gauge(&self) -> Gauge {
        self.gauge.unwrap_or(match self.model_kind {
            ModelKind::Lee => Gauge::Transpose,
            ModelKind::Demo => Gauge::FirstComponentOne,
        })
    }
}

fn finite(name: &str, x: f64) -> Result<f64, String> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("--{name} must be finite, got {x}"))
    }
}

impl TryFrom<Cli> for RunConfig {
    type Error = String;

    fn try_from(cli: Cli) -> Result<Self, String> {
        let o = cli.options;
        let model = match o.model {
            ModelKind::Lee => BlochModel::lee(
                finite("v", o.v.unwrap_or(0.52))?,
                finite("r", o.r.unwrap_or(0.5))?,
                finite("gamma", o.gamma.unwrap_or(1.0))?,
            ),
            ModelKind::Demo => {
                if o.v.is_some() || o.r.is_some() || o.gamma.is_some() {
                    return Err("--v, --r and --gamma apply to the lee model only".into());
                }
                BlochModel::demo()
            }
        };
        if o.grid < 64 || !o.grid.is_multiple_of(2) {
            return Err(format!("--grid must be even and at least 64, got {}", o.grid));
        }
        if o.n == 0 {
            return Err("--n must be at least 1".into());
        }
        if o.n_list.is_empty() || o.n_list.contains(&0) {
            return Err("--n-list needs one or more positive chain lengths".into());
        }
        let zone_factor = finite(
            "lee-normalization",
            o.lee_normalization.unwrap_or(match o.model {
                ModelKind::Lee => 2.0,
                ModelKind::Demo => 0.5,
            }),
        )?;
        if zone_factor == 0.0 {
            return Err("--lee-normalization must be nonzero".into());
        }
        let gauge = o.gauge.map(|g| match g {
            GaugeArg::First => Gauge::FirstComponentOne,
            GaugeArg::Second => Gauge::SecondComponentOne,
            GaugeArg::Transpose => Gauge::Transpose,
        });
        let bc = match o.bc {
            BcArg::Open => BoundaryCondition::Open,
            BcArg::Periodic => BoundaryCondition::Periodic,
        };
        Ok(RunConfig {
            command: cli.command,
            model_kind: o.model,
            model,
            gauge,
            grid: o.grid,
            n_cells: o.n,
            n_list: o.n_list,
            bc,
            zone_factor,
            format: o.format,
            out: o.out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, String> {
        let cli = Cli::try_parse_from(std::iter::once("nhwind").chain(args.iter().copied()))
            .map_err(|e| e.to_string())?;
        RunConfig::try_from(cli)
    }

    #[test]
    fn defaults_follow_the_model() {
        let lee = parse(&["winding"]).unwrap();
        assert_eq!(lee.default_gauge(), Gauge::Transpose);
        assert_eq!(lee.zone_factor, 2.0);
        assert_eq!(lee.grid, DEFAULT_GRID);
        let demo = parse(&["reductio", "--model", "demo"]).unwrap();
        assert_eq!(demo.default_gauge(), Gauge::FirstComponentOne);
        assert_eq!(demo.zone_factor, 0.5);
    }

    #[test]
    fn rejects_bad_grids_and_lengths() {
        assert!(parse(&["bands", "--grid", "63"]).is_err());
        assert!(parse(&["bands", "--grid", "66"]).is_ok());
        assert!(parse(&["bands", "--grid", "32"]).is_err());
        assert!(parse(&["chain", "--n", "0"]).is_err());
        assert!(parse(&["scan", "--n-list", "10,0"]).is_err());
        assert!(parse(&["winding", "--v", "nan"]).is_err());
        assert!(parse(&["winding", "--lee-normalization", "0"]).is_err());
        assert!(parse(&["winding", "--model", "demo", "--gamma", "1"]).is_err());
    }

    #[test]
    fn n_list_is_comma_separated() {
        let c = parse(&["scan", "--n-list", "8,4,16"]).unwrap();
        assert_eq!(c.n_list, [8, 4, 16]);
    }

    #[test]
    fn flags_may_follow_or_precede_the_subcommand() {
        let a = parse(&["--model", "demo", "bands"]).unwrap();
        let b = parse(&["bands", "--model", "demo"]).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(parse(&["chain", "--v", "-0.3"]).unwrap().model, BlochModel::lee(-0.3, 0.5, 1.0));
    }
}
