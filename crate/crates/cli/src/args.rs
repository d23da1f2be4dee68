use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use smooth_rigidity::vitushkin::EpsGrid;

pub const MAX_DEGREE: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "rigidity", version, about = "Remez constants, covering invariants and smooth-rigidity bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bound on the Remez constant, with the exact oracle on request.
    Remez(CommonArgs),
    /// Full bound report on the rigidity constant.
    Rigidity(RigidityArgs),
    /// The covering invariant and its ε sweep.
    Omega(CommonArgs),
    /// Sweep a generated family and write CSV.
    Family(FamilyArgs),
    /// Replay a stored witness against a point set.
    Verify(VerifyArgs),
}

/// A single degree or an inclusive range `A..B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSpec(pub RangeInclusive<usize>);

impl DegreeSpec {
    pub fn is_single(&self) -> bool {
        self.0.start() == self.0.end()
    }

    pub fn degrees(&self) -> RangeInclusive<usize> {
        self.0.clone()
    }
}

impl FromStr for DegreeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid degree {t:?}"));
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let d = parse(s)?;
                (d, d)
            }
        };
        if a > b {
            return Err(format!("empty degree range {s:?}"));
        }
        if b > MAX_DEGREE {
            return Err(format!("degree {b} exceeds the maximum {MAX_DEGREE}"));
        }
        Ok(DegreeSpec(a..=b))
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn eps_grid(s: &str) -> Result<EpsGrid, String> {
    s.parse().map_err(|e: smooth_rigidity::Error| e.to_string())
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    /// Point set as JSON `{"n": .., "points": [[..], ..]}` or headerless CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Degree `d` or inclusive range `A..B`.
    #[arg(long, default_value = "1")]
    pub degree: DegreeSpec,
    /// Finest lattice step of the ball search.
    #[arg(long, default_value_t = 0.02, value_parser = positive_real)]
    pub resolution: f64,
    /// Step halvings of each local ascent.
    #[arg(long, default_value_t = 40)]
    pub refine: usize,
    /// Run the vertex-enumeration oracle when the instance is small enough.
    #[arg(long)]
    pub oracle: bool,
    /// Extra ε values as `min:max:count`.
    #[arg(long, value_parser = eps_grid)]
    pub eps_grid: Option<EpsGrid>,
    /// Seed for generated families.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include the full ε-candidate table.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Clone, Debug, Args)]
pub struct RigidityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Write the normalized witness function (single degree only).
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
    /// Treat the set as having interior.
    #[arg(long)]
    pub interior: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Triangle,
    Grid,
    NearGrid,
    Sublevel,
}

#[derive(Clone, Debug, Args)]
pub struct FamilyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    /// Comma-separated parameters: `h` for triangle and grids, `γ` for sublevel.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub values: Vec<f64>,
    /// Dimension of grid and sublevel families.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Witness file written by `rigidity --witness-out`.
    #[arg(long)]
    pub witness: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_specs() {
        assert_eq!("3".parse::<DegreeSpec>().unwrap(), DegreeSpec(3..=3));
        assert_eq!("1..4".parse::<DegreeSpec>().unwrap(), DegreeSpec(1..=4));
        assert!("4..1".parse::<DegreeSpec>().is_err());
        assert!("9".parse::<DegreeSpec>().is_err());
        assert!("x".parse::<DegreeSpec>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
