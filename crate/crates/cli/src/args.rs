//! Command grammar. Numeric flags take anything `f64::from_str` accepts,
//! so `2`, `0.5` and `1e-9` all work.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "singmin",
    version,
    about = "Singular minimal surfaces: profiles, graph solves, meshes and estimate checks",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Print solver details such as Newton histories
    #[arg(long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generating curves as CSV tables
    #[command(subcommand)]
    Profile(ProfileCmd),
    /// Dirichlet problem for graphs
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Triangle meshes as OBJ, with weighted mean curvature per vertex
    #[command(subcommand)]
    Mesh(MeshCmd),
    /// Check an estimate; exit 4 if it fails
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Nonexistence thresholds
    #[command(subcommand)]
    Threshold(ThresholdCmd),
    /// Run one command per line of a scenario file
    Batch(BatchArgs),
}

#[derive(Debug, Subcommand)]
pub enum ProfileCmd {
    /// Even α-catenary z = f(x) with f(0) = z0, f'(0) = 0
    Catenary(GraphProfileArgs),
    /// Meridian of a rotational surface meeting the axis at height z0
    Meridian(GraphProfileArgs),
    /// Winglike curve with lowest point (λ, c), traced toward its waist
    Winglike(WinglikeArgs),
}

#[derive(Debug, Subcommand)]
pub enum SolveCmd {
    /// Graph over a disk or square with constant boundary height c
    Graph(GraphArgs),
}

#[derive(Debug, Subcommand)]
pub enum MeshCmd {
    /// Revolve the meridian over [0, r] about the z-axis
    Revolve(RevolveArgs),
    /// Extrude the α-catenary over [-xmax, xmax] × [0, ylen]
    Extrude(ExtrudeArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Area ≤ boundary length × highest boundary point (α ≥ 1)
    AreaUpper(GraphCheckArgs),
    /// Area ≥ -(2π/α)(h² - c²) for a graph in the plane z = c (α < 0)
    AreaLower(GraphCheckArgs),
    /// A ≤ cL + (1-α)|Ω| and |Ω| ≤ (c/α)L for a graph (0 < α < 1)
    GraphArea(GraphCheckArgs),
    /// Strict comparison-sphere height bound along the meridian (α > 0)
    Height(HeightArgs),
    /// Conormal flux identity on the revolved meridian
    Flux(FluxArgs),
    /// Interior heights stay on the side of the boundary plane fixed by α
    Extrema(GraphCheckArgs),
}

#[derive(Debug, Subcommand)]
pub enum ThresholdCmd {
    /// Least height for two coaxial unit circles at distance m
    H0(H0Args),
    /// Largest winglike exit height at radius R over λ
    D0(D0Args),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Exponent α of the height weight z^α (nonzero)
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,

    /// Relative integration / Newton tolerance
    #[arg(long, default_value = "1e-10")]
    pub tol: f64,

    /// Output CSV path; the table goes to standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphProfileArgs {
    #[command(flatten)]
    pub common: Common,

    /// Height at the axis, length units
    #[arg(long, default_value_t = 1.0)]
    pub z0: f64,

    /// Largest abscissa, length units
    #[arg(long, default_value_t = 1.0)]
    pub xmax: f64,

    /// Spacing of the output table, length units (adjusted to divide xmax)
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct WinglikeArgs {
    #[command(flatten)]
    pub common: Common,

    /// Radius of the lowest point, length units
    #[arg(long)]
    pub lambda: f64,

    /// Height of the lowest point, length units
    #[arg(long)]
    pub c: f64,

    /// Most negative arclength to integrate to [default: -100(λ + c)]
    #[arg(long, allow_negative_numbers = true)]
    pub smin: Option<f64>,

    /// Stop past the waist at this radius and report the exit height,
    /// length units
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Disk,
    Square,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// Domain: disk of radius R or square [-R, R]², both centered at the origin
    #[arg(long, value_enum, default_value_t = ShapeArg::Disk)]
    pub shape: ShapeArg,

    /// Disk radius or square half-side, length units
    #[arg(long = "R", value_name = "R", default_value_t = 1.0)]
    pub big_r: f64,

    /// Constant boundary height, length units
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,

    /// Grid nodes per axis as NX or NX,NY (at least 17)
    #[arg(long, default_value = "65", value_parser = parse_grid_arg)]
    pub grid: (usize, Option<usize>),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub domain: DomainArgs,

    /// Write the graph as an OBJ mesh here
    #[arg(long)]
    pub obj: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphCheckArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub domain: DomainArgs,

    /// Check this OBJ mesh instead of solving for a graph; its boundary
    /// must lie in z = c (c defaults to the mesh's boundary height)
    #[arg(long)]
    pub mesh: Option<PathBuf>,

    /// Allowance added in favor of the bound, area or length units
    #[arg(long, default_value_t = 0.0)]
    pub slack: f64,

    /// Write the checked mesh as OBJ here
    #[arg(long)]
    pub obj: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RevolveArgs {
    #[command(flatten)]
    pub common: Common,

    /// Height at the axis, length units
    #[arg(long, default_value_t = 1.0)]
    pub z0: f64,

    /// Outer radius, length units
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,

    /// Divisions as AZIMUTH or AZIMUTH,MERIDIAN (at least 8 each)
    #[arg(long, default_value = "128,32", value_parser = parse_grid_arg)]
    pub grid: (usize, Option<usize>),

    /// OBJ output path
    #[arg(long)]
    pub obj: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtrudeArgs {
    #[command(flatten)]
    pub common: Common,

    /// Height at x = 0, length units
    #[arg(long, default_value_t = 1.0)]
    pub z0: f64,

    /// Half-width in x, length units
    #[arg(long, default_value_t = 1.0)]
    pub xmax: f64,

    /// Length in y, length units
    #[arg(long, default_value_t = 1.0)]
    pub ylen: f64,

    /// Divisions as NX or NX,NY (at least 8 each)
    #[arg(long, default_value = "64,16", value_parser = parse_grid_arg)]
    pub grid: (usize, Option<usize>),

    /// OBJ output path
    #[arg(long)]
    pub obj: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HeightArgs {
    #[command(flatten)]
    pub common: Common,

    /// Height at the axis, length units
    #[arg(long, default_value_t = 1.0)]
    pub z0: f64,

    /// Radius of the boundary circle, length units
    #[arg(long)]
    pub r: f64,
}

#[derive(Debug, Args)]
pub struct FluxArgs {
    #[command(flatten)]
    pub common: Common,

    /// Height at the axis, length units
    #[arg(long, default_value_t = 1.0)]
    pub z0: f64,

    /// Radius of the boundary circle, length units
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,

    /// Divisions as AZIMUTH or AZIMUTH,MERIDIAN (at least 8 each)
    #[arg(long, default_value = "512,128", value_parser = parse_grid_arg)]
    pub grid: (usize, Option<usize>),

    /// Check this OBJ mesh instead of the revolved meridian
    #[arg(long)]
    pub mesh: Option<PathBuf>,

    /// Largest accepted |residual| / interior term (dimensionless)
    #[arg(long, default_value = "1e-2")]
    pub flux_tol: f64,
}

#[derive(Debug, Args)]
pub struct H0Args {
    /// Exponent α (> 0)
    #[arg(long)]
    pub alpha: f64,

    /// Distance between the circles, length units
    #[arg(long)]
    pub m: f64,

    /// Relative search tolerance
    #[arg(long, default_value = "1e-10")]
    pub tol: f64,

    /// Write the search history CSV here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct D0Args {
    /// Exponent α (> 0)
    #[arg(long)]
    pub alpha: f64,

    /// Exit radius, length units
    #[arg(long = "R", value_name = "R")]
    pub big_r: f64,

    /// Height of the lowest points, length units
    #[arg(long)]
    pub c: f64,

    /// Number of λ samples, log-spaced over [R/100, 10R]
    #[arg(long, default_value_t = 64)]
    pub grid: usize,

    /// Relative integration tolerance
    #[arg(long, default_value = "1e-10")]
    pub tol: f64,

    /// Worker threads for the λ sweep [default: all cores]
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Write the (λ, exit height) sweep CSV here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Scenario file: one command per line, `#` starts a comment line
    pub file: PathBuf,

    /// Lines run concurrently; output order is kept
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,

    /// Summary CSV, appended to (header written when the file is new)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `NX` or `NX,NY` with positive integers.
pub fn parse_grid(s: &str) -> Result<(usize, Option<usize>), String> {
    let one = |t: &str| -> Result<usize, String> {
        let t = t.trim();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("grid size {t:?} is not a positive integer"));
        }
        match t.parse::<usize>() {
            Ok(0) => Err("grid size must be positive".into()),
            Ok(n) => Ok(n),
            Err(e) => Err(format!("grid size {t:?}: {e}")),
        }
    };
    match s.split_once(',') {
        None => Ok((one(s)?, None)),
        Some((a, b)) => Ok((one(a)?, Some(one(b)?))),
    }
}

fn parse_grid_arg(s: &str) -> Result<(usize, Option<usize>), String> {
    parse_grid(s)
}

/// Splits one scenario line into arguments. Blank and comment lines give
/// `None`; unbalanced quotes are an error.
pub fn split_scenario_line(line: &str) -> Result<Option<Vec<String>>, String> {
    let t = line.trim();
    if t.is_empty() || t.starts_with('#') {
        return Ok(None);
    }
    shlex::split(t)
        .map(Some)
        .ok_or_else(|| "unbalanced quotes or trailing escape".to_string())
}

/// Parses arguments (without the program name) into a command.
pub fn parse_args<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(std::iter::once(std::ffi::OsString::from("singmin")).chain(args.into_iter().map(Into::into)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("65"), Ok((65, None)));
        assert_eq!(parse_grid("128,32"), Ok((128, Some(32))));
        assert_eq!(parse_grid(" 9 , 10 "), Ok((9, Some(10))));
        for bad in [
            "",
            "0",
            "-3",
            "1.5",
            "4,",
            ",4",
            "1,2,3",
            "+5",
            "99999999999999999999999",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn scenario_lines() {
        assert_eq!(split_scenario_line("   "), Ok(None));
        assert_eq!(split_scenario_line("# sweep"), Ok(None));
        assert_eq!(
            split_scenario_line("threshold h0 --m 2 --alpha 1 --out 'a b.csv'"),
            Ok(Some(
                ["threshold", "h0", "--m", "2", "--alpha", "1", "--out", "a b.csv"]
                    .map(String::from)
                    .to_vec()
            ))
        );
        assert!(split_scenario_line("profile \"unterminated").is_err());
    }

    #[test]
    fn grammar_accepts_scientific_and_negative_values() {
        let cli = parse_args(["solve", "graph", "--alpha", "-2e0", "--tol", "1e-9", "--grid", "33,17"]).unwrap();
        match cli.command {
            Command::Solve(SolveCmd::Graph(g)) => {
                assert_eq!(g.common.alpha, -2.0);
                assert_eq!(g.domain.grid, (33, Some(17)));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_args(["profile", "catenary", "--alpha", "1", "--bogus"]).is_err());
    }

    #[test]
    fn grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
