//! Command-line interface definition.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "dsgain",
    about = "Delay-spread performance evaluation of rectangular building layouts",
    version,
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Parameter-table override file (JSON, same schema as the built-in table)
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,

    /// Relative quadrature tolerance
    #[arg(long, global = true, value_name = "REL", default_value_t = 1e-8)]
    pub tolerance: f64,

    /// Worker thread cap (results do not depend on it)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Write the primary output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Output format where the command supports both
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the analytic DS gain and reliability of a floorplan
    Evaluate {
        /// Floorplan JSON document
        floorplan: PathBuf,
        /// Reliability integrand: mix component variances or standard deviations
        #[arg(long, value_enum, default_value_t = ReliabilityArg::Variance)]
        reliability_mode: ReliabilityArg,
    },
    /// Run the Monte-Carlo link simulator
    Simulate {
        floorplan: PathBuf,
        /// Number of Tx-Rx links to draw
        #[arg(long, default_value_t = 10_000)]
        links: u64,
        /// RNG seed; one stream per link index
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write every link sample as CSV to this path
        #[arg(long, value_name = "PATH")]
        emit_samples: Option<PathBuf>,
    },
    /// Analytic vs simulated gain across seeds, as a CSV table
    Compare {
        floorplan: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        links: u64,
        /// Comma-separated seed list
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19")]
        seeds: Vec<u64>,
    },
    /// Evaluate a family of generated layouts, one CSV row per value
    Sweep(SweepArgs),
    /// Emit a floorplan JSON document
    Generate {
        #[command(subcommand)]
        what: GenerateCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReliabilityArg {
    Variance,
    Std,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Which layout family to sweep
    #[arg(long, value_enum)]
    pub kind: SweepKind,
    /// Strictly increasing parameter values, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Grid rows of the base layout (aspect_ratio, room_area, room_count)
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    /// Grid columns of the base layout (aspect_ratio, room_area, room_count)
    #[arg(long, default_value_t = 6)]
    pub cols: usize,
    /// Room area in m^2 held fixed by the aspect_ratio sweep
    #[arg(long, default_value_t = 25.0)]
    pub room_area: f64,
    /// Room aspect ratio held fixed by the room_area sweep
    #[arg(long, default_value_t = 1.0)]
    pub aspect: f64,
    /// Floor width held fixed by grid_n_by_n / grid_n_by_2n sweeps
    #[arg(long, default_value_t = 30.0)]
    pub floor_w: f64,
    /// Floor height held fixed by grid_n_by_n / grid_n_by_2n sweeps
    #[arg(long, default_value_t = 30.0)]
    pub floor_h: f64,
    /// Room width used by the room_count sweep
    #[arg(long, default_value_t = 10.0)]
    pub room_w: f64,
    /// Room height used by the room_count sweep
    #[arg(long, default_value_t = 10.0)]
    pub room_h: f64,
    /// Transmitter height, metres
    #[arg(long, default_value_t = 4.0)]
    pub tx_height: f64,
    /// Receiver height, metres
    #[arg(long, default_value_t = 3.0)]
    pub rx_height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Room aspect ratio at fixed room area; the room long edge runs along
    /// the row axis, so the building stretches as the ratio grows
    AspectRatio,
    /// Room area at fixed aspect ratio
    RoomArea,
    /// N-by-N partitions of a fixed floor
    GridNByN,
    /// N-by-2N partitions of a fixed floor
    #[value(name = "grid-n-by-2n")]
    GridNBy2n,
    /// N-by-N grids of fixed-size rooms (the building grows with N)
    RoomCount,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Uniform grid of identical rooms
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        room_w: f64,
        #[arg(long)]
        room_h: f64,
        /// Room type name, e.g. office or corridor
        #[arg(long, default_value = "office")]
        room_type: String,
        #[arg(long, default_value_t = 4.0)]
        tx_height: f64,
        #[arg(long, default_value_t = 3.0)]
        rx_height: f64,
    },
    /// The 50 m x 100 m office/corridor reference scenario
    WinnerA1 {
        #[arg(long, default_value_t = 4.0)]
        tx_height: f64,
        #[arg(long, default_value_t = 3.0)]
        rx_height: f64,
    },
}
