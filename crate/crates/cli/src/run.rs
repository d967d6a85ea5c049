//! Command dispatch.

use crate::args::{
    Cli, Command, Format, GenerateCommand, ReliabilityArg, SweepArgs, SweepKind,
};
use dsgain::analytic::{ds_gain_with_id, reliability, EvalReport, ReliabilityMode};
use dsgain::channel::{default_params, DsParams};
use dsgain::layout::{generate_grid, generate_winner_a1, parse_floorplan, Floorplan, RoomType};
use dsgain::montecarlo::{simulate, write_samples_csv};
use dsgain::quadrature::QuadratureSpec;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<dsgain::Error> for CliError {
    fn from(e: dsgain::Error) -> Self {
        match e {
            dsgain::Error::Convergence { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_floorplan(path: &Path) -> Result<Floorplan, CliError> {
    Ok(parse_floorplan(&read_file(path)?)?)
}

fn load_params(path: Option<&PathBuf>) -> Result<DsParams, CliError> {
    match path {
        Some(p) => Ok(DsParams::from_json(&read_file(p)?)?),
        None => Ok(default_params()),
    }
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Input(format!("cannot write stdout: {e}")))
        }
    }
}

fn floorplan_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if cli.tolerance <= 0.0 {
        return Err(CliError::Usage("--tolerance must be positive".to_owned()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".to_owned()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Input(format!("cannot build thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let spec = QuadratureSpec::with_rel_tol(cli.tolerance);
    match cli.command {
        Command::Evaluate {
            ref floorplan,
            reliability_mode,
        } => {
            let fp = load_floorplan(floorplan)?;
            let params = load_params(cli.params.as_ref())?;
            let mut report =
                ds_gain_with_id(&fp, &params, &spec, &floorplan_id(floorplan))?;
            if reliability_mode == ReliabilityArg::Std {
                let (rel, _) = reliability(&fp, &params, &spec, ReliabilityMode::StdMixture)?;
                report.reliability_ns = rel;
            }
            let text = match cli.format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => format!("{}\n{}\n", EvalReport::CSV_HEADER, report.to_csv_row()),
            };
            emit(cli.output.as_ref(), &text)
        }
        Command::Simulate {
            ref floorplan,
            links,
            seed,
            ref emit_samples,
        } => {
            if links == 0 {
                return Err(CliError::Usage("--links must be at least 1".to_owned()));
            }
            let fp = load_floorplan(floorplan)?;
            let params = load_params(cli.params.as_ref())?;
            let run = simulate(&fp, &params, links, seed)?;
            if let Some(path) = emit_samples {
                let file = fs::File::create(path).map_err(|e| {
                    CliError::Input(format!("cannot write {}: {e}", path.display()))
                })?;
                let mut buffered = std::io::BufWriter::new(file);
                write_samples_csv(&mut buffered, &fp, &run.samples)
                    .and_then(|()| buffered.flush())
                    .map_err(|e| CliError::Input(format!("cannot write samples: {e}")))?;
            }
            emit(cli.output.as_ref(), &(run.report.to_json() + "\n"))
        }
        Command::Compare {
            ref floorplan,
            links,
            ref seeds,
        } => {
            if links == 0 {
                return Err(CliError::Usage("--links must be at least 1".to_owned()));
            }
            if seeds.is_empty() {
                return Err(CliError::Usage("--seeds must not be empty".to_owned()));
            }
            let fp = load_floorplan(floorplan)?;
            let params = load_params(cli.params.as_ref())?;
            let analytic = ds_gain_with_id(&fp, &params, &spec, &floorplan_id(floorplan))?;
            let mut text = String::from("seed,analytic_ns,simulated_ns,difference_ns,z_score\n");
            let mut diff_sum = 0.0;
            for &seed in seeds {
                let run = simulate(&fp, &params, links, seed)?;
                let diff = run.report.ds_gain_sim_ns - analytic.ds_gain_ns;
                let z = diff / run.report.se_ds_gain_ns;
                diff_sum += diff;
                text.push_str(&format!(
                    "{seed},{},{},{diff},{z}\n",
                    analytic.ds_gain_ns, run.report.ds_gain_sim_ns
                ));
            }
            text.push_str(&format!("mean,,,{},\n", diff_sum / seeds.len() as f64));
            emit(cli.output.as_ref(), &text)
        }
        Command::Sweep(ref sweep) => {
            let params = load_params(cli.params.as_ref())?;
            let text = run_sweep(sweep, &params, &spec)?;
            emit(cli.output.as_ref(), &text)
        }
        Command::Generate { ref what } => {
            let fp = match *what {
                GenerateCommand::Grid {
                    rows,
                    cols,
                    room_w,
                    room_h,
                    ref room_type,
                    tx_height,
                    rx_height,
                } => generate_grid(
                    rows,
                    cols,
                    room_w,
                    room_h,
                    RoomType::new(room_type),
                    tx_height,
                    rx_height,
                )?,
                GenerateCommand::WinnerA1 {
                    tx_height,
                    rx_height,
                } => generate_winner_a1(tx_height, rx_height)?,
            };
            emit(cli.output.as_ref(), &(fp.to_json() + "\n"))
        }
    }
}

fn run_sweep(
    sweep: &SweepArgs,
    params: &DsParams,
    spec: &QuadratureSpec,
) -> Result<String, CliError> {
    if sweep.values.is_empty() {
        return Err(CliError::Usage("--values must not be empty".to_owned()));
    }
    if sweep.values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage(
            "--values must be strictly increasing".to_owned(),
        ));
    }
    let office = RoomType::office();
    let mut text = String::from("value,ds_gain_ns,reliability_ns\n");
    for &value in &sweep.values {
        let fp = match sweep.kind {
            SweepKind::AspectRatio => {
                if value < 1.0 {
                    return Err(CliError::Usage(format!(
                        "aspect ratio {value} must be >= 1"
                    )));
                }
                let short = (sweep.room_area / value).sqrt();
                let long = (sweep.room_area * value).sqrt();
                generate_grid(sweep.rows, sweep.cols, short, long, office.clone(),
                    sweep.tx_height, sweep.rx_height)?
            }
            SweepKind::RoomArea => {
                if value <= 0.0 {
                    return Err(CliError::Usage(format!("room area {value} must be > 0")));
                }
                let short = (value / sweep.aspect).sqrt();
                let long = (value * sweep.aspect).sqrt();
                generate_grid(sweep.rows, sweep.cols, short, long, office.clone(),
                    sweep.tx_height, sweep.rx_height)?
            }
            SweepKind::GridNByN => {
                let n = positive_int(value)?;
                generate_grid(n, n, sweep.floor_w / n as f64, sweep.floor_h / n as f64,
                    office.clone(), sweep.tx_height, sweep.rx_height)?
            }
            SweepKind::GridNBy2n => {
                let n = positive_int(value)?;
                generate_grid(n, 2 * n, sweep.floor_w / (2 * n) as f64,
                    sweep.floor_h / n as f64, office.clone(), sweep.tx_height, sweep.rx_height)?
            }
            SweepKind::RoomCount => {
                let n = positive_int(value)?;
                generate_grid(n, n, sweep.room_w, sweep.room_h, office.clone(),
                    sweep.tx_height, sweep.rx_height)?
            }
        };
        let report = ds_gain_with_id(&fp, params, spec, "sweep")?;
        text.push_str(&format!(
            "{value},{},{}\n",
            report.ds_gain_ns, report.reliability_ns
        ));
    }
    Ok(text)
}

fn positive_int(value: f64) -> Result<usize, CliError> {
    if value.fract() != 0.0 || value < 1.0 {
        return Err(CliError::Usage(format!(
            "grid sweep values must be positive integers, got {value}"
        )));
    }
    Ok(value as usize)
}
