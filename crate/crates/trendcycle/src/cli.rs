//! Command-line interface.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use trendcycle_core::analysis::{detection_lag, final_turning_points, porcupine, revision_study};
use trendcycle_core::bandwidth::{
    builtin_table, optimize_with, BandwidthSet, Criterion, SearchConfig,
};
use trendcycle_core::filters::{
    default_musgrave_ic, henderson_exact, musgrave, rkhs_asymmetric, rkhs_symmetric, FilterWeights,
};
use trendcycle_core::series::{ic_ratio, select_length, smooth, FilterBank, Period, TimeSeries};
use trendcycle_core::spectral::{phase_delay, transfer, DEFAULT_GRID_SIZE};

use crate::io::{parse_period, read_series_path, IngestError};
use crate::simulate::{self, TrendNoiseConfig};
use crate::table::{Cell, Format, Table};

/// Invalid flag combination or value.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

/// 2 for bad input or flags, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let validation = err
        .chain()
        .any(|e| e.is::<UsageError>() || e.is::<IngestError>() || e.is::<trendcycle_core::Error>());
    if validation {
        2
    } else {
        1
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "trendcycle",
    version,
    about = "Trend-cycle filters, real-time estimates and revision analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Write `<command>.<format>` into this directory.
    #[arg(long, global = true, env = "TRENDCYCLE_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weights of the boundary filters q = 0..m-1 and the symmetric filter.
    Weights {
        #[command(flatten)]
        filter: FilterArgs,
        /// Only the filter with this many future points (m for the symmetric one).
        #[arg(long)]
        q: Option<usize>,
    },
    /// Optimal local bandwidths.
    Bandwidth {
        #[arg(long)]
        m: usize,
        /// Defaults to total, gain and phase.
        #[arg(long, value_enum)]
        criterion: Option<CriterionArg>,
        /// Use the published 9-, 13- and 23-term tables instead of optimizing.
        #[arg(long)]
        use_builtin: bool,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid: usize,
    },
    /// Trend estimate with provenance of each point.
    Smooth {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Concurrent-estimate revisions: kernel filters against Musgrave filters.
    Revisions {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
        /// One row per date instead of the summary.
        #[arg(long)]
        detail: bool,
    },
    /// Turning points of the final trends and their detection lags.
    Turning {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Revision paths around a date as observations are added.
    Porcupine {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
        /// Date of the first vintage (YYYY-MM or YYYY-Qn).
        #[arg(long)]
        target: String,
        /// Number of later vintages.
        #[arg(long, default_value_t = 12)]
        horizon: usize,
        /// Dates before the target shown in every vintage.
        #[arg(long, default_value_t = 12)]
        window: usize,
    },
    /// Gain, phase and phase delay of one filter.
    Spectrum {
        #[command(flatten)]
        filter: FilterArgs,
        /// Future points; omitted means the symmetric filter.
        #[arg(long)]
        q: Option<usize>,
    },
    /// Seeded local-linear-trend plus AR(1) series.
    Simulate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 240)]
        length: usize,
        /// Target I/C ratio.
        #[arg(long, default_value_t = 1.0)]
        target_ic: f64,
        #[arg(long, default_value_t = 0.3)]
        ar: f64,
        #[arg(long, default_value_t = 0.05)]
        slope_sd: f64,
        #[arg(long, default_value = "2000-01")]
        start: String,
        /// Number of series; more than one adds a `series` column.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Rkhs,
    Musgrave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Total,
    Gain,
    Phase,
    PhaseCos,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Total => Criterion::TotalDistance,
            CriterionArg::Gain => Criterion::GainDistance,
            CriterionArg::Phase => Criterion::PhaseDelay,
            CriterionArg::PhaseCos => Criterion::PhaseCos,
        }
    }
}

/// Half-length or `auto` (chosen from the series' I/C ratio).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfLength {
    Auto,
    Fixed(usize),
}

impl FromStr for HalfLength {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(HalfLength::Auto);
        }
        s.parse()
            .map(HalfLength::Fixed)
            .map_err(|_| format!("expected a half-length or `auto`, got `{s}`"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Filter half-length, or `auto` to select from the I/C ratio.
    #[arg(long, default_value = "auto")]
    pub m: HalfLength,
    #[arg(long, value_enum, default_value_t = FamilyArg::Rkhs)]
    pub family: FamilyArg,
    /// Bandwidth criterion for kernel filters.
    #[arg(long, value_enum, default_value_t = CriterionArg::Gain)]
    pub criterion: CriterionArg,
    /// I/C ratio for Musgrave filters; defaults to the X-11 value for the length.
    #[arg(long)]
    pub ic: Option<f64>,
    /// Optimize bandwidths even when a published table exists.
    #[arg(long)]
    pub optimize: bool,
    /// Frequency grid size for optimization and spectra.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid: usize,
}

impl FilterArgs {
    fn fixed_m(&self) -> anyhow::Result<usize> {
        match self.m {
            HalfLength::Fixed(m) => Ok(m),
            HalfLength::Auto => usage("--m auto needs an input series; give a number"),
        }
    }

    fn resolve_m(&self, values: &[f64]) -> anyhow::Result<usize> {
        match self.m {
            HalfLength::Fixed(m) => Ok(m),
            HalfLength::Auto => Ok(select_length(ic_ratio(values)?)),
        }
    }

    fn musgrave_ic(&self, m: usize) -> f64 {
        self.ic.unwrap_or_else(|| default_musgrave_ic(m))
    }

    fn bandwidths(&self, m: usize) -> anyhow::Result<BandwidthSet> {
        let criterion = Criterion::from(self.criterion);
        if !self.optimize {
            match builtin_table(m, criterion) {
                Err(trendcycle_core::Error::NoBuiltinTable { .. }) => {}
                other => return Ok(other?),
            }
        }
        let config = SearchConfig {
            grid_size: self.grid,
            ..Default::default()
        };
        Ok(optimize_with(m, criterion, &config)?)
    }

    fn kernel_bank(&self, m: usize) -> anyhow::Result<FilterBank> {
        Ok(FilterBank::rkhs(self.bandwidths(m)?)?)
    }

    fn musgrave_bank(&self, m: usize) -> anyhow::Result<FilterBank> {
        Ok(FilterBank::musgrave(m, self.musgrave_ic(m))?)
    }

    fn bank(&self, m: usize) -> anyhow::Result<FilterBank> {
        match self.family {
            FamilyArg::Rkhs => self.kernel_bank(m),
            FamilyArg::Musgrave => self.musgrave_bank(m),
        }
    }

    /// Filter with `q` future points; `q = m` is the symmetric filter.
    fn single_filter(&self, m: usize, q: usize) -> anyhow::Result<FilterWeights> {
        if q > m {
            return usage(format!("--q {q} exceeds --m {m}"));
        }
        let f = match (self.family, q == m) {
            (FamilyArg::Rkhs, true) => rkhs_symmetric(m, m as f64 + 1.0)?,
            (FamilyArg::Rkhs, false) => rkhs_asymmetric(m, q, self.bandwidths(m)?.values[q])?,
            (FamilyArg::Musgrave, true) => henderson_exact(m)?,
            (FamilyArg::Musgrave, false) => musgrave(m, q, self.musgrave_ic(m))?,
        };
        Ok(f)
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file with header `date,value`.
    #[arg(
        long,
        required_unless_present = "input_dir",
        conflicts_with = "input_dir"
    )]
    pub input: Option<PathBuf>,
    /// Directory of CSV files, processed concurrently; adds a `series` column.
    #[arg(long)]
    pub input_dir: Option<PathBuf>,
}

impl InputArgs {
    fn files(&self) -> anyhow::Result<Vec<PathBuf>> {
        if let Some(p) = &self.input {
            return Ok(vec![p.clone()]);
        }
        let dir = self.input_dir.as_ref().expect("clap requires one input");
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        if files.is_empty() {
            return usage(format!("no .csv files in {}", dir.display()));
        }
        Ok(files)
    }
}

/// Runs `per_series` on every input, one thread per file in corpus mode.
fn over_inputs<F>(input: &InputArgs, per_series: F) -> anyhow::Result<Table>
where
    F: Fn(&TimeSeries) -> anyhow::Result<Table> + Sync,
{
    let files = input.files()?;
    let load = |path: &Path| -> anyhow::Result<Table> {
        let series = read_series_path(path)?;
        per_series(&series)
    };
    if input.input.is_some() {
        return load(&files[0]);
    }
    let results: Vec<anyhow::Result<Table>> = std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .iter()
            .map(|path| scope.spawn(move || load(path)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| bail!("worker panicked")))
            .collect()
    });
    let mut combined: Option<Table> = None;
    for (path, result) in files.iter().zip(results) {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let table = result
            .with_context(|| path.display().to_string())?
            .with_leading("series", &label);
        match &mut combined {
            Some(t) => t.extend(table),
            None => combined = Some(table),
        }
    }
    Ok(combined.expect("at least one file"))
}

fn date_cell(series: &TimeSeries, index: usize) -> Cell {
    Cell::from(series.date(index).to_string())
}

fn weight_rows(table: &mut Table, filter: &FilterWeights, label: &str) {
    for (j, w) in filter.iter() {
        table.push(vec![
            label.into(),
            filter.q().into(),
            filter.bandwidth().into(),
            Cell::Int(j as i64),
            w.into(),
        ]);
    }
}

fn cmd_weights(filter: &FilterArgs, q: Option<usize>) -> anyhow::Result<Table> {
    let m = filter.fixed_m()?;
    let mut table = Table::new(&["filter", "q", "bandwidth", "offset", "weight"]);
    if let Some(q) = q {
        let f = filter.single_filter(m, q)?;
        let label = if q == m { "symmetric" } else { "asymmetric" };
        weight_rows(&mut table, &f, label);
        return Ok(table);
    }
    let bank = filter.bank(m)?;
    for f in bank.asymmetric_filters() {
        weight_rows(&mut table, f, "asymmetric");
    }
    weight_rows(&mut table, bank.symmetric(), "symmetric");
    Ok(table)
}

fn cmd_bandwidth(
    m: usize,
    criterion: Option<CriterionArg>,
    use_builtin: bool,
    grid: usize,
) -> anyhow::Result<Table> {
    let criteria: Vec<Criterion> = match criterion {
        Some(c) => vec![c.into()],
        None => vec![
            Criterion::TotalDistance,
            Criterion::GainDistance,
            Criterion::PhaseDelay,
        ],
    };
    let config = SearchConfig {
        grid_size: grid,
        ..Default::default()
    };
    let mut table = Table::new(&["m", "criterion", "q", "bandwidth"]);
    for c in criteria {
        let set = if use_builtin {
            builtin_table(m, c)?
        } else {
            optimize_with(m, c, &config)?
        };
        for (q, b) in set.values.iter().enumerate() {
            table.push(vec![m.into(), c.as_str().into(), q.into(), (*b).into()]);
        }
    }
    Ok(table)
}

fn cmd_smooth(series: &TimeSeries, filter: &FilterArgs) -> anyhow::Result<Table> {
    let m = filter.resolve_m(series.values())?;
    let est = smooth(series, &filter.bank(m)?)?;
    let mut table = Table::new(&["date", "value", "estimate", "provenance"]);
    for (t, (v, p)) in est.values.iter().zip(&est.provenance).enumerate() {
        table.push(vec![
            date_cell(series, t),
            series.values()[t].into(),
            (*v).into(),
            p.to_string().into(),
        ]);
    }
    Ok(table)
}

fn cmd_revisions(series: &TimeSeries, filter: &FilterArgs, detail: bool) -> anyhow::Result<Table> {
    let m = filter.resolve_m(series.values())?;
    let kernel = revision_study(series.values(), &filter.kernel_bank(m)?)?;
    let mut reference = revision_study(series.values(), &filter.musgrave_bank(m)?)?;
    let mut kernel_report = kernel;
    kernel_report.compare_to(&reference)?;
    reference.compare_to(&reference.clone())?;
    let criterion = Criterion::from(filter.criterion).as_str();
    let labelled = [
        ("rkhs", criterion, &kernel_report),
        ("musgrave", "", &reference),
    ];
    if detail {
        let mut table = Table::new(&["family", "date", "final", "realtime", "relative"]);
        for (family, _, report) in labelled {
            for p in &report.points {
                table.push(vec![
                    family.into(),
                    date_cell(series, p.index),
                    p.final_value.into(),
                    p.realtime.into(),
                    p.relative.into(),
                ]);
            }
        }
        return Ok(table);
    }
    let mut table = Table::new(&[
        "family",
        "criterion",
        "m",
        "points",
        "excluded",
        "mspe",
        "mspe_ratio",
    ]);
    for (family, crit, report) in labelled {
        table.push(vec![
            family.into(),
            crit.into(),
            m.into(),
            report.defined().into(),
            report.excluded.into(),
            report.mspe.into(),
            report.mspe_ratio_vs_reference.into(),
        ]);
    }
    Ok(table)
}

fn cmd_turning(series: &TimeSeries, filter: &FilterArgs) -> anyhow::Result<Table> {
    let m = filter.resolve_m(series.values())?;
    let mut table = Table::new(&["family", "date", "kind", "lag"]);
    for (family, bank) in [
        ("rkhs", filter.kernel_bank(m)?),
        ("musgrave", filter.musgrave_bank(m)?),
    ] {
        for tp in final_turning_points(series.values(), &bank)? {
            let lag = detection_lag(series.values(), &bank, tp.index)?;
            table.push(vec![
                family.into(),
                date_cell(series, tp.index),
                tp.kind.to_string().into(),
                lag.into(),
            ]);
        }
    }
    Ok(table)
}

fn cmd_porcupine(
    series: &TimeSeries,
    filter: &FilterArgs,
    target: Period,
    horizon: usize,
    window: usize,
) -> anyhow::Result<Table> {
    let m = filter.resolve_m(series.values())?;
    let Some(index) = series.index_of(target) else {
        return usage(format!("{target} is outside {}", series.label()));
    };
    let p = porcupine(series.values(), &filter.bank(m)?, index, horizon, window)?;
    if p.truncated {
        eprintln!(
            "warning: {}: horizon {horizon} runs past the last observation; {} vintages produced",
            series.label(),
            p.rows.len()
        );
    }
    let mut table = Table::new(&["vintage", "date", "estimate"]);
    for row in &p.rows {
        for (k, v) in row.estimates.iter().enumerate() {
            table.push(vec![
                date_cell(series, row.end),
                date_cell(series, row.start + k),
                (*v).into(),
            ]);
        }
    }
    Ok(table)
}

fn cmd_spectrum(filter: &FilterArgs, q: Option<usize>) -> anyhow::Result<Table> {
    let m = filter.fixed_m()?;
    let f = filter.single_filter(m, q.unwrap_or(m))?;
    let curve = transfer(&f, filter.grid)?;
    let delay = phase_delay(&curve);
    let mut table = Table::new(&["omega", "gain", "phase_radians", "delay_months"]);
    for (((omega, gain), phase), d) in curve
        .frequencies
        .iter()
        .zip(&curve.gain)
        .zip(&curve.phase)
        .zip(&delay)
    {
        table.push(vec![
            (*omega).into(),
            (*gain).into(),
            (*phase).into(),
            (*d).into(),
        ]);
    }
    Ok(table)
}

fn cmd_simulate(
    seed: u64,
    cfg: TrendNoiseConfig,
    start: &str,
    count: usize,
) -> anyhow::Result<Table> {
    let Some(start) = parse_period(start) else {
        return usage(format!("malformed --start `{start}`"));
    };
    if cfg.length < trendcycle_core::series::IC_MIN_LENGTH {
        return usage(format!(
            "--length must be at least {}",
            trendcycle_core::series::IC_MIN_LENGTH
        ));
    }
    if !(cfg.target_ic > 0.0 && cfg.target_ic.is_finite()) {
        return usage("--target-ic must be positive");
    }
    if cfg.ar_coef.is_nan() || cfg.ar_coef.abs() >= 1.0 {
        return usage("--ar must lie in (-1, 1)");
    }
    let mut rng = simulate::rng(seed);
    let mut table = Table::new(&["series", "date", "value"]);
    for k in 0..count {
        let sim = simulate::trend_plus_noise(&mut rng, &cfg);
        for (t, v) in sim.values.iter().enumerate() {
            table.push(vec![
                format!("sim{k:03}").into(),
                start.offset(t as i64).to_string().into(),
                (*v).into(),
            ]);
        }
    }
    if count == 1 {
        table.columns.remove(0);
        for row in &mut table.rows {
            row.remove(0);
        }
    }
    Ok(table)
}

fn build(command: &Command) -> anyhow::Result<Table> {
    match command {
        Command::Weights { filter, q } => cmd_weights(filter, *q),
        Command::Bandwidth {
            m,
            criterion,
            use_builtin,
            grid,
        } => cmd_bandwidth(*m, *criterion, *use_builtin, *grid),
        Command::Smooth { input, filter } => over_inputs(input, |s| cmd_smooth(s, filter)),
        Command::Revisions {
            input,
            filter,
            detail,
        } => over_inputs(input, |s| cmd_revisions(s, filter, *detail)),
        Command::Turning { input, filter } => over_inputs(input, |s| cmd_turning(s, filter)),
        Command::Porcupine {
            input,
            filter,
            target,
            horizon,
            window,
        } => {
            let Some(target) = parse_period(target) else {
                return usage(format!("malformed --target `{target}`"));
            };
            over_inputs(input, |s| {
                cmd_porcupine(s, filter, target, *horizon, *window)
            })
        }
        Command::Spectrum { filter, q } => cmd_spectrum(filter, *q),
        Command::Simulate {
            seed,
            length,
            target_ic,
            ar,
            slope_sd,
            start,
            count,
        } => cmd_simulate(
            *seed,
            TrendNoiseConfig {
                length: *length,
                target_ic: *target_ic,
                ar_coef: *ar,
                slope_sd: *slope_sd,
                ..Default::default()
            },
            start,
            *count,
        ),
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Weights { .. } => "weights",
            Command::Bandwidth { .. } => "bandwidth",
            Command::Smooth { .. } => "smooth",
            Command::Revisions { .. } => "revisions",
            Command::Turning { .. } => "turning",
            Command::Porcupine { .. } => "porcupine",
            Command::Spectrum { .. } => "spectrum",
            Command::Simulate { .. } => "simulate",
        }
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    let table = build(&cli.command)?;
    let bytes = table.render(cli.format)?;
    let path = match (&cli.output, &cli.out_dir) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Some(dir.join(format!("{}.{}", cli.command.name(), cli.format.extension())))
        }
        (None, None) => None,
    };
    match path {
        Some(p) => fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(&bytes).and_then(|()| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other.context("writing standard output")?,
            }
        }
    }
    Ok(())
}
