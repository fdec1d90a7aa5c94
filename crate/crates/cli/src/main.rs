use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use replisure::report::Table;
use replisure::tables::{self, PValueMethod};
use replisure::{load_dataset, DataSource, Dataset, Error};

mod svg;

use svg::{Interval, Plot, Scale};

const DATA_ENV: &str = "REPLISURE_DATA";

#[derive(Parser, Debug)]
#[command(name = "replisure", version, about = "Replication success, power and combined intervals for study pairs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Dataset CSV, or `bundled`. Defaults to $REPLISURE_DATA, then the bundled data.
    #[arg(long, global = true)]
    input: Option<String>,
    /// One-sided significance level.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a plot of the result as SVG.
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Drop a study by label (repeatable).
    #[arg(long, global = true, value_name = "LABEL")]
    exclude: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Controlled,
    Nominal,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-trials and sceptical p-values with success flags per study.
    Assess {
        #[arg(long, value_enum, default_value_t = MethodArg::Controlled)]
        method: MethodArg,
    },
    /// Conditional and predictive replication power in percent.
    Power,
    /// Fixed-effect meta-analysis and sceptical one-sided intervals.
    Ci,
    /// p-values against relative sample size for a fixed original p-value.
    Curves {
        #[arg(long, default_value_t = 0.01)]
        p_original: f64,
        #[arg(long, default_value_t = 1.0)]
        rel_effect: f64,
        #[arg(long, default_value_t = 0.05)]
        c_min: f64,
        #[arg(long, default_value_t = 50.0)]
        c_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Conditional power as a function of the original effect estimate.
    PowerProfile {
        /// Study label, e.g. TRITON-TIMI.
        study: String,
        /// Variance ratio of the replication; defaults to the study's own.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Proportion of successes and average predictive power across levels.
    SuccessCurve {
        #[arg(long, default_value_t = 0.005)]
        alpha_min: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha_max: f64,
        #[arg(long, default_value_t = 0.005)]
        alpha_step: f64,
    },
    /// Margin-shifted original against replication estimates.
    Shrinkage,
    /// Monte Carlo check of the overall Type-I error of the controlled rule.
    VerifyT1e {
        /// Variance ratios to check (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = tables::CALIBRATION_RATIOS)]
        c: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        draws: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_numerical() { 3 } else { 2 }, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("replisure: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dataset(g: &Global) -> Result<Dataset, Failure> {
    let spec = match &g.input {
        Some(s) => s.clone(),
        None => std::env::var(DATA_ENV).unwrap_or_else(|_| "bundled".into()),
    };
    let Ok(source) = spec.parse::<DataSource>();
    let data = load_dataset(&source)?;
    for label in &g.exclude {
        if data.get(label).is_none() {
            return Err(usage(format!("cannot exclude `{label}`: no such study")));
        }
    }
    Ok(data.without(&g.exclude))
}

fn alpha(g: &Global, default: f64) -> Result<f64, Failure> {
    let a = g.alpha.unwrap_or(default);
    if a > 0.0 && a < 0.5 {
        Ok(a)
    } else {
        Err(usage(format!("--alpha must lie in (0, 0.5), got {a}")))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let (table, plot) = match &cli.command {
        Command::Assess { method } => {
            let method = match method {
                MethodArg::Controlled => PValueMethod::Controlled,
                MethodArg::Nominal => PValueMethod::Nominal,
                MethodArg::Both => PValueMethod::Both,
            };
            (tables::assess_table(&dataset(g)?, alpha(g, 0.025)?, method)?, None)
        }
        Command::Power => (tables::power_table(&dataset(g)?, alpha(g, 0.025)?)?, None),
        Command::Ci => {
            let t = tables::ci_table(&dataset(g)?, alpha(g, 0.025)?)?;
            let svg = forest_plot(&t);
            (t, Some(svg))
        }
        Command::Curves { p_original, rel_effect, c_min, c_max, points } => {
            let grid = tables::log_grid(*c_min, *c_max, *points)?;
            let t = tables::curves_table(*p_original, *rel_effect, &grid)?;
            let mut p = Plot::new(
                &format!("p_original = {p_original}, relative effect = {rel_effect}"),
                "relative sample size c",
                "p-value",
            )
            .x_scale(Scale::Log);
            p.line("controlled sceptical", xy(&t, "c", "p_s_controlled"), false);
            p.line("two-trials", xy(&t, "c", "p_ttr"), true);
            (t, Some(p.render()))
        }
        Command::PowerProfile { study, c, points } => {
            let data = dataset(g)?;
            let pair = data.get(study).ok_or_else(|| usage(format!("no study labelled `{study}`")))?;
            if let Some(c) = c {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(usage(format!("--c must be positive, got {c}")));
                }
            }
            let t = tables::power_profile_table(pair, *c, alpha(g, 0.025)?, *points)?;
            let mut p = Plot::new(&format!("{} conditional power", pair.label), "original log hazard ratio", "power");
            p.line("two-trials", xy(&t, "theta", "cp_ttr"), false);
            p.line("controlled sceptical", xy(&t, "theta", "cp_sceptical"), true);
            if let Some(theta) = t.summary_value("theta_o").and_then(|c| c.as_f64()) {
                p.vertical(theta);
            }
            (t, Some(p.render()))
        }
        Command::SuccessCurve { alpha_min, alpha_max, alpha_step } => {
            if !(*alpha_step > 0.0 && alpha_min <= alpha_max) {
                return Err(usage("alpha grid needs a positive step and alpha-min <= alpha-max"));
            }
            let n = ((alpha_max - alpha_min) / alpha_step + 1e-9).floor() as usize;
            let grid: Vec<f64> = (0..=n).map(|i| ((alpha_min + alpha_step * i as f64) * 1e12).round() / 1e12).collect();
            let t = tables::success_curve_table(&dataset(g)?, &grid)?;
            let mut p = Plot::new("Replication success across levels", "one-sided alpha", "proportion");
            p.line("success (two-trials)", xy(&t, "alpha", "prop_success_ttr"), false);
            p.line("success (sceptical)", xy(&t, "alpha", "prop_success_sceptical"), false);
            p.line("avg predictive power (two-trials)", xy(&t, "alpha", "avg_pp_ttr"), true);
            p.line("avg predictive power (sceptical)", xy(&t, "alpha", "avg_pp_sceptical"), true);
            (t, Some(p.render()))
        }
        Command::Shrinkage => {
            let t = tables::shrinkage_table(&dataset(g)?)?;
            let mut p = Plot::new(
                "Original vs replication estimates",
                "original log HR - log margin",
                "replication log HR - log margin",
            );
            let col = |name: &str| t.column(name).expect("shrinkage column");
            let (x, xl, xh, y, yl, yh) =
                (col("rct_shift"), col("rct_lo"), col("rct_hi"), col("rwe_shift"), col("rwe_lo"), col("rwe_hi"));
            for row in &t.rows {
                let v = |i: usize| row[i].as_f64().unwrap_or(f64::NAN);
                p.point(v(x), v(y), Some((v(xl), v(xh), v(yl), v(yh))));
            }
            p.diagonal();
            (t, Some(p.render()))
        }
        Command::VerifyT1e { c, draws, seed } => {
            if c.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
                return Err(usage("variance ratios must be positive"));
            }
            (tables::verify_t1e_table(c, alpha(g, 0.1)?, *draws, *seed)?, None)
        }
    };

    if g.svg.is_some() && plot.is_none() {
        return Err(usage("this command has no plot; drop --svg"));
    }
    emit(g, &table)?;
    if let (Some(path), Some(svg)) = (&g.svg, plot) {
        write_file(path, &svg)?;
    }
    Ok(())
}

fn xy(t: &Table, x: &str, y: &str) -> Vec<(f64, f64)> {
    let (i, j) = (t.column(x).expect("x column"), t.column(y).expect("y column"));
    t.rows.iter().filter_map(|r| Some((r[i].as_f64()?, r[j].as_f64()?))).collect()
}

fn forest_plot(t: &Table) -> String {
    let col = |name: &str| t.column(name).expect("ci column");
    let (label, hr, lo, hi, up) =
        (col("label"), col("meta_hr"), col("meta_lo"), col("meta_hi"), col("sceptical_upper_hr"));
    let rows: Vec<_> = t
        .rows
        .iter()
        .map(|r| {
            let name = match &r[label] {
                replisure::report::Cell::Text(s) => s.clone(),
                _ => String::new(),
            };
            let v = |i: usize| r[i].as_f64().unwrap_or(f64::NAN);
            let meta = Interval { label: name.clone(), lo: v(lo), hi: v(hi), mark: Some(v(hr)) };
            let sceptical = r[up].as_f64().map(|u| Interval { label: name, lo: 0.0, hi: u, mark: None });
            (meta, sceptical)
        })
        .collect();
    svg::forest("Meta-analysis (solid) and sceptical upper limit (dashed)", &rows, 1.0)
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(g: &Global, table: &Table) -> Result<(), Failure> {
    let text = match g.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &g.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
