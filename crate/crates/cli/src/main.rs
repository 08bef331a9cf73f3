use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use molcav::dynamics::{build_diffusion, build_drift};
use molcav::meanfield::solve_meanfield;
use molcav::params::{read_param_file, Direction, ParamSet};
use molcav::point::{evaluate, PointOptions};
use molcav::sweep::{
    emit, presets, run_point, run_sweep_detailed, Axis, Cell, Format, Outputs, ResultTable,
    SpinSelection, SweepOutput, SweepSpec,
};
use molcav::{Error, Mat8};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "molcav",
    version,
    about = "Steady-state entanglement sweeps for a spinning molecular cavity"
)]
struct Cli {
    /// Parameter file (TOML); the reference parameter set when omitted.
    #[arg(long, global = true)]
    params: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    format: Format,

    /// Worker threads for sweeps (all cores by default).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Mean-field branch to use instead of the first stable one.
    #[arg(long, global = true)]
    branch: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep one or two parameters over a grid.
    Sweep(SweepArgs),
    /// Run a built-in figure sweep.
    Preset {
        name: Option<String>,
        /// List the available presets.
        #[arg(long)]
        list: bool,
    },
    /// Evaluate a single point and dump every intermediate result.
    Point {
        #[arg(long, value_parser = parse_direction)]
        direction: Option<Direction>,
    },
    /// Write the drift and diffusion matrices of a single point.
    DumpMatrices {
        #[arg(long, value_parser = parse_direction)]
        direction: Option<Direction>,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// PATH:START:STOP:COUNT[:log], at most twice.
    #[arg(long = "axis", required = true, value_parser = parse_axis)]
    axes: Vec<Axis>,

    /// base, paired (CW and CCW) or all (no rotation, CW, CCW).
    #[arg(long, default_value = "base", value_parser = parse_spin)]
    spin: SpinSelection,

    /// Comma-separated subset of stability, entanglement, contrast.
    #[arg(long, default_value = "entanglement", value_delimiter = ',')]
    outputs: Vec<String>,

    /// Write each row's covariance matrix into this directory.
    #[arg(long)]
    dump_covariance: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_spin(s: &str) -> Result<SpinSelection, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_outputs(names: &[String]) -> Result<Outputs, Error> {
    let mut out = Outputs::STABILITY;
    for n in names {
        match n.as_str() {
            "stability" => {}
            "entanglement" => out.entanglement = true,
            "contrast" => {
                out.entanglement = true;
                out.contrast = true;
            }
            other => return Err(Error::Config(format!("unknown output `{other}`"))),
        }
    }
    Ok(out)
}

/// Failure that ends the run, with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::InvalidParameter(_) => EXIT_CONFIG,
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_RUNTIME,
        };
        Fail(code, e.to_string())
    }
}

fn load_base(cli: &Cli) -> Result<ParamSet, Fail> {
    match &cli.params {
        Some(p) => read_param_file(p).map_err(|e| match e {
            Error::Io { .. } => Fail(EXIT_CONFIG, e.to_string()),
            other => other.into(),
        }),
        None => Ok(ParamSet::reference()),
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)
                    .map_err(|e| Fail(EXIT_IO, format!("{}: {e}", parent.display())))?;
            }
            fs::write(path, text).map_err(|e| Fail(EXIT_IO, format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Fail(EXIT_IO, format!("stdout: {e}"))),
    }
}

fn write_table(out: Option<&Path>, table: &ResultTable, format: Format) -> Result<(), Fail> {
    match out {
        Some(path) => Ok(emit(table, path, format)?),
        None => write_text(None, &table.render(format)),
    }
}

/// `fig.csv` + `cw` → `fig-cw.csv`.
fn part_path(out: &Path, label: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let name = match out.extension() {
        Some(ext) => format!("{stem}-{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{label}"),
    };
    out.with_file_name(name)
}

fn matrix_csv(m: &Mat8) -> String {
    let mut s = String::new();
    for i in 0..8 {
        let row: Vec<String> = (0..8)
            .map(|j| molcav::sweep::format_float(m[(i, j)]))
            .collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn dump_covariances(dir: &Path, out: &SweepOutput) -> Result<(), Fail> {
    fs::create_dir_all(dir).map_err(|e| Fail(EXIT_IO, format!("{}: {e}", dir.display())))?;
    for (i, v) in out.covariances.iter().enumerate() {
        if let Some(v) = v {
            let path = dir.join(format!("row-{i:06}.csv"));
            fs::write(&path, matrix_csv(v))
                .map_err(|e| Fail(EXIT_IO, format!("{}: {e}", path.display())))?;
        }
    }
    Ok(())
}

fn finish(failures: usize) -> Result<(), Fail> {
    if failures > 0 {
        Err(Fail(
            EXIT_RUNTIME,
            format!("{failures} point(s) failed; see the status column"),
        ))
    } else {
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<(), Fail> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Sweep(args) => {
            let spec = SweepSpec {
                base: load_base(cli)?,
                base_source: cli.params.as_ref().map(|p| p.display().to_string()),
                axes: args.axes.clone(),
                spin: args.spin,
                outputs: parse_outputs(&args.outputs)?,
                branch: cli.branch,
            };
            let result = run_sweep_detailed(&spec, cli.jobs)?;
            write_table(out, &result.table, cli.format)?;
            if let Some(dir) = &args.dump_covariance {
                dump_covariances(dir, &result)?;
            }
            finish(result.failures)
        }
        Command::Preset { name, list } => {
            let base = load_base(cli)?;
            let all = presets(&base);
            if *list || name.is_none() {
                let text: String = all
                    .iter()
                    .map(|p| format!("{:<18} {}\n", p.name, p.description))
                    .collect();
                return write_text(None, &text);
            }
            let name = name.as_deref().unwrap_or_default();
            let preset = all
                .into_iter()
                .find(|p| p.name == name)
                .ok_or_else(|| Fail(EXIT_CONFIG, format!("unknown preset `{name}`; try --list")))?;
            let single = preset.parts.len() == 1;
            let mut failures = 0;
            let mut stdout_text = String::new();
            for (label, mut spec) in preset.parts {
                spec.branch = cli.branch;
                spec.base_source = cli.params.as_ref().map(|p| p.display().to_string());
                let result = run_sweep_detailed(&spec, cli.jobs)?;
                failures += result.failures;
                let mut table = result.table;
                table
                    .provenance
                    .insert(1, format!("preset = {}/{label}", preset.name));
                match out {
                    Some(path) if single => write_table(Some(path), &table, cli.format)?,
                    Some(path) => write_table(Some(&part_path(path, label)), &table, cli.format)?,
                    None => stdout_text.push_str(&table.render(cli.format)),
                }
            }
            if out.is_none() {
                write_text(None, &stdout_text)?;
            }
            finish(failures)
        }
        Command::Point { direction } => {
            let mut base = load_base(cli)?;
            if let Some(d) = direction {
                base.set_direction(*d);
            }
            match cli.format {
                Format::Json => {
                    let r = evaluate(
                        &base,
                        PointOptions {
                            branch: cli.branch,
                            stability_only: false,
                        },
                    );
                    write_text(out, &r.to_json())?;
                    finish(usize::from(r.status.is_failure()))
                }
                Format::Csv => {
                    let spec = SweepSpec {
                        branch: cli.branch,
                        base_source: cli.params.as_ref().map(|p| p.display().to_string()),
                        ..SweepSpec::new(base, vec![])
                    };
                    let result = run_point(&spec)?;
                    write_table(out, &result.table, cli.format)?;
                    finish(result.failures)
                }
            }
        }
        Command::DumpMatrices { direction } => {
            let mut base = load_base(cli)?;
            if let Some(d) = direction {
                base.set_direction(*d);
            }
            let np = base.normalized()?;
            let mf = solve_meanfield(&np)?;
            let mf = match cli.branch {
                Some(b) => mf.with_branch(b)?,
                None => mf,
            };
            let a = build_drift(&np, mf.selected_state());
            let d = build_diffusion(&np);
            let labels = ["x1", "y1", "x2", "y2", "q1", "p1", "q2", "p2"];
            let mut header = vec!["matrix".to_string(), "row".to_string()];
            header.extend(labels.iter().map(|s| s.to_string()));
            let mut rows = Vec::new();
            for (name, m) in [("A", a.matrix()), ("D", d.matrix())] {
                for (i, label) in labels.iter().enumerate() {
                    let mut row = vec![Cell::from(name), Cell::from(*label)];
                    row.extend((0..8).map(|j| Cell::Num(m[(i, j)])));
                    rows.push(row);
                }
            }
            let mut provenance = vec![format!("molcav {}", env!("CARGO_PKG_VERSION"))];
            provenance.extend(base.describe());
            let table = ResultTable {
                header,
                rows,
                provenance,
            };
            write_table(out, &table, cli.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("molcav: {msg}");
            ExitCode::from(code)
        }
    }
}
