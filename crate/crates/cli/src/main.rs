//! `collapse-sim`: run a named scenario and write its trace and summary.
//!
//! Exit status: 0 when every invariant passes, 1 when one fails, 2 on a
//! configuration or library error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use collapse_core::trace::RunTrace;
use collapse_sim::scenario::field;
use collapse_sim::{emit_summary, run_scenario, ConfigError, ScenarioFile, Summary, SCENARIOS};

fn run_args() -> Vec<Arg> {
    vec![
        Arg::new("seed").long("seed").value_parser(value_parser!(u64)).help("RNG seed"),
        Arg::new("trials")
            .long("trials")
            .value_parser(value_parser!(usize))
            .help("Number of trials or ensemble members"),
        Arg::new("output").long("output").short('o').help("Trace destination (JSON lines); `-` for stdout"),
        Arg::new("forced").long("forced").help("Right-wing outcomes \"ω6,ω4*,ω6*\" (relativistic-t2)"),
        Arg::new("summary").long("summary").help("Write the JSON summary here instead of printing it"),
        Arg::new("param")
            .long("param")
            .short('p')
            .action(ArgAction::Append)
            .help("Scenario parameter key=value (value in TOML syntax)"),
    ]
}

fn about(scenario: &str) -> &'static str {
    match scenario {
        "tz" => "Local measurement of T_z through two entangled probes",
        "t2" => "Local measurement of T² through three probe pairs",
        "signaling" => "No-signaling check: T_2z statistics with and without a remote flip",
        "grw" => "GRW localization hits on a two-lump wavefunction and hit-rate statistics",
        "csl" => "CSL ensemble of a two-level superposition under σ_z",
        "toy-one" => "One particle reduced by one apparatus on a space-like surface",
        "toy-two" => "Singlet pair with apparatuses A (right) and B (left)",
        "toy-stats" => "Parameter-independence table for the singlet pair",
        "counterfactual" => "Counterfactual claim verdicts and the hidden-variable demo",
        "relativistic-t2" => "T² protocol run surface by surface, sampled or with forced outcomes",
        _ => "Run a scenario",
    }
}

fn cli() -> Command {
    let mut cmd = Command::new("collapse-sim")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Run state-reduction scenarios and emit replayable traces")
        .subcommand_required(true)
        .subcommand(
            Command::new("run")
                .about("Run the scenario described by a TOML file")
                .arg(Arg::new("file").required(true).value_parser(value_parser!(PathBuf)))
                .args(run_args()),
        )
        .subcommand(
            Command::new("summarize")
                .about("Summarize an existing trace")
                .arg(Arg::new("trace").required(true).value_parser(value_parser!(PathBuf)))
                .arg(Arg::new("summary").long("summary").help("Write the JSON summary here instead of printing it")),
        );
    for name in SCENARIOS {
        cmd = cmd.subcommand(
            Command::new(name)
                .about(about(name))
                .arg(
                    Arg::new("config")
                        .long("config")
                        .short('c')
                        .value_parser(value_parser!(PathBuf))
                        .help("Scenario file; flags override its values"),
                )
                .args(run_args()),
        );
    }
    cmd
}

fn parse_param(text: &str) -> Result<(String, toml::Value), ConfigError> {
    let (key, value) = text.split_once('=').ok_or_else(|| field("param", format!("{text:?} is not key=value")))?;
    let key = key.trim().to_string();
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    Ok((key, parsed))
}

fn apply_overrides(file: &mut ScenarioFile, m: &ArgMatches) -> Result<(), ConfigError> {
    if let Some(&s) = m.get_one::<u64>("seed") {
        file.seed = Some(s);
    }
    if let Some(&t) = m.get_one::<usize>("trials") {
        file.trials = Some(t);
    }
    if let Some(o) = m.get_one::<String>("output") {
        file.output = Some(o.clone());
    }
    for p in m.get_many::<String>("param").into_iter().flatten() {
        let (k, v) = parse_param(p)?;
        file.params.insert(k, v);
    }
    if let Some(f) = m.get_one::<String>("forced") {
        file.params.insert("forced".into(), toml::Value::String(f.clone()));
    }
    file.validate()
}

fn io_error(path: &Path) -> impl Fn(io::Error) -> ConfigError + '_ {
    move |e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() }
}

fn write_summary(summary: &Summary, dest: Option<&String>) -> Result<(), ConfigError> {
    match dest {
        Some(path) => {
            let path = Path::new(path);
            let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
            text.push('\n');
            std::fs::write(path, text).map_err(io_error(path))
        }
        None => {
            eprint!("{}", summary.render());
            Ok(())
        }
    }
}

fn write_trace(trace: &RunTrace, dest: Option<&str>) -> Result<(), ConfigError> {
    match dest {
        None | Some("-") => trace.write_json_lines(io::stdout().lock()).map_err(io_error(Path::new("-"))),
        Some(path) => {
            let path = Path::new(path);
            let mut out = BufWriter::new(File::create(path).map_err(io_error(path))?);
            trace.write_json_lines(&mut out).map_err(io_error(path))?;
            out.flush().map_err(io_error(path))
        }
    }
}

fn execute(matches: &ArgMatches) -> Result<bool, ConfigError> {
    let (name, m) = matches.subcommand().expect("subcommand required");
    if name == "summarize" {
        let path = m.get_one::<PathBuf>("trace").expect("required");
        let file = File::open(path).map_err(io_error(path))?;
        let trace = RunTrace::read_json_lines(BufReader::new(file)).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let summary = emit_summary(&trace);
        write_summary(&summary, m.get_one::<String>("summary"))?;
        return Ok(summary.passed);
    }
    let mut file = if name == "run" {
        ScenarioFile::load(m.get_one::<PathBuf>("file").expect("required"))?
    } else {
        match m.get_one::<PathBuf>("config") {
            Some(path) => {
                let file = ScenarioFile::load(path)?;
                if file.scenario != name {
                    return Err(field(
                        "scenario",
                        format!("config is for {:?}, subcommand is {name:?}", file.scenario),
                    ));
                }
                file
            }
            None => ScenarioFile::new(name)?,
        }
    };
    apply_overrides(&mut file, m)?;
    let trace = run_scenario(&file)?;
    write_trace(&trace, file.output.as_deref())?;
    let summary = emit_summary(&trace);
    write_summary(&summary, m.get_one::<String>("summary"))?;
    Ok(summary.passed)
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    match execute(&matches) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
