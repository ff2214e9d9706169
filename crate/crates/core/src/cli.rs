//! Command line: `brems run <scenario> [--param value]... [--config path] [--out dir]`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::scenarios::{parse_config, run_scenario, ScenarioError, ScenarioName, ScenarioSpec, DEFAULT_OUT_DIR, OUT_DIR_ENV};
use crate::units::{mass_renormalization, PhysicalConfig};

fn physical_defaults() -> String {
    let c = PhysicalConfig::default();
    let dm = mass_renormalization(&c).delta_m_over_m;
    let mut s = String::from("Physical defaults:\n");
    let rows = [
        ("fine structure constant α", format!("{:.10e}", c.fine_structure_alpha), ""),
        ("reduced Planck constant ħ", format!("{:.9e}", c.planck_hbar), "J s"),
        ("speed of light c", format!("{:.9e}", c.speed_of_light), "m/s"),
        ("Boltzmann constant k_B", format!("{:.6e}", c.boltzmann_k), "J/K"),
        ("electron rest energy m c²", format!("{:.10e}", c.electron_rest_energy), "J"),
        ("UV cutoff Ω = m c²/ħ", format!("{:.6e}", c.uv_cutoff_omega), "rad/s"),
        ("preparation time τ_p", format!("{:.1e}", c.preparation_time_tau_p), "s"),
        ("radiation time τ₀ = 2r_e/3c", format!("{:.6e}", c.radiation_time), "s"),
        ("reduced Compton wavelength", format!("{:.6e}", c.compton_wavelength), "m"),
        ("electromagnetic mass Δm/m", format!("{dm:.4e}"), ""),
    ];
    for (name, value, unit) in rows {
        s.push_str(&format!("  {name:<30} {value} {unit}\n"));
    }
    s.push_str(&format!(
        "\nOutput goes to --out, else ${OUT_DIR_ENV}, else ./{DEFAULT_OUT_DIR}.\n\
         Exit codes: 0 success, 1 domain or I/O error, 2 usage error."
    ));
    s
}

fn scenario_list() -> String {
    let mut s = String::from("Scenarios:\n");
    for n in ScenarioName::ALL {
        let alias = n.aliases().join(", ");
        let alias = if alias.is_empty() { String::new() } else { format!(" (alias: {alias})") };
        s.push_str(&format!("  {:<16} {}{alias}\n", n.as_str(), n.about()));
    }
    s
}

fn scenario_command(name: ScenarioName) -> Command {
    let mut cmd = Command::new(name.as_str())
        .about(name.about())
        .visible_aliases(name.aliases().iter().copied())
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .value_parser(clap::value_parser!(PathBuf))
                .help("flat `key = value` file; flags take precedence"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .value_parser(clap::value_parser!(PathBuf))
                .help("output directory"),
        );
    for &d in name.params() {
        let long = d.key.replace('_', "-");
        let mut arg = Arg::new(d.key)
            .long(long.clone())
            .value_name("VALUE")
            .action(ArgAction::Set)
            .allow_negative_numbers(true)
            .value_parser(move |s: &str| d.parse(s).map(|_| s.to_owned()))
            .help(format!("{} [{}] (default {})", d.help, d.unit, d.default));
        if long != d.key {
            arg = arg.alias(d.key);
        }
        cmd = cmd.arg(arg);
    }
    cmd
}

pub fn command() -> Command {
    let run = Command::new("run")
        .about("run a scenario and write <scenario>.csv and <scenario>.json")
        .subcommand_required(true)
        .after_help(scenario_list())
        .subcommands(ScenarioName::ALL.map(scenario_command));
    Command::new("brems")
        .about("Decoherence by bremsstrahlung: scenario runner")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(run)
        .after_help(format!("{}\n{}", scenario_list(), physical_defaults()))
}

/// Parses argv (including the program name) into a resolved spec.
pub fn parse_cli<I, T>(argv: I) -> Result<ScenarioSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let m = command().try_get_matches_from(argv).map_err(CliError::Clap)?;
    let (_, run) = m.subcommand().expect("subcommand required");
    let (sub, sm) = run.subcommand().expect("scenario required");
    let name = ScenarioName::parse(sub).expect("clap only accepts known scenarios");
    spec_from_matches(name, sm).map_err(CliError::Scenario)
}

fn spec_from_matches(name: ScenarioName, m: &ArgMatches) -> Result<ScenarioSpec, ScenarioError> {
    let config = match m.get_one::<PathBuf>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Usage(format!("{}: {e}", path.display())))?;
            parse_config(&text).map_err(|e| ScenarioError::Usage(format!("{}: {e}", path.display())))?
        }
        None => Vec::new(),
    };
    let flags: Vec<(String, String)> = name
        .params()
        .iter()
        .filter_map(|d| m.get_one::<String>(d.key).map(|v| (d.key.to_owned(), v.clone())))
        .collect();
    let out = m
        .get_one::<PathBuf>("out")
        .cloned()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    ScenarioSpec::resolve(name, &config, &flags, out)
}

#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Scenario(ScenarioError),
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = match parse_cli(argv) {
        Ok(s) => s,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return e.exit_code();
        }
        Err(CliError::Scenario(e)) => return report(e),
    };
    match run_scenario(&spec) {
        Ok(out) => {
            println!("scenario {}", spec.name);
            print!("{}", out.data.summary);
            for w in &out.data.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {}", out.csv_path.display());
            println!("wrote {}", out.json_path.display());
            0
        }
        Err(e) => report(e),
    }
}

fn report(e: ScenarioError) -> i32 {
    let kind = if e.exit_code() == 2 { "usage error" } else { "error" };
    eprintln!("{kind}: {e}");
    e.exit_code()
}
