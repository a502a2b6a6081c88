use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcomb_cli::commands::{cmd_comb, cmd_dip, cmd_events, cmd_jsa, cmd_validate};
use qcomb_cli::{gnuplot, CliError, Delay, Output, Preset, RunConfig};

#[derive(Parser)]
#[command(name = "qcomb", version, about = "Spectrally resolved two-photon interference of frequency combs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed; overrides `seed` in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Delays such as 40um or 0.53ps; bare numbers use the configured unit.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    delays: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Joint spectral amplitude, marginals and their widths.
    Jsa(RunArgs),
    /// HOM dip scan and its metrics.
    Dip(RunArgs),
    /// CSI, H(Δν), peaks and qudit decomposition per delay.
    Comb(RunArgs),
    /// Monte-Carlo time tagging, histograms and reconstruction reports.
    Events(RunArgs),
    /// Check a configuration and print its hash.
    Validate(RunArgs),
    /// Write gnuplot scripts for the CSV files in a directory.
    Gnuplot {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a complete configuration for a built-in source.
    Template {
        #[arg(value_enum)]
        preset: Preset,
    },
}

fn load(args: &RunArgs) -> Result<(RunConfig, Vec<Delay>), CliError> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if !args.delays.is_empty() {
        let parsed: Vec<Delay> = args
            .delays
            .iter()
            .map(|d| Delay::parse(d, cfg.delays.unit))
            .collect::<Result<_, _>>()
            .map_err(CliError::Validation)?;
        // keep the configured unit when every override uses it
        if parsed.iter().all(|d| d.unit == cfg.delays.unit) {
            cfg.delays.values = parsed.iter().map(|d| d.value).collect();
        } else {
            cfg.delays.unit = qcomb_cli::DelayUnit::Ps;
            cfg.delays.values = parsed.iter().map(|d| d.ps()).collect();
        }
        cfg.validate()?;
        return Ok((cfg, parsed));
    }
    cfg.validate()?;
    let delays = cfg.delays.delays();
    Ok((cfg, delays))
}

fn output(cfg: &RunConfig) -> Result<Output, CliError> {
    let dir = cfg
        .out
        .as_ref()
        .ok_or_else(|| CliError::Validation("out: no output directory (set \"out\" or pass --out)".into()))?;
    Output::create(dir, cfg.hash())
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.digits$}"))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Jsa(a) => {
            let (cfg, _) = load(&a)?;
            let mut out = output(&cfg)?;
            let r = cmd_jsa(&cfg, &mut out)?;
            println!(
                "marginal FWHM: signal {} nm, idler {} nm; center {} nm",
                opt(r.signal.fwhm_nm, 3),
                opt(r.idler.fwhm_nm, 3),
                opt(r.signal.center_nm, 3)
            );
        }
        Command::Dip(a) => {
            let (cfg, _) = load(&a)?;
            let mut out = output(&cfg)?;
            let r = cmd_dip(&cfg, &mut out)?;
            println!(
                "dip: visibility {:.5}, FWHM {:.2} fs ({:.2} µm)",
                r.metrics.visibility, r.metrics.fwhm_fs, r.metrics.fwhm_um
            );
        }
        Command::Comb(a) => {
            let (cfg, delays) = load(&a)?;
            let mut out = output(&cfg)?;
            let r = cmd_comb(&cfg, &delays, &mut out)?;
            for (p, q) in r.peaks.iter().zip(&r.qudits) {
                let comb = if p.no_comb { " (no comb)" } else { "" };
                println!("{}: τ = {:.4} ps, {} peaks{comb}, dimension {}", p.delay, p.tau_ps, p.count, q.dimension);
            }
        }
        Command::Events(a) => {
            let (cfg, delays) = load(&a)?;
            let mut out = output(&cfg)?;
            for r in cmd_events(&cfg, &delays, &mut out)? {
                println!(
                    "{}: {} coincidences, CSI L2 {}, width ratio {}, ToA comb {}",
                    r.delay,
                    r.coincidences,
                    opt(r.csi_l2, 4),
                    opt(r.width_ratio, 3),
                    if r.toa_comb_resolved { "resolved" } else { "washed out" }
                );
            }
        }
        Command::Validate(a) => {
            let (cfg, _) = load(&a)?;
            let r = cmd_validate(&cfg)?;
            println!("ok: config_hash {}", r.config_hash);
        }
        Command::Gnuplot { out } => {
            for s in gnuplot::write_scripts(&out)? {
                println!("{}", out.join(s).display());
            }
        }
        Command::Template { preset } => {
            let text = serde_json::to_string_pretty(&RunConfig::preset(preset))
                .map_err(|e| CliError::Validation(e.to_string()))?;
            println!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
