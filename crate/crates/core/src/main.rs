use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use polar_bp::config::RunConfig;
use polar_bp::selftest::{self, SelftestOptions};
use polar_bp::sim::{sweep, PointStats, ResultWriter, TrialRecord};
use polar_bp::{CodeSpec, Decoder, Error};

#[derive(Parser)]
#[command(name = "polar-bp", version, about = "Polar-code BP decoders on permuted factor graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code by Bhattacharyya construction and write its frozen set.
    Construct {
        /// Block length N (a power of two).
        #[arg(long)]
        n: usize,
        /// Non-frozen positions, CRC bits included.
        #[arg(long)]
        k: usize,
        /// CRC length: 0 or 24.
        #[arg(long, default_value_t = 24)]
        crc: usize,
        /// Design Eb/N0 in dB.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        design_db: f64,
        /// Where to write the code file; stdout if omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a Monte Carlo sweep and write CSV and .dat results.
    Simulate(Box<SimulateArgs>),
    /// Run the fast invariant checks.
    Selftest {
        /// Damage a stride table on purpose; the encoding check must fail.
        #[arg(long, hide = true)]
        corrupt_strides: bool,
    },
}

/// Flags mirror the config keys and override the config file.
#[derive(Args)]
struct SimulateArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
    /// Any config key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    crc: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    design_db: Option<String>,
    /// Existing code file from `construct`.
    #[arg(long)]
    code: Option<String>,
    /// bp, fpbp, ppbp, nabp; comma-separated for several.
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    reset: Option<String>,
    #[arg(long)]
    q_max: Option<String>,
    #[arg(long)]
    p_range: Option<String>,
    #[arg(long)]
    p_level: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    n_min: Option<String>,
    #[arg(long)]
    sigma2_noise: Option<String>,
    #[arg(long)]
    noise_interval: Option<String>,
    #[arg(long)]
    warmup: Option<String>,
    /// exact or minsum.
    #[arg(long)]
    boxplus: Option<String>,
    /// crc or reencode.
    #[arg(long)]
    stop_check: Option<String>,
    #[arg(long)]
    llr_max: Option<String>,
    /// Comma-separated Eb/N0 points in dB.
    #[arg(long, allow_negative_numbers = true)]
    ebn0: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    ebn0_start: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    ebn0_stop: Option<String>,
    #[arg(long)]
    ebn0_step: Option<String>,
    /// Fixed trials per point (otherwise run to --min-errors).
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    min_errors: Option<String>,
    #[arg(long)]
    max_trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    parallelism: Option<String>,
    /// Results CSV; the .dat mirror is written next to it.
    #[arg(long)]
    output: Option<String>,
    /// Per-iteration trace file.
    #[arg(long)]
    trace: Option<String>,
    /// Trials per point written to the trace.
    #[arg(long)]
    trace_trials: Option<String>,
}

impl SimulateArgs {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let flags = [
            ("n", &self.n),
            ("k", &self.k),
            ("crc_len", &self.crc),
            ("design_ebn0_db", &self.design_db),
            ("code_file", &self.code),
            ("decoders", &self.decoder),
            ("max_iters", &self.max_iters),
            ("reset", &self.reset),
            ("q_max", &self.q_max),
            ("p_range", &self.p_range),
            ("p_level", &self.p_level),
            ("d", &self.d),
            ("n_min", &self.n_min),
            ("sigma2_noise", &self.sigma2_noise),
            ("noise_interval", &self.noise_interval),
            ("warmup", &self.warmup),
            ("boxplus", &self.boxplus),
            ("stop_check", &self.stop_check),
            ("llr_max", &self.llr_max),
            ("ebn0", &self.ebn0),
            ("ebn0_start", &self.ebn0_start),
            ("ebn0_stop", &self.ebn0_stop),
            ("ebn0_step", &self.ebn0_step),
            ("trials", &self.trials),
            ("min_errors", &self.min_errors),
            ("max_trials", &self.max_trials),
            ("seed", &self.seed),
            ("parallelism", &self.parallelism),
            ("output", &self.output),
            ("trace", &self.trace),
            ("trace_trials", &self.trace_trials),
        ];
        flags.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }

    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.apply(k.trim(), v.trim()).map_err(Error::Config)?;
        }
        for (k, v) in self.overrides() {
            cfg.apply(k, v).map_err(|m| Error::Config(format!("--{}: {m}", k.replace('_', "-"))))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Validation problems exit with 1, everything that fails while running
/// with 2.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 2,
        _ => 1,
    }
}

fn construct(n: usize, k: usize, crc: usize, design_db: f64, output: Option<PathBuf>) -> Result<(), Error> {
    polar_bp::CrcConfig::for_length(crc)?;
    let spec = CodeSpec::construct(n, k, crc, design_db)?;
    match &output {
        Some(p) => spec.save(p)?,
        None => print!("{}", spec.to_text()),
    }
    eprintln!(
        "N = {}, K = {} (CRC {}), frozen = {}, R = K/N = {:.6}, energy rate (K-crc)/N = {:.6}",
        spec.block_len,
        spec.k,
        spec.crc_len,
        spec.frozen_count(),
        spec.rate(),
        spec.energy_rate()
    );
    if let Some(p) = output {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<(), Error> {
    let cfg = args.resolve()?;
    if args.print_config {
        print!("{}", cfg.to_text());
        return Ok(());
    }
    let spec = cfg.code()?;
    let crc = cfg.crc(&spec)?;
    let points = cfg.ebn0_points()?;
    let threads = cfg.threads();
    eprintln!(
        "N = {}, K = {}, CRC {}, R = {:.6}, energy rate = {:.6}, {} thread(s)",
        spec.block_len,
        spec.k,
        spec.crc_len,
        spec.rate(),
        spec.energy_rate(),
        threads
    );
    let mut writer = ResultWriter::create(&cfg.output)?;
    let mut trace = match &cfg.trace {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            writeln!(w, "# decoder ebno_db trial iteration schedule_digest decision_digest")?;
            Some(w)
        }
        None => None,
    };
    let trace_trials = if trace.is_some() { cfg.trace_trials } else { 0 };
    for &variant in &cfg.decoders {
        let decoder = Decoder::new(spec.clone(), crc, cfg.params(variant, spec.stages)?)?;
        let mut io_error: Option<std::io::Error> = None;
        let mut on_trial = |db: f64, t: &TrialRecord| {
            let (Some(w), Some(records)) = (trace.as_mut(), t.outcome.iteration_trace.as_ref()) else {
                return;
            };
            for r in records {
                if let Err(e) = writeln!(
                    w,
                    "{variant} {db:.2} {} {} {:016x} {:016x}",
                    t.trial_index, r.iteration, r.schedule_digest, r.decision_digest
                ) {
                    io_error.get_or_insert(e);
                }
            }
        };
        let started = Instant::now();
        let mut on_point = |s: &PointStats| {
            writer.append(s)?;
            let (lo, hi) = s.fer_interval();
            eprintln!(
                "{:>5} {:>6.2} dB  trials {:>8}  FE {:>6}  FER {:.3e} [{:.2e}, {:.2e}]  BER {:.3e}  iters {:.2}  ({:.1?})",
                variant.name(),
                s.ebn0_db(),
                s.trials,
                s.frame_errors,
                s.fer(),
                lo,
                hi,
                s.ber(),
                s.avg_iterations(),
                started.elapsed()
            );
            Ok(())
        };
        sweep(&decoder, &points, cfg.stop_rule(), cfg.seed, threads, trace_trials, &mut on_trial, &mut on_point)?;
        if let Some(e) = io_error {
            return Err(e.into());
        }
    }
    if let Some(mut w) = trace {
        w.flush()?;
    }
    eprintln!("wrote {} and {}", cfg.output.display(), writer.dat_path().display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Construct { n, k, crc, design_db, output } => construct(n, k, crc, design_db, output),
        Command::Simulate(args) => simulate(&args),
        Command::Selftest { corrupt_strides } => {
            let report = selftest::run(&SelftestOptions { corrupt_strides });
            print!("{}", report.render());
            return ExitCode::from(if report.passed() { 0 } else { 1 });
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
