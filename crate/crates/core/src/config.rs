//! Flat `key = value` run configuration shared by the config file and the
//! command-line overrides.
//!
//! Blank lines and `#` comments are ignored. Every key is known; a typo is
//! an error that names the line. [`RunConfig::to_text`] writes every set
//! field, so parsing its output yields an identical config.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::code::CodeSpec;
use crate::crc::CrcConfig;
use crate::decoders::{DecoderParams, Variant};
use crate::engine::{BoxplusMode, StopCheck, DEFAULT_LLR_MAX};
use crate::sim::StopRule;
use crate::{Error, Result};

/// Keys accepted by [`RunConfig::apply`], in the order `to_text` writes them.
pub const KEYS: &[&str] = &[
    "n",
    "k",
    "crc_len",
    "design_ebn0_db",
    "code_file",
    "decoders",
    "max_iters",
    "reset",
    "q_max",
    "p_range",
    "p_level",
    "d",
    "n_min",
    "sigma2_noise",
    "noise_interval",
    "warmup",
    "boxplus",
    "stop_check",
    "llr_max",
    "ebn0",
    "ebn0_start",
    "ebn0_stop",
    "ebn0_step",
    "trials",
    "min_errors",
    "max_trials",
    "seed",
    "parallelism",
    "output",
    "trace",
    "trace_trials",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    /// Includes the CRC bits.
    pub k: usize,
    pub crc_len: usize,
    pub design_ebn0_db: f64,
    /// Frozen set read from a file written by `construct`; overrides
    /// `n`, `k`, `crc_len` and `design_ebn0_db`.
    pub code_file: Option<PathBuf>,
    pub decoders: Vec<Variant>,
    pub max_iters: usize,
    pub reset: usize,
    pub q_max: usize,
    /// `None` picks the block-length default.
    pub p_range: Option<usize>,
    pub p_level: Option<usize>,
    pub d: usize,
    pub n_min: usize,
    pub sigma2_noise: f64,
    pub noise_interval: usize,
    pub warmup: usize,
    pub boxplus: BoxplusMode,
    pub stop_check: StopCheck,
    pub llr_max: f64,
    pub ebn0: Option<Vec<f64>>,
    pub ebn0_start: Option<f64>,
    pub ebn0_stop: Option<f64>,
    pub ebn0_step: Option<f64>,
    /// Fixed trial count; when unset the frame-error target applies.
    pub trials: Option<u64>,
    pub min_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    /// `None` uses every available core.
    pub parallelism: Option<usize>,
    pub output: PathBuf,
    pub trace: Option<PathBuf>,
    pub trace_trials: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 128,
            k: 88,
            crc_len: 24,
            design_ebn0_db: 0.0,
            code_file: None,
            decoders: vec![Variant::Bp],
            max_iters: 200,
            reset: 200,
            q_max: 100,
            p_range: None,
            p_level: None,
            d: 8,
            n_min: 4,
            sigma2_noise: 0.36,
            noise_interval: 50,
            warmup: 2,
            boxplus: BoxplusMode::MinSum,
            stop_check: StopCheck::Crc,
            llr_max: DEFAULT_LLR_MAX,
            ebn0: None,
            ebn0_start: None,
            ebn0_stop: None,
            ebn0_step: None,
            trials: None,
            min_errors: 100,
            max_trials: 1_000_000,
            seed: 0,
            parallelism: None,
            output: PathBuf::from("results.csv"),
            trace: None,
            trace_trials: 1,
        }
    }
}

fn num<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}` as a number"))
}

fn finite(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = num(value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{value}` is not finite"))
    }
}

fn list<T>(value: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err("empty list".into());
    }
    items.into_iter().map(f).collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parses a config file's text on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Applies every `key = value` line of `text`; errors carry the 1-based
    /// line number.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected `key = value`, got `{line}`") })?;
            self.apply(key.trim(), value.trim())
                .map_err(|msg| Error::Parse { line: i + 1, msg })?;
        }
        Ok(())
    }

    /// Sets one field. The message names the key on failure.
    pub fn apply(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let r: std::result::Result<(), String> = (|| {
            match key {
                "n" => self.n = num(value)?,
                "k" => self.k = num(value)?,
                "crc_len" => self.crc_len = num(value)?,
                "design_ebn0_db" => self.design_ebn0_db = finite(value)?,
                "code_file" => self.code_file = Some(PathBuf::from(value)),
                "decoders" => {
                    self.decoders = list(value, |s| s.parse::<Variant>().map_err(|e| e.to_string()))?
                }
                "max_iters" => self.max_iters = num(value)?,
                "reset" => self.reset = num(value)?,
                "q_max" => self.q_max = num(value)?,
                "p_range" => self.p_range = Some(num(value)?),
                "p_level" => self.p_level = Some(num(value)?),
                "d" => self.d = num(value)?,
                "n_min" => self.n_min = num(value)?,
                "sigma2_noise" => self.sigma2_noise = finite(value)?,
                "noise_interval" => self.noise_interval = num(value)?,
                "warmup" => self.warmup = num(value)?,
                "boxplus" => self.boxplus = value.parse().map_err(|e: Error| e.to_string())?,
                "stop_check" => {
                    self.stop_check = match value {
                        "crc" => StopCheck::Crc,
                        "reencode" => StopCheck::Reencode,
                        _ => return Err(format!("unknown stop check `{value}` (crc | reencode)")),
                    }
                }
                "llr_max" => self.llr_max = finite(value)?,
                "ebn0" => self.ebn0 = Some(list(value, finite)?),
                "ebn0_start" => self.ebn0_start = Some(finite(value)?),
                "ebn0_stop" => self.ebn0_stop = Some(finite(value)?),
                "ebn0_step" => self.ebn0_step = Some(finite(value)?),
                "trials" => self.trials = Some(num(value)?),
                "min_errors" => self.min_errors = num(value)?,
                "max_trials" => self.max_trials = num(value)?,
                "seed" => self.seed = num(value)?,
                "parallelism" => self.parallelism = Some(num(value)?),
                "output" => self.output = PathBuf::from(value),
                "trace" => self.trace = Some(PathBuf::from(value)),
                "trace_trials" => self.trace_trials = num(value)?,
                _ => return Err(format!("unknown key `{key}`")),
            }
            Ok(())
        })();
        r.map_err(|m| if m.starts_with("unknown key") { m } else { format!("{key}: {m}") })
    }

    /// Every set field as `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        let mut put = |k: &str, v: String| out.push(format!("{k} = {v}"));
        put("n", self.n.to_string());
        put("k", self.k.to_string());
        put("crc_len", self.crc_len.to_string());
        put("design_ebn0_db", self.design_ebn0_db.to_string());
        if let Some(p) = &self.code_file {
            put("code_file", p.display().to_string());
        }
        put("decoders", join(&self.decoders));
        put("max_iters", self.max_iters.to_string());
        put("reset", self.reset.to_string());
        put("q_max", self.q_max.to_string());
        if let Some(v) = self.p_range {
            put("p_range", v.to_string());
        }
        if let Some(v) = self.p_level {
            put("p_level", v.to_string());
        }
        put("d", self.d.to_string());
        put("n_min", self.n_min.to_string());
        put("sigma2_noise", self.sigma2_noise.to_string());
        put("noise_interval", self.noise_interval.to_string());
        put("warmup", self.warmup.to_string());
        put("boxplus", self.boxplus.to_string());
        put(
            "stop_check",
            match self.stop_check {
                StopCheck::Crc => "crc",
                StopCheck::Reencode => "reencode",
            }
            .into(),
        );
        put("llr_max", self.llr_max.to_string());
        if let Some(v) = &self.ebn0 {
            put("ebn0", join(v));
        }
        for (k, v) in [("ebn0_start", self.ebn0_start), ("ebn0_stop", self.ebn0_stop), ("ebn0_step", self.ebn0_step)] {
            if let Some(v) = v {
                put(k, v.to_string());
            }
        }
        if let Some(t) = self.trials {
            put("trials", t.to_string());
        }
        put("min_errors", self.min_errors.to_string());
        put("max_trials", self.max_trials.to_string());
        put("seed", self.seed.to_string());
        if let Some(p) = self.parallelism {
            put("parallelism", p.to_string());
        }
        put("output", self.output.display().to_string());
        if let Some(p) = &self.trace {
            put("trace", p.display().to_string());
        }
        put("trace_trials", self.trace_trials.to_string());
        out.join("\n") + "\n"
    }

    /// The code, either loaded from `code_file` or constructed.
    pub fn code(&self) -> Result<CodeSpec> {
        match &self.code_file {
            Some(p) => CodeSpec::load(p),
            None => CodeSpec::construct(self.n, self.k, self.crc_len, self.design_ebn0_db),
        }
    }

    pub fn crc(&self, spec: &CodeSpec) -> Result<CrcConfig> {
        CrcConfig::for_length(spec.crc_len)
    }

    /// Decoder parameters for `variant`. FP-BP's budget is always
    /// `reset x q_max`; the other variants use `max_iters`.
    pub fn params(&self, variant: Variant, stages: usize) -> Result<DecoderParams> {
        let mut p = DecoderParams::new(variant, stages);
        p.max_iters = self.max_iters;
        p.reset_iters = self.reset;
        p.q_max = self.q_max;
        if variant == Variant::Fpbp {
            p.max_iters = self.reset.checked_mul(self.q_max).ok_or_else(|| {
                Error::InvalidParams("reset x q_max overflows".into())
            })?;
        }
        if let Some(v) = self.p_range {
            p.p_range = v;
        }
        if let Some(v) = self.p_level {
            p.p_level = v;
        }
        p.d = self.d;
        p.n_min = self.n_min;
        p.sigma2_noise = self.sigma2_noise;
        p.noise_interval = self.noise_interval;
        p.warmup = self.warmup;
        p.mode = self.boxplus;
        p.stop = self.stop_check;
        p.llr_max = self.llr_max;
        p.validate(stages)?;
        Ok(p)
    }

    /// The Eb/N0 grid: the explicit list, or `start, start + step, ...`
    /// up to and including `stop` (within a small tolerance).
    pub fn ebn0_points(&self) -> Result<Vec<f64>> {
        let range = [self.ebn0_start, self.ebn0_stop, self.ebn0_step];
        let any_range = range.iter().any(Option::is_some);
        match (&self.ebn0, any_range) {
            (Some(_), true) => Err(Error::Config("give either ebn0 or ebn0_start/stop/step, not both".into())),
            (Some(list), false) => Ok(list.clone()),
            (None, false) => Err(Error::Config("no Eb/N0 points: set ebn0 or ebn0_start/stop/step".into())),
            (None, true) => {
                let [Some(start), Some(stop), Some(step)] = range else {
                    return Err(Error::Config("ebn0_start, ebn0_stop and ebn0_step must all be set".into()));
                };
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(Error::Config(format!("empty Eb/N0 range {start}..{stop} step {step}")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > 10_000 {
                    return Err(Error::Config(format!("Eb/N0 range has {count} points")));
                }
                // round to the 0.01 dB grid the outputs use
                Ok((0..count).map(|i| ((start + i as f64 * step) * 100.0).round() / 100.0).collect())
            }
        }
    }

    pub fn stop_rule(&self) -> StopRule {
        match self.trials {
            Some(t) => StopRule::Trials(t),
            None => StopRule::FrameErrors { min_frame_errors: self.min_errors, max_trials: self.max_trials },
        }
    }

    pub fn threads(&self) -> usize {
        self.parallelism
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    /// Checks everything that can be checked without running: code,
    /// CRC, every decoder's parameters, the grid and the stop rule.
    pub fn validate(&self) -> Result<()> {
        let spec = self.code()?;
        self.crc(&spec)?;
        if self.decoders.is_empty() {
            return Err(Error::Config("no decoders selected".into()));
        }
        for &v in &self.decoders {
            self.params(v, spec.stages)?;
        }
        self.ebn0_points()?;
        self.stop_rule().validate()?;
        if self.parallelism == Some(0) {
            return Err(Error::Config("parallelism must be at least 1".into()));
        }
        Ok(())
    }
}
