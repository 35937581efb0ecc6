//! Flat `key = value` experiment configuration with strict parsing.
//!
//! Every run is fully described by one [`Config`]: unknown or duplicate keys
//! are errors, every value is validated before any trial runs, and the
//! resolved form printed by [`Config::to_text`] parses back to an identical
//! configuration — the text form is the reproducibility contract.

use std::fmt::Write as _;
use std::str::FromStr;

use tpc_core::belief::Scheme;
use tpc_core::codes::{extend_rs, random_linear_code, rs_code, ComponentCode};
use tpc_core::gf::FieldSpec;
use tpc_core::sogrand::PatternMode;

/// Code family of the component code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ReedSolomon,
    RandomLinear,
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rs" => Ok(Family::ReedSolomon),
            "rlc" => Ok(Family::RandomLinear),
            other => Err(format!("unknown code family '{other}' (expected rs or rlc)")),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::ReedSolomon => "rs",
            Family::RandomLinear => "rlc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Ask,
    Qam,
}

impl FromStr for Modulation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ask" => Ok(Modulation::Ask),
            "qam" => Ok(Modulation::Qam),
            other => Err(format!("unknown modulation '{other}' (expected ask or qam)")),
        }
    }
}

impl std::fmt::Display for Modulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Modulation::Ask => "ask",
            Modulation::Qam => "qam",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Additive stationary AR(1) noise, generated directly.
    GaussMarkov,
    /// Unit-memory ISI channel followed by the recursive equalizer.
    Isi,
}

impl FromStr for ChannelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gm" => Ok(ChannelKind::GaussMarkov),
            "isi" => Ok(ChannelKind::Isi),
            other => Err(format!("unknown channel '{other}' (expected gm or isi)")),
        }
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChannelKind::GaussMarkov => "gm",
            ChannelKind::Isi => "isi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    /// Exchange per-cell value probabilities between half-iterations.
    Group,
    /// Exchange per-bit LLRs.
    Bit,
}

impl FromStr for DecodeMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "group" => Ok(DecodeMode::Group),
            "bit" => Ok(DecodeMode::Bit),
            other => Err(format!("unknown decode mode '{other}' (expected group or bit)")),
        }
    }
}

impl std::fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecodeMode::Group => "group",
            DecodeMode::Bit => "bit",
        })
    }
}

/// Resolved experiment configuration. Field defaults are the documented
/// key defaults; `n = 0` and `g = 0` mean "derive from the other keys".
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub seed: u64,
    pub workers: usize,
    pub family: Family,
    pub b: u32,
    pub n: usize,
    pub k: usize,
    pub extended: bool,
    pub code_seed: u64,
    pub modulation: Modulation,
    pub ell: u32,
    pub rho: f64,
    pub channel: ChannelKind,
    pub scheme: Scheme,
    pub mode: DecodeMode,
    pub alpha: f64,
    pub i_max: usize,
    pub n_l: usize,
    pub threshold_t: f64,
    pub n_b: usize,
    pub max_queries: usize,
    pub pattern: PatternMode,
    pub eb_n0_db: Vec<f64>,
    pub min_errors: u64,
    pub max_trials: u64,
    pub g: usize,
    pub samples: usize,
    pub rate: f64,
    pub gs: Vec<usize>,
    pub codes: Vec<(usize, usize)>,
    pub message: Option<String>,
    pub llrs: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            workers: 1,
            family: Family::ReedSolomon,
            b: 3,
            n: 0,
            k: 4,
            extended: false,
            code_seed: 1,
            modulation: Modulation::Ask,
            ell: 1,
            rho: 0.0,
            channel: ChannelKind::GaussMarkov,
            scheme: Scheme::GroupWindow,
            mode: DecodeMode::Group,
            alpha: 0.5,
            i_max: 8,
            n_l: 4,
            threshold_t: 1e-4,
            n_b: 0,
            max_queries: 100_000,
            pattern: PatternMode::Exact,
            eb_n0_db: Vec::new(),
            min_errors: 100,
            max_trials: 1_000_000,
            g: 0,
            samples: 100_000,
            rate: 0.0,
            gs: vec![2, 3, 4],
            codes: vec![(16, 8), (16, 11), (16, 14)],
            message: None,
            llrs: Vec::new(),
        }
    }
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| format!("key '{key}': {e} (got '{value}')"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| parse_one::<T>(key, item.trim()))
        .collect()
}

fn parse_code_list(key: &str, value: &str) -> Result<Vec<(usize, usize)>, String> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| {
            let item = item.trim();
            let (n, k) = item
                .split_once(':')
                .ok_or_else(|| format!("key '{key}': expected n:k, got '{item}'"))?;
            Ok((
                parse_one::<usize>(key, n.trim())?,
                parse_one::<usize>(key, k.trim())?,
            ))
        })
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("key '{key}': expected true or false, got '{other}'")),
    }
}

fn parse_pattern(value: &str) -> Result<PatternMode, String> {
    match value {
        "exact" => Ok(PatternMode::Exact),
        "oneline" => Ok(PatternMode::Oneline),
        other => Err(format!("unknown pattern mode '{other}' (expected exact or oneline)")),
    }
}

impl Config {
    /// Applies one key. Unknown keys are errors — strictness is what makes
    /// config files reproducible.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "seed" => self.seed = parse_one(key, value)?,
            "workers" => self.workers = parse_one(key, value)?,
            "family" => self.family = parse_one(key, value)?,
            "b" => self.b = parse_one(key, value)?,
            "n" => self.n = parse_one(key, value)?,
            "k" => self.k = parse_one(key, value)?,
            "extended" => self.extended = parse_bool(key, value)?,
            "code_seed" => self.code_seed = parse_one(key, value)?,
            "modulation" => self.modulation = parse_one(key, value)?,
            "ell" => self.ell = parse_one(key, value)?,
            "rho" => self.rho = parse_one(key, value)?,
            "channel" => self.channel = parse_one(key, value)?,
            "scheme" => {
                self.scheme = value
                    .parse::<Scheme>()
                    .map_err(|e| format!("key 'scheme': {e} (got '{value}')"))?
            }
            "mode" => self.mode = parse_one(key, value)?,
            "alpha" => self.alpha = parse_one(key, value)?,
            "i_max" => self.i_max = parse_one(key, value)?,
            "n_l" => self.n_l = parse_one(key, value)?,
            "threshold_t" => self.threshold_t = parse_one(key, value)?,
            "n_b" => self.n_b = parse_one(key, value)?,
            "max_queries" => self.max_queries = parse_one(key, value)?,
            "pattern" => self.pattern = parse_pattern(value)?,
            "eb_n0_db" => self.eb_n0_db = parse_list(key, value)?,
            "min_errors" => self.min_errors = parse_one(key, value)?,
            "max_trials" => self.max_trials = parse_one(key, value)?,
            "g" => self.g = parse_one(key, value)?,
            "samples" => self.samples = parse_one(key, value)?,
            "rate" => self.rate = parse_one(key, value)?,
            "gs" => self.gs = parse_list(key, value)?,
            "codes" => self.codes = parse_code_list(key, value)?,
            "message" => self.message = Some(value.to_string()),
            "llrs" => self.llrs = parse_list(key, value)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Parses a whole config text: one `key = value` per line, `#` comments
    /// and blank lines ignored; duplicate keys are errors.
    pub fn parse_str(text: &str) -> Result<Config, String> {
        let mut cfg = Config::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|s| s == key) {
                return Err(format!("line {}: duplicate key '{key}'", lineno + 1));
            }
            seen.push(key.to_string());
            cfg.set(key, value)
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        Ok(cfg)
    }

    /// The resolved text form: every key, sorted, one per line. Parsing this
    /// text yields an equal configuration.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        let mut push = |k: &str, v: String| lines.push(format!("{k} = {v}"));
        push("alpha", fmt_f64(self.alpha));
        push("b", self.b.to_string());
        push("channel", self.channel.to_string());
        push("code_seed", self.code_seed.to_string());
        push(
            "codes",
            self.codes
                .iter()
                .map(|&(n, k)| format!("{n}:{k}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        push("eb_n0_db", join_f64(&self.eb_n0_db));
        push("ell", self.ell.to_string());
        push("extended", self.extended.to_string());
        push("family", self.family.to_string());
        push("g", self.g.to_string());
        push(
            "gs",
            self.gs.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","),
        );
        push("i_max", self.i_max.to_string());
        push("k", self.k.to_string());
        push("llrs", join_f64(&self.llrs));
        push("max_queries", self.max_queries.to_string());
        push("max_trials", self.max_trials.to_string());
        if let Some(m) = &self.message {
            push("message", m.clone());
        }
        push("min_errors", self.min_errors.to_string());
        push("mode", self.mode.to_string());
        push("modulation", self.modulation.to_string());
        push("n", self.n.to_string());
        push("n_b", self.n_b.to_string());
        push("n_l", self.n_l.to_string());
        push(
            "pattern",
            match self.pattern {
                PatternMode::Exact => "exact".to_string(),
                PatternMode::Oneline => "oneline".to_string(),
            },
        );
        push("rate", fmt_f64(self.rate));
        push("rho", fmt_f64(self.rho));
        push("samples", self.samples.to_string());
        push("scheme", self.scheme.to_string());
        push("seed", self.seed.to_string());
        push("threshold_t", fmt_f64(self.threshold_t));
        push("workers", self.workers.to_string());
        let mut out = String::new();
        for line in lines {
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// One-line form of [`Config::to_text`] for CSV comment headers. The
    /// worker count is omitted: it parallelizes the run without affecting
    /// any result, so two tables that differ only in `workers` are the same
    /// experiment and must serialize identically.
    pub fn to_comment(&self) -> String {
        self.to_text()
            .lines()
            .filter(|l| !l.starts_with("workers"))
            .map(|l| l.replace(" = ", "="))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Code length after resolving `n = 0` to the family's natural length.
    pub fn resolved_n(&self) -> usize {
        if self.n != 0 {
            return self.n;
        }
        match self.family {
            Family::ReedSolomon => (1usize << self.b) - 1 + usize::from(self.extended),
            Family::RandomLinear => 0,
        }
    }

    /// Symbols per cell window after resolving `g = 0` to `b / ell`.
    pub fn resolved_g(&self) -> usize {
        if self.g != 0 {
            self.g
        } else {
            (self.b / self.ell.max(1)) as usize
        }
    }

    /// Retained support size per cell; `n_b = 0` keeps everything.
    pub fn resolved_n_b(&self) -> usize {
        if self.n_b == 0 {
            1usize << self.b
        } else {
            self.n_b
        }
    }

    /// Validates the fields every subcommand relies on.
    pub fn validate_common(&self) -> Result<(), String> {
        if self.workers < 1 {
            return Err("workers must be at least 1".into());
        }
        if !(1..=8).contains(&self.b) {
            return Err(format!("b must be in 1..=8, got {}", self.b));
        }
        if self.ell < 1 {
            return Err("ell must be at least 1".into());
        }
        if self.modulation == Modulation::Qam && self.ell % 2 != 0 {
            return Err("qam needs an even number of bits per symbol".into());
        }
        if !(self.rho.abs() < 1.0) {
            return Err(format!("rho must satisfy |rho| < 1, got {}", self.rho));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if self.i_max < 1 {
            return Err("i_max must be at least 1".into());
        }
        if self.n_l < 1 {
            return Err("n_l must be at least 1".into());
        }
        if !(self.threshold_t > 0.0) {
            return Err("threshold_t must be positive".into());
        }
        if self.max_queries < 1 {
            return Err("max_queries must be at least 1".into());
        }
        Ok(())
    }

    /// Builds the configured component code.
    pub fn build_component(&self) -> Result<ComponentCode, String> {
        match self.family {
            Family::ReedSolomon => {
                let field = FieldSpec::new(self.b).map_err(|e| e.to_string())?;
                let code = rs_code(self.k, field).map_err(|e| e.to_string())?;
                let code = if self.extended {
                    extend_rs(&code).map_err(|e| e.to_string())?
                } else {
                    code
                };
                if self.n != 0 && self.n != code.n() {
                    return Err(format!(
                        "n = {} does not match the rs code length {} for b = {}",
                        self.n,
                        code.n(),
                        self.b
                    ));
                }
                Ok(code)
            }
            Family::RandomLinear => {
                if self.b != 1 {
                    return Err("rlc codes are binary: set b = 1".into());
                }
                if self.extended {
                    return Err("extended applies to rs codes only".into());
                }
                if self.n == 0 {
                    return Err("rlc needs an explicit n".into());
                }
                random_linear_code(self.n, self.k, self.code_seed).map_err(|e| e.to_string())
            }
        }
    }
}

fn fmt_f64(v: f64) -> String {
    // Shortest round-trip float formatting keeps the text form lossless.
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

fn join_f64(vs: &[f64]) -> String {
    vs.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}
