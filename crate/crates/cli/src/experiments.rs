//! Experiment drivers behind the `tpc` binary.
//!
//! Every driver takes a resolved [`Config`] and produces a CSV table whose
//! first line is a `#` comment repeating the full configuration (minus the
//! worker count, which never affects results). Trials draw their randomness
//! from `substream(seed, point, trial)`, so a table is a pure function of
//! its configuration: reruns and different `--workers` values emit
//! byte-identical files.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use tpc_core::belief::{
    bs_posterior, bs_posterior_qam, bw_posterior, cell_bit_llrs, cell_log_dist_from_group,
    cell_log_dist_from_symbols, gw_posterior, gw_posterior_qam, CellBelief, Scheme,
};
use tpc_core::channel::{
    equalize, equalize_complex, transmit_gm, transmit_gm_complex, transmit_isi,
    transmit_isi_complex, ChannelParams, Constellation,
};
use tpc_core::gf::GfElem;
use tpc_core::inforate::{endogenous_gap_sweep, mc_info_rates, snr_threshold, EndoGap};
use tpc_core::math::log1p_exp;
use tpc_core::product::ProductCode;
use tpc_core::rng::substream;
use tpc_core::sogrand::{sogrand_decode_bits, SisoParams};
use tpc_core::turbo::{turbo_decode_bit, turbo_decode_group, TurboParams};

use crate::config::{ChannelKind, Config, DecodeMode, Modulation};

/// Trials per deterministic accumulation unit.
const BATCH: u64 = 256;
/// Trials between stopping checks (four batches).
const ROUND: u64 = 4 * BATCH;

fn csv_header(cfg: &Config, sub: &str, columns: &str) -> String {
    format!(
        "# tpc {} {} | {}\n{}\n",
        env!("CARGO_PKG_VERSION"),
        sub,
        cfg.to_comment(),
        columns
    )
}

fn constellation(cfg: &Config) -> Result<Constellation<f64>, String> {
    match cfg.modulation {
        Modulation::Ask => Constellation::ask(cfg.ell),
        Modulation::Qam => Constellation::qam(cfg.ell),
    }
    .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Block-error-rate curves
// ---------------------------------------------------------------------------

/// Accumulated result of one Eb/N0 point.
#[derive(Debug, Clone, Copy)]
pub struct BlerRow {
    pub eb_n0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub total_half_iters: u64,
    pub total_queries: u64,
    /// Component decodes behind `total_queries` (half-iterations × lines).
    pub component_decodes: u64,
}

impl BlerRow {
    pub fn bler(&self) -> f64 {
        self.block_errors as f64 / self.trials as f64
    }

    /// Binomial standard error of the block-error estimate.
    pub fn std_err(&self) -> f64 {
        let p = self.bler();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn avg_half_iters(&self) -> f64 {
        self.total_half_iters as f64 / self.trials as f64
    }

    /// Mean guesses per component decode.
    pub fn avg_queries(&self) -> f64 {
        if self.component_decodes == 0 {
            0.0
        } else {
            self.total_queries as f64 / self.component_decodes as f64
        }
    }
}

/// Checks the fields the block-error driver depends on.
pub fn validate_bler(cfg: &Config) -> Result<(), String> {
    cfg.validate_common()?;
    if cfg.eb_n0_db.is_empty() {
        return Err("bler needs at least one eb_n0_db point".into());
    }
    if cfg.b % cfg.ell != 0 {
        return Err(format!(
            "cells of b = {} bits cannot be split into {}-bit labels",
            cfg.b, cfg.ell
        ));
    }
    if cfg.min_errors < 1 {
        return Err("min_errors must be at least 1".into());
    }
    if cfg.max_trials < 1 {
        return Err("max_trials must be at least 1".into());
    }
    let g = cfg.resolved_g();
    if g < 1 {
        return Err("g resolved to zero; set g or raise b".into());
    }
    let spc = (cfg.b / cfg.ell) as usize;
    if cfg.scheme == Scheme::GroupWindow && g != spc {
        return Err(format!(
            "group-window demodulation needs the window to cover exactly one cell \
             (g = b / ell = {spc}), got g = {g}"
        ));
    }
    let code = cfg.build_component()?;
    let n = code.n();
    let total_symbols = n * n * spc;
    if total_symbols % g != 0 {
        return Err(format!(
            "the {total_symbols} symbols of a grid do not split into windows of {g}"
        ));
    }
    if cfg.resolved_n_b() > (1usize << cfg.b) {
        return Err(format!("n_b exceeds the 2^{} cell values", cfg.b));
    }
    Ok(())
}

/// Immutable per-point state shared by all trial workers.
struct BlerContext {
    code: ProductCode,
    c: Constellation<f64>,
    params: ChannelParams<f64>,
    turbo: TurboParams<f64>,
    scheme: Scheme,
    mode: DecodeMode,
    channel: ChannelKind,
    g: usize,
    spc: usize,
    n_b: usize,
    seed: u64,
    point: u64,
}

struct TrialOutcome {
    error: bool,
    half_iters: u64,
    queries: u64,
}

fn turbo_params(cfg: &Config) -> TurboParams<f64> {
    TurboParams {
        alpha: cfg.alpha,
        i_max: cfg.i_max,
        siso: SisoParams {
            n_l: cfg.n_l,
            threshold: cfg.threshold_t,
            max_queries: cfg.max_queries,
            mode: cfg.pattern,
        },
        max_half_iters: None,
    }
}

/// Demodulates one received grid into per-cell log distributions.
fn cell_dists(
    ctx: &BlerContext,
    y_real: Option<&[f64]>,
    y_cplx: Option<&[tpc_core::Complex<f64>]>,
) -> Result<Vec<Vec<f64>>, String> {
    let err = |e: tpc_core::Error| e.to_string();
    match ctx.scheme {
        Scheme::GroupWindow => {
            // One window per cell (validated), so the joint window posterior
            // is exactly the cell distribution.
            let mut dists = Vec::new();
            if let Some(y) = y_real {
                for w in y.chunks(ctx.g) {
                    let gp = gw_posterior(w, &ctx.c, &ctx.params).map_err(err)?;
                    dists.push(cell_log_dist_from_group(&gp).map_err(err)?);
                }
            } else {
                for w in y_cplx.unwrap().chunks(ctx.g) {
                    let gp = gw_posterior_qam(w, &ctx.c, &ctx.params).map_err(err)?;
                    dists.push(cell_log_dist_from_group(&gp).map_err(err)?);
                }
            }
            Ok(dists)
        }
        Scheme::BitWindow => {
            // Window posterior marginalized to symbols, then cells are
            // reassembled from independent symbol marginals.
            let mut sym: Vec<Vec<f64>> = Vec::new();
            if let Some(y) = y_real {
                for w in y.chunks(ctx.g) {
                    let gp = gw_posterior(w, &ctx.c, &ctx.params).map_err(err)?;
                    sym.extend(bw_posterior(&gp));
                }
            } else {
                for w in y_cplx.unwrap().chunks(ctx.g) {
                    let gp = gw_posterior_qam(w, &ctx.c, &ctx.params).map_err(err)?;
                    sym.extend(bw_posterior(&gp));
                }
            }
            sym.chunks(ctx.spc)
                .map(|cell| cell_log_dist_from_symbols(cell).map_err(err))
                .collect()
        }
        Scheme::BitSymbol => {
            let sigma2 = ctx.params.sigma2();
            let mut sym: Vec<Vec<f64>> = Vec::new();
            if let Some(y) = y_real {
                for &yi in y {
                    sym.push(bs_posterior(yi, &ctx.c, sigma2).map_err(err)?);
                }
            } else {
                for &yi in y_cplx.unwrap() {
                    sym.push(bs_posterior_qam(yi, &ctx.c, sigma2).map_err(err)?);
                }
            }
            sym.chunks(ctx.spc)
                .map(|cell| cell_log_dist_from_symbols(cell).map_err(err))
                .collect()
        }
    }
}

fn run_trial(ctx: &BlerContext, trial: u64) -> Result<TrialOutcome, String> {
    let err = |e: tpc_core::Error| e.to_string();
    let mut rng = substream(ctx.seed, ctx.point, trial);
    let code = &ctx.code;
    let k = code.k();
    let m_cell = 1u16 << code.bits_per_cell();

    let msg: Vec<GfElem> = (0..k * k).map(|_| rng.gen_range(0..m_cell)).collect();
    let grid = code.encode_symbols(&msg).map_err(err)?;
    let bits = code.component().symbols_to_bits(&grid);

    let dists = if ctx.c.is_real() {
        let x = ctx.c.modulate_real(&bits).map_err(err)?;
        let y = match ctx.channel {
            ChannelKind::GaussMarkov => transmit_gm(&x, &ctx.params, &mut rng),
            ChannelKind::Isi => {
                equalize(&transmit_isi(&x, &ctx.params, &mut rng), ctx.params.rho)
            }
        };
        cell_dists(ctx, Some(&y), None)?
    } else {
        let x = ctx.c.modulate(&bits).map_err(err)?;
        let y = match ctx.channel {
            ChannelKind::GaussMarkov => transmit_gm_complex(&x, &ctx.params, &mut rng),
            ChannelKind::Isi => equalize_complex(
                &transmit_isi_complex(&x, &ctx.params, &mut rng),
                ctx.params.rho,
            ),
        };
        cell_dists(ctx, None, Some(&y))?
    };

    let (decoded, stats) = match ctx.mode {
        DecodeMode::Group => {
            let beliefs: Vec<CellBelief<f64>> = dists
                .iter()
                .map(|d| CellBelief::from_log_probs(d, ctx.n_b))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            turbo_decode_group(&beliefs, code, &ctx.turbo).map_err(err)?
        }
        DecodeMode::Bit => {
            let mut llrs = Vec::with_capacity(code.grid_bits());
            for d in &dists {
                llrs.extend(cell_bit_llrs(d).map_err(err)?);
            }
            turbo_decode_bit(&llrs, code, &ctx.turbo).map_err(err)?
        }
    };

    Ok(TrialOutcome {
        error: decoded != grid,
        half_iters: stats.half_iterations as u64,
        queries: stats.queries as u64,
    })
}

fn run_batch(ctx: &BlerContext, start: u64, len: u64) -> Result<(u64, u64, u64), String> {
    let mut acc = (0u64, 0u64, 0u64);
    for trial in start..start + len {
        let out = run_trial(ctx, trial)?;
        acc.0 += u64::from(out.error);
        acc.1 += out.half_iters;
        acc.2 += out.queries;
    }
    Ok(acc)
}

/// Runs the block-error experiment for every configured Eb/N0 point.
///
/// Trials are processed in rounds of [`ROUND`]; stopping conditions
/// (`min_errors`, `max_trials`) are evaluated only between rounds so the
/// trial count — and therefore the output — never depends on timing. The
/// final round is truncated to land exactly on `max_trials`.
pub fn run_bler(cfg: &Config) -> Result<Vec<BlerRow>, String> {
    validate_bler(cfg)?;
    let component = cfg.build_component()?;
    let code = ProductCode::new(component);
    let c = constellation(cfg)?;
    let turbo = turbo_params(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| e.to_string())?;

    let mut rows = Vec::with_capacity(cfg.eb_n0_db.len());
    for (point, &db) in cfg.eb_n0_db.iter().enumerate() {
        let params = ChannelParams::from_eb_n0_db(db, code.rate(), cfg.ell, cfg.rho)
            .map_err(|e| e.to_string())?;
        let ctx = BlerContext {
            code: code.clone(),
            c: c.clone(),
            params,
            turbo: turbo.clone(),
            scheme: cfg.scheme,
            mode: cfg.mode,
            channel: cfg.channel,
            g: cfg.resolved_g(),
            spc: (cfg.b / cfg.ell) as usize,
            n_b: cfg.resolved_n_b(),
            seed: cfg.seed,
            point: point as u64,
        };

        let mut trials = 0u64;
        let mut errors = 0u64;
        let mut half_iters = 0u64;
        let mut queries = 0u64;
        loop {
            let round = ROUND.min(cfg.max_trials - trials);
            let mut batches = Vec::new();
            let mut offset = trials;
            let mut left = round;
            while left > 0 {
                let len = BATCH.min(left);
                batches.push((offset, len));
                offset += len;
                left -= len;
            }
            let results: Vec<(u64, u64, u64)> = pool.install(|| {
                batches
                    .par_iter()
                    .map(|&(start, len)| run_batch(&ctx, start, len))
                    .collect::<Result<Vec<_>, String>>()
            })?;
            for (e, h, q) in results {
                errors += e;
                half_iters += h;
                queries += q;
            }
            trials += round;
            if errors >= cfg.min_errors || trials >= cfg.max_trials {
                break;
            }
        }

        rows.push(BlerRow {
            eb_n0_db: db,
            trials,
            block_errors: errors,
            total_half_iters: half_iters,
            total_queries: queries,
            component_decodes: half_iters * code.n() as u64,
        });
    }
    Ok(rows)
}

pub fn bler_csv(cfg: &Config) -> Result<String, String> {
    let rows = run_bler(cfg)?;
    let mut out = csv_header(
        cfg,
        "bler",
        "scheme,mode,eb_n0_db,trials,block_errors,bler,avg_half_iters,avg_queries,std_err",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.3},{},{},{:.6e},{:.3},{:.3},{:.3e}",
            cfg.scheme,
            cfg.mode,
            r.eb_n0_db,
            r.trials,
            r.block_errors,
            r.bler(),
            r.avg_half_iters(),
            r.avg_queries(),
            r.std_err()
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Information rates and thresholds
// ---------------------------------------------------------------------------

pub fn validate_mi(cfg: &Config) -> Result<(), String> {
    cfg.validate_common()?;
    if cfg.eb_n0_db.is_empty() {
        return Err("mi needs at least one eb_n0_db point".into());
    }
    if !(cfg.rate > 0.0 && cfg.rate < 1.0) {
        return Err("mi needs rate in (0, 1) to map Eb/N0 to a noise level".into());
    }
    if cfg.samples < 1000 {
        return Err("samples must be at least 1000".into());
    }
    if cfg.resolved_g() < 1 {
        return Err("g resolved to zero; set g or raise b".into());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct MiRow {
    pub scheme: Scheme,
    pub eb_n0_db: f64,
    pub rate: f64,
    pub std_err: f64,
}

/// Estimates the three achievable rates at every Eb/N0 point. All points
/// reuse the same seed, so curves share their randomness and differences
/// across points are smooth.
pub fn run_mi(cfg: &Config) -> Result<Vec<MiRow>, String> {
    validate_mi(cfg)?;
    let c = constellation(cfg)?;
    let g = cfg.resolved_g();
    let mut rows = Vec::new();
    for &db in &cfg.eb_n0_db {
        let params = ChannelParams::from_eb_n0_db(db, cfg.rate, cfg.ell, cfg.rho)
            .map_err(|e| e.to_string())?;
        let triple = mc_info_rates(&c, cfg.rho, params.sigma2(), g, cfg.samples, cfg.seed)
            .map_err(|e| e.to_string())?;
        for scheme in [Scheme::GroupWindow, Scheme::BitWindow, Scheme::BitSymbol] {
            let est = triple.of(scheme);
            rows.push(MiRow {
                scheme,
                eb_n0_db: db,
                rate: est.value,
                std_err: est.std_error,
            });
        }
    }
    Ok(rows)
}

pub fn mi_csv(cfg: &Config) -> Result<String, String> {
    let rows = run_mi(cfg)?;
    let mut out = csv_header(cfg, "mi", "scheme,eb_n0_db,rate,std_err");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.3},{:.6},{:.3e}",
            r.scheme, r.eb_n0_db, r.rate, r.std_err
        );
    }
    Ok(out)
}

pub fn validate_threshold(cfg: &Config) -> Result<(), String> {
    cfg.validate_common()?;
    if !(cfg.rate > 0.0 && cfg.rate < 1.0) {
        return Err("threshold needs rate in (0, 1)".into());
    }
    if cfg.samples < 1000 {
        return Err("samples must be at least 1000".into());
    }
    if cfg.resolved_g() < 1 {
        return Err("g resolved to zero; set g or raise b".into());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct ThresholdRow {
    pub scheme: Scheme,
    pub threshold_db: f64,
    /// Loss in decibels against the next stronger scheme (`None` for the
    /// group-window reference).
    pub gain_db: Option<f64>,
}

/// Finds the Eb/N0 each scheme needs to support the configured rate. The
/// three searches share one seed, so the reported gaps are paired.
pub fn run_threshold(cfg: &Config) -> Result<Vec<ThresholdRow>, String> {
    validate_threshold(cfg)?;
    let c = constellation(cfg)?;
    let g = cfg.resolved_g();
    let mut t = [0.0f64; 3];
    for (i, scheme) in [Scheme::GroupWindow, Scheme::BitWindow, Scheme::BitSymbol]
        .into_iter()
        .enumerate()
    {
        t[i] = snr_threshold(scheme, &c, cfg.rho, g, cfg.rate, cfg.samples, cfg.seed)
            .map_err(|e| e.to_string())?;
    }
    Ok(vec![
        ThresholdRow {
            scheme: Scheme::GroupWindow,
            threshold_db: t[0],
            gain_db: None,
        },
        ThresholdRow {
            scheme: Scheme::BitWindow,
            threshold_db: t[1],
            gain_db: Some(t[1] - t[0]),
        },
        ThresholdRow {
            scheme: Scheme::BitSymbol,
            threshold_db: t[2],
            gain_db: Some(t[2] - t[1]),
        },
    ])
}

pub fn threshold_csv(cfg: &Config) -> Result<String, String> {
    let rows = run_threshold(cfg)?;
    let mut out = csv_header(cfg, "threshold", "scheme,threshold_db,gain_db");
    for r in rows {
        let gain = r.gain_db.map_or(String::new(), |g| format!("{g:.3}"));
        let _ = writeln!(out, "{},{:.3},{}", r.scheme, r.threshold_db, gain);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Endogenous group-versus-bit gap of short codes
// ---------------------------------------------------------------------------

pub fn validate_endo(cfg: &Config) -> Result<(), String> {
    cfg.validate_common()?;
    if cfg.eb_n0_db.len() != 1 {
        return Err("endo needs exactly one eb_n0_db value".into());
    }
    if cfg.codes.is_empty() {
        return Err("endo needs at least one n:k pair in codes".into());
    }
    if cfg.gs.is_empty() || cfg.gs.iter().any(|&g| g == 0) {
        return Err("gs must list positive window lengths".into());
    }
    if cfg.samples < 1 {
        return Err("samples must be positive".into());
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct EndoRow {
    pub n: usize,
    pub k: usize,
    pub g: usize,
    pub eb_n0_db: f64,
    pub result: EndoGap<f64>,
}

/// Posterior-matched group and bit rates of random linear codes on the
/// binary-input channel, for every configured `(n, k)` and window length.
pub fn run_endo(cfg: &Config) -> Result<Vec<EndoRow>, String> {
    validate_endo(cfg)?;
    let db = cfg.eb_n0_db[0];
    let mut rows = Vec::new();
    for &(n, k) in &cfg.codes {
        let code = random_linear(n, k, cfg.code_seed)?;
        let sweep = endogenous_gap_sweep(&code, db, &cfg.gs, cfg.samples, cfg.seed)
            .map_err(|e| e.to_string())?;
        for (&g, result) in cfg.gs.iter().zip(sweep.per_g) {
            rows.push(EndoRow {
                n,
                k,
                g,
                eb_n0_db: db,
                result,
            });
        }
    }
    Ok(rows)
}

fn random_linear(n: usize, k: usize, seed: u64) -> Result<tpc_core::codes::ComponentCode, String> {
    tpc_core::codes::random_linear_code(n, k, seed).map_err(|e| e.to_string())
}

pub fn endo_csv(cfg: &Config) -> Result<String, String> {
    let rows = run_endo(cfg)?;
    let mut out = csv_header(
        cfg,
        "endo",
        "n,k,g,eb_n0_db,i_group,i_group_se,i_bit,i_bit_se,gap,gap_se",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.3},{:.6},{:.3e},{:.6},{:.3e},{:.6},{:.3e}",
            r.n,
            r.k,
            r.g,
            r.eb_n0_db,
            r.result.group.value,
            r.result.group.std_error,
            r.result.bit.value,
            r.result.bit.std_error,
            r.result.gap.value,
            r.result.gap.std_error
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Single-component debugging: encode and decode one word
// ---------------------------------------------------------------------------

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

fn word_to_string(word: &[GfElem]) -> String {
    word.iter().map(|&s| if s == 0 { '0' } else { '1' }).collect()
}

/// Encodes one component-code message (given as a bit string, or drawn from
/// the seed when absent) and prints the message/codeword pair.
pub fn encode_csv(cfg: &Config) -> Result<String, String> {
    cfg.validate_common()?;
    let code = cfg.build_component()?;
    let msg: Vec<u8> = match &cfg.message {
        Some(text) => {
            if text.len() != code.k_bits() {
                return Err(format!(
                    "message must be {} bits for this code, got {}",
                    code.k_bits(),
                    text.len()
                ));
            }
            text.chars()
                .map(|ch| match ch {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(format!("message must be a bit string, found '{other}'")),
                })
                .collect::<Result<_, _>>()?
        }
        None => {
            let mut rng = substream(cfg.seed, 0, 0);
            (0..code.k_bits()).map(|_| rng.gen_range(0..=1u8)).collect()
        }
    };
    let cw = code.encode_bits(&msg).map_err(|e| e.to_string())?;
    let mut out = csv_header(cfg, "encode", "message,codeword");
    let _ = writeln!(out, "{},{}", bits_to_string(&msg), bits_to_string(&cw));
    Ok(out)
}

/// Runs one soft-input list decode of a binary component code from the
/// channel LLRs in `llrs` and prints the candidate list.
pub fn decode_csv(cfg: &Config) -> Result<String, String> {
    cfg.validate_common()?;
    if cfg.b != 1 {
        return Err("decode works on binary codes: set b = 1".into());
    }
    let code = cfg.build_component()?;
    if cfg.llrs.len() != code.n_bits() {
        return Err(format!(
            "llrs must list {} values for this code, got {}",
            code.n_bits(),
            cfg.llrs.len()
        ));
    }
    let beliefs: Vec<CellBelief<f64>> = cfg
        .llrs
        .iter()
        .map(|&l| {
            CellBelief::from_support(vec![0, 1], vec![-log1p_exp(-l), -log1p_exp(l)])
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let siso = SisoParams {
        n_l: cfg.n_l,
        threshold: cfg.threshold_t,
        max_queries: cfg.max_queries,
        mode: cfg.pattern,
    };
    let soft = sogrand_decode_bits(&beliefs, &code, &siso).map_err(|e| e.to_string())?;
    let mut out = csv_header(cfg, "decode", "entry,codeword,probability");
    out.insert_str(
        out.find('\n').unwrap() + 1,
        &format!("# queries = {}\n", soft.queries),
    );
    for (i, entry) in soft.words.iter().enumerate() {
        let _ = writeln!(out, "{},{},{:.6}", i, word_to_string(&entry.word), entry.app);
    }
    let _ = writeln!(out, "not_in_list,,{:.6}", soft.p_not_in_list);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_bler() -> Config {
        let mut cfg = Config::default();
        cfg.k = 5;
        cfg.eb_n0_db = vec![8.0];
        cfg.max_trials = 256;
        cfg.min_errors = 1_000_000;
        cfg
    }

    #[test]
    fn quiet_channel_decodes_every_block() {
        let rows = run_bler(&base_bler()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].trials, 256);
        assert_eq!(rows[0].block_errors, 0);
        assert!(rows[0].avg_half_iters() <= 2.0 + 1e-12);
        assert!(rows[0].avg_queries() >= 1.0);
    }

    #[test]
    fn worker_count_does_not_change_the_table() {
        let mut a = base_bler();
        a.eb_n0_db = vec![2.0];
        a.k = 4;
        let mut b = a.clone();
        b.workers = 3;
        assert_eq!(bler_csv(&a).unwrap(), bler_csv(&b).unwrap());
    }

    #[test]
    fn memoryless_isi_equals_the_direct_channel_exactly() {
        // At rho = 0 the ISI filter and its equalizer are identities and the
        // innovation variance is the full noise variance, so the two channel
        // paths consume the same draws and give bit-identical tables.
        let mut gm = base_bler();
        gm.k = 4;
        gm.eb_n0_db = vec![2.5];
        let mut isi = gm.clone();
        isi.channel = ChannelKind::Isi;
        let strip = |s: String| {
            s.lines()
                .filter(|l| !l.starts_with('#'))
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(bler_csv(&gm).unwrap()), strip(bler_csv(&isi).unwrap()));
    }

    #[test]
    fn correlated_isi_runs_through_the_equalizer_path() {
        // With memory the two pipelines differ only in the first-sample
        // transient, so error counts stay in the same neighbourhood.
        let mut gm = base_bler();
        gm.k = 4;
        gm.rho = 0.6;
        gm.eb_n0_db = vec![3.0];
        let mut isi = gm.clone();
        isi.channel = ChannelKind::Isi;
        let a = run_bler(&gm).unwrap()[0].block_errors as i64;
        let b = run_bler(&isi).unwrap()[0].block_errors as i64;
        assert!((a - b).abs() <= 3, "gm {a} vs isi {b}");
    }

    #[test]
    fn bler_rejects_inconsistent_windows() {
        let mut cfg = base_bler();
        cfg.g = 2;
        assert!(validate_bler(&cfg).is_err());
        cfg.scheme = Scheme::BitWindow;
        cfg.g = 5;
        assert!(validate_bler(&cfg).is_err());
        cfg.g = 7;
        assert!(validate_bler(&cfg).is_ok());
    }

    #[test]
    fn mi_rows_cover_all_schemes_and_obey_the_ordering() {
        let mut cfg = Config::default();
        cfg.ell = 1;
        cfg.g = 2;
        cfg.rho = 0.75;
        cfg.rate = 0.5;
        cfg.samples = 2000;
        cfg.eb_n0_db = vec![2.0];
        let rows = run_mi(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].rate >= rows[1].rate - 3.0 * rows[1].std_err);
        assert!(rows[1].rate >= rows[2].rate - 3.0 * rows[2].std_err);
    }

    #[test]
    fn encode_produces_a_codeword_and_respects_fixed_messages() {
        let mut cfg = Config::default();
        cfg.k = 5;
        let out = encode_csv(&cfg).unwrap();
        let row = out.lines().last().unwrap();
        let (msg, cw) = row.split_once(',').unwrap();
        assert_eq!(msg.len(), 15);
        assert_eq!(cw.len(), 21);
        let code = cfg.build_component().unwrap();
        let bits: Vec<u8> = cw.bytes().map(|c| c - b'0').collect();
        assert!(code.is_codeword(&bits).unwrap());

        cfg.message = Some(msg.to_string());
        let again = encode_csv(&cfg).unwrap();
        assert_eq!(again.lines().last().unwrap(), row);
        cfg.message = Some("01".into());
        assert!(encode_csv(&cfg).is_err());
    }

    #[test]
    fn decode_lists_the_transmitted_word_first_on_clean_llrs() {
        let mut cfg = Config::default();
        cfg.family = crate::config::Family::RandomLinear;
        cfg.b = 1;
        cfg.n = 16;
        cfg.k = 11;
        let code = cfg.build_component().unwrap();
        let msg = vec![1u8, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0];
        let cw = code.encode_bits(&msg).unwrap();
        cfg.llrs = cw.iter().map(|&b| if b == 0 { 6.0 } else { -6.0 }).collect();
        let out = decode_csv(&cfg).unwrap();
        let first = out
            .lines()
            .find(|l| l.starts_with("0,"))
            .expect("list entry");
        let cw_str: String = cw.iter().map(|&b| char::from(b'0' + b)).collect();
        assert!(first.contains(&cw_str));
        assert!(out.lines().last().unwrap().starts_with("not_in_list"));
    }

    #[test]
    fn tables_carry_the_resolved_config_in_the_comment() {
        let mut cfg = Config::default();
        cfg.k = 5;
        cfg.eb_n0_db = vec![8.0];
        cfg.max_trials = 256;
        let out = bler_csv(&cfg).unwrap();
        let head = out.lines().next().unwrap();
        assert!(head.starts_with("# tpc "));
        assert!(head.contains("k=5"));
        assert!(head.contains("eb_n0_db=8.0"));
        assert!(!head.contains("workers"));
        assert!(out.ends_with('\n'));
    }
}
