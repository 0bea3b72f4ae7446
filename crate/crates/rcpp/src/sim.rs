//! BI-AWGN transmission of punctured codewords and Monte-Carlo BLER
//! estimation.
//!
//! Conventions: BPSK maps bit 0 to +1; the channel LLR is `2y/sigma^2`, so
//! positive LLR favors 0. Noise variance is `sigma^2 = 1/(2·R·10^(EbN0/10))`
//! with `R = K/M` over the transmitted length.
//!
//! ```
//! use rcpp::puncture::{derive_source_puncture_set, PuncturingTable};
//! use rcpp::reliability::{construct_ga, select_info_set};
//! use rcpp::sim::{run_bler, CodeConfig, DecoderChoice};
//!
//! let table = PuncturingTable::rqup(64, 20).unwrap();
//! let d = derive_source_puncture_set(&table).unwrap();
//! let rel = construct_ga(&table, 0.8).unwrap();
//! let a = select_info_set(&rel, 22, &d).unwrap();
//! let cfg = CodeConfig::new(table, &a).unwrap();
//! let rec = &run_bler(&cfg, DecoderChoice::Sc, &[3.0], 500, 50, 1).unwrap()[0];
//! assert!(rec.bler >= 0.0 && rec.bler <= 1.0);
//! ```

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::codec::{
    ca_scl_decode, sc_decode, scl_decode, Crc, FrozenSpec, SATURATION_LLR,
};
use crate::error::{Error, Result};
use crate::polar::polar_encode;
use crate::puncture::{derive_source_puncture_set, Mode, PuncturingTable, SourcePunctureSet};
use crate::reliability::InfoSet;

/// A fully specified RCPP code instance: parent code, puncturing table, and
/// information set.
#[derive(Debug, Clone)]
pub struct CodeConfig {
    table: PuncturingTable,
    spec: FrozenSpec,
    punctured_source: SourcePunctureSet,
}

impl CodeConfig {
    /// Binds a puncturing table to an information set. The info set must
    /// avoid the punctured source positions.
    pub fn new(table: PuncturingTable, info_set: &InfoSet) -> Result<Self> {
        if info_set.parent_len() != table.parent_len() {
            return Err(Error::Consistency(format!(
                "info set over N = {} but table over N = {}",
                info_set.parent_len(),
                table.parent_len()
            )));
        }
        if info_set.info_len() > table.transmitted_len() {
            return Err(Error::Capacity(format!(
                "K = {} exceeds M = {}",
                info_set.info_len(),
                table.transmitted_len()
            )));
        }
        let punctured_source = derive_source_puncture_set(&table)?;
        for &i in info_set.info() {
            if punctured_source.contains(i) {
                return Err(Error::Consistency(format!(
                    "info position {i} is a punctured source position"
                )));
            }
        }
        Ok(Self {
            spec: FrozenSpec::from_info_set(info_set),
            table,
            punctured_source,
        })
    }

    pub fn table(&self) -> &PuncturingTable {
        &self.table
    }

    pub fn frozen_spec(&self) -> &FrozenSpec {
        &self.spec
    }

    pub fn punctured_source(&self) -> &SourcePunctureSet {
        &self.punctured_source
    }

    pub fn parent_len(&self) -> usize {
        self.table.parent_len()
    }

    pub fn transmitted_len(&self) -> usize {
        self.table.transmitted_len()
    }

    pub fn info_len(&self) -> usize {
        self.spec.info_len()
    }

    /// Code rate `R = K/M`.
    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.transmitted_len() as f64
    }

    /// Encodes info bits and keeps only the transmitted code bits, in order.
    pub fn encode_punctured(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        let u = self.spec.source_word(info_bits)?;
        let x = polar_encode(&u)?;
        Ok(x.iter()
            .zip(self.table.bits())
            .filter_map(|(&b, &t)| (t == 1).then_some(b))
            .collect())
    }
}

/// Design point: Eb/N0 and rate with the derived noise deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Range(format!("rate {rate} outside (0, 1]")));
        }
        let sigma = (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt();
        Ok(Self { ebn0_db, rate, sigma })
    }
}

/// BPSK over AWGN: `y = (1 - 2x) + n`, returns the LLRs `2y/sigma^2`.
pub fn transmit<R: Rng>(x: &[u8], sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    if sigma <= 0.0 {
        return Err(Error::Range(format!("sigma = {sigma} must be positive")));
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    Ok(x.iter()
        .map(|&b| {
            let y = (1.0 - 2.0 * b as f64) + normal.sample(rng);
            2.0 * y / (sigma * sigma)
        })
        .collect())
}

/// Spreads `M` received LLRs over the parent length: transmitted positions
/// in order, punctured positions 0 (C0) or `+`saturation (C1).
pub fn depuncture_llr(received: &[f64], table: &PuncturingTable) -> Result<Vec<f64>> {
    if received.len() != table.transmitted_len() {
        return Err(Error::Shape(format!(
            "{} LLRs for M = {} transmitted bits",
            received.len(),
            table.transmitted_len()
        )));
    }
    let fill = match table.mode() {
        Mode::C0 => 0.0,
        Mode::C1 => SATURATION_LLR,
    };
    let mut it = received.iter();
    Ok(table
        .bits()
        .iter()
        .map(|&t| if t == 1 { *it.next().unwrap() } else { fill })
        .collect())
}

/// Decoder used for a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoderChoice {
    Sc,
    Scl { list: usize },
    CaScl { list: usize, crc: Crc },
}

/// One Monte-Carlo measurement point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BlerRecord {
    pub ebn0_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    /// Half-width of the 95% Wilson score interval.
    pub ci95: f64,
    pub seed: u64,
}

impl BlerRecord {
    fn from_counts(ebn0_db: f64, trials: u64, errors: u64, seed: u64) -> Self {
        let (_, half) = wilson(errors, trials);
        Self {
            ebn0_db,
            trials,
            errors,
            bler: errors as f64 / trials as f64,
            ci95: half,
            seed,
        }
    }

    /// Lower/upper 95% Wilson bounds on the error probability.
    pub fn ci_bounds(&self) -> (f64, f64) {
        let (center, half) = wilson(self.errors, self.trials);
        ((center - half).max(0.0), (center + half).min(1.0))
    }
}

fn wilson(errors: u64, trials: u64) -> (f64, f64) {
    let z = 1.959963984540054f64;
    let n = trials as f64;
    let p = errors as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    (center, half)
}

/// Default early-stop threshold in block errors.
pub const DEFAULT_MAX_ERRORS: u64 = 100;
/// Default trial cap per point.
pub const DEFAULT_MAX_TRIALS: u64 = 1_000_000;

const BATCH: u64 = 1000;

/// Per-trial RNG stream derived from (master seed, point index, trial index)
/// so results are independent of execution order and thread count.
fn trial_rng(master: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&point.to_le_bytes());
    seed[16..24].copy_from_slice(&trial.to_le_bytes());
    seed[24..32].copy_from_slice(&0x52435050_u64.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

fn run_trial(
    cfg: &CodeConfig,
    decoder: &DecoderChoice,
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> bool {
    let k = cfg.info_len();
    let info: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2u8)).collect();
    let info = match decoder {
        DecoderChoice::CaScl { crc, .. } => {
            // The CRC is carried inside the K info positions.
            let payload = &info[..k - crc.degree()];
            crate::codec::crc_attach(payload, crc)
        }
        _ => info,
    };
    let tx = cfg.encode_punctured(&info).expect("config is validated");
    let received = transmit(&tx, sigma, rng).expect("sigma > 0");
    let llrs = depuncture_llr(&received, cfg.table()).expect("lengths match");
    let decoded = match decoder {
        DecoderChoice::Sc => sc_decode(&llrs, cfg.frozen_spec()).expect("validated").info,
        DecoderChoice::Scl { list } => {
            scl_decode(&llrs, cfg.frozen_spec(), *list).expect("validated")[0]
                .info
                .clone()
        }
        DecoderChoice::CaScl { list, crc } => {
            ca_scl_decode(&llrs, cfg.frozen_spec(), *list, crc)
                .expect("validated")
                .info
        }
    };
    decoded != info
}

/// Monte-Carlo BLER sweep: per Eb/N0 point, encode / puncture / transmit /
/// depuncture / decode until `max_errors` block errors or `max_trials`
/// trials. Identical seeds give bit-identical records.
pub fn run_bler(
    cfg: &CodeConfig,
    decoder: DecoderChoice,
    ebn0_list: &[f64],
    max_trials: u64,
    max_errors: u64,
    seed: u64,
) -> Result<Vec<BlerRecord>> {
    if let DecoderChoice::CaScl { crc, .. } = &decoder {
        if crc.degree() >= cfg.info_len() {
            return Err(Error::Capacity(format!(
                "CRC degree {} leaves no payload in K = {}",
                crc.degree(),
                cfg.info_len()
            )));
        }
    }
    if max_trials == 0 {
        return Err(Error::Range("max_trials must be positive".into()));
    }
    let mut out = Vec::with_capacity(ebn0_list.len());
    for (point, &ebn0_db) in ebn0_list.iter().enumerate() {
        let params = ChannelParams::new(ebn0_db, cfg.rate())?;
        let mut trials = 0u64;
        let mut errors = 0u64;
        while trials < max_trials && errors < max_errors {
            let batch = BATCH.min(max_trials - trials);
            let batch_errors: u64 = (trials..trials + batch)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, point as u64, t);
                    run_trial(cfg, &decoder, params.sigma, &mut rng) as u64
                })
                .sum();
            errors += batch_errors;
            trials += batch;
        }
        out.push(BlerRecord::from_counts(ebn0_db, trials, errors, seed));
    }
    Ok(out)
}
