use rand::seq::index::sample;
use serde::Serialize;

use crate::error::{Error, Result};

/// Nats to bits.
pub fn nats_to_bits(nats: f64) -> Result<f64> {
    if nats.is_nan() || nats < 0.0 {
        return Err(Error::InvalidArgument(format!("negative description length {nats}")));
    }
    Ok(nats / std::f64::consts::LN_2)
}

/// Bits needed to spell out the text with a flat code over its vocabulary.
pub fn text_description_length(total_words: u64, unique_words: u64) -> Result<f64> {
    if total_words == 0 {
        return Err(Error::Undefined("text description length of an empty text".into()));
    }
    if unique_words < 2 {
        return Err(Error::Undefined(format!(
            "text description length needs at least 2 distinct words, got {unique_words}"
        )));
    }
    Ok(total_words as f64 * (unique_words as f64).log2())
}

pub fn compression_factor(mdl_bits: f64, tdl_bits: f64) -> Result<f64> {
    if tdl_bits == 0.0 {
        return Err(Error::Undefined("compression factor with zero text length".into()));
    }
    if mdl_bits <= 0.0 || tdl_bits < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "compression factor needs positive lengths, got {mdl_bits} / {tdl_bits}"
        )));
    }
    Ok(mdl_bits / tdl_bits)
}

/// One row of the per-year complexity table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRecord {
    pub year: i32,
    pub n_words: u64,
    pub n_unique: u64,
    pub n_policies: usize,
    #[serde(skip)]
    pub mdl_nats: f64,
    pub mdl_bits: f64,
    pub tdl_bits: f64,
    pub compression_factor: f64,
}

impl ComplexityRecord {
    pub fn new(year: i32, n_words: u64, n_unique: u64, n_policies: usize, mdl_nats: f64) -> Result<Self> {
        let mdl_bits = nats_to_bits(mdl_nats)?;
        let tdl_bits = text_description_length(n_words, n_unique)?;
        Ok(ComplexityRecord {
            year,
            n_words,
            n_unique,
            n_policies,
            mdl_nats,
            mdl_bits,
            tdl_bits,
            compression_factor: compression_factor(mdl_bits, tdl_bits)?,
        })
    }
}

/// Uniform sample of `n` items without replacement, kept in input order.
/// When fewer than `n` items exist all of them are returned along with a
/// warning message.
pub fn sample_policies<T: Clone>(
    items: &[T],
    n: usize,
    seed: u64,
    label: &str,
) -> Result<(Vec<T>, Option<String>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    if items.len() <= n {
        let warning = (items.len() < n)
            .then(|| format!("{label}: only {} policies available, sample size is {n}", items.len()));
        return Ok((items.to_vec(), warning));
    }
    let mut rng = crate::seed::rng_for(seed, &format!("sample:{label}"));
    let mut idx = sample(&mut rng, items.len(), n).into_vec();
    idx.sort_unstable();
    Ok((idx.into_iter().map(|i| items[i].clone()).collect(), None))
}
