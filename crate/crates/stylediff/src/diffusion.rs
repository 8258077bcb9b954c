//! Forward noising on word embeddings, and the renoising step that maps
//! sampled tokens back into the latent chain.
//!
//! Both operations share one arithmetic path: embed the tokens, scale by
//! `sqrt(alpha_bar)` at the requested level, add `sqrt(1 - alpha_bar)`
//! Gaussian noise.

use ndarray::{Array1, Array2};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::schedules::NoiseSchedule;
use crate::tokens::TokenSequence;

/// Frozen `V x D` embedding lookup shared by the forward process, the
/// renoising step and the denoiser input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingTable {
    table: Array2<f64>,
    frozen: bool,
}

impl EmbeddingTable {
    /// Gaussian init with rows normalized to unit norm, so token signal and
    /// unit Gaussian noise are comparable at mid-schedule.
    pub fn init(vocab_size: usize, dim: usize, rng: &mut Rng) -> Self {
        let mut table = Array2::zeros((vocab_size, dim));
        for mut row in table.rows_mut() {
            let mut norm2 = 0.0;
            for v in row.iter_mut() {
                *v = rng.sample::<f64, _>(StandardNormal);
                norm2 += *v * *v;
            }
            let norm = norm2.sqrt().max(1e-12);
            row.mapv_inplace(|v| v / norm);
        }
        EmbeddingTable {
            table,
            frozen: true,
        }
    }

    pub fn from_matrix(table: Array2<f64>, frozen: bool) -> Result<Self> {
        for row in table.rows() {
            let norm2: f64 = row.iter().map(|v| v * v).sum();
            if !norm2.is_finite() || norm2 == 0.0 {
                return Err(Error::Contract(
                    "embedding rows must be finite and nonzero".into(),
                ));
            }
        }
        Ok(EmbeddingTable { table, frozen })
    }

    pub fn vocab_size(&self) -> usize {
        self.table.nrows()
    }

    pub fn dim(&self) -> usize {
        self.table.ncols()
    }

    pub fn frozen(&self) -> bool {
        self.frozen
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.table
    }

    pub fn row(&self, id: usize) -> Array1<f64> {
        self.table.row(id).to_owned()
    }

    /// `L x D` matrix of embedded tokens (pads embed like any token).
    pub fn lookup(&self, seq: &TokenSequence) -> Result<Array2<f64>> {
        seq.check_vocab(self.vocab_size())?;
        let mut out = Array2::zeros((seq.l_max(), self.dim()));
        for (i, &id) in seq.ids().iter().enumerate() {
            out.row_mut(i).assign(&self.table.row(id));
        }
        Ok(out)
    }
}

/// A point on the diffusion chain: `L x D` latent plus its timestep.
#[derive(Debug, Clone)]
pub struct NoisedLatent {
    pub x: Array2<f64>,
    pub t: usize,
}

/// Standard-normal matrix draw.
pub fn gaussian_like(rows: usize, cols: usize, rng: &mut Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample::<f64, _>(StandardNormal))
}

fn noise_to_level(
    tokens: &TokenSequence,
    level: usize,
    sched: &NoiseSchedule,
    table: &EmbeddingTable,
    eps: &Array2<f64>,
) -> Result<NoisedLatent> {
    let alpha_bar = sched.alpha_bar(level)?;
    let embedded = table.lookup(tokens)?;
    if eps.dim() != embedded.dim() {
        return Err(Error::Contract(format!(
            "noise shape {:?} does not match embedding shape {:?}",
            eps.dim(),
            embedded.dim()
        )));
    }
    let signal = alpha_bar.sqrt();
    let noise = (1.0 - alpha_bar).sqrt();
    Ok(NoisedLatent {
        x: &embedded * signal + eps * noise,
        t: level,
    })
}

/// Sample `x_t` for original tokens `w` with explicit noise `eps`.
pub fn forward_noise_with(
    w: &TokenSequence,
    t: usize,
    sched: &NoiseSchedule,
    table: &EmbeddingTable,
    eps: &Array2<f64>,
) -> Result<NoisedLatent> {
    if t == 0 || t > sched.t_total {
        return Err(Error::Domain(format!(
            "forward noise timestep {t} out of range 1..={}",
            sched.t_total
        )));
    }
    noise_to_level(w, t, sched, table, eps)
}

/// Sample `x_t = sqrt(alpha_bar_t) E(w) + sqrt(1 - alpha_bar_t) eps`.
pub fn forward_noise(
    w: &TokenSequence,
    t: usize,
    sched: &NoiseSchedule,
    table: &EmbeddingTable,
    rng: &mut Rng,
) -> Result<NoisedLatent> {
    let eps = gaussian_like(w.l_max(), table.dim(), rng);
    forward_noise_with(w, t, sched, table, &eps)
}

/// Re-embed sampled tokens and noise them to level `t_next`, producing the
/// latent for the next (earlier) reverse step. Same arithmetic as
/// `forward_noise`, with `t_next = 0` allowed (noiseless embedding).
pub fn renoise_with(
    w_hat: &TokenSequence,
    t_next: usize,
    sched: &NoiseSchedule,
    table: &EmbeddingTable,
    eps: &Array2<f64>,
) -> Result<NoisedLatent> {
    if t_next >= sched.t_total {
        return Err(Error::Domain(format!(
            "renoise level {t_next} out of range 0..={}",
            sched.t_total - 1
        )));
    }
    noise_to_level(w_hat, t_next, sched, table, eps)
}

pub fn renoise(
    w_hat: &TokenSequence,
    t_next: usize,
    sched: &NoiseSchedule,
    table: &EmbeddingTable,
    rng: &mut Rng,
) -> Result<NoisedLatent> {
    let eps = gaussian_like(w_hat.l_max(), table.dim(), rng);
    renoise_with(w_hat, t_next, sched, table, &eps)
}
