//! Fixed-length token sequences over the toy integer vocabulary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence of token ids padded to exactly `l_max` positions.
///
/// Pad ids may only appear as a contiguous suffix; the prefix before the
/// first pad is the content. Model inputs always consume the full padded
/// form, metrics and file formats use the content.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenSequence {
    ids: Vec<usize>,
    pad: usize,
}

impl TokenSequence {
    /// Pad `content` out to `l_max`. `content` must not itself contain the
    /// pad id and must fit.
    pub fn from_content(content: &[usize], l_max: usize, pad: usize) -> Result<Self> {
        if content.len() > l_max {
            return Err(Error::Contract(format!(
                "content length {} exceeds l_max {}",
                content.len(),
                l_max
            )));
        }
        if content.contains(&pad) {
            return Err(Error::Contract(
                "content must not contain the pad id".into(),
            ));
        }
        let mut ids = Vec::with_capacity(l_max);
        ids.extend_from_slice(content);
        ids.resize(l_max, pad);
        Ok(TokenSequence { ids, pad })
    }

    /// Build from raw sampled ids: drops every pad (wherever it appears),
    /// left-packs the rest and re-pads. This is the "pads stripped" form of
    /// a model sample, which may legally be empty.
    pub fn from_sampled(raw: &[usize], l_max: usize, pad: usize) -> Result<Self> {
        let content: Vec<usize> = raw.iter().copied().filter(|&id| id != pad).collect();
        if content.len() > l_max {
            return Err(Error::Contract(format!(
                "sampled content length {} exceeds l_max {}",
                content.len(),
                l_max
            )));
        }
        let mut ids = content;
        ids.resize(l_max, pad);
        Ok(TokenSequence { ids, pad })
    }

    /// Full padded view, length `l_max`.
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn l_max(&self) -> usize {
        self.ids.len()
    }

    pub fn pad_id(&self) -> usize {
        self.pad
    }

    /// Tokens before the first pad.
    pub fn content(&self) -> &[usize] {
        &self.ids[..self.content_len()]
    }

    pub fn content_len(&self) -> usize {
        self.ids
            .iter()
            .position(|&id| id == self.pad)
            .unwrap_or(self.ids.len())
    }

    pub fn is_empty_content(&self) -> bool {
        self.content_len() == 0
    }

    /// Per-position "is real content" mask over the padded form.
    pub fn content_mask(&self) -> Vec<bool> {
        let n = self.content_len();
        (0..self.l_max()).map(|i| i < n).collect()
    }

    /// Verify every id is below `vocab_size`.
    pub fn check_vocab(&self, vocab_size: usize) -> Result<()> {
        if let Some(&bad) = self.ids.iter().find(|&&id| id >= vocab_size) {
            return Err(Error::Contract(format!(
                "token id {bad} out of vocabulary (size {vocab_size})"
            )));
        }
        Ok(())
    }
}
