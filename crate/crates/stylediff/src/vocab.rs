//! Toy integer-id vocabulary.
//!
//! Ids are laid out in fixed blocks so marker sets are disjoint from each
//! other and from content by construction:
//!
//! ```text
//! 0 <pad> | 1 <unk> | 2 <sep> | marker block (C * per_class) | content block
//! ```
//!
//! Content tokens come in synonym classes; swapping a token for another
//! member of its class preserves meaning. Marker tokens carry the attribute
//! ("style") signal: a class-`c` text contains markers of class `c` only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAD: usize = 0;
pub const UNK: usize = 1;
pub const SEP: usize = 2;
const SPECIALS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub marker_classes: usize,
    pub markers_per_class: usize,
    pub content_classes: usize,
    pub synonyms_per_class: usize,
}

impl Vocabulary {
    pub fn new(
        marker_classes: usize,
        markers_per_class: usize,
        content_classes: usize,
        synonyms_per_class: usize,
    ) -> Result<Self> {
        if marker_classes == 0 || markers_per_class == 0 {
            return Err(Error::Config("vocabulary needs at least one marker class with one marker".into()));
        }
        if content_classes == 0 || synonyms_per_class == 0 {
            return Err(Error::Config("vocabulary needs at least one content class with one member".into()));
        }
        Ok(Vocabulary {
            marker_classes,
            markers_per_class,
            content_classes,
            synonyms_per_class,
        })
    }

    pub fn size(&self) -> usize {
        SPECIALS
            + self.marker_classes * self.markers_per_class
            + self.content_classes * self.synonyms_per_class
    }

    fn content_base(&self) -> usize {
        SPECIALS + self.marker_classes * self.markers_per_class
    }

    /// Id of marker `j` of attribute class `c`.
    pub fn marker_id(&self, class: usize, j: usize) -> usize {
        debug_assert!(class < self.marker_classes && j < self.markers_per_class);
        SPECIALS + class * self.markers_per_class + j
    }

    /// Id of synonym `j` of content class `c`.
    pub fn content_id(&self, class: usize, j: usize) -> usize {
        debug_assert!(class < self.content_classes && j < self.synonyms_per_class);
        self.content_base() + class * self.synonyms_per_class + j
    }

    pub fn is_marker(&self, id: usize) -> bool {
        id >= SPECIALS && id < self.content_base()
    }

    pub fn is_content(&self, id: usize) -> bool {
        id >= self.content_base() && id < self.size()
    }

    /// Attribute class of a marker token.
    pub fn marker_class_of(&self, id: usize) -> Option<usize> {
        self.is_marker(id)
            .then(|| (id - SPECIALS) / self.markers_per_class)
    }

    /// Synonym class of a content token.
    pub fn content_class_of(&self, id: usize) -> Option<usize> {
        self.is_content(id)
            .then(|| (id - self.content_base()) / self.synonyms_per_class)
    }

    /// Human-readable rendering for logs and transcripts.
    pub fn render(&self, id: usize) -> String {
        match id {
            PAD => "<pad>".into(),
            UNK => "<unk>".into(),
            SEP => ",".into(),
            _ if self.is_marker(id) => {
                let c = self.marker_class_of(id).unwrap();
                let j = (id - SPECIALS) % self.markers_per_class;
                format!("m{c}.{j}")
            }
            _ if self.is_content(id) => {
                let c = self.content_class_of(id).unwrap();
                let j = (id - self.content_base()) % self.synonyms_per_class;
                format!("w{c}.{j}")
            }
            _ => format!("?{id}"),
        }
    }

    pub fn render_seq(&self, ids: &[usize]) -> String {
        ids.iter()
            .map(|&id| self.render(id))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Multiset of content-class counts in `ids` (markers, separators and
    /// specials are not content).
    pub fn content_class_counts(&self, ids: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.content_classes];
        for &id in ids {
            if let Some(c) = self.content_class_of(id) {
                counts[c] += 1;
            }
        }
        counts
    }
}
