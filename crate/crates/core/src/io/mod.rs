//! On-disk formats.
//!
//! * prediction logs and label files: JSON Lines, optionally starting with a
//!   `{"format_version":1}` header line;
//! * taxonomy, embeddings and training counts: tab-separated text;
//! * analysis outputs: JSON artifacts that embed a [`RunManifest`].

mod artifact;
mod jsonl;
pub mod report;
mod tsv;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

pub use artifact::{config_hash, file_digest, read_artifact, write_artifact, Artifact, RunManifest, TOOLKIT_VERSION};
pub use jsonl::{
    read_annotations, read_multilabel, read_original_labels, read_prediction_log, write_multilabel,
    write_original_labels, write_prediction_log, FORMAT_VERSION,
};
pub use tsv::{
    read_counts, read_embeddings, read_taxonomy, write_counts, write_embeddings, write_taxonomy,
};

use crate::data::{AnnotationSet, PredictionLog};
use crate::error::Result;
use crate::taxonomy::{EmbeddingTable, TaxonomyTree};

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

/// Reads a JSON Lines prediction log. Unknown fields are rejected unless
/// `lax` is set.
pub fn parse_prediction_log(path: &Path, lax: bool) -> Result<PredictionLog> {
    read_prediction_log(open(path)?, &name(path), lax)
}

pub fn parse_annotations(
    original: &Path,
    multilabel: Option<&Path>,
    counts: Option<&Path>,
    lax: bool,
) -> Result<AnnotationSet> {
    let orig = read_original_labels(open(original)?, &name(original), lax)?;
    let ml = multilabel
        .map(|p| read_multilabel(open(p)?, &name(p), lax))
        .transpose()?;
    let tc = counts.map(|p| read_counts(open(p)?, &name(p))).transpose()?;
    read_annotations(orig, ml, tc)
}

pub fn parse_taxonomy(path: &Path) -> Result<TaxonomyTree> {
    read_taxonomy(open(path)?, &name(path))
}

pub fn parse_embeddings(path: &Path) -> Result<EmbeddingTable> {
    read_embeddings(open(path)?, &name(path))
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}
