use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::data::{AnnotationSet, PredictionLog, PredictionRecord};
use crate::error::{Error, Result};
use crate::types::{ClassId, Strength};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format_version: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrictRecord {
    run: String,
    s: Strength,
    seed: u64,
    sample: String,
    pred: ClassId,
}

#[derive(Deserialize, Serialize)]
struct LabelLine {
    sample: String,
    label: ClassId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrictLabelLine {
    sample: String,
    label: ClassId,
}

#[derive(Deserialize, Serialize)]
struct LabelsLine {
    sample: String,
    labels: Vec<ClassId>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrictLabelsLine {
    sample: String,
    labels: Vec<ClassId>,
}

/// Non-blank lines with 1-based line numbers, the optional header removed.
fn lines<R: BufRead>(reader: R, source: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if out.is_empty() && i == 0 {
            if let Ok(h) = serde_json::from_str::<Header>(&line) {
                if h.format_version != FORMAT_VERSION {
                    return Err(Error::parse(
                        source,
                        1,
                        format!("unsupported format_version {}", h.format_version),
                    ));
                }
                continue;
            }
        }
        out.push((i + 1, line));
    }
    Ok(out)
}

fn decode<T: DeserializeOwned>(line: &str, source: &str, n: usize) -> Result<T> {
    serde_json::from_str(line).map_err(|e| Error::parse(source, n, e.to_string()))
}

pub fn read_prediction_log<R: BufRead>(reader: R, source: &str, lax: bool) -> Result<PredictionLog> {
    let mut records = Vec::new();
    let mut seen: HashMap<(Strength, u64, String), usize> = HashMap::new();
    for (n, line) in lines(reader, source)? {
        let r: PredictionRecord = if lax {
            decode(&line, source, n)?
        } else {
            let s: StrictRecord = decode(&line, source, n)?;
            PredictionRecord {
                run: s.run,
                strength: s.s,
                seed: s.seed,
                sample: s.sample,
                pred: s.pred,
            }
        };
        if let Some(first) = seen.insert((r.strength, r.seed, r.sample.clone()), n) {
            return Err(Error::parse(
                source,
                n,
                format!(
                    "duplicate record (s={}, seed={}, sample={}), first seen on line {first}",
                    r.strength, r.seed, r.sample
                ),
            ));
        }
        records.push(r);
    }
    PredictionLog::new(records)
}

pub fn write_prediction_log<W: Write + ?Sized>(log: &PredictionLog, w: &mut W) -> Result<()> {
    serde_json::to_writer(&mut *w, &Header { format_version: FORMAT_VERSION })?;
    writeln!(w)?;
    for r in log.records() {
        serde_json::to_writer(&mut *w, r)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_original_labels<R: BufRead>(reader: R, source: &str, lax: bool) -> Result<BTreeMap<String, ClassId>> {
    let mut out = BTreeMap::new();
    for (n, line) in lines(reader, source)? {
        let (sample, label) = if lax {
            let l: LabelLine = decode(&line, source, n)?;
            (l.sample, l.label)
        } else {
            let l: StrictLabelLine = decode(&line, source, n)?;
            (l.sample, l.label)
        };
        if out.insert(sample.clone(), label).is_some() {
            return Err(Error::parse(source, n, format!("sample `{sample}` labelled twice")));
        }
    }
    Ok(out)
}

pub fn read_multilabel<R: BufRead>(
    reader: R,
    source: &str,
    lax: bool,
) -> Result<BTreeMap<String, BTreeSet<ClassId>>> {
    let mut out = BTreeMap::new();
    for (n, line) in lines(reader, source)? {
        let (sample, labels) = if lax {
            let l: LabelsLine = decode(&line, source, n)?;
            (l.sample, l.labels)
        } else {
            let l: StrictLabelsLine = decode(&line, source, n)?;
            (l.sample, l.labels)
        };
        if out.insert(sample.clone(), labels.into_iter().collect()).is_some() {
            return Err(Error::parse(source, n, format!("sample `{sample}` listed twice")));
        }
    }
    Ok(out)
}

pub fn read_annotations(
    original: BTreeMap<String, ClassId>,
    multilabel: Option<BTreeMap<String, BTreeSet<ClassId>>>,
    counts: Option<BTreeMap<ClassId, u64>>,
) -> Result<AnnotationSet> {
    AnnotationSet::new(original, multilabel, counts)
}

pub fn write_original_labels<W: Write + ?Sized>(ann: &AnnotationSet, w: &mut W) -> Result<()> {
    serde_json::to_writer(&mut *w, &Header { format_version: FORMAT_VERSION })?;
    writeln!(w)?;
    for (sample, label) in ann.original() {
        serde_json::to_writer(
            &mut *w,
            &LabelLine {
                sample: sample.clone(),
                label: label.clone(),
            },
        )?;
        writeln!(w)?;
    }
    Ok(())
}

/// Writes the multi-label map; errors when the set has none.
pub fn write_multilabel<W: Write + ?Sized>(ann: &AnnotationSet, w: &mut W) -> Result<()> {
    let ml = ann
        .multilabel()
        .ok_or_else(|| Error::Input("annotation set has no multi-label map".into()))?;
    serde_json::to_writer(&mut *w, &Header { format_version: FORMAT_VERSION })?;
    writeln!(w)?;
    for (sample, labels) in ml {
        serde_json::to_writer(
            &mut *w,
            &LabelsLine {
                sample: sample.clone(),
                labels: labels.iter().cloned().collect(),
            },
        )?;
        writeln!(w)?;
    }
    Ok(())
}
