use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::taxonomy::{EmbeddingTable, TaxonomyTree, VIRTUAL_ROOT};
use crate::types::ClassId;

/// Yields `(line number, fields)` for data lines; `#` lines go to `directive`.
fn rows<R: BufRead>(
    reader: R,
    source: &str,
    mut directive: impl FnMut(usize, &str) -> Result<()>,
) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            directive(i + 1, rest)?;
            continue;
        }
        let fields: Vec<String> = trimmed.split('\t').map(str::to_string).collect();
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::parse(source, i + 1, "expected two non-empty tab-separated fields"));
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

/// `child<TAB>parent` rows. A `#root<TAB>id` line declares the root; other
/// `#` lines are comments.
pub fn read_taxonomy<R: BufRead>(reader: R, source: &str) -> Result<TaxonomyTree> {
    let mut root: Option<String> = None;
    let data = rows(reader, source, |n, rest| {
        if let Some(id) = rest.strip_prefix("root\t") {
            if root.replace(id.trim().to_string()).is_some() {
                return Err(Error::parse(source, n, "root declared twice"));
            }
        }
        Ok(())
    })?;
    let edges: Vec<(String, String)> = data.into_iter().map(|(_, f)| (f[0].clone(), f[1].clone())).collect();
    TaxonomyTree::from_edges(&edges, root.as_deref())
}

pub fn write_taxonomy<W: Write + ?Sized>(tree: &TaxonomyTree, w: &mut W) -> Result<()> {
    if tree.root() != VIRTUAL_ROOT {
        writeln!(w, "#root\t{}", tree.root())?;
    }
    for (c, p) in tree.edges() {
        if p != VIRTUAL_ROOT {
            writeln!(w, "{c}\t{p}")?;
        }
    }
    Ok(())
}

/// `name<TAB>v1,v2,...` rows.
pub fn read_embeddings<R: BufRead>(reader: R, source: &str) -> Result<EmbeddingTable> {
    let mut vectors = BTreeMap::new();
    for (n, f) in rows(reader, source, |_, _| Ok(()))? {
        let v = f[1]
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(source, n, format!("bad vector component: {e}")))?;
        if vectors.insert(f[0].clone(), v).is_some() {
            return Err(Error::parse(source, n, format!("`{}` listed twice", f[0])));
        }
    }
    EmbeddingTable::new(vectors)
}

pub fn write_embeddings<W: Write + ?Sized>(table: &EmbeddingTable, w: &mut W) -> Result<()> {
    for (k, v) in table.entries() {
        let joined: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{k}\t{}", joined.join(","))?;
    }
    Ok(())
}

/// `class<TAB>count` rows.
pub fn read_counts<R: BufRead>(reader: R, source: &str) -> Result<BTreeMap<ClassId, u64>> {
    let mut out = BTreeMap::new();
    for (n, f) in rows(reader, source, |_, _| Ok(()))? {
        let c: u64 = f[1]
            .trim()
            .parse()
            .map_err(|e| Error::parse(source, n, format!("bad count: {e}")))?;
        if out.insert(ClassId::from(f[0].as_str()), c).is_some() {
            return Err(Error::parse(source, n, format!("`{}` listed twice", f[0])));
        }
    }
    Ok(out)
}

pub fn write_counts<W: Write + ?Sized>(counts: &BTreeMap<ClassId, u64>, w: &mut W) -> Result<()> {
    for (k, c) in counts {
        writeln!(w, "{k}\t{c}")?;
    }
    Ok(())
}
