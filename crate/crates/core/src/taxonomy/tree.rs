use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Name given to the synthetic root that joins a forest into one tree.
pub const VIRTUAL_ROOT: &str = "<root>";

/// Rooted class taxonomy. The root has depth 1.
#[derive(Clone, Debug)]
pub struct TaxonomyTree {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<u32>,
    root: usize,
}

impl TaxonomyTree {
    /// Builds the tree from `(child, parent)` edges.
    ///
    /// With an explicit `root`, every node must reach it. Without one, a
    /// single parentless node becomes the root; several parentless nodes are
    /// attached to a virtual root named [`VIRTUAL_ROOT`].
    pub fn from_edges<S: AsRef<str>>(edges: &[(S, S)], root: Option<&str>) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |n: &str, names: &mut Vec<String>| -> usize {
            *index.entry(n.to_string()).or_insert_with(|| {
                names.push(n.to_string());
                names.len() - 1
            })
        };
        let mut parent: Vec<Option<usize>> = Vec::new();
        for (c, p) in edges {
            let (c, p) = (c.as_ref(), p.as_ref());
            if c == p {
                return Err(Error::Input(format!("taxonomy node `{c}` is its own parent")));
            }
            let ci = intern(c, &mut names);
            let pi = intern(p, &mut names);
            parent.resize(names.len(), None);
            match parent[ci] {
                Some(old) if old != pi => {
                    return Err(Error::Input(format!(
                        "taxonomy node `{c}` has two parents: `{}` and `{p}`",
                        names[old]
                    )))
                }
                _ => parent[ci] = Some(pi),
            }
        }
        if let Some(r) = root {
            intern(r, &mut names);
            parent.resize(names.len(), None);
        }
        let mut index: HashMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();

        let orphans: Vec<usize> = (0..names.len()).filter(|&i| parent[i].is_none()).collect();
        let root = match root {
            Some(r) => {
                let ri = index[r];
                if parent[ri].is_some() {
                    return Err(Error::Input(format!("declared root `{r}` has a parent")));
                }
                if let Some(&o) = orphans.iter().find(|&&o| o != ri) {
                    return Err(Error::Input(format!(
                        "taxonomy node `{}` does not reach the declared root `{r}`",
                        names[o]
                    )));
                }
                ri
            }
            None if orphans.len() == 1 => orphans[0],
            None => {
                if index.contains_key(VIRTUAL_ROOT) {
                    return Err(Error::Input(format!("`{VIRTUAL_ROOT}` is reserved")));
                }
                names.push(VIRTUAL_ROOT.to_string());
                let vr = names.len() - 1;
                index.insert(VIRTUAL_ROOT.to_string(), vr);
                parent.push(None);
                for o in orphans {
                    parent[o] = Some(vr);
                }
                vr
            }
        };

        let n = names.len();
        let mut children = vec![Vec::new(); n];
        for (c, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(c);
            }
        }
        for ch in &mut children {
            ch.sort_by(|&a, &b| names[a].cmp(&names[b]));
        }
        let mut depth = vec![0u32; n];
        depth[root] = 1;
        let mut stack = vec![root];
        let mut seen = 1usize;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                seen += 1;
                stack.push(c);
            }
        }
        if seen != n {
            let stuck = (0..n).find(|&i| depth[i] == 0).unwrap();
            return Err(Error::Input(format!(
                "taxonomy contains a cycle through `{}`",
                names[stuck]
            )));
        }
        Ok(TaxonomyTree {
            names,
            index,
            parent,
            children,
            depth,
            root,
        })
    }

    pub fn root(&self) -> &str {
        &self.names[self.root]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, node: &str) -> bool {
        self.index.contains_key(node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn parent(&self, node: &str) -> Result<Option<&str>> {
        Ok(self.parent[self.idx(node)?].map(|p| self.names[p].as_str()))
    }

    pub fn children(&self, node: &str) -> Result<Vec<&str>> {
        Ok(self.children[self.idx(node)?]
            .iter()
            .map(|&c| self.names[c].as_str())
            .collect())
    }

    pub fn depth(&self, node: &str) -> Result<u32> {
        Ok(self.depth[self.idx(node)?])
    }

    /// Least common subsumer: the deepest node that is an ancestor of both.
    pub fn lcs(&self, a: &str, b: &str) -> Result<&str> {
        let (mut x, mut y) = (self.idx(a)?, self.idx(b)?);
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].unwrap();
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].unwrap();
        }
        while x != y {
            x = self.parent[x].unwrap();
            y = self.parent[y].unwrap();
        }
        Ok(&self.names[x])
    }

    /// `2 * depth(lcs) / (depth(a) + depth(b))`.
    pub fn wu_palmer(&self, a: &str, b: &str) -> Result<f64> {
        let l = self.depth(self.lcs(a, b)?)?;
        let (da, db) = (self.depth(a)?, self.depth(b)?);
        Ok(2.0 * l as f64 / (da + db) as f64)
    }

    /// `node` and all of its descendants.
    pub fn subtree_members(&self, node: &str) -> Result<BTreeSet<String>> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.idx(node)?];
        while let Some(v) = stack.pop() {
            out.insert(self.names[v].clone());
            stack.extend(&self.children[v]);
        }
        Ok(out)
    }

    /// `(child, parent)` pairs in node order; the inverse of [`Self::from_edges`].
    pub fn edges(&self) -> Vec<(&str, &str)> {
        (0..self.names.len())
            .filter_map(|c| self.parent[c].map(|p| (self.names[c].as_str(), self.names[p].as_str())))
            .collect()
    }

    fn idx(&self, node: &str) -> Result<usize> {
        self.index
            .get(node)
            .copied()
            .ok_or_else(|| Error::MissingNode(node.to_string()))
    }
}
