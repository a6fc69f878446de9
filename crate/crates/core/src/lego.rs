//! Recursive decomposition of an ultrametric space into scaled simplices.
//!
//! Every internal node is a full simplex at its scale whose vertices are
//! the children; the distance between two leaves is the scale of their
//! lowest common ancestor.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dist::Dist;
use crate::error::Result;
use crate::metric::ensure_ultrametric;
use crate::space::FiniteMetricSpace;
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LegoTree {
    Leaf(String),
    Node { scale: Dist, children: Vec<LegoTree> },
}

/// Splits `subset` at its diameter, children ordered by least id.
fn split(space: &FiniteMetricSpace, subset: &[usize]) -> LegoTree {
    if subset.len() == 1 {
        return LegoTree::Leaf(space.id(subset[0]).to_string());
    }
    let scale = space.diameter_of(subset);
    let mut uf = UnionFind::new(subset.len());
    for a in 0..subset.len() {
        for b in (a + 1)..subset.len() {
            if space.d(subset[a], subset[b]) < &scale {
                uf.union(a, b);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = uf
        .groups()
        .into_iter()
        .map(|g| {
            let mut members: Vec<usize> = g.into_iter().map(|a| subset[a]).collect();
            members.sort_by(|&x, &y| space.id(x).cmp(space.id(y)));
            members
        })
        .collect();
    classes.sort_by(|a, b| space.id(a[0]).cmp(space.id(b[0])));
    let children = classes.iter().map(|c| split(space, c)).collect();
    LegoTree::Node { scale, children }
}

/// Applies the top split recursively until every piece is a point.
pub fn lego_decompose(space: &FiniteMetricSpace) -> Result<LegoTree> {
    ensure_ultrametric(space)?;
    if space.is_empty() {
        return Err(crate::Error::TooFewPoints { needed: 1, got: 0 });
    }
    Ok(split(space, &space.lex_order()))
}

impl LegoTree {
    pub fn scale(&self) -> Dist {
        match self {
            LegoTree::Leaf(_) => Dist::zero(),
            LegoTree::Node { scale, .. } => scale.clone(),
        }
    }

    /// Leaf ids, left to right.
    pub fn leaves(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<String>) {
        match self {
            LegoTree::Leaf(id) => out.push(id.clone()),
            LegoTree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Rebuilds the metric from lowest-common-ancestor scales, points in
    /// leaf order.
    pub fn metric(&self) -> FiniteMetricSpace {
        let leaves = self.leaves();
        let n = leaves.len();
        let mut m = vec![Dist::zero(); n * n];
        self.fill(&mut m, n, &mut 0);
        FiniteMetricSpace::from_fn(leaves, |i, j| m[i * n + j].clone()).expect("leaf ids are distinct")
    }

    /// Writes LCA scales for this subtree, whose leaves start at `*next`.
    fn fill(&self, m: &mut [Dist], n: usize, next: &mut usize) -> std::ops::Range<usize> {
        match self {
            LegoTree::Leaf(_) => {
                *next += 1;
                (*next - 1)..*next
            }
            LegoTree::Node { scale, children } => {
                let ranges: Vec<_> = children.iter().map(|c| c.fill(m, n, next)).collect();
                for (a, ra) in ranges.iter().enumerate() {
                    for rb in &ranges[a + 1..] {
                        for i in ra.clone() {
                            for j in rb.clone() {
                                m[i * n + j] = scale.clone();
                                m[j * n + i] = scale.clone();
                            }
                        }
                    }
                }
                ranges[0].start..ranges[ranges.len() - 1].end
            }
        }
    }

    /// Shape-only form: sorted children, leaves anonymous. Two finite
    /// ultrametric spaces are isometric iff their forms are equal.
    pub fn canonical_form(&self) -> String {
        match self {
            LegoTree::Leaf(_) => "*".to_string(),
            LegoTree::Node { scale, children } => {
                let mut parts: Vec<String> = children.iter().map(LegoTree::canonical_form).collect();
                parts.sort();
                format!("{scale}({})", parts.join(","))
            }
        }
    }

    /// Newick text with scales as internal node labels, e.g. `((a,b)2,c)5;`.
    pub fn newick(&self) -> String {
        let mut out = String::new();
        self.write_newick(&mut out);
        out.push(';');
        out
    }

    fn write_newick(&self, out: &mut String) {
        match self {
            LegoTree::Leaf(id) => out.push_str(&newick_label(id)),
            LegoTree::Node { scale, children } => {
                out.push('(');
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    c.write_newick(out);
                }
                out.push(')');
                out.push_str(&newick_label(&scale.to_string()));
            }
        }
    }

    /// Graphviz rendering; internal nodes carry their scale.
    pub fn dot(&self) -> String {
        let mut out = String::from("graph lego {\n");
        let mut counter = 0usize;
        self.write_dot(&mut out, &mut counter);
        out.push_str("}\n");
        out
    }

    fn write_dot(&self, out: &mut String, counter: &mut usize) -> usize {
        let me = *counter;
        *counter += 1;
        match self {
            LegoTree::Leaf(id) => {
                let _ = writeln!(out, "  n{me} [label={:?}, shape=box];", id);
            }
            LegoTree::Node { scale, children } => {
                let _ = writeln!(out, "  n{me} [label=\"{scale}\"];");
                for c in children {
                    let child = c.write_dot(out, counter);
                    let _ = writeln!(out, "  n{me} -- n{child};");
                }
            }
        }
        me
    }
}

fn newick_label(s: &str) -> String {
    if s.chars().any(|c| "()[]':;, \t".contains(c)) {
        format!("'{}'", s.replace('\'', "''"))
    } else {
        s.to_string()
    }
}
