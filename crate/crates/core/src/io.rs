//! Space files: JSON documents with exact entries, or CSV matrices.
//!
//! JSON layout:
//!
//! ```json
//! { "points": ["a", "b"], "dist": [[0, "3/2"], ["3/2", 0]] }
//! ```
//!
//! Optional sections name points by id: `projection` (base id per point,
//! with `base` holding the base space), `parts` (id lists), `basepoints`
//! (one id per part), `levels` (one value per part), `labels` (one string
//! per point), and for splicing `fibers` plus `section`. A CSV file has
//! a header row of ids followed by one row per point.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::validate_metric;
use crate::resolution::Resolution;
use crate::space::FiniteMetricSpace;
use crate::splice::SpliceSpec;
use crate::union::CoarseUnion;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    #[serde(default)]
    pub points: Vec<String>,
    #[serde(default)]
    pub dist: Vec<Vec<Dist>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<SpaceDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoints: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Dist>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers: Option<Vec<SpaceDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<Vec<String>>,
}

impl SpaceDoc {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        SpaceDoc { points: space.ids().to_vec(), dist: space.rows(), ..Default::default() }
    }

    /// The matrix as a space; no metric checks beyond shape and ids.
    pub fn space(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::new(self.points.clone(), self.dist.clone())
    }

    pub fn from_resolution(r: &Resolution) -> Self {
        SpaceDoc {
            base: Some(Box::new(SpaceDoc::from_space(&r.base))),
            projection: Some(r.projection.iter().map(|&t| r.base.id(t).to_string()).collect()),
            ..SpaceDoc::from_space(&r.total)
        }
    }

    pub fn from_union(u: &CoarseUnion) -> Self {
        SpaceDoc {
            parts: Some(u.parts.iter().map(|p| p.ids().to_vec()).collect()),
            basepoints: Some((0..u.len()).map(|s| u.total.id(u.basepoint(s)).to_string()).collect()),
            levels: Some(u.levels.clone()),
            ..SpaceDoc::from_space(&u.total)
        }
    }

    /// A union from `parts` (and `basepoints`, `levels` when present)
    /// over this document's matrix. Without levels the parts are
    /// re-spliced with the default stride; with levels the stored total
    /// must match the splice.
    pub fn union(&self) -> Result<CoarseUnion> {
        let space = self.space()?;
        let parts_ids = self.parts.as_ref().ok_or_else(|| Error::InvalidArgument("missing `parts` section".into()))?;
        let parts: Vec<FiniteMetricSpace> =
            parts_ids.iter().map(|ids| space.restrict_ids(ids)).collect::<Result<_>>()?;
        let basepoints = match &self.basepoints {
            None => None,
            Some(b) => {
                if b.len() != parts.len() {
                    return Err(Error::MapLength { expected: parts.len(), got: b.len() });
                }
                Some(b.iter().zip(&parts).map(|(id, p)| p.require(id)).collect::<Result<Vec<_>>>()?)
            }
        };
        match &self.levels {
            None => crate::union::coarse_union(parts, basepoints),
            Some(levels) => {
                let basepoints = basepoints.unwrap_or_else(|| parts.iter().map(|p| p.lex_order()[0]).collect());
                let u = CoarseUnion::with_levels(parts, levels.clone(), basepoints)?;
                if !u.total.same_metric(&space) {
                    return Err(Error::InvalidArgument("stored distances differ from the splice of the parts".into()));
                }
                Ok(u)
            }
        }
    }

    /// Base, fibers and section of a splicing document.
    pub fn splice_spec(&self) -> Result<SpliceSpec> {
        let base = self.base.as_ref().ok_or_else(|| Error::InvalidArgument("missing `base` section".into()))?.space()?;
        let fibers: Vec<FiniteMetricSpace> = self
            .fibers
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("missing `fibers` section".into()))?
            .iter()
            .map(SpaceDoc::space)
            .collect::<Result<_>>()?;
        let section_ids = self.section.as_ref().ok_or_else(|| Error::InvalidArgument("missing `section` section".into()))?;
        if section_ids.len() != fibers.len() {
            return Err(Error::MapLength { expected: fibers.len(), got: section_ids.len() });
        }
        let section = section_ids.iter().zip(&fibers).map(|(id, f)| f.require(id)).collect::<Result<_>>()?;
        SpliceSpec::new(base, fibers, section)
    }

    /// Checks that `projection`, `parts`, `basepoints` and `labels` refer
    /// to listed ids and have matching lengths.
    pub fn check_references(&self) -> Result<()> {
        let known = |id: &String, ids: &[String]| {
            if ids.contains(id) {
                Ok(())
            } else {
                Err(Error::UnknownId(id.clone()))
            }
        };
        if let Some(projection) = &self.projection {
            if projection.len() != self.points.len() {
                return Err(Error::MapLength { expected: self.points.len(), got: projection.len() });
            }
            if let Some(base) = &self.base {
                projection.iter().try_for_each(|id| known(id, &base.points))?;
            }
        }
        if let Some(parts) = &self.parts {
            parts.iter().flatten().try_for_each(|id| known(id, &self.points))?;
        }
        if let Some(basepoints) = &self.basepoints {
            basepoints.iter().try_for_each(|id| known(id, &self.points))?;
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.points.len() {
                return Err(Error::MapLength { expected: self.points.len(), got: labels.len() });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

pub fn parse_json(text: &str) -> Result<SpaceDoc> {
    let doc: SpaceDoc = serde_json::from_str(text)?;
    doc.check_references()?;
    Ok(doc)
}

pub fn parse_csv(text: &str) -> Result<SpaceDoc> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let points: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut dist = Vec::with_capacity(points.len());
    for record in reader.records() {
        let record = record?;
        dist.push(record.iter().map(str::parse::<Dist>).collect::<Result<Vec<_>>>()?);
    }
    Ok(SpaceDoc { points, dist, ..Default::default() })
}

/// JSON unless the path ends in `.csv` or the text does not start with `{`.
pub fn parse_document(path: &Path, text: &str) -> Result<SpaceDoc> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv || !text.trim_start().starts_with('{') {
        parse_csv(text)
    } else {
        parse_json(text)
    }
}

pub fn read_document(path: &Path) -> Result<SpaceDoc> {
    let text = std::fs::read_to_string(path)?;
    parse_document(path, &text)
}

/// Reads a space file; the matrix must be a metric.
pub fn parse_space(path: &Path) -> Result<FiniteMetricSpace> {
    let space = read_document(path)?.space()?;
    require_metric(&space)?;
    Ok(space)
}

pub fn require_metric(space: &FiniteMetricSpace) -> Result<()> {
    let report = validate_metric(space);
    if report.is_empty() {
        Ok(())
    } else {
        Err(Error::NotMetric(report.len()))
    }
}

pub fn to_csv(space: &FiniteMetricSpace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(space.ids()).expect("in-memory write");
    for row in space.rows() {
        w.write_record(row.iter().map(Dist::to_string)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
