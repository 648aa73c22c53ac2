//! The zero-shot intelligence score ψ.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetRecord, ReportLine};
use crate::geometry::FigureClass;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoreError {
    #[error("record id '{record}' does not match report id '{report}'")]
    IdMismatch { record: String, report: String },
    #[error("no scorable items")]
    NoScorableItems,
}

pub type Result<T, E = ScoreError> = std::result::Result<T, E>;

/// Count credit: 100 for an exact count, otherwise `25 + 50·min/max`; 0 on a
/// class mismatch.
pub fn attribute_score(target_n: u32, detected_n: u32, class_match: bool) -> f64 {
    if !class_match {
        return 0.0;
    }
    if target_n == detected_n {
        return 100.0;
    }
    let (lo, hi) = (target_n.min(detected_n) as f64, target_n.max(detected_n) as f64);
    25.0 + 50.0 * lo / hi
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemScore {
    pub value: f64,
    /// Count credit before the color gate.
    pub shape_component: f64,
    pub color_ok: bool,
    /// Exception items are set aside for manual review and not aggregated.
    pub excluded: bool,
}

fn linf(a: [u8; 3], b: [u8; 3]) -> f64 {
    (0..3).map(|i| (a[i] as f64 - b[i] as f64).abs()).fold(0.0, f64::max)
}

/// Scores one image against the record that prompted it. A report carrying
/// an error (missing or unreadable image) scores 0.
pub fn score_item(record: &DatasetRecord, report: &ReportLine, color_tol: f64) -> Result<ItemScore> {
    if record.id != report.id {
        return Err(ScoreError::IdMismatch {
            record: record.id.clone(),
            report: report.id.clone(),
        });
    }
    if report.error.is_some() {
        return Ok(ItemScore {
            value: 0.0,
            shape_component: 0.0,
            color_ok: false,
            excluded: false,
        });
    }
    let class_match = report.detected_class.figure_class() == Some(record.class);
    let shape = attribute_score(record.n, report.detected_n, class_match);
    let color_ok = linf(report.dominant_rgb, record.rgb) <= color_tol || linf(report.second_rgb, record.rgb) <= color_tol;
    Ok(ItemScore {
        value: if color_ok { shape } else { 0.0 },
        shape_component: shape,
        color_ok,
        excluded: report.exception,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiScore {
    /// Mean item value per class; classes without scorable items are absent.
    pub per_class: BTreeMap<FigureClass, f64>,
    /// Mean over all scorable items.
    pub overall: f64,
    /// Mean of the per-class values.
    pub class_mean: f64,
    /// Scorable items per class.
    pub counts: BTreeMap<FigureClass, usize>,
    pub items_total: usize,
    pub items_excluded: usize,
}

pub fn aggregate_psi(items: &[(FigureClass, ItemScore)]) -> Result<PsiScore> {
    let mut sums: BTreeMap<FigureClass, (f64, usize)> = BTreeMap::new();
    let mut excluded = 0;
    for (class, item) in items {
        if item.excluded {
            excluded += 1;
            continue;
        }
        let e = sums.entry(*class).or_insert((0.0, 0));
        e.0 += item.value;
        e.1 += 1;
    }
    let scorable: usize = sums.values().map(|s| s.1).sum();
    if scorable == 0 {
        return Err(ScoreError::NoScorableItems);
    }
    let per_class: BTreeMap<FigureClass, f64> = sums.iter().map(|(c, (s, k))| (*c, s / *k as f64)).collect();
    let total: f64 = sums.values().map(|s| s.0).sum();
    Ok(PsiScore {
        overall: total / scorable as f64,
        class_mean: per_class.values().sum::<f64>() / per_class.len() as f64,
        counts: sums.iter().map(|(c, (_, k))| (*c, *k)).collect(),
        per_class,
        items_total: items.len(),
        items_excluded: excluded,
    })
}

/// Contents of the score file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub psi_parallel_lines: Option<f64>,
    pub psi_regular_polygon: Option<f64>,
    pub psi_irregular_polygon: Option<f64>,
    pub psi_overall: f64,
    pub psi_class_mean: f64,
    pub items_total: usize,
    pub items_excluded: usize,
    pub counts: BTreeMap<FigureClass, usize>,
}

impl From<&PsiScore> for ScoreReport {
    fn from(p: &PsiScore) -> Self {
        ScoreReport {
            psi_parallel_lines: p.per_class.get(&FigureClass::ParallelLines).copied(),
            psi_regular_polygon: p.per_class.get(&FigureClass::RegularPolygon).copied(),
            psi_irregular_polygon: p.per_class.get(&FigureClass::IrregularPolygon).copied(),
            psi_overall: p.overall,
            psi_class_mean: p.class_mean,
            items_total: p.items_total,
            items_excluded: p.items_excluded,
            counts: p.counts.clone(),
        }
    }
}

/// Joins reports to records by id and aggregates. Records without a report
/// score 0; reports for unknown ids are ignored.
pub fn score_reports(records: &[DatasetRecord], reports: &[ReportLine], color_tol: f64) -> Result<ScoreReport> {
    let by_id: HashMap<&str, &ReportLine> = reports.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut items = Vec::with_capacity(records.len());
    for rec in records {
        let item = match by_id.get(rec.id.as_str()) {
            Some(rep) => score_item(rec, rep, color_tol)?,
            None => ItemScore {
                value: 0.0,
                shape_component: 0.0,
                color_ok: false,
                excluded: false,
            },
        };
        items.push((rec.class, item));
    }
    aggregate_psi(&items).map(|p| ScoreReport::from(&p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Split;
    use crate::evaluator::DetectedClass;

    fn item(value: f64) -> ItemScore {
        ItemScore {
            value,
            shape_component: value,
            color_ok: true,
            excluded: false,
        }
    }

    fn record() -> DatasetRecord {
        DatasetRecord {
            id: "000001".into(),
            image: "images/000001.png".into(),
            class: FigureClass::RegularPolygon,
            n: 5,
            color: "green".into(),
            rgb: [0, 255, 0],
            split: Split::Train,
            captions: vec![],
            seed: 0,
        }
    }

    fn report(class: DetectedClass, n: u32, rgb: [u8; 3]) -> ReportLine {
        ReportLine {
            id: "000001".into(),
            detected_class: class,
            detected_n: n,
            dominant_rgb: [0, 0, 0],
            second_rgb: rgb,
            color_match: false,
            free_edges: 0,
            exception: false,
            error: None,
        }
    }

    #[test]
    fn partial_scores() {
        assert_eq!(attribute_score(5, 4, true), 65.0);
        assert_eq!(attribute_score(5, 5, true), 100.0);
        assert_eq!(attribute_score(5, 4, false), 0.0);
        assert_eq!(attribute_score(5, 0, true), 25.0);
    }

    #[test]
    fn item_rules() {
        let r = record();
        let exact = score_item(&r, &report(DetectedClass::RegularPolygon, 5, [0, 250, 5]), 20.0).unwrap();
        assert_eq!(exact.value, 100.0);
        let wrong_color = score_item(&r, &report(DetectedClass::RegularPolygon, 5, [255, 0, 0]), 20.0).unwrap();
        assert_eq!(wrong_color.value, 0.0);
        assert_eq!(wrong_color.shape_component, 100.0);
        let confused = score_item(&r, &report(DetectedClass::IrregularPolygon, 5, [0, 255, 0]), 20.0).unwrap();
        assert_eq!(confused.value, 0.0);
        let mut exc = report(DetectedClass::Unknown, 0, [0, 255, 0]);
        exc.exception = true;
        assert!(score_item(&r, &exc, 20.0).unwrap().excluded);
        let mut other = report(DetectedClass::RegularPolygon, 5, [0, 255, 0]);
        other.id = "x".into();
        assert!(matches!(score_item(&r, &other, 20.0), Err(ScoreError::IdMismatch { .. })));
    }

    #[test]
    fn aggregation() {
        let items: Vec<_> = [38.67, 0.0, 56.0, 0.0, 37.33]
            .iter()
            .map(|v| (FigureClass::ParallelLines, item(*v)))
            .collect();
        let p = aggregate_psi(&items).unwrap();
        assert!((p.per_class[&FigureClass::ParallelLines] - 26.4).abs() < 0.005);
        assert!(!p.per_class.contains_key(&FigureClass::RegularPolygon));
        assert_eq!(aggregate_psi(&[]), Err(ScoreError::NoScorableItems));
        let mut ex = item(100.0);
        ex.excluded = true;
        assert_eq!(aggregate_psi(&[(FigureClass::ParallelLines, ex)]), Err(ScoreError::NoScorableItems));
    }

    #[test]
    fn pooled_and_class_means_differ() {
        let items = vec![
            (FigureClass::ParallelLines, item(100.0)),
            (FigureClass::ParallelLines, item(100.0)),
            (FigureClass::RegularPolygon, item(25.0)),
        ];
        let p = aggregate_psi(&items).unwrap();
        assert_eq!(p.overall, 75.0);
        assert_eq!(p.class_mean, 62.5);
    }
}
