//! Accuracy metrics for parsed output against ground truth.
//!
//! Grouping metrics (GA, FGA) look only at which lines share a template;
//! parsing metrics (PA, FTA) also compare the template strings themselves.
//! Canonicalization collapses whitespace runs; the wildcard spelling is
//! `<*>` throughout and adjacent wildcards are never collapsed.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("line id sets differ: {0}")]
    LineIdMismatch(String),
    #[error("missing column {0:?} in {1}")]
    MissingColumn(&'static str, String),
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-line prediction: a grouping key (lines sharing it form a predicted
/// group) and the rendered template string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub group: String,
    pub template: String,
}

/// Ground-truth templates keyed by line id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    by_line: BTreeMap<u64, String>,
}

impl GroundTruth {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, String)>) -> GroundTruth {
        GroundTruth {
            by_line: pairs.into_iter().collect(),
        }
    }

    /// Load a Loghub-style structured CSV with `LineId` and `EventTemplate`
    /// columns.
    pub fn from_csv_path(path: &Path) -> Result<GroundTruth, EvalError> {
        Ok(GroundTruth {
            by_line: read_template_csv(path)?,
        })
    }

    pub fn len(&self) -> usize {
        self.by_line.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_line.is_empty()
    }

    pub fn lines(&self) -> &BTreeMap<u64, String> {
        &self.by_line
    }
}

/// All metrics for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub ga: f64,
    pub pa: f64,
    pub fga: f64,
    pub fta: f64,
    pub pga: f64,
    pub rga: f64,
    pub predicted_templates: usize,
    pub truth_templates: usize,
    pub wall_seconds: f64,
}

impl EvalReport {
    pub fn to_key_values(&self) -> String {
        format!(
            "GA={:.6}\nPA={:.6}\nFGA={:.6}\nFTA={:.6}\nPGA={:.6}\nRGA={:.6}\n\
             predicted_templates={}\ntruth_templates={}\nwall_seconds={:.3}\n",
            self.ga,
            self.pa,
            self.fga,
            self.fta,
            self.pga,
            self.rga,
            self.predicted_templates,
            self.truth_templates,
            self.wall_seconds
        )
    }

    pub fn csv_header() -> &'static str {
        "GA,PA,FGA,FTA,PGA,RGA,predicted_templates,truth_templates,wall_seconds"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{:.3}",
            self.ga,
            self.pa,
            self.fga,
            self.fta,
            self.pga,
            self.rga,
            self.predicted_templates,
            self.truth_templates,
            self.wall_seconds
        )
    }
}

/// Collapse whitespace runs to single spaces and trim. Wildcards are
/// expected to be spelled `<*>` already; adjacent wildcards stay distinct.
pub fn canonicalize_template(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Compute every metric. Both maps must cover the identical line ids.
pub fn evaluate(
    pred: &BTreeMap<u64, Prediction>,
    truth: &GroundTruth,
) -> Result<EvalReport, EvalError> {
    check_line_ids(pred.keys(), truth)?;
    let ga = grouping_accuracy(pred, truth)?;
    let (pga, rga, fga) = f1_grouping(pred, truth)?;
    let pa = parsing_accuracy(pred, truth)?;
    let fta = f1_template(pred, truth)?;
    let predicted_templates = group_members(pred.iter().map(|(l, p)| (*l, p.group.clone()))).len();
    let truth_templates = group_members(
        truth
            .by_line
            .iter()
            .map(|(l, t)| (*l, canonicalize_template(t))),
    )
    .len();
    Ok(EvalReport {
        ga,
        pa,
        fga,
        fta,
        pga,
        rga,
        predicted_templates,
        truth_templates,
        wall_seconds: 0.0,
    })
}

/// Convenience wrapper for template-string predictions (the group of a line
/// is its canonical template string).
pub fn evaluate_templates(
    pred: &BTreeMap<u64, String>,
    truth: &GroundTruth,
) -> Result<EvalReport, EvalError> {
    let pred: BTreeMap<u64, Prediction> = pred
        .iter()
        .map(|(l, s)| {
            (
                *l,
                Prediction {
                    group: canonicalize_template(s),
                    template: s.clone(),
                },
            )
        })
        .collect();
    evaluate(&pred, truth)
}

fn check_line_ids<'a>(
    pred_lines: impl Iterator<Item = &'a u64>,
    truth: &GroundTruth,
) -> Result<(), EvalError> {
    let pred_ids: Vec<u64> = pred_lines.copied().collect();
    let truth_ids: Vec<u64> = truth.by_line.keys().copied().collect();
    if pred_ids != truth_ids {
        let only_pred = pred_ids.iter().find(|id| !truth.by_line.contains_key(id));
        let only_truth = truth_ids.iter().find(|id| !pred_ids.contains(id));
        return Err(EvalError::LineIdMismatch(format!(
            "{} predicted vs {} truth lines (e.g. prediction-only {:?}, truth-only {:?})",
            pred_ids.len(),
            truth_ids.len(),
            only_pred,
            only_truth
        )));
    }
    Ok(())
}

/// line id -> sorted member list of its group, grouping by key.
fn group_members(items: impl Iterator<Item = (u64, String)>) -> HashMap<String, Vec<u64>> {
    let mut groups: HashMap<String, Vec<u64>> = HashMap::new();
    for (line, key) in items {
        groups.entry(key).or_default().push(line);
    }
    for members in groups.values_mut() {
        members.sort_unstable();
    }
    groups
}

/// Intern each distinct member vector so set equality becomes id equality.
struct GroupIds {
    /// line id -> interned id of the member set of its group
    by_line: HashMap<u64, u32>,
    /// interned id of every group's member set
    group_set_ids: Vec<u32>,
}

fn intern_groups(
    items: impl Iterator<Item = (u64, String)>,
    interner: &mut HashMap<Vec<u64>, u32>,
) -> GroupIds {
    let groups = group_members(items);
    let mut by_line = HashMap::new();
    let mut group_set_ids = Vec::new();
    for members in groups.into_values() {
        let next = interner.len() as u32;
        let set_id = *interner.entry(members.clone()).or_insert(next);
        group_set_ids.push(set_id);
        for line in members {
            by_line.insert(line, set_id);
        }
    }
    GroupIds {
        by_line,
        group_set_ids,
    }
}

/// Fraction of lines whose predicted group contains exactly the same lines
/// as their ground-truth group.
pub fn grouping_accuracy(
    pred: &BTreeMap<u64, Prediction>,
    truth: &GroundTruth,
) -> Result<f64, EvalError> {
    check_line_ids(pred.keys(), truth)?;
    if pred.is_empty() {
        return Ok(1.0);
    }
    let mut interner = HashMap::new();
    let p = intern_groups(
        pred.iter().map(|(l, pr)| (*l, pr.group.clone())),
        &mut interner,
    );
    let t = intern_groups(
        truth
            .by_line
            .iter()
            .map(|(l, s)| (*l, canonicalize_template(s))),
        &mut interner,
    );
    let correct = pred
        .keys()
        .filter(|line| p.by_line.get(line) == t.by_line.get(line))
        .count();
    Ok(correct as f64 / pred.len() as f64)
}

/// Group-level precision, recall, and their harmonic mean. A predicted
/// group is correct when its member set equals some truth group's set.
pub fn f1_grouping(
    pred: &BTreeMap<u64, Prediction>,
    truth: &GroundTruth,
) -> Result<(f64, f64, f64), EvalError> {
    check_line_ids(pred.keys(), truth)?;
    let mut interner = HashMap::new();
    let p = intern_groups(
        pred.iter().map(|(l, pr)| (*l, pr.group.clone())),
        &mut interner,
    );
    let t = intern_groups(
        truth
            .by_line
            .iter()
            .map(|(l, s)| (*l, canonicalize_template(s))),
        &mut interner,
    );
    let truth_sets: std::collections::HashSet<u32> = t.group_set_ids.iter().copied().collect();
    let correct = p
        .group_set_ids
        .iter()
        .filter(|id| truth_sets.contains(id))
        .count();
    let pga = ratio(correct, p.group_set_ids.len());
    let rga = ratio(correct, t.group_set_ids.len());
    Ok((pga, rga, harmonic(pga, rga)))
}

/// Fraction of lines whose predicted template string equals the truth
/// template string after canonicalization.
pub fn parsing_accuracy(
    pred: &BTreeMap<u64, Prediction>,
    truth: &GroundTruth,
) -> Result<f64, EvalError> {
    check_line_ids(pred.keys(), truth)?;
    if pred.is_empty() {
        return Ok(1.0);
    }
    let correct = pred
        .iter()
        .filter(|(line, p)| {
            canonicalize_template(&p.template) == canonicalize_template(&truth.by_line[line])
        })
        .count();
    Ok(correct as f64 / pred.len() as f64)
}

/// Template-level F1: a predicted template counts when its member set
/// equals a truth group's set AND its canonical string equals that group's
/// truth template.
pub fn f1_template(
    pred: &BTreeMap<u64, Prediction>,
    truth: &GroundTruth,
) -> Result<f64, EvalError> {
    check_line_ids(pred.keys(), truth)?;
    let pred_groups = group_members(pred.iter().map(|(l, p)| (*l, p.group.clone())));
    let truth_groups = group_members(
        truth
            .by_line
            .iter()
            .map(|(l, s)| (*l, canonicalize_template(s))),
    );
    let truth_sets: HashMap<&Vec<u64>, &String> = truth_groups
        .iter()
        .map(|(tpl, members)| (members, tpl))
        .collect();
    let mut correct = 0usize;
    for members in pred_groups.values() {
        let Some(truth_template) = truth_sets.get(members) else {
            continue;
        };
        let first = members[0];
        let predicted_template = canonicalize_template(&pred[&first].template);
        if predicted_template == **truth_template {
            correct += 1;
        }
    }
    let precision = ratio(correct, pred_groups.len());
    let recall = ratio(correct, truth_groups.len());
    Ok(harmonic(precision, recall))
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        if num == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Read `LineId -> EventTemplate` from a structured CSV.
pub fn read_template_csv(path: &Path) -> Result<BTreeMap<u64, String>, EvalError> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| EvalError::Csv {
        path: path.display().to_string(),
        source,
    })?;
    let headers = reader
        .headers()
        .map_err(|source| EvalError::Csv {
            path: path.display().to_string(),
            source,
        })?
        .clone();
    let col = |name: &'static str| -> Result<usize, EvalError> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| EvalError::MissingColumn(name, path.display().to_string()))
    };
    let line_col = col("LineId")?;
    let template_col = col("EventTemplate")?;
    let mut out = BTreeMap::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|source| EvalError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        let line_id: u64 = record
            .get(line_col)
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(row_idx as u64 + 1);
        let template = record.get(template_col).unwrap_or("").to_string();
        out.insert(line_id, template);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth(pairs: &[(u64, &str)]) -> GroundTruth {
        GroundTruth::from_pairs(pairs.iter().map(|(l, s)| (*l, s.to_string())))
    }

    fn pred(pairs: &[(u64, &str, &str)]) -> BTreeMap<u64, Prediction> {
        pairs
            .iter()
            .map(|(l, g, t)| {
                (
                    *l,
                    Prediction {
                        group: g.to_string(),
                        template: t.to_string(),
                    },
                )
            })
            .collect()
    }

    #[test]
    fn perfect_prediction_scores_one_everywhere() {
        let t = truth(&[(1, "a <*>"), (2, "a <*>"), (3, "b c")]);
        let p = pred(&[(1, "g1", "a <*>"), (2, "g1", "a <*>"), (3, "g2", "b c")]);
        let report = evaluate(&p, &t).unwrap();
        assert_eq!(
            (report.ga, report.pa, report.fga, report.fta),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert_eq!(report.predicted_templates, 2);
        assert_eq!(report.truth_templates, 2);
    }

    #[test]
    fn ga_splits_cost_messages() {
        // truth groups {1,2} and {3,4}; prediction splits the first
        let t = truth(&[(1, "t1"), (2, "t1"), (3, "t2"), (4, "t2")]);
        let p = pred(&[
            (1, "a", "t1"),
            (2, "b", "t1"),
            (3, "c", "t2"),
            (4, "c", "t2"),
        ]);
        assert_eq!(grouping_accuracy(&p, &t).unwrap(), 0.5);
    }

    #[test]
    fn ga_zero_when_everything_lumped() {
        let t = truth(&[(1, "t1"), (2, "t1"), (3, "t2"), (4, "t2")]);
        let p = pred(&[
            (1, "a", "t1"),
            (2, "a", "t1"),
            (3, "a", "t2"),
            (4, "a", "t2"),
        ]);
        assert_eq!(grouping_accuracy(&p, &t).unwrap(), 0.0);
    }

    #[test]
    fn fga_counts_exact_group_matches() {
        // 3 predicted groups, 2 truth groups, 1 exact set match
        let t = truth(&[(1, "t1"), (2, "t1"), (3, "t2"), (4, "t2")]);
        let p = pred(&[
            (1, "a", "t1"),
            (2, "b", "t1"),
            (3, "c", "t2"),
            (4, "c", "t2"),
        ]);
        let (pga, rga, fga) = f1_grouping(&p, &t).unwrap();
        assert!((pga - 1.0 / 3.0).abs() < 1e-12);
        assert!((rga - 0.5).abs() < 1e-12);
        assert!((fga - 0.4).abs() < 1e-12);
    }

    #[test]
    fn fga_zero_when_no_group_matches() {
        let t = truth(&[(1, "t1"), (2, "t1")]);
        let p = pred(&[(1, "a", "t1"), (2, "b", "t1")]);
        let (pga, rga, fga) = f1_grouping(&p, &t).unwrap();
        assert_eq!((pga, rga, fga), (0.0, 0.0, 0.0));
    }

    #[test]
    fn pa_counts_canonical_string_equality() {
        let t = truth(&[
            (1, "a <*> c"),
            (2, "a <*> c"),
            (3, "a <*> c"),
            (4, "a <*> c"),
        ]);
        let p = pred(&[
            (1, "g", "a  <*>  c"), // whitespace normalizes away
            (2, "g", "a <*> c"),
            (3, "g", "a <*> c"),
            (4, "g", "a b c"), // kept a constant: wrong
        ]);
        assert_eq!(parsing_accuracy(&p, &t).unwrap(), 0.75);
    }

    #[test]
    fn pa_counts_an_unabstracted_constant_as_wrong() {
        let t = truth(&[(1, "Process <*> terminated with exit code <*>")]);
        let p = pred(&[(1, "g", "Process apache2 terminated with exit code <*>")]);
        assert_eq!(parsing_accuracy(&p, &t).unwrap(), 0.0);
    }

    #[test]
    fn fta_requires_both_grouping_and_string() {
        // grouping perfect, one string wrong: that template is excluded
        let t = truth(&[(1, "t1 <*>"), (2, "t1 <*>"), (3, "t2 x")]);
        let p = pred(&[(1, "a", "t1 <*>"), (2, "a", "t1 <*>"), (3, "b", "t2 y")]);
        let fta = f1_template(&p, &t).unwrap();
        // 1 of 2 predicted correct, 1 of 2 truth recalled
        assert!((fta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fta_half_on_two_templates_one_correct() {
        let t = truth(&[(1, "t1"), (2, "t2")]);
        let p = pred(&[(1, "a", "t1"), (2, "b", "wrong")]);
        assert!((f1_template(&p, &t).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn metrics_are_invariant_to_group_relabeling() {
        let t = truth(&[(1, "x <*>"), (2, "x <*>"), (3, "y")]);
        let a = pred(&[(1, "g1", "x <*>"), (2, "g1", "x <*>"), (3, "g2", "y")]);
        let b = pred(&[(1, "zz", "x <*>"), (2, "zz", "x <*>"), (3, "qq", "y")]);
        let ra = evaluate(&a, &t).unwrap();
        let rb = evaluate(&b, &t).unwrap();
        assert_eq!(ra, rb);
    }

    #[test]
    fn line_id_mismatch_is_an_error() {
        let t = truth(&[(1, "t1"), (2, "t1")]);
        let p = pred(&[(1, "a", "t1"), (3, "a", "t1")]);
        assert!(matches!(
            evaluate(&p, &t),
            Err(EvalError::LineIdMismatch(_))
        ));
    }

    #[test]
    fn fta_never_exceeds_fga() {
        let t = truth(&[(1, "t1 <*>"), (2, "t1 <*>"), (3, "t2"), (4, "t3 z")]);
        let p = pred(&[
            (1, "a", "t1 <*>"),
            (2, "a", "t1 mangled"),
            (3, "b", "t2"),
            (4, "c", "wrong z"),
        ]);
        let (_, _, fga) = f1_grouping(&p, &t).unwrap();
        let fta = f1_template(&p, &t).unwrap();
        assert!(fta <= fga + 1e-12);
    }
}
