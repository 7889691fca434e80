//! CSV schemas: landmarks, truth tables, predictions, feature matrices, and
//! augmented sets. Headers are fixed; every emitted file re-parses under the
//! parsers in this module.

use std::collections::BTreeSet;
use std::path::Path;

use cephalo_core::augment::{LabeledSet, Origin};
use cephalo_core::features::{
    ColumnMeta, Family, FeatureMatrix, GrowthClass, GrowthLabel, Tag,
};
use cephalo_core::geometry::{AgeGroup, Cephalogram, LandmarkRegistry, Point};
use cephalo_core::synth::TruthRow;

use crate::error::CliError;

pub const LANDMARK_HEADER: [&str; 6] = ["subject_id", "group", "age_years", "landmark", "x", "y"];
pub const TRUTH_HEADER: [&str; 3] = ["subject_id", "class", "delta"];
pub const PREDICTION_HEADER: [&str; 2] = ["subject_id", "label"];
pub const SWEEP_HEADER: [&str; 4] = ["method", "factor", "mean", "sd"];
pub const STAGE_HEADER: [&str; 7] = ["rank", "model", "feature", "family", "tag", "mean", "sd"];

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::file(path, e.to_string()))
}

fn check_header(
    path: &Path,
    reader: &mut csv::Reader<std::fs::File>,
    expected: &[&str],
) -> Result<(), CliError> {
    let headers = reader
        .headers()
        .map_err(|e| CliError::file(path, e.to_string()))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(CliError::file(
            path,
            format!("header mismatch: expected {expected:?}, got {got:?}"),
        ));
    }
    Ok(())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_f64(
    path: &Path,
    record: &csv::StringRecord,
    idx: usize,
    column: &str,
) -> Result<f64, CliError> {
    let raw = record.get(idx).unwrap_or("");
    let value: f64 = raw.parse().map_err(|_| {
        CliError::csv(
            path,
            record_line(record),
            format!("column {column}: cannot parse {raw:?} as a number"),
        )
    })?;
    if !value.is_finite() {
        return Err(CliError::csv(
            path,
            record_line(record),
            format!("column {column}: value {raw:?} is not finite"),
        ));
    }
    Ok(value)
}

/// Write a cohort in the landmark schema, subjects in id order, groups in
/// 9/12/18 order, landmarks in name order.
pub fn write_landmark_csv(path: &Path, cohort: &[Cephalogram]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    writer
        .write_record(LANDMARK_HEADER)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    let mut ordered: Vec<&Cephalogram> = cohort.iter().collect();
    ordered.sort_by(|a, b| {
        a.subject_id
            .cmp(&b.subject_id)
            .then(a.age_group.cmp(&b.age_group))
    });
    for c in ordered {
        for (name, p) in c.landmarks() {
            writer
                .write_record([
                    c.subject_id.as_str(),
                    c.age_group.label(),
                    &c.age_years.to_string(),
                    name,
                    &p.x.to_string(),
                    &p.y.to_string(),
                ])
                .map_err(|e| CliError::file(path, e.to_string()))?;
        }
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}

/// Parse the landmark schema back into cephalograms, grouped by
/// (subject, group). Duplicate (subject, group, landmark) rows and malformed
/// fields fail with the offending line number.
pub fn parse_landmark_csv(path: &Path) -> Result<Vec<Cephalogram>, CliError> {
    let mut reader = open_reader(path)?;
    check_header(path, &mut reader, &LANDMARK_HEADER)?;
    let mut records: std::collections::BTreeMap<(String, AgeGroup), Cephalogram> =
        std::collections::BTreeMap::new();
    let mut seen: BTreeSet<(String, AgeGroup, String)> = BTreeSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::csv(path, line, e.to_string())
        })?;
        if row.len() != LANDMARK_HEADER.len() {
            return Err(CliError::csv(
                path,
                record_line(&row),
                format!("expected {} fields, got {}", LANDMARK_HEADER.len(), row.len()),
            ));
        }
        let subject = row.get(0).unwrap_or("").to_string();
        if subject.is_empty() {
            return Err(CliError::csv(path, record_line(&row), "empty subject_id"));
        }
        let group_raw = row.get(1).unwrap_or("");
        let group = AgeGroup::parse(group_raw).ok_or_else(|| {
            CliError::csv(
                path,
                record_line(&row),
                format!("column group: {group_raw:?} is not one of 9/12/18"),
            )
        })?;
        let age = parse_f64(path, &row, 2, "age_years")?;
        let landmark = row.get(3).unwrap_or("").to_string();
        if landmark.is_empty() {
            return Err(CliError::csv(path, record_line(&row), "empty landmark name"));
        }
        let x = parse_f64(path, &row, 4, "x")?;
        let y = parse_f64(path, &row, 5, "y")?;

        if !seen.insert((subject.clone(), group, landmark.clone())) {
            return Err(CliError::csv(
                path,
                record_line(&row),
                format!("duplicate landmark {landmark:?} for subject {subject:?} group {group}"),
            ));
        }
        let entry = records
            .entry((subject.clone(), group))
            .or_insert_with(|| Cephalogram::new(subject.clone(), group, age));
        if entry.age_years != age {
            return Err(CliError::csv(
                path,
                record_line(&row),
                format!(
                    "subject {subject:?} group {group}: age {age} disagrees with {}",
                    entry.age_years
                ),
            ));
        }
        entry.set_landmark(landmark, Point::new(x, y));
    }
    Ok(records.into_values().collect())
}

pub fn write_truth_csv(path: &Path, truth: &[TruthRow]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    writer
        .write_record(TRUTH_HEADER)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    for row in truth {
        writer
            .write_record([
                row.subject_id.as_str(),
                row.label.label(),
                &row.delta.to_string(),
            ])
            .map_err(|e| CliError::file(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}

/// Parse a truth table into (subject_id, label, delta) rows.
pub fn parse_truth_csv(path: &Path) -> Result<Vec<(String, GrowthLabel, f64)>, CliError> {
    let mut reader = open_reader(path)?;
    check_header(path, &mut reader, &TRUTH_HEADER)?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            CliError::csv(path, e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let label_raw = row.get(1).unwrap_or("");
        let label = GrowthLabel::parse(label_raw).ok_or_else(|| {
            CliError::csv(
                path,
                record_line(&row),
                format!("column class: unknown label {label_raw:?}"),
            )
        })?;
        let delta = parse_f64(path, &row, 2, "delta")?;
        out.push((row.get(0).unwrap_or("").to_string(), label, delta));
    }
    Ok(out)
}

pub fn write_prediction_csv(
    path: &Path,
    rows: &[(String, GrowthLabel)],
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    writer
        .write_record(PREDICTION_HEADER)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    for (id, label) in rows {
        writer
            .write_record([id.as_str(), label.label()])
            .map_err(|e| CliError::file(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}

pub fn parse_prediction_csv(path: &Path) -> Result<Vec<(String, GrowthLabel)>, CliError> {
    let mut reader = open_reader(path)?;
    check_header(path, &mut reader, &PREDICTION_HEADER)?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            CliError::csv(path, e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let label_raw = row.get(1).unwrap_or("");
        let label = GrowthLabel::parse(label_raw).ok_or_else(|| {
            CliError::csv(
                path,
                record_line(&row),
                format!("column label: unknown label {label_raw:?}"),
            )
        })?;
        out.push((row.get(0).unwrap_or("").to_string(), label));
    }
    Ok(out)
}

/// Encode a feature column as `family|name|tag`; the age column stays `age`.
pub fn encode_column(meta: &ColumnMeta) -> Result<String, CliError> {
    if meta.is_age() {
        return Ok(String::from("age"));
    }
    if meta.name.contains('|') {
        return Err(CliError::Config(format!(
            "feature name {:?} may not contain '|'",
            meta.name
        )));
    }
    Ok(format!(
        "{}|{}|{}",
        meta.family.unwrap().label(),
        meta.name,
        meta.tag.unwrap().label()
    ))
}

pub fn decode_column(encoded: &str) -> Option<ColumnMeta> {
    if encoded == "age" {
        return Some(ColumnMeta::age());
    }
    let mut parts = encoded.splitn(3, '|');
    let family = Family::parse(parts.next()?)?;
    let name = parts.next()?.to_string();
    let tag = Tag::parse(parts.next()?)?;
    Some(ColumnMeta {
        name,
        family: Some(family),
        tag: Some(tag),
    })
}

/// Write a feature matrix: `subject_id`, one column per feature (encoded
/// names), then `label` and `delta` when the matrix is labeled.
pub fn write_feature_csv(path: &Path, matrix: &FeatureMatrix) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut header = vec![String::from("subject_id")];
    for meta in &matrix.columns {
        header.push(encode_column(meta)?);
    }
    if matrix.labels.is_some() {
        header.push(String::from("label"));
        header.push(String::from("delta"));
    }
    writer
        .write_record(&header)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    for (i, row) in matrix.rows.iter().enumerate() {
        let mut record = vec![matrix.subject_ids[i].clone()];
        record.extend(row.iter().map(|v| v.to_string()));
        if let Some(labels) = &matrix.labels {
            record.push(labels[i].label.label().to_string());
            record.push(labels[i].delta.to_string());
        }
        writer
            .write_record(&record)
            .map_err(|e| CliError::file(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}

/// Parse a feature matrix written by [`write_feature_csv`]. Band thresholds
/// are not serialized; the parsed matrix carries labels and deltas only.
pub fn parse_feature_csv(path: &Path) -> Result<FeatureMatrix, CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::file(path, e.to_string()))?
        .clone();
    let fields: Vec<&str> = headers.iter().collect();
    if fields.first() != Some(&"subject_id") {
        return Err(CliError::file(path, "first column must be subject_id"));
    }
    let labeled = fields.ends_with(&["label", "delta"]);
    let feature_fields: &[&str] = if labeled {
        &fields[1..fields.len() - 2]
    } else {
        &fields[1..]
    };
    if feature_fields.is_empty() {
        return Err(CliError::file(path, "no feature columns"));
    }
    let columns: Vec<ColumnMeta> = feature_fields
        .iter()
        .map(|f| {
            decode_column(f).ok_or_else(|| {
                CliError::file(path, format!("cannot decode column header {f:?}"))
            })
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    let mut subject_ids = Vec::new();
    let mut labels: Vec<GrowthClass> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            CliError::csv(path, e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        if row.len() != fields.len() {
            return Err(CliError::csv(
                path,
                record_line(&row),
                format!("expected {} fields, got {}", fields.len(), row.len()),
            ));
        }
        subject_ids.push(row.get(0).unwrap_or("").to_string());
        let mut values = Vec::with_capacity(columns.len());
        for (j, field) in feature_fields.iter().enumerate() {
            values.push(parse_f64(path, &row, j + 1, field)?);
        }
        rows.push(values);
        if labeled {
            let label_idx = fields.len() - 2;
            let label_raw = row.get(label_idx).unwrap_or("");
            let label = GrowthLabel::parse(label_raw).ok_or_else(|| {
                CliError::csv(
                    path,
                    record_line(&row),
                    format!("column label: unknown label {label_raw:?}"),
                )
            })?;
            let delta = parse_f64(path, &row, fields.len() - 1, "delta")?;
            labels.push(GrowthClass { label, delta });
        }
    }
    Ok(FeatureMatrix {
        columns,
        rows,
        subject_ids,
        labels: labeled.then_some(labels),
        thresholds: None,
    })
}

/// Write an augmented set: feature columns (encoded names), label, origin.
pub fn write_augmented_csv(
    path: &Path,
    set: &LabeledSet,
    columns: &[ColumnMeta],
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut header: Vec<String> = columns
        .iter()
        .map(encode_column)
        .collect::<Result<_, _>>()?;
    header.push(String::from("label"));
    header.push(String::from("origin"));
    writer
        .write_record(&header)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    for i in 0..set.len() {
        let mut record: Vec<String> = set.points[i].iter().map(|v| v.to_string()).collect();
        record.push(set.labels[i].label().to_string());
        record.push(set.origin[i].label().to_string());
        writer
            .write_record(&record)
            .map_err(|e| CliError::file(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}

/// Parse an augmented set back into a labeled set plus its column metadata.
pub fn parse_augmented_csv(path: &Path) -> Result<(LabeledSet, Vec<ColumnMeta>), CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::file(path, e.to_string()))?
        .clone();
    let fields: Vec<&str> = headers.iter().collect();
    if !fields.ends_with(&["label", "origin"]) || fields.len() < 3 {
        return Err(CliError::file(
            path,
            "augmented CSV must end with label and origin columns",
        ));
    }
    let feature_fields = &fields[..fields.len() - 2];
    let columns: Vec<ColumnMeta> = feature_fields
        .iter()
        .map(|f| {
            decode_column(f)
                .ok_or_else(|| CliError::file(path, format!("cannot decode column header {f:?}")))
        })
        .collect::<Result<_, _>>()?;
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut origin = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            CliError::csv(path, e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let mut values = Vec::with_capacity(columns.len());
        for (j, field) in feature_fields.iter().enumerate() {
            values.push(parse_f64(path, &row, j, field)?);
        }
        points.push(values);
        let label_raw = row.get(fields.len() - 2).unwrap_or("");
        labels.push(GrowthLabel::parse(label_raw).ok_or_else(|| {
            CliError::csv(
                path,
                record_line(&row),
                format!("column label: unknown label {label_raw:?}"),
            )
        })?);
        let origin_raw = row.get(fields.len() - 1).unwrap_or("");
        origin.push(Origin::parse(origin_raw).ok_or_else(|| {
            CliError::csv(
                path,
                record_line(&row),
                format!("column origin: unknown origin {origin_raw:?}"),
            )
        })?);
    }
    Ok((
        LabeledSet {
            points,
            labels,
            origin,
        },
        columns,
    ))
}

/// Parse a landmark registry file: one landmark name per line, optionally
/// ending in the token `required`; `#` starts a comment.
pub fn parse_registry(path: &Path) -> Result<LandmarkRegistry, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut entries = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.strip_suffix("required") {
            Some(rest) if rest.ends_with(char::is_whitespace) => {
                entries.push((rest.trim_end().to_string(), true));
            }
            _ => entries.push((line.to_string(), false)),
        }
    }
    if entries.is_empty() {
        return Err(CliError::file(path, "registry file lists no landmarks"));
    }
    Ok(LandmarkRegistry::new(entries))
}

pub fn write_registry(path: &Path, registry: &LandmarkRegistry) -> Result<(), CliError> {
    let mut text = String::new();
    for (name, required) in registry.entries() {
        text.push_str(name);
        if required {
            text.push_str(" required");
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use cephalo_core::synth::{default_registry, generate_cohort, CohortConfig};

    #[test]
    fn landmark_roundtrip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("landmarks.csv");
        let cfg = CohortConfig {
            n_subjects: 6,
            seed: 3,
            ..CohortConfig::default()
        };
        let (cohort, _) = generate_cohort(&cfg).unwrap();
        write_landmark_csv(&path, &cohort).unwrap();
        let parsed = parse_landmark_csv(&path).unwrap();
        assert_eq!(parsed, cohort);
    }

    #[test]
    fn header_only_file_is_an_empty_collection() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "subject_id,group,age_years,landmark,x,y\n").unwrap();
        assert_eq!(parse_landmark_csv(&path).unwrap(), vec![]);
    }

    #[test]
    fn non_numeric_coordinate_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(
            &path,
            "subject_id,group,age_years,landmark,x,y\ns1,9,9.1,Sella,oops,2.0\n",
        )
        .unwrap();
        match parse_landmark_csv(&path) {
            Err(CliError::Csv { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("column x"), "{message}");
            }
            other => panic!("expected csv error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_landmark_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.csv");
        std::fs::write(
            &path,
            "subject_id,group,age_years,landmark,x,y\n\
             s1,9,9.1,Sella,0,0\n\
             s1,9,9.1,Sella,1,1\n",
        )
        .unwrap();
        match parse_landmark_csv(&path) {
            Err(CliError::Csv { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("duplicate"), "{message}");
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hdr.csv");
        std::fs::write(&path, "subject,group,age,landmark,x,y\n").unwrap();
        assert!(matches!(
            parse_landmark_csv(&path),
            Err(CliError::File { .. })
        ));
    }

    #[test]
    fn column_encoding_roundtrip() {
        let metas = [
            ColumnMeta {
                name: String::from("SN-MP"),
                family: Some(Family::Ceph),
                tag: Some(Tag::Diff),
            },
            ColumnMeta {
                name: String::from("Y Antegonial Notch"),
                family: Some(Family::Trans),
                tag: Some(Tag::Nine),
            },
            ColumnMeta {
                name: String::from("AFH:PFH"),
                family: Some(Family::Ceph),
                tag: Some(Tag::Twelve),
            },
            ColumnMeta::age(),
        ];
        for meta in metas {
            let encoded = encode_column(&meta).unwrap();
            assert_eq!(decode_column(&encoded), Some(meta));
        }
    }

    #[test]
    fn registry_file_roundtrip_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("registry.txt");
        std::fs::write(
            &path,
            "# landmarks\nSella required\nGonion Inferior required\nOptional Landmark\n",
        )
        .unwrap();
        let registry = parse_registry(&path).unwrap();
        let entries: Vec<(&str, bool)> = registry.entries().collect();
        assert_eq!(
            entries,
            vec![
                ("Sella", true),
                ("Gonion Inferior", true),
                ("Optional Landmark", false),
            ]
        );
        let rt = dir.path().join("rt.txt");
        write_registry(&rt, &registry).unwrap();
        assert_eq!(parse_registry(&rt).unwrap(), registry);
        // the default registry survives the file format too
        write_registry(&rt, &default_registry()).unwrap();
        assert_eq!(parse_registry(&rt).unwrap(), default_registry());
    }
}
