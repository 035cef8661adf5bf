//! Dataset schema, CSV ingestion and row-level cleaning.
//!
//! A row with any blank mapped cell is dropped (row-wise deletion). A row
//! whose cell is present but malformed is a hard error.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const N_EMOTIONS: usize = 10;

/// Emotion score columns, in feature order.
pub const EMOTION_NAMES: [&str; N_EMOTIONS] = [
    "Valence",
    "Arousal",
    "Tension",
    "Atmospheric",
    "Happy",
    "Dark",
    "Sad",
    "Angry",
    "Sensual",
    "Sentimental",
];

#[derive(Debug, Error)]
pub enum TabularError {
    #[error("missing required column {0:?}")]
    MissingColumn(String),
    #[error("row {row}, column {column:?}: cannot parse {value:?}")]
    ParseError {
        row: usize,
        column: String,
        value: String,
    },
    #[error("no records left after cleaning")]
    EmptyAfterClean,
    #[error("unknown schema field {0:?}")]
    UnknownField(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

type Result<T> = std::result::Result<T, TabularError>;

/// Maps logical fields to CSV header names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub track: String,
    pub upload_date: String,
    pub views: String,
    pub likes: String,
    pub comments: String,
    pub emotions: [String; N_EMOTIONS],
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            track: "Track".into(),
            upload_date: "Upload date".into(),
            views: "Views".into(),
            likes: "Likes".into(),
            comments: "Comments Number".into(),
            emotions: EMOTION_NAMES.map(String::from),
        }
    }
}

impl ColumnMap {
    /// Remaps one logical field, addressed by its default column name
    /// (`Views`, `Upload date`, `Valence`, ...), to a different header.
    pub fn remap(&mut self, field: &str, column: &str) -> Result<()> {
        let slot = match field {
            "Track" => &mut self.track,
            "Upload date" => &mut self.upload_date,
            "Views" => &mut self.views,
            "Likes" => &mut self.likes,
            "Comments Number" => &mut self.comments,
            other => match EMOTION_NAMES.iter().position(|e| *e == other) {
                Some(i) => &mut self.emotions[i],
                None => return Err(TabularError::UnknownField(other.to_string())),
            },
        };
        *slot = column.to_string();
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub track_id: Option<String>,
    pub upload_date: NaiveDate,
    pub views: u64,
    pub likes: u64,
    pub comments: u64,
    pub emotions: [f64; N_EMOTIONS],
}

/// Parsed records in file order.
///
/// `source_row_indices` are 1-based data-row numbers (the first row after
/// the header is row 1).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTable {
    pub records: Vec<RawRecord>,
    pub source_row_indices: Vec<usize>,
    /// Rows removed by row-wise deletion of blank cells during loading.
    pub dropped: usize,
}

impl RawTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Subset of records at the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> RawTable {
        RawTable {
            records: positions.iter().map(|&i| self.records[i].clone()).collect(),
            source_row_indices: positions
                .iter()
                .map(|&i| self.source_row_indices[i])
                .collect(),
            dropped: 0,
        }
    }
}

/// A record for prediction: likes and comments may be absent.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub track_id: Option<String>,
    pub upload_date: NaiveDate,
    pub views: u64,
    pub likes: Option<u64>,
    pub comments: Option<u64>,
    pub emotions: [f64; N_EMOTIONS],
}

impl From<&RawRecord> for FeatureRecord {
    fn from(r: &RawRecord) -> Self {
        Self {
            track_id: r.track_id.clone(),
            upload_date: r.upload_date,
            views: r.views,
            likes: Some(r.likes),
            comments: Some(r.comments),
            emotions: r.emotions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub records: Vec<FeatureRecord>,
    pub source_row_indices: Vec<usize>,
    pub dropped: usize,
}

/// Column positions resolved against a header row.
struct Layout {
    track: Option<usize>,
    upload_date: usize,
    views: usize,
    likes: Option<usize>,
    comments: Option<usize>,
    emotions: [usize; N_EMOTIONS],
}

impl Layout {
    fn resolve(header: &csv::StringRecord, schema: &ColumnMap, need_counts: bool) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let require = |name: &str| find(name).ok_or_else(|| TabularError::MissingColumn(name.to_string()));
        let mut emotions = [0; N_EMOTIONS];
        let upload_date = require(&schema.upload_date)?;
        let views = require(&schema.views)?;
        let (likes, comments) = if need_counts {
            (Some(require(&schema.likes)?), Some(require(&schema.comments)?))
        } else {
            (find(&schema.likes), find(&schema.comments))
        };
        for (slot, name) in emotions.iter_mut().zip(&schema.emotions) {
            *slot = require(name)?;
        }
        Ok(Self {
            track: find(&schema.track),
            upload_date,
            views,
            likes,
            comments,
            emotions,
        })
    }
}

/// Outcome of parsing a single cell.
enum Cell<T> {
    Blank,
    Value(T),
}

fn value<T>(c: Cell<T>, blank: &mut bool) -> Option<T> {
    match c {
        Cell::Value(v) => Some(v),
        Cell::Blank => {
            *blank = true;
            None
        }
    }
}

fn cell(record: &csv::StringRecord, idx: usize) -> &str {
    record.get(idx).unwrap_or("").trim()
}

fn parse_cell<T>(
    record: &csv::StringRecord,
    idx: usize,
    row: usize,
    column: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Cell<T>> {
    let raw = cell(record, idx);
    if raw.is_empty() {
        return Ok(Cell::Blank);
    }
    parse(raw).map(Cell::Value).ok_or_else(|| TabularError::ParseError {
        row,
        column: column.to_string(),
        value: raw.to_string(),
    })
}

/// Parses `YYYY-MM-DD` or `YYYYMMDD`.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let b = s.as_bytes();
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    let (y, m, d) = match b.len() {
        10 if b[4] == b'-' && b[7] == b'-' && digits(0..4) && digits(5..7) && digits(8..10) => {
            (&s[0..4], &s[5..7], &s[8..10])
        }
        8 if digits(0..8) => (&s[0..4], &s[4..6], &s[6..8]),
        _ => return None,
    };
    NaiveDate::from_ymd_opt(y.parse().ok()?, m.parse().ok()?, d.parse().ok()?)
}

/// Nonnegative integer count. Integral decimals such as `1234.0` are accepted.
fn parse_count(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 9.007_199_254_740_992e15).then_some(v as u64)
}

fn parse_score(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_rows<R: Read>(
    reader: R,
    schema: &ColumnMap,
    need_counts: bool,
) -> Result<FeatureTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let layout = Layout::resolve(&header, schema, need_counts)?;
    let mut table = FeatureTable::default();

    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let mut blank = false;
        let upload_date = value(
            parse_cell(&rec, layout.upload_date, row, &schema.upload_date, parse_date)?,
            &mut blank,
        );
        let views = value(parse_cell(&rec, layout.views, row, &schema.views, parse_count)?, &mut blank);
        let optional_count = |idx: Option<usize>, name: &str, blank: &mut bool| -> Result<Option<u64>> {
            let Some(idx) = idx else { return Ok(None) };
            Ok(match parse_cell(&rec, idx, row, name, parse_count)? {
                Cell::Value(v) => Some(v),
                Cell::Blank => {
                    *blank |= need_counts;
                    None
                }
            })
        };
        let likes = optional_count(layout.likes, &schema.likes, &mut blank)?;
        let comments = optional_count(layout.comments, &schema.comments, &mut blank)?;
        let mut emotions = [0.0; N_EMOTIONS];
        for (k, slot) in emotions.iter_mut().enumerate() {
            if let Some(v) = value(
                parse_cell(&rec, layout.emotions[k], row, &schema.emotions[k], parse_score)?,
                &mut blank,
            ) {
                *slot = v;
            }
        }

        if blank {
            table.dropped += 1;
            continue;
        }
        let track_id = layout
            .track
            .map(|idx| cell(&rec, idx).to_string())
            .filter(|s| !s.is_empty());
        table.records.push(FeatureRecord {
            track_id,
            upload_date: upload_date.expect("non-blank"),
            views: views.expect("non-blank"),
            likes,
            comments,
            emotions,
        });
        table.source_row_indices.push(row);
    }
    Ok(table)
}

/// Reads a labeled table; every count column is required.
pub fn read_csv<R: Read>(reader: R, schema: &ColumnMap) -> Result<RawTable> {
    let t = parse_rows(reader, schema, true)?;
    Ok(RawTable {
        records: t
            .records
            .into_iter()
            .map(|r| RawRecord {
                track_id: r.track_id,
                upload_date: r.upload_date,
                views: r.views,
                likes: r.likes.expect("required column"),
                comments: r.comments.expect("required column"),
                emotions: r.emotions,
            })
            .collect(),
        source_row_indices: t.source_row_indices,
        dropped: t.dropped,
    })
}

pub fn load_csv(path: impl AsRef<Path>, schema: &ColumnMap) -> Result<RawTable> {
    read_csv(File::open(path)?, schema)
}

/// Reads a table for prediction. Likes and comments are required only when
/// `need_counts` is set; otherwise they are read when present.
pub fn read_feature_csv<R: Read>(reader: R, schema: &ColumnMap, need_counts: bool) -> Result<FeatureTable> {
    parse_rows(reader, schema, need_counts)
}

pub fn load_feature_csv(path: impl AsRef<Path>, schema: &ColumnMap, need_counts: bool) -> Result<FeatureTable> {
    read_feature_csv(File::open(path)?, schema, need_counts)
}

/// Writes records in the given schema; dates as ISO-8601.
pub fn write_csv<W: Write>(table: &RawTable, writer: W, schema: &ColumnMap) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![
        schema.track.as_str(),
        schema.upload_date.as_str(),
        schema.views.as_str(),
        schema.likes.as_str(),
        schema.comments.as_str(),
    ];
    header.extend(schema.emotions.iter().map(String::as_str));
    w.write_record(&header)?;
    for r in &table.records {
        let mut row = vec![
            r.track_id.clone().unwrap_or_default(),
            r.upload_date.format("%Y-%m-%d").to_string(),
            r.views.to_string(),
            r.likes.to_string(),
            r.comments.to_string(),
        ];
        row.extend(r.emotions.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Keeps records with at least one view and one like. Zero comments are kept.
pub fn clean(table: &RawTable) -> Result<RawTable> {
    let mut out = RawTable {
        dropped: table.dropped,
        ..RawTable::default()
    };
    for (r, &row) in table.records.iter().zip(&table.source_row_indices) {
        if r.views >= 1 && r.likes >= 1 {
            out.records.push(r.clone());
            out.source_row_indices.push(row);
        }
    }
    if out.records.is_empty() {
        return Err(TabularError::EmptyAfterClean);
    }
    Ok(out)
}
