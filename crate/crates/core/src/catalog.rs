//! Record and catalog ingestion, parameter-table persistence and GeoJSON
//! emission of per-station parameter values.
//!
//! Waveform files come in two text layouts:
//!
//! * `two_column_text`: whitespace-separated `time acceleration` rows; the
//!   step is the difference of the first two times and every later step must
//!   match it within 1e-6 relative.
//! * `csv`: a `dt=<seconds>` header line followed by one sample per line.
//!
//! Lines starting with `#` are comments in both layouts. Values are
//! converted to m/s² on load with g = 9.81 m/s².
//!
//! A catalog is a directory holding `events.csv`, `stations.csv` and
//! `records.csv`. Waveform paths in `records.csv` are relative to that
//! directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::signal::{Accelerogram, Units};
use crate::stats::{Param, ParameterSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    H1,
    H2,
    V,
}

impl Component {
    pub fn is_horizontal(self) -> bool {
        matches!(self, Component::H1 | Component::H2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Component::H1 => "H1",
            Component::H2 => "H2",
            Component::V => "V",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H1" | "h1" => Ok(Component::H1),
            "H2" | "h2" => Ok(Component::H2),
            "V" | "v" => Ok(Component::V),
            other => Err(Error::InvalidArgument(format!("unknown component '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformFormat {
    TwoColumnText,
    Csv,
}

impl FromStr for WaveformFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_column_text" | "two-column" | "two_column" | "txt" => Ok(WaveformFormat::TwoColumnText),
            "csv" => Ok(WaveformFormat::Csv),
            _ => Err(Error::InvalidArgument(format!("unknown waveform format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl TableFormat {
    /// Format implied by a file extension, CSV unless the path ends in
    /// `.json`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => TableFormat::Json,
            _ => TableFormat::Csv,
        }
    }
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(Error::InvalidArgument(format!("unknown table format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub id: String,
    pub date: String,
    pub mw: f64,
    pub depth_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub code: String,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub record_id: String,
    pub event_id: String,
    pub station_code: String,
    pub component: Component,
    pub path: String,
    pub units: Units,
}

/// Validated, immutable catalog. Maps are keyed by id so iteration order
/// does not depend on the row order of the source files.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    pub root: PathBuf,
    pub events: BTreeMap<String, Event>,
    pub stations: BTreeMap<String, Station>,
    pub records: BTreeMap<String, RecordEntry>,
}

impl Event {
    pub fn validate(&self) -> Result<()> {
        chrono::NaiveDate::parse_from_str(&self.date, "%Y-%m-%d")
            .map_err(|e| Error::InvalidArgument(format!("event {}: date '{}': {e}", self.id, self.date)))?;
        if !(self.mw > 0.0) || !(self.depth_km > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "event {}: magnitude and depth must be positive",
                self.id
            )));
        }
        Ok(())
    }
}

impl Station {
    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat) || !(-180.0..=180.0).contains(&self.lon) {
            return Err(Error::InvalidArgument(format!(
                "station {}: coordinates ({}, {}) out of range",
                self.code, self.lat, self.lon
            )));
        }
        Ok(())
    }
}

impl Catalog {
    /// Builds a catalog from rows, rejecting duplicates and dangling
    /// references. Unknown station codes are all reported at once.
    pub fn from_rows(
        root: impl Into<PathBuf>,
        events: Vec<Event>,
        stations: Vec<Station>,
        records: Vec<RecordEntry>,
    ) -> Result<Self> {
        let missing: BTreeSet<String> = records
            .iter()
            .filter(|r| !stations.iter().any(|s| s.code == r.station_code))
            .map(|r| r.station_code.clone())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingStations(missing.into_iter().collect()));
        }
        let mut cat = Catalog {
            root: root.into(),
            ..Default::default()
        };
        for e in events {
            e.validate()?;
            if cat.events.contains_key(&e.id) {
                return Err(Error::DuplicateId(format!("event {}", e.id)));
            }
            cat.events.insert(e.id.clone(), e);
        }
        for s in stations {
            s.validate()?;
            if cat.stations.contains_key(&s.code) {
                return Err(Error::DuplicateId(format!("station {}", s.code)));
            }
            cat.stations.insert(s.code.clone(), s);
        }
        for r in records {
            if !cat.events.contains_key(&r.event_id) {
                return Err(Error::DanglingReference(format!(
                    "record {} -> event {}",
                    r.record_id, r.event_id
                )));
            }
            if cat.records.contains_key(&r.record_id) {
                return Err(Error::DuplicateId(format!("record {}", r.record_id)));
            }
            cat.records.insert(r.record_id.clone(), r);
        }
        Ok(cat)
    }

    pub fn waveform_path(&self, record: &RecordEntry) -> PathBuf {
        self.root.join(&record.path)
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(path: &Path, line: usize, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: format!("'{s}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            reason: format!("non-finite value '{s}'"),
        });
    }
    Ok(v)
}

/// Relative tolerance on the time step of two-column files.
pub const DT_TOLERANCE: f64 = 1e-6;

/// Reads a waveform file in the declared layout and converts it to m/s².
pub fn load_accelerogram(path: &Path, format: WaveformFormat, units_in: Units) -> Result<Accelerogram> {
    let text = read_text(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut lines = data_lines(&text).peekable();
    if lines.peek().is_none() {
        return Err(Error::EmptyFile { path: path.to_path_buf() });
    }
    let (dt, samples) = match format {
        WaveformFormat::Csv => {
            let (ln, head) = lines.next().unwrap();
            let dt_str = head
                .strip_prefix("dt=")
                .ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    line: ln,
                    reason: "expected a 'dt=<seconds>' header".into(),
                })?;
            let dt = parse_f64(path, ln, dt_str.trim())?;
            let samples = lines
                .map(|(ln, l)| parse_f64(path, ln, l.trim_end_matches(',')))
                .collect::<Result<Vec<_>>>()?;
            (dt, samples)
        }
        WaveformFormat::TwoColumnText => {
            let mut times = Vec::new();
            let mut samples = Vec::new();
            let mut dt = 0.0;
            for (ln, l) in lines {
                let mut cols = l.split_whitespace();
                let (Some(t), Some(a), None) = (cols.next(), cols.next(), cols.next()) else {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: ln,
                        reason: "expected two columns".into(),
                    });
                };
                let t = parse_f64(path, ln, t)?;
                samples.push(parse_f64(path, ln, a)?);
                if let Some(&prev) = times.last() {
                    let step: f64 = t - prev;
                    if times.len() == 1 {
                        dt = step;
                    } else if !((step - dt).abs() <= DT_TOLERANCE * dt.abs()) {
                        return Err(Error::NonUniformSampling {
                            path: path.to_path_buf(),
                            line: ln,
                            expected: dt,
                            found: step,
                        });
                    }
                }
                times.push(t);
            }
            (dt, samples)
        }
    };
    Accelerogram::from_units(dt, samples, units_in, label)
}

/// Writes `acc` (in m/s²) with optional leading comment lines.
pub fn write_accelerogram(acc: &Accelerogram, path: &Path, format: WaveformFormat, comments: &[String]) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    match format {
        WaveformFormat::Csv => {
            out.push_str(&format!("dt={}\n", acc.dt()));
            for v in acc.samples() {
                out.push_str(&format!("{v}\n"));
            }
        }
        WaveformFormat::TwoColumnText => {
            for (i, v) in acc.samples().iter().enumerate() {
                out.push_str(&format!("{} {v}\n", i as f64 * acc.dt()));
            }
        }
    }
    write_file(path, out.as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_csv_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    rdr.deserialize()
        .map(|r| {
            r.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: e.position().map_or(0, |p| p.line() as usize),
                reason: e.to_string(),
            })
        })
        .collect()
}

#[derive(Deserialize, Serialize)]
struct RecordRow {
    record_id: String,
    event_id: String,
    station_code: String,
    component: String,
    path: String,
    units: String,
}

/// Loads `events.csv`, `stations.csv` and `records.csv` from `dir`.
pub fn load_catalog(dir: &Path) -> Result<Catalog> {
    let events: Vec<Event> = read_csv_rows(&dir.join("events.csv"))?;
    let stations: Vec<Station> = read_csv_rows(&dir.join("stations.csv"))?;
    let rows: Vec<RecordRow> = read_csv_rows(&dir.join("records.csv"))?;
    let records = rows
        .into_iter()
        .map(|r| {
            Ok(RecordEntry {
                component: r.component.parse()?,
                units: r.units.parse()?,
                record_id: r.record_id,
                event_id: r.event_id,
                station_code: r.station_code,
                path: r.path,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Catalog::from_rows(dir, events, stations, records)
}

fn write_csv_rows<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    wtr.write_record(header)?;
    for r in rows {
        wtr.serialize(r)?;
    }
    let bytes = wtr.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    write_file(path, &bytes)
}

/// Writes the three catalog files into `dir`, sorted by id.
pub fn write_catalog(cat: &Catalog, dir: &Path) -> Result<()> {
    write_csv_rows(&dir.join("events.csv"), &["id", "date", "mw", "depth_km"], cat.events.values())?;
    write_csv_rows(&dir.join("stations.csv"), &["code", "name", "lat", "lon"], cat.stations.values())?;
    write_csv_rows(
        &dir.join("records.csv"),
        &["record_id", "event_id", "station_code", "component", "path", "units"],
        cat.records.values().map(|r| RecordRow {
            record_id: r.record_id.clone(),
            event_id: r.event_id.clone(),
            station_code: r.station_code.clone(),
            component: r.component.to_string(),
            path: r.path.clone(),
            units: r.units.to_string(),
        }),
    )
}

/// Column header of the parameter table.
pub fn table_header() -> Vec<&'static str> {
    let mut h = vec!["record_id", "event_id", "component"];
    h.extend(Param::ALL.iter().map(|p| p.name()));
    h
}

/// Serializes parameter sets. `meta`, when given, becomes a leading
/// `# <json>` comment line in CSV and a `meta` member in JSON.
pub fn parameter_table_bytes(sets: &[ParameterSet], format: TableFormat, meta: Option<&Value>) -> Result<Vec<u8>> {
    match format {
        TableFormat::Csv => {
            let mut buf = Vec::new();
            if let Some(m) = meta {
                writeln!(buf, "# {}", serde_json::to_string(m)?).expect("write to Vec");
            }
            let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(buf);
            wtr.write_record(table_header())?;
            for s in sets {
                let mut row = vec![s.record_id.clone(), s.event_id.clone(), s.component.to_string()];
                row.extend(
                    Param::ALL
                        .iter()
                        .map(|p| s.get(*p).map(|v| v.to_string()).unwrap_or_default()),
                );
                wtr.write_record(&row)?;
            }
            Ok(wtr.into_inner().expect("flush to Vec"))
        }
        TableFormat::Json => {
            let doc = json!({ "meta": meta, "records": sets });
            let mut bytes = serde_json::to_vec_pretty(&doc)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

pub fn write_parameter_table(
    sets: &[ParameterSet],
    path: &Path,
    format: TableFormat,
    meta: Option<&Value>,
) -> Result<()> {
    write_file(path, &parameter_table_bytes(sets, format, meta)?)
}

/// Reads a table written by [`write_parameter_table`].
pub fn read_parameter_table(path: &Path, format: TableFormat) -> Result<Vec<ParameterSet>> {
    let text = read_text(path)?;
    match format {
        TableFormat::Json => {
            #[derive(Deserialize)]
            struct Doc {
                records: Vec<ParameterSet>,
            }
            let doc: Doc = serde_json::from_str(&text)?;
            Ok(doc.records)
        }
        TableFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .comment(Some(b'#'))
                .from_reader(text.as_bytes());
            let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
            if header != table_header() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    reason: format!("unexpected header {header:?}"),
                });
            }
            let mut sets = Vec::new();
            for rec in rdr.records() {
                let rec = rec?;
                let line = rec.position().map_or(0, |p| p.line() as usize);
                let mut s = ParameterSet::empty(&rec[0], &rec[1], rec[2].parse()?);
                for (k, p) in Param::ALL.iter().enumerate() {
                    let cell = &rec[3 + k];
                    if !cell.is_empty() {
                        s.set(*p, Some(parse_f64(path, line, cell)?));
                    }
                }
                sets.push(s);
            }
            Ok(sets)
        }
    }
}

/// Metadata block of a table file, if present.
pub fn read_table_meta(path: &Path, format: TableFormat) -> Result<Option<Value>> {
    let text = read_text(path)?;
    match format {
        TableFormat::Csv => match text.lines().next().and_then(|l| l.strip_prefix("# ")) {
            Some(m) => Ok(Some(serde_json::from_str(m)?)),
            None => Ok(None),
        },
        TableFormat::Json => {
            let doc: Value = serde_json::from_str(&text)?;
            Ok(doc.get("meta").filter(|m| !m.is_null()).cloned())
        }
    }
}

/// Options of [`emit_geojson_map`].
#[derive(Debug, Clone, Default)]
pub struct MapQuery<'a> {
    pub event_id: Option<&'a str>,
    /// Replace H1/H2 values of one station and event by their maximum.
    pub aggregate_horizontal: bool,
}

/// GeoJSON `FeatureCollection` with one `Point` per record component that
/// has a value for `param`. Coordinates are `[lon, lat]`.
pub fn emit_geojson_map(sets: &[ParameterSet], catalog: &Catalog, param: &str, query: &MapQuery) -> Result<Value> {
    let param: Param = param.parse()?;
    let mut missing = BTreeSet::new();
    // (event, station, component label) -> value
    let mut points: BTreeMap<(String, String, String), f64> = BTreeMap::new();
    for s in sets {
        if query.event_id.is_some_and(|e| e != s.event_id) {
            continue;
        }
        let Some(value) = s.get(param) else { continue };
        let Some(rec) = catalog.records.get(&s.record_id) else {
            missing.insert(format!("record:{}", s.record_id));
            continue;
        };
        if !catalog.stations.contains_key(&rec.station_code) {
            missing.insert(rec.station_code.clone());
            continue;
        }
        let label = if query.aggregate_horizontal && s.component.is_horizontal() {
            "H".to_string()
        } else {
            s.component.to_string()
        };
        points
            .entry((s.event_id.clone(), rec.station_code.clone(), label))
            .and_modify(|v| *v = v.max(value))
            .or_insert(value);
    }
    if !missing.is_empty() {
        return Err(Error::MissingStations(missing.into_iter().collect()));
    }
    if points.is_empty() {
        return Err(Error::NoMatchingRecords(format!(
            "{param}{}",
            query.event_id.map(|e| format!(" for event {e}")).unwrap_or_default()
        )));
    }
    let features: Vec<Value> = points
        .into_iter()
        .map(|((event_id, code, component), value)| {
            let st = &catalog.stations[&code];
            json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": [st.lon, st.lat] },
                "properties": {
                    "station_code": code,
                    "event_id": event_id,
                    "param_name": param.name(),
                    "value": value,
                    "component": component,
                },
            })
        })
        .collect();
    Ok(json!({ "type": "FeatureCollection", "features": features }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn csv_waveform() {
        let dir = tmp();
        let p = dir.path().join("a.csv");
        fs::write(&p, "dt=0.01\n0\n1\n0\n").unwrap();
        let acc = load_accelerogram(&p, WaveformFormat::Csv, Units::MetersPerSecond2).unwrap();
        assert_eq!(acc.dt(), 0.01);
        assert_eq!(acc.samples(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_column_waveform_in_g() {
        let dir = tmp();
        let p = dir.path().join("a.txt");
        fs::write(&p, "0.0 0.0\n0.02 9.81\n").unwrap();
        let acc = load_accelerogram(&p, WaveformFormat::TwoColumnText, Units::Gravity).unwrap();
        assert!((acc.samples()[1] - 96.2361).abs() < 1e-9);
        assert_eq!(acc.dt(), 0.02);
    }

    #[test]
    fn waveform_errors_are_distinct() {
        let dir = tmp();
        let p = dir.path().join("a.txt");
        fs::write(&p, "0.0 0\n0.01 1\n0.0205 2\n0.0305 1\n").unwrap();
        assert!(matches!(
            load_accelerogram(&p, WaveformFormat::TwoColumnText, Units::MetersPerSecond2),
            Err(Error::NonUniformSampling { line: 3, .. })
        ));
        fs::write(&p, "0.0 0\n0.01 x\n").unwrap();
        assert!(matches!(
            load_accelerogram(&p, WaveformFormat::TwoColumnText, Units::MetersPerSecond2),
            Err(Error::Parse { line: 2, .. })
        ));
        fs::write(&p, "# only a comment\n\n").unwrap();
        assert!(matches!(
            load_accelerogram(&p, WaveformFormat::Csv, Units::MetersPerSecond2),
            Err(Error::EmptyFile { .. })
        ));
        fs::write(&p, "0.1\n0.2\n").unwrap();
        assert!(matches!(
            load_accelerogram(&p, WaveformFormat::Csv, Units::MetersPerSecond2),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(load_accelerogram(&dir.path().join("nope"), WaveformFormat::Csv, Units::Gravity)
            .unwrap_err()
            .is_io());
    }

    fn fixture() -> Catalog {
        let events = vec![
            Event { id: "1977-03-04".into(), date: "1977-03-04".into(), mw: 7.4, depth_km: 109.0 },
            Event { id: "1986-08-30".into(), date: "1986-08-30".into(), mw: 7.1, depth_km: 133.0 },
        ];
        let stations = vec![Station { code: "BUC".into(), name: "x".into(), lat: 44.44, lon: 26.12 }];
        let records = vec![RecordEntry {
            record_id: "r1".into(),
            event_id: "1986-08-30".into(),
            station_code: "BUC".into(),
            component: Component::H1,
            path: "r1.csv".into(),
            units: Units::CentimetersPerSecond2,
        }];
        Catalog::from_rows("", events, stations, records).unwrap()
    }

    #[test]
    fn catalog_validation() {
        let cat = fixture();
        let stations: Vec<_> = cat.stations.values().cloned().collect();
        let events: Vec<_> = cat.events.values().cloned().collect();
        let mut rec = cat.records["r1"].clone();
        rec.station_code = "NOPE".into();
        let mut rec2 = cat.records["r1"].clone();
        rec2.record_id = "r2".into();
        rec2.station_code = "ALSO".into();
        match Catalog::from_rows("", events.clone(), stations.clone(), vec![rec, rec2]) {
            Err(Error::MissingStations(codes)) => assert_eq!(codes, ["ALSO", "NOPE"]),
            other => panic!("{other:?}"),
        }
        let mut orphan = cat.records["r1"].clone();
        orphan.event_id = "1900-01-01".into();
        assert!(matches!(
            Catalog::from_rows("", events.clone(), stations.clone(), vec![orphan]),
            Err(Error::DanglingReference(_))
        ));
        let mut dup = events.clone();
        dup.push(events[0].clone());
        assert!(matches!(
            Catalog::from_rows("", dup, stations.clone(), vec![]),
            Err(Error::DuplicateId(_))
        ));
        let bad = Event { mw: 0.0, ..events[0].clone() };
        assert!(Catalog::from_rows("", vec![bad], stations, vec![]).is_err());
    }

    #[test]
    fn geojson_single_point() {
        let cat = fixture();
        let mut s = ParameterSet::empty("r1", "1986-08-30", Component::H1);
        s.t_ms = Some(0.8);
        let doc = emit_geojson_map(&[s.clone()], &cat, "t_ms", &MapQuery::default()).unwrap();
        let f = &doc["features"][0];
        assert_eq!(doc["type"], "FeatureCollection");
        assert_eq!(f["geometry"]["coordinates"], json!([26.12, 44.44]));
        assert_eq!(f["properties"]["value"], json!(0.8));
        assert!(matches!(
            emit_geojson_map(&[s.clone()], &cat, "t_xyz", &MapQuery::default()),
            Err(Error::UnknownParameter(_))
        ));
        assert!(matches!(
            emit_geojson_map(&[s], &cat, "t_c", &MapQuery::default()),
            Err(Error::NoMatchingRecords(_))
        ));
    }

    #[test]
    fn geojson_aggregates_horizontals_on_request() {
        let mut cat = fixture();
        let mut r2 = cat.records["r1"].clone();
        r2.record_id = "r2".into();
        r2.component = Component::H2;
        cat.records.insert("r2".into(), r2);
        let mut a = ParameterSet::empty("r1", "1986-08-30", Component::H1);
        a.t_ms = Some(0.8);
        let mut b = ParameterSet::empty("r2", "1986-08-30", Component::H2);
        b.t_ms = Some(1.1);
        let sets = [a, b];
        let plain = emit_geojson_map(&sets, &cat, "t_ms", &MapQuery::default()).unwrap();
        assert_eq!(plain["features"].as_array().unwrap().len(), 2);
        let q = MapQuery { event_id: None, aggregate_horizontal: true };
        let agg = emit_geojson_map(&sets, &cat, "t_ms", &q).unwrap();
        assert_eq!(agg["features"].as_array().unwrap().len(), 1);
        assert_eq!(agg["features"][0]["properties"]["value"], json!(1.1));
        assert_eq!(agg["features"][0]["properties"]["component"], json!("H"));
    }

    #[test]
    fn missing_value_is_empty_cell() {
        let mut s = ParameterSet::empty("r1", "e", Component::V);
        s.t_ms = Some(0.5);
        let bytes = parameter_table_bytes(&[s], TableFormat::Csv, None).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row.split(',').count(), 14);
        assert_eq!(row, "r1,e,V,0.5,,,,,,,,,,");
    }
}
