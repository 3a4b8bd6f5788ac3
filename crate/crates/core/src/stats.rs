//! Correlation study over computed parameter sets: pairwise linear fits,
//! R² matrices, correlation-strength and bandwidth classification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::Component;
use crate::error::{Error, Result};

/// R² above which a correlation is called good.
pub const GOOD_R2: f64 = 0.5;
/// R² below which a correlation is called weak.
pub const WEAK_R2: f64 = 0.1;

/// ε above which a record is narrow-band.
pub const NARROW_EPSILON: f64 = 0.95;
/// ε below which a record is broad-band.
pub const BROAD_EPSILON: f64 = 0.85;

/// Minimum number of complete pairs for a matrix cell.
pub const MIN_PAIRS: usize = 3;

/// The eleven tabulated parameters, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    TMs,
    T1Dsp,
    TMean,
    TCen,
    TGsa,
    TGsv,
    TGei,
    TC,
    T43,
    Q,
    Epsilon,
}

impl Param {
    pub const ALL: [Param; 11] = [
        Param::TMs,
        Param::T1Dsp,
        Param::TMean,
        Param::TCen,
        Param::TGsa,
        Param::TGsv,
        Param::TGei,
        Param::TC,
        Param::T43,
        Param::Q,
        Param::Epsilon,
    ];

    /// The nine period-type parameters.
    pub const PERIODS: [Param; 9] = [
        Param::TMs,
        Param::T1Dsp,
        Param::TMean,
        Param::TCen,
        Param::TGsa,
        Param::TGsv,
        Param::TGei,
        Param::TC,
        Param::T43,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::TMs => "t_ms",
            Param::T1Dsp => "t1_dsp",
            Param::TMean => "t_mean",
            Param::TCen => "t_cen",
            Param::TGsa => "t_gsa",
            Param::TGsv => "t_gsv",
            Param::TGei => "t_gei",
            Param::TC => "t_c",
            Param::T43 => "t_43",
            Param::Q => "q",
            Param::Epsilon => "epsilon",
        }
    }

    pub fn is_period(self) -> bool {
        !matches!(self, Param::Q | Param::Epsilon)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        Ok(match key.as_str() {
            "tms" => Param::TMs,
            "t1dsp" | "t1" => Param::T1Dsp,
            "tmean" => Param::TMean,
            "tcen" => Param::TCen,
            "tgsa" => Param::TGsa,
            "tgsv" => Param::TGsv,
            "tgei" | "tgsei" => Param::TGei,
            "tc" => Param::TC,
            "t43" => Param::T43,
            "q" => Param::Q,
            "epsilon" | "eps" => Param::Epsilon,
            _ => return Err(Error::UnknownParameter(s.to_string())),
        })
    }
}

/// Parses a comma-separated parameter list.
pub fn parse_param_list(s: &str) -> Result<Vec<Param>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// The eleven parameters of one record component. Missing values are
/// parameters whose computation failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub record_id: String,
    pub event_id: String,
    pub component: Component,
    pub t_ms: Option<f64>,
    pub t1_dsp: Option<f64>,
    pub t_mean: Option<f64>,
    pub t_cen: Option<f64>,
    pub t_gsa: Option<f64>,
    pub t_gsv: Option<f64>,
    pub t_gei: Option<f64>,
    pub t_c: Option<f64>,
    pub t_43: Option<f64>,
    pub q: Option<f64>,
    pub epsilon: Option<f64>,
}

impl ParameterSet {
    pub fn empty(record_id: impl Into<String>, event_id: impl Into<String>, component: Component) -> Self {
        ParameterSet {
            record_id: record_id.into(),
            event_id: event_id.into(),
            component,
            t_ms: None,
            t1_dsp: None,
            t_mean: None,
            t_cen: None,
            t_gsa: None,
            t_gsv: None,
            t_gei: None,
            t_c: None,
            t_43: None,
            q: None,
            epsilon: None,
        }
    }

    pub fn get(&self, p: Param) -> Option<f64> {
        *self.slot(p)
    }

    pub fn set(&mut self, p: Param, value: Option<f64>) {
        *self.slot_mut(p) = value;
    }

    fn slot(&self, p: Param) -> &Option<f64> {
        match p {
            Param::TMs => &self.t_ms,
            Param::T1Dsp => &self.t1_dsp,
            Param::TMean => &self.t_mean,
            Param::TCen => &self.t_cen,
            Param::TGsa => &self.t_gsa,
            Param::TGsv => &self.t_gsv,
            Param::TGei => &self.t_gei,
            Param::TC => &self.t_c,
            Param::T43 => &self.t_43,
            Param::Q => &self.q,
            Param::Epsilon => &self.epsilon,
        }
    }

    fn slot_mut(&mut self, p: Param) -> &mut Option<f64> {
        match p {
            Param::TMs => &mut self.t_ms,
            Param::T1Dsp => &mut self.t1_dsp,
            Param::TMean => &mut self.t_mean,
            Param::TCen => &mut self.t_cen,
            Param::TGsa => &mut self.t_gsa,
            Param::TGsv => &mut self.t_gsv,
            Param::TGei => &mut self.t_gei,
            Param::TC => &mut self.t_c,
            Param::T43 => &mut self.t_43,
            Param::Q => &mut self.q,
            Param::Epsilon => &mut self.epsilon,
        }
    }

    pub fn present_count(&self) -> usize {
        Param::ALL.iter().filter(|p| self.get(**p).is_some()).count()
    }

    /// Checks the value-range invariants of a set.
    pub fn validate(&self) -> Result<()> {
        if self.present_count() == 0 {
            return Err(Error::Degenerate(format!(
                "record {}: no parameter computed",
                self.record_id
            )));
        }
        for p in Param::ALL {
            if let Some(v) = self.get(p) {
                let ok = if p.is_period() {
                    v > 0.0
                } else {
                    (0.0..=1.0).contains(&v)
                };
                if !ok || !v.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "record {}: {p} = {v} out of range",
                        self.record_id
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Good,
    Moderate,
    Weak,
}

/// Strict thresholds: `r2 > 0.5` good, `r2 < 0.1` weak.
pub fn classify_r2(r2: f64) -> Strength {
    if r2 > GOOD_R2 {
        Strength::Good
    } else if r2 < WEAK_R2 {
        Strength::Weak
    } else {
        Strength::Moderate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// y = a·x + b
    Affine,
    /// y = a·x
    Proportional,
}

impl FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "affine" => Ok(FitModel::Affine),
            "prop" | "proportional" => Ok(FitModel::Proportional),
            _ => Err(Error::InvalidArgument(format!("unknown fit model '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionalFit {
    pub a: f64,
    /// Clamped to [0, 1] for classification.
    pub r2: f64,
    /// `1 − SS_res/SS_tot`, which can be negative for a poor fit through
    /// the origin.
    pub r2_raw: f64,
}

fn check_lengths(xs: &[f64], ys: &[f64], min: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "{} abscissae for {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < min {
        return Err(Error::InsufficientData(format!(
            "{} points, at least {min} required",
            xs.len()
        )));
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Ordinary least squares `y = a·x + b`. R² is the squared Pearson
/// correlation, equal to `1 − SS_res/SS_tot`; it is 0 when `ys` is constant.
pub fn fit_affine(xs: &[f64], ys: &[f64]) -> Result<AffineFit> {
    check_lengths(xs, ys, 3)?;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let a = sxy / sxx;
    let r2 = if syy == 0.0 {
        0.0
    } else {
        (sxy * sxy / (sxx * syy)).min(1.0)
    };
    Ok(AffineFit { a, b: my - a * mx, r2 })
}

/// Least squares through the origin, `a = Σxy/Σx²`.
pub fn fit_proportional(xs: &[f64], ys: &[f64]) -> Result<ProportionalFit> {
    check_lengths(xs, ys, 2)?;
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    if sxx == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let a = xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>() / sxx;
    let my = mean(ys);
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2_raw = if ss_tot == 0.0 { 0.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ProportionalFit {
        a,
        r2: r2_raw.clamp(0.0, 1.0),
        r2_raw,
    })
}

/// Fit of `y` against `x` for one matrix cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFit {
    pub a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub r2: f64,
    pub r2_raw: f64,
    pub n_points: usize,
    pub strength: Strength,
}

impl PairFit {
    fn identity(n_points: usize) -> Self {
        PairFit {
            a: 1.0,
            b: None,
            r2: 1.0,
            r2_raw: 1.0,
            n_points,
            strength: Strength::Good,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    All,
    Event,
}

impl FromStr for GroupBy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(GroupBy::All),
            "event" => Ok(GroupBy::Event),
            _ => Err(Error::InvalidArgument(format!("unknown grouping '{s}'"))),
        }
    }
}

/// Pairwise fits over one group of records. `cells[i][j]` fits
/// `params[j]` (y) against `params[i]` (x); `None` marks a cell with fewer
/// than [`MIN_PAIRS`] complete pairs or a degenerate abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub group: String,
    pub model: FitModel,
    pub params: Vec<Param>,
    pub cells: Vec<Vec<Option<PairFit>>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrengthCounts {
    pub good: usize,
    pub moderate: usize,
    pub weak: usize,
}

impl StrengthCounts {
    pub fn total(&self) -> usize {
        self.good + self.moderate + self.weak
    }

    fn add(&mut self, s: Strength) {
        match s {
            Strength::Good => self.good += 1,
            Strength::Moderate => self.moderate += 1,
            Strength::Weak => self.weak += 1,
        }
    }

    /// Whole-number percentages `(good, moderate, weak)`.
    pub fn percentages(&self) -> (f64, f64, f64) {
        let t = self.total().max(1) as f64;
        let pct = |c: usize| (100.0 * c as f64 / t).round();
        (pct(self.good), pct(self.moderate), pct(self.weak))
    }
}

impl fmt::Display for StrengthCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (g, m, w) = self.percentages();
        write!(
            f,
            "{} good / {} moderate / {} weak ({g}% / {m}% / {w}%)",
            self.good, self.moderate, self.weak
        )
    }
}

impl CorrelationReport {
    pub fn r2(&self, x: Param, y: Param) -> Option<f64> {
        let i = self.params.iter().position(|p| *p == x)?;
        let j = self.params.iter().position(|p| *p == y)?;
        self.cells[i][j].map(|c| c.r2)
    }

    /// Counts over unordered pairs `i < j`, using the `x = params[i]` fit.
    pub fn summary(&self) -> StrengthCounts {
        let mut counts = StrengthCounts::default();
        for i in 0..self.params.len() {
            for j in i + 1..self.params.len() {
                if let Some(c) = self.cells[i][j] {
                    counts.add(c.strength);
                }
            }
        }
        counts
    }

    /// Matrix layout: header row of parameter names, then one row per
    /// parameter with the R² values; missing cells are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param");
        for p in &self.params {
            out.push(',');
            out.push_str(p.name());
        }
        out.push('\n');
        for (p, row) in self.params.iter().zip(&self.cells) {
            out.push_str(p.name());
            for cell in row {
                out.push(',');
                if let Some(c) = cell {
                    out.push_str(&c.r2.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut pairs = Vec::new();
        for (i, x) in self.params.iter().enumerate() {
            for (j, y) in self.params.iter().enumerate() {
                if i == j {
                    continue;
                }
                let fit = self.cells[i][j];
                pairs.push(serde_json::json!({
                    "x": x.name(),
                    "y": y.name(),
                    "fit": fit,
                }));
            }
        }
        serde_json::json!({
            "group": self.group,
            "model": self.model,
            "params": self.params,
            "summary": self.summary(),
            "pairs": pairs,
        })
    }
}

fn fit_cell(sets: &[&ParameterSet], x: Param, y: Param, model: FitModel) -> Option<PairFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = sets
        .iter()
        .filter_map(|s| Some((s.get(x)?, s.get(y)?)))
        .unzip();
    if xs.len() < MIN_PAIRS {
        return None;
    }
    if x == y {
        return Some(PairFit::identity(xs.len()));
    }
    let n_points = xs.len();
    match model {
        FitModel::Affine => fit_affine(&xs, &ys).ok().map(|f| PairFit {
            a: f.a,
            b: Some(f.b),
            r2: f.r2,
            r2_raw: f.r2,
            n_points,
            strength: classify_r2(f.r2),
        }),
        FitModel::Proportional => fit_proportional(&xs, &ys).ok().map(|f| PairFit {
            a: f.a,
            b: None,
            r2: f.r2,
            r2_raw: f.r2_raw,
            n_points,
            strength: classify_r2(f.r2),
        }),
    }
}

fn report_for(group: String, sets: &[&ParameterSet], params: &[Param], model: FitModel) -> CorrelationReport {
    let n = params.len();
    let flat: Vec<Option<PairFit>> = (0..n * n)
        .into_par_iter()
        .map(|k| fit_cell(sets, params[k / n], params[k % n], model))
        .collect();
    CorrelationReport {
        group,
        model,
        params: params.to_vec(),
        cells: flat.chunks(n).map(<[_]>::to_vec).collect(),
    }
}

/// Correlation matrices with pairwise deletion of missing values. Grouping
/// by event yields one report per event id in sorted order.
pub fn correlation_matrix(
    sets: &[ParameterSet],
    params: &[Param],
    model: FitModel,
    group_by: GroupBy,
) -> Result<Vec<CorrelationReport>> {
    if sets.is_empty() {
        return Err(Error::InsufficientData("no parameter sets".into()));
    }
    if params.is_empty() {
        return Err(Error::InvalidArgument("empty parameter selection".into()));
    }
    match group_by {
        GroupBy::All => {
            let all: Vec<&ParameterSet> = sets.iter().collect();
            Ok(vec![report_for("all".into(), &all, params, model)])
        }
        GroupBy::Event => {
            let mut groups: BTreeMap<&str, Vec<&ParameterSet>> = BTreeMap::new();
            for s in sets {
                groups.entry(s.event_id.as_str()).or_default().push(s);
            }
            Ok(groups
                .into_iter()
                .map(|(event, members)| report_for(event.to_string(), &members, params, model))
                .collect())
        }
    }
}

/// A published R² table: rows and columns may differ (the rows can be a
/// subset of the columns).
#[derive(Debug, Clone, PartialEq)]
pub struct R2Matrix {
    pub rows: Vec<Param>,
    pub cols: Vec<Param>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl R2Matrix {
    /// Parses the matrix CSV layout written by [`CorrelationReport::to_csv`].
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| Error::InsufficientData("empty matrix".into()))??;
        let cols = header
            .iter()
            .skip(1)
            .map(str::parse)
            .collect::<Result<Vec<Param>>>()?;
        let (mut rows, mut values) = (Vec::new(), Vec::new());
        for rec in records {
            let rec = rec?;
            let mut it = rec.iter();
            let name = it.next().unwrap_or_default();
            rows.push(name.parse()?);
            let row = it
                .map(|v| {
                    if v.is_empty() {
                        Ok(None)
                    } else {
                        v.parse::<f64>()
                            .map(Some)
                            .map_err(|e| Error::InvalidArgument(format!("matrix value '{v}': {e}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != cols.len() {
                return Err(Error::InvalidArgument(format!(
                    "matrix row {name} has {} values for {} columns",
                    row.len(),
                    cols.len()
                )));
            }
            values.push(row);
        }
        Ok(R2Matrix { rows, cols, values })
    }

    pub fn get(&self, row: Param, col: Param) -> Option<f64> {
        let i = self.rows.iter().position(|p| *p == row)?;
        let j = self.cols.iter().position(|p| *p == col)?;
        self.values[i][j]
    }

    /// Parameters present both as a row and as a column, in row order.
    pub fn square_params(&self) -> Vec<Param> {
        self.rows.iter().copied().filter(|p| self.cols.contains(p)).collect()
    }

    /// Classifies every unordered pair of `selection`.
    pub fn classify_pairs(&self, selection: &[Param]) -> StrengthCounts {
        let mut counts = StrengthCounts::default();
        for (i, &x) in selection.iter().enumerate() {
            for &y in &selection[i + 1..] {
                if let Some(r2) = self.get(x, y).or_else(|| self.get(y, x)) {
                    counts.add(classify_r2(r2.clamp(0.0, 1.0)));
                }
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    Broad,
    Intermediate,
    Narrow,
}

/// Broad below ε = 0.85, narrow above ε = 0.95.
pub fn classify_bandwidth(epsilon: f64) -> Result<Bandwidth> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside [0, 1]")));
    }
    Ok(if epsilon < BROAD_EPSILON {
        Bandwidth::Broad
    } else if epsilon > NARROW_EPSILON {
        Bandwidth::Narrow
    } else {
        Bandwidth::Intermediate
    })
}

/// Records classified as narrow-band; entries without ε are dropped.
pub fn select_narrow_band(sets: &[ParameterSet]) -> Vec<ParameterSet> {
    sets.iter()
        .filter(|s| {
            s.epsilon
                .and_then(|e| classify_bandwidth(e).ok())
                .is_some_and(|b| b == Bandwidth::Narrow)
        })
        .cloned()
        .collect()
}
