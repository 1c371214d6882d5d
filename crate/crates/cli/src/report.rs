//! Per-run records with exact ratios.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    ApxUndir,
    ApxDir,
    ExactMin,
    ExactMax,
    RefineMin,
    RefineMax,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ApxUndir => "apx-undir",
            Algorithm::ApxDir => "apx-dir",
            Algorithm::ExactMin => "exact-min",
            Algorithm::ExactMax => "exact-max",
            Algorithm::RefineMin => "refine-min",
            Algorithm::RefineMax => "refine-max",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the reference weight in a report comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Exact oracle run on this instance.
    Oracle,
    /// Closed-form optimum recorded by the instance generator.
    Formula,
    /// The input cover (refinement runs).
    InputCover,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub algorithm: Algorithm,
    pub lengths: String,
    pub n: usize,
    pub weight: Option<u64>,
    pub oracle_weight: Option<u64>,
    pub reference: Option<Reference>,
    /// `weight / reference`, or `reference / weight` for maximisation
    /// runs, so that it is always at least 1 for a correct optimum.
    pub ratio: Option<Ratio<u64>>,
    pub bound: Option<Ratio<u64>>,
    pub phases: Option<usize>,
    pub wall_ms: f64,
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(instance: impl Into<String>, algorithm: Algorithm, lengths: impl Into<String>, n: usize) -> Self {
        RunReport {
            instance: instance.into(),
            algorithm,
            lengths: lengths.into(),
            n,
            weight: None,
            oracle_weight: None,
            reference: None,
            ratio: None,
            bound: None,
            phases: None,
            wall_ms: 0.0,
            error: None,
        }
    }

    /// Fills `ratio` from `weight` and a reference weight. A zero reference
    /// with zero weight counts as ratio 1.
    pub fn set_reference(&mut self, reference: Reference, value: u64, maximise: bool) {
        self.reference = Some(reference);
        if reference == Reference::Oracle {
            self.oracle_weight = Some(value);
        }
        let Some(w) = self.weight else { return };
        let (num, den) = if maximise { (value, w) } else { (w, value) };
        self.ratio = match (num, den) {
            (0, 0) => Some(Ratio::from_integer(1)),
            (_, 0) => None,
            _ => Some(Ratio::new(num, den)),
        };
    }

    /// `false` only when both ratio and bound are known and the ratio is
    /// larger.
    pub fn within_bound(&self) -> bool {
        match (self.ratio, self.bound) {
            (Some(r), Some(b)) => r <= b,
            _ => true,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }

    pub fn csv_header() -> &'static [&'static str] {
        &[
            "instance", "algorithm", "lengths", "n", "weight", "oracle_weight", "reference", "ratio", "bound", "phases",
            "wall_ms", "error",
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        let reference = self.reference.map(|r| match r {
            Reference::Oracle => "oracle",
            Reference::Formula => "formula",
            Reference::InputCover => "input-cover",
        });
        vec![
            self.instance.clone(),
            self.algorithm.to_string(),
            self.lengths.clone(),
            self.n.to_string(),
            opt(&self.weight),
            opt(&self.oracle_weight),
            opt(&reference),
            opt(&self.ratio),
            opt(&self.bound),
            opt(&self.phases),
            format!("{:.3}", self.wall_ms),
            opt(&self.error),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Reports as CSV (with header) or as a JSON array.
pub fn render(reports: &[RunReport], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(reports).expect("plain structs") + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(RunReport::csv_header()).expect("in-memory write");
            for r in reports {
                w.write_record(r.csv_record()).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
    }
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_ratio(text: &str) -> Option<Ratio<u64>> {
    match text.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (u64::from_str(a).ok()?, u64::from_str(b).ok()?);
            (b != 0).then(|| Ratio::new(a, b))
        }
        None => u64::from_str(text).ok().map(Ratio::from_integer),
    }
}
