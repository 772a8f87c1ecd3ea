use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

/// Significant digits kept in serialized numbers.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn ser_sig<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

fn ser_sig_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_sig(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Compared against a published value.
    Paper,
    /// Computed here, cross-checked internally if at all.
    Computed,
    /// Supplied from outside and not recomputed.
    External,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Output {
    #[serde(serialize_with = "ser_sig")]
    pub value: f64,
    #[serde(serialize_with = "ser_sig_opt")]
    pub tolerance: Option<f64>,
    #[serde(serialize_with = "ser_sig_opt")]
    pub target: Option<f64>,
    #[serde(serialize_with = "ser_sig_opt")]
    pub deviation: Option<f64>,
    pub provenance: Provenance,
}

impl Output {
    pub fn computed(value: f64) -> Self {
        Self { value, tolerance: None, target: None, deviation: None, provenance: Provenance::Computed }
    }

    pub fn paper(value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance: Some(tolerance),
            target: Some(target),
            deviation: Some((value - target).abs()),
            provenance: Provenance::Paper,
        }
    }

    pub fn external(value: f64) -> Self {
        Self { provenance: Provenance::External, ..Self::computed(value) }
    }

    pub fn within_tolerance(&self) -> bool {
        match (self.deviation, self.tolerance) {
            (Some(d), Some(t)) => d <= t,
            _ => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Conjectural,
    Undecided,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Verified => "verified",
            Status::Conjectural => "conjectural",
            Status::Undecided => "undecided",
            Status::Failed => "failed",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub status: Status,
    #[serde(serialize_with = "ser_sig_opt")]
    pub margin: Option<f64>,
    /// Output keys the claim rests on.
    #[serde(default)]
    pub depends_on: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub pipeline: String,
    pub inputs: BTreeMap<String, serde_json::Value>,
    pub outputs: BTreeMap<String, Output>,
    pub verdicts: Vec<Verdict>,
    #[serde(serialize_with = "ser_sig")]
    pub runtime_ms: f64,
}

impl AnalysisReport {
    pub fn new(pipeline: &str) -> Self {
        Self {
            pipeline: pipeline.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            verdicts: Vec::new(),
            runtime_ms: 0.0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<serde_json::Value>) -> &mut Self {
        let v = match value.into() {
            serde_json::Value::Number(n) => match n.as_f64() {
                Some(x) if n.is_f64() => serde_json::json!(round_sig(x)),
                _ => serde_json::Value::Number(n),
            },
            other => other,
        };
        self.inputs.insert(key.to_string(), v);
        self
    }

    pub fn output(&mut self, key: &str, output: Output) -> &mut Self {
        self.outputs.insert(key.to_string(), output);
        self
    }

    pub fn verdict(&mut self, claim: &str, status: Status, margin: Option<f64>) -> &mut Self {
        self.verdict_on(claim, status, margin, &[])
    }

    /// A verdict resting on the named outputs; anything resting on an
    /// external input is at best conjectural.
    pub fn verdict_on(&mut self, claim: &str, status: Status, margin: Option<f64>, deps: &[&str]) -> &mut Self {
        let depends_on: Vec<String> = deps.iter().map(|d| d.to_string()).collect();
        let status = if status == Status::Verified && self.rests_on_external(&depends_on) {
            Status::Conjectural
        } else {
            status
        };
        self.verdicts.push(Verdict { claim: claim.to_string(), status, margin, depends_on });
        self
    }

    fn rests_on_external(&self, deps: &[String]) -> bool {
        deps.iter()
            .any(|d| self.outputs.get(d).is_some_and(|o| o.provenance == Provenance::External))
    }

    /// Verified when `ok`, failed otherwise.
    pub fn check(&mut self, claim: &str, ok: bool, margin: Option<f64>) -> &mut Self {
        self.verdict(claim, if ok { Status::Verified } else { Status::Failed }, margin)
    }

    pub fn check_on(&mut self, claim: &str, ok: bool, margin: Option<f64>, deps: &[&str]) -> &mut Self {
        self.verdict_on(claim, if ok { Status::Verified } else { Status::Failed }, margin, deps)
    }

    /// Records a paper comparison as both an output and a verdict.
    pub fn paper_value(&mut self, key: &str, claim: &str, value: f64, target: f64, tol: f64) -> &mut Self {
        let out = Output::paper(value, target, tol);
        let ok = out.within_tolerance();
        let margin = tol - out.deviation.unwrap_or(0.0);
        self.output(key, out);
        self.check_on(claim, ok, Some(margin), &[key])
    }

    pub fn any_failed(&self) -> bool {
        self.verdicts.iter().any(|v| v.status == Status::Failed)
    }

    /// Structural invariants of a report.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (k, o) in &self.outputs {
            if o.target.is_some() && o.deviation.is_none() {
                return Err(format!("output {k} has a target but no deviation"));
            }
        }
        for v in &self.verdicts {
            if let Some(d) = v.depends_on.iter().find(|d| !self.outputs.contains_key(*d)) {
                return Err(format!("verdict '{}' depends on missing output {d}", v.claim));
            }
            if v.status == Status::Verified && self.rests_on_external(&v.depends_on) {
                return Err(format!("verdict '{}' is verified but rests on external input", v.claim));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("{}  ({:.1} ms)\n", self.pipeline, self.runtime_ms);
        if !self.inputs.is_empty() {
            s.push_str("inputs\n");
            for (k, v) in &self.inputs {
                s.push_str(&format!("  {k:<28} {v}\n"));
            }
        }
        s.push_str("outputs\n");
        for (k, o) in &self.outputs {
            s.push_str(&format!("  {k:<28} {:>20}", fmt_num(o.value)));
            if let (Some(t), Some(d)) = (o.target, o.deviation) {
                s.push_str(&format!("   target {}  dev {:.2e}", fmt_num(t), d));
            }
            if o.provenance == Provenance::External {
                s.push_str("   (external)");
            }
            s.push('\n');
        }
        s.push_str("verdicts\n");
        for v in &self.verdicts {
            s.push_str(&format!("  [{:<11}] {}", v.status.to_string(), v.claim));
            if let Some(m) = v.margin {
                s.push_str(&format!("  (margin {})", fmt_num(m)));
            }
            s.push('\n');
        }
        s
    }
}

fn fmt_num(x: f64) -> String {
    let x = round_sig(x);
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e9) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Header plus rows, for `--csv`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|x| round_sig(*x).to_string()).collect());
    }

    /// `name,value,target,deviation` over a report's outputs.
    pub fn from_outputs(report: &AnalysisReport) -> Self {
        let opt = |x: Option<f64>| x.map(|v| round_sig(v).to_string()).unwrap_or_default();
        let mut t = Self::new(&["name", "value", "target", "deviation"]);
        t.rows = report
            .outputs
            .iter()
            .map(|(k, o)| vec![k.clone(), round_sig(o.value).to_string(), opt(o.target), opt(o.deviation)])
            .collect();
        t
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for row in &self.rows {
            wr.write_record(row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(182.21928685555612), 182.219286856);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(-1.0 / 3.0), -0.333333333333);
        assert!(round_sig(f64::NAN).is_nan());
    }

    #[test]
    fn external_outputs_downgrade_verified() {
        let mut r = AnalysisReport::new("t");
        r.output("k", Output::external(1.363));
        r.output("x", Output::computed(1.0));
        r.verdict_on("bound", Status::Verified, Some(0.1), &["k", "x"]);
        r.verdict_on("independent", Status::Verified, None, &["x"]);
        assert_eq!(r.verdicts[0].status, Status::Conjectural);
        assert_eq!(r.verdicts[1].status, Status::Verified);
        assert!(r.validate().is_ok());
        r.verdicts[0].status = Status::Verified;
        assert!(r.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut r = AnalysisReport::new("t");
        r.input("a", 0.1 + 0.2).input("n", 5);
        r.paper_value("x", "x matches", 1.0000001, 1.0, 1e-3);
        r.output("y", Output::computed(2.0 / 3.0));
        let back: AnalysisReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.inputs["a"], serde_json::json!(0.3));
        assert_eq!(back.inputs["n"], serde_json::json!(5));
        assert_eq!(back.outputs["y"].value, 0.666666666667);
        assert_eq!(back.verdicts[0].status, Status::Verified);
        assert!(back.validate().is_ok());
    }
}
