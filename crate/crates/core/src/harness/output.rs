use crate::error::{Error, Result};
use crate::report::MetricRecord;

pub const CSV_HEADER: &str = "metric,indices,mode,num,den,value,ci95,samples,seed";

/// A JSON array of records.
pub fn to_json(records: &[MetricRecord]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(|e| Error::Format(e.to_string()))
}

/// One CSV row per record; indices are joined with `;`, missing fields are
/// empty.
pub fn to_csv(records: &[MetricRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let indices: Vec<String> = r.indices.iter().map(|i| i.to_string()).collect();
        let row = [
            r.metric.clone(),
            indices.join(";"),
            r.mode.clone(),
            r.num.clone().unwrap_or_default(),
            r.den.clone().unwrap_or_default(),
            format!("{}", r.value),
            r.ci95.map(|c| c.to_string()).unwrap_or_default(),
            r.samples.map(|s| s.to_string()).unwrap_or_default(),
            r.seed.clone().unwrap_or_default(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::MetricReport;

    #[test]
    fn exact_and_sampled_share_a_schema() {
        let recs = vec![
            MetricReport::exact("mab", vec![0, 1], 4, 81).record(),
            MetricReport::bernoulli("ngcw", vec![], 5, 100, 42, 1.0).record(),
        ];
        let json: serde_json::Value = serde_json::from_str(&to_json(&recs).unwrap()).unwrap();
        assert_eq!(json[0]["num"], "4");
        assert_eq!(json[0]["den"], "81");
        assert!(json[0]["ci95"].is_null());
        assert!(json[1]["num"].is_null());
        assert_eq!(json[1]["seed"], "42");
        assert_eq!(json[1]["samples"], 100);
        let csv = to_csv(&recs);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("mab,0;1,exact,4,81,"));
        assert!(lines[2].starts_with("ngcw,,sampled,,,0.05,"));
    }
}
