use hyperlab::{BaseMetric, FieldJet, Matrix, ModelSpec, SearchConfig, TargetMetric};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub m_plus_1: usize,
    pub n: usize,
}

/// A named preset or explicit rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Preset(String),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptedSpec {
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DphiSpec {
    Rows(Vec<Vec<f64>>),
    Adapted(AdaptedSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Invariants,
    StressEnergy,
    Dec,
    Symbol,
    Classify,
    DetPoly,
}

pub const ALL_CHECKS: [CheckName; 6] = [
    CheckName::Invariants,
    CheckName::StressEnergy,
    CheckName::Dec,
    CheckName::Symbol,
    CheckName::Classify,
    CheckName::DetPoly,
];

fn minkowski() -> MetricSpec {
    MetricSpec::Preset("minkowski".into())
}

fn identity() -> MetricSpec {
    MetricSpec::Preset("identity".into())
}

fn all_checks() -> Vec<CheckName> {
    ALL_CHECKS.to_vec()
}

fn dec_samples() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub dims: Dims,
    #[serde(default = "minkowski")]
    pub metric_g: MetricSpec,
    #[serde(default = "identity")]
    pub metric_h: MetricSpec,
    pub dphi: DphiSpec,
    #[serde(default)]
    pub s: f64,
    pub model: ModelSpec,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default = "all_checks")]
    pub checks: Vec<CheckName>,
    #[serde(default = "dec_samples")]
    pub dec_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl AnalysisConfig {
    pub fn wants(&self, c: CheckName) -> bool {
        self.checks.contains(&c)
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::new("invalid-config", message)
}

fn matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, what: &str) -> CliResult<Matrix> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::new(
            "dimension-mismatch",
            format!("{what} must be {nrows}x{ncols}"),
        ));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn is_preset(spec: &MetricSpec, name: &str) -> bool {
    matches!(spec, MetricSpec::Preset(p) if p == name)
}

/// Builds the jet after checking dimensions and signatures. Also returns the
/// adapted lambdas when the Jacobian was given that way.
pub fn build_jet(cfg: &AnalysisConfig) -> CliResult<(FieldJet, Option<Vec<f64>>)> {
    let Dims { m_plus_1: big_n, n } = cfg.dims;
    if big_n < 2 || n < 1 {
        return Err(invalid("dims need m_plus_1 >= 2 and n >= 1"));
    }
    cfg.search.validate()?;
    if cfg.dec_samples == 0 {
        return Err(invalid("dec_samples must be positive"));
    }
    let g = match &cfg.metric_g {
        MetricSpec::Preset(p) if p == "minkowski" => BaseMetric::minkowski(big_n),
        MetricSpec::Preset(p) => return Err(invalid(format!("unknown metric_g preset '{p}'"))),
        MetricSpec::Rows(r) => BaseMetric::new(matrix(r, big_n, big_n, "metric_g")?)?,
    };
    let h = match &cfg.metric_h {
        MetricSpec::Preset(p) if p == "identity" => TargetMetric::identity(n),
        MetricSpec::Preset(p) => return Err(invalid(format!("unknown metric_h preset '{p}'"))),
        MetricSpec::Rows(r) => TargetMetric::new(matrix(r, n, n, "metric_h")?)?,
    };
    match &cfg.dphi {
        DphiSpec::Rows(r) => {
            let dphi = matrix(r, big_n, n, "dphi")?;
            Ok((FieldJet::new(g, h, dphi, cfg.s)?, None))
        }
        DphiSpec::Adapted(a) => {
            if !is_preset(&cfg.metric_g, "minkowski") || !is_preset(&cfg.metric_h, "identity") {
                return Err(invalid(
                    "adapted lambdas require the minkowski and identity presets",
                ));
            }
            if a.lambdas.len() != big_n {
                return Err(CliError::new(
                    "dimension-mismatch",
                    format!("expected {big_n} lambdas, got {}", a.lambdas.len()),
                ));
            }
            let adapted = FieldJet::adapted(&a.lambdas, n)?;
            let jet = FieldJet::new(adapted.jet.g, adapted.jet.h, adapted.jet.dphi, cfg.s)?;
            Ok((jet, Some(a.lambdas.clone())))
        }
    }
}

/// Parses `key=value` with a JSON value; bare words become strings and
/// comma lists become arrays.
pub fn parse_assignment(item: &str) -> CliResult<(String, Value)> {
    let (k, v) = item.split_once('=').ok_or_else(|| {
        CliError::new(
            "invalid-argument",
            format!("expected key=value, got '{item}'"),
        )
    })?;
    let key = k.trim();
    if key.is_empty() {
        return Err(CliError::new(
            "invalid-argument",
            format!("empty key in '{item}'"),
        ));
    }
    let v = v.trim();
    let value = serde_json::from_str(v).unwrap_or_else(|_| {
        if v.contains(',') {
            Value::Array(
                v.split(',')
                    .map(|x| {
                        serde_json::from_str(x.trim())
                            .unwrap_or_else(|_| Value::String(x.trim().into()))
                    })
                    .collect(),
            )
        } else {
            Value::String(v.into())
        }
    });
    Ok((key.to_string(), value))
}

fn object_from(items: &[String], base: Map<String, Value>) -> CliResult<Map<String, Value>> {
    let mut obj = base;
    for item in items {
        let (k, v) = parse_assignment(item)?;
        obj.insert(k, v);
    }
    Ok(obj)
}

pub fn model_from_args(name: &str, params: &[String]) -> CliResult<ModelSpec> {
    let mut base = Map::new();
    base.insert("name".into(), Value::String(name.into()));
    let obj = object_from(params, base)?;
    serde_json::from_value(Value::Object(obj))
        .map_err(|e| CliError::new("invalid-model", e.to_string()))
}

pub fn search_from_args(items: &[String]) -> CliResult<SearchConfig> {
    let obj = object_from(items, Map::new())?;
    let search: SearchConfig = serde_json::from_value(Value::Object(obj))
        .map_err(|e| CliError::new("invalid-search", e.to_string()))?;
    search.validate()?;
    Ok(search)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_parse_numbers_words_and_lists() {
        assert_eq!(
            parse_assignment("c1=0.25").unwrap().1,
            serde_json::json!(0.25)
        );
        assert_eq!(
            parse_assignment("x=abc").unwrap().1,
            serde_json::json!("abc")
        );
        assert_eq!(
            parse_assignment("coeffs=1,0.5").unwrap().1,
            serde_json::json!([1, 0.5])
        );
        assert!(parse_assignment("novalue").is_err());
    }

    #[test]
    fn model_params_fill_defaults() {
        let m = model_from_args("skyrme", &["c1=2".into()]).unwrap();
        assert_eq!(m, ModelSpec::Skyrme { c1: 2.0, c2: 0.5 });
        assert!(model_from_args("skyrme", &["c3=1".into()]).is_err());
        assert!(model_from_args("nosuch", &[]).is_err());
    }

    #[test]
    fn config_defaults_round_trip() {
        let cfg: AnalysisConfig = serde_json::from_str(
            r#"{"dims":{"m_plus_1":4,"n":3},"dphi":{"lambdas":[1,0,0,0]},"model":{"name":"wave-map"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.checks.len(), 6);
        let again: AnalysisConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<AnalysisConfig, _> = serde_json::from_str(
            r#"{"dims":{"m_plus_1":4,"n":3},"dphi":{"lambdas":[1,0,0,0]},"model":{"name":"wave-map"},"extra":1}"#,
        );
        assert!(r.is_err());
    }
}
