//! Run configuration: a strict JSON document assembled from a preset, a config file and flags.

use polyliouville::config::{ProblemConfig, Tolerances};
use polyliouville::search::{LinkingMode, SearchOptions};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

pub const PRESETS: &[(&str, &str)] = &[
    ("disc-k1", include_str!("../presets/disc-k1.json")),
    ("disc-k2", include_str!("../presets/disc-k2.json")),
    ("square-k1", include_str!("../presets/square-k1.json")),
    ("ball4-k1", include_str!("../presets/ball4-k1.json")),
];

#[cfg(test)]
pub const SCHEMA: &str = include_str!("../schema/run-config.schema.json");

fn default_sweep() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.025]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSettings {
    pub random_starts: usize,
    pub max_iterations: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        let d = SearchOptions::default();
        Self { random_starts: d.random_starts, max_iterations: d.max_iterations }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsSettings {
    pub orders: Vec<u32>,
}

impl Default for ConstantsSettings {
    fn default() -> Self {
        Self { orders: vec![1, 2, 3] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectraSettings {
    pub m_max: u32,
    pub k_max: u32,
    /// Boxes `(half_width, h)` for the numerical kernel count; empty to skip.
    pub kernel_boxes: Vec<[f64; 2]>,
    pub kernel_threshold: f64,
}

impl Default for SpectraSettings {
    fn default() -> Self {
        Self { m_max: 6, k_max: 10, kernel_boxes: vec![[12.0, 0.25]], kernel_threshold: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSettings {
    pub digits: usize,
    /// Grid resolution of the `phi` landscape per axis.
    pub landscape_points: usize,
    /// Random `(x, ξ)` pairs in the Green table.
    pub green_pairs: usize,
    /// Spacing of the physical grid for the ansatz dump.
    pub dump_h: f64,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self { digits: polyliouville::report::DEFAULT_DIGITS, landscape_points: 41, green_pairs: 64, dump_h: 0.02 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: Option<ProblemConfig>,
    #[serde(default = "default_sweep")]
    pub eps_sweep: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub search: SearchSettings,
    #[serde(default)]
    pub linking: Option<LinkingMode>,
    #[serde(default)]
    pub constants: ConstantsSettings,
    #[serde(default)]
    pub spectra: SpectraSettings,
    #[serde(default)]
    pub output: OutputSettings,
}

impl RunConfig {
    pub fn problem(&self) -> Result<&ProblemConfig, String> {
        self.problem.as_ref().ok_or_else(|| "this command needs a `problem` section (use --preset or --config)".into())
    }

    pub fn search_options(&self, analytic: bool) -> SearchOptions {
        let t = &self.tolerances;
        SearchOptions {
            random_starts: self.search.random_starts,
            seed: self.seed,
            grad_tol: Some(if analytic { t.search_gradient } else { t.search_gradient_grid }),
            max_iterations: self.search.max_iterations,
            degenerate_rel: t.degenerate,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Some(p) = &self.problem {
            p.validate().map_err(|e| e.to_string())?;
        }
        if self.eps_sweep.is_empty() || self.eps_sweep.iter().any(|e| !(e.is_finite() && *e > 0.0 && *e < 1.0)) {
            return Err("eps_sweep must be a non-empty list of values in (0, 1)".into());
        }
        if self.output.digits == 0 || self.output.digits > 17 {
            return Err("output.digits must lie in 1..=17".into());
        }
        if self.output.landscape_points < 2 || !(self.output.dump_h > 0.0) {
            return Err("output.landscape_points >= 2 and output.dump_h > 0 are required".into());
        }
        if self.constants.orders.iter().any(|m| *m == 0) {
            return Err("constants.orders must be positive".into());
        }
        Ok(())
    }
}

pub fn preset(name: &str) -> Result<Value, String> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            format!("unknown preset `{name}` (available: {})", names.join(", "))
        })?;
    serde_json::from_str(text).map_err(|e| format!("preset {name}: {e}"))
}

/// Recursive object merge; `patch` wins on conflicts, non-objects are replaced.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p,
    }
}

/// Flag-level overrides, applied after preset and config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub eps_sweep: Option<Vec<f64>>,
    pub eps: Option<f64>,
    pub m: Option<u32>,
    pub m_max: Option<u32>,
    pub k_max: Option<u32>,
    pub tolerances: Map<String, Value>,
}

impl Overrides {
    pub fn apply(&self, v: &mut Value) {
        let has_problem = v.get("problem").is_some_and(|p| !p.is_null());
        let mut patch = json!({});
        if let Some(s) = self.seed {
            patch["seed"] = json!(s);
        }
        if let Some(s) = &self.eps_sweep {
            patch["eps_sweep"] = json!(s);
        }
        if let Some(e) = self.eps {
            patch["problem"]["eps"] = json!(e);
        }
        if let Some(m) = self.m {
            patch["constants"]["orders"] = json!([m]);
            if has_problem {
                patch["problem"]["m"] = json!(m);
            }
        }
        if let Some(m) = self.m_max {
            patch["spectra"]["m_max"] = json!(m);
        }
        if let Some(k) = self.k_max {
            patch["spectra"]["k_max"] = json!(k);
        }
        if !self.tolerances.is_empty() {
            patch["tolerances"] = Value::Object(self.tolerances.clone());
        }
        merge(v, patch);
    }
}

/// Preset, then config file, then flags; the result must parse strictly.
pub fn resolve(preset_name: Option<&str>, file: Option<&str>, ov: &Overrides) -> Result<RunConfig, String> {
    let mut v = json!({});
    if let Some(p) = preset_name {
        merge(&mut v, preset(p)?);
    }
    if let Some(text) = file {
        let f: Value = serde_json::from_str(text).map_err(|e| format!("config file: {e}"))?;
        if !f.is_object() {
            return Err("config file must contain a JSON object".into());
        }
        merge(&mut v, f);
    }
    ov.apply(&mut v);
    let cfg: RunConfig = serde_json::from_value(v).map_err(|e| format!("config: {e}"))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for (name, _) in PRESETS {
            let c = resolve(Some(name), None, &Overrides::default()).unwrap();
            assert!(c.problem.is_some(), "{name}");
        }
    }

    #[test]
    fn layering_order() {
        let file = r#"{"seed": 5, "problem": {"eps": 0.1}}"#;
        let ov = Overrides { seed: Some(9), ..Default::default() };
        let c = resolve(Some("disc-k1"), Some(file), &ov).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.problem.unwrap().eps, 0.1);
        let c = resolve(Some("disc-k1"), Some(file), &Overrides::default()).unwrap();
        assert_eq!(c.seed, 5);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(resolve(None, Some(r#"{"sead": 1}"#), &Overrides::default()).is_err());
        assert!(resolve(None, Some(r#"{"search": {"starts": 1}}"#), &Overrides::default()).is_err());
        let mut t = Map::new();
        t.insert("bogus".into(), json!(1.0));
        assert!(resolve(None, None, &Overrides { tolerances: t, ..Default::default() }).is_err());
    }

    #[test]
    fn schema_lists_every_top_level_key() {
        let schema: Value = serde_json::from_str(SCHEMA).unwrap();
        let mut keys: Vec<String> = schema["properties"].as_object().unwrap().keys().cloned().collect();
        let cfg = resolve(Some("disc-k1"), None, &Overrides::default()).unwrap();
        let mut actual: Vec<String> = serde_json::to_value(&cfg).unwrap().as_object().unwrap().keys().cloned().collect();
        keys.sort();
        actual.sort();
        assert_eq!(keys, actual);
        assert_eq!(schema["additionalProperties"], json!(false));
        for section in ["tolerances", "search", "constants", "spectra", "output"] {
            let mut s: Vec<String> = schema["properties"][section]["properties"].as_object().unwrap().keys().cloned().collect();
            let mut a: Vec<String> = serde_json::to_value(&cfg).unwrap()[section].as_object().unwrap().keys().cloned().collect();
            s.sort();
            a.sort();
            assert_eq!(s, a, "{section}");
        }
    }
}
