//! Run configuration: command-line flags, optionally overridden by a TOML
//! file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thurston4::{GeometryKind, GeometrySpec, MetricParams, Point};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T: f64 = 10.0;

/// Everything a subcommand needs, after flags and file are merged.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: GeometrySpec,
    pub seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Keys accepted in the config file. Every key is optional; present keys
/// win over the corresponding flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub geometry: Option<GeometryKind>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Raw flag values before merging.
#[derive(Debug, Clone, Default)]
pub struct FlagConfig {
    pub geometry: GeometryKind,
    pub params: Vec<(String, f64)>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("'{v}' is not a number (in '{s}')"))?;
    Ok((k.trim().to_string(), v))
}

pub fn parse_point(s: &str) -> Result<Point, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("expected four comma-separated numbers, got '{s}'"))?;
    match parts.as_slice() {
        [t, x, y, z] => Ok(Point::new(*t, *x, *y, *z)),
        _ => Err(format!("expected four comma-separated numbers, got '{s}'")),
    }
}

/// Builds metric parameters from `key=value` assignments. Unassigned
/// `tau` default to 1, `alpha` to 0, `(m, n)` to `(5, 6)`.
pub fn build_params(
    kind: GeometryKind,
    assignments: &BTreeMap<String, f64>,
) -> Result<MetricParams, String> {
    let allowed: &[&str] = match kind {
        GeometryKind::Sol40 => &[],
        GeometryKind::Sol4mn => &["m", "n"],
        GeometryKind::Sol41 => &["tau1", "tau2"],
        GeometryKind::Nil4 => &["tau1", "tau2", "tau3", "alpha"],
    };
    if let Some(bad) = assignments.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!(
            "parameter '{bad}' does not apply to {kind} (allowed: {})",
            if allowed.is_empty() {
                "none".to_string()
            } else {
                allowed.join(", ")
            }
        ));
    }
    let get = |k: &str, default: f64| assignments.get(k).copied().unwrap_or(default);
    Ok(match kind {
        GeometryKind::Sol40 => MetricParams::Sol40,
        GeometryKind::Sol4mn => MetricParams::Sol4mn {
            m: get("m", 5.0),
            n: get("n", 6.0),
        },
        GeometryKind::Sol41 => MetricParams::Sol41 {
            tau1: get("tau1", 1.0),
            tau2: get("tau2", 1.0),
        },
        GeometryKind::Nil4 => MetricParams::Nil4 {
            tau1: get("tau1", 1.0),
            tau2: get("tau2", 1.0),
            tau3: get("tau3", 1.0),
            alpha: get("alpha", 0.0),
        },
    })
}

pub fn merge(flags: FlagConfig, file: Option<FileConfig>) -> Result<RunConfig, String> {
    let file = file.unwrap_or_default();
    let kind = file.geometry.unwrap_or(flags.geometry);
    let mut assignments: BTreeMap<String, f64> = flags.params.into_iter().collect();
    assignments.extend(file.params);
    let params = build_params(kind, &assignments)?;
    let spec = GeometrySpec::new(params).map_err(|e| e.to_string())?;
    let dt = file.dt.or(flags.dt).unwrap_or(DEFAULT_DT);
    let t_end = file.t_end.or(flags.t_end).unwrap_or(DEFAULT_T);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(format!("--dt must be positive, got {dt}"));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(format!("--T must be positive, got {t_end}"));
    }
    let threads = file.threads.or(flags.threads);
    if threads == Some(0) {
        return Err("--threads must be at least 1".into());
    }
    Ok(RunConfig {
        spec,
        seed: file.seed.or(flags.seed).unwrap_or(DEFAULT_SEED),
        dt,
        t_end,
        threads,
        out: file.out.or(flags.out),
    })
}
