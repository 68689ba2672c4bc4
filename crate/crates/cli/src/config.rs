//! TOML run configuration.
//!
//! ```toml
//! flow = "pan-yang"
//! frame_count = 11
//!
//! [initial]            # exactly one of: mean/cos/sin, coefficients, samples, polygon
//! mean = 1.0
//! cos = [0.0, 0.2]
//!
//! [controls]           # any IntegratorControls field
//! t_max = 10.0
//!
//! [outputs]
//! svg = "svg"
//! ```

use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use curveflow::spectrum::DEFAULT_TRUNCATION;
use curveflow::{
    project_from_samples, spectrum_from_polygon, IntegratorControls, NonlocalTerm, SupportSpectrum,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

pub const DEFAULT_FRAME_COUNT: usize = 11;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("line {line}: field `{field}`: {reason}")]
    Field {
        line: usize,
        field: &'static str,
        reason: String,
    },
    #[error("missing [initial] table")]
    MissingInitial,
    #[error("missing `flow`")]
    MissingFlow,
    #[error("{path} line {line}: {reason}")]
    Record {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Curve(#[from] curveflow::Error),
}

/// Where the initial curve comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSource {
    Inline {
        mean: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
        truncation: Option<usize>,
    },
    /// CSV rows `n,a_n,b_n`; row `n = 0` carries the mean.
    Coefficients {
        path: PathBuf,
        truncation: Option<usize>,
    },
    /// One support value per line on the uniform grid `θ_j = 2πj/M`.
    Samples {
        path: PathBuf,
        truncation: Option<usize>,
    },
    /// CSV rows `x,y`, counter-clockwise.
    Polygon {
        path: PathBuf,
        truncation: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub timeseries: PathBuf,
    pub trajectory: PathBuf,
    pub frames: PathBuf,
    /// Directory for `frame_00000.svg`, ... Nothing is drawn when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    pub reports: PathBuf,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            timeseries: "timeseries.csv".into(),
            trajectory: "trajectory.jsonl".into(),
            frames: "frames.jsonl".into(),
            svg: None,
            reports: "reports.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub initial: InitialSource,
    pub flow: NonlocalTerm,
    pub controls: IntegratorControls,
    pub outputs: Outputs,
    pub frame_count: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    initial: Option<Spanned<RawInitial>>,
    flow: Option<Spanned<String>>,
    #[serde(default)]
    controls: Option<Spanned<IntegratorControls>>,
    #[serde(default)]
    outputs: Outputs,
    frame_count: Option<Spanned<usize>>,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cos: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sin: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polygon: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<usize>,
}

#[derive(Serialize)]
struct CanonicalConfig<'a> {
    flow: String,
    frame_count: usize,
    initial: RawInitial,
    controls: &'a IntegratorControls,
    outputs: &'a Outputs,
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let field = |span: Range<usize>, field: &'static str, reason: String| ConfigError::Field {
        line: line_of(text, span),
        field,
        reason,
    };

    let flow = raw.flow.ok_or(ConfigError::MissingFlow)?;
    let term: NonlocalTerm = flow
        .get_ref()
        .parse()
        .map_err(|e: curveflow::Error| field(flow.span(), "flow", e.to_string()))?;

    let initial = raw.initial.ok_or(ConfigError::MissingInitial)?;
    let span = initial.span();
    let initial =
        resolve_initial(initial.into_inner()).map_err(|reason| field(span, "initial", reason))?;

    let controls = match raw.controls {
        Some(c) => {
            let span = c.span();
            let c = c.into_inner();
            c.validate()
                .map_err(|e| field(span, "controls", e.to_string()))?;
            c
        }
        None => IntegratorControls::default(),
    };

    let frame_count = match raw.frame_count {
        Some(f) if *f.get_ref() < 2 => {
            return Err(field(
                f.span(),
                "frame_count",
                format!("must be at least 2, got {}", f.get_ref()),
            ))
        }
        Some(f) => f.into_inner(),
        None => DEFAULT_FRAME_COUNT,
    };

    Ok(RunConfig {
        initial,
        flow: term,
        controls,
        outputs: raw.outputs,
        frame_count,
    })
}

fn resolve_initial(raw: RawInitial) -> Result<InitialSource, String> {
    let inline = raw.mean.is_some() || raw.cos.is_some() || raw.sin.is_some();
    let sources = [
        inline,
        raw.coefficients.is_some(),
        raw.samples.is_some(),
        raw.polygon.is_some(),
    ];
    match sources.iter().filter(|&&s| s).count() {
        0 => {
            return Err(
                "no initial curve given (mean/cos/sin, coefficients, samples or polygon)".into(),
            )
        }
        1 => {}
        _ => return Err("more than one initial curve source given".into()),
    }
    let truncation = raw.truncation;
    if let Some(n) = truncation {
        if n < 2 {
            return Err(format!("truncation must be at least 2, got {n}"));
        }
    }
    Ok(if inline {
        let mean = raw.mean.ok_or("inline coefficients need `mean`")?;
        InitialSource::Inline {
            mean,
            cos: raw.cos.unwrap_or_default(),
            sin: raw.sin.unwrap_or_default(),
            truncation,
        }
    } else if let Some(path) = raw.coefficients {
        InitialSource::Coefficients { path, truncation }
    } else if let Some(path) = raw.samples {
        InitialSource::Samples { path, truncation }
    } else {
        InitialSource::Polygon {
            path: raw.polygon.expect("one source is set"),
            truncation,
        }
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        parse_config(&read(path)?)
    }

    /// Canonical TOML text; `parse_config` of it gives back `self`.
    pub fn to_toml(&self) -> String {
        let initial = match &self.initial {
            InitialSource::Inline {
                mean,
                cos,
                sin,
                truncation,
            } => RawInitial {
                mean: Some(*mean),
                cos: Some(cos.clone()),
                sin: Some(sin.clone()),
                truncation: *truncation,
                ..Default::default()
            },
            InitialSource::Coefficients { path, truncation } => RawInitial {
                coefficients: Some(path.clone()),
                truncation: *truncation,
                ..Default::default()
            },
            InitialSource::Samples { path, truncation } => RawInitial {
                samples: Some(path.clone()),
                truncation: *truncation,
                ..Default::default()
            },
            InitialSource::Polygon { path, truncation } => RawInitial {
                polygon: Some(path.clone()),
                truncation: *truncation,
                ..Default::default()
            },
        };
        toml::to_string(&CanonicalConfig {
            flow: self.flow.to_string(),
            frame_count: self.frame_count,
            initial,
            controls: &self.controls,
            outputs: &self.outputs,
        })
        .expect("config serializes")
    }

    /// Builds the initial spectrum. Relative file paths are taken from `base`.
    pub fn initial_spectrum(&self, base: &Path) -> Result<SupportSpectrum, ConfigError> {
        match &self.initial {
            InitialSource::Inline {
                mean,
                cos,
                sin,
                truncation,
            } => Ok(match truncation {
                Some(n) => SupportSpectrum::with_truncation(*mean, cos.clone(), sin.clone(), *n)?,
                None => SupportSpectrum::new(*mean, cos.clone(), sin.clone())?,
            }),
            InitialSource::Coefficients { path, truncation } => {
                read_coefficients(&base.join(path), *truncation)
            }
            InitialSource::Samples { path, truncation } => {
                let path = base.join(path);
                let values = read_rows(&path, 1)?
                    .into_iter()
                    .map(|r| r[0])
                    .collect::<Vec<_>>();
                Ok(project_from_samples(
                    &values,
                    truncation.unwrap_or(DEFAULT_TRUNCATION),
                )?)
            }
            InitialSource::Polygon { path, truncation } => {
                let path = base.join(path);
                let vertices: Vec<[f64; 2]> = read_rows(&path, 2)?
                    .into_iter()
                    .map(|r| [r[0], r[1]])
                    .collect();
                Ok(spectrum_from_polygon(
                    &vertices,
                    truncation.unwrap_or(DEFAULT_TRUNCATION),
                )?)
            }
        }
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Numeric CSV rows of exactly `width` fields. Blank lines, `#` comments and
/// a non-numeric first line (a header) are skipped.
fn read_rows(path: &Path, width: usize) -> Result<Vec<Vec<f64>>, ConfigError> {
    let text = read(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Result<Vec<f64>, _> =
            line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        let record = |reason: String| ConfigError::Record {
            path: path.display().to_string(),
            line: i + 1,
            reason,
        };
        match fields {
            Ok(f) if f.len() == width => rows.push(f),
            Ok(f) => {
                return Err(record(format!(
                    "expected {width} fields, found {}",
                    f.len()
                )))
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(record(e.to_string())),
        }
    }
    Ok(rows)
}

fn read_coefficients(
    path: &Path,
    truncation: Option<usize>,
) -> Result<SupportSpectrum, ConfigError> {
    let rows = read_rows(path, 3)?;
    let record = |reason: String| ConfigError::Record {
        path: path.display().to_string(),
        line: 0,
        reason,
    };
    let mut mean = None;
    let mut cos = Vec::new();
    let mut sin = Vec::new();
    for r in rows {
        if r[0] < 0.0 || r[0].fract() != 0.0 {
            return Err(record(format!(
                "mode index {} is not a non-negative integer",
                r[0]
            )));
        }
        let n = r[0] as usize;
        if n == 0 {
            mean = Some(r[1]);
            continue;
        }
        if cos.len() < n {
            cos.resize(n, 0.0);
            sin.resize(n, 0.0);
        }
        cos[n - 1] = r[1];
        sin[n - 1] = r[2];
    }
    let mean = mean.ok_or_else(|| record("no row for n = 0 (the mean)".into()))?;
    Ok(match truncation {
        Some(n) => SupportSpectrum::with_truncation(mean, cos, sin, n)?,
        None => SupportSpectrum::new(mean, cos, sin)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "flow = \"pan-yang\"\n[initial]\nmean = 1\ncos = [0, 0.2]\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.flow, NonlocalTerm::PanYang);
        assert_eq!(c.controls, IntegratorControls::default());
        assert_eq!(c.outputs, Outputs::default());
        assert_eq!(c.frame_count, DEFAULT_FRAME_COUNT);
        let s = c.initial_spectrum(Path::new(".")).unwrap();
        assert_eq!(s.mode(2), (0.2, 0.0));
    }

    #[test]
    fn powersum_flow_parses() {
        let c = parse_config(&MINIMAL.replace("pan-yang", "powersum:1,1,0")).unwrap();
        assert_eq!(c.flow, "powersum:1,1,0".parse().unwrap());
    }

    #[test]
    fn unknown_flow_names_tag_and_line() {
        let text = format!("# run\n{}", MINIMAL.replace("pan-yang", "banana"));
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("banana"), "{msg}");
        assert!(msg.starts_with("line 2: field `flow`"), "{msg}");
    }

    #[test]
    fn initial_source_errors() {
        let missing = parse_config("flow = \"pan-yang\"\n").unwrap_err();
        assert!(matches!(missing, ConfigError::MissingInitial));
        let two = parse_config(&format!("{MINIMAL}polygon = \"p.csv\"\n")).unwrap_err();
        assert!(two.to_string().contains("more than one"), "{two}");
        let malformed =
            parse_config("flow = \"pan-yang\"\n[initial]\nmean = 1\ncos = [0, \"x\"]\n")
                .unwrap_err()
                .to_string();
        assert!(malformed.contains("line 4"), "{malformed}");
        let few = parse_config(&format!("frame_count = 1\n{MINIMAL}"))
            .unwrap_err()
            .to_string();
        assert!(few.contains("frame_count"), "{few}");
        let typo = parse_config(&format!("{MINIMAL}[controls]\nt_maks = 3\n"))
            .unwrap_err()
            .to_string();
        assert!(typo.contains("t_maks"), "{typo}");
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.controls.t_max = 0.1 + 0.2;
        c.outputs.svg = Some("svg".into());
        c.flow = "powersum:0.3,1,0;-1e-3,0,0.5".parse().unwrap();
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
        c.initial = InitialSource::Polygon {
            path: "sq.csv".into(),
            truncation: Some(16),
        };
        c.flow = NonlocalTerm::Constant(-1.0);
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn coefficient_csv() {
        let dir = std::env::temp_dir().join(format!("curveflow-coeffs-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("c.csv"), "n,a_n,b_n\n0,1,0\n2,0.2,0\n3,0,0.05\n").unwrap();
        let cfg =
            parse_config("flow = \"pan-yang\"\n[initial]\ncoefficients = \"c.csv\"\n").unwrap();
        let s = cfg.initial_spectrum(&dir).unwrap();
        assert_eq!(
            (s.mean(), s.mode(2), s.mode(3)),
            (1.0, (0.2, 0.0), (0.0, 0.05))
        );
        fs::write(dir.join("c.csv"), "0,1,0\n2,0.2\n").unwrap();
        let err = cfg.initial_spectrum(&dir).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        fs::remove_dir_all(&dir).unwrap();
    }
}
