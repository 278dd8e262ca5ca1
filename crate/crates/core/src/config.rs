//! Run configuration text format and CSV export.
//!
//! ```text
//! # comment
//! [device]
//! R_l = 50
//! R_r = 50
//! R_f = 1000
//! R_0 = 50
//! reactance_kind = inductive     # none | constant | inductive | capacitive
//! reactance_value = 1e-3
//!
//! [temperatures]
//! T_b = 0.1
//!
//! [sweep]
//! omega_min = 1e2
//! omega_max = 1e8
//! points = 13
//! spacing = logarithmic          # linear | logarithmic
//!
//! [run]
//! units = SI                     # SI | normalized
//! tolerance = 1e-9
//! ```
//!
//! Only the four resistances are required.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::device::{DeviceParams, ReactanceSpec, Resistances};
use crate::error::Error;
use crate::field::{PhysicalConstants, PortId, ThermalEnvironment, Units};
use crate::noise::{NoiseReport, Spacing, SweepSpec};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_OMEGA_MIN: f64 = 1e2;
pub const DEFAULT_OMEGA_MAX: f64 = 1e8;
pub const DEFAULT_POINTS: usize = 13;

pub const CSV_HEADER: &str =
    "omega,sigma_total,term_r,term_f,term_a,term_b,xi,noise_figure_db,back_action";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config is not valid UTF-8 (byte {0})")]
    NotUtf8(usize),
    #[error("unknown section [{name}] at line {line}")]
    UnknownSection { line: usize, name: String },
    #[error("key {key} outside of any section at line {line}")]
    KeyOutsideSection { line: usize, key: String },
    #[error("unknown key {key} at line {line}")]
    UnknownKey { line: usize, key: String },
    #[error("duplicate key {key} at line {line}")]
    DuplicateKey { line: usize, key: String },
    #[error("expected `key = value` at line {line}")]
    Malformed { line: usize },
    #[error("invalid value {value:?} for {key} at line {line}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("missing required key {0}")]
    MissingKey(&'static str),
    #[error("{0}")]
    Invalid(#[from] Error),
    #[error("reactance_value is required for reactance_kind {0}")]
    MissingReactanceValue(&'static str),
    #[error("reactance_value given with reactance_kind none at line {0}")]
    UnexpectedReactanceValue(usize),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("cannot write CSV for an empty report list")]
    EmptyReports,
}

/// Parsed run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub params: DeviceParams,
    pub sweep: SweepSpec,
    pub units: Units,
    pub tolerance: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Device,
    Temperatures,
    Sweep,
    Run,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        match name {
            "device" => Some(Section::Device),
            "temperatures" => Some(Section::Temperatures),
            "sweep" => Some(Section::Sweep),
            "run" => Some(Section::Run),
            _ => None,
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::Device => &["R_l", "R_r", "R_f", "R_0", "reactance_kind", "reactance_value"],
            Section::Temperatures => &["T_l", "T_r", "T_f", "T_a", "T_b"],
            Section::Sweep => &["omega_min", "omega_max", "points", "spacing"],
            Section::Run => &["units", "tolerance"],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ReactanceKind {
    None,
    Constant,
    Inductive,
    Capacitive,
}

impl ReactanceKind {
    fn name(self) -> &'static str {
        match self {
            ReactanceKind::None => "none",
            ReactanceKind::Constant => "constant",
            ReactanceKind::Inductive => "inductive",
            ReactanceKind::Capacitive => "capacitive",
        }
    }
}

#[derive(Default)]
struct Raw {
    r_l: Option<f64>,
    r_r: Option<f64>,
    r_f: Option<f64>,
    r_0: Option<f64>,
    kind: Option<ReactanceKind>,
    value: Option<(f64, usize)>,
    temps: [f64; 5],
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    points: Option<usize>,
    spacing: Option<Spacing>,
    units: Option<Units>,
    tolerance: Option<f64>,
}

fn number(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(invalid(line, key, value)),
    }
}

fn invalid(line: usize, key: &str, value: &str) -> ConfigError {
    ConfigError::InvalidValue {
        line,
        key: key.to_owned(),
        value: value.to_owned(),
    }
}

/// Parses a configuration file. Every failure carries the offending line or
/// key.
pub fn parse_config(bytes: &[u8]) -> Result<RunConfig, ConfigError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ConfigError::NotUtf8(e.valid_up_to()))?;

    let mut raw = Raw::default();
    let mut section: Option<Section> = None;
    let mut seen: HashSet<(Section, &str)> = HashSet::new();

    for (idx, full_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match full_line.split_once('#') {
            Some((before, _)) => before,
            None => full_line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }

        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or(ConfigError::Malformed { line })?
                .trim();
            section = Some(Section::parse(name).ok_or_else(|| ConfigError::UnknownSection {
                line,
                name: name.to_owned(),
            })?);
            continue;
        }

        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or(ConfigError::Malformed { line })?;
        if key.is_empty() {
            return Err(ConfigError::Malformed { line });
        }
        let sec = section.ok_or_else(|| ConfigError::KeyOutsideSection {
            line,
            key: key.to_owned(),
        })?;
        let key = *sec
            .keys()
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| ConfigError::UnknownKey {
                line,
                key: key.to_owned(),
            })?;
        if !seen.insert((sec, key)) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_owned(),
            });
        }

        match key {
            "R_l" => raw.r_l = Some(number(line, key, value)?),
            "R_r" => raw.r_r = Some(number(line, key, value)?),
            "R_f" => raw.r_f = Some(number(line, key, value)?),
            "R_0" => raw.r_0 = Some(number(line, key, value)?),
            "reactance_kind" => {
                raw.kind = Some(match value {
                    "none" => ReactanceKind::None,
                    "constant" => ReactanceKind::Constant,
                    "inductive" => ReactanceKind::Inductive,
                    "capacitive" => ReactanceKind::Capacitive,
                    _ => return Err(invalid(line, key, value)),
                })
            }
            "reactance_value" => raw.value = Some((number(line, key, value)?, line)),
            "T_l" | "T_r" | "T_f" | "T_a" | "T_b" => {
                let port = PortId::ALL
                    .into_iter()
                    .find(|p| key[2..] == *p.label())
                    .expect("temperature keys map to ports");
                let t = number(line, key, value)?;
                if t < 0.0 {
                    return Err(Error::InvalidPortTemperature { port, value: t }.into());
                }
                raw.temps[port.index()] = t;
            }
            "omega_min" => raw.omega_min = Some(number(line, key, value)?),
            "omega_max" => raw.omega_max = Some(number(line, key, value)?),
            "points" => {
                raw.points = Some(value.parse::<usize>().map_err(|_| invalid(line, key, value))?)
            }
            "spacing" => {
                raw.spacing = Some(match value {
                    "linear" => Spacing::Linear,
                    "logarithmic" => Spacing::Logarithmic,
                    _ => return Err(invalid(line, key, value)),
                })
            }
            "units" => {
                raw.units = Some(match value {
                    "SI" | "si" => Units::Si,
                    "normalized" => Units::Normalized,
                    _ => return Err(invalid(line, key, value)),
                })
            }
            "tolerance" => raw.tolerance = Some(number(line, key, value)?),
            _ => unreachable!("key list and match arms agree"),
        }
    }

    build(raw)
}

fn build(raw: Raw) -> Result<RunConfig, ConfigError> {
    let resistances = Resistances {
        r_l: raw.r_l.ok_or(ConfigError::MissingKey("R_l"))?,
        r_r: raw.r_r.ok_or(ConfigError::MissingKey("R_r"))?,
        r_f: raw.r_f.ok_or(ConfigError::MissingKey("R_f"))?,
        r_0: raw.r_0.ok_or(ConfigError::MissingKey("R_0"))?,
    };

    let kind = raw.kind.unwrap_or(ReactanceKind::None);
    let reactance = match (kind, raw.value) {
        (ReactanceKind::None, None) => ReactanceSpec::None,
        (ReactanceKind::None, Some((_, line))) => {
            return Err(ConfigError::UnexpectedReactanceValue(line))
        }
        (k, None) => return Err(ConfigError::MissingReactanceValue(k.name())),
        (ReactanceKind::Constant, Some((x, _))) => ReactanceSpec::Constant(x),
        (ReactanceKind::Inductive, Some((x, _))) => ReactanceSpec::Inductive(x),
        (ReactanceKind::Capacitive, Some((x, _))) => ReactanceSpec::Capacitive(x),
    };

    let env = PortId::ALL
        .into_iter()
        .try_fold(ThermalEnvironment::vacuum(), |env, p| {
            env.with(p, raw.temps[p.index()])
        })?;

    let units = raw.units.unwrap_or_default();
    let params = DeviceParams::new(
        resistances,
        reactance,
        env,
        PhysicalConstants::for_units(units),
    )?;

    let sweep = SweepSpec::new(
        raw.omega_min.unwrap_or(DEFAULT_OMEGA_MIN),
        raw.omega_max.unwrap_or(DEFAULT_OMEGA_MAX),
        raw.points.unwrap_or(DEFAULT_POINTS),
        raw.spacing.unwrap_or_default(),
    )?;

    let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if tolerance <= 0.0 {
        return Err(ConfigError::InvalidTolerance(tolerance));
    }

    Ok(RunConfig {
        params,
        sweep,
        units,
        tolerance,
    })
}

/// Canonical text form. `parse_config(render_config(c)) == c`.
pub fn render_config(config: &RunConfig) -> String {
    let p = &config.params;
    let mut out = String::new();
    // f64 Debug output is the shortest string that parses back to the same bits.
    let _ = writeln!(out, "[device]");
    let _ = writeln!(out, "R_l = {:?}", p.r_l());
    let _ = writeln!(out, "R_r = {:?}", p.r_r());
    let _ = writeln!(out, "R_f = {:?}", p.r_f());
    let _ = writeln!(out, "R_0 = {:?}", p.r_0());
    let (kind, value) = match *p.reactance() {
        ReactanceSpec::None => (ReactanceKind::None, None),
        ReactanceSpec::Constant(x) => (ReactanceKind::Constant, Some(x)),
        ReactanceSpec::Inductive(x) => (ReactanceKind::Inductive, Some(x)),
        ReactanceSpec::Capacitive(x) => (ReactanceKind::Capacitive, Some(x)),
    };
    let _ = writeln!(out, "reactance_kind = {}", kind.name());
    if let Some(x) = value {
        let _ = writeln!(out, "reactance_value = {x:?}");
    }

    let _ = writeln!(out, "\n[temperatures]");
    for port in PortId::ALL {
        let _ = writeln!(out, "T_{} = {:?}", port.label(), p.env().temperature(port));
    }

    let s = &config.sweep;
    let _ = writeln!(out, "\n[sweep]");
    let _ = writeln!(out, "omega_min = {:?}", s.omega_min());
    let _ = writeln!(out, "omega_max = {:?}", s.omega_max());
    let _ = writeln!(out, "points = {}", s.points());
    let spacing = match s.spacing() {
        Spacing::Linear => "linear",
        Spacing::Logarithmic => "logarithmic",
    };
    let _ = writeln!(out, "spacing = {spacing}");

    let _ = writeln!(out, "\n[run]");
    let units = match config.units {
        Units::Si => "SI",
        Units::Normalized => "normalized",
    };
    let _ = writeln!(out, "units = {units}");
    let _ = writeln!(out, "tolerance = {:?}", config.tolerance);
    out
}

fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a fixed header, one row per report, 17 significant digits and
/// LF line endings.
pub fn write_csv(reports: &[NoiseReport]) -> Result<String, ConfigError> {
    if reports.is_empty() {
        return Err(ConfigError::EmptyReports);
    }
    let mut out = String::with_capacity(64 + reports.len() * 220);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let fields = [
            r.omega,
            r.sigma_total,
            r.term_r,
            r.term_f,
            r.term_a,
            r.term_b,
            r.xi,
            r.noise_figure_db,
            r.back_action,
        ];
        let row: Vec<String> = fields.iter().map(|&x| csv_number(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::AngularFrequency;
    use crate::noise::added_noise;

    const MINIMAL: &str = "[device]\nR_l = 50\nR_r = 50\nR_f = 1000\nR_0 = 50\n";

    #[test]
    fn minimal_config_defaults() {
        let c = parse_config(MINIMAL.as_bytes()).unwrap();
        assert_eq!(c.params.r_l(), 50.0);
        assert_eq!(c.params.r_f(), 1000.0);
        assert_eq!(*c.params.reactance(), ReactanceSpec::None);
        for p in PortId::ALL {
            assert_eq!(c.params.env().temperature(p), 0.0);
        }
        assert_eq!(c.units, Units::Si);
        assert_eq!(*c.params.constants(), PhysicalConstants::si());
        assert_eq!(c.tolerance, 1e-9);
        assert_eq!(c.sweep.points(), DEFAULT_POINTS);
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "  # header\n[ device ]\n  R_l=50 # signal\nR_r =50\n\tR_f= 1e3\nR_0 = 5e1\n\n[run]\nunits = normalized\n";
        let c = parse_config(text.as_bytes()).unwrap();
        assert_eq!(c.params.r_f(), 1000.0);
        assert_eq!(c.units, Units::Normalized);
        assert_eq!(c.params.constants().hbar, 1.0);
    }

    #[test]
    fn unknown_key_is_located() {
        let text = format!("{MINIMAL}R_x = 3\n");
        let err = parse_config(text.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "unknown key R_x at line 6");
    }

    #[test]
    fn rejection_paths() {
        let err = parse_config(b"[device]\nR_l = -5\nR_r = 50\nR_f = 1000\nR_0 = 50\n").unwrap_err();
        assert!(err.to_string().contains("R_l must be positive"), "{err}");

        let err = parse_config(b"[device]\nR_l = 5x\n").unwrap_err();
        assert!(matches!(err, ConfigError::InvalidValue { line: 2, .. }));

        let err = parse_config(b"[device]\nR_l = 5\nR_l = 6\n").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 3, .. }));

        let err = parse_config(b"[amplifier]\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownSection { line: 1, .. }));

        let err = parse_config(b"R_l = 5\n").unwrap_err();
        assert!(matches!(err, ConfigError::KeyOutsideSection { line: 1, .. }));

        let err = parse_config(b"[device]\nR_l 5\n").unwrap_err();
        assert!(matches!(err, ConfigError::Malformed { line: 2 }));

        let err = parse_config(b"[device]\nR_l = 5\n").unwrap_err();
        assert_eq!(err, ConfigError::MissingKey("R_r"));

        let err = parse_config(format!("{MINIMAL}[temperatures]\nT_a = -1\n").as_bytes()).unwrap_err();
        assert!(err.to_string().contains("temperature"), "{err}");

        let err = parse_config(format!("{MINIMAL}reactance_kind = inductive\n").as_bytes()).unwrap_err();
        assert_eq!(err, ConfigError::MissingReactanceValue("inductive"));

        let err = parse_config(format!("{MINIMAL}reactance_value = 3\n").as_bytes()).unwrap_err();
        assert_eq!(err, ConfigError::UnexpectedReactanceValue(6));

        let err = parse_config(format!("{MINIMAL}[run]\ntolerance = 0\n").as_bytes()).unwrap_err();
        assert_eq!(err, ConfigError::InvalidTolerance(0.0));

        let err = parse_config(format!("{MINIMAL}R_0 = inf\n").as_bytes()).unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { .. }));

        let err = parse_config(b"[device]\nR_l = NaN\n").unwrap_err();
        assert!(matches!(err, ConfigError::InvalidValue { .. }));

        let err = parse_config(&[b'[', 0xff, b']']).unwrap_err();
        assert_eq!(err, ConfigError::NotUtf8(1));
    }

    #[test]
    fn render_round_trips() {
        let text = format!(
            "{MINIMAL}reactance_kind = capacitive\nreactance_value = 3.3e-9\n[temperatures]\nT_b = 0.1\n[sweep]\npoints = 4\nspacing = linear\n[run]\nunits = normalized\ntolerance = 1e-30\n"
        );
        let c = parse_config(text.as_bytes()).unwrap();
        let rendered = render_config(&c);
        let back = parse_config(rendered.as_bytes()).unwrap();
        assert_eq!(back, c);
        assert_eq!(*back.params.reactance(), ReactanceSpec::Capacitive(3.3e-9));
        assert_eq!(back.units, Units::Normalized);
        assert_eq!(render_config(&back), rendered);

        let minimal = parse_config(MINIMAL.as_bytes()).unwrap();
        assert_eq!(parse_config(render_config(&minimal).as_bytes()).unwrap(), minimal);
    }

    #[test]
    fn csv_layout() {
        let c = parse_config(MINIMAL.as_bytes()).unwrap();
        let r = added_noise(&c.params, AngularFrequency::new(1e3).unwrap());
        let csv = write_csv(&[r]).unwrap();
        let lines: Vec<&str> = csv.split_terminator('\n').collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));

        let values: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(
            values,
            vec![
                r.omega,
                r.sigma_total,
                r.term_r,
                r.term_f,
                r.term_a,
                r.term_b,
                r.xi,
                r.noise_figure_db,
                r.back_action
            ]
        );
        assert_eq!(write_csv(&[]), Err(ConfigError::EmptyReports));
    }
}
