use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::constants::{LAMBDA0_QMUPL, M_NUCLEON};
use crate::error::{Error, Result};
use crate::qmupl::CollapseScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Qmupl,
    Measure,
    Grw,
    Csl,
    Gravity,
    Interferometer,
    Bounds,
}

impl CommandKind {
    pub const ALL: [CommandKind; 7] = [
        Self::Qmupl,
        Self::Measure,
        Self::Grw,
        Self::Csl,
        Self::Gravity,
        Self::Interferometer,
        Self::Bounds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Qmupl => "qmupl",
            Self::Measure => "measure",
            Self::Grw => "grw",
            Self::Csl => "csl",
            Self::Gravity => "gravity",
            Self::Interferometer => "interferometer",
            Self::Bounds => "bounds",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown command '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Config(format!("unknown output format '{s}' (expected csv or json)"))),
        }
    }
}

/// Linear-diffusion model ensemble. Lengths in m, times in s, masses in kg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QmuplParams {
    pub mass: f64,
    pub lambda0: f64,
    pub m0: f64,
    /// Initial position spread.
    pub sigma0: f64,
    /// Initial mean wavenumber, 1/m.
    pub k0: f64,
    /// Duration in units of 1/omega.
    pub t_final_omega: f64,
    pub steps: usize,
    /// "gaussian" or "grid".
    pub integrator: String,
    pub scheme: CollapseScheme,
    pub grid_points: usize,
    /// Half width of the grid in units of sigma0.
    pub grid_half_width: f64,
    pub record_every: usize,
}

impl Default for QmuplParams {
    fn default() -> Self {
        Self {
            mass: 1e-3,
            lambda0: LAMBDA0_QMUPL,
            m0: M_NUCLEON,
            sigma0: 1e-13,
            k0: 0.0,
            t_final_omega: 5.0,
            steps: 1000,
            integrator: "gaussian".into(),
            scheme: CollapseScheme::Exponential,
            grid_points: 1024,
            grid_half_width: 30.0,
            record_every: 100,
        }
    }
}

/// Pointer measurement and first-passage statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureParams {
    /// Born weight |c+|^2; ignored when `gamma0` is given.
    pub p_plus: f64,
    pub gamma0: Option<f64>,
    pub b: f64,
    pub ds: f64,
    pub pointer_mass: f64,
    pub kappa_hbar: f64,
    pub t_interaction: f64,
    pub lambda0: f64,
    pub m0: f64,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self {
            p_plus: 0.5,
            gamma0: None,
            b: 35.0,
            ds: 1e-2,
            pointer_mass: 1e-3,
            kappa_hbar: 1e-2,
            t_interaction: 1.0,
            lambda0: LAMBDA0_QMUPL,
            m0: M_NUCLEON,
        }
    }
}

/// Jump process on a two-peak state. Any consistent unit system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrwParams {
    pub lambda: f64,
    pub r_c: f64,
    pub n_particles: u64,
    pub hbar_over_m: f64,
    /// Peak separation.
    pub separation: f64,
    /// Width of each peak.
    pub sigma: f64,
    pub t_final: f64,
    pub sample_dt: f64,
    /// "free" or "frozen".
    pub hamiltonian: String,
    pub grid_points: usize,
    pub grid_half_width: f64,
}

impl Default for GrwParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            r_c: 1.0,
            n_particles: 1,
            hbar_over_m: 1.0,
            separation: 2.0,
            sigma: 0.2,
            t_final: 1.0,
            sample_dt: 0.1,
            hamiltonian: "frozen".into(),
            grid_points: 1024,
            grid_half_width: 10.0,
        }
    }
}

/// Cluster decay rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CslParams {
    /// m^3 s^-1
    pub gamma: f64,
    pub r_c: f64,
    /// Per-nucleon rate; derived from gamma and r_c when absent.
    pub lambda: Option<f64>,
    pub cluster_sizes: Vec<u64>,
    pub n_clusters: u64,
}

impl Default for CslParams {
    fn default() -> Self {
        Self {
            gamma: crate::constants::GAMMA_CSL,
            r_c: crate::constants::R_C,
            lambda: None,
            cluster_sizes: vec![10_000, 1_000_000],
            n_clusters: 1,
        }
    }
}

/// Gravity scales over a mass sweep of uniform spheres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GravityParams {
    pub mass_min: f64,
    pub mass_max: f64,
    pub points: usize,
    /// kg m^-3
    pub density: f64,
}

impl Default for GravityParams {
    fn default() -> Self {
        Self {
            mass_min: M_NUCLEON,
            mass_max: 1e-3,
            points: 25,
            density: 1000.0,
        }
    }
}

/// Talbot scales for a list of particle masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterferometerParams {
    pub grating_period: f64,
    pub velocity: f64,
    pub masses_amu: Vec<f64>,
    /// Collapse rate used for the visibility column.
    pub lambda: f64,
    /// Flight time for the visibility column, s.
    pub flight_time: f64,
    /// Experiment catalog; the built-in one when absent.
    pub catalog: Option<String>,
}

impl Default for InterferometerParams {
    fn default() -> Self {
        Self {
            grating_period: 100e-9,
            velocity: 1.0,
            masses_amu: vec![1e4, 1e5, 1e6, 1e7, 1e8],
            lambda: crate::constants::LAMBDA_CSL,
            flight_time: 1e-2,
            catalog: None,
        }
    }
}

/// Bound table or exclusion map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsParams {
    /// "table1" or "map".
    pub view: String,
    pub catalog: Option<String>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
}

impl Default for BoundsParams {
    fn default() -> Self {
        Self {
            view: "table1".into(),
            catalog: None,
            lambda_min: 1e-20,
            lambda_max: 1e2,
            points: 23,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    Qmupl(QmuplParams),
    Measure(MeasureParams),
    Grw(GrwParams),
    Csl(CslParams),
    Gravity(GravityParams),
    Interferometer(InterferometerParams),
    Bounds(BoundsParams),
}

impl Parameters {
    pub fn default_for(command: CommandKind) -> Self {
        match command {
            CommandKind::Qmupl => Self::Qmupl(Default::default()),
            CommandKind::Measure => Self::Measure(Default::default()),
            CommandKind::Grw => Self::Grw(Default::default()),
            CommandKind::Csl => Self::Csl(Default::default()),
            CommandKind::Gravity => Self::Gravity(Default::default()),
            CommandKind::Interferometer => Self::Interferometer(Default::default()),
            CommandKind::Bounds => Self::Bounds(Default::default()),
        }
    }

    /// Flattened `key = value` pairs for the metadata header.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let value = toml::Value::try_from(self).expect("parameters serialize");
        let mut out = Vec::new();
        if let toml::Value::Table(t) = value {
            for (k, v) in t {
                out.push((k, render(&v)));
            }
        }
        out
    }
}

fn render(v: &toml::Value) -> String {
    match v {
        toml::Value::Float(f) => super::output::format_float(*f),
        toml::Value::String(s) => s.clone(),
        toml::Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(render).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub seed: u64,
    pub n_trajectories: usize,
    pub output_path: Option<String>,
    pub output_format: OutputFormat,
    pub parameters: Parameters,
}

#[derive(Deserialize)]
struct Header {
    command: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document<P> {
    #[allow(dead_code)]
    command: Option<String>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "one")]
    n_trajectories: usize,
    output_path: Option<String>,
    #[serde(default)]
    output_format: OutputFormat,
    #[serde(default)]
    parameters: Option<P>,
}

fn one() -> usize {
    1
}

fn typed<P: DeserializeOwned + Default>(text: &str, origin: &str) -> Result<(Document<P>, P)> {
    let mut doc: Document<P> = toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
    let params = doc.parameters.take().unwrap_or_default();
    Ok((doc, params))
}

impl RunConfig {
    /// Defaults for `command`.
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            seed: 0,
            n_trajectories: 1,
            output_path: None,
            output_format: OutputFormat::Csv,
            parameters: Parameters::default_for(command),
        }
    }

    /// Parses a configuration document. `command` overrides (and must
    /// agree with) the document's own `command` key. Unknown keys anywhere
    /// are rejected with their line and column.
    pub fn from_toml_str(text: &str, command: Option<CommandKind>, origin: &str) -> Result<Self> {
        let header: Header = toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        let from_file = header.command.as_deref().map(CommandKind::parse).transpose()?;
        let command = match (command, from_file) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!(
                    "{origin}: file is for command '{}' but '{}' was requested",
                    b.as_str(),
                    a.as_str()
                )))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::Config(format!("{origin}: missing required key 'command'"))),
        };
        macro_rules! load {
            ($variant:ident) => {{
                let (doc, p) = typed(text, origin)?;
                (doc.seed, doc.n_trajectories, doc.output_path, doc.output_format, Parameters::$variant(p))
            }};
        }
        let (seed, n_trajectories, output_path, output_format, parameters) = match command {
            CommandKind::Qmupl => load!(Qmupl),
            CommandKind::Measure => load!(Measure),
            CommandKind::Grw => load!(Grw),
            CommandKind::Csl => load!(Csl),
            CommandKind::Gravity => load!(Gravity),
            CommandKind::Interferometer => load!(Interferometer),
            CommandKind::Bounds => load!(Bounds),
        };
        if n_trajectories == 0 {
            return Err(Error::Config(format!("{origin}: n_trajectories must be at least 1")));
        }
        Ok(Self {
            command,
            seed,
            n_trajectories,
            output_path,
            output_format,
            parameters,
        })
    }

    pub fn from_path(path: &Path, command: Option<CommandKind>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, command, &path.display().to_string())
    }

    /// Applies `key=value` to the parameter table; the value is read as a
    /// TOML literal, falling back to a bare string.
    pub fn set_parameter(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{assignment}'")))?;
        let key = key.trim();
        let raw = raw.trim();
        let value: toml::Value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let mut table = match toml::Value::try_from(&self.parameters) {
            Ok(toml::Value::Table(t)) => t,
            _ => toml::Table::new(),
        };
        table.insert(key.to_string(), value);
        let text = toml::to_string(&toml::Table::from_iter([("parameters".to_string(), toml::Value::Table(table))]))
            .map_err(|e| Error::Config(e.to_string()))?;
        let origin = format!("--set {key}");
        macro_rules! reload {
            ($variant:ident) => {{
                let (_, p) = typed(&text, &origin)?;
                Parameters::$variant(p)
            }};
        }
        self.parameters = match self.command {
            CommandKind::Qmupl => reload!(Qmupl),
            CommandKind::Measure => reload!(Measure),
            CommandKind::Grw => reload!(Grw),
            CommandKind::Csl => reload!(Csl),
            CommandKind::Gravity => reload!(Gravity),
            CommandKind::Interferometer => reload!(Interferometer),
            CommandKind::Bounds => reload!(Bounds),
        };
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_full() {
        let c = RunConfig::from_toml_str("command = \"measure\"\n", None, "t").unwrap();
        assert_eq!(c.command, CommandKind::Measure);
        assert_eq!(c.parameters, Parameters::Measure(MeasureParams::default()));
        let text = "command = \"measure\"\nseed = 7\nn_trajectories = 10\noutput_format = \"json\"\n[parameters]\nb = 10.0\ngamma0 = 0.0\n";
        let c = RunConfig::from_toml_str(text, None, "t").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.output_format, OutputFormat::Json);
        match c.parameters {
            Parameters::Measure(p) => assert_eq!((p.b, p.gamma0), (10.0, Some(0.0))),
            _ => panic!(),
        }
    }

    #[test]
    fn unknown_keys_report_location() {
        let text = "command = \"measure\"\n[parameters]\nb = 10.0\nbee = 3\n";
        let err = RunConfig::from_toml_str(text, None, "run.toml").unwrap_err().to_string();
        assert!(err.contains("run.toml") && err.contains("line 4") && err.contains("bee"), "{err}");
        let err = RunConfig::from_toml_str("command = \"csl\"\nsed = 1\n", None, "r").unwrap_err().to_string();
        assert!(err.contains("sed"), "{err}");
    }

    #[test]
    fn command_resolution() {
        assert!(RunConfig::from_toml_str("", None, "t").is_err());
        assert!(RunConfig::from_toml_str("command = \"nope\"", None, "t").is_err());
        assert!(RunConfig::from_toml_str("command = \"csl\"", Some(CommandKind::Grw), "t").is_err());
        let c = RunConfig::from_toml_str("seed = 3", Some(CommandKind::Gravity), "t").unwrap();
        assert_eq!(c.command, CommandKind::Gravity);
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::new(CommandKind::Measure);
        c.set_parameter("b=12").unwrap();
        c.set_parameter("gamma0 = -0.5").unwrap();
        match &c.parameters {
            Parameters::Measure(p) => assert_eq!((p.b, p.gamma0), (12.0, Some(-0.5))),
            _ => panic!(),
        }
        assert!(c.set_parameter("nope=1").is_err());
        assert!(c.set_parameter("b").is_err());
        let mut g = RunConfig::new(CommandKind::Grw);
        g.set_parameter("hamiltonian=free").unwrap();
        let mut b = RunConfig::new(CommandKind::Bounds);
        b.set_parameter("view=map").unwrap();
    }

    #[test]
    fn parameter_pairs_are_sorted() {
        let pairs = Parameters::default_for(CommandKind::Measure).to_pairs();
        let keys: Vec<_> = pairs.iter().map(|p| p.0.clone()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
