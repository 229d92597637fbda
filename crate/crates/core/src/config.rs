//! Experiment configuration as flat `section.key = value` lines.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; missing
//! keys keep their defaults (the Example 1 setup). Vectors are written
//! `x, y`. The time step is either a number or `h*f` (`h/d` is accepted as
//! shorthand for `h*(1/d)`). Serialization writes every key, so
//! parse → serialize → parse is the identity.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::assembly::{ElasticJump, PenaltyParams, PhysicalParams};
use crate::geometry::Point;
use crate::waves::PulseMode;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid value for {key}: {message}")]
    Value { key: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryConfig {
    Annulus { inner_radius: f64, outer_radius: f64, n_radial: usize, n_angular: usize },
    /// Imported mesh; boundaries with a radius are projected onto circles
    /// about the origin under refinement.
    Msh { path: PathBuf, interface_radius: Option<f64>, outer_radius: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// l = f·h, shortened so that T is a whole number of steps.
    MeshFraction(f64),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveConfig {
    Plane { direction: [f64; 2] },
    Pulse { source: Point, mode: PulseMode },
    Zero,
}

/// Initial displacement and potential; initial velocities are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialConfig {
    Zero,
    /// a·exp(-|x - x₀|²/w²) for φ and for both displacement components.
    Bump { center: Point, width: f64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub geometry: GeometryConfig,
    /// Uniform refinements applied to the base mesh.
    pub refine: usize,
    pub physics: PhysicalParams,
    pub penalty: PenaltyParams,
    pub degree: usize,
    pub gamma: f64,
    pub delta: f64,
    pub step: StepRule,
    pub final_time: f64,
    pub wave: WaveConfig,
    pub initial: InitialConfig,
    pub output_dir: PathBuf,
    pub energy_stride: usize,
    /// 0 disables snapshots.
    pub snapshot_stride: usize,
    pub levels: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            geometry: GeometryConfig::Annulus { inner_radius: 1.0, outer_radius: 2.0, n_radial: 3, n_angular: 32 },
            refine: 0,
            physics: PhysicalParams::default(),
            penalty: PenaltyParams::default(),
            degree: 1,
            gamma: 0.5,
            delta: 0.0,
            step: StepRule::MeshFraction(1.0 / 20.0),
            final_time: 1.0,
            wave: WaveConfig::Plane { direction: [1.0, 0.0] },
            initial: InitialConfig::Zero,
            output_dir: PathBuf::from("output"),
            energy_stride: 1,
            snapshot_stride: 0,
            levels: 4,
        }
    }
}

fn value_err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.to_string(), message: message.into() }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| value_err(key, format!("expected a number, got {v:?}")))?;
    if !x.is_finite() {
        return Err(value_err(key, "must be finite"));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|_| value_err(key, format!("expected a non-negative integer, got {v:?}")))
}

fn parse_vec(key: &str, v: &str) -> Result<[f64; 2], ConfigError> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(value_err(key, format!("expected two comma-separated numbers, got {v:?}")));
    }
    Ok([parse_f64(key, parts[0])?, parse_f64(key, parts[1])?])
}

fn parse_step(key: &str, v: &str) -> Result<StepRule, ConfigError> {
    let compact: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let rule = if let Some(f) = compact.strip_prefix("h*") {
        StepRule::MeshFraction(parse_f64(key, f)?)
    } else if let Some(d) = compact.strip_prefix("h/") {
        StepRule::MeshFraction(1.0 / parse_f64(key, d)?)
    } else {
        StepRule::Fixed(parse_f64(key, &compact)?)
    };
    match rule {
        StepRule::MeshFraction(f) | StepRule::Fixed(f) if !(f > 0.0) || !f.is_finite() => {
            Err(value_err(key, "time step must be positive"))
        }
        r => Ok(r),
    }
}

fn fmt_vec(v: [f64; 2]) -> String {
    format!("{:?}, {:?}", v[0], v[1])
}

/// Raw key/value pairs in file order, duplicates rejected.
fn entries(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("expected key = value, got {line:?}") });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || !k.contains('.') {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("keys have the form section.name, got {k:?}") });
        }
        if out.iter().any(|(_, key, _)| key == k) {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("duplicate key {k}") });
        }
        out.push((i + 1, k.to_string(), v.to_string()));
    }
    Ok(out)
}

impl SimulationConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let kv = entries(text)?;
        let get = |k: &str| kv.iter().find(|(_, key, _)| key == k).map(|(_, _, v)| v.as_str());
        let known = [
            "geometry.kind", "geometry.inner_radius", "geometry.outer_radius", "geometry.n_radial",
            "geometry.n_angular", "geometry.path", "geometry.interface_radius", "geometry.refine",
            "physics.rho1", "physics.rho2", "physics.c", "physics.lambda", "physics.mu",
            "penalty.alpha", "penalty.beta", "penalty.elastic_jump", "fem.degree", "time.gamma",
            "time.delta", "time.step", "time.final", "wave.kind", "wave.direction", "wave.source",
            "wave.mode", "initial.kind", "initial.center", "initial.width", "initial.amplitude",
            "output.dir", "output.energy_stride", "output.snapshot_stride", "study.levels",
        ];
        if let Some((line, k, _)) = kv.iter().find(|(_, k, _)| !known.contains(&k.as_str())) {
            return Err(ConfigError::Syntax { line: *line, message: format!("unknown key {k}") });
        }

        let mut c = SimulationConfig::default();
        let f = |k: &str, d: f64| get(k).map_or(Ok(d), |v| parse_f64(k, v));
        let u = |k: &str, d: usize| get(k).map_or(Ok(d), |v| parse_usize(k, v));
        let opt_f = |k: &str| get(k).map(|v| parse_f64(k, v)).transpose();

        c.geometry = match get("geometry.kind").unwrap_or("annulus") {
            "annulus" => GeometryConfig::Annulus {
                inner_radius: f("geometry.inner_radius", 1.0)?,
                outer_radius: f("geometry.outer_radius", 2.0)?,
                n_radial: u("geometry.n_radial", 3)?,
                n_angular: u("geometry.n_angular", 32)?,
            },
            "msh" => GeometryConfig::Msh {
                path: PathBuf::from(get("geometry.path").ok_or_else(|| value_err("geometry.path", "required for msh geometry"))?),
                interface_radius: opt_f("geometry.interface_radius")?,
                outer_radius: opt_f("geometry.outer_radius")?,
            },
            other => return Err(value_err("geometry.kind", format!("expected annulus or msh, got {other:?}"))),
        };
        c.refine = u("geometry.refine", 0)?;
        let d = PhysicalParams::default();
        c.physics = PhysicalParams {
            rho1: f("physics.rho1", d.rho1)?,
            rho2: f("physics.rho2", d.rho2)?,
            c: f("physics.c", d.c)?,
            lambda: f("physics.lambda", d.lambda)?,
            mu: f("physics.mu", d.mu)?,
        };
        let p = PenaltyParams::default();
        c.penalty = PenaltyParams {
            alpha: f("penalty.alpha", p.alpha)?,
            beta: f("penalty.beta", p.beta)?,
            elastic_jump: match get("penalty.elastic_jump").unwrap_or("full") {
                "full" => ElasticJump::Full,
                "normal" => ElasticJump::NormalComponent,
                other => return Err(value_err("penalty.elastic_jump", format!("expected full or normal, got {other:?}"))),
            },
        };
        c.degree = u("fem.degree", 1)?;
        c.gamma = f("time.gamma", 0.5)?;
        c.delta = f("time.delta", 0.0)?;
        if let Some(v) = get("time.step") {
            c.step = parse_step("time.step", v)?;
        }
        c.final_time = f("time.final", 1.0)?;
        c.wave = match get("wave.kind").unwrap_or("plane") {
            "plane" => {
                let direction = get("wave.direction").map_or(Ok([1.0, 0.0]), |v| parse_vec("wave.direction", v))?;
                if direction == [0.0, 0.0] {
                    return Err(value_err("wave.direction", "must be nonzero"));
                }
                WaveConfig::Plane { direction }
            }
            "pulse" => WaveConfig::Pulse {
                source: get("wave.source").map_or(Ok([2.0, 0.0]), |v| parse_vec("wave.source", v))?,
                mode: match get("wave.mode").unwrap_or("as_written") {
                    "as_written" => PulseMode::AsWritten,
                    "cylindrical" => PulseMode::Cylindrical,
                    other => return Err(value_err("wave.mode", format!("expected as_written or cylindrical, got {other:?}"))),
                },
            },
            "zero" => WaveConfig::Zero,
            other => return Err(value_err("wave.kind", format!("expected plane, pulse or zero, got {other:?}"))),
        };
        c.initial = match get("initial.kind").unwrap_or("zero") {
            "zero" => InitialConfig::Zero,
            "bump" => InitialConfig::Bump {
                center: get("initial.center").map_or(Ok([0.0, 0.0]), |v| parse_vec("initial.center", v))?,
                width: f("initial.width", 0.5)?,
                amplitude: f("initial.amplitude", 1.0)?,
            },
            other => return Err(value_err("initial.kind", format!("expected zero or bump, got {other:?}"))),
        };
        c.output_dir = PathBuf::from(get("output.dir").unwrap_or("output"));
        c.energy_stride = u("output.energy_stride", 1)?;
        c.snapshot_stride = u("output.snapshot_stride", 0)?;
        c.levels = u("study.levels", 4)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let mut cfg = Self::parse(&text)?;
        // Mesh paths are relative to the config file.
        if let GeometryConfig::Msh { path: mesh, .. } = &mut cfg.geometry {
            if mesh.is_relative() {
                if let Some(dir) = path.parent() {
                    *mesh = dir.join(&*mesh);
                }
            }
        }
        Ok(cfg)
    }

    /// Parameter checks that do not need the mesh.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let as_value = |key: &str, e: crate::assembly::AssemblyError| value_err(key, e.to_string());
        self.physics.validate().map_err(|e| as_value("physics", e))?;
        self.penalty.validate().map_err(|e| as_value("penalty", e))?;
        if !(1..=crate::fem::MAX_DEGREE).contains(&self.degree) {
            return Err(value_err("fem.degree", format!("expected 1..={}", crate::fem::MAX_DEGREE)));
        }
        if !(self.gamma >= 0.5) || !(self.delta >= 0.0) {
            return Err(value_err("time", "need gamma >= 1/2 and delta >= 0"));
        }
        if !(self.final_time > 0.0) {
            return Err(value_err("time.final", "must be positive"));
        }
        if let InitialConfig::Bump { width, .. } = self.initial {
            if !(width > 0.0) {
                return Err(value_err("initial.width", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match &self.geometry {
            GeometryConfig::Annulus { inner_radius, outer_radius, n_radial, n_angular } => {
                kv("geometry.kind", "annulus".into());
                kv("geometry.inner_radius", format!("{inner_radius:?}"));
                kv("geometry.outer_radius", format!("{outer_radius:?}"));
                kv("geometry.n_radial", n_radial.to_string());
                kv("geometry.n_angular", n_angular.to_string());
            }
            GeometryConfig::Msh { path, interface_radius, outer_radius } => {
                kv("geometry.kind", "msh".into());
                kv("geometry.path", path.display().to_string());
                if let Some(r) = interface_radius {
                    kv("geometry.interface_radius", format!("{r:?}"));
                }
                if let Some(r) = outer_radius {
                    kv("geometry.outer_radius", format!("{r:?}"));
                }
            }
        }
        kv("geometry.refine", self.refine.to_string());
        let p = &self.physics;
        kv("physics.rho1", format!("{:?}", p.rho1));
        kv("physics.rho2", format!("{:?}", p.rho2));
        kv("physics.c", format!("{:?}", p.c));
        kv("physics.lambda", format!("{:?}", p.lambda));
        kv("physics.mu", format!("{:?}", p.mu));
        kv("penalty.alpha", format!("{:?}", self.penalty.alpha));
        kv("penalty.beta", format!("{:?}", self.penalty.beta));
        kv("penalty.elastic_jump", self.penalty.elastic_jump.name().into());
        kv("fem.degree", self.degree.to_string());
        kv("time.gamma", format!("{:?}", self.gamma));
        kv("time.delta", format!("{:?}", self.delta));
        kv(
            "time.step",
            match self.step {
                StepRule::MeshFraction(f) => format!("h*{f:?}"),
                StepRule::Fixed(l) => format!("{l:?}"),
            },
        );
        kv("time.final", format!("{:?}", self.final_time));
        match self.wave {
            WaveConfig::Plane { direction } => {
                kv("wave.kind", "plane".into());
                kv("wave.direction", fmt_vec(direction));
            }
            WaveConfig::Pulse { source, mode } => {
                kv("wave.kind", "pulse".into());
                kv("wave.source", fmt_vec(source));
                kv(
                    "wave.mode",
                    match mode {
                        PulseMode::AsWritten => "as_written",
                        PulseMode::Cylindrical => "cylindrical",
                    }
                    .into(),
                );
            }
            WaveConfig::Zero => kv("wave.kind", "zero".into()),
        }
        match self.initial {
            InitialConfig::Zero => kv("initial.kind", "zero".into()),
            InitialConfig::Bump { center, width, amplitude } => {
                kv("initial.kind", "bump".into());
                kv("initial.center", fmt_vec(center));
                kv("initial.width", format!("{width:?}"));
                kv("initial.amplitude", format!("{amplitude:?}"));
            }
        }
        kv("output.dir", self.output_dir.display().to_string());
        kv("output.energy_stride", self.energy_stride.to_string());
        kv("output.snapshot_stride", self.snapshot_stride.to_string());
        kv("study.levels", self.levels.to_string());
        s
    }
}
