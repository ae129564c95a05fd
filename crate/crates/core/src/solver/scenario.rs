//! Scenario description and its TOML schema.
//!
//! ```toml
//! horizon = 1.0
//! dt = 1e-3
//! direction = "reversed"        # or "dissipative"
//! material = "material.toml"    # path relative to this file, or an inline table
//!
//! [grid]
//! dim = 1
//! extent = [1.25]
//! nodes = [401]
//!
//! [support]                     # data must vanish for x₁ > x0
//! x0 = 0.25
//!
//! [output]
//! sample_stride = 1             # trajectory frame every k steps
//! r_stride = 4                  # CSV thinning
//! t_stride = 10
//!
//! [[boundary]]
//! face = "x1-"
//! displacement = { kind = "traction", components = [1.0], signal = { type = "raised_cosine", amplitude = 1.0, duration = 0.2 } }
//! void = { kind = "flux" }
//! thermal = { kind = "flux" }
//!
//! [[boundary]]
//! face = "x1+"
//! displacement = { kind = "dirichlet" }
//! void = { kind = "flux" }
//! thermal = { kind = "flux" }
//!
//! [initial]                     # optional; lists of bumps per field
//! u = [{ center = [0.1], radius = 0.1, amplitude = [1e-3] }]
//!
//! [sources]                     # optional; lists of pulses per field
//! heat = [{ bump = { center = [0.1], radius = 0.1, amplitude = [1.0] }, signal = { type = "constant", value = 1.0 } }]
//! ```
//!
//! A `[manufactured]` table (a [`TrigProfile`]) replaces initial data,
//! sources and all boundary data by those of the manufactured solution.

use super::grid::{Face, Grid, GridError};
use super::manufactured::{ExactPoint, TrigProfile};
use super::signal::{
    BoundaryPartition, Bump, Condition, ConditionKind, Data, FaceConditions, Group, Profile, Pulse, Signal, Source,
};
use crate::constitutive::TimeDirection;
use crate::linalg::{Vec3, ZERO3};
use crate::material::{spectrum, Material, MaterialError, PackedMaterial};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("scenario material: {0}")]
    Material(#[from] MaterialError),
    #[error("scenario grid: {0}")]
    Grid(#[from] GridError),
    #[error("inadmissible material: {0}")]
    Inadmissible(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("data outside the declared support x1 <= {x0}: {what}")]
    Support { x0: f64, what: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InitialData {
    pub u: Profile,
    pub velocity: Profile,
    pub phi: Profile,
    pub phidot: Profile,
    pub theta: Profile,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sources {
    /// f
    pub force: Source,
    /// ℓ
    pub void: Source,
    /// r
    pub heat: Source,
}

/// ρf, ρℓ, ρr at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceValues {
    pub force: Vec3,
    pub void: f64,
    pub heat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSpec {
    pub sample_stride: usize,
    pub r_stride: usize,
    pub t_stride: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            sample_stride: 1,
            r_stride: 1,
            t_stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub grid: Grid,
    pub material: Material,
    pub boundary: BoundaryPartition,
    pub initial: InitialData,
    pub sources: Sources,
    /// Step size; [`Scenario::steps`]·dt = horizon.
    pub dt: f64,
    pub horizon: f64,
    pub direction: TimeDirection,
    /// Slab depth x₀ of the data support, if declared.
    pub support: Option<f64>,
    pub exact: Option<TrigProfile>,
    pub output: OutputSpec,
    /// Data are evaluated at horizon − t, with rates negated. Set by time
    /// reversal.
    pub reflected: bool,
}

impl Scenario {
    /// Homogeneous data, zero initial state.
    pub fn new(grid: Grid, material: Material, boundary: BoundaryPartition, dt: f64, horizon: f64) -> Self {
        let mut s = Self {
            grid,
            material,
            boundary,
            initial: InitialData::default(),
            sources: Sources::default(),
            dt,
            horizon,
            direction: TimeDirection::Reversed,
            support: None,
            exact: None,
            output: OutputSpec::default(),
            reflected: false,
        };
        s.normalize_dt();
        s
    }

    /// Shrinks dt so that a whole number of steps reaches the horizon.
    fn normalize_dt(&mut self) {
        if self.horizon > 0.0 && self.dt > 0.0 {
            let n = (self.horizon / self.dt * (1.0 - 1e-12)).ceil().max(1.0);
            self.dt = self.horizon / n;
        }
    }

    /// Same problem with h and dt halved `levels` times. Strides scale so
    /// that sampled frames and planes stay at the same coordinates.
    pub fn refined(&self, levels: u32) -> Result<Self, ScenarioError> {
        let f = 1usize << levels;
        let g = &self.grid;
        let nodes: Vec<usize> = (0..g.dim).map(|i| (g.nodes[i] - 1) * f + 1).collect();
        let mut s = self.clone();
        s.grid = Grid::new(g.dim, &g.extent[..g.dim], &nodes)?;
        s.dt = self.dt / f as f64;
        s.output.sample_stride *= f;
        s.output.r_stride *= f;
        s.output.t_stride *= f;
        Ok(s)
    }

    pub fn steps(&self) -> u64 {
        if self.horizon <= 0.0 {
            0
        } else {
            (self.horizon / self.dt).round() as u64
        }
    }

    /// Replaces all data by those of a manufactured solution.
    pub fn with_exact(mut self, profile: TrigProfile) -> Self {
        self.initial = InitialData {
            u: Profile::Exact,
            velocity: Profile::Exact,
            phi: Profile::Exact,
            phidot: Profile::Exact,
            theta: Profile::Exact,
        };
        self.sources = Sources {
            force: Source::Exact,
            void: Source::Exact,
            heat: Source::Exact,
        };
        for f in &mut self.boundary.faces {
            f.displacement.data = Data::Exact;
            f.void.data = Data::Exact;
            f.thermal.data = Data::Exact;
        }
        self.exact = Some(profile);
        self
    }

    /// Evaluation time for data, and the sign applied to rates.
    pub fn data_time(&self, t: f64) -> (f64, f64) {
        if self.reflected {
            (self.horizon - t, -1.0)
        } else {
            (t, 1.0)
        }
    }

    /// Manufactured solution at (x, t) in this scenario's time frame.
    pub fn exact_at(&self, x: &Vec3, t: f64) -> Option<ExactPoint> {
        let profile = self.exact.as_ref()?;
        let (tau, sign) = self.data_time(t);
        let direction = if self.reflected { self.direction.flipped() } else { self.direction };
        let mut e = profile.evaluate(x, tau, &self.material, direction);
        if sign < 0.0 {
            for v in &mut e.velocity {
                *v = -*v;
            }
            e.state.phidot = -e.state.phidot;
            e.theta_rate = -e.theta_rate;
        }
        Some(e)
    }

    fn exact_or_panic(&self, x: &Vec3, t: f64) -> ExactPoint {
        self.exact_at(x, t).expect("exact data require a manufactured profile")
    }

    fn profile_vector(&self, p: &Profile, x: &Vec3, pick: impl Fn(&ExactPoint) -> Vec3) -> Vec3 {
        match p {
            Profile::Zero => ZERO3,
            Profile::Bumps(bs) => bs.iter().fold(ZERO3, |acc, b| {
                let v = b.vector(x);
                [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]]
            }),
            Profile::Exact => pick(&self.exact_or_panic(x, 0.0)),
        }
    }

    fn profile_scalar(&self, p: &Profile, x: &Vec3, pick: impl Fn(&ExactPoint) -> f64) -> f64 {
        match p {
            Profile::Zero => 0.0,
            Profile::Bumps(bs) => bs.iter().map(|b| b.scalar(x)).sum(),
            Profile::Exact => pick(&self.exact_or_panic(x, 0.0)),
        }
    }

    /// (u, u̇, φ, φ̇, θ) at t = 0.
    pub fn initial_at(&self, x: &Vec3) -> (Vec3, Vec3, f64, f64, f64) {
        let i = &self.initial;
        (
            self.profile_vector(&i.u, x, |e| e.u),
            self.profile_vector(&i.velocity, x, |e| e.velocity),
            self.profile_scalar(&i.phi, x, |e| e.state.phi),
            self.profile_scalar(&i.phidot, x, |e| e.state.phidot),
            self.profile_scalar(&i.theta, x, |e| e.state.theta),
        )
    }

    /// ρf, ρℓ, ρr at (x, t).
    pub fn source_at(&self, x: &Vec3, t: f64) -> SourceValues {
        let (tau, _) = self.data_time(t);
        let rho = self.material.density;
        let exact = || self.exact_or_panic(x, t);
        let pulses = |ps: &[Pulse]| -> Vec3 {
            let mut v = ZERO3;
            for p in ps {
                let s = p.signal.value(tau);
                if s != 0.0 {
                    let b = p.bump.vector(x);
                    for k in 0..3 {
                        v[k] += rho * s * b[k];
                    }
                }
            }
            v
        };
        let force = match &self.sources.force {
            Source::Zero => ZERO3,
            Source::Pulses(ps) => pulses(ps),
            Source::Exact => exact().force,
        };
        let void = match &self.sources.void {
            Source::Zero => 0.0,
            Source::Pulses(ps) => pulses(ps)[0],
            Source::Exact => exact().void_source,
        };
        let heat = match &self.sources.heat {
            Source::Zero => 0.0,
            Source::Pulses(ps) => pulses(ps)[0],
            Source::Exact => exact().heat_source,
        };
        SourceValues { force, void, heat }
    }

    /// Prescribed value and rate of the Dirichlet group on `face` at (x, t).
    /// Scalars use the first component.
    pub fn dirichlet_at(&self, face: Face, group: Group, x: &Vec3, t: f64) -> (Vec3, Vec3) {
        let c = self.boundary.condition(face, group);
        match &c.data {
            Data::Signal { signal, components } => {
                let (tau, sign) = self.data_time(t);
                let j = signal.jet(tau);
                let mut v = ZERO3;
                let mut r = ZERO3;
                for k in 0..3 {
                    v[k] = components[k] * j[0];
                    r[k] = sign * components[k] * j[1];
                }
                (v, r)
            }
            Data::Exact => {
                let e = self.exact_or_panic(x, t);
                match group {
                    Group::Displacement => (e.u, e.velocity),
                    Group::Void => ([e.state.phi, 0.0, 0.0], [e.state.phidot, 0.0, 0.0]),
                    Group::Thermal => ([e.state.theta, 0.0, 0.0], [e.theta_rate, 0.0, 0.0]),
                }
            }
        }
    }

    /// Prescribed outward flux of the Neumann group on `face`: s* (vector),
    /// h* or q* (first component).
    pub fn neumann_at(&self, face: Face, group: Group, x: &Vec3, t: f64) -> Vec3 {
        let c = self.boundary.condition(face, group);
        match &c.data {
            Data::Signal { signal, components } => {
                let (tau, _) = self.data_time(t);
                let s = signal.value(tau);
                [components[0] * s, components[1] * s, components[2] * s]
            }
            Data::Exact => {
                let e = self.exact_or_panic(x, t);
                let n = face.normal();
                let d = self.grid.dim;
                let r = &e.response;
                match group {
                    Group::Displacement => {
                        let mut s = ZERO3;
                        for i in 0..d {
                            for j in 0..d {
                                s[i] += r.stress[j][i] * n[j];
                            }
                        }
                        s
                    }
                    Group::Void => [(0..d).map(|j| r.h[j] * n[j]).sum(), 0.0, 0.0],
                    Group::Thermal => [(0..d).map(|j| r.q[j] * n[j]).sum(), 0.0, 0.0],
                }
            }
        }
    }

    /// Checks everything that does not need the time stepper. Returns
    /// warnings.
    pub fn validate(&self) -> Result<Vec<String>, ScenarioError> {
        let d = self.grid.dim;
        if self.material.dim != d {
            return Err(ScenarioError::Invalid(format!(
                "material dimension {} differs from grid dimension {d}",
                self.material.dim
            )));
        }
        let report = self.material.validate();
        if !report.is_ok() {
            let msg: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(ScenarioError::Inadmissible(msg.join("; ")));
        }
        spectrum(&self.material)?;
        self.boundary.check(d).map_err(ScenarioError::Invalid)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ScenarioError::Invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(ScenarioError::Invalid(format!("horizon must be nonnegative, got {}", self.horizon)));
        }
        let o = self.output;
        if o.sample_stride == 0 || o.r_stride == 0 || o.t_stride == 0 {
            return Err(ScenarioError::Invalid("output strides must be at least 1".into()));
        }
        if let Some(p) = &self.exact {
            p.check(d).map_err(ScenarioError::Invalid)?;
        }
        self.check_shapes()?;
        if let Some(x0) = self.support {
            self.check_support(x0)?;
        }
        Ok(self.compatibility_warnings())
    }

    fn check_shapes(&self) -> Result<(), ScenarioError> {
        let d = self.grid.dim;
        let bad = |e: String| ScenarioError::Invalid(e);
        let i = &self.initial;
        for (p, comps) in [(&i.u, d), (&i.velocity, d), (&i.phi, 1), (&i.phidot, 1), (&i.theta, 1)] {
            if let Profile::Bumps(bs) = p {
                for b in bs {
                    b.check(d, comps).map_err(bad)?;
                }
            }
        }
        for (s, comps) in [(&self.sources.force, d), (&self.sources.void, 1), (&self.sources.heat, 1)] {
            if let Source::Pulses(ps) = s {
                for p in ps {
                    p.bump.check(d, comps).map_err(bad)?;
                    p.signal.validate().map_err(bad)?;
                }
            }
        }
        let uses_exact = self.boundary.faces.iter().any(|f| {
            [&f.displacement, &f.void, &f.thermal].iter().any(|c| c.data == Data::Exact)
        }) || [&i.u, &i.velocity, &i.phi, &i.phidot, &i.theta].contains(&&Profile::Exact)
            || [&self.sources.force, &self.sources.void, &self.sources.heat].contains(&&Source::Exact);
        if uses_exact && self.exact.is_none() {
            return Err(bad("exact data without a manufactured profile".into()));
        }
        for f in &self.boundary.faces {
            for c in [&f.displacement, &f.void, &f.thermal] {
                if let Data::Signal { signal, .. } = &c.data {
                    signal.validate().map_err(bad)?;
                }
            }
        }
        Ok(())
    }

    fn check_support(&self, x0: f64) -> Result<(), ScenarioError> {
        let length = self.grid.extent[0];
        if !(0.0..length).contains(&x0) {
            return Err(ScenarioError::Invalid(format!("support depth x0 = {x0} must lie in [0, {length})")));
        }
        let fail = |what: String| Err(ScenarioError::Support { x0, what });
        if self.exact.is_some() {
            return fail("manufactured data fill the whole body".into());
        }
        let i = &self.initial;
        let named = [("u", &i.u), ("velocity", &i.velocity), ("phi", &i.phi), ("phidot", &i.phidot), ("theta", &i.theta)];
        for (name, p) in named {
            if let Profile::Bumps(bs) = p {
                if let Some(b) = bs.iter().find(|b| b.reach() > x0 && b.amplitude.iter().any(|a| *a != 0.0)) {
                    return fail(format!("initial {name} bump reaches x1 = {}", b.reach()));
                }
            }
        }
        let named = [("force", &self.sources.force), ("void", &self.sources.void), ("heat", &self.sources.heat)];
        for (name, s) in named {
            if let Source::Pulses(ps) = s {
                if let Some(p) = ps.iter().find(|p| p.bump.reach() > x0 && !p.signal.is_zero()) {
                    return fail(format!("{name} source reaches x1 = {}", p.bump.reach()));
                }
            }
        }
        for f in &self.boundary.faces {
            if f.face == (Face { axis: 0, side: super::grid::Side::Low }) {
                continue;
            }
            for (name, c) in [("displacement", &f.displacement), ("void", &f.void), ("thermal", &f.thermal)] {
                if !c.data.is_zero() {
                    return fail(format!("nonzero {name} data on face {}", f.face.name()));
                }
            }
        }
        Ok(())
    }

    /// Initial/boundary mismatches at t = 0. Flagged, not rejected.
    pub fn compatibility_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.exact.is_some() {
            return w;
        }
        for f in &self.boundary.faces {
            for (name, group, c) in [
                ("displacement", Group::Displacement, &f.displacement),
                ("void", Group::Void, &f.void),
                ("thermal", Group::Thermal, &f.thermal),
            ] {
                if let Data::Signal { signal, components } = &c.data {
                    let j = signal.jet(0.0);
                    let nonzero = components.iter().any(|c| *c != 0.0) && (j[0] != 0.0 || j[1] != 0.0);
                    if nonzero {
                        w.push(format!(
                            "face {}: {name} data do not vanish at t = 0 (value {:e}, rate {:e}); corner/edge compatibility is not checked further",
                            f.face.name(),
                            j[0],
                            j[1]
                        ));
                    }
                }
                let _ = group;
            }
        }
        let i = &self.initial;
        for (name, p) in [("u", &i.u), ("velocity", &i.velocity), ("phi", &i.phi), ("phidot", &i.phidot), ("theta", &i.theta)] {
            if let Profile::Bumps(bs) = p {
                for b in bs {
                    for face in Face::all(self.grid.dim) {
                        let in_face = match face.side {
                            super::grid::Side::Low => b.center[face.axis] - b.radius < 0.0,
                            super::grid::Side::High => b.center[face.axis] + b.radius > self.grid.extent[face.axis],
                        };
                        if in_face {
                            w.push(format!("initial {name} bump touches face {}", face.name()));
                        }
                    }
                }
            }
        }
        w
    }

    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        file.build(base)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    horizon: f64,
    dt: f64,
    #[serde(default)]
    direction: TimeDirection,
    material: MaterialRef,
    grid: GridSpec,
    support: Option<SupportSpec>,
    #[serde(default)]
    output: OutputFile,
    boundary: Vec<FaceSpec>,
    initial: Option<InitialSpec>,
    sources: Option<SourceSpec>,
    manufactured: Option<TrigProfile>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MaterialRef {
    Path(String),
    Inline(Box<PackedMaterial>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    dim: usize,
    extent: Vec<f64>,
    nodes: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SupportSpec {
    x0: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputFile {
    #[serde(default = "one")]
    sample_stride: usize,
    #[serde(default = "one")]
    r_stride: usize,
    #[serde(default = "one")]
    t_stride: usize,
}

impl Default for OutputFile {
    fn default() -> Self {
        Self {
            sample_stride: 1,
            r_stride: 1,
            t_stride: 1,
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceSpec {
    face: String,
    displacement: ConditionSpec,
    void: ConditionSpec,
    thermal: ConditionSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionSpec {
    kind: String,
    #[serde(default)]
    signal: Signal,
    components: Option<Vec<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct InitialSpec {
    #[serde(default)]
    u: Vec<Bump>,
    #[serde(default)]
    velocity: Vec<Bump>,
    #[serde(default)]
    phi: Vec<Bump>,
    #[serde(default)]
    phidot: Vec<Bump>,
    #[serde(default)]
    theta: Vec<Bump>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SourceSpec {
    #[serde(default)]
    force: Vec<Pulse>,
    #[serde(default)]
    void: Vec<Pulse>,
    #[serde(default)]
    heat: Vec<Pulse>,
}

fn bumps(v: Vec<Bump>) -> Profile {
    if v.is_empty() {
        Profile::Zero
    } else {
        Profile::Bumps(v)
    }
}

fn pulses(v: Vec<Pulse>) -> Source {
    if v.is_empty() {
        Source::Zero
    } else {
        Source::Pulses(v)
    }
}

impl ConditionSpec {
    fn build(self, face: &str, group: Group, dim: usize) -> Result<Condition, ScenarioError> {
        let (neumann_name, vector) = match group {
            Group::Displacement => ("traction", true),
            Group::Void | Group::Thermal => ("flux", false),
        };
        let kind = match self.kind.as_str() {
            "dirichlet" => ConditionKind::Dirichlet,
            k if k == neumann_name => ConditionKind::Neumann,
            other => {
                return Err(ScenarioError::Invalid(format!(
                    "face {face}: unknown condition kind '{other}' (expected 'dirichlet' or '{neumann_name}')"
                )))
            }
        };
        let mut components = ZERO3;
        match self.components {
            Some(c) => {
                let want = if vector { dim } else { 1 };
                if c.len() != want {
                    return Err(ScenarioError::Invalid(format!(
                        "face {face}: components needs {want} entries, got {}",
                        c.len()
                    )));
                }
                components[..want].copy_from_slice(&c);
            }
            None if vector && !self.signal.is_zero() => {
                return Err(ScenarioError::Invalid(format!(
                    "face {face}: nonzero displacement-group signal needs components"
                )))
            }
            None => components[0] = 1.0,
        }
        Ok(Condition {
            kind,
            data: Data::Signal {
                signal: self.signal,
                components,
            },
        })
    }
}

impl ScenarioFile {
    fn build(self, base: Option<&Path>) -> Result<Scenario, ScenarioError> {
        let grid = Grid::new(self.grid.dim, &self.grid.extent, &self.grid.nodes)?;
        let material = match self.material {
            MaterialRef::Inline(p) => p.unpack()?,
            MaterialRef::Path(p) => {
                let path = match base {
                    Some(b) => b.join(p),
                    None => p.into(),
                };
                crate::material::MaterialFile::load(&path)?
            }
        };
        let dim = grid.dim;
        let mut faces = Vec::new();
        for f in self.boundary {
            let face = Face::parse(&f.face)
                .filter(|x| x.axis < dim)
                .ok_or_else(|| ScenarioError::Invalid(format!("unknown face '{}'", f.face)))?;
            faces.push(FaceConditions {
                face,
                displacement: f.displacement.build(&f.face, Group::Displacement, dim)?,
                void: f.void.build(&f.face, Group::Void, dim)?,
                thermal: f.thermal.build(&f.face, Group::Thermal, dim)?,
            });
        }
        let boundary = BoundaryPartition { faces };
        boundary.check(dim).map_err(ScenarioError::Invalid)?;
        let mut s = Scenario::new(grid, material, boundary, self.dt, self.horizon);
        s.direction = self.direction;
        s.support = self.support.map(|x| x.x0);
        s.output = OutputSpec {
            sample_stride: self.output.sample_stride,
            r_stride: self.output.r_stride,
            t_stride: self.output.t_stride,
        };
        if let Some(profile) = self.manufactured {
            if self.initial.is_some() || self.sources.is_some() {
                return Err(ScenarioError::Invalid(
                    "[manufactured] replaces [initial] and [sources]; give one or the other".into(),
                ));
            }
            s = s.with_exact(profile);
        } else {
            let i = self.initial.unwrap_or_default();
            s.initial = InitialData {
                u: bumps(i.u),
                velocity: bumps(i.velocity),
                phi: bumps(i.phi),
                phidot: bumps(i.phidot),
                theta: bumps(i.theta),
            };
            let src = self.sources.unwrap_or_default();
            s.sources = Sources {
                force: pulses(src.force),
                void: pulses(src.void),
                heat: pulses(src.heat),
            };
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
horizon = 1.0
dt = 0.3
[material]
dim = 1
C = [1.0]
D = [0.0]
A = [1.0]
B = [0.0]
b = [0.0]
M = [0.0]
a_vec = [0.0]
K = [1e-5]
xi = 1.0
m = 0.0
a = 1.0
tau = 0.0
rho = 1.0
chi = 1.0
theta0 = 1.0

[grid]
dim = 1
extent = [1.0]
nodes = [11]

[support]
x0 = 0.25

[[boundary]]
face = "x1-"
displacement = { kind = "traction", components = [1.0], signal = { type = "raised_cosine", amplitude = 1.0, duration = 0.2 } }
void = { kind = "flux" }
thermal = { kind = "flux" }

[[boundary]]
face = "x1+"
displacement = { kind = "dirichlet" }
void = { kind = "flux" }
thermal = { kind = "dirichlet" }
"#;

    #[test]
    fn parses_and_normalizes_dt() {
        let s = Scenario::parse(BASE, None).unwrap();
        assert_eq!(s.steps(), 4);
        assert!((s.dt - 0.25).abs() < 1e-15);
        assert!(s.validate().unwrap().is_empty());
        let x1 = Face { axis: 0, side: super::super::grid::Side::High };
        assert_eq!(s.boundary.get(x1).thermal.kind, ConditionKind::Dirichlet);
    }

    #[test]
    fn missing_face_rejected() {
        let text = BASE.replace("face = \"x1+\"", "face = \"x1-\"");
        assert!(matches!(Scenario::parse(&text, None), Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn wrong_kind_rejected() {
        let text = BASE.replace("void = { kind = \"flux\" }\nthermal = { kind = \"dirichlet\" }", "void = { kind = \"traction\" }\nthermal = { kind = \"dirichlet\" }");
        let err = Scenario::parse(&text, None).unwrap_err().to_string();
        assert!(err.contains("traction"), "{err}");
    }

    #[test]
    fn support_violation_detected() {
        let text = format!("{BASE}\n[initial]\nu = [{{ center = [0.5], radius = 0.1, amplitude = [1.0] }}]\n");
        let s = Scenario::parse(&text, None).unwrap();
        assert!(matches!(s.validate(), Err(ScenarioError::Support { .. })));
        let text = format!("{BASE}\n[initial]\nu = [{{ center = [0.1], radius = 0.1, amplitude = [1.0] }}]\n");
        assert!(Scenario::parse(&text, None).unwrap().validate().is_ok());
    }

    #[test]
    fn incompatible_data_flagged() {
        let text = BASE.replace("type = \"raised_cosine\", amplitude = 1.0, duration = 0.2", "type = \"constant\", value = 1.0");
        let w = Scenario::parse(&text, None).unwrap().validate().unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("x1-"));
    }

    #[test]
    fn zero_horizon() {
        let text = BASE.replace("horizon = 1.0", "horizon = 0.0");
        assert_eq!(Scenario::parse(&text, None).unwrap().steps(), 0);
    }
}
