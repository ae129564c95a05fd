//! Time signals, spatial bumps, boundary conditions and volume sources.

use super::grid::{Face, Grid};
use crate::linalg::{Vec3, ZERO3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Scalar function of time with analytic first and second derivatives.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Signal {
    #[default]
    Zero,
    Constant { value: f64 },
    /// ½A(1 − cos(2π(t − delay)/duration)) on [delay, delay + duration].
    RaisedCosine {
        amplitude: f64,
        duration: f64,
        #[serde(default)]
        delay: f64,
    },
    /// A·exp(−((t − center)/width)²) under a raised-cosine window on
    /// [0, duration].
    WindowedGaussian {
        amplitude: f64,
        center: f64,
        width: f64,
        duration: f64,
    },
}

impl Signal {
    /// (value, first derivative, second derivative) at t.
    pub fn jet(&self, t: f64) -> [f64; 3] {
        match *self {
            Signal::Zero => [0.0; 3],
            Signal::Constant { value } => [value, 0.0, 0.0],
            Signal::RaisedCosine { amplitude, duration, delay } => {
                let s = t - delay;
                if !(0.0..=duration).contains(&s) {
                    return [0.0; 3];
                }
                let w = 2.0 * PI / duration;
                [
                    0.5 * amplitude * (1.0 - (w * s).cos()),
                    0.5 * amplitude * w * (w * s).sin(),
                    0.5 * amplitude * w * w * (w * s).cos(),
                ]
            }
            Signal::WindowedGaussian { amplitude, center, width, duration } => {
                if !(0.0..=duration).contains(&t) {
                    return [0.0; 3];
                }
                let w = 2.0 * PI / duration;
                let win = [0.5 * (1.0 - (w * t).cos()), 0.5 * w * (w * t).sin(), 0.5 * w * w * (w * t).cos()];
                let z = (t - center) / width;
                let g0 = amplitude * (-z * z).exp();
                let g1 = -2.0 * z / width * g0;
                let g2 = (4.0 * z * z - 2.0) / (width * width) * g0;
                [
                    g0 * win[0],
                    g1 * win[0] + g0 * win[1],
                    g2 * win[0] + 2.0 * g1 * win[1] + g0 * win[2],
                ]
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.jet(t)[0]
    }

    pub fn rate(&self, t: f64) -> f64 {
        self.jet(t)[1]
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Signal::Zero => true,
            Signal::Constant { value } => value == 0.0,
            Signal::RaisedCosine { amplitude, .. } | Signal::WindowedGaussian { amplitude, .. } => amplitude == 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            Signal::Zero => true,
            Signal::Constant { value } => value.is_finite(),
            Signal::RaisedCosine { amplitude, duration, delay } => {
                amplitude.is_finite() && duration > 0.0 && duration.is_finite() && delay.is_finite()
            }
            Signal::WindowedGaussian { amplitude, center, width, duration } => {
                amplitude.is_finite() && center.is_finite() && width > 0.0 && duration > 0.0 && duration.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(format!("invalid signal parameters: {self:?}"))
        }
    }
}

/// amplitude·cos⁴(π|x − c|/(2R)) inside the ball of radius R, zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    /// One entry for scalar fields, `dim` entries for vector fields.
    pub amplitude: Vec<f64>,
}

impl Bump {
    pub fn shape(&self, x: &Vec3) -> f64 {
        let mut d2 = 0.0;
        for (a, c) in self.center.iter().enumerate() {
            d2 += (x[a] - c).powi(2);
        }
        let d = d2.sqrt();
        if d >= self.radius {
            0.0
        } else {
            (0.5 * PI * d / self.radius).cos().powi(4)
        }
    }

    pub fn vector(&self, x: &Vec3) -> Vec3 {
        let s = self.shape(x);
        let mut v = ZERO3;
        for (vi, a) in v.iter_mut().zip(&self.amplitude) {
            *vi = s * a;
        }
        v
    }

    pub fn scalar(&self, x: &Vec3) -> f64 {
        self.shape(x) * self.amplitude[0]
    }

    /// Largest x₁ at which the bump is nonzero.
    pub fn reach(&self) -> f64 {
        self.center[0] + self.radius
    }

    pub fn check(&self, dim: usize, components: usize) -> Result<(), String> {
        if self.center.len() != dim {
            return Err(format!("bump center needs {dim} entries, got {}", self.center.len()));
        }
        if self.amplitude.len() != components {
            return Err(format!("bump amplitude needs {components} entries, got {}", self.amplitude.len()));
        }
        if !(self.radius > 0.0) {
            return Err(format!("bump radius must be positive, got {}", self.radius));
        }
        Ok(())
    }
}

/// Initial or prescribed field values.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Profile {
    #[default]
    Zero,
    Bumps(Vec<Bump>),
    /// Taken from the manufactured solution.
    Exact,
}

/// bump(x)·signal(t)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pulse {
    pub bump: Bump,
    pub signal: Signal,
}

/// Volumetric source term, per unit mass.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Source {
    #[default]
    Zero,
    Pulses(Vec<Pulse>),
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// Prescribed field value (u*, φ*, θ*).
    Dirichlet,
    /// Prescribed normal flux (s*, h*, q*).
    Neumann,
}

/// Boundary data: a time signal times a constant direction, or the
/// manufactured solution.
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Signal { signal: Signal, components: Vec3 },
    Exact,
}

impl Data {
    pub fn zero() -> Self {
        Data::Signal {
            signal: Signal::Zero,
            components: ZERO3,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Data::Signal { signal, components } => signal.is_zero() || components.iter().all(|c| *c == 0.0),
            Data::Exact => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub kind: ConditionKind,
    pub data: Data,
}

impl Condition {
    pub fn homogeneous(kind: ConditionKind) -> Self {
        Self { kind, data: Data::zero() }
    }
}

/// The three condition groups on one face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceConditions {
    pub face: Face,
    pub displacement: Condition,
    pub void: Condition,
    pub thermal: Condition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Displacement,
    Void,
    Thermal,
}

/// One assignment per group on every face.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPartition {
    pub faces: Vec<FaceConditions>,
}

impl BoundaryPartition {
    /// Every face gets the same homogeneous kinds.
    pub fn homogeneous(dim: usize, displacement: ConditionKind, void: ConditionKind, thermal: ConditionKind) -> Self {
        Self {
            faces: Face::all(dim)
                .into_iter()
                .map(|face| FaceConditions {
                    face,
                    displacement: Condition::homogeneous(displacement),
                    void: Condition::homogeneous(void),
                    thermal: Condition::homogeneous(thermal),
                })
                .collect(),
        }
    }

    pub fn check(&self, dim: usize) -> Result<(), String> {
        for face in Face::all(dim) {
            let n = self.faces.iter().filter(|f| f.face == face).count();
            if n != 1 {
                return Err(format!("face {} must carry exactly one assignment per group, found {n}", face.name()));
            }
        }
        if let Some(f) = self.faces.iter().find(|f| f.face.axis >= dim) {
            return Err(format!("face {} does not exist in dimension {dim}", f.face.name()));
        }
        Ok(())
    }

    pub fn get(&self, face: Face) -> &FaceConditions {
        self.faces.iter().find(|f| f.face == face).expect("partition checked")
    }

    pub fn get_mut(&mut self, face: Face) -> &mut FaceConditions {
        self.faces.iter_mut().find(|f| f.face == face).expect("partition checked")
    }

    pub fn condition(&self, face: Face, group: Group) -> &Condition {
        let f = self.get(face);
        match group {
            Group::Displacement => &f.displacement,
            Group::Void => &f.void,
            Group::Thermal => &f.thermal,
        }
    }

    /// For each node, the first face (in axis order) that prescribes a
    /// Dirichlet value for `group`. Dirichlet wins at corners.
    pub fn dirichlet_owner(&self, grid: &Grid, group: Group) -> Vec<Option<Face>> {
        let faces = Face::all(grid.dim);
        (0..grid.len())
            .map(|idx| {
                faces
                    .iter()
                    .copied()
                    .find(|&f| grid.on_face(idx, f) && self.condition(f, group).kind == ConditionKind::Dirichlet)
            })
            .collect()
    }
}
