#![allow(dead_code)]

use thermovoid::material::Material;
use thermovoid::solver::{BoundaryPartition, ConditionKind, Face, Grid, Scenario, Side, TrigMode, TrigProfile};

/// 1D material with every coupling switched on.
pub fn coupled_1d() -> Material {
    let mut m = Material::zeroed(1);
    m.elastic[0][0][0][0] = 1.0;
    m.density = 1.0;
    m.inertia = 1.0;
    m.gradient_stiffness[0][0] = 0.5;
    m.void_stiffness = 2.0;
    m.strain_void[0][0] = 0.3;
    m.gradient_void[0] = 0.1;
    m.strain_gradient[0][0][0] = 0.1;
    m.thermal_stress[0][0] = 0.2;
    m.thermal_gradient[0] = 0.1;
    m.thermal_void = 0.1;
    m.heat_capacity = 1.0;
    m.reference_temperature = 2.0;
    m.conductivity[0][0] = 1e-5;
    m
}

pub fn mode(amplitude: f64, k: f64, phase: f64, omega: f64, time_phase: f64) -> TrigMode {
    TrigMode {
        amplitude,
        wavevector: vec![k],
        phase,
        omega,
        time_phase,
    }
}

pub fn mms_profile() -> TrigProfile {
    TrigProfile {
        u: vec![vec![mode(0.1, 1.3, 0.4, 1.7, 0.2)]],
        phi: vec![mode(0.05, 0.9, 0.7, 1.1, 0.5)],
        theta: vec![mode(0.02, 1.1, 0.3, 0.8, 0.9)],
    }
}

/// Mixed partition: traction / void-flux / temperature-Dirichlet on x1-,
/// displacement-Dirichlet / void-Dirichlet / heat-flux on x1+.
pub fn mixed_1d() -> BoundaryPartition {
    let mut p = BoundaryPartition::homogeneous(1, ConditionKind::Neumann, ConditionKind::Neumann, ConditionKind::Neumann);
    let lo = p.get_mut(Face { axis: 0, side: Side::Low });
    lo.thermal.kind = ConditionKind::Dirichlet;
    let hi = p.get_mut(Face { axis: 0, side: Side::High });
    hi.displacement.kind = ConditionKind::Dirichlet;
    hi.void.kind = ConditionKind::Dirichlet;
    p
}

pub fn mms_scenario(nodes: usize, steps: u64, horizon: f64, tau: f64) -> Scenario {
    let mut m = coupled_1d();
    m.memory = tau;
    let grid = Grid::uniform_1d(1.0, nodes).unwrap();
    thermovoid::solver::manufacture(grid, m, mixed_1d(), mms_profile(), horizon / steps as f64, horizon)
}

pub fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn load_scenario(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).unwrap()
}
