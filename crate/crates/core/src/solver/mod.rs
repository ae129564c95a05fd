//! Explicit solver for the time-reflected forward problem on rectilinear
//! grids, with the dissipative system available for time-reversal checks.

mod grid;
mod integrator;
mod manufactured;
mod output;
mod scenario;
mod signal;

pub use grid::{Face, Grid, GridError, Side};
pub use integrator::{
    discrete_stored_energy, reverse_time, run, run_unchecked, stability_budget, stability_limits, EnergySample, SimState, SolverError,
    StabilityBudget, Stepper, Trajectory, CFL_NUMBER, THERMAL_BUDGET,
};
pub(crate) use integrator::{point_states, point_states_with, responses, stored_energy_in_box};
pub use manufactured::{ExactPoint, Jet, TrigMode, TrigProfile};
pub use output::{columns, write_binary, write_csv};
pub use scenario::{InitialData, OutputSpec, Scenario, ScenarioError, SourceValues, Sources};
pub use signal::{
    BoundaryPartition, Bump, Condition, ConditionKind, Data, FaceConditions, Group, Profile, Pulse, Signal, Source,
};

use crate::material::Material;

/// Scenario whose data are those of `profile`, so that the profile solves
/// the discrete problem up to truncation error.
pub fn manufacture(
    grid: Grid,
    material: Material,
    boundary: BoundaryPartition,
    profile: TrigProfile,
    dt: f64,
    horizon: f64,
) -> Scenario {
    Scenario::new(grid, material, boundary, dt, horizon).with_exact(profile)
}

/// Largest nodal deviation of (u, φ, θ) from the manufactured solution.
pub fn max_error(scenario: &Scenario, state: &SimState) -> f64 {
    let g = &scenario.grid;
    let t = state.time();
    let mut err: f64 = 0.0;
    for k in 0..g.len() {
        let Some(e) = scenario.exact_at(&g.position(k), t) else {
            return f64::NAN;
        };
        for i in 0..g.dim {
            err = err.max((state.u[k][i] - e.u[i]).abs());
        }
        err = err.max((state.phi[k] - e.state.phi).abs());
        err = err.max((state.theta[k] - e.state.theta).abs());
    }
    err
}
