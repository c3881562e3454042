use std::sync::Arc;

use crate::constitutive::{PressureLaw, RegularizedPressureParams};
use crate::error::{Error, Result};
use crate::spectral::{ModeBasis, TorusGrid};

/// Advisory CFL number; exceeding it only logs a warning.
pub const DEFAULT_CFL_BOUND: f64 = 0.5;

/// Parameters of one `(N, ε, δ)` approximation level plus the time grid.
#[derive(Debug, Clone)]
pub struct ApproxConfig {
    pub grid: TorusGrid,
    /// Scalar Galerkin modes per velocity component.
    pub n_modes: usize,
    pub epsilon: f64,
    pub pressure_params: RegularizedPressureParams,
    pub mu: f64,
    pub lambda: f64,
    pub dt: f64,
    pub t_end: f64,
    pub law: Arc<dyn PressureLaw>,
    pub cfl_bound: f64,
    /// Relative residual target of the momentum solve.
    pub cg_tolerance: f64,
    pub cg_max_iterations: usize,
    /// Clamp negative densities and restore masses instead of failing.
    pub positivity_clamp: bool,
    /// Optional smoothing of the initial data onto this many modes.
    pub initial_smoothing: Option<usize>,
}

impl ApproxConfig {
    /// Defaults for the solver knobs that are not physical parameters.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: TorusGrid,
        n_modes: usize,
        epsilon: f64,
        pressure_params: RegularizedPressureParams,
        mu: f64,
        lambda: f64,
        dt: f64,
        t_end: f64,
        law: Arc<dyn PressureLaw>,
    ) -> Self {
        Self {
            grid,
            n_modes,
            epsilon,
            pressure_params,
            mu,
            lambda,
            dt,
            t_end,
            law,
            cfl_bound: DEFAULT_CFL_BOUND,
            cg_tolerance: 1e-13,
            cg_max_iterations: 500,
            positivity_clamp: false,
            initial_smoothing: None,
        }
    }

    pub fn species(&self) -> usize {
        self.law.species()
    }

    /// Number of steps needed to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("mu", self.mu),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(2.0 * self.mu + 3.0 * self.lambda >= 0.0) {
            return Err(Error::Config(format!(
                "viscosities need 2 mu + 3 lambda >= 0, got mu = {}, lambda = {}",
                self.mu, self.lambda
            )));
        }
        self.pressure_params.validate_for(self.law.exponents())?;
        let total = ModeBasis::total_modes(&self.grid);
        if self.n_modes == 0 || self.n_modes > total {
            return Err(Error::Config(format!(
                "n_modes must lie in 1..={total} on this grid, got {}",
                self.n_modes
            )));
        }
        if let Some(m) = self.initial_smoothing {
            if m == 0 || m > total {
                return Err(Error::Config(format!(
                    "initial_smoothing must lie in 1..={total}, got {m}"
                )));
            }
        }
        if !(self.cg_tolerance > 0.0) || self.cg_max_iterations == 0 {
            return Err(Error::Config("momentum solve needs a positive tolerance and budget".into()));
        }
        Ok(())
    }
}
