use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::config::ApproxConfig;
use super::state::MixtureState;
use crate::constitutive::{AdmissibleRegion, RegularizedLaw};
use crate::error::{Error, Result};
use crate::spectral::{padded_product, Field, ModeBasis, VectorField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Diagnostics of a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub cg_iterations: usize,
    /// `max_j |⟨momentum residual, φ_j⟩|` after the solve.
    pub galerkin_residual: f64,
    /// `max|u| dt / Δx` of the velocity used by the explicit terms.
    pub cfl: f64,
    /// Mass moved by the positivity clamp (zero when disabled).
    pub clamp_correction: f64,
}

/// Pointwise energy quantities of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateEnergy {
    /// `½ ∫ (ρ + Σ Z_i) |u|²`
    pub kinetic: f64,
    /// `∫ ℋ_δ(ρ, Z⃗)`
    pub helmholtz: f64,
    /// `∫ μ|∇u|² + (μ + λ)(div u)²`
    pub dissipation_rate: f64,
    /// `ε ∫ ∇ρ·∇∂_ρℋ_δ + Σ_i ∇Z_i·∇∂_{Z_i}ℋ_δ`
    pub eps_rate: f64,
    /// The part of `eps_rate` carried by the penalty energy `h_δ`.
    pub eps_penalty_rate: f64,
}

/// One approximation level, ready to step.
#[derive(Debug, Clone)]
pub struct Solver {
    config: ApproxConfig,
    law: RegularizedLaw,
    basis: ModeBasis,
    /// `k_j` per retained mode.
    waves: Vec<[f64; 3]>,
}

impl Solver {
    pub fn new(config: ApproxConfig) -> Result<Self> {
        config.validate()?;
        let law = RegularizedLaw::new(config.law.clone(), config.pressure_params);
        let basis = ModeBasis::new(&config.grid, config.n_modes)?;
        let waves = basis
            .modes()
            .iter()
            .map(|m| [m.k[0] as f64, m.k[1] as f64, m.k[2] as f64])
            .collect();
        Ok(Self {
            config,
            law,
            basis,
            waves,
        })
    }

    pub fn config(&self) -> &ApproxConfig {
        &self.config
    }

    pub fn law(&self) -> &RegularizedLaw {
        &self.law
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn region(&self) -> &AdmissibleRegion {
        self.config.law.region()
    }

    pub fn velocity(&self, state: &MixtureState) -> VectorField {
        state.velocity(&self.basis)
    }

    /// Validates and optionally smooths raw initial data; projects the
    /// velocity onto the Galerkin space.
    pub fn prepare_initial(&self, rho0: &Field, z0: &[Field], u0: &VectorField) -> Result<MixtureState> {
        let grid = &self.config.grid;
        if rho0.grid() != grid || u0.grid() != grid || z0.iter().any(|z| z.grid() != grid) {
            return Err(Error::Mismatch("initial data on a different grid".into()));
        }
        if z0.len() != self.config.species() {
            return Err(Error::Mismatch(format!(
                "law has {} partial densities, initial data {}",
                self.config.species(),
                z0.len()
            )));
        }
        self.check_admissible(rho0, z0, "initial data")?;
        let (rho, z) = match self.config.initial_smoothing {
            None => (rho0.clone(), z0.to_vec()),
            Some(m) => {
                let smoother = ModeBasis::new(grid, m)?;
                let rho = smoother.project(rho0);
                let z: Vec<Field> = z0
                    .iter()
                    .map(|zi| {
                        let s = zi.zip_map(rho0, |z, r| z / r);
                        smoother.project(&s).zip_map(&rho, |s, r| s * r).with_units(zi.units())
                    })
                    .collect();
                self.check_admissible(&rho, &z, "smoothed initial data")?;
                (rho, z)
            }
        };
        Ok(MixtureState {
            rho,
            z,
            u_coeffs: self.basis.vector_coefficients(u0),
            time: 0.0,
            step: 0,
        })
    }

    fn check_admissible(&self, rho: &Field, z: &[Field], what: &str) -> Result<()> {
        let region = self.region();
        for (x, &r) in rho.data().iter().enumerate() {
            if !(r > 0.0) {
                return Err(Error::Rejected(format!(
                    "{what}: rho = {r} at grid point {x} {:?}",
                    &rho.grid().point(x)[..rho.grid().dim()]
                )));
            }
        }
        let mut worst = (0.0, 0, 0);
        for (i, zi) in z.iter().enumerate() {
            let (lo, hi) = (region.a_lower()[i], region.a_upper()[i]);
            for (x, (&r, &v)) in rho.data().iter().zip(zi.data()).enumerate() {
                let tol = 1e-14 * r;
                let d = (lo * r - v).max(v - hi * r) - tol;
                if d > worst.0 {
                    worst = (d, i, x);
                }
            }
        }
        if worst.0 > 0.0 {
            let (d, i, x) = worst;
            return Err(Error::Rejected(format!(
                "{what}: Z_{} leaves the band [{} rho, {} rho] by {d:e} at grid point {x} {:?}",
                i + 1,
                region.a_lower()[i],
                region.a_upper()[i],
                &rho.grid().point(x)[..rho.grid().dim()]
            )));
        }
        Ok(())
    }

    /// `ρ ↦ (ρ − dt div(ρu)) / (1 − dt εΔ)` in spectral space.
    fn advance_density(&self, f: &Field, u: &VectorField) -> Field {
        let g = &self.config.grid;
        let (dt, eps) = (self.config.dt, self.config.epsilon);
        let mut acc = g.forward(f.data());
        for (a, ua) in u.components().iter().enumerate() {
            let flux = g.forward(padded_product(&[f, ua]).data());
            for (k, (o, fl)) in acc.iter_mut().zip(flux).enumerate() {
                let xi = g.xi_vec(k)[a];
                if xi != 0.0 {
                    *o -= fl * I * (dt * xi);
                }
            }
        }
        for (k, o) in acc.iter_mut().enumerate() {
            let s = g.xi_sq(k);
            if s != 0.0 {
                *o /= 1.0 + dt * eps * s;
            }
        }
        Field::raw(g, g.inverse(acc), f.units())
    }

    fn pressure_field(&self, rho: &Field, z: &[Field]) -> Field {
        let k = z.len();
        let data = (0..rho.data().len())
            .into_par_iter()
            .map(|x| {
                let zz: Vec<f64> = (0..k).map(|i| z[i].data()[x]).collect();
                self.law.pressure(rho.data()[x], &zz)
            })
            .collect();
        Field::raw(rho.grid(), data, "P")
    }

    /// `(A c)_{a,j} = μ|k_j|² c_{a,j} + (μ + λ) k_{j,a} (k_j · c_j)`.
    fn apply_viscous(&self, c: &[f64], out: &mut [f64]) {
        let n = self.basis.len();
        let d = self.config.grid.dim();
        let (mu, ml) = (self.config.mu, self.config.mu + self.config.lambda);
        for (j, k) in self.waves.iter().enumerate() {
            let ksq: f64 = k.iter().map(|v| v * v).sum();
            let kc: f64 = (0..d).map(|a| k[a] * c[a * n + j]).sum();
            for a in 0..d {
                out[a * n + j] = mu * ksq * c[a * n + j] + ml * k[a] * kc;
            }
        }
    }

    pub(crate) fn dissipation_rate(&self, c: &[f64]) -> f64 {
        let n = self.basis.len();
        let d = self.config.grid.dim();
        let (mu, ml) = (self.config.mu, self.config.mu + self.config.lambda);
        self.waves
            .iter()
            .enumerate()
            .map(|(j, k)| {
                let ksq: f64 = k.iter().map(|v| v * v).sum();
                let kc: f64 = (0..d).map(|a| k[a] * c[a * n + j]).sum();
                let cc: f64 = (0..d).map(|a| c[a * n + j] * c[a * n + j]).sum();
                mu * ksq * cc + ml * kc * kc
            })
            .sum()
    }

    /// `P_N(R u)/dt + A u` for `u` given by coefficients.
    fn apply_operator(&self, r_over_dt: &Field, c: &[f64], out: &mut [f64]) {
        let n = self.basis.len();
        let u = self.basis.synthesize_vector(c, "L/T");
        self.apply_viscous(c, out);
        for (a, ua) in u.components().iter().enumerate() {
            let m = self.basis.coefficients(&(r_over_dt * ua));
            for (o, v) in out[a * n..(a + 1) * n].iter_mut().zip(m) {
                *o += v;
            }
        }
    }

    /// Preconditioned conjugate gradients for the momentum update.
    fn solve_momentum(&self, r_new: &Field, rhs: &[f64], guess: &[f64]) -> Result<(Vec<f64>, usize, f64)> {
        let cfg = &self.config;
        let n = self.basis.len();
        let d = cfg.grid.dim();
        let r_over_dt = r_new.scale(1.0 / cfg.dt);
        let rbar = r_new.mean() / cfg.dt;
        let precond: Vec<f64> = (0..d * n)
            .map(|i| {
                let (a, j) = (i / n, i % n);
                let k = self.waves[j];
                let ksq: f64 = k.iter().map(|v| v * v).sum();
                1.0 / (rbar + cfg.mu * ksq + (cfg.mu + cfg.lambda).max(0.0) * k[a] * k[a])
            })
            .collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut x = guess.to_vec();
        let mut ax = vec![0.0; d * n];
        self.apply_operator(&r_over_dt, &x, &mut ax);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let target = cfg.cg_tolerance * dot(rhs, rhs).sqrt().max(f64::MIN_POSITIVE);
        let mut zv: Vec<f64> = r.iter().zip(&precond).map(|(a, p)| a * p).collect();
        let mut p = zv.clone();
        let mut rz = dot(&r, &zv);
        let mut ap = vec![0.0; d * n];
        let mut iterations = 0;
        while dot(&r, &r).sqrt() > target {
            if iterations == cfg.cg_max_iterations {
                return Err(Error::NoConvergence {
                    solver: "momentum CG",
                    iterations,
                    state: format!("residual {:e}, target {target:e}", dot(&r, &r).sqrt()),
                });
            }
            self.apply_operator(&r_over_dt, &p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..d * n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..d * n {
                zv[i] = r[i] * precond[i];
            }
            let rz_new = dot(&r, &zv);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..d * n {
                p[i] = zv[i] + beta * p[i];
            }
            iterations += 1;
        }
        // True residual, not the recursively updated one.
        self.apply_operator(&r_over_dt, &x, &mut ax);
        let galerkin = rhs
            .iter()
            .zip(&ax)
            .map(|(b, a)| (b - a).abs())
            .fold(0.0, f64::max);
        Ok((x, iterations, galerkin))
    }

    /// One IMEX step: implicit ε-diffusion and viscosity, explicit
    /// dealiased transport, convection, pressure and ε-compensation.
    pub fn step(&self, state: &MixtureState) -> Result<(MixtureState, StepReport)> {
        let cfg = &self.config;
        let g = &cfg.grid;
        let d = g.dim();
        let n = self.basis.len();
        let time = state.time + cfg.dt;
        let u = self.velocity(state);
        let cfl = u.sup() * cfg.dt / g.spacing();
        if cfl > cfg.cfl_bound {
            log::warn!("CFL number {cfl:.3} exceeds {} at t = {time}", cfg.cfl_bound);
        }

        let r_old = state.inertial_density();
        let mut rho = self.advance_density(&state.rho, &u);
        let mut z: Vec<Field> = state.z.iter().map(|zi| self.advance_density(zi, &u)).collect();
        let clamp_correction = if cfg.positivity_clamp {
            clamp_positive(&mut rho, &mut z, state)
        } else {
            0.0
        };
        let blow_up = |detail: String| Error::BlowUp { time, detail };
        if !rho.is_finite() || z.iter().any(|f| !f.is_finite()) {
            return Err(blow_up("non-finite density".into()));
        }
        if rho.min() <= 0.0 {
            return Err(blow_up(format!("density reached {:e}", rho.min())));
        }
        if let Some(zi) = z.iter().find(|f| f.min() < 0.0) {
            return Err(blow_up(format!("partial density reached {:e}", zi.min())));
        }
        let r_new = {
            let mut r = rho.clone();
            for zi in &z {
                for (a, b) in r.data_mut().iter_mut().zip(zi.data()) {
                    *a += b;
                }
            }
            r
        };

        // Explicit forcing, assembled in spectral space per component.
        let pressure = self.pressure_field(&rho, &z);
        if !pressure.is_finite() {
            return Err(blow_up("non-finite pressure".into()));
        }
        let p_hat = g.forward(pressure.data());
        let grad_r: Vec<Field> = crate::spectral::grad(&r_old).into_components();
        let grad_u: Vec<Vec<Field>> = u
            .components()
            .iter()
            .map(|ua| crate::spectral::grad(ua).into_components())
            .collect();
        let mut stress_hat = vec![vec![Vec::new(); d]; d];
        for a in 0..d {
            for b in a..d {
                let s = g.forward(padded_product(&[&r_old, u.component(a), u.component(b)]).data());
                stress_hat[a][b] = s.clone();
                stress_hat[b][a] = s;
            }
        }
        let mut rhs = vec![0.0; d * n];
        for a in 0..d {
            let mut comp = vec![Complex64::default(); g.len()];
            for b in 0..d {
                let eps_b = g.forward(padded_product(&[&grad_r[b], &grad_u[a][b]]).data());
                for (k, o) in comp.iter_mut().enumerate() {
                    let xi = g.xi_vec(k);
                    *o -= stress_hat[a][b][k] * I * xi[b] + eps_b[k] * cfg.epsilon;
                }
            }
            for (k, o) in comp.iter_mut().enumerate() {
                *o -= p_hat[k] * I * g.xi_vec(k)[a];
            }
            let forcing = self.basis.coefficients_of_spectrum(&comp);
            // Pointwise, matching the mass operator and the kinetic energy.
            let inertia = self.basis.coefficients(&(&r_old * u.component(a)));
            for j in 0..n {
                rhs[a * n + j] = forcing[j] + inertia[j] / cfg.dt;
            }
        }

        let (u_coeffs, cg_iterations, galerkin_residual) =
            self.solve_momentum(&r_new, &rhs, &state.u_coeffs)?;
        if u_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(blow_up("non-finite velocity".into()));
        }
        Ok((
            MixtureState {
                rho,
                z,
                u_coeffs,
                time,
                step: state.step + 1,
            },
            StepReport {
                cg_iterations,
                galerkin_residual,
                cfl,
                clamp_correction,
            },
        ))
    }

    /// Kinetic and Helmholtz energies and the dissipation rates of `state`.
    pub fn state_energy(&self, state: &MixtureState) -> Result<StateEnergy> {
        let g = &self.config.grid;
        let cell = g.cell_volume();
        let u = self.velocity(state);
        let r = state.inertial_density();
        let kinetic = 0.5 * r.data().iter().zip(u.norm_sq().data()).map(|(a, b)| a * b).sum::<f64>() * cell;
        let k = state.z.len();
        let per_point: Vec<(f64, f64, Vec<f64>)> = (0..g.len())
            .into_par_iter()
            .map(|x| {
                let rho = state.rho.data()[x];
                let zz: Vec<f64> = (0..k).map(|i| state.z[i].data()[x]).collect();
                let h = self.law.energy(rho, &zz)?;
                let (dr, dz) = self.law.energy_gradient(rho, &zz)?;
                Ok((h, dr, dz))
            })
            .collect::<Result<_>>()?;
        let helmholtz = per_point.iter().map(|p| p.0).sum::<f64>() * cell;

        // Penalty part: h_δ = δ/(B − 1) · penalty.
        let params = self.law.params();
        let c = params.delta / (params.b_exponent - 1.0);
        let pen: Vec<(f64, Vec<f64>)> = (0..g.len())
            .map(|x| {
                let zz: Vec<f64> = (0..k).map(|i| state.z[i].data()[x]).collect();
                let (pr, pz) = params.penalty_gradient(state.rho.data()[x], &zz);
                (c * pr, pz.into_iter().map(|v| c * v).collect())
            })
            .collect();

        let pair = |f: &Field, h: Vec<f64>| -> f64 {
            let hf = Field::raw(g, h, "1");
            let gf = crate::spectral::grad(f);
            let gh = crate::spectral::grad(&hf);
            gf.dot(&gh)
        };
        let mut eps_rate = pair(&state.rho, per_point.iter().map(|p| p.1).collect());
        let mut eps_pen = pair(&state.rho, pen.iter().map(|p| p.0).collect());
        for i in 0..k {
            eps_rate += pair(&state.z[i], per_point.iter().map(|p| p.2[i]).collect());
            eps_pen += pair(&state.z[i], pen.iter().map(|p| p.1[i]).collect());
        }
        Ok(StateEnergy {
            kinetic,
            helmholtz,
            dissipation_rate: self.dissipation_rate(&state.u_coeffs),
            eps_rate: self.config.epsilon * eps_rate,
            eps_penalty_rate: self.config.epsilon * eps_pen,
        })
    }
}

/// Clamps `ρ` and `Z_i` from below and rescales to restore the old masses.
fn clamp_positive(rho: &mut Field, z: &mut [Field], old: &MixtureState) -> f64 {
    let floor = 1e-12;
    let mut moved = 0.0;
    let mut fix = |f: &mut Field, target: f64, floor: f64| {
        let cell = f.grid().cell_volume();
        let mut changed = 0.0;
        for v in f.data_mut() {
            if *v < floor {
                changed += (floor - *v) * cell;
                *v = floor;
            }
        }
        if changed > 0.0 {
            let scale = target / f.integral();
            for v in f.data_mut() {
                *v *= scale;
            }
        }
        moved += changed;
    };
    fix(rho, old.rho.integral(), floor);
    for (zi, oi) in z.iter_mut().zip(&old.z) {
        fix(zi, oi.integral(), 0.0);
    }
    if moved > 0.0 {
        log::info!("positivity clamp moved {moved:e} mass at t = {}", old.time);
    }
    moved
}
