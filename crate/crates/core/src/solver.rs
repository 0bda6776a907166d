//! Strang split-step integrator with conservation-law monitoring.
//!
//! One step is phase half-step, exact kinetic step, phase half-step. The
//! phase substeps multiply by
//! `exp(-i (dt/2 eps) (V(x) + s g(t) eps^{n sigma} |u|^{2 sigma}))`
//! and are exact flows of their own equations because |u| is invariant
//! under them; the kinetic substep is the exact free propagator on the
//! discrete torus. Each substep is an L^2 isometry, so mass is conserved
//! to roundoff by construction. The phase-kinetic-phase ordering keeps
//! snapshot states exactly on whole-step boundaries.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, Space};
use crate::fft;
use crate::params::{Params, Potential};
use crate::propagators::{free_propagate, harmonic_propagate};

/// Sign of the nonlinearity: `Defocusing` is the repulsive sign of the
/// main evolution equation; `Focusing` flips it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonlinearitySign {
    #[default]
    Defocusing,
    Focusing,
}

/// Time weight multiplying the nonlinear coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingWeight {
    /// Plain autonomous coupling eps^{n sigma}.
    #[default]
    Constant,
    /// `(1 + t^2)^{n sigma / 2 - 1}`: the weight produced by the lens change
    /// of variables that maps the harmonic equation to a free-dispersion one.
    Lens,
    /// Nonlinearity switched off entirely (exact linear reference runs).
    Off,
}

/// Default bound dt <= c * eps for semiclassical runs.
pub const DT_OVER_EPS_DEFAULT: f64 = 0.01;

/// Step factor actually used by the experiment defaults: half the bound,
/// which keeps the benchmark energy drift safely below 1e-6 (measured
/// 1.4e-6 at the bound itself, quadratic datum, eps = 0.04, T = 2).
pub const DT_FACTOR_BENCH: f64 = 0.005;

/// Relative mass allowed outside the central half-window.
pub const WINDOW_TOL_DEFAULT: f64 = 1e-8;

/// Amplitude guard: abort when max|u| exceeds this factor times the
/// theoretical focal amplitude eps^{-n/2} max|f|. The defocusing equation
/// cannot blow up, so tripping it signals numerical failure.
pub const GUARD_FACTOR_DEFAULT: f64 = 10.0;

#[derive(Clone)]
pub struct SolveConfig {
    pub dt: f64,
    pub t_span: (f64, f64),
    /// Evaluate diagnostics every this many steps.
    pub snapshot_stride: usize,
    /// Additional diagnostic times (snapped to the step lattice).
    pub extra_times: Vec<f64>,
    /// Times at which the full field is kept in the trajectory.
    pub store_fields_at: Vec<f64>,
    pub sign: NonlinearitySign,
    pub weight: CouplingWeight,
    /// Permit dt > DT_OVER_EPS_DEFAULT * eps.
    pub allow_large_dt: bool,
    pub guard_factor: f64,
    /// None disables the mass-in-window monitor.
    pub window_tol: Option<f64>,
}

impl SolveConfig {
    pub fn new(dt: f64, t_span: (f64, f64)) -> SolveConfig {
        SolveConfig {
            dt,
            t_span,
            snapshot_stride: 100,
            extra_times: Vec::new(),
            store_fields_at: Vec::new(),
            sign: NonlinearitySign::Defocusing,
            weight: CouplingWeight::Constant,
            allow_large_dt: false,
            guard_factor: GUARD_FACTOR_DEFAULT,
            window_tol: Some(WINDOW_TOL_DEFAULT),
        }
    }

    /// Default semiclassical configuration: dt = 0.005 eps over [0, T].
    pub fn semiclassical(p: &Params) -> SolveConfig {
        SolveConfig::new(DT_FACTOR_BENCH * p.eps, (0.0, p.t_final))
    }
}

/// Named scalar diagnostics evaluated along a run.
pub type DiagFn = Box<dyn Fn(f64, &Field) -> f64 + Send + Sync>;

pub struct DiagnosticSet {
    entries: Vec<(String, DiagFn)>,
}

impl DiagnosticSet {
    pub fn empty() -> DiagnosticSet {
        DiagnosticSet { entries: Vec::new() }
    }

    /// The standard channel set: mass, energy (conserved form of the
    /// current equation), max modulus, and the scaled L^{2 sigma + 2} norm.
    pub fn standard(p: &Params) -> DiagnosticSet {
        let mut set = DiagnosticSet::empty();
        set.push("mass", |_, u| u.l2_norm());
        let pe = *p;
        set.push("energy", move |_, u| energy(u, &pe, true));
        set.push("linf", |_, u| u.linf_norm());
        let pn = *p;
        set.push("l2sigma_eps", move |_, u| {
            u.l2sigma_eps_norm(pn.eps, pn.sigma).unwrap_or(f64::NAN)
        });
        set
    }

    /// Standard channels for an exact linear reference run (energy without
    /// the nonlinear term).
    pub fn standard_linear(p: &Params) -> DiagnosticSet {
        let mut set = DiagnosticSet::empty();
        set.push("mass", |_, u| u.l2_norm());
        let pe = *p;
        set.push("energy", move |_, u| energy(u, &pe, false));
        set.push("linf", |_, u| u.linf_norm());
        let pn = *p;
        set.push("l2sigma_eps", move |_, u| {
            u.l2sigma_eps_norm(pn.eps, pn.sigma).unwrap_or(f64::NAN)
        });
        set
    }

    pub fn push(&mut self, name: &str, f: impl Fn(f64, &Field) -> f64 + Send + Sync + 'static) {
        self.entries.push((name.to_string(), Box::new(f)));
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    fn eval(&self, t: f64, u: &Field) -> Vec<f64> {
        self.entries.iter().map(|(_, f)| f(t, u)).collect()
    }
}

/// Conserved energy of the evolution:
/// `1/2 ||eps grad u||^2 (+ 1/2 ||x u||^2 with the harmonic potential)
///  (+ eps^{n sigma}/(sigma+1) ||u||_{L^{2s+2}}^{2s+2} when nonlinear)`.
pub fn energy(u: &Field, p: &Params, nonlinear: bool) -> f64 {
    let mut e = 0.5 * (p.eps * u.gradient_l2_norm()).powi(2);
    if p.potential == Potential::Harmonic {
        let m = u.moment_norm(None).unwrap_or(f64::NAN);
        e += 0.5 * m * m;
    }
    if nonlinear {
        let r = 2.0 * p.sigma + 2.0;
        let nrm = u.lp_norm(r).unwrap_or(f64::NAN);
        e += p.coupling() / (p.sigma + 1.0) * nrm.powf(r);
    }
    e
}

/// Time-stamped named channels produced during a run.
#[derive(Debug, Clone, Default)]
pub struct DiagnosticSeries {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DiagnosticSeries {
    pub fn channel(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn push_row(&mut self, t: f64, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.names.len());
        self.times.push(t);
        self.rows.push(row);
    }

    /// Greatest relative drift of a channel from its initial value.
    pub fn max_relative_drift(&self, name: &str) -> Option<f64> {
        let c = self.channel(name)?;
        let first = *c.first()?;
        let scale = first.abs().max(1e-300);
        Some(c.iter().map(|v| (v - first).abs() / scale).fold(0.0, f64::max))
    }
}

/// Result of a solve: diagnostics plus any requested field snapshots.
pub struct Trajectory {
    pub params: Params,
    pub series: DiagnosticSeries,
    pub snapshots: Vec<(f64, Field)>,
    pub final_field: Field,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.series.times
    }

    pub fn snapshot_at(&self, t: f64) -> Result<&Field> {
        self.nearest_snapshot(t, 1e-9 * t.abs().max(1.0)).map(|(_, f)| f)
    }

    /// The stored snapshot closest to `t` with its actual (step-lattice)
    /// time; `tol` bounds the acceptable distance.
    pub fn nearest_snapshot(&self, t: f64, tol: f64) -> Result<(f64, &Field)> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.0 - t).abs().partial_cmp(&(b.0 - t).abs()).unwrap())
            .filter(|(ts, _)| (ts - t).abs() <= tol)
            .map(|(ts, f)| (*ts, f))
            .ok_or(Error::SnapshotMissing(t))
    }
}

/// Split-step state advancing a single run; create one per concurrent run.
pub struct Stepper {
    p: Params,
    sign: f64,
    weight: CouplingWeight,
    guard_amp: f64,
    window_tol: Option<f64>,
    t: f64,
    values: Vec<Complex64>,
    grid: std::sync::Arc<crate::grid::Grid>,
    potential: Vec<f64>,
    /// kinetic multiplier for +dt, with the 1/N inverse-FFT factor folded in
    kin_mult: Vec<Complex64>,
    kin_dt: f64,
}

impl Stepper {
    pub fn new(u0: &Field, p: &Params, cfg: &SolveConfig) -> Result<Stepper> {
        u0.require_space(Space::Physical)?;
        p.validate()?;
        let bound = DT_OVER_EPS_DEFAULT * p.eps;
        if cfg.dt.abs() > bound && !cfg.allow_large_dt {
            return Err(Error::TimeStepTooLarge {
                dt: cfg.dt,
                bound,
                c: DT_OVER_EPS_DEFAULT,
            });
        }
        let grid = u0.grid().clone();
        let potential: Vec<f64> = match p.potential {
            Potential::None => vec![0.0; grid.len()],
            Potential::Harmonic => (0..grid.len())
                .map(|i| 0.5 * grid.coords(i).iter().map(|v| v * v).sum::<f64>())
                .collect(),
        };
        let guard_amp = cfg.guard_factor * p.eps.powf(-(p.n as f64) / 2.0) * u0.linf_norm();
        Ok(Stepper {
            p: *p,
            sign: match cfg.sign {
                NonlinearitySign::Defocusing => 1.0,
                NonlinearitySign::Focusing => -1.0,
            },
            weight: cfg.weight,
            guard_amp,
            window_tol: cfg.window_tol,
            t: cfg.t_span.0,
            values: u0.values().to_vec(),
            grid,
            potential,
            kin_mult: Vec::new(),
            kin_dt: f64::NAN,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn field(&self) -> Field {
        Field::new(self.grid.clone(), Space::Physical, self.values.clone())
    }

    fn ensure_kinetic(&mut self, dt: f64) {
        if self.kin_dt == dt && !self.kin_mult.is_empty() {
            return;
        }
        let inv_n = 1.0 / self.grid.len() as f64;
        let eps = self.p.eps;
        self.kin_mult = match self.grid.dim() {
            1 => {
                let ks = self.grid.axis_wavenumbers(0);
                ks.iter()
                    .map(|&k| Complex64::from_polar(inv_n, -0.5 * eps * dt * k * k))
                    .collect()
            }
            2 => {
                let k0 = self.grid.axis_wavenumbers(0);
                let k1 = self.grid.axis_wavenumbers(1);
                let n1 = self.grid.axis(1).points;
                (0..self.grid.len())
                    .map(|i| {
                        let ksq = k0[i / n1] * k0[i / n1] + k1[i % n1] * k1[i % n1];
                        Complex64::from_polar(inv_n, -0.5 * eps * dt * ksq)
                    })
                    .collect()
            }
            _ => unreachable!(),
        };
        self.kin_dt = dt;
    }

    fn phase_half(&mut self, dt: f64, t_mid: f64) {
        let eps = self.p.eps;
        let coupling = match self.weight {
            CouplingWeight::Constant => self.sign * self.p.coupling(),
            CouplingWeight::Lens => {
                self.sign
                    * self.p.coupling()
                    * (1.0 + t_mid * t_mid).powf(self.p.n as f64 * self.p.sigma / 2.0 - 1.0)
            }
            CouplingWeight::Off => 0.0,
        };
        let factor = -dt / (2.0 * eps);
        let sigma = self.p.sigma;
        let int_sigma = if sigma.fract() == 0.0 && sigma <= 16.0 { Some(sigma as i32) } else { None };
        for (u, &v) in self.values.iter_mut().zip(&self.potential) {
            let nsq = u.norm_sqr();
            let amp2sigma = match int_sigma {
                Some(k) => nsq.powi(k),
                None => nsq.powf(sigma),
            };
            let theta = factor * (v + coupling * amp2sigma);
            *u *= Complex64::from_polar(1.0, theta);
        }
    }

    /// One Strang step of size `dt` (sign carried by `dt`).
    pub fn step(&mut self, dt: f64) {
        let t_mid = self.t + 0.5 * dt;
        self.phase_half(dt, t_mid);
        self.ensure_kinetic(dt);
        fft::fft_nd(&mut self.values, &self.grid, true);
        for (v, m) in self.values.iter_mut().zip(&self.kin_mult) {
            *v *= m;
        }
        fft::fft_nd(&mut self.values, &self.grid, false);
        self.phase_half(dt, t_mid);
        self.t += dt;
    }

    /// Guard checks: NaN/overflow, focal-amplitude bound, window monitor.
    pub fn check_guards(&self) -> Result<()> {
        let mut linf: f64 = 0.0;
        for v in &self.values {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::SolverAbort {
                    t: self.t,
                    reason: "non-finite value in state".into(),
                });
            }
            linf = linf.max(v.norm_sqr());
        }
        let linf = linf.sqrt();
        if self.guard_amp > 0.0 && linf > self.guard_amp {
            return Err(Error::SolverAbort {
                t: self.t,
                reason: format!(
                    "amplitude {linf:.3e} exceeded the blow-up guard {:.3e} (defocusing runs cannot blow up; the discretization has failed)",
                    self.guard_amp
                ),
            });
        }
        if let Some(tol) = self.window_tol {
            let outside = self.field().mass_outside_central_window();
            if outside > tol {
                return Err(Error::WindowMonitor { t: self.t, outside, tol });
            }
        }
        Ok(())
    }
}

/// One public Strang step on a field (the solver loop composes these).
pub fn strang_step(u: &Field, dt: f64, t: f64, p: &Params, cfg: &SolveConfig) -> Result<Field> {
    let mut cfg1 = cfg.clone();
    cfg1.t_span = (t, t + dt);
    let mut st = Stepper::new(u, p, &cfg1)?;
    st.step(dt);
    Ok(st.field())
}

/// Integrate the semiclassical equation over `cfg.t_span`, recording the
/// diagnostic set every `snapshot_stride` steps (plus forced times) and
/// keeping field snapshots at the requested times.
pub fn solve(u0: &Field, p: &Params, cfg: &SolveConfig, diags: DiagnosticSet) -> Result<Trajectory> {
    let (t0, t1) = cfg.t_span;
    let span = t1 - t0;
    if span == 0.0 {
        return Err(Error::EmptyTrajectory);
    }
    let n_steps = (span.abs() / cfg.dt.abs()).ceil().max(1.0) as usize;
    let dt = span / n_steps as f64;

    let step_of = |t: f64| -> usize {
        (((t - t0) / dt).round().clamp(0.0, n_steps as f64)) as usize
    };
    let mut record: Vec<bool> = vec![false; n_steps + 1];
    for k in (0..=n_steps).step_by(cfg.snapshot_stride.max(1)) {
        record[k] = true;
    }
    record[0] = true;
    record[n_steps] = true;
    for &t in &cfg.extra_times {
        record[step_of(t)] = true;
    }
    let mut store: Vec<bool> = vec![false; n_steps + 1];
    for &t in &cfg.store_fields_at {
        let k = step_of(t);
        store[k] = true;
        record[k] = true;
    }

    let mut stepper = Stepper::new(u0, p, cfg)?;
    let mut series = DiagnosticSeries {
        times: Vec::new(),
        names: diags.names(),
        rows: Vec::new(),
    };
    let mut snapshots = Vec::new();

    for k in 0..=n_steps {
        if record[k] {
            stepper.check_guards()?;
            let f = stepper.field();
            series.push_row(stepper.t(), diags.eval(stepper.t(), &f));
            if store[k] {
                snapshots.push((stepper.t(), f));
            }
        }
        if k < n_steps {
            stepper.step(dt);
        }
    }

    Ok(Trajectory {
        params: *p,
        series,
        snapshots,
        final_field: stepper.field(),
    })
}

/// Exact linear reference trajectory: the free or harmonic propagator
/// applied to the data at each requested time (no time-stepping error).
pub fn linear_trajectory(
    u0: &Field,
    p: &Params,
    times: &[f64],
    diags: DiagnosticSet,
    store_fields_at: &[f64],
) -> Result<Trajectory> {
    let mut series = DiagnosticSeries {
        times: Vec::new(),
        names: diags.names(),
        rows: Vec::new(),
    };
    let mut snapshots = Vec::new();
    let mut last = u0.clone();
    for &t in times {
        let v = match p.potential {
            Potential::None => free_propagate(u0, p.eps, t)?,
            Potential::Harmonic => harmonic_propagate(u0, p.eps, t)?,
        };
        series.push_row(t, diags.eval(t, &v));
        if store_fields_at.iter().any(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0)) {
            snapshots.push((t, v.clone()));
        }
        last = v;
    }
    Ok(Trajectory { params: *p, series, snapshots, final_field: last })
}

/// Evaluate the exact linear flow at a single time.
pub fn linear_flow_at(u0: &Field, p: &Params, t: f64) -> Result<Field> {
    match p.potential {
        Potential::None => free_propagate(u0, p.eps, t),
        Potential::Harmonic => harmonic_propagate(u0, p.eps, t),
    }
}

/// Conservation summary of a trajectory.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConservationReport {
    pub mass_initial: f64,
    pub mass_drift_rel: f64,
    pub energy_initial: f64,
    pub energy_drift_rel: f64,
}

pub fn conservation_report(tr: &Trajectory) -> Result<ConservationReport> {
    let series = &tr.series;
    let mass = series.channel("mass").ok_or(Error::EmptyTrajectory)?;
    let energy = series.channel("energy").ok_or(Error::EmptyTrajectory)?;
    if mass.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Ok(ConservationReport {
        mass_initial: mass[0],
        mass_drift_rel: series.max_relative_drift("mass").unwrap(),
        energy_initial: energy[0],
        energy_drift_rel: series.max_relative_drift("energy").unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Profile;
    use crate::grid::Grid;

    fn params_eps1() -> Params {
        Params::new(1, 3.0, 1.0, Potential::None, 1.0).unwrap()
    }

    #[test]
    fn zero_field_stays_zero() {
        let grid = Grid::line(16.0, 256).unwrap();
        let u0 = Field::zeros(grid);
        let p = params_eps1();
        let cfg = SolveConfig::new(0.01, (0.0, 0.2));
        let tr = solve(&u0, &p, &cfg, DiagnosticSet::standard(&p)).unwrap();
        assert_eq!(tr.final_field.l2_norm(), 0.0);
    }

    #[test]
    fn plane_wave_exact_solution() {
        // modulus-c plane wave: phases from kinetic and nonlinear parts are
        // both exact and commute, so even one step matches the closed form.
        let grid = Grid::line(16.0, 256).unwrap();
        let k0 = 2.0 * std::f64::consts::PI * 6.0 / 16.0;
        let c = 0.8;
        let u0 = Field::from_fn(grid.clone(), |x| Complex64::from_polar(c, k0 * x[0]));
        let p = params_eps1();
        let t = 0.5;
        let mut cfg = SolveConfig::new(0.01, (0.0, t));
        cfg.window_tol = None; // plane wave fills the box by design
        let tr = solve(&u0, &p, &cfg, DiagnosticSet::empty()).unwrap();
        let eps = p.eps;
        let phase = -eps * t * k0 * k0 / 2.0 - eps.powf(3.0) / eps * c.powf(6.0) * t;
        let want = u0.scale(Complex64::from_polar(1.0, phase));
        let err = tr.final_field.sub(&want).unwrap().l2_norm() / u0.l2_norm();
        assert!(err < 1e-10, "plane wave error {err}");
    }

    #[test]
    fn nonlinearity_off_matches_free_propagator() {
        let grid = Grid::line(32.0, 1024).unwrap();
        let u0 = Profile::unit_mass_gaussian(1, 1.0).sample(&grid);
        let p = params_eps1();
        let mut cfg = SolveConfig::new(0.01, (0.0, 1.0));
        cfg.weight = CouplingWeight::Off;
        cfg.store_fields_at = vec![0.5, 1.0];
        let tr = solve(&u0, &p, &cfg, DiagnosticSet::standard_linear(&p)).unwrap();
        for (t, f) in &tr.snapshots {
            let want = free_propagate(&u0, p.eps, *t).unwrap();
            let err = f.sub(&want).unwrap().l2_norm();
            assert!(err < 1e-9, "t={t}: linear reduction error {err}");
        }
    }

    #[test]
    fn strang_self_convergence_is_second_order() {
        let grid = Grid::line(32.0, 1024).unwrap();
        let u0 = Profile::unit_mass_gaussian(1, 1.0).sample(&grid).scale(Complex64::new(2.0, 0.0));
        let p = params_eps1();
        let t_end = 0.5;
        let run = |dt: f64| {
            let mut cfg = SolveConfig::new(dt, (0.0, t_end));
            cfg.allow_large_dt = true;
            solve(&u0, &p, &cfg, DiagnosticSet::empty()).unwrap().final_field
        };
        let reference = run(0.0005);
        let e1 = run(0.008).sub(&reference).unwrap().l2_norm();
        let e2 = run(0.004).sub(&reference).unwrap().l2_norm();
        let ratio = e1 / e2;
        assert!(
            (3.6..=4.4).contains(&ratio),
            "self-convergence ratio {ratio} outside [3.6, 4.4] (e1={e1:.3e}, e2={e2:.3e})"
        );
    }

    #[test]
    fn mass_conserved_to_roundoff_and_energy_to_1e6() {
        // Semiclassical benchmark run: quadratic datum through its focus.
        use crate::data::QuadraticDatum;
        let eps = 0.04;
        let grid = Grid::line(32.0, 8192).unwrap();
        let d = QuadraticDatum::new(Profile::unit_mass_gaussian(1, 1.0), 1.0, vec![0.0]).unwrap();
        let u0 = d.sample(eps, &grid).unwrap();
        let p = Params::new(1, 3.0, eps, Potential::None, 2.0).unwrap();
        let mut cfg = SolveConfig::new(DT_FACTOR_BENCH * eps, (0.0, 2.0));
        cfg.snapshot_stride = 250;
        let tr = solve(&u0, &p, &cfg, DiagnosticSet::standard(&p)).unwrap();
        let rep = conservation_report(&tr).unwrap();
        eprintln!(
            "benchmark drifts: mass {:.3e}, energy {:.3e}",
            rep.mass_drift_rel, rep.energy_drift_rel
        );
        assert!(rep.mass_drift_rel < 1e-10, "mass drift {:.3e}", rep.mass_drift_rel);
        assert!(rep.energy_drift_rel < 1e-6, "energy drift {:.3e}", rep.energy_drift_rel);
    }

    #[test]
    fn gauge_equivariance() {
        let grid = Grid::line(32.0, 512).unwrap();
        let u0 = Profile::unit_mass_gaussian(1, 1.0).sample(&grid);
        let p = params_eps1();
        let theta = Complex64::from_polar(1.0, 1.1);
        let cfg = SolveConfig::new(0.01, (0.0, 0.4));
        let a = solve(&u0.scale(theta), &p, &cfg, DiagnosticSet::empty()).unwrap();
        let b = solve(&u0, &p, &cfg, DiagnosticSet::empty()).unwrap();
        let err = a.final_field.sub(&b.final_field.scale(theta)).unwrap().l2_norm();
        assert!(err < 1e-13, "gauge equivariance error {err}");
    }

    #[test]
    fn time_reversal_returns_data() {
        let grid = Grid::line(32.0, 512).unwrap();
        let u0 = Profile::unit_mass_gaussian(1, 1.0).sample(&grid);
        let p = params_eps1();
        let fwd = solve(&u0, &p, &SolveConfig::new(0.01, (0.0, 0.8)), DiagnosticSet::empty())
            .unwrap();
        let back = solve(
            &fwd.final_field,
            &p,
            &SolveConfig::new(0.01, (0.8, 0.0)),
            DiagnosticSet::empty(),
        )
        .unwrap();
        let err = back.final_field.sub(&u0).unwrap().l2_norm();
        assert!(err < 1e-8, "time reversal error {err}");
    }

    #[test]
    fn dt_bound_enforced_unless_overridden() {
        let grid = Grid::line(32.0, 512).unwrap();
        let u0 = Profile::unit_mass_gaussian(1, 1.0).sample(&grid);
        let p = Params::new(1, 3.0, 0.05, Potential::None, 1.0).unwrap();
        let cfg = SolveConfig::new(0.01, (0.0, 0.1)); // dt > 0.01 * eps
        assert!(matches!(
            solve(&u0, &p, &cfg, DiagnosticSet::empty()),
            Err(Error::TimeStepTooLarge { .. })
        ));
        let mut cfg2 = cfg;
        cfg2.allow_large_dt = true;
        assert!(solve(&u0, &p, &cfg2, DiagnosticSet::empty()).is_ok());
    }

    #[test]
    fn harmonic_linear_energy_conserved() {
        let grid = Grid::line(16.0, 2048).unwrap();
        let p = Params::new(1, 3.0, 0.1, Potential::Harmonic, 2.0).unwrap();
        let u0 = Profile::unit_mass_gaussian(1, 1.0).sample(&grid);
        let times: Vec<f64> = (0..=40).map(|k| k as f64 * 0.05).collect();
        let tr = linear_trajectory(&u0, &p, &times, DiagnosticSet::standard_linear(&p), &[])
            .unwrap();
        let drift = tr.series.max_relative_drift("energy").unwrap();
        assert!(drift < 1e-8, "harmonic linear energy drift {drift:.3e}");
    }

    #[test]
    fn pointwise_nonlinearity_splitting_bound() {
        // |g(z1+z2) - g(z1) - g(z2)| <= C (|z1|^{2s}|z2| + |z2|^{2s}|z1|)
        // for g(z) = |z|^{2s} z: fit C on a coarse pre-pass, then verify on
        // a large sample with the fitted constant held fixed.
        use rand::{Rng, SeedableRng};
        let sigma = 3.0;
        let g = |z: Complex64| z * z.norm_sqr().powf(sigma);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240811);
        let mut sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            let m: f64 = rng.gen_range(0.0..10.0);
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(m, th)
        };
        let mut c_fit: f64 = 0.0;
        for _ in 0..10_000 {
            let (z1, z2) = (sample(&mut rng), sample(&mut rng));
            let lhs = (g(z1 + z2) - g(z1) - g(z2)).norm();
            let rhs = z1.norm().powf(2.0 * sigma) * z2.norm()
                + z2.norm().powf(2.0 * sigma) * z1.norm();
            if rhs > 1e-12 {
                c_fit = c_fit.max(lhs / rhs);
            }
        }
        let c_fixed = c_fit * 1.05;
        for _ in 0..1_000_000 {
            let (z1, z2) = (sample(&mut rng), sample(&mut rng));
            let lhs = (g(z1 + z2) - g(z1) - g(z2)).norm();
            let rhs = z1.norm().powf(2.0 * sigma) * z2.norm()
                + z2.norm().powf(2.0 * sigma) * z1.norm();
            assert!(
                lhs <= c_fixed * rhs + 1e-9,
                "splitting bound violated: {lhs} > {c_fixed} * {rhs}"
            );
        }
    }
}
