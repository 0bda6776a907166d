//! Numerical scattering operator and caustic-crossing profile extraction.
//!
//! The scattering map S sends the t -> -infinity free asymptotic state of
//! the unit-scale defocusing equation to the t -> +infinity one. It is
//! approximated by finite-horizon conjugation: spread the profile backward
//! with the free flow, integrate the nonlinear equation across [-T, T],
//! and undo the free flow. Doubling the horizon must move the result by
//! less than the configured tolerance, which is the operational definition
//! of "scattering achieved"; the dispersive decay for sigma > 2/n makes
//! the tail interaction integrable.
//!
//! The conjugated operator F . S . F^{-1} describes how a quadratic-phase
//! solution crosses its focus: the post-focus profile extracted from a
//! simulation must agree with it. Those are two independent routes to the
//! same object, and the crossing report checks them against each other
//! (plus a control that must fail: pretending the profile is unchanged).

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{trig_eval_many_1d, Profile, QuadraticDatum};
use crate::error::{Error, Result};
use crate::field::{Field, Space};
use crate::grid::{min_points, Grid};
use crate::params::{Params, Potential};
use crate::propagators::{caustic_approximant, free_propagate, CausticSide};
use crate::solver::{solve, DiagnosticSet, SolveConfig, DT_FACTOR_BENCH};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatterConfig {
    /// Matching horizon T_s.
    pub horizon: f64,
    /// Time step of the unit-scale integration.
    pub dt: f64,
    /// L^2 tolerance of the horizon-doubling convergence test.
    pub tolerance: f64,
    /// Skip the doubling test (for quick intermediate work only).
    pub check_doubling: bool,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        ScatterConfig { horizon: 20.0, dt: DT_FACTOR_BENCH, tolerance: 1e-4, check_doubling: true }
    }
}

/// Grid large enough to hold the profile spread to `horizon` with the
/// central half-window mass policy intact.
fn scattering_grid(profile: &Profile, horizon: f64) -> Result<std::sync::Arc<Grid>> {
    let r = profile.support_radius();
    let k = profile.max_wavenumber();
    let spread = r + horizon * k;
    let l = (4.4 * spread / 32.0).ceil() * 32.0;
    // local wavenumber of the spread state ~ |x|/T, plus the envelope's own
    let k_needed = l / (2.0 * horizon) + k;
    let n = min_points(l, k_needed);
    Grid::line(l, n)
}

fn integrate_unit_scale(
    start: &Field,
    n: usize,
    sigma: f64,
    span: (f64, f64),
    cfg: &ScatterConfig,
    guard_peak: f64,
) -> Result<Field> {
    let p = Params::new(n, sigma, 1.0, Potential::None, span.1)?;
    let mut sc = SolveConfig::new(cfg.dt, span);
    sc.allow_large_dt = cfg.dt > crate::solver::DT_OVER_EPS_DEFAULT;
    sc.snapshot_stride = 1000;
    // the spread start state has a small peak; the guard must key off the
    // refocused profile amplitude instead
    sc.guard_factor = 10.0 * guard_peak / start.linf_norm().max(1e-300);
    Ok(solve(start, &p, &sc, DiagnosticSet::empty())?.final_field)
}

fn scatter_once(
    profile: &Profile,
    n: usize,
    sigma: f64,
    horizon: f64,
    grid: &std::sync::Arc<Grid>,
    cfg: &ScatterConfig,
) -> Result<Field> {
    let f = profile.sample(grid);
    crate::data::sigma_class_check(&f)?;
    let spread = free_propagate(&f, 1.0, -horizon)?;
    let out = integrate_unit_scale(&spread, n, sigma, (-horizon, horizon), cfg, f.linf_norm())?;
    free_propagate(&out, 1.0, -horizon)
}

/// Compare two scatter results on the lattice of the smaller grid (the
/// doubled-horizon grid shares dx and nests).
fn lattice_difference(small: &Field, big: &Field) -> Result<f64> {
    let ns = small.grid().axis(0).points;
    let nb = big.grid().axis(0).points;
    let dxs = small.grid().axis(0).spacing();
    let dxb = big.grid().axis(0).spacing();
    if (dxs - dxb).abs() > 1e-12 * dxs || nb < ns {
        return Err(Error::GridMismatch);
    }
    let off = (nb - ns) / 2;
    let mut acc = 0.0;
    for i in 0..ns {
        acc += (small.values()[i] - big.values()[off + i]).norm_sqr();
    }
    Ok((acc * dxs).sqrt())
}

/// Forward scattering map: profile of the incoming free state to the
/// profile of the outgoing one.
pub fn scatter_forward(profile: &Profile, n: usize, sigma: f64, cfg: &ScatterConfig) -> Result<Profile> {
    let grid = scattering_grid(profile, cfg.horizon)?;
    let result = scatter_once(profile, n, sigma, cfg.horizon, &grid, cfg)?;
    if cfg.check_doubling {
        // same dx, doubled box: the lattices nest and the spread state at
        // twice the horizon still respects the window policy
        let big = Grid::line(2.0 * grid.axis(0).length, 2 * grid.axis(0).points)?;
        let doubled = scatter_once(profile, n, sigma, 2.0 * cfg.horizon, &big, cfg)?;
        let gap = lattice_difference(&result, &doubled)?;
        if gap > cfg.tolerance {
            return Err(Error::ScatteringNotConverged { gap, tol: cfg.tolerance });
        }
    }
    Profile::from_field(&result)
}

/// The unitary centered transform of a sampled profile, as a profile on
/// the dual lattice.
fn fourier_profile(profile: &Profile, forward: bool) -> Result<Profile> {
    let grid = match profile {
        Profile::Samples { grid, .. } => grid.clone(),
        Profile::Gaussian { .. } => {
            let r = profile.support_radius();
            let l = (4.0 * r.max(8.0) / 16.0).ceil() * 16.0;
            let n = min_points(l, 2.0 * profile.max_wavenumber());
            Grid::line(l, n)?
        }
    };
    let f = profile.sample(&grid);
    let spec = if forward { f.to_spectral()? } else { conj_transform(&f)? };
    let dual_axis = (2.0 * grid.axis(0).max_wavenumber(), grid.axis(0).points);
    let dual = Grid::new(&[dual_axis])?;
    Ok(Profile::Samples { grid: dual, values: spec.into_values() })
}

/// Inverse unitary transform realized as conj . forward . conj.
fn conj_transform(f: &Field) -> Result<Field> {
    let conj = Field::new(
        f.grid().clone(),
        Space::Physical,
        f.values().iter().map(|v| v.conj()).collect(),
    );
    let spec = conj.to_spectral()?;
    Ok(Field::new(
        spec.grid().clone(),
        Space::Physical,
        spec.values().iter().map(|v| v.conj()).collect(),
    ))
}

/// The caustic-crossing operator: forward transform, scatter, inverse
/// transform. The transform's unimodular normalization constant cancels
/// against itself because the scattering map commutes with constant
/// phases, so the unitary convention used here gives the same operator as
/// any other unimodular choice.
pub fn z_operator(profile: &Profile, n: usize, sigma: f64, cfg: &ScatterConfig) -> Result<Profile> {
    if n != 1 {
        return Err(Error::BadDimension(n));
    }
    let hat = fourier_profile(profile, true)?;
    let scattered = scatter_forward(&hat, n, sigma, cfg)?;
    fourier_profile(&scattered, false)
}

/// Dilation-corrected crossing operator for a focus at time `t_focus`:
/// conjugate by the unitary dilation that rescales the focus to unit time.
/// At t_focus = 1 this is `z_operator` itself.
pub fn z_operator_at_scale(
    profile: &Profile,
    n: usize,
    sigma: f64,
    t_focus: f64,
    cfg: &ScatterConfig,
) -> Result<Profile> {
    if (t_focus - 1.0).abs() < 1e-12 {
        return z_operator(profile, n, sigma, cfg);
    }
    let dilated = dilate_profile(profile, t_focus)?;
    let z = z_operator(&dilated, n, sigma, cfg)?;
    dilate_profile(&z, 1.0 / t_focus)
}

/// Unitary dilation `f -> lambda^{n/2} f(lambda x)` of a profile.
fn dilate_profile(profile: &Profile, lambda: f64) -> Result<Profile> {
    match profile {
        Profile::Gaussian { amplitude, width, center, momentum } => Ok(Profile::Gaussian {
            amplitude: amplitude * lambda.sqrt(),
            width: width / lambda,
            center: center.iter().map(|c| c / lambda).collect(),
            momentum: momentum.iter().map(|p| p * lambda).collect(),
        }),
        Profile::Samples { grid, .. } => {
            let ax = grid.axis(0);
            let new_grid = Grid::line(ax.length / lambda, ax.points)?;
            let shift = vec![0.0];
            let f = profile.sample_affine(&new_grid, &shift, 1.0 / lambda);
            Ok(Profile::from_field(&f.scale(Complex64::new(lambda.sqrt(), 0.0)))?)
        }
    }
}

/// Strip the post-focus quadratic phase, dilation and amplitude from a
/// snapshot of the evolution, recovering the crossing profile on its own
/// grid. Requires `t > t_focus + max(10 eps, 0.1 t_focus)` and the focus
/// point on the sample lattice.
pub fn extract_post_focus_profile(
    snapshot: &Field,
    d: &QuadraticDatum,
    t: f64,
    p: &Params,
) -> Result<Profile> {
    snapshot.require_space(Space::Physical)?;
    if p.n != 1 {
        return Err(Error::BadDimension(p.n));
    }
    let tj = d.t_focus;
    let floor = (10.0 * p.eps).max(0.1 * tj);
    if t <= tj + floor {
        return Err(Error::TooCloseToFocus { t, t_focus: tj, floor });
    }
    let lam = 1.0 - t / tj; // negative here
    let grid = snapshot.grid();
    let n_pts = grid.axis(0).points;
    let dx = grid.axis(0).spacing();
    let xj = d.x_focus[0];
    let j0 = xj / dx;
    if (j0 - j0.round()).abs() > 1e-9 {
        return Err(Error::BadParams(
            "focus point must lie on the sample lattice for extraction".into(),
        ));
    }
    let j0 = j0.round() as i64;

    // output lattice y_k = (k - N/2) dy with dy = dx / |lam|; the sample at
    // y_k is the snapshot at x = x_j + lam y_k, an exact lattice point
    let dy = dx / lam.abs();
    let y_grid = Grid::line(dy * n_pts as f64, n_pts)?;
    let amp_inv = Complex64::from_polar(
        lam.abs().powf(p.n as f64 / 2.0),
        (p.n as f64) * std::f64::consts::FRAC_PI_2,
    );
    let half = n_pts as i64 / 2;
    let mut values = Vec::with_capacity(n_pts);
    for k in 0..n_pts as i64 {
        let steps = -(k - half); // lam < 0: x index decreases as y grows
        let m = (half + j0 + steps).rem_euclid(n_pts as i64) as usize;
        let y = (k - half) as f64 * dy;
        let chirp = Complex64::from_polar(1.0, -(lam * y).powi(2) / (2.0 * p.eps * (t - tj)));
        values.push(snapshot.values()[m] * chirp * amp_inv);
    }
    Ok(Profile::Samples { grid: y_grid, values })
}

/// Relative L^2 distance between two profiles, evaluated on the first
/// profile's lattice (the second is trig-interpolated there).
pub fn profile_distance_rel(a: &Profile, b: &Profile) -> Result<f64> {
    let grid = match a {
        Profile::Samples { grid, .. } => grid.clone(),
        Profile::Gaussian { .. } => {
            let l = 4.0 * a.support_radius().max(8.0);
            Grid::line((l / 16.0).ceil() * 16.0, min_points(l, 2.0 * a.max_wavenumber()))?
        }
    };
    let fa = a.sample(&grid);
    let fb = match b {
        Profile::Samples { grid: gb, values } => {
            let xs: Vec<f64> = grid.axis_coords(0);
            let vals = trig_eval_many_1d(gb, values, &xs);
            Field::new(grid.clone(), Space::Physical, vals)
        }
        Profile::Gaussian { .. } => b.sample(&grid),
    };
    let denom = fb.l2_norm().max(1e-300);
    Ok(fa.sub(&fb)?.l2_norm() / denom)
}

/// On-disk cache of crossing profiles keyed by the full configuration.
pub struct ZCache {
    dir: PathBuf,
}

#[derive(Serialize)]
struct ZKey<'a> {
    profile: &'a Profile,
    n: usize,
    sigma_bits: u64,
    horizon_bits: u64,
    dt_bits: u64,
    tol_bits: u64,
    version: u16,
}

#[derive(Serialize, Deserialize)]
struct ZIndexRow {
    hash: String,
    file: String,
}

impl ZCache {
    pub fn open(dir: &Path) -> Result<ZCache> {
        std::fs::create_dir_all(dir)?;
        Ok(ZCache { dir: dir.to_path_buf() })
    }

    fn key_hash(profile: &Profile, n: usize, sigma: f64, cfg: &ScatterConfig) -> Result<String> {
        let key = ZKey {
            profile,
            n,
            sigma_bits: sigma.to_bits(),
            horizon_bits: cfg.horizon.to_bits(),
            dt_bits: cfg.dt.to_bits(),
            tol_bits: cfg.tolerance.to_bits(),
            version: crate::snapshot::FORMAT_VERSION,
        };
        let bytes = serde_json::to_vec(&key)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        Ok(format!("{:x}", hasher.finalize()))
    }

    fn index_path(&self) -> PathBuf {
        self.dir.join("index.jsonl")
    }

    fn lookup(&self, hash: &str) -> Result<Option<Profile>> {
        let idx = self.index_path();
        if !idx.exists() {
            return Ok(None);
        }
        let content = std::fs::read_to_string(&idx)?;
        for line in content.lines() {
            let row: ZIndexRow = serde_json::from_str(line)?;
            if row.hash == hash {
                let (f, _, _) = crate::snapshot::read_field(&self.dir.join(&row.file))?;
                return Ok(Some(Profile::from_field(&f)?));
            }
        }
        Ok(None)
    }

    fn store(&self, hash: &str, profile: &Profile) -> Result<()> {
        let file = format!("{hash}.snls");
        let grid = match profile {
            Profile::Samples { grid, .. } => grid.clone(),
            Profile::Gaussian { .. } => unreachable!("cache stores sampled results"),
        };
        if let Profile::Samples { values, .. } = profile {
            let f = Field::new(grid, Space::Physical, values.clone());
            crate::snapshot::write_field(&self.dir.join(&file), &f, 0.0, 0.0)?;
        }
        // append-only index
        use std::io::Write;
        let mut out = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.index_path())?;
        let row = ZIndexRow { hash: hash.to_string(), file };
        writeln!(out, "{}", serde_json::to_string(&row)?)?;
        Ok(())
    }

    /// Cached crossing operator at an arbitrary focus time.
    pub fn z_at_scale(
        &self,
        profile: &Profile,
        n: usize,
        sigma: f64,
        t_focus: f64,
        cfg: &ScatterConfig,
    ) -> Result<Profile> {
        let mut salted = cfg.clone();
        // fold the focus scale into the key via the tolerance-free horizon
        // field being insufficient: hash a combined key instead
        salted.horizon = cfg.horizon + 0.0;
        let hash = {
            let base = Self::key_hash(profile, n, sigma, &salted)?;
            format!("{base}-{:016x}", t_focus.to_bits())
        };
        if let Some(hit) = self.lookup(&hash)? {
            return Ok(hit);
        }
        let z = z_operator_at_scale(profile, n, sigma, t_focus, cfg)?;
        self.store(&hash, &z)?;
        Ok(z)
    }
}

/// Per-epsilon caustic-crossing comparison columns.
#[derive(Debug, Clone, Serialize)]
pub struct CausticRow {
    pub eps: f64,
    /// pre-focus relative H^1_eps error against the datum-profile form
    pub pre_h1_rel: f64,
    /// post-focus relative L^2 error of the extracted profile against the
    /// scattered profile
    pub post_rel: f64,
    /// control: the same error measured against the unscattered profile
    pub control_rel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CausticReport {
    pub rows: Vec<CausticRow>,
    /// relative size of the crossing effect, ||Zf - f|| / ||f||
    pub crossing_strength: f64,
}

/// Run the crossing experiment across an epsilon sweep: solve the
/// single-datum evolution, compare the pre-focus state against the
/// explicit approximant, extract the post-focus profile and compare it
/// against the scattering route (and against the raw profile as the
/// control that must not converge).
pub fn caustic_crossing_report(
    d: &QuadraticDatum,
    n: usize,
    sigma: f64,
    eps_sweep: &[f64],
    box_length: f64,
    cfg: &ScatterConfig,
    cache: Option<&ZCache>,
) -> Result<CausticReport> {
    let tj = d.t_focus;
    let zf = match cache {
        Some(c) => c.z_at_scale(&d.profile, n, sigma, tj, cfg)?,
        None => z_operator_at_scale(&d.profile, n, sigma, tj, cfg)?,
    };
    let f_plain = d.profile.clone();
    let strength = profile_distance_rel(&zf, &f_plain)?;

    let t_pre = 0.5 * tj;
    let t_post = 2.0 * tj;
    let rows: Vec<CausticRow> = eps_sweep
        .iter()
        .map(|&eps| -> Result<CausticRow> {
            let p = Params::new(n, sigma, eps, Potential::None, t_post)?;
            let n_pts = min_points(box_length, d.max_wavenumber(eps));
            let grid = Grid::line(box_length, n_pts)?;
            let u0 = d.sample(eps, &grid)?;
            let dt = DT_FACTOR_BENCH * eps;
            let mut sc = SolveConfig::new(dt, (0.0, t_post));
            sc.store_fields_at = vec![t_pre, t_post];
            sc.snapshot_stride = 1000;
            let tr = solve(&u0, &p, &sc, DiagnosticSet::empty())?;

            // the snapshot lands on the step lattice; use its actual time
            let (t_pre_actual, pre) = tr.nearest_snapshot(t_pre, dt)?;
            let approx = caustic_approximant(
                d, eps, t_pre_actual, CausticSide::Pre, &d.profile, &grid, None,
            )?;
            let pre_h1_rel =
                pre.sub(&approx)?.h1_eps_norm(eps)? / pre.h1_eps_norm(eps)?.max(1e-300);

            let (t_post_actual, post) = tr.nearest_snapshot(t_post, dt)?;
            let extracted = extract_post_focus_profile(post, d, t_post_actual, &p)?;
            let post_rel = profile_distance_rel(&extracted, &zf)?;
            let control_rel = profile_distance_rel(&extracted, &f_plain)?;
            Ok(CausticRow { eps, pre_h1_rel, post_rel, control_rel })
        })
        .collect::<Result<_>>()?;

    Ok(CausticReport { rows, crossing_strength: strength })
}
