//! Functionals that decide the questions the experiments ask: the
//! linearizability criterion and its dichotomy verdict, space-time norms,
//! dispersive-decay fits, the Galilean and rotated phase-space operators,
//! concentration detection and the orthogonality splitting check.

use num_complex::Complex64;
use serde::Serialize;

use crate::data::Profile;
use crate::error::{Error, Result};
use crate::field::{Field, Space};
use crate::grid::Grid;
use crate::params::Params;
use crate::solver::{DiagnosticSeries, Trajectory};

/// Near predicted foci the diagnostic stride must be at most eps/5.
pub const FOCUS_STRIDE_FACTOR: f64 = 0.2;

/// ... within this many eps of the focus.
pub const FOCUS_WINDOW_FACTOR: f64 = 20.0;

/// sup over recorded times of `eps^{n sigma} ||v(t)||_{L^{2s+2}}^{2s+2}`,
/// from the standard `l2sigma_eps` channel of a linear-flow trajectory.
///
/// `foci` lists the declared focus times; the recorded time grid must
/// sample at spacing <= eps/5 within 20 eps of each focus, else the sup
/// cannot be trusted and an error is returned.
pub fn linearizability_functional(
    tr: &Trajectory,
    p: &Params,
    foci: &[f64],
) -> Result<f64> {
    check_focus_strides(tr.times(), p.eps, foci)?;
    let chan = tr
        .series
        .channel("l2sigma_eps")
        .ok_or(Error::EmptyTrajectory)?;
    let power = 2.0 * p.sigma + 2.0;
    Ok(chan.iter().map(|v| v.powf(power)).fold(0.0, f64::max))
}

pub fn check_focus_strides(times: &[f64], eps: f64, foci: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::EmptyTrajectory);
    }
    for &tf in foci {
        for w in times.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if (mid - tf).abs() <= FOCUS_WINDOW_FACTOR * eps {
                let spacing = w[1] - w[0];
                if spacing > FOCUS_STRIDE_FACTOR * eps * (1.0 + 1e-9) {
                    return Err(Error::StrideTooCoarse {
                        t_peak: tf,
                        spacing,
                        needed: FOCUS_STRIDE_FACTOR * eps,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Channels the dichotomy verdict reads off the nonlinear-run series.
pub const DIFF_L2: &str = "diff_l2";
pub const DIFF_GRAD: &str = "diff_grad";
pub const DIFF_MOMENT: &str = "diff_moment";

/// Verdict data for one epsilon: the distance channels between the
/// nonlinear flow and its linear reference, plus the criterion functional.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyPoint {
    pub eps: f64,
    /// sup_t ||u - v||_{L^2}
    pub sup_diff_l2: f64,
    /// sup_t ||eps grad (u - v)||_{L^2}
    pub sup_diff_grad: f64,
    /// sup_t ||x (u - v)||_{L^2} (harmonic runs only)
    pub sup_diff_moment: Option<f64>,
    /// sup_t eps^{n sigma} ||v(t)||_{L^{2s+2}}^{2s+2}
    pub functional: f64,
}

/// Assemble one dichotomy point from a nonlinear run carrying difference
/// channels and the matching linear reference run.
pub fn dichotomy_point(
    u_tr: &Trajectory,
    v_tr: &Trajectory,
    p: &Params,
    foci: &[f64],
) -> Result<DichotomyPoint> {
    if u_tr.times().len() != v_tr.times().len()
        || u_tr
            .times()
            .iter()
            .zip(v_tr.times())
            .any(|(a, b)| (a - b).abs() > 1e-9)
    {
        return Err(Error::TimeGridMismatch);
    }
    let sup = |name: &str| -> Option<f64> {
        u_tr.series
            .channel(name)
            .map(|c| c.iter().cloned().fold(0.0, f64::max))
    };
    Ok(DichotomyPoint {
        eps: p.eps,
        sup_diff_l2: sup(DIFF_L2).ok_or(Error::EmptyTrajectory)?,
        sup_diff_grad: sup(DIFF_GRAD).ok_or(Error::EmptyTrajectory)?,
        sup_diff_moment: sup(DIFF_MOMENT),
        functional: linearizability_functional(v_tr, p, foci)?,
    })
}

/// Discrete space-time norm `(integral ||.||_{L^r}^q dt)^{1/q}` by the
/// trapezoid rule over a recorded `L^r`-norm channel; `q = infinity` takes
/// the sup. The channel must have been recorded with the wanted r.
pub fn spacetime_norm(series: &DiagnosticSeries, channel: &str, q: f64) -> Result<f64> {
    let c = series.channel(channel).ok_or(Error::EmptyTrajectory)?;
    if c.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if q.is_infinite() {
        return Ok(c.iter().cloned().fold(0.0, f64::max));
    }
    let t = &series.times;
    let mut acc = 0.0;
    for i in 1..c.len() {
        let dt = t[i] - t[i - 1];
        acc += 0.5 * dt * (c[i].powf(q) + c[i - 1].powf(q));
    }
    Ok(acc.powf(1.0 / q))
}

/// Least-squares fit of the decay exponent: slope of `log ||v(t)||_{L^r}`
/// against `log (1 / (|t - t_focus| + eps))`, restricted to
/// `|t - t_focus| in [5 eps, 0.5 t_focus]`.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub samples: usize,
}

pub fn decay_fit(
    times: &[f64],
    lr_channel: &[f64],
    t_focus: f64,
    eps: f64,
) -> Result<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(lr_channel) {
        let d = (t - t_focus).abs();
        if d >= 5.0 * eps && d <= 0.5 * t_focus && v > 0.0 {
            xs.push((1.0 / (d + eps)).ln());
            ys.push(v.ln());
        }
    }
    let min_pts = 6;
    if xs.len() < min_pts {
        return Err(Error::FitWindowTooSmall(xs.len(), min_pts));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit { slope, intercept: my - slope * mx, samples: xs.len() })
}

/// L^2 norm of the Galilean operator image
/// `((x - x_j)/eps + i (t - t_j) grad) u`.
pub fn galilean_norm(u: &Field, eps: f64, t: f64, t_focus: f64, x_focus: &[f64]) -> Result<f64> {
    u.require_space(Space::Physical)?;
    let dim = u.dim();
    let mut acc = 0.0;
    for d in 0..dim {
        let du = u.spectral_derivative(d)?;
        let grid = u.grid();
        let mut sum = 0.0;
        for i in 0..u.values().len() {
            let x = grid.coords(i)[d];
            let j = (x - x_focus[d]) / eps * u.values()[i]
                + Complex64::new(0.0, t - t_focus) * du.values()[i];
            sum += j.norm_sqr();
        }
        acc += sum * grid.cell_volume();
    }
    Ok(acc.sqrt())
}

/// Images of the rotated phase-space operators
/// `A(t) = x sin t - i eps cos t grad` and `B(t) = x cos t + i eps sin t grad`
/// (one component per axis).
pub struct AbImages {
    pub a: Vec<Field>,
    pub b: Vec<Field>,
}

pub fn ab_operators(u: &Field, eps: f64, t: f64) -> Result<AbImages> {
    u.require_space(Space::Physical)?;
    let (s, c) = (t.sin(), t.cos());
    let mut a = Vec::new();
    let mut b = Vec::new();
    for d in 0..u.dim() {
        let du = u.spectral_derivative(d)?;
        let grid = u.grid().clone();
        let mut av = Vec::with_capacity(u.values().len());
        let mut bv = Vec::with_capacity(u.values().len());
        for i in 0..u.values().len() {
            let x = grid.coords(i)[d];
            let ui = u.values()[i];
            let dui = du.values()[i];
            av.push(ui * (x * s) - Complex64::new(0.0, eps * c) * dui);
            bv.push(ui * (x * c) + Complex64::new(0.0, eps * s) * dui);
        }
        a.push(Field::new(grid.clone(), Space::Physical, av));
        b.push(Field::new(grid, Space::Physical, bv));
    }
    Ok(AbImages { a, b })
}

/// L^1 residual of the pointwise identity
/// `sum_d |A_d u|^2 + |B_d u|^2 = |x u|^2 + |eps grad u|^2`.
pub fn ab_identity_residual(u: &Field, eps: f64, t: f64) -> Result<f64> {
    let ab = ab_operators(u, eps, t)?;
    let grid = u.grid();
    let mut grads = Vec::new();
    for d in 0..u.dim() {
        grads.push(u.spectral_derivative(d)?);
    }
    let mut total = 0.0;
    for i in 0..u.values().len() {
        let x = grid.coords(i);
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for d in 0..u.dim() {
            lhs += ab.a[d].values()[i].norm_sqr() + ab.b[d].values()[i].norm_sqr();
            rhs += x[d] * x[d] * u.values()[i].norm_sqr()
                + eps * eps * grads[d].values()[i].norm_sqr();
        }
        total += (lhs - rhs).abs();
    }
    Ok(total * grid.cell_volume())
}

/// A detected concentration event of the linear flow.
#[derive(Debug, Clone, Serialize)]
pub struct Detection {
    pub t: f64,
    pub x: Vec<f64>,
    pub strength: f64,
}

/// Scan the criterion density `eps^{n sigma} ||v(t)||^{2s+2}` of a linear
/// trajectory for local maxima above `threshold`; the modulus-weighted
/// centroid at each peak comes from re-evaluating the flow there.
///
/// Default threshold: 0.1 x the single-focus value `||fhat||_{L^{2s+2}}^{2s+2}`
/// of the scenario profile (compute it with [`focal_functional_value`]).
pub fn concentration_detect(
    tr: &Trajectory,
    p: &Params,
    threshold: f64,
    flow_at: &dyn Fn(f64) -> Result<Field>,
) -> Result<Vec<Detection>> {
    let chan = tr
        .series
        .channel("l2sigma_eps")
        .ok_or(Error::EmptyTrajectory)?;
    let power = 2.0 * p.sigma + 2.0;
    let dens: Vec<f64> = chan.iter().map(|v| v.powf(power)).collect();
    let times = tr.times();
    let mut out = Vec::new();
    for i in 1..dens.len().saturating_sub(1) {
        if dens[i] >= threshold && dens[i] >= dens[i - 1] && dens[i] > dens[i + 1] {
            // local max; require adequate sampling around it
            let spacing = (times[i + 1] - times[i]).max(times[i] - times[i - 1]);
            if spacing > FOCUS_STRIDE_FACTOR * p.eps * (1.0 + 1e-9) {
                return Err(Error::StrideTooCoarse {
                    t_peak: times[i],
                    spacing,
                    needed: FOCUS_STRIDE_FACTOR * p.eps,
                });
            }
            let v = flow_at(times[i])?;
            let grid = v.grid();
            let total: f64 = v.values().iter().map(|z| z.norm_sqr()).sum();
            let mut centroid = vec![0.0; v.dim()];
            // weight by |v|^{2s+2} so the focused part dominates the centroid
            let mut wsum = 0.0;
            for idx in 0..v.values().len() {
                let w = v.values()[idx].norm_sqr().powf(p.sigma + 1.0);
                wsum += w;
                for (d, c) in grid.coords(idx).iter().enumerate() {
                    centroid[d] += w * c;
                }
            }
            let _ = total;
            for c in centroid.iter_mut() {
                *c /= wsum.max(1e-300);
            }
            out.push(Detection { t: times[i], x: centroid, strength: dens[i] });
        }
    }
    Ok(out)
}

/// The limiting single-focus value of the criterion functional for a
/// profile focusing at time `t_focus`:
/// `t_focus^{-n sigma} || fhat ||_{L^{2 sigma + 2}}^{2 sigma + 2}`,
/// with the transform sampled on the profile's own scale.
pub fn focal_functional_value(profile: &Profile, p: &Params, t_focus: f64) -> Result<f64> {
    // sample the profile generously and transform
    let n = p.n;
    let radius = profile.support_radius().max(8.0);
    let l = 4.0 * radius;
    let points = crate::grid::min_points(l, 4.0 * profile.max_wavenumber());
    let grid = match n {
        1 => Grid::line(l, points)?,
        _ => Grid::square(l, points.min(512))?,
    };
    let f = profile.sample(&grid);
    let spec = f.to_spectral()?;
    // |paper transform| = |unitary transform|, so norms agree
    let spec_phys = Field::new(
        make_dual_grid(&grid)?,
        Space::Physical,
        spec.values().to_vec(),
    );
    let power = 2.0 * p.sigma + 2.0;
    let norm = spec_phys.lp_norm(power)?;
    Ok(t_focus.powf(-(p.n as f64) * p.sigma) * norm.powf(power))
}

/// A grid whose physical lattice coincides with the dual lattice of `g`.
fn make_dual_grid(g: &Grid) -> Result<std::sync::Arc<Grid>> {
    let axes: Vec<(f64, usize)> = g
        .axes()
        .iter()
        .map(|ax| (2.0 * ax.max_wavenumber(), ax.points))
        .collect();
    Grid::new(&axes)
}

/// Result of the orthogonality splitting comparison.
#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
}

/// Compare `|| sum_j eps^{-n/2} P_j((x - c_j)/eps) ||_{L^{2s+2}_eps}^{2s+2}`
/// against `sum_j ||P_j||_{L^{2s+2}}^{2s+2}`. The two agree as the pairwise
/// separations divide by eps diverge; coinciding cores break the limit and
/// the gap reports it.
pub fn orthogonality_split_check(
    profiles: &[Profile],
    cores: &[Vec<f64>],
    eps: f64,
    sigma: f64,
) -> Result<SplitReport> {
    if profiles.is_empty() || profiles.len() != cores.len() {
        return Err(Error::BadParams("profiles and cores must pair up".into()));
    }
    let n = profiles[0].dim();
    if n != 1 {
        return Err(Error::BadDimension(n));
    }
    let span = cores
        .iter()
        .map(|c| c[0].abs())
        .fold(0.0, f64::max);
    let radius: f64 = profiles
        .iter()
        .map(|p| p.support_radius() * eps)
        .fold(0.0, f64::max);
    let l = 4.0 * (span + radius + eps).max(1.0);
    let kmax = profiles
        .iter()
        .map(|p| p.max_wavenumber() / eps)
        .fold(0.0, f64::max);
    let points = crate::grid::min_points(l, kmax).min(1 << 22);
    let grid = Grid::line(l, points)?;

    let mut sum = Field::zeros(grid.clone());
    let mut rhs = 0.0;
    let power = 2.0 * sigma + 2.0;
    let scale = eps.powf(-(n as f64) / 2.0);
    for (profile, core) in profiles.iter().zip(cores) {
        let bump = profile
            .sample_affine(&grid, core, eps)
            .scale(Complex64::new(scale, 0.0));
        // window-overflow guard: each bump must decay inside the box
        crate::data::sigma_class_check(&bump).map_err(|_| Error::ProfileTail {
            tail: f64::NAN,
            tol: crate::data::EDGE_TAIL_TOL,
        })?;
        sum = sum.add(&bump)?;
        rhs += profile.l2sigma_power_norm(power)?;
    }
    let lhs = eps.powf(n as f64 * sigma) * sum.lp_norm(power)?.powf(power);
    Ok(SplitReport { lhs, rhs, rel_gap: (lhs - rhs).abs() / rhs.max(1e-300) })
}

impl Profile {
    /// `||P||_{L^p}^p` on the profile's own scale.
    fn l2sigma_power_norm(&self, p: f64) -> Result<f64> {
        let radius = self.support_radius().max(4.0);
        let l = 4.0 * radius;
        let points = crate::grid::min_points(l, 2.0 * self.max_wavenumber()).min(1 << 20);
        let grid = Grid::line(l, points)?;
        Ok(self.sample(&grid).lp_norm(p)?.powf(p))
    }
}

/// Strictly-decreasing trend with at most one violation of at most 5%.
pub fn trend_strictly_decreasing(vals: &[f64]) -> bool {
    trend_strictly_decreasing_with(vals, 0.05, 1)
}

pub fn trend_strictly_decreasing_with(vals: &[f64], tol: f64, max_violations: usize) -> bool {
    if vals.len() < 2 {
        return false;
    }
    let mut violations = 0;
    for w in vals.windows(2) {
        if !(w[1] < w[0]) {
            if w[1] <= w[0] * (1.0 + tol) {
                violations += 1;
            } else {
                return false;
            }
        }
    }
    violations <= max_violations
}

/// A column "fails to converge" when it does not pass the decreasing-trend
/// test or retains at least half of its initial value at the end.
pub fn fails_to_converge(vals: &[f64]) -> bool {
    if vals.len() < 2 {
        return true;
    }
    !trend_strictly_decreasing(vals) || vals[vals.len() - 1] > 0.5 * vals[0]
}
