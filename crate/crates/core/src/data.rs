//! Initial-data constructors: decaying profiles, WKB data, quadratic-phase
//! data (with and without harmonic potential), and sums with remainders.
//!
//! Profiles are stored independently of the grid and the semiclassical
//! parameter and are resampled per (eps, grid); Gaussian descriptors are
//! sampled analytically so that chirped products carry no interpolation
//! error.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Space};
use crate::grid::Grid;

/// Relative modulus allowed at the window edge for a profile to count as
/// effectively supported inside the box.
pub const EDGE_TAIL_TOL: f64 = 1e-10;

/// A grid- and eps-independent profile (the envelope class: finite L^2,
/// gradient and first moment).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Profile {
    /// `amplitude * exp(-|y - center|^2 / (2 width^2)) * exp(i momentum . y)`
    Gaussian {
        amplitude: f64,
        width: f64,
        center: Vec<f64>,
        momentum: Vec<f64>,
    },
    /// Arbitrary samples on a reference grid (1-D only), evaluated elsewhere
    /// by trigonometric interpolation.
    Samples {
        grid: Arc<Grid>,
        #[serde(with = "complex_vec")]
        values: Vec<Complex64>,
    },
}

mod complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = v.iter().map(|c| (c.re, c.im)).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(d)?;
        Ok(pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
    }
}

impl Profile {
    /// Centered gaussian of the given width with unit L^2 norm.
    pub fn unit_mass_gaussian(n: usize, width: f64) -> Profile {
        let amplitude = (std::f64::consts::PI * width * width).powf(-(n as f64) / 4.0);
        Profile::Gaussian {
            amplitude,
            width,
            center: vec![0.0; n],
            momentum: vec![0.0; n],
        }
    }

    pub fn gaussian(amplitude: f64, width: f64, center: Vec<f64>, momentum: Vec<f64>) -> Profile {
        Profile::Gaussian { amplitude, width, center, momentum }
    }

    pub fn from_field(f: &Field) -> Result<Profile> {
        f.require_space(Space::Physical)?;
        Ok(Profile::Samples { grid: f.grid().clone(), values: f.values().to_vec() })
    }

    pub fn dim(&self) -> usize {
        match self {
            Profile::Gaussian { center, .. } => center.len(),
            Profile::Samples { grid, .. } => grid.dim(),
        }
    }

    /// Evaluate at an arbitrary point.
    pub fn eval(&self, y: &[f64]) -> Complex64 {
        match self {
            Profile::Gaussian { amplitude, width, center, momentum } => {
                let r2: f64 = y.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                let phase: f64 = y.iter().zip(momentum).map(|(a, b)| a * b).sum();
                Complex64::from_polar(amplitude * (-r2 / (2.0 * width * width)).exp(), phase)
            }
            Profile::Samples { grid, values } => {
                assert_eq!(grid.dim(), 1, "sampled profiles are 1-D");
                // decaying profile: zero outside its home box rather than
                // the periodic extension
                if y[0].abs() >= grid.axis(0).length / 2.0 {
                    return Complex64::default();
                }
                trig_eval_1d(grid, values, y[0])
            }
        }
    }

    /// Sample `f((x - shift) / scale)` on a grid. `scale` may be negative
    /// (spatial inversion), which is how post-focus profiles are laid out.
    pub fn sample_affine(&self, grid: &Arc<Grid>, shift: &[f64], scale: f64) -> Field {
        match self {
            Profile::Gaussian { .. } => Field::from_fn(grid.clone(), |x| {
                let y: Vec<f64> = x.iter().zip(shift).map(|(a, b)| (a - b) / scale).collect();
                self.eval(&y)
            }),
            Profile::Samples { grid: src, values } => {
                assert_eq!(grid.dim(), 1, "sampled profiles are 1-D");
                let ys: Vec<f64> = (0..grid.len())
                    .map(|i| (grid.coords(i)[0] - shift[0]) / scale)
                    .collect();
                let mut out = trig_eval_many_1d(src, values, &ys);
                let half = src.axis(0).length / 2.0;
                for (v, &y) in out.iter_mut().zip(&ys) {
                    if y.abs() >= half {
                        *v = Complex64::default();
                    }
                }
                Field::new(grid.clone(), Space::Physical, out)
            }
        }
    }

    /// Plain sampling on a grid.
    pub fn sample(&self, grid: &Arc<Grid>) -> Field {
        let shift = vec![0.0; grid.dim()];
        self.sample_affine(grid, &shift, 1.0)
    }

    /// Length scale of the envelope, used by resolution estimates.
    pub fn envelope_width(&self) -> f64 {
        match self {
            Profile::Gaussian { width, .. } => *width,
            Profile::Samples { grid, values } => {
                // second-moment width around the modulus centroid
                let dx = grid.cell_volume();
                let mass: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
                if mass == 0.0 {
                    return 1.0;
                }
                let mean: f64 = (0..values.len())
                    .map(|i| grid.coords(i)[0] * values[i].norm_sqr())
                    .sum::<f64>()
                    * dx
                    / mass;
                let var: f64 = (0..values.len())
                    .map(|i| {
                        let d = grid.coords(i)[0] - mean;
                        d * d * values[i].norm_sqr()
                    })
                    .sum::<f64>()
                    * dx
                    / mass;
                var.sqrt().max(grid.axis(0).spacing())
            }
        }
    }

    /// Radius beyond which the envelope is negligible (for sampled
    /// profiles: measured, farthest point with modulus above 1e-9 of peak).
    pub fn support_radius(&self) -> f64 {
        match self {
            Profile::Gaussian { width, center, .. } => {
                8.0 * width + center.iter().map(|c| c.abs()).fold(0.0, f64::max)
            }
            Profile::Samples { grid, values } => {
                let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
                if peak == 0.0 {
                    return grid.axis(0).spacing();
                }
                let mut r = grid.axis(0).spacing();
                for (i, v) in values.iter().enumerate() {
                    if v.norm() > 1e-9 * peak {
                        r = r.max(grid.axis(0).coord(i).abs());
                    }
                }
                (1.1 * r).min(grid.axis(0).length / 2.0)
            }
        }
    }

    /// Own spectral content: |momentum| + 6 / width for gaussians; for
    /// sampled profiles the measured bandwidth (largest wavenumber whose
    /// spectral modulus exceeds 1e-9 of the peak).
    pub fn max_wavenumber(&self) -> f64 {
        match self {
            Profile::Gaussian { width, momentum, .. } => {
                momentum.iter().map(|p| p.abs()).fold(0.0, f64::max) + 6.0 / width
            }
            Profile::Samples { grid, values } => {
                let mut spec = values.clone();
                crate::fft::fft_in_place(&mut spec);
                let peak = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
                if peak == 0.0 {
                    return 1.0;
                }
                let mut k = 2.0 * std::f64::consts::PI / grid.axis(0).length;
                for (i, v) in spec.iter().enumerate() {
                    if v.norm() > 1e-9 * peak {
                        k = k.max(grid.axis(0).wavenumber(i).abs());
                    }
                }
                1.1 * k
            }
        }
    }

    /// L^2 norm of the profile itself.
    pub fn l2_norm(&self) -> f64 {
        match self {
            Profile::Gaussian { amplitude, width, .. } => {
                let n = self.dim() as f64;
                amplitude * (std::f64::consts::PI * width * width).powf(n / 4.0)
            }
            Profile::Samples { grid, values } => {
                (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_volume()).sqrt()
            }
        }
    }

    pub fn scale(&self, c: f64) -> Profile {
        match self {
            Profile::Gaussian { amplitude, width, center, momentum } => Profile::Gaussian {
                amplitude: amplitude * c,
                width: *width,
                center: center.clone(),
                momentum: momentum.clone(),
            },
            Profile::Samples { grid, values } => Profile::Samples {
                grid: grid.clone(),
                values: values.iter().map(|v| v * c).collect(),
            },
        }
    }
}

/// 1-D trigonometric interpolation of periodic samples at an arbitrary point.
///
/// Exact for band-limited periodic data; O(N) per evaluation.
pub fn trig_eval_1d(grid: &Grid, values: &[Complex64], x: f64) -> Complex64 {
    let n = grid.axis(0).points;
    let l = grid.axis(0).length;
    let mut spec = values.to_vec();
    crate::fft::fft_in_place(&mut spec);
    let mut acc = Complex64::default();
    for (k, c) in spec.iter().enumerate() {
        let xi = grid.axis(0).wavenumber(k);
        // account for the grid origin at -L/2
        acc += c * Complex64::from_polar(1.0, xi * (x + l / 2.0));
    }
    acc / n as f64
}

/// Batched version of [`trig_eval_1d`] reusing one spectrum. Evaluates the
/// periodic extension (callers that treat the samples as a decaying
/// profile zero the out-of-box points themselves). Uniformly spaced
/// targets use a per-mode phase recurrence instead of a sincos per point.
pub fn trig_eval_many_1d(grid: &Grid, values: &[Complex64], xs: &[f64]) -> Vec<Complex64> {
    let n = grid.axis(0).points;
    let l = grid.axis(0).length;
    let mut spec = values.to_vec();
    crate::fft::fft_in_place(&mut spec);
    let inv_n = 1.0 / n as f64;
    let ks: Vec<f64> = grid.axis_wavenumbers(0);

    let uniform = xs.len() > 2 && {
        let d = xs[1] - xs[0];
        xs.windows(2)
            .all(|w| ((w[1] - w[0]) - d).abs() < 1e-9 * d.abs().max(1e-9))
    };
    if uniform {
        let step = xs[1] - xs[0];
        // phase[j] tracks e^{i k_j (x + L/2)}, advanced by e^{i k_j step}
        let mut phase: Vec<Complex64> = ks
            .iter()
            .map(|&k| Complex64::from_polar(1.0, k * (xs[0] + l / 2.0)))
            .collect();
        let advance: Vec<Complex64> = ks
            .iter()
            .map(|&k| Complex64::from_polar(1.0, k * step))
            .collect();
        let mut out = Vec::with_capacity(xs.len());
        for _ in xs {
            let mut acc = Complex64::default();
            for (c, p) in spec.iter().zip(&phase) {
                acc += c * p;
            }
            out.push(acc * inv_n);
            for (p, a) in phase.iter_mut().zip(&advance) {
                *p *= a;
            }
        }
        out
    } else {
        xs.iter()
            .map(|&x| {
                let mut acc = Complex64::default();
                for (c, &xi) in spec.iter().zip(&ks) {
                    acc += c * Complex64::from_polar(1.0, xi * (x + l / 2.0));
                }
                acc * inv_n
            })
            .collect()
    }
}

/// Check the decaying-class proxy on a sampled field: finite L^2, gradient
/// and first-moment norms, and modulus below `EDGE_TAIL_TOL` (relative)
/// at the window edge.
pub fn sigma_class_check(f: &Field) -> Result<()> {
    f.require_space(Space::Physical)?;
    let peak = f.linf_norm();
    if peak == 0.0 {
        return Ok(());
    }
    for (v, checks) in [
        (f.l2_norm(), "L2"),
        (f.gradient_l2_norm(), "gradient"),
        (f.moment_norm(None)?, "moment"),
    ] {
        if !v.is_finite() {
            return Err(Error::BadParams(format!("{checks} norm not finite")));
        }
    }
    let grid = f.grid();
    let mut edge_max = 0.0f64;
    for i in 0..f.values().len() {
        let x = grid.coords(i);
        let near_edge = x.iter().zip(grid.axes()).any(|(&xi, ax)| {
            let dx = ax.spacing();
            xi.abs() >= ax.length / 2.0 - 1.5 * dx
        });
        if near_edge {
            edge_max = edge_max.max(f.values()[i].norm());
        }
    }
    let tail = edge_max / peak;
    if tail > EDGE_TAIL_TOL {
        return Err(Error::ProfileTail { tail, tol: EDGE_TAIL_TOL });
    }
    Ok(())
}

/// Quadratic-phase datum: a profile plus a focus `(t_j, x_j)`.
///
/// Sampled as `f(x - x_j) exp(-i |x - x_j|^2 / (2 eps t_j))`: the envelope is
/// written in coordinates centered at the focus point, so the geometric rays
/// of the phase all meet at `x_j` at time `t_j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadraticDatum {
    pub profile: Profile,
    pub t_focus: f64,
    pub x_focus: Vec<f64>,
}

impl QuadraticDatum {
    pub fn new(profile: Profile, t_focus: f64, x_focus: Vec<f64>) -> Result<QuadraticDatum> {
        if !(t_focus > 0.0) {
            return Err(Error::BadFocusTime(t_focus));
        }
        if x_focus.len() != profile.dim() {
            return Err(Error::BadParams("focus point dimension mismatch".into()));
        }
        Ok(QuadraticDatum { profile, t_focus, x_focus })
    }

    /// Largest local wavenumber of the free-case sampled datum.
    pub fn max_wavenumber(&self, eps: f64) -> f64 {
        let r = self.profile.support_radius();
        r / (eps * self.t_focus) + self.profile.max_wavenumber()
    }

    /// Sample the free-case datum on a grid.
    pub fn sample(&self, eps: f64, grid: &Arc<Grid>) -> Result<Field> {
        grid.check_resolves(self.max_wavenumber(eps), "quadratic datum chirp")?;
        let tj = self.t_focus;
        let xj = self.x_focus.clone();
        let profile = self.profile.clone();
        Ok(Field::from_fn(grid.clone(), |x| {
            let y: Vec<f64> = x.iter().zip(&xj).map(|(a, b)| a - b).collect();
            let r2: f64 = y.iter().map(|v| v * v).sum();
            profile.eval(&y) * Complex64::from_polar(1.0, -r2 / (2.0 * eps * tj))
        }))
    }

    /// Largest local wavenumber of the harmonic-case datum.
    pub fn max_wavenumber_harmonic(&self, eps: f64) -> f64 {
        let tj = self.t_focus;
        let (s, c) = (tj.sin(), tj.cos());
        let r_env = self.profile.support_radius() * s.abs();
        let center: f64 = self.x_focus.iter().map(|v| v * v).sum::<f64>().sqrt() * c.abs();
        let xmax = center + r_env;
        let cot = c / s;
        let xj_norm: f64 = self.x_focus.iter().map(|v| v * v).sum::<f64>().sqrt();
        (xmax * cot.abs() + xj_norm / s.abs()) / eps + self.profile.max_wavenumber() / s.abs()
    }

    /// Sample the harmonic-case datum on a grid:
    /// `(sin t_j)^{-n/2} f((x - x_j cos t_j)/sin t_j)
    ///  exp(-i (|x|^2 + |x_j|^2) cot(t_j) / (2 eps) + i x.x_j / (eps sin t_j))`.
    /// This is the conjugate harmonic kernel against the envelope, so the
    /// rays focus at `(t_j, x_j)`; requires `t_j` in (0, pi).
    pub fn sample_harmonic(&self, eps: f64, grid: &Arc<Grid>) -> Result<Field> {
        let tj = self.t_focus;
        if !(tj > 0.0 && tj < std::f64::consts::PI) {
            return Err(Error::FocusTimeOutOfRange(tj));
        }
        grid.check_resolves(self.max_wavenumber_harmonic(eps), "harmonic quadratic datum chirp")?;
        let (s, c) = (tj.sin(), tj.cos());
        let cot = c / s;
        let n = grid.dim() as f64;
        let amp = s.powf(-n / 2.0);
        let xj = self.x_focus.clone();
        let xj2: f64 = xj.iter().map(|v| v * v).sum();
        let profile = self.profile.clone();
        Ok(Field::from_fn(grid.clone(), |x| {
            let y: Vec<f64> = x.iter().zip(&xj).map(|(a, b)| (a - b * c) / s).collect();
            let x2: f64 = x.iter().map(|v| v * v).sum();
            let xdotxj: f64 = x.iter().zip(&xj).map(|(a, b)| a * b).sum();
            let phase = -(x2 + xj2) * cot / (2.0 * eps) + xdotxj / (eps * s);
            profile.eval(&y) * Complex64::from_polar(amp, phase)
        }))
    }
}

/// Reject datum lists with coinciding foci.
pub fn validate_distinct_foci(data: &[QuadraticDatum]) -> Result<()> {
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            let same_t = (data[i].t_focus - data[j].t_focus).abs() < 1e-12;
            let same_x = data[i]
                .x_focus
                .iter()
                .zip(&data[j].x_focus)
                .all(|(a, b)| (a - b).abs() < 1e-12);
            if same_t && same_x {
                return Err(Error::DuplicateFocus {
                    t: data[i].t_focus,
                    x: data[i].x_focus.clone(),
                });
            }
        }
    }
    Ok(())
}

/// WKB datum `f(x) exp(i phi(x) / eps)` with a caller-supplied real phase.
///
/// The phase gradient is estimated by finite differences where the envelope
/// is non-negligible and checked against the grid resolution.
pub fn wkb_datum(
    profile: &Profile,
    phase: &dyn Fn(&[f64]) -> f64,
    eps: f64,
    grid: &Arc<Grid>,
) -> Result<Field> {
    let envelope = profile.sample(grid);
    let peak = envelope.linf_norm();
    let mut max_grad: f64 = 0.0;
    let n = grid.len();
    for i in 0..n {
        if envelope.values()[i].norm() < 1e-8 * peak {
            continue;
        }
        let x = grid.coords(i);
        for d in 0..grid.dim() {
            let h = grid.axis(d).spacing();
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[d] += h;
            xm[d] -= h;
            max_grad = max_grad.max(((phase(&xp) - phase(&xm)) / (2.0 * h)).abs());
        }
    }
    grid.check_resolves(max_grad / eps + profile.max_wavenumber(), "WKB datum phase")?;
    Ok(envelope.modulate(|x| Complex64::from_polar(1.0, phase(x) / eps)))
}

/// Pointwise sum of parts plus an optional remainder, all on one grid.
pub fn sum_fields(parts: &[Field], remainder: Option<&Field>) -> Result<Field> {
    let first = parts.first().ok_or(Error::EmptyTrajectory)?;
    let mut acc = first.clone();
    for p in &parts[1..] {
        acc = acc.add(p)?;
    }
    if let Some(r) = remainder {
        acc = acc.add(r)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass_gaussian_has_unit_norm() {
        let p = Profile::unit_mass_gaussian(1, 1.0);
        assert!((p.l2_norm() - 1.0).abs() < 1e-14);
        let grid = Grid::line(32.0, 2048).unwrap();
        let f = p.sample(&grid);
        assert!((f.l2_norm() - 1.0).abs() < 1e-10);
        sigma_class_check(&f).unwrap();
    }

    #[test]
    fn quadratic_datum_matches_wkb_with_quadratic_phase() {
        // phi = -|x|^2/2 with t_j = 1, x_j = 0 gives the same datum.
        let grid = Grid::line(32.0, 4096).unwrap();
        let eps = 0.25;
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let d = QuadraticDatum::new(p.clone(), 1.0, vec![0.0]).unwrap();
        let a = d.sample(eps, &grid).unwrap();
        let b = wkb_datum(&p, &|x| -x[0] * x[0] / 2.0, eps, &grid).unwrap();
        let diff = a.sub(&b).unwrap().l2_norm();
        assert!(diff < 1e-12, "datum mismatch {diff}");
    }

    #[test]
    fn wkb_momentum_shifts_spectrum() {
        let grid = Grid::line(32.0, 1024).unwrap();
        let eps = 0.5;
        let p0 = 2.0 * std::f64::consts::PI * 16.0 / 32.0; // on-grid after /eps
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let f = wkb_datum(&p, &|x| p0 * x[0], eps, &grid).unwrap();
        let spec = f.to_spectral().unwrap();
        let mut best = (0usize, 0.0f64);
        for (k, v) in spec.values().iter().enumerate() {
            if v.norm() > best.1 {
                best = (k, v.norm());
            }
        }
        let xi_peak = -grid.axis(0).max_wavenumber()
            + best.0 as f64 * 2.0 * std::f64::consts::PI / 32.0;
        assert!((xi_peak - p0 / eps).abs() < 2.0 * std::f64::consts::PI / 32.0 + 1e-12);
    }

    #[test]
    fn phase_free_datum_is_plain_profile() {
        let grid = Grid::line(32.0, 512).unwrap();
        let p = Profile::unit_mass_gaussian(1, 1.5);
        let f = wkb_datum(&p, &|_| 0.0, 1.0, &grid).unwrap();
        let g = p.sample(&grid);
        assert!(f.sub(&g).unwrap().l2_norm() < 1e-15);
    }

    #[test]
    fn modulus_unchanged_by_quadratic_phase() {
        let grid = Grid::line(32.0, 8192).unwrap();
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let d = QuadraticDatum::new(p.clone(), 1.0, vec![0.5]).unwrap();
        let eps = 0.05;
        let f = d.sample(eps, &grid).unwrap();
        for r in [2.0, 4.0, 8.0] {
            let plain = p.sample_affine(&grid, &[0.5], 1.0);
            assert!(
                (f.lp_norm(r).unwrap() - plain.lp_norm(r).unwrap()).abs()
                    < 1e-12 * plain.lp_norm(r).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_focus_times() {
        let p = Profile::unit_mass_gaussian(1, 1.0);
        assert!(QuadraticDatum::new(p.clone(), 0.0, vec![0.0]).is_err());
        assert!(QuadraticDatum::new(p.clone(), -1.0, vec![0.0]).is_err());
        let grid = Grid::line(16.0, 1024).unwrap();
        let d = QuadraticDatum::new(p.clone(), 3.5, vec![0.0]).unwrap();
        assert!(d.sample_harmonic(0.25, &grid).is_err(), "t_j >= pi must fail");
        let d2 = QuadraticDatum::new(p, std::f64::consts::PI / 2.0, vec![0.0]).unwrap();
        assert!(d2.sample_harmonic(0.25, &grid).is_ok());
    }

    #[test]
    fn harmonic_datum_at_quarter_period_center() {
        // t_j = pi/2, x_j = 0: cot = 0 and sin = 1, so the datum is the bare profile.
        let grid = Grid::line(16.0, 512).unwrap();
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let d = QuadraticDatum::new(p.clone(), std::f64::consts::PI / 2.0, vec![0.0]).unwrap();
        let f = d.sample_harmonic(0.25, &grid).unwrap();
        let g = p.sample(&grid);
        assert!(f.sub(&g).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn duplicate_foci_rejected() {
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let a = QuadraticDatum::new(p.clone(), 1.0, vec![-2.0]).unwrap();
        let b = QuadraticDatum::new(p.clone(), 1.5, vec![2.0]).unwrap();
        let dup = QuadraticDatum::new(p, 1.0, vec![-2.0]).unwrap();
        assert!(validate_distinct_foci(&[a.clone(), b.clone()]).is_ok());
        assert!(validate_distinct_foci(&[a, b, dup]).is_err());
    }

    #[test]
    fn sum_fields_single_is_identity() {
        let grid = Grid::line(8.0, 64).unwrap();
        let p = Profile::unit_mass_gaussian(1, 0.7);
        let f = p.sample(&grid);
        let s = sum_fields(&[f.clone()], None).unwrap();
        assert!(s.sub(&f).unwrap().l2_norm() == 0.0);
        let other = Grid::line(4.0, 64).unwrap();
        let g = p.sample(&other);
        assert!(sum_fields(&[f, g], None).is_err());
    }

    #[test]
    fn trig_interpolation_exact_for_band_limited() {
        let grid = Grid::line(8.0, 64).unwrap();
        let f = Field::from_fn(grid.clone(), |x| {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * x[0] / 8.0)
        });
        let x = 0.123456;
        let got = trig_eval_1d(&grid, f.values(), x);
        let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * x / 8.0);
        assert!((got - want).norm() < 1e-12);
    }
}
