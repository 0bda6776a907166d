//! Exact and asymptotic linear propagators.
//!
//! * [`free_propagate`]: the semiclassical free flow, a pure spectral
//!   multiplier and therefore exact on the discrete torus.
//! * [`harmonic_propagate`]: the harmonic-oscillator flow. The rotation of
//!   phase space by an angle t factors exactly into
//!   `chirp(tan(t/2)) . free(sin t) . chirp(tan(t/2))`,
//!   which realizes Mehler's integral kernel with FFT-exact pieces and no
//!   1/sin(t) evaluation anywhere. Arguments are first reduced modulo pi
//!   using the exact identity U(pi) = e^{-i n pi/2} * parity, so the
//!   factorization only ever runs with |t| <= pi/2 and the chirp slope
//!   |tan(t/2)| <= 1.
//! * [`dispersive_profile`]: the large-time asymptotic form
//!   `e^{i x^2/(2t)} t^{-n/2} \hat V_0(x/t)` of the unit-scale free flow,
//!   with `t^{-n/2} = i^n |t|^{-n/2}` for negative times.
//! * [`caustic_approximant`]: the explicit pre/post-focus forms of a
//!   quadratic-phase solution near its focus.

use num_complex::Complex64;

use crate::data::{Profile, QuadraticDatum};
use crate::error::{Error, Result};
use crate::field::{Field, Space};
use crate::fft;

/// Exact free semiclassical flow over time `t` (any sign).
pub fn free_propagate(f: &Field, eps: f64, t: f64) -> Result<Field> {
    f.require_space(Space::Physical)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let grid = f.grid().clone();
    let mut values = f.values().to_vec();
    fft::fft_nd(&mut values, &grid, true);
    let inv_n = 1.0 / grid.len() as f64;
    match grid.dim() {
        1 => {
            let ks = grid.axis_wavenumbers(0);
            for (v, &k) in values.iter_mut().zip(&ks) {
                *v *= Complex64::from_polar(inv_n, -0.5 * eps * t * k * k);
            }
        }
        2 => {
            let k0 = grid.axis_wavenumbers(0);
            let k1 = grid.axis_wavenumbers(1);
            let n1 = grid.axis(1).points;
            for (i, v) in values.iter_mut().enumerate() {
                let ksq = k0[i / n1] * k0[i / n1] + k1[i % n1] * k1[i % n1];
                *v *= Complex64::from_polar(inv_n, -0.5 * eps * t * ksq);
            }
        }
        _ => unreachable!(),
    }
    fft::fft_nd(&mut values, &grid, false);
    Ok(Field::new(grid, Space::Physical, values))
}

/// Multiply by the quadratic chirp `exp(-i a |x|^2 / (2 eps))`.
fn chirp(f: &Field, a: f64, eps: f64) -> Field {
    f.modulate(|x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::from_polar(1.0, -a * r2 / (2.0 * eps))
    })
}

/// Spatial inversion x -> -x on the periodic grid (index reversal).
fn parity(f: &Field) -> Field {
    let grid = f.grid().clone();
    let vals = f.values();
    let out: Vec<Complex64> = match grid.dim() {
        1 => {
            let n = grid.axis(0).points;
            (0..n).map(|m| vals[(n - m) % n]).collect()
        }
        2 => {
            let n0 = grid.axis(0).points;
            let n1 = grid.axis(1).points;
            (0..n0 * n1)
                .map(|i| {
                    let (a, b) = (i / n1, i % n1);
                    vals[((n0 - a) % n0) * n1 + (n1 - b) % n1]
                })
                .collect()
        }
        _ => unreachable!(),
    };
    Field::new(grid, Space::Physical, out)
}

/// Exact linear harmonic-oscillator flow over time `t` (any sign).
///
/// Errors if the chirp of the factorization would not be resolved on the
/// grid at this (eps, t).
pub fn harmonic_propagate(f: &Field, eps: f64, t: f64) -> Result<Field> {
    f.require_space(Space::Physical)?;
    let pi = std::f64::consts::PI;
    // t = m pi + r with r in [-pi/2, pi/2]
    let m = (t / pi).round() as i64;
    let r = t - m as f64 * pi;

    let mut out = if r == 0.0 {
        f.clone()
    } else {
        let a = (r / 2.0).tan();
        let b = r.sin();
        // Chirp slope a bounded by 1; reject grids that cannot hold it.
        let k_chirp = f
            .grid()
            .axes()
            .iter()
            .map(|ax| ax.length / 2.0 * a.abs() / eps)
            .fold(0.0, f64::max);
        f.grid().check_resolves(k_chirp, "harmonic flow chirp")?;
        let step1 = chirp(f, a, eps);
        let step2 = free_propagate(&step1, eps, b)?;
        chirp(&step2, a, eps)
    };

    if m != 0 {
        if m.rem_euclid(2) == 1 {
            out = parity(&out);
        }
        let n = f.dim() as f64;
        let phase = Complex64::from_polar(1.0, -n * m as f64 * pi / 2.0);
        out = out.scale(phase);
    }
    Ok(out)
}

/// `t^{-n/2}` with the branch `i^n |t|^{-n/2}` for `t < 0`.
fn signed_root(t: f64, n: usize) -> Complex64 {
    let mag = t.abs().powf(-(n as f64) / 2.0);
    if t >= 0.0 {
        Complex64::new(mag, 0.0)
    } else {
        Complex64::i().powu(n as u32) * mag
    }
}

/// Large-time dispersive form of the unit-scale free flow:
/// `e^{i x^2/(2t)} t^{-n/2} \hat V_0(x/t)` sampled on the grid of `v0`,
/// with the Fourier transform normalized as
/// `(2 i pi)^{-n/2} integral e^{-i x xi} f(x) dx`
/// (spectrum at the scaled points by an exact chirp transform).
pub fn dispersive_profile(v0: &Field, t: f64) -> Result<Field> {
    v0.require_space(Space::Physical)?;
    if t == 0.0 {
        return Err(Error::ZeroTime);
    }
    let grid = v0.grid().clone();
    let n = grid.dim();

    // unitary-transform samples at x_m / t, axis by axis
    let mut values = v0.values().to_vec();
    match n {
        1 => {
            let dx = grid.axis(0).spacing();
            let alpha = dx * dx / t;
            values = fft::czt_centered(&values, alpha);
            let scale = dx / (2.0 * std::f64::consts::PI).sqrt();
            for v in values.iter_mut() {
                *v *= scale;
            }
        }
        2 => {
            let n0 = grid.axis(0).points;
            let n1 = grid.axis(1).points;
            let dx1 = grid.axis(1).spacing();
            let a1 = dx1 * dx1 / t;
            for row in values.chunks_mut(n1) {
                let out = fft::czt_centered(row, a1);
                row.copy_from_slice(&out);
            }
            let dx0 = grid.axis(0).spacing();
            let a0 = dx0 * dx0 / t;
            let mut col = vec![Complex64::default(); n0];
            for j in 0..n1 {
                for i in 0..n0 {
                    col[i] = values[i * n1 + j];
                }
                let out = fft::czt_centered(&col, a0);
                for i in 0..n0 {
                    values[i * n1 + j] = out[i];
                }
            }
            let scale = grid.cell_volume() / (2.0 * std::f64::consts::PI).powf(1.0);
            for v in values.iter_mut() {
                *v *= scale;
            }
        }
        _ => unreachable!(),
    }

    // paper-normalized transform constant (2 i pi)^{-n/2} = e^{-i n pi/4} (2 pi)^{-n/2},
    // of which the (2 pi)^{-n/2} part is already in the unitary scaling above
    let convention = Complex64::from_polar(1.0, -(n as f64) * std::f64::consts::FRAC_PI_4);
    let root = signed_root(t, n) * convention;

    let mut field = Field::new(grid, Space::Physical, values);
    field = field.scale(root);
    Ok(field.modulate(|x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::from_polar(1.0, r2 / (2.0 * t))
    }))
}

/// Which side of the focus a caustic approximant describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausticSide {
    Pre,
    Post,
}

/// Explicit near-caustic form of a quadratic-phase solution:
/// `A(t) g((x - x_j)/(1 - t/t_j)) exp(i |x - x_j|^2 / (2 eps (t - t_j)))`.
///
/// Pre-focus the amplitude is the positive root `(1 - t/t_j)^{-n/2}`; past
/// the focus the dilation is negative and the amplitude carries the branch
/// factor `e^{-i n pi/2} |1 - t/t_j|^{-n/2}`, the continuation of the exact
/// linear flow through the focus (fixed against the closed-form Gaussian
/// evolution). Pre-focus `g` is the datum profile itself; post-focus it is
/// the scattered profile.
///
/// This is a comparison object with o(1) accuracy as eps -> 0, never a
/// solver output. Times within `floor` (default eps) of the focus are
/// rejected: the form is invalid there.
pub fn caustic_approximant(
    d: &QuadraticDatum,
    eps: f64,
    t: f64,
    side: CausticSide,
    g: &Profile,
    grid: &std::sync::Arc<crate::grid::Grid>,
    floor: Option<f64>,
) -> Result<Field> {
    let tj = d.t_focus;
    let floor = floor.unwrap_or(eps);
    match side {
        CausticSide::Pre if t >= tj => {
            return Err(Error::WrongSideOfFocus { t, t_focus: tj, side: "pre-focus" })
        }
        CausticSide::Post if t <= tj => {
            return Err(Error::WrongSideOfFocus { t, t_focus: tj, side: "post-focus" })
        }
        _ => {}
    }
    if (t - tj).abs() < floor {
        return Err(Error::TooCloseToFocus { t, t_focus: tj, floor });
    }
    grid.check_resolves(
        g.support_radius() / (eps * tj) + g.max_wavenumber(),
        "caustic approximant chirp",
    )?;

    let lam = 1.0 - t / tj; // negative past the focus
    let n = grid.dim();
    let mag = lam.abs().powf(-(n as f64) / 2.0);
    let amp = match side {
        CausticSide::Pre => Complex64::new(mag, 0.0),
        CausticSide::Post => {
            Complex64::from_polar(mag, -(n as f64) * std::f64::consts::FRAC_PI_2)
        }
    };
    let envelope = g.sample_affine(grid, &d.x_focus, lam);
    let xj = d.x_focus.clone();
    Ok(envelope.scale(amp).modulate(move |x| {
        let r2: f64 = x.iter().zip(&xj).map(|(a, b)| (a - b) * (a - b)).sum();
        Complex64::from_polar(1.0, r2 / (2.0 * eps * (t - tj)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn gaussian_field(grid: &std::sync::Arc<Grid>) -> Field {
        Field::from_fn(grid.clone(), |x| {
            Complex64::new((-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp(), 0.0)
        })
    }

    /// Exact free evolution of e^{-x^2/2} at eps = 1:
    /// (1 + i t)^{-1/2} e^{-x^2/(2 (1 + i t))}.
    fn gaussian_free_exact(grid: &std::sync::Arc<Grid>, t: f64) -> Field {
        let z = Complex64::new(1.0, t);
        let amp = z.sqrt().inv();
        Field::from_fn(grid.clone(), |x| {
            amp * (-Complex64::new(x[0] * x[0] / 2.0, 0.0) / z).exp()
        })
    }

    #[test]
    fn free_zero_time_is_identity() {
        let grid = Grid::line(32.0, 512).unwrap();
        let f = gaussian_field(&grid);
        let g = free_propagate(&f, 0.3, 0.0).unwrap();
        assert_eq!(f.values(), g.values());
    }

    #[test]
    fn free_plane_wave_eigenfunction() {
        let grid = Grid::line(16.0, 256).unwrap();
        let k0 = 2.0 * std::f64::consts::PI * 9.0 / 16.0;
        let f = Field::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, k0 * x[0]));
        let (eps, t) = (0.3, 0.7);
        let got = free_propagate(&f, eps, t).unwrap();
        let phase = Complex64::from_polar(1.0, -eps * t * k0 * k0 / 2.0);
        let mut worst = 0.0f64;
        for (a, b) in got.values().iter().zip(f.values()) {
            worst = worst.max((a - b * phase).norm());
        }
        assert!(worst < 1e-12);
    }

    #[test]
    fn free_gaussian_matches_closed_form() {
        let grid = Grid::line(64.0, 2048).unwrap();
        let f = gaussian_field(&grid);
        for &t in &[0.5, 1.0, 3.0, -2.0] {
            let got = free_propagate(&f, 1.0, t).unwrap();
            let want = gaussian_free_exact(&grid, t);
            let err = got.sub(&want).unwrap().l2_norm();
            assert!(err < 1e-10, "t={t}: gaussian evolution error {err}");
        }
    }

    #[test]
    fn free_group_law_and_unitarity() {
        let grid = Grid::line(32.0, 512).unwrap();
        let f = gaussian_field(&grid);
        let eps = 0.2;
        let a = free_propagate(&free_propagate(&f, eps, 0.4).unwrap(), eps, 0.9).unwrap();
        let b = free_propagate(&f, eps, 1.3).unwrap();
        assert!(a.sub(&b).unwrap().l2_norm() < 1e-11);
        assert!((a.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn harmonic_ground_state_phase_rotation() {
        // e^{-|x|^2/(2 eps)} is the ground state with eigenvalue n eps / 2.
        let eps = 0.25;
        let grid = Grid::line(16.0, 1024).unwrap();
        let f = Field::from_fn(grid.clone(), |x| {
            Complex64::new((-x[0] * x[0] / (2.0 * eps)).exp(), 0.0)
        });
        for &t in &[0.3, 1.0, std::f64::consts::FRAC_PI_2, 2.5, -1.2] {
            let got = harmonic_propagate(&f, eps, t).unwrap();
            let want = f.scale(Complex64::from_polar(1.0, -t / 2.0));
            let err = got.sub(&want).unwrap().l2_norm() / f.l2_norm();
            assert!(err < 1e-10, "t={t}: ground state error {err}");
        }
    }

    #[test]
    fn harmonic_excited_state_phase_rotation() {
        // x e^{-x^2/(2 eps)}: first excited state, eigenvalue 3 eps / 2.
        let eps = 0.25;
        let grid = Grid::line(16.0, 1024).unwrap();
        let f = Field::from_fn(grid.clone(), |x| {
            Complex64::new(x[0] * (-x[0] * x[0] / (2.0 * eps)).exp(), 0.0)
        });
        for &t in &[0.7, 2.2, 4.0] {
            let got = harmonic_propagate(&f, eps, t).unwrap();
            let want = f.scale(Complex64::from_polar(1.0, -1.5 * t));
            let err = got.sub(&want).unwrap().l2_norm() / f.l2_norm();
            assert!(err < 1e-9, "t={t}: excited state error {err}");
        }
    }

    #[test]
    fn harmonic_full_period_is_signed_identity() {
        let eps = 0.2;
        let grid = Grid::line(16.0, 512).unwrap();
        let f = Field::from_fn(grid.clone(), |x| {
            Complex64::from_polar((-(x[0] - 0.8).powi(2) / 2.0).exp(), 1.3 * x[0])
        });
        let got = harmonic_propagate(&f, eps, 2.0 * std::f64::consts::PI).unwrap();
        // (-1)^n x identity for n = 1
        let err = got.sub(&f.scale(Complex64::new(-1.0, 0.0))).unwrap().l2_norm();
        assert!(err < 1e-10 * f.l2_norm(), "2 pi error {err}");
    }

    #[test]
    fn harmonic_inverse_composition() {
        let eps = 0.3;
        let grid = Grid::line(16.0, 512).unwrap();
        let f = Field::from_fn(grid.clone(), |x| {
            Complex64::from_polar((-(x[0] + 0.5).powi(2) / 1.4).exp(), 0.7 * x[0])
        });
        for &t in &[0.4, 1.3, 2.9] {
            let fwd = harmonic_propagate(&f, eps, t).unwrap();
            let back = harmonic_propagate(&fwd, eps, -t).unwrap();
            let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
            assert!(err < 1e-10, "t={t}: inverse composition error {err}");
            assert!((fwd.l2_norm() - f.l2_norm()).abs() < 1e-10 * f.l2_norm());
        }
    }

    #[test]
    fn harmonic_matches_direct_kernel_quadrature() {
        // Brute-force quadrature of the integral kernel,
        // (2 i pi eps sin t)^{-n/2} integral e^{i((x^2+y^2)/2 cos t - x y)/(eps sin t)} u(y) dy,
        // at modest N, against the shear-factorized flow.
        let eps = 0.5;
        let grid = Grid::line(16.0, 256).unwrap();
        let f = Field::from_fn(grid.clone(), |x| {
            Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), 0.4 * x[0])
        });
        for &t in &[std::f64::consts::FRAC_PI_2, 1.0] {
            let got = harmonic_propagate(&f, eps, t).unwrap();
            let (s, c) = (t.sin(), t.cos());
            let dx = grid.axis(0).spacing();
            let pref = (Complex64::new(0.0, 2.0 * std::f64::consts::PI * eps * s)).sqrt().inv();
            let xs = grid.axis_coords(0);
            let mut worst = 0.0f64;
            for (ix, &x) in xs.iter().enumerate() {
                let mut acc = Complex64::default();
                for (iy, &y) in xs.iter().enumerate() {
                    let phase = ((x * x + y * y) / 2.0 * c - x * y) / (eps * s);
                    acc += f.values()[iy] * Complex64::from_polar(1.0, phase);
                }
                let want = pref * acc * dx;
                worst = worst.max((got.values()[ix] - want).norm());
            }
            assert!(worst < 1e-8, "t={t}: kernel quadrature mismatch {worst}");
        }
    }

    #[test]
    fn dispersive_profile_gaussian_oracle() {
        let grid = Grid::line(64.0, 2048).unwrap();
        let v0 = gaussian_field(&grid);
        // closed form: e^{i x^2/(2t)} t^{-1/2} e^{-i pi/4} e^{-(x/t)^2/2}
        for &t in &[50.0, -10.0] {
            let got = dispersive_profile(&v0, t).unwrap();
            let root = signed_root(t, 1)
                * Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
            let want = Field::from_fn(grid.clone(), |x| {
                let xi = x[0] / t;
                root * Complex64::from_polar((-xi * xi / 2.0).exp(), x[0] * x[0] / (2.0 * t))
            });
            let err = got.sub(&want).unwrap().l2_norm() / want.l2_norm();
            assert!(err < 1e-6, "t={t}: dispersive profile error {err}");
        }
    }

    #[test]
    fn dispersive_profile_approximates_free_flow() {
        // || free(t) - profile(t) ||_{L^2} decreases along t = 5, 10, 20.
        let grid = Grid::line(256.0, 4096).unwrap();
        let v0 = gaussian_field(&grid);
        let mut prev = f64::INFINITY;
        for &t in &[5.0, 10.0, 20.0] {
            let exact = free_propagate(&v0, 1.0, t).unwrap();
            let prof = dispersive_profile(&v0, t).unwrap();
            let err = exact.sub(&prof).unwrap().l2_norm();
            assert!(err < prev, "t={t}: {err} not below {prev}");
            prev = err;
        }
    }

    #[test]
    fn caustic_approximant_at_time_zero_is_datum() {
        let grid = Grid::line(32.0, 8192).unwrap();
        let eps = 0.05;
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let d = QuadraticDatum::new(p.clone(), 1.0, vec![1.5]).unwrap();
        let datum = d.sample(eps, &grid).unwrap();
        let approx =
            caustic_approximant(&d, eps, 0.0, CausticSide::Pre, &p, &grid, None).unwrap();
        let err = approx.sub(&datum).unwrap().l2_norm();
        assert!(err < 1e-12, "t=0 approximant differs from datum: {err}");
    }

    #[test]
    fn caustic_amplitude_at_half_focus() {
        let grid = Grid::line(32.0, 8192).unwrap();
        let eps = 0.05;
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let d = QuadraticDatum::new(p.clone(), 1.0, vec![0.0]).unwrap();
        let f = caustic_approximant(&d, eps, 0.5, CausticSide::Pre, &p, &grid, None).unwrap();
        let expect = 2.0f64.powf(0.5) * p.eval(&[0.0]).norm();
        assert!((f.linf_norm() - expect).abs() < 1e-10);
    }

    #[test]
    fn caustic_side_and_floor_errors() {
        let grid = Grid::line(32.0, 4096).unwrap();
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let d = QuadraticDatum::new(p.clone(), 1.0, vec![0.0]).unwrap();
        assert!(caustic_approximant(&d, 0.05, 1.5, CausticSide::Pre, &p, &grid, None).is_err());
        assert!(caustic_approximant(&d, 0.05, 0.5, CausticSide::Post, &p, &grid, None).is_err());
        assert!(caustic_approximant(&d, 0.05, 1.0 + 0.01, CausticSide::Post, &p, &grid, Some(0.1)).is_err());
    }

    #[test]
    fn post_focus_branch_matches_linear_flow() {
        // The exact linear evolution of the quadratic datum, past the focus,
        // must approach the post-focus approximant with g = f (the linear
        // crossing leaves the profile unchanged); this pins the branch
        // constant e^{-i n pi/2}.
        let grid = Grid::line(32.0, 16384).unwrap();
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let d = QuadraticDatum::new(p.clone(), 1.0, vec![0.0]).unwrap();
        let mut prev = f64::INFINITY;
        for &eps in &[0.08, 0.04, 0.02] {
            let u0 = d.sample(eps, &grid).unwrap();
            let v = free_propagate(&u0, eps, 2.0).unwrap();
            let approx =
                caustic_approximant(&d, eps, 2.0, CausticSide::Post, &p, &grid, None).unwrap();
            let err = v.sub(&approx).unwrap().l2_norm() / v.l2_norm();
            assert!(err < prev, "eps={eps}: post-focus error {err} not below {prev}");
            assert!(err < 0.2, "eps={eps}: post-focus error too large: {err}");
            prev = err;
        }
    }

    #[test]
    fn pre_focus_approximant_converges_in_h1_eps() {
        let grid = Grid::line(32.0, 16384).unwrap();
        let p = Profile::unit_mass_gaussian(1, 1.0);
        let d = QuadraticDatum::new(p.clone(), 1.0, vec![0.0]).unwrap();
        let mut prev = f64::INFINITY;
        for &eps in &[0.08, 0.04, 0.02] {
            let u0 = d.sample(eps, &grid).unwrap();
            let v = free_propagate(&u0, eps, 0.5).unwrap();
            let approx =
                caustic_approximant(&d, eps, 0.5, CausticSide::Pre, &p, &grid, None).unwrap();
            let diff = v.sub(&approx).unwrap();
            let err = diff.h1_eps_norm(eps).unwrap() / v.h1_eps_norm(eps).unwrap();
            assert!(err < prev, "eps={eps}: pre-focus H1_eps error {err} >= {prev}");
            prev = err;
        }
    }
}
