//! Admissible-pair algebra for the dispersive space-time estimates.
//!
//! A pair (q, r) is admissible when `2/q = delta(r) = n (1/2 - 1/r)` and r
//! lies in the dimension-dependent range (r = infinity allowed only for
//! n = 1, excluded for n = 2). The derived tuple (q, r, s, k) closes the
//! two Hölder relations
//! `1/r' = 1/r + 2 sigma / s` and `1/q' = 1/q + 2 sigma / k`
//! with `0 < 2/k < delta(s) < 1`, which is what the Gronwall-type absorption
//! of the nonlinear term needs; theta1, theta2 and gamma are the associated
//! interpolation exponents. Everything here fails loudly for sigma <= 2/n:
//! gamma > 0 is exactly what that strict inequality buys.

use serde::Serialize;

use crate::error::{Error, Result};

/// `delta(r) = n (1/2 - 1/r)`; r = infinity allowed.
pub fn delta_exponent(r: f64, n: usize) -> Result<f64> {
    if !(r >= 2.0) {
        return Err(Error::BadLebesgueExponent(r));
    }
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    Ok(n as f64 * (0.5 - inv_r))
}

/// Is (q, r) an admissible pair in dimension n?
pub fn is_admissible(q: f64, r: f64, n: usize) -> bool {
    if !(r >= 2.0) || !(q >= 2.0) {
        return false;
    }
    match n {
        1 => {}
        2 => {
            if r.is_infinite() {
                return false;
            }
        }
        _ => {
            // n >= 3 would demand r < 2n/(n-2); unsupported here
            return false;
        }
    }
    let delta = match delta_exponent(r, n) {
        Ok(d) => d,
        Err(_) => return false,
    };
    let lhs = if q.is_infinite() { 0.0 } else { 2.0 / q };
    (lhs - delta).abs() <= 1e-12
}

/// The admissible partner `q = 2 / delta(r)` of r (infinite when r = 2).
pub fn admissible_q(r: f64, n: usize) -> Result<f64> {
    let d = delta_exponent(r, n)?;
    Ok(if d == 0.0 { f64::INFINITY } else { 2.0 / d })
}

/// One feasible exponent tuple together with the interpolation numbers.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentSet {
    pub n: usize,
    pub sigma: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub k: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma: f64,
}

impl ExponentSet {
    /// Search the admissible range of r for a tuple satisfying every
    /// constraint; returns the smallest feasible r on the search grid.
    pub fn derive(n: usize, sigma: f64) -> Result<ExponentSet> {
        if n == 0 || n > 2 {
            return Err(Error::BadDimension(n));
        }
        let bound = 2.0 / n as f64;
        if !(sigma > bound) {
            // gamma = 2 sigma theta1 (1 - delta(2 sigma + 2)) would lose
            // positivity in the borderline case
            return Err(Error::SigmaTooSmall { sigma, bound });
        }

        let delta_2s2 = delta_exponent(2.0 * sigma + 2.0, n)?;
        // scan r > 2 (r = 2 makes s blow up; r = inf only valid for n = 1)
        let r_hi = 600.0;
        let steps = 4096;
        for i in 1..=steps {
            let r = 2.0 + (r_hi - 2.0) * i as f64 / steps as f64;
            let q = match admissible_q(r, n) {
                Ok(q) => q,
                Err(_) => continue,
            };
            if !q.is_finite() {
                continue;
            }
            // Hölder closures determine s and k
            let s_inv = (1.0 - 2.0 / r) / (2.0 * sigma);
            let k_inv = (1.0 - 2.0 / q) / (2.0 * sigma);
            if s_inv <= 0.0 || k_inv <= 0.0 {
                continue;
            }
            let s = 1.0 / s_inv;
            let k = 1.0 / k_inv;
            if s < 2.0 {
                continue;
            }
            let delta_s = match delta_exponent(s, n) {
                Ok(d) => d,
                Err(_) => continue,
            };
            if !(0.0 < 2.0 / k && 2.0 / k < delta_s && delta_s < 1.0) {
                continue;
            }
            let theta1 = (delta_s - 2.0 / k) / delta_2s2;
            if !(theta1 > 0.0 && theta1 < 1.0) {
                continue;
            }
            let theta2 = theta2(n, sigma);
            let gamma = 2.0 * sigma * theta1 * (1.0 - delta_2s2);
            if !(theta2 > 0.0 && theta2 < 1.0 && gamma > 0.0) {
                continue;
            }
            let set = ExponentSet { n, sigma, q, r, s, k, theta1, theta2, gamma };
            set.assert_invariants()?;
            return Ok(set);
        }
        Err(Error::ExponentInfeasible {
            n,
            sigma,
            reason: format!("no r in (2, {r_hi}] satisfies the constraint chain"),
        })
    }

    /// Machine-check every defining relation of the tuple.
    pub fn assert_invariants(&self) -> Result<()> {
        let tol = 1e-9;
        let fail = |what: &str| {
            Err(Error::ExponentInfeasible {
                n: self.n,
                sigma: self.sigma,
                reason: what.to_string(),
            })
        };
        // Hölder closures against the conjugate exponents
        let r_conj = 1.0 - 1.0 / self.r;
        if (r_conj - (1.0 / self.r + 2.0 * self.sigma / self.s)).abs() > tol {
            return fail("1/r' = 1/r + 2 sigma/s violated");
        }
        let q_conj = 1.0 - 1.0 / self.q;
        if (q_conj - (1.0 / self.q + 2.0 * self.sigma / self.k)).abs() > tol {
            return fail("1/q' = 1/q + 2 sigma/k violated");
        }
        if !is_admissible(self.q, self.r, self.n) {
            return fail("(q, r) not admissible");
        }
        let ds = delta_exponent(self.s, self.n)?;
        if !(0.0 < 2.0 / self.k && 2.0 / self.k < ds && ds < 1.0) {
            return fail("0 < 2/k < delta(s) < 1 violated");
        }
        let d2 = delta_exponent(2.0 * self.sigma + 2.0, self.n)?;
        if ((ds - 2.0 / self.k) / d2 - self.theta1).abs() > tol
            || !(self.theta1 > 0.0 && self.theta1 < 1.0)
        {
            return fail("theta1 out of (0,1) or inconsistent");
        }
        if (self.theta2 - theta2(self.n, self.sigma)).abs() > tol
            || !(self.theta2 > 0.0 && self.theta2 < 1.0)
        {
            return fail("theta2 out of (0,1) or inconsistent");
        }
        if (self.gamma - 2.0 * self.sigma * self.theta1 * (1.0 - d2)).abs() > tol
            || !(self.gamma > 0.0)
        {
            return fail("gamma <= 0 or inconsistent");
        }
        Ok(())
    }
}

/// `theta2 = (2 sigma + 2)(n sigma - 2) / (n sigma (2 sigma + 1))`.
pub fn theta2(n: usize, sigma: f64) -> f64 {
    let ns = n as f64 * sigma;
    (2.0 * sigma + 2.0) * (ns - 2.0) / (ns * (2.0 * sigma + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_values() {
        assert_eq!(delta_exponent(2.0, 1).unwrap(), 0.0);
        assert_eq!(delta_exponent(2.0, 2).unwrap(), 0.0);
        assert!((delta_exponent(8.0, 1).unwrap() - 3.0 / 8.0).abs() < 1e-15);
        assert_eq!(delta_exponent(f64::INFINITY, 2).unwrap(), 1.0);
        assert!(delta_exponent(1.5, 1).is_err());
    }

    #[test]
    fn delta_monotone_and_scaling_identity() {
        // delta increasing in r; delta(2 sigma + 2) * (2 sigma + 2) = n sigma.
        for n in [1usize, 2] {
            let mut prev = -1.0;
            for i in 0..50 {
                let r = 2.0 + i as f64 * 0.5;
                let d = delta_exponent(r, n).unwrap();
                assert!(d > prev);
                prev = d;
            }
            let mut state = 0x9e3779b97f4a7c15u64;
            for _ in 0..20 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let sigma = 0.5 + (state >> 40) as f64 / (1u64 << 24) as f64 * 4.0;
                let p = 2.0 * sigma + 2.0;
                let d = delta_exponent(p, n).unwrap();
                assert!((d * p - n as f64 * sigma).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn admissibility_rules() {
        assert!(is_admissible(f64::INFINITY, 2.0, 1));
        assert!(is_admissible(f64::INFINITY, 2.0, 2));
        assert!(is_admissible(4.0, f64::INFINITY, 1));
        assert!(!is_admissible(2.0, f64::INFINITY, 2));
        assert!(!is_admissible(4.0, 3.0, 1)); // 2/q != delta(r)
        let q = admissible_q(8.0, 1).unwrap();
        assert!((q - 16.0 / 3.0).abs() < 1e-12);
        assert!(is_admissible(q, 8.0, 1));
    }

    #[test]
    fn tuple_for_n1_sigma3() {
        let set = ExponentSet::derive(1, 3.0).unwrap();
        assert!((set.theta2 - 8.0 / 21.0).abs() < 1e-12, "theta2 = {}", set.theta2);
        set.assert_invariants().unwrap();
    }

    #[test]
    fn theta2_for_n2_sigma2() {
        assert!((theta2(2, 2.0) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn borderline_sigma_rejected() {
        assert!(matches!(ExponentSet::derive(1, 2.0), Err(Error::SigmaTooSmall { .. })));
        assert!(matches!(ExponentSet::derive(2, 1.0), Err(Error::SigmaTooSmall { .. })));
        assert!(ExponentSet::derive(1, 2.0001).is_ok());
    }

    #[test]
    fn feasible_on_a_grid_of_n_sigma() {
        for n in [1usize, 2] {
            let lo = 2.0 / n as f64;
            for i in 1..=40 {
                let sigma = lo + 0.05 + (4.0 - lo - 0.05) * i as f64 / 40.0;
                let set = ExponentSet::derive(n, sigma)
                    .unwrap_or_else(|e| panic!("n={n} sigma={sigma}: {e}"));
                set.assert_invariants().unwrap();
            }
        }
    }
}
