//! Teleportation-based GKP quadrature correction and soft information.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{gaussian, Mode, NoiseParams, SQRT_PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Analog,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QunaughtSupply {
    pub p_fail: f64,
}

impl QunaughtSupply {
    pub fn new(p_fail: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_fail) {
            return Err(Error::Domain(format!("p_fail must lie in [0, 1], got {p_fail}")));
        }
        Ok(QunaughtSupply { p_fail })
    }

    pub fn perfect() -> Self {
        QunaughtSupply { p_fail: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionOutcome {
    pub m_a: f64,
    pub m_b: f64,
    pub z_q: f64,
    pub z_p: f64,
    /// Probability that the q correction flipped the qubit (an X error).
    pub p_x: f64,
    /// Probability that the p correction flipped the qubit (a Z error).
    pub p_z: f64,
    pub corrected_q: bool,
    pub corrected_p: bool,
}

pub fn nearest_lattice(x: f64) -> f64 {
    SQRT_PI * (x / SQRT_PI + 0.5).floor()
}

pub fn residual(x: f64) -> f64 {
    x - nearest_lattice(x)
}

/// Probability that a Gaussian shift of variance `sigma2`, observed with
/// residual `z`, came from an odd multiple of √π.
pub fn p_sigma(z: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::Domain(format!("variance must be positive, got {sigma2}")));
    }
    if !z.is_finite() || z.abs() > SQRT_PI / 2.0 {
        return Err(Error::Domain(format!("residual {z} outside [-sqrt(pi)/2, sqrt(pi)/2]")));
    }
    Ok(odd_fraction(z, sigma2))
}

/// Odd/total ratio of the lattice Gaussian sum. Terms are taken in pairs
/// `n0 - k`, `n0 + 1 + k` around the residual, which always have opposite
/// parity and equal distance at the bin edge, so `|z| = √π/2` gives exactly 1/2.
fn odd_fraction(z: f64, sigma2: f64) -> f64 {
    let u = z / SQRT_PI;
    let n0 = u.floor() as i64;
    let expo = |n: i64| {
        let t = z - n as f64 * SQRT_PI;
        -t * t / (2.0 * sigma2)
    };
    let top = expo(n0).max(expo(n0 + 1));
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in 0..100_000i64 {
        let (a, b) = (n0 - k, n0 + 1 + k);
        let ta = (expo(a) - top).exp();
        let tb = (expo(b) - top).exp();
        for (n, t) in [(a, ta), (b, tb)] {
            if n.rem_euclid(2) == 0 {
                even += t;
            } else {
                odd += t;
            }
        }
        let largest = ta.max(tb);
        if largest == 0.0 || (k > 0 && largest < 1e-17 * odd.min(even)) {
            break;
        }
    }
    (odd / (odd + even)).min(0.5)
}

fn upper_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Gaussian mass of variance `sigma2` lying in the odd √π bins.
pub fn p_err_fixed(sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::Domain(format!("variance must be positive, got {sigma2}")));
    }
    Ok(odd_bin_mass(sigma2))
}

fn odd_bin_mass(sigma2: f64) -> f64 {
    let scale = SQRT_PI / sigma2.sqrt();
    let mut total = 0.0;
    let mut n = 0.0;
    loop {
        let lo = upper_tail((2.0 * n + 0.5) * scale);
        if lo < 1e-18 || n > 1e7 {
            break;
        }
        total += lo - upper_tail((2.0 * n + 1.5) * scale);
        n += 1.0;
    }
    (2.0 * total).clamp(0.0, 0.5)
}

pub fn combine_ptot(probs: &[f64]) -> Result<f64> {
    let mut keep = 1.0;
    for &p in probs {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1/2]")));
        }
        keep *= 1.0 - 2.0 * p;
    }
    Ok((1.0 - keep) / 2.0)
}

fn error_probability(z: f64, total_var: f64, weighting: Weighting) -> f64 {
    if total_var <= 0.0 {
        return 0.0;
    }
    match weighting {
        Weighting::Analog => odd_fraction(z, total_var),
        Weighting::Fixed => odd_bin_mass(total_var),
    }
}

/// Misrounding probability of a homodyne readout with tracked variance `var`.
pub fn readout_error_probability(outcome: f64, var: f64, weighting: Weighting) -> f64 {
    error_probability(residual(outcome), var, weighting)
}

/// Teleports `mode` through a GKP Bell pair made of two qunaughts and
/// snaps both quadratures back onto the √π lattice.
pub fn teleport_correct<R: Rng + ?Sized>(
    mode: &mut Mode,
    params: &NoiseParams,
    supply: QunaughtSupply,
    weighting: Weighting,
    rng: &mut R,
) -> CorrectionOutcome {
    let v = params.sigma2_gkp;
    let (q1, p1) = (gaussian(rng, v), gaussian(rng, v));
    let (q2, p2) = (gaussian(rng, v), gaussian(rng, v));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (bell_q1, bell_p1) = ((q1 - q2) * h, (p1 - p2) * h);
    let (bell_q2, bell_p2) = ((q1 + q2) * h, (p1 + p2) * h);

    let (replaced_a, replaced_b) = if supply.p_fail > 0.0 {
        (rng.random::<f64>() < supply.p_fail, rng.random::<f64>() < supply.p_fail)
    } else {
        (false, false)
    };
    let corrected_q = !replaced_b;
    let corrected_p = !replaced_a;

    let m_a = (mode.shift.q - bell_q1) * h;
    let m_b = (mode.shift.p + bell_p1) * h;
    let (xa, xb) = (m_a * std::f64::consts::SQRT_2, m_b * std::f64::consts::SQRT_2);
    let (z_q, z_p) = (residual(xa), residual(xb));

    let mut out = CorrectionOutcome { m_a, m_b, z_q, z_p, p_x: 0.0, p_z: 0.0, corrected_q, corrected_p };
    if corrected_q {
        out.p_x = error_probability(z_q, mode.var.q + v, weighting);
        mode.shift.q = bell_q2 + nearest_lattice(xa);
        mode.var.q = v;
    } else {
        mode.shift.q += gaussian(rng, params.sigma2_gate);
        mode.var.q += params.sigma2_gate;
    }
    if corrected_p {
        out.p_z = error_probability(z_p, mode.var.p + v, weighting);
        mode.shift.p = bell_p2 + nearest_lattice(xb);
        mode.var.p = v;
    } else {
        mode.shift.p += gaussian(rng, params.sigma2_gate);
        mode.var.p += params.sigma2_gate;
    }
    out
}
