//! Quadrature shift noise and its tracked marginal variances.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Quadrature shifts of one mode (vacuum variance 1/2).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModeNoise {
    pub q: f64,
    pub p: f64,
}

/// Marginal variances of the shifts, propagated as if all sources were independent.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VarianceTracker {
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Mode {
    pub shift: ModeNoise,
    pub var: VarianceTracker,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Squeezed-quadrature variance of the resource states.
    pub sigma2: f64,
    pub sigma2_gkp: f64,
    pub sigma2_gate: f64,
}

impl NoiseParams {
    pub fn from_sigma2(sigma2: f64, gate_noise: bool) -> Self {
        NoiseParams {
            sigma2,
            sigma2_gkp: sigma2,
            sigma2_gate: if gate_noise { 2.0 * sigma2 } else { 0.0 },
        }
    }

    pub fn from_db(db: f64, gate_noise: bool) -> Self {
        Self::from_sigma2(sigma2_from_db(db), gate_noise)
    }

    /// Noise-free parameters for the closing ideal round.
    pub fn ideal() -> Self {
        NoiseParams { sigma2: 0.0, sigma2_gkp: 0.0, sigma2_gate: 0.0 }
    }
}

pub fn sigma2_from_db(db: f64) -> f64 {
    0.5 * 10f64.powf(-db / 10.0)
}

pub fn db_from_sigma2(sigma2: f64) -> f64 {
    -10.0 * (sigma2 / 0.5).log10()
}

/// A normal draw with the given variance; exactly zero when the variance is zero.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> f64 {
    if variance > 0.0 {
        let z: f64 = StandardNormal.sample(rng);
        z * variance.sqrt()
    } else {
        0.0
    }
}

pub fn init_gkp_mode<R: Rng + ?Sized>(params: &NoiseParams, ideal: bool, rng: &mut R) -> Mode {
    if ideal {
        return Mode::default();
    }
    let v = params.sigma2_gkp;
    Mode {
        shift: ModeNoise { q: gaussian(rng, v), p: gaussian(rng, v) },
        var: VarianceTracker { q: v, p: v },
    }
}

fn pair_mut(modes: &mut [Mode], i: usize, j: usize) -> (&mut Mode, &mut Mode) {
    assert_ne!(i, j, "two-mode gate needs distinct modes");
    if i < j {
        let (a, b) = modes.split_at_mut(j);
        (&mut a[i], &mut b[0])
    } else {
        let (a, b) = modes.split_at_mut(i);
        (&mut b[0], &mut a[j])
    }
}

fn add_gate_noise<R: Rng + ?Sized>(m: &mut Mode, params: &NoiseParams, rng: &mut R) {
    let v = params.sigma2_gate;
    m.shift.q += gaussian(rng, v);
    m.shift.p += gaussian(rng, v);
    m.var.q += v;
    m.var.p += v;
}

/// `C_Z(1)`: each mode's p is displaced by the other's q, then gate noise.
pub fn apply_cz<R: Rng + ?Sized>(
    modes: &mut [Mode],
    i: usize,
    j: usize,
    params: &NoiseParams,
    rng: &mut R,
) {
    let (a, b) = pair_mut(modes, i, j);
    let (aq, bq) = (a.shift.q, b.shift.q);
    let (avq, bvq) = (a.var.q, b.var.q);
    a.shift.p += bq;
    b.shift.p += aq;
    a.var.p += bvq;
    b.var.p += avq;
    add_gate_noise(a, params, rng);
    add_gate_noise(b, params, rng);
}

/// `C_X(±1)`: each mode's q is displaced by `sign` times the other's p, then gate noise.
pub fn apply_cx<R: Rng + ?Sized>(
    modes: &mut [Mode],
    i: usize,
    j: usize,
    sign: f64,
    params: &NoiseParams,
    rng: &mut R,
) {
    let (a, b) = pair_mut(modes, i, j);
    let (ap, bp) = (a.shift.p, b.shift.p);
    let (avp, bvp) = (a.var.p, b.var.p);
    a.shift.q += sign * bp;
    b.shift.q += sign * ap;
    a.var.q += bvp;
    b.var.q += avp;
    add_gate_noise(a, params, rng);
    add_gate_noise(b, params, rng);
}

/// A mode with nothing to do in a step still teleports through it.
pub fn apply_idle<R: Rng + ?Sized>(mode: &mut Mode, params: &NoiseParams, rng: &mut R) {
    add_gate_noise(mode, params, rng);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    Q,
    P,
}

/// Parity of the nearest multiple of √π.
pub fn lattice_bit(x: f64) -> bool {
    let n = (x / SQRT_PI + 0.5).floor();
    n.rem_euclid(2.0) == 1.0
}

pub fn measure_homodyne(mode: &Mode, quadrature: Quadrature) -> (f64, bool) {
    let x = match quadrature {
        Quadrature::Q => mode.shift.q,
        Quadrature::P => mode.shift.p,
    };
    (x, lattice_bit(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use std::f64::consts::PI;
    use rand_chacha::ChaCha8Rng;

    fn modes(shifts: &[(f64, f64)]) -> Vec<Mode> {
        shifts
            .iter()
            .map(|&(q, p)| Mode { shift: ModeNoise { q, p }, var: VarianceTracker::default() })
            .collect()
    }

    fn quiet() -> NoiseParams {
        NoiseParams { sigma2: 0.0, sigma2_gkp: 0.0, sigma2_gate: 0.0 }
    }

    #[test]
    fn sqrt_pi_constant() {
        assert!((SQRT_PI - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn db_conversion() {
        assert_eq!(sigma2_from_db(0.0), 0.5);
        assert!((sigma2_from_db(12.7) - 0.026852).abs() < 1e-6);
        for x in [0.0, 3.3, 12.7, 17.3] {
            assert!((db_from_sigma2(sigma2_from_db(x)) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_init_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = init_gkp_mode(&NoiseParams::from_db(10.0, true), true, &mut rng);
        assert_eq!(m, Mode::default());
    }

    #[test]
    fn cz_moves_q_into_partner_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut m = modes(&[(0.3, 0.0), (0.0, 0.0)]);
        apply_cz(&mut m, 0, 1, &quiet(), &mut rng);
        assert_eq!(m[1].shift, ModeNoise { q: 0.0, p: 0.3 });
        let mut m = modes(&[(SQRT_PI, 0.0), (0.0, 0.0)]);
        apply_cz(&mut m, 0, 1, &quiet(), &mut rng);
        assert_eq!(m[1].shift.p, SQRT_PI);
        assert!(measure_homodyne(&m[1], Quadrature::P).1);
    }

    #[test]
    fn cx_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for sign in [1.0, -1.0] {
            let mut m = modes(&[(0.0, SQRT_PI), (0.0, 0.0)]);
            apply_cx(&mut m, 0, 1, sign, &quiet(), &mut rng);
            assert_eq!(m[1].shift.q, sign * SQRT_PI);
        }
    }

    #[test]
    fn cx_inverse_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let start = modes(&[(0.1, -0.7), (1.3, 0.25)]);
        let mut m = start.clone();
        apply_cx(&mut m, 0, 1, 1.0, &quiet(), &mut rng);
        apply_cx(&mut m, 0, 1, -1.0, &quiet(), &mut rng);
        for (a, b) in m.iter().zip(&start) {
            assert!((a.shift.q - b.shift.q).abs() < 1e-15);
            assert!((a.shift.p - b.shift.p).abs() < 1e-15);
        }
    }

    #[test]
    fn homodyne_bits() {
        let m = |x| Mode { shift: ModeNoise { q: x, p: 0.0 }, ..Default::default() };
        assert!(!measure_homodyne(&m(0.1 * SQRT_PI), Quadrature::Q).1);
        assert!(measure_homodyne(&m(0.9 * SQRT_PI), Quadrature::Q).1);
        assert!(!measure_homodyne(&m(2.2 * SQRT_PI), Quadrature::Q).1);
        assert!(measure_homodyne(&m(-1.1 * SQRT_PI), Quadrature::Q).1);
    }

    #[test]
    fn tracker_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = NoiseParams { sigma2: 0.1, sigma2_gkp: 0.1, sigma2_gate: 0.2 };
        let mut m = vec![init_gkp_mode(&p, false, &mut rng), init_gkp_mode(&p, false, &mut rng)];
        apply_cz(&mut m, 0, 1, &p, &mut rng);
        assert!((m[0].var.p - 0.4).abs() < 1e-15);
        assert!((m[0].var.q - 0.3).abs() < 1e-15);
        apply_cx(&mut m, 1, 0, -1.0, &p, &mut rng);
        assert!((m[1].var.q - (0.3 + 0.4 + 0.2)).abs() < 1e-15);
    }

    fn shifts(m: &[Mode]) -> Vec<f64> {
        m.iter().flat_map(|x| [x.shift.q, x.shift.p]).collect()
    }

    proptest! {
        #[test]
        fn cx_pair_undoes_itself(q0 in -5.0f64..5.0, p0 in -5.0f64..5.0, q1 in -5.0f64..5.0, p1 in -5.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let start = modes(&[(q0, p0), (q1, p1)]);
            let mut m = start.clone();
            apply_cx(&mut m, 1, 0, -1.0, &quiet(), &mut rng);
            apply_cx(&mut m, 1, 0, 1.0, &quiet(), &mut rng);
            for (a, b) in shifts(&m).iter().zip(shifts(&start)) {
                prop_assert!((a - b).abs() < 1e-14);
            }
        }

        #[test]
        fn propagation_is_linear(v in proptest::collection::vec(-3.0f64..3.0, 6), c in -4.0f64..4.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let run = |scale: f64, rng: &mut ChaCha8Rng| {
                let mut m = modes(&[(v[0] * scale, v[1] * scale), (v[2] * scale, v[3] * scale), (v[4] * scale, v[5] * scale)]);
                apply_cz(&mut m, 0, 1, &quiet(), rng);
                apply_cx(&mut m, 2, 1, -1.0, &quiet(), rng);
                apply_cz(&mut m, 2, 0, &quiet(), rng);
                apply_idle(&mut m[1], &quiet(), rng);
                shifts(&m)
            };
            let base = run(1.0, &mut rng);
            let scaled = run(c, &mut rng);
            for (a, b) in base.iter().zip(&scaled) {
                prop_assert!((a * c - b).abs() < 1e-12);
            }
        }

        #[test]
        fn lattice_shift_parity(x in -0.8f64..0.8, k in -5i32..5) {
            let base = lattice_bit(x);
            prop_assert_eq!(lattice_bit(x + SQRT_PI), !base);
            prop_assert_eq!(lattice_bit(x + 2.0 * SQRT_PI), base);
            prop_assert_eq!(lattice_bit(x + 2.0 * k as f64 * SQRT_PI), base);
        }
    }
}
