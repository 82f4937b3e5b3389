//! Symplectic matrices of the measurement-based gate layer.
//!
//! Quadrature vectors are ordered `(q_1..q_n, p_1..p_n)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Quadrature map of a teleported gate: outputs = `g`·inputs +
/// `noise`·(squeezed ancilla quadratures) + `displacement`·(outcomes).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticGate {
    pub g: Matrix,
    pub noise: Matrix,
    pub displacement: Matrix,
}

impl SymplecticGate {
    fn bare(g: Matrix) -> Self {
        let n = g.nrows();
        SymplecticGate { g, noise: Matrix::zeros(n, 0), displacement: Matrix::zeros(n, 0) }
    }

    pub fn modes(&self) -> usize {
        self.g.nrows() / 2
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        is_symplectic(&self.g, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    BeamSplitter,
    Rotation(f64),
    Squeeze(f64),
    Fourier,
    FourierDag,
    Cz(f64),
    Cx(f64),
}

pub fn omega(n: usize) -> Matrix {
    let mut w = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        w[(i, n + i)] = 1.0;
        w[(n + i, i)] = -1.0;
    }
    w
}

pub fn is_symplectic(m: &Matrix, tol: f64) -> bool {
    if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
        return false;
    }
    let w = omega(m.nrows() / 2);
    (m * &w * m.transpose() - w).amax() < tol
}

pub fn rotation(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_row_slice(2, 2, &[c, s, -s, c])
}

pub fn squeeze(s: f64) -> Result<Matrix> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::Domain(format!("squeeze factor must be finite and non-zero, got {s}")));
    }
    Ok(Matrix::from_row_slice(2, 2, &[1.0 / s, 0.0, 0.0, s]))
}

pub fn fourier() -> Matrix {
    rotation(FRAC_PI_2)
}

pub fn fourier_dag() -> Matrix {
    rotation(-FRAC_PI_2)
}

/// Beam splitter from mode `i` to mode `j` inside an `n`-mode register.
pub fn beam_splitter(i: usize, j: usize, n: usize) -> Matrix {
    let mut m = Matrix::identity(2 * n, 2 * n);
    let r = FRAC_1_SQRT_2;
    for off in [0, n] {
        m[(off + i, off + i)] = r;
        m[(off + i, off + j)] = -r;
        m[(off + j, off + i)] = r;
        m[(off + j, off + j)] = r;
    }
    m
}

pub fn cz(g: f64) -> Matrix {
    Matrix::from_row_slice(
        4,
        4,
        &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, g, 1.0, 0.0, g, 0.0, 0.0, 1.0],
    )
}

pub fn cx(g: f64) -> Matrix {
    Matrix::from_row_slice(
        4,
        4,
        &[1.0, 0.0, 0.0, g, 0.0, 1.0, g, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    )
}

/// Places a single-mode 2×2 map on `mode` of an `n`-mode register.
pub fn embed(single: &Matrix, mode: usize, n: usize) -> Matrix {
    let mut m = Matrix::identity(2 * n, 2 * n);
    let idx = [mode, n + mode];
    for a in 0..2 {
        for b in 0..2 {
            m[(idx[a], idx[b])] = single[(a, b)];
        }
    }
    m
}

/// Tensor product of two single-mode maps on a two-mode register.
pub fn product(first: &Matrix, second: &Matrix) -> Matrix {
    embed(first, 0, 2) * embed(second, 1, 2)
}

pub fn elementary(kind: Elementary) -> Result<SymplecticGate> {
    let g = match kind {
        Elementary::BeamSplitter => beam_splitter(0, 1, 2),
        Elementary::Rotation(t) => rotation(t),
        Elementary::Squeeze(s) => squeeze(s)?,
        Elementary::Fourier => fourier(),
        Elementary::FourierDag => fourier_dag(),
        Elementary::Cz(g) => cz(g),
        Elementary::Cx(g) => cx(g),
    };
    Ok(SymplecticGate::bare(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    SingleWire,
    /// Two neighbouring wires coupled by the variable beam splitter.
    TwoWire,
}

/// Homodyne angles in detector order: `(θ_A, θ_B)` for one wire,
/// `(θ_A,k, θ_B,k, θ_A,k+j, θ_B,k+j)` for two.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSetting {
    pub angles: Vec<f64>,
    pub topology: Topology,
}

impl BasisSetting {
    pub fn single(theta_a: f64, theta_b: f64) -> Self {
        BasisSetting { angles: vec![theta_a, theta_b], topology: Topology::SingleWire }
    }

    pub fn two_wire(angles: [f64; 4]) -> Self {
        BasisSetting { angles: angles.to_vec(), topology: Topology::TwoWire }
    }
}

/// The four two-mode gates used by the surface code schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoModeGate {
    FdagFThenCz,
    CzThenFFdag,
    FFdagThenCx,
    CxThenFdagF,
}

impl TwoModeGate {
    pub const ALL: [TwoModeGate; 4] = [
        TwoModeGate::FdagFThenCz,
        TwoModeGate::CzThenFFdag,
        TwoModeGate::FFdagThenCx,
        TwoModeGate::CxThenFdagF,
    ];

    /// The symplectic matrix of the gate with coupling strength `g`.
    pub fn target(self, g: f64) -> Matrix {
        let fdag_f = product(&fourier_dag(), &fourier());
        let f_fdag = product(&fourier(), &fourier_dag());
        match self {
            TwoModeGate::FdagFThenCz => fdag_f * cz(g),
            TwoModeGate::CzThenFFdag => cz(g) * f_fdag,
            TwoModeGate::FFdagThenCx => f_fdag * cx(g),
            TwoModeGate::CxThenFdagF => cx(g) * fdag_f,
        }
    }

    /// Homodyne angles implementing the gate with coupling strength `g`.
    pub fn setting(self, g: f64) -> BasisSetting {
        let a = (2.0 / g).atan();
        match self {
            TwoModeGate::FdagFThenCz | TwoModeGate::CxThenFdagF => BasisSetting::two_wire([-a, 0.0, 0.0, a]),
            TwoModeGate::CzThenFFdag | TwoModeGate::FFdagThenCx => {
                BasisSetting::two_wire([-FRAC_PI_2 + a, FRAC_PI_2, -FRAC_PI_2, FRAC_PI_2 - a])
            }
        }
    }
}

// Wire resources: the entangled pair on (b, o) is prepared from two
// p-squeezed modes rotated by π/4 and 3π/4 and a beam splitter b → o.
fn prepare_wire(m: Matrix, b: usize, o: usize, n: usize) -> Matrix {
    let m = embed(&rotation(FRAC_PI_4), b, n) * m;
    let m = embed(&rotation(3.0 * FRAC_PI_4), o, n) * m;
    beam_splitter(b, o, n) * m
}

struct Circuit {
    n: usize,
    transform: Matrix,
    inputs: Vec<usize>,
    resources: Vec<(usize, usize)>,
    measured: Vec<(usize, f64)>,
    outputs: Vec<usize>,
}

pub fn induced_gate(setting: &BasisSetting) -> Result<SymplecticGate> {
    let circuit = match setting.topology {
        Topology::SingleWire => {
            let [ta, tb] = setting.angles[..] else {
                return Err(Error::DegenerateSetting("single wire needs two angles".into()));
            };
            // modes: a = input, b = resource, o = output
            let n = 3;
            let m = prepare_wire(Matrix::identity(2 * n, 2 * n), 1, 2, n);
            let m = beam_splitter(0, 1, n) * m;
            Circuit {
                n,
                transform: m,
                inputs: vec![0],
                resources: vec![(1, 2)],
                measured: vec![(0, ta), (1, tb)],
                outputs: vec![2],
            }
        }
        Topology::TwoWire => {
            let [ta1, tb1, ta2, tb2] = setting.angles[..] else {
                return Err(Error::DegenerateSetting("two wires need four angles".into()));
            };
            // modes: a1, a2 inputs; b1, b2 resources; o1, o2 outputs
            let n = 6;
            let m = prepare_wire(Matrix::identity(2 * n, 2 * n), 2, 4, n);
            let m = prepare_wire(m, 3, 5, n);
            let m = beam_splitter(1, 3, n) * beam_splitter(0, 2, n) * m;
            let m = beam_splitter(0, 3, n) * m;
            Circuit {
                n,
                transform: m,
                inputs: vec![0, 1],
                resources: vec![(2, 4), (3, 5)],
                measured: vec![(0, ta1), (2, tb1), (1, ta2), (3, tb2)],
                outputs: vec![4, 5],
            }
        }
    };
    eliminate(&circuit)
}

// Solves the homodyne constraints for the anti-squeezed ancilla quadratures
// and substitutes them into the outputs.
fn eliminate(c: &Circuit) -> Result<SymplecticGate> {
    let n = c.n;
    let m = &c.transform;
    let input_cols: Vec<usize> = c.inputs.iter().copied().chain(c.inputs.iter().map(|&i| n + i)).collect();
    let mut anti_cols = Vec::new();
    let mut squeezed_cols = Vec::new();
    for &(b, o) in &c.resources {
        anti_cols.extend([b, o]);
        squeezed_cols.extend([n + b, n + o]);
    }
    let output_rows: Vec<usize> = c.outputs.iter().copied().chain(c.outputs.iter().map(|&o| n + o)).collect();

    let k = c.measured.len();
    let mut meas = Matrix::zeros(k, 2 * n);
    for (r, &(mode, theta)) in c.measured.iter().enumerate() {
        let (s, co) = theta.sin_cos();
        for col in 0..2 * n {
            meas[(r, col)] = co * m[(mode, col)] + s * m[(n + mode, col)];
        }
    }
    let pick = |src: &Matrix, rows: &[usize], cols: &[usize]| {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| src[(rows[i], cols[j])])
    };
    let all_rows: Vec<usize> = (0..k).collect();
    let t_x = pick(m, &output_rows, &input_cols);
    let t_q = pick(m, &output_rows, &anti_cols);
    let t_p = pick(m, &output_rows, &squeezed_cols);
    let c_x = pick(&meas, &all_rows, &input_cols);
    let c_q = pick(&meas, &all_rows, &anti_cols);
    let c_p = pick(&meas, &all_rows, &squeezed_cols);

    let lu = c_q.clone().lu();
    let u = lu.u();
    let smallest = (0..u.nrows()).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(smallest > 1e-10) {
        return Err(Error::DegenerateSetting(format!(
            "homodyne angles {:?} leave the ancilla quadratures undetermined",
            c.measured.iter().map(|m| m.1).collect::<Vec<_>>()
        )));
    }
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::DegenerateSetting("singular measurement block".into()))?;
    let d = &t_q * inv;
    Ok(SymplecticGate { g: t_x - &d * c_x, noise: t_p - &d * c_p, displacement: d })
}

/// Per-output-quadrature noise variance when every squeezed ancilla
/// quadrature has variance `e^{-2r}/2`.
pub fn output_noise_variances(gate: &SymplecticGate, r: f64) -> Vec<f64> {
    let v = (-2.0 * r).exp() / 2.0;
    let cov = &gate.noise * gate.noise.transpose() * v;
    (0..cov.nrows()).map(|i| cov[(i, i)]).collect()
}

/// Largest per-quadrature gate noise variance of a setting.
pub fn gate_noise_variance(setting: &BasisSetting, r: f64) -> Result<f64> {
    let gate = induced_gate(setting)?;
    Ok(output_noise_variances(&gate, r).into_iter().fold(0.0, f64::max))
}

pub fn verify_identity(lhs: &Matrix, rhs: &Matrix) -> bool {
    lhs.shape() == rhs.shape() && (lhs - rhs).amax() < 1e-10
}
