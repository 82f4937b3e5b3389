//! Rotated surface code geometry and the four-step coupling schedule.
//!
//! Coordinates are doubled so that data and measure qubits share one integer
//! grid: data `(r, c)` sits at `(2r + 1, 2c + 1)` and the plaquette whose
//! top-left data corner is `(r0, c0)` sits at `(2r0 + 2, 2c0 + 2)`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    DataOdd,
    DataEven,
    MeasureZ,
    MeasureX,
}

impl Role {
    pub fn is_data(self) -> bool {
        matches!(self, Role::DataOdd | Role::DataEven)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Qubit {
    pub role: Role,
    pub row: i32,
    pub col: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Coupling {
    Cz,
    CxPlus,
    CxMinus,
}

impl Coupling {
    pub fn sign(self) -> f64 {
        match self {
            Coupling::Cz | Coupling::CxPlus => 1.0,
            Coupling::CxMinus => -1.0,
        }
    }
}

/// Fourier by-product attached to a coupling. `After*` factors act on the
/// outputs of the coupling, `Before*` on its inputs. The two letters give the
/// factor on the earlier and later temporal mode respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Byproduct {
    AfterFdagF,
    BeforeFFdag,
    AfterFFdag,
    BeforeFdagF,
}

impl Byproduct {
    /// Quarter turns on (earlier, later) mode; `F` is +1 and `F†` is -1.
    pub fn turns(self) -> (i32, i32) {
        match self {
            Byproduct::AfterFdagF | Byproduct::BeforeFdagF => (-1, 1),
            Byproduct::BeforeFFdag | Byproduct::AfterFFdag => (1, -1),
        }
    }

    pub fn is_after(self) -> bool {
        matches!(self, Byproduct::AfterFdagF | Byproduct::AfterFFdag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GateVariant {
    pub coupling: Coupling,
    pub byproduct: Byproduct,
}

impl GateVariant {
    /// The variant used in `step` (1..=4) by a measure qubit of the given kind.
    pub fn for_step(measure_z: bool, step: usize) -> GateVariant {
        use Byproduct::*;
        let (coupling, byproduct) = match (measure_z, step) {
            (true, 1) | (true, 3) => (Coupling::Cz, AfterFdagF),
            (true, _) => (Coupling::Cz, BeforeFFdag),
            (false, 1) => (Coupling::CxPlus, AfterFFdag),
            (false, 2) => (Coupling::CxMinus, BeforeFdagF),
            (false, 3) => (Coupling::CxMinus, AfterFFdag),
            (false, _) => (Coupling::CxPlus, BeforeFdagF),
        };
        GateVariant { coupling, byproduct }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gate {
    pub measure: usize,
    pub data: usize,
    pub variant: GateVariant,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceLayout {
    pub distance: usize,
    pub qubits: Vec<Qubit>,
    /// `schedule[s]` holds the gates of step `s + 1`.
    pub schedule: [Vec<Gate>; 4],
    pub logical_z: Vec<usize>,
    pub logical_x: Vec<usize>,
    /// Data support of each measure qubit, indexed by `id - num_data()`.
    supports: Vec<Vec<usize>>,
    /// Step (1..=4) in which a measure qubit meets each data qubit of its support.
    steps: Vec<Vec<(usize, usize)>>,
}

// Corner visiting order per step, as (row offset, col offset) from the
// plaquette's top-left data qubit.
const Z_ORDER: [(i32, i32); 4] = [(0, 1), (1, 1), (0, 0), (1, 0)];
const X_ORDER: [(i32, i32); 4] = [(0, 1), (0, 0), (1, 1), (1, 0)];

pub fn build_layout(d: usize) -> Result<SurfaceLayout> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidDistance(d));
    }
    let di = d as i32;
    let mut qubits = Vec::with_capacity(2 * d * d - 1);
    for r in 0..di {
        for c in 0..di {
            let role = if (r + c) % 2 == 0 { Role::DataOdd } else { Role::DataEven };
            qubits.push(Qubit { role, row: 2 * r + 1, col: 2 * c + 1 });
        }
    }

    let mut z_plaq = Vec::new();
    let mut x_plaq = Vec::new();
    for r0 in -1..di {
        for c0 in -1..di {
            let z_type = (r0 + c0).rem_euclid(2) == 1;
            let top_bottom = r0 == -1 || r0 == di - 1;
            let left_right = c0 == -1 || c0 == di - 1;
            if top_bottom && left_right {
                continue;
            }
            if z_type && !top_bottom {
                z_plaq.push((r0, c0));
            } else if !z_type && !left_right {
                x_plaq.push((r0, c0));
            }
        }
    }

    let data_id = |r: i32, c: i32| -> Option<usize> {
        (0..di).contains(&r).then_some(())?;
        (0..di).contains(&c).then_some(())?;
        Some((r * di + c) as usize)
    };

    let mut schedule: [Vec<Gate>; 4] = Default::default();
    let mut supports = Vec::new();
    let mut steps = Vec::new();
    for (measure_z, plaqs) in [(true, &z_plaq), (false, &x_plaq)] {
        for &(r0, c0) in plaqs.iter() {
            let id = qubits.len();
            let role = if measure_z { Role::MeasureZ } else { Role::MeasureX };
            qubits.push(Qubit { role, row: 2 * r0 + 2, col: 2 * c0 + 2 });
            let order = if measure_z { Z_ORDER } else { X_ORDER };
            let mut support = Vec::new();
            let mut met = Vec::new();
            for (s, &(dr, dc)) in order.iter().enumerate() {
                if let Some(data) = data_id(r0 + dr, c0 + dc) {
                    schedule[s].push(Gate {
                        measure: id,
                        data,
                        variant: GateVariant::for_step(measure_z, s + 1),
                    });
                    support.push(data);
                    met.push((data, s + 1));
                }
            }
            support.sort_unstable();
            supports.push(support);
            steps.push(met);
        }
    }

    let logical_z = (0..d).collect();
    let logical_x = (0..d).map(|r| r * d).collect();
    Ok(SurfaceLayout { distance: d, qubits, schedule, logical_z, logical_x, supports, steps })
}

impl SurfaceLayout {
    pub fn num_data(&self) -> usize {
        self.distance * self.distance
    }

    pub fn num_measure_z(&self) -> usize {
        (self.distance * self.distance - 1) / 2
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn measure_z(&self) -> std::ops::Range<usize> {
        let n = self.num_data();
        n..n + self.num_measure_z()
    }

    pub fn measure_x(&self) -> std::ops::Range<usize> {
        let start = self.num_data() + self.num_measure_z();
        start..self.qubits.len()
    }

    pub fn measures(&self) -> std::ops::Range<usize> {
        self.num_data()..self.qubits.len()
    }

    pub fn role(&self, q: usize) -> Role {
        self.qubits[q].role
    }

    /// Sorted data support of a measure qubit.
    pub fn support(&self, measure: usize) -> &[usize] {
        &self.supports[measure - self.num_data()]
    }

    /// `(data, step)` pairs in schedule order for a measure qubit.
    pub fn coupling_steps(&self, measure: usize) -> &[(usize, usize)] {
        &self.steps[measure - self.num_data()]
    }

    /// Measure qubits of the given kind whose support contains `data`.
    pub fn checks_on(&self, data: usize, measure_z: bool) -> Vec<usize> {
        let range = if measure_z { self.measure_z() } else { self.measure_x() };
        range.filter(|&m| self.support(m).contains(&data)).collect()
    }

    /// Grid position of a data qubit.
    pub fn data_position(&self, data: usize) -> (usize, usize) {
        (data / self.distance, data % self.distance)
    }
}

/// Checks that Fourier by-products cancel between consecutive steps.
///
/// Wherever a qubit is coupled in both step `s` and step `s + 1`, the factor
/// left on it after step `s` and the factor expected before step `s + 1` must
/// compose to `±I`. A step in which the qubit idles absorbs a lone factor.
pub fn fourier_byproduct_check(layout: &SurfaceLayout) -> bool {
    let n = layout.num_qubits();
    // (pre, post) quarter turns per qubit per step; None when idle.
    let mut turns: Vec<[Option<(i32, i32)>; 4]> = vec![[None; 4]; n];
    for (s, gates) in layout.schedule.iter().enumerate() {
        for g in gates {
            let (early, late) = g.variant.byproduct.turns();
            let m_first = layout.qubits[g.measure].col < layout.qubits[g.data].col;
            let (fm, fd) = if m_first { (early, late) } else { (late, early) };
            for (q, f) in [(g.measure, fm), (g.data, fd)] {
                if turns[q][s].is_some() {
                    return false;
                }
                let slot = if g.variant.byproduct.is_after() { (0, f) } else { (f, 0) };
                turns[q][s] = Some(slot);
            }
        }
    }
    turns.iter().all(|t| {
        (0..3).all(|s| match (t[s], t[s + 1]) {
            (Some((_, post)), Some((pre, _))) => (post + pre).rem_euclid(2) == 0,
            _ => true,
        })
    })
}
