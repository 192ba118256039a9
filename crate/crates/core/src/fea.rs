//! Linear static truss analysis by the direct stiffness method.
//!
//! Every node carries two translational DOF. Support nodes are pinned in
//! both directions. A singular reduced stiffness matrix (mechanism, floating
//! node, missing load path) is reported as [`Unsolvable`] and evaluates as an
//! infeasible design rather than an error.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::{MemberId, NodeKind, Point2D, Scenario, TrussDesign};

/// FOS reported for a solvable structure in which no member carries load.
pub const ZERO_DEMAND_FOS: f64 = 1e9;

/// Members below this absolute axial force cannot govern the FOS.
pub const ZERO_FORCE_TOL: f64 = 1e-9;

const PIVOT_RTOL: f64 = 1e-12;
const NULLITY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unsolvable;

/// One axial bar of a stiffness model.
#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub a: usize,
    pub b: usize,
    pub axial_stiffness: f64,
}

/// A pin-jointed bar model with explicit per-DOF restraints.
///
/// DOF `2i` is x and `2i + 1` is y of node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessModel {
    pub coords: Vec<Point2D>,
    pub bars: Vec<Bar>,
    pub restrained: Vec<bool>,
    pub loads: Vec<f64>,
}

impl StiffnessModel {
    pub fn from_design(design: &TrussDesign, scenario: &Scenario) -> Self {
        let coords: Vec<Point2D> = design.nodes.iter().map(|n| n.pos).collect();
        let mut restrained = Vec::with_capacity(2 * coords.len());
        let mut loads = Vec::with_capacity(2 * coords.len());
        for n in &design.nodes {
            let pinned = n.kind == NodeKind::Support;
            restrained.extend([pinned, pinned]);
            loads.extend([n.applied_load.x, n.applied_load.y]);
        }
        let bars = design
            .members
            .iter()
            .filter_map(|m| {
                let a = design.node_index(m.node_a)?;
                let b = design.node_index(m.node_b)?;
                let ea = scenario.material.elastic_modulus * scenario.size_table.area(m.size_index);
                Some(Bar { a, b, axial_stiffness: ea })
            })
            .collect();
        Self { coords, bars, restrained, loads }
    }

    pub fn dof_count(&self) -> usize {
        2 * self.coords.len()
    }

    /// Length and unit vector a -> b.
    pub fn bar_geometry(&self, bar: &Bar) -> (f64, f64, f64) {
        let (pa, pb) = (self.coords[bar.a], self.coords[bar.b]);
        let (dx, dy) = (pb.x - pa.x, pb.y - pa.y);
        let len = dx.hypot(dy);
        (len, dx / len, dy / len)
    }

    /// Full (unreduced) global stiffness matrix, row-major.
    pub fn global_stiffness(&self) -> Vec<f64> {
        let n = self.dof_count();
        let mut k = vec![0.0; n * n];
        for bar in &self.bars {
            let (len, c, s) = self.bar_geometry(bar);
            let kk = bar.axial_stiffness / len;
            let local = [c * c, c * s, c * s, s * s];
            let dofs = [2 * bar.a, 2 * bar.a + 1, 2 * bar.b, 2 * bar.b + 1];
            for (i, &di) in dofs.iter().enumerate() {
                for (j, &dj) in dofs.iter().enumerate() {
                    let sign = if (i < 2) == (j < 2) { 1.0 } else { -1.0 };
                    k[di * n + dj] += sign * kk * local[(i % 2) * 2 + j % 2];
                }
            }
        }
        k
    }

    /// Dimension of the null space of the reduced stiffness matrix: the
    /// number of independent mechanism modes, zero when solvable.
    pub fn nullity(&self) -> usize {
        let n = self.dof_count();
        let free: Vec<usize> = (0..n).filter(|&i| !self.restrained[i]).collect();
        let m = free.len();
        if m == 0 {
            return 0;
        }
        let k = self.global_stiffness();
        let mut a: Vec<f64> = Vec::with_capacity(m * m);
        for &r in &free {
            a.extend(free.iter().map(|&c| k[r * n + c]));
        }
        let scale = (0..m).map(|i| a[i * m + i].abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return m;
        }
        let tol = NULLITY_RTOL * scale;
        let mut rank = 0;
        // elimination with full pivoting
        for col in 0..m {
            let mut best = (col, col, 0.0);
            for r in col..m {
                for c in col..m {
                    let v = a[r * m + c].abs();
                    if v > best.2 {
                        best = (r, c, v);
                    }
                }
            }
            if best.2 <= tol {
                break;
            }
            let (pr, pc, _) = best;
            for j in 0..m {
                a.swap(pr * m + j, col * m + j);
            }
            for i in 0..m {
                a.swap(i * m + pc, i * m + col);
            }
            let p = a[col * m + col];
            for r in col + 1..m {
                let f = a[r * m + col] / p;
                if f != 0.0 {
                    for j in col..m {
                        a[r * m + j] -= f * a[col * m + j];
                    }
                }
            }
            rank += 1;
        }
        m - rank
    }

    /// Solves `K u = f` on the unrestrained DOF. Restrained DOF get zero.
    pub fn solve(&self) -> Result<Vec<f64>, Unsolvable> {
        let n = self.dof_count();
        let free: Vec<usize> = (0..n).filter(|&i| !self.restrained[i]).collect();
        let mut u = vec![0.0; n];
        if free.is_empty() {
            return Ok(u);
        }
        let k = self.global_stiffness();
        let m = free.len();
        let mut a: Vec<f64> = Vec::with_capacity(m * m);
        for &r in &free {
            a.extend(free.iter().map(|&c| k[r * n + c]));
        }
        let mut rhs: Vec<f64> = free.iter().map(|&r| self.loads[r]).collect();
        let scale = (0..m).map(|i| a[i * m + i].abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Unsolvable);
        }
        let x = solve_dense(&mut a, &mut rhs, m, PIVOT_RTOL * scale)?;
        for (i, &dof) in free.iter().enumerate() {
            u[dof] = x[i];
        }
        Ok(u)
    }

    /// Axial bar forces, positive in tension.
    pub fn axial_forces(&self, u: &[f64]) -> Vec<f64> {
        self.bars
            .iter()
            .map(|bar| {
                let (len, c, s) = self.bar_geometry(bar);
                let du = u[2 * bar.b] - u[2 * bar.a];
                let dv = u[2 * bar.b + 1] - u[2 * bar.a + 1];
                bar.axial_stiffness / len * (du * c + dv * s)
            })
            .collect()
    }

    /// Net force (bar end forces + applied load) at every DOF.
    pub fn nodal_residuals(&self, forces: &[f64]) -> Vec<f64> {
        let mut r = self.loads.clone();
        for (bar, &f) in self.bars.iter().zip(forces) {
            let (_, c, s) = self.bar_geometry(bar);
            // tension pulls node a toward b and node b toward a
            r[2 * bar.a] += f * c;
            r[2 * bar.a + 1] += f * s;
            r[2 * bar.b] -= f * c;
            r[2 * bar.b + 1] -= f * s;
        }
        r
    }
}

/// Gaussian elimination with partial pivoting; consumes `a` and `b`.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize, pivot_tol: f64) -> Result<Vec<f64>, Unsolvable> {
    for col in 0..n {
        let (piv, max) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1).then(y.0.cmp(&x.0)))
            .expect("non-empty range");
        if !(max >= pivot_tol) {
            return Err(Unsolvable);
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            b.swap(piv, col);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= factor * a[col * n + j];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i * n + i];
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberForce {
    pub member_id: MemberId,
    /// Positive in tension.
    pub axial_force: f64,
    pub capacity: f64,
    pub utilization: f64,
}

/// Yield capacity in tension, min(yield, Euler) in compression.
pub fn member_capacity(size_index: u8, length: f64, axial_force: f64, scenario: &Scenario) -> f64 {
    let area = scenario.size_table.area(size_index);
    let yield_cap = scenario.material.yield_stress * area;
    if axial_force >= 0.0 {
        yield_cap
    } else {
        let euler = PI * PI * scenario.material.elastic_modulus * scenario.size_table.second_moment(size_index)
            / (length * length);
        yield_cap.min(euler)
    }
}

/// Nodal displacements for `design`, DOF ordered as `design.nodes`. A design
/// without members has no load path and is unsolvable.
pub fn assemble_and_solve(design: &TrussDesign, scenario: &Scenario) -> Result<Vec<f64>, Unsolvable> {
    if design.members.is_empty() {
        return Err(Unsolvable);
    }
    StiffnessModel::from_design(design, scenario).solve()
}

pub fn member_forces(design: &TrussDesign, scenario: &Scenario, displacements: &[f64]) -> Vec<MemberForce> {
    let model = StiffnessModel::from_design(design, scenario);
    let axial = model.axial_forces(displacements);
    design
        .members
        .iter()
        .zip(model.bars.iter().zip(axial))
        .map(|(m, (bar, f))| {
            let (len, _, _) = model.bar_geometry(bar);
            let capacity = member_capacity(m.size_index, len, f, scenario);
            MemberForce { member_id: m.id, axial_force: f, capacity, utilization: f.abs() / capacity }
        })
        .collect()
}

/// Minimum capacity/demand ratio over loaded members.
pub fn fos_from_forces(forces: &[MemberForce]) -> f64 {
    forces
        .iter()
        .filter(|f| f.axial_force.abs() >= ZERO_FORCE_TOL)
        .map(|f| f.capacity / f.axial_force.abs())
        .fold(ZERO_DEMAND_FOS, f64::min)
}

pub fn factor_of_safety(design: &TrussDesign, scenario: &Scenario) -> f64 {
    analyze(design, scenario).eval.fos
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub fos: f64,
    pub mass: f64,
    pub swr: Option<f64>,
    pub feasible: bool,
    pub solvable: bool,
}

impl EvaluationResult {
    /// SWR when it counts toward refined (feasible-only) metrics.
    pub fn rswr(&self) -> Option<f64> {
        if self.feasible {
            self.swr
        } else {
            None
        }
    }
}

/// Full analysis output: evaluation plus per-member forces when solvable.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub eval: EvaluationResult,
    pub forces: Vec<MemberForce>,
}

pub fn analyze(design: &TrussDesign, scenario: &Scenario) -> Analysis {
    let mass = design.total_mass(scenario);
    match assemble_and_solve(design, scenario) {
        Err(Unsolvable) => Analysis {
            eval: EvaluationResult { fos: 0.0, mass, swr: None, feasible: false, solvable: false },
            forces: Vec::new(),
        },
        Ok(u) => {
            let forces = member_forces(design, scenario, &u);
            let fos = fos_from_forces(&forces);
            let swr = (mass > 0.0).then(|| fos / mass);
            let feasible = fos >= scenario.fos_threshold;
            Analysis { eval: EvaluationResult { fos, mass, swr, feasible, solvable: true }, forces }
        }
    }
}

pub fn evaluate(design: &TrussDesign, scenario: &Scenario) -> EvaluationResult {
    analyze(design, scenario).eval
}

/// Total order on evaluations; `Greater` means `a` is the better design.
///
/// Feasible beats infeasible, then higher SWR among feasible, higher FOS
/// among infeasible.
pub fn objective_rank(a: &EvaluationResult, b: &EvaluationResult) -> Ordering {
    match (a.feasible, b.feasible) {
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (true, true) => a.swr.unwrap_or(0.0).total_cmp(&b.swr.unwrap_or(0.0)),
        (false, false) => a.fos.total_cmp(&b.fos),
    }
}
