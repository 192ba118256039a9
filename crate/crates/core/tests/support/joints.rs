//! Method-of-joints statics for pin-jointed plane trusses.
//!
//! Knows nothing about stiffness: it writes the two force-balance equations
//! of every joint with the bar forces and support reactions as unknowns and
//! solves the square system directly. Only valid for statically determinate
//! trusses.

#![allow(dead_code)]

#[derive(Debug, Clone)]
pub struct Joint {
    pub x: f64,
    pub y: f64,
    pub pinned: bool,
    pub load: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct Frame {
    pub name: &'static str,
    pub joints: Vec<Joint>,
    pub bars: Vec<(usize, usize)>,
}

fn free(x: f64, y: f64) -> Joint {
    Joint { x, y, pinned: false, load: (0.0, 0.0) }
}

fn pin(x: f64, y: f64) -> Joint {
    Joint { x, y, pinned: true, load: (0.0, 0.0) }
}

fn loaded(x: f64, y: f64, fx: f64, fy: f64) -> Joint {
    Joint { x, y, pinned: false, load: (fx, fy) }
}

impl Frame {
    pub fn unknowns(&self) -> usize {
        self.bars.len() + 2 * self.joints.iter().filter(|j| j.pinned).count()
    }

    pub fn is_determinate(&self) -> bool {
        self.unknowns() == 2 * self.joints.len()
    }
}

/// Bar forces, positive in tension. `None` if the system is not square or is
/// singular (a mechanism).
pub fn bar_forces(frame: &Frame) -> Option<Vec<f64>> {
    let n = 2 * frame.joints.len();
    if frame.unknowns() != n {
        return None;
    }
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (k, &(i, j)) in frame.bars.iter().enumerate() {
        let (p, q) = (&frame.joints[i], &frame.joints[j]);
        let len = (q.x - p.x).hypot(q.y - p.y);
        let (c, s) = ((q.x - p.x) / len, (q.y - p.y) / len);
        a[2 * i][k] += c;
        a[2 * i + 1][k] += s;
        a[2 * j][k] -= c;
        a[2 * j + 1][k] -= s;
    }
    let mut col = frame.bars.len();
    for (i, joint) in frame.joints.iter().enumerate() {
        if joint.pinned {
            a[2 * i][col] = 1.0;
            a[2 * i + 1][col + 1] = 1.0;
            col += 2;
        }
        b[2 * i] = -joint.load.0;
        b[2 * i + 1] = -joint.load.1;
    }
    let x = gauss(a, b)?;
    Some(x[..frame.bars.len()].to_vec())
}

fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-12 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Determinate fixtures with their hand-checked shapes.
pub fn fixtures() -> Vec<Frame> {
    vec![
        Frame {
            name: "two-bar",
            joints: vec![pin(0.0, 0.0), pin(2.0, 0.0), loaded(1.0, 1.0, 0.0, -1000.0)],
            bars: vec![(0, 2), (1, 2)],
        },
        Frame {
            name: "asymmetric two-bar",
            joints: vec![pin(0.0, 0.0), pin(3.0, 0.0), loaded(1.0, 2.0, 500.0, -2000.0)],
            bars: vec![(0, 2), (1, 2)],
        },
        Frame {
            name: "four-node",
            joints: vec![pin(0.0, 0.0), pin(4.0, 0.0), free(1.0, 2.0), loaded(3.0, 2.0, 0.0, -1500.0)],
            bars: vec![(0, 2), (2, 3), (3, 1), (0, 3)],
        },
        Frame {
            name: "warren without one chord panel",
            joints: vec![
                pin(0.0, 0.0),
                loaded(2.0, 0.0, 0.0, -10_000.0),
                loaded(4.0, 0.0, 0.0, -10_000.0),
                pin(6.0, 0.0),
                free(1.0, 1.5),
                free(3.0, 1.5),
                free(5.0, 1.5),
            ],
            bars: vec![(0, 1), (1, 2), (4, 5), (5, 6), (0, 4), (4, 1), (1, 5), (5, 2), (2, 6), (6, 3)],
        },
        Frame {
            name: "cantilever",
            joints: vec![pin(0.0, 0.0), pin(0.0, 2.0), free(2.0, 0.0), free(2.0, 2.0), loaded(4.0, 1.0, 0.0, -3000.0)],
            bars: vec![(0, 2), (1, 3), (1, 2), (2, 3), (2, 4), (3, 4)],
        },
        Frame {
            name: "skewed triangle pair",
            joints: vec![pin(0.0, 0.0), pin(5.0, 0.0), loaded(2.0, 0.0, 0.0, -4000.0), free(3.5, 2.5)],
            bars: vec![(0, 2), (2, 3), (0, 3), (3, 1)],
        },
    ]
}
