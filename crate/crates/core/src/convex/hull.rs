// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

/// Vertices of the circumscribed polygon: the intersection of the support
/// lines at consecutive grid normals.
pub fn boundary_points(values: &[f64]) -> Vec<[f64; 2]> {
    let m = values.len();
    let delta = 2.0 * PI / m as f64;
    let sd = delta.sin();
    (0..m)
        .map(|j| {
            let t0 = delta * j as f64;
            let t1 = delta * (j + 1) as f64;
            let (s0, c0) = t0.sin_cos();
            let (s1, c1) = t1.sin_cos();
            let a = values[j];
            let b = values[(j + 1) % m];
            [(a * s1 - b * s0) / sd, (b * c0 - a * c1) / sd]
        })
        .collect()
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; counterclockwise, collinear points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Support values of a finite point set on an `m`-point grid.
pub fn support_of_points(points: &[[f64; 2]], m: usize) -> Vec<f64> {
    let delta = 2.0 * PI / m as f64;
    (0..m)
        .map(|j| {
            let (s, c) = (delta * j as f64).sin_cos();
            points
                .iter()
                .map(|p| p[0] * c + p[1] * s)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

fn line_intersection(a: (f64, f64), b: (f64, f64)) -> [f64; 2] {
    let (ta, ha) = a;
    let (tb, hb) = b;
    let (sa, ca) = ta.sin_cos();
    let (sb, cb) = tb.sin_cos();
    let det = (tb - ta).sin();
    [(ha * sb - hb * sa) / det, (hb * ca - ha * cb) / det]
}

/// Support function of the Wulff shape `{x : ⟨x, p_j⟩ ≤ h_j for all j}`.
///
/// This is the largest grid support function below the samples; it leaves
/// valid support functions unchanged.
pub fn reconvexify(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let delta = 2.0 * PI / m as f64;
    let scale = values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let eps = 1e-12 * scale;
    let line = |i: usize| (delta * i as f64, values[i]);
    let outside = |x: [f64; 2], i: usize| {
        let (s, c) = (delta * i as f64).sin_cos();
        x[0] * c + x[1] * s > values[i] + eps
    };
    let mut dq: std::collections::VecDeque<usize> = std::collections::VecDeque::with_capacity(m);
    for i in 0..m {
        while dq.len() >= 2 && outside(line_intersection(line(dq[dq.len() - 2]), line(dq[dq.len() - 1])), i) {
            dq.pop_back();
        }
        while dq.len() >= 2 && outside(line_intersection(line(dq[0]), line(dq[1])), i) {
            dq.pop_front();
        }
        dq.push_back(i);
    }
    while dq.len() >= 3 && outside(line_intersection(line(dq[dq.len() - 2]), line(dq[dq.len() - 1])), dq[0]) {
        dq.pop_back();
    }
    while dq.len() >= 3 && outside(line_intersection(line(dq[0]), line(dq[1])), dq[dq.len() - 1]) {
        dq.pop_front();
    }
    let active: Vec<usize> = dq.into_iter().collect();
    if active.len() < 2 {
        return values.to_vec();
    }
    let mut out = values.to_vec();
    for k in 0..active.len() {
        let a = active[k];
        let b = active[(k + 1) % active.len()];
        let (ta, tb) = (delta * a as f64, delta * (b + if b <= a { m } else { 0 }) as f64);
        let v = line_intersection((ta, values[a]), (tb, values[b]));
        let mut j = (a + 1) % m;
        while j != b {
            let (s, c) = (delta * j as f64).sin_cos();
            out[j] = v[0] * c + v[1] * s;
            j = (j + 1) % m;
        }
    }
    out
}
