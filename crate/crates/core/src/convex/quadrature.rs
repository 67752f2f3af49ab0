// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Discretization of the curvature measure `(h + h″) dθ` on the uniform grid.
///
/// Area, mixed area and perimeter are all bilinear or linear forms in these
/// weights, so a rule fully determines the planar quadrature.
pub trait AreaRule: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Weight of the curvature measure attached to each grid normal.
    fn curvature(&self, values: &[f64]) -> Vec<f64>;
}

/// Treats the samples as the circumscribed polygon with normals on the grid.
///
/// Weights are the polygon edge lengths, so the rule is exact for such
/// polygons (squares, rectangles, segments) and converges as `O(M⁻²)` for
/// curved bodies.
#[derive(Clone, Copy, Debug, Default)]
pub struct PolygonRule;

/// Trapezoid rule with `h″` from the discrete Fourier transform.
#[derive(Clone, Copy, Debug, Default)]
pub struct SpectralRule;

pub static POLYGON_RULE: PolygonRule = PolygonRule;
pub static SPECTRAL_RULE: SpectralRule = SpectralRule;

impl AreaRule for PolygonRule {
    fn name(&self) -> &'static str {
        "polygon"
    }

    fn curvature(&self, values: &[f64]) -> Vec<f64> {
        let m = values.len();
        let delta = 2.0 * PI / m as f64;
        let (s, c) = delta.sin_cos();
        (0..m)
            .map(|j| {
                let prev = values[(j + m - 1) % m];
                let next = values[(j + 1) % m];
                (prev + next - 2.0 * c * values[j]) / s
            })
            .collect()
    }
}

impl AreaRule for SpectralRule {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn curvature(&self, values: &[f64]) -> Vec<f64> {
        let m = values.len();
        let delta = 2.0 * PI / m as f64;
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        forward.process(&mut buf);
        for (j, z) in buf.iter_mut().enumerate() {
            let k = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
            *z *= 1.0 - k * k;
        }
        inverse.process(&mut buf);
        buf.iter().map(|z| z.re / m as f64 * delta).collect()
    }
}

/// `½ Σ a_j · c(b)_j`, one ordering of the mixed-area quadrature.
pub fn half_pairing(rule: &dyn AreaRule, a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(rule.curvature(b)).map(|(x, y)| x * y).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(m: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..m).map(|j| f(2.0 * PI * j as f64 / m as f64)).collect()
    }

    #[test]
    fn spectral_curvature_of_band_limited_samples() {
        let h = grid(64, |t| 2.0 + 0.1 * (3.0 * t).cos() + 0.5 * t.sin());
        let c = SPECTRAL_RULE.curvature(&h);
        let delta = 2.0 * PI / 64.0;
        for (j, cj) in c.iter().enumerate() {
            let t = 2.0 * PI * j as f64 / 64.0;
            let exact = 2.0 - 0.8 * (3.0 * t).cos();
            assert_relative_eq!(*cj, exact * delta, epsilon = 1e-13);
        }
    }

    #[test]
    fn polygon_weights_are_edge_lengths_of_square() {
        // unit square centred at the origin, normals every 22.5 degrees
        let h = grid(16, |t| 0.5 * (t.cos().abs() + t.sin().abs()));
        let c = POLYGON_RULE.curvature(&h);
        for (j, cj) in c.iter().enumerate() {
            let expected = if j % 4 == 0 { 1.0 } else { 0.0 };
            assert!((cj - expected).abs() < 1e-13, "j={j} c={cj}");
        }
    }

    #[test]
    fn rules_agree_on_smooth_bodies() {
        let h = grid(512, |t| 1.5 + 0.2 * (2.0 * t).cos() + 0.3 * t.cos());
        let a = half_pairing(&POLYGON_RULE, &h, &h);
        let b = half_pairing(&SPECTRAL_RULE, &h, &h);
        assert_relative_eq!(a, b, max_relative = 1e-4);
    }
}
