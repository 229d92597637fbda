//! Incident fields driving the interface load.

use std::f64::consts::PI;

use crate::geometry::Point;

/// An incident potential φⁱ(x, t) with its time derivative and gradient.
pub trait IncidentField: Send + Sync {
    fn value(&self, x: Point, t: f64) -> f64;
    fn time_derivative(&self, x: Point, t: f64) -> f64;
    fn gradient(&self, x: Point, t: f64) -> [f64; 2];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseMode {
    /// φⁱ = g(t), no spatial dependence.
    AsWritten,
    /// φⁱ = g(t - r/c) / √max(r, ε), r = |x - x_s|.
    Cylindrical,
}

pub const PULSE_RADIUS_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum IncidentWave {
    /// cos(x·d) cos(t) with unit d.
    Plane { direction: [f64; 2] },
    Pulse { source: Point, mode: PulseMode, c: f64 },
    Zero,
}

#[derive(Debug, thiserror::Error)]
#[error("plane wave direction must be nonzero and finite")]
pub struct ZeroDirection;

impl IncidentWave {
    pub fn plane(d: [f64; 2]) -> Result<Self, ZeroDirection> {
        let n = d[0].hypot(d[1]);
        if !(n > 0.0) || !n.is_finite() {
            return Err(ZeroDirection);
        }
        Ok(IncidentWave::Plane { direction: [d[0] / n, d[1] / n] })
    }

    pub fn pulse(source: Point, mode: PulseMode, c: f64) -> Self {
        IncidentWave::Pulse { source, mode, c }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, IncidentWave::Zero)
    }
}

/// sin(2πt) on [0, 1/2], zero elsewhere, and its derivative.
fn window(t: f64) -> (f64, f64) {
    if (0.0..=0.5).contains(&t) {
        ((2.0 * PI * t).sin(), 2.0 * PI * (2.0 * PI * t).cos())
    } else {
        (0.0, 0.0)
    }
}

impl IncidentWave {
    /// Cylindrical pulse: value, time derivative and gradient.
    fn cylindrical(source: Point, c: f64, x: Point, t: f64) -> (f64, f64, [f64; 2]) {
        let d = [x[0] - source[0], x[1] - source[1]];
        let r = d[0].hypot(d[1]);
        let (g, dg) = window(t - r / c);
        if r < PULSE_RADIUS_FLOOR {
            let s = PULSE_RADIUS_FLOOR.sqrt();
            return (g / s, dg / s, [0.0, 0.0]);
        }
        let s = r.sqrt();
        // ∂r [g(t - r/c) r^{-1/2}] = -g'/c r^{-1/2} - g r^{-3/2} / 2
        let dr = -dg / (c * s) - 0.5 * g / (r * s);
        (g / s, dg / s, [dr * d[0] / r, dr * d[1] / r])
    }
}

impl IncidentField for IncidentWave {
    fn value(&self, x: Point, t: f64) -> f64 {
        match *self {
            IncidentWave::Plane { direction: d } => (x[0] * d[0] + x[1] * d[1]).cos() * t.cos(),
            IncidentWave::Pulse { mode: PulseMode::AsWritten, .. } => window(t).0,
            IncidentWave::Pulse { source, c, .. } => Self::cylindrical(source, c, x, t).0,
            IncidentWave::Zero => 0.0,
        }
    }

    fn time_derivative(&self, x: Point, t: f64) -> f64 {
        match *self {
            IncidentWave::Plane { direction: d } => -(x[0] * d[0] + x[1] * d[1]).cos() * t.sin(),
            IncidentWave::Pulse { mode: PulseMode::AsWritten, .. } => window(t).1,
            IncidentWave::Pulse { source, c, .. } => Self::cylindrical(source, c, x, t).1,
            IncidentWave::Zero => 0.0,
        }
    }

    fn gradient(&self, x: Point, t: f64) -> [f64; 2] {
        match *self {
            IncidentWave::Plane { direction: d } => {
                let s = -(x[0] * d[0] + x[1] * d[1]).sin() * t.cos();
                [s * d[0], s * d[1]]
            }
            IncidentWave::Pulse { mode: PulseMode::AsWritten, .. } => [0.0, 0.0],
            IncidentWave::Pulse { source, c, .. } => Self::cylindrical(source, c, x, t).2,
            IncidentWave::Zero => [0.0, 0.0],
        }
    }
}
