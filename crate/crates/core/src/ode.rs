//! Classical fourth-order Runge-Kutta for scalar second-order linear ODEs.

use crate::grid::Sample;

/// Sample at which a trajectory exceeded the instability guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blowup {
    pub step: usize,
    pub magnitude: f64,
    pub limit: f64,
}

/// Integrates `y'' = accel(y, y')` over `steps` uniform steps of size `h`
/// (negative `h` steps backward). Returns the `steps + 1` positions and
/// velocities, starting with the initial state.
///
/// Aborts once `|y|` exceeds `limit`; pass `f64::INFINITY` to disable.
pub fn rk4_second_order<T: Sample>(
    accel: impl Fn(T, T) -> T,
    y0: T,
    v0: T,
    h: f64,
    steps: usize,
    limit: f64,
) -> Result<(Vec<T>, Vec<T>), Blowup> {
    let mut ys = Vec::with_capacity(steps + 1);
    let mut vs = Vec::with_capacity(steps + 1);
    let (mut y, mut v) = (y0, v0);
    ys.push(y);
    vs.push(v);
    let half = 0.5 * h;
    for step in 1..=steps {
        let k1y = v;
        let k1v = accel(y, v);
        let k2y = v + k1v * half;
        let k2v = accel(y + k1y * half, v + k1v * half);
        let k3y = v + k2v * half;
        let k3v = accel(y + k2y * half, v + k2v * half);
        let k4y = v + k3v * h;
        let k4v = accel(y + k3y * h, v + k3v * h);
        y = y + (k1y + k2y * 2.0 + k3y * 2.0 + k4y) * (h / 6.0);
        v = v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        let magnitude = y.modulus();
        if magnitude.is_nan() || magnitude > limit {
            return Err(Blowup { step, magnitude, limit });
        }
        ys.push(y);
        vs.push(v);
    }
    Ok((ys, vs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_fourth_order() {
        // y'' = −y, y(0) = 1, y'(0) = 0 → cos(1) at t = 1
        let err = |steps: usize| {
            let h = 1.0 / steps as f64;
            let (ys, _) = rk4_second_order(|y: f64, _| -y, 1.0, 0.0, h, steps, f64::INFINITY).unwrap();
            (ys[steps] - 1.0_f64.cos()).abs()
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }

    #[test]
    fn guard_trips() {
        let out = rk4_second_order(|y: f64, _| 100.0 * y, 1.0, 0.0, 0.01, 10_000, 1e6);
        let blowup = out.unwrap_err();
        assert!(blowup.magnitude > 1e6);
        assert!(blowup.step > 0);
    }
}
