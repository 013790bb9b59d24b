use super::cost::derivatives;
use super::{LiftedCurve, PlanarCurve};
use crate::{Error, Period, Result};

/// RK4 integration of `(ẋ, ẏ, θ̇) = u₁(t)(cosθ, sinθ, 0) + u₂(t)(0, 0, 1)`
/// from `q0` over `[0, t_end]`. θ is integrated unreduced and wrapped into
/// `[0, period)` on output.
pub fn integrate_control_system(
    u1: impl Fn(f64) -> f64,
    u2: impl Fn(f64) -> f64,
    q0: [f64; 3],
    t_end: f64,
    dt: f64,
    period: Period,
) -> Result<LiftedCurve> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::invalid(format!("final time must be positive, got {t_end}")));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(2.0) as usize;
    let h = t_end / steps as f64;
    let field = |t: f64, q: [f64; 3]| {
        let a = u1(t);
        [a * q[2].cos(), a * q[2].sin(), u2(t)]
    };
    let mut q = q0;
    let mut out = LiftedCurve {
        t: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        y: Vec::with_capacity(steps + 1),
        theta: Vec::with_capacity(steps + 1),
        period,
        velocity: Vec::with_capacity(steps + 1),
    };
    let axpy = |q: [f64; 3], k: [f64; 3], s: f64| [q[0] + s * k[0], q[1] + s * k[1], q[2] + s * k[2]];
    for i in 0..=steps {
        let t = i as f64 * h;
        out.t.push(t);
        out.x.push(q[0]);
        out.y.push(q[1]);
        out.theta.push(period.wrap(q[2]));
        out.velocity.push(field(t, q));
        if i == steps {
            break;
        }
        let k1 = field(t, q);
        let k2 = field(t + 0.5 * h, axpy(q, k1, 0.5 * h));
        let k3 = field(t + 0.5 * h, axpy(q, k2, 0.5 * h));
        let k4 = field(t + h, axpy(q, k3, h));
        for c in 0..3 {
            q[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    Ok(out)
}

/// Lift by the tangent direction `atan2(ẏ, ẋ)` mod `period`. Isolated
/// nodes with vanishing velocity take the direction interpolated from
/// their neighbours.
pub fn lift_curve(c: &PlanarCurve, period: Period) -> Result<LiftedCurve> {
    let d = derivatives(c);
    let n = c.len();
    let speed: Vec<f64> = (0..n).map(|i| d.speed(i)).collect();
    let vmax = speed.iter().copied().fold(0.0, f64::max);
    let stalled: Vec<bool> = speed.iter().map(|&v| v <= 1e-6 * vmax).collect();
    if vmax == 0.0 {
        return Err(Error::invalid("curve has no nonzero velocity"));
    }
    for i in 0..n {
        let isolated = (i == 0 || !stalled[i - 1]) && (i + 1 == n || !stalled[i + 1]);
        if stalled[i] && (!isolated || i == 0 || i + 1 == n) {
            return Err(Error::invalid(format!(
                "velocity vanishes on a non-isolated set near node {i}"
            )));
        }
    }
    let raw: Vec<f64> = (0..n).map(|i| d.dy[i].atan2(d.dx[i])).collect();
    let mut unwrapped = vec![0.0; n];
    let mut last = None;
    for i in 0..n {
        if stalled[i] {
            continue;
        }
        unwrapped[i] = match last {
            None => period.wrap(raw[i]),
            Some(j) => {
                let prev: f64 = unwrapped[j];
                let step = period.signed_diff(raw[i], prev);
                if step.abs() >= 0.45 * period.value() {
                    return Err(Error::invalid(format!(
                        "direction jumps by {step:.3} rad at node {i}: the lift is discontinuous"
                    )));
                }
                prev + step
            }
        };
        last = Some(i);
    }
    for i in (0..n).filter(|&i| stalled[i]) {
        let (a, b) = (i - 1, i + 1);
        let w = (c.t()[i] - c.t()[a]) / (c.t()[b] - c.t()[a]);
        unwrapped[i] = unwrapped[a] + w * (unwrapped[b] - unwrapped[a]);
    }
    let velocity = (0..n)
        .map(|i| {
            let dtheta = if i == 0 {
                (unwrapped[1] - unwrapped[0]) / (c.t()[1] - c.t()[0])
            } else if i + 1 == n {
                (unwrapped[i] - unwrapped[i - 1]) / (c.t()[i] - c.t()[i - 1])
            } else {
                (unwrapped[i + 1] - unwrapped[i - 1]) / (c.t()[i + 1] - c.t()[i - 1])
            };
            [d.dx[i], d.dy[i], dtheta]
        })
        .collect();
    Ok(LiftedCurve {
        t: c.t().to_vec(),
        x: c.x().to_vec(),
        y: c.y().to_vec(),
        theta: unwrapped.iter().map(|&v| period.wrap(v)).collect(),
        period,
        velocity,
    })
}

/// Nodes where the planar velocity passes through zero and reverses while
/// the angular velocity stays away from zero.
pub fn detect_cusps(c: &LiftedCurve) -> Vec<usize> {
    let n = c.len();
    if n < 3 {
        return Vec::new();
    }
    let speed: Vec<f64> = c.velocity.iter().map(|v| v[0].hypot(v[1])).collect();
    let vmax = speed.iter().copied().fold(0.0, f64::max);
    let wmax = c.velocity.iter().map(|v| v[2].abs()).fold(0.0, f64::max);
    let mut cusps = Vec::new();
    for i in 1..n - 1 {
        if !(speed[i] < speed[i - 1] && speed[i] <= speed[i + 1]) {
            continue;
        }
        let (a, b) = (c.velocity[i - 1], c.velocity[i + 1]);
        let jump = (b[0] - a[0]).hypot(b[1] - a[1]);
        if speed[i] > (1e-6 * vmax).max(jump) {
            continue;
        }
        let cos = (a[0] * b[0] + a[1] * b[1]) / (speed[i - 1] * speed[i + 1]);
        if cos.is_nan() || cos >= -0.9 {
            continue;
        }
        if c.velocity[i][2].abs() <= 1e-6 * wmax.max(1.0) {
            continue;
        }
        cusps.push(i);
    }
    cusps
}
