/// One classical fourth-order Runge–Kutta step of `dy/dt = f(t, y)`.
pub fn rk4_step<const D: usize, E, F>(f: &mut F, t: f64, y: [f64; D], dt: f64) -> Result<[f64; D], E>
where
    F: FnMut(f64, [f64; D]) -> Result<[f64; D], E>,
{
    let axpy = |a: &[f64; D], k: &[f64; D], s: f64| -> [f64; D] {
        let mut out = *a;
        for i in 0..D {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * dt, axpy(&y, &k1, 0.5 * dt))?;
    let k3 = f(t + 0.5 * dt, axpy(&y, &k2, 0.5 * dt))?;
    let k4 = f(t + dt, axpy(&y, &k3, dt))?;
    let mut out = y;
    for i in 0..D {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn exponential_growth() {
        let mut f = |_t: f64, y: [f64; 1]| Ok::<_, Infallible>(y);
        let mut y = [1.0];
        for k in 0..10 {
            y = rk4_step(&mut f, 0.1 * k as f64, y, 0.1).unwrap();
        }
        // RK4 on y' = y multiplies by the degree-4 Taylor polynomial of e^h.
        let h: f64 = 0.1;
        let amp = 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        assert!((y[0] - amp.powi(10)).abs() < 1e-14);
        assert!((y[0] - std::f64::consts::E).abs() < 2.1e-6);
        let mut y = [1.0];
        for k in 0..100 {
            y = rk4_step(&mut f, 0.01 * k as f64, y, 0.01).unwrap();
        }
        assert!((y[0] - std::f64::consts::E).abs() < 1e-7);
    }

    #[test]
    fn zero_field_leaves_state_unchanged() {
        let mut f = |_t: f64, _y: [f64; 3]| Ok::<_, Infallible>([0.0; 3]);
        let y = rk4_step(&mut f, 0.0, [1.0, -2.0, 3.0], 0.5).unwrap();
        assert_eq!(y, [1.0, -2.0, 3.0]);
    }

    #[test]
    fn rotation_returns_after_one_period() {
        let mut f = |_t: f64, y: [f64; 2]| Ok::<_, Infallible>([-y[1], y[0]]);
        let n = (2.0 * std::f64::consts::PI / 1e-3).round() as usize;
        let dt = 2.0 * std::f64::consts::PI / n as f64;
        let mut y = [1.0, 0.0];
        for k in 0..n {
            y = rk4_step(&mut f, k as f64 * dt, y, dt).unwrap();
        }
        assert!((y[0] - 1.0).abs() < 1e-8 && y[1].abs() < 1e-8);
    }
}
