//! Central finite differences with step `h = h0·(1 + |x|)`.

use crate::error::{QflowError, Result};

/// Default relative step for fourth-order first derivatives.
pub const H0_ORDER4: f64 = 1e-4;
/// Default relative step for second-order first derivatives.
pub const H0_ORDER2: f64 = 1e-5;
/// Default relative step for fourth-order second derivatives; larger than the
/// first-derivative step because rounding grows like `ε/h²`.
pub const H0_SECOND_ORDER4: f64 = 1e-3;
/// Default relative step for second-order second derivatives.
pub const H0_SECOND_ORDER2: f64 = 1e-4;
/// Default time step for derivatives in `t`.
pub const DT_DEFAULT: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Two,
    Four,
}

pub fn step(x: &[f64; 3], h0: f64) -> f64 {
    h0 * (1.0 + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
}

fn shifted(x: &[f64; 3], axis: usize, d: f64) -> [f64; 3] {
    let mut y = *x;
    y[axis] += d;
    y
}

fn stencil_err(e: QflowError, x: &[f64; 3]) -> QflowError {
    match e {
        QflowError::Node { .. } | QflowError::CoulombSingularity => QflowError::Stencil { x: *x },
        other => other,
    }
}

/// First derivative of a scalar function of one variable.
pub fn derivative<F>(g: F, t: f64, h: f64, order: Order) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(match order {
        Order::Two => (g(t + h)? - g(t - h)?) / (2.0 * h),
        Order::Four => {
            (-g(t + 2.0 * h)? + 8.0 * g(t + h)? - 8.0 * g(t - h)? + g(t - 2.0 * h)?) / (12.0 * h)
        }
    })
}

/// Second derivative of a scalar function of one variable.
pub fn second_derivative<F>(g: F, t: f64, h: f64, order: Order) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(match order {
        Order::Two => (g(t + h)? - 2.0 * g(t)? + g(t - h)?) / (h * h),
        Order::Four => {
            (-g(t + 2.0 * h)? + 16.0 * g(t + h)? - 30.0 * g(t)? + 16.0 * g(t - h)?
                - g(t - 2.0 * h)?)
                / (12.0 * h * h)
        }
    })
}

/// Gradient with an explicit step.
pub fn gradient_h<F>(f: &F, x: &[f64; 3], h: f64, order: Order) -> Result<[f64; 3]>
where
    F: Fn([f64; 3]) -> Result<f64>,
{
    let mut g = [0.0; 3];
    for (a, ga) in g.iter_mut().enumerate() {
        *ga = derivative(|d| f(shifted(x, a, d)), 0.0, h, order).map_err(|e| stencil_err(e, x))?;
    }
    Ok(g)
}

pub fn fd_gradient<F>(f: F, x: [f64; 3], order: Order) -> Result<[f64; 3]>
where
    F: Fn([f64; 3]) -> Result<f64>,
{
    let h0 = match order {
        Order::Two => H0_ORDER2,
        Order::Four => H0_ORDER4,
    };
    gradient_h(&f, &x, step(&x, h0), order)
}

pub fn divergence_h<F>(f: &F, x: &[f64; 3], h: f64, order: Order) -> Result<f64>
where
    F: Fn([f64; 3]) -> Result<[f64; 3]>,
{
    let mut div = 0.0;
    for a in 0..3 {
        div += derivative(|d| Ok(f(shifted(x, a, d))?[a]), 0.0, h, order)
            .map_err(|e| stencil_err(e, x))?;
    }
    Ok(div)
}

pub fn fd_divergence<F>(f: F, x: [f64; 3], order: Order) -> Result<f64>
where
    F: Fn([f64; 3]) -> Result<[f64; 3]>,
{
    let h0 = match order {
        Order::Two => H0_ORDER2,
        Order::Four => H0_ORDER4,
    };
    divergence_h(&f, &x, step(&x, h0), order)
}

pub fn laplacian_h<F>(f: &F, x: &[f64; 3], h: f64, order: Order) -> Result<f64>
where
    F: Fn([f64; 3]) -> Result<f64>,
{
    let mut lap = 0.0;
    for a in 0..3 {
        lap += second_derivative(|d| f(shifted(x, a, d)), 0.0, h, order)
            .map_err(|e| stencil_err(e, x))?;
    }
    Ok(lap)
}

pub fn fd_laplacian<F>(f: F, x: [f64; 3], order: Order) -> Result<f64>
where
    F: Fn([f64; 3]) -> Result<f64>,
{
    let h0 = match order {
        Order::Two => H0_SECOND_ORDER2,
        Order::Four => H0_SECOND_ORDER4,
    };
    laplacian_h(&f, &x, step(&x, h0), order)
}
