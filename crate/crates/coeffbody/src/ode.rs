//! Fixed-step classical Runge-Kutta over complex state vectors.
//!
//! The integrators in this crate deliberately avoid adaptive stepping: a
//! fixed grid makes every reported number reproducible from the
//! configuration alone. Complex vector arithmetic with real step weights is
//! identical to RK4 over the real-imaginary flattening of the state.

use crate::series::C64;

/// Numerical blow-up during integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Blowup {
    /// Step index at which a non-finite component first appeared.
    pub step: usize,
    /// Time at which it appeared.
    pub t: f64,
}

fn axpy(y: &[C64], h: f64, k: &[C64]) -> Vec<C64> {
    y.iter().zip(k).map(|(a, b)| a + b * h).collect()
}

fn finite(y: &[C64]) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Integrates `y' = rhs(t, y)` from `t0` over `steps` equal steps of total
/// length `t_end - t0`, invoking `on_sample` at every grid point including
/// the initial one.
pub(crate) fn rk4<F, S>(
    y0: &[C64],
    t0: f64,
    t_end: f64,
    steps: usize,
    rhs: F,
    mut on_sample: S,
) -> Result<(), Blowup>
where
    F: Fn(f64, &[C64]) -> Vec<C64>,
    S: FnMut(usize, f64, &[C64]),
{
    assert!(steps >= 1, "at least one step required");
    let h = (t_end - t0) / steps as f64;
    let mut y = y0.to_vec();
    let mut t = t0;
    on_sample(0, t, &y);
    for step in 1..=steps {
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
        let k3 = rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
        let k4 = rhs(t + h, &axpy(&y, h, &k3));
        for i in 0..y.len() {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        t = t0 + h * step as f64;
        if !finite(&y) {
            return Err(Blowup { step, t });
        }
        on_sample(step, t, &y);
    }
    Ok(())
}
