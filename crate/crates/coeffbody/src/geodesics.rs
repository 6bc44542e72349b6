//! Sub-Riemannian geodesic flow on the coefficient body.
//!
//! The distribution spanned by the Kirillov fields `L_1, L_2` carries the
//! Hamiltonian
//!
//! ```text
//! H(c, xi) = |l_1|^2 + |l_2|^2,
//! l_j = xibar_j + 2 c_1 xibar_{j+1} + 3 c_2 xibar_{j+2} + ...
//! ```
//!
//! whose flow is
//!
//! ```text
//! cdot_1 = conj(l_1),
//! cdot_2 = 2 c_1 conj(l_1) + conj(l_2),
//! cdot_k = k c_{k-1} conj(l_1) + (k-1) c_{k-2} conj(l_2),   k >= 3,
//! xidot_k = -(k+1) (xi_{k+1} l_1 + xi_{k+2} l_2),           xidot_n = 0.
//! ```
//!
//! Every solution is horizontal (its velocity satisfies the frame
//! conditions `g_k = cdot_k - k c_{k-1} u_1 - (k-1) c_{k-2} u_2 = 0` with
//! `u_1 = cdot_1`, `u_2 = cdot_2 - 2 c_1 cdot_1`), the energy is conserved,
//! and `xi_n` is a constant of motion. On `M_3` the flow integrates in
//! closed form: `c_1` is a driven harmonic oscillator with frequency
//! `|xi_3|`, `c_2` follows by one explicit quadrature, and `c_3` by
//! integrating the horizontality constraint.
//!
//! Derivative estimates in the path checkers use second-order central
//! differences, so their tolerances sit at the corresponding noise floor
//! rather than at machine precision.

use thiserror::Error;

use crate::integrals::triangular_apply;
use crate::loewner::{CoefficientPath, CoefficientState};
use crate::ode::{rk4, Blowup};
use crate::series::C64;

#[derive(Debug, Error)]
pub enum GeodesicsError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires n = 3, got {0}")]
    NotM3(usize),
    #[error("xi_3 must be nonzero for the closed-form geodesic")]
    DegenerateXi3,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("integration blew up at step {} (t = {})", .0.step, .0.t)]
    BlowUp(Blowup),
    #[error("steps must be >= 1")]
    BadGrid,
}

/// Phase-space point `(c, xi)` of the sub-Riemannian flow.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub c: Vec<C64>,
    pub xi: Vec<C64>,
}

impl GeodesicState {
    pub fn new(c: Vec<C64>, xi: Vec<C64>) -> Self {
        assert_eq!(c.len(), xi.len());
        Self { c, xi }
    }

    /// Starts at the origin of `M_n` with the given covector.
    pub fn from_xi(xi: Vec<C64>) -> Self {
        let n = xi.len();
        Self {
            c: vec![C64::new(0.0, 0.0); n],
            xi,
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// The derived quantities `(l_1, ..., l_n) = M(c) xibar`; `l_1, l_2`
    /// enter the Hamiltonian and `l_3` drives their rotation.
    pub fn l_all(&self) -> Vec<C64> {
        let xibar: Vec<C64> = self.xi.iter().map(C64::conj).collect();
        triangular_apply(&self.c, &xibar)
    }

    pub fn l(&self, j: usize) -> C64 {
        self.l_all()[j - 1]
    }

    /// `H = |l_1|^2 + |l_2|^2`.
    pub fn hamiltonian(&self) -> f64 {
        let l = self.l_all();
        let mut h = l[0].norm_sqr();
        if l.len() > 1 {
            h += l[1].norm_sqr();
        }
        h
    }
}

/// Energy `H` of a state; free-function form of
/// [`GeodesicState::hamiltonian`].
pub fn hamiltonian(state: &GeodesicState) -> f64 {
    state.hamiltonian()
}

/// Right-hand side of the Hamiltonian system.
pub fn geodesic_rhs(state: &GeodesicState) -> GeodesicState {
    let n = state.dim();
    let l = state.l_all();
    let (l1, l2) = (l[0], if n > 1 { l[1] } else { C64::new(0.0, 0.0) });
    let (l1b, l2b) = (l1.conj(), l2.conj());
    let mut dc = Vec::with_capacity(n);
    for k in 1..=n {
        let mut v = C64::new(0.0, 0.0);
        // k c_{k-1} conj(l_1) with c_0 = 1
        v += l1b
            * if k == 1 {
                C64::new(k as f64, 0.0)
            } else {
                state.c[k - 2] * k as f64
            };
        if k == 2 {
            v += l2b;
        } else if k >= 3 {
            v += l2b * state.c[k - 3] * (k as f64 - 1.0);
        }
        dc.push(v);
    }
    let mut dxi = Vec::with_capacity(n);
    for k in 1..=n {
        let mut v = C64::new(0.0, 0.0);
        if k + 1 <= n {
            v -= state.xi[k] * l1 * (k as f64 + 1.0);
        }
        if k + 2 <= n {
            v -= state.xi[k + 1] * l2 * (k as f64 + 1.0);
        }
        dxi.push(v);
    }
    GeodesicState { c: dc, xi: dxi }
}

/// Geodesic sampled on a uniform grid, with the energy along it.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub times: Vec<f64>,
    pub states: Vec<GeodesicState>,
    pub energy: Vec<f64>,
}

impl GeodesicPath {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, GeodesicState::dim)
    }

    /// Relative energy drift `max_t |H(t) - H(0)| / (1 + H(0))`.
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy
            .iter()
            .map(|h| (h - h0).abs())
            .fold(0.0, f64::max)
            / (1.0 + h0)
    }

    /// Projection to the base coordinates, for the path checkers.
    pub fn coefficient_path(&self) -> CoefficientPath {
        CoefficientPath {
            times: self.times.clone(),
            states: self
                .states
                .iter()
                .map(|s| CoefficientState::new(s.c.clone()))
                .collect(),
            adjoints: None,
        }
    }

    /// CSV export: trajectory schema extended with
    /// `re_xi1,im_xi1,...,re_xin,im_xin,H`.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::from("t");
        for k in 1..=n {
            out.push_str(&format!(",re_c{k},im_c{k}"));
        }
        for k in 1..=n {
            out.push_str(&format!(",re_xi{k},im_xi{k}"));
        }
        out.push_str(",H\n");
        for ((t, state), h) in self.times.iter().zip(&self.states).zip(&self.energy) {
            out.push_str(&format!("{t}"));
            for z in state.c.iter().chain(&state.xi) {
                out.push_str(&format!(",{},{}", z.re, z.im));
            }
            out.push_str(&format!(",{h}\n"));
        }
        out
    }

    /// JSON export mirroring the trajectory schema with `xi` and `H`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.dim(),
            "samples": self.times.iter().zip(&self.states).zip(&self.energy).map(|((t, s), h)| {
                serde_json::json!({
                    "t": t,
                    "c": s.c.iter().map(|z| vec![z.re, z.im]).collect::<Vec<_>>(),
                    "xi": s.xi.iter().map(|z| vec![z.re, z.im]).collect::<Vec<_>>(),
                    "H": h,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Integrates the Hamiltonian flow with fixed-step RK4 and records the
/// energy at every sample.
pub fn integrate_geodesic(
    initial: &GeodesicState,
    t_end: f64,
    steps: usize,
) -> Result<GeodesicPath, GeodesicsError> {
    if steps == 0 {
        return Err(GeodesicsError::BadGrid);
    }
    let n = initial.dim();
    let mut y0 = initial.c.clone();
    y0.extend_from_slice(&initial.xi);
    let rhs = |_t: f64, y: &[C64]| -> Vec<C64> {
        let state = GeodesicState {
            c: y[..n].to_vec(),
            xi: y[n..].to_vec(),
        };
        let d = geodesic_rhs(&state);
        let mut dy = d.c;
        dy.extend(d.xi);
        dy
    };
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut energy = Vec::with_capacity(steps + 1);
    rk4(&y0, 0.0, t_end, steps, rhs, |_, t, y| {
        let state = GeodesicState {
            c: y[..n].to_vec(),
            xi: y[n..].to_vec(),
        };
        times.push(t);
        energy.push(state.hamiltonian());
        states.push(state);
    })
    .map_err(GeodesicsError::BlowUp)?;
    Ok(GeodesicPath {
        times,
        states,
        energy,
    })
}

/// Decomposition of a tangent vector in the moving frame: the horizontal
/// controls `u_1, u_2` along `L_1, L_2` and the coordinate corrections
/// `g_3, ..., g_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDecomposition {
    pub u1: C64,
    pub u2: C64,
    pub g: Vec<C64>,
}

/// Exact frame decomposition of `velocity` at `point`:
/// `u_1 = v_1`, `u_2 = v_2 - 2 c_1 v_1`,
/// `g_k = v_k - k c_{k-1} u_1 - (k-1) c_{k-2} u_2`.
pub fn tangent_in_frame(
    point: &CoefficientState,
    velocity: &[C64],
) -> Result<FrameDecomposition, GeodesicsError> {
    let n = point.dim();
    if velocity.len() != n {
        return Err(GeodesicsError::DimensionMismatch(n, velocity.len()));
    }
    let u1 = velocity[0];
    let u2 = if n >= 2 {
        velocity[1] - point.c[0] * u1 * 2.0
    } else {
        C64::new(0.0, 0.0)
    };
    let g = (3..=n)
        .map(|k| {
            velocity[k - 1] - point.c[k - 2] * u1 * k as f64 - point.c[k - 3] * u2 * (k as f64 - 1.0)
        })
        .collect();
    Ok(FrameDecomposition { u1, u2, g })
}

/// Inverse of [`tangent_in_frame`]:
/// `v = u_1 L_1(c) + u_2 L_2(c) + sum_k g_k d_k`, exactly.
pub fn reconstruct_tangent(point: &CoefficientState, frame: &FrameDecomposition) -> Vec<C64> {
    let n = point.dim();
    (1..=n)
        .map(|m| {
            // component m of L_1 is m c_{m-1}, of L_2 is (m-1) c_{m-2}
            let l1m = if m == 1 {
                C64::new(1.0, 0.0)
            } else {
                point.c[m - 2] * m as f64
            };
            let l2m = if m == 1 {
                C64::new(0.0, 0.0)
            } else if m == 2 {
                C64::new(1.0, 0.0)
            } else {
                point.c[m - 3] * (m as f64 - 1.0)
            };
            let mut v = frame.u1 * l1m + frame.u2 * l2m;
            if m >= 3 {
                v += frame.g[m - 3];
            }
            v
        })
        .collect()
}

/// Horizontality report for a sampled path.
#[derive(Debug, Clone)]
pub struct HorizontalityReport {
    /// Interior sample times at which derivatives were estimated.
    pub times: Vec<f64>,
    /// Controls recovered at those samples.
    pub u1: Vec<C64>,
    pub u2: Vec<C64>,
    /// Residual norms `|g_k|`, one row per interior sample, `k = 3..=n`.
    pub residuals: Vec<Vec<f64>>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub horizontal: bool,
}

/// Checks the horizontality conditions
/// `cdot_k = k c_{k-1} cdot_1 + (k-1) c_{k-2} (cdot_2 - 2 c_1 cdot_1)`
/// along a path, with velocities estimated by central differences.
pub fn horizontality_check(
    path: &CoefficientPath,
    tolerance: f64,
) -> Result<HorizontalityReport, GeodesicsError> {
    if path.len() < 3 {
        return Err(GeodesicsError::TooFewSamples {
            needed: 3,
            got: path.len(),
        });
    }
    let n = path.dim();
    let mut times = Vec::new();
    let mut u1s = Vec::new();
    let mut u2s = Vec::new();
    let mut residuals = Vec::new();
    let mut max_residual = 0.0f64;
    for i in 1..path.len() - 1 {
        let dt = path.times[i + 1] - path.times[i - 1];
        let velocity: Vec<C64> = (0..n)
            .map(|m| (path.states[i + 1].c[m] - path.states[i - 1].c[m]) / dt)
            .collect();
        let frame = tangent_in_frame(&path.states[i], &velocity)?;
        let row: Vec<f64> = frame.g.iter().map(|g| g.norm()).collect();
        for r in &row {
            max_residual = max_residual.max(*r);
        }
        times.push(path.times[i]);
        u1s.push(frame.u1);
        u2s.push(frame.u2);
        residuals.push(row);
    }
    Ok(HorizontalityReport {
        times,
        u1: u1s,
        u2: u2s,
        residuals,
        max_residual,
        tolerance,
        horizontal: max_residual <= tolerance,
    })
}

/// Parameters of the closed-form `M_3` geodesic: `c_1` solves
/// `c1'' + |xi_3|^2 c_1 = conj(K) xi_3` with `c_1(0) = 0`, so
/// `c_1 = A e^{i|xi_3|t} + B e^{-i|xi_3|t} + conj(K)/conj(xi_3)` and
/// `A + B + conj(K)/conj(xi_3) = 0`.
#[derive(Debug, Clone)]
pub struct Geodesic3Params {
    pub xi3: C64,
    /// `K = cdot_2(0)`, the integration constant of the `c_2` equation.
    pub k_const: C64,
    pub a: C64,
    pub b: C64,
}

/// Closed-form geodesic on `M_3` with vanishing initial position.
#[derive(Debug, Clone)]
pub struct Geodesic3ClosedForm {
    pub params: Geodesic3Params,
    omega: f64,
}

/// Builds the closed-form geodesic from `xi_3` and the initial velocities
/// `cdot_1(0)`, `cdot_2(0)`.
pub fn closed_form_geodesic3(
    xi3: C64,
    c1dot0: C64,
    c2dot0: C64,
) -> Result<Geodesic3ClosedForm, GeodesicsError> {
    let omega = xi3.norm();
    if omega == 0.0 {
        return Err(GeodesicsError::DegenerateXi3);
    }
    let k_const = c2dot0;
    let offset = k_const.conj() / xi3.conj();
    let i_omega = C64::new(0.0, omega);
    let half = 0.5;
    let a = (-offset + c1dot0 / i_omega) * half;
    let b = (-offset - c1dot0 / i_omega) * half;
    Ok(Geodesic3ClosedForm {
        params: Geodesic3Params {
            xi3,
            k_const,
            a,
            b,
        },
        omega,
    })
}

// 8-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

impl Geodesic3ClosedForm {
    pub fn c1(&self, t: f64) -> C64 {
        let p = &self.params;
        let e = C64::from_polar(1.0, self.omega * t);
        p.a * e + p.b * e.conj() - (p.a + p.b)
    }

    pub fn c1_dot(&self, t: f64) -> C64 {
        let p = &self.params;
        let e = C64::from_polar(1.0, self.omega * t);
        (p.a * e - p.b * e.conj()) * C64::new(0.0, self.omega)
    }

    /// `c_2 = c_1^2 - xi_3 * int_0^t conj(c_1) + K t`, with the integral in
    /// closed form.
    pub fn c2(&self, t: f64) -> C64 {
        let p = &self.params;
        let c1 = self.c1(t);
        let e = C64::from_polar(1.0, self.omega * t);
        let i_omega = C64::new(0.0, self.omega);
        let one = C64::new(1.0, 0.0);
        let integral = p.a.conj() * (one - e.conj()) / i_omega
            + p.b.conj() * (e - one) / i_omega
            - (p.a + p.b).conj() * t;
        c1 * c1 - p.xi3 * integral + p.k_const * t
    }

    pub fn c2_dot(&self, t: f64) -> C64 {
        let c1 = self.c1(t);
        self.c1_dot(t) * c1 * 2.0 - self.params.xi3 * c1.conj() + self.params.k_const
    }

    /// Integrand of the `c_3` equation
    /// `cdot_3 = 3 c_2 cdot_1 + 2 c_1 (cdot_2 - 2 c_1 cdot_1)`.
    fn c3_integrand(&self, t: f64) -> C64 {
        let c1 = self.c1(t);
        let c1d = self.c1_dot(t);
        let c2 = self.c2(t);
        let c2d = self.c2_dot(t);
        c2 * c1d * 3.0 + c1 * (c2d - c1 * c1d * 2.0) * 2.0
    }

    fn gauss_panel(&self, t0: f64, t1: f64) -> C64 {
        let mid = 0.5 * (t0 + t1);
        let half = 0.5 * (t1 - t0);
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
            acc += self.c3_integrand(mid + half * x) * *w;
        }
        acc * half
    }

    /// Point evaluation `(c_1, c_2, c_3)(t)`; `c_3` by composite
    /// Gauss-Legendre quadrature from 0.
    pub fn eval(&self, t: f64) -> [C64; 3] {
        let panels = ((t.abs() / 0.005).ceil() as usize).max(1);
        let mut c3 = C64::new(0.0, 0.0);
        for i in 0..panels {
            let a = t * i as f64 / panels as f64;
            let b = t * (i + 1) as f64 / panels as f64;
            c3 += self.gauss_panel(a, b);
        }
        [self.c1(t), self.c2(t), c3]
    }

    /// Samples the geodesic on a uniform grid, accumulating `c_3` panel by
    /// panel.
    pub fn sample(&self, t_end: f64, steps: usize) -> Vec<(f64, [C64; 3])> {
        let mut out = Vec::with_capacity(steps + 1);
        let mut c3 = C64::new(0.0, 0.0);
        out.push((0.0, [self.c1(0.0), self.c2(0.0), c3]));
        for i in 1..=steps {
            let t0 = t_end * (i - 1) as f64 / steps as f64;
            let t1 = t_end * i as f64 / steps as f64;
            c3 += self.gauss_panel(t0, t1);
            out.push((t1, [self.c1(t1), self.c2(t1), c3]));
        }
        out
    }
}

/// Lagrangian of the constrained `M_3` variational problem:
/// kinetic energy of the controls plus the multiplier pairing with the
/// horizontality constraint,
/// `|cdot_1|^2 + |cdot_2 - 2 c_1 cdot_1|^2 + Re conj(lambda) g_3`.
pub fn lagrangian(
    c: &CoefficientState,
    cdot: &[C64],
    lambda: C64,
) -> Result<f64, GeodesicsError> {
    if c.dim() != 3 {
        return Err(GeodesicsError::NotM3(c.dim()));
    }
    if cdot.len() != 3 {
        return Err(GeodesicsError::DimensionMismatch(3, cdot.len()));
    }
    let u1 = cdot[0];
    let u2 = cdot[1] - c.c[0] * cdot[0] * 2.0;
    let g3 = cdot[2] - c.c[1] * cdot[0] * 3.0 - c.c[0] * u2 * 2.0;
    Ok(u1.norm_sqr() + u2.norm_sqr() + (lambda.conj() * g3).re)
}

/// Residuals of the Euler-Lagrange system along a sampled `M_3` path.
#[derive(Debug, Clone)]
pub struct EulerLagrangeReport {
    pub times: Vec<f64>,
    /// `conj(c1'') - 2 c_1 conj(s'') - conj(lambda) cdot_2`, `s = c_2 - c_1^2`.
    pub residual1: Vec<C64>,
    /// `conj(s'') + conj(lambda) cdot_1`.
    pub residual2: Vec<C64>,
    pub max_residual: f64,
}

/// Evaluates the Euler-Lagrange residuals with constant multiplier
/// `lambda`; on a Hamiltonian geodesic with `lambda = xi_3` both residual
/// series vanish to the second-difference noise floor.
///
/// The multiplier is normalized by differentiating the constraint term of
/// the Lagrangian holomorphically (treating `Re conj(lambda) g_3` as
/// `conj(lambda) g_3` in the complex derivative), which is the convention
/// that makes `lambda = xi_3` rather than a multiple of it.
pub fn euler_lagrange_residual(
    path: &CoefficientPath,
    lambda: C64,
) -> Result<EulerLagrangeReport, GeodesicsError> {
    if path.dim() != 3 {
        return Err(GeodesicsError::NotM3(path.dim()));
    }
    if path.len() < 3 {
        return Err(GeodesicsError::TooFewSamples {
            needed: 3,
            got: path.len(),
        });
    }
    let lam_bar = lambda.conj();
    let mut times = Vec::new();
    let mut residual1 = Vec::new();
    let mut residual2 = Vec::new();
    let mut max_residual = 0.0f64;
    let s_of = |state: &CoefficientState| state.c[1] - state.c[0] * state.c[0];
    for i in 1..path.len() - 1 {
        let h = path.times[i + 1] - path.times[i];
        let dt2 = h * h;
        let c_prev = &path.states[i - 1];
        let c_here = &path.states[i];
        let c_next = &path.states[i + 1];
        let c1_dd = (c_next.c[0] - c_here.c[0] * 2.0 + c_prev.c[0]) / dt2;
        let s_dd = (s_of(c_next) - s_of(c_here) * 2.0 + s_of(c_prev)) / dt2;
        let c1_d = (c_next.c[0] - c_prev.c[0]) / (2.0 * h);
        let c2_d = (c_next.c[1] - c_prev.c[1]) / (2.0 * h);
        let r1 = c1_dd.conj() - c_here.c[0] * s_dd.conj() * 2.0 - lam_bar * c2_d;
        let r2 = s_dd.conj() + lam_bar * c1_d;
        max_residual = max_residual.max(r1.norm()).max(r2.norm());
        times.push(path.times[i]);
        residual1.push(r1);
        residual2.push(r2);
    }
    Ok(EulerLagrangeReport {
        times,
        residual1,
        residual2,
        max_residual,
    })
}

/// Report of the rotation law of the derived quantities along a geodesic:
/// `l1' = conj(l_2) l_3` and `l2' = -conj(l_1) l_3`.
#[derive(Debug, Clone)]
pub struct LDynamicsReport {
    pub times: Vec<f64>,
    pub mismatch_l1: Vec<f64>,
    pub mismatch_l2: Vec<f64>,
    pub max_mismatch: f64,
}

/// Compares central-difference derivatives of `l_1, l_2` with the
/// closed rotation law along a sampled geodesic.
pub fn l_dynamics_check(path: &GeodesicPath) -> Result<LDynamicsReport, GeodesicsError> {
    if path.times.len() < 3 {
        return Err(GeodesicsError::TooFewSamples {
            needed: 3,
            got: path.times.len(),
        });
    }
    if path.dim() < 3 {
        return Err(GeodesicsError::NotM3(path.dim()));
    }
    let ls: Vec<Vec<C64>> = path.states.iter().map(GeodesicState::l_all).collect();
    let mut times = Vec::new();
    let mut mismatch_l1 = Vec::new();
    let mut mismatch_l2 = Vec::new();
    let mut max_mismatch = 0.0f64;
    for i in 1..path.times.len() - 1 {
        let dt = path.times[i + 1] - path.times[i - 1];
        let l1_d = (ls[i + 1][0] - ls[i - 1][0]) / dt;
        let l2_d = (ls[i + 1][1] - ls[i - 1][1]) / dt;
        let l = &ls[i];
        let m1 = (l1_d - l[1].conj() * l[2]).norm();
        let m2 = (l2_d + l[0].conj() * l[2]).norm();
        max_mismatch = max_mismatch.max(m1).max(m2);
        times.push(path.times[i]);
        mismatch_l1.push(m1);
        mismatch_l2.push(m2);
    }
    Ok(LDynamicsReport {
        times,
        mismatch_l1,
        mismatch_l2,
        max_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c64(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_xi(rng: &mut StdRng, n: usize, scale: f64) -> Vec<C64> {
        (0..n)
            .map(|_| c64(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
            .collect()
    }

    #[test]
    fn hamiltonian_examples() {
        let zero = GeodesicState::from_xi(vec![c64(0.0, 0.0); 3]);
        assert_eq!(zero.hamiltonian(), 0.0);

        let e1 = GeodesicState::from_xi(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        assert_eq!(e1.hamiltonian(), 1.0);

        // c = (1,0,0), xi = (0,0,1): l_1 = 3 c_2 conj(xi_3) = 0, l_2 = 2 c_1
        // conj(xi_3) = 2, so H = 4.
        let state = GeodesicState::new(
            vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)],
            vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        );
        assert_eq!(state.hamiltonian(), 4.0);
    }

    #[test]
    fn rhs_last_xi_component_is_zero() {
        let mut rng = StdRng::seed_from_u64(40);
        for _ in 0..10 {
            let n = rng.gen_range(2..=6);
            let state = GeodesicState::new(random_xi(&mut rng, n, 1.0), random_xi(&mut rng, n, 1.0));
            let d = geodesic_rhs(&state);
            assert_eq!(d.xi[n - 1], c64(0.0, 0.0));
        }
    }

    #[test]
    fn rhs_at_unit_covector() {
        // c = 0, xi = e_1 (n = 3): cdot = (1, 0, 0), xidot = 0.
        let state = GeodesicState::from_xi(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        let d = geodesic_rhs(&state);
        assert_eq!(d.c, vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        assert!(d.xi.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn rhs_zero_covector_is_stationary() {
        let state = GeodesicState::new(
            vec![c64(0.3, 0.1), c64(-0.2, 0.4), c64(0.0, 0.2)],
            vec![c64(0.0, 0.0); 3],
        );
        let d = geodesic_rhs(&state);
        assert!(d.c.iter().all(|z| z.norm() == 0.0));
        assert!(d.xi.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn zero_covector_gives_constant_path() {
        let state = GeodesicState::from_xi(vec![c64(0.0, 0.0); 3]);
        let path = integrate_geodesic(&state, 2.0, 100).unwrap();
        assert!(path.energy.iter().all(|h| *h == 0.0));
        for s in &path.states {
            assert!(s.c.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn energy_conserved_along_random_geodesics() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..5 {
            let xi = random_xi(&mut rng, 3, 0.5);
            let path = integrate_geodesic(&GeodesicState::from_xi(xi), 5.0, 5000).unwrap();
            assert!(path.energy_drift() <= 1e-8, "drift {}", path.energy_drift());
        }
    }

    #[test]
    fn xi_n_is_constant_along_geodesics() {
        let mut rng = StdRng::seed_from_u64(42);
        let xi = random_xi(&mut rng, 4, 0.5);
        let xin = xi[3];
        let path = integrate_geodesic(&GeodesicState::from_xi(xi), 3.0, 1000).unwrap();
        for s in &path.states {
            assert_eq!(s.xi[3], xin);
        }
    }

    #[test]
    fn geodesics_are_horizontal_and_controls_match_l() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..3 {
            let xi = random_xi(&mut rng, 4, 0.4);
            let path = integrate_geodesic(&GeodesicState::from_xi(xi), 3.0, 3000).unwrap();
            let report = horizontality_check(&path.coefficient_path(), 1e-6).unwrap();
            assert!(report.horizontal, "max residual {}", report.max_residual);
            // u_1 = conj(l_1), u_2 = conj(l_2) along the flow.
            for (i, t_idx) in (1..path.times.len() - 1).enumerate().take(50) {
                let l = path.states[t_idx].l_all();
                assert!((report.u1[i] - l[0].conj()).norm() < 1e-6);
                assert!((report.u2[i] - l[1].conj()).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn starlike_type_path_is_horizontal() {
        // c_1 = 0, c_2 = (e^{-2t} - 1)/2, c_3 = 0 on a fine grid.
        let steps = 2000;
        let times: Vec<f64> = (0..=steps).map(|i| 3.0 * i as f64 / steps as f64).collect();
        let states = times
            .iter()
            .map(|t| {
                CoefficientState::new(vec![
                    c64(0.0, 0.0),
                    c64(0.5 * ((-2.0 * t).exp() - 1.0), 0.0),
                    c64(0.0, 0.0),
                ])
            })
            .collect();
        let path = CoefficientPath {
            times,
            states,
            adjoints: None,
        };
        let report = horizontality_check(&path, 1e-6).unwrap();
        assert!(report.horizontal, "max residual {}", report.max_residual);
    }

    #[test]
    fn line_path_is_not_horizontal() {
        // c(t) = (t, 0, t): g_3 = 1 + 4 t^2.
        let steps = 100;
        let times: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
        let states = times
            .iter()
            .map(|t| CoefficientState::new(vec![c64(*t, 0.0), c64(0.0, 0.0), c64(*t, 0.0)]))
            .collect();
        let path = CoefficientPath {
            times,
            states,
            adjoints: None,
        };
        let report = horizontality_check(&path, 1e-6).unwrap();
        assert!(!report.horizontal);
        // spot-check the residual value at an interior sample
        let i = 50;
        let t = report.times[i - 1];
        let want = 1.0 + 4.0 * t * t;
        assert!((report.residuals[i - 1][0] - want).abs() < 1e-3);
    }

    #[test]
    fn constant_path_is_horizontal() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let states = times
            .iter()
            .map(|_| CoefficientState::new(vec![c64(0.2, 0.1), c64(0.3, 0.0), c64(0.0, -0.4)]))
            .collect();
        let path = CoefficientPath {
            times,
            states,
            adjoints: None,
        };
        let report = horizontality_check(&path, 1e-12).unwrap();
        assert!(report.horizontal);
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn frame_duality_on_kirillov_fields() {
        // velocity = components of L_1 (resp. L_2) at c decomposes as
        // (1, 0, 0...) resp. (0, 1, 0...).
        let mut rng = StdRng::seed_from_u64(44);
        let n = 5;
        let c: Vec<C64> = random_xi(&mut rng, n, 0.8);
        let point = CoefficientState::new(c.clone());
        let l1: Vec<C64> = (1..=n)
            .map(|m| {
                if m == 1 {
                    c64(1.0, 0.0)
                } else {
                    c[m - 2] * m as f64
                }
            })
            .collect();
        let f = tangent_in_frame(&point, &l1).unwrap();
        assert!((f.u1 - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(f.u2.norm() < 1e-15);
        assert!(f.g.iter().all(|g| g.norm() < 1e-14));

        let l2: Vec<C64> = (1..=n)
            .map(|m| match m {
                1 => c64(0.0, 0.0),
                2 => c64(1.0, 0.0),
                _ => c[m - 3] * (m as f64 - 1.0),
            })
            .collect();
        let f = tangent_in_frame(&point, &l2).unwrap();
        assert!(f.u1.norm() < 1e-15);
        assert!((f.u2 - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(f.g.iter().all(|g| g.norm() < 1e-14));
    }

    #[test]
    fn frame_roundtrip_is_exact() {
        let mut rng = StdRng::seed_from_u64(45);
        for _ in 0..20 {
            let n = 5;
            let point = CoefficientState::new(random_xi(&mut rng, n, 1.0));
            let v = random_xi(&mut rng, n, 1.0);
            let frame = tangent_in_frame(&point, &v).unwrap();
            let back = reconstruct_tangent(&point, &frame);
            for (a, b) in v.iter().zip(&back) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn closed_form_trivial_data() {
        let g = closed_form_geodesic3(c64(0.7, 0.4), c64(0.0, 0.0), c64(0.0, 0.0)).unwrap();
        assert!(g.params.a.norm() < 1e-15);
        assert!(g.params.b.norm() < 1e-15);
        for t in [0.0, 0.5, 2.0] {
            let v = g.eval(t);
            assert!(v.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn closed_form_rejects_degenerate_xi3() {
        assert!(matches!(
            closed_form_geodesic3(c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)),
            Err(GeodesicsError::DegenerateXi3)
        ));
    }

    #[test]
    fn closed_form_pure_sine_mode() {
        // K = 0 and B = -A gives c_1(t) = 2iA sin(|xi_3| t).
        let xi3 = c64(0.0, 0.8);
        let omega = xi3.norm();
        let a = c64(0.3, -0.1);
        let c1dot0 = C64::new(0.0, omega) * a * 2.0;
        let g = closed_form_geodesic3(xi3, c1dot0, c64(0.0, 0.0)).unwrap();
        assert!((g.params.a - a).norm() < 1e-14);
        assert!((g.params.b + a).norm() < 1e-14);
        for t in [0.3, 1.1, 2.9] {
            let want = a * C64::new(0.0, 2.0) * (omega * t).sin();
            assert!((g.c1(t) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn closed_form_satisfies_oscillator_equation() {
        let mut rng = StdRng::seed_from_u64(46);
        for _ in 0..10 {
            let xi3 = c64(rng.gen_range(0.2..1.0), rng.gen_range(-1.0..1.0));
            let g = closed_form_geodesic3(
                xi3,
                c64(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
                c64(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            )
            .unwrap();
            let omega2 = xi3.norm_sqr();
            let forcing = g.params.k_const.conj() * xi3;
            for t in [0.0, 0.7, 1.9, 4.2] {
                let e = C64::from_polar(1.0, g.omega * t);
                let c1_dd = (g.params.a * e + g.params.b * e.conj()) * (-omega2);
                let residual = (c1_dd + g.c1(t) * omega2 - forcing).norm();
                assert!(residual <= 1e-10, "residual {residual}");
            }
        }
    }

    #[test]
    fn closed_form_c2_satisfies_its_ode() {
        // central-difference check of cdot_2 = 2 c_1 cdot_1 - conj(c_1) xi_3 + K
        let g = closed_form_geodesic3(c64(0.5, 0.3), c64(0.2, -0.1), c64(-0.15, 0.25)).unwrap();
        let h = 1e-5;
        for t in [0.4, 1.3, 3.7] {
            let dc2 = (g.c2(t + h) - g.c2(t - h)) / (2.0 * h);
            let want = g.c1(t) * g.c1_dot(t) * 2.0 - g.c1(t).conj() * g.params.xi3 + g.params.k_const;
            assert!((dc2 - want).norm() < 1e-8);
        }
    }

    #[test]
    fn closed_form_matches_integrator() {
        let mut rng = StdRng::seed_from_u64(47);
        for _ in 0..3 {
            let xi1 = c64(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
            let xi2 = c64(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
            let xi3 = c64(rng.gen_range(0.1..0.5), rng.gen_range(-0.4..0.4));
            // matching: cdot_1(0) = conj(l_1(0)) = xi_1, cdot_2(0) = xi_2
            let g = closed_form_geodesic3(xi3, xi1, xi2).unwrap();
            let path =
                integrate_geodesic(&GeodesicState::from_xi(vec![xi1, xi2, xi3]), 5.0, 5000)
                    .unwrap();
            let samples = g.sample(5.0, 5000);
            let mut gap = 0.0f64;
            for (state, (_, closed)) in path.states.iter().zip(&samples) {
                for m in 0..3 {
                    gap = gap.max((state.c[m] - closed[m]).norm());
                }
            }
            assert!(gap <= 1e-6, "gap {gap}");
        }
    }

    #[test]
    fn lagrangian_examples() {
        let state = CoefficientState::new(vec![c64(0.3, 0.1), c64(-0.2, 0.4), c64(0.1, 0.0)]);
        let zero = vec![c64(0.0, 0.0); 3];
        assert_eq!(lagrangian(&state, &zero, c64(1.0, 2.0)).unwrap(), 0.0);

        // horizontal velocity: constraint term drops, L = |u1|^2 + |u2|^2
        let u1 = c64(0.4, -0.2);
        let u2 = c64(-0.1, 0.3);
        let v = reconstruct_tangent(
            &state,
            &FrameDecomposition {
                u1,
                u2,
                g: vec![c64(0.0, 0.0)],
            },
        );
        let l = lagrangian(&state, &v, c64(0.7, -1.3)).unwrap();
        assert!((l - u1.norm_sqr() - u2.norm_sqr()).abs() < 1e-13);
    }

    #[test]
    fn lagrangian_matches_independent_expansion() {
        let mut rng = StdRng::seed_from_u64(48);
        for _ in 0..20 {
            let state = CoefficientState::new(random_xi(&mut rng, 3, 1.0));
            let v = random_xi(&mut rng, 3, 1.0);
            let lambda = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let got = lagrangian(&state, &v, lambda).unwrap();
            // independent route: expand |v1|^2 + |v2 - 2 c1 v1|^2
            //   + Re[conj(lambda)(v3 - 3 c2 v1 - 2 c1 v2 + 4 c1^2 v1)]
            let c1 = state.c[0];
            let c2 = state.c[1];
            let term = v[2] - c2 * v[0] * 3.0 - c1 * v[1] * 2.0 + c1 * c1 * v[0] * 4.0;
            let want = v[0].norm_sqr()
                + (v[1] - c1 * v[0] * 2.0).norm_sqr()
                + (lambda.conj() * term).re;
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn euler_lagrange_vanishes_on_geodesics_with_lambda_xi3() {
        let mut rng = StdRng::seed_from_u64(49);
        for _ in 0..3 {
            let xi = random_xi(&mut rng, 3, 0.4);
            let xi3 = xi[2];
            let path = integrate_geodesic(&GeodesicState::from_xi(xi), 5.0, 5000).unwrap();
            let report = euler_lagrange_residual(&path.coefficient_path(), xi3).unwrap();
            assert!(report.max_residual <= 1e-5, "residual {}", report.max_residual);
        }
    }

    #[test]
    fn euler_lagrange_zero_on_constant_path() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.01).collect();
        let states = times
            .iter()
            .map(|_| CoefficientState::new(vec![c64(0.1, 0.0), c64(0.0, 0.2), c64(0.3, 0.0)]))
            .collect();
        let path = CoefficientPath {
            times,
            states,
            adjoints: None,
        };
        let report = euler_lagrange_residual(&path, c64(2.0, -1.0)).unwrap();
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn euler_lagrange_flags_non_horizontal_path() {
        // c(t) = (t, 0, t) fails the second equation for any constant lambda
        // with |lambda| != 2... in particular lambda = 1.
        let steps = 200;
        let times: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
        let states = times
            .iter()
            .map(|t| CoefficientState::new(vec![c64(*t, 0.0), c64(0.0, 0.0), c64(*t, 0.0)]))
            .collect();
        let path = CoefficientPath {
            times,
            states,
            adjoints: None,
        };
        let report = euler_lagrange_residual(&path, c64(1.0, 0.0)).unwrap();
        assert!(report.max_residual > 0.5);
    }

    #[test]
    fn l_dynamics_frozen_when_l3_vanishes() {
        // xi = e_1: l_3 = 0 along the flow and l_1 stays constant.
        let path = integrate_geodesic(
            &GeodesicState::from_xi(vec![c64(0.6, -0.2), c64(0.0, 0.0), c64(0.0, 0.0)]),
            3.0,
            1000,
        )
        .unwrap();
        for s in &path.states {
            let l = s.l_all();
            assert!(l[2].norm() < 1e-12);
            assert!((l[0] - path.states[0].l_all()[0]).norm() < 1e-10);
        }
        let report = l_dynamics_check(&path).unwrap();
        assert!(report.max_mismatch < 1e-10);
    }

    #[test]
    fn l_dynamics_along_random_geodesics() {
        let mut rng = StdRng::seed_from_u64(50);
        let xi = random_xi(&mut rng, 3, 0.5);
        let path = integrate_geodesic(&GeodesicState::from_xi(xi), 3.0, 3000).unwrap();
        let report = l_dynamics_check(&path).unwrap();
        assert!(report.max_mismatch <= 1e-5, "mismatch {}", report.max_mismatch);
    }

    #[test]
    fn zero_geodesic_l_dynamics_trivial() {
        let path = integrate_geodesic(&GeodesicState::from_xi(vec![c64(0.0, 0.0); 3]), 1.0, 100)
            .unwrap();
        let report = l_dynamics_check(&path).unwrap();
        assert_eq!(report.max_mismatch, 0.0);
    }
}
