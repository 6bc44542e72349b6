//! The Loewner-Kufarev coefficient system and its adjoint.
//!
//! A normalized univalent function arises as `f(z) = lim e^t w(z, t)` where
//! `w` solves `dw/dt = -w p(w, t)` with `w(z, 0) = z` and a driving term
//! `p(z, t) = 1 + p_1(t) z + ...` of positive real part. Writing
//! `w(z, t) = e^{-t} z (1 + sum c_k(t) z^k)` turns the PDE into an ODE for
//! the coefficient vector `c = (c_1, ..., c_n)`:
//!
//! ```text
//! cdot_m = -[z^{m+1}]  sum_{k=1}^n  p_k(t) e^{-kt} u(z)^{k+1},
//! u(z) = e^t w(z, t) = z (1 + c_1 z + ... + c_n z^n),
//! ```
//!
//! an exact residue extraction from a truncated series, never a numerical
//! quadrature. The adjoint vector evolves by the linear system
//! `psibar-dot_j = sum_{k>j} psibar_k [z^{k-j}] (p(w) + w p'(w))` with
//! `psibar-dot_n = 0`.
//!
//! Conventions: [`AdjointState`] stores the vector `psi` itself; the ODE and
//! every formula in this module are written for the conjugated vector
//! `psibar`, matching the Hamiltonian form `H = sum psibar_k cdot_k`.

use num::complex::Complex;
use thiserror::Error;

use crate::ode::{rk4, Blowup};
use crate::series::{TruncatedSeries, C64};

#[derive(Debug, Error)]
pub enum LoewnerError {
    #[error("dimension mismatch: state has n = {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integration blew up at step {} (t = {})", .0.step, .0.t)]
    BlowUp(Blowup),
    #[error("invalid driving table: {0}")]
    InvalidTable(String),
    #[error("steps must be >= 1 and t_end > 0")]
    BadGrid,
}

/// Time-dependent driving term, given by the coefficient vector
/// `(p_1(t), ..., p_n(t))` of `p(z, t) = 1 + sum p_k z^k`.
///
/// Implementations must be re-entrant: the integrator may evaluate the same
/// driving from several trajectories concurrently.
pub trait DrivingFunction: Sync {
    /// Truncation level `n`.
    fn level(&self) -> usize;
    /// Coefficients `(p_1(t), ..., p_n(t))`.
    fn coefficients(&self, t: f64) -> Vec<C64>;
}

/// Driving with time-independent coefficients.
#[derive(Debug, Clone)]
pub struct ConstantDriving {
    p: Vec<C64>,
}

impl ConstantDriving {
    pub fn new(p: Vec<C64>) -> Self {
        Self { p }
    }

    /// `p(z, t) = 1`: the trajectory stays at `c = 0` (`w = e^{-t} z`).
    pub fn identity(n: usize) -> Self {
        Self {
            p: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// `p(z, t) = 1 + z^2`: drives the odd starlike map with
    /// `c_2(t) = (e^{-2t} - 1)/2` and all other coefficients zero.
    pub fn starlike(n: usize) -> Self {
        let mut p = vec![C64::new(0.0, 0.0); n];
        if n >= 2 {
            p[1] = C64::new(1.0, 0.0);
        }
        Self { p }
    }
}

impl DrivingFunction for ConstantDriving {
    fn level(&self) -> usize {
        self.p.len()
    }
    fn coefficients(&self, _t: f64) -> Vec<C64> {
        self.p.clone()
    }
}

/// Piecewise-constant driving given by a table of time nodes; between nodes
/// the last value holds (the equation only needs measurability in `t`).
#[derive(Debug, Clone)]
pub struct TableDriving {
    times: Vec<f64>,
    values: Vec<Vec<C64>>,
}

impl TableDriving {
    pub fn new(times: Vec<f64>, values: Vec<Vec<C64>>) -> Result<Self, LoewnerError> {
        if times.is_empty() || times.len() != values.len() {
            return Err(LoewnerError::InvalidTable(
                "need equally many times and values, at least one".into(),
            ));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(LoewnerError::InvalidTable(
                "times must be strictly increasing".into(),
            ));
        }
        let n = values[0].len();
        if values.iter().any(|v| v.len() != n) {
            return Err(LoewnerError::InvalidTable(
                "all rows must share one truncation level".into(),
            ));
        }
        Ok(Self { times, values })
    }

    /// Parses `{"times": [...], "p": [[[re, im], ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self, LoewnerError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| LoewnerError::InvalidTable(e.to_string()))?;
        let times: Vec<f64> = v["times"]
            .as_array()
            .ok_or_else(|| LoewnerError::InvalidTable("missing `times` array".into()))?
            .iter()
            .map(|x| x.as_f64().unwrap_or(f64::NAN))
            .collect();
        let rows = v["p"]
            .as_array()
            .ok_or_else(|| LoewnerError::InvalidTable("missing `p` array".into()))?;
        let mut values = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| LoewnerError::InvalidTable("`p` rows must be arrays".into()))?;
            let mut out = Vec::with_capacity(row.len());
            for pair in row {
                let re = pair[0].as_f64();
                let im = pair[1].as_f64();
                match (re, im) {
                    (Some(re), Some(im)) => out.push(C64::new(re, im)),
                    _ => {
                        return Err(LoewnerError::InvalidTable(
                            "coefficients must be [re, im] pairs".into(),
                        ))
                    }
                }
            }
            values.push(out);
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(LoewnerError::InvalidTable("non-finite time node".into()));
        }
        Self::new(times, values)
    }

    pub fn node_values(&self) -> &[Vec<C64>] {
        &self.values
    }
}

impl DrivingFunction for TableDriving {
    fn level(&self) -> usize {
        self.values[0].len()
    }
    fn coefficients(&self, t: f64) -> Vec<C64> {
        let idx = self.times.iter().rposition(|&s| s <= t).unwrap_or(0);
        self.values[idx].clone()
    }
}

/// Driving defined by an arbitrary time-callable.
pub struct FnDriving<F: Fn(f64) -> Vec<C64> + Sync> {
    n: usize,
    f: F,
}

impl<F: Fn(f64) -> Vec<C64> + Sync> FnDriving<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(f64) -> Vec<C64> + Sync> DrivingFunction for FnDriving<F> {
    fn level(&self) -> usize {
        self.n
    }
    fn coefficients(&self, t: f64) -> Vec<C64> {
        (self.f)(t)
    }
}

/// Coefficients of a Caratheodory function built from a convex combination
/// of boundary kernels `(1 + conj(eta) z)/(1 - conj(eta) z)`, `eta = e^{i
/// angle}`: `p_k = 2 sum_j weights_j e^{-i k angle_j}`.
///
/// Weights are normalized to sum to one, so the underlying function has
/// positive real part on the whole disk and the induced trajectory stays in
/// the coefficient body regardless of truncation.
pub fn caratheodory_from_atoms(weights: &[f64], angles: &[f64], n: usize) -> Vec<C64> {
    assert_eq!(weights.len(), angles.len());
    let total: f64 = weights.iter().sum();
    (1..=n)
        .map(|k| {
            let mut p = C64::new(0.0, 0.0);
            for (w, a) in weights.iter().zip(angles) {
                p += C64::from_polar(2.0 * w / total, -(k as f64) * a);
            }
            p
        })
        .collect()
}

/// Point of the coefficient body `M_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientState {
    pub c: Vec<C64>,
}

impl CoefficientState {
    pub fn new(c: Vec<C64>) -> Self {
        Self { c }
    }

    /// Origin, i.e. the initial condition `w(z, 0) = z`.
    pub fn origin(n: usize) -> Self {
        Self {
            c: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Worst excess over the de Branges bound `|c_k| < k + 1`, i.e.
    /// `max_k (|c_k| - (k + 1))`. Negative values mean the bound holds.
    pub fn debranges_excess(&self) -> f64 {
        self.c
            .iter()
            .enumerate()
            .map(|(i, ck)| ck.norm() - (i as f64 + 2.0))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Adjoint vector `psi = (psi_1, ..., psi_n)`, stored un-conjugated.
///
/// The adjoint ODE and the first-integral formulas act on `psibar`; see the
/// module docs for the convention.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointState {
    pub psi: Vec<C64>,
}

impl AdjointState {
    pub fn new(psi: Vec<C64>) -> Self {
        Self { psi }
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    pub fn psi_bar(&self) -> Vec<C64> {
        self.psi.iter().map(C64::conj).collect()
    }
}

/// Time-sampled trajectory in `M_n`, optionally with adjoint samples.
#[derive(Debug, Clone)]
pub struct CoefficientPath {
    pub times: Vec<f64>,
    pub states: Vec<CoefficientState>,
    pub adjoints: Option<Vec<AdjointState>>,
}

impl CoefficientPath {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, CoefficientState::dim)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Worst de Branges excess over all samples.
    pub fn debranges_excess(&self) -> f64 {
        self.states
            .iter()
            .map(CoefficientState::debranges_excess)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV export with header `t,re_c1,im_c1,...,re_cn,im_cn`.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::from("t");
        for k in 1..=n {
            out.push_str(&format!(",re_c{k},im_c{k}"));
        }
        out.push('\n');
        for (t, state) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t}"));
            for ck in &state.c {
                out.push_str(&format!(",{},{}", ck.re, ck.im));
            }
            out.push('\n');
        }
        out
    }

    /// JSON export: `{"n": n, "samples": [{"t": t, "c": [[re, im], ...]}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.dim(),
            "samples": self.times.iter().zip(&self.states).map(|(t, s)| {
                serde_json::json!({
                    "t": t,
                    "c": s.c.iter().map(|z| vec![z.re, z.im]).collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// `u(z) = e^t w(z, t) = z (1 + c_1 z + ... + c_n z^n)` as a series of
/// order `n + 1`.
fn u_series(c: &[C64]) -> TruncatedSeries<C64> {
    let n = c.len();
    let mut u = TruncatedSeries::zero(n + 1);
    u.set_coeff(1, C64::new(1.0, 0.0));
    for (k, ck) in c.iter().enumerate() {
        u.set_coeff(k + 2, *ck);
    }
    u
}

/// Right-hand side `(cdot_1, ..., cdot_n)` of the coefficient system.
///
/// Extracts residues from `sum_k p_k e^{-kt} u^{k+1}`; for `n <= 3` this
/// reproduces the explicit low-order formulas, e.g.
/// `cdot_2 = -2 e^{-t} p_1 c_1 - e^{-2t} p_2`.
pub fn coefficient_rhs(
    state: &CoefficientState,
    p: &[C64],
    t: f64,
) -> Result<Vec<C64>, LoewnerError> {
    if p.len() != state.dim() {
        return Err(LoewnerError::DimensionMismatch {
            expected: state.dim(),
            found: p.len(),
        });
    }
    Ok(coefficient_rhs_core(&state.c, p, t))
}

fn coefficient_rhs_core(c: &[C64], p: &[C64], t: f64) -> Vec<C64> {
    let n = c.len();
    let u = u_series(c);
    let mut power = u.clone();
    let mut total = TruncatedSeries::zero(n + 1);
    for (k, pk) in p.iter().enumerate() {
        power = power.mul(&u); // u^{k+2}
        if pk.re == 0.0 && pk.im == 0.0 {
            continue;
        }
        let factor = pk * (-(k as f64 + 1.0) * t).exp();
        total = total.add(&power.scale(&factor));
    }
    (1..=n).map(|m| -total.coeff(m + 1)).collect()
}

/// Alternative evaluation of the same right-hand side through the contour
/// form `cdot_m = c_m - e^t [z^{m+1}] (w(z) p(w(z), t))`, with the inner
/// substitution done by series composition. Used to cross-check that both
/// displayed forms of the coefficient equation agree.
pub fn coefficient_rhs_contour(
    state: &CoefficientState,
    p: &[C64],
    t: f64,
) -> Result<Vec<C64>, LoewnerError> {
    if p.len() != state.dim() {
        return Err(LoewnerError::DimensionMismatch {
            expected: state.dim(),
            found: p.len(),
        });
    }
    let n = state.dim();
    let w = u_series(&state.c).scale(&C64::new((-t).exp(), 0.0));
    let mut p_series = TruncatedSeries::one(n);
    for (k, pk) in p.iter().enumerate() {
        p_series.set_coeff(k + 1, *pk);
    }
    // p(w(z)) is needed only to order n: the final multiplication by w
    // shifts degrees up by at least one.
    let q = p_series
        .compose(&w.truncated(n))
        .expect("w has no constant term");
    let g = w.mul(&q.zero_extended(n + 1));
    let et = t.exp();
    Ok((1..=n)
        .map(|m| state.c[m - 1] - g.coeff(m + 1) * et)
        .collect())
}

/// Right-hand side `(psibar-dot_1, ..., psibar-dot_n)` of the adjoint
/// system, evaluated from the conjugated adjoint vector `psi_bar`.
///
/// `h(z) = p(w) + w p'(w) = 1 + sum_k (k+1) p_k e^{-kt} u^k` and
/// `psibar-dot_j = sum_{k=j+1}^n psibar_k [z^{k-j}] h`; the diagonal
/// `[z^0] h = 1` term cancels the `-psibar_j` of the raw adjoint equation,
/// and `psibar-dot_n = 0` always.
pub fn adjoint_rhs_bar(psi_bar: &[C64], c: &[C64], p: &[C64], t: f64) -> Vec<C64> {
    let n = c.len();
    debug_assert_eq!(psi_bar.len(), n);
    debug_assert_eq!(p.len(), n);
    if n <= 1 {
        return vec![C64::new(0.0, 0.0); n];
    }
    let u = u_series(c).truncated(n - 1);
    let mut power = TruncatedSeries::one(n - 1);
    let mut h = TruncatedSeries::one(n - 1);
    for (k, pk) in p.iter().enumerate() {
        power = power.mul(&u); // u^{k+1}
        if pk.re == 0.0 && pk.im == 0.0 {
            continue;
        }
        let factor = pk * (k as f64 + 2.0) * (-(k as f64 + 1.0) * t).exp();
        h = h.add(&power.scale(&factor));
    }
    (1..=n)
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for k in (j + 1)..=n {
                acc += psi_bar[k - 1] * h.coeff(k - j);
            }
            acc
        })
        .collect()
}

/// Adjoint right-hand side from stored (un-conjugated) states; returns the
/// derivative of the conjugated vector `psibar`.
pub fn adjoint_rhs(
    psi: &AdjointState,
    state: &CoefficientState,
    p: &[C64],
    t: f64,
) -> Result<Vec<C64>, LoewnerError> {
    if psi.dim() != state.dim() || p.len() != state.dim() {
        return Err(LoewnerError::DimensionMismatch {
            expected: state.dim(),
            found: psi.dim().max(p.len()),
        });
    }
    Ok(adjoint_rhs_bar(&psi.psi_bar(), &state.c, p, t))
}

/// Complex Hamiltonian `H = sum_k psibar_k cdot_k` of the coefficient
/// system; linear in `psibar` by construction.
pub fn hamiltonian_value(
    state: &CoefficientState,
    psi: &AdjointState,
    p: &[C64],
    t: f64,
) -> Result<C64, LoewnerError> {
    let rhs = coefficient_rhs(state, p, t)?;
    if psi.dim() != state.dim() {
        return Err(LoewnerError::DimensionMismatch {
            expected: state.dim(),
            found: psi.dim(),
        });
    }
    Ok(psi.psi_bar().iter().zip(&rhs).map(|(pb, cd)| pb * cd).sum())
}

/// Outcome of sampling `Re p` on a polar grid.
#[derive(Debug, Clone)]
pub struct CaratheodoryReport {
    /// True iff `Re p > 0` at every sampled point.
    pub positive: bool,
    /// Minimum of `Re p` over the grid.
    pub min_real: f64,
    /// Grid point `(radius, angle)` achieving the minimum.
    pub argmin: (f64, f64),
}

/// Samples `Re(1 + sum p_k z^k)` over `radii x angles`.
pub fn caratheodory_check(p: &[C64], radii: &[f64], angles: &[f64]) -> CaratheodoryReport {
    assert!(radii.iter().all(|r| *r > 0.0 && *r < 1.0), "radii in (0,1)");
    let mut series = TruncatedSeries::one(p.len());
    for (k, pk) in p.iter().enumerate() {
        series.set_coeff(k + 1, *pk);
    }
    let mut min_real = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for &r in radii {
        for &a in angles {
            let z = C64::from_polar(r, a);
            let value = series.eval(&z).re;
            if value < min_real {
                min_real = value;
                argmin = (r, a);
            }
        }
    }
    CaratheodoryReport {
        positive: min_real > 0.0,
        min_real,
        argmin,
    }
}

/// Default polar grid used by the command-line validator: radii
/// `0.1, ..., 0.9` and 64 equally spaced angles.
pub fn default_grid() -> (Vec<f64>, Vec<f64>) {
    let radii = (1..=9).map(|k| k as f64 / 10.0).collect();
    let angles = (0..64)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / 64.0)
        .collect();
    (radii, angles)
}

/// Integrates the coefficient system (optionally with the adjoint) over
/// `[0, t_end]` with `steps` fixed RK4 steps from `c0` (default origin).
///
/// When `psi0` is given, the conjugated adjoint is co-integrated and the
/// samples are stored back un-conjugated.
pub fn integrate_trajectory(
    driving: &dyn DrivingFunction,
    t_end: f64,
    steps: usize,
    c0: Option<CoefficientState>,
    psi0: Option<AdjointState>,
) -> Result<CoefficientPath, LoewnerError> {
    let n = driving.level();
    if steps == 0 || !(t_end > 0.0) {
        return Err(LoewnerError::BadGrid);
    }
    let c0 = c0.unwrap_or_else(|| CoefficientState::origin(n));
    if c0.dim() != n {
        return Err(LoewnerError::DimensionMismatch {
            expected: n,
            found: c0.dim(),
        });
    }
    if let Some(psi) = &psi0 {
        if psi.dim() != n {
            return Err(LoewnerError::DimensionMismatch {
                expected: n,
                found: psi.dim(),
            });
        }
    }
    let with_adjoint = psi0.is_some();
    let mut y0 = c0.c.clone();
    if let Some(psi) = &psi0 {
        y0.extend(psi.psi_bar());
    }

    let rhs = |t: f64, y: &[C64]| -> Vec<C64> {
        let p = driving.coefficients(t);
        let c = &y[..n];
        let mut dy = coefficient_rhs_core(c, &p, t);
        if with_adjoint {
            dy.extend(adjoint_rhs_bar(&y[n..], c, &p, t));
        }
        dy
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut adjoints = if with_adjoint {
        Some(Vec::with_capacity(steps + 1))
    } else {
        None
    };
    rk4(&y0, 0.0, t_end, steps, rhs, |_, t, y| {
        times.push(t);
        states.push(CoefficientState::new(y[..n].to_vec()));
        if let Some(adj) = adjoints.as_mut() {
            adj.push(AdjointState::new(y[n..].iter().map(C64::conj).collect()));
        }
    })
    .map_err(LoewnerError::BlowUp)?;

    Ok(CoefficientPath {
        times,
        states,
        adjoints,
    })
}

/// Complex literal shorthand.
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}
