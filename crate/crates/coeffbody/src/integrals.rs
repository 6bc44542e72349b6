//! First integrals of the coefficient system and the Lie-Poisson bracket.
//!
//! Along any Loewner-Kufarev trajectory co-integrated with its adjoint, the
//! vector `L = M(c) psibar` is constant, where `M(c)` is the upper
//! unitriangular matrix with entry `(j, k) = (k - j + 1) c_{k-j}` (and
//! `c_0 = 1`):
//!
//! ```text
//! | L_1 |   | 1  2c_1  3c_2 ... n c_{n-1}     |   | psibar_1 |
//! | L_2 | = | 0  1     2c_1 ... (n-1) c_{n-2} | * | psibar_2 |
//! | ... |   |           ...                   |   |   ...    |
//! | L_n |   | 0  0     0    ... 1             |   | psibar_n |
//! ```
//!
//! The same linear forms, read as polynomials on the phase space
//! `(c, psibar)`, close under the Lie-Poisson bracket with structure
//! constants proportional to `j - k`; see [`poisson_bracket`] for the
//! orientation convention this crate computes rather than assumes.

use num::complex::Complex;
use thiserror::Error;

use crate::loewner::{AdjointState, CoefficientPath, CoefficientState};
use crate::series::{MultiPoly, Scalar, C64};

#[derive(Debug, Error)]
pub enum IntegralsError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polynomial uses variable index {index}, but phase space has only {limit} variables")]
    VariableOutOfRange { index: usize, limit: usize },
    #[error("path carries no adjoint samples")]
    MissingAdjoint,
}

/// Values of the first integrals `(L_1, ..., L_n)` at a phase-space point.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegralVector {
    pub l: Vec<C64>,
}

impl FirstIntegralVector {
    pub fn dim(&self) -> usize {
        self.l.len()
    }
}

/// Applies the unitriangular matrix `M(c)` to a vector, over any scalar.
///
/// Row `j` (1-based) of the product is `v_j + sum_{d>=1} (d+1) c_d v_{j+d}`.
pub fn triangular_apply<S: Scalar>(c: &[S], v: &[S]) -> Vec<S> {
    let n = c.len();
    assert_eq!(v.len(), n);
    (0..n)
        .map(|j| {
            let mut acc = v[j].clone();
            for d in 1..(n - j) {
                let factor = S::from_int(d as i64 + 1).mul(&c[d - 1]);
                acc = acc.add(&factor.mul(&v[j + d]));
            }
            acc
        })
        .collect()
}

/// Solves `M(c) x = l` by back-substitution; `M` is unitriangular, hence
/// always invertible, and the solve is exact over exact scalars.
pub fn triangular_solve<S: Scalar>(c: &[S], l: &[S]) -> Vec<S> {
    let n = c.len();
    assert_eq!(l.len(), n);
    let mut x = vec![S::zero(); n];
    for j in (0..n).rev() {
        let mut acc = l[j].clone();
        for d in 1..=(n - 1 - j) {
            let factor = S::from_int(d as i64 + 1).mul(&c[d - 1]);
            acc = acc.sub(&factor.mul(&x[j + d]));
        }
        x[j] = acc;
    }
    x
}

/// First integrals `L = M(c) psibar` of a phase-space point.
pub fn first_integrals(
    state: &CoefficientState,
    psi: &AdjointState,
) -> Result<FirstIntegralVector, IntegralsError> {
    if state.dim() != psi.dim() {
        return Err(IntegralsError::DimensionMismatch {
            expected: state.dim(),
            found: psi.dim(),
        });
    }
    Ok(FirstIntegralVector {
        l: triangular_apply(&state.c, &psi.psi_bar()),
    })
}

/// Recovers the adjoint from the integral values: solves `M(c) psibar = v`
/// and stores the result un-conjugated. Exact round-trip with
/// [`first_integrals`].
pub fn invert_integrals(
    state: &CoefficientState,
    v: &FirstIntegralVector,
) -> Result<AdjointState, IntegralsError> {
    if state.dim() != v.dim() {
        return Err(IntegralsError::DimensionMismatch {
            expected: state.dim(),
            found: v.dim(),
        });
    }
    let psi_bar = triangular_solve(&state.c, &v.l);
    Ok(AdjointState::new(psi_bar.iter().map(Complex::conj).collect()))
}

/// Per-component worst absolute drift `max_t |L_k(t) - L_k(0)|` of the
/// first integrals along a co-integrated path.
pub fn conservation_drift(path: &CoefficientPath) -> Result<Vec<f64>, IntegralsError> {
    let adjoints = path.adjoints.as_ref().ok_or(IntegralsError::MissingAdjoint)?;
    let n = path.dim();
    let mut drift = vec![0.0f64; n];
    let mut initial: Option<Vec<C64>> = None;
    for (state, psi) in path.states.iter().zip(adjoints) {
        let l = first_integrals(state, psi)?.l;
        match &initial {
            None => initial = Some(l),
            Some(l0) => {
                for k in 0..n {
                    drift[k] = drift[k].max((l[k] - l0[k]).norm());
                }
            }
        }
    }
    Ok(drift)
}

/// The matrix `M(c)` with exact polynomial entries (variables
/// `c_1, ..., c_n` at indices `0..n`).
#[derive(Debug, Clone)]
pub struct TriangularTransform {
    pub n: usize,
    pub entries: Vec<Vec<MultiPoly>>,
}

impl TriangularTransform {
    pub fn new(n: usize) -> Self {
        let entries = (1..=n)
            .map(|j| {
                (1..=n)
                    .map(|k| {
                        if k < j {
                            MultiPoly::zero()
                        } else if k == j {
                            MultiPoly::constant_int(1)
                        } else {
                            let d = k - j;
                            MultiPoly::constant_int(d as i64 + 1).mul(&MultiPoly::var(d - 1))
                        }
                    })
                    .collect()
            })
            .collect();
        Self { n, entries }
    }

    /// Exact determinant by Laplace expansion with zero pruning.
    pub fn determinant(&self) -> MultiPoly {
        determinant(&self.entries)
    }
}

/// Laplace expansion along the first column, pruning zero entries; exact and
/// adequate for the sparse matrices in this crate.
pub fn determinant(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::constant_int(1);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = MultiPoly::zero();
    for row in 0..n {
        if m[row][0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != row)
            .map(|(_, r)| r[1..].to_vec())
            .collect();
        let cofactor = m[row][0].mul(&determinant(&minor));
        if row % 2 == 0 {
            det = det.add(&cofactor);
        } else {
            det = det.sub(&cofactor);
        }
    }
    det
}

/// The first integral `L_j` as a polynomial on the phase space: variables
/// `0..n` are `c_1..c_n` and variables `n..2n` are `psibar_1..psibar_n`.
pub fn l_polynomial(j: usize, n: usize) -> MultiPoly {
    assert!((1..=n).contains(&j));
    let mut p = MultiPoly::var(n + j - 1);
    for d in 1..=(n - j) {
        p = p.add(
            &MultiPoly::constant_int(d as i64 + 1)
                .mul(&MultiPoly::var(d - 1))
                .mul(&MultiPoly::var(n + j + d - 1)),
        );
    }
    p
}

/// Lie-Poisson bracket on polynomials over the phase space `(c, psibar)`:
///
/// ```text
/// [f, g] = sum_k ( df/dc_k dg/dpsibar_k - df/dpsibar_k dg/dc_k ).
/// ```
///
/// With this (standard Hamilton-equation) orientation the momentum
/// polynomials close as `[L_j, L_k] = (k - j) L_{j+k}`; the coordinate
/// vector fields close with the opposite sign, `(j - k)` — the classical
/// anti-isomorphism between a momentum map and its fields. The bracket
/// table helpers compute the sign instead of assuming it.
pub fn poisson_bracket(f: &MultiPoly, g: &MultiPoly, n: usize) -> Result<MultiPoly, IntegralsError> {
    for p in [f, g] {
        if let Some(max) = p.max_var() {
            if max >= 2 * n {
                return Err(IntegralsError::VariableOutOfRange {
                    index: max,
                    limit: 2 * n,
                });
            }
        }
    }
    let mut out = MultiPoly::zero();
    for k in 0..n {
        let a = f.partial(k).mul(&g.partial(n + k));
        let b = f.partial(n + k).mul(&g.partial(k));
        out = out.add(&a).sub(&b);
    }
    Ok(out)
}

/// Structure-constant table of the first integrals under the Poisson
/// bracket: entry `(j, k)` reports whether `[L_j, L_k] = sigma (j - k)
/// L_{j+k}` holds exactly (zero right side when `j + k > n`), where `sigma`
/// is the globally computed orientation of the bracket.
#[derive(Debug, Clone)]
pub struct PoissonTable {
    pub n: usize,
    /// `+1` or `-1`: sign `sigma` fixed by evaluating `[L_1, L_2]` against
    /// `L_3` (for `n >= 3`).
    pub orientation: i64,
    /// `(j, k, exact_match)` for all ordered pairs.
    pub entries: Vec<(usize, usize, bool)>,
    pub all_match: bool,
}

/// Builds the full Poisson bracket table of `(L_1, ..., L_n)`.
pub fn poisson_table(n: usize) -> PoissonTable {
    let l: Vec<MultiPoly> = (1..=n).map(|j| l_polynomial(j, n)).collect();
    let orientation = if n >= 3 {
        let bracket = poisson_bracket(&l[0], &l[1], n).unwrap();
        // (j - k) = -1 for (1, 2): bracket == -sigma * L_3.
        if bracket == l[2].neg() {
            1
        } else if bracket == l[2] {
            -1
        } else {
            0
        }
    } else {
        1
    };
    let mut entries = Vec::new();
    let mut all_match = orientation != 0;
    for j in 1..=n {
        for k in 1..=n {
            let bracket = poisson_bracket(&l[j - 1], &l[k - 1], n).unwrap();
            let expected = if j + k <= n {
                l[j + k - 1].scale(&crate::series::exact_int(
                    orientation * (j as i64 - k as i64),
                    0,
                ))
            } else {
                MultiPoly::zero()
            };
            let ok = bracket == expected;
            all_match &= ok;
            entries.push((j, k, ok));
        }
    }
    PoissonTable {
        n,
        orientation,
        entries,
        all_match,
    }
}
