//! Coefficient bodies `M_n` of univalent functions, computationally.
//!
//! The crate implements the algebra and dynamics that live on the space of
//! initial Taylor coefficients `(c_1, ..., c_n)` of normalized univalent
//! functions `f(z) = z(1 + c_1 z + c_2 z^2 + ...)`:
//!
//! * [`series`] — truncated power series and exact multivariate polynomials,
//!   the carriers for everything below;
//! * [`loewner`] — the Loewner-Kufarev coefficient ODE, its adjoint system,
//!   and Caratheodory driving terms;
//! * [`integrals`] — first integrals of the coefficient system, the
//!   triangular transform relating them to the adjoint variables, and the
//!   Lie-Poisson bracket;
//! * [`kirillov`] — Kirillov vector fields `L_j` on `M_n`, their commutator
//!   table, the grading of the tangent bundle, and the Goluzin-Schiffer
//!   variation;
//! * [`geodesics`] — the sub-Riemannian Hamiltonian flow spanned by
//!   `(L_1, L_2)`, horizontality checks, and the closed-form `M_3` geodesics;
//! * [`forms`] — the dual 1-form basis, the `eta` forms cutting out the
//!   distribution, and enough exterior calculus to verify the contact
//!   identity;
//! * [`virasoro`] — vector fields on the circle, the Witt/Virasoro brackets,
//!   Gelfand-Fuchs cocycles, and Neretin polynomials.
//!
//! Identity checks are carried out in exact rational-complex arithmetic;
//! ODE work uses `f64` mirrors of the same operations.

pub mod forms;
pub mod geodesics;
pub mod integrals;
pub mod kirillov;
pub mod loewner;
mod ode;
pub mod series;
pub mod virasoro;

pub use series::{Exact, MultiPoly, Scalar, TruncatedSeries, C64};
