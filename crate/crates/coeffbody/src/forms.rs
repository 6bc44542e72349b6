//! Differential forms on `M_n` dual to the Kirillov frame.
//!
//! The 1-forms `omega_k` defined by the recurrence
//!
//! ```text
//! omega_1 = dc_1,
//! omega_k = dc_k - 2 c_1 omega_{k-1} - 3 c_2 omega_{k-2} - ... - k c_{k-1} omega_1,
//! ```
//!
//! satisfy `omega_k(L_j) = delta_{kj}`. The forms
//! `eta_k = dc_k - k c_{k-1} omega_1 - (k-1) c_{k-2} omega_2` (for `k >= 3`)
//! annihilate `L_1` and `L_2` and cut out the distribution. Everything here
//! is holomorphic-formal: the `c_k` are independent variables and the
//! exterior differential acts through `d/dc_k` only, so all identities -
//! duality, the kernel property, `eta_3 ^ d eta_3 = dc_1 ^ dc_2 ^ dc_3` -
//! are checked exactly.
//!
//! Degrees above three never occur in those identities, so storage stops
//! there.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kirillov::PolyVectorField;
use crate::series::MultiPoly;

#[derive(Debug, Error)]
pub enum FormsError {
    #[error("operation needs a form of degree {expected}, got {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("wedge degree {0} exceeds the supported maximum of 3")]
    DegreeOverflow(usize),
    #[error("eta forms require n >= 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("form and field dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Exterior form of degree 1..=3 with polynomial coefficients.
///
/// Keys are strictly increasing 1-based coordinate index tuples; the stored
/// coefficient multiplies `dc_{i1} ^ dc_{i2} ^ ...` for the sorted tuple,
/// with antisymmetry folded into sign normalization on insert.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyForm {
    pub n: usize,
    pub degree: usize,
    terms: BTreeMap<Vec<usize>, MultiPoly>,
}

impl PolyForm {
    pub fn zero(n: usize, degree: usize) -> Self {
        assert!((1..=3).contains(&degree));
        Self {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The coordinate differential `dc_index` (1-based).
    pub fn dc(n: usize, index: usize) -> Self {
        assert!((1..=n).contains(&index));
        let mut form = Self::zero(n, 1);
        form.terms.insert(vec![index], MultiPoly::constant_int(1));
        form
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &MultiPoly)> {
        self.terms.iter()
    }

    /// Coefficient of the (sorted) index tuple.
    pub fn coefficient(&self, indices: &[usize]) -> MultiPoly {
        self.terms
            .get(indices)
            .cloned()
            .unwrap_or_else(MultiPoly::zero)
    }

    /// Inserts `coeff * dc_{indices}`, sorting the indices and folding the
    /// permutation sign into the coefficient; repeated indices vanish.
    pub fn insert(&mut self, indices: &[usize], coeff: MultiPoly) {
        if coeff.is_zero() {
            return;
        }
        let Some((sorted, sign)) = sort_with_sign(indices) else {
            return;
        };
        debug_assert_eq!(sorted.len(), self.degree);
        let signed = if sign < 0 { coeff.neg() } else { coeff };
        use std::collections::btree_map::Entry;
        match self.terms.entry(sorted) {
            Entry::Vacant(e) => {
                e.insert(signed);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&signed);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.degree, rhs.degree);
        let mut out = self.clone();
        for (idx, coeff) in &rhs.terms {
            out.insert(idx, coeff.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.degree, rhs.degree);
        let mut out = self.clone();
        for (idx, coeff) in &rhs.terms {
            out.insert(idx, coeff.neg());
        }
        out
    }

    pub fn scale_poly(&self, p: &MultiPoly) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        for (idx, coeff) in &self.terms {
            out.insert(idx, coeff.mul(p));
        }
        out
    }

    /// Renders the form with `c`-style variable names in canonical order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let name = |i: usize| format!("c{}", i + 1);
        self.terms
            .iter()
            .map(|(idx, coeff)| {
                let basis = idx
                    .iter()
                    .map(|i| format!("dc{i}"))
                    .collect::<Vec<_>>()
                    .join("^");
                format!("({}) {}", coeff.render(&name), basis)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Sorts indices, returning the permutation sign; `None` when an index
/// repeats (the wedge of a differential with itself vanishes).
fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    // insertion sort, counting swaps
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Dual basis `omega_1, ..., omega_n` of the Kirillov frame, expanded to
/// explicit `dc` coordinates.
pub fn dual_basis_forms(n: usize) -> Vec<PolyForm> {
    let mut omegas: Vec<PolyForm> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut form = PolyForm::dc(n, k);
        for j in 1..k {
            // subtract (j+1) c_j omega_{k-j}
            let factor = MultiPoly::constant_int(j as i64 + 1).mul(&MultiPoly::var(j - 1));
            form = form.sub(&omegas[k - j - 1].scale_poly(&factor));
        }
        omegas.push(form);
    }
    omegas
}

/// The forms `eta_3, ..., eta_n` whose joint kernel is the distribution.
pub fn eta_forms(n: usize) -> Result<Vec<PolyForm>, FormsError> {
    if n < 3 {
        return Err(FormsError::DimensionTooSmall(n));
    }
    let omegas = dual_basis_forms(n);
    let mut etas = Vec::with_capacity(n - 2);
    for k in 3..=n {
        let mut form = PolyForm::dc(n, k);
        let f1 = MultiPoly::constant_int(k as i64).mul(&MultiPoly::var(k - 2));
        let f2 = MultiPoly::constant_int(k as i64 - 1).mul(&MultiPoly::var(k - 3));
        form = form.sub(&omegas[0].scale_poly(&f1));
        form = form.sub(&omegas[1].scale_poly(&f2));
        etas.push(form);
    }
    Ok(etas)
}

/// Pairing of a 1-form with a vector field: `sum_m coeff_m comp_m`, exact.
pub fn pair(form: &PolyForm, field: &PolyVectorField) -> Result<MultiPoly, FormsError> {
    if form.degree != 1 {
        return Err(FormsError::WrongDegree {
            expected: 1,
            found: form.degree,
        });
    }
    if form.n != field.dim() {
        return Err(FormsError::DimensionMismatch(form.n, field.dim()));
    }
    let mut out = MultiPoly::zero();
    for (idx, coeff) in &form.terms {
        out = out.add(&coeff.mul(&field.components[idx[0] - 1]));
    }
    Ok(out)
}

/// Exterior derivative of a degree 1 or 2 form:
/// `d(a dc_I) = sum_j (d_j a) dc_j ^ dc_I`, antisymmetrized.
pub fn exterior_derivative(form: &PolyForm) -> Result<PolyForm, FormsError> {
    if form.degree > 2 {
        return Err(FormsError::DegreeOverflow(form.degree + 1));
    }
    let mut out = PolyForm::zero(form.n, form.degree + 1);
    for (idx, coeff) in &form.terms {
        for j in 1..=form.n {
            let dj = coeff.partial(j - 1);
            if dj.is_zero() {
                continue;
            }
            let mut indices = vec![j];
            indices.extend_from_slice(idx);
            out.insert(&indices, dj);
        }
    }
    Ok(out)
}

/// Wedge product; the combined degree must stay within 3.
pub fn wedge(a: &PolyForm, b: &PolyForm) -> Result<PolyForm, FormsError> {
    let degree = a.degree + b.degree;
    if degree > 3 {
        return Err(FormsError::DegreeOverflow(degree));
    }
    assert_eq!(a.n, b.n);
    let mut out = PolyForm::zero(a.n, degree);
    for (ia, ca) in &a.terms {
        for (ib, cb) in &b.terms {
            let mut indices = ia.clone();
            indices.extend_from_slice(ib);
            out.insert(&indices, ca.mul(cb));
        }
    }
    Ok(out)
}
