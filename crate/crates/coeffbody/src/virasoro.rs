//! Vector fields on the circle, central extensions, and Neretin polynomials.
//!
//! A finite trigonometric polynomial `phi = a_0 + sum a_n cos n theta
//! + b_n sin n theta` represents a vector field `phi d/dtheta`. The bracket
//! `[phi_1, phi_2] = phi_1 phi_2' - phi_2 phi_1'` is computed exactly by
//! convolving exponential coefficients, and both 2-cocycles
//!
//! ```text
//! gf(phi_1, phi_2)  = (1/2pi)  int (phi_1' phi_2'' - phi_1'' phi_2')
//!                   = sum_n n^3 (a_n d_n - b_n c_n),
//! alt(phi_1, phi_2) = -(1/4pi) int (phi_1' + phi_1''') phi_2
//!                   = -(1/4) sum_n (n^3 - n) (a_n d_n - b_n c_n),
//! ```
//!
//! reduce by trigonometric orthogonality to closed rational forms — no
//! quadrature anywhere, so all identity checks are bit-exact. The two
//! cocycles are *not* equal: on `(cos n theta, sin n theta)` they give
//! `n^3` and `-(n^3 - n)/4`; they differ by normalization and by the
//! coboundary term generated by the mean of the bracket, and both satisfy
//! the 2-cocycle identity. The crate keeps both and asserts no relation
//! between them.
//!
//! Neretin polynomials are read off the fully symbolic expansion
//! `(charge z^2 / 12) S_f(z) = sum P_n z^n` for a generic normalized
//! `f = z(1 + c_1 z + ...)`; their defining recurrence
//! `L_k(P_j) = (j+k) P_{j-k} + (charge/12) k (k^2-1) delta_{jk}` is checked
//! with the Kirillov fields acting as derivations, with the central charge
//! carried as an extra formal variable.

use num::rational::BigRational;
use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::kirillov::kirillov_field;
use crate::series::{Exact, MultiPoly, Scalar, TruncatedSeries};

#[derive(Debug, Error)]
pub enum VirasoroError {
    #[error("operation requires a mean-zero field (a_0 = 0)")]
    NonzeroMean,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("table maximum must be at least 2, got {0}")]
    MaxTooSmall(usize),
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Finite trigonometric polynomial `a_0 + sum_{n>=1} a_n cos n theta
/// + b_n sin n theta` with exact rational coefficients.
///
/// Brackets of mean-zero fields can produce constants (matched-frequency
/// terms), so `a_0` is carried along even though the algebra is usually
/// restricted to mean-zero fields.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigVectorField {
    pub a0: BigRational,
    /// `cos[i]` multiplies `cos((i+1) theta)`.
    pub cos: Vec<BigRational>,
    /// `sin[i]` multiplies `sin((i+1) theta)`.
    pub sin: Vec<BigRational>,
}

impl TrigVectorField {
    pub fn zero() -> Self {
        Self {
            a0: BigRational::zero(),
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn constant(a0: BigRational) -> Self {
        let mut f = Self::zero();
        f.a0 = a0;
        f.normalize()
    }

    /// `cos(n theta)`, `n >= 1`.
    pub fn cosine(n: usize) -> Self {
        assert!(n >= 1);
        let mut f = Self::zero();
        f.cos = vec![BigRational::zero(); n];
        f.sin = vec![BigRational::zero(); n];
        f.cos[n - 1] = BigRational::one();
        f
    }

    /// `sin(n theta)`, `n >= 1`.
    pub fn sine(n: usize) -> Self {
        assert!(n >= 1);
        let mut f = Self::zero();
        f.cos = vec![BigRational::zero(); n];
        f.sin = vec![BigRational::zero(); n];
        f.sin[n - 1] = BigRational::one();
        f
    }

    pub fn from_parts(a0: BigRational, cos: Vec<BigRational>, sin: Vec<BigRational>) -> Self {
        assert_eq!(cos.len(), sin.len());
        Self { a0, cos, sin }.normalize()
    }

    fn normalize(mut self) -> Self {
        while matches!((self.cos.last(), self.sin.last()), (Some(a), Some(b)) if a.is_zero() && b.is_zero())
        {
            self.cos.pop();
            self.sin.pop();
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.cos.iter().all(Zero::is_zero) && self.sin.iter().all(Zero::is_zero)
    }

    pub fn is_mean_zero(&self) -> bool {
        self.a0.is_zero()
    }

    pub fn cos_coeff(&self, n: usize) -> BigRational {
        self.cos.get(n - 1).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn sin_coeff(&self, n: usize) -> BigRational {
        self.sin.get(n - 1).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let deg = self.degree().max(rhs.degree());
        let mut cos = vec![BigRational::zero(); deg];
        let mut sin = vec![BigRational::zero(); deg];
        for n in 1..=deg {
            cos[n - 1] = self.cos_coeff(n) + rhs.cos_coeff(n);
            sin[n - 1] = self.sin_coeff(n) + rhs.sin_coeff(n);
        }
        Self {
            a0: &self.a0 + &rhs.a0,
            cos,
            sin,
        }
        .normalize()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self {
            a0: &self.a0 * s,
            cos: self.cos.iter().map(|c| c * s).collect(),
            sin: self.sin.iter().map(|c| c * s).collect(),
        }
        .normalize()
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Termwise derivative `d/dtheta`, exact.
    pub fn derivative(&self) -> Self {
        let deg = self.degree();
        let mut cos = vec![BigRational::zero(); deg];
        let mut sin = vec![BigRational::zero(); deg];
        for n in 1..=deg {
            // (a cos + b sin)' = -n a sin + n b cos
            cos[n - 1] = self.sin_coeff(n) * rat(n as i64);
            sin[n - 1] = -self.cos_coeff(n) * rat(n as i64);
        }
        Self {
            a0: BigRational::zero(),
            cos,
            sin,
        }
        .normalize()
    }

    pub fn eval_f64(&self, theta: f64) -> f64 {
        let mut v = rational_to_f64(&self.a0);
        for n in 1..=self.degree() {
            let nt = n as f64 * theta;
            v += rational_to_f64(&self.cos[n - 1]) * nt.cos()
                + rational_to_f64(&self.sin[n - 1]) * nt.sin();
        }
        v
    }

    /// Exponential coefficients `F_m` of `phi = sum F_m e^{i m theta}` for
    /// `|m| <= bound`, stored at index `m + bound`.
    fn exp_coeffs(&self, bound: usize) -> Vec<Exact> {
        let mut out = vec![<Exact as Scalar>::zero(); 2 * bound + 1];
        out[bound] = Exact::new(self.a0.clone(), BigRational::zero());
        let half = ratio(1, 2);
        for n in 1..=self.degree().min(bound) {
            let a = self.cos_coeff(n);
            let b = self.sin_coeff(n);
            out[bound + n] = Exact::new(&a * &half, -&b * &half);
            out[bound - n] = Exact::new(&a * &half, &b * &half);
        }
        out
    }

    fn from_exp_coeffs(coeffs: &[Exact], bound: usize) -> Self {
        let a0 = coeffs[bound].re.clone();
        debug_assert!(coeffs[bound].im.is_zero());
        let mut cos = vec![BigRational::zero(); bound];
        let mut sin = vec![BigRational::zero(); bound];
        for n in 1..=bound {
            let plus = &coeffs[bound + n];
            let minus = &coeffs[bound - n];
            cos[n - 1] = &plus.re + &minus.re;
            sin[n - 1] = &minus.im - &plus.im;
            debug_assert_eq!(&plus.re - &minus.re, BigRational::zero());
            debug_assert_eq!(&plus.im + &minus.im, BigRational::zero());
        }
        Self { a0, cos, sin }.normalize()
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let numer = r.numer();
    let denom = r.denom();
    // small rationals only; lossless enough for oracles
    let n = numer.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let d = denom.to_string().parse::<f64>().unwrap_or(f64::NAN);
    n / d
}

/// `[phi_1, phi_2] = phi_1 phi_2' - phi_2 phi_1'`, exact; the result degree
/// is at most the sum of the operand degrees.
pub fn trig_bracket(f1: &TrigVectorField, f2: &TrigVectorField) -> TrigVectorField {
    let bound = f1.degree() + f2.degree();
    if bound == 0 {
        return TrigVectorField::zero();
    }
    let e1 = f1.exp_coeffs(bound);
    let e2 = f2.exp_coeffs(bound);
    let mut out = vec![<Exact as Scalar>::zero(); 2 * bound + 1];
    let b = bound as i64;
    for m1 in -b..=b {
        let a = &e1[(m1 + b) as usize];
        if Scalar::is_zero(a) {
            continue;
        }
        for m2 in -b..=b {
            let m = m1 + m2;
            if m.abs() > b {
                continue;
            }
            let c = &e2[(m2 + b) as usize];
            if Scalar::is_zero(c) {
                continue;
            }
            // phi_1 phi_2' - phi_2 phi_1' at (m1, m2): i (m2 - m1) F_{m1} G_{m2}
            let factor = Exact::new(BigRational::zero(), rat(m2 - m1));
            let idx = (m + b) as usize;
            out[idx] = out[idx].add(&a.mul(c).mul(&factor));
        }
    }
    TrigVectorField::from_exp_coeffs(&out, bound)
}

/// Gelfand-Fuchs cocycle
/// `(1/2pi) int (phi_1' phi_2'' - phi_1'' phi_2') dtheta`, reduced by
/// orthogonality to `sum_n n^3 (a_n d_n - b_n c_n)`.
pub fn gelfand_fuchs(f1: &TrigVectorField, f2: &TrigVectorField) -> BigRational {
    let deg = f1.degree().min(f2.degree());
    let mut total = BigRational::zero();
    for n in 1..=deg {
        let n3 = rat((n * n * n) as i64);
        total += n3 * (f1.cos_coeff(n) * f2.sin_coeff(n) - f1.sin_coeff(n) * f2.cos_coeff(n));
    }
    total
}

/// The integration-by-parts cocycle
/// `-(1/4pi) int (phi_1' + phi_1''') phi_2 dtheta
///  = -(1/4) sum_n (n^3 - n)(a_n d_n - b_n c_n)`.
///
/// Satisfies the 2-cocycle identity but differs from [`gelfand_fuchs`] in
/// normalization and by a coboundary (the `n`-linear term); no equality
/// between the two is asserted anywhere.
pub fn cocycle_alt(f1: &TrigVectorField, f2: &TrigVectorField) -> BigRational {
    let deg = f1.degree().min(f2.degree());
    let quarter = ratio(-1, 4);
    let mut total = BigRational::zero();
    for n in 1..=deg {
        let w = rat((n * n * n) as i64 - n as i64);
        total += w * (f1.cos_coeff(n) * f2.sin_coeff(n) - f1.sin_coeff(n) * f2.cos_coeff(n));
    }
    total * quarter
}

/// Element `(field, center)` of the centrally extended algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct VirasoroElement {
    pub field: TrigVectorField,
    pub center: BigRational,
}

impl VirasoroElement {
    pub fn new(field: TrigVectorField, center: BigRational) -> Self {
        Self { field, center }
    }

    pub fn from_field(field: TrigVectorField) -> Self {
        Self {
            field,
            center: BigRational::zero(),
        }
    }
}

/// Bracket of the central extension with charge `c`:
/// `[(phi_1, a), (phi_2, b)] = ([phi_1, phi_2], (c/12) gf(phi_1, phi_2))`.
pub fn virasoro_bracket(
    x: &VirasoroElement,
    y: &VirasoroElement,
    charge: &BigRational,
) -> VirasoroElement {
    VirasoroElement {
        field: trig_bracket(&x.field, &y.field),
        center: charge * ratio(1, 12) * gelfand_fuchs(&x.field, &y.field),
    }
}

/// Complex structure `J` on mean-zero fields:
/// `a_n cos + b_n sin  ->  -a_n sin + b_n cos`; `J^2 = -id`.
pub fn complex_structure_j(f: &TrigVectorField) -> Result<TrigVectorField, VirasoroError> {
    if !f.is_mean_zero() {
        return Err(VirasoroError::NonzeroMean);
    }
    let deg = f.degree();
    let mut cos = vec![BigRational::zero(); deg];
    let mut sin = vec![BigRational::zero(); deg];
    for n in 1..=deg {
        cos[n - 1] = f.sin_coeff(n);
        sin[n - 1] = -f.cos_coeff(n);
    }
    Ok(TrigVectorField {
        a0: BigRational::zero(),
        cos,
        sin,
    }
    .normalize())
}

/// Coefficients of `phi - i J(phi) = sum (a_n - i b_n) e^{i n theta}`,
/// the boundary values of a holomorphic extension.
pub fn holomorphic_coefficients(f: &TrigVectorField) -> Result<Vec<Exact>, VirasoroError> {
    let j = complex_structure_j(f)?;
    let _ = j; // the closed form below is what J-diagonalization produces
    Ok((1..=f.degree())
        .map(|n| Exact::new(f.cos_coeff(n), -f.sin_coeff(n)))
        .collect())
}

/// Field with complex coefficients, kept as a `(re, im)` pair of real
/// fields; used for the complexified basis `e_n = -i e^{i n theta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrigField {
    pub re: TrigVectorField,
    pub im: TrigVectorField,
}

impl ComplexTrigField {
    /// The basis element `e_n = -i e^{i n theta} = sin(n theta)
    /// - i cos(n theta)` (with `sin(-n) = -sin(n)`).
    pub fn e_basis(n: i64) -> Self {
        if n == 0 {
            return Self {
                re: TrigVectorField::zero(),
                im: TrigVectorField::constant(rat(-1)),
            };
        }
        let k = n.unsigned_abs() as usize;
        let re = if n > 0 {
            TrigVectorField::sine(k)
        } else {
            TrigVectorField::sine(k).neg()
        };
        let im = TrigVectorField::cosine(k).neg();
        Self { re, im }
    }

    pub fn scale(&self, s: &Exact) -> Self {
        // (re + i im)(s_re + i s_im)
        Self {
            re: self.re.scale(&s.re).sub(&self.im.scale(&s.im)),
            im: self.re.scale(&s.im).add(&self.im.scale(&s.re)),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// Complex-bilinear extension of the bracket.
pub fn complex_trig_bracket(x: &ComplexTrigField, y: &ComplexTrigField) -> ComplexTrigField {
    ComplexTrigField {
        re: trig_bracket(&x.re, &y.re).sub(&trig_bracket(&x.im, &y.im)),
        im: trig_bracket(&x.re, &y.im).add(&trig_bracket(&x.im, &y.re)),
    }
}

/// Complex-bilinear extension of [`cocycle_alt`].
pub fn complex_cocycle_alt(x: &ComplexTrigField, y: &ComplexTrigField) -> Exact {
    Exact::new(
        cocycle_alt(&x.re, &y.re) - cocycle_alt(&x.im, &y.im),
        cocycle_alt(&x.re, &y.im) + cocycle_alt(&x.im, &y.re),
    )
}

/// Central term of `[e_n, e_m]` with charge `c`, computed from the
/// complexified cocycle.
///
/// The basis change from real fields to `e_n` rescales the cocycle by
/// `kappa = 2i` (fixed once by evaluating at `n = 2`); with that
/// normalization the value is `(c/12) n (n^2 - 1) delta_{n,-m}`, which the
/// tests verify rather than assume.
pub fn e_basis_center_term(n: i64, m: i64, charge: &BigRational) -> Exact {
    let alt = complex_cocycle_alt(&ComplexTrigField::e_basis(n), &ComplexTrigField::e_basis(m));
    let kappa = Exact::new(BigRational::zero(), rat(2)); // 2i
    let scale = Exact::new(charge * ratio(1, 12), BigRational::zero());
    scale.mul(&kappa.mul(&alt))
}

/// Table of Neretin polynomials `P_0, ..., P_max`.
///
/// Variables `0..max` are `c_1, ..., c_max`; variable `max` is the central
/// charge, carried symbolically so every identity can be checked with the
/// charge as a free parameter.
#[derive(Debug, Clone)]
pub struct NeretinTable {
    pub max: usize,
    pub polys: Vec<MultiPoly>,
}

impl NeretinTable {
    /// Index of the formal charge variable.
    pub fn charge_var(&self) -> usize {
        self.max
    }

    pub fn poly(&self, j: usize) -> &MultiPoly {
        &self.polys[j]
    }

    /// Substitutes a numeric charge into every polynomial.
    pub fn with_charge(&self, charge: Exact) -> Vec<MultiPoly> {
        let c = MultiPoly::constant(charge);
        self.polys
            .iter()
            .map(|p| p.substitute(self.max, &c))
            .collect()
    }
}

/// Builds the Neretin table from the fully symbolic Schwarzian expansion:
/// `P_j = (charge/12) [S_f]_{j-2}` for `j >= 2` and `P_0 = P_1 = 0`.
pub fn neretin_polynomials(max: usize) -> Result<NeretinTable, VirasoroError> {
    if max < 2 {
        return Err(VirasoroError::MaxTooSmall(max));
    }
    // f = z (1 + c_1 z + ... + c_max z^max) with polynomial coefficients
    let mut coeffs: Vec<MultiPoly> = vec![MultiPoly::zero(), MultiPoly::constant_int(1)];
    for k in 1..=max {
        coeffs.push(MultiPoly::var(k - 1));
    }
    let f = TruncatedSeries::from_coeffs(coeffs);
    let schwarzian = f
        .schwarzian()
        .expect("generic normalized series is invertible");
    let charge_over_12 = MultiPoly::var(max).scale(&crate::series::exact_ratio(1, 12));
    let mut polys = vec![MultiPoly::zero(), MultiPoly::zero()];
    for j in 2..=max {
        polys.push(schwarzian.coeff(j - 2).mul(&charge_over_12));
    }
    Ok(NeretinTable { max, polys })
}

/// Residual of the defining recurrence:
/// `L_k(P_j) - (j + k) P_{j-k} - (charge/12) k (k^2 - 1) delta_{jk}`;
/// the zero polynomial exactly when the recurrence holds.
pub fn neretin_recurrence_residual(
    table: &NeretinTable,
    k: usize,
    j: usize,
) -> Result<MultiPoly, VirasoroError> {
    if k < 1 || k > table.max || j > table.max {
        return Err(VirasoroError::IndexOutOfRange(format!("k = {k}, j = {j}")));
    }
    let field = kirillov_field(k, table.max).expect("index checked");
    let mut residual = field.apply(table.poly(j));
    if j >= k {
        // P_0 = P_1 = 0 make the low cases vanish automatically.
        residual = residual.sub(&table.poly(j - k).scale(&crate::series::exact_int(
            (j + k) as i64,
            0,
        )));
    }
    if j == k {
        let weight = ratio((k * k * k - k) as i64, 12);
        let central = MultiPoly::var(table.max)
            .scale(&Exact::new(weight, BigRational::zero()));
        residual = residual.sub(&central);
    }
    Ok(residual)
}
