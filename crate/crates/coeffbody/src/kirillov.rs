//! Kirillov vector fields on the coefficient body and their algebra.
//!
//! In the affine coordinates `c_1, ..., c_n` the infinitesimal action of
//! circle diffeomorphisms is generated by the polynomial fields
//!
//! ```text
//! L_j = d_j + sum_{k=1}^{n-j} (k+1) c_k d_{j+k},      d_m = d/dc_m,
//! ```
//!
//! which close under the commutator as `[L_j, L_k] = (j - k) L_{j+k}`
//! (truncated to zero when `j + k > n`). Only `L_1` and `L_2` are needed to
//! bracket-generate the whole tangent space; the remaining fields organize
//! into a grading whose weighted dimension count gives the Hausdorff
//! dimension of the induced sub-Riemannian structure.
//!
//! All field algebra is exact. The only numerical operation here is the
//! Goluzin-Schiffer variation, a contour-integral representation of the
//! same action on a function `f`, kept as an independent quadrature
//! cross-check of the algebraic identity `L_k(f) = z^{k+1} f'`.

use num::rational::BigRational;
use num::{BigInt, Zero};
use thiserror::Error;

use crate::series::{exact_int, Exact, MultiPoly, Scalar, TruncatedSeries, C64};

#[derive(Debug, Error)]
pub enum KirillovError {
    #[error("field index {j} out of range 1..={n}")]
    IndexOutOfRange { j: usize, n: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("quadrature radius must lie in (0, 1), got {0}")]
    BadRadius(f64),
    #[error("series must be normalized: f(0) = 0, f'(0) = 1")]
    NotNormalized,
}

/// Vector field with polynomial components: `sum_m comp_m d/dc_m`.
///
/// Component `m` (1-based coordinate) is stored at index `m - 1`; the
/// polynomials live in the variables `c_1..c_n` at indices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    pub components: Vec<MultiPoly>,
}

impl PolyVectorField {
    pub fn zero(n: usize) -> Self {
        Self {
            components: vec![MultiPoly::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(MultiPoly::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Exact) -> Self {
        Self {
            components: self.components.iter().map(|p| p.scale(s)).collect(),
        }
    }

    /// Acts on a polynomial as a derivation: `X(p) = sum_m comp_m d_m p`.
    pub fn apply(&self, p: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, comp) in self.components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            out = out.add(&comp.mul(&p.partial(m)));
        }
        out
    }

    /// Component values at the origin `c = 0`.
    pub fn at_origin(&self) -> Vec<Exact> {
        self.components
            .iter()
            .map(MultiPoly::constant_term)
            .collect()
    }
}

/// The Kirillov field `L_j` on `M_n`.
pub fn kirillov_field(j: usize, n: usize) -> Result<PolyVectorField, KirillovError> {
    if j == 0 || j > n {
        return Err(KirillovError::IndexOutOfRange { j, n });
    }
    let mut field = PolyVectorField::zero(n);
    field.components[j - 1] = MultiPoly::constant_int(1);
    for k in 1..=(n - j) {
        field.components[j + k - 1] =
            MultiPoly::constant_int(k as i64 + 1).mul(&MultiPoly::var(k - 1));
    }
    Ok(field)
}

/// Commutator of polynomial fields:
/// `[X, Y]^m = sum_k (X^k d_k Y^m - Y^k d_k X^m)`, exact.
pub fn lie_bracket(x: &PolyVectorField, y: &PolyVectorField) -> Result<PolyVectorField, KirillovError> {
    if x.dim() != y.dim() {
        return Err(KirillovError::DimensionMismatch(x.dim(), y.dim()));
    }
    let n = x.dim();
    let mut out = PolyVectorField::zero(n);
    for m in 0..n {
        let mut comp = MultiPoly::zero();
        for k in 0..n {
            if !x.components[k].is_zero() {
                comp = comp.add(&x.components[k].mul(&y.components[m].partial(k)));
            }
            if !y.components[k].is_zero() {
                comp = comp.sub(&y.components[k].mul(&x.components[m].partial(k)));
            }
        }
        out.components[m] = comp;
    }
    Ok(out)
}

/// One row of the commutator table report.
#[derive(Debug, Clone)]
pub struct BracketEntry {
    pub j: usize,
    pub k: usize,
    /// `"(j-k)L_{j+k}"` or `"0"`.
    pub result: String,
    pub exact_match: bool,
}

/// Full commutator table of `(L_1, ..., L_n)`: checks
/// `[L_j, L_k] = (j - k) L_{j+k}` exactly, truncating to zero when
/// `j + k > n`.
pub fn bracket_table(n: usize) -> Result<Vec<BracketEntry>, KirillovError> {
    let fields: Vec<_> = (1..=n)
        .map(|j| kirillov_field(j, n))
        .collect::<Result<_, _>>()?;
    let mut entries = Vec::with_capacity(n * n);
    for j in 1..=n {
        for k in 1..=n {
            let bracket = lie_bracket(&fields[j - 1], &fields[k - 1])?;
            let (expected, label) = if j + k <= n {
                (
                    fields[j + k - 1].scale(&exact_int(j as i64 - k as i64, 0)),
                    format!("({})L_{}", j as i64 - k as i64, j + k),
                )
            } else {
                (PolyVectorField::zero(n), "0".to_string())
            };
            entries.push(BracketEntry {
                j,
                k,
                result: label,
                exact_match: bracket == expected,
            });
        }
    }
    Ok(entries)
}

/// Grading of the tangent bundle induced by the distribution
/// `D = span(L_1, L_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grading {
    pub n: usize,
    /// Field-index layers `D, D_1, D_2, ...`; the union is `{1, ..., n}`.
    pub layers: Vec<Vec<usize>>,
}

/// Layers `D = {1,2}`, `D_1 = {3}`, `D_k = {2k, 2k+1}` (clipped to `n`).
pub fn grading(n: usize) -> Result<Grading, KirillovError> {
    if n < 2 {
        return Err(KirillovError::DimensionTooSmall(n));
    }
    let mut layers = vec![vec![1, 2]];
    if n >= 3 {
        layers.push(vec![3]);
    }
    let mut k = 2;
    while 2 * k <= n {
        let mut layer = vec![2 * k];
        if 2 * k + 1 <= n {
            layer.push(2 * k + 1);
        }
        layers.push(layer);
        k += 1;
    }
    Ok(Grading { n, layers })
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Hausdorff (complex) dimension as the weighted grading sum
/// `sum_k (k+1) dim D_k` with the horizontal layer weighted 1.
pub fn hausdorff_dimension(n: usize) -> Result<BigRational, KirillovError> {
    let grading = grading(n)?;
    let mut total = BigRational::zero();
    for (k, layer) in grading.layers.iter().enumerate() {
        total += ratio((k as i64 + 1) * layer.len() as i64, 1);
    }
    Ok(total)
}

/// Closed form for the Hausdorff dimension: `((n+2)^2 - 9)/4` for odd `n`,
/// `((n+2)^2 - 8)/4` for even `n`.
pub fn hausdorff_dimension_closed_form(n: usize) -> Result<BigRational, KirillovError> {
    if n < 2 {
        return Err(KirillovError::DimensionTooSmall(n));
    }
    let m = (n as i64 + 2) * (n as i64 + 2);
    Ok(if n % 2 == 1 {
        ratio(m - 9, 4)
    } else {
        ratio(m - 8, 4)
    })
}

/// Exact rank of a matrix over the exact complex rationals.
pub fn exact_rank(mut m: Vec<Vec<Exact>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !Scalar::is_zero(&m[r][col]));
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        let inv = Scalar::inverse(&m[row][col]).expect("nonzero pivot");
        for r in (row + 1)..rows {
            if Scalar::is_zero(&m[r][col]) {
                continue;
            }
            let factor = m[r][col].mul(&inv);
            for cidx in col..cols {
                let sub = factor.mul(&m[row][cidx]);
                m[r][cidx] = m[r][cidx].sub(&sub);
            }
        }
        row += 1;
        rank += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Verifies the bracket-generating property of `(L_1, L_2)` at the origin:
/// iterated brackets are collected layer by layer and the matrix of their
/// components at `c = 0` must reach full rank `n`. Returns the fields
/// produced and the achieved rank.
pub fn bracket_generating_rank(n: usize) -> Result<(usize, usize), KirillovError> {
    if n < 2 {
        return Err(KirillovError::DimensionTooSmall(n));
    }
    let l1 = kirillov_field(1, n)?;
    let l2 = kirillov_field(2, n)?;
    let mut collected = vec![l1.clone(), l2.clone()];
    let mut frontier = collected.clone();
    for _ in 0..n {
        let mut next = Vec::new();
        for g in &frontier {
            for base in [&l1, &l2] {
                let b = lie_bracket(base, g)?;
                if !b.is_zero() {
                    next.push(b);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        collected.extend(next.iter().cloned());
        frontier = next;
        let rank = exact_rank(collected.iter().map(PolyVectorField::at_origin).collect());
        if rank == n {
            break;
        }
    }
    let rank = exact_rank(collected.iter().map(PolyVectorField::at_origin).collect());
    Ok((collected.len(), rank))
}

/// Target of the variation identity: `z^{k+1} f'(z)` truncated at the
/// order of `f`.
pub fn shifted_derivative(f: &TruncatedSeries<C64>, k: usize) -> TruncatedSeries<C64> {
    let order = f.order();
    let mut out = TruncatedSeries::zero(order);
    for j in (k + 1)..=order {
        let m = j - k; // coefficient of z^m in f' is (m) f_m... shifted below
        out.set_coeff(j, f.coeff(m) * m as f64);
    }
    out
}

/// Goluzin-Schiffer variation of `f` for the complexified basis field
/// `nu(w) = -i w^k`, evaluated by trapezoidal quadrature on `|w| = radius`.
///
/// The kernel `1/(f(w) - f(z))` is expanded geometrically in `f(z)` with
/// `|z| < |w|`, so the result is a genuine series-in, series-out map; the
/// overall phase is normalized so that the variation reproduces
/// `z^{k+1} f'(z)`.
pub fn goluzin_schiffer_variation(
    f: &TruncatedSeries<C64>,
    k: usize,
    radius: f64,
    quad_points: usize,
) -> Result<TruncatedSeries<C64>, KirillovError> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(KirillovError::BadRadius(radius));
    }
    if f.coeff(0).norm() != 0.0 || (f.coeff(1) - C64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(KirillovError::NotNormalized);
    }
    let order = f.order();
    let fprime = f.derivative();
    let minus_i = C64::new(0.0, -1.0);

    // A_m = mean over the circle of (w f'/f)^2 nu(w) f(w)^{-(m+1)}.
    let mut a = vec![C64::new(0.0, 0.0); order.max(2) - 1];
    for jq in 0..quad_points {
        let theta = 2.0 * std::f64::consts::PI * jq as f64 / quad_points as f64;
        let w = C64::from_polar(radius, theta);
        let fw = f.eval(&w);
        let dfw = fprime.eval(&w);
        let base = (w * dfw / fw) * (w * dfw / fw) * minus_i * w.powu(k as u32);
        let inv_fw = C64::new(1.0, 0.0) / fw;
        let mut weight = inv_fw;
        for am in a.iter_mut() {
            *am += base * weight;
            weight *= inv_fw;
        }
    }
    for am in a.iter_mut() {
        *am /= quad_points as f64;
    }

    // i * f^2 * sum_m A_m f^m, truncated at the order of f.
    let mut sum = TruncatedSeries::zero(order);
    let mut power = TruncatedSeries::one(order);
    for am in &a {
        sum = sum.add(&power.scale(am));
        power = power.mul(f);
    }
    Ok(f.mul(f).mul(&sum).scale(&C64::new(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn named(n: usize) -> impl Fn(usize) -> String {
        move |i| {
            assert!(i < n);
            format!("c{}", i + 1)
        }
    }

    #[test]
    fn field_at_top_index_is_plain_direction() {
        let f = kirillov_field(4, 4).unwrap();
        assert_eq!(f.components[3], MultiPoly::constant_int(1));
        assert!(f.components[..3].iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn field_one_on_m3() {
        let f = kirillov_field(1, 3).unwrap();
        assert_eq!(f.components[0].render(&named(3)), "1");
        assert_eq!(f.components[1].render(&named(3)), "2*c1");
        assert_eq!(f.components[2].render(&named(3)), "3*c2");
    }

    #[test]
    fn field_two_on_m5() {
        let f = kirillov_field(2, 5).unwrap();
        assert!(f.components[0].is_zero());
        assert_eq!(f.components[1].render(&named(5)), "1");
        assert_eq!(f.components[2].render(&named(5)), "2*c1");
        assert_eq!(f.components[3].render(&named(5)), "3*c2");
        assert_eq!(f.components[4].render(&named(5)), "4*c3");
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let f = kirillov_field(2, 6).unwrap();
        assert!(lie_bracket(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn bracket_l2_l1_gives_l3() {
        for n in 3..=6 {
            let l1 = kirillov_field(1, n).unwrap();
            let l2 = kirillov_field(2, n).unwrap();
            let l3 = kirillov_field(3, n).unwrap();
            assert_eq!(lie_bracket(&l2, &l1).unwrap(), l3, "n = {n}");
        }
    }

    #[test]
    fn full_table_matches_structure_constants() {
        for n in 2..=8 {
            let table = bracket_table(n).unwrap();
            assert!(table.iter().all(|e| e.exact_match), "n = {n}");
        }
    }

    #[test]
    fn jacobi_identity_on_random_fields() {
        let mut rng = StdRng::seed_from_u64(30);
        let n = 4;
        let mut random_field = || {
            let mut f = PolyVectorField::zero(n);
            for comp in f.components.iter_mut() {
                let mut p = MultiPoly::constant_int(rng.gen_range(-2..3));
                for _ in 0..rng.gen_range(0..3) {
                    p = p.mul(&MultiPoly::var(rng.gen_range(0..n)));
                }
                *comp = p;
            }
            f
        };
        for _ in 0..10 {
            let x = random_field();
            let y = random_field();
            let z = random_field();
            let a = lie_bracket(&x, &lie_bracket(&y, &z).unwrap()).unwrap();
            let b = lie_bracket(&y, &lie_bracket(&z, &x).unwrap()).unwrap();
            let c = lie_bracket(&z, &lie_bracket(&x, &y).unwrap()).unwrap();
            assert!(a.add(&b).add(&c).is_zero());
        }
    }

    #[test]
    fn grading_examples() {
        assert_eq!(grading(2).unwrap().layers, vec![vec![1, 2]]);
        assert_eq!(grading(3).unwrap().layers, vec![vec![1, 2], vec![3]]);
        assert_eq!(
            grading(5).unwrap().layers,
            vec![vec![1, 2], vec![3], vec![4, 5]]
        );
        assert_eq!(
            grading(7).unwrap().layers,
            vec![vec![1, 2], vec![3], vec![4, 5], vec![6, 7]]
        );
        assert!(grading(1).is_err());
    }

    #[test]
    fn grading_layers_partition_indices() {
        for n in 2..=12 {
            let g = grading(n).unwrap();
            let mut all: Vec<usize> = g.layers.concat();
            all.sort_unstable();
            assert_eq!(all, (1..=n).collect::<Vec<_>>(), "n = {n}");
        }
    }

    #[test]
    fn hausdorff_dimension_examples() {
        assert_eq!(hausdorff_dimension(3).unwrap(), ratio(4, 1));
        assert_eq!(hausdorff_dimension(4).unwrap(), ratio(7, 1));
        assert_eq!(hausdorff_dimension(7).unwrap(), ratio(18, 1));
    }

    #[test]
    fn hausdorff_weighted_sum_equals_closed_form() {
        for n in 2..=12 {
            assert_eq!(
                hausdorff_dimension(n).unwrap(),
                hausdorff_dimension_closed_form(n).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn bracket_generating_reaches_full_rank() {
        for n in 2..=8 {
            let (_, rank) = bracket_generating_rank(n).unwrap();
            assert_eq!(rank, n, "n = {n}");
        }
    }

    #[test]
    fn variation_of_identity_map() {
        let f = TruncatedSeries::<C64>::var(4);
        let got = goluzin_schiffer_variation(&f, 1, 0.5, 128).unwrap();
        let want = shifted_derivative(&f, 1); // z^2
        assert!(got.max_coeff_distance(&want) < 1e-12);
    }

    #[test]
    fn variation_quadratic_example() {
        // f = z + 0.1 z^2, k = 1 -> z^2 + 0.2 z^3.
        let mut f = TruncatedSeries::<C64>::var(4);
        f.set_coeff(2, C64::new(0.1, 0.0));
        let got = goluzin_schiffer_variation(&f, 1, 0.5, 256).unwrap();
        let want = shifted_derivative(&f, 1);
        assert!((got.coeff(2) - C64::new(1.0, 0.0)).norm() < 1e-8);
        assert!((got.coeff(3) - C64::new(0.2, 0.0)).norm() < 1e-8);
        assert!(got.max_coeff_distance(&want) < 1e-8);
    }

    #[test]
    fn variation_cubic_example() {
        // f = z + 0.05 z^3, k = 2 -> z^3 + 0.15 z^5.
        let mut f = TruncatedSeries::<C64>::var(6);
        f.set_coeff(3, C64::new(0.05, 0.0));
        let got = goluzin_schiffer_variation(&f, 2, 0.5, 256).unwrap();
        let want = shifted_derivative(&f, 2);
        assert!((got.coeff(3) - C64::new(1.0, 0.0)).norm() < 1e-8);
        assert!((got.coeff(5) - C64::new(0.15, 0.0)).norm() < 1e-8);
        assert!(got.max_coeff_distance(&want) < 1e-8);
    }

    #[test]
    fn variation_quadrature_converges() {
        let mut f = TruncatedSeries::<C64>::var(6);
        f.set_coeff(2, C64::new(0.21, 0.1));
        f.set_coeff(3, C64::new(-0.07, 0.05));
        f.set_coeff(4, C64::new(0.02, -0.04));
        let want = shifted_derivative(&f, 1);
        let residual = |pts: usize| {
            goluzin_schiffer_variation(&f, 1, 0.5, pts)
                .unwrap()
                .max_coeff_distance(&want)
        };
        let coarse = residual(8);
        let fine = residual(16);
        assert!(
            fine * 4.0 <= coarse || fine < 1e-13,
            "coarse {coarse}, fine {fine}"
        );
    }

    #[test]
    fn variation_rejects_bad_radius() {
        let f = TruncatedSeries::<C64>::var(4);
        assert!(goluzin_schiffer_variation(&f, 1, 1.5, 64).is_err());
    }
}
