//! Sparse multivariate polynomials with exact rational-complex coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use super::{exact_int, exact_ratio, Exact, Scalar};

/// Exponent vector of a monomial, trailing zeros trimmed.
///
/// Trimming makes the variable count implicit: a polynomial in `c_1, c_2`
/// can be multiplied with one in `c_1, ..., c_5` without any padding
/// ceremony, which matters because the same machinery serves polynomials in
/// `c` alone, in `(c, psi-bar)` pairs, and in `c` plus a central charge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        let mut e = vec![0; index + 1];
        e[index] = 1;
        Monomial(e)
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0.get(index).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, rhs: &Monomial) -> Monomial {
        let mut e = vec![0u32; self.0.len().max(rhs.0.len())];
        for (i, &x) in self.0.iter().enumerate() {
            e[i] += x;
        }
        for (i, &x) in rhs.0.iter().enumerate() {
            e[i] += x;
        }
        Monomial(e)
    }
}

/// Multivariate polynomial over exact complex rationals.
///
/// Terms are kept in a `BTreeMap` keyed by exponent vector, so iteration
/// order (and hence printing and serialization) is canonical. No stored
/// coefficient is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Exact>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Exact) -> Self {
        let mut p = Self::zero();
        if !Scalar::is_zero(&c) {
            p.terms.insert(Monomial::unit(), c);
        }
        p
    }

    pub fn constant_int(n: i64) -> Self {
        Self::constant(exact_int(n, 0))
    }

    pub fn constant_ratio(num: i64, den: i64) -> Self {
        Self::constant(exact_ratio(num, den))
    }

    /// The variable `x_index`.
    pub fn var(index: usize) -> Self {
        let mut p = Self::zero();
        p.terms.insert(Monomial::var(index), Scalar::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Exact)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest variable index that occurs, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| {
                if m.0.is_empty() {
                    None
                } else {
                    Some(m.0.len() - 1)
                }
            })
            .max()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coeff(&self, m: &Monomial) -> Exact {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Exact {
        self.coeff(&Monomial::unit())
    }

    fn insert(&mut self, m: Monomial, c: Exact) {
        if Scalar::is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if Scalar::is_zero(&sum) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), Scalar::neg(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), Scalar::neg(c)))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, s: &Exact) -> Self {
        if Scalar::is_zero(s) {
            return Self::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul(s)))
                .collect(),
        }
    }

    /// Partial derivative with respect to `x_index`.
    pub fn partial(&self, index: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[index] -= 1;
            out.insert(
                Monomial::from_exponents(exps),
                c.mul(&Exact::from_int(e as i64)),
            );
        }
        out
    }

    /// Full evaluation; `values[i]` substitutes `x_i`. Variables beyond the
    /// slice are treated as zero.
    pub fn eval(&self, values: &[Exact]) -> Exact {
        let mut acc: Exact = Scalar::zero();
        'terms: for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values.get(i).cloned().unwrap_or_else(Scalar::zero);
                if Scalar::is_zero(&v) {
                    continue 'terms;
                }
                for _ in 0..e {
                    t = t.mul(&v);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitutes a polynomial for variable `index`.
    pub fn substitute(&self, index: usize, replacement: &Self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            let mut exps = m.0.clone();
            if index < exps.len() {
                exps[index] = 0;
            }
            let mut term = MultiPoly {
                terms: BTreeMap::new(),
            };
            term.insert(Monomial::from_exponents(exps), c.clone());
            for _ in 0..e {
                term = term.mul(replacement);
            }
            out = out.add(&term);
        }
        out
    }

    /// Renders with caller-supplied variable names, canonical term order.
    pub fn render(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(name(i)),
                    _ => factors.push(format!("{}^{}", name(i), e)),
                }
            }
            let coeff = render_exact(c);
            if factors.is_empty() {
                parts.push(coeff);
            } else if c == &Scalar::one() {
                parts.push(factors.join("*"));
            } else if c == &Scalar::neg(&Scalar::one()) {
                parts.push(format!("-{}", factors.join("*")));
            } else {
                parts.push(format!("{}*{}", coeff, factors.join("*")));
            }
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }
}

/// Renders an exact complex rational compactly: real part alone when the
/// imaginary part vanishes, `a+bi` in parentheses otherwise.
pub fn render_exact(c: &Exact) -> String {
    if c.im.is_zero() {
        format!("{}", c.re)
    } else if c.re.is_zero() {
        format!("{}i", c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|i| format!("x{}", i)))
    }
}

/// Polynomials form a (non-field) coefficient ring for series; division is
/// only defined by nonzero constants, which is exactly what symbolic
/// Schwarzian expansion of a normalized series needs.
impl Scalar for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::constant_int(1)
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        MultiPoly::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        MultiPoly::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        MultiPoly::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        MultiPoly::neg(self)
    }
    fn from_int(n: i64) -> Self {
        MultiPoly::constant_int(n)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        MultiPoly::constant_ratio(num, den)
    }
    fn inverse(&self) -> Option<Self> {
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::unit()) {
                return Scalar::inverse(c).map(MultiPoly::constant);
            }
        }
        None
    }
}
