//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Coefficients are `BigRational`, so sums, products, partial derivatives and
//! Lie brackets built on top of them never round. Floating point appears only
//! at evaluation, after the value has been computed exactly.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Hard ceiling on the number of stored terms a product or composition may
/// produce. Iterated brackets can blow up combinatorially; failing loudly
/// beats thrashing.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Exponent multi-index, ordered graded-lexicographically (total degree
/// first, then lexicographic). This makes `BTreeMap` iteration — and hence
/// printing — canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `nvars` variables over the rationals.
///
/// Invariant: no stored zero coefficients, and every exponent vector has
/// length `nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(nvars), c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Poly::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn from_ratio(nvars: usize, numer: i64, denom: i64) -> Self {
        Poly::constant(
            nvars,
            BigRational::new(BigInt::from(numer), BigInt::from(denom)),
        )
    }

    pub fn var(nvars: usize, index: usize) -> Result<Self> {
        if index >= nvars {
            return Err(Error::VariableOutOfRange { index, nvars });
        }
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial::var(nvars, index), BigRational::one());
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: BigRational) {
        debug_assert_eq!(mono.0.len(), self.nvars);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_nvars(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    pub fn mul_capped(&self, other: &Poly, cap: usize) -> Result<Poly> {
        self.check_nvars(other)?;
        if self
            .terms
            .len()
            .saturating_mul(other.terms.len())
            > cap.saturating_mul(4)
        {
            // Even before merging, the raw product is hopeless.
            return Err(Error::TermCapExceeded { cap });
        }
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
            if out.terms.len() > cap {
                return Err(Error::TermCapExceeded { cap });
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = Poly::zero(self.nvars);
        for (m, k) in &self.terms {
            out.terms.insert(m.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Result<Poly> {
        self.pow_capped(n, DEFAULT_TERM_CAP)
    }

    pub fn pow_capped(&self, n: u32, cap: usize) -> Result<Poly> {
        let mut out = Poly::constant(self.nvars, BigRational::one());
        for _ in 0..n {
            out = out.mul_capped(self, cap)?;
        }
        Ok(out)
    }

    /// Exact formal partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Result<Poly> {
        if var >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] = e - 1;
            out.terms
                .insert(Monomial(exps), c * BigRational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational> {
        let (numer, denom) = self.eval_parts(point)?;
        Ok(BigRational::new(numer, denom))
    }

    /// Exact value as an unreduced numerator/denominator pair. The inner
    /// loop is pure integer arithmetic over a common denominator, so no
    /// gcd work happens per term.
    pub(crate) fn eval_parts(&self, point: &[BigRational]) -> Result<(BigInt, BigInt)> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        if self.terms.is_empty() {
            return Ok((BigInt::from(0), BigInt::from(1)));
        }
        let mut max_exp = vec![0u32; self.nvars];
        for m in self.terms.keys() {
            for (v, e) in m.0.iter().enumerate() {
                max_exp[v] = max_exp[v].max(*e);
            }
        }
        // Integer power tables for numerators and denominators; numerator
        // and denominator of a reduced rational stay coprime under powers,
        // so nothing needs re-reduction.
        let mut npow: Vec<Vec<BigInt>> = Vec::with_capacity(self.nvars);
        let mut dpow: Vec<Vec<BigInt>> = Vec::with_capacity(self.nvars);
        for (v, &me) in max_exp.iter().enumerate() {
            let mut ntab = Vec::with_capacity(me as usize + 1);
            let mut dtab = Vec::with_capacity(me as usize + 1);
            ntab.push(BigInt::from(1));
            dtab.push(BigInt::from(1));
            for e in 1..=me as usize {
                let n = &ntab[e - 1] * point[v].numer();
                let d = &dtab[e - 1] * point[v].denom();
                ntab.push(n);
                dtab.push(d);
            }
            npow.push(ntab);
            dpow.push(dtab);
        }
        // Common denominator of the coefficients.
        let mut coeff_lcm = BigInt::from(1);
        for c in self.terms.values() {
            coeff_lcm = coeff_lcm.lcm(c.denom());
        }
        let mut acc = BigInt::from(0);
        for (m, c) in &self.terms {
            let mut t = c.numer() * (&coeff_lcm / c.denom());
            for (v, &e) in m.0.iter().enumerate() {
                let e = e as usize;
                if e > 0 {
                    t *= &npow[v][e];
                }
                // Scale up to the common denominator of this variable.
                let deficit = max_exp[v] as usize - e;
                if deficit > 0 {
                    t *= &dpow[v][deficit];
                }
            }
            acc += t;
        }
        let mut denom = coeff_lcm;
        for (v, &me) in max_exp.iter().enumerate() {
            if me > 0 {
                denom *= &dpow[v][me as usize];
            }
        }
        Ok((acc, denom))
    }

    /// Exact evaluation rounded to `f64`, for an already-rationalized point.
    pub fn eval_prepared(&self, point: &[BigRational]) -> Result<f64> {
        let (numer, denom) = self.eval_parts(point)?;
        Ok(ratio_to_f64(&numer, &denom))
    }

    /// Evaluation at a floating-point point: the point is converted to exact
    /// rationals, the value is computed exactly, and only the result is
    /// rounded back.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let q = rationalize_point(point)?;
        if q.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: q.len(),
            });
        }
        self.eval_prepared(&q)
    }

    /// Substitute one polynomial per variable.
    pub fn compose(&self, subs: &[Poly]) -> Result<Poly> {
        self.compose_capped(subs, DEFAULT_TERM_CAP)
    }

    pub fn compose_capped(&self, subs: &[Poly], cap: usize) -> Result<Poly> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: subs.len(),
            });
        }
        let out_nvars = match subs.first() {
            Some(p) => p.nvars,
            None => return Ok(Poly::zero(0)),
        };
        for s in subs {
            if s.nvars != out_nvars {
                return Err(Error::DimensionMismatch {
                    expected: out_nvars,
                    found: s.nvars,
                });
            }
        }
        let mut max_exp = vec![0u32; self.nvars];
        for m in self.terms.keys() {
            for (v, e) in m.0.iter().enumerate() {
                max_exp[v] = max_exp[v].max(*e);
            }
        }
        let mut powers: Vec<Vec<Poly>> = Vec::with_capacity(self.nvars);
        for (v, &me) in max_exp.iter().enumerate() {
            let mut tab = Vec::with_capacity(me as usize + 1);
            tab.push(Poly::constant(out_nvars, BigRational::one()));
            for e in 1..=me {
                let prev = tab[(e - 1) as usize].clone();
                tab.push(prev.mul_capped(&subs[v], cap)?);
            }
            powers.push(tab);
        }
        let mut acc = Poly::zero(out_nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(out_nvars, c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul_capped(&powers[v][e as usize], cap)?;
                }
            }
            acc = acc.add(&t)?;
            if acc.terms.len() > cap {
                return Err(Error::TermCapExceeded { cap });
            }
        }
        Ok(acc)
    }
}

/// Convert coordinates to exact rationals; every finite float is rational.
pub fn rationalize_point(point: &[f64]) -> Result<Vec<BigRational>> {
    point
        .iter()
        .map(|&x| BigRational::from_float(x).ok_or(Error::NonFinitePoint))
        .collect()
}

/// Round an exact rational to the nearest representable `f64`, robust to
/// numerators and denominators far outside the `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

/// Same rounding for an unreduced numerator/denominator pair.
pub fn ratio_to_f64(numer: &BigInt, denom: &BigInt) -> f64 {
    if numer.is_zero() {
        return 0.0;
    }
    let nbits = numer.bits();
    let dbits = denom.bits();
    if nbits <= 900 && dbits <= 900 {
        let n = numer.to_f64().unwrap_or(f64::NAN);
        let d = denom.to_f64().unwrap_or(f64::NAN);
        return n / d;
    }
    // Strip common scale so both halves fit comfortably in f64.
    let shift = nbits.max(dbits) - 500;
    let n = (numer >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

impl fmt::Display for Poly {
    /// Canonical form: descending graded-lexicographic term order,
    /// `-` folded into the separating sign, unit coefficients omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = m.degree() == 0;
            if !abs.is_one() || is_const {
                if abs.denom().is_one() {
                    write!(f, "{}", abs.numer())?;
                } else {
                    write!(f, "{}/{}", abs.numer(), abs.denom())?;
                }
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut first_var = true;
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "*")?;
                }
                first_var = false;
                write!(f, "{}", var_name(v, self.nvars))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Display name of a variable: `x, y, z, w` for up to four variables,
/// `x1..xn` otherwise. The parser accepts both spellings.
pub fn var_name(index: usize, nvars: usize) -> String {
    if nvars <= 4 {
        ["x", "y", "z", "w"][index].to_string()
    } else {
        format!("x{}", index + 1)
    }
}
