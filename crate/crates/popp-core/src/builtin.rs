//! Builtin example structures and a few maps on them.
//!
//! Shipped structures: `heisenberg` (n=3, step 2), `martinet` (n=3, singular
//! on y=0), `engel` (n=4, step 3) and `carnot-k3` (three generators, n=6,
//! step 2, with Hilbert-Schmidt-orthonormal bracket matrices).

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::maps::PolyMap;
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::structure::SrStructure;

pub const NAMES: &[&str] = &["heisenberg", "martinet", "engel", "carnot-k3"];

pub fn structure(name: &str) -> Result<SrStructure> {
    match name {
        "heisenberg" => from_strings("heisenberg", 3, &[&["1", "0", "-1/2*y"], &["0", "1", "1/2*x"]]),
        "martinet" => from_strings("martinet", 3, &[&["1", "0", "y^2"], &["0", "1", "0"]]),
        "engel" => from_strings(
            "engel",
            4,
            &[&["1", "0", "0", "0"], &["0", "1", "x", "1/2*x^2"]],
        ),
        "carnot-k3" => carnot_k3(),
        _ => Err(Error::InvalidStructure(format!(
            "unknown builtin `{name}` (available: {})",
            NAMES.join(", ")
        ))),
    }
}

fn from_strings(name: &str, nvars: usize, fields: &[&[&str]]) -> Result<SrStructure> {
    let horizontal = fields
        .iter()
        .map(|components| {
            VectorField::new(
                components
                    .iter()
                    .map(|s| parse_poly(s, nvars, None))
                    .collect::<Result<_>>()?,
            )
        })
        .collect::<Result<_>>()?;
    SrStructure::new(name, horizontal)
}

/// Rational approximation of 1/sqrt(2), accurate to about 1e-29. The
/// bracket matrices of an exactly Hilbert-Schmidt-orthonormal triple have
/// irrational entries (their Gram matrix would need a rational square root
/// of 1/2), so the builtin carries this approximation; every downstream
/// tolerance is many orders of magnitude looser.
fn inv_sqrt2() -> BigRational {
    BigRational::new(
        BigInt::parse_bytes(b"7071067811865475244008443621", 10).unwrap(),
        BigInt::parse_bytes(b"10000000000000000000000000000", 10).unwrap(),
    )
}

fn levi_civita(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Step-2 Carnot group on three generators in exponential coordinates
/// `(x1, x2, x3, y1, y2, y3)`: the bracket matrices are `r` times the
/// rotation generators, with `r ~ 1/sqrt(2)` making them orthonormal in the
/// Hilbert-Schmidt product, so the coordinate Popp density is 1.
fn carnot_k3() -> Result<SrStructure> {
    let n = 6;
    let r = inv_sqrt2();
    let half_r = r / BigRational::from_integer(BigInt::from(2));
    let mut horizontal = Vec::with_capacity(3);
    for i in 0..3 {
        let mut components = vec![Poly::zero(n); n];
        components[i] = Poly::from_int(n, 1);
        for h in 0..3 {
            let mut p = Poly::zero(n);
            for j in 0..3 {
                let sign = levi_civita(h, i, j);
                if sign != 0 {
                    let coeff = -&half_r * BigRational::from_integer(BigInt::from(sign));
                    p = p.add(&Poly::var(n, j)?.scale(&coeff))?;
                }
            }
            components[3 + h] = p;
        }
        horizontal.push(VectorField::new(components)?);
    }
    SrStructure::new("carnot-k3", horizontal)
}

/// Left translation of the Heisenberg group by `(a, b, c)` in exponential
/// coordinates.
pub fn heisenberg_translation(name: &str, a: f64, b: f64, c: f64) -> Result<PolyMap> {
    let shift = |a: f64, b: f64, c: f64| -> Result<Vec<Poly>> {
        let n = 3;
        let x = Poly::var(n, 0)?;
        let y = Poly::var(n, 1)?;
        let z = Poly::var(n, 2)?;
        let ar = BigRational::from_float(a).ok_or(Error::NonFinitePoint)?;
        let br = BigRational::from_float(b).ok_or(Error::NonFinitePoint)?;
        let cr = BigRational::from_float(c).ok_or(Error::NonFinitePoint)?;
        let two = BigRational::from_integer(BigInt::from(2));
        let fx = x.add(&Poly::constant(n, ar.clone()))?;
        let fy = y.add(&Poly::constant(n, br.clone()))?;
        // z + c + (a*y - b*x)/2
        let fz = z
            .add(&Poly::constant(n, cr))?
            .add(&y.scale(&(ar / &two)))?
            .sub(&x.scale(&(br / &two)))?;
        Ok(vec![fx, fy, fz])
    };
    PolyMap::new(name, shift(a, b, c)?, shift(-a, -b, -c)?)
}

/// The anisotropic dilation `(x, y, z) -> (2x, 2y, 4z)`: preserves the
/// Heisenberg distribution but scales the metric, so it is not an isometry.
pub fn heisenberg_dilation() -> Result<PolyMap> {
    PolyMap::new(
        "dilation",
        vec![
            parse_poly("2*x", 3, None)?,
            parse_poly("2*y", 3, None)?,
            parse_poly("4*z", 3, None)?,
        ],
        vec![
            parse_poly("1/2*x", 3, None)?,
            parse_poly("1/2*y", 3, None)?,
            parse_poly("1/4*z", 3, None)?,
        ],
    )
}

/// The reflection `(x, y, z) -> (x, -y, z)` preserving the Martinet
/// structure.
pub fn martinet_flip() -> Result<PolyMap> {
    let fwd = vec![
        parse_poly("x", 3, None)?,
        parse_poly("-y", 3, None)?,
        parse_poly("z", 3, None)?,
    ];
    PolyMap::new("flip-y", fwd.clone(), fwd)
}

/// Maps shipped with a builtin structure, used by the verification command.
pub fn maps(name: &str) -> Result<Vec<PolyMap>> {
    match name {
        "heisenberg" => Ok(vec![
            heisenberg_translation("left-translation(0.5,0,0)", 0.5, 0.0, 0.0)?,
            heisenberg_translation("left-translation(-0.25,1,0.75)", -0.25, 1.0, 0.75)?,
            heisenberg_translation("left-translation(2,-0.5,0.125)", 2.0, -0.5, 0.125)?,
        ]),
        "martinet" => Ok(vec![martinet_flip()?]),
        _ => Ok(Vec::new()),
    }
}
