//! Shared generators for randomized polynomial fields
//! (degree <= 4, up to 5 variables, small rational coefficients).

use proptest::prelude::*;

use popp_core::{Poly, VectorField};

pub fn arb_poly(nvars: usize, max_terms: usize) -> impl Strategy<Value = Poly> {
    let exponents = prop::collection::vec(0u32..=2u32, nvars)
        .prop_filter("total degree <= 4", |e| e.iter().sum::<u32>() <= 4);
    let term = (exponents, -20i64..=20, 1i64..=8);
    prop::collection::vec(term, 0..=max_terms).prop_map(move |terms| {
        let mut acc = Poly::zero(nvars);
        for (exps, numer, denom) in terms {
            let mut t = Poly::from_ratio(nvars, numer, denom);
            for (v, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = t
                        .mul(&Poly::var(nvars, v).unwrap().pow(e).unwrap())
                        .unwrap();
                }
            }
            acc = acc.add(&t).unwrap();
        }
        acc
    })
}

pub fn arb_field(nvars: usize) -> impl Strategy<Value = VectorField> {
    prop::collection::vec(arb_poly(nvars, 3), nvars)
        .prop_map(|components| VectorField::new(components).unwrap())
}

pub fn arb_point(nvars: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, nvars)
}
