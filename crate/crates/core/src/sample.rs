//! Seeded random inputs for property sweeps.
//!
//! Every sampler draws from a caller-supplied RNG, so identical seeds give
//! identical samples across runs and platforms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{enumerate_basis, Element, Monomial};
use crate::Scalar;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small Gaussian rational times `q^e` with `e ∈ {-1, 0, 1}`; never zero.
pub fn scalar<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let re = rng.gen_range(-3i64..=3);
        let im = rng.gen_range(-2i64..=2);
        if re == 0 && im == 0 {
            continue;
        }
        let den = rng.gen_range(1i64..=3);
        let i = Scalar::imaginary_unit().expect("ℚ(i) has an imaginary unit");
        let c = &Scalar::from_ratio(re, den) + &(&i * &Scalar::from_ratio(im, den));
        return c.mul_s_pow(2 * rng.gen_range(-1i64..=1));
    }
}

/// A real scalar (fixed by complex conjugation).
pub fn real_scalar<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let re = rng.gen_range(-3i64..=3);
        if re != 0 {
            return Scalar::from_ratio(re, rng.gen_range(1i64..=3)).mul_s_pow(2 * rng.gen_range(-1i64..=1));
        }
    }
}

/// Up to `max_terms` random terms on monomials of length `<= max_len`.
pub fn element<R: Rng>(rng: &mut R, max_len: u32, max_terms: usize) -> Element {
    let basis = enumerate_basis(max_len);
    let mut out = Element::zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let m: Monomial = *basis.choose(rng).expect("basis contains 1");
        out.add_term(m, scalar(rng));
    }
    out
}

/// `x + x∗` for a random `x`.
pub fn hermitian_element<R: Rng>(rng: &mut R, max_len: u32, max_terms: usize) -> Element {
    let x = element(rng, max_len, max_terms);
    &x + &x.star()
}

/// Random `n × n` matrix with `M_ji = M_ij∗`.
pub fn hermitian_matrix<R: Rng>(rng: &mut R, n: usize, max_len: u32, max_terms: usize) -> Vec<Vec<Element>> {
    let mut m = vec![vec![Element::zero(); n]; n];
    for i in 0..n {
        m[i][i] = hermitian_element(rng, max_len, max_terms);
        for j in i + 1..n {
            let x = element(rng, max_len, max_terms);
            m[j][i] = x.star();
            m[i][j] = x;
        }
    }
    m
}

/// Random `n × n` hermitian matrix with constant entries (real diagonal).
pub fn constant_hermitian_matrix<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Element>> {
    let mut m = vec![vec![Element::zero(); n]; n];
    for i in 0..n {
        m[i][i] = Element::from_scalar(real_scalar(rng));
        for j in i + 1..n {
            let x = scalar(rng);
            m[j][i] = Element::from_scalar(x.conjugate());
            m[i][j] = Element::from_scalar(x);
        }
    }
    m
}
