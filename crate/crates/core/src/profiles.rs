//! Ready-made parameter sets.
//!
//! * toy: `p = 4*3*5*7 - 1 = 419`, base curve `A = 0`, class group of order 27.
//! * mock: residues mod `N` (default `2^256`) with public keys serialized at
//!   the width of the 512-bit CSIDH prime.

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::action::{csidh512_ells, ActionBackend, MockBackend, ToyBackend};
use crate::error::Result;
use crate::fp::{Modulus, PrimeModulus};
use crate::sdvs::{setup, HashId, PublicParams};

pub const TOY_ELLS: [u64; 3] = [3, 5, 7];
pub const TOY_BASE_A: u64 = 0;

/// `4 * 3 * 5 * ... * 373 * 587 - 1`, validated once.
pub fn csidh512_modulus() -> Modulus {
    static CELL: OnceLock<Modulus> = OnceLock::new();
    CELL.get_or_init(|| Arc::new(PrimeModulus::from_ells(&csidh512_ells()).expect("CSIDH-512 prime")))
        .clone()
}

/// `2^(2 lambda)`, the group order giving the compact signature sizes.
pub fn production_order(lambda: u32) -> BigUint {
    BigUint::one() << (2 * lambda as usize)
}

pub fn toy_backend<R: RngCore + ?Sized>(rng: &mut R) -> Result<ActionBackend> {
    Ok(ActionBackend::Toy(ToyBackend::generate(&TOY_ELLS, TOY_BASE_A, rng)?))
}

pub fn mock_backend(order: BigUint) -> Result<ActionBackend> {
    Ok(ActionBackend::Mock(MockBackend::new(order, csidh512_modulus(), BigUint::zero())?))
}

pub fn toy_params<R: RngCore + ?Sized>(eta: usize, lambda: u32, rng: &mut R) -> Result<PublicParams> {
    setup(toy_backend(rng)?, eta, lambda, HashId::Sha256Trunc)
}

pub fn mock_params(eta: usize, lambda: u32, order: BigUint) -> Result<PublicParams> {
    setup(mock_backend(order)?, eta, lambda, HashId::Sha256Trunc)
}
