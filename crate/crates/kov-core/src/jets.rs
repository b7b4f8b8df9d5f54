//! Seeded sampling of small exact rational matrices for jet-substitution
//! checks. Numerators stay within 20 and denominators within 7 so that
//! repeated exact products do not blow up.

use crate::linalg::QMatrix;
use crate::poly::Rat;
use crate::{KovError, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct JetSampler {
    rng: ChaCha8Rng,
}

impl JetSampler {
    pub fn new(seed: u64) -> Self {
        JetSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rat(&mut self) -> Rat {
        let num = self.rng.gen_range(-20..=20i64);
        let den = self.rng.gen_range(1..=7i64);
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn nonzero_rat(&mut self) -> Rat {
        loop {
            let r = self.rat();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn matrix(&mut self, n: usize) -> QMatrix {
        QMatrix::from_fn(n, n, |_, _| self.rat())
    }

    /// Sample until the determinant is nonzero.
    pub fn invertible(&mut self, n: usize) -> Result<QMatrix> {
        const ATTEMPTS: usize = 64;
        for _ in 0..ATTEMPTS {
            let m = self.matrix(n);
            if !m.det().is_zero() {
                return Ok(m);
            }
        }
        Err(KovError::SingularSample(ATTEMPTS))
    }
}
