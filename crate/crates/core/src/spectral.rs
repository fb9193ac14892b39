//! Spectral (operator) norms of dense complex matrices.
//!
//! Two routes, sharing one result type:
//!
//! * an exact Hermitian eigensolve of `M†M` for matrices up to
//!   [`DENSE_EIG_LIMIT`] on a side, and
//! * power iteration on `M†M` above that, seeded deterministically.
//!
//! Power-iteration values are Rayleigh quotients of `M†M`, so they are
//! genuine lower bounds on the operator norm even before convergence.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest dimension routed to the exact eigensolve.
pub const DENSE_EIG_LIMIT: usize = 512;
/// Relative tolerance on successive power-iteration estimates.
pub const POWER_REL_TOL: f64 = 1e-10;
/// Iteration cap for power iteration.
pub const POWER_MAX_ITERS: u32 = 10_000;
/// Seed for the power-iteration starting vector.
pub const POWER_SEED: u64 = 0x5eed_0001;

/// A computed spectral norm. `residual` is `‖M†Mv − λv‖ / λ` at the
/// final iterate (zero for the exact route); `iterations` is zero for
/// the exact route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// Spectral norm of `m`, routed by dimension.
pub fn operator_norm(m: &DMatrix<Complex64>) -> Result<SpectralEstimate> {
    if m.nrows().max(m.ncols()) <= DENSE_EIG_LIMIT {
        Ok(operator_norm_dense(m))
    } else {
        operator_norm_power(m, POWER_SEED)
    }
}

/// Exact route: largest eigenvalue of the Hermitian matrix `M†M`.
pub fn operator_norm_dense(m: &DMatrix<Complex64>) -> SpectralEstimate {
    if m.is_empty() {
        return SpectralEstimate {
            value: 0.0,
            residual: 0.0,
            iterations: 0,
        };
    }
    let gram = m.ad_mul(m);
    let eigs = gram.symmetric_eigen().eigenvalues;
    let top = eigs.iter().fold(0.0f64, |acc, &l| acc.max(l));
    SpectralEstimate {
        value: top.max(0.0).sqrt(),
        residual: 0.0,
        iterations: 0,
    }
}

/// Iterative route with the default tolerance and iteration cap.
pub fn operator_norm_power(m: &DMatrix<Complex64>, seed: u64) -> Result<SpectralEstimate> {
    operator_norm_power_with(m, seed, POWER_REL_TOL, POWER_MAX_ITERS)
}

/// Power iteration on `M†M` from a seeded random start. Converges when
/// two successive Rayleigh quotients agree to `rel_tol` (relative);
/// fails with `NO_CONVERGENCE` after `max_iters`, carrying the best
/// estimate so far (still a lower bound on the true norm).
pub fn operator_norm_power_with(
    m: &DMatrix<Complex64>,
    seed: u64,
    rel_tol: f64,
    max_iters: u32,
) -> Result<SpectralEstimate> {
    if m.is_empty() {
        return Ok(SpectralEstimate {
            value: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    let n = m.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::<Complex64>::from_fn(n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let nv = v.norm();
    if nv == 0.0 {
        v[0] = Complex64::new(1.0, 0.0);
    } else {
        v /= Complex64::from(nv);
    }
    let mut best = 0.0f64;
    let mut last_residual = f64::INFINITY;
    for it in 1..=max_iters {
        let w = m * &v;
        let lambda = w.norm_squared();
        let u = m.ad_mul(&w);
        last_residual = if lambda > 0.0 {
            (&u - &v * Complex64::from(lambda)).norm() / lambda
        } else {
            0.0
        };
        let converged = it > 1 && (lambda - best).abs() <= rel_tol * lambda.max(f64::MIN_POSITIVE);
        let nu = u.norm();
        if nu == 0.0 {
            // v is in the kernel of M†M: the Rayleigh estimate is exact there.
            return Ok(SpectralEstimate {
                value: lambda.sqrt(),
                residual: 0.0,
                iterations: it,
            });
        }
        best = best.max(lambda);
        if converged {
            return Ok(SpectralEstimate {
                value: lambda.sqrt(),
                residual: last_residual,
                iterations: it,
            });
        }
        v = u / Complex64::from(nu);
    }
    Err(Error::NoConvergence {
        best: best.sqrt(),
        residual: last_residual,
        iterations: max_iters,
    })
}
