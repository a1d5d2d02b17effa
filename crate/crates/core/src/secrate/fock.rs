use nalgebra::DMatrix;
use num_complex::Complex64;

use super::SecrateError;

/// Eigenvalues of `τ` at or below this are treated as outside its support.
pub const PINV_THRESHOLD: f64 = 1e-12;

const TAIL: f64 = 1e-12;
const MIN_CUTOFF: usize = 16;

/// Poisson mass of photon numbers `≥ n_max` for mean photon number `x`.
fn tail_mass(x: f64, n_max: usize) -> f64 {
    let mut term = (-x).exp();
    for n in 1..=n_max {
        term *= x / n as f64;
    }
    if n_max == 0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut n = n_max;
    while term > sum * 1e-17 && term > 0.0 {
        sum += term;
        n += 1;
        term *= x / n as f64;
    }
    sum
}

/// Smallest dimension, at least 16, whose coherent-state tail mass at
/// `|α|² = x` is below `1e-12`.
pub fn auto_cutoff(x: f64) -> usize {
    let mut n = MIN_CUTOFF;
    while tail_mass(x, n) >= TAIL {
        n += 1;
    }
    n
}

/// `e^{−|α|²/2} αⁿ/√(n!)` for `n < n_max`.
pub fn coherent_state_fock(alpha: Complex64, n_max: usize) -> Result<Vec<Complex64>, SecrateError> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(SecrateError::BadInput("α must be finite".into()));
    }
    let x = alpha.norm_sqr();
    let deficit = tail_mass(x, n_max);
    if deficit > TAIL {
        return Err(SecrateError::Cutoff { n_max, deficit });
    }
    let mut amps = Vec::with_capacity(n_max);
    let mut a = Complex64::new((-x / 2.0).exp(), 0.0);
    for n in 0..n_max {
        if n > 0 {
            a *= alpha / (n as f64).sqrt();
        }
        amps.push(a);
    }
    Ok(amps)
}

/// Truncated operators for one constellation.
#[derive(Debug, Clone)]
pub struct FockOperatorSet {
    pub n_max: usize,
    pub tau: DMatrix<Complex64>,
    pub sqrt_tau: DMatrix<Complex64>,
    /// Pseudo-inverse of `τ^{1/2}`. Both square roots keep only eigenvalues
    /// above [`PINV_THRESHOLD`].
    pub pinv_sqrt_tau: DMatrix<Complex64>,
    pub annihilation: DMatrix<Complex64>,
    /// Coherent states of the constellation.
    pub states: Vec<Vec<Complex64>>,
    /// Eigenvalues of `τ`, ascending.
    pub eigenvalues: Vec<f64>,
}

/// `τ = (1/N) Σ_k |α e^{2πik/N}⟩⟨α e^{2πik/N}|` with its square root and
/// the pseudo-inverse square root.
pub fn build_tau(n: usize, alpha: f64, n_max: usize) -> Result<FockOperatorSet, SecrateError> {
    if n == 0 || !alpha.is_finite() || alpha < 0.0 {
        return Err(SecrateError::BadInput(format!("N = {n}, α = {alpha}")));
    }
    let states = (0..n)
        .map(|k| {
            let a = Complex64::from_polar(alpha, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
            coherent_state_fock(a, n_max)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut tau = DMatrix::<Complex64>::zeros(n_max, n_max);
    for s in &states {
        for r in 0..n_max {
            for c in 0..n_max {
                tau[(r, c)] += s[r] * s[c].conj() / n as f64;
            }
        }
    }
    let trace: f64 = (0..n_max).map(|i| tau[(i, i)].re).sum();
    if (1.0 - trace).abs() > 1e-10 {
        return Err(SecrateError::Cutoff {
            n_max,
            deficit: 1.0 - trace,
        });
    }
    let eig = tau.clone().symmetric_eigen();
    let mut sqrt_d = DMatrix::<Complex64>::zeros(n_max, n_max);
    let mut pinv_d = DMatrix::<Complex64>::zeros(n_max, n_max);
    // Rounding leaves the null space of τ at ±1e-17, whose square roots
    // would be ~1e-9; everything at or below the threshold is set to zero.
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > PINV_THRESHOLD {
            sqrt_d[(i, i)] = Complex64::new(l.sqrt(), 0.0);
            pinv_d[(i, i)] = Complex64::new(1.0 / l.sqrt(), 0.0);
        }
    }
    let u = &eig.eigenvectors;
    let ud = u.adjoint();
    let sqrt_tau = u * sqrt_d * &ud;
    let pinv_sqrt_tau = u * pinv_d * &ud;
    let mut annihilation = DMatrix::<Complex64>::zeros(n_max, n_max);
    for k in 1..n_max {
        annihilation[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(FockOperatorSet {
        n_max,
        tau,
        sqrt_tau,
        pinv_sqrt_tau,
        annihilation,
        states,
        eigenvalues,
    })
}
