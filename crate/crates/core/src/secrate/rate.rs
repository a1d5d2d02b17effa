use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::{auto_cutoff, build_tau};
use super::SecrateError;

/// How a configured excess noise `ε` maps to the `ξ` of the noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcessNoiseConvention {
    /// `ξ = ε`.
    #[default]
    Epsilon,
    /// `ξ = 1 + ε`.
    OnePlusEpsilon,
}

impl ExcessNoiseConvention {
    pub fn xi(self, epsilon: f64) -> f64 {
        match self {
            ExcessNoiseConvention::Epsilon => epsilon,
            ExcessNoiseConvention::OnePlusEpsilon => 1.0 + epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateInputs {
    pub v_m: f64,
    pub transmittance: f64,
    pub xi: f64,
    pub efficiency: f64,
    pub electronic_noise: f64,
    pub beta: f64,
    /// PSK order `N`.
    pub n: usize,
    /// Classifier AUC `Λ_Q`.
    pub lambda_q: f64,
    /// Fock dimension; chosen from the tail mass when `None`.
    pub fock_cutoff: Option<usize>,
}

impl KeyRateInputs {
    /// `η = 0.6`, `v_el = 0.05`, `ξ = 0.01`, `β = 0.98`, `Λ_Q = 1`, no loss.
    pub fn new(n: usize, v_m: f64) -> Self {
        Self {
            v_m,
            transmittance: 1.0,
            xi: 0.01,
            efficiency: 0.6,
            electronic_noise: 0.05,
            beta: 0.98,
            n,
            lambda_q: 1.0,
            fock_cutoff: None,
        }
    }

    /// Same inputs with `T = 10^{−loss/10}`.
    pub fn at_loss_db(self, loss_db: f64) -> Self {
        Self {
            transmittance: 10f64.powf(-loss_db / 10.0),
            ..self
        }
    }

    pub fn v(&self) -> f64 {
        self.v_m + 1.0
    }

    /// `1/T − 1 + ξ`.
    pub fn chi_line(&self) -> f64 {
        1.0 / self.transmittance - 1.0 + self.xi
    }

    /// `[1 + (1 − η) + 2 v_el]/η`.
    pub fn chi_het(&self) -> f64 {
        (2.0 - self.efficiency + 2.0 * self.electronic_noise) / self.efficiency
    }

    /// `ξ − 1 + 2(1 + v_el)/(ηT)`.
    pub fn chi_tot(&self) -> f64 {
        self.xi - 1.0 + 2.0 * (1.0 + self.electronic_noise) / (self.efficiency * self.transmittance)
    }

    pub fn validate(&self) -> Result<(), SecrateError> {
        let bad = |m: String| Err(SecrateError::BadInput(m));
        let vals = [
            self.v_m,
            self.transmittance,
            self.xi,
            self.efficiency,
            self.electronic_noise,
            self.beta,
            self.lambda_q,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return bad("parameters must be finite".into());
        }
        if self.v_m.is_nan() || self.v_m <= 0.0 {
            return bad(format!("V_m = {} must be positive", self.v_m));
        }
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return bad(format!("T = {} must lie in (0, 1]", self.transmittance));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return bad(format!("η = {} must lie in (0, 1]", self.efficiency));
        }
        if self.xi < 0.0 || self.electronic_noise < 0.0 {
            return bad("ξ and v_el must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return bad(format!("β = {} must lie in [0, 1]", self.beta));
        }
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        Ok(())
    }
}

/// `log2((V + χ_tot)/(1 + χ_tot))`.
pub fn mutual_information(inputs: &KeyRateInputs) -> Result<f64, SecrateError> {
    inputs.validate()?;
    let ct = inputs.chi_tot();
    if ct <= -1.0 {
        return Err(SecrateError::Domain(format!("χ_tot = {ct} ≤ −1")));
    }
    Ok(((inputs.v() + ct) / (1.0 + ct)).log2())
}

/// Alice–Bob correlation and the excess-noise weight `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    /// `Z = 2√T·tr(τ^{1/2} â τ^{1/2} â†) − √(2Tξw)`.
    pub z: f64,
    pub w: f64,
    /// `tr(τ^{1/2} â τ^{1/2} â†)`.
    pub trace_term: f64,
    pub n_max: usize,
}

fn real(z: Complex64, what: &str) -> Result<f64, SecrateError> {
    if z.im.abs() > 1e-9 {
        return Err(SecrateError::Numeric(format!(
            "{what} has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `tr(S â S â†)` for a square root `S` of a density matrix.
pub(crate) fn sqrt_trace_term(sqrt_tau: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> Complex64 {
    (sqrt_tau * a * sqrt_tau * a.adjoint()).trace()
}

pub fn correlation_z(inputs: &KeyRateInputs) -> Result<Correlation, SecrateError> {
    inputs.validate()?;
    let x = inputs.v_m / 2.0;
    let n_max = inputs.fock_cutoff.unwrap_or_else(|| auto_cutoff(x));
    let ops = build_tau(inputs.n, x.sqrt(), n_max)?;
    let trace_term = real(
        sqrt_trace_term(&ops.sqrt_tau, &ops.annihilation),
        "tr(τ^½ a τ^½ a†)",
    )?;
    let a_tau = &ops.sqrt_tau * &ops.annihilation * &ops.pinv_sqrt_tau;
    let mut w = 0.0;
    for s in &ops.states {
        let v = nalgebra::DVector::from_column_slice(s);
        let av = &a_tau * &v;
        let second = av.norm_squared();
        let first = v.dotc(&av);
        w += (second - first.norm_sqr()) / inputs.n as f64;
    }
    let t = inputs.transmittance;
    let z = 2.0 * t.sqrt() * trace_term - (2.0 * t * inputs.xi * w.max(0.0)).sqrt();
    Ok(Correlation {
        z,
        w,
        trace_term,
        n_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// `λ_1 ≥ λ_2`, `λ_3 ≥ λ_4`, `λ_5 = 1`.
    pub lambda: [f64; 5],
    pub z: f64,
    pub w: f64,
}

fn pair(sum: f64, prod: f64, what: &str) -> Result<(f64, f64), SecrateError> {
    let disc = sum * sum - 4.0 * prod;
    if disc < -1e-12 * sum.abs().max(1.0) {
        return Err(SecrateError::Domain(format!(
            "{what} discriminant {disc:e} < 0"
        )));
    }
    let r = disc.max(0.0).sqrt();
    Ok((
        ((sum + r) / 2.0).max(0.0).sqrt(),
        ((sum - r) / 2.0).max(0.0).sqrt(),
    ))
}

/// Symplectic eigenvalues of Alice–Bob's state and of Alice's and the
/// detector modes conditioned on Bob's heterodyne outcome.
///
/// `A, B` give `λ_{1,2}² = ½[A ± √(A² − 4B)]` and `C, D` give
/// `λ_{3,4}² = ½[C ± √(C² − 4D)]`. The expressions are written for the
/// channel-free correlation `Z/√T`; the covariance of the state is `Z`.
pub fn symplectic_spectrum(
    inputs: &KeyRateInputs,
    corr: &Correlation,
) -> Result<SpectrumResult, SecrateError> {
    inputs.validate()?;
    let (v, t) = (inputs.v(), inputs.transmittance);
    let (cl, ch, ct) = (inputs.chi_line(), inputs.chi_het(), inputs.chi_tot());
    let z2 = corr.z * corr.z / t;
    let a = v * v + t * t * (v + cl).powi(2) - 2.0 * t * z2;
    let b = (t * (v * v + v * cl - z2)).powi(2);
    let sb = b.sqrt();
    let scale = (t * (v + ct)).powi(2);
    let c = (a * ch * ch + b + 1.0 + 2.0 * ch * (v * sb + t * (v + cl)) + 2.0 * t * z2) / scale;
    let d = ((v + sb * ch) / (t * (v + ct))).powi(2);
    let (l1, l2) = pair(a, b, "A, B")?;
    let (l3, l4) = pair(c, d, "C, D")?;
    let lambda = [l1, l2, l3, l4, 1.0];
    if let Some(l) = lambda.iter().find(|&&l| l < 1.0 - 1e-6) {
        return Err(SecrateError::Domain(format!(
            "symplectic eigenvalue {l} < 1 at V_m = {}, T = {}, ξ = {}, Z = {}",
            inputs.v_m, t, inputs.xi, corr.z
        )));
    }
    Ok(SpectrumResult {
        a,
        b,
        c,
        d,
        lambda,
        z: corr.z,
        w: corr.w,
    })
}

/// `G(x) = (x+1) log2(x+1) − x log2 x`, with `G(x) = 0` for `x ≤ 0`.
pub fn g_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (x + 1.0) * (x + 1.0).log2() - x * x.log2()
    }
}

/// `Σ_{i≤2} G((λ_i − 1)/2) − Σ_{3≤i≤5} G((λ_i − 1)/2)`.
pub fn holevo_bound(s: &SpectrumResult) -> f64 {
    let g = |l: f64| g_entropy((l - 1.0) / 2.0);
    g(s.lambda[0]) + g(s.lambda[1]) - g(s.lambda[2]) - g(s.lambda[3]) - g(s.lambda[4])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Conventional,
    Qknn,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Conventional => "conventional",
            Scheme::Qknn => "qknn",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    pub i_ab: f64,
    pub chi_be: f64,
    /// Bits per symbol; may be negative.
    pub k: f64,
    pub spectrum: SpectrumResult,
    pub correlation: Correlation,
}

/// `β I_AB − χ_BE` (conventional) or `β Λ_Q I_AB − χ_BE/N` (classifier).
pub fn key_rate(inputs: &KeyRateInputs, scheme: Scheme) -> Result<KeyRateReport, SecrateError> {
    if scheme == Scheme::Qknn && !(0.0..=1.0).contains(&inputs.lambda_q) {
        return Err(SecrateError::BadInput(format!(
            "Λ_Q = {} must lie in [0, 1]",
            inputs.lambda_q
        )));
    }
    let i_ab = mutual_information(inputs)?;
    let correlation = correlation_z(inputs)?;
    let spectrum = symplectic_spectrum(inputs, &correlation)?;
    let chi_be = holevo_bound(&spectrum);
    let k = match scheme {
        Scheme::Conventional => inputs.beta * i_ab - chi_be,
        Scheme::Qknn => inputs.beta * inputs.lambda_q * i_ab - chi_be / inputs.n as f64,
    };
    Ok(KeyRateReport {
        i_ab,
        chi_be,
        k,
        spectrum,
        correlation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sector weights `μ_l` of a PSK mixture and the closed forms of the
    /// trace term and `w` built from them.
    fn sector_oracle(n: usize, x: f64) -> (f64, f64) {
        let mut mu = vec![0.0; n];
        let mut term = (-x).exp();
        for k in 0..200 {
            if k > 0 {
                term *= x / k as f64;
            }
            mu[k % n] += term;
        }
        let prev = |l: usize| mu[(l + n - 1) % n];
        let s: f64 = (0..n).map(|l| prev(l).powf(1.5) / mu[l].sqrt()).sum();
        let q: f64 = (0..n).map(|l| prev(l).powi(2) / mu[l]).sum();
        (x * s, x * (q - s * s))
    }

    #[test]
    fn mutual_information_limits() {
        let i = KeyRateInputs {
            transmittance: 1.0,
            efficiency: 1.0,
            electronic_noise: 0.0,
            xi: 1.0,
            ..KeyRateInputs::new(4, 0.5)
        };
        assert_eq!(i.chi_tot(), 2.0);
        assert!((mutual_information(&i).unwrap() - (3.5f64 / 3.0).log2()).abs() < 1e-15);
        let tiny = KeyRateInputs::new(4, 1e-12);
        assert!(mutual_information(&tiny).unwrap() < 1e-11);
        assert!(mutual_information(&KeyRateInputs {
            efficiency: 0.0,
            ..tiny
        })
        .is_err());
    }

    #[test]
    fn trace_term_and_w_match_sectors() {
        for (n, v_m) in [(4usize, 0.33), (8, 0.38), (8, 2.0), (4, 0.05), (2, 1.0)] {
            let c = correlation_z(&KeyRateInputs::new(n, v_m)).unwrap();
            let (tr, w) = sector_oracle(n, v_m / 2.0);
            assert!(
                (c.trace_term - tr).abs() < 1e-10,
                "N={n} V_m={v_m}: {} vs {tr}",
                c.trace_term
            );
            assert!((c.w - w).abs() < 1e-8, "N={n} V_m={v_m}: {} vs {w}", c.w);
        }
    }

    #[test]
    fn correlation_limits() {
        let base = KeyRateInputs {
            xi: 0.0,
            ..KeyRateInputs::new(8, 0.38)
        }
        .at_loss_db(3.0);
        let c = correlation_z(&base).unwrap();
        assert_eq!(c.z, 2.0 * base.transmittance.sqrt() * c.trace_term);
        let far = KeyRateInputs::new(8, 0.38).at_loss_db(200.0);
        assert!(correlation_z(&far).unwrap().z.abs() < 1e-9);
        let pure = correlation_z(&KeyRateInputs {
            n: 1,
            ..KeyRateInputs::new(1, 0.5)
        })
        .unwrap();
        assert!(pure.w.abs() < 1e-10);
    }

    #[test]
    fn thermal_limit() {
        // A thermal τ with mean photon number V_m/2 gives the Gaussian
        // correlation √(T(V² − 1)).
        for v_m in [0.1, 0.3, 0.5] {
            let nbar: f64 = v_m / 2.0;
            let dim = 60;
            let mut s = DMatrix::<Complex64>::zeros(dim, dim);
            let mut a = DMatrix::<Complex64>::zeros(dim, dim);
            for k in 0..dim {
                let p = (nbar / (nbar + 1.0)).powi(k as i32) / (nbar + 1.0);
                s[(k, k)] = Complex64::new(p.sqrt(), 0.0);
                if k > 0 {
                    a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
                }
            }
            let t: f64 = 0.5;
            let z = 2.0 * t.sqrt() * sqrt_trace_term(&s, &a).re;
            let v = v_m + 1.0;
            let want = (t * (v * v - 1.0)).sqrt();
            assert!((z / want - 1.0).abs() < 0.02, "{z} vs {want}");
        }
    }

    #[test]
    fn cutoff_convergence() {
        for (n, v_m) in [(4usize, 0.33), (8, 0.38), (8, 2.0)] {
            let i = KeyRateInputs::new(n, v_m).at_loss_db(2.0);
            let a = correlation_z(&i).unwrap();
            let b = correlation_z(&KeyRateInputs {
                fock_cutoff: Some(a.n_max + 10),
                ..i
            })
            .unwrap();
            assert!((a.z - b.z).abs() < 1e-8);
        }
    }

    #[test]
    fn epr_limit_is_pure() {
        let i = KeyRateInputs {
            xi: 0.0,
            ..KeyRateInputs::new(8, 0.8)
        };
        let v = i.v();
        let c = Correlation {
            z: (v * v - 1.0).sqrt(),
            w: 0.0,
            trace_term: 0.0,
            n_max: 0,
        };
        let s = symplectic_spectrum(&i, &c).unwrap();
        assert!((s.lambda[0] - 1.0).abs() < 1e-7 && (s.lambda[1] - 1.0).abs() < 1e-7);
        assert!(g_entropy((s.lambda[0] - 1.0) / 2.0) < 1e-6);
        assert_eq!(s.lambda[4], 1.0);
    }

    #[test]
    fn entropy_function() {
        assert_eq!(g_entropy(0.0), 0.0);
        assert_eq!(g_entropy(1.0), 2.0);
        let ones = SpectrumResult {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            lambda: [1.0; 5],
            z: 0.0,
            w: 0.0,
        };
        assert_eq!(holevo_bound(&ones), 0.0);
    }

    #[test]
    fn unphysical_correlation_is_rejected() {
        let i = KeyRateInputs::new(8, 0.38).at_loss_db(2.0);
        let c = Correlation {
            z: 5.0,
            w: 0.0,
            trace_term: 0.0,
            n_max: 0,
        };
        assert!(matches!(
            symplectic_spectrum(&i, &c),
            Err(SecrateError::Domain(_))
        ));
    }

    #[test]
    fn scheme_reduction() {
        let i = KeyRateInputs {
            n: 1,
            lambda_q: 1.0,
            ..KeyRateInputs::new(1, 0.4)
        }
        .at_loss_db(3.0);
        let a = key_rate(&i, Scheme::Conventional).unwrap();
        let b = key_rate(&i, Scheme::Qknn).unwrap();
        assert!((a.k - b.k).abs() < 1e-15);
        assert!(key_rate(&KeyRateInputs { lambda_q: 1.5, ..i }, Scheme::Qknn).is_err());
    }

    #[test]
    fn rates_fall_with_loss() {
        // Strictly while positive; a negative rate heads back to 0 from
        // below as both terms vanish, so the clamped rate is checked there.
        for scheme in [Scheme::Conventional, Scheme::Qknn] {
            let mut last = f64::INFINITY;
            for db in 0..=25 {
                let i = KeyRateInputs {
                    lambda_q: 0.9,
                    ..KeyRateInputs::new(8, 0.38)
                }
                .at_loss_db(db as f64);
                let k = key_rate(&i, scheme).unwrap().k;
                if last > 0.0 {
                    assert!(k < last, "{scheme} at {db} dB");
                } else {
                    assert!(k <= 0.0, "{scheme} at {db} dB");
                }
                last = k;
            }
        }
    }

    #[test]
    fn eight_psk_leaks_more_than_qpsk() {
        for db in [0.0, 5.0, 10.0, 20.0] {
            let c8 = key_rate(
                &KeyRateInputs::new(8, 0.38).at_loss_db(db),
                Scheme::Conventional,
            )
            .unwrap();
            let c4 = key_rate(
                &KeyRateInputs::new(4, 0.33).at_loss_db(db),
                Scheme::Conventional,
            )
            .unwrap();
            assert!(c8.chi_be > c4.chi_be);
            assert!(c8.chi_be / 8.0 < c4.chi_be / 4.0);
        }
    }
}
