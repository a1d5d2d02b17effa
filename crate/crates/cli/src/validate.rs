//! Physical-range and resource checks on a parsed configuration.

use std::fmt;

use cvqkd_core::qknn::{register_size, Mode, Schedule};
use cvqkd_core::secrate::Scheme;
use serde::Serialize;

use crate::config::{ExperimentConfig, LambdaSource};

/// Largest state vector the gate engine is allowed to allocate.
pub const GATE_QUBIT_CAP: usize = cvqkd_core::qsim::DEFAULT_QUBIT_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    Range,
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Qubits of the full training register `|j⟩|i⟩|flag⟩|amp⟩` plus the value
/// register used while loading it, for `M` rows of `U` features.
pub fn gate_qubit_estimate(m: usize, u: usize) -> usize {
    let width = |n: usize| (usize::BITS - n.leading_zeros()) as usize;
    let aux = width((m * u).saturating_sub(1)).max(1);
    width(m) + width(u) + 2 + aux
}

struct Checker(Vec<Finding>);

impl Checker {
    fn range(&mut self, ok: bool, field: &str, message: impl Into<String>) {
        if !ok {
            self.0.push(Finding {
                kind: FindingKind::Range,
                field: field.into(),
                message: message.into(),
            });
        }
    }

    fn finite_nonneg(&mut self, v: f64, field: &str) {
        self.range(
            v.is_finite() && v >= 0.0,
            field,
            format!("{v} must be finite and non-negative"),
        );
    }

    fn unit_open_closed(&mut self, v: f64, field: &str) {
        self.range(
            v > 0.0 && v <= 1.0,
            field,
            format!("{v} must lie in (0, 1]"),
        );
    }
}

/// All findings for `cfg`; an empty list means the config can run.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Finding> {
    let mut c = Checker(Vec::new());
    let n = cfg.constellation.n;
    c.range(n >= 2, "constellation.n", format!("{n} must be at least 2"));
    let v_m = cfg.constellation.v_m;
    c.range(
        v_m.is_finite() && v_m > 0.0,
        "constellation.v_m",
        format!("{v_m} must be positive"),
    );

    let ch = &cfg.channel;
    c.finite_nonneg(ch.loss_db_per_km, "channel.loss_db_per_km");
    c.finite_nonneg(ch.excess_noise, "channel.excess_noise");
    c.unit_open_closed(ch.efficiency, "channel.efficiency");
    c.finite_nonneg(ch.electronic_noise, "channel.electronic_noise");
    c.finite_nonneg(ch.phase_jitter_std, "channel.phase_jitter_std");
    c.range(
        ch.phase_offset.is_finite(),
        "channel.phase_offset",
        "must be finite",
    );

    if let Some(cl) = &cfg.classification {
        c.range(
            cl.train_size >= 1,
            "classification.train_size",
            "must be at least 1",
        );
        c.range(
            cl.test_size >= 1,
            "classification.test_size",
            "must be at least 1",
        );
        c.range(!cl.k.is_empty(), "classification.k", "list is empty");
        for &k in &cl.k {
            c.range(
                k >= 1 && k <= cl.train_size,
                "classification.k",
                format!("k = {k} must lie in 1..={}", cl.train_size),
            );
        }
        c.range(
            !cl.distances_km.is_empty(),
            "classification.distances_km",
            "list is empty",
        );
        for &d in &cl.distances_km {
            c.finite_nonneg(d, "classification.distances_km");
        }
        c.range(
            register_size(cl.delta).is_some(),
            "classification.delta",
            format!("{} must lie in (0, 1)", cl.delta),
        );
        if let Schedule::Exponential { growth, give_up } = cl.schedule {
            c.range(
                growth > 1.0 && growth.is_finite(),
                "classification.schedule.growth",
                "must exceed 1",
            );
            c.range(
                give_up > 0.0 && give_up.is_finite(),
                "classification.schedule.give_up",
                "must be positive",
            );
        }
        if cfg.mode == Mode::Gate {
            let q = gate_qubit_estimate(cl.train_size, n);
            if q > GATE_QUBIT_CAP {
                c.0.push(Finding {
                    kind: FindingKind::Budget,
                    field: "classification.train_size".into(),
                    message: format!(
                        "gate mode needs about {q} qubits for M = {} and U = {n}, above the cap of \
                         {GATE_QUBIT_CAP}; use mode = \"analytic\"",
                        cl.train_size
                    ),
                });
            }
        }
    }

    if let Some(kr) = &cfg.keyrate {
        c.unit_open_closed(kr.beta, "keyrate.beta");
        c.range(
            !kr.losses_db.is_empty(),
            "keyrate.losses_db",
            "list is empty",
        );
        for &l in &kr.losses_db {
            c.finite_nonneg(l, "keyrate.losses_db");
        }
        c.range(!kr.curves.is_empty(), "keyrate.curves", "list is empty");
        for cu in &kr.curves {
            c.range(
                cu.n >= 2,
                "keyrate.curves.n",
                format!("{} must be at least 2", cu.n),
            );
            c.range(
                cu.v_m.is_finite() && cu.v_m > 0.0,
                "keyrate.curves.v_m",
                format!("{} must be positive", cu.v_m),
            );
        }
        let uses_lambda = kr.curves.iter().any(|cu| cu.scheme == Scheme::Qknn);
        match kr.lambda_q {
            LambdaSource::Fixed { value } => c.range(
                (0.0..=1.0).contains(&value),
                "keyrate.lambda_q.value",
                format!("{value} must lie in [0, 1]"),
            ),
            LambdaSource::Measured { k } if uses_lambda => match &cfg.classification {
                None => c.range(
                    false,
                    "keyrate.lambda_q",
                    "measured Λ_Q needs a [classification] section",
                ),
                Some(cl) => {
                    if let Some(k) = k {
                        c.range(
                            k >= 1 && k <= cl.train_size,
                            "keyrate.lambda_q.k",
                            format!("k = {k} must lie in 1..={}", cl.train_size),
                        );
                    }
                    c.range(
                        ch.loss_db_per_km > 0.0,
                        "channel.loss_db_per_km",
                        "measured Λ_Q needs a positive fibre loss",
                    );
                }
            },
            LambdaSource::Measured { .. } => {}
        }
        if let Some(nc) = kr.fock_cutoff {
            c.range(
                nc >= 2,
                "keyrate.fock_cutoff",
                format!("{nc} must be at least 2"),
            );
        }
    }

    if let Some(cx) = &cfg.complexity {
        for (field, vals) in [
            ("complexity.u", std::slice::from_ref(&cx.u)),
            ("complexity.m", std::slice::from_ref(&cx.m)),
            ("complexity.k", std::slice::from_ref(&cx.k)),
            ("complexity.u_values", &cx.u_values[..]),
            ("complexity.m_values", &cx.m_values[..]),
            ("complexity.k_values", &cx.k_values[..]),
        ] {
            for &v in vals {
                c.range(v >= 1, field, "must be at least 1");
            }
        }
        c.range(
            register_size(cx.delta).is_some(),
            "complexity.delta",
            format!("{} must lie in (0, 1)", cx.delta),
        );
    }
    c.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(&format!(
            "seed = 1\n{extra}\n[constellation]\nn = 8\nv_m = 29.0\n\
             [classification]\ntrain_size = 64\ntest_size = 10\nk = [15]\ndistances_km = [5.0]\n"
        ))
        .unwrap()
    }

    #[test]
    fn valid_analytic_config_has_no_findings() {
        assert_eq!(validate(&base("")), vec![]);
    }

    #[test]
    fn huge_gate_run_breaks_the_budget() {
        let mut cfg = base("mode = \"gate\"");
        assert_eq!(validate(&cfg), vec![]);
        cfg.classification.as_mut().unwrap().train_size = 100_000;
        let f = validate(&cfg);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FindingKind::Budget);
        assert!(f[0].message.contains("analytic"));
    }

    #[test]
    fn efficiency_above_one() {
        let mut cfg = base("");
        cfg.channel.efficiency = 1.2;
        let f = validate(&cfg);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].field, "channel.efficiency");
        assert_eq!(f[0].kind, FindingKind::Range);
    }

    #[test]
    fn k_beyond_training_set() {
        let mut cfg = base("");
        cfg.classification.as_mut().unwrap().k = vec![0, 65];
        assert_eq!(validate(&cfg).len(), 2);
    }

    #[test]
    fn qubit_estimates() {
        assert_eq!(gate_qubit_estimate(16, 8), 5 + 4 + 2 + 7);
        assert_eq!(gate_qubit_estimate(64, 8), 7 + 4 + 2 + 9);
        assert!(gate_qubit_estimate(100_000, 8) > GATE_QUBIT_CAP);
    }
}
