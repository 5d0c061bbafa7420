//! Model parameters: branching number, coupling and activity.

use serde::Serialize;

use crate::error::{Error, Result};

/// How the coupling between opposite charges is specified.
///
/// The hard-core model is the `β → ∞` limit of the ferromagnetic soft-core
/// model and is kept as its own variant so that `θ = 0` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coupling {
    HardCore,
    Soft { j: f64, beta: f64, theta: f64 },
}

/// Sign of the interaction, read off from `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Interaction {
    /// `θ < 1` (`J > 0`), including the hard-core limit.
    Ferromagnetic,
    /// `θ = 1`: no interaction.
    Free,
    /// `θ > 1` (`J < 0`).
    Antiferromagnetic,
}

/// A full parameter point `(k, J, β, θ, λ)` together with `a = λ^{1/k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    k: u32,
    lambda: f64,
    a: f64,
    coupling: Coupling,
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("branching number k must be at least 1".into()));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("activity lambda must be positive and finite, got {lambda}")));
    }
    Ok(())
}

impl ModelParams {
    /// Builds a parameter point from `θ` directly.
    ///
    /// `θ = 0` selects the hard-core model. For `θ > 0` the representative pair
    /// `(J, β) = (−ln θ, 1)` is stored.
    pub fn new(k: u32, theta: f64, lambda: f64) -> Result<Self> {
        check_k(k)?;
        check_lambda(lambda)?;
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::Domain(format!("theta must be finite and non-negative, got {theta}")));
        }
        let coupling = if theta == 0.0 {
            Coupling::HardCore
        } else {
            Coupling::Soft { j: -theta.ln(), beta: 1.0, theta }
        };
        Ok(Self::assemble(k, lambda, coupling))
    }

    /// Builds a soft-core parameter point from the coupling `J` and inverse temperature `β`.
    pub fn from_coupling(k: u32, j: f64, beta: f64, lambda: f64) -> Result<Self> {
        check_k(k)?;
        check_lambda(lambda)?;
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!("beta must be positive and finite, got {beta}")));
        }
        if !j.is_finite() {
            return Err(Error::Domain(format!("coupling J must be finite, got {j}")));
        }
        let theta = (-j * beta).exp();
        if theta == 0.0 || !theta.is_finite() {
            return Err(Error::Domain(format!(
                "exp(-J*beta) is not representable for J={j}, beta={beta}; use the hard-core constructor"
            )));
        }
        Ok(Self::assemble(k, lambda, Coupling::Soft { j, beta, theta }))
    }

    /// The hard-core Widom-Rowlinson model (`θ = 0`).
    pub fn hard_core(k: u32, lambda: f64) -> Result<Self> {
        check_k(k)?;
        check_lambda(lambda)?;
        Ok(Self::assemble(k, lambda, Coupling::HardCore))
    }

    fn assemble(k: u32, lambda: f64, coupling: Coupling) -> Self {
        let a = (lambda.ln() / k as f64).exp();
        Self { k, lambda, a, coupling }
    }

    /// Same `k` and coupling, different activity.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self::assemble(self.k, lambda, self.coupling))
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ln_lambda(&self) -> f64 {
        self.lambda.ln()
    }

    /// `a = λ^{1/k}`.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        match self.coupling {
            Coupling::HardCore => 0.0,
            Coupling::Soft { theta, .. } => theta,
        }
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn is_hard_core(&self) -> bool {
        matches!(self.coupling, Coupling::HardCore)
    }

    /// `(J, β)` for soft-core points, `None` in the hard-core limit.
    pub fn j_beta(&self) -> Option<(f64, f64)> {
        match self.coupling {
            Coupling::HardCore => None,
            Coupling::Soft { j, beta, .. } => Some((j, beta)),
        }
    }

    pub fn interaction(&self) -> Interaction {
        let theta = self.theta();
        if theta < 1.0 {
            Interaction::Ferromagnetic
        } else if theta > 1.0 {
            Interaction::Antiferromagnetic
        } else {
            Interaction::Free
        }
    }

    /// `λθ^k`, the lower a-priori bound of any boundary law component when `θ < 1`.
    pub fn lower_seed(&self) -> f64 {
        self.lambda * self.theta().powi(self.k as i32)
    }
}
