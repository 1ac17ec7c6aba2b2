//! Result records shared by all engines.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::params::{AnisotropyPoint, SpectralData, VertexWeights};
use crate::scalar::{Backend, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    PartitionFunction,
    /// `Z_N / c^N`.
    ReducedPartitionFunction,
    Gefp,
    Efp,
    BoundaryH,
    CutDomainPartition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Transfer-matrix enumeration.
    Oracle,
    /// Inhomogeneous determinant for `Z_N`.
    Ik,
    /// Homogeneous determinant of `φ`-derivatives.
    IkHom,
    /// Row-removal recurrence, inhomogeneous.
    Recurrence,
    /// Shift-operator determinant, inhomogeneous.
    InhomDet,
    /// `N×N` operator determinant in the homogeneous limit.
    Homlim,
    /// Coefficient extraction from the multiple-integral integrand.
    Residue,
    /// `s×s` determinant of `K`-polynomial operators.
    Jets,
    /// `K_{N−1}(∂)` acting on `ω`/`ρ` powers.
    KOperator,
}

impl Engine {
    pub const ALL: [Engine; 9] = [
        Engine::Oracle,
        Engine::Ik,
        Engine::IkHom,
        Engine::Recurrence,
        Engine::InhomDet,
        Engine::Homlim,
        Engine::Residue,
        Engine::Jets,
        Engine::KOperator,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Oracle => "oracle",
            Engine::Ik => "ik",
            Engine::IkHom => "ik-hom",
            Engine::Recurrence => "recurrence",
            Engine::InhomDet => "inhom-det",
            Engine::Homlim => "homlim",
            Engine::Residue => "residue",
            Engine::Jets => "jets",
            Engine::KOperator => "k-operator",
        }
    }

    pub fn parse(s: &str) -> Option<Engine> {
        Engine::ALL.into_iter().find(|e| e.as_str() == s)
    }

    /// Engines built on the trigonometric parametrisation.
    pub fn needs_float(self) -> bool {
        !matches!(self, Engine::Oracle | Engine::Residue)
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Echo of the model parameters a result was computed at, as report strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParamEcho {
    DeltaT { delta: String, t: String },
    Trig { lambda: String, eta: String },
    Spectral { lambdas: Vec<String>, nus: Vec<String>, eta: String },
    Weights { a: String, b: String, c: String },
    Custom,
}

impl ParamEcho {
    pub fn delta_t<S: Scalar>(p: &AnisotropyPoint<S>) -> Self {
        ParamEcho::DeltaT {
            delta: p.delta.to_report_string(),
            t: p.t.to_report_string(),
        }
    }

    pub fn trig<S: Scalar>(lambda: &S, eta: &S) -> Self {
        ParamEcho::Trig {
            lambda: lambda.to_report_string(),
            eta: eta.to_report_string(),
        }
    }

    pub fn spectral<S: Scalar>(spec: &SpectralData<S>) -> Self {
        ParamEcho::Spectral {
            lambdas: spec.lambdas.iter().map(Scalar::to_report_string).collect(),
            nus: spec.nus.iter().map(Scalar::to_report_string).collect(),
            eta: spec.eta.to_report_string(),
        }
    }

    pub fn weights<S: Scalar>(w: &VertexWeights<S>) -> Self {
        ParamEcho::Weights {
            a: w.a.to_report_string(),
            b: w.b.to_report_string(),
            c: w.c.to_report_string(),
        }
    }
}

/// A computed quantity together with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult<S> {
    pub value: S,
    pub quantity: Quantity,
    pub engine: Engine,
    pub n: usize,
    /// Profile `r_1..r_s`, or `[r]` for a boundary correlation.
    pub r: Vec<usize>,
    pub params: ParamEcho,
}

impl<S: Scalar> CorrelationResult<S> {
    pub fn backend(&self) -> Backend {
        S::BACKEND
    }

    pub fn precision(&self) -> Option<u32> {
        self.value.precision()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "quantity": self.quantity,
            "value": self.value.to_report_string(),
            "engine": self.engine,
            "backend": self.backend(),
            "precision": self.precision(),
            "N": self.n,
            "r": self.r,
            "params": self.params,
        })
    }
}
