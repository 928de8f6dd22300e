//! Variably scaled persistence kernels.
//!
//! A scaling map `Ψ` sends a diagram to another diagram; the scaled kernel
//! evaluates a base kernel on the images, `κ_Ψ(D1, D2) = κ(Ψ(D1), Ψ(D2))`.
//! Positive definiteness carries over: a Gram matrix of `κ_Ψ` is a Gram
//! matrix of `κ` over the scaled diagrams.
//!
//! Two maps are provided, each built on a weighted centre `ψ` of the
//! diagram's points:
//!
//! * [`Scaling::Augment`] adds `ψ(D)` to `D` as one more generator;
//! * [`Scaling::Compress`] keeps the `ρ` most persistent points and replaces
//!   all others by their centre.
//!
//! The centre is either the plain mean ([`Auxiliary::UniformMass`]) or the
//! mean weighted by persistence ([`Auxiliary::Persistence`]).

use serde::{Deserialize, Serialize};

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::kernels::DiagramKernel;

/// Weighting of the centre `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Auxiliary {
    /// Every point weighs the same.
    UniformMass,
    /// Points weigh their persistence `d − b`.
    Persistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Augment,
    Compress { rho: usize },
}

/// A scaling map `Ψ` on persistence diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScalingFunction {
    pub scaling: Scaling,
    pub auxiliary: Auxiliary,
}

impl ScalingFunction {
    pub fn augment(auxiliary: Auxiliary) -> Self {
        ScalingFunction {
            scaling: Scaling::Augment,
            auxiliary,
        }
    }

    /// # Panics
    ///
    /// If `rho` is zero.
    pub fn compress(rho: usize, auxiliary: Auxiliary) -> Self {
        assert!(rho >= 1, "rho must be at least 1");
        ScalingFunction {
            scaling: Scaling::Compress { rho },
            auxiliary,
        }
    }

    pub fn apply(&self, d: &PersistenceDiagram) -> PersistenceDiagram {
        apply_scaling(d, self)
    }

    /// Short label such as `augment/persistence` or `compress(10)/mass`.
    pub fn label(&self) -> String {
        let aux = match self.auxiliary {
            Auxiliary::UniformMass => "mass",
            Auxiliary::Persistence => "persistence",
        };
        match self.scaling {
            Scaling::Augment => format!("augment/{aux}"),
            Scaling::Compress { rho } => format!("compress({rho})/{aux}"),
        }
    }
}

fn weighted_centre(
    points: &[DiagramPoint],
    weight: impl Fn(&DiagramPoint) -> f64,
) -> Option<DiagramPoint> {
    let total: f64 = points.iter().map(&weight).sum();
    if points.is_empty() || total <= 0.0 {
        return None;
    }
    let (b, d) = points.iter().fold((0.0, 0.0), |(b, d), p| {
        let w = weight(p);
        (b + w * p.birth, d + w * p.death)
    });
    Some(DiagramPoint::new(b / total, d / total))
}

/// Arithmetic mean of the points, with multiplicity. `None` for an empty
/// diagram, which has no off-diagonal mass.
pub fn centre_of_uniform_mass(d: &PersistenceDiagram) -> Option<DiagramPoint> {
    weighted_centre(d.points(), |_| 1.0)
}

/// Mean of the points weighted by persistence. `None` for an empty diagram.
pub fn centre_of_persistence(d: &PersistenceDiagram) -> Option<DiagramPoint> {
    weighted_centre(d.points(), DiagramPoint::persistence)
}

fn centre(d: &PersistenceDiagram, aux: Auxiliary) -> Option<DiagramPoint> {
    match aux {
        Auxiliary::UniformMass => centre_of_uniform_mass(d),
        Auxiliary::Persistence => centre_of_persistence(d),
    }
}

/// Applies `Ψ` to a diagram.
///
/// Augmenting an empty diagram returns it unchanged. Compressing a diagram
/// with at most `ρ` points returns it unchanged, since there is nothing left
/// to take the centre of. The added centre is appended as an ordinary point.
pub fn apply_scaling(d: &PersistenceDiagram, s: &ScalingFunction) -> PersistenceDiagram {
    match s.scaling {
        Scaling::Augment => {
            let mut out = d.clone();
            if let Some(c) = centre(d, s.auxiliary) {
                out.push(c);
            }
            out
        }
        Scaling::Compress { rho } => {
            if d.len() <= rho {
                return d.clone();
            }
            let (mut kept, rest) = d.split_most_persistent(rho);
            if let Some(c) = centre(&rest, s.auxiliary) {
                kept.push(c);
            }
            kept
        }
    }
}

/// Wraps `base` so that both arguments are scaled by `s` before evaluation.
pub fn make_vspk(base: DiagramKernel, s: ScalingFunction) -> DiagramKernel {
    base.with_scaling(s)
}
