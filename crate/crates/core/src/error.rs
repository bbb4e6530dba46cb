use thiserror::Error;

use crate::graph::Vertex;

/// A single reason an [`Instance`](crate::Instance) is not well formed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RadiusTooSmall(usize),
    XVertexOutOfRange(Vertex),
    /// Two members of X closer than `radius + 1`.
    NotIndependent { u: Vertex, v: Vertex, distance: usize },
    /// A vertex farther than `radius` from every member of X.
    NotMaximal(Vertex),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // external ids are 1-based
        match self {
            Violation::RadiusTooSmall(r) => write!(f, "radius {r} is below 1"),
            Violation::XVertexOutOfRange(v) => write!(f, "X member {} does not exist", v + 1),
            Violation::NotIndependent { u, v, distance } => write!(
                f,
                "X members {} and {} are at distance {distance}",
                u + 1,
                v + 1
            ),
            Violation::NotMaximal(v) => write!(f, "vertex {} is too far from X", v + 1),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),

    #[error("invalid instance: {}", join_violations(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("radius {got} unsupported, need at least {need}")]
    UnsupportedRadius { need: usize, got: usize },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("reduction precondition violated: {0}")]
    ReductionDomain(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    const SHOWN: usize = 8;
    let mut s = v
        .iter()
        .take(SHOWN)
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    if v.len() > SHOWN {
        s.push_str(&format!("; and {} more", v.len() - SHOWN));
    }
    s
}

pub type Result<T> = std::result::Result<T, Error>;
