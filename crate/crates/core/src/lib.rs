//! Boundary-integral solver for the planar Laplace Dirichlet problem in a
//! half-plane domain perforated by a small hole close to the flat boundary.

pub mod experiments;
pub mod geometry;
pub mod kernels;
pub mod limits;
pub mod linalg;
pub mod potentials;
pub mod quadrature;
pub mod solver;
pub mod toy;

pub use geometry::Pt;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("singular kernel configuration: {0}")]
    Singular(String),
    #[error("unsupported dimension {0}")]
    Dimension(usize),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid quadrature request: {0}")]
    Quadrature(String),
    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),
    #[error("point outside the domain: {0}")]
    OutsideDomain(String),
    #[error("singular linear system (condition estimate {0:e})")]
    SingularSystem(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by user input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Geometry(_) | Error::Inadmissible(_) | Error::Quadrature(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
