use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("momentum {k} below cutoff k_min = {k_min}")]
    Cutoff { k: f64, k_min: f64 },
    #[error("weighted norm diverges for rho = {rho}: |V| = {edge:e} at the sample edge")]
    Divergent { rho: f64, edge: f64 },
    #[error("potential violates the decay hypothesis rho > 5/2: {0}")]
    RhoHypothesis(String),
    #[error("path undersampled: phase jump {jump:.3} rad at sample {index} (limit pi/2)")]
    Undersampled { index: usize, jump: f64 },
    #[error("near-singular symbol at sample {index}: |det| = {det:e}")]
    Singular { index: usize, det: f64 },
    #[error("S(0) violates the admissible structure: {0}")]
    Classification(String),
    #[error("parameter out of resolvable range: {0}")]
    Range(String),
    #[error("infrastructure failure: {0}")]
    Infrastructure(String),
    #[error("physics check failed: {0}")]
    Physics(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Contract(msg()))
    }
}
