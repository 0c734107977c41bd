use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rpca::{RpcaParams, SolverKind};

fn default_solver() -> SolverKind {
    SolverKind::AccAltProj
}

/// Solver selection and a complete parameter set, as accepted by
/// `solve --config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_solver")]
    pub solver: SolverKind,
    pub params: RpcaParams,
}

impl RunConfig {
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        self.params.validate(m, n)
    }
}

/// Reads a JSON config. Unknown keys are rejected by the target type.
pub fn load_config<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::PhaseConfig;

    #[test]
    fn unknown_keys_rejected() {
        let ok = r#"{"solver":"altproj","params":{"r":2,"mu":1.5,"beta":0.1,"beta_init":0.2,
            "gamma":0.5,"epsilon":1e-6,"max_iter":10,"trim_enabled":true}}"#;
        let cfg: RunConfig = serde_json::from_str(ok).unwrap();
        assert_eq!(cfg.solver, SolverKind::AltProj);
        assert!(cfg.validate(10, 10).is_ok());
        assert!(cfg.validate(1, 10).is_err());
        let extra = ok.replacen("\"r\":2", "\"r\":2,\"rank\":2", 1);
        assert!(serde_json::from_str::<RunConfig>(&extra).is_err());

        let grid = r#"{"n":50,"r":2,"alphas":[0.1],"cs":[1.0],"trials":1,"seed":3}"#;
        let cfg: PhaseConfig = serde_json::from_str(grid).unwrap();
        assert_eq!(cfg.tol, 1e-6);
        assert!(serde_json::from_str::<PhaseConfig>(&grid.replace("\"seed\"", "\"sed\"")).is_err());
    }
}
