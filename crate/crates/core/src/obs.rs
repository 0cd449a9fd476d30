/// A fixed-length numeric encoding of one macro-observation. Length is
/// constant per (environment, agent) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroObservation {
    pub features: Vec<f64>,
}

impl MacroObservation {
    pub fn new(features: Vec<f64>) -> Self {
        Self { features }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            features: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// Concatenate per-agent observations into one joint feature vector.
    pub fn concat(parts: &[MacroObservation]) -> MacroObservation {
        let mut features = Vec::with_capacity(parts.iter().map(|p| p.dim()).sum());
        for p in parts {
            features.extend_from_slice(&p.features);
        }
        MacroObservation { features }
    }
}
