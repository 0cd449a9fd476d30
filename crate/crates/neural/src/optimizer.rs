use crate::error::NetError;
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    /// Plain gradient descent, `θ -= lr·scale·g`.
    Sgd,
    /// Adaptive moment estimation with bias correction.
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

/// First-order optimizer over the canonical flat parameter order. The `scale`
/// argument of [`Optimizer::step`] multiplies the applied step only, leaving
/// moment accumulators untouched; it is the hook asymmetric update rules use.
#[derive(Debug, Clone)]
pub struct Optimizer {
    pub kind: OptimizerKind,
    pub step_size: f64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, step_size: f64, n_params: usize) -> Self {
        let moments = match kind {
            OptimizerKind::Sgd => 0,
            OptimizerKind::Adam { .. } => n_params,
        };
        Self {
            kind,
            step_size,
            m: vec![0.0; moments],
            v: vec![0.0; moments],
            t: 0,
        }
    }

    pub fn sgd(step_size: f64, n_params: usize) -> Self {
        Self::new(OptimizerKind::Sgd, step_size, n_params)
    }

    pub fn adam(step_size: f64, n_params: usize) -> Self {
        Self::new(
            OptimizerKind::Adam { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 },
            step_size,
            n_params,
        )
    }

    /// Apply one update. Rejects non-finite gradients before touching any
    /// state so a numerical blow-up aborts cleanly.
    pub fn step(
        &mut self,
        params: &mut Params,
        grads: &Params,
        scale: f64,
    ) -> Result<(), NetError> {
        let mut bad: Option<usize> = None;
        let mut idx = 0usize;
        grads.visit(|g| {
            if !g.is_finite() && bad.is_none() {
                bad = Some(idx);
            }
            idx += 1;
        });
        if let Some(index) = bad {
            return Err(NetError::NonFiniteGradient { index });
        }

        let lr = self.step_size * scale;
        match self.kind {
            OptimizerKind::Sgd => {
                params.zip_apply(grads, |p, g| *p -= lr * g);
            }
            OptimizerKind::Adam { beta1, beta2, epsilon } => {
                self.t += 1;
                let bc1 = 1.0 - beta1.powi(self.t as i32);
                let bc2 = 1.0 - beta2.powi(self.t as i32);
                let (m, v) = (&mut self.m, &mut self.v);
                let mut k = 0usize;
                params.zip_apply(grads, |p, g| {
                    m[k] = beta1 * m[k] + (1.0 - beta1) * g;
                    v[k] = beta2 * v[k] + (1.0 - beta2) * g * g;
                    let mhat = m[k] / bc1;
                    let vhat = v[k] / bc2;
                    *p -= lr * mhat / (vhat.sqrt() + epsilon);
                    k += 1;
                });
            }
        }
        Ok(())
    }
}
