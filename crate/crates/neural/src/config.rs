use crate::error::NetError;

/// Architecture of the recurrent value network: dense layers before and after
/// one LSTM cell, leaky-rectifier activations, linear output head.
#[derive(Debug, Clone, PartialEq)]
pub struct NetConfig {
    pub input_dim: usize,
    pub pre_widths: Vec<usize>,
    pub recurrent_width: usize,
    pub post_widths: Vec<usize>,
    pub output_dim: usize,
    pub leaky_slope: f64,
}

impl NetConfig {
    /// Two 32-wide dense layers on each side of the recurrent cell.
    pub fn standard(input_dim: usize, recurrent_width: usize, output_dim: usize) -> Self {
        Self {
            input_dim,
            pre_widths: vec![32, 32],
            recurrent_width,
            post_widths: vec![32, 32],
            output_dim,
            leaky_slope: 0.01,
        }
    }

    pub fn with_dense_width(mut self, width: usize) -> Self {
        self.pre_widths = vec![width, width];
        self.post_widths = vec![width, width];
        self
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.input_dim == 0
            || self.recurrent_width == 0
            || self.output_dim == 0
            || self.pre_widths.iter().any(|&w| w == 0)
            || self.post_widths.iter().any(|&w| w == 0)
        {
            return Err(NetError::InvalidConfig("all widths must be >= 1".into()));
        }
        if !self.leaky_slope.is_finite() {
            return Err(NetError::InvalidConfig("non-finite leaky slope".into()));
        }
        Ok(())
    }

    /// Width of the LSTM cell's input.
    pub fn cell_input_dim(&self) -> usize {
        self.pre_widths.last().copied().unwrap_or(self.input_dim)
    }

    /// Width of the output head's input.
    pub fn head_input_dim(&self) -> usize {
        self.post_widths.last().copied().unwrap_or(self.recurrent_width)
    }
}
