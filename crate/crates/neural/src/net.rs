use ndarray::{s, Array1, Array2, Axis};
use rand::RngCore;

use crate::config::NetConfig;
use crate::error::NetError;
use crate::params::Params;

/// Recurrent carry: hidden and cell state, one row per batch element. Reset
/// to zeros at every episode or trace start.
#[derive(Debug, Clone, PartialEq)]
pub struct Hidden {
    pub h: Array2<f64>,
    pub c: Array2<f64>,
}

impl Hidden {
    pub fn zeros(batch: usize, width: usize) -> Self {
        Hidden {
            h: Array2::zeros((batch, width)),
            c: Array2::zeros((batch, width)),
        }
    }
}

struct DenseCache {
    input: Array2<f64>,
    pre: Array2<f64>,
}

struct LstmStepCache {
    input: Array2<f64>,
    h_prev: Array2<f64>,
    c_prev: Array2<f64>,
    i: Array2<f64>,
    f: Array2<f64>,
    g: Array2<f64>,
    o: Array2<f64>,
    tanh_c: Array2<f64>,
}

struct StepCache {
    pre: Vec<DenseCache>,
    lstm: LstmStepCache,
    post: Vec<DenseCache>,
    head_input: Array2<f64>,
}

/// Activations saved by a cached forward pass, consumed by
/// [`backward_sequence`].
pub struct ForwardCache {
    steps: Vec<StepCache>,
}

fn leaky(x: &Array2<f64>, slope: f64) -> Array2<f64> {
    x.mapv(|v| if v > 0.0 { v } else { slope * v })
}

fn leaky_deriv(pre: &Array2<f64>, slope: f64) -> Array2<f64> {
    pre.mapv(|v| if v > 0.0 { 1.0 } else { slope })
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn check_inputs(cfg: &NetConfig, inputs: &[Array2<f64>], hidden: &Hidden) -> Result<(), NetError> {
    for x in inputs {
        if x.ncols() != cfg.input_dim {
            return Err(NetError::DimensionMismatch {
                expected: cfg.input_dim,
                got: x.ncols(),
            });
        }
    }
    if hidden.h.ncols() != cfg.recurrent_width {
        return Err(NetError::DimensionMismatch {
            expected: cfg.recurrent_width,
            got: hidden.h.ncols(),
        });
    }
    Ok(())
}

fn forward_impl(
    cfg: &NetConfig,
    params: &Params,
    inputs: &[Array2<f64>],
    hidden: &mut Hidden,
    mut cache: Option<&mut Vec<StepCache>>,
) -> Result<Vec<Array2<f64>>, NetError> {
    check_inputs(cfg, inputs, hidden)?;
    let hw = cfg.recurrent_width;
    let mut outputs = Vec::with_capacity(inputs.len());
    for x_t in inputs {
        let mut x = x_t.clone();
        let mut pre_caches = Vec::with_capacity(params.pre.len());
        for d in &params.pre {
            let pre = x.dot(&d.w.t()) + &d.b;
            let act = leaky(&pre, cfg.leaky_slope);
            if cache.is_some() {
                pre_caches.push(DenseCache { input: x, pre });
            }
            x = act;
        }

        let gates = x.dot(&params.cell.wx.t()) + hidden.h.dot(&params.cell.wh.t()) + &params.cell.b;
        let i = gates.slice(s![.., 0..hw]).mapv(sigmoid);
        let f = gates.slice(s![.., hw..2 * hw]).mapv(sigmoid);
        let g = gates.slice(s![.., 2 * hw..3 * hw]).mapv(f64::tanh);
        let o = gates.slice(s![.., 3 * hw..4 * hw]).mapv(sigmoid);
        let c = &f * &hidden.c + &i * &g;
        let tanh_c = c.mapv(f64::tanh);
        let new_h = &o * &tanh_c;
        let lstm_cache = if cache.is_some() {
            Some(LstmStepCache {
                input: x,
                h_prev: hidden.h.clone(),
                c_prev: hidden.c.clone(),
                i,
                f,
                g,
                o,
                tanh_c: tanh_c.clone(),
            })
        } else {
            None
        };
        hidden.c = c;
        hidden.h = new_h;

        let mut y = hidden.h.clone();
        let mut post_caches = Vec::with_capacity(params.post.len());
        for d in &params.post {
            let pre = y.dot(&d.w.t()) + &d.b;
            let act = leaky(&pre, cfg.leaky_slope);
            if cache.is_some() {
                post_caches.push(DenseCache { input: y, pre });
            }
            y = act;
        }
        let q = y.dot(&params.head.w.t()) + &params.head.b;
        if let Some(steps) = cache.as_deref_mut() {
            steps.push(StepCache {
                pre: pre_caches,
                lstm: lstm_cache.unwrap(),
                post: post_caches,
                head_input: y,
            });
        }
        outputs.push(q);
    }
    Ok(outputs)
}

/// Run the network over a batched observation sequence (`inputs[t]` is
/// `[batch, input_dim]`). `q[t]` depends only on `inputs[0..=t]`; the hidden
/// state advances in place.
pub fn forward_sequence(
    cfg: &NetConfig,
    params: &Params,
    inputs: &[Array2<f64>],
    hidden: &mut Hidden,
) -> Result<Vec<Array2<f64>>, NetError> {
    forward_impl(cfg, params, inputs, hidden, None)
}

/// As [`forward_sequence`] but additionally saves the activations needed for
/// a backward pass.
pub fn forward_sequence_cached(
    cfg: &NetConfig,
    params: &Params,
    inputs: &[Array2<f64>],
    hidden: &mut Hidden,
) -> Result<(Vec<Array2<f64>>, ForwardCache), NetError> {
    let mut steps = Vec::with_capacity(inputs.len());
    let out = forward_impl(cfg, params, inputs, hidden, Some(&mut steps))?;
    Ok((out, ForwardCache { steps }))
}

/// Exact gradients of `sum_t <dq[t], q[t]>` with respect to every parameter,
/// by backpropagation through time over the cached forward pass.
pub fn backward_sequence(
    cfg: &NetConfig,
    params: &Params,
    cache: &ForwardCache,
    dq: &[Array2<f64>],
) -> Params {
    assert_eq!(dq.len(), cache.steps.len(), "one loss gradient per step");
    let hw = cfg.recurrent_width;
    let batch = cache
        .steps
        .first()
        .map_or(0, |s| s.lstm.h_prev.nrows());
    let mut grads = Params::zeros(cfg);
    let mut dh_next: Array2<f64> = Array2::zeros((batch, hw));
    let mut dc_next: Array2<f64> = Array2::zeros((batch, hw));

    for (step, dq_t) in cache.steps.iter().zip(dq).rev() {
        // head
        grads.head.w = grads.head.w + dq_t.t().dot(&step.head_input);
        grads.head.b = grads.head.b + dq_t.sum_axis(Axis(0));
        let mut dy = dq_t.dot(&params.head.w);

        // post dense stack
        for (l, d) in params.post.iter().enumerate().rev() {
            let cache_l = &step.post[l];
            let dpre = &dy * &leaky_deriv(&cache_l.pre, cfg.leaky_slope);
            grads.post[l].w = grads.post[l].w.clone() + dpre.t().dot(&cache_l.input);
            grads.post[l].b = grads.post[l].b.clone() + dpre.sum_axis(Axis(0));
            dy = dpre.dot(&d.w);
        }

        // lstm cell
        let lc = &step.lstm;
        let dh = dy + &dh_next;
        let d_o = &dh * &lc.tanh_c;
        let dc = &dh * &lc.o * lc.tanh_c.mapv(|v| 1.0 - v * v) + &dc_next;
        let d_i = &dc * &lc.g;
        let d_f = &dc * &lc.c_prev;
        let d_g = &dc * &lc.i;
        dc_next = &dc * &lc.f;

        let mut da = Array2::zeros((batch, 4 * hw));
        da.slice_mut(s![.., 0..hw])
            .assign(&(&d_i * &lc.i.mapv(|v| v * (1.0 - v))));
        da.slice_mut(s![.., hw..2 * hw])
            .assign(&(&d_f * &lc.f.mapv(|v| v * (1.0 - v))));
        da.slice_mut(s![.., 2 * hw..3 * hw])
            .assign(&(&d_g * &lc.g.mapv(|v| 1.0 - v * v)));
        da.slice_mut(s![.., 3 * hw..4 * hw])
            .assign(&(&d_o * &lc.o.mapv(|v| v * (1.0 - v))));

        grads.cell.wx = grads.cell.wx + da.t().dot(&lc.input);
        grads.cell.wh = grads.cell.wh + da.t().dot(&lc.h_prev);
        grads.cell.b = grads.cell.b + da.sum_axis(Axis(0));
        dh_next = da.dot(&params.cell.wh);
        let mut dx = da.dot(&params.cell.wx);

        // pre dense stack
        for (l, d) in params.pre.iter().enumerate().rev() {
            let cache_l = &step.pre[l];
            let dpre = &dx * &leaky_deriv(&cache_l.pre, cfg.leaky_slope);
            grads.pre[l].w = grads.pre[l].w.clone() + dpre.t().dot(&cache_l.input);
            grads.pre[l].b = grads.pre[l].b.clone() + dpre.sum_axis(Axis(0));
            dx = dpre.dot(&d.w);
        }
    }
    grads
}

/// Online/target parameter pair sharing one architecture.
#[derive(Debug, Clone)]
pub struct RecurrentQNet {
    pub cfg: NetConfig,
    pub online: Params,
    pub target: Params,
}

impl RecurrentQNet {
    pub fn new(cfg: NetConfig, rng: &mut dyn RngCore) -> Result<Self, NetError> {
        cfg.validate()?;
        let online = Params::init(&cfg, rng);
        let target = online.clone();
        Ok(Self { cfg, online, target })
    }

    pub fn hidden(&self, batch: usize) -> Hidden {
        Hidden::zeros(batch, self.cfg.recurrent_width)
    }

    pub fn forward_online(
        &self,
        inputs: &[Array2<f64>],
        hidden: &mut Hidden,
    ) -> Result<Vec<Array2<f64>>, NetError> {
        forward_sequence(&self.cfg, &self.online, inputs, hidden)
    }

    pub fn forward_online_cached(
        &self,
        inputs: &[Array2<f64>],
        hidden: &mut Hidden,
    ) -> Result<(Vec<Array2<f64>>, ForwardCache), NetError> {
        forward_sequence_cached(&self.cfg, &self.online, inputs, hidden)
    }

    pub fn forward_target(
        &self,
        inputs: &[Array2<f64>],
        hidden: &mut Hidden,
    ) -> Result<Vec<Array2<f64>>, NetError> {
        forward_sequence(&self.cfg, &self.target, inputs, hidden)
    }

    pub fn backward(&self, cache: &ForwardCache, dq: &[Array2<f64>]) -> Params {
        backward_sequence(&self.cfg, &self.online, cache, dq)
    }

    /// Advance the online network one step on a single observation and
    /// return its action values; used during execution.
    pub fn value_step(&self, obs: &[f64], hidden: &mut Hidden) -> Result<Vec<f64>, NetError> {
        let x = Array2::from_shape_vec((1, obs.len()), obs.to_vec())
            .map_err(|_| NetError::DimensionMismatch {
                expected: self.cfg.input_dim,
                got: obs.len(),
            })?;
        let q = self.forward_online(&[x], hidden)?;
        Ok(q[0].row(0).to_vec())
    }

    /// θ⁻ := θ, exact copy.
    pub fn sync_target(&mut self) {
        self.target = self.online.clone();
    }
}

/// Mean squared error over masked entries plus its per-entry q-gradient
/// scale; kept here for reuse by loss code and tests.
pub fn masked_mse(pred: &Array1<f64>, target: &Array1<f64>, mask: &[bool]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for k in 0..pred.len() {
        if mask[k] {
            let d = target[k] - pred[k];
            sum += d * d;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}
