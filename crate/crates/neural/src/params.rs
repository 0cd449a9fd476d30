use ndarray::{Array1, Array2};
use rand::Rng;
use rand::RngCore;

use crate::config::NetConfig;

/// Fully connected layer, `y = x W^T + b` with `w: [out, in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Dense {
    fn init(out: usize, inp: usize, rng: &mut dyn RngCore) -> Self {
        let bound = 1.0 / (inp as f64).sqrt();
        let mut rng = rng;
        Dense {
            w: Array2::from_shape_fn((out, inp), |_| (&mut rng).gen_range(-bound..bound)),
            b: Array1::zeros(out),
        }
    }

    fn zeros(out: usize, inp: usize) -> Self {
        Dense {
            w: Array2::zeros((out, inp)),
            b: Array1::zeros(out),
        }
    }
}

/// LSTM cell parameters with gate order [input, forget, cell, output] stacked
/// along the first axis: `wx: [4h, in]`, `wh: [4h, h]`, `b: [4h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell {
    pub wx: Array2<f64>,
    pub wh: Array2<f64>,
    pub b: Array1<f64>,
}

impl LstmCell {
    fn init(hidden: usize, inp: usize, rng: &mut dyn RngCore) -> Self {
        let bx = 1.0 / (inp as f64).sqrt();
        let bh = 1.0 / (hidden as f64).sqrt();
        let mut rng = rng;
        let wx = Array2::from_shape_fn((4 * hidden, inp), |_| (&mut rng).gen_range(-bx..bx));
        let wh = Array2::from_shape_fn((4 * hidden, hidden), |_| (&mut rng).gen_range(-bh..bh));
        let mut b = Array1::zeros(4 * hidden);
        // forget-gate bias starts open
        b.slice_mut(ndarray::s![hidden..2 * hidden]).fill(1.0);
        LstmCell { wx, wh, b }
    }

    fn zeros(hidden: usize, inp: usize) -> Self {
        LstmCell {
            wx: Array2::zeros((4 * hidden, inp)),
            wh: Array2::zeros((4 * hidden, hidden)),
            b: Array1::zeros(4 * hidden),
        }
    }
}

/// All parameters of one network copy.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub pre: Vec<Dense>,
    pub cell: LstmCell,
    pub post: Vec<Dense>,
    pub head: Dense,
}

impl Params {
    pub fn init(cfg: &NetConfig, rng: &mut dyn RngCore) -> Params {
        let mut pre = Vec::new();
        let mut inp = cfg.input_dim;
        for &w in &cfg.pre_widths {
            pre.push(Dense::init(w, inp, rng));
            inp = w;
        }
        let cell = LstmCell::init(cfg.recurrent_width, inp, rng);
        let mut post = Vec::new();
        inp = cfg.recurrent_width;
        for &w in &cfg.post_widths {
            post.push(Dense::init(w, inp, rng));
            inp = w;
        }
        let head = Dense::init(cfg.output_dim, inp, rng);
        Params { pre, cell, post, head }
    }

    pub fn zeros(cfg: &NetConfig) -> Params {
        let mut pre = Vec::new();
        let mut inp = cfg.input_dim;
        for &w in &cfg.pre_widths {
            pre.push(Dense::zeros(w, inp));
            inp = w;
        }
        let cell = LstmCell::zeros(cfg.recurrent_width, inp);
        let mut post = Vec::new();
        inp = cfg.recurrent_width;
        for &w in &cfg.post_widths {
            post.push(Dense::zeros(w, inp));
            inp = w;
        }
        let head = Dense::zeros(cfg.output_dim, inp);
        Params { pre, cell, post, head }
    }

    pub fn n_params(&self) -> usize {
        let dense = |d: &Dense| d.w.len() + d.b.len();
        self.pre.iter().map(dense).sum::<usize>()
            + self.cell.wx.len()
            + self.cell.wh.len()
            + self.cell.b.len()
            + self.post.iter().map(dense).sum::<usize>()
            + dense(&self.head)
    }

    /// Copy every parameter out in the canonical traversal order (pre layers,
    /// cell wx/wh/b, post layers, head; each dense as w row-major then b).
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        self.visit(|v| out.push(v));
        out
    }

    pub fn assign_flat(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.n_params());
        let mut it = values.iter();
        self.visit_mut(|slot| *slot = *it.next().unwrap());
    }

    pub fn visit(&self, mut f: impl FnMut(f64)) {
        for d in &self.pre {
            d.w.iter().for_each(|&v| f(v));
            d.b.iter().for_each(|&v| f(v));
        }
        self.cell.wx.iter().for_each(|&v| f(v));
        self.cell.wh.iter().for_each(|&v| f(v));
        self.cell.b.iter().for_each(|&v| f(v));
        for d in &self.post {
            d.w.iter().for_each(|&v| f(v));
            d.b.iter().for_each(|&v| f(v));
        }
        self.head.w.iter().for_each(|&v| f(v));
        self.head.b.iter().for_each(|&v| f(v));
    }

    pub fn visit_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        for d in &mut self.pre {
            d.w.iter_mut().for_each(&mut f);
            d.b.iter_mut().for_each(&mut f);
        }
        self.cell.wx.iter_mut().for_each(&mut f);
        self.cell.wh.iter_mut().for_each(&mut f);
        self.cell.b.iter_mut().for_each(&mut f);
        for d in &mut self.post {
            d.w.iter_mut().for_each(&mut f);
            d.b.iter_mut().for_each(&mut f);
        }
        self.head.w.iter_mut().for_each(&mut f);
        self.head.b.iter_mut().for_each(&mut f);
    }

    /// Elementwise traversal of (parameter, gradient) pairs in canonical
    /// order; both sides must share shapes.
    pub fn zip_apply(&mut self, grads: &Params, mut f: impl FnMut(&mut f64, f64)) {
        for (dp, dg) in self.pre.iter_mut().zip(&grads.pre) {
            dp.w.iter_mut().zip(dg.w.iter()).for_each(|(a, &b)| f(a, b));
            dp.b.iter_mut().zip(dg.b.iter()).for_each(|(a, &b)| f(a, b));
        }
        self.cell.wx.iter_mut().zip(grads.cell.wx.iter()).for_each(|(a, &b)| f(a, b));
        self.cell.wh.iter_mut().zip(grads.cell.wh.iter()).for_each(|(a, &b)| f(a, b));
        self.cell.b.iter_mut().zip(grads.cell.b.iter()).for_each(|(a, &b)| f(a, b));
        for (dp, dg) in self.post.iter_mut().zip(&grads.post) {
            dp.w.iter_mut().zip(dg.w.iter()).for_each(|(a, &b)| f(a, b));
            dp.b.iter_mut().zip(dg.b.iter()).for_each(|(a, &b)| f(a, b));
        }
        self.head.w.iter_mut().zip(grads.head.w.iter()).for_each(|(a, &b)| f(a, b));
        self.head.b.iter_mut().zip(grads.head.b.iter()).for_each(|(a, &b)| f(a, b));
    }
}
