//! Minimal recurrent action-value approximator: a stack of leaky-rectifier
//! dense layers around a single LSTM cell, trained by exact backpropagation
//! through time with a first-order optimizer. Everything runs in f64 with
//! deterministic sequential arithmetic, so fixed seeds give bit-identical
//! parameter trajectories within one build.

mod checkpoint;
mod config;
mod error;
mod net;
mod optimizer;
mod params;

pub use checkpoint::{load_net, save_net};
pub use config::NetConfig;
pub use error::NetError;
pub use net::{
    backward_sequence, forward_sequence, forward_sequence_cached, masked_mse, ForwardCache,
    Hidden, RecurrentQNet,
};
pub use optimizer::{Optimizer, OptimizerKind};
pub use params::{Dense, LstmCell, Params};
