//! Parameter checkpoint format.
//!
//! Layout (little-endian):
//!   magic b"MRLN", version u32 (1)
//!   config: input u32, pre count + widths u32s, recurrent u32,
//!           post count + widths u32s, output u32, leaky slope f64
//!   two parameter blocks (online then target), each:
//!     tensor count u32, then per tensor: rank u8, dims u64s,
//!     then all tensor data as raw f64s in canonical traversal order

use std::io::{Read, Write};

use macrl_core::wire::*;

use crate::config::NetConfig;
use crate::error::NetError;
use crate::net::RecurrentQNet;
use crate::params::Params;

const MAGIC: &[u8; 4] = b"MRLN";
const VERSION: u32 = 1;

pub fn save_net<W: Write>(net: &RecurrentQNet, w: &mut W) -> Result<(), NetError> {
    w.write_all(MAGIC)?;
    write_u32(w, VERSION)?;
    write_config(w, &net.cfg)?;
    write_params(w, &net.online)?;
    write_params(w, &net.target)?;
    Ok(())
}

pub fn load_net<R: Read>(r: &mut R) -> Result<RecurrentQNet, NetError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(NetError::Format("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(NetError::Format(format!("unsupported version {version}")));
    }
    let cfg = read_config(r)?;
    cfg.validate()?;
    let online = read_params(r, &cfg)?;
    let target = read_params(r, &cfg)?;
    Ok(RecurrentQNet { cfg, online, target })
}

fn write_config<W: Write>(w: &mut W, cfg: &NetConfig) -> Result<(), NetError> {
    write_u32(w, cfg.input_dim as u32)?;
    write_u32(w, cfg.pre_widths.len() as u32)?;
    for &x in &cfg.pre_widths {
        write_u32(w, x as u32)?;
    }
    write_u32(w, cfg.recurrent_width as u32)?;
    write_u32(w, cfg.post_widths.len() as u32)?;
    for &x in &cfg.post_widths {
        write_u32(w, x as u32)?;
    }
    write_u32(w, cfg.output_dim as u32)?;
    write_f64(w, cfg.leaky_slope)?;
    Ok(())
}

fn read_config<R: Read>(r: &mut R) -> Result<NetConfig, NetError> {
    let input_dim = read_u32(r)? as usize;
    let n_pre = read_u32(r)? as usize;
    let pre_widths = (0..n_pre)
        .map(|_| Ok(read_u32(r)? as usize))
        .collect::<Result<Vec<_>, NetError>>()?;
    let recurrent_width = read_u32(r)? as usize;
    let n_post = read_u32(r)? as usize;
    let post_widths = (0..n_post)
        .map(|_| Ok(read_u32(r)? as usize))
        .collect::<Result<Vec<_>, NetError>>()?;
    let output_dim = read_u32(r)? as usize;
    let leaky_slope = read_f64(r)?;
    Ok(NetConfig {
        input_dim,
        pre_widths,
        recurrent_width,
        post_widths,
        output_dim,
        leaky_slope,
    })
}

fn tensor_shapes(p: &Params) -> Vec<Vec<usize>> {
    let mut shapes = Vec::new();
    for d in &p.pre {
        shapes.push(vec![d.w.nrows(), d.w.ncols()]);
        shapes.push(vec![d.b.len()]);
    }
    shapes.push(vec![p.cell.wx.nrows(), p.cell.wx.ncols()]);
    shapes.push(vec![p.cell.wh.nrows(), p.cell.wh.ncols()]);
    shapes.push(vec![p.cell.b.len()]);
    for d in &p.post {
        shapes.push(vec![d.w.nrows(), d.w.ncols()]);
        shapes.push(vec![d.b.len()]);
    }
    shapes.push(vec![p.head.w.nrows(), p.head.w.ncols()]);
    shapes.push(vec![p.head.b.len()]);
    shapes
}

fn write_params<W: Write>(w: &mut W, p: &Params) -> Result<(), NetError> {
    let shapes = tensor_shapes(p);
    write_u32(w, shapes.len() as u32)?;
    for shape in &shapes {
        write_u8(w, shape.len() as u8)?;
        for &d in shape {
            write_u64(w, d as u64)?;
        }
    }
    let mut err = None;
    p.visit(|v| {
        if err.is_none() {
            if let Err(e) = write_f64(w, v) {
                err = Some(e);
            }
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn read_params<R: Read>(r: &mut R, cfg: &NetConfig) -> Result<Params, NetError> {
    let mut params = Params::zeros(cfg);
    let expected = tensor_shapes(&params);
    let count = read_u32(r)? as usize;
    if count != expected.len() {
        return Err(NetError::Format(format!(
            "tensor count {count}, expected {}",
            expected.len()
        )));
    }
    for want in &expected {
        let rank = read_u8(r)? as usize;
        if rank != want.len() {
            return Err(NetError::Format("tensor rank mismatch".into()));
        }
        for &d in want {
            let got = read_u64(r)? as usize;
            if got != d {
                return Err(NetError::Format(format!(
                    "tensor shape mismatch: {got} vs {d}"
                )));
            }
        }
    }
    let n = params.n_params();
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        data.push(read_f64(r)?);
    }
    params.assign_flat(&data);
    Ok(params)
}
