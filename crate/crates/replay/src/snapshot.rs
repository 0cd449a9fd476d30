//! Buffer snapshot format, for saving and restoring training state.
//!
//! Layout (all integers little-endian):
//!   magic   b"MRLB"
//!   version u32 (currently 1)
//!   kind    u8  (0 per-agent, 1 joint)
//!   n_agents u32, gamma f64, capacity u64, n_episodes u64
//!   episodes, each: len u64 followed by the records
//!     per-agent record: z f64s, m u32, z' f64s, r f64, terminated u8, tau u32
//!     joint record adds per-agent z/z'/m plus the undone mask bytes
//! Float vectors are u64-length-prefixed.

use std::io::{Read, Write};

use macrl_core::wire::*;
use macrl_core::MacroObservation;

use crate::buffer::{AgentEpisode, ConcurrentReplayBuffer, JointEpisode, JointReplayBuffer};
use crate::error::ReplayError;
use crate::record::{AgentStepRecord, JointStepRecord};

const MAGIC: &[u8; 4] = b"MRLB";
const VERSION: u32 = 1;

impl ConcurrentReplayBuffer {
    pub fn save<W: Write>(&self, w: &mut W) -> Result<(), ReplayError> {
        if self.in_progress() {
            return Err(ReplayError::EpisodeInProgress);
        }
        w.write_all(MAGIC)?;
        write_u32(w, VERSION)?;
        write_u8(w, 0)?;
        write_u32(w, self.n_agents() as u32)?;
        write_f64(w, self.gamma())?;
        write_u64(w, self.capacity() as u64)?;
        write_u64(w, self.episodes.len() as u64)?;
        for ep in &self.episodes {
            write_u64(w, ep.rows[0].len() as u64)?;
            for row in &ep.rows {
                for rec in row {
                    write_f64_slice(w, &rec.z.features)?;
                    write_u32(w, rec.m as u32)?;
                    write_f64_slice(w, &rec.z_next.features)?;
                    write_f64(w, rec.r_partial)?;
                    write_u8(w, rec.terminated as u8)?;
                    write_u32(w, rec.tau_so_far)?;
                }
            }
        }
        Ok(())
    }

    pub fn load<R: Read>(r: &mut R) -> Result<Self, ReplayError> {
        let (kind, n_agents, gamma, capacity, n_episodes) = read_header(r)?;
        if kind != 0 {
            return Err(ReplayError::Format("expected per-agent buffer".into()));
        }
        let mut buffer = ConcurrentReplayBuffer::new(n_agents, gamma, capacity);
        for _ in 0..n_episodes {
            let len = read_u64(r)? as usize;
            let mut rows = Vec::with_capacity(n_agents);
            for _ in 0..n_agents {
                let mut row = Vec::with_capacity(len);
                for _ in 0..len {
                    row.push(AgentStepRecord {
                        z: MacroObservation::new(read_f64_vec(r)?),
                        m: read_u32(r)? as usize,
                        z_next: MacroObservation::new(read_f64_vec(r)?),
                        r_partial: read_f64(r)?,
                        terminated: read_u8(r)? != 0,
                        tau_so_far: read_u32(r)?,
                    });
                }
                rows.push(row);
            }
            buffer.episodes.push_back(AgentEpisode { rows });
        }
        Ok(buffer)
    }
}

impl JointReplayBuffer {
    pub fn save<W: Write>(&self, w: &mut W) -> Result<(), ReplayError> {
        if self.in_progress() {
            return Err(ReplayError::EpisodeInProgress);
        }
        w.write_all(MAGIC)?;
        write_u32(w, VERSION)?;
        write_u8(w, 1)?;
        write_u32(w, self.n_agents() as u32)?;
        write_f64(w, self.gamma())?;
        write_u64(w, self.capacity() as u64)?;
        write_u64(w, self.episodes.len() as u64)?;
        for ep in &self.episodes {
            write_u64(w, ep.rows.len() as u64)?;
            for rec in &ep.rows {
                for o in &rec.z {
                    write_f64_slice(w, &o.features)?;
                }
                for &m in &rec.m {
                    write_u32(w, m as u32)?;
                }
                for o in &rec.z_next {
                    write_f64_slice(w, &o.features)?;
                }
                write_f64(w, rec.r_partial)?;
                write_u8(w, rec.any_terminated as u8)?;
                for &u in &rec.undone_mask {
                    write_u8(w, u as u8)?;
                }
                write_u32(w, rec.tau_so_far)?;
            }
        }
        Ok(())
    }

    pub fn load<R: Read>(r: &mut R) -> Result<Self, ReplayError> {
        let (kind, n_agents, gamma, capacity, n_episodes) = read_header(r)?;
        if kind != 1 {
            return Err(ReplayError::Format("expected joint buffer".into()));
        }
        let mut buffer = JointReplayBuffer::new(n_agents, gamma, capacity);
        for _ in 0..n_episodes {
            let len = read_u64(r)? as usize;
            let mut rows = Vec::with_capacity(len);
            for _ in 0..len {
                let z = (0..n_agents)
                    .map(|_| Ok(MacroObservation::new(read_f64_vec(r)?)))
                    .collect::<Result<Vec<_>, ReplayError>>()?;
                let m = (0..n_agents)
                    .map(|_| Ok(read_u32(r)? as usize))
                    .collect::<Result<Vec<_>, ReplayError>>()?;
                let z_next = (0..n_agents)
                    .map(|_| Ok(MacroObservation::new(read_f64_vec(r)?)))
                    .collect::<Result<Vec<_>, ReplayError>>()?;
                let r_partial = read_f64(r)?;
                let any_terminated = read_u8(r)? != 0;
                let undone_mask = (0..n_agents)
                    .map(|_| Ok(read_u8(r)? != 0))
                    .collect::<Result<Vec<_>, ReplayError>>()?;
                rows.push(JointStepRecord {
                    z,
                    m,
                    z_next,
                    r_partial,
                    any_terminated,
                    undone_mask,
                    tau_so_far: read_u32(r)?,
                });
            }
            buffer.episodes.push_back(JointEpisode { rows });
        }
        Ok(buffer)
    }
}

fn read_header<R: Read>(r: &mut R) -> Result<(u8, usize, f64, usize, u64), ReplayError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ReplayError::Format("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(ReplayError::Format(format!(
            "unsupported version {version}"
        )));
    }
    let kind = read_u8(r)?;
    let n_agents = read_u32(r)? as usize;
    let gamma = read_f64(r)?;
    let capacity = read_u64(r)? as usize;
    let n_episodes = read_u64(r)?;
    Ok((kind, n_agents, gamma, capacity, n_episodes))
}
