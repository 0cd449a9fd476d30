use std::collections::VecDeque;

use macrl_core::{MacroId, MacroObservation};
use rand::RngCore;

use crate::error::ReplayError;
use crate::record::{AgentStepRecord, JointStepRecord};
use crate::sample::{draw_windows, SampleMode};
use crate::squeeze::{
    squeeze_agent_trace, squeeze_joint_trace, AgentSqueezedEntry, JointSqueezedEntry,
    SqueezedTrace,
};

/// Per-agent, per-tick recording input.
#[derive(Debug, Clone)]
pub struct AgentTickData<'a> {
    /// Macro-observation the agent selected its running macro-action with.
    pub selection_obs: &'a MacroObservation,
    pub macro_id: MacroId,
    pub terminated: bool,
    /// The agent's newest macro-observation; becomes z' at termination.
    pub fresh_obs: &'a MacroObservation,
}

#[derive(Debug, Clone, Default)]
struct Accumulator {
    reward: f64,
    tau: u32,
}

impl Accumulator {
    fn add(&mut self, gamma: f64, reward: f64) {
        self.reward += gamma.powi(self.tau as i32) * reward;
        self.tau += 1;
    }

    fn reset(&mut self) {
        self.reward = 0.0;
        self.tau = 0;
    }
}

#[derive(Debug, Clone)]
pub(crate) struct AgentEpisode {
    /// rows[agent][tick]
    pub rows: Vec<Vec<AgentStepRecord>>,
}

impl AgentEpisode {
    fn len(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }
}

/// Replay buffer of concurrently recorded per-agent rows. Capacity is counted
/// in whole episodes with FIFO eviction, so an episode is never split.
pub struct ConcurrentReplayBuffer {
    n_agents: usize,
    gamma: f64,
    capacity: usize,
    pub(crate) episodes: VecDeque<AgentEpisode>,
    current: Option<(AgentEpisode, Vec<Accumulator>)>,
}

impl ConcurrentReplayBuffer {
    pub fn new(n_agents: usize, gamma: f64, capacity: usize) -> Self {
        assert!(n_agents > 0 && capacity > 0);
        Self {
            n_agents,
            gamma,
            capacity,
            episodes: VecDeque::new(),
            current: None,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn episode_lengths(&self) -> Vec<usize> {
        self.episodes.iter().map(|e| e.len()).collect()
    }

    pub fn begin_episode(&mut self) {
        self.current = Some((
            AgentEpisode {
                rows: vec![Vec::new(); self.n_agents],
            },
            vec![Accumulator::default(); self.n_agents],
        ));
    }

    /// Append one tick to every agent's row. Each agent's accumulator
    /// advances by γ^{elapsed}·reward; a terminating agent's record freezes
    /// the accumulated value and carries the fresh observation as z'.
    pub fn record_tick_decentralized(
        &mut self,
        data: &[AgentTickData],
        reward: f64,
    ) -> Result<(), ReplayError> {
        if data.len() != self.n_agents {
            return Err(ReplayError::RowLengthMismatch {
                expected: self.n_agents,
                got: data.len(),
            });
        }
        let gamma = self.gamma;
        let (episode, accs) = self
            .current
            .as_mut()
            .ok_or(ReplayError::NoEpisodeInProgress)?;
        for (i, d) in data.iter().enumerate() {
            accs[i].add(gamma, reward);
            episode.rows[i].push(AgentStepRecord {
                z: d.selection_obs.clone(),
                m: d.macro_id,
                z_next: if d.terminated {
                    d.fresh_obs.clone()
                } else {
                    d.selection_obs.clone()
                },
                r_partial: accs[i].reward,
                terminated: d.terminated,
                tau_so_far: accs[i].tau,
            });
            if d.terminated {
                accs[i].reset();
            }
        }
        debug_assert!(episode.rows.iter().all(|r| r.len() == episode.rows[0].len()));
        Ok(())
    }

    /// Close the in-progress episode and store it, evicting the oldest
    /// episode when over capacity. Empty episodes are dropped.
    pub fn end_episode(&mut self) -> Result<(), ReplayError> {
        let (episode, _) = self.current.take().ok_or(ReplayError::NoEpisodeInProgress)?;
        if episode.len() > 0 {
            self.episodes.push_back(episode);
            while self.episodes.len() > self.capacity {
                self.episodes.pop_front();
            }
        }
        Ok(())
    }

    pub(crate) fn in_progress(&self) -> bool {
        self.current.is_some()
    }

    /// Squeeze one stored episode's row for one agent.
    pub fn squeeze_episode(
        &self,
        episode: usize,
        agent: usize,
    ) -> Result<SqueezedTrace<AgentSqueezedEntry>, ReplayError> {
        let ep = self
            .episodes
            .get(episode)
            .ok_or(ReplayError::BufferEmpty)?;
        squeeze_agent_trace(&ep.rows[agent], true)
    }

    /// Draw a concurrent mini-batch: the same episode indices and, in trace
    /// mode, the same raw-tick windows for every agent, so all agents' samples
    /// cover identical wall-clock spans. Raw windows are sliced first and
    /// squeezed after. Returns `out[agent][draw]`.
    pub fn sample_concurrent(
        &self,
        batch_size: usize,
        mode: SampleMode,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Vec<SqueezedTrace<AgentSqueezedEntry>>>, ReplayError> {
        if self.episodes.is_empty() {
            return Err(ReplayError::BufferEmpty);
        }
        let lens = self.episode_lengths();
        let windows = draw_windows(&lens, batch_size, mode, rng);
        let mut out = vec![Vec::with_capacity(batch_size); self.n_agents];
        for &(ep_idx, start, end) in &windows {
            let ep = &self.episodes[ep_idx];
            let ends_episode = end == ep.len();
            for agent in 0..self.n_agents {
                let trace = squeeze_agent_trace(&ep.rows[agent][start..end], ends_episode)?;
                out[agent].push(trace);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct JointEpisode {
    pub rows: Vec<JointStepRecord>,
}

/// Replay buffer of joint rows; a segment's accumulator resets exactly at
/// joint boundaries (any agent terminated).
pub struct JointReplayBuffer {
    n_agents: usize,
    gamma: f64,
    capacity: usize,
    pub(crate) episodes: VecDeque<JointEpisode>,
    current: Option<(JointEpisode, Accumulator)>,
}

impl JointReplayBuffer {
    pub fn new(n_agents: usize, gamma: f64, capacity: usize) -> Self {
        assert!(n_agents > 0 && capacity > 0);
        Self {
            n_agents,
            gamma,
            capacity,
            episodes: VecDeque::new(),
            current: None,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn episode_lengths(&self) -> Vec<usize> {
        self.episodes.iter().map(|e| e.rows.len()).collect()
    }

    pub fn begin_episode(&mut self) {
        self.current = Some((JointEpisode { rows: Vec::new() }, Accumulator::default()));
    }

    pub fn record_tick_joint(
        &mut self,
        data: &[AgentTickData],
        reward: f64,
    ) -> Result<(), ReplayError> {
        if data.len() != self.n_agents {
            return Err(ReplayError::RowLengthMismatch {
                expected: self.n_agents,
                got: data.len(),
            });
        }
        let gamma = self.gamma;
        let (episode, acc) = self
            .current
            .as_mut()
            .ok_or(ReplayError::NoEpisodeInProgress)?;
        acc.add(gamma, reward);
        let any_terminated = data.iter().any(|d| d.terminated);
        episode.rows.push(JointStepRecord {
            z: data.iter().map(|d| d.selection_obs.clone()).collect(),
            m: data.iter().map(|d| d.macro_id).collect(),
            z_next: data
                .iter()
                .map(|d| {
                    if d.terminated {
                        d.fresh_obs.clone()
                    } else {
                        d.selection_obs.clone()
                    }
                })
                .collect(),
            r_partial: acc.reward,
            any_terminated,
            undone_mask: data.iter().map(|d| !d.terminated).collect(),
            tau_so_far: acc.tau,
        });
        if any_terminated {
            acc.reset();
        }
        Ok(())
    }

    pub fn end_episode(&mut self) -> Result<(), ReplayError> {
        let (episode, _) = self.current.take().ok_or(ReplayError::NoEpisodeInProgress)?;
        if !episode.rows.is_empty() {
            self.episodes.push_back(episode);
            while self.episodes.len() > self.capacity {
                self.episodes.pop_front();
            }
        }
        Ok(())
    }

    pub(crate) fn in_progress(&self) -> bool {
        self.current.is_some()
    }

    pub fn squeeze_episode(
        &self,
        episode: usize,
    ) -> Result<SqueezedTrace<JointSqueezedEntry>, ReplayError> {
        let ep = self
            .episodes
            .get(episode)
            .ok_or(ReplayError::BufferEmpty)?;
        squeeze_joint_trace(&ep.rows, true)
    }

    pub fn sample(
        &self,
        batch_size: usize,
        mode: SampleMode,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<SqueezedTrace<JointSqueezedEntry>>, ReplayError> {
        if self.episodes.is_empty() {
            return Err(ReplayError::BufferEmpty);
        }
        let lens = self.episode_lengths();
        let windows = draw_windows(&lens, batch_size, mode, rng);
        windows
            .into_iter()
            .map(|(ep_idx, start, end)| {
                let ep = &self.episodes[ep_idx];
                squeeze_joint_trace(&ep.rows[start..end], end == ep.rows.len())
            })
            .collect()
    }
}
