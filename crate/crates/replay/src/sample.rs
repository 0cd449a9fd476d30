use macrl_core::MacroObservation;
use rand::Rng;
use rand::RngCore;

use crate::squeeze::{AgentSqueezedEntry, JointSqueezedEntry, SqueezedTrace};

/// How a mini-batch draw slices the stored raw rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// Whole episodes.
    FullEpisode,
    /// Aligned raw-tick windows of this length; windows longer than an
    /// episode clip to the episode bounds.
    Trace { len: usize },
}

/// Uniform-with-replacement draws of (episode, start, end) windows.
pub(crate) fn draw_windows(
    lens: &[usize],
    batch_size: usize,
    mode: SampleMode,
    mut rng: &mut dyn RngCore,
) -> Vec<(usize, usize, usize)> {
    (0..batch_size)
        .map(|_| {
            let ep = (&mut rng).gen_range(0..lens.len());
            let len = lens[ep];
            match mode {
                SampleMode::FullEpisode => (ep, 0, len),
                SampleMode::Trace { len: want } => {
                    if want >= len {
                        (ep, 0, len)
                    } else {
                        let start = (&mut rng).gen_range(0..=len - want);
                        (ep, start, start + want)
                    }
                }
            }
        })
        .collect()
}

/// Right-padded batch of squeezed traces plus the validity mask; padded
/// positions must contribute zero to any loss.
#[derive(Debug, Clone)]
pub struct PaddedBatch<T> {
    /// entries[draw][step], every inner vec `max_len` long.
    pub entries: Vec<Vec<T>>,
    /// mask[draw][step], true on real entries.
    pub mask: Vec<Vec<bool>>,
    pub max_len: usize,
}

pub trait PadSentinel: Clone {
    /// Inert padding record shaped like `template`: zero observations, macro
    /// id 0, zero reward, duration 1.
    fn sentinel(template: &Self) -> Self;
}

impl PadSentinel for AgentSqueezedEntry {
    fn sentinel(template: &Self) -> Self {
        AgentSqueezedEntry {
            z: MacroObservation::zeros(template.z.dim()),
            m: 0,
            z_next: MacroObservation::zeros(template.z_next.dim()),
            reward: 0.0,
            tau: 1,
            done: false,
        }
    }
}

impl PadSentinel for JointSqueezedEntry {
    fn sentinel(template: &Self) -> Self {
        JointSqueezedEntry {
            z: template.z.iter().map(|o| MacroObservation::zeros(o.dim())).collect(),
            m: vec![0; template.m.len()],
            z_next: template
                .z_next
                .iter()
                .map(|o| MacroObservation::zeros(o.dim()))
                .collect(),
            reward: 0.0,
            tau: 1,
            done: false,
            undone_mask: vec![false; template.undone_mask.len()],
        }
    }
}

/// Right-pad traces to the batch maximum with sentinel records and emit the
/// mask. A batch whose traces are all empty yields `max_len == 0`.
pub fn pad_batch<T: PadSentinel>(traces: &[SqueezedTrace<T>]) -> PaddedBatch<T> {
    let max_len = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    let template = traces
        .iter()
        .find_map(|t| t.entries.first())
        .map(|e| T::sentinel(e));
    let mut entries = Vec::with_capacity(traces.len());
    let mut mask = Vec::with_capacity(traces.len());
    for t in traces {
        let mut row = t.entries.clone();
        let mut row_mask = vec![true; t.len()];
        if let Some(ref s) = template {
            row.resize(max_len, s.clone());
        }
        row_mask.resize(max_len, false);
        entries.push(row);
        mask.push(row_mask);
    }
    PaddedBatch {
        entries,
        mask,
        max_len,
    }
}
