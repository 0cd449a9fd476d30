use rand::Rng;
use rand::RngCore;

use crate::error::CoreError;
use crate::macro_action::MacroId;
use crate::obs::MacroObservation;
use crate::state::JointMacroState;
use crate::EnvModel;

/// Result of one primitive tick of asynchronous macro execution.
#[derive(Debug, Clone)]
pub struct TickOutcome {
    pub reward: f64,
    /// Per agent: did its macro-action terminate at this tick (its own
    /// terminator fired, or the environment/horizon forced termination)?
    pub term_flags: Vec<bool>,
    pub done: bool,
}

/// Decentralized selection policy: one object serving every agent, each call
/// restricted to that agent's currently available macro-actions.
pub trait MacroSelector {
    fn begin_episode(&mut self) {}
    fn select(
        &mut self,
        agent: usize,
        obs: &MacroObservation,
        available: &[MacroId],
        rng: &mut dyn RngCore,
    ) -> MacroId;
}

/// Centralized selection policy over the joint macro-action space. `pinned`
/// fixes the components of agents whose macro-actions are still running; the
/// returned joint choice must respect it.
pub trait JointMacroSelector {
    fn begin_episode(&mut self) {}
    fn select(
        &mut self,
        joint_obs: &[MacroObservation],
        pinned: &[Option<MacroId>],
        available: &[Vec<MacroId>],
        rng: &mut dyn RngCore,
    ) -> Vec<MacroId>;
}

/// Closure adapter for scripted/test selectors.
pub struct FnSelector<F>(pub F);

impl<F> MacroSelector for FnSelector<F>
where
    F: FnMut(usize, &MacroObservation, &[MacroId], &mut dyn RngCore) -> MacroId,
{
    fn select(
        &mut self,
        agent: usize,
        obs: &MacroObservation,
        available: &[MacroId],
        rng: &mut dyn RngCore,
    ) -> MacroId {
        (self.0)(agent, obs, available, rng)
    }
}

/// Owns an environment plus the per-episode execution state: active macros,
/// tick counter, and per-agent observation histories for availability checks.
pub struct EpisodeRunner<E: EnvModel> {
    env: E,
    state: JointMacroState,
    tick: u64,
    macro_histories: Vec<Vec<MacroObservation>>,
}

impl<E: EnvModel> EpisodeRunner<E> {
    pub fn new(env: E) -> Self {
        let n = env.num_agents();
        Self {
            env,
            state: JointMacroState::new(&vec![0; n]),
            tick: 0,
            macro_histories: vec![Vec::new(); n],
        }
    }

    pub fn env(&self) -> &E {
        &self.env
    }

    pub fn env_mut(&mut self) -> &mut E {
        &mut self.env
    }

    pub fn state(&self) -> &JointMacroState {
        &self.state
    }

    pub fn current_tick(&self) -> u64 {
        self.tick
    }

    /// Start a new episode; afterwards every agent needs a selection.
    pub fn reset(&mut self, rng: &mut dyn RngCore) -> Vec<MacroObservation> {
        let obs = self.env.reset(rng);
        let dims: Vec<usize> = obs.iter().map(|o| o.dim()).collect();
        self.state = JointMacroState::new(&dims);
        self.tick = 0;
        self.macro_histories = vec![Vec::new(); obs.len()];
        obs
    }

    /// Per-agent macro-observations as of the latest tick.
    pub fn fresh_obs(&self) -> Vec<MacroObservation> {
        (0..self.env.num_agents())
            .map(|i| self.env.current_macro_obs(i))
            .collect()
    }

    /// Joint observation at the current macro boundary: re-selecting agents
    /// contribute their fresh observation, agents mid-macro contribute the
    /// observation they selected with (no new macro-observation arrives for
    /// them).
    pub fn boundary_joint_obs(&self, fresh: &[MacroObservation]) -> Vec<MacroObservation> {
        (0..self.state.num_agents())
            .map(|i| {
                if self.state.needs_selection(i) {
                    fresh[i].clone()
                } else {
                    self.state.per_agent[i].last_selection_obs.clone()
                }
            })
            .collect()
    }

    /// Run one primitive tick: every agent's controller emits a primitive
    /// action, the environment advances, and termination flags are sampled.
    /// Environment end or horizon forces termination for all agents.
    pub fn run_primitive_tick(&mut self, rng: &mut dyn RngCore) -> Result<TickOutcome, CoreError> {
        let n = self.env.num_agents();
        let mut actions = Vec::with_capacity(n);
        let mut active = Vec::with_capacity(n);
        for i in 0..n {
            let m = self.state.per_agent[i]
                .active_macro
                .ok_or(CoreError::NoActiveMacro { agent: i })?;
            active.push(m);
            let spec = &self.env.macro_specs(i)[m];
            let a = (spec.controller)(self.env.view(i));
            let count = self.env.primitive_action_count(i);
            if a >= count {
                return Err(CoreError::InvalidPrimitiveAction {
                    agent: i,
                    action: a,
                    count,
                });
            }
            actions.push(a);
        }

        let outcome = self.env.step(&actions, rng)?;
        self.tick += 1;

        let mut term_flags = Vec::with_capacity(n);
        for i in 0..n {
            let spec = &self.env.macro_specs(i)[active[i]];
            let p = (spec.terminator)(self.env.view(i));
            if !(0.0..=1.0).contains(&p) {
                return Err(CoreError::TerminatorOutOfRange {
                    agent: i,
                    macro_id: active[i],
                    value: p,
                });
            }
            let fired = if outcome.done {
                true
            } else {
                sample_termination(p, rng)
            };
            term_flags.push(fired);
            self.state.per_agent[i].steps_elapsed += 1;
            self.state.undone_mask[i] = !fired;
        }

        Ok(TickOutcome {
            reward: outcome.reward,
            term_flags,
            done: outcome.done,
        })
    }

    /// Each agent whose macro terminated (or that never selected one) picks a
    /// new macro-action from its available set; agents mid-macro are
    /// untouched.
    pub fn select_macros_decentralized(
        &mut self,
        selector: &mut dyn MacroSelector,
        rng: &mut dyn RngCore,
    ) -> Result<(), CoreError> {
        let fresh = self.fresh_obs();
        let mut any = false;
        for i in 0..self.state.num_agents() {
            if !self.state.needs_selection(i) {
                continue;
            }
            any = true;
            self.macro_histories[i].push(fresh[i].clone());
            let available = self.available_macros(i)?;
            let chosen = selector.select(i, &fresh[i], &available, rng);
            assert!(
                available.contains(&chosen),
                "selector returned unavailable macro {chosen} for agent {i}"
            );
            let a = &mut self.state.per_agent[i];
            a.active_macro = Some(chosen);
            a.steps_elapsed = 0;
            a.last_selection_obs = fresh[i].clone();
        }
        if any {
            self.state.joint_start_tick = self.tick;
        }
        Ok(())
    }

    /// Pick a new joint macro-action with the components of still-running
    /// agents pinned to their running macro-actions; those agents keep their
    /// elapsed step counts.
    pub fn select_macros_centralized(
        &mut self,
        selector: &mut dyn JointMacroSelector,
        rng: &mut dyn RngCore,
    ) -> Result<(), CoreError> {
        let n = self.state.num_agents();
        let fresh = self.fresh_obs();
        let joint_obs = self.boundary_joint_obs(&fresh);

        let mut pinned = Vec::with_capacity(n);
        let mut available = Vec::with_capacity(n);
        for i in 0..n {
            if self.state.needs_selection(i) {
                self.macro_histories[i].push(fresh[i].clone());
                pinned.push(None);
                available.push(self.available_macros(i)?);
            } else {
                let running = self.state.per_agent[i].active_macro.unwrap();
                pinned.push(Some(running));
                available.push(vec![running]);
            }
        }

        let chosen = selector.select(&joint_obs, &pinned, &available, rng);
        assert_eq!(chosen.len(), n);
        for i in 0..n {
            if let Some(p) = pinned[i] {
                assert_eq!(chosen[i], p, "selector moved a pinned agent {i}");
                continue;
            }
            assert!(
                available[i].contains(&chosen[i]),
                "selector returned unavailable macro {} for agent {i}",
                chosen[i]
            );
            let a = &mut self.state.per_agent[i];
            a.active_macro = Some(chosen[i]);
            a.steps_elapsed = 0;
            a.last_selection_obs = fresh[i].clone();
        }
        self.state.joint_start_tick = self.tick;
        Ok(())
    }

    fn available_macros(&self, agent: usize) -> Result<Vec<MacroId>, CoreError> {
        let history = &self.macro_histories[agent];
        let avail: Vec<MacroId> = self
            .env
            .macro_specs(agent)
            .iter()
            .filter(|s| (s.available)(history))
            .map(|s| s.id)
            .collect();
        if avail.is_empty() {
            return Err(CoreError::NoAvailableMacro { agent });
        }
        Ok(avail)
    }
}

/// Bernoulli draw against a termination probability. Degenerate probabilities
/// consume no randomness, so the deterministic {0,1} terminators used by all
/// shipped environments leave the stream untouched.
fn sample_termination(p: f64, rng: &mut dyn RngCore) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.gen::<f64>() < p
    }
}

pub fn run_primitive_tick<E: EnvModel>(
    runner: &mut EpisodeRunner<E>,
    rng: &mut dyn RngCore,
) -> Result<TickOutcome, CoreError> {
    runner.run_primitive_tick(rng)
}

pub fn select_macros_decentralized<E: EnvModel>(
    runner: &mut EpisodeRunner<E>,
    selector: &mut dyn MacroSelector,
    rng: &mut dyn RngCore,
) -> Result<(), CoreError> {
    runner.select_macros_decentralized(selector, rng)
}

pub fn select_macros_centralized<E: EnvModel>(
    runner: &mut EpisodeRunner<E>,
    selector: &mut dyn JointMacroSelector,
    rng: &mut dyn RngCore,
) -> Result<(), CoreError> {
    runner.select_macros_centralized(selector, rng)
}
