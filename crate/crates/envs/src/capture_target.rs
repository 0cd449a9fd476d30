//! Two robots on a toroidal grid must land on a randomly moving target at the
//! same tick. A robot sees its own cell exactly; the target's cell flickers
//! out with probability 0.3, independently per robot per tick.

use macrl_core::{CoreError, EnvModel, MacroActionSpec, MacroObservation, StepOutcome};
use rand::Rng;
use rand::RngCore;

pub const FLICKER_PROB: f64 = 0.3;
pub const MOVE_NOISE: f64 = 0.1;
pub const CAPTURE_REWARD: f64 = 1.0;

const ACT_UP: usize = 0;
const ACT_DOWN: usize = 1;
const ACT_LEFT: usize = 2;
const ACT_RIGHT: usize = 3;
const ACT_STAY: usize = 4;

pub const CT_MACRO_MOVE_TO_TARGET: usize = 0;
pub const CT_MACRO_STAY: usize = 1;

pub type Cell = (usize, usize);

#[derive(Debug, Clone)]
pub struct CtConfig {
    pub size: usize,
    pub horizon: u64,
    pub discount: f64,
    /// False gives the primitive-action baseline: the five moves wrapped as
    /// one-tick macro-actions.
    pub macro_actions: bool,
}

impl CtConfig {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            horizon: 60,
            discount: 0.95,
            macro_actions: true,
        }
    }
}

/// One primitive observation: own cell exact, target cell unless flickered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtPrimObs {
    pub own: Cell,
    pub target: Option<Cell>,
}

/// Controller-level view: the agent's primitive observation history for the
/// running episode.
#[derive(Debug, Clone, Default)]
pub struct CtView {
    pub history: Vec<CtPrimObs>,
}

impl CtView {
    /// Latest non-flickered target sighting, scanning back through time.
    pub fn last_seen_target(&self) -> Option<Cell> {
        self.history.iter().rev().find_map(|o| o.target)
    }

    pub fn own(&self) -> Cell {
        self.history.last().expect("empty history").own
    }
}

pub struct CaptureTargetEnv {
    cfg: CtConfig,
    agent_pos: [Cell; 2],
    target_pos: Cell,
    tick: u64,
    views: [CtView; 2],
    cached_obs: [MacroObservation; 2],
    specs: Vec<Vec<MacroActionSpec<CtView>>>,
    captured: bool,
}

impl CaptureTargetEnv {
    pub fn new(cfg: CtConfig) -> Result<Self, CoreError> {
        if cfg.size < 4 || cfg.size > 30 {
            return Err(CoreError::InvalidConfig(format!(
                "grid size {} outside 4..=30",
                cfg.size
            )));
        }
        let specs = if cfg.macro_actions {
            let size = cfg.size;
            (0..2)
                .map(|_| {
                    vec![
                        MacroActionSpec::new(
                            CT_MACRO_MOVE_TO_TARGET,
                            "move_to_target",
                            move |v: &CtView| greedy_step(v, size),
                            |v: &CtView| {
                                let done = match v.last_seen_target() {
                                    Some(goal) => v.own() == goal,
                                    None => true,
                                };
                                if done {
                                    1.0
                                } else {
                                    0.0
                                }
                            },
                        ),
                        MacroActionSpec::new(
                            CT_MACRO_STAY,
                            "stay",
                            |_: &CtView| ACT_STAY,
                            |_: &CtView| 1.0,
                        ),
                    ]
                })
                .collect()
        } else {
            let names = ["up", "down", "left", "right", "stay"];
            (0..2)
                .map(|_| {
                    (0..5)
                        .map(|a| {
                            MacroActionSpec::new(a, names[a], move |_: &CtView| a, |_: &CtView| 1.0)
                        })
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            cfg,
            agent_pos: [(0, 0); 2],
            target_pos: (0, 0),
            tick: 0,
            views: [CtView::default(), CtView::default()],
            cached_obs: [MacroObservation::zeros(5), MacroObservation::zeros(5)],
            specs,
            captured: false,
        })
    }

    pub fn config(&self) -> &CtConfig {
        &self.cfg
    }

    pub fn agent_positions(&self) -> [Cell; 2] {
        self.agent_pos
    }

    pub fn target_position(&self) -> Cell {
        self.target_pos
    }

    pub fn captured(&self) -> bool {
        self.captured
    }

    /// Draw each agent's observation for the current state: own cell exact,
    /// target flickers out with probability 0.3 independently per agent.
    pub fn observe(&mut self, rng: &mut dyn RngCore) -> Vec<MacroObservation> {
        let mut rng = rng;
        let mut out = Vec::with_capacity(2);
        for i in 0..2 {
            let flicked = (&mut rng).gen::<f64>() < FLICKER_PROB;
            let prim = CtPrimObs {
                own: self.agent_pos[i],
                target: (!flicked).then_some(self.target_pos),
            };
            self.views[i].history.push(prim);
            let obs = self.encode(prim);
            self.cached_obs[i] = obs.clone();
            out.push(obs);
        }
        out
    }

    fn encode(&self, prim: CtPrimObs) -> MacroObservation {
        let n = (self.cfg.size - 1) as f64;
        let mut f = vec![
            prim.own.0 as f64 / n,
            prim.own.1 as f64 / n,
            0.0,
            0.0,
            1.0, // target-invalid channel
        ];
        if let Some(t) = prim.target {
            f[2] = t.0 as f64 / n;
            f[3] = t.1 as f64 / n;
            f[4] = 0.0;
        }
        MacroObservation::new(f)
    }

    fn apply_move(&self, pos: Cell, action: usize) -> Cell {
        let n = self.cfg.size;
        let (x, y) = pos;
        match action {
            ACT_UP => (x, (y + 1) % n),
            ACT_DOWN => (x, (y + n - 1) % n),
            ACT_LEFT => ((x + n - 1) % n, y),
            ACT_RIGHT => ((x + 1) % n, y),
            _ => (x, y),
        }
    }
}

/// One greedy toroidal step toward the last sighted target cell; the longer
/// axis moves first, ties go horizontal. Without any sighting the controller
/// holds still (and the macro terminates immediately).
fn greedy_step(view: &CtView, size: usize) -> usize {
    let goal = match view.last_seen_target() {
        Some(g) => g,
        None => return ACT_STAY,
    };
    let own = view.own();
    let dx = torus_delta(own.0, goal.0, size);
    let dy = torus_delta(own.1, goal.1, size);
    if dx == 0 && dy == 0 {
        return ACT_STAY;
    }
    if dx.abs() >= dy.abs() {
        if dx > 0 {
            ACT_RIGHT
        } else {
            ACT_LEFT
        }
    } else if dy > 0 {
        ACT_UP
    } else {
        ACT_DOWN
    }
}

/// Signed shortest displacement from `from` to `to` on a ring of `size`.
fn torus_delta(from: usize, to: usize, size: usize) -> i64 {
    let raw = to as i64 - from as i64;
    let half = size as i64 / 2;
    if raw > half {
        raw - size as i64
    } else if raw < -half {
        raw + size as i64
    } else {
        raw
    }
}

impl EnvModel for CaptureTargetEnv {
    type View = CtView;

    fn num_agents(&self) -> usize {
        2
    }

    fn macro_specs(&self, agent: usize) -> &[MacroActionSpec<CtView>] {
        &self.specs[agent]
    }

    fn primitive_action_count(&self, _agent: usize) -> usize {
        5
    }

    fn obs_dim(&self, _agent: usize) -> usize {
        5
    }

    fn horizon(&self) -> u64 {
        self.cfg.horizon
    }

    fn discount(&self) -> f64 {
        self.cfg.discount
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> Vec<MacroObservation> {
        let n = self.cfg.size;
        let mut rng_ref = &mut *rng;
        for i in 0..2 {
            self.agent_pos[i] = (
                (&mut rng_ref).gen_range(0..n),
                (&mut rng_ref).gen_range(0..n),
            );
        }
        self.target_pos = (
            (&mut rng_ref).gen_range(0..n),
            (&mut rng_ref).gen_range(0..n),
        );
        self.tick = 0;
        self.captured = false;
        self.views = [CtView::default(), CtView::default()];
        self.observe(rng)
    }

    fn step(
        &mut self,
        actions: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<StepOutcome, CoreError> {
        let mut rng_ref = &mut *rng;
        for (i, &a) in actions.iter().enumerate() {
            if a >= 5 {
                return Err(CoreError::InvalidAction { agent: i, action: a });
            }
        }
        // target takes one of its five moves uniformly
        let target_dir = (&mut rng_ref).gen_range(0..5);
        self.target_pos = self.apply_move(self.target_pos, target_dir);
        // each intended agent move succeeds with prob 0.9, else the agent
        // stays in place
        for i in 0..2 {
            let noisy = (&mut rng_ref).gen::<f64>() < MOVE_NOISE;
            if !noisy {
                self.agent_pos[i] = self.apply_move(self.agent_pos[i], actions[i]);
            }
        }
        self.tick += 1;
        self.captured =
            self.agent_pos[0] == self.target_pos && self.agent_pos[1] == self.target_pos;
        let reward = if self.captured { CAPTURE_REWARD } else { 0.0 };
        let done = self.captured || self.tick >= self.cfg.horizon;
        self.observe(rng);
        Ok(StepOutcome { reward, done })
    }

    fn view(&self, agent: usize) -> &CtView {
        &self.views[agent]
    }

    fn current_macro_obs(&self, agent: usize) -> MacroObservation {
        self.cached_obs[agent].clone()
    }
}
