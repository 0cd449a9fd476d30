//! Warehouse tool delivery: two mobile robots ferry tools from a fixed
//! manipulator's table to a human working through a four-step assembly task.
//! The human needs one particular tool per remaining step, dispensed in
//! discovery order; no robot observes which tool the human needs next.
//!
//! Geometry (all coordinates in a 5-wide by 7-tall continuous workspace):
//! the tool room spans y <= 3, the workshop y >= 5. The table sits at the
//! bottom center with one pre-allocated hand-off waypoint per mobile robot,
//! the tool-room exit waypoint sits at the upper right of the room, and the
//! workshop waypoint near the human. Mobile robots travel in straight lines
//! at `speed` per tick.

use macrl_core::{CoreError, EnvModel, MacroActionSpec, MacroObservation, StepOutcome};
use rand::RngCore;

pub const STEP_PENALTY: f64 = -1.0;
pub const DELIVERY_REWARD: f64 = 100.0;
pub const FAILED_PASS_PENALTY: f64 = -10.0;
pub const SEARCH_DURATION: u32 = 6;
pub const PASS_DURATION: u32 = 4;
pub const WAIT_DURATION: u32 = 1;
pub const GET_TOOL_CUTOFF: u32 = 10;
pub const HUMAN_STEP_TIME: u32 = 18;
pub const NUM_TOOLS: usize = 3;
pub const WAITING_SPOTS: usize = 2;

pub const TB_MACRO_GO_TO_WS: usize = 0;
pub const TB_MACRO_GO_TO_TR: usize = 1;
pub const TB_MACRO_GET_TOOL: usize = 2;

pub const FETCH_MACRO_WAIT: usize = 0;
pub const FETCH_MACRO_SEARCH: usize = 1;
pub const FETCH_MACRO_PASS_T0: usize = 2;
pub const FETCH_MACRO_PASS_T1: usize = 3;

pub const WORKSPACE_W: f64 = 5.0;
pub const WORKSPACE_H: f64 = 7.0;
const WORKSHOP_Y: f64 = 5.0;
const TOOL_ROOM_Y: f64 = 3.0;
const WS_WAYPOINT: (f64, f64) = (2.5, 5.5);
const TR_WAYPOINT: (f64, f64) = (4.25, 2.75);
const TABLE_WAYPOINTS: [(f64, f64); 2] = [(1.0, 1.5), (4.0, 1.5)];
const TURTLEBOT_STARTS: [(f64, f64); 2] = [(1.0, 2.5), (4.0, 2.5)];
const BESIDE_TABLE_EPS: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct WhConfig {
    pub speed: f64,
    pub horizon: u64,
    pub discount: f64,
}

impl Default for WhConfig {
    fn default() -> Self {
        Self {
            speed: 0.6,
            horizon: 150,
            discount: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct TurtlebotState {
    pos: (f64, f64),
    carried: Vec<usize>,
    /// ticks waited at the table under the running hand-off macro
    wait_ticks: u32,
    received_this_tick: bool,
}

#[derive(Debug, Clone, Default)]
struct FetchState {
    ticks_in_macro: u32,
    /// tools found so far (searches dispense tool 0, 1, 2 in order)
    tools_found: usize,
    /// found tools waiting on the table, oldest first
    waiting: Vec<usize>,
}

/// Per-agent view: macro progress as tracked by the environment. Terminators
/// read `macro_done`.
#[derive(Debug, Clone, Default)]
pub struct WhView {
    pub macro_done: bool,
}

pub struct WarehouseEnv {
    cfg: WhConfig,
    turtles: [TurtlebotState; 2],
    fetch: FetchState,
    human_step: usize,
    human_timer: u32,
    /// per human step: was the tool enabling the next step handed over?
    received: [bool; 4],
    tick: u64,
    current_macro: [Option<usize>; 3],
    macro_done: [bool; 3],
    views: [WhView; 3],
    specs: Vec<Vec<MacroActionSpec<WhView>>>,
    deliveries: usize,
    failed_passes: usize,
}

impl WarehouseEnv {
    pub fn new(cfg: WhConfig) -> Result<Self, CoreError> {
        if cfg.speed <= 0.0 || !cfg.speed.is_finite() {
            return Err(CoreError::InvalidConfig(format!(
                "speed {} must be positive",
                cfg.speed
            )));
        }
        let mut specs: Vec<Vec<MacroActionSpec<WhView>>> = Vec::new();
        for _ in 0..2 {
            let names = ["go_to_ws", "go_to_tr", "get_tool"];
            specs.push(
                (0..3)
                    .map(|m| {
                        MacroActionSpec::new(
                            m,
                            names[m],
                            move |_: &WhView| m,
                            |v: &WhView| if v.macro_done { 1.0 } else { 0.0 },
                        )
                    })
                    .collect(),
            );
        }
        let fetch_names = ["wait_t", "search_tool", "pass_to_t0", "pass_to_t1"];
        specs.push(
            (0..4)
                .map(|m| {
                    MacroActionSpec::new(
                        m,
                        fetch_names[m],
                        move |_: &WhView| m,
                        |v: &WhView| if v.macro_done { 1.0 } else { 0.0 },
                    )
                })
                .collect(),
        );
        let mut env = Self {
            cfg,
            turtles: Default::default(),
            fetch: Default::default(),
            human_step: 1,
            human_timer: HUMAN_STEP_TIME,
            received: [false; 4],
            tick: 0,
            current_macro: [None; 3],
            macro_done: [true; 3],
            views: Default::default(),
            specs,
            deliveries: 0,
            failed_passes: 0,
        };
        env.reset_state();
        Ok(env)
    }

    pub fn config(&self) -> &WhConfig {
        &self.cfg
    }

    pub fn human_step(&self) -> usize {
        self.human_step
    }

    pub fn deliveries(&self) -> usize {
        self.deliveries
    }

    pub fn failed_passes(&self) -> usize {
        self.failed_passes
    }

    pub fn tools_waiting(&self) -> usize {
        self.fetch.waiting.len()
    }

    pub fn turtle_position(&self, i: usize) -> (f64, f64) {
        self.turtles[i].pos
    }

    pub fn turtle_carried(&self, i: usize) -> &[usize] {
        &self.turtles[i].carried
    }

    fn reset_state(&mut self) {
        self.turtles = Default::default();
        for i in 0..2 {
            self.turtles[i].pos = TURTLEBOT_STARTS[i];
        }
        self.fetch = Default::default();
        self.human_step = 1;
        self.human_timer = HUMAN_STEP_TIME;
        self.received = [false; 4];
        self.tick = 0;
        self.current_macro = [None; 3];
        self.macro_done = [true; 3];
        self.views = Default::default();
        self.deliveries = 0;
        self.failed_passes = 0;
    }

    fn beside_table(&self, i: usize) -> bool {
        dist(self.turtles[i].pos, TABLE_WAYPOINTS[i]) < BESIDE_TABLE_EPS
    }

    fn in_workshop(&self, i: usize) -> bool {
        self.turtles[i].pos.1 >= WORKSHOP_Y
    }

    fn in_tool_room(&self, i: usize) -> bool {
        self.turtles[i].pos.1 <= TOOL_ROOM_Y
    }

    /// Tool index the human may accept next (the tool enabling step s+1).
    fn needed_tool(&self) -> Option<usize> {
        if self.human_step < 4 {
            Some(self.human_step - 1)
        } else {
            None
        }
    }

    fn move_toward(&mut self, i: usize, dest: (f64, f64)) {
        let pos = self.turtles[i].pos;
        let d = dist(pos, dest);
        if d <= self.cfg.speed {
            self.turtles[i].pos = dest;
        } else {
            let f = self.cfg.speed / d;
            self.turtles[i].pos = (pos.0 + (dest.0 - pos.0) * f, pos.1 + (dest.1 - pos.1) * f);
        }
    }

    fn encode_turtle_obs(&self, i: usize) -> MacroObservation {
        let t = &self.turtles[i];
        let mut f = Vec::with_capacity(14);
        f.push(t.pos.0 / WORKSPACE_W);
        f.push(t.pos.1 / WORKSPACE_H);
        // human step one-hot, valid only inside the workshop
        let mut step_feat = vec![0.0; 5];
        if self.in_workshop(i) {
            step_feat[self.human_step - 1] = 1.0;
        } else {
            step_feat[4] = 1.0;
        }
        f.extend(step_feat);
        let mut carried = vec![0.0; NUM_TOOLS];
        for &tool in &t.carried {
            carried[tool] = 1.0;
        }
        f.extend(carried);
        // waiting-spot count one-hot, valid only inside the tool room
        let mut spots = vec![0.0; WAITING_SPOTS + 2];
        if self.in_tool_room(i) {
            spots[self.fetch.waiting.len()] = 1.0;
        } else {
            spots[WAITING_SPOTS + 1] = 1.0;
        }
        f.extend(spots);
        MacroObservation::new(f)
    }

    fn encode_fetch_obs(&self) -> MacroObservation {
        let mut f = vec![0.0; WAITING_SPOTS + 1];
        f[self.fetch.waiting.len()] = 1.0;
        f.push(self.beside_table(0) as u8 as f64);
        f.push(self.beside_table(1) as u8 as f64);
        MacroObservation::new(f)
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

impl EnvModel for WarehouseEnv {
    type View = WhView;

    fn num_agents(&self) -> usize {
        3
    }

    fn macro_specs(&self, agent: usize) -> &[MacroActionSpec<WhView>] {
        &self.specs[agent]
    }

    /// The primitive layer is the macro id itself: robot controllers signal
    /// which macro is progressing and the simulator advances it internally.
    fn primitive_action_count(&self, agent: usize) -> usize {
        if agent < 2 {
            3
        } else {
            4
        }
    }

    fn obs_dim(&self, agent: usize) -> usize {
        if agent < 2 {
            14
        } else {
            5
        }
    }

    fn horizon(&self) -> u64 {
        self.cfg.horizon
    }

    fn discount(&self) -> f64 {
        self.cfg.discount
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> Vec<MacroObservation> {
        self.reset_state();
        vec![
            self.encode_turtle_obs(0),
            self.encode_turtle_obs(1),
            self.encode_fetch_obs(),
        ]
    }

    fn step(
        &mut self,
        actions: &[usize],
        _rng: &mut dyn RngCore,
    ) -> Result<StepOutcome, CoreError> {
        for (i, &a) in actions.iter().enumerate() {
            if a >= self.primitive_action_count(i) {
                return Err(CoreError::InvalidAction { agent: i, action: a });
            }
        }
        // a fresh macro starts after the previous one reported done
        for i in 0..3 {
            if self.macro_done[i] || self.current_macro[i] != Some(actions[i]) {
                self.current_macro[i] = Some(actions[i]);
                if i < 2 {
                    self.turtles[i].wait_ticks = 0;
                } else {
                    self.fetch.ticks_in_macro = 0;
                }
            }
        }
        let mut reward = STEP_PENALTY;
        let mut done = false;

        // mobile robots move (or wait) under their macro
        for i in 0..2 {
            self.turtles[i].received_this_tick = false;
            let dest = match actions[i] {
                TB_MACRO_GO_TO_WS => WS_WAYPOINT,
                TB_MACRO_GO_TO_TR => TR_WAYPOINT,
                _ => TABLE_WAYPOINTS[i],
            };
            if actions[i] == TB_MACRO_GET_TOOL && self.beside_table(i) {
                self.turtles[i].wait_ticks += 1;
            } else {
                self.move_toward(i, dest);
            }
        }

        // manipulator advances its fixed-duration macro
        self.fetch.ticks_in_macro += 1;
        let fetch_action = actions[2];
        let fetch_duration = match fetch_action {
            FETCH_MACRO_WAIT => WAIT_DURATION,
            FETCH_MACRO_SEARCH => SEARCH_DURATION,
            _ => PASS_DURATION,
        };
        let fetch_complete = self.fetch.ticks_in_macro >= fetch_duration;
        if fetch_complete {
            match fetch_action {
                FETCH_MACRO_SEARCH => {
                    // places the next undiscovered tool unless both waiting
                    // spots are occupied (then the search was frozen)
                    if self.fetch.tools_found < NUM_TOOLS
                        && self.fetch.waiting.len() < WAITING_SPOTS
                    {
                        self.fetch.waiting.push(self.fetch.tools_found);
                        self.fetch.tools_found += 1;
                    }
                }
                FETCH_MACRO_PASS_T0 | FETCH_MACRO_PASS_T1 => {
                    let target = fetch_action - FETCH_MACRO_PASS_T0;
                    if !self.beside_table(0) && !self.beside_table(1) {
                        reward += FAILED_PASS_PENALTY;
                        self.failed_passes += 1;
                    } else if self.beside_table(target) && !self.fetch.waiting.is_empty() {
                        // tools are passed in the order they were found
                        let tool = self.fetch.waiting.remove(0);
                        self.turtles[target].carried.push(tool);
                        self.turtles[target].received_this_tick = true;
                    }
                    // named robot absent but the other present: the tool stays
                }
                _ => {}
            }
        }

        // hand-off to the human: only the tool for the next step transfers
        for i in 0..2 {
            if done {
                break;
            }
            if !self.in_workshop(i) {
                continue;
            }
            if let Some(needed) = self.needed_tool() {
                if let Some(k) = self.turtles[i].carried.iter().position(|&t| t == needed) {
                    self.turtles[i].carried.remove(k);
                    self.received[self.human_step] = true;
                    reward += DELIVERY_REWARD;
                    self.deliveries += 1;
                    if needed == NUM_TOOLS - 1 {
                        // the human holds the final step's tool
                        done = true;
                    }
                }
            }
        }

        // the human works through the current step and advances only when
        // the timer elapsed and the next step's tool is in hand
        if self.human_timer > 0 {
            self.human_timer -= 1;
        }
        if self.human_timer == 0 && self.human_step < 4 && self.received[self.human_step] {
            self.human_step += 1;
            self.human_timer = HUMAN_STEP_TIME;
        }

        self.tick += 1;
        if self.tick >= self.cfg.horizon {
            done = true;
        }

        // termination per robot, read by the terminators next
        for i in 0..2 {
            self.macro_done[i] = match actions[i] {
                TB_MACRO_GO_TO_WS => dist(self.turtles[i].pos, WS_WAYPOINT) < BESIDE_TABLE_EPS,
                TB_MACRO_GO_TO_TR => dist(self.turtles[i].pos, TR_WAYPOINT) < BESIDE_TABLE_EPS,
                _ => {
                    self.turtles[i].received_this_tick
                        || self.turtles[i].wait_ticks >= GET_TOOL_CUTOFF
                }
            };
            self.views[i] = WhView { macro_done: self.macro_done[i] };
        }
        self.macro_done[2] = fetch_complete;
        self.views[2] = WhView { macro_done: fetch_complete };

        Ok(StepOutcome { reward, done })
    }

    fn view(&self, agent: usize) -> &WhView {
        &self.views[agent]
    }

    fn current_macro_obs(&self, agent: usize) -> MacroObservation {
        if agent < 2 {
            self.encode_turtle_obs(agent)
        } else {
            self.encode_fetch_obs()
        }
    }
}
