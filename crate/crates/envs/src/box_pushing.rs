//! Two robots in a grid world with two small boxes and one big box. Boxes
//! move only northward; the big box needs both robots pushing side by side.
//! A robot observes only the cell directly in front of it.

use macrl_core::{CoreError, EnvModel, MacroActionSpec, MacroObservation, StepOutcome};
use rand::RngCore;

pub const STEP_PENALTY: f64 = -0.1;
pub const BUMP_PENALTY: f64 = -5.0;
pub const SMALL_BOX_REWARD: f64 = 10.0;
pub const BIG_BOX_REWARD: f64 = 100.0;

const ACT_FORWARD: usize = 0;
const ACT_TURN_LEFT: usize = 1;
const ACT_TURN_RIGHT: usize = 2;
const ACT_STAY: usize = 3;

pub const BP_MACRO_STAY: usize = 0;
pub const BP_MACRO_TURN_LEFT: usize = 1;
pub const BP_MACRO_TURN_RIGHT: usize = 2;
pub const BP_MACRO_MOVE_TO_SMALL: usize = 3;
pub const BP_MACRO_MOVE_TO_BIG: usize = 4;
pub const BP_MACRO_PUSH: usize = 5;

pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heading {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Heading {
    fn delta(self) -> (i64, i64) {
        match self {
            Heading::North => (0, 1),
            Heading::East => (1, 0),
            Heading::South => (0, -1),
            Heading::West => (-1, 0),
        }
    }

    fn left(self) -> Heading {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }

    fn right(self) -> Heading {
        match self {
            Heading::North => Heading::East,
            Heading::East => Heading::South,
            Heading::South => Heading::West,
            Heading::West => Heading::North,
        }
    }
}

/// What a robot can see in the cell it faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellView {
    Empty = 0,
    Teammate = 1,
    Boundary = 2,
    SmallBox = 3,
    BigBox = 4,
}

#[derive(Debug, Clone)]
pub struct BpConfig {
    pub size: usize,
    pub horizon: u64,
    pub discount: f64,
    pub macro_actions: bool,
}

impl BpConfig {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            horizon: 100,
            discount: 0.98,
            macro_actions: true,
        }
    }
}

/// Deterministic initial layout, proportionally scaled from the reference
/// figure: boxes on row N/2 (big box centered, small boxes flanking at
/// column N/2 - 1 - N/4 and its mirror), robots at the bottom corners facing
/// north, goal area the top row.
pub fn layout(size: usize) -> ([Cell; 2], [Cell; 2], Cell) {
    let y = size / 2;
    let sl = size / 2 - 1 - size / 4;
    let agents = [(0, 0), (size - 1, 0)];
    let small = [(sl, y), (size - 1 - sl, y)];
    let big_left = (size / 2 - 1, y);
    (agents, small, big_left)
}

/// Controller-level view of one robot.
#[derive(Debug, Clone)]
pub struct BpView {
    pub pos: Cell,
    pub heading: Heading,
    pub front: CellView,
    /// This robot attempted to push the big box without its teammate at the
    /// latest tick.
    pub pushed_big_alone: bool,
    /// Cell below this robot's assigned small box.
    pub waypoint_small: Cell,
    /// Cell below this robot's side of the big box.
    pub waypoint_big: Cell,
}

pub struct BoxPushingEnv {
    cfg: BpConfig,
    agent_pos: [Cell; 2],
    heading: [Heading; 2],
    small_boxes: [Cell; 2],
    big_box: Cell, // west cell; also occupies (x+1, y)
    tick: u64,
    views: Vec<BpView>,
    cached_obs: Vec<MacroObservation>,
    specs: Vec<Vec<MacroActionSpec<BpView>>>,
    small_delivered: bool,
    big_delivered: bool,
}

impl BoxPushingEnv {
    pub fn new(cfg: BpConfig) -> Result<Self, CoreError> {
        if cfg.size < 4 || cfg.size > 30 {
            return Err(CoreError::InvalidConfig(format!(
                "grid size {} outside 4..=30",
                cfg.size
            )));
        }
        if cfg.size % 2 != 0 {
            return Err(CoreError::InvalidConfig(format!(
                "grid size {} must be even",
                cfg.size
            )));
        }
        let specs = if cfg.macro_actions {
            (0..2).map(|_| macro_specs()).collect()
        } else {
            let names = ["forward", "turn_left", "turn_right", "stay"];
            (0..2)
                .map(|_| {
                    (0..4)
                        .map(|a| {
                            MacroActionSpec::new(a, names[a], move |_: &BpView| a, |_: &BpView| 1.0)
                        })
                        .collect()
                })
                .collect()
        };
        let mut env = Self {
            cfg,
            agent_pos: [(0, 0); 2],
            heading: [Heading::North; 2],
            small_boxes: [(0, 0); 2],
            big_box: (0, 0),
            tick: 0,
            views: Vec::new(),
            cached_obs: Vec::new(),
            specs,
            small_delivered: false,
            big_delivered: false,
        };
        env.apply_layout();
        Ok(env)
    }

    pub fn config(&self) -> &BpConfig {
        &self.cfg
    }

    pub fn big_box_delivered(&self) -> bool {
        self.big_delivered
    }

    pub fn small_box_delivered(&self) -> bool {
        self.small_delivered
    }

    pub fn agent_states(&self) -> [(Cell, Heading); 2] {
        [
            (self.agent_pos[0], self.heading[0]),
            (self.agent_pos[1], self.heading[1]),
        ]
    }

    pub fn small_box_positions(&self) -> [Cell; 2] {
        self.small_boxes
    }

    /// West cell of the big box; it also occupies the cell one east.
    pub fn big_box_position(&self) -> Cell {
        self.big_box
    }

    fn apply_layout(&mut self) {
        let (agents, small, big) = layout(self.cfg.size);
        self.agent_pos = agents;
        self.heading = [Heading::North; 2];
        self.small_boxes = small;
        self.big_box = big;
        self.tick = 0;
        self.small_delivered = false;
        self.big_delivered = false;
        self.refresh_views([false; 2]);
    }

    fn in_grid(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.cfg.size && (y as usize) < self.cfg.size
    }

    fn front_of(&self, agent: usize) -> (i64, i64) {
        let (dx, dy) = self.heading[agent].delta();
        (
            self.agent_pos[agent].0 as i64 + dx,
            self.agent_pos[agent].1 as i64 + dy,
        )
    }

    fn big_box_cells(&self) -> [Cell; 2] {
        [self.big_box, (self.big_box.0 + 1, self.big_box.1)]
    }

    fn cell_view(&self, agent: usize) -> CellView {
        let (fx, fy) = self.front_of(agent);
        if !self.in_grid(fx, fy) {
            return CellView::Boundary;
        }
        let cell = (fx as usize, fy as usize);
        if self.agent_pos[1 - agent] == cell {
            CellView::Teammate
        } else if self.big_box_cells().contains(&cell) {
            CellView::BigBox
        } else if self.small_boxes.contains(&cell) {
            CellView::SmallBox
        } else {
            CellView::Empty
        }
    }

    fn refresh_views(&mut self, pushed_alone: [bool; 2]) {
        let mut views = Vec::with_capacity(2);
        let mut obs = Vec::with_capacity(2);
        for i in 0..2 {
            let front = self.cell_view(i);
            views.push(BpView {
                pos: self.agent_pos[i],
                heading: self.heading[i],
                front,
                pushed_big_alone: pushed_alone[i],
                waypoint_small: (self.small_boxes[i].0, self.small_boxes[i].1 - 1),
                waypoint_big: (self.big_box.0 + i, self.big_box.1 - 1),
            });
            let mut f = vec![0.0; 5];
            f[front as usize] = 1.0;
            obs.push(MacroObservation::new(f));
        }
        self.views = views;
        self.cached_obs = obs;
    }

    fn occupied_by_box(&self, cell: Cell) -> bool {
        self.small_boxes.contains(&cell) || self.big_box_cells().contains(&cell)
    }
}

fn macro_specs() -> Vec<MacroActionSpec<BpView>> {
    vec![
        MacroActionSpec::new(BP_MACRO_STAY, "stay", |_: &BpView| ACT_STAY, |_: &BpView| 1.0),
        MacroActionSpec::new(
            BP_MACRO_TURN_LEFT,
            "turn_left",
            |_: &BpView| ACT_TURN_LEFT,
            |_: &BpView| 1.0,
        ),
        MacroActionSpec::new(
            BP_MACRO_TURN_RIGHT,
            "turn_right",
            |_: &BpView| ACT_TURN_RIGHT,
            |_: &BpView| 1.0,
        ),
        MacroActionSpec::new(
            BP_MACRO_MOVE_TO_SMALL,
            "move_to_small_box",
            |v: &BpView| navigate(v.pos, v.heading, v.waypoint_small),
            |v: &BpView| arrived(v, v.waypoint_small),
        ),
        MacroActionSpec::new(
            BP_MACRO_MOVE_TO_BIG,
            "move_to_big_box",
            |v: &BpView| navigate(v.pos, v.heading, v.waypoint_big),
            |v: &BpView| arrived(v, v.waypoint_big),
        ),
        MacroActionSpec::new(
            BP_MACRO_PUSH,
            "push",
            |_: &BpView| ACT_FORWARD,
            |v: &BpView| {
                if v.front == CellView::Boundary || v.pushed_big_alone {
                    1.0
                } else {
                    0.0
                }
            },
        ),
    ]
}

fn arrived(v: &BpView, wp: Cell) -> f64 {
    if v.pos == wp && v.heading == Heading::North {
        1.0
    } else {
        0.0
    }
}

/// Shortest-path step toward a waypoint: align the column first, then the
/// row, then face north. Blocked moves retry on later ticks.
fn navigate(pos: Cell, heading: Heading, wp: Cell) -> usize {
    let desired = if pos.0 != wp.0 {
        if pos.0 < wp.0 {
            Heading::East
        } else {
            Heading::West
        }
    } else if pos.1 != wp.1 {
        if pos.1 < wp.1 {
            Heading::North
        } else {
            Heading::South
        }
    } else {
        Heading::North
    };
    if pos == wp && heading == Heading::North {
        return ACT_STAY;
    }
    if heading == desired {
        if pos == wp {
            ACT_STAY
        } else {
            ACT_FORWARD
        }
    } else {
        let diff = (desired as i64 - heading as i64).rem_euclid(4);
        if diff == 3 {
            ACT_TURN_LEFT
        } else {
            ACT_TURN_RIGHT
        }
    }
}

impl EnvModel for BoxPushingEnv {
    type View = BpView;

    fn num_agents(&self) -> usize {
        2
    }

    fn macro_specs(&self, agent: usize) -> &[MacroActionSpec<BpView>] {
        &self.specs[agent]
    }

    fn primitive_action_count(&self, _agent: usize) -> usize {
        4
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

    fn reset(&mut self, _rng: &mut dyn RngCore) -> Vec<MacroObservation> {
        self.apply_layout();
        self.cached_obs.clone()
    }

    fn step(
        &mut self,
        actions: &[usize],
        _rng: &mut dyn RngCore,
    ) -> Result<StepOutcome, CoreError> {
        for (i, &a) in actions.iter().enumerate() {
            if a >= 4 {
                return Err(CoreError::InvalidAction { agent: i, action: a });
            }
        }
        let mut reward = STEP_PENALTY;
        let mut done = false;
        let mut pushed_alone = [false; 2];
        let goal_row = self.cfg.size - 1;

        for i in 0..2 {
            match actions[i] {
                ACT_TURN_LEFT => self.heading[i] = self.heading[i].left(),
                ACT_TURN_RIGHT => self.heading[i] = self.heading[i].right(),
                _ => {}
            }
        }

        // classify forward attempts against the pre-move state
        #[derive(PartialEq)]
        enum Intent {
            None,
            Bump,
            Big,
            Small(usize),
            Move(Cell),
        }
        let pre_pos = self.agent_pos;
        let mut intents = [Intent::None, Intent::None];
        for i in 0..2 {
            if actions[i] != ACT_FORWARD {
                continue;
            }
            let (fx, fy) = self.front_of(i);
            intents[i] = if !self.in_grid(fx, fy) {
                Intent::Bump
            } else {
                let cell = (fx as usize, fy as usize);
                if self.big_box_cells().contains(&cell) {
                    Intent::Big
                } else if let Some(b) = self.small_boxes.iter().position(|&s| s == cell) {
                    Intent::Small(b)
                } else {
                    Intent::Move(cell)
                }
            };
        }

        for i in 0..2 {
            if intents[i] == Intent::Bump {
                reward += BUMP_PENALTY;
            }
        }

        // big box: moves only when both robots face it from the two parallel
        // cells below and push together
        let big_cells = self.big_box_cells();
        let below = [
            (big_cells[0].0, big_cells[0].1 - 1),
            (big_cells[1].0, big_cells[1].1 - 1),
        ];
        let both_push = (0..2).all(|i| {
            intents[i] == Intent::Big
                && self.heading[i] == Heading::North
                && below.contains(&pre_pos[i])
        }) && pre_pos[0] != pre_pos[1];
        if both_push {
            self.big_box.1 += 1;
            for i in 0..2 {
                self.agent_pos[i] = (pre_pos[i].0, pre_pos[i].1 + 1);
            }
            if self.big_box.1 == goal_row {
                reward += BIG_BOX_REWARD;
                self.big_delivered = true;
                done = true;
            }
        } else {
            for i in 0..2 {
                if intents[i] == Intent::Big {
                    reward += BUMP_PENALTY;
                    pushed_alone[i] = true;
                }
            }
        }

        // small boxes advance one cell north under a northward push
        for i in 0..2 {
            if let Intent::Small(b) = intents[i] {
                let boxpos = self.small_boxes[b];
                let dest = (boxpos.0, boxpos.1 + 1);
                let blocked = self.heading[i] != Heading::North
                    || self.occupied_by_box(dest)
                    || self.agent_pos.contains(&dest);
                if !blocked {
                    self.small_boxes[b] = dest;
                    self.agent_pos[i] = boxpos;
                    if dest.1 == goal_row {
                        reward += SMALL_BOX_REWARD;
                        self.small_delivered = true;
                        done = true;
                    }
                }
            }
        }

        // plain moves: blocked by the teammate's cell (old or new) and by
        // simultaneous moves into one cell
        let same_dest = matches!((&intents[0], &intents[1]),
            (Intent::Move(a), Intent::Move(b)) if a == b);
        for i in 0..2 {
            if let Intent::Move(dest) = intents[i] {
                let blocked = same_dest
                    || dest == pre_pos[1 - i]
                    || dest == self.agent_pos[1 - i];
                if !blocked {
                    self.agent_pos[i] = dest;
                }
            }
        }

        self.tick += 1;
        if self.tick >= self.cfg.horizon {
            done = true;
        }
        self.refresh_views(pushed_alone);
        Ok(StepOutcome { reward, done })
    }

    fn view(&self, agent: usize) -> &BpView {
        &self.views[agent]
    }

    fn current_macro_obs(&self, agent: usize) -> MacroObservation {
        self.cached_obs[agent].clone()
    }
}
