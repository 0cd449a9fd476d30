//! Hand-scripted reference policies, used to produce the optimal-return
//! reference lines and the learning-test bounds.

use macrl_core::{MacroId, MacroObservation, MacroSelector};
use rand::RngCore;

use crate::box_pushing::{BP_MACRO_MOVE_TO_BIG, BP_MACRO_MOVE_TO_SMALL, BP_MACRO_PUSH, BP_MACRO_STAY};
use crate::capture_target::CT_MACRO_MOVE_TO_TARGET;
use crate::warehouse::{
    FETCH_MACRO_PASS_T0, FETCH_MACRO_PASS_T1, FETCH_MACRO_SEARCH, FETCH_MACRO_WAIT,
    TB_MACRO_GET_TOOL, TB_MACRO_GO_TO_WS,
};

/// Both robots chase the target; re-issued at every boundary.
pub struct CtScripted;

impl MacroSelector for CtScripted {
    fn select(
        &mut self,
        _agent: usize,
        _obs: &MacroObservation,
        _available: &[MacroId],
        _rng: &mut dyn RngCore,
    ) -> MacroId {
        CT_MACRO_MOVE_TO_TARGET
    }
}

/// Each robot walks to its side of the big box, then pushes; the symmetric
/// layout makes both arrive together so the co-push succeeds.
pub struct BpScriptedBig {
    selections: [usize; 2],
}

impl BpScriptedBig {
    pub fn new() -> Self {
        Self { selections: [0; 2] }
    }
}

impl Default for BpScriptedBig {
    fn default() -> Self {
        Self::new()
    }
}

impl MacroSelector for BpScriptedBig {
    fn begin_episode(&mut self) {
        self.selections = [0; 2];
    }

    fn select(
        &mut self,
        agent: usize,
        _obs: &MacroObservation,
        _available: &[MacroId],
        _rng: &mut dyn RngCore,
    ) -> MacroId {
        let n = self.selections[agent];
        self.selections[agent] += 1;
        if n == 0 {
            BP_MACRO_MOVE_TO_BIG
        } else {
            BP_MACRO_PUSH
        }
    }
}

/// Robot 0 pushes its small box to the goal; robot 1 holds still. This is
/// the small-box local optimum the primitive baseline plateaus under.
pub struct BpScriptedSmall {
    selections: [usize; 2],
}

impl BpScriptedSmall {
    pub fn new() -> Self {
        Self { selections: [0; 2] }
    }
}

impl Default for BpScriptedSmall {
    fn default() -> Self {
        Self::new()
    }
}

impl MacroSelector for BpScriptedSmall {
    fn begin_episode(&mut self) {
        self.selections = [0; 2];
    }

    fn select(
        &mut self,
        agent: usize,
        _obs: &MacroObservation,
        _available: &[MacroId],
        _rng: &mut dyn RngCore,
    ) -> MacroId {
        let n = self.selections[agent];
        self.selections[agent] += 1;
        if agent == 1 {
            BP_MACRO_STAY
        } else if n == 0 {
            BP_MACRO_MOVE_TO_SMALL
        } else {
            BP_MACRO_PUSH
        }
    }
}

/// Mobile robots shuttle between the table and the workshop whenever they
/// carry a tool; the manipulator searches tools in order and passes to
/// whichever robot waits at the table.
pub struct WhScripted;

impl MacroSelector for WhScripted {
    fn select(
        &mut self,
        agent: usize,
        obs: &MacroObservation,
        _available: &[MacroId],
        _rng: &mut dyn RngCore,
    ) -> MacroId {
        if agent < 2 {
            // features 7..10 are the carried-tool flags
            let carrying = obs.features[7..10].iter().any(|&f| f > 0.5);
            if carrying {
                TB_MACRO_GO_TO_WS
            } else {
                TB_MACRO_GET_TOOL
            }
        } else {
            // features: waiting count one-hot (0..3), beside flags (3,4)
            let waiting = obs.features[1] > 0.5 || obs.features[2] > 0.5;
            let t0_beside = obs.features[3] > 0.5;
            let t1_beside = obs.features[4] > 0.5;
            if waiting && t0_beside {
                FETCH_MACRO_PASS_T0
            } else if waiting && t1_beside {
                FETCH_MACRO_PASS_T1
            } else if waiting {
                FETCH_MACRO_WAIT
            } else {
                FETCH_MACRO_SEARCH
            }
        }
    }
}
