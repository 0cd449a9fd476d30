use crate::macro_action::MacroId;

/// Mixed-radix indexing of the joint macro-action space (row-major: agent 0
/// varies slowest). The centralized value head enumerates this product set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointActionSpace {
    counts: Vec<usize>,
}

impl JointActionSpace {
    pub fn new(per_agent_counts: Vec<usize>) -> Self {
        assert!(
            per_agent_counts.iter().all(|&c| c > 0),
            "every agent needs at least one macro-action"
        );
        Self {
            counts: per_agent_counts,
        }
    }

    pub fn num_agents(&self) -> usize {
        self.counts.len()
    }

    pub fn agent_count(&self, agent: usize) -> usize {
        self.counts[agent]
    }

    pub fn size(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn encode(&self, macros: &[MacroId]) -> usize {
        debug_assert_eq!(macros.len(), self.counts.len());
        let mut idx = 0;
        for (m, &c) in macros.iter().zip(&self.counts) {
            debug_assert!(*m < c);
            idx = idx * c + m;
        }
        idx
    }

    pub fn decode(&self, mut idx: usize) -> Vec<MacroId> {
        let mut out = vec![0; self.counts.len()];
        for (slot, &c) in out.iter_mut().zip(&self.counts).rev() {
            *slot = idx % c;
            idx /= c;
        }
        out
    }

    /// Joint indices whose components agree with every pinned agent.
    /// `pinned[i] = Some(m)` fixes agent i to macro m; `None` leaves it free.
    pub fn restricted_indices(&self, pinned: &[Option<MacroId>]) -> Vec<usize> {
        assert_eq!(pinned.len(), self.counts.len());
        let mut result = Vec::new();
        let mut current: Vec<MacroId> = vec![0; self.counts.len()];
        self.fill_restricted(pinned, 0, &mut current, &mut result);
        result
    }

    fn fill_restricted(
        &self,
        pinned: &[Option<MacroId>],
        agent: usize,
        current: &mut Vec<MacroId>,
        out: &mut Vec<usize>,
    ) {
        if agent == self.counts.len() {
            out.push(self.encode(current));
            return;
        }
        match pinned[agent] {
            Some(m) => {
                current[agent] = m;
                self.fill_restricted(pinned, agent + 1, current, out);
            }
            None => {
                for m in 0..self.counts[agent] {
                    current[agent] = m;
                    self.fill_restricted(pinned, agent + 1, current, out);
                }
            }
        }
    }

    /// Argmax of `q` over the restriction; ties break toward the lower index.
    pub fn restricted_argmax(&self, q: &[f64], pinned: &[Option<MacroId>]) -> usize {
        debug_assert_eq!(q.len(), self.size());
        let candidates = self.restricted_indices(pinned);
        let mut best = candidates[0];
        for &idx in &candidates[1..] {
            if q[idx] > q[best] {
                best = idx;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn encode_decode_roundtrip() {
        let space = JointActionSpace::new(vec![3, 4, 2]);
        assert_eq!(space.size(), 24);
        for idx in 0..space.size() {
            let macros = space.decode(idx);
            assert_eq!(space.encode(&macros), idx);
        }
    }

    #[test]
    fn row_major_order() {
        let space = JointActionSpace::new(vec![2, 3]);
        assert_eq!(space.encode(&[0, 0]), 0);
        assert_eq!(space.encode(&[0, 2]), 2);
        assert_eq!(space.encode(&[1, 0]), 3);
    }

    #[test]
    fn restriction_pins_components() {
        let space = JointActionSpace::new(vec![3, 4]);
        let restricted = space.restricted_indices(&[None, Some(2)]);
        assert_eq!(restricted.len(), 3);
        for idx in restricted {
            assert_eq!(space.decode(idx)[1], 2);
        }
    }

    #[test]
    fn empty_restriction_is_full_space() {
        let space = JointActionSpace::new(vec![2, 2]);
        assert_eq!(space.restricted_indices(&[None, None]).len(), 4);
    }

    #[test]
    fn all_pinned_is_singleton() {
        let space = JointActionSpace::new(vec![3, 4]);
        let r = space.restricted_indices(&[Some(1), Some(3)]);
        assert_eq!(r, vec![space.encode(&[1, 3])]);
    }

    // Exhaustive-enumeration oracle: restricted argmax over random Q-tables
    // must match a brute-force max over the explicitly listed joint actions.
    #[test]
    fn restricted_argmax_matches_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let space = JointActionSpace::new(vec![3, 4]);
        for _ in 0..200 {
            let q: Vec<f64> = (0..space.size()).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let running = rng.gen_range(0..4);
            let pinned = vec![None, Some(running)];
            let got = space.restricted_argmax(&q, &pinned);
            // brute force over {(m1, running)} for all m1
            let mut best = space.encode(&[0, running]);
            for m1 in 1..3 {
                let idx = space.encode(&[m1, running]);
                if q[idx] > q[best] {
                    best = idx;
                }
            }
            assert_eq!(got, best);
        }
    }
}
