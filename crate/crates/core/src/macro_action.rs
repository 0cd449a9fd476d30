use crate::obs::MacroObservation;

pub type MacroId = usize;

/// One macro-action: a low-level controller, a stochastic termination
/// condition, and an initiation (availability) predicate.
///
/// The controller and terminator read the owning agent's primitive-level view
/// `V` (which embeds the primitive observation history); availability reads
/// the agent's macro-observation history. The terminator returns a
/// termination probability in [0,1]; the execution loop draws the Bernoulli
/// sample.
pub struct MacroActionSpec<V> {
    pub id: MacroId,
    pub name: &'static str,
    pub controller: Box<dyn Fn(&V) -> usize + Send>,
    pub terminator: Box<dyn Fn(&V) -> f64 + Send>,
    pub available: Box<dyn Fn(&[MacroObservation]) -> bool + Send>,
}

impl<V> MacroActionSpec<V> {
    pub fn new(
        id: MacroId,
        name: &'static str,
        controller: impl Fn(&V) -> usize + Send + 'static,
        terminator: impl Fn(&V) -> f64 + Send + 'static,
    ) -> Self {
        Self {
            id,
            name,
            controller: Box::new(controller),
            terminator: Box::new(terminator),
            available: Box::new(|_| true),
        }
    }

    pub fn with_availability(
        mut self,
        available: impl Fn(&[MacroObservation]) -> bool + Send + 'static,
    ) -> Self {
        self.available = Box::new(available);
        self
    }
}

impl<V> std::fmt::Debug for MacroActionSpec<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MacroActionSpec")
            .field("id", &self.id)
            .field("name", &self.name)
            .finish()
    }
}
