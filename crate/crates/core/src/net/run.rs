use super::{FiringSequence, NetStructure, PlaceId, TransitionId};
use crate::error::Result;

/// Occurrence net induced by a finite firing sequence, labelled back to the base net.
///
/// Conditions are token occurrences, events are transition occurrences. In a safe net
/// a token occurrence is identified by its place, so every condition has at most
/// one consuming event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedRun {
    /// Label of each condition.
    pub conditions: Vec<PlaceId>,
    /// Label of each event.
    pub events: Vec<TransitionId>,
    pub event_pre: Vec<Vec<usize>>,
    pub event_post: Vec<Vec<usize>>,
}

impl InducedRun {
    /// Builds the run of the finite part of `seq` (for lassos: prefix plus one period).
    pub fn from_sequence<N: NetStructure>(net: &N, seq: &FiringSequence) -> Result<Self> {
        seq.validate(net)?;
        let pt = net.pt();
        let mut current: Vec<Option<usize>> = vec![None; pt.places().len()];
        let mut conditions = Vec::new();
        for &p in pt.initial() {
            current[p] = Some(conditions.len());
            conditions.push(pt.places()[p].clone());
        }
        let mut run = InducedRun {
            conditions,
            events: Vec::new(),
            event_pre: Vec::new(),
            event_post: Vec::new(),
        };
        for (_, t) in &seq.steps {
            let ti = pt.transition_index(t.as_str()).expect("validated");
            let pre: Vec<usize> = pt.pre(ti).iter().map(|&p| current[p].take().expect("validated")).collect();
            let mut post = Vec::new();
            for &p in pt.post(ti) {
                let c = run.conditions.len();
                run.conditions.push(pt.places()[p].clone());
                current[p] = Some(c);
                post.push(c);
            }
            run.events.push(t.clone());
            run.event_pre.push(pre);
            run.event_post.push(post);
        }
        Ok(run)
    }

    /// Number of events consuming each condition.
    pub fn consumers(&self) -> Vec<usize> {
        let mut count = vec![0; self.conditions.len()];
        for pre in &self.event_pre {
            for &c in pre {
                count[c] += 1;
            }
        }
        count
    }
}
