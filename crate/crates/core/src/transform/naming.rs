//! Names of the elements introduced by the reduction. Subnets are numbered from 1.

/// Activation place of the original part.
pub fn act_o() -> String {
    "act@o".to_string()
}

/// Activation place of subnet `i` for steps labelled `t`.
pub fn act(t: &str, i: usize) -> String {
    format!("act@{t}#{i}")
}

/// Copy of place `p` in subnet `i`.
pub fn copy(p: &str, i: usize) -> String {
    format!("[{p}]#{i}")
}

/// Initial place of subnet `i`.
pub fn init(i: usize) -> String {
    format!("init#{i}")
}

/// Subnet transition starting a chain in `q` when `t` fires.
pub fn start(t: &str, q: &str, i: usize) -> String {
    format!("{t}@(>,{q})#{i}")
}

/// Subnet transition following the transit `p -> q` of `t`.
pub fn transit(t: &str, p: &str, q: &str, i: usize) -> String {
    format!("{t}@({p},{q})#{i}")
}

/// Subnet transition skipping `t`.
pub fn skip(t: &str, i: usize) -> String {
    format!("{t}@skip#{i}")
}

/// Place recording that the chain tracked by subnet `i` ended in `p`.
pub fn ended(p: &str, i: usize) -> String {
    format!("[{p}]#{i}!")
}

/// Subnet transition ending the tracked chain in `p` when `t` consumes `p` without a transit.
pub fn end(t: &str, p: &str, i: usize) -> String {
    format!("{t}@({p},!)#{i}")
}
