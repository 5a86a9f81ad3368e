//! Attribute-modular reinforcement learning for 2D continuous control.
//!
//! A control task is decomposed into *attributes*: the base goal (target
//! reaching) plus stackable requirements such as obstacle avoidance, a timed
//! door, a speed limit, or a force disturbance. Each attribute gets its own
//! state projection, reward term, and transition effect. The base policy is
//! trained first; every further attribute is learned as a *compensative
//! module* that reads the attribute's state and the incoming action and emits
//! a correction, blended in with a ramped weight. Trained modules can be
//! reassembled behind the same base to act on unseen attribute combinations
//! without retraining.
//!
//! The crate ships:
//!
//! * [`nn`] — a dense MLP core with analytic backpropagation, a Gaussian
//!   action head, and Adam, all in `f64` with no external numeric framework;
//! * [`rl`] — rollout collection, discounted returns, GAE, the three policy
//!   gradient objectives (plain score function, KL-penalized, clipped
//!   surrogate), and the training loop;
//! * [`env`] — a force-controlled point-mass ball and a velocity-controlled
//!   planar two-link arm with composable attributes;
//! * [`cascade`] — compensative attribute modules, action blending, and stack
//!   assembly;
//! * [`curriculum`] — reward-gated geometric growth of the initial-state
//!   sampling radius, forward and reverse;
//! * [`harness`] — config files, checkpoints, evaluation, the
//!   baseline-comparison experiment, and CSV output, all behind the `calnet`
//!   CLI.
//!
//! The `book/` directory holds a guide built with mdbook; its code snippets
//! are compiled and run as doctests below so the book cannot drift from the
//! API.

pub mod cascade;
pub mod curriculum;
pub mod env;
pub mod error;
pub mod harness;
pub mod nn;
pub mod rl;

pub use error::{Error, Result};

// Book chapters double as doctests: every fenced Rust block in the guide is
// compiled and executed by `cargo test --doc`.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(Networks, "../../../book/src/networks.md");
    chapter!(Advantage, "../../../book/src/advantage.md");
    chapter!(Objectives, "../../../book/src/objectives.md");
    chapter!(Environments, "../../../book/src/environments.md");
    chapter!(Cascade, "../../../book/src/cascade.md");
    chapter!(Curriculum, "../../../book/src/curriculum.md");
    chapter!(Harness, "../../../book/src/harness.md");
}
