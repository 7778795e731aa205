//! Exact engine for altruistic hedonic games.
//!
//! - [`graph`]: networks of friends and Clique source graphs.
//! - [`game`]: friend-oriented valuations and the six altruistic utility models.
//! - [`coalition`]: coalitions and coalition structures.
//! - [`stability`]: blocking predicates and (strict) core verification.
//! - [`gadgets`]: circulant, dome and pinched-dome gadgets.
//! - [`reductions`]: Clique reductions to core verification for min-EQ/min-AL,
//!   avg-EQ and avg-AL games.
//! - [`io`]: instance documents and the edge-list format.

pub mod coalition;
pub mod error;
pub mod gadgets;
pub mod game;
pub mod graph;
pub mod io;
pub mod reductions;
pub mod stability;

pub use coalition::{Coalition, CoalitionStructure};
pub use error::{Error, Result};
pub use game::{Aggregate, Altruism, Game, PlayerId, Preference, UtilityModel, UtilityValue};
pub use graph::FriendshipGraph;
pub use stability::{BlockingKind, CoreVerdict, Strategy, VerdictStatus};
