pub mod bounds;
pub mod chain;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod io;
pub mod learning;
pub mod noise;
pub mod rng;
pub mod schedule;
pub mod studies;

pub use error::{Error, Result};
pub use game::{Game, Profile, DEFAULT_STATE_CAP};
