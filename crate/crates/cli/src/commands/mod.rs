pub mod check;
pub mod corpus;
pub mod rank;

pub use corpus::{classify_bug_cmd, history, stats};
