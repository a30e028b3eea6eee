//! Brute-force oracles, claim checks, the quartic pipeline and the
//! verification suite behind the `biasrank` command.

pub mod checks;
pub mod extract;
pub mod generate;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod suite;
