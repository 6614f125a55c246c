//! Library half of the CLI: the JSON object schema and the command
//! implementations, kept separate from the binary so integration tests can
//! exercise file formats directly.

pub mod commands;
pub mod schema;
