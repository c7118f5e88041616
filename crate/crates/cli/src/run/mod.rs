//! Command implementations.

pub mod gen_data;
pub mod train_cmd;
