#![allow(dead_code, clippy::needless_range_loop)]

pub mod fixtures;
pub mod oracle;
