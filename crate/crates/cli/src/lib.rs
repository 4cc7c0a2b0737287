//! Library surface of the command-line tool; the acceptance test target and
//! the binary share the selftest and parsing code through this crate.

#![allow(clippy::needless_range_loop)]

pub mod commands;
pub mod config;
pub mod parse;
pub mod selftest;
