//! Std companion to `qldpc-core`: matrix files, Monte Carlo sweeps and the
//! `qldpc` command-line tool.

pub mod cli;
pub mod pcm;
pub mod simulator;
