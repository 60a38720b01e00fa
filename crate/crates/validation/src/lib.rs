//! Acceptance suite for the workspace. Run with
//! `cargo test -p binoether-validation --test acceptance`.
