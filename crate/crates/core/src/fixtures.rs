//! The two-train railroad gate model used throughout the tests.

use crate::model::{parse_model, Model};

pub const TRAIN_GATE: &str = include_str!("../models/traingate.cif");

pub fn train_gate() -> Model {
    parse_model(TRAIN_GATE).expect("bundled model parses")
}
