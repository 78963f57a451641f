#![allow(dead_code)]

pub mod fox;
pub mod lifts;
pub mod singular;
