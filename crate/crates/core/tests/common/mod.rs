#![allow(dead_code)]

pub mod fof;
pub mod random;
