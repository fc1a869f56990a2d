#![allow(dead_code)]

pub mod jet;
