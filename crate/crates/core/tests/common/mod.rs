#![allow(dead_code)]

pub mod lattice;
