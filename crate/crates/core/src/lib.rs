#![no_std]

extern crate alloc;

pub mod expr;
pub mod tensor;
pub mod calculus;
pub mod structures;
pub mod gauge;
pub mod reduction;
pub mod corpus;
