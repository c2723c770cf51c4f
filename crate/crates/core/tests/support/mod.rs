#![allow(dead_code)]

pub mod jacobi;
