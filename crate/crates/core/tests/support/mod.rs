#![allow(dead_code)]

pub mod equilibrium;
pub mod joints;
pub mod random;
pub mod ssim;
pub mod states;
