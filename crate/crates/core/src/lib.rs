//! Universal and robust distributed convolutional network codes over F₂(z).

pub mod algebra;
pub mod network;
pub mod transform;
pub mod identity;
pub mod codes;
pub mod sim;
pub mod szcheck;
