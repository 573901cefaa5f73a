//! Attention U-Net generator, convolutional discriminator and the
//! reverse-mode autodiff tape they are built on.

pub mod checkpoint;
pub mod discriminator;
pub mod generator;
pub mod graph;
pub mod params;
pub mod tensor;

pub use checkpoint::{fingerprint, Checkpoint};
pub use discriminator::{Discriminator, DiscriminatorConfig, DiscriminatorTrace};
pub use generator::{attention_gate, Generator, GeneratorConfig, GeneratorTrace, LEAKY_SLOPE};
pub use graph::{Grads, Graph, Var};
pub use params::{Bound, Init, ParamSpec, ParameterSet, INIT_STD};
pub use tensor::Tensor;
