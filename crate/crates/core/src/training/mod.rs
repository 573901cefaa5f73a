//! Objectives, optimiser, schedule and the alternating update loop.

pub mod loss;
pub mod optim;
pub mod schedule;
pub mod sweep;
pub mod trainer;

pub use loss::{
    adversarial_loss, combined_generator_loss, discriminator_loss_grad, freq_loss, generator_adversarial_loss,
    generator_loss_grad, AdversarialLoss, FreqLoss, GeneratorLoss, LossReport, SCORE_EPS,
};
pub use optim::{Adam, ADAM_EPS};
pub use schedule::{discriminator_steps, discriminator_updates, epoch_multiplier, lr_multiplier};
pub use sweep::{seed_sweep, SweepReport, SweepRun};
pub use trainer::{
    checkpoint_config, checkpoint_path, generator_objective, latest_checkpoint, load_generator, train, EpochSummary,
    GeneratorObjective, Objective,
    RunOptions, RunSummary, TrainConfig, TrainOutcome, TrainState, Trainer,
};
