/// Learning-rate multiplier for 1-based `iteration` out of `total`:
/// 1 through the first `constant` iterations, then linear to exactly 0 at
/// `iteration == total`.
pub fn lr_multiplier(iteration: u64, constant: u64, total: u64) -> f64 {
    if iteration <= constant || total <= constant {
        return 1.0;
    }
    if iteration >= total {
        return 0.0;
    }
    (total - iteration) as f64 / (total - constant) as f64
}

/// Multiplier at the boundary after `epoch` complete epochs.
pub fn epoch_multiplier(epoch: usize, constant_epochs: usize, epochs: usize) -> f64 {
    if epoch <= constant_epochs {
        1.0
    } else if epoch >= epochs {
        0.0
    } else {
        (epochs - epoch) as f64 / (epochs - constant_epochs) as f64
    }
}

/// Whether the discriminator steps on 1-based `iteration`.
pub fn discriminator_steps(iteration: u64, period: u64) -> bool {
    iteration.is_multiple_of(period)
}

pub fn discriminator_updates(iterations: u64, period: u64) -> u64 {
    iterations / period
}
