use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::loss::{
    adversarial_loss, combined_generator_loss, discriminator_loss_grad, generator_adversarial_loss, generator_loss_grad,
    FreqLoss, GeneratorLoss, LossReport,
};
use super::optim::{Adam, AdamHeader};
use super::schedule::{discriminator_steps, lr_multiplier};
use crate::dataset::{BatchPlan, SegmentPair};
use crate::eval::{evaluate, mape, Subset};
use crate::model::{
    fingerprint, Checkpoint, Discriminator, DiscriminatorConfig, Generator, GeneratorConfig, Graph, ParameterSet,
    Tensor,
};
use crate::{Error, Result};

/// Mixed into the seed for batch shuffling so it never shares a stream
/// with parameter initialisation.
const BATCH_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Gan,
    GanPlusFreq,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Gan => "gan",
            Objective::GanPlusFreq => "gan_plus_freq",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gan" => Ok(Objective::Gan),
            "gan_plus_freq" | "gan_freq" | "gan+freq" => Ok(Objective::GanPlusFreq),
            _ => Err(Error::Config(format!("unknown objective {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub objective: Objective,
    pub generator: GeneratorConfig,
    pub discriminator: DiscriminatorConfig,
    #[serde(default)]
    pub generator_loss: GeneratorLoss,
    pub lr_g: f64,
    pub lr_d: f64,
    pub betas: (f64, f64),
    pub batch_size: usize,
    pub d_update_period: u64,
    pub epochs: usize,
    pub lr_constant_epochs: usize,
    pub lambda_freq: f64,
    pub seed: u64,
    #[serde(default = "default_true")]
    pub drop_last: bool,
}

fn default_true() -> bool {
    true
}

impl TrainConfig {
    pub fn standard(objective: Objective) -> Self {
        let (epochs, lr_constant_epochs) = match objective {
            Objective::Gan => (15, 4),
            Objective::GanPlusFreq => (11, 5),
        };
        TrainConfig {
            objective,
            generator: GeneratorConfig::default(),
            discriminator: DiscriminatorConfig::default(),
            generator_loss: GeneratorLoss::NonSaturating,
            lr_g: 1e-4,
            lr_d: 1e-5,
            betas: (0.9, 0.999),
            batch_size: 128,
            d_update_period: 5,
            epochs,
            lr_constant_epochs,
            lambda_freq: 0.1,
            seed: 0,
            drop_last: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        self.discriminator.validate()?;
        let positive = [self.lr_g, self.lr_d].iter().all(|v| v.is_finite() && *v > 0.0);
        if !positive {
            return Err(Error::Config("learning rates must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.betas.0) || !(0.0..1.0).contains(&self.betas.1) {
            return Err(Error::Config("betas must lie in [0, 1)".into()));
        }
        if self.batch_size == 0 || self.d_update_period == 0 || self.epochs == 0 {
            return Err(Error::Config("batch size, update period and epochs must be positive".into()));
        }
        if self.lr_constant_epochs >= self.epochs {
            return Err(Error::Config(format!(
                "lr_constant_epochs ({}) must be below epochs ({})",
                self.lr_constant_epochs, self.epochs
            )));
        }
        if !(self.lambda_freq >= 0.0 && self.lambda_freq.is_finite()) {
            return Err(Error::Config("lambda_freq must be a non-negative number".into()));
        }
        Ok(())
    }

    /// Fingerprint of the two architectures; checkpoints must match it.
    pub fn fingerprint(&self) -> String {
        fingerprint(&(&self.generator, &self.discriminator))
    }
}

/// Mutable state of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    /// Completed epochs.
    pub epoch: usize,
    /// Completed generator updates.
    pub iteration: u64,
    pub generator: ParameterSet,
    pub discriminator: ParameterSet,
    pub opt_g: Adam,
    pub opt_d: Adam,
    pub last_loss_d: f64,
    /// Per-iteration losses recorded by this process.
    pub history: Vec<LossReport>,
    pub epochs: Vec<EpochSummary>,
}

impl TrainState {
    pub fn discriminator_updates(&self) -> u64 {
        self.opt_d.step
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochSummary {
    pub epoch: usize,
    pub iterations: u64,
    pub loss_d: f64,
    pub loss_g_adv: f64,
    pub loss_freq: f64,
    pub loss_g: f64,
    pub clamped: usize,
    pub val_mape: Option<f64>,
    pub val_failures: Option<usize>,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub objective: Objective,
    pub generator_loss: GeneratorLoss,
    pub seed: u64,
    pub fingerprint: String,
    pub epochs_completed: usize,
    pub iterations: u64,
    pub discriminator_updates: u64,
    pub best_epoch: Option<usize>,
    pub best_val_mape: Option<f64>,
    pub epochs: Vec<EpochSummary>,
}

/// One generator/discriminator pair and its optimisers.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub config: TrainConfig,
    generator: Generator,
    discriminator: Discriminator,
    freq: FreqLoss,
    plan: BatchPlan,
    pub state: TrainState,
}

impl Trainer {
    /// Fresh parameters for a training set of `n_train` pairs.
    pub fn new(config: TrainConfig, n_train: usize) -> Result<Self> {
        config.validate()?;
        let generator = Generator::new(config.generator.clone())?;
        let discriminator = Discriminator::new(config.discriminator.clone())?;
        let mut plan = BatchPlan::new(n_train, config.batch_size, config.seed ^ BATCH_SEED_SALT);
        plan.drop_last = config.drop_last;
        if plan.batches_per_epoch() == 0 {
            return Err(Error::Config(format!(
                "{n_train} training pairs do not fill one batch of {}",
                config.batch_size
            )));
        }
        let g = generator.init_params(config.seed);
        let d = discriminator.init_params(config.seed);
        let state = TrainState {
            epoch: 0,
            iteration: 0,
            opt_g: Adam::new(g.tensors(), config.betas),
            opt_d: Adam::new(d.tensors(), config.betas),
            generator: g,
            discriminator: d,
            last_loss_d: f64::NAN,
            history: Vec::new(),
            epochs: Vec::new(),
        };
        Ok(Trainer {
            freq: FreqLoss::new(config.generator.input_length),
            config,
            generator,
            discriminator,
            plan,
            state,
        })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn discriminator(&self) -> &Discriminator {
        &self.discriminator
    }

    pub fn iterations_per_epoch(&self) -> u64 {
        self.plan.batches_per_epoch() as u64
    }

    pub fn total_iterations(&self) -> u64 {
        self.iterations_per_epoch() * self.config.epochs as u64
    }

    /// `(lr_g, lr_d)` for 1-based `iteration`.
    pub fn learning_rates(&self, iteration: u64) -> (f64, f64) {
        let constant = self.iterations_per_epoch() * self.config.lr_constant_epochs as u64;
        let m = lr_multiplier(iteration, constant, self.total_iterations());
        (self.config.lr_g * m, self.config.lr_d * m)
    }

    fn lambda(&self) -> Option<f64> {
        match self.config.objective {
            Objective::Gan => None,
            Objective::GanPlusFreq => Some(self.config.lambda_freq),
        }
    }

    /// One iteration: a discriminator update when the cadence calls for
    /// it, then a generator update.
    pub fn step(&mut self, ppg: &Tensor, ecg: &Tensor) -> Result<LossReport> {
        let t = self.state.iteration + 1;
        let (lr_g, lr_d) = self.learning_rates(t);
        let batch = ppg.shape[0];
        let mut report = LossReport { iteration: t, lr_g, lr_d, ..Default::default() };

        if discriminator_steps(t, self.config.d_update_period) {
            let fake = self.generator.forward(&self.state.generator, ppg)?;
            let both = Tensor {
                shape: vec![2 * batch, 1, ecg.shape[2]],
                data: ecg.data.iter().chain(&fake.data).copied().collect(),
            };
            let (loss, grads) = {
                let mut g = Graph::new();
                let p = self.state.discriminator.bind(&mut g, true);
                let input = g.input(both, false);
                let trace = self.discriminator.forward_graph(&mut g, &p, input)?;
                let scores = g.value(trace.scores).data.clone();
                let (real, fake) = scores.split_at(batch);
                let loss = adversarial_loss(real, fake, self.config.generator_loss);
                let (gr, gf) = discriminator_loss_grad(real, fake);
                let seed = Tensor { shape: vec![2 * batch, 1, 1], data: gr.into_iter().chain(gf).collect() };
                let mut grads = g.backward(trace.scores, seed)?;
                (loss, p.gradients(&mut grads, &self.state.discriminator))
            };
            self.check_finite(t, "discriminator", &[loss.loss_d], &grads)?;
            self.state.opt_d.update(self.state.discriminator.tensors_mut(), &grads, lr_d);
            self.state.last_loss_d = loss.loss_d;
            report.real_term = loss.real_term;
            report.fake_term = loss.fake_term;
            report.clamped += loss.clamped;
            report.d_updated = true;
        }
        report.loss_d = self.state.last_loss_d;

        let grads = {
            let mut g = Graph::new();
            let p = self.state.generator.bind(&mut g, true);
            let x = g.input(ppg.clone(), false);
            let trace = self.generator.forward_graph(&mut g, &p, x)?;
            let fake = g.value(trace.output).clone();

            let obj = generator_objective(
                &self.discriminator,
                &self.state.discriminator,
                &fake,
                ecg,
                self.config.generator_loss,
                &self.freq,
                self.lambda(),
            )?;
            report.loss_g_adv = obj.adversarial;
            report.loss_freq = obj.freq;
            report.loss_g = obj.total;
            report.clamped += obj.clamped;
            let mut grads = g.backward(trace.output, obj.grad)?;
            p.gradients(&mut grads, &self.state.generator)
        };
        self.check_finite(t, "generator", &[report.loss_g, report.loss_freq], &grads)?;
        self.state.opt_g.update(self.state.generator.tensors_mut(), &grads, lr_g);
        self.state.iteration = t;
        Ok(report)
    }

    fn check_finite(&self, iteration: u64, which: &str, losses: &[f64], grads: &[Tensor]) -> Result<()> {
        let norm = grads.iter().map(|g| g.norm().powi(2)).sum::<f64>().sqrt();
        if losses.iter().all(|v| v.is_finite()) && norm.is_finite() {
            return Ok(());
        }
        Err(Error::NonFinite {
            iteration,
            detail: format!("{which} update: losses {losses:?}, gradient norm {norm}"),
        })
    }

    pub fn batch_tensors(pairs: &[SegmentPair], idx: &[usize]) -> Result<(Tensor, Tensor)> {
        Ok((
            Tensor::from_signals(idx.iter().map(|&i| pairs[i].ppg.samples.as_slice()))?,
            Tensor::from_signals(idx.iter().map(|&i| pairs[i].ecg.samples.as_slice()))?,
        ))
    }

    /// Runs the next epoch over `pairs` and returns its mean losses.
    pub fn train_epoch(&mut self, pairs: &[SegmentPair]) -> Result<(EpochSummary, Vec<LossReport>)> {
        if pairs.len() != self.plan.len {
            return Err(Error::Config(format!(
                "trainer was built for {} pairs, got {}",
                self.plan.len,
                pairs.len()
            )));
        }
        let mut reports = Vec::with_capacity(self.plan.batches_per_epoch());
        for idx in self.plan.epoch(self.state.epoch as u64) {
            let (x, y) = Self::batch_tensors(pairs, &idx)?;
            reports.push(self.step(&x, &y)?);
        }
        self.state.epoch += 1;
        let n = reports.len() as f64;
        let mean = |f: fn(&LossReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        let d_rows: Vec<f64> = reports.iter().filter(|r| r.d_updated).map(|r| r.loss_d).collect();
        let summary = EpochSummary {
            epoch: self.state.epoch,
            iterations: self.state.iteration,
            loss_d: if d_rows.is_empty() { self.state.last_loss_d } else { d_rows.iter().sum::<f64>() / d_rows.len() as f64 },
            loss_g_adv: mean(|r| r.loss_g_adv),
            loss_freq: mean(|r| r.loss_freq),
            loss_g: mean(|r| r.loss_g),
            clamped: reports.iter().map(|r| r.clamped).sum(),
            val_mape: None,
            val_failures: None,
        };
        self.state.history.extend_from_slice(&reports);
        Ok((summary, reports))
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let s = &self.state;
        let mut tensors = Vec::new();
        let named = |prefix: &str, p: &ParameterSet| {
            p.iter().map(|(n, t)| (format!("{prefix}.{n}"), t.clone())).collect::<Vec<_>>()
        };
        tensors.extend(named("g", &s.generator));
        tensors.extend(named("d", &s.discriminator));
        for (name, opt) in [("opt_g", &s.opt_g), ("opt_d", &s.opt_d)] {
            for (i, (m, v)) in opt.m.iter().zip(&opt.v).enumerate() {
                tensors.push((format!("{name}.m.{i}"), m.clone()));
                tensors.push((format!("{name}.v.{i}"), v.clone()));
            }
        }
        let meta = CheckpointMeta {
            config: self.config.clone(),
            opt_g: s.opt_g.header(),
            opt_d: s.opt_d.header(),
            last_loss_d: s.last_loss_d.is_finite().then_some(s.last_loss_d),
            epochs: s.epochs.clone(),
        };
        Checkpoint {
            fingerprint: self.config.fingerprint(),
            epoch: s.epoch,
            iteration: s.iteration,
            meta: serde_json::to_value(meta).expect("meta serialises"),
            tensors,
        }
    }

    /// Restores parameters, optimiser moments and counters.
    pub fn restore(&mut self, ckpt: &Checkpoint) -> Result<()> {
        let fp = self.config.fingerprint();
        if ckpt.fingerprint != fp {
            return Err(Error::FingerprintMismatch { expected: fp, found: ckpt.fingerprint.clone() });
        }
        let meta: CheckpointMeta = serde_json::from_value(ckpt.meta.clone())?;
        let g = load_params(ckpt, "g.", &self.config.generator.layout())?;
        let d = load_params(ckpt, "d.", &self.config.discriminator.layout())?;
        let opt_g = load_adam(ckpt, "opt_g", meta.opt_g, &g)?;
        let opt_d = load_adam(ckpt, "opt_d", meta.opt_d, &d)?;
        self.state = TrainState {
            epoch: ckpt.epoch,
            iteration: ckpt.iteration,
            generator: g,
            discriminator: d,
            opt_g,
            opt_d,
            last_loss_d: meta.last_loss_d.unwrap_or(f64::NAN),
            history: Vec::new(),
            epochs: meta.epochs,
        };
        Ok(())
    }
}

/// Generator objective at a given generator output.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorObjective {
    pub adversarial: f64,
    /// Spectral loss, computed for monitoring even when it is not weighted.
    pub freq: f64,
    pub total: f64,
    /// Gradient of `total` w.r.t. the generator output.
    pub grad: Tensor,
    pub clamped: usize,
}

/// Adversarial term through a frozen discriminator plus, when `lambda` is
/// given, the weighted spectral term.
pub fn generator_objective(
    disc: &Discriminator,
    d_params: &ParameterSet,
    fake: &Tensor,
    real: &Tensor,
    variant: GeneratorLoss,
    freq: &FreqLoss,
    lambda: Option<f64>,
) -> Result<GeneratorObjective> {
    let batch = fake.shape[0];
    let mut g = Graph::new();
    let dp = d_params.bind(&mut g, false);
    let y = g.input(fake.clone(), true);
    let trace = disc.forward_graph(&mut g, &dp, y)?;
    let scores = g.value(trace.scores).data.clone();
    let seed = Tensor { shape: vec![batch, 1, 1], data: generator_loss_grad(&scores, variant) };
    let mut grads = g.backward(trace.scores, seed)?;
    let mut grad = grads.take(y).expect("generator output gradient");
    let (adversarial, clamped) = generator_adversarial_loss(&scores, variant);
    let (lf, total) = match lambda {
        Some(lambda) => {
            let (lf, fg) = freq.loss_and_grad(fake, real)?;
            for (o, f) in grad.data.iter_mut().zip(&fg.data) {
                *o += lambda * f;
            }
            (lf, combined_generator_loss(adversarial, lf, lambda))
        }
        None => (freq.loss(fake, real)?, adversarial),
    };
    Ok(GeneratorObjective { adversarial, freq: lf, total, grad, clamped })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointMeta {
    config: TrainConfig,
    opt_g: AdamHeader,
    opt_d: AdamHeader,
    last_loss_d: Option<f64>,
    epochs: Vec<EpochSummary>,
}

fn load_params(ckpt: &Checkpoint, prefix: &str, layout: &[crate::model::ParamSpec]) -> Result<ParameterSet> {
    let (names, tensors): (Vec<String>, Vec<Tensor>) =
        ckpt.with_prefix(prefix).map(|(n, t)| (n.to_string(), t.clone())).unzip();
    let set = ParameterSet::from_parts(names, tensors);
    set.check_layout(layout)?;
    Ok(set)
}

fn load_adam(ckpt: &Checkpoint, name: &str, h: AdamHeader, params: &ParameterSet) -> Result<Adam> {
    let mut opt = Adam::new(params.tensors(), (h.beta1, h.beta2));
    opt.eps = h.eps;
    opt.step = h.step;
    for (i, p) in params.tensors().iter().enumerate() {
        for (kind, slot) in [("m", &mut opt.m[i]), ("v", &mut opt.v[i])] {
            let t = ckpt
                .tensor(&format!("{name}.{kind}.{i}"))
                .ok_or_else(|| Error::Shape(format!("checkpoint lacks {name}.{kind}.{i}")))?;
            if t.shape != p.shape {
                return Err(Error::Shape(format!("{name}.{kind}.{i} has shape {:?}", t.shape)));
            }
            *slot = t.clone();
        }
    }
    Ok(opt)
}

/// Generator parameters from a checkpoint written by [`Trainer::checkpoint`].
pub fn load_generator(path: &Path, config: &GeneratorConfig, expected_fingerprint: Option<&str>) -> Result<ParameterSet> {
    let ckpt = Checkpoint::load(path, expected_fingerprint)?;
    load_params(&ckpt, "g.", &config.layout())
}

/// Training configuration stored in a checkpoint header.
pub fn checkpoint_config(ckpt: &Checkpoint) -> Result<TrainConfig> {
    let meta: CheckpointMeta = serde_json::from_value(ckpt.meta.clone())?;
    Ok(meta.config)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions<'a> {
    /// Run directory; nothing is written when absent.
    pub dir: Option<&'a Path>,
    /// Pairs scored after every epoch to pick the best checkpoint.
    pub validation: Option<&'a [SegmentPair]>,
    /// Continue from the newest checkpoint in `dir`.
    pub resume: bool,
    /// Stop after this many completed epochs (the schedule still spans
    /// `config.epochs`).
    pub stop_after: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub trainer: Trainer,
    pub summary: RunSummary,
}

const METRICS_HEADER: &str = "iteration,loss_d,loss_g_adv,loss_freq,lr_g,lr_d";

/// Full schedule over `pairs`, with per-epoch checkpoints, metrics and
/// validation when a run directory is given.
pub fn train(config: &TrainConfig, pairs: &[SegmentPair], opts: &RunOptions) -> Result<TrainOutcome> {
    if pairs.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mut trainer = Trainer::new(config.clone(), pairs.len())?;
    if let Some(dir) = opts.dir {
        prepare_run_dir(dir, config, opts.resume, &mut trainer)?;
    }
    let stop = opts.stop_after.unwrap_or(config.epochs).min(config.epochs);
    while trainer.state.epoch < stop {
        let (mut summary, reports) = match trainer.train_epoch(pairs) {
            Ok(v) => v,
            Err(e) => {
                if let (Some(dir), Error::NonFinite { iteration, detail }) = (opts.dir, &e) {
                    let dump = serde_json::json!({
                        "iteration": iteration,
                        "detail": detail,
                        "epoch": trainer.state.epoch,
                    });
                    let _ = fs::write(dir.join("abort.json"), serde_json::to_vec_pretty(&dump)?);
                }
                return Err(e);
            }
        };
        if let Some(val) = opts.validation.filter(|v| !v.is_empty()) {
            let records = evaluate(trainer.generator(), &trainer.state.generator, val, false)?;
            let m = mape(&records, Subset::All).ok();
            summary.val_mape = m.as_ref().and_then(|m| m.mape_percent);
            summary.val_failures = m.map(|m| m.n_failures);
        }
        trainer.state.epochs.push(summary);
        if let Some(dir) = opts.dir {
            append_metrics(&dir.join("metrics.csv"), &reports)?;
            let path = checkpoint_path(dir, trainer.state.epoch);
            trainer.checkpoint().save(&path)?;
        }
    }
    let summary = run_summary(&trainer);
    if let Some(dir) = opts.dir {
        let p = dir.join("summary.json");
        fs::write(&p, serde_json::to_vec_pretty(&summary)?).map_err(|e| Error::io(&p, e))?;
    }
    Ok(TrainOutcome { trainer, summary })
}

pub fn checkpoint_path(dir: &Path, epoch: usize) -> PathBuf {
    dir.join("checkpoints").join(format!("epoch_{epoch}.ckpt"))
}

/// Highest-numbered `epoch_N.ckpt` in a run directory.
pub fn latest_checkpoint(dir: &Path) -> Option<(usize, PathBuf)> {
    let entries = fs::read_dir(dir.join("checkpoints")).ok()?;
    entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            let n = name.strip_prefix("epoch_")?.strip_suffix(".ckpt")?.parse().ok()?;
            Some((n, e.path()))
        })
        .max_by_key(|(n, _)| *n)
}

fn run_summary(trainer: &Trainer) -> RunSummary {
    let s = &trainer.state;
    let best = s
        .epochs
        .iter()
        .filter_map(|e| e.val_mape.map(|m| (e.epoch, m)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    RunSummary {
        objective: trainer.config.objective,
        generator_loss: trainer.config.generator_loss,
        seed: trainer.config.seed,
        fingerprint: trainer.config.fingerprint(),
        epochs_completed: s.epoch,
        iterations: s.iteration,
        discriminator_updates: s.discriminator_updates(),
        best_epoch: best.map(|b| b.0),
        best_val_mape: best.map(|b| b.1),
        epochs: s.epochs.clone(),
    }
}

fn prepare_run_dir(dir: &Path, config: &TrainConfig, resume: bool, trainer: &mut Trainer) -> Result<()> {
    fs::create_dir_all(dir.join("checkpoints")).map_err(|e| Error::io(dir, e))?;
    let config_path = dir.join("config.json");
    let metrics = dir.join("metrics.csv");
    let latest = if resume { latest_checkpoint(dir) } else { None };
    match latest {
        Some((_, path)) => {
            let stored: TrainConfig = serde_json::from_slice(
                &fs::read(&config_path).map_err(|e| Error::io(&config_path, e))?,
            )?;
            if &stored != config {
                return Err(Error::Config(format!(
                    "{} holds a different configuration; refusing to resume",
                    config_path.display()
                )));
            }
            let ckpt = Checkpoint::load(&path, Some(&config.fingerprint()))?;
            trainer.restore(&ckpt)?;
            truncate_metrics(&metrics, trainer.state.iteration)?;
        }
        None => {
            fs::write(&config_path, serde_json::to_vec_pretty(config)?).map_err(|e| Error::io(&config_path, e))?;
            fs::write(&metrics, format!("{METRICS_HEADER}\n")).map_err(|e| Error::io(&metrics, e))?;
        }
    }
    Ok(())
}

fn append_metrics(path: &Path, reports: &[LossReport]) -> Result<()> {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iteration, r.loss_d, r.loss_g_adv, r.loss_freq, r.lr_g, r.lr_d
        );
    }
    let mut f = fs::OpenOptions::new().append(true).open(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Drops metric rows past `iteration`, left behind by an interrupted epoch.
fn truncate_metrics(path: &Path, iteration: u64) -> Result<()> {
    let text = fs::read_to_string(path).unwrap_or_else(|_| format!("{METRICS_HEADER}\n"));
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        let keep = i == 0
            || line
                .split(',')
                .next()
                .and_then(|v| v.parse::<u64>().ok())
                .is_some_and(|it| it <= iteration);
        if keep {
            out.push_str(line);
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
