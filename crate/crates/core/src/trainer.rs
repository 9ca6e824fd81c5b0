//! Spectrum tables and their Adam training loop.
//!
//! Each step draws `3T` synset pairs: `T` synsets paired with one of their
//! direct hypernyms, `T` pairs of distinct synsets that share a head word,
//! and `T` uniformly random pairs. Labels are the taxonomy's HIS scalars.
//! Moments are kept per table entry but only rows that appear in the batch
//! are updated (lazy Adam), with bias correction by the global step.

use std::collections::{BTreeMap, HashMap};

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectrum::accumulate_pair_grad;
use crate::taxonomy::{HisScalars, Taxonomy};
use crate::wordnet::{Database, PartOfSpeech, SynsetId};

pub use crate::checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub t_per_strategy: usize,
    pub steps: u64,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub init_scale: f64,
    pub seed: u64,
    /// Steps per loss-log record.
    pub log_interval: u64,
    /// Steps between checkpoint callbacks; 0 disables them.
    pub checkpoint_interval: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 200,
            t_per_strategy: 100,
            steps: 200_000,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            init_scale: 0.5,
            seed: 0,
            log_interval: 100,
            checkpoint_interval: 0,
        }
    }
}

impl TrainConfig {
    pub fn batch_size(&self) -> usize {
        3 * self.t_per_strategy
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        if self.t_per_strategy == 0 {
            return bad("t_per_strategy must be at least 1".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return bad(format!("{name} must lie in [0, 1), got {b}"));
            }
        }
        if !(self.adam_epsilon.is_finite() && self.adam_epsilon > 0.0) {
            return bad(format!("adam_epsilon must be positive, got {}", self.adam_epsilon));
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return bad(format!("init_scale must be non-negative, got {}", self.init_scale));
        }
        if self.log_interval == 0 {
            return bad("log_interval must be at least 1".into());
        }
        Ok(())
    }
}

/// One spectrum per synset of a part of speech, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pos: PartOfSpeech,
    ids: Vec<SynsetId>,
    names: Vec<String>,
    dim: usize,
    values: Vec<f64>,
    index: HashMap<SynsetId, usize>,
}

impl SpectrumTable {
    pub fn from_parts(
        pos: PartOfSpeech,
        ids: Vec<SynsetId>,
        names: Vec<String>,
        dim: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("dim must be at least 1".into()));
        }
        if names.len() != ids.len() || values.len() != ids.len() * dim {
            return Err(Error::Inconsistent(format!(
                "{} ids, {} names and {} values do not form a table of dim {dim}",
                ids.len(),
                names.len(),
                values.len()
            )));
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (row, id) in ids.iter().enumerate() {
            if id.pos != pos {
                return Err(Error::CrossPos(pos, id.pos));
            }
            if index.insert(*id, row).is_some() {
                return Err(Error::Inconsistent(format!("duplicate row for {id}")));
            }
        }
        Ok(SpectrumTable {
            pos,
            ids,
            names,
            dim,
            values,
            index,
        })
    }

    pub fn pos(&self) -> PartOfSpeech {
        self.pos
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[SynsetId] {
        &self.ids
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.dim..(row + 1) * self.dim]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.values[row * self.dim..(row + 1) * self.dim]
    }

    pub fn row_of(&self, id: SynsetId) -> Result<usize> {
        if id.pos != self.pos {
            return Err(Error::CrossPos(self.pos, id.pos));
        }
        self.index
            .get(&id)
            .copied()
            .ok_or_else(|| Error::UnknownSynset(id.to_string()))
    }

    pub fn spectrum(&self, id: SynsetId) -> Result<&[f64]> {
        Ok(self.row(self.row_of(id)?))
    }

    /// Row for a canonical name such as `dog.n.01`.
    pub fn find(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownSynset(name.to_string()))
    }
}

/// A table with one row per taxonomy synset in taxonomy order, filled
/// from `U(-init_scale, init_scale)`.
pub fn init_table(t: &Taxonomy, config: &TrainConfig) -> Result<SpectrumTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    init_table_with(t, config, &mut rng)
}

fn init_table_with(t: &Taxonomy, config: &TrainConfig, rng: &mut ChaCha8Rng) -> Result<SpectrumTable> {
    config.validate()?;
    let n = t.len() * config.dim;
    let values = if config.init_scale == 0.0 {
        vec![0.0; n]
    } else {
        let dist = Uniform::new(-config.init_scale, config.init_scale);
        (0..n).map(|_| dist.sample(rng)).collect()
    };
    let names = (0..t.len() as u32).map(|i| t.name_at(i).to_string()).collect();
    SpectrumTable::from_parts(t.pos(), t.ids().to_vec(), names, config.dim, values)
}

/// Synsets grouped by head word, multi-member groups only, in key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SenseGroups {
    groups: BTreeMap<String, Vec<SynsetId>>,
}

impl SenseGroups {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[SynsetId])> {
        self.groups.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn get(&self, head: &str) -> Option<&[SynsetId]> {
        self.groups.get(head).map(Vec::as_slice)
    }

    /// Drops members outside `t` and groups left with fewer than two.
    pub fn restrict_to(&self, t: &Taxonomy) -> SenseGroups {
        let groups = self
            .groups
            .iter()
            .filter_map(|(k, v)| {
                let kept: Vec<SynsetId> = v.iter().copied().filter(|id| t.contains(*id)).collect();
                (kept.len() >= 2).then(|| (k.clone(), kept))
            })
            .collect();
        SenseGroups { groups }
    }
}

pub fn sense_groups(db: &Database, pos: PartOfSpeech) -> SenseGroups {
    let mut all: BTreeMap<String, Vec<SynsetId>> = BTreeMap::new();
    for s in db.synsets_of(pos) {
        all.entry(s.head_word()).or_default().push(s.id);
    }
    all.retain(|_, v| v.len() >= 2);
    SenseGroups { groups: all }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairStrategy {
    DirectHypernym,
    SenseRelated,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingPair {
    pub a: SynsetId,
    pub b: SynsetId,
    pub labels: HisScalars,
    pub strategy: PairStrategy,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairBatch {
    pub pairs: Vec<TrainingPair>,
}

impl PairBatch {
    pub fn count(&self, strategy: PairStrategy) -> usize {
        self.pairs.iter().filter(|p| p.strategy == strategy).count()
    }
}

/// Dense-index view of the sense groups for fast sampling.
struct Sampler {
    groups: Vec<Vec<u32>>,
    t: usize,
}

impl Sampler {
    fn new(t: &Taxonomy, groups: &SenseGroups, config: &TrainConfig) -> Result<Self> {
        if t.edge_count() == 0 {
            return Err(Error::InsufficientData(format!(
                "the {} taxonomy has no hypernym edges",
                t.pos()
            )));
        }
        let groups: Vec<Vec<u32>> = groups
            .iter()
            .map(|(_, members)| members.iter().filter_map(|&id| t.index_of(id).ok()).collect::<Vec<_>>())
            .filter(|g| g.len() >= 2)
            .collect();
        if groups.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no multi-member sense groups in the {} taxonomy",
                t.pos()
            )));
        }
        Ok(Sampler {
            groups,
            t: config.t_per_strategy,
        })
    }

    fn sample(&self, t: &Taxonomy, rng: &mut ChaCha8Rng) -> Vec<(u32, u32, PairStrategy)> {
        let n = t.len() as u32;
        let mut out = Vec::with_capacity(3 * self.t);
        while out.len() < self.t {
            let a = rng.gen_range(0..n);
            let ps = t.parents_at(a);
            if !ps.is_empty() {
                let h = ps[rng.gen_range(0..ps.len())];
                out.push((a, h, PairStrategy::DirectHypernym));
            }
        }
        for _ in 0..self.t {
            let g = &self.groups[rng.gen_range(0..self.groups.len())];
            let i = rng.gen_range(0..g.len());
            let mut j = rng.gen_range(0..g.len() - 1);
            if j >= i {
                j += 1;
            }
            out.push((g[i], g[j], PairStrategy::SenseRelated));
        }
        for _ in 0..self.t {
            out.push((rng.gen_range(0..n), rng.gen_range(0..n), PairStrategy::Random));
        }
        out
    }
}

pub fn sample_batch(
    t: &Taxonomy,
    groups: &SenseGroups,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<PairBatch> {
    let sampler = Sampler::new(t, groups, config)?;
    let pairs = sampler
        .sample(t, rng)
        .into_iter()
        .map(|(a, b, strategy)| TrainingPair {
            a: t.id_at(a),
            b: t.id_at(b),
            labels: t.scalars_at(a, b),
            strategy,
        })
        .collect();
    Ok(PairBatch { pairs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
}

impl AdamState {
    pub fn new(table: &SpectrumTable) -> Self {
        AdamState {
            first_moment: vec![0.0; table.values.len()],
            second_moment: vec![0.0; table.values.len()],
            step_count: 0,
        }
    }
}

/// Applies one lazy Adam update for `batch` and returns its mean pair loss.
pub fn train_step(
    table: &mut SpectrumTable,
    adam: &mut AdamState,
    batch: &PairBatch,
    config: &TrainConfig,
) -> Result<f64> {
    let rows = batch
        .pairs
        .iter()
        .map(|p| Ok((table.row_of(p.a)?, table.row_of(p.b)?, p.labels)))
        .collect::<Result<Vec<_>>>()?;
    step_rows(table, adam, &rows, config)
}

fn step_rows(
    table: &mut SpectrumTable,
    adam: &mut AdamState,
    rows: &[(usize, usize, HisScalars)],
    config: &TrainConfig,
) -> Result<f64> {
    if adam.first_moment.len() != table.values.len() {
        return Err(Error::DimensionMismatch {
            left: adam.first_moment.len(),
            right: table.values.len(),
        });
    }
    let dim = table.dim;
    // touched rows in order of first appearance, each with its gradient slot
    let mut slot_of: HashMap<usize, usize> = HashMap::with_capacity(2 * rows.len());
    let mut touched: Vec<usize> = Vec::with_capacity(2 * rows.len());
    for &(a, b, _) in rows {
        for r in [a, b] {
            slot_of.entry(r).or_insert_with(|| {
                touched.push(r);
                touched.len() - 1
            });
        }
    }
    let mut grad = vec![0.0; touched.len() * dim];
    let mut scratch_a = vec![0.0; dim];
    let mut scratch_b = vec![0.0; dim];
    let mut total = 0.0;
    for &(a, b, labels) in rows {
        scratch_a.fill(0.0);
        scratch_b.fill(0.0);
        total += accumulate_pair_grad(table.row(a), table.row(b), labels, &mut scratch_a, &mut scratch_b);
        for (r, g) in [(a, &scratch_a), (b, &scratch_b)] {
            let s = slot_of[&r];
            for (acc, v) in grad[s * dim..(s + 1) * dim].iter_mut().zip(g) {
                *acc += v;
            }
        }
    }

    adam.step_count += 1;
    let t = adam.step_count as f64;
    let (b1, b2) = (config.adam_beta1, config.adam_beta2);
    let c1 = 1.0 - b1.powf(t);
    let c2 = 1.0 - b2.powf(t);
    for (s, &r) in touched.iter().enumerate() {
        for d in 0..dim {
            let g = grad[s * dim + d];
            let k = r * dim + d;
            let m = b1 * adam.first_moment[k] + (1.0 - b1) * g;
            let v = b2 * adam.second_moment[k] + (1.0 - b2) * g * g;
            adam.first_moment[k] = m;
            adam.second_moment[k] = v;
            let update = config.learning_rate * (m / c1) / ((v / c2).sqrt() + config.adam_epsilon);
            let x = table.values[k] - update;
            if !x.is_finite() {
                return Err(Error::NonFiniteUpdate {
                    row: r,
                    name: table.names[r].clone(),
                    dim: d,
                    value: x,
                });
            }
            table.values[k] = x;
        }
    }
    Ok(if rows.is_empty() {
        0.0
    } else {
        total / rows.len() as f64
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    pub step: u64,
    pub mean_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub table: SpectrumTable,
    pub losses: Vec<LossRecord>,
}

/// `step,mean_loss` lines with a header.
pub fn loss_csv(losses: &[LossRecord]) -> String {
    let mut out = String::from("step,mean_loss\n");
    for r in losses {
        out.push_str(&format!("{},{}\n", r.step, r.mean_loss));
    }
    out
}

pub fn train(db: &Database, t: &Taxonomy, config: &TrainConfig) -> Result<TrainRun> {
    let groups = sense_groups(db, t.pos()).restrict_to(t);
    train_with(t, &groups, config, |_, _| Ok(()))
}

/// The training loop. `on_checkpoint` sees the table every
/// `checkpoint_interval` steps. Each loss record averages the batch losses
/// since the previous record.
pub fn train_with(
    t: &Taxonomy,
    groups: &SenseGroups,
    config: &TrainConfig,
    mut on_checkpoint: impl FnMut(u64, &SpectrumTable) -> Result<()>,
) -> Result<TrainRun> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut table = init_table_with(t, config, &mut rng)?;
    let mut losses = Vec::new();
    if config.steps == 0 {
        return Ok(TrainRun { table, losses });
    }
    let sampler = Sampler::new(t, groups, config)?;
    let mut adam = AdamState::new(&table);
    let (mut window_sum, mut window_len) = (0.0, 0u64);
    for step in 1..=config.steps {
        let rows: Vec<(usize, usize, HisScalars)> = sampler
            .sample(t, &mut rng)
            .into_iter()
            .map(|(a, b, _)| (a as usize, b as usize, t.scalars_at(a, b)))
            .collect();
        window_sum += step_rows(&mut table, &mut adam, &rows, config)?;
        window_len += 1;
        if step % config.log_interval == 0 || step == config.steps {
            let mean_loss = window_sum / window_len as f64;
            log::debug!("step {step}: mean loss {mean_loss:.4}");
            losses.push(LossRecord { step, mean_loss });
            window_sum = 0.0;
            window_len = 0;
        }
        if config.checkpoint_interval > 0 && step % config.checkpoint_interval == 0 {
            on_checkpoint(step, &table)?;
        }
    }
    Ok(TrainRun { table, losses })
}
