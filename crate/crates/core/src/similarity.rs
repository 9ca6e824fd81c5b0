//! Synset similarity measures: HIS and the three path-based baselines.
//!
//! The baselines come in two conventions. [`Convention::Formula`] applies
//! the textbook formulas to this crate's depth and path definitions
//! (depth counts edges, `l = edges + 1`, `d` of the deeper synset in LCH).
//! [`Convention::Reference`] follows the widely used reference
//! implementation of these measures: LCH scales by the deepest path in the
//! whole taxonomy, Wu-Palmer counts nodes and measures depth through the
//! subsumer, and verbs get a simulated root whose distance is the longest
//! upward path plus one.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::taxonomy::{HisScalars, Taxonomy};
use crate::wordnet::{Database, PartOfSpeech, SynsetId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HisParams {
    /// Exponent on γ in the numerator.
    pub numerator_exp: f64,
    /// Exponent on α, β and γ in the denominator.
    pub denominator_exp: f64,
    /// Weight of the uniqueness terms.
    pub unique_weight: f64,
}

impl Default for HisParams {
    fn default() -> Self {
        HisParams {
            numerator_exp: 0.2,
            denominator_exp: 0.3,
            unique_weight: 0.5,
        }
    }
}

impl HisParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("numerator_exp", self.numerator_exp),
            ("denominator_exp", self.denominator_exp),
            ("unique_weight", self.unique_weight),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    His,
    ShortestPath,
    Lch,
    Wp,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::His, Measure::ShortestPath, Measure::Lch, Measure::Wp];

    pub fn key(self) -> &'static str {
        match self {
            Measure::His => "his",
            Measure::ShortestPath => "path",
            Measure::Lch => "lch",
            Measure::Wp => "wp",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Measure::His => "HIS",
            Measure::ShortestPath => "Shortest Path",
            Measure::Lch => "LCH",
            Measure::Wp => "WP",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "his" => Ok(Measure::His),
            "path" | "sp" | "shortest_path" => Ok(Measure::ShortestPath),
            "lch" => Ok(Measure::Lch),
            "wp" | "wup" => Ok(Measure::Wp),
            _ => Err(Error::InvalidConfig(format!("unknown measure {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Formula,
    Reference,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(Convention::Formula),
            "reference" => Ok(Convention::Reference),
            _ => Err(Error::InvalidConfig(format!("unknown convention {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    pub measure: Measure,
}

impl SimilarityScore {
    fn new(measure: Measure, value: f64) -> Self {
        SimilarityScore { value, measure }
    }
}

fn pow0(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// `γ^p / (γ^q + w(α^q + β^q))` on real-valued scalars, with `0^e = 0`.
pub fn his_value(alpha: f64, beta: f64, gamma: f64, params: &HisParams) -> Result<f64> {
    if [alpha, beta, gamma].iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::DegenerateInput(format!(
            "HIS scalars must be finite and non-negative: ({alpha}, {beta}, {gamma})"
        )));
    }
    if alpha == 0.0 && beta == 0.0 && gamma == 0.0 {
        return Err(Error::DegenerateInput("HIS of the all-zero triple".into()));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let q = params.denominator_exp;
    let denom = pow0(gamma, q) + params.unique_weight * (pow0(alpha, q) + pow0(beta, q));
    Ok(pow0(gamma, params.numerator_exp) / denom)
}

pub fn his(scalars: HisScalars, params: &HisParams) -> Result<SimilarityScore> {
    let v = his_value(
        f64::from(scalars.alpha),
        f64::from(scalars.beta),
        f64::from(scalars.gamma),
        params,
    )?;
    Ok(SimilarityScore::new(Measure::His, v))
}

fn same_pos(t: &Taxonomy, a: SynsetId, b: SynsetId) -> Result<(u32, u32)> {
    if a.pos != b.pos {
        return Err(Error::CrossPos(a.pos, b.pos));
    }
    Ok((t.index_of(a)?, t.index_of(b)?))
}

pub fn his_pair(t: &Taxonomy, a: SynsetId, b: SynsetId, params: &HisParams) -> Result<SimilarityScore> {
    let (ia, ib) = same_pos(t, a, b)?;
    his(t.scalars_at(ia, ib), params)
}

/// `1 / l` with `l = edges + 1`.
pub fn shortest_path_sim(t: &Taxonomy, a: SynsetId, b: SynsetId) -> Result<SimilarityScore> {
    same_pos(t, a, b)?;
    let l = t.shortest_path_length(a, b)?;
    Ok(SimilarityScore::new(Measure::ShortestPath, 1.0 / f64::from(l)))
}

/// `-ln(l / (2 max(d_a, d_b)))`.
pub fn lch(t: &Taxonomy, a: SynsetId, b: SynsetId) -> Result<SimilarityScore> {
    same_pos(t, a, b)?;
    let l = t.shortest_path_length(a, b)?;
    let deepest = t.depth(a)?.max(t.depth(b)?);
    if deepest == 0 {
        return Err(Error::DegenerateInput("LCH between two root synsets".into()));
    }
    let v = -(f64::from(l) / (2.0 * f64::from(deepest))).ln();
    Ok(SimilarityScore::new(Measure::Lch, v))
}

/// `2 d_lcs / (d_a + d_b)`; 0 when there is no common hypernym.
pub fn wp(t: &Taxonomy, a: SynsetId, b: SynsetId) -> Result<SimilarityScore> {
    same_pos(t, a, b)?;
    let (da, db) = (t.depth(a)?, t.depth(b)?);
    if da + db == 0 {
        return Err(Error::DegenerateInput("Wu-Palmer between two root synsets".into()));
    }
    let v = match t.lcs(a, b)? {
        Some(h) => 2.0 * f64::from(t.depth(h)?) / f64::from(da + db),
        None => 0.0,
    };
    Ok(SimilarityScore::new(Measure::Wp, v))
}

#[derive(Clone, Copy, PartialEq)]
enum Target {
    Node(u32),
    SimulatedRoot,
}

/// Shortest up-down distance under the reference conventions.
fn reference_distance(t: &Taxonomy, from: u32, to: Target) -> Option<u32> {
    let simulate = t.pos() == PartOfSpeech::Verb;
    let up = t.up_distances(from);
    let eccentricity = up.iter().map(|&(_, d)| d).max().unwrap_or(0);
    match to {
        Target::SimulatedRoot => simulate.then_some(eccentricity + 1),
        Target::Node(s) => {
            let up_s = t.up_distances(s);
            let mut best = up
                .iter()
                .filter_map(|&(x, dx)| up_s.iter().find(|&&(y, _)| y == x).map(|&(_, dy)| dx + dy))
                .min();
            if simulate {
                let ecc_s = up_s.iter().map(|&(_, d)| d).max().unwrap_or(0);
                let via_root = eccentricity + 1 + ecc_s + 1;
                best = Some(best.map_or(via_root, |d| d.min(via_root)));
            }
            best
        }
    }
}

/// `-ln((dist + 1) / (2 D))` with `D` the deepest path in the taxonomy.
pub fn lch_reference(t: &Taxonomy, a: SynsetId, b: SynsetId) -> Result<SimilarityScore> {
    let (ia, ib) = same_pos(t, a, b)?;
    let dist = reference_distance(t, ia, Target::Node(ib))
        .ok_or_else(|| Error::DegenerateInput(format!("no path between {a} and {b}")))?;
    let depth = t.taxonomy_depth();
    if depth == 0 {
        return Err(Error::DegenerateInput("taxonomy of depth 0".into()));
    }
    let v = -(f64::from(dist + 1) / (2.0 * f64::from(depth))).ln();
    Ok(SimilarityScore::new(Measure::Lch, v))
}

/// Wu-Palmer with node-counted depths measured through the subsumer.
pub fn wp_reference(t: &Taxonomy, a: SynsetId, b: SynsetId) -> Result<SimilarityScore> {
    let (ia, ib) = same_pos(t, a, b)?;
    let verb = t.pos() == PartOfSpeech::Verb;
    let min_depth = |x: u32| {
        let d = t.depth_at(x).unwrap_or(0);
        if verb {
            d - 1
        } else {
            d
        }
    };

    let sb = t.set_at(ib);
    let common: Vec<u32> = t
        .set_at(ia)
        .iter()
        .copied()
        .filter(|x| sb.binary_search(x).is_ok())
        .collect();
    let deepest = common.iter().map(|&x| min_depth(x)).max();
    let best_depth = match (deepest, verb) {
        (Some(d), _) => d,
        (None, true) => 0,
        (None, false) => {
            return Err(Error::DegenerateInput(format!("no common subsumer for {a} and {b}")));
        }
    };
    let mut candidates: Vec<Target> = common
        .iter()
        .copied()
        .filter(|&x| min_depth(x) == best_depth)
        .map(Target::Node)
        .collect();
    if verb && best_depth == 0 {
        candidates.push(Target::SimulatedRoot);
    }
    // name order, with the simulated root sorting first
    let key = |c: &Target| match c {
        Target::SimulatedRoot => String::new(),
        Target::Node(x) => t.name_at(*x).to_string(),
    };
    candidates.sort_by_key(key);
    let subsumer = if candidates.contains(&Target::Node(ia)) {
        Target::Node(ia)
    } else {
        candidates[0]
    };

    let depth = match subsumer {
        Target::SimulatedRoot => 1,
        Target::Node(s) => t.max_depth_at(s) + 1,
    };
    let len = |x: u32| {
        reference_distance(t, x, subsumer)
            .map(|d| d + depth)
            .ok_or_else(|| Error::DegenerateInput(format!("no path from {} to subsumer", t.id_at(x))))
    };
    let (la, lb) = (len(ia)?, len(ib)?);
    let v = 2.0 * f64::from(depth) / f64::from(la + lb);
    Ok(SimilarityScore::new(Measure::Wp, v))
}

/// Dispatches to the measure under the chosen convention. HIS and
/// shortest path have a single convention.
pub fn similarity(
    t: &Taxonomy,
    measure: Measure,
    convention: Convention,
    params: &HisParams,
    a: SynsetId,
    b: SynsetId,
) -> Result<SimilarityScore> {
    match (measure, convention) {
        (Measure::His, _) => his_pair(t, a, b, params),
        (Measure::ShortestPath, _) => shortest_path_sim(t, a, b),
        (Measure::Lch, Convention::Formula) => lch(t, a, b),
        (Measure::Lch, Convention::Reference) => lch_reference(t, a, b),
        (Measure::Wp, Convention::Formula) => wp(t, a, b),
        (Measure::Wp, Convention::Reference) => wp_reference(t, a, b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairChoice {
    pub a: SynsetId,
    pub b: SynsetId,
    pub score: SimilarityScore,
}

/// Scores every synset combination of two words and keeps the best one.
/// Ties go to the lowest `(offset_a, offset_b)`. Combinations on which the
/// measure is undefined are skipped. `None` when either word has no synset
/// of that part of speech.
#[allow(clippy::too_many_arguments)]
pub fn max_pair(
    db: &Database,
    t: &Taxonomy,
    measure: Measure,
    convention: Convention,
    params: &HisParams,
    w1: &str,
    w2: &str,
    pos: PartOfSpeech,
) -> Result<Option<PairChoice>> {
    if t.pos() != pos {
        return Err(Error::CrossPos(t.pos(), pos));
    }
    let mut best: Option<PairChoice> = None;
    for &a in db.lookup_word(w1, pos) {
        for &b in db.lookup_word(w2, pos) {
            if !t.contains(a) || !t.contains(b) {
                continue;
            }
            let score = match similarity(t, measure, convention, params, a, b) {
                Ok(s) => s,
                Err(Error::DegenerateInput(_)) => continue,
                Err(e) => return Err(e),
            };
            let better = match &best {
                None => true,
                Some(cur) => {
                    score.value > cur.score.value
                        || (score.value == cur.score.value && (a.offset, b.offset) < (cur.a.offset, cur.b.offset))
                }
            };
            if better {
                best = Some(PairChoice { a, b, score });
            }
        }
    }
    Ok(best)
}

/// The word-pair protocol: the synset combination with maximal HIS.
pub fn max_his_pair(
    db: &Database,
    t_noun: &Taxonomy,
    t_verb: &Taxonomy,
    w1: &str,
    w2: &str,
    pos: PartOfSpeech,
) -> Result<Option<PairChoice>> {
    let t = match pos {
        PartOfSpeech::Noun => t_noun,
        PartOfSpeech::Verb => t_verb,
    };
    max_pair(
        db,
        t,
        Measure::His,
        Convention::Formula,
        &HisParams::default(),
        w1,
        w2,
        pos,
    )
}
