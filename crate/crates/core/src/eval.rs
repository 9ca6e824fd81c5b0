//! SimLex-999 correlation, spectrum neighbors, recovery ratios and CSV
//! dumps.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::similarity::{max_pair, similarity, Convention, HisParams, Measure};
use crate::spectrum::{his_from_spectra, spectrum_scalars};
use crate::taxonomy::Taxonomy;
use crate::trainer::SpectrumTable;
use crate::wordnet::{Database, PartOfSpeech, SynsetId};

#[derive(Debug, Clone, PartialEq)]
pub struct WordPair {
    pub word1: String,
    pub word2: String,
    pub pos: PartOfSpeech,
    pub human_score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimLex {
    pub pairs: Vec<WordPair>,
    pub adjective_rows: usize,
}

impl SimLex {
    pub fn count(&self, pos: PartOfSpeech) -> usize {
        self.pairs.iter().filter(|p| p.pos == pos).count()
    }
}

/// Reads the tab-separated SimLex-999 file. Columns are located by header
/// name; adjective rows are counted and dropped.
pub fn load_simlex(input: impl BufRead) -> Result<SimLex> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::MissingColumn("word1".into())),
    };
    let columns: Vec<&str> = header.trim_end_matches('\r').split('\t').collect();
    let find = |name: &str| {
        columns
            .iter()
            .position(|c| c.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let (w1, w2, pos_col, score_col) = (find("word1")?, find("word2")?, find("POS")?, find("SimLex999")?);
    let needed = w1.max(w2).max(pos_col).max(score_col);

    let mut out = SimLex::default();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::MalformedRow { line: line_no, reason };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() <= needed {
            return Err(bad(format!(
                "expected at least {} fields, found {}",
                needed + 1,
                fields.len()
            )));
        }
        let pos = match fields[pos_col].trim() {
            "N" => PartOfSpeech::Noun,
            "V" => PartOfSpeech::Verb,
            "A" => {
                out.adjective_rows += 1;
                continue;
            }
            other => return Err(bad(format!("unknown POS {other:?}"))),
        };
        let score: f64 = fields[score_col]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad score {:?}", fields[score_col])))?;
        if !(0.0..=10.0).contains(&score) {
            return Err(bad(format!("score {score} outside [0, 10]")));
        }
        let (a, b) = (fields[w1].trim(), fields[w2].trim());
        if a.is_empty() || b.is_empty() {
            return Err(bad("empty word".into()));
        }
        out.pairs.push(WordPair {
            word1: a.to_string(),
            word2: b.to_string(),
            pos,
            human_score: score,
        });
    }
    Ok(out)
}

/// 1-based ranks, ties sharing the average of their positions.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::DegenerateInput(format!("correlation of {} values", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput("correlation with a constant list".into()));
    }
    // sqrt(s * s) == s exactly, so identical inputs give exactly 1
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Product-moment correlation of average ranks.
pub fn spearman(human: &[f64], model: &[f64]) -> Result<f64> {
    if human.len() != model.len() {
        return Err(Error::DimensionMismatch {
            left: human.len(),
            right: model.len(),
        });
    }
    pearson(&ranks(human), &ranks(model))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationMode {
    #[default]
    Rank,
    Raw,
}

pub fn correlation(human: &[f64], model: &[f64], mode: CorrelationMode) -> Result<f64> {
    match mode {
        CorrelationMode::Rank => spearman(human, model),
        CorrelationMode::Raw => pearson(human, model),
    }
}

/// How the synset pair behind a word pair is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Each measure maximizes over synset combinations itself.
    #[default]
    OwnMax,
    /// The max-HIS combination is scored by every measure.
    HisSelected,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    pub selection: Selection,
    pub convention: Convention,
    pub mode: CorrelationMode,
    pub params: HisParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub measure: Measure,
    /// Correlations scaled by 100.
    pub rho_noun: f64,
    pub rho_verb: f64,
    pub rho_both: f64,
    pub evaluated_pairs: usize,
    pub skipped_pairs: usize,
}

/// The taxonomies a word-pair evaluation needs.
#[derive(Clone, Copy)]
pub struct Taxonomies<'a> {
    pub noun: &'a Taxonomy,
    pub verb: &'a Taxonomy,
}

impl<'a> Taxonomies<'a> {
    pub fn get(&self, pos: PartOfSpeech) -> &'a Taxonomy {
        match pos {
            PartOfSpeech::Noun => self.noun,
            PartOfSpeech::Verb => self.verb,
        }
    }
}

/// Model score for one word pair, or `None` when a word is missing.
pub fn score_word_pair(
    measure: Measure,
    pair: &WordPair,
    db: &Database,
    taxonomies: Taxonomies<'_>,
    options: &EvalOptions,
) -> Result<Option<f64>> {
    let t = taxonomies.get(pair.pos);
    let select = match options.selection {
        Selection::OwnMax => measure,
        Selection::HisSelected => Measure::His,
    };
    let Some(choice) = max_pair(
        db,
        t,
        select,
        options.convention,
        &options.params,
        &pair.word1,
        &pair.word2,
        pair.pos,
    )?
    else {
        return Ok(None);
    };
    if select == measure {
        return Ok(Some(choice.score.value));
    }
    Ok(Some(
        similarity(t, measure, options.convention, &options.params, choice.a, choice.b)?.value,
    ))
}

pub fn evaluate_measure(
    measure: Measure,
    pairs: &[WordPair],
    db: &Database,
    taxonomies: Taxonomies<'_>,
    options: &EvalOptions,
) -> Result<MeasureReport> {
    let mut groups: [(Vec<f64>, Vec<f64>); 2] = Default::default();
    let mut skipped = 0;
    for pair in pairs {
        match score_word_pair(measure, pair, db, taxonomies, options)? {
            Some(score) => {
                let g = &mut groups[usize::from(pair.pos == PartOfSpeech::Verb)];
                g.0.push(pair.human_score);
                g.1.push(score);
            }
            None => {
                log::info!(
                    "skipping {} / {} ({}): not in the database",
                    pair.word1,
                    pair.word2,
                    pair.pos
                );
                skipped += 1;
            }
        }
    }
    let rho = |h: &[f64], m: &[f64]| correlation(h, m, options.mode).map(|r| 100.0 * r);
    let human: Vec<f64> = groups.iter().flat_map(|g| g.0.iter().copied()).collect();
    let model: Vec<f64> = groups.iter().flat_map(|g| g.1.iter().copied()).collect();
    Ok(MeasureReport {
        measure,
        rho_noun: rho(&groups[0].0, &groups[0].1)?,
        rho_verb: rho(&groups[1].0, &groups[1].1)?,
        rho_both: rho(&human, &model)?,
        evaluated_pairs: human.len(),
        skipped_pairs: skipped,
    })
}

pub fn format_report_table(reports: &[MeasureReport]) -> String {
    let mut out = format!(
        "{:<14} {:>8} {:>8} {:>8} {:>8}\n",
        "measure", "noun", "verb", "both", "skipped"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<14} {:>8.2} {:>8.2} {:>8.2} {:>8}",
            r.measure.label(),
            r.rho_noun,
            r.rho_verb,
            r.rho_both,
            r.skipped_pairs
        );
    }
    out
}

pub fn report_csv(reports: &[MeasureReport]) -> String {
    let mut out = String::from("measure,rho_noun,rho_verb,rho_both,evaluated,skipped\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{:.4},{:.4},{:.4},{},{}",
            r.measure.key(),
            r.rho_noun,
            r.rho_verb,
            r.rho_both,
            r.evaluated_pairs,
            r.skipped_pairs
        );
    }
    out
}

/// The `k` rows with the highest spectrum HIS against `a`, excluding `a`.
/// Ties go to the smaller offset; rows on which HIS is undefined (both
/// spectra zero) are skipped.
pub fn neighbors(table: &SpectrumTable, a: SynsetId, k: usize, params: &HisParams) -> Result<Vec<(SynsetId, f64)>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let row = table.row_of(a)?;
    let va = table.row(row);
    let mut scored = Vec::with_capacity(table.len());
    for (i, &id) in table.ids().iter().enumerate() {
        if i == row {
            continue;
        }
        match his_from_spectra(va, table.row(i), params) {
            Ok(s) => scored.push((id, s.value)),
            Err(Error::DegenerateInput(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let by_rank = |x: &(SynsetId, f64), y: &(SynsetId, f64)| y.1.total_cmp(&x.1).then(x.0.offset.cmp(&y.0.offset));
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, by_rank);
        scored.truncate(k);
    }
    scored.sort_by(by_rank);
    Ok(scored)
}

/// `(|α-α̂| + |β-β̂| + |γ-γ̂|) / (α + β + γ)`.
pub fn recovery_ratio(table: &SpectrumTable, t: &Taxonomy, a: SynsetId, b: SynsetId) -> Result<f64> {
    let labels = t.his_scalars(a, b)?;
    let total = labels.total();
    if total == 0 {
        return Err(Error::DegenerateInput(format!("no hypernym labels for {a} and {b}")));
    }
    let s = spectrum_scalars(table.spectrum(a)?, table.spectrum(b)?)?;
    let err = (f64::from(labels.alpha) - s.alpha_hat).abs()
        + (f64::from(labels.beta) - s.beta_hat).abs()
        + (f64::from(labels.gamma) - s.gamma_hat).abs();
    Ok(err / f64::from(total))
}

pub const RECOVERY_THRESHOLDS: [f64; 4] = [0.05, 0.1, 0.2, 0.3];
pub const HISTOGRAM_WIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryStats {
    pub values: Vec<f64>,
    /// `(threshold, fraction of values strictly below it)`.
    pub cumulative: Vec<(f64, f64)>,
    pub histogram: Vec<HistogramBin>,
}

impl RecoveryStats {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len().max(1) as f64;
        let cumulative = RECOVERY_THRESHOLDS
            .iter()
            .map(|&th| (th, values.iter().filter(|&&r| r < th).count() as f64 / n))
            .collect();
        let max = values.iter().copied().fold(0.0, f64::max);
        let bins = (max / HISTOGRAM_WIDTH).floor() as usize + 1;
        let mut histogram: Vec<HistogramBin> = (0..bins)
            .map(|i| HistogramBin {
                start: i as f64 * HISTOGRAM_WIDTH,
                end: (i + 1) as f64 * HISTOGRAM_WIDTH,
                count: 0,
            })
            .collect();
        for &r in &values {
            let i = ((r / HISTOGRAM_WIDTH).floor() as usize).min(bins - 1);
            histogram[i].count += 1;
        }
        RecoveryStats {
            values,
            cumulative,
            histogram,
        }
    }

    pub fn median(&self) -> Option<f64> {
        if self.values.is_empty() {
            return None;
        }
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        Some(if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        })
    }

    pub fn fraction_below(&self, threshold: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().filter(|&&r| r < threshold).count() as f64 / self.values.len() as f64
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_start,bin_end,count\n");
        for b in &self.histogram {
            let _ = writeln!(out, "{:.2},{:.2},{}", b.start, b.end, b.count);
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!("pairs: {}\n", self.values.len());
        for (th, frac) in &self.cumulative {
            let _ = writeln!(out, "R < {th}: {:.2}%", 100.0 * frac);
        }
        if let Some(m) = self.median() {
            let _ = writeln!(out, "median R: {m:.4}");
        }
        out
    }
}

pub fn recovery_stats(table: &SpectrumTable, t: &Taxonomy, pairs: &[(SynsetId, SynsetId)]) -> Result<RecoveryStats> {
    let values = pairs
        .iter()
        .map(|&(a, b)| recovery_ratio(table, t, a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(RecoveryStats::from_values(values))
}

/// The max-HIS synset pairs behind the word pairs of one part of speech.
pub fn max_his_synset_pairs(
    pairs: &[WordPair],
    db: &Database,
    t: &Taxonomy,
    params: &HisParams,
) -> Result<Vec<(SynsetId, SynsetId)>> {
    let mut out = Vec::new();
    for p in pairs.iter().filter(|p| p.pos == t.pos()) {
        if let Some(c) = max_pair(
            db,
            t,
            Measure::His,
            Convention::Formula,
            params,
            &p.word1,
            &p.word2,
            p.pos,
        )? {
            out.push((c.a, c.b));
        }
    }
    Ok(out)
}

/// Fraction of entries with magnitude below 0.01.
pub fn sparsity(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().filter(|x| x.abs() < 0.01).count() as f64 / v.len() as f64
}

pub fn mean_sparsity(table: &SpectrumTable) -> f64 {
    if table.is_empty() {
        return 0.0;
    }
    (0..table.len()).map(|i| sparsity(table.row(i))).sum::<f64>() / table.len() as f64
}

/// A header row, then one row per synset: canonical name and its values.
pub fn dump_spectrum_csv(table: &SpectrumTable, ids: &[SynsetId]) -> Result<String> {
    let mut out = String::from("name");
    for d in 0..table.dim() {
        let _ = write!(out, ",v{d}");
    }
    out.push('\n');
    for &id in ids {
        let row = table.row_of(id)?;
        out.push_str(&table.names()[row]);
        for &v in table.row(row) {
            let _ = write!(out, ",{}", v as f32);
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{build_taxonomy, TaxonomyOptions};
    use crate::wordnet::parse_edge_list;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const HEADER: &str = "word1\tword2\tPOS\tSimLex999\tconc(w1)\n";

    #[test]
    fn simlex_parsing() {
        let text = format!("{HEADER}old\tnew\tA\t1.58\t2.72\nbook\ttext\tN\t6.35\t4.4\ngo\tleave\tV\t7.0\t1.2\n");
        let s = load_simlex(text.as_bytes()).unwrap();
        assert_eq!(s.adjective_rows, 1);
        assert_eq!(s.pairs.len(), 2);
        assert_eq!(
            s.pairs[0],
            WordPair {
                word1: "book".into(),
                word2: "text".into(),
                pos: PartOfSpeech::Noun,
                human_score: 6.35
            }
        );
        assert_eq!(s.count(PartOfSpeech::Verb), 1);
        assert!(load_simlex(HEADER.as_bytes()).unwrap().pairs.is_empty());
    }

    #[test]
    fn simlex_errors() {
        let err = load_simlex("word1\tword2\tPOS\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "SimLex999"));
        let err = load_simlex(format!("{HEADER}a\tb\tN\tlots\t1\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 2, .. }));
        let err = load_simlex(format!("{HEADER}a\tb\tN\t1\t1\na\tb\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 3, .. }));
        let err = load_simlex(format!("{HEADER}a\tb\tX\t1\t1\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn spearman_hand_cases() {
        let h = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&h, &h).unwrap(), 1.0);
        assert_eq!(spearman(&h, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!((spearman(&h, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!(matches!(spearman(&[1.0], &[1.0]), Err(Error::DegenerateInput(_))));
        assert!(matches!(spearman(&h, &[2.0; 4]), Err(Error::DegenerateInput(_))));
        assert!(matches!(spearman(&h, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn average_ranks() {
        assert_eq!(ranks(&[10.0, 20.0, 20.0, 5.0]), vec![2.0, 3.5, 3.5, 1.0]);
        assert_eq!(ranks(&[]), Vec::<f64>::new());
    }

    proptest! {
        #[test]
        fn monotone_invariance(xs in proptest::collection::vec(-100.0f64..100.0, 3..50), shift in -5.0f64..5.0) {
            let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
            prop_assume!(ranks(&xs).iter().any(|&r| r != ranks(&xs)[0]));
            prop_assume!(ranks(&ys).iter().any(|&r| r != ranks(&ys)[0]));
            let base = spearman(&xs, &ys).unwrap();
            let tx: Vec<f64> = xs.iter().map(|x| (x / 50.0).exp() + shift).collect();
            let ty: Vec<f64> = ys.iter().map(|y| y * y * y).collect();
            prop_assert!((spearman(&tx, &ty).unwrap() - base).abs() < 1e-12);
            prop_assert!((spearman(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
            let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
            prop_assert!((spearman(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    fn random_table(rows: usize, dim: usize, seed: u64) -> SpectrumTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids: Vec<SynsetId> = (0..rows as u32)
            .map(|i| SynsetId::new(PartOfSpeech::Noun, i + 1))
            .collect();
        let names = (0..rows).map(|i| format!("s{i}.n.01")).collect();
        let values = (0..rows * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        SpectrumTable::from_parts(PartOfSpeech::Noun, ids, names, dim, values).unwrap()
    }

    fn brute_force(table: &SpectrumTable, row: usize, k: usize) -> Vec<(SynsetId, f64)> {
        let p = HisParams::default();
        let mut all: Vec<(SynsetId, f64)> = (0..table.len())
            .filter(|&i| i != row)
            .map(|i| {
                (
                    table.ids()[i],
                    his_from_spectra(table.row(row), table.row(i), &p).unwrap().value,
                )
            })
            .collect();
        all.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
        all.truncate(k);
        all
    }

    #[test]
    fn neighbors_match_brute_force() {
        let table = random_table(200, 6, 3);
        for row in [0, 17, 199] {
            for k in [1, 3, 10, 500] {
                let got = neighbors(&table, table.ids()[row], k, &HisParams::default()).unwrap();
                assert_eq!(got, brute_force(&table, row, k));
            }
        }
    }

    #[test]
    fn identical_spectrum_ranks_first() {
        let mut table = random_table(10, 4, 9);
        let copy = table.row(2).to_vec();
        // scale so the shared mass exceeds 1
        let scaled: Vec<f64> = copy.iter().map(|x| 3.0 * x).collect();
        table.row_mut(2).copy_from_slice(&scaled);
        table.row_mut(7).copy_from_slice(&scaled);
        let got = neighbors(&table, table.ids()[2], 1, &HisParams::default()).unwrap();
        assert_eq!(got[0].0, table.ids()[7]);
        assert!(matches!(
            neighbors(&table, table.ids()[2], 0, &HisParams::default()),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            neighbors(&table, SynsetId::new(PartOfSpeech::Noun, 999), 1, &HisParams::default()),
            Err(Error::UnknownSynset(_))
        ));
    }

    fn tiny() -> (Database, Taxonomy) {
        let db = parse_edge_list("entity.n\na.n\nb.n\na.n -> entity.n\nb.n -> a.n\n").unwrap();
        let t = build_taxonomy(&db, PartOfSpeech::Noun, TaxonomyOptions::default()).unwrap();
        (db, t)
    }

    fn table_for(t: &Taxonomy, dim: usize, values: Vec<f64>) -> SpectrumTable {
        let names = t.ids().iter().map(|&id| t.name(id).unwrap().to_string()).collect();
        SpectrumTable::from_parts(t.pos(), t.ids().to_vec(), names, dim, values).unwrap()
    }

    #[test]
    fn recovery_ratio_cases() {
        let (db, t) = tiny();
        let a = db.resolve_name("a.n.01").unwrap();
        let b = db.resolve_name("b.n.01").unwrap();
        // labels for (a, b): S_a = {a, entity}, S_b = {b, a, entity} -> (0, 1, 2)
        assert_eq!(t.his_scalars(a, b).unwrap().total(), 3);
        let zero = table_for(&t, 2, vec![0.0; 6]);
        assert_eq!(recovery_ratio(&zero, &t, a, b).unwrap(), 1.0);
        // rows are in offset order: entity, a, b
        let exact = table_for(&t, 2, vec![0.0, 0.0, 2.0, 0.0, 2.0, 1.0]);
        assert_eq!(recovery_ratio(&exact, &t, a, b).unwrap(), 0.0);

        let stats = recovery_stats(&zero, &t, &[(a, b), (b, a)]).unwrap();
        assert!(stats.cumulative.iter().all(|&(_, f)| f == 0.0));
        assert_eq!(stats.median(), Some(1.0));
        let one = recovery_stats(&exact, &t, &[(a, b)]).unwrap();
        assert!(one.cumulative.iter().all(|&(_, f)| f == 1.0));
        assert_eq!(one.histogram.len(), 1);
    }

    #[test]
    fn histogram_bins() {
        let stats = RecoveryStats::from_values(vec![0.0, 0.04, 0.05, 0.12, 0.31]);
        let counts: Vec<usize> = stats.histogram.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![2, 1, 1, 0, 0, 0, 1]);
        let fr: Vec<f64> = stats.cumulative.iter().map(|c| c.1).collect();
        assert_eq!(fr, vec![0.4, 0.6, 0.8, 0.8]);
        assert!(fr.windows(2).all(|w| w[0] <= w[1]));
        assert!(stats
            .histogram_csv()
            .starts_with("bin_start,bin_end,count\n0.00,0.05,2\n"));
    }

    #[test]
    fn csv_dump_and_sparsity() {
        let (db, t) = tiny();
        let table = table_for(&t, 3, vec![0.0, 0.0, 0.0, 0.5, -0.25, 0.001, 1.0, 2.0, 3.0]);
        let ids = [
            db.resolve_name("a.n.01").unwrap(),
            db.resolve_name("entity.n.01").unwrap(),
        ];
        let csv = dump_spectrum_csv(&table, &ids).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "name,v0,v1,v2");
        assert_eq!(lines[1], "a.n.01,0.5,-0.25,0.001");
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
        assert_eq!(sparsity(table.row(0)), 1.0);
        assert!((sparsity(table.row(1)) - 1.0 / 3.0).abs() < 1e-15);
        assert!(dump_spectrum_csv(&table, &[SynsetId::new(PartOfSpeech::Noun, 77)]).is_err());
    }

    #[test]
    fn evaluate_on_fixture() {
        let text = "entity.n\nanimal.n\ndog.n\ncat.n\nrock.n\nrun.v\nwalk.v\nsprint.v\n\
animal.n -> entity.n\ndog.n -> animal.n\ncat.n -> animal.n\nrock.n -> entity.n\nsprint.v -> run.v\n";
        let db = parse_edge_list(text).unwrap();
        let noun = build_taxonomy(&db, PartOfSpeech::Noun, TaxonomyOptions::default()).unwrap();
        let verb = build_taxonomy(&db, PartOfSpeech::Verb, TaxonomyOptions::default()).unwrap();
        let ts = Taxonomies {
            noun: &noun,
            verb: &verb,
        };
        let simlex = format!(
            "{HEADER}dog\tcat\tN\t8\t0\ndog\trock\tN\t1\t0\ncat\tanimal\tN\t6\t0\nzebra\tdog\tN\t5\t0\n\
run\tsprint\tV\t9\t0\nrun\twalk\tV\t3\t0\n"
        );
        let pairs = load_simlex(simlex.as_bytes()).unwrap().pairs;
        for m in Measure::ALL {
            let r = evaluate_measure(m, &pairs, &db, ts, &EvalOptions::default()).unwrap();
            assert_eq!(r.skipped_pairs, 1);
            assert_eq!(r.evaluated_pairs, 5);
            assert!((-100.0..=100.0).contains(&r.rho_both));
            assert_eq!(r.rho_verb, 100.0, "{m}");
        }
        let single = &pairs[..1];
        assert!(matches!(
            evaluate_measure(Measure::His, single, &db, ts, &EvalOptions::default()),
            Err(Error::DegenerateInput(_))
        ));
    }
}
