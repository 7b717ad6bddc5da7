//! Ordered tower systems: validated level words, incidence matrices, exact
//! heights and matrix products, the linear-recurrence constant, and the
//! gallery of named example families.
//!
//! A system is described by its level words: level `n` has `C(n)` towers and
//! tower `l` carries a word over the alphabet `{1..C(n-1)}` telling which
//! tower of the previous level each stacked block comes from, in order.
//! Validation enforces positivity (every letter occurs in every word) and the
//! base-nesting rule (every word at level >= 2 starts with letter 1).

use crate::matrix::BigMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// A word over the previous level's tower alphabet; letters are 1-based.
pub type Word = Vec<u32>;

/// The words of one level, as in the system description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelWords {
    pub level: u32,
    pub words: Vec<Word>,
}

/// Exact height vector of one level.
pub type HeightVector = Vec<BigInt>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("EmptyLevel: level {level} has no words or an empty word")]
    EmptyLevel { level: u32 },
    #[error("LetterOutOfRange: level {level}, tower {tower}: letter {letter} not in 1..={alphabet}")]
    LetterOutOfRange {
        level: u32,
        tower: usize,
        letter: u32,
        alphabet: u32,
    },
    #[error("MissingLetter: level {level}, tower {tower}: letter {letter} never occurs")]
    MissingLetter {
        level: u32,
        tower: usize,
        letter: u32,
    },
    #[error("FirstLetterNotOne: level {level}, tower {tower} must start with letter 1")]
    FirstLetterNotOne { level: u32, tower: usize },
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("LevelUnavailable: level {0} is beyond the finite description")]
    LevelUnavailable(u32),
    #[error("BadRange: need n > m >= 1, got n={n}, m={m}")]
    BadRange { n: u32, m: u32 },
    #[error("BadParameter: {0}")]
    BadParameter(String),
    #[error("NotSerializable: generator-backed systems have no finite description")]
    NotSerializable,
}

impl ModelError {
    /// Stable error code for CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::EmptyLevel { .. } => "EmptyLevel",
            ModelError::LetterOutOfRange { .. } => "LetterOutOfRange",
            ModelError::MissingLetter { .. } => "MissingLetter",
            ModelError::FirstLetterNotOne { .. } => "FirstLetterNotOne",
            ModelError::DimensionMismatch(_) => "DimensionMismatch",
            ModelError::LevelUnavailable(_) => "LevelUnavailable",
            ModelError::BadRange { .. } => "BadRange",
            ModelError::BadParameter(_) => "BadParameter",
            ModelError::NotSerializable => "NotSerializable",
        }
    }
}

/// Periodic tail: `words(n) = words(n - period)` for `n > from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tail {
    pub from: u32,
    pub period: u32,
}

/// On-disk description of a system. `levels` and `gallery` are mutually
/// exclusive; a validated system always echoes the explicit-levels form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDescription {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<Vec<Word>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Tail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gallery: Option<GallerySpec>,
}

/// Named example families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum GallerySpec {
    Odometer { base: u64 },
    Fibonacci,
    Stationary { matrix: Vec<Vec<u64>>, h1: Vec<u64> },
    Example2 { l: u64, k: u64, h1: Vec<u64> },
    Det1 { matrices: Vec<Vec<Vec<u64>>> },
    Commuting { pattern: String },
    Rank1Interleaved { period: u32 },
}

enum LevelSource {
    Finite {
        levels: Vec<Vec<Word>>,
        tail: Option<Tail>,
    },
    Generator(Arc<dyn Fn(u32) -> Vec<Word> + Send + Sync>),
}

#[derive(Default)]
struct LevelCache {
    /// words[i] holds the words of level i+1
    words: Vec<Vec<Word>>,
    /// matrices[i] holds M(i+1)
    matrices: Vec<BigMatrix>,
    /// heights[i] holds H(i); heights[0] = [1]
    heights: Vec<HeightVector>,
}

/// A validated tower system. Immutable after construction; the level cache
/// fills idempotently, so shared references are safe across threads.
pub struct TowerSystem {
    name: String,
    source: LevelSource,
    cache: Mutex<LevelCache>,
}

impl std::fmt::Debug for TowerSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TowerSystem").field("name", &self.name).finish()
    }
}

fn check_level(level: u32, words: &[Word], prev_c: u32) -> Result<(), ModelError> {
    if words.is_empty() {
        return Err(ModelError::EmptyLevel { level });
    }
    for (t, w) in words.iter().enumerate() {
        let tower = t + 1;
        if w.is_empty() {
            return Err(ModelError::EmptyLevel { level });
        }
        for &letter in w {
            if letter < 1 || letter > prev_c {
                return Err(ModelError::LetterOutOfRange {
                    level,
                    tower,
                    letter,
                    alphabet: prev_c,
                });
            }
        }
        if level >= 2 && w[0] != 1 {
            return Err(ModelError::FirstLetterNotOne { level, tower });
        }
        for letter in 1..=prev_c {
            if !w.contains(&letter) {
                return Err(ModelError::MissingLetter { level, tower, letter });
            }
        }
        // with a one-letter alphabet a length-1 word would freeze the heights
        if level >= 2 && prev_c == 1 && w.len() < 2 {
            return Err(ModelError::BadParameter(format!(
                "level {level}: single-tower level needs words of length >= 2 so heights grow"
            )));
        }
    }
    Ok(())
}

/// Incidence matrix of one level: entry (l,k) counts occurrences of letter k
/// in word l. Expects validated words (every letter present in every word).
pub fn matrices_from_words(words: &LevelWords) -> BigMatrix {
    let alphabet = words
        .words
        .iter()
        .flat_map(|w| w.iter().copied())
        .max()
        .expect("nonempty words") as usize;
    let rows: Vec<Vec<u64>> = words
        .words
        .iter()
        .map(|w| {
            let mut counts = vec![0u64; alphabet];
            for &letter in w {
                counts[(letter - 1) as usize] += 1;
            }
            counts
        })
        .collect();
    BigMatrix::from_rows_u64(&rows)
}

/// Validate a raw description and build the system. The first failing axiom
/// is reported: positivity as `MissingLetter`, base nesting as
/// `FirstLetterNotOne`, shape errors as `DimensionMismatch`.
pub fn validate_system(desc: &SystemDescription) -> Result<TowerSystem, ModelError> {
    if let Some(g) = &desc.gallery {
        if !desc.levels.is_empty() {
            return Err(ModelError::BadParameter(
                "levels and gallery are mutually exclusive".into(),
            ));
        }
        let mut sys = gallery(g)?;
        if !desc.name.is_empty() {
            sys.name = desc.name.clone();
        }
        return Ok(sys);
    }
    if desc.levels.is_empty() {
        return Err(ModelError::EmptyLevel { level: 1 });
    }
    let mut prev_c = 1u32;
    for (i, words) in desc.levels.iter().enumerate() {
        let level = (i + 1) as u32;
        check_level(level, words, prev_c)?;
        prev_c = words.len() as u32;
    }
    if let Some(tail) = desc.tail {
        if tail.period == 0 || tail.from == 0 {
            return Err(ModelError::BadParameter(
                "tail needs from >= 1 and period >= 1".into(),
            ));
        }
        if tail.from as usize != desc.levels.len() {
            return Err(ModelError::DimensionMismatch(format!(
                "tail.from = {} must equal the number of explicit levels ({})",
                tail.from,
                desc.levels.len()
            )));
        }
        if tail.period > tail.from {
            return Err(ModelError::DimensionMismatch(format!(
                "tail.period = {} exceeds tail.from = {}",
                tail.period, tail.from
            )));
        }
        let c_from = desc.levels[tail.from as usize - 1].len();
        let c_anchor = if tail.from == tail.period {
            1 // wraps to level 0
        } else {
            desc.levels[(tail.from - tail.period) as usize - 1].len()
        };
        if c_from != c_anchor {
            return Err(ModelError::DimensionMismatch(format!(
                "tail wrap: C({}) = {} but C({}) = {}",
                tail.from,
                c_from,
                tail.from - tail.period,
                c_anchor
            )));
        }
    }
    Ok(TowerSystem {
        name: desc.name.clone(),
        source: LevelSource::Finite {
            levels: desc.levels.clone(),
            tail: desc.tail,
        },
        cache: Mutex::new(LevelCache::default()),
    })
}

impl TowerSystem {
    /// A system whose level words come from a pure function of the level.
    /// Levels are validated as they are materialized.
    pub fn from_generator<F>(name: &str, f: F) -> TowerSystem
    where
        F: Fn(u32) -> Vec<Word> + Send + Sync + 'static,
    {
        TowerSystem {
            name: name.to_string(),
            source: LevelSource::Generator(Arc::new(f)),
            cache: Mutex::new(LevelCache::default()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of explicit levels when the description is finite without a
    /// tail; `None` means unbounded depth.
    pub fn depth_available(&self) -> Option<u32> {
        match &self.source {
            LevelSource::Finite { levels, tail: None } => Some(levels.len() as u32),
            _ => None,
        }
    }

    pub fn tail(&self) -> Option<Tail> {
        match &self.source {
            LevelSource::Finite { tail, .. } => *tail,
            LevelSource::Generator(_) => None,
        }
    }

    fn raw_words(&self, level: u32) -> Result<Vec<Word>, ModelError> {
        match &self.source {
            LevelSource::Finite { levels, tail } => {
                let mut n = level;
                if n as usize > levels.len() {
                    match tail {
                        Some(t) => {
                            while n > t.from {
                                n -= t.period;
                            }
                        }
                        None => return Err(ModelError::LevelUnavailable(level)),
                    }
                }
                Ok(levels[n as usize - 1].clone())
            }
            LevelSource::Generator(f) => Ok(f(level)),
        }
    }

    fn materialize(&self, cache: &mut LevelCache, upto: u32) -> Result<(), ModelError> {
        if cache.heights.is_empty() {
            cache.heights.push(vec![BigInt::one()]);
        }
        while (cache.words.len() as u32) < upto {
            let level = cache.words.len() as u32 + 1;
            let words = self.raw_words(level)?;
            let prev_c = cache.heights[level as usize - 1].len() as u32;
            check_level(level, &words, prev_c)?;
            let m = matrices_from_words(&LevelWords {
                level,
                words: words.clone(),
            });
            if m.cols() != prev_c as usize {
                return Err(ModelError::DimensionMismatch(format!(
                    "level {level}: matrix has {} columns, previous level has {} towers",
                    m.cols(),
                    prev_c
                )));
            }
            let h = m.mul_vec(&cache.heights[level as usize - 1]);
            cache.words.push(words);
            cache.matrices.push(m);
            cache.heights.push(h);
        }
        Ok(())
    }

    /// Words of level n (n >= 1).
    pub fn words_at(&self, n: u32) -> Result<LevelWords, ModelError> {
        assert!(n >= 1, "levels start at 1");
        let mut cache = self.cache.lock().unwrap();
        self.materialize(&mut cache, n)?;
        Ok(LevelWords {
            level: n,
            words: cache.words[n as usize - 1].clone(),
        })
    }

    /// Incidence matrix M(n) (n >= 1).
    pub fn matrix_at(&self, n: u32) -> Result<BigMatrix, ModelError> {
        assert!(n >= 1, "levels start at 1");
        let mut cache = self.cache.lock().unwrap();
        self.materialize(&mut cache, n)?;
        Ok(cache.matrices[n as usize - 1].clone())
    }

    /// Number of towers C(n) (n >= 0).
    pub fn towers_at(&self, n: u32) -> Result<usize, ModelError> {
        if n == 0 {
            return Ok(1);
        }
        let mut cache = self.cache.lock().unwrap();
        self.materialize(&mut cache, n)?;
        Ok(cache.words[n as usize - 1].len())
    }

    /// Exact height vector H(n) (n >= 0; H(0) = [1]).
    pub fn heights(&self, n: u32) -> Result<HeightVector, ModelError> {
        let mut cache = self.cache.lock().unwrap();
        self.materialize(&mut cache, n)?;
        Ok(cache.heights[n as usize].clone())
    }

    /// Exact product P(n,m) = M(n) M(n-1) ... M(m+1); requires n > m >= 1.
    pub fn product(&self, n: u32, m: u32) -> Result<BigMatrix, ModelError> {
        if m < 1 || n <= m {
            return Err(ModelError::BadRange { n, m });
        }
        let mut cache = self.cache.lock().unwrap();
        self.materialize(&mut cache, n)?;
        let mut p = cache.matrices[m as usize].clone(); // M(m+1)
        for level in (m + 2)..=n {
            p = cache.matrices[level as usize - 1].mul(&p);
        }
        Ok(p)
    }

    /// Bit length of the largest height at level n.
    pub fn max_height_bits(&self, n: u32) -> Result<u64, ModelError> {
        let h = self.heights(n)?;
        Ok(h.iter().map(|x| x.bits()).max().unwrap_or(1))
    }

    /// Largest ratio h_l(n)/h_k(n-1) over 2 <= n <= depth, as an exact
    /// rational, together with the internal-consistency checks it implies.
    pub fn lr_constant(&self, depth: u32) -> Result<LrReport, ModelError> {
        if depth < 2 {
            return Err(ModelError::BadParameter("lr constant needs depth >= 2".into()));
        }
        let mut best: Option<(BigRational, (u32, usize, usize))> = None;
        for n in 2..=depth {
            let hn = self.heights(n)?;
            let hprev = self.heights(n - 1)?;
            for (l, hl) in hn.iter().enumerate() {
                for (k, hk) in hprev.iter().enumerate() {
                    let ratio = BigRational::new(hl.clone(), hk.clone());
                    let better = match &best {
                        None => true,
                        Some((b, _)) => ratio > *b,
                    };
                    if better {
                        best = Some((ratio, (n, l + 1, k + 1)));
                    }
                }
            }
        }
        let (l_hat, attained_at) = best.expect("depth >= 2 materializes at least one level pair");
        let ceil_l = l_hat.ceil().to_integer();
        let mut violations = Vec::new();
        // Lemma-2-style checks; the tower-count bound needs the next level's
        // ratios, so the last materialized level is excluded from it.
        for n in 1..depth {
            let c = BigInt::from(self.towers_at(n)?);
            if c > ceil_l {
                violations.push(format!("tower count C({n}) = {c} exceeds ceil(L) = {ceil_l}"));
            }
        }
        for n in 1..=depth {
            let h = self.heights(n)?;
            let hmax = h.iter().max().unwrap();
            let hmin = h.iter().min().unwrap();
            // hmax/hmin <= l_hat, cross-multiplied
            if BigRational::new(hmax.clone(), hmin.clone()) > l_hat {
                violations.push(format!("same-level ratio at level {n} exceeds L"));
            }
        }
        Ok(LrReport {
            depth,
            l_hat,
            attained_at,
            violations,
        })
    }

    /// Normalized finite description; errors for generator-backed systems.
    pub fn to_description(&self) -> Result<SystemDescription, ModelError> {
        match &self.source {
            LevelSource::Finite { levels, tail } => Ok(SystemDescription {
                name: self.name.clone(),
                levels: levels.clone(),
                tail: *tail,
                gallery: None,
            }),
            LevelSource::Generator(_) => Err(ModelError::NotSerializable),
        }
    }

    /// Deterministic JSON form of the normalized description.
    pub fn to_json(&self) -> Result<String, ModelError> {
        let desc = self.to_description()?;
        let mut s = serde_json::to_string_pretty(&desc).expect("description serializes");
        s.push('\n');
        Ok(s)
    }
}

/// Report from [`TowerSystem::lr_constant`]. `l_hat` is a lower estimate of
/// any valid recurrence constant; pad it before using it as a denominator
/// bound.
#[derive(Debug, Clone)]
pub struct LrReport {
    pub depth: u32,
    pub l_hat: BigRational,
    /// (n, l, k): the ratio h_l(n)/h_k(n-1) attaining the maximum.
    pub attained_at: (u32, usize, usize),
    pub violations: Vec<String>,
}

impl LrReport {
    /// Default pad factor 21/20 (= 1.05).
    pub fn padded(&self) -> BigRational {
        &self.l_hat * BigRational::new(BigInt::from(21), BigInt::from(20))
    }

    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn l_hat_f64(&self) -> f64 {
        self.l_hat.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Canonical word for one matrix row: letter k repeated `row[k]` times.
/// Valid whenever the row is positive, since the word then starts with 1.
pub fn canonical_word(row: &[u64]) -> Word {
    let mut w = Vec::new();
    for (k, &count) in row.iter().enumerate() {
        for _ in 0..count {
            w.push(k as u32 + 1);
        }
    }
    w
}

/// Build the explicit-levels description for matrices M(2), M(3), ... with
/// declared H(1), using canonical word order.
pub fn description_from_matrices(
    name: &str,
    h1: &[u64],
    matrices: &[Vec<Vec<u64>>],
    tail: Option<Tail>,
) -> Result<SystemDescription, ModelError> {
    if h1.is_empty() || h1.iter().any(|&h| h == 0) {
        return Err(ModelError::BadParameter("H(1) must be positive".into()));
    }
    let mut levels: Vec<Vec<Word>> = Vec::with_capacity(matrices.len() + 1);
    levels.push(h1.iter().map(|&h| vec![1u32; h as usize]).collect());
    let mut prev_c = h1.len();
    for (i, m) in matrices.iter().enumerate() {
        if m.is_empty() || m.iter().any(|row| row.len() != prev_c) {
            return Err(ModelError::DimensionMismatch(format!(
                "matrix for level {} must have {} columns",
                i + 2,
                prev_c
            )));
        }
        if m.iter().flatten().any(|&e| e == 0) {
            return Err(ModelError::BadParameter(format!(
                "matrix for level {} must have positive entries",
                i + 2
            )));
        }
        levels.push(m.iter().map(|row| canonical_word(row)).collect());
        prev_c = m.len();
    }
    Ok(SystemDescription {
        name: name.to_string(),
        levels,
        tail,
        gallery: None,
    })
}

const COMMUTING_A: [[u64; 2]; 2] = [[5, 2], [2, 3]];
const COMMUTING_B: [[u64; 2]; 2] = [[2, 1], [1, 1]];

/// The pair of commuting matrices used by the commuting family.
pub fn commuting_pair() -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    (
        COMMUTING_A.iter().map(|r| r.to_vec()).collect(),
        COMMUTING_B.iter().map(|r| r.to_vec()).collect(),
    )
}

/// Build a validated gallery system with canonical word order.
pub fn gallery(spec: &GallerySpec) -> Result<TowerSystem, ModelError> {
    let desc = match spec {
        GallerySpec::Odometer { base } => {
            if *base < 2 {
                return Err(ModelError::BadParameter(format!(
                    "odometer base must be >= 2, got {base}"
                )));
            }
            description_from_matrices(
                &format!("odometer:{base}"),
                &[1],
                &[vec![vec![*base]]],
                Some(Tail { from: 2, period: 1 }),
            )?
        }
        GallerySpec::Fibonacci => description_from_matrices(
            "fibonacci",
            &[1, 1],
            &[vec![vec![2, 1], vec![1, 1]]],
            Some(Tail { from: 2, period: 1 }),
        )?,
        GallerySpec::Stationary { matrix, h1 } => {
            if matrix.len() != h1.len() {
                return Err(ModelError::BadParameter(
                    "stationary matrix must be square with H(1) of matching length".into(),
                ));
            }
            description_from_matrices(
                "stationary",
                h1,
                &[matrix.clone()],
                Some(Tail { from: 2, period: 1 }),
            )?
        }
        GallerySpec::Example2 { l, k, h1 } => {
            if *l < 2 || *k < 2 {
                return Err(ModelError::BadParameter(format!(
                    "example2 needs l >= 2 and k >= 2 (got l={l}, k={k}); smaller values zero out matrix entries"
                )));
            }
            if h1.len() != 3 {
                return Err(ModelError::BadParameter("example2 needs H(1) of length 3".into()));
            }
            let m = vec![
                vec![*l, *k - 1, 1],
                vec![*l - 1, *k, 1],
                vec![*l - 1, *k - 1, 1],
            ];
            description_from_matrices(
                &format!("example2:{l},{k}"),
                h1,
                &[m],
                Some(Tail { from: 2, period: 1 }),
            )?
        }
        GallerySpec::Det1 { matrices } => {
            if matrices.is_empty() {
                return Err(ModelError::BadParameter("det1 needs at least one matrix".into()));
            }
            for m in matrices {
                if m.len() != 2 || m.iter().any(|r| r.len() != 2) {
                    return Err(ModelError::BadParameter("det1 matrices must be 2x2".into()));
                }
                let det = (m[0][0] * m[1][1]) as i128 - (m[0][1] * m[1][0]) as i128;
                if det != 1 && det != -1 {
                    return Err(ModelError::BadParameter(format!(
                        "det1 matrix has determinant {det}, need +-1"
                    )));
                }
            }
            let period = matrices.len() as u32;
            description_from_matrices(
                "det1",
                &[1, 1],
                matrices,
                Some(Tail {
                    from: period + 1,
                    period,
                }),
            )?
        }
        GallerySpec::Commuting { pattern } => {
            if pattern.is_empty() || !pattern.chars().all(|c| c == 'A' || c == 'B') {
                return Err(ModelError::BadParameter(
                    "commuting pattern must be a nonempty string over {A, B}".into(),
                ));
            }
            let (a, b) = commuting_pair();
            let mats: Vec<Vec<Vec<u64>>> = pattern
                .chars()
                .map(|c| if c == 'A' { a.clone() } else { b.clone() })
                .collect();
            let period = pattern.len() as u32;
            description_from_matrices(
                &format!("commuting:{pattern}"),
                &[1, 1],
                &mats,
                Some(Tail {
                    from: period + 1,
                    period,
                }),
            )?
        }
        GallerySpec::Rank1Interleaved { period } => {
            if *period < 1 {
                return Err(ModelError::BadParameter("rank1-interleaved needs period >= 1".into()));
            }
            let grow = vec![vec![2u64, 1], vec![1, 1]];
            let flat = vec![vec![1u64, 1], vec![1, 1]];
            let mats: Vec<Vec<Vec<u64>>> = (0..*period)
                .map(|i| if i + 1 == *period { flat.clone() } else { grow.clone() })
                .collect();
            description_from_matrices(
                &format!("rank1:{period}"),
                &[1, 1],
                &mats,
                Some(Tail {
                    from: period + 1,
                    period: *period,
                }),
            )?
        }
    };
    validate_system(&desc)
}

/// Parse the CLI shorthand `name[:param,param,...]`.
pub fn parse_gallery_shorthand(s: &str) -> Result<GallerySpec, ModelError> {
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (s, None),
    };
    let nums = |r: &str| -> Result<Vec<u64>, ModelError> {
        r.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| ModelError::BadParameter(format!("bad gallery parameter '{x}'")))
            })
            .collect()
    };
    match name {
        "odometer" => {
            let r = rest.ok_or_else(|| ModelError::BadParameter("odometer needs a base".into()))?;
            let v = nums(r)?;
            if v.len() != 1 {
                return Err(ModelError::BadParameter("odometer takes one parameter".into()));
            }
            Ok(GallerySpec::Odometer { base: v[0] })
        }
        "fibonacci" => Ok(GallerySpec::Fibonacci),
        "stationary" => {
            let r = rest.ok_or_else(|| {
                ModelError::BadParameter("stationary needs a row-major square matrix".into())
            })?;
            let v = nums(r)?;
            let dim = (v.len() as f64).sqrt() as usize;
            if dim * dim != v.len() || dim == 0 {
                return Err(ModelError::BadParameter(
                    "stationary shorthand takes a square number of entries".into(),
                ));
            }
            let matrix: Vec<Vec<u64>> = v.chunks(dim).map(|c| c.to_vec()).collect();
            Ok(GallerySpec::Stationary {
                matrix,
                h1: vec![1; dim],
            })
        }
        "example2" => {
            let r = rest.ok_or_else(|| ModelError::BadParameter("example2 needs l,k".into()))?;
            let v = nums(r)?;
            match v.len() {
                2 => Ok(GallerySpec::Example2 {
                    l: v[0],
                    k: v[1],
                    h1: vec![2, 1, 1],
                }),
                5 => Ok(GallerySpec::Example2 {
                    l: v[0],
                    k: v[1],
                    h1: v[2..].to_vec(),
                }),
                _ => Err(ModelError::BadParameter(
                    "example2 takes l,k or l,k,h1,h2,h3".into(),
                )),
            }
        }
        "det1" => {
            let r = rest.ok_or_else(|| {
                ModelError::BadParameter("det1 needs matrices a,b,c,d;a,b,c,d;...".into())
            })?;
            let matrices: Result<Vec<Vec<Vec<u64>>>, ModelError> = r
                .split(';')
                .map(|m| {
                    let v = nums(m)?;
                    if v.len() != 4 {
                        return Err(ModelError::BadParameter(
                            "each det1 matrix takes four entries".into(),
                        ));
                    }
                    Ok(vec![vec![v[0], v[1]], vec![v[2], v[3]]])
                })
                .collect();
            Ok(GallerySpec::Det1 { matrices: matrices? })
        }
        "commuting" => {
            let r = rest.unwrap_or("AB");
            Ok(GallerySpec::Commuting {
                pattern: r.to_string(),
            })
        }
        "rank1" | "rank1-interleaved" => {
            let r = rest.ok_or_else(|| ModelError::BadParameter("rank1 needs a period".into()))?;
            let v = nums(r)?;
            if v.len() != 1 {
                return Err(ModelError::BadParameter("rank1 takes one parameter".into()));
            }
            Ok(GallerySpec::Rank1Interleaved {
                period: v[0] as u32,
            })
        }
        _ => Err(ModelError::BadParameter(format!("unknown gallery family '{name}'"))),
    }
}

/// gcd of the heights at one level.
pub fn heights_gcd(h: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for x in h {
        g = g.gcd(&x.abs());
    }
    g
}
