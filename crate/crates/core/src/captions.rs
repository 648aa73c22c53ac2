//! Templated captions and the train / zero-shot text partition.
//!
//! A template pool file holds one JSON object per line with the keys
//! `id` (string), `pattern` (string using `{count}`, `{color}`, `{noun}`)
//! and `classes` (list of `parallel_lines`, `regular_polygon`,
//! `irregular_polygon`). Blank lines and lines starting with `#` are skipped.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{FigureClass, FigureSpec, Palette};

#[derive(Debug, Error)]
pub enum CaptionError {
    #[error("template '{id}' does not apply to {class}")]
    InapplicableTemplate { id: String, class: FigureClass },
    #[error("pool has {available} templates for {class}, {requested} requested")]
    PoolTooSmall {
        class: FigureClass,
        available: usize,
        requested: usize,
    },
    #[error("holdout ({class}, {n}) outside count range {min}..={max}")]
    InvalidHoldout {
        class: FigureClass,
        n: u32,
        min: u32,
        max: u32,
    },
    #[error("invalid template '{id}': {reason}")]
    InvalidTemplate { id: String, reason: String },
    #[error("template pool line {line}: {reason}")]
    PoolParse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CaptionError> = std::result::Result<T, E>;

const PLACEHOLDERS: [&str; 3] = ["count", "color", "noun"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionTemplate {
    pub id: String,
    pub pattern: String,
    pub classes: Vec<FigureClass>,
}

impl CaptionTemplate {
    pub fn new(id: impl Into<String>, pattern: impl Into<String>, classes: &[FigureClass]) -> Result<Self> {
        let t = CaptionTemplate {
            id: id.into(),
            pattern: pattern.into(),
            classes: classes.to_vec(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| CaptionError::InvalidTemplate {
            id: self.id.clone(),
            reason,
        };
        if self.pattern.trim().is_empty() {
            return Err(bad("empty pattern".into()));
        }
        if self.classes.is_empty() {
            return Err(bad("no applicable classes".into()));
        }
        let mut rest = self.pattern.as_str();
        while let Some(open) = rest.find('{') {
            let after = &rest[open + 1..];
            let close = after
                .find('}')
                .ok_or_else(|| bad("unclosed placeholder".into()))?;
            let name = &after[..close];
            if !PLACEHOLDERS.contains(&name) {
                return Err(bad(format!("unknown placeholder {{{name}}}")));
            }
            rest = &after[close + 1..];
        }
        if rest.contains('}') {
            return Err(bad("stray '}'".into()));
        }
        Ok(())
    }

    pub fn applies_to(&self, class: FigureClass) -> bool {
        self.classes.contains(&class)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caption {
    pub text: String,
    pub template_id: String,
    pub spec: FigureSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextSplit {
    pub train_texts: BTreeSet<String>,
    pub zeroshot_texts: BTreeSet<String>,
    pub holdout: Vec<(FigureClass, u32)>,
}

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

/// English words for 0..=99, decimal digits beyond.
pub fn number_word(n: u32) -> String {
    match n {
        0..=19 => ONES[n as usize].to_string(),
        20..=99 => {
            let (t, o) = (n / 10, n % 10);
            if o == 0 {
                TENS[t as usize].to_string()
            } else {
                format!("{}-{}", TENS[t as usize], ONES[o as usize])
            }
        }
        _ => n.to_string(),
    }
}

/// Inverse of [`number_word`].
pub fn parse_number_word(word: &str) -> Option<u32> {
    if let Some(i) = ONES.iter().position(|w| *w == word) {
        return Some(i as u32);
    }
    if let Some(i) = TENS.iter().position(|w| !w.is_empty() && *w == word) {
        return Some(i as u32 * 10);
    }
    if let Some((t, o)) = word.split_once('-') {
        let t = TENS.iter().position(|w| !w.is_empty() && *w == t)?;
        let o = ONES[1..10].iter().position(|w| *w == o)? + 1;
        return Some((t * 10 + o) as u32);
    }
    if !word.is_empty() && word.bytes().all(|b| b.is_ascii_digit()) && word.len() > 2 {
        return word.parse().ok();
    }
    None
}

/// Class-appropriate noun; shape names only where a standard word exists.
pub fn noun_for(class: FigureClass, n: u32) -> &'static str {
    match (class, n) {
        (FigureClass::ParallelLines, _) => "lines",
        (_, 3) => "triangle",
        (FigureClass::RegularPolygon, 4) => "square",
        (FigureClass::IrregularPolygon, 4) => "quadrilateral",
        (_, 5) => "pentagon",
        (_, 6) => "hexagon",
        (_, 7) => "heptagon",
        (_, 8) => "octagon",
        (_, 9) => "nonagon",
        (_, 10) => "decagon",
        (_, 12) => "dodecagon",
        _ => "polygon",
    }
}

pub fn render_caption(template: &CaptionTemplate, spec: &FigureSpec) -> Result<Caption> {
    if !template.applies_to(spec.class) {
        return Err(CaptionError::InapplicableTemplate {
            id: template.id.clone(),
            class: spec.class,
        });
    }
    let text = template
        .pattern
        .replace("{count}", &number_word(spec.n))
        .replace("{color}", &spec.color)
        .replace("{noun}", noun_for(spec.class, spec.n));
    Ok(Caption {
        text,
        template_id: template.id.clone(),
        spec: spec.clone(),
    })
}

/// `k` captions from `k` distinct applicable templates, deterministic per seed.
pub fn sample_captions(
    spec: &FigureSpec,
    pool: &[CaptionTemplate],
    seed: u64,
    k: usize,
) -> Result<Vec<Caption>> {
    let applicable: Vec<&CaptionTemplate> = pool.iter().filter(|t| t.applies_to(spec.class)).collect();
    if applicable.len() < k {
        return Err(CaptionError::PoolTooSmall {
            class: spec.class,
            available: applicable.len(),
            requested: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::index::sample(&mut rng, applicable.len(), k)
        .into_iter()
        .map(|i| render_caption(applicable[i], spec))
        .collect()
}

/// Enumerates every (template, class, n, color) caption. Texts produced by a
/// held-out (class, n) go to the zero-shot set; everything else that is not
/// also a zero-shot text goes to the train set.
pub fn build_text_splits(
    pool: &[CaptionTemplate],
    n_range: (u32, u32),
    palette: &Palette,
    holdout: &[(FigureClass, u32)],
) -> Result<TextSplit> {
    let (min, max) = n_range;
    for &(class, n) in holdout {
        if n < min || n > max {
            return Err(CaptionError::InvalidHoldout { class, n, min, max });
        }
    }
    let held: HashSet<(FigureClass, u32)> = holdout.iter().copied().collect();
    let mut train = BTreeSet::new();
    let mut zeroshot = BTreeSet::new();
    for class in FigureClass::ALL {
        for n in min..=max {
            for color in palette.colors() {
                let spec = FigureSpec::new(class, n, color.name.clone(), 0);
                for t in pool.iter().filter(|t| t.applies_to(class)) {
                    let text = render_caption(t, &spec)?.text;
                    if held.contains(&(class, n)) {
                        zeroshot.insert(text);
                    } else {
                        train.insert(text);
                    }
                }
            }
        }
    }
    train.retain(|t| !zeroshot.contains(t));
    Ok(TextSplit {
        train_texts: train,
        zeroshot_texts: zeroshot,
        holdout: holdout.to_vec(),
    })
}

/// Recovers (class, n, color) from a caption by number-word, palette-name and
/// class-keyword lookup. Assumes the vocabulary of the default pool: captions
/// of line figures say "lines", irregular polygons say "irregular".
pub fn parse_caption(text: &str, palette: &Palette) -> Option<(FigureClass, u32, String)> {
    let tokens: Vec<&str> = text
        .split(|c: char| c.is_whitespace() || c == ',' || c == '.')
        .filter(|t| !t.is_empty())
        .collect();
    let n = tokens.iter().find_map(|t| parse_number_word(t))?;
    let color = palette
        .colors()
        .iter()
        .find(|c| tokens.contains(&c.name.as_str()))?
        .name
        .clone();
    let class = if tokens.contains(&"lines") {
        FigureClass::ParallelLines
    } else if tokens.contains(&"irregular") {
        FigureClass::IrregularPolygon
    } else {
        FigureClass::RegularPolygon
    };
    Some((class, n, color))
}

/// Eight templates per class.
pub fn default_pool() -> Vec<CaptionTemplate> {
    use FigureClass::*;
    let lines = [
        "{count} {color} colored lines",
        "the image contains {count} lines that are {color} in color",
        "{count} parallel {color} lines",
        "there are {count} {color} lines drawn parallel to each other",
        "a picture of {count} {color} parallel lines",
        "{count} straight lines in {color}, all parallel",
        "{color} lines, {count} of them, running in parallel",
        "an image with {count} disconnected {color} lines",
    ];
    let regular = [
        "a regular {color} {noun} with {count} sides",
        "a {color} regular polygon with {count} equal sides",
        "the image contains a regular {noun} with {count} sides in {color}",
        "{count} {color} edges forming a regular {noun}",
        "a {color} {noun} with {count} equal sides and equal angles",
        "a regular polygon of {count} sides drawn in {color}",
        "an equilateral {color} shape with {count} sides",
        "a picture of a regular {color} {noun} having {count} corners",
    ];
    let irregular = [
        "an irregular {color} {noun} with {count} sides",
        "a {color} irregular polygon with {count} sides",
        "the image contains an irregular {noun} with {count} sides in {color}",
        "{count} {color} edges forming an irregular {noun}",
        "an irregular {color} shape with {count} unequal sides",
        "an irregular polygon of {count} sides drawn in {color}",
        "a {color} irregular {noun} having {count} corners",
        "a closed irregular {color} figure with {count} sides",
    ];
    let mut pool = Vec::new();
    for (prefix, class, patterns) in [
        ("lines", ParallelLines, &lines),
        ("regular", RegularPolygon, &regular),
        ("irregular", IrregularPolygon, &irregular),
    ] {
        for (i, p) in patterns.iter().enumerate() {
            pool.push(CaptionTemplate {
                id: format!("{prefix}-{i:02}"),
                pattern: p.to_string(),
                classes: vec![class],
            });
        }
    }
    pool
}

pub fn parse_template_pool(text: &str) -> Result<Vec<CaptionTemplate>> {
    let mut pool = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t: CaptionTemplate = serde_json::from_str(line).map_err(|e| CaptionError::PoolParse {
            line: i + 1,
            reason: e.to_string(),
        })?;
        t.validate()?;
        pool.push(t);
    }
    Ok(pool)
}

pub fn load_template_pool(path: &Path) -> Result<Vec<CaptionTemplate>> {
    parse_template_pool(&std::fs::read_to_string(path)?)
}

pub fn write_template_pool(pool: &[CaptionTemplate]) -> String {
    pool.iter()
        .map(|t| serde_json::to_string(t).expect("template serializes") + "\n")
        .collect()
}
