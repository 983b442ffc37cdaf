use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::DatasetError;
use crate::rng::SeededRng;

/// `(train, val, test)`.
pub const DEFAULT_FRACTIONS: (f64, f64, f64) = (0.80, 0.15, 0.05);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// How split sizes are derived from the fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// `test = ceil(f_test N)` first; the rest is divided train:val in the
    /// ratio `f_train : f_val`, train getting `round(rest f_train / (f_train + f_val))`.
    #[default]
    HoldoutFirst,
    /// `train = round(f_train N)`, `val = round(f_val N)`, test takes the rest.
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SplitManifestFile", try_from = "SplitManifestFile")]
pub struct SplitManifest {
    pub seed: u64,
    pub fractions: (f64, f64, f64),
    pub mode: SplitMode,
    pub train_image_ids: Vec<String>,
    pub val_image_ids: Vec<String>,
    pub test_image_ids: Vec<String>,
}

impl SplitManifest {
    pub fn split_of(&self, image_id: &str) -> Option<Split> {
        let has = |v: &Vec<String>| v.iter().any(|s| s == image_id);
        if has(&self.train_image_ids) {
            Some(Split::Train)
        } else if has(&self.val_image_ids) {
            Some(Split::Val)
        } else if has(&self.test_image_ids) {
            Some(Split::Test)
        } else {
            None
        }
    }

    pub fn assignments(&self) -> BTreeMap<String, Split> {
        let mut m = BTreeMap::new();
        for (ids, s) in [
            (&self.train_image_ids, Split::Train),
            (&self.val_image_ids, Split::Val),
            (&self.test_image_ids, Split::Test),
        ] {
            for id in ids {
                m.insert(id.clone(), s);
            }
        }
        m
    }
}

#[derive(Serialize, Deserialize)]
struct Fractions {
    train: f64,
    val: f64,
    test: f64,
}

#[derive(Serialize, Deserialize)]
struct SplitManifestFile {
    seed: u64,
    fractions: Fractions,
    #[serde(default)]
    mode: SplitMode,
    assignments: BTreeMap<String, Split>,
}

impl From<SplitManifest> for SplitManifestFile {
    fn from(m: SplitManifest) -> Self {
        Self {
            seed: m.seed,
            fractions: Fractions {
                train: m.fractions.0,
                val: m.fractions.1,
                test: m.fractions.2,
            },
            mode: m.mode,
            assignments: m.assignments(),
        }
    }
}

impl TryFrom<SplitManifestFile> for SplitManifest {
    type Error = String;
    fn try_from(f: SplitManifestFile) -> Result<Self, String> {
        let mut m = SplitManifest {
            seed: f.seed,
            fractions: (f.fractions.train, f.fractions.val, f.fractions.test),
            mode: f.mode,
            train_image_ids: Vec::new(),
            val_image_ids: Vec::new(),
            test_image_ids: Vec::new(),
        };
        for (id, s) in f.assignments {
            match s {
                Split::Train => m.train_image_ids.push(id),
                Split::Val => m.val_image_ids.push(id),
                Split::Test => m.test_image_ids.push(id),
            }
        }
        Ok(m)
    }
}

/// `(train, val, test)` counts for `n` images.
pub fn split_sizes(n: usize, fractions: (f64, f64, f64), mode: SplitMode) -> (usize, usize, usize) {
    let (ftr, fva, fte) = fractions;
    let nf = n as f64;
    // guard against 0.05 * 100 = 5.000000000000001 style round-off
    let (mut train, mut val, mut test) = match mode {
        SplitMode::HoldoutFirst => {
            let test = ((fte * nf - 1e-9).ceil().max(0.0) as usize).min(n);
            let rest = n - test;
            let train = if ftr + fva > 0.0 {
                ((rest as f64 * ftr / (ftr + fva)).round() as usize).min(rest)
            } else {
                0
            };
            (train, rest - train, test)
        }
        SplitMode::Flat => {
            let train = ((ftr * nf).round() as usize).min(n);
            let val = ((fva * nf).round() as usize).min(n - train);
            (train, val, n - train - val)
        }
    };
    // keep every requested split non-empty when there are images to spare
    for _ in 0..2 {
        if val == 0 && fva > 0.0 && train > 1 {
            train -= 1;
            val += 1;
        }
        if train == 0 && ftr > 0.0 && val > 1 {
            val -= 1;
            train += 1;
        }
        if test == 0 && fte > 0.0 && train > 1 {
            train -= 1;
            test += 1;
        }
    }
    (train, val, test)
}

/// Seeded image-level split. Ids are sorted, shuffled with Fisher-Yates
/// and dealt out test first, then train, then val.
pub fn split_images(
    image_ids: &[String],
    seed: u64,
    fractions: (f64, f64, f64),
    mode: SplitMode,
) -> Result<SplitManifest, DatasetError> {
    let (a, b, c) = fractions;
    if a < 0.0 || b < 0.0 || c < 0.0 || ((a + b + c) - 1.0).abs() > 1e-9 {
        return Err(DatasetError::BadFractions(fractions));
    }
    let mut ids = image_ids.to_vec();
    ids.sort();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(DatasetError::DuplicateImageId(w[0].clone()));
    }
    if ids.len() < 3 {
        return Err(DatasetError::TooFewImages(ids.len()));
    }
    SeededRng::new(seed).shuffle(&mut ids);
    let (train, _val, test) = split_sizes(ids.len(), fractions, mode);
    let mut it = ids.into_iter();
    let mut take = |k: usize| -> Vec<String> {
        let mut v: Vec<String> = it.by_ref().take(k).collect();
        v.sort();
        v
    };
    let test_image_ids = take(test);
    let train_image_ids = take(train);
    let val_image_ids = take(usize::MAX);
    Ok(SplitManifest {
        seed,
        fractions,
        mode,
        train_image_ids,
        val_image_ids,
        test_image_ids,
    })
}
