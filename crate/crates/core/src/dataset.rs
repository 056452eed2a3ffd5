//! Rating datasets: loading, validation, sampling and k-fold splits.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// On-disk layout of a ratings file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// `user,item,rating[,timestamp]`, optional `user,item,rating` header.
    CsvTriples,
    /// `user\titem\trating\ttimestamp`, no header.
    MovielensTab,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv-triples" | "csv" => Ok(Format::CsvTriples),
            "movielens-tab" | "tab" => Ok(Format::MovielensTab),
            other => Err(Error::Usage(format!("unknown ratings format `{other}`"))),
        }
    }
}

/// Declared or inferred rating scale, `min < max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub min: f64,
    pub max: f64,
}

impl Scale {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Validation(format!(
                "invalid rating scale ({min}, {max})"
            )));
        }
        Ok(Scale { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub value: f64,
}

/// Sparse user/item/feedback triples with bijective id maps onto `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingDataset {
    users: Vec<String>,
    items: Vec<String>,
    ratings: Vec<Rating>,
    scale: Scale,
}

impl RatingDataset {
    /// Builds a dataset from external-id triples.
    ///
    /// Ids are indexed in order of first appearance. A repeated `(user, item)`
    /// pair keeps the position of its first occurrence and the value of its
    /// last. Without a declared scale the observed `(min, max)` is used.
    pub fn from_triples<I, U, T>(triples: I, scale: Option<Scale>) -> Result<Self>
    where
        I: IntoIterator<Item = (U, T, f64)>,
        U: Into<String>,
        T: Into<String>,
    {
        let mut b = Builder::default();
        for (u, i, v) in triples {
            b.push(u.into(), i.into(), v);
        }
        b.finish(scale)
    }

    /// An empty dataset over the given scale.
    pub fn empty(scale: Scale) -> Self {
        RatingDataset {
            users: Vec::new(),
            items: Vec::new(),
            ratings: Vec::new(),
            scale,
        }
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_ratings(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    /// `(nusers, nitems, nratings)`.
    pub fn stats(&self) -> (usize, usize, usize) {
        (self.n_users(), self.n_items(), self.n_ratings())
    }

    pub fn mean_rating(&self) -> f64 {
        if self.ratings.is_empty() {
            return 0.0;
        }
        self.ratings.iter().map(|r| r.value).sum::<f64>() / self.ratings.len() as f64
    }

    /// Ratings at `indices`, keeping the full user and item index space so that
    /// indices stay comparable between the train and test side of a fold.
    pub fn subset(&self, indices: &[usize]) -> RatingDataset {
        RatingDataset {
            users: self.users.clone(),
            items: self.items.clone(),
            ratings: indices.iter().map(|&i| self.ratings[i]).collect(),
            scale: self.scale,
        }
    }

    /// Ratings at `indices`, re-indexing users and items to those that occur.
    pub fn reindexed_subset(&self, indices: &[usize]) -> RatingDataset {
        let mut b = Builder::default();
        for &i in indices {
            let r = self.ratings[i];
            b.push(
                self.users[r.user].clone(),
                self.items[r.item].clone(),
                r.value,
            );
        }
        RatingDataset {
            users: b.users,
            items: b.items,
            ratings: b.ratings,
            scale: self.scale,
        }
    }

    /// Parses ratings from a reader.
    pub fn parse<R: Read>(reader: R, format: Format, scale: Option<Scale>) -> Result<Self> {
        let delimiter = match format {
            Format::CsvTriples => b',',
            Format::MovielensTab => b'\t',
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let mut b = Builder::default();
        let mut record = csv::StringRecord::new();
        let mut first = true;
        while rdr.read_record(&mut record)? {
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            if first && format == Format::CsvTriples && is_header(&record) {
                first = false;
                continue;
            }
            first = false;
            let expected = match format {
                Format::CsvTriples => 3..=4,
                Format::MovielensTab => 3..=4,
            };
            if !expected.contains(&record.len()) {
                return Err(Error::parse(
                    line,
                    format!("expected 3 or 4 fields, found {}", record.len()),
                ));
            }
            let (user, item) = (&record[0], &record[1]);
            if user.is_empty() || item.is_empty() {
                return Err(Error::parse(line, "empty user or item id"));
            }
            let value: f64 = record[2]
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid rating `{}`", &record[2])))?;
            if !value.is_finite() {
                return Err(Error::parse(
                    line,
                    format!("non-finite rating `{}`", &record[2]),
                ));
            }
            b.push(user.to_string(), item.to_string(), value);
        }
        b.finish(scale)
    }

    /// Loads a ratings file.
    pub fn load(path: impl AsRef<Path>, format: Format, scale: Option<Scale>) -> Result<Self> {
        let file = File::open(path.as_ref())?;
        Self::parse(BufReader::new(file), format, scale)
    }

    /// Writes the canonical `user,item,rating` CSV.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["user", "item", "rating"])?;
        for r in &self.ratings {
            w.write_record([
                self.users[r.user].as_str(),
                self.items[r.item].as_str(),
                &format!("{}", r.value),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Rating-level random partition into `k` folds, deterministic per seed.
    pub fn kfold_split(&self, k: usize, seed: u64) -> Result<SplitPlan> {
        if k < 2 {
            return Err(Error::Usage(format!("k-fold split needs k >= 2, got {k}")));
        }
        let n = self.n_ratings();
        if k > n {
            return Err(Error::InfeasibleSplit(format!(
                "{k} folds requested for {n} ratings"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut tests = vec![Vec::with_capacity(n / k + 1); k];
        for (pos, idx) in order.into_iter().enumerate() {
            tests[pos % k].push(idx);
        }
        let folds = tests
            .into_iter()
            .map(|mut test| {
                test.sort_unstable();
                let mut in_test = vec![false; n];
                for &i in &test {
                    in_test[i] = true;
                }
                let train = (0..n).filter(|&i| !in_test[i]).collect();
                Fold { train, test }
            })
            .collect();
        Ok(SplitPlan { folds, seed })
    }

    /// Uniform random subsample of `⌈rate · nratings⌉` ratings with users and
    /// items re-indexed; the scale is preserved.
    pub fn sample_ratings(&self, rate: f64, seed: u64) -> Result<RatingDataset> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Usage(format!(
                "sample rate must lie in (0, 1], got {rate}"
            )));
        }
        let n = self.n_ratings();
        // Guard against products like 0.1 * 30 = 3.0000000000000004.
        let size = ((rate * n as f64) - 1e-9).ceil().max(0.0) as usize;
        let size = size.min(n);
        if size == 0 {
            return Err(Error::EmptySample);
        }
        let mut picked = index::sample(&mut ChaCha8Rng::seed_from_u64(seed), n, size).into_vec();
        picked.sort_unstable();
        Ok(self.reindexed_subset(&picked))
    }
}

/// Free-function form of [`RatingDataset::load`].
pub fn load_ratings(path: impl AsRef<Path>, format: Format) -> Result<RatingDataset> {
    RatingDataset::load(path, format, None)
}

/// `(nusers, nitems, nratings)`.
pub fn dataset_stats(ds: &RatingDataset) -> (usize, usize, usize) {
    ds.stats()
}

fn is_header(record: &csv::StringRecord) -> bool {
    record.len() >= 3
        && record[0].eq_ignore_ascii_case("user")
        && record[1].eq_ignore_ascii_case("item")
        && record[2].eq_ignore_ascii_case("rating")
}

#[derive(Default)]
struct Builder {
    users: Vec<String>,
    items: Vec<String>,
    user_ix: HashMap<String, usize>,
    item_ix: HashMap<String, usize>,
    pair_ix: HashMap<(usize, usize), usize>,
    ratings: Vec<Rating>,
}

impl Builder {
    fn push(&mut self, user: String, item: String, value: f64) {
        let u = intern(&mut self.users, &mut self.user_ix, user);
        let i = intern(&mut self.items, &mut self.item_ix, item);
        match self.pair_ix.get(&(u, i)) {
            Some(&pos) => self.ratings[pos].value = value,
            None => {
                self.pair_ix.insert((u, i), self.ratings.len());
                self.ratings.push(Rating {
                    user: u,
                    item: i,
                    value,
                });
            }
        }
    }

    fn finish(self, declared: Option<Scale>) -> Result<RatingDataset> {
        if self.ratings.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(bad) = self.ratings.iter().find(|r| !r.value.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite rating {}",
                bad.value
            )));
        }
        let scale = match declared {
            Some(s) => {
                let s = Scale::new(s.min, s.max)?;
                if let Some(bad) = self.ratings.iter().find(|r| !s.contains(r.value)) {
                    return Err(Error::Validation(format!(
                        "rating {} of user `{}` on item `{}` lies outside scale [{}, {}]",
                        bad.value, self.users[bad.user], self.items[bad.item], s.min, s.max
                    )));
                }
                s
            }
            None => infer_scale(&self.ratings),
        };
        Ok(RatingDataset {
            users: self.users,
            items: self.items,
            ratings: self.ratings,
            scale,
        })
    }
}

fn intern(names: &mut Vec<String>, ix: &mut HashMap<String, usize>, name: String) -> usize {
    if let Some(&i) = ix.get(&name) {
        return i;
    }
    let i = names.len();
    ix.insert(name.clone(), i);
    names.push(name);
    i
}

/// Observed `(min, max)`; a constant dataset gets the unit-width scale `(v, v + 1)`.
fn infer_scale(ratings: &[Rating]) -> Scale {
    let (lo, hi) = ratings
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.value), hi.max(r.value))
        });
    if lo < hi {
        Scale { min: lo, max: hi }
    } else {
        Scale {
            min: lo,
            max: lo + 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Folds over rating indices; test sets partition `0..nratings`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub folds: Vec<Fold>,
    pub seed: u64,
}
