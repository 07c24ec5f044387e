//! Weighted bipartite rating network.
//!
//! A [`RatingMatrix`] stores users (rows), objects (columns) and discrete
//! ratings in compressed sparse row form. Ratings are kept as indices into the
//! [`RatingScale`], so every stored rating is a member of the scale by
//! construction. Users and objects are addressed by dense 0-based indices; the
//! original identifiers are kept for reporting.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

static NEXT_MATRIX_ID: AtomicU64 = AtomicU64::new(1);

/// Ordered, finite set of allowed discrete ratings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingScale {
    values: Vec<i32>,
}

impl RatingScale {
    /// Builds a scale from arbitrary values; they are sorted and deduplicated.
    pub fn new(values: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut values: Vec<i32> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        if values.is_empty() {
            return Err(Error::Config("rating scale must not be empty".into()));
        }
        if values.len() > u8::MAX as usize {
            return Err(Error::Config(format!(
                "rating scale has {} levels, at most {} supported",
                values.len(),
                u8::MAX
            )));
        }
        Ok(RatingScale { values })
    }

    /// The integer scale `min..=max`.
    pub fn range(min: i32, max: i32) -> Result<Self> {
        if min > max {
            return Err(Error::Config(format!("empty rating range {min}..={max}")));
        }
        Self::new(min..=max)
    }

    /// Number of levels, z.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn value(&self, level: u8) -> i32 {
        self.values[level as usize]
    }

    pub fn level_of(&self, value: i32) -> Option<u8> {
        self.values.binary_search(&value).ok().map(|l| l as u8)
    }

    pub fn min(&self) -> i32 {
        self.values[0]
    }

    pub fn max(&self) -> i32 {
        self.values[self.values.len() - 1]
    }

    pub fn min_level(&self) -> u8 {
        0
    }

    pub fn max_level(&self) -> u8 {
        (self.values.len() - 1) as u8
    }
}

impl Default for RatingScale {
    fn default() -> Self {
        RatingScale {
            values: vec![1, 2, 3, 4, 5],
        }
    }
}

impl fmt::Display for RatingScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Sparse user × object rating matrix.
///
/// Immutable after construction. Rows are sorted by object index and hold at
/// most one rating per object.
#[derive(Debug, Clone)]
pub struct RatingMatrix {
    id: u64,
    user_ids: Vec<String>,
    object_ids: Vec<String>,
    scale: RatingScale,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    levels: Vec<u8>,
    // Position of each user when sorted by identifier; used for tie-breaking.
    user_order: Vec<u32>,
}

impl PartialEq for RatingMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.user_ids == other.user_ids
            && self.object_ids == other.object_ids
            && self.scale == other.scale
            && self.row_ptr == other.row_ptr
            && self.cols == other.cols
            && self.levels == other.levels
    }
}

impl RatingMatrix {
    /// Builds a matrix from per-user rows of `(object index, level)` pairs.
    ///
    /// Rows may be in any order; a repeated object within a row or an
    /// out-of-range index is a usage error.
    pub fn from_rows(
        user_ids: Vec<String>,
        object_ids: Vec<String>,
        scale: RatingScale,
        rows: Vec<Vec<(u32, u8)>>,
    ) -> Result<Self> {
        if rows.len() != user_ids.len() {
            return Err(Error::Usage(format!(
                "{} rows for {} users",
                rows.len(),
                user_ids.len()
            )));
        }
        let n = object_ids.len();
        let z = scale.len();
        let l: usize = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::with_capacity(l);
        let mut levels = Vec::with_capacity(l);
        row_ptr.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable_by_key(|&(obj, _)| obj);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Usage(format!(
                        "user {} rated object {} twice",
                        user_ids[i], object_ids[w[0].0 as usize]
                    )));
                }
            }
            for (obj, level) in row {
                if obj as usize >= n {
                    return Err(Error::Usage(format!("object index {obj} out of range")));
                }
                if level as usize >= z {
                    return Err(Error::Usage(format!("rating level {level} out of range")));
                }
                cols.push(obj);
                levels.push(level);
            }
            row_ptr.push(cols.len());
        }
        let user_order = identifier_order(&user_ids);
        Ok(RatingMatrix {
            id: NEXT_MATRIX_ID.fetch_add(1, AtomicOrdering::Relaxed),
            user_ids,
            object_ids,
            scale,
            row_ptr,
            cols,
            levels,
            user_order,
        })
    }

    /// Builds a matrix from rating values; identifiers are the 1-based index.
    ///
    /// Convenience for fixtures: `rows[i]` lists `(object, rating value)`.
    pub fn from_values(
        n_objects: usize,
        scale: RatingScale,
        rows: &[Vec<(u32, i32)>],
    ) -> Result<Self> {
        let mut level_rows = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for &(obj, value) in row {
                let level = scale.level_of(value).ok_or_else(|| Error::Domain {
                    line: i + 1,
                    value: value.to_string(),
                    scale: scale.to_string(),
                })?;
                out.push((obj, level));
            }
            level_rows.push(out);
        }
        let user_ids = (1..=rows.len()).map(|i| i.to_string()).collect();
        let object_ids = (1..=n_objects).map(|i| i.to_string()).collect();
        Self::from_rows(user_ids, object_ids, scale, level_rows)
    }

    /// Process-unique identity of this matrix; clones share it.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Number of users, m.
    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    /// Number of objects, n.
    pub fn n_objects(&self) -> usize {
        self.object_ids.len()
    }

    /// Number of ratings, l.
    pub fn n_ratings(&self) -> usize {
        self.cols.len()
    }

    pub fn scale(&self) -> &RatingScale {
        &self.scale
    }

    pub fn user_ids(&self) -> &[String] {
        &self.user_ids
    }

    pub fn object_ids(&self) -> &[String] {
        &self.object_ids
    }

    /// Rank of each user in identifier order (numeric identifiers compare numerically).
    pub fn user_order(&self) -> &[u32] {
        &self.user_order
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    /// Object indices of user `i`'s ratings, ascending.
    pub fn row_objects(&self, user: usize) -> &[u32] {
        &self.cols[self.row_ptr[user]..self.row_ptr[user + 1]]
    }

    /// Rating levels of user `i`, aligned with [`Self::row_objects`].
    pub fn row_levels(&self, user: usize) -> &[u8] {
        &self.levels[self.row_ptr[user]..self.row_ptr[user + 1]]
    }

    /// `(object, level)` pairs of one user.
    pub fn row(&self, user: usize) -> impl Iterator<Item = (u32, u8)> + '_ {
        self.row_objects(user)
            .iter()
            .copied()
            .zip(self.row_levels(user).iter().copied())
    }

    /// All `(user, object, level)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u32, u8)> + '_ {
        (0..self.n_users()).flat_map(move |i| self.row(i).map(move |(obj, lv)| (i, obj, lv)))
    }

    /// Rating value of user `i` on `object`, if present.
    pub fn rating(&self, user: usize, object: u32) -> Option<i32> {
        let objs = self.row_objects(user);
        objs.binary_search(&object)
            .ok()
            .map(|pos| self.scale.value(self.row_levels(user)[pos]))
    }

    /// k_i.
    pub fn user_degree(&self, user: usize) -> usize {
        self.row_ptr[user + 1] - self.row_ptr[user]
    }

    pub fn user_degrees(&self) -> Vec<usize> {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// k_α for every object.
    pub fn object_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_objects()];
        for &obj in &self.cols {
            deg[obj as usize] += 1;
        }
        deg
    }

    /// Row data as owned vectors, the input shape of [`Self::from_rows`].
    pub fn to_rows(&self) -> Vec<Vec<(u32, u8)>> {
        (0..self.n_users()).map(|i| self.row(i).collect()).collect()
    }

    /// Copy of this matrix with some rows replaced. Users and objects are unchanged.
    pub fn with_rows_replaced(&self, replacements: Vec<(usize, Vec<(u32, u8)>)>) -> Result<Self> {
        let mut rows = self.to_rows();
        for (user, row) in replacements {
            if user >= rows.len() {
                return Err(Error::Usage(format!("user index {user} out of range")));
            }
            rows[user] = row;
        }
        Self::from_rows(
            self.user_ids.clone(),
            self.object_ids.clone(),
            self.scale.clone(),
            rows,
        )
    }
}

/// Orders identifiers numerically when both parse as integers, else lexically;
/// numeric identifiers sort first.
pub fn compare_identifiers(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

fn identifier_order(ids: &[String]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..ids.len()).collect();
    idx.sort_by(|&a, &b| compare_identifiers(&ids[a], &ids[b]).then(a.cmp(&b)));
    let mut order = vec![0u32; ids.len()];
    for (rank, i) in idx.into_iter().enumerate() {
        order[i] = rank as u32;
    }
    order
}

/// Field separator of a ratings file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    /// Tab if the first data line contains one, otherwise comma.
    #[default]
    Auto,
    Tab,
    Comma,
}

impl Delimiter {
    fn resolve(self, first_line: &str) -> char {
        match self {
            Delimiter::Tab => '\t',
            Delimiter::Comma => ',',
            Delimiter::Auto if first_line.contains('\t') => '\t',
            Delimiter::Auto => ',',
        }
    }
}

/// Reads `user_id, item_id, rating[, ...]` records.
///
/// Extra columns are ignored. A first line whose rating field is not numeric is
/// treated as a header and skipped. Repeated `(user, object)` pairs keep the
/// last record.
pub fn load_ratings<R: BufRead>(
    reader: R,
    delimiter: Delimiter,
    scale: &RatingScale,
) -> Result<RatingMatrix> {
    let mut user_index: HashMap<String, u32> = HashMap::new();
    let mut object_index: HashMap<String, u32> = HashMap::new();
    let mut user_ids = Vec::new();
    let mut object_ids = Vec::new();
    let mut records: Vec<(u32, u32, u8)> = Vec::new();
    let mut sep = None;
    let mut seen_data = false;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let sep = *sep.get_or_insert_with(|| delimiter.resolve(line));
        let mut fields = line.split(sep).map(str::trim);
        let (user, object, rating) = match (fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(o), Some(r)) if !u.is_empty() && !o.is_empty() => (u, o, r),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected user, item and rating fields, got {line:?}"),
                })
            }
        };
        let value = match parse_rating(rating) {
            Some(v) => v,
            None if !seen_data && rating.parse::<f64>().is_err() => {
                // header row
                seen_data = true;
                continue;
            }
            None => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("rating {rating:?} is not an integer"),
                })
            }
        };
        seen_data = true;
        let level = scale.level_of(value).ok_or_else(|| Error::Domain {
            line: lineno,
            value: rating.to_string(),
            scale: scale.to_string(),
        })?;
        let u = intern(&mut user_index, &mut user_ids, user);
        let o = intern(&mut object_index, &mut object_ids, object);
        records.push((u, o, level));
    }

    // Stable sort keeps file order within a pair, so the last one wins.
    records.sort_by_key(|&(u, o, _)| (u, o));
    let mut rows: Vec<Vec<(u32, u8)>> = vec![Vec::new(); user_ids.len()];
    let mut duplicates = 0usize;
    for (idx, &(u, o, level)) in records.iter().enumerate() {
        if let Some(&(nu, no, _)) = records.get(idx + 1) {
            if nu == u && no == o {
                duplicates += 1;
                continue;
            }
        }
        rows[u as usize].push((o, level));
    }
    if duplicates > 0 {
        log::warn!("{duplicates} duplicate (user, item) records replaced by a later record");
    }
    RatingMatrix::from_rows(user_ids, object_ids, scale.clone(), rows)
}

/// [`load_ratings`] from a file path.
pub fn load_ratings_path(
    path: impl AsRef<Path>,
    delimiter: Delimiter,
    scale: &RatingScale,
) -> Result<RatingMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_ratings(BufReader::new(file), delimiter, scale)
}

fn parse_rating(field: &str) -> Option<i32> {
    if let Ok(v) = field.parse::<i32>() {
        return Some(v);
    }
    let f = field.parse::<f64>().ok()?;
    (f.is_finite() && f.fract() == 0.0 && f.abs() <= i32::MAX as f64).then_some(f as i32)
}

fn intern(index: &mut HashMap<String, u32>, ids: &mut Vec<String>, key: &str) -> u32 {
    if let Some(&i) = index.get(key) {
        return i;
    }
    let i = ids.len() as u32;
    index.insert(key.to_string(), i);
    ids.push(key.to_string());
    i
}

/// Keeps users with at least `min_user_degree` ratings and the objects they rated.
///
/// One pass suffices: dropping an object that no retained user rated cannot
/// lower a retained user's degree.
pub fn filter_core(matrix: &RatingMatrix, min_user_degree: usize) -> RatingMatrix {
    let keep_user: Vec<bool> = (0..matrix.n_users())
        .map(|i| matrix.user_degree(i) >= min_user_degree)
        .collect();
    let mut keep_object = vec![false; matrix.n_objects()];
    for (i, _) in keep_user.iter().enumerate().filter(|(_, &k)| k) {
        for &obj in matrix.row_objects(i) {
            keep_object[obj as usize] = true;
        }
    }
    let mut object_map = vec![u32::MAX; matrix.n_objects()];
    let mut object_ids = Vec::new();
    for (obj, _) in keep_object.iter().enumerate().filter(|(_, &k)| k) {
        object_map[obj] = object_ids.len() as u32;
        object_ids.push(matrix.object_ids[obj].clone());
    }
    let mut user_ids = Vec::new();
    let mut rows = Vec::new();
    for (i, _) in keep_user.iter().enumerate().filter(|(_, &k)| k) {
        user_ids.push(matrix.user_ids[i].clone());
        rows.push(
            matrix
                .row(i)
                .map(|(obj, lv)| (object_map[obj as usize], lv))
                .collect(),
        );
    }
    RatingMatrix::from_rows(user_ids, object_ids, matrix.scale.clone(), rows)
        .expect("filtered rows are valid by construction")
}

/// Size and density summary of a rating matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub users: usize,
    pub objects: usize,
    pub ratings: usize,
    pub mean_user_degree: f64,
    pub mean_object_degree: f64,
    /// l / (m n); 0 for an empty matrix.
    pub sparsity: f64,
}

impl DatasetStats {
    pub fn of(matrix: &RatingMatrix) -> Self {
        let m = matrix.n_users();
        let n = matrix.n_objects();
        let l = matrix.n_ratings();
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        DatasetStats {
            users: m,
            objects: n,
            ratings: l,
            mean_user_degree: ratio(l, m),
            mean_object_degree: ratio(l, n),
            sparsity: ratio(l, m * n),
        }
    }
}

/// Dataset statistics; see [`DatasetStats`].
pub fn stats(matrix: &RatingMatrix) -> DatasetStats {
    DatasetStats::of(matrix)
}
