use ndarray::{s, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Class label as used throughout the crate: class 1 (`X ∼ F`) or class 2 (`Y ∼ G`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    One,
    Two,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::One => 1,
            Label::Two => 2,
        }
    }

    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            1 => Some(Label::One),
            2 => Some(Label::Two),
            _ => None,
        }
    }
}

/// Labeled training data: two observation-by-feature matrices with the
/// same feature count.
///
/// Invariants, checked on construction: each class has at least two rows,
/// both matrices have the same number of columns (at least one), and every
/// entry is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoClassSample {
    class1: Array2<f64>,
    class2: Array2<f64>,
    feature_names: Option<Vec<String>>,
}

impl TwoClassSample {
    pub fn new(class1: Array2<f64>, class2: Array2<f64>) -> Result<Self> {
        Self::with_names(class1, class2, None)
    }

    pub fn with_names(class1: Array2<f64>, class2: Array2<f64>, feature_names: Option<Vec<String>>) -> Result<Self> {
        if class1.nrows() < 2 || class2.nrows() < 2 {
            return Err(Error::precondition(format!(
                "each class needs at least 2 observations (got n1 = {}, n2 = {})",
                class1.nrows(),
                class2.nrows()
            )));
        }
        if class1.ncols() != class2.ncols() {
            return Err(Error::precondition(format!(
                "class matrices disagree on feature count ({} vs {})",
                class1.ncols(),
                class2.ncols()
            )));
        }
        if class1.ncols() == 0 {
            return Err(Error::precondition("sample has no features"));
        }
        for (which, m) in [(1, &class1), (2, &class2)] {
            if let Some(((r, c), v)) = m.indexed_iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::data(format!("non-finite value {v} in class {which}, row {}, feature {}", r + 1, c + 1)));
            }
        }
        if let Some(names) = &feature_names {
            if names.len() != class1.ncols() {
                return Err(Error::precondition(format!(
                    "{} feature names for {} features",
                    names.len(),
                    class1.ncols()
                )));
            }
        }
        Ok(TwoClassSample {
            class1,
            class2,
            feature_names,
        })
    }

    /// Builds a sample from row vectors; convenient in tests and examples.
    pub fn from_rows(class1: &[Vec<f64>], class2: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_array(class1)?, rows_to_array(class2)?)
    }

    pub fn class1(&self) -> ArrayView2<'_, f64> {
        self.class1.view()
    }

    pub fn class2(&self) -> ArrayView2<'_, f64> {
        self.class2.view()
    }

    pub fn class(&self, label: Label) -> ArrayView2<'_, f64> {
        match label {
            Label::One => self.class1(),
            Label::Two => self.class2(),
        }
    }

    pub fn n1(&self) -> usize {
        self.class1.nrows()
    }

    pub fn n2(&self) -> usize {
        self.class2.nrows()
    }

    pub fn dim(&self) -> usize {
        self.class1.ncols()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Display name of feature `k` (0-based): the header name when known, else `"X{k+1}"`.
    pub fn feature_name(&self, k: usize) -> String {
        match &self.feature_names {
            Some(n) => n[k].clone(),
            None => format!("X{}", k + 1),
        }
    }

    /// Column `k` of class 1 and class 2 as contiguous vectors.
    pub fn column_pair(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        (self.class1.column(k).to_vec(), self.class2.column(k).to_vec())
    }

    /// Sample with the class roles exchanged.
    pub fn swapped(&self) -> TwoClassSample {
        TwoClassSample {
            class1: self.class2.clone(),
            class2: self.class1.clone(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<TwoClassSample> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.dim()) {
            return Err(Error::precondition(format!("column {bad} out of range for d = {}", self.dim())));
        }
        let names = self
            .feature_names
            .as_ref()
            .map(|n| cols.iter().map(|&c| n[c].clone()).collect());
        TwoClassSample::with_names(
            self.class1.select(Axis(1), cols),
            self.class2.select(Axis(1), cols),
            names,
        )
    }

    /// Appends one column to each class.
    pub(crate) fn with_extra_column(&self, col1: &[f64], col2: &[f64], name: &str) -> Result<TwoClassSample> {
        let d = self.dim();
        let mut c1 = Array2::zeros((self.n1(), d + 1));
        c1.slice_mut(s![.., ..d]).assign(&self.class1);
        c1.column_mut(d).assign(&ArrayView1::from(col1));
        let mut c2 = Array2::zeros((self.n2(), d + 1));
        c2.slice_mut(s![.., ..d]).assign(&self.class2);
        c2.column_mut(d).assign(&ArrayView1::from(col2));
        let names = self.feature_names.as_ref().map(|n| {
            let mut n = n.clone();
            n.push(name.to_string());
            n
        });
        TwoClassSample::with_names(c1, c2, names)
    }

    /// Rows of both classes stacked (class 1 first) with their labels.
    pub fn to_labeled(&self) -> LabeledRows {
        let mut rows = Array2::zeros((self.n1() + self.n2(), self.dim()));
        rows.slice_mut(s![..self.n1(), ..]).assign(&self.class1);
        rows.slice_mut(s![self.n1().., ..]).assign(&self.class2);
        let labels = std::iter::repeat_n(Label::One, self.n1())
            .chain(std::iter::repeat_n(Label::Two, self.n2()))
            .collect();
        LabeledRows {
            rows,
            labels,
            feature_names: self.feature_names.clone(),
        }
    }
}

/// Observations with class labels in arbitrary order; the shape of a data
/// file. Unlike [`TwoClassSample`] it places no minimum on class sizes, so
/// it also serves as a test set.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledRows {
    pub rows: Array2<f64>,
    pub labels: Vec<Label>,
    pub feature_names: Option<Vec<String>>,
}

impl LabeledRows {
    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    /// Splits into a [`TwoClassSample`], preserving row order within each class.
    pub fn to_sample(&self) -> Result<TwoClassSample> {
        let idx = |l: Label| -> Vec<usize> { (0..self.len()).filter(|&i| self.labels[i] == l).collect() };
        TwoClassSample::with_names(
            self.rows.select(Axis(0), &idx(Label::One)),
            self.rows.select(Axis(0), &idx(Label::Two)),
            self.feature_names.clone(),
        )
    }
}

pub(crate) fn rows_to_array(rows: &[Vec<f64>]) -> Result<Array2<f64>> {
    let d = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::precondition("rows have unequal lengths"));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), d), flat).map_err(|e| Error::precondition(e.to_string()))
}
