use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::error::{Error, Result};

/// Number of levels per qudit, at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dim(usize);

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDim(d));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Name of a single qudit inside a register (`R`, `A`, `0`, `2'`, ...).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Deref for Label {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl From<&Label> for Label {
    fn from(l: &Label) -> Self {
        l.clone()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered set of distinct qudit labels sharing one dimension `d`.
///
/// Basis index convention is big-endian: the first label is the most
/// significant base-`d` digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Register {
    labels: Vec<Label>,
    d: Dim,
}

impl Register {
    pub fn new<L: Into<Label>>(d: Dim, labels: impl IntoIterator<Item = L>) -> Result<Self> {
        let labels: Vec<Label> = labels.into_iter().map(Into::into).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.0.clone()));
            }
        }
        Ok(Self { labels, d })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn d(&self) -> Dim {
        self.d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Total Hilbert-space dimension `d^len`, saturating on overflow.
    pub fn dim(&self) -> usize {
        let mut n: usize = 1;
        for _ in 0..self.labels.len() {
            n = n.saturating_mul(self.d.0);
        }
        n
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l.as_str() == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.as_str() == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l.as_ref())?;
            if out.contains(&p) {
                return Err(Error::DuplicateLabel(l.as_ref().to_owned()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Stride of the digit at `position`.
    pub fn stride(&self, position: usize) -> usize {
        let mut s = 1;
        for _ in position + 1..self.labels.len() {
            s *= self.d.0;
        }
        s
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let d = self.d.0;
        let mut out = vec![0; self.labels.len()];
        for slot in out.iter_mut().rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.d.0 + x)
    }

    /// Labels of `self` followed by those of `other`.
    pub fn concat(&self, other: &Register) -> Result<Register> {
        if self.d != other.d {
            return Err(Error::DimMismatch {
                expected: self.d.0,
                found: other.d.0,
            });
        }
        Register::new(self.d, self.labels.iter().chain(&other.labels))
    }

    /// Sub-register with the given labels, in the given order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Register> {
        self.positions(labels)?;
        Register::new(self.d, labels.iter().map(|l| l.as_ref()))
    }

    /// Labels not in `labels`, in register order.
    pub fn complement<S: AsRef<str>>(&self, labels: &[S]) -> Vec<Label> {
        self.labels
            .iter()
            .filter(|l| !labels.iter().any(|s| s.as_ref() == l.as_str()))
            .cloned()
            .collect()
    }
}

/// Index bookkeeping for splitting a register into kept and remaining
/// qudits: the full index of `(k, r)` is `kept[k] + rest[r]`.
pub(crate) struct Split {
    pub kept: Vec<usize>,
    pub rest: Vec<usize>,
}

impl Split {
    pub fn new(register: &Register, keep_positions: &[usize]) -> Self {
        let rest_positions: Vec<usize> = (0..register.len())
            .filter(|p| !keep_positions.contains(p))
            .collect();
        Self {
            kept: offsets(register, keep_positions),
            rest: offsets(register, &rest_positions),
        }
    }
}

fn offsets(register: &Register, positions: &[usize]) -> Vec<usize> {
    let d = register.d().get();
    let strides: Vec<usize> = positions.iter().map(|&p| register.stride(p)).collect();
    let count = d.pow(positions.len() as u32);
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; positions.len()];
    for _ in 0..count {
        out.push(digits.iter().zip(&strides).map(|(a, b)| a * b).sum());
        for slot in (0..digits.len()).rev() {
            digits[slot] += 1;
            if digits[slot] < d {
                break;
            }
            digits[slot] = 0;
        }
    }
    out
}
