//! Permutations on `{0, …, n−1}`.
//!
//! Conventions, fixed once for the whole crate:
//!   * points are 0-based;
//!   * permutations act on the **right** of points, so `p.apply(x)` is `x^p`;
//!   * the product `p.then(&q)` applies `p` first, then `q`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};

/// A permutation stored as its image table: point `x` maps to `images[x]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from an image table, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            let img = img as usize;
            if img >= n {
                return Err(Error::NotAPermutation(format!(
                    "image {img} out of range for degree {n}"
                )));
            }
            if seen[img] {
                return Err(Error::NotAPermutation(format!("image {img} repeated")));
            }
            seen[img] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of the given degree from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut moved = vec![false; degree];
        for cycle in cycles {
            for (k, &pt) in cycle.iter().enumerate() {
                if pt >= degree {
                    return Err(Error::PointOutOfRange(pt, degree));
                }
                if moved[pt] {
                    return Err(Error::NotAPermutation(format!(
                        "point {pt} appears in two cycles"
                    )));
                }
                moved[pt] = true;
                images[pt] = cycle[(k + 1) % cycle.len()] as u32;
            }
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn into_images(self) -> Vec<u32> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i as u32 == img)
    }

    /// Product `self · other`: apply `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.degree()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img as usize] = i as u32;
        }
        Perm { images }
    }

    pub fn pow(&self, k: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        acc
    }

    /// All cycles, including fixed points, ordered by their smallest element;
    /// each cycle starts at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Cycle type as a multiset of cycle lengths, sorted descending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lengths: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// Order of the permutation: lcm of its cycle lengths.
    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for c in self.cycles() {
            acc = acc.lcm(&BigUint::from(c.len()));
        }
        acc
    }

    /// True iff every cycle has the same length (equivalently, no nontrivial
    /// power has a fixed point).
    pub fn is_semiregular(&self) -> bool {
        let cycles = self.cycles();
        let len = cycles[0].len();
        cycles.iter().all(|c| c.len() == len)
    }

    pub fn fixed_point_count(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &img)| *i as u32 == img)
            .count()
    }

    /// Parses either an image array `[1,0,2]` or cycle notation `(0 1)(2 3)`.
    /// For cycle notation the degree is `max point + 1` unless given.
    pub fn parse(text: &str, degree: Option<usize>) -> Result<Perm> {
        let t = text.trim();
        if t.starts_with('[') {
            let inner = t
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("unterminated image array: {text}")))?;
            let mut images = Vec::new();
            for part in inner.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let v: u32 = part
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point {part:?}")))?;
                images.push(v);
            }
            let p = Perm::from_images(images)?;
            if let Some(d) = degree {
                if p.degree() != d {
                    return Err(Error::DegreeMismatch(p.degree(), d));
                }
            }
            Ok(p)
        } else if t.starts_with('(') || t == "()" {
            let mut cycles: Vec<Vec<usize>> = Vec::new();
            let mut max_point = 0usize;
            let mut rest = t;
            while !rest.is_empty() {
                let open = rest
                    .find('(')
                    .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
                let close = rest[open..]
                    .find(')')
                    .map(|k| open + k)
                    .ok_or_else(|| Error::Parse(format!("unbalanced parens in {text:?}")))?;
                let body = &rest[open + 1..close];
                let mut cycle = Vec::new();
                for part in body.split_whitespace() {
                    let v: usize = part
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad point {part:?}")))?;
                    max_point = max_point.max(v);
                    cycle.push(v);
                }
                if !cycle.is_empty() {
                    cycles.push(cycle);
                }
                rest = rest[close + 1..].trim_start();
            }
            let d = degree.unwrap_or(if cycles.is_empty() { 0 } else { max_point + 1 });
            Perm::from_cycles(d, &cycles)
        } else {
            Err(Error::Parse(format!(
                "expected image array or cycle notation, got {text:?}"
            )))
        }
    }

    /// All permutations of the given degree in lexicographic order of their
    /// image tables. Guarded, since this is only for toy-scale work.
    pub fn all(degree: usize) -> Result<Vec<Perm>> {
        if degree > 8 {
            return Err(Error::CapExceeded(format!(
                "refusing to enumerate Sym({degree})"
            )));
        }
        let mut out = Vec::new();
        let mut images: Vec<u32> = (0..degree as u32).collect();
        loop {
            out.push(Perm {
                images: images.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (0..images.len().saturating_sub(1)).rev().find(|&i| images[i] < images[i + 1])
            else {
                break;
            };
            let j = (i + 1..images.len()).rev().find(|&j| images[j] > images[i]).unwrap();
            images.swap(i, j);
            images[i + 1..].reverse();
        }
        Ok(out)
    }
}

impl std::fmt::Display for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let nontrivial: Vec<Vec<usize>> =
            self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            return write!(f, "()");
        }
        for cycle in nontrivial {
            write!(f, "(")?;
            for (k, pt) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{pt}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}
