//! Injective maps between finite index ranges.
//!
//! An `Injection` sends `1..=domain` into `1..=codomain` with pairwise
//! distinct images. These maps drive every relabeling in the crate: variable
//! substitution in polynomials, tensor restriction, and the enumeration of
//! orbit instances of canonical equations.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Injection {
    images: Vec<usize>,
    codomain: usize,
}

impl Injection {
    /// `images[i-1]` is the image of `i`; entries must be distinct and in `1..=codomain`.
    pub fn new(images: Vec<usize>, codomain: usize) -> Result<Self> {
        let mut seen = vec![false; codomain + 1];
        for &im in &images {
            if im == 0 || im > codomain || seen[im] {
                return Err(Error::BadInjection { images, codomain });
            }
            seen[im] = true;
        }
        Ok(Injection { images, codomain })
    }

    pub fn identity(n: usize) -> Self {
        Injection { images: (1..=n).collect(), codomain: n }
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of a 1-based domain index.
    pub fn apply(&self, i: usize) -> Result<usize> {
        self.images
            .get(i.wrapping_sub(1))
            .copied()
            .ok_or(Error::InjectionDomain { index: i, domain: self.images.len() })
    }

    /// Apply entrywise to an index tuple.
    pub fn apply_tuple(&self, tuple: &[usize]) -> Result<Vec<usize>> {
        tuple.iter().map(|&i| self.apply(i)).collect()
    }

    /// `self` then `g`: the result sends `i` to `g(self(i))`.
    pub fn compose(&self, g: &Injection) -> Result<Injection> {
        if self.codomain != g.domain_size() {
            return Err(Error::CompositionMismatch {
                mid_first: self.codomain,
                mid_second: g.domain_size(),
            });
        }
        let images = self.images.iter().map(|&i| g.images[i - 1]).collect();
        Ok(Injection { images, codomain: g.codomain })
    }

    pub fn is_permutation(&self) -> bool {
        self.images.len() == self.codomain
    }

    /// Inverse of a permutation; error if the map is not surjective.
    pub fn inverse(&self) -> Result<Injection> {
        if !self.is_permutation() {
            return Err(Error::BadInjection {
                images: self.images.clone(),
                codomain: self.codomain,
            });
        }
        let mut inv = vec![0usize; self.codomain];
        for (i, &im) in self.images.iter().enumerate() {
            inv[im - 1] = i + 1;
        }
        Ok(Injection { images: inv, codomain: self.codomain })
    }

    /// All injections `[n] -> [w]` in lexicographic order of their image tuples.
    /// Empty when `n > w`; the single empty injection when `n = 0`.
    pub fn enumerate(n: usize, w: usize) -> Vec<Injection> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; w + 1];
        fn rec(
            n: usize,
            w: usize,
            current: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Injection>,
        ) {
            if current.len() == n {
                out.push(Injection { images: current.clone(), codomain: w });
                return;
            }
            for v in 1..=w {
                if !used[v] {
                    used[v] = true;
                    current.push(v);
                    rec(n, w, current, used, out);
                    current.pop();
                    used[v] = false;
                }
            }
        }
        if n <= w {
            rec(n, w, &mut current, &mut used, &mut out);
        }
        out
    }
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, im) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}->{}", i + 1, im)?;
        }
        write!(f, "]:{}", self.codomain)
    }
}
