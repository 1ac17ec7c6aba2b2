use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column positions `1 ≤ r_1 ≤ … ≤ r_s ≤ N` of the marked edges in rows
/// `1..s`, counted from the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YoungProfile {
    n: usize,
    r: Vec<usize>,
}

impl YoungProfile {
    pub fn new(n: usize, r: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProfile("lattice size N must be at least 1".into()));
        }
        if r.len() > n {
            return Err(Error::InvalidProfile(format!(
                "profile has {} entries but the lattice has only {n} rows",
                r.len()
            )));
        }
        if let Some(&bad) = r.iter().find(|&&x| x == 0 || x > n) {
            return Err(Error::InvalidProfile(format!(
                "entry {bad} is outside 1..={n}"
            )));
        }
        if let Some(j) = r.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidProfile(format!(
                "r must be weakly increasing, r_1 <= r_2 <= ... <= r_s, \
                 but r_{} = {} > r_{} = {}",
                j + 1,
                r[j],
                j + 2,
                r[j + 1]
            )));
        }
        Ok(YoungProfile { n, r })
    }

    /// The constant profile `(r, …, r)` of length `s`.
    pub fn constant(n: usize, s: usize, r: usize) -> Result<Self> {
        Self::new(n, vec![r; s])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    pub fn s(&self) -> usize {
        self.r.len()
    }

    /// Row lengths `N − r_j` of the frozen Young diagram.
    pub fn mu(&self) -> Vec<usize> {
        self.r.iter().map(|r| self.n - r).collect()
    }

    pub fn mu_size(&self) -> usize {
        self.mu().iter().sum()
    }

    /// True when some `r_j < j`, which forces the probability to vanish.
    pub fn is_vanishing(&self) -> bool {
        self.r.iter().enumerate().any(|(j, &r)| r < j + 1)
    }

    pub fn without_last(&self) -> Self {
        let mut r = self.r.clone();
        r.pop();
        YoungProfile { n: self.n, r }
    }

    /// All profiles with `1 ≤ s ≤ N`, ordered by `s` then lexicographically.
    pub fn enumerate(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for s in 1..=n {
            let mut cur = Vec::with_capacity(s);
            extend(n, s, 1, &mut cur, &mut out);
        }
        out
    }
}

fn extend(n: usize, s: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<YoungProfile>) {
    if cur.len() == s {
        out.push(YoungProfile { n, r: cur.clone() });
        return;
    }
    for x in min..=n {
        cur.push(x);
        extend(n, s, x, cur, out);
        cur.pop();
    }
}

impl std::fmt::Display for YoungProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.r.iter().map(|x| x.to_string()).collect();
        write!(f, "N={} r=({})", self.n, parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(YoungProfile::new(3, vec![2, 3]).is_ok());
        let err = YoungProfile::new(3, vec![3, 2]).unwrap_err();
        assert!(err.to_string().contains("weakly increasing"));
        assert!(YoungProfile::new(3, vec![0]).is_err());
        assert!(YoungProfile::new(2, vec![1, 1, 2]).is_err());
    }

    #[test]
    fn diagram() {
        let p = YoungProfile::new(5, vec![1, 3, 3, 5]).unwrap();
        assert_eq!(p.mu(), vec![4, 2, 2, 0]);
        assert_eq!(p.mu_size(), 8);
        assert!(!p.is_vanishing());
        assert!(YoungProfile::new(3, vec![1, 1]).unwrap().is_vanishing());
    }

    #[test]
    fn enumeration_counts() {
        // Σ_{s=1..N} C(N+s−1, s)
        let counts: Vec<usize> = (1..=5).map(|n| YoungProfile::enumerate(n).len()).collect();
        assert_eq!(counts, vec![1, 5, 19, 69, 251]);
    }
}
