//! Ground truth: weighted enumeration of domain-wall configurations by a
//! transfer matrix, with per-site weights.
//!
//! Conventions: rows are numbered from the top, columns from the right.
//! The horizontal edge `h_k` of a row lies between columns `k` and `k+1`,
//! so `h_0` is the right boundary (arrow pointing right) and `h_N` the left
//! boundary (pointing left). Vertical boundary arrows point into the
//! lattice. Vertex types:
//!
//! | type | left | right | top | bottom | weight |
//! |------|------|-------|-----|--------|--------|
//! | 1    | R    | R     | U   | U      | a      |
//! | 2    | L    | L     | D   | D      | a      |
//! | 3    | R    | R     | D   | D      | b      |
//! | 4    | L    | L     | U   | U      | b      |
//! | 5    | L    | R     | D   | U      | c      |
//! | 6    | R    | L     | U   | D      | c      |
//!
//! Every row holds one more type-5 than type-6 vertex, so all sums are
//! accumulated with type 5 weighted 1 and type 6 weighted `c²`; this gives
//! `Z_N / c^N` and keeps the exact backend rational when only `c²` is.

mod naive;
mod profile;

pub use naive::{naive_configurations, naive_gefp, naive_reduced_partition, NAIVE_CAP};
pub use profile::YoungProfile;

use crate::error::{Error, Result};
use crate::params::{AnisotropyPoint, SpectralData, VertexWeights};
use crate::report::{CorrelationResult, Engine, ParamEcho, Quantity};
use crate::scalar::Scalar;

/// Default largest lattice the oracle accepts.
pub const DEFAULT_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexType {
    A1,
    A2,
    B3,
    B4,
    C5,
    C6,
}

impl VertexType {
    pub fn left_is_l(self) -> bool {
        matches!(self, VertexType::A2 | VertexType::B4 | VertexType::C5)
    }

    pub fn right_is_l(self) -> bool {
        matches!(self, VertexType::A2 | VertexType::B4 | VertexType::C6)
    }

    pub fn top_is_u(self) -> bool {
        matches!(self, VertexType::A1 | VertexType::B4 | VertexType::C6)
    }

    pub fn bottom_is_u(self) -> bool {
        matches!(self, VertexType::A1 | VertexType::B4 | VertexType::C5)
    }

    /// Types compatible with a given right edge and top edge, with their
    /// left edge and bottom edge.
    fn completions(right_is_l: bool, top_is_u: bool) -> &'static [VertexType] {
        match (right_is_l, top_is_u) {
            (false, true) => &[VertexType::A1],
            (false, false) => &[VertexType::B3, VertexType::C5],
            (true, true) => &[VertexType::B4, VertexType::C6],
            (true, false) => &[VertexType::A2],
        }
    }
}

/// The `c` weight, known either directly or only through its square.
#[derive(Debug, Clone, PartialEq)]
pub enum CWeight<S> {
    Value(S),
    Squared(S),
}

/// Per-site `(a, b)` weights on an `N×N` lattice plus a global `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightGrid<S> {
    n: usize,
    a: Vec<Vec<S>>,
    b: Vec<Vec<S>>,
    c: CWeight<S>,
    homogeneous: bool,
    echo: ParamEcho,
}

impl<S: Scalar> WeightGrid<S> {
    pub fn homogeneous(n: usize, w: &VertexWeights<S>) -> Self {
        WeightGrid {
            n,
            a: vec![vec![w.a.clone(); n]; n],
            b: vec![vec![w.b.clone(); n]; n],
            c: CWeight::Value(w.c.clone()),
            homogeneous: true,
            echo: ParamEcho::weights(w),
        }
    }

    /// `a = 1`, `b = t`, `c² = 1 + t² − 2Δt`.
    pub fn from_anisotropy(n: usize, p: &AnisotropyPoint<S>) -> Self {
        WeightGrid {
            n,
            a: vec![vec![S::one(); n]; n],
            b: vec![vec![p.t.clone(); n]; n],
            c: CWeight::Squared(p.c_squared_ratio()),
            homogeneous: true,
            echo: ParamEcho::delta_t(p),
        }
    }

    /// Site `(l, k)` gets `a(λ_k, ν_l)`, `b(λ_k, ν_l)`.
    pub fn from_spectral(spec: &SpectralData<S>, allow_nonphysical: bool) -> Result<Self> {
        let n = spec.size();
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for row in 1..=n {
            let mut ar = Vec::with_capacity(n);
            let mut br = Vec::with_capacity(n);
            for col in 1..=n {
                let (x, y) = spec.site_weights(row, col)?;
                ar.push(x);
                br.push(y);
            }
            a.push(ar);
            b.push(br);
        }
        let c = spec.c()?;
        let grid = WeightGrid {
            n,
            a,
            b,
            c: CWeight::Value(c),
            homogeneous: spec.lambdas.windows(2).all(|w| w[0] == w[1])
                && spec.nus.windows(2).all(|w| w[0] == w[1]),
            echo: ParamEcho::spectral(spec),
        };
        grid.check_weights(allow_nonphysical)?;
        Ok(grid)
    }

    /// Arbitrary per-site tables, indexed `[row − 1][col − 1]`.
    pub fn from_tables(a: Vec<Vec<S>>, b: Vec<Vec<S>>, c: CWeight<S>) -> Result<Self> {
        let n = a.len();
        let square = |t: &Vec<Vec<S>>| t.len() == n && t.iter().all(|r| r.len() == n);
        if !square(&a) || !square(&b) {
            return Err(Error::BadIndex("weight tables must be N×N".into()));
        }
        let first = (a[0][0].clone(), b[0][0].clone());
        let homogeneous = a.iter().flatten().all(|x| *x == first.0)
            && b.iter().flatten().all(|x| *x == first.1);
        Ok(WeightGrid {
            n,
            a,
            b,
            c,
            homogeneous,
            echo: ParamEcho::Custom,
        })
    }

    fn check_weights(&self, allow_nonphysical: bool) -> Result<()> {
        let c_ok = match &self.c {
            CWeight::Value(c) => c.signum() > 0,
            CWeight::Squared(c2) => c2.signum() > 0,
        };
        let sites_ok = self.a.iter().flatten().chain(self.b.iter().flatten()).all(|w| w.signum() > 0);
        if !allow_nonphysical && !(c_ok && sites_ok) {
            return Err(Error::NonphysicalWeights(
                "some site weight is not positive".into(),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn echo(&self) -> &ParamEcho {
        &self.echo
    }

    /// Weight `a` of site `(row, col)`, 1-based.
    pub fn a(&self, row: usize, col: usize) -> &S {
        &self.a[row - 1][col - 1]
    }

    pub fn b(&self, row: usize, col: usize) -> &S {
        &self.b[row - 1][col - 1]
    }

    pub fn c_squared(&self) -> S {
        match &self.c {
            CWeight::Value(c) => c.clone() * c,
            CWeight::Squared(c2) => c2.clone(),
        }
    }

    /// `c^k`; needs `c` itself when `k` is odd.
    pub fn c_power(&self, k: usize) -> Result<S> {
        match &self.c {
            CWeight::Value(c) => Ok(c.powi(k as u32)),
            CWeight::Squared(c2) if k % 2 == 0 => Ok(c2.powi((k / 2) as u32)),
            CWeight::Squared(_) => Err(Error::Unsupported(format!(
                "c^{k} is irrational when only c² is given; use the reduced quantity"
            ))),
        }
    }

    fn weight(&self, row: usize, col: usize, t: VertexType, c2: &S) -> S {
        match t {
            VertexType::A1 | VertexType::A2 => self.a(row, col).clone(),
            VertexType::B3 | VertexType::B4 => self.b(row, col).clone(),
            VertexType::C5 => S::one(),
            VertexType::C6 => c2.clone(),
        }
    }
}

/// Which configurations a transfer pass keeps.
#[derive(Debug, Clone, Copy)]
enum Restriction<'a> {
    None,
    /// Edge `h_{r_j}` of row `j` points left.
    Edges(&'a [usize]),
    /// Vertices `(j, k)` with `k > r_j` are of type 2.
    Frozen(&'a [usize]),
    /// The type-5 vertex of row 1 sits at the given column.
    FirstRowC5(usize),
}

impl Restriction<'_> {
    fn allows(&self, row: usize, col: usize, t: VertexType) -> bool {
        match *self {
            Restriction::None => true,
            Restriction::Edges(r) => row > r.len() || col != r[row - 1] || t.left_is_l(),
            Restriction::Frozen(r) => row > r.len() || col <= r[row - 1] || t == VertexType::A2,
            Restriction::FirstRowC5(r) => row != 1 || (col == r) == (t == VertexType::C5),
        }
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > DEFAULT_CAP {
        return Err(Error::TooLarge {
            what: "N",
            got: n,
            cap: DEFAULT_CAP,
        });
    }
    Ok(())
}

/// Column-by-column transfer. `row_len[l−1]` vertices are processed in row
/// `l`, starting from the right; the row must end with a left-pointing
/// edge. The state is the bitmask of upward vertical arrows on the current
/// frontier plus the current horizontal edge.
fn transfer<S: Scalar>(grid: &WeightGrid<S>, row_len: &[usize], restriction: Restriction) -> S {
    let n = grid.n;
    let c2 = grid.c_squared();
    let width = 1usize << n;
    // index = mask * 2 + (horizontal edge is L)
    let mut states: Vec<Option<S>> = vec![None; 2 * width];
    states[0] = Some(S::one());
    for row in 1..=n {
        let len = row_len[row - 1];
        for col in 1..=len {
            let bit = 1usize << (col - 1);
            let mut next: Vec<Option<S>> = vec![None; 2 * width];
            for (idx, w) in states.iter().enumerate() {
                let Some(w) = w else { continue };
                let mask = idx >> 1;
                let right_is_l = idx & 1 == 1;
                let top_is_u = mask & bit != 0;
                for &t in VertexType::completions(right_is_l, top_is_u) {
                    if !restriction.allows(row, col, t) {
                        continue;
                    }
                    let new_mask = if t.bottom_is_u() { mask | bit } else { mask & !bit };
                    let j = new_mask * 2 + t.left_is_l() as usize;
                    let term = w.clone() * &grid.weight(row, col, t, &c2);
                    next[j] = Some(match next[j].take() {
                        Some(acc) => acc + &term,
                        None => term,
                    });
                }
            }
            states = next;
        }
        // left boundary points left; the next row starts from a right arrow
        let mut next: Vec<Option<S>> = vec![None; 2 * width];
        for mask in 0..width {
            next[mask * 2] = states[mask * 2 + 1].take();
        }
        states = next;
    }
    let last = row_len.last().copied().unwrap_or(0);
    let full = (1usize << last) - 1;
    states[full * 2].take().unwrap_or_else(S::zero)
}

fn full_rows(n: usize) -> Vec<usize> {
    vec![n; n]
}

fn check_profile<S: Scalar>(grid: &WeightGrid<S>, profile: &YoungProfile) -> Result<()> {
    if profile.n() != grid.n {
        return Err(Error::BadIndex(format!(
            "profile is for N = {} but the weight grid has N = {}",
            profile.n(),
            grid.n
        )));
    }
    Ok(())
}

/// `Z_N / c^N`.
pub fn reduced_partition_function<S: Scalar>(grid: &WeightGrid<S>) -> Result<S> {
    check_cap(grid.n)?;
    Ok(transfer(grid, &full_rows(grid.n), Restriction::None))
}

/// `Z_N`, the weighted count of all domain-wall configurations.
pub fn partition_function_oracle<S: Scalar>(grid: &WeightGrid<S>) -> Result<S> {
    Ok(reduced_partition_function(grid)? * &grid.c_power(grid.n)?)
}

fn ratio<S: Scalar>(num: S, den: &S) -> Result<S> {
    num.checked_div(den)
}

/// Probability that edge `h_{r_j}` of row `j` points left for `j = 1..s`.
pub fn gefp_oracle_value<S: Scalar>(grid: &WeightGrid<S>, profile: &YoungProfile) -> Result<S> {
    check_cap(grid.n)?;
    check_profile(grid, profile)?;
    let z = transfer(grid, &full_rows(grid.n), Restriction::None);
    let edges = ratio(transfer(grid, &full_rows(grid.n), Restriction::Edges(profile.r())), &z)?;
    let frozen = ratio(transfer(grid, &full_rows(grid.n), Restriction::Frozen(profile.r())), &z)?;
    let agree = match S::BACKEND {
        crate::scalar::Backend::Exact => edges == frozen,
        crate::scalar::Backend::Float => {
            let d = (edges.clone() - &frozen).abs().to_f64();
            let prec = edges.precision().unwrap_or(53) as i32;
            d <= 2f64.powi(16 - prec)
        }
    };
    if !agree {
        return Err(Error::Inconsistent(format!(
            "edge and frozen-region GEFP differ for {profile}: {} vs {}",
            edges.to_report_string(),
            frozen.to_report_string()
        )));
    }
    Ok(edges)
}

pub fn gefp_oracle<S: Scalar>(
    grid: &WeightGrid<S>,
    profile: &YoungProfile,
) -> Result<CorrelationResult<S>> {
    Ok(CorrelationResult {
        value: gefp_oracle_value(grid, profile)?,
        quantity: Quantity::Gefp,
        engine: Engine::Oracle,
        n: grid.n,
        r: profile.r().to_vec(),
        params: grid.echo.clone(),
    })
}

/// The frozen-region characterisation alone.
pub fn gefp_oracle_frozen<S: Scalar>(grid: &WeightGrid<S>, profile: &YoungProfile) -> Result<S> {
    check_cap(grid.n)?;
    check_profile(grid, profile)?;
    let z = transfer(grid, &full_rows(grid.n), Restriction::None);
    ratio(transfer(grid, &full_rows(grid.n), Restriction::Frozen(profile.r())), &z)
}

/// Probability that the type-5 vertex of the first row sits in column `r`.
pub fn boundary_h_oracle_value<S: Scalar>(grid: &WeightGrid<S>, r: usize) -> Result<S> {
    check_cap(grid.n)?;
    if r == 0 || r > grid.n {
        return Err(Error::BadIndex(format!("r = {r} is outside 1..={}", grid.n)));
    }
    let rows = full_rows(grid.n);
    let z = transfer(grid, &rows, Restriction::None);
    ratio(transfer(grid, &rows, Restriction::FirstRowC5(r)), &z)
}

pub fn boundary_h_oracle<S: Scalar>(grid: &WeightGrid<S>, r: usize) -> Result<CorrelationResult<S>> {
    Ok(CorrelationResult {
        value: boundary_h_oracle_value(grid, r)?,
        quantity: Quantity::BoundaryH,
        engine: Engine::Oracle,
        n: grid.n,
        r: vec![r],
        params: grid.echo.clone(),
    })
}

/// `(H_N^{(1)}, …, H_N^{(N)})`.
pub fn boundary_h_table<S: Scalar>(grid: &WeightGrid<S>) -> Result<Vec<S>> {
    check_cap(grid.n)?;
    let rows = full_rows(grid.n);
    let z = transfer(grid, &rows, Restriction::None);
    (1..=grid.n)
        .map(|r| ratio(transfer(grid, &rows, Restriction::FirstRowC5(r)), &z))
        .collect()
}

/// Partition function of the lattice with the frozen corner removed,
/// divided by `c^N`. Rows `j ≤ s` stop at column `r_j`, where the boundary
/// arrow points left; vertical edges below the removed corner point down.
pub fn reduced_modified_domain_partition<S: Scalar>(
    grid: &WeightGrid<S>,
    profile: &YoungProfile,
) -> Result<S> {
    check_cap(grid.n)?;
    check_profile(grid, profile)?;
    if !grid.homogeneous {
        return Err(Error::Unsupported(
            "the cut-domain identity is defined for homogeneous weights only".into(),
        ));
    }
    let mut rows = full_rows(grid.n);
    for (j, &r) in profile.r().iter().enumerate() {
        rows[j] = r;
    }
    Ok(transfer(grid, &rows, Restriction::None))
}

pub fn modified_domain_partition<S: Scalar>(
    grid: &WeightGrid<S>,
    profile: &YoungProfile,
) -> Result<S> {
    Ok(reduced_modified_domain_partition(grid, profile)? * &grid.c_power(grid.n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::BigFloat;
    use rug::Rational;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from((p, d))
    }

    fn ice(n: usize) -> WeightGrid<Rational> {
        let w = VertexWeights::new(q(1, 1), q(1, 1), q(1, 1), false).unwrap();
        WeightGrid::homogeneous(n, &w)
    }

    #[test]
    fn configuration_counts() {
        let counts: Vec<Rational> = (1..=5).map(|n| partition_function_oracle(&ice(n)).unwrap()).collect();
        assert_eq!(counts, [1, 2, 7, 42, 429].map(|x| q(x, 1)));
    }

    #[test]
    fn two_by_two_partition_function() {
        let w = VertexWeights::new(q(2, 1), q(3, 1), q(5, 1), false).unwrap();
        let z = partition_function_oracle(&WeightGrid::homogeneous(2, &w)).unwrap();
        assert_eq!(z, q(25 * (4 + 9), 1));
    }

    #[test]
    fn small_gefp_values() {
        let g = |n, r: Vec<usize>| gefp_oracle_value(&ice(n), &YoungProfile::new(n, r).unwrap()).unwrap();
        assert_eq!(g(2, vec![2]), q(1, 1));
        assert_eq!(g(2, vec![1, 1]), q(0, 1));
        assert_eq!(g(2, vec![1]), q(1, 2));
    }

    #[test]
    fn boundary_tables() {
        assert_eq!(boundary_h_table(&ice(1)).unwrap(), vec![q(1, 1)]);
        assert_eq!(boundary_h_table(&ice(2)).unwrap(), vec![q(1, 2), q(1, 2)]);
        assert_eq!(boundary_h_table(&ice(3)).unwrap(), vec![q(2, 7), q(3, 7), q(2, 7)]);
        assert!(matches!(boundary_h_oracle_value(&ice(3), 4), Err(Error::BadIndex(_))));
    }

    #[test]
    fn boundary_asymmetry_pins_column_direction() {
        // N = 2: the c-vertex of row 1 is in column 1 (rightmost) when the
        // second column of row 1 is a type-2 vertex (weight a), so H^(1) ∝ a².
        let w = VertexWeights::new(q(2, 1), q(1, 1), q(1, 1), false).unwrap();
        let h = boundary_h_table(&WeightGrid::homogeneous(2, &w)).unwrap();
        assert_eq!(h, vec![q(4, 5), q(1, 5)]);
    }

    #[test]
    fn cut_domain_examples() {
        let grid = ice(2);
        let full = YoungProfile::new(2, vec![2]).unwrap();
        assert_eq!(
            modified_domain_partition(&grid, &full).unwrap(),
            partition_function_oracle(&grid).unwrap()
        );
        let p = YoungProfile::new(2, vec![1]).unwrap();
        assert_eq!(modified_domain_partition(&grid, &p).unwrap(), q(1, 1));
    }

    #[test]
    fn odd_n_needs_c_itself() {
        let p = AnisotropyPoint::new(q(1, 2), q(1, 1), false).unwrap();
        let grid = WeightGrid::from_anisotropy(3, &p);
        assert!(matches!(partition_function_oracle(&grid), Err(Error::Unsupported(_))));
        assert_eq!(reduced_partition_function(&grid).unwrap(), q(7, 1));
    }

    #[test]
    fn cap_is_enforced() {
        let w = VertexWeights::new(q(1, 1), q(1, 1), q(1, 1), false).unwrap();
        let grid = WeightGrid::homogeneous(9, &w);
        assert!(matches!(reduced_partition_function(&grid), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn float_grid_from_spectral() {
        let prec = 128;
        let f = |x: f64| BigFloat::from_f64(prec, x);
        let spec = SpectralData::new(vec![f(1.3), f(1.6)], vec![f(0.1), f(-0.1)], f(0.4)).unwrap();
        let grid = WeightGrid::from_spectral(&spec, false).unwrap();
        assert!(!grid.is_homogeneous());
        let z = partition_function_oracle(&grid).unwrap();
        assert!(z.signum() > 0);
        let bad = SpectralData::new(vec![f(0.1)], vec![f(0.0)], f(0.5)).unwrap();
        assert!(matches!(
            WeightGrid::from_spectral(&bad, false),
            Err(Error::NonphysicalWeights(_))
        ));
    }
}
