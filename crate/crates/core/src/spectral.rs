//! Spectral families `e(lambda)` with the strict sublevel convention, the
//! checks of their defining properties, and Riemann-sum reconstruction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{leq, Element, C64};
use crate::cocountable::StepFunction;
use crate::document::ElementDocument;
use crate::error::{Error, Result};
use crate::lattice::positive_part;
use crate::matrix::{Eigen, EigenCluster, MatrixElement, CLUSTER_GAP};
use crate::norm::order_norm;
use crate::report::CheckRecord;
use crate::tolerance::Tolerance;

/// Models with a computable spectral decomposition.
pub trait Spectral: Element {
    type Decomp: Clone + fmt::Debug + Send + Sync;

    /// Decomposition of a hermitian element; `NotHermitian` otherwise.
    fn decompose(&self, tol: &Tolerance) -> Result<Self::Decomp>;

    /// Increasing distinct spectral values (probe values for functions).
    fn spectral_values(d: &Self::Decomp) -> Vec<f64>;

    /// `e(lambda)` and, when `lambda` had to be moved off a numerical
    /// cluster, the value actually used.
    fn sublevel(&self, d: &Self::Decomp, lambda: f64) -> (Self, Option<f64>);

    /// A key that is equal for two `lambda` exactly when `e(lambda)` is,
    /// if the model can tell.
    fn level_key(d: &Self::Decomp, lambda: f64) -> Option<usize>;

    /// `x v 0` computed directly from the decomposition.
    fn oracle_positive_part(&self, d: &Self::Decomp) -> Self;
}

/// Eigen clusters with cumulative projector sums.
#[derive(Debug, Clone)]
pub struct MatrixSpectrum {
    pub eigen: Eigen,
    pub clusters: Vec<EigenCluster>,
    levels: Vec<MatrixElement>,
}

impl MatrixSpectrum {
    fn count_below(&self, lambda: f64) -> usize {
        self.clusters.iter().take_while(|c| c.hi < lambda).count()
    }
}

impl Spectral for MatrixElement {
    type Decomp = MatrixSpectrum;

    fn decompose(&self, tol: &Tolerance) -> Result<MatrixSpectrum> {
        let eigen = self.eig_hermitian(tol)?;
        let clusters = eigen.clusters(CLUSTER_GAP);
        let mut levels = vec![self.zero_like()];
        for c in &clusters {
            let next = levels.last().unwrap().add(&c.projector);
            levels.push(next);
        }
        Ok(MatrixSpectrum {
            eigen,
            clusters,
            levels,
        })
    }

    fn spectral_values(d: &MatrixSpectrum) -> Vec<f64> {
        d.clusters.iter().map(|c| c.value).collect()
    }

    /// Clusters entirely below `lambda`; a `lambda` inside a cluster's
    /// spread `(lo, hi]` is treated as `lo`.
    fn sublevel(&self, d: &MatrixSpectrum, lambda: f64) -> (Self, Option<f64>) {
        let k = d.count_below(lambda);
        let moved = d
            .clusters
            .get(k)
            .filter(|c| c.lo < lambda && lambda <= c.hi)
            .map(|c| c.lo);
        (d.levels[k].clone(), moved)
    }

    fn level_key(d: &MatrixSpectrum, lambda: f64) -> Option<usize> {
        Some(d.count_below(lambda))
    }

    fn oracle_positive_part(&self, d: &MatrixSpectrum) -> Self {
        d.eigen.apply(|l| l.max(0.0))
    }
}

/// Sorted distinct real parts of a function's probe values.
#[derive(Debug, Clone)]
pub struct ProbeSpectrum {
    pub values: Vec<f64>,
    pub has_tail: bool,
}

impl Spectral for StepFunction {
    type Decomp = ProbeSpectrum;

    fn decompose(&self, tol: &Tolerance) -> Result<ProbeSpectrum> {
        self.require_hermitian(tol)?;
        let mut values: Vec<f64> = self.probe_values(tol).iter().map(|v| v.re).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(ProbeSpectrum {
            values,
            has_tail: self.tail().is_some(),
        })
    }

    fn spectral_values(d: &ProbeSpectrum) -> Vec<f64> {
        d.values.clone()
    }

    fn sublevel(&self, _d: &ProbeSpectrum, lambda: f64) -> (Self, Option<f64>) {
        (self.strict_sublevel(lambda), None)
    }

    fn level_key(d: &ProbeSpectrum, lambda: f64) -> Option<usize> {
        (!d.has_tail).then(|| d.values.iter().take_while(|&&v| v < lambda).count())
    }

    fn oracle_positive_part(&self, _d: &ProbeSpectrum) -> Self {
        self.map(
            |v| C64::new(v.re.max(0.0), 0.0),
            |t| {
                let abs = t.conj().mul(t).sqrt();
                t.add(&abs).scale(C64::new(0.5, 0.0))
            },
        )
    }
}

/// `lambda -> e(lambda)`, the projection onto the strict sublevel set
/// `{x < lambda}`: increasing, left-continuous, 0 at or below the bottom
/// of the spectrum and 1 above its top.
#[derive(Debug, Clone)]
pub struct SpectralFamily<E: Spectral> {
    pub element: E,
    pub decomp: E::Decomp,
    pub breakpoints: Vec<f64>,
}

impl<E: Spectral> SpectralFamily<E> {
    pub fn new(x: &E, tol: &Tolerance) -> Result<Self> {
        let x = {
            x.require_hermitian(tol)?;
            x.hermitian_part()
        };
        let decomp = x.decompose(tol)?;
        let breakpoints = E::spectral_values(&decomp);
        Ok(Self {
            element: x,
            decomp,
            breakpoints,
        })
    }

    pub fn at(&self, lambda: f64) -> E {
        self.element.sublevel(&self.decomp, lambda).0
    }

    /// The value `lambda` is moved to when it falls inside a cluster.
    pub fn perturbation(&self, lambda: f64) -> Option<f64> {
        self.element.sublevel(&self.decomp, lambda).1
    }

    /// `lambda` after any cluster perturbation.
    pub fn effective(&self, lambda: f64) -> f64 {
        self.perturbation(lambda).unwrap_or(lambda)
    }

    pub fn min(&self) -> f64 {
        self.breakpoints.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// Breakpoints, the midpoints between them, and one point beyond each
    /// end, in increasing order.
    pub fn check_grid(&self) -> Vec<f64> {
        let mut g = vec![self.min() - 1.0];
        for (k, &b) in self.breakpoints.iter().enumerate() {
            if k > 0 {
                g.push(0.5 * (self.breakpoints[k - 1] + b));
            }
            g.push(b);
        }
        g.push(self.max() + 1.0);
        g
    }

    /// Smallest gap between breakpoints, or 1 for a single breakpoint.
    fn min_gap(&self) -> f64 {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).fold(1.0, f64::min)
    }

    /// The family as intervals `(lo, hi]` with their projection; the first
    /// interval is unbounded below and the last unbounded above.
    pub fn intervals(&self) -> Vec<(Option<f64>, Option<f64>, E)> {
        let b = &self.breakpoints;
        let mut out = Vec::with_capacity(b.len() + 1);
        for k in 0..=b.len() {
            let lo = k.checked_sub(1).map(|i| b[i]);
            let hi = b.get(k).copied();
            let probe = match (lo, hi) {
                (_, Some(h)) => h,
                (Some(l), None) => l + 1.0,
                (None, None) => 0.0,
            };
            out.push((lo, hi, self.at(probe)));
        }
        out
    }

    /// Checks the defining properties on [`Self::check_grid`]: monotone,
    /// bottom 0 and top 1, left-continuous, the compression bounds
    /// `e x <= lambda e` and `(1 - e) x >= lambda (1 - e)`, commutation, and
    /// agreement with `RP((lambda - x) v 0)` built from annihilators.
    pub fn verify(&self, tol: &Tolerance) -> Vec<CheckRecord> {
        let x = &self.element;
        let one = x.one_like();
        let zero = x.zero_like();
        let grid = self.check_grid();
        let fams: Vec<E> = grid.iter().map(|&l| self.at(l)).collect();
        let scale = x.magnitude(tol).max(1.0);
        let eq_tol = Tolerance {
            eps_eq: 10.0 * tol.eps_eq * scale,
            ..*tol
        };
        let wit = |xs: &[&E]| xs.iter().map(|e| e.to_document()).collect::<Vec<ElementDocument>>();
        let mut out = Vec::new();
        let mut record = |name: &str, bad: Option<(String, Vec<ElementDocument>)>| {
            out.push(match bad {
                None => CheckRecord::pass(name, format!("{} grid points", grid.len())),
                Some((d, w)) => CheckRecord::fail(name, d, w),
            })
        };

        let monotone = (1..grid.len()).find(|&k| {
            !(leq(&fams[k - 1], &fams[k], tol) && fams[k - 1].mul(&fams[k]).approx_eq(&fams[k - 1], &eq_tol))
        });
        record(
            "spectral.monotone",
            monotone.map(|k| (format!("e({}) not <= e({})", grid[k - 1], grid[k]), wit(&[x]))),
        );

        let bottom = grid
            .iter()
            .zip(&fams)
            .find(|(&l, e)| l <= self.min() && !e.approx_eq(&zero, &eq_tol));
        record(
            "spectral.bottom",
            bottom.map(|(l, _)| (format!("e({l}) != 0 at or below the spectrum"), wit(&[x]))),
        );

        let top = grid
            .iter()
            .zip(&fams)
            .find(|(&l, e)| l > self.max() && !e.approx_eq(&one, &eq_tol));
        record(
            "spectral.top",
            top.map(|(l, _)| (format!("e({l}) != 1 above the spectrum"), wit(&[x]))),
        );

        let gap = self.min_gap() / 4.0;
        let left = grid.iter().zip(&fams).find_map(|(&l, e)| {
            (0..4)
                .map(|j| gap * 0.5f64.powi(j))
                .find(|d| !self.at(l - d).approx_eq(e, &eq_tol))
                .map(|d| (l, d))
        });
        record(
            "spectral.left_continuous",
            left.map(|(l, d)| (format!("e({}) != e({l})", l - d), wit(&[x]))),
        );

        let compression = grid.iter().zip(&fams).find(|(&l, e)| {
            let lam = self.effective(l);
            let ec = one.sub(e);
            !(leq(&e.mul(x).hermitian_part(), &e.scale_real(lam), tol)
                && leq(&ec.scale_real(lam), &ec.mul(x).hermitian_part(), tol))
        });
        record(
            "spectral.compression",
            compression.map(|(l, e)| (format!("compression bound fails at {l}"), wit(&[x, e]))),
        );

        let commute = fams.iter().enumerate().find(|(k, e)| {
            !e.mul(x).approx_eq(&x.mul(e), &eq_tol)
                || fams[*k..].iter().any(|f| !e.mul(f).approx_eq(&f.mul(e), &eq_tol))
        });
        record(
            "spectral.commute",
            commute.map(|(k, e)| (format!("e({}) does not commute", grid[k]), wit(&[x, e]))),
        );

        let unique = grid.iter().zip(&fams).find_map(|(&l, e)| {
            let lam = self.effective(l);
            match positive_part(&one.scale_real(lam).sub(x), tol) {
                Ok(p) => {
                    let other = p.right_projection(tol);
                    (!other.approx_eq(e, &eq_tol))
                        .then(|| (format!("annihilator route differs at {l}"), wit(&[x, &other])))
                }
                Err(err) => Some((err.to_string(), wit(&[x]))),
            }
        });
        record("spectral.unique", unique);
        out
    }

    /// `sum xi_i (e(lambda_i) - e(lambda_{i-1}))` and its order-norm
    /// distance to `x`.
    pub fn reconstruct(&self, p: &Partition, tol: &Tolerance) -> Result<Reconstruction<E>> {
        let x = &self.element;
        if x.order_bracket(tol).is_none() {
            return Err(Error::NotBounded);
        }
        let (lo, hi) = (p.grid[0], *p.grid.last().unwrap());
        if !(lo < self.min() && hi > self.max()) {
            return Err(Error::BadPartition(format!(
                "grid [{lo}, {hi}] does not strictly cover the spectrum [{}, {}]",
                self.min(),
                self.max()
            )));
        }
        let mut approx = x.zero_like();
        let mut prev = self.at(lo);
        let mut prev_key = E::level_key(&self.decomp, lo);
        for (i, &l) in p.grid.iter().enumerate().skip(1) {
            let key = E::level_key(&self.decomp, l);
            if key.is_some() && key == prev_key {
                continue;
            }
            let cur = self.at(l);
            approx = approx.add(&cur.sub(&prev).scale_real(p.tags[i - 1]));
            prev = cur;
            prev_key = key;
        }
        let error = order_norm(&x.sub(&approx).hermitian_part(), tol)?;
        Ok(Reconstruction {
            approx,
            error,
            mesh: p.mesh(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction<E> {
    pub approx: E,
    pub error: f64,
    pub mesh: f64,
}

/// `riemann_reconstruct(x, p)` for a bounded hermitian `x`.
pub fn riemann_reconstruct<E: Spectral>(x: &E, p: &Partition, tol: &Tolerance) -> Result<Reconstruction<E>> {
    SpectralFamily::new(x, tol)?.reconstruct(p, tol)
}

/// Where each cell's sample point sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagRule {
    Left,
    Mid,
    Right,
}

impl TagRule {
    fn pick(self, a: f64, b: f64) -> f64 {
        match self {
            TagRule::Left => a,
            TagRule::Mid => 0.5 * (a + b),
            TagRule::Right => b,
        }
    }
}

/// A grid `lambda_0 < ... < lambda_m` with one sample point per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub grid: Vec<f64>,
    pub tags: Vec<f64>,
}

impl Partition {
    pub fn new(grid: Vec<f64>, tags: Vec<f64>) -> Result<Self> {
        let p = Self { grid, tags };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rule(grid: Vec<f64>, rule: TagRule) -> Result<Self> {
        let tags = grid.windows(2).map(|w| rule.pick(w[0], w[1])).collect();
        Self::new(grid, tags)
    }

    /// `lambda_k = lo + k / denom` for `k = 0..=cells`. Grids with integer
    /// `lo` and dividing denominators are nested exactly.
    pub fn regular(lo: f64, denom: u32, cells: usize, rule: TagRule) -> Result<Self> {
        if denom == 0 {
            return Err(Error::BadPartition("denominator must be positive".into()));
        }
        let grid = (0..=cells).map(|k| lo + k as f64 / denom as f64).collect();
        Self::with_rule(grid, rule)
    }

    /// Uniform grid with mesh at most `mesh` whose ends lie `mesh / 2`
    /// outside `[lo, hi]`.
    pub fn covering(lo: f64, hi: f64, mesh: f64, rule: TagRule) -> Result<Self> {
        if !(mesh > 0.0 && mesh.is_finite() && lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::BadPartition(format!(
                "cannot cover [{lo}, {hi}] with mesh {mesh}"
            )));
        }
        let (a, b) = (lo - mesh / 2.0, hi + mesh / 2.0);
        let cells = ((b - a) / mesh).ceil().max(1.0) as usize;
        let grid = (0..=cells)
            .map(|k| {
                if k == cells {
                    b
                } else {
                    a + (b - a) * k as f64 / cells as f64
                }
            })
            .collect();
        Self::with_rule(grid, rule)
    }

    pub fn mesh(&self) -> f64 {
        self.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 2 {
            return Err(Error::BadPartition("grid needs at least two points".into()));
        }
        if self.grid.iter().chain(&self.tags).any(|v| !v.is_finite()) {
            return Err(Error::BadPartition("non-finite value".into()));
        }
        if let Some(k) = self.grid.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::BadPartition(format!(
                "grid not strictly increasing at index {}",
                k + 1
            )));
        }
        if self.tags.len() + 1 != self.grid.len() {
            return Err(Error::BadPartition(format!(
                "expected {} sample points, found {}",
                self.grid.len() - 1,
                self.tags.len()
            )));
        }
        if let Some(i) =
            (0..self.tags.len()).find(|&i| !(self.grid[i] <= self.tags[i] && self.tags[i] <= self.grid[i + 1]))
        {
            return Err(Error::BadPartition(format!("sample point {i} outside its cell")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocountable::Point;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn close(a: &MatrixElement, b: &MatrixElement) {
        assert!(a.distance(b, &tol()) < 1e-9, "{a:?} vs {b:?}");
    }

    #[test]
    fn diagonal_family() {
        let f = SpectralFamily::new(&MatrixElement::diag(&[1.0, 2.0]), &tol()).unwrap();
        close(&f.at(1.0), &MatrixElement::zeros(2));
        close(&f.at(1.5), &MatrixElement::diag(&[1.0, 0.0]));
        close(&f.at(2.0), &MatrixElement::diag(&[1.0, 0.0]));
        close(&f.at(2.5), &MatrixElement::identity(2));
        assert!(f.verify(&tol()).iter().all(|r| r.pass));
    }

    #[test]
    fn zero_family() {
        let f = SpectralFamily::new(&MatrixElement::zeros(2), &tol()).unwrap();
        close(&f.at(0.0), &MatrixElement::zeros(2));
        close(&f.at(-1.0), &MatrixElement::zeros(2));
        close(&f.at(1e-12), &MatrixElement::identity(2));
    }

    #[test]
    fn stepfn_family() {
        let x = StepFunction::with_exceptions(C64::new(3.0, 0.0), &[("0.5", C64::new(-1.0, 0.0))]).unwrap();
        let f = SpectralFamily::new(&x, &tol()).unwrap();
        let half = Point::parse("0.5").unwrap();
        assert_eq!(f.at(0.0), StepFunction::point_indicator(half));
        assert_eq!(f.at(4.0), StepFunction::real(1.0));
        let bad: Vec<_> = f.verify(&tol()).into_iter().filter(|r| !r.pass).collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn reconstruct_example() {
        let x = MatrixElement::diag(&[1.0, 2.0]);
        let p = Partition::new(vec![0.0, 1.5, 3.0], vec![0.75, 2.25]).unwrap();
        let r = riemann_reconstruct(&x, &p, &tol()).unwrap();
        close(&r.approx, &MatrixElement::diag(&[0.75, 2.25]));
        assert!((r.error - 0.25).abs() < 1e-9);
        assert_eq!(r.mesh, 1.5);

        let c = MatrixElement::identity(3).scale_real(0.7);
        let p = Partition::new(vec![0.0, 0.5, 1.0], vec![0.25, 0.7]).unwrap();
        assert!(riemann_reconstruct(&c, &p, &tol()).unwrap().error < 1e-9);
    }

    #[test]
    fn refinement_chain_on_swap() {
        let x = MatrixElement::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let mut last = f64::INFINITY;
        for denom in [1u32, 2, 4] {
            let p = Partition::regular(-2.0, denom, 4 * denom as usize, TagRule::Left).unwrap();
            let r = riemann_reconstruct(&x, &p, &tol()).unwrap();
            assert!(
                r.error <= r.mesh + 1e-9 && r.error <= last + 1e-9,
                "{} {}",
                r.error,
                r.mesh
            );
            last = r.error;
        }
    }

    #[test]
    fn partition_errors() {
        assert!(Partition::new(vec![0.0], vec![]).is_err());
        assert!(Partition::new(vec![0.0, 0.0], vec![0.0]).is_err());
        assert!(Partition::new(vec![0.0, 1.0], vec![2.0]).is_err());
        assert!(Partition::new(vec![0.0, 1.0], vec![]).is_err());
        let x = MatrixElement::diag(&[1.0, 2.0]);
        let p = Partition::new(vec![1.0, 3.0], vec![1.0]).unwrap();
        assert!(matches!(
            riemann_reconstruct(&x, &p, &tol()),
            Err(Error::BadPartition(_))
        ));
        let p = Partition::covering(1.0, 2.0, 0.1, TagRule::Left).unwrap();
        assert!(p.mesh() <= 0.1 + 1e-12 && p.grid[0] < 1.0 && *p.grid.last().unwrap() > 2.0);
    }

    #[test]
    fn unbounded_function_rejected() {
        use crate::cocountable::TailExpr;
        let x = StepFunction::real(0.0).with_tail(TailExpr::index());
        let f = SpectralFamily::new(&x, &tol()).unwrap();
        let bad: Vec<_> = f.verify(&tol()).into_iter().filter(|r| !r.pass).collect();
        assert!(bad.is_empty(), "{bad:#?}");
        let p = Partition::covering(-1.0, 100.0, 1.0, TagRule::Left).unwrap();
        assert_eq!(f.reconstruct(&p, &tol()).unwrap_err(), Error::NotBounded);
    }
}
