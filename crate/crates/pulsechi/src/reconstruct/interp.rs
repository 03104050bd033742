//! Scattered-to-grid interpolation of characteristic-function samples.
//!
//! Samples are conjugate-completed, deduplicated, and triangulated; the
//! interpolant is linear on each triangle and zero outside the hull. When the
//! cloud is too thin to triangulate (all samples on a line) a Gaussian
//! radial-basis blend takes over so curve-confined data still interpolates.

use delaunator::{triangulate, Point};
use ndarray::Array2;

use crate::linalg::solve_spd;
use crate::reconstruct::plan::CharacteristicSample;
use crate::{C64, Error, Result};

/// Grid geometry: a `nodes_per_side` square lattice over `[-extent, extent]^2`.
///
/// The node count is odd so the origin is always a lattice point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub extent: f64,
    pub spacing: f64,
    pub nodes_per_side: usize,
}

impl GridSpec {
    /// Rounds the requested spacing to an odd node count and recomputes the
    /// realized spacing from it.
    pub fn layout(extent: f64, spacing: f64) -> Result<Self> {
        if !extent.is_finite() || extent <= 0.0 {
            return Err(Error::Domain {
                name: "extent",
                value: extent,
                reason: "grid half-width must be positive",
            });
        }
        if !spacing.is_finite() || spacing <= 0.0 || spacing >= extent {
            return Err(Error::Domain {
                name: "spacing",
                value: spacing,
                reason: "grid spacing must lie in (0, extent)",
            });
        }
        let mut nodes = (2.0 * extent / spacing).round() as usize + 1;
        if nodes % 2 == 0 {
            nodes += 1;
        }
        if nodes > 4001 {
            return Err(Error::Domain {
                name: "spacing",
                value: spacing,
                reason: "grid would exceed 4001 nodes per side",
            });
        }
        let realized = 2.0 * extent / (nodes - 1) as f64;
        Ok(Self { extent, spacing: realized, nodes_per_side: nodes })
    }

    pub fn beta_at(&self, ix: usize, iy: usize) -> C64 {
        C64::new(
            -self.extent + ix as f64 * self.spacing,
            -self.extent + iy as f64 * self.spacing,
        )
    }

    pub fn origin_index(&self) -> usize {
        (self.nodes_per_side - 1) / 2
    }
}

/// Characteristic-function values on a square grid, row index = imaginary
/// part, column index = real part.
#[derive(Clone, Debug)]
pub struct ChiGrid {
    spec: GridSpec,
    values: Array2<C64>,
}

impl ChiGrid {
    /// Fills a grid by evaluating `chi` at every node.
    pub fn from_fn(extent: f64, spacing: f64, chi: impl Fn(C64) -> C64) -> Result<Self> {
        let spec = GridSpec::layout(extent, spacing)?;
        let n = spec.nodes_per_side;
        let mut values = Array2::zeros((n, n));
        for iy in 0..n {
            for ix in 0..n {
                values[[iy, ix]] = chi(spec.beta_at(ix, iy));
            }
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &Array2<C64> {
        &self.values
    }

    pub fn beta_at(&self, ix: usize, iy: usize) -> C64 {
        self.spec.beta_at(ix, iy)
    }

    pub fn matches(&self, other: &ChiGrid) -> bool {
        self.spec == other.spec
    }

    /// Largest node magnitude.
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest magnitude on the outermost node ring.
    pub fn boundary_max(&self) -> f64 {
        let n = self.spec.nodes_per_side;
        let mut m = 0.0f64;
        for i in 0..n {
            for &(iy, ix) in &[(0, i), (n - 1, i), (i, 0), (i, n - 1)] {
                m = m.max(self.values[[iy, ix]].norm());
            }
        }
        m
    }

    /// Max deviation from `chi(-beta) = conj(chi(beta))` over node pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.spec.nodes_per_side;
        let mut worst = 0.0f64;
        for iy in 0..n {
            for ix in 0..n {
                let mirrored = self.values[[n - 1 - iy, n - 1 - ix]];
                worst = worst.max((mirrored - self.values[[iy, ix]].conj()).norm());
            }
        }
        worst
    }
}

const BARY_TOL: f64 = 1e-7;
const RADIAL_LIMIT: usize = 1500;

#[derive(Debug)]
struct Buckets {
    cells: Vec<Vec<u32>>,
    gx: usize,
    gy: usize,
    x0: f64,
    y0: f64,
    inv_cell: f64,
    x1: f64,
    y1: f64,
}

impl Buckets {
    fn cell_of(&self, x: f64, y: f64) -> usize {
        let cx = (((x - self.x0) * self.inv_cell) as isize).clamp(0, self.gx as isize - 1);
        let cy = (((y - self.y0) * self.inv_cell) as isize).clamp(0, self.gy as isize - 1);
        cy as usize * self.gx + cx as usize
    }
}

#[derive(Debug)]
enum Body {
    Triangulated { triangles: Vec<usize>, buckets: Buckets },
    Radial { weights: Vec<C64>, scale: f64 },
}

/// Evaluates the interpolated characteristic function anywhere in the plane.
#[derive(Debug)]
pub struct Interpolant {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<C64>,
    body: Body,
}

impl Interpolant {
    /// Conjugate-completes and deduplicates `samples`, inserts the origin
    /// normalization point, and builds the interpolation body. `extent` only
    /// scales the coverage report on failure.
    pub fn build(samples: &[CharacteristicSample], extent: f64) -> Result<Self> {
        let (xs, ys, values) = prepare_points(samples, extent);
        if xs.len() < 4 {
            return Err(coverage_error(&xs, &ys, extent));
        }
        let points: Vec<Point> =
            xs.iter().zip(&ys).map(|(&x, &y)| Point { x, y }).collect();
        let tri = triangulate(&points);
        let body = if tri.triangles.is_empty() {
            if xs.len() > RADIAL_LIMIT {
                return Err(Error::Coverage {
                    detail: format!(
                        "degenerate sample geometry with {} points exceeds the \
                         radial fallback limit of {RADIAL_LIMIT}",
                        xs.len()
                    ),
                });
            }
            build_radial(&xs, &ys, &values)?
        } else {
            build_buckets(&xs, &ys, tri.triangles)
        };
        Ok(Self { xs, ys, values, body })
    }

    /// True when the radial fallback carries the interpolation.
    pub fn radial_fallback(&self) -> bool {
        matches!(self.body, Body::Radial { .. })
    }

    pub fn eval(&self, beta: C64) -> C64 {
        let (x, y) = (beta.re, beta.im);
        match &self.body {
            Body::Triangulated { triangles, buckets } => {
                if x < buckets.x0 || x > buckets.x1 || y < buckets.y0 || y > buckets.y1 {
                    return C64::new(0.0, 0.0);
                }
                for &t in &buckets.cells[buckets.cell_of(x, y)] {
                    let base = 3 * t as usize;
                    let (ia, ib, ic) =
                        (triangles[base], triangles[base + 1], triangles[base + 2]);
                    let (xa, ya) = (self.xs[ia], self.ys[ia]);
                    let (xb, yb) = (self.xs[ib], self.ys[ib]);
                    let (xc, yc) = (self.xs[ic], self.ys[ic]);
                    let den = (yb - yc) * (xa - xc) + (xc - xb) * (ya - yc);
                    if den == 0.0 {
                        continue;
                    }
                    let la = ((yb - yc) * (x - xc) + (xc - xb) * (y - yc)) / den;
                    let lb = ((yc - ya) * (x - xc) + (xa - xc) * (y - yc)) / den;
                    let lc = 1.0 - la - lb;
                    if la >= -BARY_TOL && lb >= -BARY_TOL && lc >= -BARY_TOL {
                        return self.values[ia] * la + self.values[ib] * lb + self.values[ic] * lc;
                    }
                }
                C64::new(0.0, 0.0)
            }
            Body::Radial { weights, scale } => {
                let mut acc = C64::new(0.0, 0.0);
                for ((&px, &py), &w) in self.xs.iter().zip(&self.ys).zip(weights) {
                    let r2 = (x - px) * (x - px) + (y - py) * (y - py);
                    acc += w * (-r2 / (scale * scale)).exp();
                }
                acc
            }
        }
    }
}

/// Dedup key quantum; mirrored points land on mirrored keys because rounding
/// is symmetric about zero.
fn quantum(extent: f64) -> f64 {
    1e-9 * extent.max(1.0)
}

fn prepare_points(samples: &[CharacteristicSample], extent: f64) -> (Vec<f64>, Vec<f64>, Vec<C64>) {
    use std::collections::HashSet;
    let q = quantum(extent);
    let key = |x: f64, y: f64| ((x / q).round() as i64, (y / q).round() as i64);
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut values = Vec::new();
    let mut push = |xs: &mut Vec<f64>, ys: &mut Vec<f64>, vs: &mut Vec<C64>, x: f64, y: f64, v: C64| {
        if seen.insert(key(x, y)) {
            xs.push(x);
            ys.push(y);
            vs.push(v);
        }
    };
    push(&mut xs, &mut ys, &mut values, 0.0, 0.0, C64::new(1.0, 0.0));
    for s in samples {
        push(&mut xs, &mut ys, &mut values, s.beta.re, s.beta.im, s.value);
    }
    for s in samples {
        push(&mut xs, &mut ys, &mut values, -s.beta.re, -s.beta.im, s.value.conj());
    }
    (xs, ys, values)
}

fn coverage_error(xs: &[f64], ys: &[f64], extent: f64) -> Error {
    let width = extent / 8.0;
    let mut occupied = [false; 8];
    for (&x, &y) in xs.iter().zip(ys) {
        let r = x.hypot(y);
        let bin = ((r / width) as usize).min(7);
        occupied[bin] = true;
    }
    let missing: Vec<String> = occupied
        .iter()
        .enumerate()
        .filter(|&(_, &o)| !o)
        .map(|(k, _)| format!("[{:.2}, {:.2})", k as f64 * width, (k + 1) as f64 * width))
        .collect();
    Error::Coverage {
        detail: format!(
            "need at least 4 distinct samples for interpolation, got {}; \
             uncovered |beta| annuli: {}",
            xs.len(),
            if missing.is_empty() { "none".to_string() } else { missing.join(", ") }
        ),
    }
}

fn build_buckets(xs: &[f64], ys: &[f64], triangles: Vec<usize>) -> Body {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for (&x, &y) in xs.iter().zip(ys) {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let ntri = triangles.len() / 3;
    let g = ((ntri as f64).sqrt().ceil() as usize).clamp(4, 256);
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let inv_cell = g as f64 / span;
    let gx = (((x1 - x0) * inv_cell).ceil() as usize).max(1);
    let gy = (((y1 - y0) * inv_cell).ceil() as usize).max(1);
    let mut buckets = Buckets {
        cells: vec![Vec::new(); gx * gy],
        gx,
        gy,
        x0,
        y0,
        inv_cell,
        x1,
        y1,
    };
    for t in 0..ntri {
        let idx = [triangles[3 * t], triangles[3 * t + 1], triangles[3 * t + 2]];
        let (mut tx0, mut ty0, mut tx1, mut ty1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for &i in &idx {
            tx0 = tx0.min(xs[i]);
            ty0 = ty0.min(ys[i]);
            tx1 = tx1.max(xs[i]);
            ty1 = ty1.max(ys[i]);
        }
        let c0 = buckets.cell_of(tx0, ty0);
        let c1 = buckets.cell_of(tx1, ty1);
        let (cx0, cy0) = (c0 % gx, c0 / gx);
        let (cx1, cy1) = (c1 % gx, c1 / gx);
        for cy in cy0..=cy1 {
            for cx in cx0..=cx1 {
                buckets.cells[cy * gx + cx].push(t as u32);
            }
        }
    }
    Body::Triangulated { triangles, buckets }
}

fn build_radial(xs: &[f64], ys: &[f64], values: &[C64]) -> Result<Body> {
    let n = xs.len();
    let mut spread = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = (xs[i] - xs[j]).hypot(ys[i] - ys[j]);
            spread = spread.max(d);
        }
    }
    let scale = (spread / 8.0).max(1e-6);
    let mut kernel = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let r2 = (xs[i] - xs[j]).powi(2) + (ys[i] - ys[j]).powi(2);
            kernel[[i, j]] = (-r2 / (scale * scale)).exp();
        }
    }
    // escalate the ridge only as far as the factorization forces
    let mut last = None;
    for ridge in [1e-10, 1e-8, 1e-6, 1e-4, 1e-2] {
        let mut k = kernel.clone();
        for i in 0..n {
            k[[i, i]] += ridge;
        }
        match solve_spd(&k, values) {
            Ok(weights) => return Ok(Body::Radial { weights, scale }),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("ridge loop ran"))
}

/// Interpolates `samples` onto a grid, mirroring nodes so Hermitian symmetry
/// holds exactly, and pins the origin node to one.
pub fn interpolate_chi(
    samples: &[CharacteristicSample],
    extent: f64,
    spacing: f64,
) -> Result<ChiGrid> {
    let spec = GridSpec::layout(extent, spacing)?;
    let interp = Interpolant::build(samples, extent)?;
    let n = spec.nodes_per_side;
    let half = spec.origin_index();
    let mut values = Array2::zeros((n, n));
    for iy in 0..=half {
        let row_end = if iy == half { half } else { n - 1 };
        for ix in 0..=row_end {
            let v = interp.eval(spec.beta_at(ix, iy));
            values[[iy, ix]] = v;
            values[[n - 1 - iy, n - 1 - ix]] = v.conj();
        }
    }
    values[[half, half]] = C64::new(1.0, 0.0);
    Ok(ChiGrid { spec, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::plan::{SampleFlags, SampleSource};
    use crate::states::chi_coherent;
    use proptest::prelude::*;

    fn sample(x: f64, y: f64, v: C64) -> CharacteristicSample {
        CharacteristicSample {
            beta: C64::new(x, y),
            value: v,
            source: SampleSource::External,
            flags: SampleFlags::default(),
        }
    }

    fn coherent_disc(alpha: C64, radius: f64, step: f64) -> Vec<CharacteristicSample> {
        let mut out = Vec::new();
        let n = (2.0 * radius / step).ceil() as i64;
        for i in -n..=n {
            for j in -n..=n {
                let b = C64::new(i as f64 * step, j as f64 * step);
                if b.norm() <= radius {
                    out.push(sample(b.re, b.im, chi_coherent(alpha, b)));
                }
            }
        }
        out
    }

    #[test]
    fn layout_keeps_the_origin_on_a_node() {
        let spec = GridSpec::layout(4.0, 0.08).unwrap();
        assert_eq!(spec.nodes_per_side, 101);
        assert!((spec.spacing - 0.08).abs() < 1e-15);
        assert_eq!(spec.beta_at(spec.origin_index(), spec.origin_index()), C64::new(0.0, 0.0));

        let odd = GridSpec::layout(4.0, 0.081).unwrap();
        assert_eq!(odd.nodes_per_side % 2, 1);
        assert!((odd.beta_at(0, 0) - C64::new(-4.0, -4.0)).norm() < 1e-12);

        assert!(GridSpec::layout(0.0, 0.1).is_err());
        assert!(GridSpec::layout(4.0, 5.0).is_err());
        assert!(GridSpec::layout(4.0, 1e-4).is_err());
    }

    #[test]
    fn function_grids_report_peak_and_boundary() {
        let alpha = C64::new(1.5, 0.0);
        let grid = ChiGrid::from_fn(4.0, 0.1, |b| chi_coherent(alpha, b)).unwrap();
        assert!((grid.peak() - 1.0).abs() < 1e-12);
        let expect = (-8.0f64).exp();
        assert!(grid.boundary_max() <= expect * (1.0 + 1e-9));
        assert!(grid.boundary_max() > expect * 0.1);
        assert!(grid.hermitian_defect() < 1e-14);
    }

    #[test]
    fn too_few_samples_report_uncovered_annuli() {
        let samples =
            vec![sample(1.2, 0.0, C64::new(0.4, 0.0)), sample(-1.2, 0.0, C64::new(0.4, 0.0))];
        let err = Interpolant::build(&samples, 4.0).unwrap_err();
        match err {
            Error::Coverage { detail } => {
                assert!(detail.contains("uncovered |beta| annuli"));
                // the origin point and the 1.2 ring are present, the rest is empty
                assert!(detail.contains("[2.00, 2.50)"));
                assert!(!detail.contains("[1.00, 1.50)"));
            }
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn collinear_samples_use_the_radial_fallback() {
        let mut samples = Vec::new();
        for i in 1..=12 {
            let x = 0.25 * i as f64;
            samples.push(sample(x, 0.0, C64::new((-0.5 * x * x).exp(), 0.0)));
        }
        let interp = Interpolant::build(&samples, 4.0).unwrap();
        assert!(interp.radial_fallback());
        for s in &samples {
            assert!(
                (interp.eval(s.beta) - s.value).norm() < 1e-6,
                "radial blend must reproduce its samples"
            );
        }
        // the blend decays once the query leaves the populated line
        assert!(interp.eval(C64::new(0.5, 3.0)).norm() < 1e-3);
    }

    #[test]
    fn dense_coherent_disc_interpolates_below_1e_3() {
        let alpha = C64::new(0.8, 0.0);
        let samples = coherent_disc(alpha, 3.0, 0.035);
        let interp = Interpolant::build(&samples, 2.1).unwrap();
        assert!(!interp.radial_fallback());
        for s in samples.iter().step_by(97) {
            assert!((interp.eval(s.beta) - s.value).norm() < 1e-9, "exact at sample points");
        }
        assert_eq!(interp.eval(C64::new(2.9, 2.9)), C64::new(0.0, 0.0));

        let grid = interpolate_chi(&samples, 2.1, 0.06).unwrap();
        let spec = grid.spec();
        let mut worst = 0.0f64;
        for iy in 0..spec.nodes_per_side {
            for ix in 0..spec.nodes_per_side {
                let b = grid.beta_at(ix, iy);
                worst = worst.max((grid.values()[[iy, ix]] - chi_coherent(alpha, b)).norm());
            }
        }
        assert!(worst < 1e-3, "max interpolation error {worst:.3e}");
    }

    #[test]
    fn interpolated_grids_are_hermitian_and_normalized() {
        // lopsided cloud with no origin sample and no conjugate partners
        let samples = vec![
            sample(0.9, 0.2, C64::new(0.5, 0.1)),
            sample(0.3, 1.1, C64::new(0.3, -0.2)),
            sample(-0.8, 0.7, C64::new(0.2, 0.05)),
            sample(0.2, -1.4, C64::new(0.25, 0.15)),
            sample(1.3, -0.6, C64::new(0.1, 0.0)),
        ];
        let grid = interpolate_chi(&samples, 2.0, 0.1).unwrap();
        assert_eq!(grid.hermitian_defect(), 0.0);
        let c = grid.spec().origin_index();
        assert_eq!(grid.values()[[c, c]], C64::new(1.0, 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn interpolants_reproduce_scattered_cloud_values(
            cells in proptest::sample::subsequence((0usize..49).collect::<Vec<_>>(), 6..30),
            jitter in proptest::collection::vec(-0.3f64..0.3, 30),
            phases in proptest::collection::vec(0.0f64..6.28, 30),
        ) {
            let mut samples = Vec::new();
            for (k, &cell) in cells.iter().enumerate() {
                let (row, col) = (cell / 7, cell % 7);
                let x = (col as f64 - 3.0) * 0.9 + jitter[k];
                let y = (row as f64 - 3.0) * 0.9 + jitter[jitter.len() - 1 - k];
                let v = C64::from_polar(0.8, phases[k]);
                samples.push(sample(x, y, v));
            }
            let interp = Interpolant::build(&samples, 3.0).unwrap();
            for s in &samples {
                prop_assert!((interp.eval(s.beta) - s.value).norm() < 1e-5);
            }
        }
    }
}
