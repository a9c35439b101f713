//! Non-uniform frequency grids with nested refinement levels.
//!
//! The range is cut at feature knots (expected peaks, square-root edges).
//! Each segment gets the same number of intervals and a map that clusters
//! points toward its knot: sinh near peaks, sinh of a squared parameter near
//! square-root singularities. Level `l + 1` contains level `l` at its even
//! indices, which is what Richardson extrapolation relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KnotKind {
    /// Expected peak of the given width.
    Peak { width: f64 },
    /// Square-root branch point.
    Singular,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub at: f64,
    pub kind: KnotKind,
}

/// Where a spectrum needs resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Features {
    pub knots: Vec<Knot>,
    /// Centre of the default range.
    pub center: f64,
    /// Typical feature spacing, used for the tail extent.
    pub scale: f64,
    /// Reservoir frequency unit, used for the edge clustering width.
    pub unit: f64,
    /// Spectrum vanishes identically below this frequency.
    pub support_start: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Intervals per segment at refinement level 0.
    pub points_per_segment: usize,
    /// Half-width of the default range in units of the feature scale.
    pub tail_extent: f64,
    /// Clustering width at square-root edges, in reservoir units.
    pub edge_width: f64,
    /// Override for the peak clustering width.
    pub peak_width: Option<f64>,
    /// Explicit range; otherwise derived from the features.
    pub range: Option<(f64, f64)>,
    /// Relative change of the integrated power that stops refinement.
    pub rtol: f64,
    pub max_refinements: u32,
    /// Use exactly this level instead of refining adaptively.
    pub level: Option<u32>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points_per_segment: 32,
            tail_extent: 1e4,
            edge_width: 1e-3,
            peak_width: None,
            range: None,
            rtol: 1e-6,
            max_refinements: 10,
            level: None,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Grid(m.to_string()));
        if self.points_per_segment < 2 {
            return bad("points_per_segment must be at least 2");
        }
        if !(self.tail_extent > 0.0 && self.tail_extent.is_finite()) {
            return bad("tail_extent must be positive");
        }
        if !(self.edge_width > 0.0 && self.edge_width.is_finite()) {
            return bad("edge_width must be positive");
        }
        if let Some(w) = self.peak_width {
            if !(w > 0.0 && w.is_finite()) {
                return bad("peak_width must be positive");
            }
        }
        if let Some((lo, hi)) = self.range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return bad("range must be finite with lo < hi");
            }
        }
        if !(self.rtol > 0.0) {
            return bad("rtol must be positive");
        }
        if self.max_refinements > 16 || self.level.is_some_and(|l| l > 16) {
            return bad("refinement level above 16");
        }
        Ok(())
    }

    /// The range the grid will span for these features.
    pub fn range_for(&self, features: &Features) -> (f64, f64) {
        if let Some(r) = self.range {
            return r;
        }
        let half = self.tail_extent * features.scale;
        let mut lo = features.center - half;
        let hi = features.center + half;
        if let Some(s) = features.support_start {
            lo = s;
        }
        (lo, hi.max(lo + half))
    }
}

fn rank(kind: &KnotKind) -> u8 {
    match kind {
        KnotKind::Singular => 2,
        KnotKind::Peak { .. } => 1,
        KnotKind::Boundary => 0,
    }
}

/// Distance from the clustering knot at fractional position `t`.
fn cluster(kind: KnotKind, edge_width: f64, len: f64, t: f64) -> f64 {
    match kind {
        KnotKind::Peak { width } => width * (t * (len / width).asinh()).sinh(),
        KnotKind::Singular => edge_width * (t * t * (len / edge_width).asinh()).sinh(),
        KnotKind::Boundary => len * t,
    }
}

/// Knots inside the range, merged and bracketed by the range ends.
fn arrange(features: &Features, spec: &GridSpec) -> Vec<Knot> {
    let (lo, hi) = spec.range_for(features);
    let tol = 1e-12 * lo.abs().max(hi.abs()).max(features.unit);
    let mut knots: Vec<Knot> = features
        .knots
        .iter()
        .filter(|k| k.at >= lo - tol && k.at <= hi + tol)
        .map(|k| match (k.kind, spec.peak_width) {
            (KnotKind::Peak { .. }, Some(width)) => Knot {
                at: k.at,
                kind: KnotKind::Peak { width },
            },
            _ => *k,
        })
        .collect();
    knots.push(Knot {
        at: lo,
        kind: KnotKind::Boundary,
    });
    knots.push(Knot {
        at: hi,
        kind: KnotKind::Boundary,
    });
    knots.sort_by(|a, b| a.at.total_cmp(&b.at));
    let mut merged: Vec<Knot> = Vec::with_capacity(knots.len());
    for k in knots {
        match merged.last_mut() {
            Some(last) if (k.at - last.at).abs() <= tol => {
                if rank(&k.kind) > rank(&last.kind) {
                    last.kind = k.kind;
                }
                // range ends keep their exact position
                if k.at == lo || k.at == hi {
                    last.at = k.at;
                }
            }
            _ => merged.push(k),
        }
    }
    merged
}

fn push_half(out: &mut Vec<f64>, a: f64, b: f64, toward_a: Option<KnotKind>, toward_b: Option<KnotKind>, n: usize, ew: f64) {
    let len = b - a;
    for k in 1..=n {
        let x = if k == n {
            b
        } else if let Some(kind) = toward_a {
            a + cluster(kind, ew, len, k as f64 / n as f64)
        } else if let Some(kind) = toward_b {
            b - cluster(kind, ew, len, (n - k) as f64 / n as f64)
        } else {
            a + len * (k as f64 / n as f64)
        };
        out.push(x);
    }
}

/// Grid at refinement `level`.
pub fn build_grid(features: &Features, spec: &GridSpec, level: u32) -> Result<Vec<f64>> {
    spec.validate()?;
    let knots = arrange(features, spec);
    let n = spec
        .points_per_segment
        .checked_mul(1usize << level)
        .ok_or_else(|| Error::Grid("too many points".into()))?;
    let ew = spec.edge_width * features.unit;
    let clustered = |k: &Knot| (k.kind != KnotKind::Boundary).then_some(k.kind);
    let mut out = vec![knots[0].at];
    for pair in knots.windows(2) {
        let (ka, kb) = (pair[0], pair[1]);
        match (clustered(&ka), clustered(&kb)) {
            (Some(x), Some(y)) => {
                let m = 0.5 * (ka.at + kb.at);
                push_half(&mut out, ka.at, m, Some(x), None, n, ew);
                push_half(&mut out, m, kb.at, None, Some(y), n, ew);
            }
            (a, b) => push_half(&mut out, ka.at, kb.at, a, b, n, ew),
        }
    }
    check_grid(&out)?;
    Ok(out)
}

pub fn check_grid(omegas: &[f64]) -> Result<()> {
    if omegas.iter().any(|w| !w.is_finite()) {
        return Err(Error::Grid("non-finite frequency".into()));
    }
    if let Some(i) = omegas.windows(2).position(|p| p[1] <= p[0]) {
        return Err(Error::Grid(format!(
            "not strictly increasing at index {}: {} then {}",
            i + 1,
            omegas[i],
            omegas[i + 1]
        )));
    }
    Ok(())
}

/// Composite trapezoid on a non-uniform grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}
