//! Stencil graph over a chart window and the Dijkstra seed path.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::chart::{Chart, CoordinateSystem};
use crate::error::{Error, Result};
use crate::geometry::{cpoint, simpson_segment, CPoint, Density};

/// Simpson panels per graph edge.
const EDGE_PANELS: usize = 4;
/// Endpoints are wired to every node within this many spacings.
const ATTACH_RADIUS: f64 = 2.5;

/// Neighbour stencil of the grid graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Stencil {
    Eight,
    /// Eight plus the knight moves.
    #[default]
    Sixteen,
}

impl TryFrom<u8> for Stencil {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            8 => Ok(Stencil::Eight),
            16 => Ok(Stencil::Sixteen),
            _ => Err(Error::InvalidArgument(format!("stencil must be 8 or 16, got {n}"))),
        }
    }
}

impl From<Stencil> for u8 {
    fn from(s: Stencil) -> u8 {
        match s {
            Stencil::Eight => 8,
            Stencil::Sixteen => 16,
        }
    }
}

impl Stencil {
    /// Offsets with one representative per undirected edge direction.
    fn half_offsets(self) -> &'static [(i64, i64)] {
        const EIGHT: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
        const SIXTEEN: [(i64, i64); 8] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (2, -1), (1, -2)];
        match self {
            Stencil::Eight => &EIGHT,
            Stencil::Sixteen => &SIXTEEN,
        }
    }
}

/// The coarse grid a solve started from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub coordinate_system: CoordinateSystem,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub h: f64,
    pub stencil: Stencil,
}

impl GridSpec {
    fn dims(&self) -> (usize, usize) {
        let nx = ((self.x_max - self.x_min) / self.h).round().max(1.0) as usize;
        let ny = ((self.y_max - self.y_min) / self.h).round().max(1.0) as usize;
        (nx + 1, ny + 1)
    }

    fn node(&self, i: usize, j: usize) -> CPoint {
        cpoint(self.x_min + i as f64 * self.h, self.y_min + j as f64 * self.h)
    }
}

/// Which window sides are open, i.e. not clipped to the chart domain.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OpenSides {
    pub left: bool,
    pub right: bool,
    pub bottom: bool,
    pub top: bool,
}

pub(crate) struct Seed {
    /// Chart vertices from the first endpoint to the second.
    pub vertices: Vec<CPoint>,
    pub touches_window: bool,
}

#[derive(Clone, Copy, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest stencil-graph path from `z1` to `z2` (chart coordinates).
///
/// The endpoints are joined to nearby nodes and to each other directly, so
/// a path always exists when the chord between them has finite weight.
pub(crate) fn dijkstra_seed<D: Density + ?Sized>(
    chart: &Chart,
    rho: &D,
    grid: &GridSpec,
    open: OpenSides,
    z1: CPoint,
    z2: CPoint,
) -> Result<Seed> {
    let (nx, ny) = grid.dims();
    let weight = |a: CPoint, b: CPoint| simpson_segment(rho, chart.plane_of(a), chart.plane_of(b), EDGE_PANELS);

    let mut index = vec![usize::MAX; nx * ny];
    let mut points = Vec::new();
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let z = grid.node(i, j);
            if chart.boundary_distance(z) >= 0.5 * grid.h && rho.density(chart.plane_of(z)).is_finite() {
                index[j * nx + i] = points.len();
                points.push(z);
                cells.push((i, j));
            }
        }
    }
    let source = points.len();
    let target = source + 1;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); points.len() + 2];
    let link = |adj: &mut Vec<Vec<(usize, f64)>>, a: usize, b: usize, w: f64| {
        if w.is_finite() {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
    };

    for (k, &(i, j)) in cells.iter().enumerate() {
        for &(di, dj) in grid.stencil.half_offsets() {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if ni < 0 || nj < 0 || ni >= nx as i64 || nj >= ny as i64 {
                continue;
            }
            let other = index[nj as usize * nx + ni as usize];
            if other != usize::MAX {
                link(&mut adj, k, other, weight(points[k], points[other]));
            }
        }
    }

    let reach = (ATTACH_RADIUS * grid.h).max(0.0);
    for (end, z) in [(source, z1), (target, z2)] {
        let i0 = ((z.re - reach - grid.x_min) / grid.h).floor().max(0.0) as usize;
        let i1 = (((z.re + reach - grid.x_min) / grid.h).ceil().max(0.0) as usize).min(nx - 1);
        let j0 = ((z.im - reach - grid.y_min) / grid.h).floor().max(0.0) as usize;
        let j1 = (((z.im + reach - grid.y_min) / grid.h).ceil().max(0.0) as usize).min(ny - 1);
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = index[j * nx + i];
                if k != usize::MAX && (points[k] - z).norm() <= reach {
                    link(&mut adj, end, k, weight(z, points[k]));
                }
            }
        }
    }
    link(&mut adj, source, target, weight(z1, z2));

    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut prev = vec![usize::MAX; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State { cost: 0.0, node: source });
    while let Some(State { cost, node }) = heap.pop() {
        if node == target {
            break;
        }
        if cost > dist[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let c = cost + w;
            if c < dist[next] {
                dist[next] = c;
                prev[next] = node;
                heap.push(State { cost: c, node: next });
            }
        }
    }
    if !dist[target].is_finite() {
        return Err(Error::PointsTooCloseToBoundary);
    }

    let (last_i, last_j) = (nx - 1, ny - 1);
    let mut touches_window = false;
    let mut vertices = vec![z2];
    let mut node = prev[target];
    while node != source {
        let (i, j) = cells[node];
        touches_window |= (open.left && i == 0)
            || (open.right && i == last_i)
            || (open.bottom && j == 0)
            || (open.top && j == last_j);
        vertices.push(points[node]);
        node = prev[node];
    }
    vertices.push(z1);
    vertices.reverse();
    Ok(Seed { vertices, touches_window })
}
