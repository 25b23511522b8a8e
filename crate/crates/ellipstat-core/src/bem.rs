//! `P¹` continuous Galerkin quadrature of the electrostatic energy.
//!
//! The energy of a density `σ` on the disc `A` is the symmetric double
//! integral
//!
//! ```text
//! I_σ = (1/4π) ∬_{A×A} σ(x) σ(y) / |x − y| ds_x ds_y,
//! ```
//!
//! discretized here with continuous piecewise-linear elements on a
//! [`TriangleMesh`]: `I_σ ≈ cᵀ M c` where `c` holds the nodal values of `σ`
//! and `M_ij = (1/4π) ∬ φ_i(x) φ_j(y)/|x − y|`. Since affine densities are
//! reproduced exactly by their `P¹` interpolant, the only discretization
//! errors are the polygonal rim and the quadrature itself.
//!
//! Every triangle is charted from the simplex `Σ = {0 ≤ v ≤ u ≤ 1}` by
//! `χ(u,v) = A + u(B−A) + v(C−B)`, with barycentrics `(1−u, u−v, v)` and
//! `ds = 2|T| du dv`. Triangle pairs fall into four classes by the number
//! of shared nodes, and each class gets its own rule:
//!
//! * **separated** — tensorized Gauss of order `q` on each collapsed
//!   square, dropping to the fixed far tier (order 2) once the centroid
//!   distance exceeds four times the larger diameter;
//! * **identical** — the difference `z = (u₁−u₂, v₁−v₂)` is radialized as
//!   `z = ξ δ(η)` over three cones (`δ = (1,η), (η,1), (1−η,−η)`), whose
//!   slice parametrizations carry Jacobian `ξ(1−ξ)² s`; the `ξ` cancels
//!   the kernel's `1/(ξ|Mδ|)` exactly, leaving an analytic integrand on
//!   `[0,1]⁴` integrated together with its argument swap;
//! * **shared edge** — with the shared edge charted first in both
//!   triangles, the kernel depends on `e = (u₁−u₂, v₁, v₂)` only; four
//!   simplex cones (two per sign of `u₁−u₂`) radialize `e = ξ δ(η₁,η₂)`
//!   with net weights `ξη₁(1−ξ)` and `ξ(1−ξ)`, the remaining edge
//!   coordinate staying free;
//! * **shared vertex** — with the shared vertex charted first, the kernel
//!   depends on all four coordinates; two cones split `u₁ ≷ u₂` with
//!   weight `ξ²η₂`.
//!
//! In each singular class the `η`-dependent direction `δ` is the only
//! place the triangle geometry enters the denominator `|Mδ|`, so the
//! `(ξ,s,t)`-sums of weights times basis products are precomputed once per
//! order into reference tables; a pair then costs a handful of norms and
//! fused multiply-adds per `η`-node.
//!
//! Assembly sums unordered triangle pairs into per-node-pair buckets with
//! compensated addition in a fixed `(t₁, t₂, a, b)` order. The row range
//! is processed in fixed-size batches whose rows may be computed
//! concurrently but are merged strictly in order, so the matrix is
//! bit-identical for any worker count.

#[allow(unused_imports)]
use crate::fmath::*;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geometry::AffineDensity;
use crate::mesh::TriangleMesh;
use crate::quadrature::GaussLegendre;
use crate::sum::Kahan;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default tensor-Gauss order for separated pairs.
pub const DEFAULT_Q: u32 = 4;
/// Default tensor-Gauss order for the regularized singular transforms.
pub const DEFAULT_Q_SING: u32 = 6;

/// Order of the fixed far tier for well-separated pairs.
const FAR_ORDER: u32 = 2;
/// Centroid distance, in units of the larger triangle diameter, beyond
/// which the far tier applies.
const FAR_DISTANCE_FACTOR: f64 = 4.0;
/// Rows of the pair loop merged per parallel batch.
const ROW_BATCH: usize = 16;

/// Failures of the pair quadrature or assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BemError {
    /// A triangle has zero area; the chart (and the kernel transforms)
    /// degenerate.
    DegenerateTriangle,
    /// A quadrature order was zero.
    ZeroQuadratureOrder,
}

impl core::fmt::Display for BemError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::DegenerateTriangle => write!(f, "triangle has zero area"),
            Self::ZeroQuadratureOrder => write!(f, "quadrature order must be at least 1"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BemError {}

/// Relation of a triangle pair, by shared node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    /// No shared node.
    Separated,
    /// Exactly one shared node.
    SharedVertex,
    /// Two shared nodes (a conforming edge).
    SharedEdge,
    /// All three nodes shared.
    Identical,
}

/// A triangle detached from its mesh: global node ids plus coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshTriangle {
    /// Global node indices.
    pub nodes: [usize; 3],
    /// Vertex coordinates, in node order.
    pub vertices: [[f64; 2]; 3],
}

impl MeshTriangle {
    /// The `t`-th triangle of `m`.
    pub fn from_mesh(m: &TriangleMesh, t: usize) -> Self {
        let nodes = m.triangles()[t];
        let p = m.nodes();
        Self { nodes, vertices: [p[nodes[0]], p[nodes[1]], p[nodes[2]]] }
    }

    /// Twice the (unsigned) area.
    fn two_area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
    }

    fn centroid(&self) -> [f64; 2] {
        let [a, b, c] = self.vertices;
        // Grouped so that exchanging the last two vertices — which is how
        // a mirror image of the mesh stores this triangle — produces the
        // same bits; the far/near grading then never splits a mirrored
        // pair of triangle pairs across the threshold.
        [
            a[0] + ((b[0] - a[0]) + (c[0] - a[0])) / 3.0,
            a[1] + ((b[1] - a[1]) + (c[1] - a[1])) / 3.0,
        ]
    }

    fn diameter(&self) -> f64 {
        let [a, b, c] = self.vertices;
        let e = |p: [f64; 2], q: [f64; 2]| {
            let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
            (dx * dx + dy * dy).sqrt()
        };
        e(a, b).max(e(b, c)).max(e(c, a))
    }

    /// Vertices permuted so local index `perm[k]` lands in slot `k`.
    fn permuted(&self, perm: [usize; 3]) -> ([usize; 3], [[f64; 2]; 3]) {
        (
            [self.nodes[perm[0]], self.nodes[perm[1]], self.nodes[perm[2]]],
            [self.vertices[perm[0]], self.vertices[perm[1]], self.vertices[perm[2]]],
        )
    }
}

/// Pair classification plus the canonical vertex orders the singular
/// transforms expect: shared nodes first, aligned between the triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairArrangement {
    /// The shared-node class.
    pub class: PairClass,
    /// Local vertex order of the first triangle (slot → local index).
    pub order1: [usize; 3],
    /// Local vertex order of the second triangle, aligned with `order1`.
    pub order2: [usize; 3],
}

/// Classifies a pair and fixes the canonical shared-node ordering.
///
/// For a shared edge the two shared nodes are ordered by global id, so the
/// result does not depend on the argument order or on either triangle's
/// internal vertex order; for a shared vertex each triangle is rotated to
/// put the shared node first.
pub fn classify_pair(t1: &MeshTriangle, t2: &MeshTriangle) -> PairArrangement {
    let mut shared: [usize; 3] = [usize::MAX; 3];
    let mut count = 0;
    for &n in &t1.nodes {
        if t2.nodes.contains(&n) {
            shared[count] = n;
            count += 1;
        }
    }
    let pos = |t: &MeshTriangle, n: usize| t.nodes.iter().position(|&m| m == n).unwrap();
    match count {
        0 => PairArrangement { class: PairClass::Separated, order1: [0, 1, 2], order2: [0, 1, 2] },
        1 => {
            let rot = |p: usize| [p, (p + 1) % 3, (p + 2) % 3];
            PairArrangement {
                class: PairClass::SharedVertex,
                order1: rot(pos(t1, shared[0])),
                order2: rot(pos(t2, shared[0])),
            }
        }
        2 => {
            let (p, q) = (shared[0].min(shared[1]), shared[0].max(shared[1]));
            let order = |t: &MeshTriangle| {
                let (i, j) = (pos(t, p), pos(t, q));
                [i, j, 3 - i - j]
            };
            PairArrangement { class: PairClass::SharedEdge, order1: order(t1), order2: order(t2) }
        }
        _ => {
            let order2 = [pos(t2, t1.nodes[0]), pos(t2, t1.nodes[1]), pos(t2, t1.nodes[2])];
            PairArrangement { class: PairClass::Identical, order1: [0, 1, 2], order2 }
        }
    }
}

/// `P¹` barycentrics on the reference simplex.
#[inline]
fn basis(u: f64, v: f64) -> [f64; 3] {
    [1.0 - u, u - v, v]
}

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
fn gl01(n: u32) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(n as usize);
    let x = rule.nodes().iter().map(|&t| 0.5 * (t + 1.0)).collect();
    let w = rule.weights().iter().map(|&t| 0.5 * t).collect();
    (x, w)
}

// ---------------------------------------------------------------------------
// Reference tables for the singular transforms.
// ---------------------------------------------------------------------------

/// Per-order reference data: for each cone/region and each `η`-node, the
/// direction `δ` entering `|Mδ|` and the `(ξ,s,t)`-summed weight-times-basis
/// table `S[a][b]`, with the `η` weights folded in. A pair integral is then
/// `scale · Σ S[a][b] / |Mδ|`.
struct SingularTables {
    /// Identical pairs: 3 cones × `q` nodes; `δ` is 2-dimensional.
    ident: Vec<([f64; 2], [[f64; 3]; 3])>,
    /// Shared edge: 4 regions × `q²` nodes; `δ` is 3-dimensional in
    /// `(u₁−u₂, v₁, v₂)`.
    edge: Vec<([f64; 3], [[f64; 3]; 3])>,
    /// Shared vertex: 2 regions × `q³` nodes; `δ` is 4-dimensional in
    /// `(u₁, v₁, u₂, v₂)`.
    vertex: Vec<([f64; 4], [[f64; 3]; 3])>,
}

impl SingularTables {
    fn new(q_sing: u32) -> Self {
        let (x, w) = gl01(q_sing);
        let n = x.len();
        let mut ident = Vec::with_capacity(3 * n);
        for cone in 0..3 {
            for ie in 0..n {
                let (eta, weta) = (x[ie], w[ie]);
                let delta = match cone {
                    0 => [1.0, eta],
                    1 => [eta, 1.0],
                    _ => [1.0 - eta, -eta],
                };
                let mut s_tab = [[0.0f64; 3]; 3];
                for ix in 0..n {
                    let (xi, wxi) = (x[ix], w[ix]);
                    let d = [xi * delta[0], xi * delta[1]];
                    for is in 0..n {
                        let (s, ws) = (x[is], w[is]);
                        for it in 0..n {
                            let (t, wt) = (x[it], w[it]);
                            let base = match cone {
                                0 => [(1.0 - xi) * s, (1.0 - xi) * s * t],
                                1 => [xi * (1.0 - eta) + s * (1.0 - xi), t * s * (1.0 - xi)],
                                _ => {
                                    [xi * eta + s * (1.0 - xi), xi * eta + t * s * (1.0 - xi)]
                                }
                            };
                            let weight =
                                weta * wxi * ws * wt * (1.0 - xi) * (1.0 - xi) * s;
                            let p = basis(base[0] + d[0], base[1] + d[1]);
                            let q = basis(base[0], base[1]);
                            for a in 0..3 {
                                for b in 0..3 {
                                    s_tab[a][b] += weight * (p[a] * q[b] + q[a] * p[b]);
                                }
                            }
                        }
                    }
                }
                ident.push((delta, s_tab));
            }
        }

        let mut edge = Vec::with_capacity(4 * n * n);
        for region in 0..4 {
            for i1 in 0..n {
                let (e1, we1) = (x[i1], w[i1]);
                for i2 in 0..n {
                    let (e2, we2) = (x[i2], w[i2]);
                    // δ in (h, v₁, v₂) with h = u₁ − u₂; the mirrored
                    // regions negate h.
                    let delta = match region {
                        0 => [e1 * (1.0 - e2), 1.0, e1 * e2],
                        1 => [1.0 - e1, e2, e1],
                        2 => [-(e1 * (1.0 - e2)), e1 * e2, 1.0],
                        _ => [-(1.0 - e1), e1, e2],
                    };
                    let mut s_tab = [[0.0f64; 3]; 3];
                    for ix in 0..n {
                        let (xi, wxi) = (x[ix], w[ix]);
                        let (h, v1, v2) = (xi * delta[0], xi * delta[1], xi * delta[2]);
                        let cone_weight = match region {
                            0 | 2 => xi * e1 * (1.0 - xi),
                            _ => xi * (1.0 - xi),
                        };
                        for is in 0..n {
                            let (s, ws) = (x[is], w[is]);
                            // The free edge coordinate runs over [ξ, 1] for
                            // the triangle whose edge variable dominates.
                            let (u1, u2) = if region < 2 {
                                let u1 = xi + s * (1.0 - xi);
                                (u1, u1 - h)
                            } else {
                                let u2 = xi + s * (1.0 - xi);
                                (u2 + h, u2)
                            };
                            let weight = we1 * we2 * wxi * ws * cone_weight;
                            let p = basis(u1, v1);
                            let q = basis(u2, v2);
                            for a in 0..3 {
                                for b in 0..3 {
                                    s_tab[a][b] += weight * p[a] * q[b];
                                }
                            }
                        }
                    }
                    edge.push((delta, s_tab));
                }
            }
        }

        let mut vertex = Vec::with_capacity(2 * n * n * n);
        for region in 0..2 {
            for i1 in 0..n {
                let (e1, we1) = (x[i1], w[i1]);
                for i2 in 0..n {
                    let (e2, we2) = (x[i2], w[i2]);
                    for i3 in 0..n {
                        let (e3, we3) = (x[i3], w[i3]);
                        // δ in (u₁, v₁, u₂, v₂); region 1 swaps the roles.
                        let delta = if region == 0 {
                            [1.0, e1, e2, e2 * e3]
                        } else {
                            [e2, e2 * e3, 1.0, e1]
                        };
                        let mut s_tab = [[0.0f64; 3]; 3];
                        for ix in 0..n {
                            let (xi, wxi) = (x[ix], w[ix]);
                            let weight = we1 * we2 * we3 * wxi * xi * xi * e2;
                            let p = basis(xi * delta[0], xi * delta[1]);
                            let q = basis(xi * delta[2], xi * delta[3]);
                            for a in 0..3 {
                                for b in 0..3 {
                                    s_tab[a][b] += weight * p[a] * q[b];
                                }
                            }
                        }
                        vertex.push((delta, s_tab));
                    }
                }
            }
        }

        Self { ident, edge, vertex }
    }
}

// ---------------------------------------------------------------------------
// Per-class pair blocks (canonical vertex order).
// ---------------------------------------------------------------------------

type Block = [[f64; 3]; 3];

fn transpose(b: Block) -> Block {
    let mut out = [[0.0; 3]; 3];
    for (a, row) in b.iter().enumerate() {
        for (bb, &v) in row.iter().enumerate() {
            out[bb][a] = v;
        }
    }
    out
}

/// Identical-pair block in the triangle's own vertex order.
fn identical_block(v: &[[f64; 2]; 3], tables: &SingularTables) -> Block {
    let m = [v[1][0] - v[0][0], v[2][0] - v[1][0], v[1][1] - v[0][1], v[2][1] - v[1][1]];
    let two_area = (m[0] * m[3] - m[2] * m[1]).abs();
    let mut out = [[0.0f64; 3]; 3];
    for (delta, s_tab) in &tables.ident {
        let dx = m[0] * delta[0] + m[1] * delta[1];
        let dy = m[2] * delta[0] + m[3] * delta[1];
        let inv = 1.0 / (dx * dx + dy * dy).sqrt();
        for a in 0..3 {
            for b in 0..3 {
                out[a][b] += s_tab[a][b] * inv;
            }
        }
    }
    let scale = two_area * two_area / (4.0 * PI);
    for row in &mut out {
        for v in row {
            *v *= scale;
        }
    }
    out
}

/// Shared-edge block in canonical order `(P, Q, R₁) × (P, Q, R₂)`.
///
/// The oriented transform below is not symmetric under reversing the
/// shared edge, while a mirror image of the mesh presents the edge
/// reversed; averaging the two orientations (a quadrature-error-sized
/// correction) makes the rule reflection-covariant.
fn edge_block(v1: &[[f64; 2]; 3], v2: &[[f64; 2]; 3], tables: &SingularTables) -> Block {
    let b1 = edge_block_oriented(v1, v2, tables);
    let r1 = [v1[1], v1[0], v1[2]];
    let r2 = [v2[1], v2[0], v2[2]];
    let b2 = edge_block_oriented(&r1, &r2, tables);
    let swap = [1usize, 0, 2];
    let mut out = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            out[a][b] = 0.5 * (b1[a][b] + b2[swap[a]][swap[b]]);
        }
    }
    out
}

fn edge_block_oriented(v1: &[[f64; 2]; 3], v2: &[[f64; 2]; 3], tables: &SingularTables) -> Block {
    // Columns of the 2×3 matrix taking (h, v₁, v₂) to x − y:
    // Q−P, R₁−Q, Q−R₂.
    let c0 = [v1[1][0] - v1[0][0], v1[1][1] - v1[0][1]];
    let c1 = [v1[2][0] - v1[1][0], v1[2][1] - v1[1][1]];
    let c2 = [v2[1][0] - v2[2][0], v2[1][1] - v2[2][1]];
    let two_area = |t: &[[f64; 2]; 3]| {
        ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]))
            .abs()
    };
    let mut out = [[0.0f64; 3]; 3];
    for (delta, s_tab) in &tables.edge {
        let dx = c0[0] * delta[0] + c1[0] * delta[1] + c2[0] * delta[2];
        let dy = c0[1] * delta[0] + c1[1] * delta[1] + c2[1] * delta[2];
        let inv = 1.0 / (dx * dx + dy * dy).sqrt();
        for a in 0..3 {
            for b in 0..3 {
                out[a][b] += s_tab[a][b] * inv;
            }
        }
    }
    let scale = two_area(v1) * two_area(v2) / (4.0 * PI);
    for row in &mut out {
        for v in row {
            *v *= scale;
        }
    }
    out
}

/// Shared-vertex block in canonical order `(A, B₁, C₁) × (A, B₂, C₂)`.
fn vertex_block(v1: &[[f64; 2]; 3], v2: &[[f64; 2]; 3], tables: &SingularTables) -> Block {
    // Columns taking (u₁, v₁, u₂, v₂) to x − y:
    // B₁−A, C₁−B₁, −(B₂−A), −(C₂−B₂).
    let c = [
        [v1[1][0] - v1[0][0], v1[1][1] - v1[0][1]],
        [v1[2][0] - v1[1][0], v1[2][1] - v1[1][1]],
        [v2[0][0] - v2[1][0], v2[0][1] - v2[1][1]],
        [v2[1][0] - v2[2][0], v2[1][1] - v2[2][1]],
    ];
    let two_area = |t: &[[f64; 2]; 3]| {
        ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]))
            .abs()
    };
    let mut out = [[0.0f64; 3]; 3];
    for (delta, s_tab) in &tables.vertex {
        let dx = c[0][0] * delta[0] + c[1][0] * delta[1] + c[2][0] * delta[2] + c[3][0] * delta[3];
        let dy = c[0][1] * delta[0] + c[1][1] * delta[1] + c[2][1] * delta[2] + c[3][1] * delta[3];
        let inv = 1.0 / (dx * dx + dy * dy).sqrt();
        for a in 0..3 {
            for b in 0..3 {
                out[a][b] += s_tab[a][b] * inv;
            }
        }
    }
    let scale = two_area(v1) * two_area(v2) / (4.0 * PI);
    for row in &mut out {
        for v in row {
            *v *= scale;
        }
    }
    out
}

/// Mapped quadrature points with weight-scaled basis values for one
/// triangle at one tensor order.
struct MappedRule {
    pts: Vec<[f64; 2]>,
    /// `w_k · φ_a(k)`, with `2|T|` and the collapsed-square Jacobian folded
    /// into `w_k`.
    wb: Vec<[f64; 3]>,
}

impl MappedRule {
    fn new(v: &[[f64; 2]; 3], x: &[f64], w: &[f64]) -> Self {
        let two_area = ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
            - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]))
            .abs();
        let n = x.len();
        let mut pts = Vec::with_capacity(n * n);
        let mut wb = Vec::with_capacity(n * n);
        for i in 0..n {
            let (s, ws) = (x[i], w[i]);
            for j in 0..n {
                let (t, wt) = (x[j], w[j]);
                let (u, vv) = (s, s * t);
                let weight = two_area * ws * wt * s;
                pts.push([
                    v[0][0] + u * (v[1][0] - v[0][0]) + vv * (v[2][0] - v[1][0]),
                    v[0][1] + u * (v[1][1] - v[0][1]) + vv * (v[2][1] - v[1][1]),
                ]);
                let lam = basis(u, vv);
                wb.push([weight * lam[0], weight * lam[1], weight * lam[2]]);
            }
        }
        Self { pts, wb }
    }
}

/// Separated-pair block by tensor Gauss on both collapsed squares.
fn separated_block(r1: &MappedRule, r2: &MappedRule) -> Block {
    let mut out = [[0.0f64; 3]; 3];
    for (p, wa) in r1.pts.iter().zip(&r1.wb) {
        for (q, wbv) in r2.pts.iter().zip(&r2.wb) {
            let dx = p[0] - q[0];
            let dy = p[1] - q[1];
            let inv = 1.0 / (dx * dx + dy * dy).sqrt();
            for a in 0..3 {
                let t = wa[a] * inv;
                for b in 0..3 {
                    out[a][b] += t * wbv[b];
                }
            }
        }
    }
    for row in &mut out {
        for v in row {
            *v /= 4.0 * PI;
        }
    }
    out
}

fn far_pair(t1: &MeshTriangle, t2: &MeshTriangle) -> bool {
    let (c1, c2) = (t1.centroid(), t2.centroid());
    let (dx, dy) = (c1[0] - c2[0], c1[1] - c2[1]);
    let d = t1.diameter().max(t2.diameter());
    dx * dx + dy * dy > (FAR_DISTANCE_FACTOR * FAR_DISTANCE_FACTOR) * (d * d)
}

/// The pair block in the triangles' own local vertex orders.
fn pair_block(
    t1: &MeshTriangle,
    t2: &MeshTriangle,
    q: u32,
    q_sing: u32,
    tables: &SingularTables,
) -> Result<Block, BemError> {
    if t1.two_area() == 0.0 || t2.two_area() == 0.0 {
        return Err(BemError::DegenerateTriangle);
    }
    // Fix the computation side once so that swapping the arguments returns
    // the exact transpose, bit for bit.
    if t1.nodes > t2.nodes {
        return Ok(transpose(pair_block(t2, t1, q, q_sing, tables)?));
    }
    let arr = classify_pair(t1, t2);
    let block = match arr.class {
        PairClass::Separated => {
            let order = if far_pair(t1, t2) { FAR_ORDER } else { q };
            let (x, w) = gl01(order);
            separated_block(
                &MappedRule::new(&t1.vertices, &x, &w),
                &MappedRule::new(&t2.vertices, &x, &w),
            )
        }
        PairClass::Identical => {
            let canon = identical_block(&t1.vertices, tables);
            // Map slots back through the second triangle's vertex
            // alignment (the first is the identity by construction).
            let mut out = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    out[a][arr.order2[b]] = canon[a][b];
                }
            }
            out
        }
        PairClass::SharedEdge | PairClass::SharedVertex => {
            let (_, v1) = t1.permuted(arr.order1);
            let (_, v2) = t2.permuted(arr.order2);
            let canon = match arr.class {
                PairClass::SharedEdge => edge_block(&v1, &v2, tables),
                _ => vertex_block(&v1, &v2, tables),
            };
            let mut out = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    out[arr.order1[a]][arr.order2[b]] = canon[a][b];
                }
            }
            out
        }
    };
    Ok(block)
}

/// One Galerkin interaction `(1/4π) ∬ φ_a(x) φ_b(y)/|x−y| ds_x ds_y`.
///
/// `basis` selects the local `P¹` functions on `t1` and `t2` by vertex
/// index. The singular transforms are chosen from the shared global node
/// ids, so the triangles must come from one consistent numbering.
/// Swapping `(t1, t2)` together with the basis pair returns the identical
/// value.
pub fn pair_integral(
    t1: &MeshTriangle,
    t2: &MeshTriangle,
    basis: (usize, usize),
    q: u32,
    q_sing: u32,
) -> Result<f64, BemError> {
    if q == 0 || q_sing == 0 {
        return Err(BemError::ZeroQuadratureOrder);
    }
    let tables = SingularTables::new(q_sing);
    let block = pair_block(t1, t2, q, q_sing, &tables)?;
    Ok(block[basis.0][basis.1])
}

// ---------------------------------------------------------------------------
// Assembly.
// ---------------------------------------------------------------------------

/// The symmetric Galerkin matrix `M_ij = (1/4π) ∬ φ_i φ_j / |x−y|`.
///
/// Stored as the packed upper triangle; the quadratic form uses
/// compensated summation in a fixed entry order.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMatrix {
    dim: usize,
    packed: Vec<f64>,
}

impl EnergyMatrix {
    /// Node count.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.dim);
        i * self.dim - i * (i + 1) / 2 + j
    }

    /// Entry `M_ij` (symmetric in its arguments).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i.min(j), i.max(j));
        self.packed[self.index(i, j)]
    }

    /// `cᵀ M c`, with compensated summation over the packed entries.
    ///
    /// Panics if `c.len()` differs from the dimension.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        assert_eq!(c.len(), self.dim, "coefficient vector length mismatch");
        let mut acc = Kahan::new();
        let mut k = 0;
        for i in 0..self.dim {
            acc.add(self.packed[k] * c[i] * c[i]);
            k += 1;
            for j in i + 1..self.dim {
                acc.add(2.0 * self.packed[k] * c[i] * c[j]);
                k += 1;
            }
        }
        acc.value()
    }

    /// The packed upper triangle, row by row — the canonical bytes for
    /// determinism comparisons.
    pub fn packed(&self) -> &[f64] {
        &self.packed
    }
}

/// Contributions of one row of the unordered pair loop, in emission order.
fn row_contributions(
    t1: usize,
    tris: &[MeshTriangle],
    near: &[MappedRule],
    far: &[MappedRule],
    tables: &SingularTables,
) -> Vec<(u32, u32, f64)> {
    let count = tris.len() - t1;
    let mut out = Vec::with_capacity(count * 9);
    let a1 = &tris[t1];

    // Identical pair first (t2 == t1): each unordered node pair once.
    let block = identical_block(&a1.vertices, tables);
    for a in 0..3 {
        for b in 0..3 {
            let (i, j) = (a1.nodes[a], a1.nodes[b]);
            if i <= j {
                out.push((i as u32, j as u32, block[a][b]));
            }
        }
    }

    for (offset, a2) in tris[t1 + 1..].iter().enumerate() {
        let t2 = t1 + 1 + offset;
        let arr = classify_pair(a1, a2);
        let (nodes1, nodes2, block) = match arr.class {
            PairClass::Separated => {
                let b = if far_pair(a1, a2) {
                    separated_block(&far[t1], &far[t2])
                } else {
                    separated_block(&near[t1], &near[t2])
                };
                (a1.nodes, a2.nodes, b)
            }
            PairClass::SharedEdge => {
                let (n1, v1) = a1.permuted(arr.order1);
                let (n2, v2) = a2.permuted(arr.order2);
                (n1, n2, edge_block(&v1, &v2, tables))
            }
            PairClass::SharedVertex => {
                let (n1, v1) = a1.permuted(arr.order1);
                let (n2, v2) = a2.permuted(arr.order2);
                (n1, n2, vertex_block(&v1, &v2, tables))
            }
            PairClass::Identical => unreachable!("distinct mesh triangles share 3 nodes"),
        };
        // Unordered triangle pair: the mirrored direction is implied, so a
        // contribution landing on the diagonal enters twice.
        for a in 0..3 {
            for b in 0..3 {
                let (i, j) = (nodes1[a], nodes2[b]);
                let v = block[a][b];
                if i == j {
                    out.push((i as u32, i as u32, 2.0 * v));
                } else {
                    out.push((i.min(j) as u32, i.max(j) as u32, v));
                }
            }
        }
    }
    out
}

/// Assembles the `P¹` Galerkin energy matrix of the mesh.
///
/// `q` is the tensor order for separated pairs (the far tier stays at the
/// fixed order 2 beyond four diameters of separation); `q_sing` the order
/// inside the singular transforms. The accumulation order is fixed, so the
/// result is bit-identical across runs and worker counts.
pub fn assemble(m: &TriangleMesh, q: u32, q_sing: u32) -> Result<EnergyMatrix, BemError> {
    if q == 0 || q_sing == 0 {
        return Err(BemError::ZeroQuadratureOrder);
    }
    let tris: Vec<MeshTriangle> =
        (0..m.triangles().len()).map(|t| MeshTriangle::from_mesh(m, t)).collect();
    for t in &tris {
        if t.two_area() == 0.0 {
            return Err(BemError::DegenerateTriangle);
        }
    }
    let (xq, wq) = gl01(q);
    let (xf, wf) = gl01(FAR_ORDER);
    let near: Vec<MappedRule> = tris.iter().map(|t| MappedRule::new(&t.vertices, &xq, &wq)).collect();
    let far: Vec<MappedRule> = tris.iter().map(|t| MappedRule::new(&t.vertices, &xf, &wf)).collect();
    let tables = SingularTables::new(q_sing);

    let n = m.nodes().len();
    let mut packed = alloc::vec![0.0f64; n * (n + 1) / 2];
    let mut comp = alloc::vec![0.0f64; n * (n + 1) / 2];

    let mut batch_start = 0;
    while batch_start < tris.len() {
        let batch_end = (batch_start + ROW_BATCH).min(tris.len());
        let rows: Vec<Vec<(u32, u32, f64)>> = {
            #[cfg(feature = "parallel")]
            {
                (batch_start..batch_end)
                    .into_par_iter()
                    .map(|t1| row_contributions(t1, &tris, &near, &far, &tables))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (batch_start..batch_end)
                    .map(|t1| row_contributions(t1, &tris, &near, &far, &tables))
                    .collect()
            }
        };
        for row in rows {
            for (i, j, v) in row {
                let (i, j) = (i as usize, j as usize);
                let idx = i * n - i * (i + 1) / 2 + j;
                // Kahan step on the bucket.
                let y = v - comp[idx];
                let t = packed[idx] + y;
                comp[idx] = (t - packed[idx]) - y;
                packed[idx] = t;
            }
        }
        batch_start = batch_end;
    }
    Ok(EnergyMatrix { dim: n, packed })
}

/// Nodal values of the affine density on the mesh — its exact `P¹`
/// interpolant, since the density is affine.
pub fn nodal_values(m: &TriangleMesh, d: &AffineDensity) -> Vec<f64> {
    let e = m.ellipse();
    m.nodes().iter().map(|p| d.evaluate(&e, p[0], p[1])).collect()
}

/// Galerkin energy `cᵀ M c` of the density at explicit quadrature orders.
pub fn bem_energy_with(
    m: &TriangleMesh,
    d: &AffineDensity,
    q: u32,
    q_sing: u32,
) -> Result<f64, BemError> {
    let matrix = assemble(m, q, q_sing)?;
    Ok(matrix.quadratic_form(&nodal_values(m, d)))
}

/// Galerkin energy at the default orders.
pub fn bem_energy(m: &TriangleMesh, d: &AffineDensity) -> Result<f64, BemError> {
    bem_energy_with(m, d, DEFAULT_Q, DEFAULT_Q_SING)
}
