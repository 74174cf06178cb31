//! Adaptive quadtree/octree meshes of the unit square/cube and the RT0 face
//! numbering on top of them.
//!
//! Coordinates are integers on a grid of `2^MAX_LEVEL` cells per axis, so
//! anchors and face positions are exact. Leaves are kept in Morton order.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Result, SaddleError};

/// Finest representable level.
pub const MAX_LEVEL: u32 = 20;
/// Largest level accepted by [`build_uniform`].
pub const MAX_UNIFORM_LEVEL: u32 = 14;
const ROOT_LEN: u32 = 1 << MAX_LEVEL;

/// A leaf cell. `anchor` is the lower-left(-front) corner in grid units of
/// `2^-MAX_LEVEL`; unused coordinates are zero in 2D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Element {
    pub level: u32,
    pub anchor: [u32; 3],
    pub index: usize,
}

impl Element {
    #[inline]
    pub fn grid_len(&self) -> u32 {
        1 << (MAX_LEVEL - self.level)
    }

    /// Side length `h = 2^-level`.
    #[inline]
    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    #[inline]
    pub fn lower_corner(&self) -> [f64; 3] {
        self.anchor.map(grid_to_f64)
    }

    pub fn centroid(&self, dim: usize) -> [f64; 3] {
        let h = self.side();
        let mut c = self.lower_corner();
        for x in c.iter_mut().take(dim) {
            *x += 0.5 * h;
        }
        c
    }

    pub fn volume(&self, dim: usize) -> f64 {
        self.side().powi(dim as i32)
    }
}

#[inline]
fn grid_to_f64(g: u32) -> f64 {
    g as f64 / ROOT_LEN as f64
}

fn morton_key(anchor: &[u32; 3], dim: usize) -> u64 {
    let mut key = 0u64;
    for bit in 0..MAX_LEVEL {
        for (a, &c) in anchor.iter().enumerate().take(dim) {
            key |= (((c >> bit) & 1) as u64) << (bit as usize * dim + a);
        }
    }
    key
}

/// What lies across one face of a leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Neighbor {
    Boundary,
    Same(usize),
    Coarser(usize),
    Finer(Vec<usize>),
}

/// Balanced adaptive mesh of the unit square (d = 2) or cube (d = 3).
#[derive(Debug, Clone)]
pub struct AdaptiveMesh {
    dim: usize,
    leaves: Vec<Element>,
    lookup: HashMap<(u32, [u32; 3]), usize>,
    max_level: u32,
}

impl PartialEq for AdaptiveMesh {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.leaves == other.leaves
    }
}

impl AdaptiveMesh {
    /// Builds a mesh from `(level, anchor)` pairs; the cells are sorted into
    /// Morton order. The cells must tile the domain.
    pub fn from_cells(dim: usize, cells: Vec<(u32, [u32; 3])>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(SaddleError::UnsupportedDimension(dim));
        }
        let mut keyed: Vec<(u64, u32, [u32; 3])> = cells
            .into_iter()
            .map(|(l, a)| (morton_key(&a, dim), l, a))
            .collect();
        keyed.sort_by_key(|&(k, l, _)| (k, l));
        let mut total: u128 = 0;
        for &(_, l, a) in &keyed {
            if l > MAX_LEVEL {
                return Err(SaddleError::LevelOutOfRange { level: l, max: MAX_LEVEL });
            }
            let len = 1u32 << (MAX_LEVEL - l);
            if a.iter().take(dim).any(|&c| c % len != 0 || c >= ROOT_LEN) || a.iter().skip(dim).any(|&c| c != 0) {
                return Err(SaddleError::InvalidCase(format!("misaligned cell at level {l}: {a:?}")));
            }
            total += 1u128 << ((MAX_LEVEL - l) as usize * dim);
        }
        if total != 1u128 << (MAX_LEVEL as usize * dim) {
            return Err(SaddleError::InvalidCase("cells do not tile the unit domain".into()));
        }
        let leaves = keyed
            .into_iter()
            .enumerate()
            .map(|(index, (_, level, anchor))| Element { level, anchor, index })
            .collect();
        let mesh = Self::from_sorted(dim, leaves);
        if mesh.lookup.len() != mesh.leaves.len() {
            return Err(SaddleError::InvalidCase("duplicate cells".into()));
        }
        Ok(mesh)
    }

    fn from_sorted(dim: usize, mut leaves: Vec<Element>) -> Self {
        let mut lookup = HashMap::with_capacity(leaves.len());
        let mut max_level = 0;
        for (i, e) in leaves.iter_mut().enumerate() {
            e.index = i;
            lookup.insert((e.level, e.anchor), i);
            max_level = max_level.max(e.level);
        }
        Self {
            dim,
            leaves,
            lookup,
            max_level,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn leaves(&self) -> &[Element] {
        &self.leaves
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn min_level(&self) -> u32 {
        self.leaves.iter().map(|e| e.level).min().unwrap_or(0)
    }

    pub fn total_volume(&self) -> f64 {
        self.leaves.iter().map(|e| e.volume(self.dim)).sum()
    }

    /// Leaf containing the grid point `p` (each coordinate `< 2^MAX_LEVEL`).
    pub fn leaf_containing(&self, p: [u32; 3]) -> Option<usize> {
        for level in (0..=self.max_level).rev() {
            let mask = !((1u32 << (MAX_LEVEL - level)) - 1);
            let mut a = [0u32; 3];
            for k in 0..self.dim {
                a[k] = p[k] & mask;
            }
            if let Some(&i) = self.lookup.get(&(level, a)) {
                return Some(i);
            }
        }
        None
    }

    /// Grid point just across face `(axis, side)` of `e`, or `None` on the
    /// domain boundary. `side` is 0 for the lower face and 1 for the upper.
    fn point_across(&self, e: &Element, axis: usize, side: usize) -> Option<[u32; 3]> {
        let mut p = e.anchor;
        if side == 0 {
            if p[axis] == 0 {
                return None;
            }
            p[axis] -= 1;
        } else {
            let plane = p[axis] + e.grid_len();
            if plane == ROOT_LEN {
                return None;
            }
            p[axis] = plane;
        }
        Some(p)
    }

    pub fn face_neighbor(&self, elem: usize, axis: usize, side: usize) -> Neighbor {
        let e = &self.leaves[elem];
        let Some(p) = self.point_across(e, axis, side) else {
            return Neighbor::Boundary;
        };
        let n = self.leaf_containing(p).expect("mesh tiles the domain");
        let nl = self.leaves[n].level;
        if nl == e.level {
            return Neighbor::Same(n);
        }
        if nl < e.level {
            return Neighbor::Coarser(n);
        }
        // finer: enumerate the cells of level e.level+1 touching the face
        let half = e.grid_len() / 2;
        let mut out = Vec::new();
        let tangential: Vec<usize> = (0..self.dim).filter(|&k| k != axis).collect();
        for mask in 0..(1usize << tangential.len()) {
            let mut q = p;
            for (b, &k) in tangential.iter().enumerate() {
                if (mask >> b) & 1 == 1 {
                    q[k] += half;
                }
            }
            if let Some(i) = self.leaf_containing(q) {
                if !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        Neighbor::Finer(out)
    }

    /// True when every pair of face-adjacent leaves differs by at most one level.
    pub fn is_balanced(&self) -> bool {
        self.leaves.iter().all(|e| {
            (0..self.dim).all(|axis| {
                (0..2).all(|side| match self.point_across(e, axis, side) {
                    None => true,
                    Some(p) => {
                        let n = self.leaf_containing(p).expect("mesh tiles the domain");
                        self.leaves[n].level + 1 >= e.level
                    }
                })
            })
        })
    }

    /// Writes one leaf per line: `level x y [z]`, anchors as exact decimals.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.leaves {
            write!(w, "{}", e.level)?;
            for k in 0..self.dim {
                write!(w, " {}", exact_dyadic(e.anchor[k]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Replaces every leaf flagged in `mark` by its `2^d` children.
    fn split(&self, mark: &[bool]) -> AdaptiveMesh {
        let nchild = 1usize << self.dim;
        let extra = mark.iter().filter(|&&m| m).count() * (nchild - 1);
        let mut out = Vec::with_capacity(self.leaves.len() + extra);
        for (e, &m) in self.leaves.iter().zip(mark) {
            if !m {
                out.push(*e);
                continue;
            }
            let half = e.grid_len() / 2;
            for c in 0..nchild {
                let mut a = e.anchor;
                for (k, ak) in a.iter_mut().enumerate().take(self.dim) {
                    if (c >> k) & 1 == 1 {
                        *ak += half;
                    }
                }
                out.push(Element {
                    level: e.level + 1,
                    anchor: a,
                    index: 0,
                });
            }
        }
        AdaptiveMesh::from_sorted(self.dim, out)
    }
}

fn exact_dyadic(g: u32) -> String {
    if g == 0 {
        return "0".into();
    }
    let scaled = g as u128 * 5u128.pow(MAX_LEVEL);
    let denom = 10u128.pow(MAX_LEVEL);
    let int = scaled / denom;
    let frac = scaled % denom;
    if frac == 0 {
        return int.to_string();
    }
    let digits = format!("{:0width$}", frac, width = MAX_LEVEL as usize);
    format!("{}.{}", int, digits.trim_end_matches('0'))
}

/// Uniform mesh with `2^(d*level)` leaves.
pub fn build_uniform(dim: usize, level: u32) -> Result<AdaptiveMesh> {
    if dim != 2 && dim != 3 {
        return Err(SaddleError::UnsupportedDimension(dim));
    }
    if level > MAX_UNIFORM_LEVEL {
        return Err(SaddleError::LevelOutOfRange {
            level,
            max: MAX_UNIFORM_LEVEL,
        });
    }
    let n = 1u32 << level;
    let len = 1u32 << (MAX_LEVEL - level);
    let count = 1usize << (dim as u32 * level);
    let mut keyed: Vec<(u64, [u32; 3])> = Vec::with_capacity(count);
    let nz = if dim == 3 { n } else { 1 };
    for k in 0..nz {
        for j in 0..n {
            for i in 0..n {
                let a = [i * len, j * len, if dim == 3 { k * len } else { 0 }];
                keyed.push((morton_key(&a, dim), a));
            }
        }
    }
    keyed.sort_unstable_by_key(|&(key, _)| key);
    let leaves = keyed
        .into_iter()
        .map(|(_, anchor)| Element { level, anchor, index: 0 })
        .collect();
    Ok(AdaptiveMesh::from_sorted(dim, leaves))
}

/// Subdivides every leaf matching `pred` once. No balancing.
pub fn refine_where<F: Fn(&Element) -> bool>(mesh: &AdaptiveMesh, pred: F) -> AdaptiveMesh {
    let mark: Vec<bool> = mesh
        .leaves
        .iter()
        .map(|e| e.level < MAX_LEVEL && pred(e))
        .collect();
    if mark.iter().any(|&m| m) {
        mesh.split(&mark)
    } else {
        mesh.clone()
    }
}

/// Enforces 2:1 face balance by splitting only the coarse side of each
/// violating pair, repeated to a fixed point.
pub fn balance_2to1(mesh: &AdaptiveMesh) -> AdaptiveMesh {
    let mut current = mesh.clone();
    loop {
        let mut mark = vec![false; current.leaves.len()];
        let mut any = false;
        for e in &current.leaves {
            for axis in 0..current.dim {
                for side in 0..2 {
                    if let Some(p) = current.point_across(e, axis, side) {
                        let n = current.leaf_containing(p).expect("mesh tiles the domain");
                        if current.leaves[n].level + 1 < e.level && !mark[n] {
                            mark[n] = true;
                            any = true;
                        }
                    }
                }
            }
        }
        if !any {
            return current;
        }
        current = current.split(&mark);
    }
}

/// Radius rule of the ball criterion as a function of the cell side `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BallRadius {
    /// `r(h) = 2^d h^2`.
    SquaredSide,
    /// `r(h) = factor * h`.
    SideMultiple(f64),
}

impl BallRadius {
    pub fn radius(&self, dim: usize, h: f64) -> f64 {
        match *self {
            BallRadius::SquaredSide => (1u32 << dim) as f64 * h * h,
            BallRadius::SideMultiple(f) => f * h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RefinementCriterion {
    /// Refine a cell when its centroid lies within `radius(h)` of `center`.
    /// Applied in `extra_levels` passes; pass `k > 1` re-tests only the
    /// cells created by pass `k - 1`.
    Ball {
        center: [f64; 3],
        radius: BallRadius,
        extra_levels: u32,
    },
    /// Refine any cell whose closed box meets the open annulus
    /// `inner < |x - center| < outer`, until `target_level`.
    RingOverlap {
        center: [f64; 3],
        inner: f64,
        outer: f64,
        target_level: u32,
    },
}

impl RefinementCriterion {
    pub fn ball(dim: usize, extra_levels: u32) -> Self {
        let mut center = [0.0; 3];
        center.iter_mut().take(dim).for_each(|c| *c = 0.5);
        RefinementCriterion::Ball {
            center,
            radius: BallRadius::SquaredSide,
            extra_levels,
        }
    }
}

fn box_distance_range(e: &Element, dim: usize, center: &[f64; 3]) -> (f64, f64) {
    let lo = e.lower_corner();
    let h = e.side();
    let (mut near, mut far) = (0.0, 0.0);
    for k in 0..dim {
        let (a, b) = (lo[k], lo[k] + h);
        let c = center[k];
        let dn = if c < a {
            a - c
        } else if c > b {
            c - b
        } else {
            0.0
        };
        let df = (c - a).abs().max((b - c).abs());
        near += dn * dn;
        far += df * df;
    }
    (near.sqrt(), far.sqrt())
}

fn distance(a: &[f64; 3], b: &[f64; 3], dim: usize) -> f64 {
    (0..dim).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

/// Refines according to `criterion` and re-balances the result.
pub fn refine(mesh: &AdaptiveMesh, criterion: &RefinementCriterion) -> AdaptiveMesh {
    let dim = mesh.dim;
    let mut current = mesh.clone();
    let mut changed = false;
    match criterion {
        RefinementCriterion::Ball {
            center,
            radius,
            extra_levels,
        } => {
            // cells eligible for testing in the current pass
            let mut eligible: Vec<bool> = vec![true; current.num_leaves()];
            for _ in 0..*extra_levels {
                let mark: Vec<bool> = current
                    .leaves
                    .iter()
                    .zip(&eligible)
                    .map(|(e, &ok)| {
                        ok && e.level < MAX_LEVEL
                            && distance(&e.centroid(dim), center, dim) < radius.radius(dim, e.side())
                    })
                    .collect();
                if !mark.iter().any(|&m| m) {
                    break;
                }
                changed = true;
                let nchild = 1usize << dim;
                eligible = mark
                    .iter()
                    .flat_map(|&m| std::iter::repeat(m).take(if m { nchild } else { 1 }))
                    .collect();
                current = current.split(&mark);
            }
        }
        RefinementCriterion::RingOverlap {
            center,
            inner,
            outer,
            target_level,
        } => {
            if inner >= outer {
                return mesh.clone();
            }
            loop {
                let mark: Vec<bool> = current
                    .leaves
                    .iter()
                    .map(|e| {
                        if e.level >= *target_level || e.level >= MAX_LEVEL {
                            return false;
                        }
                        let (near, far) = box_distance_range(e, dim, center);
                        near < *outer && far > *inner
                    })
                    .collect();
                if !mark.iter().any(|&m| m) {
                    break;
                }
                changed = true;
                current = current.split(&mark);
            }
        }
    }
    if changed {
        balance_2to1(&current)
    } else {
        current
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// Boundary condition type per face of the unit square/cube, indexed by
/// `[axis][side]` with side 0 at coordinate 0 and side 1 at coordinate 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySpec(pub [[BoundaryKind; 2]; 3]);

impl BoundarySpec {
    pub fn all_dirichlet() -> Self {
        BoundarySpec([[BoundaryKind::Dirichlet; 2]; 3])
    }

    /// Neumann on `y = 0` and `y = 1`, Dirichlet elsewhere.
    pub fn neumann_in_y() -> Self {
        let mut s = Self::all_dirichlet();
        s.0[1] = [BoundaryKind::Neumann; 2];
        s
    }

    pub fn kind(&self, axis: usize, side: usize) -> BoundaryKind {
        self.0[axis][side]
    }

    fn has_dirichlet(&self, dim: usize) -> bool {
        self.0.iter().take(dim).flatten().any(|&k| k == BoundaryKind::Dirichlet)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceStatus {
    Interior,
    /// Child face of a coarse face; its value is that of face `master`.
    Hanging { master: usize },
    Dirichlet,
    Neumann,
}

/// Where a face's flux value lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxSlot {
    /// Unknown number `i` of the flux vector.
    Free(usize),
    /// Prescribed (Neumann) value number `k`.
    Prescribed(usize),
}

/// One geometric face. The flux dof is the normal component along the
/// global `+axis` direction at the face center.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceDof {
    pub axis: usize,
    pub level: u32,
    pub center: [f64; 3],
    pub owners: Vec<usize>,
    pub status: FaceStatus,
    pub slot: FluxSlot,
}

impl FaceDof {
    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn area(&self, dim: usize) -> f64 {
        self.side().powi(dim as i32 - 1)
    }
}

/// Numbering of flux and pressure unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    dim: usize,
    n_u: usize,
    n_p: usize,
    faces: Vec<FaceDof>,
    element_faces: Vec<[usize; 6]>,
    free_faces: Vec<usize>,
    prescribed_faces: Vec<usize>,
    boundary: BoundarySpec,
}

impl DofMap {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn faces(&self) -> &[FaceDof] {
        &self.faces
    }

    pub fn boundary(&self) -> &BoundarySpec {
        &self.boundary
    }

    /// Face id of local face `2 * axis + side` of element `e`. Hanging child
    /// faces are returned as themselves, not as their master.
    pub fn element_face(&self, e: usize, local: usize) -> usize {
        self.element_faces[e][local]
    }

    /// Slot of local face `2 * axis + side` of element `e`, following
    /// hanging constraints to the master face.
    pub fn element_slot(&self, e: usize, local: usize) -> FluxSlot {
        self.faces[self.element_faces[e][local]].slot
    }

    /// Face id of flux unknown `i`.
    pub fn free_face(&self, i: usize) -> usize {
        self.free_faces[i]
    }

    pub fn prescribed_faces(&self) -> &[usize] {
        &self.prescribed_faces
    }

    pub fn num_prescribed(&self) -> usize {
        self.prescribed_faces.len()
    }

    pub fn hanging_count(&self) -> usize {
        self.faces
            .iter()
            .filter(|f| matches!(f.status, FaceStatus::Hanging { .. }))
            .count()
    }

    /// Pressure index of element `e`.
    #[inline]
    pub fn pressure_index(&self, e: usize) -> usize {
        e
    }
}

type FaceKey = (usize, u32, [u32; 3]);

/// Numbers the RT0 unknowns of a balanced mesh. Faces are numbered in the
/// order they are first met walking leaves in Morton order and local faces
/// in `x-, x+, y-, y+, z-, z+` order.
pub fn enumerate_dofs(mesh: &AdaptiveMesh, boundary: BoundarySpec) -> Result<DofMap> {
    let dim = mesh.dim;
    if !boundary.has_dirichlet(dim) {
        return Err(SaddleError::EmptyDirichletBoundary);
    }
    let mut faces: Vec<FaceDof> = Vec::new();
    let mut index: HashMap<FaceKey, usize> = HashMap::new();
    let mut element_faces = vec![[usize::MAX; 6]; mesh.num_leaves()];

    let face_center = |axis: usize, level: u32, anchor: &[u32; 3]| -> [f64; 3] {
        let half = 0.5 * (-(level as f64)).exp2();
        let mut c = anchor.map(grid_to_f64);
        for (k, ck) in c.iter_mut().enumerate().take(dim) {
            if k != axis {
                *ck += half;
            }
        }
        c
    };

    for (ei, e) in mesh.leaves.iter().enumerate() {
        for axis in 0..dim {
            for side in 0..2 {
                let plane = e.anchor[axis] + side as u32 * e.grid_len();
                let mut own = e.anchor;
                own[axis] = plane;
                let own_key: FaceKey = (axis, e.level, own);
                let boundary_kind = if plane == 0 || plane == ROOT_LEN {
                    Some(boundary.kind(axis, if plane == 0 { 0 } else { 1 }))
                } else {
                    None
                };
                let coarser = match boundary_kind {
                    Some(_) => None,
                    None => {
                        let p = mesh.point_across(e, axis, side).expect("interior face");
                        let n = mesh.leaf_containing(p).expect("mesh tiles the domain");
                        let nb = &mesh.leaves[n];
                        if nb.level < e.level {
                            let mut a = nb.anchor;
                            a[axis] = plane;
                            Some((nb.level, a))
                        } else {
                            None
                        }
                    }
                };
                let id = if let Some((mlevel, manchor)) = coarser {
                    let mkey: FaceKey = (axis, mlevel, manchor);
                    let master = *index.entry(mkey).or_insert_with(|| {
                        faces.push(FaceDof {
                            axis,
                            level: mlevel,
                            center: face_center(axis, mlevel, &manchor),
                            owners: Vec::new(),
                            status: FaceStatus::Interior,
                            slot: FluxSlot::Free(usize::MAX),
                        });
                        faces.len() - 1
                    });
                    faces[master].owners.push(ei);
                    faces.push(FaceDof {
                        axis,
                        level: e.level,
                        center: face_center(axis, e.level, &own),
                        owners: vec![ei],
                        status: FaceStatus::Hanging { master },
                        slot: FluxSlot::Free(usize::MAX),
                    });
                    index.insert(own_key, faces.len() - 1);
                    faces.len() - 1
                } else {
                    let id = *index.entry(own_key).or_insert_with(|| {
                        faces.push(FaceDof {
                            axis,
                            level: e.level,
                            center: face_center(axis, e.level, &own),
                            owners: Vec::new(),
                            status: match boundary_kind {
                                Some(BoundaryKind::Dirichlet) => FaceStatus::Dirichlet,
                                Some(BoundaryKind::Neumann) => FaceStatus::Neumann,
                                None => FaceStatus::Interior,
                            },
                            slot: FluxSlot::Free(usize::MAX),
                        });
                        faces.len() - 1
                    });
                    faces[id].owners.push(ei);
                    id
                };
                element_faces[ei][2 * axis + side] = id;
            }
        }
    }

    // slots in face order: free and prescribed counted separately
    let mut free_faces = Vec::new();
    let mut prescribed_faces = Vec::new();
    for id in 0..faces.len() {
        match faces[id].status {
            FaceStatus::Hanging { .. } => {}
            FaceStatus::Neumann => {
                faces[id].slot = FluxSlot::Prescribed(prescribed_faces.len());
                prescribed_faces.push(id);
            }
            _ => {
                faces[id].slot = FluxSlot::Free(free_faces.len());
                free_faces.push(id);
            }
        }
    }
    for id in 0..faces.len() {
        if let FaceStatus::Hanging { master } = faces[id].status {
            faces[id].slot = faces[master].slot;
        }
    }

    Ok(DofMap {
        dim,
        n_u: free_faces.len(),
        n_p: mesh.num_leaves(),
        faces,
        element_faces,
        free_faces,
        prescribed_faces,
        boundary,
    })
}
