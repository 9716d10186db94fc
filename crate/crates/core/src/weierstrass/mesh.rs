use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::curvature::CurvatureField;
use crate::grid::{fmt17, GridSpec};
use crate::scalar::Real;

use super::{axpy, dist4, im4, neg4, re4, PhiFrame, Vec4};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("no admissible point to integrate from")]
    Empty,
    #[error("invalid projection {0:?}: expected three distinct axes in 1..=4")]
    Projection(String),
    #[error("sidecar line {line}: {message}")]
    Sidecar { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Three 1-based ambient axes used for OBJ vertex coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projection(pub [usize; 3]);

impl Default for Projection {
    fn default() -> Self {
        Self([1, 2, 3])
    }
}

impl Projection {
    pub fn new(axes: [usize; 3]) -> Result<Self, MeshError> {
        let ok = axes.iter().all(|a| (1..=4).contains(a)) && axes[0] != axes[1] && axes[0] != axes[2] && axes[1] != axes[2];
        if ok {
            Ok(Self(axes))
        } else {
            Err(MeshError::Projection(format!("{axes:?}")))
        }
    }
}

impl FromStr for Projection {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| MeshError::Projection(s.to_string()))?;
        let axes: [usize; 3] = parts.try_into().map_err(|_| MeshError::Projection(s.to_string()))?;
        Self::new(axes)
    }
}

/// Integrated surface over the admissible component containing the basepoint.
#[derive(Debug, Clone)]
pub struct SurfaceMesh<T> {
    pub grid: GridSpec<T>,
    pub positions: Vec<Vec4<T>>,
    /// Grid index of each vertex.
    pub grid_index: Vec<usize>,
    /// Vertex index of each grid point, if it belongs to the mesh.
    pub vertex_of: Vec<Option<usize>>,
    pub triangles: Vec<[usize; 3]>,
    pub k: Vec<Option<T>>,
    pub kappa: Vec<Option<T>>,
    /// Largest disagreement between the integrated positions and the
    /// trapezoid increment over any mesh edge.
    pub closure_residual: T,
}

fn tangents<T: Real>(frame: &PhiFrame<T>, idx: usize) -> (Vec4<T>, Vec4<T>) {
    let phi = frame.phi[idx].as_ref().expect("mesh vertex has Φ");
    (re4(phi), neg4(&im4(phi)))
}

fn increment<T: Real>(frame: &PhiFrame<T>, a: usize, b: usize) -> Vec4<T> {
    let grid = &frame.grid;
    let (ia, ja) = grid.ij(a);
    let (ib, jb) = grid.ij(b);
    let (ua, va) = tangents(frame, a);
    let (ub, vb) = tangents(frame, b);
    let half = T::lit(0.5);
    let mut d = [T::zero(); 4];
    if ja == jb {
        let h = grid.u(ib) - grid.u(ia);
        for k in 0..4 {
            d[k] = half * h * (ua[k] + ub[k]);
        }
    } else {
        let h = grid.v(jb) - grid.v(ja);
        for k in 0..4 {
            d[k] = half * h * (va[k] + vb[k]);
        }
    }
    d
}

/// `x = Re ∫ Φ dz` by the trapezoid rule along a breadth-first spanning tree
/// rooted at the basepoint, where `x` vanishes.
pub fn integrate_surface<T: Real>(frame: &PhiFrame<T>) -> Result<SurfaceMesh<T>, MeshError> {
    let grid = frame.grid;
    let base = frame.basepoint.filter(|&b| frame.mask.ok(b)).or_else(|| frame.mask.basepoint()).ok_or(MeshError::Empty)?;
    let order = frame.mask.bfs(base);
    let mut vertex_of = vec![None; grid.len()];
    let mut positions = Vec::with_capacity(order.len());
    let mut grid_index = Vec::with_capacity(order.len());
    for (idx, parent) in order {
        let x = match parent {
            None => [T::zero(); 4],
            Some(p) => {
                let pv = vertex_of[p].expect("parent visited first");
                axpy(T::one(), &increment(frame, p, idx), &positions[pv])
            }
        };
        vertex_of[idx] = Some(positions.len());
        positions.push(x);
        grid_index.push(idx);
    }

    let mut closure_residual = T::zero();
    for (v, &idx) in grid_index.iter().enumerate() {
        for n in grid.neighbours(idx).filter(|&n| n > idx) {
            if let Some(w) = vertex_of[n] {
                let expect = axpy(T::one(), &increment(frame, idx, n), &positions[v]);
                closure_residual = closure_residual.max(dist4(&expect, &positions[w]));
            }
        }
    }

    let mut triangles = Vec::new();
    for j in 0..grid.nv.saturating_sub(1) {
        for i in 0..grid.nu.saturating_sub(1) {
            let corners = [grid.index(i, j), grid.index(i + 1, j), grid.index(i, j + 1), grid.index(i + 1, j + 1)];
            if let [Some(a), Some(b), Some(c), Some(d)] = corners.map(|g| vertex_of[g]) {
                triangles.push([a, b, d]);
                triangles.push([a, d, c]);
            }
        }
    }

    let n = positions.len();
    Ok(SurfaceMesh {
        grid,
        positions,
        grid_index,
        vertex_of,
        triangles,
        k: vec![None; n],
        kappa: vec![None; n],
        closure_residual,
    })
}

/// Order of the two legs of an axis-aligned integration path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    /// Along the basepoint's row first, then along columns.
    RowFirst,
    /// Along the basepoint's column first, then along rows.
    ColumnFirst,
}

/// `x = Re ∫ Φ dz` along L-shaped paths from the basepoint. A point is `None`
/// when its path leaves the admissible set.
pub fn integrate_along<T: Real>(frame: &PhiFrame<T>, order: PathOrder) -> Result<Vec<Option<Vec4<T>>>, MeshError> {
    let grid = frame.grid;
    let base = frame.basepoint.filter(|&b| frame.mask.ok(b)).or_else(|| frame.mask.basepoint()).ok_or(MeshError::Empty)?;
    let (ib, jb) = grid.ij(base);
    let mut x: Vec<Option<Vec4<T>>> = vec![None; grid.len()];
    x[base] = Some([T::zero(); 4]);
    // Walk from `start` in unit steps along one axis while admissible.
    let walk = |x: &mut Vec<Option<Vec4<T>>>, start: usize, along_u: bool| {
        let (i0, j0) = grid.ij(start);
        let (pos, len) = if along_u { (i0, grid.nu) } else { (j0, grid.nv) };
        let at = |k: usize| if along_u { grid.index(k, j0) } else { grid.index(i0, k) };
        for dir in [1isize, -1] {
            let mut prev = start;
            let mut k = pos as isize + dir;
            while k >= 0 && (k as usize) < len {
                let idx = at(k as usize);
                if !frame.mask.ok(idx) {
                    break;
                }
                let p = x[prev].expect("path start set");
                x[idx] = Some(axpy(T::one(), &increment(frame, prev, idx), &p));
                prev = idx;
                k += dir;
            }
        }
    };
    let first_u = order == PathOrder::RowFirst;
    walk(&mut x, base, first_u);
    let leg: Vec<usize> = if first_u {
        (0..grid.nu).map(|i| grid.index(i, jb)).collect()
    } else {
        (0..grid.nv).map(|j| grid.index(ib, j)).collect()
    };
    for idx in leg {
        if x[idx].is_some() {
            walk(&mut x, idx, !first_u);
        }
    }
    Ok(x)
}

impl<T: Real> SurfaceMesh<T> {
    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    /// Attach per-vertex curvature values sampled on the same grid.
    pub fn with_curvatures(mut self, c: &CurvatureField<T>) -> Self {
        self.k = self.grid_index.iter().map(|&g| c.k[g]).collect();
        self.kappa = self.grid_index.iter().map(|&g| c.kappa[g]).collect();
        self
    }
}

/// Wavefront OBJ text: one `v` line per vertex using the projected axes,
/// then one `f` line per triangle (1-based).
pub fn obj_string<T: Real>(mesh: &SurfaceMesh<T>, proj: Projection) -> String {
    let mut s = String::new();
    let [a, b, c] = proj.0;
    let _ = writeln!(s, "# spacelike surface, axes x{a} x{b} x{c}");
    for x in &mesh.positions {
        let _ = writeln!(s, "v {} {} {}", fmt17(x[a - 1]), fmt17(x[b - 1]), fmt17(x[c - 1]));
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

/// Per-vertex CSV: `u,v,x1,x2,x3,x4,K,kappa`, in OBJ vertex order.
pub fn sidecar_csv<T: Real>(mesh: &SurfaceMesh<T>) -> String {
    let mut s = String::from("u,v,x1,x2,x3,x4,K,kappa\n");
    let opt = |x: Option<T>| x.map(fmt17).unwrap_or_default();
    for (v, &g) in mesh.grid_index.iter().enumerate() {
        let (u, w) = mesh.grid.uv(g);
        let x = &mesh.positions[v];
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            fmt17(u),
            fmt17(w),
            fmt17(x[0]),
            fmt17(x[1]),
            fmt17(x[2]),
            fmt17(x[3]),
            opt(mesh.k[v]),
            opt(mesh.kappa[v])
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidecarRow {
    pub u: f64,
    pub v: f64,
    pub x: [f64; 4],
    pub k: Option<f64>,
    pub kappa: Option<f64>,
}

pub fn read_sidecar(text: &str) -> Result<Vec<SidecarRow>, MeshError> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: &str| MeshError::Sidecar { line: n + 1, message: message.to_string() };
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 8 {
            return Err(err("expected 8 columns"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err("bad number"));
        let opt = |s: &str| if s.trim().is_empty() { Ok(None) } else { num(s).map(Some) };
        rows.push(SidecarRow {
            u: num(cells[0])?,
            v: num(cells[1])?,
            x: [num(cells[2])?, num(cells[3])?, num(cells[4])?, num(cells[5])?],
            k: opt(cells[6])?,
            kappa: opt(cells[7])?,
        });
    }
    Ok(rows)
}

/// Write `<stem>.obj` and `<stem>.csv` into `dir`.
pub fn export_mesh<T: Real>(
    mesh: &SurfaceMesh<T>,
    proj: Projection,
    dir: &Path,
    stem: &str,
) -> Result<(PathBuf, PathBuf), MeshError> {
    std::fs::create_dir_all(dir)?;
    let obj = dir.join(format!("{stem}.obj"));
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&obj, obj_string(mesh, proj))?;
    std::fs::write(&csv, sidecar_csv(mesh))?;
    Ok((obj, csv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{PairW, DEFAULT_TOL};
    use crate::weierstrass::phi_from_w;
    use crate::holoexpr::HoloExpr;

    fn catenoid_like(n: usize) -> (GridSpec<f64>, SurfaceMesh<f64>) {
        let w = PairW { w1: HoloExpr::z(), w2: HoloExpr::z() };
        let grid = GridSpec::square(-0.5, 0.5, n).unwrap();
        let frame = phi_from_w(&w, &grid, DEFAULT_TOL);
        (grid, integrate_surface(&frame).unwrap())
    }

    // Re ∫_0^z (i cosh ζ, sinh ζ, 1, 0) dζ
    fn exact(u: f64, v: f64) -> [f64; 4] {
        [-u.cosh() * v.sin(), u.cosh() * v.cos() - 1.0, u, 0.0]
    }

    fn max_error(n: usize) -> f64 {
        let (grid, mesh) = catenoid_like(n);
        mesh.grid_index
            .iter()
            .zip(&mesh.positions)
            .map(|(&g, x)| {
                let (u, v) = grid.uv(g);
                dist4(x, &exact(u, v))
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn path_orders_agree_to_second_order() {
        let w = PairW { w1: HoloExpr::z(), w2: HoloExpr::z() };
        let mut diffs = Vec::new();
        for n in [11, 21, 41] {
            let grid = GridSpec::square(-0.5, 0.5, n).unwrap();
            let frame = phi_from_w(&w, &grid, DEFAULT_TOL);
            let a = integrate_along(&frame, PathOrder::RowFirst).unwrap();
            let b = integrate_along(&frame, PathOrder::ColumnFirst).unwrap();
            let d = a.iter().zip(&b).map(|(a, b)| dist4(&a.unwrap(), &b.unwrap())).fold(0.0, f64::max);
            diffs.push(d);
        }
        let s1 = (diffs[0] / diffs[1]).log2();
        let s2 = (diffs[1] / diffs[2]).log2();
        assert!((s1 - 2.0).abs() < 0.1 && (s2 - 2.0).abs() < 0.1, "{diffs:?}");
    }

    #[test]
    fn blocked_paths_are_empty() {
        let w = PairW { w1: HoloExpr::z(), w2: HoloExpr::z() };
        let grid = GridSpec::square(-0.5, 0.5, 5).unwrap();
        let mut frame = phi_from_w(&w, &grid, DEFAULT_TOL);
        frame.mask.reasons[grid.index(3, 2)] = Some(crate::grid::Reason::Pole);
        let a = integrate_along(&frame, PathOrder::RowFirst).unwrap();
        assert!(a[grid.index(4, 0)].is_none());
        let b = integrate_along(&frame, PathOrder::ColumnFirst).unwrap();
        assert!(b[grid.index(4, 0)].is_some());
        assert!(b[grid.index(3, 2)].is_none());
    }

    #[test]
    fn small_mesh_topology() {
        let (_, mesh) = catenoid_like(3);
        assert_eq!(mesh.vertex_count(), 9);
        assert_eq!(mesh.triangles.len(), 8);
        assert_eq!(mesh.positions[0], [0.0; 4]);
    }

    #[test]
    fn full_grid_is_meshed() {
        let (_, mesh) = catenoid_like(41);
        assert_eq!(mesh.vertex_count(), 1681);
        assert_eq!(mesh.triangles.len(), 2 * 40 * 40);
        assert!(mesh.closure_residual < 1e-3);
    }

    #[test]
    fn trapezoid_converges_at_second_order() {
        let e1 = max_error(21);
        let e2 = max_error(41);
        let e3 = max_error(81);
        let s1 = (e1 / e2).log2();
        let s2 = (e2 / e3).log2();
        assert!((s1 - 2.0).abs() < 0.2 && (s2 - 2.0).abs() < 0.2, "slopes {s1} {s2}");
    }

    #[test]
    fn obj_and_sidecar() {
        let (_, mesh) = catenoid_like(3);
        let obj = obj_string(&mesh, Projection::default());
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 9);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 8);
        let rows = read_sidecar(&sidecar_csv(&mesh)).unwrap();
        assert_eq!(rows.len(), 9);
        for (r, x) in rows.iter().zip(&mesh.positions) {
            assert_eq!(r.x, *x);
            assert!(r.k.is_none());
        }
    }

    #[test]
    fn projection_parsing() {
        assert_eq!("2, 3,4".parse::<Projection>().unwrap(), Projection([2, 3, 4]));
        assert!("1,1,2".parse::<Projection>().is_err());
        assert!("0,1,2".parse::<Projection>().is_err());
        assert!("1,2".parse::<Projection>().is_err());
    }
}
