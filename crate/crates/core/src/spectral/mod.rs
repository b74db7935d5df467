//! P1 finite elements for the Dirichlet Laplacian, a sparse symmetric
//! eigensolver, and closed-form eigenpairs of rectangles and disks.

pub mod bessel;
mod eigen;
mod skyline;
mod sparse;

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use eigen::{generalized_eigen, solve_eigen, EigenPair, BUDGET_PER_PAIR, DEFAULT_TOL};
pub use skyline::{reverse_cuthill_mckee, SkylineCholesky};
pub use sparse::SparseSymmetric;

use crate::error::{Error, Result};
use crate::fields::{FemField, ScalarField};
use crate::geometry::{orient, PolygonDomain, Vec2};
use crate::meshing::{triangulate, TriangleMesh};

/// Stiffness and mass on the free (non-Dirichlet) vertices.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub k: SparseSymmetric,
    pub m: SparseSymmetric,
    /// Vertex → degree of freedom, `None` on Dirichlet vertices.
    pub dof_map: Vec<Option<usize>>,
    /// Degree of freedom → vertex.
    pub dofs: Vec<usize>,
}

impl Assembly {
    /// Nodal values on all vertices, zero on the boundary.
    pub fn expand(&self, coeffs: &[f64]) -> Vec<f64> {
        self.dof_map.iter().map(|d| d.map_or(0.0, |i| coeffs[i])).collect()
    }

    pub fn restrict(&self, values: &[f64]) -> Vec<f64> {
        self.dofs.iter().map(|&v| values[v]).collect()
    }
}

/// Element stiffness and consistent mass of a P1 triangle.
pub fn element_matrices([a, b, c]: [Vec2; 3]) -> Option<([[f64; 3]; 3], [[f64; 3]; 3])> {
    let two_area = orient(a, b, c);
    if !(two_area > 0.0) {
        return None;
    }
    let area = 0.5 * two_area;
    let bx = [b.y - c.y, c.y - a.y, a.y - b.y];
    let cy = [c.x - b.x, a.x - c.x, b.x - a.x];
    let mut ke = [[0.0; 3]; 3];
    let mut me = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ke[i][j] = (bx[i] * bx[j] + cy[i] * cy[j]) / (4.0 * area);
            me[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    Some((ke, me))
}

/// Assembles `K` and `M`, eliminating Dirichlet vertices.
pub fn assemble(mesh: &TriangleMesh) -> Result<Assembly> {
    let mut dof_map = vec![None; mesh.num_vertices()];
    let mut dofs = Vec::new();
    for (v, &b) in mesh.boundary_vertex.iter().enumerate() {
        if !b {
            dof_map[v] = Some(dofs.len());
            dofs.push(v);
        }
    }
    let (k, m) = assemble_with(mesh, &dof_map, dofs.len())?;
    Ok(Assembly { k, m, dof_map, dofs })
}

/// Assembly over every vertex, without boundary conditions.
pub fn assemble_unconstrained(mesh: &TriangleMesh) -> Result<(SparseSymmetric, SparseSymmetric)> {
    let map: Vec<Option<usize>> = (0..mesh.num_vertices()).map(Some).collect();
    assemble_with(mesh, &map, mesh.num_vertices())
}

fn assemble_with(mesh: &TriangleMesh, map: &[Option<usize>], n: usize) -> Result<(SparseSymmetric, SparseSymmetric)> {
    let mut kt = Vec::with_capacity(9 * mesh.num_triangles());
    let mut mt = Vec::with_capacity(9 * mesh.num_triangles());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let (ke, me) = element_matrices(mesh.corners(t)).ok_or(Error::DegenerateTriangle { index: t })?;
        for i in 0..3 {
            let Some(gi) = map[tri[i]] else { continue };
            for j in 0..3 {
                let Some(gj) = map[tri[j]] else { continue };
                if gj <= gi {
                    kt.push((gi, gj, ke[i][j]));
                    mt.push((gi, gj, me[i][j]));
                }
            }
        }
    }
    Ok((SparseSymmetric::from_triplets(n, &kt)?, SparseSymmetric::from_triplets(n, &mt)?))
}

/// Eigenpairs of a mesh together with the data to turn them into fields.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub mesh: Arc<TriangleMesh>,
    pub assembly: Assembly,
    pub pairs: Vec<EigenPair>,
}

impl Spectrum {
    pub fn compute(mesh: TriangleMesh, count: usize, tol: f64) -> Result<Self> {
        let assembly = assemble(&mesh)?;
        let pairs = solve_eigen(&assembly.k, &assembly.m, count, tol)?;
        Ok(Self { mesh: Arc::new(mesh), assembly, pairs })
    }

    pub fn for_domain(domain: &PolygonDomain, h: f64, count: usize) -> Result<Self> {
        Self::compute(triangulate(domain, h)?, count, DEFAULT_TOL)
    }

    /// The `i`-th eigenfunction as a field, with its eigenvalue attached.
    pub fn field(&self, i: usize) -> ScalarField {
        let p = &self.pairs[i];
        ScalarField::Fem(FemField::new(self.mesh.clone(), self.assembly.expand(&p.coeffs), Some(p.lambda)))
    }

    /// All eigenfunctions sharing one point locator.
    pub fn fields(&self) -> Vec<ScalarField> {
        if self.pairs.is_empty() {
            return Vec::new();
        }
        let first = FemField::new(self.mesh.clone(), self.assembly.expand(&self.pairs[0].coeffs), Some(self.pairs[0].lambda));
        self.pairs
            .iter()
            .map(|p| ScalarField::Fem(first.with_values(self.assembly.expand(&p.coeffs), Some(p.lambda))))
            .collect()
    }

    pub fn to_solution(&self, mesh_ref: &str) -> Solution {
        Solution {
            mesh_ref: mesh_ref.to_string(),
            pairs: self
                .pairs
                .iter()
                .map(|p| SolutionPair { lambda: p.lambda, residual: p.residual, coeffs: self.assembly.expand(&p.coeffs) })
                .collect(),
        }
    }
}

/// Solution file: nodal values on every mesh vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub mesh_ref: String,
    pub pairs: Vec<SolutionPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPair {
    pub lambda: f64,
    pub residual: f64,
    pub coeffs: Vec<f64>,
}

impl Solution {
    pub fn load(path: &Path) -> Result<Self> {
        let s: Solution = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        for p in &s.pairs {
            if !(p.lambda > 0.0) || p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Schema { what: "solution", detail: "eigenvalues must be positive and coefficients finite".into() });
            }
        }
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    /// Loads the referenced mesh, resolved against the solution's directory.
    pub fn load_mesh(&self, solution_path: &Path) -> Result<TriangleMesh> {
        let p = Path::new(&self.mesh_ref);
        let p = if p.is_absolute() {
            p.to_path_buf()
        } else {
            solution_path.parent().unwrap_or(Path::new(".")).join(p)
        };
        let mesh = TriangleMesh::load(&p)?;
        if self.pairs.iter().any(|q| q.coeffs.len() != mesh.num_vertices()) {
            return Err(Error::Schema { what: "solution", detail: "coefficient count differs from mesh vertex count".into() });
        }
        Ok(mesh)
    }
}

/// `sin(mπx/a)·sin(nπy/b)` and `λ = π²(m²/a² + n²/b²)`.
pub fn analytic_rectangle(m: u32, n: u32, a: f64, b: f64) -> Result<(ScalarField, f64)> {
    if m == 0 || n == 0 || !(a > 0.0 && b > 0.0) {
        return Err(Error::Precondition("rectangle modes need m, n ≥ 1 and positive sides".into()));
    }
    let f = ScalarField::Rectangle { m, n, a, b };
    let l = f.eigenvalue().unwrap();
    Ok((f, l))
}

/// `J_k(j_{k,j}·r)·cos(kθ)` on the unit disk and `λ = j_{k,j}²`.
pub fn analytic_disk(k: u32, j: u32) -> Result<(ScalarField, f64)> {
    if j == 0 {
        return Err(Error::Precondition("disk modes need j ≥ 1".into()));
    }
    let alpha = bessel::bessel_zero(k, j);
    Ok((ScalarField::Disk { k, j, alpha }, alpha * alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub lambda1: f64,
    /// `(j_{0,1}/diam)²`, the first eigenvalue of a disk of radius `diam`.
    pub lambda1_disk: f64,
    pub diameter: f64,
    pub holds: bool,
}

/// Compares the first eigenvalue of `domain` with that of the disk whose
/// radius is the domain's diameter.
pub fn first_eigenvalue_monotonicity_check(domain: &PolygonDomain, h: f64) -> Result<MonotonicityReport> {
    let s = Spectrum::for_domain(domain, h, 1)?;
    let diameter = domain.diameter();
    let lambda1_disk = (bessel::bessel_zero(0, 1) / diameter).powi(2);
    let lambda1 = s.pairs[0].lambda;
    Ok(MonotonicityReport { lambda1, lambda1_disk, diameter, holds: lambda1 >= lambda1_disk })
}

/// Discrete harmonic function with boundary values `g`, as nodal values on every vertex.
pub fn harmonic_dirichlet(mesh: &TriangleMesh, g: impl Fn(Vec2) -> f64) -> Result<Vec<f64>> {
    let asm = assemble(mesh)?;
    let (kfull, _) = assemble_unconstrained(mesh)?;
    let boundary: Vec<f64> = mesh
        .vertices
        .iter()
        .zip(&mesh.boundary_vertex)
        .map(|(p, &b)| if b { g(*p) } else { 0.0 })
        .collect();
    // right-hand side -K_IB g_B
    let kg = kfull.mul_vec(&boundary);
    let rhs: Vec<f64> = asm.dofs.iter().map(|&v| -kg[v]).collect();
    let fact = SkylineCholesky::factor(&asm.k)?;
    let interior = fact.solve(&rhs);
    let mut out = boundary;
    for (i, &v) in asm.dofs.iter().enumerate() {
        out[v] = interior[i];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reference_element() {
        let (ke, me) = element_matrices([Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).unwrap();
        let msum: f64 = me.iter().flatten().sum();
        assert!((msum - 0.5).abs() < 1e-15);
        for row in &me {
            assert!((row.iter().sum::<f64>() - 0.5 / 3.0).abs() < 1e-15);
        }
        for row in &ke {
            assert!(row.iter().sum::<f64>().abs() < 1e-15);
        }
        assert!(element_matrices([Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)]).is_none());
    }

    #[test]
    fn constants_in_stiffness_kernel() {
        let mesh = triangulate(&PolygonDomain::l_shape(), 0.1).unwrap();
        let (k, m) = assemble_unconstrained(&mesh).unwrap();
        let ones = vec![1.0; k.n];
        assert!(k.inner(&ones, &ones).abs() < 1e-12);
        assert!((m.inner(&ones, &ones) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_quotient_of_ground_state() {
        let mesh = triangulate(&PolygonDomain::unit_square(), 0.05).unwrap();
        let asm = assemble(&mesh).unwrap();
        let u: Vec<f64> = asm.dofs.iter().map(|&v| (PI * mesh.vertices[v].x).sin() * (PI * mesh.vertices[v].y).sin()).collect();
        let rq = asm.k.inner(&u, &u) / asm.m.inner(&u, &u);
        assert!((rq - 2.0 * PI * PI).abs() < 0.01 * 2.0 * PI * PI, "{rq}");
    }

    #[test]
    fn square_spectrum() {
        let s = Spectrum::for_domain(&PolygonDomain::unit_square(), 0.05, 10).unwrap();
        let l: Vec<f64> = s.pairs.iter().map(|p| p.lambda / (PI * PI)).collect();
        // 2, 5, 5, 8, 10, 10, 13, 13, 17, 17
        assert!((l[0] - 2.0).abs() < 0.02 * 2.0);
        assert!((l[1] - l[2]).abs() < 0.005 * l[1]);
        assert!((l[3] - 8.0).abs() < 0.03 * 8.0);
        assert!((l[4] - 10.0).abs() < 0.03 * 10.0 && (l[4] - l[5]).abs() < 0.005 * l[4]);
        for p in &s.pairs {
            assert!(p.residual <= DEFAULT_TOL);
            assert!((s.assembly.m.inner(&p.coeffs, &p.coeffs) - 1.0).abs() < 1e-10);
        }
        for i in 0..10 {
            for j in 0..i {
                assert!(s.assembly.m.inner(&s.pairs[i].coeffs, &s.pairs[j].coeffs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn analytic_modes() {
        let (_, l) = analytic_rectangle(1, 1, 1.0, 1.0).unwrap();
        assert!((l - 19.7392).abs() < 1e-4);
        let (f, l) = analytic_rectangle(3, 2, 1.0, 1.0).unwrap();
        assert!((l - 128.3049).abs() < 1e-4);
        assert!(f.eval(&[1.0 / 3.0, 0.3]).unwrap().abs() < 1e-15);
        let (g, _) = analytic_rectangle(2, 1, 1.0, 1.0).unwrap();
        for y in [0.1, 0.5, 0.9] {
            assert!(g.eval(&[0.5, y]).unwrap().abs() < 1e-15);
        }
        let (_, l) = analytic_disk(0, 1).unwrap();
        assert!((l - 5.7832).abs() < 1e-4);
        assert!(analytic_disk(0, 0).is_err());
    }

    #[test]
    fn monotonicity_against_disk() {
        let r = first_eigenvalue_monotonicity_check(&PolygonDomain::unit_square(), 0.05).unwrap();
        assert!(r.holds);
        assert!((r.lambda1_disk - 2.8916).abs() < 1e-3);
    }

    #[test]
    fn harmonic_solve_reproduces_linear_data() {
        let mesh = triangulate(&PolygonDomain::l_shape(), 0.1).unwrap();
        let vals = harmonic_dirichlet(&mesh, |p| 3.0 * p.x - 2.0 * p.y + 1.0).unwrap();
        for (p, v) in mesh.vertices.iter().zip(&vals) {
            assert!((v - (3.0 * p.x - 2.0 * p.y + 1.0)).abs() < 1e-10);
        }
    }
}
