use std::path::Path;

use lipnodal::doubling::{chain_of_balls, doubling_profile, vertex_maximizer};
use lipnodal::fields::{parse_field_spec, FemField, Region, ScalarField};
use lipnodal::geometry::{standard_construction, Cube, LipschitzPatch, PolygonDomain, Vec2};
use lipnodal::meshing::{triangulate, TriangleMesh};
use lipnodal::nodal::{extract_nodal, outline};
use lipnodal::spectral::{Solution, Spectrum};
use lipnodal::verify::{self, CheckReport, EigenMode};
use lipnodal::{Error, Result};

use crate::output::{at, check_csv, check_json, check_svg, write};
use crate::{Check, Cli, Command, VerifyOpts};

pub enum Outcome {
    Clean,
    Violations(usize),
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Mesh { domain, h } => {
            let d = at(domain, PolygonDomain::load(domain))?;
            let m = triangulate(&d, *h)?;
            let body = m.to_json()?;
            TriangleMesh::from_json(&body)?.validate()?;
            write(out, "mesh.json", &body)?;
            println!("{} vertices, {} triangles, h_max {}", m.num_vertices(), m.num_triangles(), m.h_max);
        }
        Command::Solve { mesh, count, tol } => {
            let m = at(mesh, TriangleMesh::load(mesh))?;
            let sp = Spectrum::compute(m, *count, *tol)?;
            let mesh_ref = at(mesh, std::fs::canonicalize(mesh).map_err(Error::from))?;
            let sol = sp.to_solution(&mesh_ref.display().to_string());
            let p = write(out, "solution.json", &serde_json::to_string(&sol)?)?;
            Solution::load(&p)?.load_mesh(&p)?;
            for (i, pair) in sol.pairs.iter().enumerate() {
                println!("{i} {} {:.3e}", pair.lambda, pair.residual);
            }
        }
        Command::Nodal { solution, index, resolution } => {
            let sol = at(solution, Solution::load(solution))?;
            let mesh = at(solution, sol.load_mesh(solution))?;
            let pair = sol
                .pairs
                .get(*index)
                .ok_or_else(|| Error::Parse(format!("solution has {} pairs, index {index} requested", sol.pairs.len())))?;
            let domain = mesh.boundary_domain()?;
            let field = ScalarField::Fem(FemField::new(mesh.into(), pair.coeffs.clone(), Some(pair.lambda)));
            let ns = extract_nodal(&field, &Region::polygon(domain.clone())?, *resolution)?;
            let body = ns.to_json()?;
            check_json("nodal", &body, &["segments", "total_length", "resolution"])?;
            write(out, "nodal.json", &body)?;
            let svg = ns.to_svg(&outline(&domain));
            check_svg("nodal svg", &svg)?;
            write(out, "nodal.svg", &svg)?;
            println!("length {} ({} segments)", ns.total_length, ns.segments.len());
        }
        Command::Doubling { field, center, rmin, rmax, steps, domain } => {
            let f = parse_field_spec(field, Path::new("."))?;
            let region = match domain {
                Some(d) => Region::polygon(at(d, PolygonDomain::load(d))?)?,
                None => Region::natural_for(&f)?,
            };
            let c = numbers(center, "center")?;
            if !(2..=3).contains(&c.len()) {
                return Err(Error::Parse("center must be X,Y or X,Y,T".into()));
            }
            let rep = doubling_profile(&f, &c, *rmin, *rmax, *steps, &region)?;
            let body = rep.to_csv_string()?;
            check_csv("doubling", &body, Some(&["center_x", "center_y", "center_t", "r", "H", "N", "err"]))?;
            write(out, "doubling.csv", &body)?;
            print!("{body}");
        }
        Command::Construct { patch, cube, k } => {
            let p = at(patch, LipschitzPatch::load(patch))?;
            let c = numbers(cube, "cube")?;
            let [cx, cy, s] = c[..] else {
                return Err(Error::Parse("cube must be CX,CY,S".into()));
            };
            let sc = standard_construction(&p, Cube::new(Vec2::new(cx, cy), s, p.angle()), *k)?;
            let body = serde_json::to_string(&sc)?;
            check_json("construction", &body, &["cube", "k", "boundary_cubes", "inner_cubes"])?;
            write(out, "construction.json", &body)?;
            let inner: usize = sc.inner_cubes.iter().map(Vec::len).sum();
            println!("{} boundary cubes, {inner} inner cubes", sc.boundary_cubes.len());
        }
        Command::Chain { domain, start, r, h, index } => {
            let d = at(domain, PolygonDomain::load(domain))?;
            let s = numbers(start, "start")?;
            let [sx, sy] = s[..] else {
                return Err(Error::Parse("start must be X,Y".into()));
            };
            let sp = Spectrum::for_domain(&d, *h, index + 1)?;
            let field = sp.field(*index);
            let fem = field.as_fem().expect("spectrum fields are FEM fields");
            let target = vertex_maximizer(fem);
            let ch = chain_of_balls(&d, Vec2::new(sx, sy), target, *r)?;
            ch.validate()?;
            let body = serde_json::to_string(&ch)?;
            check_json("chain", &body, &["r", "balls", "net", "path", "steps"])?;
            write(out, "chain.json", &body)?;
            println!("{} steps, |S| = {}, target ({}, {})", ch.steps, ch.net.len(), target.x, target.y);
        }
        Command::Verify { check, opts } => {
            let checks: Vec<Check> = if *check == Check::All {
                ALL.to_vec()
            } else {
                vec![*check]
            };
            let mut violations = 0;
            for c in checks {
                let mut rep = run_check(c, cli.seed, opts)?;
                violations += rep.violations;
                emit(&mut rep, out)?;
            }
            return Ok(if violations == 0 { Outcome::Clean } else { Outcome::Violations(violations) });
        }
        Command::Sweep { domain, count, h, resolution } => {
            let opts = VerifyOpts {
                domain: Some(domain.clone()),
                count: Some(*count),
                h: Some(*h),
                resolution: Some(*resolution),
                ..Default::default()
            };
            let mut rep = yau(&opts, 30)?;
            rep.check_id = "sweep".into();
            for a in &mut rep.attachments {
                a.0 = "sweep.svg".into();
            }
            emit(&mut rep, out)?;
        }
    }
    Ok(Outcome::Clean)
}

const ALL: [Check; 12] = [
    Check::Monotonicity,
    Check::ThreeBall,
    Check::BoundaryThreeBall,
    Check::Subharmonic,
    Check::AlmostMonotonicity,
    Check::Corollary,
    Check::InteriorNodal,
    Check::BoundaryNodal,
    Check::Cauchy,
    Check::Hyperplane,
    Check::DfDoubling,
    Check::Yau,
];

fn numbers(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad {what} component {t:?}"))))
        .collect()
}

/// Radii of the almost-monotonicity grid, inside `(0, 1/16)`.
fn r_grid() -> Vec<f64> {
    (0..8).map(|i| 0.002 * 30f64.powf(i as f64 / 7.0)).collect()
}

pub fn run_check(check: Check, seed: u64, o: &VerifyOpts) -> Result<CheckReport> {
    let cases = |d: usize| o.cases.unwrap_or(d);
    match check {
        Check::Monotonicity => verify::check_interior_monotonicity(seed, cases(50), 20),
        Check::ThreeBall => {
            let n = cases(100);
            verify::check_three_ball_interior(seed, n - n / 4, n / 4)
        }
        Check::BoundaryThreeBall => verify::check_three_ball_boundary(seed, cases(100)),
        Check::Subharmonic => {
            let n = cases(100);
            verify::check_subharmonic(seed, n - n / 4, n / 4)
        }
        Check::AlmostMonotonicity => verify::check_almost_monotonicity(seed, cases(20), &r_grid()),
        Check::Corollary => verify::check_corollary_shift(seed, cases(100)),
        Check::InteriorNodal => verify::check_interior_nodal_bound(seed, cases(50)),
        Check::BoundaryNodal => verify::check_boundary_nodal_bound(),
        Check::Cauchy => verify::check_cauchy().map(|(rep, _)| rep),
        Check::Hyperplane => verify::check_hyperplane(seed, cases(20), o.n0.unwrap_or(10.0)),
        Check::DfDoubling => {
            let (domain, corpus) = corpus(o, 20, 0.04)?;
            verify::check_df_doubling_bound(&domain, &corpus, o.r.unwrap_or(0.05), true)
        }
        Check::Yau => yau(o, 30),
        Check::All => Err(Error::Precondition("`all` is expanded by the caller".into())),
    }
}

/// The domain and its first eigenpairs: closed form on the unit square, FEM elsewhere.
fn corpus(o: &VerifyOpts, count: usize, h: f64) -> Result<(PolygonDomain, Vec<EigenMode>)> {
    let domain = match &o.domain {
        Some(p) => at(p, PolygonDomain::load(p))?,
        None => PolygonDomain::unit_square(),
    };
    let count = o.count.unwrap_or(count);
    let corpus = if domain.as_rectangle() == Some((1.0, 1.0)) {
        verify::square_corpus(count)
    } else {
        verify::fem_corpus(&domain, o.h.unwrap_or(h), count)?
    };
    Ok((domain, corpus))
}

fn yau(o: &VerifyOpts, count: usize) -> Result<CheckReport> {
    let (domain, corpus) = corpus(o, count, 0.03)?;
    verify::yau_sweep(&corpus, &Region::polygon(domain)?, o.resolution.unwrap_or(0.005), None)
}

fn emit(rep: &mut CheckReport, out: &Path) -> Result<()> {
    let csv = rep.csv_string()?;
    let rows = check_csv("check csv", &csv, None)?;
    check_json("summary", &rep.summary_json()?, &["check_id", "cases", "violations", "worst_margin", "runtime_ms"])?;
    for (name, body) in &rep.attachments {
        if name.ends_with(".svg") {
            check_svg("plot", body)?;
        }
    }
    for p in rep.write(out)? {
        println!("wrote {}", p.display());
    }
    println!(
        "{}: {rows} rows, {} cases, {} violations, worst margin {}",
        rep.check_id, rep.cases, rep.violations, rep.worst_margin
    );
    for (k, v) in &rep.fitted {
        println!("  {k} = {v}");
    }
    for n in &rep.notes {
        println!("  note: {n}");
    }
    Ok(())
}
