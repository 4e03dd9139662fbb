//! Experiment drivers. Each runner returns a list of [`ExperimentRow`]s whose
//! verdicts can be recomputed from the numbers stored in the row itself.
//!
//! Rows are computed with a parallel map that keeps input order, so output is
//! identical for any number of worker threads.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capsolve::{solve_capacity, BoundarySet, SolveReport, SolverParams};
use crate::condenser::{
    cap_hyp_disk, isoarea_radius, isoperim_radius, lemma_f, ref_cap_m1, ref_cap_m2, triangle_bounds_from_s,
    DiskFamily,
};
use crate::error::{Error, Result};
use crate::hypgeom::{
    equilateral_triangle_radius, polygon_measures, polygon_perimeter, regular_polygon, regular_radius_from_area,
    regular_radius_from_perimeter, HypDisk, HypPolygon,
};
use crate::specfun::{check_mu_bound, f1, f2, mu};
use crate::Complex64;

/// Largest relative deviation from reference values that counts as
/// agreement.
pub const REFERENCE_REL_TOL: f64 = 5e-4;
/// Absolute slack of the perimeter upper bound check.
pub const PERIMETER_BOUND_SLACK: f64 = 1e-6;
/// Tolerance for the area match between a triangle and its equilateral
/// competitor.
pub const AREA_MATCH_TOL: f64 = 1e-9;
pub const DEFAULT_POLYGON_TOL: f64 = 5e-4;
pub const DEFAULT_SMOOTH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    InconclusiveWithinResidual,
    Fail,
}

/// A single inequality `lhs relation rhs`, judged with an absolute slack.
///
/// With zero slack the relation is checked exactly. Otherwise a margin
/// larger than `slack` passes, one below `-slack` fails, and anything in
/// between is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub slack: f64,
    pub status: Status,
}

impl Verdict {
    pub fn new(lhs: f64, relation: Relation, rhs: f64, slack: f64) -> Self {
        let status = Self::judge(lhs, relation, rhs, slack);
        Self { lhs, relation, rhs, slack, status }
    }

    pub fn judge(lhs: f64, relation: Relation, rhs: f64, slack: f64) -> Status {
        let margin = match relation {
            Relation::Le | Relation::Lt => rhs - lhs,
            Relation::Ge | Relation::Gt => lhs - rhs,
        };
        if !margin.is_finite() {
            return Status::Fail;
        }
        if slack == 0.0 {
            let ok = match relation {
                Relation::Le | Relation::Ge => margin >= 0.0,
                Relation::Lt | Relation::Gt => margin > 0.0,
            };
            return if ok { Status::Pass } else { Status::Fail };
        }
        if margin > slack {
            Status::Pass
        } else if margin < -slack {
            Status::Fail
        } else {
            Status::InconclusiveWithinResidual
        }
    }

    /// Recomputes the status from the stored numbers.
    pub fn recompute(&self) -> Status {
        Self::judge(self.lhs, self.relation, self.rhs, self.slack)
    }

    /// True unless the inequality is violated beyond the slack.
    pub fn holds(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub id: String,
    pub inputs: Value,
    pub values: BTreeMap<String, f64>,
    /// Largest relative residual bound among the solves in this row. Zero for
    /// closed-form rows.
    pub residual: f64,
    pub verdicts: BTreeMap<String, Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ExperimentRow {
    fn new(id: impl Into<String>, inputs: Value) -> Self {
        Self {
            id: id.into(),
            inputs,
            values: BTreeMap::new(),
            residual: 0.0,
            verdicts: BTreeMap::new(),
            error: None,
        }
    }

    fn failed(id: impl Into<String>, inputs: Value, err: &Error) -> Self {
        Self { error: Some(err.to_string()), ..Self::new(id, inputs) }
    }

    fn value(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), v);
    }

    fn verdict(&mut self, key: &str, v: Verdict) {
        self.verdicts.insert(key.to_string(), v);
    }

    /// Worst verdict status of the row. Rows carrying an error count as
    /// failures.
    pub fn status(&self) -> Status {
        if self.error.is_some() {
            return Status::Fail;
        }
        self.verdicts.values().map(|v| v.status).max().unwrap_or(Status::Pass)
    }
}

/// Overall outcome of a run, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    VerdictFailed,
    RowError,
}

impl Outcome {
    pub fn of(rows: &[ExperimentRow]) -> Self {
        if rows.iter().any(|r| r.error.is_some()) {
            Outcome::RowError
        } else if rows.iter().any(|r| r.status() == Status::Fail) {
            Outcome::VerdictFailed
        } else {
            Outcome::Ok
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::VerdictFailed => 1,
            Outcome::RowError => 2,
        }
    }
}

/// Solver settings shared by all runners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub tol: f64,
    pub max_refine: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { tol: DEFAULT_POLYGON_TOL, max_refine: SolverParams::default().max_refine }
    }
}

impl RunConfig {
    fn solve(&self, p: &HypPolygon) -> Result<SolveReport> {
        let params = SolverParams { max_refine: self.max_refine, ..SolverParams::default() };
        solve_capacity(&BoundarySet::polygon(p.clone())?, &params, self.tol)
    }
}

/// A polygon given by its vertices, with optional reference capacities of
/// the polygon and of its symmetric competitor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonCase {
    #[serde(default)]
    pub id: String,
    pub vertices: Vec<[f64; 2]>,
    #[serde(default)]
    pub reference: Option<[f64; 2]>,
}

impl PolygonCase {
    pub fn new(id: impl Into<String>, vertices: &[[f64; 2]]) -> Self {
        Self { id: id.into(), vertices: vertices.to_vec(), reference: None }
    }

    fn polygon(&self) -> Result<HypPolygon> {
        let pts: Vec<Complex64> = self.vertices.iter().map(|v| Complex64::new(v[0], v[1])).collect();
        HypPolygon::from_complex(&pts)
    }

    fn inputs(&self) -> Value {
        json!({ "vertices": self.vertices })
    }
}

fn rel_dev(value: f64, reference: f64) -> f64 {
    (value / reference - 1.0).abs()
}

/// Slack for comparing two solved capacities: twice the larger absolute
/// error bound.
fn pair_slack(a: (f64, f64), b: (f64, f64)) -> f64 {
    2.0 * (a.0 * a.1).max(b.0 * b.1)
}

fn perimeter_bound(row: &mut ExperimentRow, key: &str, cap: f64, perimeter: f64) -> Result<()> {
    let bound = ref_cap_m2(perimeter)?;
    row.verdict(key, Verdict::new(cap, Relation::Le, bound, PERIMETER_BOUND_SLACK));
    Ok(())
}

fn reference_check(row: &mut ExperimentRow, key: &str, value: f64, reference: f64) {
    row.value(&format!("reference_{key}"), reference);
    row.verdict(
        &format!("reference_{key}"),
        Verdict::new(rel_dev(value, reference), Relation::Le, REFERENCE_REL_TOL, 0.0),
    );
}

/// `mu(r)` for each input.
pub fn run_mu(rs: &[f64]) -> Vec<ExperimentRow> {
    rs.iter()
        .map(|&r| {
            let inputs = json!({ "r": r });
            match mu(r) {
                Ok(v) => {
                    let mut row = ExperimentRow::new(format!("mu_r{r}"), inputs);
                    row.value("mu", v);
                    row
                }
                Err(e) => ExperimentRow::failed(format!("mu_r{r}"), inputs, &e),
            }
        })
        .collect()
}

/// Solved capacity of a hyperbolic disk next to its closed form.
pub fn run_cap_disk(disks: &[HypDisk], tol: f64, max_refine: u32) -> Vec<ExperimentRow> {
    disks
        .par_iter()
        .enumerate()
        .map(|(k, d)| {
            let z = d.center.z();
            let id = format!("disk{}", k + 1);
            let inputs = json!({ "center": [z.re, z.im], "radius": d.radius });
            let solve = || -> Result<ExperimentRow> {
                let params = SolverParams { max_refine, ..SolverParams::smooth() };
                let rep = solve_capacity(&BoundarySet::hyp_disk(d)?, &params, tol)?;
                let exact = cap_hyp_disk(d.radius)?;
                let mut row = ExperimentRow::new(&id, inputs.clone());
                row.value("capacity", rep.capacity);
                row.value("closed_form", exact);
                row.value("rel_error", rel_dev(rep.capacity, exact));
                row.residual = rep.boundary_residual;
                Ok(row)
            };
            solve().unwrap_or_else(|e| ExperimentRow::failed(&id, inputs.clone(), &e))
        })
        .collect()
}

/// Capacity of each polygon with its measures and the perimeter bound.
pub fn run_cap_polygon(cases: &[PolygonCase], cfg: &RunConfig) -> Vec<ExperimentRow> {
    cases
        .par_iter()
        .map(|c| {
            let solve = || -> Result<ExperimentRow> {
                let p = c.polygon()?;
                let m = polygon_measures(&p)?;
                let rep = cfg.solve(&p)?;
                let mut row = ExperimentRow::new(&c.id, c.inputs());
                row.value("capacity", rep.capacity);
                row.value("modulus_q", rep.modulus_q);
                row.value("area", m.area);
                row.value("perimeter", m.perimeter);
                row.residual = rep.boundary_residual;
                perimeter_bound(&mut row, "perimeter_bound", rep.capacity, m.perimeter)?;
                Ok(row)
            };
            solve().unwrap_or_else(|e| ExperimentRow::failed(&c.id, c.inputs(), &e))
        })
        .collect()
}

/// Compares each triangle with the equilateral triangle of the same area.
pub fn run_triangle_conjecture(cases: &[PolygonCase], cfg: &RunConfig) -> Vec<ExperimentRow> {
    cases
        .par_iter()
        .map(|c| triangle_row(c, cfg).unwrap_or_else(|e| ExperimentRow::failed(&c.id, c.inputs(), &e)))
        .collect()
}

fn triangle_row(c: &PolygonCase, cfg: &RunConfig) -> Result<ExperimentRow> {
    if c.vertices.len() != 3 {
        return Err(Error::Geometry(format!("a triangle needs 3 vertices, got {}", c.vertices.len())));
    }
    let t = c.polygon()?;
    let m = polygon_measures(&t)?;
    let omega = m.angles.iter().sum::<f64>() / 3.0;
    let r = equilateral_triangle_radius(omega)?;
    let t0 = regular_polygon(3, r)?;
    let m0 = polygon_measures(&t0)?;
    let (a, b) = (cfg.solve(&t)?, cfg.solve(&t0)?);

    let mut row = ExperimentRow::new(&c.id, c.inputs());
    row.value("cap_T", a.capacity);
    row.value("cap_T0", b.capacity);
    row.value("r0", r);
    row.value("area_T", m.area);
    row.value("area_T0", m0.area);
    row.value("perimeter_T", m.perimeter);
    row.value("perimeter_T0", m0.perimeter);
    row.residual = a.boundary_residual.max(b.boundary_residual);
    let slack = pair_slack((a.capacity, a.boundary_residual), (b.capacity, b.boundary_residual));
    row.verdict("conjecture", Verdict::new(a.capacity, Relation::Ge, b.capacity, slack));
    row.verdict(
        "area_match",
        Verdict::new((m.area - m0.area).abs(), Relation::Lt, AREA_MATCH_TOL, 0.0),
    );
    perimeter_bound(&mut row, "perimeter_bound_T", a.capacity, m.perimeter)?;
    perimeter_bound(&mut row, "perimeter_bound_T0", b.capacity, m0.perimeter)?;
    if let Some([rt, rt0]) = c.reference {
        reference_check(&mut row, "T", a.capacity, rt);
        reference_check(&mut row, "T0", b.capacity, rt0);
    }
    Ok(row)
}

/// Compares each polygon with the regular polygon of the same perimeter and
/// vertex count.
pub fn run_polygon_conjecture(cases: &[PolygonCase], cfg: &RunConfig) -> Vec<ExperimentRow> {
    cases
        .par_iter()
        .map(|c| polygon_row(c, cfg).unwrap_or_else(|e| ExperimentRow::failed(&c.id, c.inputs(), &e)))
        .collect()
}

fn polygon_row(c: &PolygonCase, cfg: &RunConfig) -> Result<ExperimentRow> {
    let p = c.polygon()?;
    let m = p.len();
    let perimeter = polygon_perimeter(&p);
    let r = regular_radius_from_perimeter(m, perimeter)?;
    let p0 = regular_polygon(m, r)?;
    let (a, b) = (cfg.solve(&p)?, cfg.solve(&p0)?);

    let mut row = ExperimentRow::new(&c.id, c.inputs());
    row.value("cap_P", a.capacity);
    row.value("cap_P0", b.capacity);
    row.value("r0", r);
    row.value("perimeter", perimeter);
    row.residual = a.boundary_residual.max(b.boundary_residual);
    let slack = pair_slack((a.capacity, a.boundary_residual), (b.capacity, b.boundary_residual));
    row.verdict("conjecture", Verdict::new(a.capacity, Relation::Le, b.capacity, slack));
    perimeter_bound(&mut row, "perimeter_bound_P", a.capacity, perimeter)?;
    perimeter_bound(&mut row, "perimeter_bound_P0", b.capacity, polygon_perimeter(&p0))?;
    if let Some([rp, rp0]) = c.reference {
        reference_check(&mut row, "P", a.capacity, rp);
        reference_check(&mut row, "P0", b.capacity, rp0);
    }
    Ok(row)
}

/// Capacities of regular polygons, one row per `(m, r)` pair in row-major
/// order over `rs` then `ms`.
///
/// Each row also checks growth against its left and upper neighbours in the
/// grid. `reference[i][j]`, when given, is the reference value for
/// `(rs[i], ms[j])`.
pub fn run_regular_table(
    ms: &[usize],
    rs: &[f64],
    reference: Option<&[Vec<f64>]>,
    cfg: &RunConfig,
) -> Vec<ExperimentRow> {
    let pairs: Vec<(usize, usize)> = (0..rs.len()).flat_map(|i| (0..ms.len()).map(move |j| (i, j))).collect();
    let solved: Vec<Result<(SolveReport, f64)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let p = regular_polygon(ms[j], rs[i])?;
            Ok((cfg.solve(&p)?, polygon_perimeter(&p)))
        })
        .collect();
    let mut rows = Vec::with_capacity(pairs.len());
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let (m, r) = (ms[j], rs[i]);
        let id = format!("m{m}_r{r}");
        let inputs = json!({ "m": m, "r": r });
        let (rep, perimeter) = match &solved[k] {
            Ok(v) => *v,
            Err(e) => {
                rows.push(ExperimentRow::failed(id, inputs, e));
                continue;
            }
        };
        let mut row = ExperimentRow::new(id, inputs);
        row.value("capacity", rep.capacity);
        row.value("perimeter", perimeter);
        row.residual = rep.boundary_residual;
        let here = (rep.capacity, rep.boundary_residual);
        let neighbours = [
            ("increasing_in_m", j.checked_sub(1).map(|jj| k - j + jj)),
            ("increasing_in_r", i.checked_sub(1).map(|_| k - ms.len())),
        ];
        for (key, prev) in neighbours {
            if let Some(Ok((q, _))) = prev.map(|p| &solved[p]) {
                let slack = pair_slack(here, (q.capacity, q.boundary_residual));
                row.verdict(key, Verdict::new(rep.capacity, Relation::Gt, q.capacity, slack));
            }
        }
        if let Err(e) = perimeter_bound(&mut row, "perimeter_bound", rep.capacity, perimeter) {
            rows.push(ExperimentRow::failed(row.id, row.inputs, &e));
            continue;
        }
        if let Some(v) = reference.and_then(|t| t.get(i)).and_then(|row| row.get(j)) {
            reference_check(&mut row, "capacity", rep.capacity, *v);
        }
        rows.push(row);
    }
    rows
}

/// Capacity grid laid out with one line per radius and one column per `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularGrid {
    pub ms: Vec<usize>,
    pub rs: Vec<f64>,
    /// `caps[i][j]` for `(rs[i], ms[j])`; `NaN` where the solve failed.
    pub caps: Vec<Vec<f64>>,
}

impl RegularGrid {
    pub fn from_rows(ms: &[usize], rs: &[f64], rows: &[ExperimentRow]) -> Self {
        let caps = rs
            .iter()
            .map(|r| {
                ms.iter()
                    .map(|m| {
                        let id = format!("m{m}_r{r}");
                        rows.iter()
                            .find(|row| row.id == id)
                            .and_then(|row| row.values.get("capacity").copied())
                            .unwrap_or(f64::NAN)
                    })
                    .collect()
            })
            .collect();
        Self { ms: ms.to_vec(), rs: rs.to_vec(), caps }
    }
}

#[derive(Clone, Copy)]
enum Sequence {
    Area,
    Perimeter,
}

/// Regular `m`-gons of fixed hyperbolic area `c`, expected to have
/// decreasing capacity bounded below by the disk of the same area.
pub fn run_sequence_area(c: f64, ms: &[usize], cfg: &RunConfig) -> Result<Vec<ExperimentRow>> {
    if !(c > 0.0 && c < PI) {
        return Err(Error::Domain(format!("area sequence requires 0 < c < pi, got {c}")));
    }
    run_sequence(Sequence::Area, c, ms, cfg)
}

/// Regular `m`-gons of fixed hyperbolic perimeter `c`, expected to have
/// increasing capacity bounded above by the disk of the same perimeter.
pub fn run_sequence_perim(c: f64, ms: &[usize], cfg: &RunConfig) -> Result<Vec<ExperimentRow>> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("perimeter sequence requires c > 0, got {c}")));
    }
    run_sequence(Sequence::Perimeter, c, ms, cfg)
}

fn run_sequence(kind: Sequence, c: f64, ms: &[usize], cfg: &RunConfig) -> Result<Vec<ExperimentRow>> {
    let (tag, bound) = match kind {
        Sequence::Area => ("area", ref_cap_m1(c)?),
        Sequence::Perimeter => ("perim", ref_cap_m2(c)?),
    };
    let solved: Vec<Result<(f64, SolveReport, f64)>> = ms
        .par_iter()
        .map(|&m| {
            let r = match kind {
                Sequence::Area => regular_radius_from_area(m, c)?,
                Sequence::Perimeter => regular_radius_from_perimeter(m, c)?,
            };
            let p = regular_polygon(m, r)?;
            Ok((r, cfg.solve(&p)?, polygon_perimeter(&p)))
        })
        .collect();
    let mut rows = Vec::with_capacity(ms.len());
    let mut prev: Option<(f64, f64)> = None;
    for (k, &m) in ms.iter().enumerate() {
        let id = format!("{tag}_c{c}_m{m}");
        let inputs = json!({ "c": c, "m": m });
        let (r, rep, perimeter) = match &solved[k] {
            Ok(v) => *v,
            Err(e) => {
                rows.push(ExperimentRow::failed(id, inputs, e));
                prev = None;
                continue;
            }
        };
        let here = (rep.capacity, rep.boundary_residual);
        let mut row = ExperimentRow::new(id, inputs);
        row.value("r", r);
        row.value("capacity", rep.capacity);
        row.value("disk_bound", bound);
        row.residual = rep.boundary_residual;
        let own_slack = 2.0 * here.0 * here.1;
        match kind {
            Sequence::Area => {
                row.verdict("bound", Verdict::new(rep.capacity, Relation::Ge, bound, own_slack));
                if let Some(q) = prev {
                    row.value("previous", q.0);
                    row.verdict("decreasing", Verdict::new(rep.capacity, Relation::Lt, q.0, pair_slack(here, q)));
                }
            }
            Sequence::Perimeter => {
                row.verdict("bound", Verdict::new(rep.capacity, Relation::Le, bound, own_slack));
                if let Some(q) = prev {
                    row.value("previous", q.0);
                    row.verdict("increasing", Verdict::new(rep.capacity, Relation::Gt, q.0, pair_slack(here, q)));
                }
            }
        }
        perimeter_bound(&mut row, "perimeter_bound", rep.capacity, perimeter)?;
        prev = Some(here);
        rows.push(row);
    }
    Ok(rows)
}

/// `f1(c) - f2(c)` on the given grid, with positivity verdicts.
pub fn run_f1f2(cs: &[f64]) -> Vec<ExperimentRow> {
    cs.par_iter()
        .map(|&c| {
            let id = format!("f1f2_c{c}");
            let inputs = json!({ "c": c });
            match f1(c).and_then(|a| Ok((a, f2(c)?))) {
                Ok((a, b)) => {
                    let mut row = ExperimentRow::new(id, inputs);
                    row.value("f1", a);
                    row.value("f2", b);
                    row.value("difference", a - b);
                    row.verdict("positive", Verdict::new(a, Relation::Gt, b, 0.0));
                    row
                }
                Err(e) => ExperimentRow::failed(id, inputs, &e),
            }
        })
        .collect()
}

/// Solved capacity of the equilateral triangle `s, s w, s w^2` against its
/// closed-form lower and upper bounds.
pub fn run_triangle_bounds(ss: &[f64], cfg: &RunConfig) -> Vec<ExperimentRow> {
    ss.par_iter()
        .map(|&s| {
            let id = format!("triangle_s{s}");
            let inputs = json!({ "s": s });
            triangle_bounds_row(s, cfg).unwrap_or_else(|e| ExperimentRow::failed(id, inputs, &e))
        })
        .collect()
}

fn triangle_bounds_row(s: f64, cfg: &RunConfig) -> Result<ExperimentRow> {
    let b = triangle_bounds_from_s(s)?;
    let t = regular_polygon(3, s)?;
    let rep = cfg.solve(&t)?;
    let cap = rep.capacity;
    let slack = 2.0 * cap * rep.boundary_residual;
    let mut row = ExperimentRow::new(format!("triangle_s{s}"), json!({ "s": s }));
    row.value("lower", b.lower);
    row.value("capacity", cap);
    row.value("upper", b.upper_s);
    row.value("upper_perim", b.upper_perim);
    row.value("upper_area", b.upper_area);
    row.value("perimeter", b.perimeter);
    row.value("area", b.area);
    row.residual = rep.boundary_residual;
    row.verdict("lower", Verdict::new(cap, Relation::Ge, b.lower, slack));
    row.verdict("upper", Verdict::new(cap, Relation::Le, b.upper_s, slack));
    let scale = b.upper_s;
    row.verdict(
        "upper_perim_form",
        Verdict::new((b.upper_perim - b.upper_s).abs(), Relation::Le, 1e-10 * scale, 0.0),
    );
    row.verdict(
        "upper_area_form",
        Verdict::new((b.upper_area - b.upper_s).abs(), Relation::Le, 1e-10 * scale, 0.0),
    );
    perimeter_bound(&mut row, "perimeter_bound", cap, b.perimeter)?;
    Ok(row)
}

type Suite = fn(u64) -> Result<ExperimentRow>;

/// Closed-form property suites on seeded random samples.
///
/// One row per suite; each verdict compares the worst observed value with
/// its limit.
pub fn run_verify(seed: u64) -> Vec<ExperimentRow> {
    let suites: [(&str, Suite); 5] = [
        ("mu_identities", verify_mu_identities),
        ("mu_bound", verify_mu_bound),
        ("disk_families", verify_disk_families),
        ("perimeter_kernel", verify_perimeter_kernel),
        ("triangle_bound_forms", verify_triangle_forms),
    ];
    suites
        .par_iter()
        .map(|(id, f)| f(seed).unwrap_or_else(|e| ExperimentRow::failed(*id, json!({ "seed": seed }), &e)))
        .collect()
}

fn verify_mu_identities(_seed: u64) -> Result<ExperimentRow> {
    let (mut product, mut doubling) = (0.0_f64, 0.0_f64);
    for k in 1..100 {
        let r = k as f64 / 100.0;
        let rc = ((1.0 - r) * (1.0 + r)).sqrt();
        product = product.max((mu(r)? * mu(rc)? - PI * PI / 4.0).abs());
        let r2 = (r / (1.0 + rc)).powi(2);
        doubling = doubling.max((mu(r)? - 0.5 * mu(r2)?).abs());
    }
    let centre = (mu(FRAC_1_SQRT_2)? - FRAC_PI_2).abs();
    let mut row = ExperimentRow::new("mu_identities", json!({ "grid": 99 }));
    row.value("max_product_error", product);
    row.value("max_doubling_error", doubling);
    row.value("centre_error", centre);
    row.verdict("product", Verdict::new(product, Relation::Lt, 1e-11, 0.0));
    row.verdict("doubling", Verdict::new(doubling, Relation::Lt, 1e-11, 0.0));
    row.verdict("centre", Verdict::new(centre, Relation::Lt, 1e-13, 0.0));
    Ok(row)
}

fn verify_mu_bound(_seed: u64) -> Result<ExperimentRow> {
    let n = 1000;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..n {
        let t = 0.001 + 0.998 * (k as f64 + 0.5) / n as f64;
        let c = check_mu_bound(t)?;
        lo = lo.min(c.ratio);
        hi = hi.max(c.ratio);
    }
    let mut row = ExperimentRow::new("mu_bound", json!({ "samples": n, "t_min": 0.001, "t_max": 0.999 }));
    row.value("min_ratio", lo);
    row.value("max_ratio", hi);
    row.verdict("lower", Verdict::new(lo, Relation::Gt, 1.0, 0.0));
    row.verdict("upper", Verdict::new(hi, Relation::Lt, FRAC_PI_2, 0.0));
    Ok(row)
}

/// Random radius lists with `p in 2..=6` and `L_j in (0.05, 4)`.
pub fn random_radius_lists(seed: u64, n: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let p = rng.random_range(2..=6);
            (0..p).map(|_| rng.random_range(0.05..4.0)).collect()
        })
        .collect()
}

fn verify_disk_families(seed: u64) -> Result<ExperimentRow> {
    let n = 1000;
    // worst ratios merged / sum (must stay <= 1) and L / L^ (must stay < 1)
    let (mut perim, mut area, mut radii_ratio) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut f_increase = f64::NEG_INFINITY;
    for radii in random_radius_lists(seed, n) {
        let fam = DiskFamily::new(radii.clone())?;
        let sum = fam.cap_sum()?;
        let (lp, la) = (isoperim_radius(&radii)?, isoarea_radius(&radii)?);
        perim = perim.max(cap_hyp_disk(lp)? / sum);
        area = area.max(cap_hyp_disk(la)? / sum);
        radii_ratio = radii_ratio.max(la / lp);
        for k in 1..100 {
            let (a, b) = (lemma_f((k - 1) as f64 / 99.0, &radii), lemma_f(k as f64 / 99.0, &radii));
            f_increase = f_increase.max(b - a);
        }
    }
    let mut row = ExperimentRow::new("disk_families", json!({ "seed": seed, "samples": n }));
    row.value("max_perimeter_ratio", perim);
    row.value("max_area_ratio", area);
    row.value("max_radius_ratio", radii_ratio);
    row.value("max_f_step", f_increase);
    row.verdict("isoperimetric", Verdict::new(perim, Relation::Le, 1.0, 0.0));
    row.verdict("isoarea", Verdict::new(area, Relation::Le, 1.0, 0.0));
    row.verdict("radii_ordered", Verdict::new(radii_ratio, Relation::Lt, 1.0, 0.0));
    row.verdict("f_decreasing", Verdict::new(f_increase, Relation::Lt, 0.0, 0.0));
    Ok(row)
}

fn verify_perimeter_kernel(seed: u64) -> Result<ExperimentRow> {
    let n = 1000;
    let f = |t: f64| 2.0 * PI / (1.0 / t).asinh();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let p = rng.random_range(2..=6);
        let ts: Vec<f64> = (0..p).map(|_| rng.random_range(1e-3..30.0)).collect();
        let rhs: f64 = ts.iter().map(|&t| f(t)).sum();
        worst = worst.max(f(ts.iter().sum()) / rhs);
    }
    let mut row = ExperimentRow::new("perimeter_kernel", json!({ "seed": seed, "samples": n }));
    row.value("max_ratio", worst);
    row.verdict("subadditive", Verdict::new(worst, Relation::Le, 1.0, 0.0));
    Ok(row)
}

fn verify_triangle_forms(_seed: u64) -> Result<ExperimentRow> {
    let (mut perim, mut area) = (0.0_f64, 0.0_f64);
    let mut ordered = true;
    for k in 1..200 {
        let b = triangle_bounds_from_s(k as f64 / 200.0)?;
        perim = perim.max(rel_dev(b.upper_perim, b.upper_s));
        area = area.max(rel_dev(b.upper_area, b.upper_s));
        ordered &= b.lower <= b.upper_s;
    }
    let mut row = ExperimentRow::new("triangle_bound_forms", json!({ "grid": 199 }));
    row.value("max_perim_form_error", perim);
    row.value("max_area_form_error", area);
    row.verdict("perim_form", Verdict::new(perim, Relation::Le, 1e-12, 0.0));
    row.verdict("area_form", Verdict::new(area, Relation::Le, 1e-10, 0.0));
    row.verdict("ordered", Verdict::new(if ordered { 1.0 } else { 0.0 }, Relation::Ge, 1.0, 0.0));
    Ok(row)
}

/// Published capacities used as default inputs.
pub mod tables {
    use super::PolygonCase;

    const TRIANGLES: [([[f64; 2]; 3], [f64; 2]); 10] = [
        ([[0.6, 0.0], [0.2, -0.5], [-0.3, -0.5]], [5.61438997196548, 4.96507462804135]),
        ([[0.9, 0.0], [0.2, -0.5], [-0.3, -0.5]], [7.57256635825877, 5.39880575287883]),
        ([[0.0, 0.3], [0.3, -0.5], [-0.3, -0.5]], [5.63768713031744, 5.60191869448996]),
        ([[0.0, 0.5], [0.25, -0.4], [-0.25, -0.4]], [5.52754816211627, 5.21348957109432]),
        ([[0.0, 0.9], [0.78, -0.45], [-0.78, -0.45]], [13.2881689301735, 13.2881521954927]),
        ([[0.0, 0.95], [0.7, -0.4], [-0.5, -0.8]], [13.92508317827, 12.4763956630121]),
        ([[0.0, 0.2], [0.17, -0.1], [-0.17, -0.1]], [3.23750018859583, 3.23740547036233]),
        ([[0.0, 0.1], [0.087, -0.05], [-0.087, -0.05]], [2.40145519669907, 2.40145213607884]),
        ([[0.0, -0.1], [0.5, -0.5], [-0.5, -0.5]], [5.98941024500545, 4.85509874205801]),
        ([[0.0, -0.1], [0.7, -0.5], [-0.7, -0.5]], [8.25251632029587, 4.89997376235771]),
    ];

    /// Triangles with the capacities of the triangle and of the equilateral
    /// triangle of equal area.
    pub fn triangles() -> Vec<PolygonCase> {
        TRIANGLES
            .iter()
            .enumerate()
            .map(|(k, (v, r))| PolygonCase { id: format!("T{}", k + 1), vertices: v.to_vec(), reference: Some(*r) })
            .collect()
    }

    const POLYGONS: [(&[[f64; 2]], [f64; 2]); 7] = [
        (&[[0.6, 0.0], [0.1, -0.8], [-0.5, 0.6]], [9.0274303701827, 9.07270475215184]),
        (&[[0.601, 0.0], [0.0, -0.6], [-0.599, 0.0], [0.0, 0.6]], [8.3279404581868, 8.32794231176445]),
        (
            &[[0.6, 0.0], [0.1, -0.8], [-0.5, -0.5], [-0.5, 0.6], [0.5, 0.5]],
            [11.9589944965738, 12.0640771315217],
        ),
        (
            &[[0.6, 0.0], [0.1, -0.8], [-0.5, -0.5], [-0.8, 0.0], [-0.5, 0.6], [0.5, 0.5]],
            [13.5302396750603, 13.6288953941389],
        ),
        (
            &[[0.6, 0.0], [0.1, -0.8], [-0.5, -0.5], [-0.8, 0.0], [-0.5, 0.6], [0.0, 0.9], [0.5, 0.5]],
            [15.9302933204252, 16.0808062702908],
        ),
        (
            &[[0.6, 0.0], [0.5, -0.5], [0.1, -0.8], [-0.5, -0.5], [-0.8, 0.0], [-0.5, 0.6], [0.0, 0.9], [0.5, 0.5]],
            [16.7814228075178, 16.9697317440523],
        ),
        (
            &[
                [0.7, 0.2],
                [0.7, -0.2],
                [0.4, -0.5],
                [0.0, -0.8],
                [-0.4, -0.7],
                [-0.7, -0.4],
                [-0.8, 0.0],
                [-0.7, 0.3],
                [-0.4, 0.7],
                [0.0, 0.9],
                [0.3, 0.8],
                [0.5, 0.5],
            ],
            [20.8062404526496, 21.0023784573094],
        ),
    ];

    /// Polygons with the capacities of the polygon and of the regular polygon
    /// of equal perimeter.
    pub fn polygons() -> Vec<PolygonCase> {
        POLYGONS
            .iter()
            .map(|(v, r)| PolygonCase { id: format!("P{}", v.len()), vertices: v.to_vec(), reference: Some(*r) })
            .collect()
    }

    pub const REGULAR_MS: [usize; 5] = [3, 4, 5, 6, 7];
    pub const REGULAR_RS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

    const REGULAR_CAPS: [[f64; 5]; 9] = [
        [2.3993612914, 2.5281340146, 2.5942462887, 2.6324787004, 2.6565098093],
        [3.2528141529, 3.4946167264, 3.6244949167, 3.7016779579, 3.7510464324],
        [4.0913694284, 4.4816138033, 4.7030688851, 4.8395121547, 4.9289424320],
        [4.9856760383, 5.5743497987, 5.9308261981, 6.1608778512, 6.3167666667],
        [5.9799062371, 6.8325631892, 7.3878902352, 7.7670978659, 8.0354723585],
        [7.1266240809, 8.3279319407, 9.1730250087, 9.7887982158, 10.248675793],
        [8.5161561610, 10.180067164, 11.444185389, 12.431726677, 13.216542846],
        [10.349853454, 12.653202360, 14.534982854, 16.110376899, 17.447408861],
        [13.274319210, 16.602537086, 19.510028327, 22.105923933, 24.452171599],
    ];

    /// Regular polygon capacities, `regular_caps()[i][j]` for
    /// `(REGULAR_RS[i], REGULAR_MS[j])`.
    pub fn regular_caps() -> Vec<Vec<f64>> {
        REGULAR_CAPS.iter().map(|r| r.to_vec()).collect()
    }
}
