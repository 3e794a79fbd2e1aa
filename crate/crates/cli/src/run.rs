//! Execute a [`TaskSpec`] and assemble the JSON report.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigcoh::completions::{completion_noninjectivity_witness, spectral_law, SubmoduleSpan, TruncationParams};
use rigcoh::cyclic::{check_hkr, check_identities, hh_graded_dims, hp_report, random_algebra, random_chain, CyclicOps, SignConvention};
use rigcoh::derham::{d_poly, de_rham_complex, infinitesimal_tower, rigid_report, Form, RigidParams, RigidPresentation};
use rigcoh::homalg::{holim_bookkeeping, rank, FiniteComplex};
use rigcoh::polyalg::{Budget, PresentedAlgebra, SparsePoly};
use rigcoh::scalars::Field;
use rigcoh::tubes::{tube_identity_check, TubeOptions, TubeSystem};
use serde::Serialize;
use serde_json::{json, Value};

use crate::task::{AlgebraSpec, Backend, Source, Suite, TaskError, TaskKind, TaskSpec};

pub const SCHEMA: &str = "rigcoh-report/1";

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Rank of one differential under both backends.
#[derive(Clone, Debug, Serialize)]
pub struct AgreementRow {
    pub complex: String,
    pub degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padic: Option<usize>,
    /// The p-adic rank was decided above the precision floor.
    pub certified: bool,
}

impl AgreementRow {
    pub fn agrees(&self) -> bool {
        match (self.rational, self.padic) {
            (Some(a), Some(b)) => !self.certified || a == b,
            _ => true,
        }
    }
}

/// Everything that depends only on the task; no clocks inside.
#[derive(Clone, Debug, Serialize)]
pub struct Payload {
    pub task: TaskSpec,
    pub backend: Backend,
    pub results: Value,
    pub checks: Vec<Check>,
    pub unresolved: Vec<usize>,
    pub agreement: Vec<AgreementRow>,
}

impl Payload {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.agreement.iter().all(|r| r.agrees())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub payload: Payload,
    pub passed: bool,
    pub timing: Timing,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub wall_clock_ms: u128,
}

impl Report {
    /// The payload alone, serialized; identical across runs of the same task.
    pub fn payload_json(&self) -> String {
        serde_json::to_string_pretty(&self.payload).expect("serializable")
    }
}

struct Ctx<'a> {
    spec: &'a TaskSpec,
    src: Source<'a>,
    backend: Backend,
    checks: Vec<Check>,
    unresolved: Vec<usize>,
    agreement: Vec<AgreementRow>,
}

impl Ctx<'_> {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    fn algebra(&self) -> &AlgebraSpec {
        self.spec.algebra.as_ref().expect("validated")
    }

    fn relations(&self) -> Result<Vec<SparsePoly>, TaskError> {
        let a = self.algebra();
        a.relations.iter().map(|r| self.src.poly(r, &a.vars)).collect()
    }

    fn budget(&self) -> Budget {
        Budget { max_pairs: self.spec.budget.groebner_pairs, ..Budget::default() }
    }

    fn presented(&self, vars: &[String], rels: Vec<SparsePoly>) -> Result<PresentedAlgebra, TaskError> {
        PresentedAlgebra::with_order(vars.to_vec(), rels, None, Default::default(), self.budget()).map_err(|e| self.src.invalid(format!("presentation: {e}")))
    }

    /// Ranks of every differential of `c`, under the selected backends.
    fn compare_ranks(&mut self, name: &str, c: &FiniteComplex) -> Result<Vec<usize>, TaskError> {
        let p = self.spec.p;
        let field = Field::padic(p, self.spec.precision).map_err(|e| self.src.invalid(e.to_string()))?;
        let mut ranks = Vec::new();
        for (k, d) in c.d.iter().enumerate() {
            let rational = if self.backend.rational() { Some(rank(d, 2, 0).map_err(|e| self.src.invalid(e.to_string()))?) } else { None };
            let (padic, certified) = if self.backend.padic() {
                match rank(&d.map(|x| field.convert(x)), p, 0) {
                    Ok(r) => (Some(r), true),
                    Err(_) => (None, false),
                }
            } else {
                (None, false)
            };
            let chosen = rational.or(padic).ok_or_else(|| self.src.invalid(format!("{name}: no certified rank in degree {k}")))?;
            ranks.push(chosen);
            self.agreement.push(AgreementRow { complex: name.to_string(), degree: k, rational, padic, certified });
        }
        Ok(ranks)
    }

    fn cohomology(&mut self, name: &str, c: &FiniteComplex) -> Result<Vec<usize>, TaskError> {
        let ranks = self.compare_ranks(name, c)?;
        Ok((0..c.dims.len())
            .map(|l| c.dims[l] - ranks.get(l).copied().unwrap_or(0) - if l > 0 { ranks[l - 1] } else { 0 })
            .collect())
    }
}

fn trim(mut v: Vec<usize>) -> Vec<usize> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Run a parsed task. `text` is the task file, used to locate parse errors.
pub fn run_task(spec: &TaskSpec, path: &str, text: &str, backend: Option<Backend>) -> Result<Report, TaskError> {
    let start = Instant::now();
    let mut spec = spec.clone();
    spec.apply_env_budget();
    let backend = backend.unwrap_or(spec.backend);
    let mut ctx = Ctx { spec: &spec, src: Source { path, text }, backend, checks: Vec::new(), unresolved: Vec::new(), agreement: Vec::new() };
    let results = match spec.kind {
        TaskKind::Rigid | TaskKind::Hp => run_rigid(&mut ctx)?,
        TaskKind::Infinitesimal => run_infinitesimal(&mut ctx)?,
        TaskKind::TubeIdentity => run_tube(&mut ctx)?,
        TaskKind::SpectralRadius => run_spectral(&mut ctx)?,
        TaskKind::Invariants => run_invariants(&mut ctx)?,
    };
    let (checks, unresolved, agreement) = (ctx.checks, ctx.unresolved, ctx.agreement);
    let payload = Payload { task: spec.clone(), backend, results, checks, unresolved, agreement };
    let passed = payload.passed();
    Ok(Report { schema: SCHEMA, version: env!("CARGO_PKG_VERSION"), payload, passed, timing: Timing { wall_clock_ms: start.elapsed().as_millis() } })
}

fn rigid_params(ctx: &Ctx) -> RigidParams {
    let mut params = ctx.spec.rigid.as_ref().map(|r| r.params.clone()).unwrap_or_default();
    params.max_dim = ctx.spec.budget.max_dim;
    params
}

fn run_rigid(ctx: &mut Ctx) -> Result<Value, TaskError> {
    let spec = ctx.spec;
    let a = ctx.algebra().clone();
    let rels = ctx.relations()?;
    let params = rigid_params(ctx);
    let pres = RigidPresentation::new(spec.p, a.vars.clone(), rels.clone(), a.degree_weights.clone()).map_err(|e| ctx.src.invalid(e.to_string()))?;
    let report = rigid_report(&pres, &params, &spec.degree_caps, spec.m_max, spec.window);
    let betti = report.betti.stabilized_betti();
    ctx.unresolved = report.betti.unresolved();
    for cell in &report.betti.cells {
        if let Some(e) = &cell.error {
            ctx.check(format!("cell D={} m={}", cell.degree_cap, cell.level_cap), false, e.clone());
        }
    }
    let holim_ok = report.holim_consistent();
    ctx.check("holim-bookkeeping", holim_ok && !report.holim_checks.is_empty(), format!("{} rows", report.holim_checks.len()));
    if let Some(want) = &spec.expect.betti {
        let detail = match &betti {
            Some(b) => format!("got {b:?}"),
            None => format!("unresolved degrees {:?}", ctx.unresolved),
        };
        ctx.check("betti", betti.as_ref() == Some(&trim(want.clone())), detail);
    }

    // the quotient de Rham complex over K at each cap: backend ranks and non-exact forms
    let alg = ctx.presented(&a.vars, rels.clone())?;
    let mut quotient = Vec::new();
    for &d in &spec.degree_caps {
        let dr = de_rham_complex(&alg, d);
        let dims = ctx.cohomology(&format!("quotient de Rham D={d}"), &dr.complex)?;
        let mut nonexact = Vec::new();
        for f in spec.rigid.as_ref().map_or(&[][..], |r| &r.nonexact) {
            let coeff = ctx.src.poly(&f.coeff, &a.vars)?;
            let mut form = Form::from_poly(&coeff);
            for v in &f.d {
                let i = a.vars.iter().position(|x| x == v).ok_or_else(|| ctx.src.invalid(format!("unknown variable {v}")))?;
                form = form.wedge(&d_poly(&SparsePoly::var(a.vars.len(), i)));
            }
            let l = f.d.len();
            let closed = l + 1 >= dr.complex.dims.len() || dr.coordinates(l + 1, &form.d()).is_some_and(|v| v.iter().all(|c| c.is_zero()));
            let exact = dr.is_exact(l, &form);
            let name = format!("{}·d{} not exact at D={d}", f.coeff.get_ref(), f.d.join("∧d"));
            ctx.check(name, closed && exact == Some(false), if closed { "" } else { "form is not closed" });
            nonexact.push(json!({"form": f.coeff.get_ref(), "d": f.d, "closed": closed, "exact": exact}));
        }
        quotient.push(json!({"degree_cap": d, "dims": dr.complex.dims, "cohomology": dims, "nonexact": nonexact}));
    }

    // presentation rebuilt through tube systems under each lift order
    let mut lifts = Vec::new();
    for order in spec.rigid.as_ref().map_or(&[][..], |r| &r.lift_orders) {
        let mut jgens = rels.clone();
        jgens.push(SparsePoly::from_i64(a.vars.len(), spec.p as i64));
        let opts = TubeOptions { lift_order: order.order(), budget: ctx.budget(), ..TubeOptions::default() };
        let ts = TubeSystem::new(spec.p, a.vars.clone(), &jgens, spec.m_max, opts).map_err(|e| ctx.src.invalid(format!("tube system: {e}")))?;
        let compatible = (1..spec.m_max).all(|m| ts.check_compatibility(m + 1, m).unwrap_or(false));
        let realized = ts.check_realization();
        let tp = RigidPresentation::from_tube_system(&ts, a.degree_weights.clone()).map_err(|e| ctx.src.invalid(e.to_string()))?;
        let r = rigid_report(&tp, &params, &spec.degree_caps, spec.m_max, spec.window);
        let b = r.betti.stabilized_betti();
        ctx.check(format!("lift order {order:?}: tube maps"), compatible && realized, "");
        ctx.check(format!("lift order {order:?}: same Betti"), b.is_some() && b == betti, format!("{b:?}"));
        lifts.push(json!({"order": order, "compatible": compatible, "realized": realized, "betti": b}));
    }

    let mut out = json!({
        "betti": report.betti,
        "stabilized_betti": betti,
        "towers": report.towers,
        "holim_checks": report.holim_checks,
        "params": report.params,
        "torus": pres.torus,
        "quotient_de_rham": quotient,
        "lift_orders": lifts,
    });
    if spec.kind == TaskKind::Hp || spec.expect.hp.is_some() {
        let hp = hp_report(&report.betti);
        if let Some([h0, h1]) = spec.expect.hp {
            ctx.check("hp", hp.hp0 == Some(h0) && hp.hp1 == Some(h1), format!("got ({:?}, {:?})", hp.hp0, hp.hp1));
        }
        out["hp"] = serde_json::to_value(hp).expect("serializable");
    }
    Ok(out)
}

fn run_infinitesimal(ctx: &mut Ctx) -> Result<Value, TaskError> {
    let spec = ctx.spec;
    let a = ctx.algebra().clone();
    let rels = ctx.relations()?;
    let sec = spec.infinitesimal.as_ref().expect("validated");
    let jgens: Vec<SparsePoly> = sec.jgens.iter().map(|g| ctx.src.poly(g, &a.vars)).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut last = None;
    for &d in &spec.degree_caps {
        let pc = infinitesimal_tower(&a.vars, &rels, &jgens, sec.order, d).map_err(|e| ctx.src.invalid(e.to_string()))?;
        let top = pc.levels.last().expect("order ≥ 1").clone();
        let h = ctx.cohomology(&format!("P/J^{} D={d}", sec.order), &top)?;
        let book = holim_bookkeeping(&pc, 2).map_err(|e| ctx.src.invalid(e.to_string()))?;
        let ok = book.iter().all(|&(h, l, l1)| h == l + l1);
        ctx.check(format!("holim-bookkeeping D={d}"), ok, "");
        rows.push(json!({"degree_cap": d, "dims": top.dims, "cohomology": h, "holim": book}));
        last = Some(trim(h));
    }
    if let Some(want) = &spec.expect.betti {
        ctx.check("betti", last.as_ref() == Some(&trim(want.clone())), format!("got {last:?}"));
    }
    Ok(json!({"order": sec.order, "caps": rows}))
}

fn run_tube(ctx: &mut Ctx) -> Result<Value, TaskError> {
    let spec = ctx.spec;
    let a = ctx.algebra().clone();
    let sec = spec.tube.as_ref().expect("validated");
    let jgens: Vec<SparsePoly> = sec.jgens.iter().map(|g| ctx.src.poly(g, &a.vars)).collect::<Result<_, _>>()?;
    let opts = TubeOptions { lift_order: sec.lift_order.order(), budget: ctx.budget(), ..TubeOptions::default() };
    let d = *spec.degree_caps.last().expect("validated");
    let mut out = Vec::new();
    for &m in &sec.m {
        let r = tube_identity_check(spec.p, &jgens, m, d, opts).map_err(|e| ctx.src.invalid(format!("tube identity m={m}: {e}")))?;
        ctx.check(format!("T(R,J,1/{m}) = T(R,J^{m},1) up to D={d}"), r.holds, "");
        out.push(r);
    }
    Ok(serde_json::to_value(out).expect("serializable"))
}

fn run_spectral(ctx: &mut Ctx) -> Result<Value, TaskError> {
    let spec = ctx.spec;
    let a = ctx.algebra().clone();
    let rels = ctx.relations()?;
    let amb = ctx.presented(&a.vars, rels)?;
    let sec = spec.spectral.as_ref().expect("validated");
    let params = TruncationParams { p: spec.p, precision: spec.precision, depth: sec.depth, ..TruncationParams::default() };
    let mut out = Vec::new();
    for span in &sec.spans {
        let gens: Vec<SparsePoly> = span.iter().map(|g| ctx.src.poly(g, &a.vars)).collect::<Result<_, _>>()?;
        let names: Vec<&str> = span.iter().map(|g| g.get_ref().as_str()).collect();
        let m = SubmoduleSpan::new(gens).map_err(|e| ctx.src.invalid(e.to_string()))?;
        let law = spectral_law(&m, &amb, &params, &sec.j, &sec.c);
        ctx.check(format!("scaling law for {{{}}}", names.join(", ")), law.iter().all(|e| e.holds), "");
        out.push(json!({"span": names, "law": law}));
    }
    Ok(Value::Array(out))
}

fn run_invariants(ctx: &mut Ctx) -> Result<Value, TaskError> {
    let spec = ctx.spec;
    let sec = spec.invariants.clone().expect("validated");
    let mut rng = ChaCha8Rng::seed_from_u64(sec.seed);
    let mut out = serde_json::Map::new();
    let algebras: Vec<PresentedAlgebra> = (0..sec.random_algebras).map(|_| random_algebra(&mut rng)).collect();
    let text = |a: &PresentedAlgebra| format!("Q[{}]/({})", a.vars.join(","), a.relations.iter().map(|r| r.to_text(&a.vars)).collect::<Vec<_>>().join(", "));
    for suite in &sec.suites {
        match suite {
            Suite::MixedComplex => {
                let mut rows = Vec::new();
                for a in &algebras {
                    let ops = CyclicOps::new(a);
                    let chains: Vec<_> = (0..sec.chains_per_algebra).map(|i| random_chain(a, i % (sec.max_tensor_degree + 1), 2, 2, &mut rng)).collect();
                    let r = check_identities(&ops, &chains);
                    ctx.check(format!("mixed complex over {}", text(a)), r.all_hold(), format!("{r:?}"));
                    rows.push(json!({"algebra": text(a), "report": r}));
                }
                out.insert("mixed_complex".into(), Value::Array(rows));
            }
            Suite::SignConvention => {
                let a = PresentedAlgebra::polynomial_ring(&["x", "y"]);
                let chains: Vec<_> = (0..sec.chains_per_algebra).map(|i| random_chain(&a, 1 + i % 3, 2, 2, &mut rng)).collect();
                let std = check_identities(&CyclicOps::new(&a), &chains);
                let lit = check_identities(&CyclicOps::with_signs(&a, SignConvention::Literal), &chains);
                ctx.check("standard signs satisfy the identities", std.all_hold(), "");
                ctx.check("literal norm sign fails them", !lit.all_hold(), format!("{lit:?}"));
                out.insert("sign_convention".into(), json!({"standard": std, "literal": lit}));
            }
            Suite::Hkr => {
                let mut rows = Vec::new();
                for names in [&["x"][..], &["x", "y"]] {
                    let a = PresentedAlgebra::polynomial_ring(names);
                    let chains: Vec<_> = (0..sec.chains_per_algebra).map(|i| random_chain(&a, i % 4, 2, 2, &mut rng)).collect();
                    let r = check_hkr(&CyclicOps::new(&a), &chains);
                    ctx.check(format!("hkr on {}", text(&a)), r.all_hold(), format!("{r:?}"));
                    rows.push(json!({"algebra": text(&a), "report": r}));
                }
                out.insert("hkr".into(), Value::Array(rows));
            }
            Suite::HhSlices => {
                let a = PresentedAlgebra::polynomial_ring(&["x"]);
                let dr = de_rham_complex(&a, sec.max_internal_degree as u32 + 1);
                let mut rows = Vec::new();
                for d in 0..=sec.max_internal_degree {
                    let hh = hh_graded_dims(&a, d, 2).map_err(|e| ctx.src.invalid(e.to_string()))?;
                    // Ω^l in internal degree d, with dx of degree 1
                    let omega: Vec<usize> = (0..=2).map(|l| dr.bases.get(l).map_or(0, |b| b.iter().filter(|(m, mask)| (m.degree() + mask.count_ones()) as usize == d).count())).collect();
                    ctx.check(format!("HH of Q[x] in internal degree {d}"), hh == omega, format!("{hh:?}"));
                    rows.push(json!({"internal_degree": d, "hh": hh, "forms": omega}));
                }
                let plane = PresentedAlgebra::polynomial_ring(&["x", "y"]);
                let hh2 = hh_graded_dims(&plane, 2, 2).map_err(|e| ctx.src.invalid(e.to_string()))?;
                ctx.check("HH_2 of Q[x,y] in internal degree 2", hh2[2] == 1, format!("{hh2:?}"));
                out.insert("hh_slices".into(), json!({"line": rows, "plane_degree_2": hh2}));
            }
            Suite::Noninjective => {
                let w = completion_noninjectivity_witness(spec.p, sec.witness_m, sec.witness_n);
                ctx.check(format!("non-injectivity witness m ≤ {}, n ≤ {}", sec.witness_m, sec.witness_n), w.verified(), "");
                out.insert("noninjective".into(), serde_json::to_value(w).expect("serializable"));
            }
        }
    }
    Ok(Value::Object(out))
}
