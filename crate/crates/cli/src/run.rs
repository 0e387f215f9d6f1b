//! Task dispatch. Tasks run in declaration order, each with its own sampler
//! derived from the run seed and the task position.

use std::time::Instant;

use thiserror::Error;
use tulczyjew_core::algebroid::{Algebroid, Side, TotalSpace};
use tulczyjew_core::bracket_engine::{self, canonical_bracket, derived_bracket, Projector};
use tulczyjew_core::cartan_calculus as cartan;
use tulczyjew_core::fixtures;
use tulczyjew_core::graded_algebra::Parity::{Even, Odd};
use tulczyjew_core::graded_algebra::Poly;
use tulczyjew_core::higher_structures::{self as hs, Kind};
use tulczyjew_core::report::Check;
use tulczyjew_core::sampling::Sampler;
use tulczyjew_core::tulczyjew;

use crate::problem::{Higher, InputError, Problem, TaskName, TaskSpec};
use crate::report::{
    convention_hash, sha256_hex, ResolvedParams, RunReport, TaskRecord, REPORT_SCHEMA,
};

pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_DEGREE: u32 = 2;
pub const DEFAULT_ARITY: usize = 3;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub degree_bound: Option<u32>,
    pub samples: Option<usize>,
    pub timing: bool,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("calibration fault in {identity}: {detail}")]
    Calibration { identity: String, detail: String },
}

fn engine_error(e: tulczyjew_core::Error, task: &TaskSpec) -> RunError {
    match e {
        tulczyjew_core::Error::Calibration { identity, detail } => {
            RunError::Calibration { identity, detail }
        }
        other => RunError::Input(InputError {
            line: task.line,
            column: 1,
            message: format!("{}: {other}", task.name),
        }),
    }
}

type TaskResult = Result<(), tulczyjew_core::Error>;

/// Small identities every run depends on; a failure aborts before any task runs.
pub fn calibrate() -> Result<(), RunError> {
    let fault = |identity: &str, detail: String| RunError::Calibration {
        identity: identity.into(),
        detail,
    };
    let inner = || -> Result<Vec<(&'static str, Poly, Poly)>, tulczyjew_core::Error> {
        let line = fixtures::tangent(&[("x", Even)])?;
        let mv = &line.charts().multivectors;
        let eta_x = mv.parse("eta_x")?;
        let x = mv.parse("x")?;
        let mut out = vec![
            (
                "[[eta_x, x]] = 1",
                line.algebroid_bracket(Side::Schouten, &eta_x, &x)?,
                Poly::one(&mv.chart),
            ),
            (
                "{p_x, x} = 1",
                canonical_bracket(&mv.parse("p_x")?, &x)?,
                Poly::one(&mv.chart),
            ),
        ];
        let aff = fixtures::affine_lie_algebra()?;
        let mv = &aff.charts().multivectors;
        let r = tulczyjew::canonical_r(&aff, Side::Schouten)?;
        out.push((
            "R*H_Q = S",
            r.pullback(&aff.encodings().h_q)?,
            aff.encodings().s.clone(),
        ));
        let pr = Projector::momenta(&mv.chart);
        let b = derived_bracket(
            &aff.encodings().s,
            &[mv.parse("eta_1")?, mv.parse("eta_2")?],
            &pr,
        )?;
        out.push(("derived bracket of eta_1, eta_2", b, mv.parse("eta_2")?));
        let st = fixtures::tangent(&[("x", Even), ("th", Odd)])?;
        let fs = &st.charts().forms;
        let d = cartan::de_rham_operator(&st);
        let w = fs.parse("x^2*th + x*xi_th + th*xi_x*xi_th")?;
        out.push(("d² = 0", d.apply(&d.apply(&w)), Poly::zero(&fs.chart)));
        Ok(out)
    };
    let checks = inner().map_err(|e| fault("calibration setup", e.to_string()))?;
    for (name, got, want) in checks {
        if got != want {
            return Err(fault(name, format!("got {got}, expected {want}")));
        }
    }
    Ok(())
}

fn positions(sp: &TotalSpace) -> Vec<usize> {
    let mut v = sp.base.clone();
    v.extend(&sp.fiber);
    v
}

fn task_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((index as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9))
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Schouten => "Schouten",
        Side::Poisson => "Poisson",
    }
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Poisson => "poisson",
        Kind::Schouten => "schouten",
    }
}

fn label(i: usize, h: &Higher) -> String {
    format!("{} #{}", kind_name(h.kind), i + 1)
}

struct Ctx<'a> {
    alg: &'a Algebroid,
    higher: &'a [Higher],
    p: ResolvedParams,
    s: Sampler,
}

impl Ctx<'_> {
    fn base_args(&mut self, sp: &TotalSpace, n: usize) -> Vec<Poly> {
        (0..n)
            .map(|_| {
                self.s
                    .any_homogeneous(&sp.chart, &sp.base, self.p.degree.max(1), 2)
            })
            .collect()
    }

    fn form_args(&mut self, sp: &TotalSpace, n: usize) -> Vec<Poly> {
        (0..n)
            .map(|_| self.s.any_homogeneous(&sp.chart, &positions(sp), 2, 2))
            .collect()
    }
}

pub fn run(problem: &Problem, source: &str, opts: &Options) -> Result<RunReport, RunError> {
    calibrate()?;
    let seed = opts.seed.or(problem.seed).unwrap_or(0);
    let start = Instant::now();
    let mut tasks = Vec::new();
    for (i, spec) in problem.tasks.iter().enumerate() {
        let params = ResolvedParams {
            samples: opts
                .samples
                .or(spec.params.samples)
                .unwrap_or(DEFAULT_SAMPLES),
            degree: opts
                .degree_bound
                .or(spec.params.degree)
                .unwrap_or(DEFAULT_DEGREE),
            arity: spec.params.arity.unwrap_or(DEFAULT_ARITY),
        };
        let needs_higher = matches!(
            spec.name,
            TaskName::HigherMaster
                | TaskName::Linfty
                | TaskName::BaseBrackets
                | TaskName::FormsBrackets
                | TaskName::Koszul
                | TaskName::ClassicalLimit
        );
        if needs_higher && problem.higher.is_empty() {
            return Err(InputError {
                line: spec.line,
                column: 1,
                message: format!("task `{}` needs at least one `higher` structure", spec.name),
            }
            .into());
        }
        let mut rec = TaskRecord::new(spec.name, spec.line, params.clone());
        let mut ctx = Ctx {
            alg: &problem.algebroid,
            higher: &problem.higher,
            p: params,
            s: Sampler::new(task_seed(seed, i)),
        };
        let t0 = Instant::now();
        dispatch(spec.name, &mut ctx, &mut rec).map_err(|e| engine_error(e, spec))?;
        if opts.timing {
            rec.elapsed_ms = Some(t0.elapsed().as_millis() as u64);
        }
        rec.finish();
        tasks.push(rec);
    }
    Ok(RunReport {
        schema_version: REPORT_SCHEMA.into(),
        convention_hash: convention_hash(),
        problem_sha256: sha256_hex(source),
        seed,
        passed: tasks.iter().all(|t| t.passed),
        tasks,
        elapsed_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
    })
}

fn dispatch(name: TaskName, ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    match name {
        TaskName::VerifyAlgebroid => verify_algebroid(ctx, rec),
        TaskName::BuildTriple => build_triple(ctx, rec),
        TaskName::VerifyTriple => verify_triple(ctx, rec),
        TaskName::HigherMaster => higher_master(ctx, rec),
        TaskName::Linfty => linfty(ctx, rec),
        TaskName::BaseBrackets => base_brackets(ctx, rec),
        TaskName::FormsBrackets => forms_brackets(ctx, rec),
        TaskName::Cartan => cartan_suite(ctx, rec),
        TaskName::Koszul => koszul(ctx, rec),
        TaskName::ClassicalLimit => classical_limit(ctx, rec),
    }
}

fn verify_algebroid(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    let r = ctx.alg.verify_structure_equations()?;
    let ing = ctx.alg.data().ingestion();
    for (a, b, c) in &ing.completed {
        rec.notes.push(format!(
            "structure ({a}, {b}, {c}) completed by graded symmetry"
        ));
    }
    for (a, b, c) in &ing.symmetrized {
        rec.notes.push(format!(
            "structure ({a}, {b}, {c}) replaced by its graded symmetrization"
        ));
    }
    let first = |e: &tulczyjew_core::algebroid::EquationReport| {
        e.residuals.first().map(|(k, _)| format!("first at {k}"))
    };
    let mut c = Check::residuals(
        "anchor equation",
        r.anchor_equation.residuals.iter().map(|(_, p)| p),
    );
    if let Some(d) = first(&r.anchor_equation) {
        c = c.with_detail(d);
    }
    rec.push(c);
    let mut c = Check::residuals(
        "Jacobi equation",
        r.jacobi_equation.residuals.iter().map(|(_, p)| p),
    );
    if let Some(d) = first(&r.jacobi_equation) {
        c = c.with_detail(d);
    }
    rec.push(c);
    for (name, br) in &r.masters {
        let mut c = Check::residual(format!("{name} = 0"), &br.residual);
        if let Some(w) = &br.warning {
            c = c.with_detail(w.clone());
        }
        rec.push(c);
    }
    rec.push(Check::flag("five verdicts agree", r.agree()));
    Ok(())
}

fn build_triple(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    let alg = ctx.alg;
    let enc = alg.encodings();
    rec.value("S", &enc.s);
    rec.value("P", &enc.p);
    rec.value("H_Q", &enc.h_q);
    rec.value("X_Q", &enc.x_q);
    for side in [Side::Schouten, Side::Poisson] {
        let r = tulczyjew::canonical_r(alg, side)?;
        let phi = tulczyjew::anchor(alg, side)?;
        let psi = tulczyjew::tulczyjew_morphism(alg, side)?;
        for m in [&r, &phi, &psi] {
            for (j, img) in m.images().iter().enumerate() {
                rec.value(
                    format!(
                        "{} {}*({})",
                        side_name(side),
                        m.name(),
                        m.target().var(j).name()
                    ),
                    img,
                );
            }
        }
    }
    Ok(())
}

fn verify_triple(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    for side in [Side::Schouten, Side::Poisson] {
        let r = tulczyjew::verify_triple(ctx.alg, side)?;
        rec.absorb(side_name(side), &r);
    }
    Ok(())
}

fn higher_master(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    for (i, h) in ctx.higher.iter().enumerate() {
        let m = hs::higher_master_residual(ctx.alg, &h.structure)?;
        let name = match h.kind {
            Kind::Poisson => "[[𝒫,𝒫]] = 0",
            Kind::Schouten => "{𝒮,𝒮} = 0",
        };
        rec.push(Check::residual(
            format!("{}: {name}", label(i, h)),
            &m.residual,
        ));
    }
    Ok(())
}

fn linfty(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    for (i, h) in ctx.higher.iter().enumerate() {
        let q = hs::linfty_field(ctx.alg, &h.structure)?;
        let master = hs::higher_master_residual(ctx.alg, &h.structure)?.holds;
        let sq = q.square_residuals();
        rec.push(Check::residuals(format!("{}: Q² = 0", label(i, h)), &sq));
        rec.push(Check::flag(
            format!("{}: master equation ⇒ Q² = 0", label(i, h)),
            !master || q.squares_to_zero(),
        ));
        if !master && q.squares_to_zero() {
            rec.notes.push(format!(
                "{}: Q² = 0 although the master equation fails",
                label(i, h)
            ));
        }
    }
    Ok(())
}

fn base_brackets(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    let alg = ctx.alg;
    for (i, h) in ctx.higher.iter().enumerate() {
        let hs_ = &h.structure;
        let kind = h.kind;
        let sp = alg.charts().structure_space(kind.side());
        let coords: Vec<Poly> = sp
            .base
            .iter()
            .map(|&v| Poly::var_at(&sp.chart, v))
            .collect();
        for (a, x) in coords.iter().enumerate() {
            let b = hs::base_brackets(alg, hs_, std::slice::from_ref(x))?;
            if !b.is_zero() {
                rec.value(format!("{}: ({x})", label(i, h)), &b);
            }
            for y in &coords[a + 1..] {
                let b = hs::base_brackets(alg, hs_, &[x.clone(), y.clone()])?;
                rec.value(format!("{}: ({x}, {y})", label(i, h)), &b);
            }
        }
        for n in 1..=ctx.p.arity {
            let mut res = Vec::new();
            for _ in 0..ctx.p.samples {
                let args = ctx.base_args(sp, n);
                res.push(hs::base_jacobiator(alg, hs_, &args)?);
            }
            rec.push(Check::residuals(
                format!("{}: Jacobiator of {n} arguments = 0", label(i, h)),
                &res,
            ));
        }
        let mut res = Vec::new();
        for r in 1..=ctx.p.arity {
            for _ in 0..ctx.p.samples {
                let mut args = ctx.base_args(sp, r + 1);
                let (ar1, ar) = (args.pop().unwrap(), args.pop().unwrap());
                res.push(hs::leibniz_defect(
                    hs::base_leibniz_type(kind),
                    &args,
                    &ar,
                    &ar1,
                    |l| hs::base_brackets(alg, hs_, l),
                )?);
            }
        }
        rec.push(Check::residuals(
            format!("{}: Leibniz rule", label(i, h)),
            &res,
        ));
    }
    Ok(())
}

fn forms_brackets(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    let alg = ctx.alg;
    for (i, h) in ctx.higher.iter().enumerate() {
        let kind = h.kind;
        let l = hs::lift(alg, &h.structure)?;
        let theta = &l.forms_structure;
        let fs = alg.charts().forms_space(kind.side());
        let pr = hs::forms_projector(alg, kind);
        rec.value(format!("{}: lifted structure", label(i, h)), theta);
        let (mut eq, mut zero) = (Vec::new(), Vec::new());
        for n in 0..=ctx.p.arity {
            for _ in 0..ctx.p.samples {
                let args = ctx.form_args(fs, n);
                let shuffled = hs::forms_jacobiator(alg, kind, theta, &args)?;
                let squared = bracket_engine::jacobiator(theta, &args, &pr)?;
                eq.push(&shuffled - &squared);
                zero.push(shuffled);
            }
        }
        rec.push(Check::residuals(
            format!(
                "{}: Jacobiator = derived bracket of ½ self-bracket",
                label(i, h)
            ),
            &eq,
        ));
        rec.push(Check::residuals(
            format!("{}: Jacobiators vanish", label(i, h)),
            &zero,
        ));
        let mut res = Vec::new();
        for r in 1..=ctx.p.arity {
            for _ in 0..ctx.p.samples {
                let mut args = ctx.form_args(fs, r + 1);
                let (ar1, ar) = (args.pop().unwrap(), args.pop().unwrap());
                res.push(hs::leibniz_defect(
                    hs::forms_leibniz_type(kind),
                    &args,
                    &ar,
                    &ar1,
                    |x| hs::forms_brackets_with(alg, kind, theta, x),
                )?);
            }
        }
        rec.push(Check::residuals(
            format!("{}: Leibniz rule", label(i, h)),
            &res,
        ));
    }
    Ok(())
}

fn cartan_suite(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    let alg = ctx.alg;
    let mv = &alg.charts().multivectors;
    let vars = positions(mv);
    let mut merged: Vec<Check> = Vec::new();
    for _ in 0..ctx.p.samples {
        let x = ctx.s.any_homogeneous(&mv.chart, &vars, 3, 2);
        let y = ctx.s.any_homogeneous(&mv.chart, &vars, 3, 2);
        let r = cartan::verify_cartan_identities(alg, &x, &y, ctx.p.degree)?;
        for c in r.checks {
            match merged.iter_mut().find(|m| m.name == c.name) {
                Some(m) if m.holds && !c.holds => {
                    *m = c.with_detail(format!("X = {x}, Y = {y}"));
                }
                Some(_) => {}
                None if c.holds => merged.push(c),
                None => merged.push(c.with_detail(format!("X = {x}, Y = {y}"))),
            }
        }
    }
    for c in merged {
        rec.push(c);
    }
    Ok(())
}

fn poisson_only<'a>(ctx: &'a Ctx, rec: &mut TaskRecord) -> Vec<(usize, &'a Higher)> {
    let mut out = Vec::new();
    for (i, h) in ctx.higher.iter().enumerate() {
        if h.kind == Kind::Poisson {
            out.push((i, h));
        } else {
            rec.notes.push(format!(
                "{}: skipped, needs a Poisson-type structure",
                label(i, h)
            ));
        }
    }
    out
}

fn koszul(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    let alg = ctx.alg;
    let mv = &alg.charts().multivectors;
    let fs = &alg.charts().forms;
    let pick: Vec<(usize, Higher)> = poisson_only(ctx, rec)
        .into_iter()
        .map(|(i, h)| (i, h.clone()))
        .collect();
    for (i, h) in pick {
        let p = h.structure.body();
        let r = cartan::verify_koszul_brylinski(alg, p, ctx.p.degree)?;
        rec.absorb(&label(i, &h), &r);
        let delta = cartan::koszul_brylinski(alg, p)?;
        let mut res = Vec::new();
        for r in 1..=ctx.p.arity {
            for _ in 0..ctx.p.samples {
                let args = ctx.form_args(fs, r + 1);
                res.push(cartan::recursive_relation_residual(
                    &delta,
                    &args[..r - 1],
                    &args[r - 1],
                    &args[r],
                ));
            }
        }
        rec.push(Check::residuals(
            format!("{}: recursive relation", label(i, &h)),
            &res,
        ));
        let top = (0..=fs.fiber.len() as u32 + 3)
            .filter(|&w| !p.degree_component(&mv.fiber, w).is_zero())
            .max()
            .unwrap_or(0);
        for w in 1..=top {
            let pw = p.degree_component(&mv.fiber, w);
            if pw.is_zero() {
                continue;
            }
            let mut res = Vec::new();
            for _ in 0..ctx.p.samples {
                let args = ctx.form_args(fs, w as usize + 1);
                res.push(cartan::koszul_schouten_brackets(alg, &pw, &args)?);
            }
            rec.push(Check::residuals(
                format!(
                    "{}: weight-{w} part has no {}-ary bracket",
                    label(i, &h),
                    w + 1
                ),
                &res,
            ));
        }
    }
    Ok(())
}

fn classical_limit(ctx: &mut Ctx, rec: &mut TaskRecord) -> TaskResult {
    let alg = ctx.alg;
    let fs = &alg.charts().forms;
    let pick: Vec<(usize, Higher)> = poisson_only(ctx, rec)
        .into_iter()
        .map(|(i, h)| (i, h.clone()))
        .collect();
    for (i, h) in pick {
        let p = h.structure.body();
        let lifted = hs::lift(alg, &h.structure)?;
        rec.push(Check::equal(
            format!("{}: total symbol of Δ = lifted structure", label(i, &h)),
            &cartan::total_symbol(alg, p)?,
            &lifted.forms_structure,
        ));
        for r in 1..=ctx.p.arity {
            let mut res = Vec::new();
            let mut lower = Vec::new();
            for _ in 0..ctx.p.samples {
                let args = ctx.form_args(fs, r);
                let c = cartan::classical_limit(alg, p, &args)?;
                res.push(&c.limit - &c.schouten);
                lower.extend(c.lower_powers.into_iter().map(|(_, q)| q));
            }
            rec.push(Check::residuals(
                format!(
                    "{}: ℏ^{r} coefficient = higher Schouten bracket",
                    label(i, &h)
                ),
                &res,
            ));
            rec.push(Check::residuals(
                format!("{}: no ℏ^k terms below k = {r}", label(i, &h)),
                &lower,
            ));
        }
    }
    Ok(())
}
