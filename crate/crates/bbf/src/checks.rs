//! Check functions shared by the CLI suites and the acceptance tests.
//! Every function returns records; failures to compute land in the record, never in a panic.

use std::fmt::Display;

use bbf_core::ccr::{add_into, Element};
use bbf_core::clifford::clifford_differential_check;
use bbf_core::feynman::*;
use bbf_core::hodge::{build_double, example_pair, invariant_harmonic_dims, split_is_direct};
use bbf_core::kernels::{
    cocycle_half_check, heat_time_integral, heat_time_integral_quad, propagator_noninvariant, Bump, Cutoff, KernelScale,
};
use bbf_core::lie::{bweight_obstruction, ce_complex, conjugation_check, dq_square_check, CeModule, LieAlgebra, PolyFrame};
use bbf_core::linalg::Matrix;
use bbf_core::probe::{BSpline, Probe};
use bbf_core::quad::{integrate, Tolerance};
use bbf_core::quant::{
    bivector_of, clifford_fa, dual_coordinate, exterior_fa, fa_axiom_check, star_product, topmech_cohomology,
    weyl_product, FockModule, IntervalFa, LagrangianPair, SymplecticSpace,
};
use bbf_core::scalar::{self, int, Scalar};
use bbf_core::superpoly::Poly;
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};
use crate::report::{Record, Value};

/// Everything a check needs: validated config, algebra, cutoff, tolerance and worker pool.
pub struct Context {
    pub config: RunConfig,
    pub lie: LieAlgebra,
    pub cutoff: Cutoff,
    pub tol: Tolerance,
    pool: rayon::ThreadPool,
}

impl Context {
    pub fn new(config: RunConfig, threads: Option<usize>) -> Result<Self, ConfigError> {
        config.validate()?;
        let lie = config.algebra()?;
        let cutoff = config.cutoff()?;
        let tol = config.tolerance();
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        let pool = b.build().map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
        Ok(Context { config, lie, cutoff, tol, pool })
    }

    /// Default config, single thread.
    pub fn default_sequential() -> Self {
        Self::new(RunConfig::default(), Some(1)).expect("default config is valid")
    }

    pub fn runner(&self) -> PoolRunner<'_> {
        PoolRunner(&self.pool)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs independent jobs on the pool; results in job order.
    pub fn map<T: Sync, R: Send>(&self, jobs: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.pool.install(|| jobs.par_iter().map(f).collect())
    }
}

/// Runs flow tasks on a rayon pool. Collecting keeps task order, so sums are reproducible.
pub struct PoolRunner<'p>(&'p rayon::ThreadPool);

impl TaskRunner for PoolRunner<'_> {
    fn run_all(&self, plan: &FlowPlan, kernels: &Kernels<'_>, inputs: &[TailInput], tol: Tolerance) -> Result<Vec<FlowValue>, FeynmanError> {
        self.0.install(|| plan.tasks.par_iter().map(|t| run_task(plan, t, kernels, inputs, tol)).collect())
    }
}

fn float_or_fail(id: String, claim: &str, expected: f64, tol: f64, got: Result<f64, impl Display>) -> Record {
    match got {
        Ok(v) => Record::float(id, claim, expected, v, tol),
        Err(e) => Record::failed(id, claim, Value::Float(expected), e),
    }
}

fn exact_or_fail<T: Display>(id: String, claim: &str, expected: impl Display, got: Result<T, impl Display>) -> Record {
    match got {
        Ok(v) => Record::exact(id, claim, expected, v),
        Err(e) => Record::failed(id, claim, Value::Exact(expected.to_string()), e),
    }
}

fn unit(dim: usize, i: usize) -> Vec<Scalar> {
    (0..dim).map(|k| int((k == i) as i64)).collect()
}

fn a_one(lo: f64, i: usize) -> TailInput {
    TailInput::new(Field::A, Form::One, Probe::plain(BSpline::uniform(lo, 0.1)), unit(3, i))
}

fn a_zero(lo: f64, i: usize) -> TailInput {
    TailInput::new(Field::A, Form::Zero, Probe::flagged(BSpline::uniform(lo, 0.1)), unit(3, i))
}

fn b_zero(lo: f64, i: usize) -> TailInput {
    TailInput::new(Field::B, Form::Zero, Probe::plain(BSpline::uniform(lo, 0.1)), unit(3, i))
}

// ---------------------------------------------------------------- limits

/// Bulk observable differential at t = 1: trivector factor, image channel, evaluation identity.
pub fn bulk_trivector(ctx: &Context, lie: &LieAlgebra) -> Vec<Record> {
    let name = lie.name();
    let eps = ctx.config.eps.clone().unwrap_or_else(|| halving_schedule(1e-5, 6));
    let l = 1e-3;
    let frame = PolyFrame::new(lie.dim());
    let mut alpha = Poly::new();
    if lie.dim() >= 3 {
        let mut e = vec![0u32; 2 * lie.dim()];
        e[frame.up(0)] = 1;
        e[frame.up(1)] = 1;
        e[frame.low(2)] = 1;
        alpha.insert(e, int(1));
    }
    let probe = Probe::plain(BSpline::uniform(0.6, 0.2));
    let id = |s: &str| format!("bulk/{name}/{s}");
    let claim = "bulk trivector factor tends to 1/3";
    match observable_differential_bulk(&alpha, 1.0, lie, &ctx.cutoff, &eps, l, &probe, ctx.tol) {
        Err(e) => vec![Record::failed(id("trivector"), claim, Value::Float(1.0 / 3.0), e)],
        Ok(r) => vec![
            Record::float(id("trivector"), claim, 1.0 / 3.0, r.trivector_limit.value, 1e-3).with_uncertainty(r.trivector_limit.error),
            Record::float(id("image"), "image channel of the bulk diagrams vanishes at t = 1", 0.0, r.image_max, 0.0),
            Record::float(id("evaluation"), "heat kernel against a probe tends to its value at t", probe.eval(1.0), r.evaluation_limit.value, 1e-6)
                .with_uncertainty(r.evaluation_limit.error),
            Record::float(id("constant"), "bulk diagrams reproduce the trivector term with constant 1", 1.0, r.constant, 1e-3),
        ],
    }
}

fn boundary_omega(dim: usize) -> Poly {
    let frame = PolyFrame::new(dim);
    let mut omega = Poly::new();
    let mut e = vec![0u32; 2 * dim];
    e[frame.up(0)] = 1;
    e[frame.up(1)] = 1;
    omega.insert(e, int(1));
    let mut e = vec![0u32; 2 * dim];
    e[frame.up(2)] = 1;
    omega.insert(e, int(3));
    omega
}

/// The two one-loop boundary diagrams, each on probes with f(0) = 1.
pub fn boundary_quantum(ctx: &Context) -> Vec<Record> {
    let lie = LieAlgebra::sl2();
    let eps = ctx.config.eps.clone().unwrap_or_else(default_eps_schedule);
    let l = ctx.config.l.unwrap_or(0.1);
    let claim = "boundary loop diagram factor tends to f(0)/2";
    let mut out = Vec::new();
    for h in [0.3, 0.6] {
        let probes = BoundaryProbes { b: Probe::plain(BSpline::clamped(h)), a: Probe::flagged(BSpline::clamped(h)) };
        match observable_differential_boundary(&boundary_omega(3), &lie, &ctx.cutoff, &eps, l, &probes, ctx.tol) {
            Err(e) => out.push(Record::failed(format!("boundary/h{h}"), claim, Value::Float(0.5), e)),
            Ok(r) => {
                for (k, q) in r.quantum_limit.iter().enumerate() {
                    out.push(Record::float(format!("boundary/h{h}/diagram{k}"), claim, 0.5, q.value, 1e-3).with_uncertainty(q.error));
                }
                out.push(Record::float(
                    format!("boundary/h{h}/constant"),
                    "boundary diagrams give the chain differential up to a global constant",
                    -0.5,
                    r.constant,
                    1e-3,
                ));
            }
        }
    }
    out
}

/// Classical boundary term with f(t, t) = t g(t), g(0) = 1.
pub fn classical_boundary(ctx: &Context) -> Vec<Record> {
    let eps = ctx.config.eps.clone().unwrap_or_else(default_eps_schedule);
    let g = BSpline::clamped(0.4);
    let diag = |t: f64| t * g.eval(t);
    let claim = "classical boundary term vanishes as eps -> 0";
    let samples: Result<Vec<(f64, f64)>, FeynmanError> =
        eps.iter().map(|&e| boundary_classical_factor(&ctx.cutoff, e, &diag, &[0.4], ctx.tol).map(|v| (e, v))).collect();
    match samples.and_then(|s| Ok(bbf_core::extrapolate::limit_extrapolate(&s)?)) {
        Ok(l) => vec![Record::float("classical/limit", claim, 0.0, l.value, 1e-3).with_uncertainty(l.error)],
        Err(e) => vec![Record::failed("classical/limit", claim, Value::Float(0.0), e)],
    }
}

/// Wheel obstruction with k vertices on sl2, over an (L, eps) grid; C1 bounds for k = 2.
pub fn wheel_obstruction(ctx: &Context, lie: &LieAlgebra, k: usize, grid: &ScaleGrid) -> Vec<Record> {
    let inputs = match k {
        2 => vec![a_zero(0.2, 0), a_one(0.25, 1)],
        _ => vec![a_zero(0.2, 0), a_one(0.25, 1), a_one(0.3, 2)],
    };
    let name = lie.name();
    let claim = "wheel contributions to the master equation vanish as eps, L -> 0";
    let r = match qme_obstruction_with(&ctx.runner(), lie, &ctx.cutoff, k, grid, &inputs, ctx.tol) {
        Ok(r) => r,
        Err(e) => return vec![Record::failed(format!("wheel{k}/{name}/limit"), claim, Value::Float(0.0), e)],
    };
    let mut out = vec![
        Record::float(format!("wheel{k}/{name}/limit"), claim, 0.0, r.limit.value, 1e-3).with_uncertainty(r.limit.error),
        Record::float(
            format!("wheel{k}/{name}/reducible"),
            "wheels carrying trees vanish as eps, L -> 0",
            0.0,
            r.reducible_limit.value,
            1e-3,
        )
        .with_uncertainty(r.reducible_limit.error),
    ];
    for c in &r.c1 {
        let b: Vec<String> = c.beta.0.iter().map(|s| if *s > 0 { "+".into() } else { "-".into() }).collect();
        out.push(Record::float(
            format!("wheel{k}/{name}/c1/L{:e}/eps{:e}/{}", c.l, c.eps, b.concat()),
            "same-sign wheel weights obey the sqrt(L+eps) - sqrt(2 eps) bound",
            0.0,
            c.value,
            c.bound,
        ));
    }
    if k == 2 {
        let one = flow_plan(lie, obstruction_wheels(2).unwrap_or_default(), &inputs)
            .and_then(|p| obstruction_sample(&ctx.runner(), &p, &ctx.cutoff, 1e-5, 1e-3, &inputs, ctx.tol));
        match one {
            Err(e) => out.push(Record::failed(format!("wheel2/{name}/classes"), "", Value::Float(0.0), e)),
            Ok(s) => {
                for (beta, v) in &s.by_beta {
                    let class = beta_class(beta.0[0], beta.0[1]);
                    out.push(Record::float(
                        format!("wheel2/{name}/eps1e-5/L1e-3/{:?}/{}", class, beta.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
                        "per-class wheel weight is small at eps = 1e-5, L = 1e-3",
                        0.0,
                        *v,
                        1e-3,
                    ));
                }
            }
        }
    }
    out
}

/// Grids used by the master-equation checks for 2- and 3-vertex wheels.
pub fn obstruction_grid(k: usize) -> ScaleGrid {
    match k {
        2 => ScaleGrid { ls: vec![4e-3, 2e-3, 1e-3], ratio: 4.0, count: 3 },
        _ => ScaleGrid { ls: vec![2e-3, 1e-3], ratio: 4.0, count: 3 },
    }
}

/// Direct flow from eps to L' against the two-stage flow through L.
pub fn semigroup(ctx: &Context) -> Vec<Record> {
    let lie = LieAlgebra::sl2();
    let cases = [
        ("tree4", vec![a_one(0.1, 0), a_zero(0.2, 1), a_one(0.15, 2), b_zero(0.3, 2)]),
        ("tree5", vec![a_one(0.1, 0), a_zero(0.2, 1), a_one(0.15, 2), b_zero(0.3, 2), a_one(0.25, 2)]),
    ];
    let (e, l, l2) = (5e-4, 5e-3, 3e-2);
    let claim = "flowing eps -> L -> L' equals flowing eps -> L'";
    let mut out = Vec::new();
    for (name, inputs) in cases {
        let tr = Truncation { loops: 0, max_order: inputs.len() - 1 };
        let direct = KernelScale::new(e, l2)
            .map_err(FeynmanError::from)
            .and_then(|s| rg_flow_with(&ctx.runner(), &lie, &ctx.cutoff, s, tr, &inputs, ctx.tol));
        let staged = rg_flow_composed_with(&ctx.runner(), &lie, &ctx.cutoff, (e, l, l2), tr, &inputs, ctx.tol);
        let id = format!("semigroup/{name}");
        match (direct, staged) {
            (Ok(d), Ok(s)) => {
                out.push(Record::float(id.clone(), claim, d.value, s.value, 1e-6 * d.value.abs().max(1e-12)));
                out.push(Record::exact(format!("{id}/nonzero"), "the compared coefficient is not identically zero", true, d.value != 0.0));
            }
            (Err(e), _) | (_, Err(e)) => out.push(Record::failed(id, claim, Value::Float(0.0), e)),
        }
    }
    out
}

// ---------------------------------------------------------------- kernels

fn quartic(center: f64, half: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        let x = (t - center) / half;
        if x.abs() >= 1.0 {
            0.0
        } else {
            15.0 / 16.0 * (1.0 - x * x) * (1.0 - x * x) / half
        }
    }
}

/// The half-line cocycle ∫φ(1 − Φ) = 1/2 for three normalized bumps.
pub fn cocycle(_ctx: &Context) -> Vec<Record> {
    let narrow = quartic(3.0, 0.05);
    let wide = quartic(2.5, 2.0);
    let raw = |t: f64| {
        let x = t - 1.0;
        if x.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - x * x)).exp()
        }
    };
    let claim = "cocycle pairing of a normalized bump equals 1/2";
    let norm = match integrate(raw, 0.0, 2.0, &[], Tolerance::new(1e-15, 1e-15)) {
        Ok(n) => n.value,
        Err(e) => return vec![Record::failed("cocycle/smooth", claim, Value::Float(0.5), e)],
    };
    let smooth = move |t: f64| raw(t) / norm;
    let bumps: [(&str, f64, f64, &dyn Fn(f64) -> f64); 3] =
        [("narrow", 2.95, 3.05, &narrow), ("wide", 0.5, 4.5, &wide), ("smooth", 0.0, 2.0, &smooth)];
    bumps
        .iter()
        .map(|&(name, lo, hi, phi)| float_or_fail(format!("cocycle/{name}"), claim, 0.5, 1e-10, cocycle_half_check(&Bump { lo, hi, phi })))
        .collect()
}

/// Closed-form heat-time integral against quadrature, and the sign-function limit of the propagator.
pub fn propagator_closed_form(ctx: &Context) -> Vec<Record> {
    let tol = Tolerance::new(1e-13, 1e-14);
    let claim = "erf closed form of the heat-time integral matches quadrature";
    let mut worst = 0.0f64;
    let mut err = None;
    for i in 0..10 {
        let u = -1.0 + 0.2 * i as f64 + 0.05;
        for j in 0..10 {
            let eps = 1e-4 * 10f64.powf(3.0 * j as f64 / 9.0);
            let q = KernelScale::new(eps, 1.0).map_err(|e| e.to_string()).and_then(|s| {
                heat_time_integral_quad(&s, u, tol).map(|q| (q - heat_time_integral(&s, u)).abs()).map_err(|e| e.to_string())
            });
            match q {
                Ok(d) => worst = worst.max(d),
                Err(e) => err = Some(e),
            }
        }
    }
    let mut out = vec![match err {
        Some(e) => Record::failed("propagator/erf-grid", claim, Value::Float(0.0), e),
        None => Record::float("propagator/erf-grid", claim, 0.0, worst, 1e-8),
    }];
    let claim = "propagator tends to cutoff times sign as eps -> 0, L -> infinity";
    let s = KernelScale::new(1e-14, 1e18).expect("valid scale");
    let worst = (0..40)
        .map(|i| {
            let u = -1.2 + 0.06 * i as f64 + 0.013;
            (propagator_noninvariant(&ctx.cutoff, &s, u) - ctx.cutoff.eval(u) * u.signum()).abs()
        })
        .fold(0.0, f64::max);
    out.push(Record::float("propagator/sign-limit", claim, 0.0, worst, 1e-8));
    out
}

// ---------------------------------------------------------------- hodge

/// Graph of a symmetric n×n matrix (upper triangle read from `sym`), then (q_k, p_k) ↦ (p_k, −q_k) where `swap[k]`.
pub fn lagrangian(n: usize, sym: &[i64], swap: &[bool]) -> Vec<Vec<Scalar>> {
    let s = |i: usize, j: usize| sym[i.min(j) * n + i.max(j)];
    (0..n)
        .map(|i| {
            let mut x = vec![0i64; 2 * n];
            x[i] = 1;
            for j in 0..n {
                x[n + j] = s(i, j);
            }
            for k in 0..n {
                if swap[k] {
                    let (q, p) = (x[k], x[n + k]);
                    x[k] = p;
                    x[n + k] = -q;
                }
            }
            x.into_iter().map(int).collect()
        })
        .collect()
}

/// A fixed family of Lagrangian pairs in dimensions 2 and 4.
pub fn lagrangian_pairs() -> Vec<(String, SymplecticSpace, LagrangianPair)> {
    let mut out = Vec::new();
    let s2 = SymplecticSpace::darboux(1);
    for a in -2..=2 {
        for sw in [false, true] {
            let pair = LagrangianPair::new(&s2, lagrangian(1, &[a], &[sw]), lagrangian(1, &[1], &[false])).expect("lagrangian");
            out.push((format!("dim2/a{a}/swap{}", sw as u8), s2.clone(), pair));
        }
    }
    let s4 = SymplecticSpace::darboux(2);
    let syms: [[i64; 4]; 6] = [[0, 0, 0, 0], [1, 0, 0, 1], [1, 1, 0, 2], [-1, 2, 0, 0], [2, -1, 0, 1], [1, 0, 0, -1]];
    for i in 0..syms.len() {
        for j in [i, (i + 1) % syms.len()] {
            let sw = [i % 2 == 1, j % 3 == 0];
            let pair = LagrangianPair::new(&s4, lagrangian(2, &syms[i], &[false, false]), lagrangian(2, &syms[j], &sw)).expect("lagrangian");
            out.push((format!("dim4/{i}-{j}"), s4.clone(), pair));
        }
    }
    for (k, twist) in [(0, 1), (1, -2), (2, 3)] {
        let (s, p) = example_pair(2, k, twist);
        out.push((format!("dim4/example{k}"), s, p));
    }
    out
}

fn hodge_instance(space: &SymplecticSpace, pair: &LagrangianPair, n: usize) -> Result<([usize; 2], [usize; 2]), String> {
    let c = build_double(space, pair, n).map_err(|e| e.to_string())?;
    c.check().map_err(str::to_string)?;
    let s = c.split();
    if !split_is_direct(space, s) {
        return Err("complement split is not direct".into());
    }
    space.check_lagrangian(&s.l1_complement()).map_err(|e| e.to_string())?;
    space.check_lagrangian(&s.l2_complement()).map_err(|e| e.to_string())?;
    let (inter, quot) = topmech_cohomology(space, &pair.l1, &pair.l2).map_err(|e| e.to_string())?;
    let r = invariant_harmonic_dims(&c);
    if !r.constant {
        return Err("harmonic form not constant".into());
    }
    Ok((r.dims, [inter.len(), quot.len()]))
}

/// Invariant harmonic forms of the doubled complex against the intersection/quotient dimensions.
pub fn doubling_hodge(ctx: &Context) -> Vec<Record> {
    let claim = "invariant harmonic forms match intersection and quotient of the Lagrangians";
    let mut jobs = Vec::new();
    for (name, s, p) in lagrangian_pairs() {
        for n in [8usize, 16, 64] {
            jobs.push((format!("hodge/{name}/N{n}"), s.clone(), p.clone(), n));
        }
    }
    ctx.map(&jobs, |(id, s, p, n)| match hodge_instance(s, p, *n) {
        Ok((got, want)) => Record::exact(id.clone(), claim, format!("{want:?}"), format!("{got:?}")),
        Err(e) => Record::failed(id.clone(), claim, Value::Exact("matching dims".into()), e),
    })
}

// ---------------------------------------------------------------- lie

/// Structure-constant checks on one algebra.
pub fn algebra_report(lie: &LieAlgebra) -> Vec<Record> {
    let r = lie.check();
    let n = lie.name();
    vec![
        Record::exact(format!("algebra/{n}/antisymmetric"), "structure constants are antisymmetric", true, r.antisymmetric),
        Record::exact(format!("algebra/{n}/jacobi"), "structure constants satisfy Jacobi", true, r.jacobi),
    ]
}

/// CE differentials, the quantized differential and the Clifford comparison.
pub fn algebraic_identities(ctx: &Context, algebras: &[LieAlgebra]) -> Vec<Record> {
    let t_max = ctx.config.truncation;
    let mut out = Vec::new();
    for l in algebras {
        let n = l.name();
        for m in [CeModule::Trivial, CeModule::SymG1, CeModule::Full] {
            let claim = "CE differential squares to zero and cohomology has the chain Euler characteristic";
            let r = ce_complex(l, m).map(|c| c.cohomology().euler() == c.chain_euler());
            out.push(exact_or_fail(format!("ce/{n}/{m:?}"), claim, true, r));
        }
        if l.check().unimodular {
            for t in 0..=t_max {
                out.push(exact_or_fail(format!("dq/{n}/square/T{t}"), "quantized differential squares to zero", "ok", dq_square_check(l, t).map(|_| "ok")));
                out.push(exact_or_fail(
                    format!("dq/{n}/conjugation/T{t}"),
                    "quantized differential is the CE differential conjugated by the trace exponential",
                    "ok",
                    conjugation_check(l, t).map(|_| "ok"),
                ));
            }
            if !l.is_abelian() {
                for t in 1..=t_max {
                    let r = clifford_differential_check(l, t).map(|r| r.constant.map_or("none".into(), |c| scalar::format(&c)));
                    out.push(exact_or_fail(
                        format!("clifford/{n}/T{t}"),
                        "Clifford commutator with the cubic element is a constant multiple of the quantized differential",
                        "2",
                        r,
                    ));
                }
            }
        }
    }
    out
}

/// B-weight one obstruction complex of sl2: cohomology is g in degree −1.
pub fn bweight(_ctx: &Context) -> Vec<Record> {
    let claim = "B-weight one obstruction cohomology of sl2 is a copy of g in degree -1";
    let r = bweight_obstruction(&LieAlgebra::sl2(), 1).map(|h| format!("{:?}", h.dims.iter().filter(|d| d.1 > 0).collect::<Vec<_>>()));
    vec![exact_or_fail("bweight/sl2/1".into(), claim, "[(-1, 3)]", r)]
}

// ---------------------------------------------------------------- quantization

fn hbar(n: usize, c: i64) -> Element {
    let mut x = Element::new();
    x.insert((1, vec![0; n]), int(c));
    x
}

fn minus(a: &Element, b: &Element) -> Element {
    let mut d = a.clone();
    add_into(&mut d, b, &int(-1));
    d
}

fn show(x: &Element) -> String {
    if x.is_empty() {
        return "0".into();
    }
    let terms: Vec<String> = x.iter().map(|((h, e), c)| format!("{}*h^{h}*x^{e:?}", scalar::format(c))).collect();
    terms.join(" + ")
}

/// Weyl relation, Fock reduction and the star-product commutator.
pub fn quantization(_ctx: &Context) -> Vec<Record> {
    let mut out = Vec::new();
    let s = SymplecticSpace::darboux(1);
    let w = s.weyl();
    let (q, p) = (w.generator(0), w.generator(1));
    out.push(Record::exact(
        "weyl/commutator",
        "q p - p q equals hbar",
        show(&hbar(2, 1)),
        show(&minus(&weyl_product(&w, &q, &p), &weyl_product(&w, &p, &q))),
    ));
    match FockModule::new(&s, &[vec![int(0), int(1)]]) {
        Err(e) => out.push(Record::failed("fock", "Fock module of a Lagrangian", Value::Exact("module".into()), e)),
        Ok(f) => {
            out.push(Record::exact("fock/p", "the Lagrangian generator acts by zero on the vacuum", "0", show(&f.reduce(&p))));
            out.push(Record::exact("fock/qp", "q p reduces to hbar", show(&hbar(2, 1)), show(&f.reduce(&w.word(&[0, 1])))));
            out.push(Record::exact("fock/pq", "p q lies in the submodule generated by the Lagrangian", "0", show(&f.reduce(&w.word(&[1, 0])))));
        }
    }
    let pi = Matrix::from_i64(&[&[0, 3, -1], &[-3, 0, 2], &[1, -2, 0]]);
    let coord = |i: usize| {
        let mut x = Element::new();
        let mut e = vec![0; 3];
        e[i] = 1;
        x.insert((0, e), int(1));
        x
    };
    for i in 0..3 {
        for j in 0..3 {
            let c = minus(&star_product(&pi, &coord(i), &coord(j)), &star_product(&pi, &coord(j), &coord(i)));
            let mut want = Element::new();
            if pi[(i, j)] != int(0) {
                want.insert((1, vec![0; 3]), pi[(i, j)].clone());
            }
            out.push(Record::exact(format!("star/{i}{j}"), "star commutator of linear coordinates equals hbar times the bivector", show(&want), show(&c)));
        }
    }
    let s4 = SymplecticSpace::darboux(2);
    let pi = bivector_of(s4.omega());
    for i in 0..4 {
        for j in 0..4 {
            let (a, b) = (dual_coordinate(s4.omega(), i), dual_coordinate(s4.omega(), j));
            let c = minus(&star_product(&pi, &a, &b), &star_product(&pi, &b, &a));
            let mut want = Element::new();
            if s4.omega()[(i, j)] != int(0) {
                want.insert((1, vec![0; 4]), s4.omega()[(i, j)].clone());
            }
            out.push(Record::exact(format!("star/dual/{i}{j}"), "star commutator in dual coordinates equals hbar times the form", show(&want), show(&c)));
        }
    }
    out
}

/// Factorization-algebra axioms on the exterior and Clifford models.
pub fn fa_axioms(ctx: &Context) -> Vec<Record> {
    let claim = "nested interval products agree with the flattened product";
    let models: Vec<(&str, fn(usize) -> IntervalFa)> = vec![("exterior", exterior_fa), ("clifford", clifford_fa)];
    ctx.map(&models, |(name, build)| {
        let r = fa_axiom_check(&build(3), 2);
        let id = format!("fa/{name}/depth2");
        match r.failure {
            None => Record::exact(id, claim, "pass", "pass"),
            Some(f) => Record::exact(id, claim, "pass", f),
        }
    })
}
