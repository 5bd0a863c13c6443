//! Acceptance criteria 1-10, run in order on one thread so each timing is its own.

use std::time::{Duration, Instant};

use bbf::checks::{self, Context};
use bbf::suites::standard_algebras;
use bbf::Record;
use bbf_core::lie::LieAlgebra;

struct Criterion {
    n: usize,
    title: &'static str,
    budget: Duration,
    run: fn(&Context) -> Vec<Record>,
}

fn c1(ctx: &Context) -> Vec<Record> {
    let mut out = checks::bulk_trivector(ctx, &LieAlgebra::sl2());
    out.extend(checks::bulk_trivector(ctx, &LieAlgebra::heisenberg3()));
    out
}

fn c3(ctx: &Context) -> Vec<Record> {
    let sl2 = LieAlgebra::sl2();
    let mut out = checks::classical_boundary(ctx);
    for k in [2, 3] {
        out.extend(checks::wheel_obstruction(ctx, &sl2, k, &checks::obstruction_grid(k)));
    }
    out
}

fn c6(ctx: &Context) -> Vec<Record> {
    let pairs = checks::lagrangian_pairs();
    let dims: std::collections::BTreeSet<usize> = pairs.iter().map(|p| p.1.dim()).collect();
    let mut out = vec![
        Record::exact("hodge/pair-count", "at least 20 Lagrangian pairs", true, pairs.len() >= 20),
        Record::exact("hodge/dims", "pairs cover dimensions 2 and 4", "{2, 4}", format!("{dims:?}")),
    ];
    out.extend(checks::doubling_hodge(ctx));
    out
}

fn c7(ctx: &Context) -> Vec<Record> {
    checks::algebraic_identities(ctx, &standard_algebras())
}

fn c9(ctx: &Context) -> Vec<Record> {
    let mut out = checks::quantization(ctx);
    out.extend(checks::fa_axioms(ctx));
    out
}

fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion { n: 1, title: "bulk trivector limit", budget: s(60), run: c1 },
        Criterion { n: 2, title: "boundary quantum factor", budget: s(30), run: checks::boundary_quantum },
        Criterion { n: 3, title: "classical vanishing and master equation", budget: s(120), run: c3 },
        Criterion { n: 4, title: "cocycle identity", budget: s(1), run: checks::cocycle },
        Criterion { n: 5, title: "propagator closed form", budget: s(10), run: checks::propagator_closed_form },
        Criterion { n: 6, title: "doubling-Hodge equality", budget: s(10), run: c6 },
        Criterion { n: 7, title: "algebraic identities", budget: s(10), run: c7 },
        Criterion { n: 8, title: "B-weight one obstruction", budget: s(5), run: checks::bweight },
        Criterion { n: 9, title: "quantization algebra", budget: s(10), run: c9 },
        Criterion { n: 10, title: "flow semigroup", budget: s(60), run: checks::semigroup },
    ]
}

fn main() {
    let ctx = Context::default_sequential();
    let mut failed = Vec::new();
    for c in criteria() {
        let start = Instant::now();
        let records = (c.run)(&ctx);
        let took = start.elapsed();
        let bad: Vec<&Record> = records.iter().filter(|r| !r.pass).collect();
        let ok = !records.is_empty() && bad.is_empty() && took <= c.budget;
        println!(
            "criterion {:>2} {}: {} ({}/{} records, {:.2}s of {}s)",
            c.n,
            c.title,
            if ok { "PASS" } else { "FAIL" },
            records.len() - bad.len(),
            records.len(),
            took.as_secs_f64(),
            c.budget.as_secs()
        );
        for r in &bad {
            println!("    {}: expected {}, got {:?}, error {:?}", r.id, r.expected, r.computed, r.error);
        }
        if !ok {
            failed.push(c.n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
