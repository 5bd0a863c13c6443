use bbf_core::lie::LieAlgebra;

use crate::checks::{self, Context};
use crate::report::Record;

pub type SuiteFn = fn(&Context) -> Vec<Record>;

#[derive(Clone, Copy)]
pub struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    pub claim: &'static str,
    /// copied into every report of this suite
    pub notes: &'static [&'static str],
    pub run: SuiteFn,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RegistryError {
    #[error("suite {0:?} registered twice")]
    Duplicate(String),
}

/// Suites keyed by name, listed in name order.
#[derive(Default)]
pub struct Registry {
    suites: Vec<Suite>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry::default()
    }

    pub fn register(&mut self, s: Suite) -> Result<(), RegistryError> {
        match self.suites.binary_search_by(|x| x.name.cmp(s.name)) {
            Ok(_) => Err(RegistryError::Duplicate(s.name.into())),
            Err(i) => {
                self.suites.insert(i, s);
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&Suite> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn list(&self) -> &[Suite] {
        &self.suites
    }

    pub fn is_empty(&self) -> bool {
        self.suites.is_empty()
    }
}

fn lie_suite(ctx: &Context) -> Vec<Record> {
    let mut out = checks::algebra_report(&ctx.lie);
    out.extend(checks::algebraic_identities(ctx, std::slice::from_ref(&ctx.lie)));
    out.extend(checks::bweight(ctx));
    out
}

fn kernels_suite(ctx: &Context) -> Vec<Record> {
    let mut out = checks::cocycle(ctx);
    out.extend(checks::propagator_closed_form(ctx));
    out
}

fn limits_suite(ctx: &Context) -> Vec<Record> {
    let mut out = checks::bulk_trivector(ctx, &ctx.lie);
    out.extend(checks::boundary_quantum(ctx));
    out.extend(checks::classical_boundary(ctx));
    for k in [2, 3] {
        out.extend(checks::wheel_obstruction(ctx, &ctx.lie, k, &checks::obstruction_grid(k)));
    }
    out.extend(checks::semigroup(ctx));
    out
}

fn rg_suite(ctx: &Context) -> Vec<Record> {
    checks::semigroup(ctx)
}

/// The heat-kernel expansion is truncated before its remainder, which vanishes to all orders in L.
pub const REMAINDER_NOTE: &str = "kernel remainder term set to zero; all limits are taken as L -> 0";
pub const LOCALITY_NOTE: &str = "support-locality exponents of the effective interaction are not checked numerically";

pub fn default_registry() -> Result<Registry, RegistryError> {
    let mut r = Registry::empty();
    let all = [
        Suite {
            name: "lie",
            description: "structure constants, CE complexes, quantized differential, Clifford comparison, B-weight obstruction",
            claim: "the quantized CE differential squares to zero and matches its Clifford model",
            notes: &[],
            run: lie_suite,
        },
        Suite {
            name: "quantization",
            description: "Weyl relation, Fock reduction, star-product commutators",
            claim: "the Weyl algebra and its Fock module reproduce canonical commutators",
            notes: &[],
            run: checks::quantization,
        },
        Suite {
            name: "hodge",
            description: "discrete doubled complexes on the circle for Lagrangian pairs",
            claim: "invariant harmonic forms count intersection and quotient of two Lagrangians",
            notes: &[],
            run: checks::doubling_hodge,
        },
        Suite {
            name: "kernels",
            description: "cocycle pairing and the closed-form propagator",
            claim: "heat-kernel propagators have the expected closed form and boundary cocycle",
            notes: &[REMAINDER_NOTE],
            run: kernels_suite,
        },
        Suite {
            name: "bf-limits",
            description: "bulk and boundary diagram limits, wheel obstructions, flow composition (slow)",
            claim: "the effective BF action satisfies the master equation in the limit",
            notes: &[REMAINDER_NOTE, LOCALITY_NOTE],
            run: limits_suite,
        },
        Suite {
            name: "fa-axioms",
            description: "interval factorization-algebra axioms, depth 2",
            claim: "the interval structure maps are associative and unital",
            notes: &[],
            run: checks::fa_axioms,
        },
        Suite {
            name: "rg",
            description: "semigroup property of the tree-level flow",
            claim: "the renormalization-group flow composes over intermediate scales",
            notes: &[REMAINDER_NOTE],
            run: rg_suite,
        },
    ];
    for s in all {
        r.register(s)?;
    }
    Ok(r)
}

/// Algebras that every unimodular check can use.
pub fn standard_algebras() -> Vec<LieAlgebra> {
    vec![LieAlgebra::abelian(2), LieAlgebra::abelian(3), LieAlgebra::sl2(), LieAlgebra::heisenberg3(), LieAlgebra::affine2()]
}
