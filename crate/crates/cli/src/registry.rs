// SPDX-License-Identifier: Apache-2.0

//! Name-keyed tables of builders that turn a JSON parameter object into a
//! trait object.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{Map, Value};
use setflow_core::comparison::{
    BallVolume, ComparisonSystem, LinearComparison, MixedChain, NilpotentPair, PracticalPair,
};
use setflow_core::convex::{Interpolation, LinearOperator2D, SupportFunction2D, CUBIC, POLYGON};
use setflow_core::functions::{Constant, Power, Rational, ScalarFn, SharedFn, Table as TableFn};
use setflow_core::semiflow::{
    AreaFunctional, BallSource, ConstantBody, Functional, HausdorffTo, LinearBody, MixedPower,
    PerimeterFunctional, SemiflowParams, SourceTerm, ZeroSource,
};

use crate::checks::{self, Check};
use crate::error::CliError;
use crate::scenario::{matrix, BodySpec, Component, ParamsSpec};

/// What a builder can see besides its own parameters.
pub struct Context<'a> {
    pub registry: &'a Registry,
    pub grid_size: usize,
}

pub trait Builder<T: ?Sized>: Send + Sync {
    fn build(&self, params: &Params<'_>, cx: &Context<'_>) -> Result<Arc<T>, CliError>;
}

pub type BuildFn<T> = fn(&Params<'_>, &Context<'_>) -> Result<Arc<T>, CliError>;

impl<T: ?Sized> Builder<T> for BuildFn<T> {
    fn build(&self, params: &Params<'_>, cx: &Context<'_>) -> Result<Arc<T>, CliError> {
        self(params, cx)
    }
}

struct Entry<T: ?Sized> {
    summary: &'static str,
    builder: Box<dyn Builder<T>>,
}

pub struct Table<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Entry<T>>,
}

impl<T: ?Sized> Table<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, summary: &'static str, f: BuildFn<T>)
    where
        T: 'static,
    {
        self.register_builder(name, summary, f);
    }

    pub fn register_builder(&mut self, name: &'static str, summary: &'static str, builder: impl Builder<T> + 'static) {
        self.entries.insert(
            name,
            Entry {
                summary,
                builder: Box::new(builder),
            },
        );
    }

    pub fn build(&self, component: &Component, cx: &Context<'_>) -> Result<Arc<T>, CliError> {
        let entry = self.entries.get(component.name.as_str()).ok_or_else(|| {
            CliError::schema(format!(
                "unknown {} `{}` (known: {})",
                self.kind,
                component.name,
                self.names().join(", ")
            ))
        })?;
        let params = Params {
            owner: format!("{} `{}`", self.kind, component.name),
            map: &component.params,
        };
        entry.builder.build(&params, cx)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|(k, e)| (*k, e.summary)).collect()
    }
}

/// Typed access to a component's parameter object.
pub struct Params<'a> {
    owner: String,
    map: &'a Map<String, Value>,
}

impl<'a> Params<'a> {
    pub fn err(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::schema(format!("{}: {msg}", self.owner))
    }

    pub fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn require(&self, key: &str) -> Result<&'a Value, CliError> {
        self.get(key).ok_or_else(|| self.err(format!("missing parameter `{key}`")))
    }

    fn parse<T: serde::de::DeserializeOwned>(&self, key: &str, v: &Value) -> Result<T, CliError> {
        serde_json::from_value(v.clone()).map_err(|e| self.err(format!("parameter `{key}`: {e}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v: f64 = self.parse(key, self.require(key)?)?;
        if !v.is_finite() {
            return Err(self.err(format!("parameter `{key}` must be finite")));
        }
        Ok(v)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        if self.get(key).is_some() {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.get(key) {
            Some(v) => self.parse(key, v),
            None => Ok(default),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.get(key) {
            Some(v) => self.parse(key, v),
            None => Ok(default),
        }
    }

    pub fn string_or(&self, key: &str, default: &str) -> Result<String, CliError> {
        match self.get(key) {
            Some(v) => self.parse(key, v),
            None => Ok(default.into()),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let v: Vec<f64> = self.parse(key, self.require(key)?)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(self.err(format!("parameter `{key}` must be finite")));
        }
        Ok(v)
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        if self.get(key).is_some() {
            self.f64_list(key)
        } else {
            Ok(default.to_vec())
        }
    }

    pub fn strings(&self, key: &str) -> Result<Vec<String>, CliError> {
        self.parse(key, self.require(key)?)
    }

    pub fn rows(&self, key: &str) -> Result<Vec<Vec<f64>>, CliError> {
        let rows: Vec<Vec<f64>> = self.parse(key, self.require(key)?)?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) || rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(self.err(format!("parameter `{key}` must be a finite square matrix")));
        }
        Ok(rows)
    }

    pub fn operator(&self, key: &str) -> Result<LinearOperator2D, CliError> {
        let rows: Vec<Vec<f64>> = self.parse(key, self.require(key)?)?;
        matrix(&rows).map_err(|e| self.err(format!("parameter `{key}`: {e}")))
    }

    pub fn component(&self, key: &str) -> Result<Component, CliError> {
        self.parse(key, self.require(key)?)
    }

    pub fn function(&self, key: &str, cx: &Context<'_>) -> Result<SharedFn, CliError> {
        cx.registry.functions.build(&self.component(key)?, cx)
    }

    pub fn system(&self, key: &str, cx: &Context<'_>) -> Result<Arc<dyn ComparisonSystem>, CliError> {
        cx.registry.systems.build(&self.component(key)?, cx)
    }

    pub fn body(&self, key: &str, cx: &Context<'_>) -> Result<SupportFunction2D, CliError> {
        let spec: BodySpec = self.parse(key, self.require(key)?)?;
        spec.build(cx.grid_size)
    }
}

pub struct Registry {
    pub functions: Table<dyn ScalarFn>,
    pub sources: Table<dyn SourceTerm>,
    pub functionals: Table<dyn Functional>,
    pub interpolations: Table<dyn Interpolation>,
    pub systems: Table<dyn ComparisonSystem>,
    pub checks: Table<dyn Check>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            functions: Table::new("function"),
            sources: Table::new("source"),
            functionals: Table::new("functional"),
            interpolations: Table::new("interpolation"),
            systems: Table::new("comparison system"),
            checks: Table::new("check"),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        register_functions(&mut r.functions);
        register_sources(&mut r.sources);
        register_functionals(&mut r.functionals);
        register_interpolations(&mut r.interpolations);
        register_systems(&mut r.systems);
        checks::register(&mut r.checks);
        r
    }

    pub fn context(&self, grid_size: usize) -> Context<'_> {
        Context {
            registry: self,
            grid_size,
        }
    }

    pub fn semiflow_params(&self, spec: &ParamsSpec, grid_size: usize) -> Result<SemiflowParams, CliError> {
        let cx = self.context(grid_size);
        let a = matrix(&spec.a).map_err(|e| CliError::schema(format!("params.a: {e}")))?;
        let phi = self.functions.build(&spec.phi, &cx)?;
        let source = self.sources.build(&spec.source, &cx)?;
        let mut params = SemiflowParams::new(a, phi, source);
        if let Some(name) = &spec.interpolation {
            params = params.with_interpolation(self.interpolations.build(&Component::new(name), &cx)?);
        }
        Ok(params)
    }
}

fn register_functions(t: &mut Table<dyn ScalarFn>) {
    t.register("constant", "c; params: value", |p: &Params, _: &Context| {
        Ok(Arc::new(Constant(p.f64("value")?)) as SharedFn)
    });
    t.register("reciprocal_shift", "1/(1+s)", |_: &Params, _: &Context| {
        Ok(Arc::new(Rational::reciprocal_shift()) as SharedFn)
    });
    t.register(
        "rational",
        "P(s)/Q(s); params: num, den (ascending coefficients)",
        |p: &Params, _: &Context| {
            let r = Rational::new(p.f64_list("num")?, p.f64_list("den")?).map_err(|e| p.err(e))?;
            Ok(Arc::new(r) as SharedFn)
        },
    );
    t.register(
        "power",
        "c·(s+shift)^p; params: coefficient, exponent, shift",
        |p: &Params, _: &Context| {
            let mut f = Power::new(p.f64("coefficient")?, p.f64("exponent")?);
            f.shift = p.f64_or("shift", 0.0)?;
            Ok(Arc::new(f) as SharedFn)
        },
    );
    t.register("table", "piecewise linear; params: xs, ys", |p: &Params, _: &Context| {
        let f = TableFn::new(p.f64_list("xs")?, p.f64_list("ys")?).map_err(|e| p.err(e))?;
        Ok(Arc::new(f) as SharedFn)
    });
}

fn register_sources(t: &mut Table<dyn SourceTerm>) {
    t.register("zero", "F = {0}", |_: &Params, _: &Context| {
        Ok(Arc::new(ZeroSource) as Arc<dyn SourceTerm>)
    });
    t.register("ball", "F = ψ(V)·K; params: psi", |p: &Params, cx: &Context| {
        Ok(Arc::new(BallSource { psi: p.function("psi", cx)? }) as Arc<dyn SourceTerm>)
    });
    t.register("linear_body", "F = ψ(V)·Bu; params: psi, b", |p: &Params, cx: &Context| {
        Ok(Arc::new(LinearBody {
            psi: p.function("psi", cx)?,
            b: p.operator("b")?,
        }) as Arc<dyn SourceTerm>)
    });
    t.register("constant_body", "F = U; params: body", |p: &Params, cx: &Context| {
        Ok(Arc::new(ConstantBody { body: p.body("body", cx)? }) as Arc<dyn SourceTerm>)
    });
}

fn register_functionals(t: &mut Table<dyn Functional>) {
    t.register("area", "V[u] (column V)", |_: &Params, _: &Context| {
        Ok(Arc::new(AreaFunctional) as Arc<dyn Functional>)
    });
    t.register("perimeter", "perimeter (column perimeter)", |_: &Params, _: &Context| {
        Ok(Arc::new(PerimeterFunctional) as Arc<dyn Functional>)
    });
    t.register("mixed", "V[u, Bⁱu]; params: b, i (column Wi)", |p: &Params, _: &Context| {
        let i = p.usize_or("i", 1)?;
        let i = u32::try_from(i).map_err(|_| p.err("power too large"))?;
        Ok(Arc::new(MixedPower::new(p.operator("b")?, i)) as Arc<dyn Functional>)
    });
    t.register(
        "hausdorff_to",
        "d_H(u, ref); params: body (column dH_ref)",
        |p: &Params, cx: &Context| Ok(Arc::new(HausdorffTo { reference: p.body("body", cx)? }) as Arc<dyn Functional>),
    );
}

fn register_interpolations(t: &mut Table<dyn Interpolation>) {
    t.register("cubic", "periodic cubic", |_: &Params, _: &Context| {
        Ok(Arc::new(CUBIC) as Arc<dyn Interpolation>)
    });
    t.register("polygon", "exact for the sampled polygon", |_: &Params, _: &Context| {
        Ok(Arc::new(POLYGON) as Arc<dyn Interpolation>)
    });
}

fn register_systems(t: &mut Table<dyn ComparisonSystem>) {
    t.register(
        "nilpotent_pair",
        "(V, W1) for B² = 0; params: phi, psi",
        |p: &Params, cx: &Context| {
            Ok(Arc::new(NilpotentPair {
                phi: p.function("phi", cx)?,
                psi: p.function("psi", cx)?,
            }) as Arc<dyn ComparisonSystem>)
        },
    );
    t.register(
        "mixed_chain",
        "cyclic chain of mixed areas; params: phi, psi, k",
        |p: &Params, cx: &Context| {
            let k = p.usize_or("k", 2)?;
            if k < 2 {
                return Err(p.err("k must be at least 2"));
            }
            Ok(Arc::new(MixedChain {
                phi: p.function("phi", cx)?,
                psi: p.function("psi", cx)?,
                k,
            }) as Arc<dyn ComparisonSystem>)
        },
    );
    t.register(
        "practical_pair",
        "(V, V[u,Bu]) for D_H u = Bu; params: b or trace + abs_det",
        |p: &Params, _: &Context| {
            let pair = if p.get("b").is_some() {
                PracticalPair::from_operator(&p.operator("b")?)
            } else {
                PracticalPair {
                    trace: p.f64("trace")?,
                    abs_det: p.f64("abs_det")?,
                }
            };
            Ok(Arc::new(pair) as Arc<dyn ComparisonSystem>)
        },
    );
    t.register(
        "ball_volume",
        "area under a ball source; params: trace_a, phi, psi",
        |p: &Params, cx: &Context| {
            Ok(Arc::new(BallVolume {
                trace_a: p.f64("trace_a")?,
                phi: p.function("phi", cx)?,
                psi: p.function("psi", cx)?,
            }) as Arc<dyn ComparisonSystem>)
        },
    );
    t.register("linear", "ξ' = Mξ; params: matrix", |p: &Params, _: &Context| {
        Ok(Arc::new(LinearComparison::new(p.rows("matrix")?)) as Arc<dyn ComparisonSystem>)
    });
}
