//! Machine rates: how consumed resources become time.
//!
//! Rates are extracted from a linked machine model (machine -> node ->
//! sockets -> cores/memory/link) or built from the bundled defaults. The
//! defaults describe a desk-scale host: 21.6e9 scalar sp flops/s with
//! simd x8 and fmad x2 rate multipliers, 34.1e9 bytes/s memory bandwidth,
//! 8e9 bytes/s host link, and a 20 us anneal per quantum operation. They
//! are plumbing derived from public datasheet arithmetic and are editable
//! as catalog files.

use std::collections::BTreeMap;

use super::ast::{BinOp, Expr, ModelAst};
use super::eval::{eval_expr, EvalError, EvalOptions};

/// A core resource formula: `amount` binds to `param`, the body yields
/// seconds, and trait factors scale the resulting time (a factor of 0.125
/// means the trait makes the statement 8x faster).
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceRule {
    pub param: String,
    pub body: Expr,
    pub trait_factors: BTreeMap<String, f64>,
}

impl ResourceRule {
    pub fn seconds(
        &self,
        amount: f64,
        traits: &[String],
        opts: &EvalOptions,
    ) -> Result<f64, EvalError> {
        let env = BTreeMap::from([(self.param.clone(), amount)]);
        let mut seconds = eval_expr(&self.body, &env, opts)?;
        for t in traits {
            if let Some(factor) = self.trait_factors.get(t) {
                seconds *= factor;
            }
        }
        Ok(seconds)
    }
}

/// Everything the evaluator needs to convert resources to seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineRates {
    /// Named formulas, `flops` included; `QuOps` and friends live here too.
    pub resources: BTreeMap<String, ResourceRule>,
    pub memory_bytes_per_sec: Option<f64>,
    pub link_bytes_per_sec: Option<f64>,
}

impl MachineRates {
    pub fn resource(&self, name: &str) -> Option<&ResourceRule> {
        self.resources.get(name)
    }
}

impl Default for MachineRates {
    fn default() -> Self {
        let flops = ResourceRule {
            param: "number".into(),
            // number / 21.6e9
            body: Expr::binary(BinOp::Div, Expr::ident("number"), Expr::number(21.6e9)),
            trait_factors: BTreeMap::from([
                ("sp".into(), 1.0),
                ("dp".into(), 2.0),
                ("simd".into(), 0.125),
                ("fmad".into(), 0.5),
            ]),
        };
        let quops = ResourceRule {
            param: "number".into(),
            // number * 20/1000000
            body: Expr::binary(
                BinOp::Div,
                Expr::binary(BinOp::Mul, Expr::ident("number"), Expr::number(20.0)),
                Expr::number(1_000_000.0),
            ),
            trait_factors: BTreeMap::new(),
        };
        MachineRates {
            resources: BTreeMap::from([("flops".into(), flops), ("QuOps".into(), quops)]),
            memory_bytes_per_sec: Some(34.1e9),
            link_bytes_per_sec: Some(8e9),
        }
    }
}

/// Walk `machine -> first node -> sockets` and collect rates. The first
/// core resource with a given name wins; memory and link bandwidth come
/// from the first socket whose referenced declaration defines a
/// `bandwidth` property.
pub fn extract_rates(
    ast: &ModelAst,
    machine: &str,
    opts: &EvalOptions,
) -> Result<MachineRates, EvalError> {
    let machine_decl = ast
        .find_machine(machine)
        .ok_or_else(|| EvalError::UnknownComponent {
            kind: "machine",
            name: machine.to_string(),
        })?;
    let node_ref = machine_decl
        .nodes
        .first()
        .ok_or_else(|| EvalError::UnknownComponent {
            kind: "node",
            name: format!("<none declared by machine {machine}>"),
        })?;
    let node = ast
        .find_node(&node_ref.name)
        .ok_or_else(|| EvalError::UnknownComponent {
            kind: "node",
            name: node_ref.name.clone(),
        })?;

    let empty = BTreeMap::new();
    let mut rates = MachineRates {
        resources: BTreeMap::new(),
        memory_bytes_per_sec: None,
        link_bytes_per_sec: None,
    };
    for socket_ref in &node.sockets {
        let socket =
            ast.find_socket(&socket_ref.name)
                .ok_or_else(|| EvalError::UnknownComponent {
                    kind: "socket",
                    name: socket_ref.name.clone(),
                })?;
        for core_ref in &socket.cores {
            let core = ast
                .find_core(&core_ref.name)
                .ok_or_else(|| EvalError::UnknownComponent {
                    kind: "core",
                    name: core_ref.name.clone(),
                })?;
            for decl in &core.resources {
                if rates.resources.contains_key(&decl.name) {
                    continue;
                }
                let mut trait_factors = BTreeMap::new();
                for (name, factor) in &decl.traits {
                    trait_factors.insert(name.clone(), eval_expr(factor, &empty, opts)?);
                }
                rates.resources.insert(
                    decl.name.clone(),
                    ResourceRule {
                        param: decl.param.clone(),
                        body: decl.body.clone(),
                        trait_factors,
                    },
                );
            }
        }
        if rates.memory_bytes_per_sec.is_none() {
            if let Some(memory) = socket.memory.as_deref().and_then(|n| ast.find_memory(n)) {
                if let Some((_, bw)) = memory.properties.iter().find(|(n, _)| n == "bandwidth") {
                    rates.memory_bytes_per_sec = Some(eval_expr(bw, &empty, opts)?);
                }
            }
        }
        if rates.link_bytes_per_sec.is_none() {
            if let Some(link) = socket.link.as_deref().and_then(|n| ast.find_link(n)) {
                if let Some((_, bw)) = link.properties.iter().find(|(n, _)| n == "bandwidth") {
                    rates.link_bytes_per_sec = Some(eval_expr(bw, &empty, opts)?);
                }
            }
        }
    }
    Ok(rates)
}
