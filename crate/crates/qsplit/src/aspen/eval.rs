//! Expression evaluation and model execution.
//!
//! Statement-to-time mapping:
//! - `flops` and named core resources go through their [`ResourceRule`],
//!   with trait factors applied to the time.
//! - `loads`/`stores` move bytes against the memory bandwidth. For the
//!   `from`/`to` forms the amount is already bytes; the `of size [s]` form
//!   moves `amount * s` bytes.
//! - `intracomm` moves bytes across the host link.
//! - `microseconds` is a fixed latency of `amount * 1e-6` seconds.
//!
//! `log` is the natural logarithm by default; [`EvalOptions`] can rebase it.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::ast::{Expr, KernelItem, ModelAst, ResourceKind};
use super::printer::print_expr;
use super::rates::{extract_rates, MachineRates};

const MAX_KERNEL_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogMode {
    Natural,
    Base(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub log: LogMode,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            log: LogMode::Natural,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
    #[error("log of non-positive value {value} in `{expr}`")]
    LogDomain { expr: String, value: f64 },
    #[error("unknown function `{0}` (supported: log, ceil)")]
    UnknownFunction(String),
    #[error("function `{function}` takes {expected} argument(s), got {got}")]
    WrongArity {
        function: String,
        expected: usize,
        got: usize,
    },
    #[error("no application model named `{0}`")]
    UnknownModel(String),
    #[error("no {kind} named `{name}`")]
    UnknownComponent { kind: &'static str, name: String },
    #[error("model `{model}` has no kernel `{kernel}`")]
    UnknownKernel { model: String, kernel: String },
    #[error("model `{model}` declares kernel `{kernel}` more than once")]
    DuplicateKernel { model: String, kernel: String },
    #[error("model `{0}` has no kernel named `main`")]
    MissingMainKernel(String),
    #[error("override `{0}` does not name a param of the model")]
    UnknownOverride(String),
    #[error("statement references undeclared data `{0}`")]
    UndeclaredData(String),
    #[error("no machine rate for resource kind `{0}`")]
    MissingRate(String),
    #[error("kernel call depth exceeded at `{0}` (cycle?)")]
    RecursionLimit(String),
    #[error("`{resource}` statement yields a negative or undefined time ({seconds} s)")]
    NegativeTime { resource: String, seconds: f64 },
}

/// Evaluate an expression under an environment binding all identifiers.
pub fn eval_expr(
    e: &Expr,
    env: &BTreeMap<String, f64>,
    opts: &EvalOptions,
) -> Result<f64, EvalError> {
    match e {
        Expr::Number(v) => Ok(*v),
        Expr::Ident(name) => env
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::UnboundIdentifier(name.clone())),
        Expr::Neg(inner) => Ok(-eval_expr(inner, env, opts)?),
        Expr::Binary(op, lhs, rhs) => {
            let a = eval_expr(lhs, env, opts)?;
            let b = eval_expr(rhs, env, opts)?;
            Ok(match op {
                super::ast::BinOp::Add => a + b,
                super::ast::BinOp::Sub => a - b,
                super::ast::BinOp::Mul => a * b,
                super::ast::BinOp::Div => a / b,
                super::ast::BinOp::Pow => a.powf(b),
            })
        }
        Expr::Call(name, args) => match name.as_str() {
            "log" => {
                expect_arity(name, args, 1)?;
                let v = eval_expr(&args[0], env, opts)?;
                if v <= 0.0 {
                    return Err(EvalError::LogDomain {
                        expr: print_expr(e),
                        value: v,
                    });
                }
                Ok(match opts.log {
                    LogMode::Natural => v.ln(),
                    LogMode::Base(b) => v.log(b),
                })
            }
            "ceil" => {
                expect_arity(name, args, 1)?;
                Ok(eval_expr(&args[0], env, opts)?.ceil())
            }
            _ => Err(EvalError::UnknownFunction(name.clone())),
        },
    }
}

fn expect_arity(name: &str, args: &[Expr], expected: usize) -> Result<(), EvalError> {
    if args.len() != expected {
        return Err(EvalError::WrongArity {
            function: name.to_string(),
            expected,
            got: args.len(),
        });
    }
    Ok(())
}

/// Time category a statement is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Compute,
    Memory,
    Fixed,
    Quantum,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Category::Compute => "compute",
            Category::Memory => "memory",
            Category::Fixed => "fixed",
            Category::Quantum => "quantum",
        };
        f.write_str(name)
    }
}

/// Resources consumed and seconds attributed for one statement, already
/// multiplied by its block count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatementTiming {
    pub kernel: String,
    pub block: String,
    pub resource: String,
    pub category: Category,
    pub amount: f64,
    pub seconds: f64,
}

/// Itemized timing for one model evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingReport {
    pub model: String,
    pub entries: Vec<StatementTiming>,
}

impl TimingReport {
    pub fn total_seconds(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc + e.seconds)
    }

    pub fn category_seconds(&self, category: Category) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.category == category)
            .fold(0.0, |acc, e| acc + e.seconds)
    }

    pub fn compute_seconds(&self) -> f64 {
        self.category_seconds(Category::Compute)
    }

    pub fn memory_seconds(&self) -> f64 {
        self.category_seconds(Category::Memory)
    }

    pub fn fixed_seconds(&self) -> f64 {
        self.category_seconds(Category::Fixed)
    }

    pub fn quantum_seconds(&self) -> f64 {
        self.category_seconds(Category::Quantum)
    }

    /// Entries plus totals, for machine consumption.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "model": self.model,
            "entries": self.entries,
            "totals": {
                "compute_s": self.compute_seconds(),
                "memory_s": self.memory_seconds(),
                "fixed_s": self.fixed_seconds(),
                "quantum_s": self.quantum_seconds(),
                "total_s": self.total_seconds(),
            }
        })
    }
}

impl fmt::Display for TimingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {}", self.model)?;
        writeln!(
            f,
            "{:<22} {:<14} {:<14} {:<9} {:>16} {:>16}",
            "kernel", "block", "resource", "category", "amount", "seconds"
        )?;
        for e in &self.entries {
            writeln!(
                f,
                "{:<22} {:<14} {:<14} {:<9} {:>16.6e} {:>16.6e}",
                e.kernel, e.block, e.resource, e.category, e.amount, e.seconds
            )?;
        }
        writeln!(
            f,
            "totals: compute {:.6e} s, memory {:.6e} s, fixed {:.6e} s, quantum {:.6e} s",
            self.compute_seconds(),
            self.memory_seconds(),
            self.fixed_seconds(),
            self.quantum_seconds()
        )?;
        write!(f, "total: {:.6e} s", self.total_seconds())
    }
}

/// Evaluate `model`'s `main` kernel against the rates extracted from
/// `machine`.
pub fn evaluate_model(
    ast: &ModelAst,
    model: &str,
    machine: &str,
    overrides: &BTreeMap<String, f64>,
    opts: &EvalOptions,
) -> Result<TimingReport, EvalError> {
    let rates = extract_rates(ast, machine, opts)?;
    evaluate_model_with_rates(ast, model, &rates, overrides, opts)
}

/// Evaluate `model`'s `main` kernel with explicit machine rates.
///
/// Params are evaluated in declaration order; an override replaces a
/// param's expression, so later params see the supplied value. Every
/// override must name a declared param.
pub fn evaluate_model_with_rates(
    ast: &ModelAst,
    model: &str,
    rates: &MachineRates,
    overrides: &BTreeMap<String, f64>,
    opts: &EvalOptions,
) -> Result<TimingReport, EvalError> {
    let app = ast
        .find_model(model)
        .ok_or_else(|| EvalError::UnknownModel(model.to_string()))?;
    for name in overrides.keys() {
        if !app.has_param(name) {
            return Err(EvalError::UnknownOverride(name.clone()));
        }
    }

    let mut env: BTreeMap<String, f64> = BTreeMap::new();
    for (name, expr) in &app.params {
        let value = match overrides.get(name) {
            Some(v) => *v,
            None => eval_expr(expr, &env, opts)?,
        };
        env.insert(name.clone(), value);
    }

    let mut kernels: BTreeMap<&str, &super::ast::Kernel> = BTreeMap::new();
    for k in &app.kernels {
        if kernels.insert(k.name.as_str(), k).is_some() {
            return Err(EvalError::DuplicateKernel {
                model: model.to_string(),
                kernel: k.name.clone(),
            });
        }
    }
    if !kernels.contains_key("main") {
        return Err(EvalError::MissingMainKernel(model.to_string()));
    }

    let mut report = TimingReport {
        model: model.to_string(),
        entries: Vec::new(),
    };
    let ctx = EvalContext {
        app,
        rates,
        env: &env,
        opts,
        model_name: model,
    };
    ctx.run_kernel("main", 0, &kernels, &mut report)?;
    Ok(report)
}

struct EvalContext<'a> {
    app: &'a super::ast::AppModel,
    rates: &'a MachineRates,
    env: &'a BTreeMap<String, f64>,
    opts: &'a EvalOptions,
    model_name: &'a str,
}

impl<'a> EvalContext<'a> {
    fn run_kernel(
        &self,
        name: &str,
        depth: usize,
        kernels: &BTreeMap<&str, &super::ast::Kernel>,
        report: &mut TimingReport,
    ) -> Result<(), EvalError> {
        if depth > MAX_KERNEL_DEPTH {
            return Err(EvalError::RecursionLimit(name.to_string()));
        }
        let kernel = kernels.get(name).ok_or_else(|| EvalError::UnknownKernel {
            model: self.model_name.to_string(),
            kernel: name.to_string(),
        })?;
        for (index, item) in kernel.body.iter().enumerate() {
            match item {
                KernelItem::Call(callee) => {
                    self.run_kernel(callee, depth + 1, kernels, report)?;
                }
                KernelItem::Execute(block) => {
                    let count = eval_expr(&block.count, self.env, self.opts)?;
                    let block_name = block
                        .label
                        .clone()
                        .unwrap_or_else(|| format!("#{index}"));
                    for statement in &block.statements {
                        let entry = self.time_statement(statement, count, name, &block_name)?;
                        report.entries.push(entry);
                    }
                }
            }
        }
        Ok(())
    }

    fn check_data(&self, name: &str) -> Result<(), EvalError> {
        if self.app.data.iter().any(|d| d.name == name) {
            Ok(())
        } else {
            Err(EvalError::UndeclaredData(name.to_string()))
        }
    }

    fn time_statement(
        &self,
        statement: &super::ast::ResourceStatement,
        count: f64,
        kernel: &str,
        block: &str,
    ) -> Result<StatementTiming, EvalError> {
        let amount = eval_expr(&statement.amount, self.env, self.opts)?;
        let (category, seconds_once) = match &statement.kind {
            ResourceKind::Flops => {
                let rule = self
                    .rates
                    .resource("flops")
                    .ok_or_else(|| EvalError::MissingRate("flops".into()))?;
                (
                    Category::Compute,
                    rule.seconds(amount, &statement.traits, self.opts)?,
                )
            }
            ResourceKind::Custom(name) => {
                let rule = self
                    .rates
                    .resource(name)
                    .ok_or_else(|| EvalError::MissingRate(name.clone()))?;
                (
                    Category::Quantum,
                    rule.seconds(amount, &statement.traits, self.opts)?,
                )
            }
            ResourceKind::Loads | ResourceKind::Stores => {
                if let Some(name) = &statement.from {
                    self.check_data(name)?;
                }
                if let Some(name) = &statement.to {
                    self.check_data(name)?;
                }
                let bytes = match &statement.size {
                    Some(size) => amount * eval_expr(size, self.env, self.opts)?,
                    None => amount,
                };
                let bw = self
                    .rates
                    .memory_bytes_per_sec
                    .ok_or_else(|| EvalError::MissingRate(statement.kind.name().into()))?;
                (Category::Memory, bytes / bw)
            }
            ResourceKind::Intracomm => {
                let bytes = match &statement.size {
                    Some(size) => amount * eval_expr(size, self.env, self.opts)?,
                    None => amount,
                };
                let bw = self
                    .rates
                    .link_bytes_per_sec
                    .ok_or_else(|| EvalError::MissingRate("intracomm".into()))?;
                (Category::Memory, bytes / bw)
            }
            ResourceKind::Microseconds => (Category::Fixed, amount * 1e-6),
        };
        if seconds_once.is_nan() || seconds_once < 0.0 {
            return Err(EvalError::NegativeTime {
                resource: statement.kind.name().to_string(),
                seconds: seconds_once,
            });
        }
        Ok(StatementTiming {
            kernel: kernel.to_string(),
            block: block.to_string(),
            resource: statement.kind.name().to_string(),
            category,
            amount: amount * count,
            seconds: seconds_once * count,
        })
    }
}
