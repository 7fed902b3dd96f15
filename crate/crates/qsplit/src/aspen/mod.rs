//! Parser, linker, printer and evaluator for the analytical
//! performance-model language.
//!
//! Machine models declare hardware (`machine`, `node`, `socket`, `core`,
//! `memory`, `link`) whose rates convert resources to time; application
//! models (`model`) declare parameters, data and kernels that consume
//! resources. Files use the `.aspen` extension and `//` line comments.
//!
//! # Grammar (EBNF)
//!
//! ```text
//! file        = { item } ;
//! item        = include | machine | node | socket | core | memory | link | model ;
//! include     = "include" rest-of-line ;
//! machine     = "machine" IDENT "{" { compref "nodes" } "}" ;
//! node        = "node" IDENT "{" { compref "sockets" } "}" ;
//! socket      = "socket" IDENT "{" { compref "cores" | IDENT "memory"
//!                                  | "linked" "with" IDENT } "}" ;
//! compref     = "[" expr "]" IDENT ;
//! core        = "core" IDENT "{" { resource } "}" ;
//! resource    = "resource" IDENT "(" IDENT ")" "[" expr "]"
//!               [ "with" IDENT "[" expr "]" { "," IDENT "[" expr "]" } ] ;
//! memory      = "memory" IDENT "{" { property } "}" ;
//! link        = "link" IDENT "{" { property } "}" ;
//! property    = "property" IDENT "[" expr "]" ;
//! model       = "model" IDENT "{" { param | data | kernel } "}" ;
//! param       = "param" IDENT "=" expr ;
//! data        = "data" IDENT "as" "Array" "(" expr "," expr ")" ;
//! kernel      = "kernel" IDENT "{" { IDENT | execute } "}" ;
//! execute     = "execute" [ IDENT ] "[" expr "]" "{" { statement } "}" ;
//! statement   = IDENT "[" expr "]" { clause } ;
//! clause      = "as" IDENT { "," IDENT } | "to" IDENT | "from" IDENT
//!             | "of" "size" "[" expr "]" ;
//! expr        = add ;
//! add         = mul { ("+" | "-") mul } ;
//! mul         = unary { ("*" | "/") unary } ;
//! unary       = "-" unary | power ;
//! power       = atom [ "^" unary ] ;
//! atom        = NUMBER | IDENT | IDENT "(" expr { "," expr } ")" | "(" expr ")" ;
//! ```
//!
//! # Units
//!
//! - `log` is the natural logarithm (configurable via [`EvalOptions`]).
//! - `Array(count, size)` declares `count` elements of `size` bytes.
//! - `loads`/`stores` amounts are bytes in the `from`/`to` forms; the
//!   `of size [s]` form moves `amount * s` bytes.
//! - `microseconds` amounts are microseconds; core resource formulas
//!   (e.g. `QuOps`) yield seconds.

pub mod ast;
pub mod bundle;
mod eval;
mod lexer;
mod linker;
mod parser;
mod printer;
mod rates;

pub use ast::ModelAst;
pub use eval::{
    eval_expr, evaluate_model, evaluate_model_with_rates, Category, EvalError, EvalOptions,
    LogMode, StatementTiming, TimingReport,
};
pub use linker::{link, link_with_options, LinkError};
pub use parser::{parse, ParseError};
pub use printer::{print, print_expr};
pub use rates::{extract_rates, MachineRates, ResourceRule};
