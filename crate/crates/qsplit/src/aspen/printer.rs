//! Canonical text form of a parsed model. `parse(print(ast))` yields an
//! AST equal to `ast`.

use std::fmt::Write;

use super::ast::*;

pub fn print(ast: &ModelAst) -> String {
    let mut out = String::new();
    for path in &ast.includes {
        let _ = writeln!(out, "include {path}");
    }
    if !ast.includes.is_empty() {
        out.push('\n');
    }
    for d in &ast.machines {
        let _ = writeln!(out, "machine {} {{", d.name);
        for r in &d.nodes {
            let _ = writeln!(out, "  [{}] {} nodes", print_expr(&r.count), r.name);
        }
        out.push_str("}\n\n");
    }
    for d in &ast.nodes {
        let _ = writeln!(out, "node {} {{", d.name);
        for r in &d.sockets {
            let _ = writeln!(out, "  [{}] {} sockets", print_expr(&r.count), r.name);
        }
        out.push_str("}\n\n");
    }
    for d in &ast.sockets {
        let _ = writeln!(out, "socket {} {{", d.name);
        for r in &d.cores {
            let _ = writeln!(out, "  [{}] {} cores", print_expr(&r.count), r.name);
        }
        if let Some(memory) = &d.memory {
            let _ = writeln!(out, "  {memory} memory");
        }
        if let Some(link) = &d.link {
            let _ = writeln!(out, "  linked with {link}");
        }
        out.push_str("}\n\n");
    }
    for d in &ast.cores {
        let _ = writeln!(out, "core {} {{", d.name);
        for r in &d.resources {
            let _ = write!(
                out,
                "  resource {}({}) [{}]",
                r.name,
                r.param,
                print_expr(&r.body)
            );
            if !r.traits.is_empty() {
                let rendered: Vec<String> = r
                    .traits
                    .iter()
                    .map(|(name, factor)| format!("{name} [{}]", print_expr(factor)))
                    .collect();
                let _ = write!(out, " with {}", rendered.join(", "));
            }
            out.push('\n');
        }
        out.push_str("}\n\n");
    }
    for d in &ast.memories {
        let _ = writeln!(out, "memory {} {{", d.name);
        for (name, value) in &d.properties {
            let _ = writeln!(out, "  property {name} [{}]", print_expr(value));
        }
        out.push_str("}\n\n");
    }
    for d in &ast.links {
        let _ = writeln!(out, "link {} {{", d.name);
        for (name, value) in &d.properties {
            let _ = writeln!(out, "  property {name} [{}]", print_expr(value));
        }
        out.push_str("}\n\n");
    }
    for m in &ast.models {
        let _ = writeln!(out, "model {} {{", m.name);
        for (name, value) in &m.params {
            let _ = writeln!(out, "  param {name} = {}", print_expr(value));
        }
        for d in &m.data {
            let _ = writeln!(
                out,
                "  data {} as Array({}, {})",
                d.name,
                print_expr(&d.element_count),
                print_expr(&d.element_size)
            );
        }
        for k in &m.kernels {
            let _ = writeln!(out, "  kernel {} {{", k.name);
            for item in &k.body {
                match item {
                    KernelItem::Call(name) => {
                        let _ = writeln!(out, "    {name}");
                    }
                    KernelItem::Execute(block) => {
                        match &block.label {
                            Some(label) => {
                                let _ = writeln!(
                                    out,
                                    "    execute {label} [{}] {{",
                                    print_expr(&block.count)
                                );
                            }
                            None => {
                                let _ =
                                    writeln!(out, "    execute [{}] {{", print_expr(&block.count));
                            }
                        }
                        for s in &block.statements {
                            let _ = write!(out, "      {} [{}]", s.kind.name(), print_expr(&s.amount));
                            if !s.traits.is_empty() {
                                let _ = write!(out, " as {}", s.traits.join(", "));
                            }
                            if let Some(from) = &s.from {
                                let _ = write!(out, " from {from}");
                            }
                            if let Some(to) = &s.to {
                                let _ = write!(out, " to {to}");
                            }
                            if let Some(size) = &s.size {
                                let _ = write!(out, " of size [{}]", print_expr(size));
                            }
                            out.push('\n');
                        }
                        out.push_str("    }\n");
                    }
                }
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n\n");
    }
    out
}

/// Precedence levels: add/sub 1, mul/div 2, unary minus 3, power 4, atoms 5.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, _, _) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, _, _) => 2,
        Expr::Neg(_) => 3,
        Expr::Binary(BinOp::Pow, _, _) => 4,
        Expr::Number(_) | Expr::Ident(_) | Expr::Call(_, _) => 5,
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let prec = precedence(e);
    let needs_parens = prec < min_prec;
    if needs_parens {
        out.push('(');
    }
    match e {
        Expr::Number(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Ident(name) => out.push_str(name),
        Expr::Neg(inner) => {
            out.push('-');
            write_expr(out, inner, 3);
        }
        Expr::Binary(op, lhs, rhs) => {
            let (symbol, left_min, right_min) = match op {
                BinOp::Add => (" + ", 1, 2),
                BinOp::Sub => (" - ", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                BinOp::Pow => ("^", 5, 4),
            };
            write_expr(out, lhs, left_min);
            out.push_str(symbol);
            write_expr(out, rhs, right_min);
        }
        Expr::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, arg, 0);
            }
            out.push(')');
        }
    }
    if needs_parens {
        out.push(')');
    }
}
