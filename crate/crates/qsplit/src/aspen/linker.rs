//! Include resolution and merging.
//!
//! Includes are loaded once each (keyed by the include string as written),
//! first from the search paths in order, then from the bundled catalog.
//! Merging rejects duplicate names per category, and every kernel call in
//! every model must resolve within that model once linking finishes.

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;

use thiserror::Error;

use super::ast::{KernelItem, ModelAst};
use super::bundle::bundled_include;
use super::parser::{parse, ParseError};

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("include `{path}` not found (searched: {})", searched.join(", "))]
    MissingInclude { path: String, searched: Vec<String> },
    #[error("{file}: {error}")]
    ParseInclude { file: String, error: ParseError },
    #[error("{file}: {message}")]
    Io { file: String, message: String },
    #[error("duplicate {category} definition `{name}`")]
    Duplicate {
        category: &'static str,
        name: String,
    },
    #[error("model `{model}` calls unknown kernel `{kernel}`")]
    UnresolvedKernel { model: String, kernel: String },
}

/// Resolve includes against `search_paths` (with the bundled catalog as a
/// fallback) and return the merged AST.
pub fn link(root: &ModelAst, search_paths: &[PathBuf]) -> Result<ModelAst, LinkError> {
    link_with_options(root, search_paths, true)
}

pub fn link_with_options(
    root: &ModelAst,
    search_paths: &[PathBuf],
    use_bundled: bool,
) -> Result<ModelAst, LinkError> {
    let mut merged = ModelAst::default();
    let mut queue: VecDeque<String> = VecDeque::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    merge_into(&mut merged, root)?;
    queue.extend(root.includes.iter().cloned());

    while let Some(path) = queue.pop_front() {
        if !seen.insert(path.clone()) {
            continue;
        }
        let text = load_include(&path, search_paths, use_bundled)?;
        let ast = parse(&text).map_err(|error| LinkError::ParseInclude {
            file: path.clone(),
            error,
        })?;
        merge_into(&mut merged, &ast)?;
        queue.extend(ast.includes.iter().cloned());
    }

    check_kernel_references(&merged)?;
    Ok(merged)
}

fn load_include(
    path: &str,
    search_paths: &[PathBuf],
    use_bundled: bool,
) -> Result<String, LinkError> {
    let mut searched = Vec::new();
    for dir in search_paths {
        let candidate = dir.join(path);
        searched.push(candidate.display().to_string());
        if candidate.is_file() {
            return std::fs::read_to_string(&candidate).map_err(|e| LinkError::Io {
                file: candidate.display().to_string(),
                message: e.to_string(),
            });
        }
    }
    if use_bundled {
        searched.push(format!("<bundled>/{path}"));
        if let Some(text) = bundled_include(path) {
            return Ok(text.to_string());
        }
    }
    Err(LinkError::MissingInclude {
        path: path.to_string(),
        searched,
    })
}

fn merge_into(merged: &mut ModelAst, ast: &ModelAst) -> Result<(), LinkError> {
    fn push_unique<T: Clone>(
        out: &mut Vec<T>,
        items: &[T],
        category: &'static str,
        name_of: impl Fn(&T) -> &str,
    ) -> Result<(), LinkError> {
        for item in items {
            if out.iter().any(|existing| name_of(existing) == name_of(item)) {
                return Err(LinkError::Duplicate {
                    category,
                    name: name_of(item).to_string(),
                });
            }
            out.push(item.clone());
        }
        Ok(())
    }

    push_unique(&mut merged.machines, &ast.machines, "machine", |d| &d.name)?;
    push_unique(&mut merged.nodes, &ast.nodes, "node", |d| &d.name)?;
    push_unique(&mut merged.sockets, &ast.sockets, "socket", |d| &d.name)?;
    push_unique(&mut merged.cores, &ast.cores, "core", |d| &d.name)?;
    push_unique(&mut merged.memories, &ast.memories, "memory", |d| &d.name)?;
    push_unique(&mut merged.links, &ast.links, "link", |d| &d.name)?;
    push_unique(&mut merged.models, &ast.models, "model", |d| &d.name)?;
    Ok(())
}

fn check_kernel_references(ast: &ModelAst) -> Result<(), LinkError> {
    for model in &ast.models {
        let mut names = BTreeSet::new();
        for kernel in &model.kernels {
            if !names.insert(kernel.name.as_str()) {
                return Err(LinkError::Duplicate {
                    category: "kernel",
                    name: format!("{}.{}", model.name, kernel.name),
                });
            }
        }
        for kernel in &model.kernels {
            for item in &kernel.body {
                if let KernelItem::Call(callee) = item {
                    if !names.contains(callee.as_str()) {
                        return Err(LinkError::UnresolvedKernel {
                            model: model.name.clone(),
                            kernel: callee.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
