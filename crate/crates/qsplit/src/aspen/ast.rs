//! Syntax tree for the performance-model language.

/// Arithmetic expression over literals, identifiers, `+ - * / ^`, unary
/// minus, calls and parentheses.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Ident(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl Expr {
    pub fn number(v: f64) -> Expr {
        Expr::Number(v)
    }

    pub fn ident(name: &str) -> Expr {
        Expr::Ident(name.to_string())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }
}

/// A counted reference to another component, e.g. `[1] SIMPLE nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRef {
    pub count: Expr,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineDecl {
    pub name: String,
    pub nodes: Vec<ComponentRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeDecl {
    pub name: String,
    pub sockets: Vec<ComponentRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocketDecl {
    pub name: String,
    pub cores: Vec<ComponentRef>,
    pub memory: Option<String>,
    pub link: Option<String>,
}

/// `resource NAME(param) [body] with trait [factor], …`
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceDecl {
    pub name: String,
    pub param: String,
    pub body: Expr,
    pub traits: Vec<(String, Expr)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreDecl {
    pub name: String,
    pub resources: Vec<ResourceDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryDecl {
    pub name: String,
    pub properties: Vec<(String, Expr)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkDecl {
    pub name: String,
    pub properties: Vec<(String, Expr)>,
}

/// `data NAME as Array(element_count, element_size_bytes)`
#[derive(Debug, Clone, PartialEq)]
pub struct DataDecl {
    pub name: String,
    pub element_count: Expr,
    pub element_size: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceKindTag {
    Flops,
    Loads,
    Stores,
    Microseconds,
    Intracomm,
    Custom,
}

/// Resource kind of a statement; anything outside the built-in set is a
/// named core resource (e.g. `QuOps`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResourceKind {
    Flops,
    Loads,
    Stores,
    Microseconds,
    Intracomm,
    Custom(String),
}

impl ResourceKind {
    pub fn from_name(name: &str) -> ResourceKind {
        match name {
            "flops" => ResourceKind::Flops,
            "loads" => ResourceKind::Loads,
            "stores" => ResourceKind::Stores,
            "microseconds" => ResourceKind::Microseconds,
            "intracomm" => ResourceKind::Intracomm,
            _ => ResourceKind::Custom(name.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ResourceKind::Flops => "flops",
            ResourceKind::Loads => "loads",
            ResourceKind::Stores => "stores",
            ResourceKind::Microseconds => "microseconds",
            ResourceKind::Intracomm => "intracomm",
            ResourceKind::Custom(name) => name,
        }
    }

    pub fn tag(&self) -> ResourceKindTag {
        match self {
            ResourceKind::Flops => ResourceKindTag::Flops,
            ResourceKind::Loads => ResourceKindTag::Loads,
            ResourceKind::Stores => ResourceKindTag::Stores,
            ResourceKind::Microseconds => ResourceKindTag::Microseconds,
            ResourceKind::Intracomm => ResourceKindTag::Intracomm,
            ResourceKind::Custom(_) => ResourceKindTag::Custom,
        }
    }
}

/// One resource consumption statement inside an execute block.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceStatement {
    pub kind: ResourceKind,
    pub amount: Expr,
    pub traits: Vec<String>,
    pub to: Option<String>,
    pub from: Option<String>,
    /// the `of size [expr]` form
    pub size: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecuteBlock {
    pub label: Option<String>,
    pub count: Expr,
    pub statements: Vec<ResourceStatement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelItem {
    Call(String),
    Execute(ExecuteBlock),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub name: String,
    pub body: Vec<KernelItem>,
}

/// An application model: ordered params, data declarations and kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct AppModel {
    pub name: String,
    pub params: Vec<(String, Expr)>,
    pub data: Vec<DataDecl>,
    pub kernels: Vec<Kernel>,
}

impl AppModel {
    pub fn kernel(&self, name: &str) -> Option<&Kernel> {
        self.kernels.iter().find(|k| k.name == name)
    }

    pub fn has_param(&self, name: &str) -> bool {
        self.params.iter().any(|(p, _)| p == name)
    }
}

/// Parsed (and possibly linked) contents of one or more model files.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelAst {
    pub includes: Vec<String>,
    pub machines: Vec<MachineDecl>,
    pub nodes: Vec<NodeDecl>,
    pub sockets: Vec<SocketDecl>,
    pub cores: Vec<CoreDecl>,
    pub memories: Vec<MemoryDecl>,
    pub links: Vec<LinkDecl>,
    pub models: Vec<AppModel>,
}

impl ModelAst {
    pub fn find_machine(&self, name: &str) -> Option<&MachineDecl> {
        self.machines.iter().find(|d| d.name == name)
    }

    pub fn find_node(&self, name: &str) -> Option<&NodeDecl> {
        self.nodes.iter().find(|d| d.name == name)
    }

    pub fn find_socket(&self, name: &str) -> Option<&SocketDecl> {
        self.sockets.iter().find(|d| d.name == name)
    }

    pub fn find_core(&self, name: &str) -> Option<&CoreDecl> {
        self.cores.iter().find(|d| d.name == name)
    }

    pub fn find_memory(&self, name: &str) -> Option<&MemoryDecl> {
        self.memories.iter().find(|d| d.name == name)
    }

    pub fn find_link(&self, name: &str) -> Option<&LinkDecl> {
        self.links.iter().find(|d| d.name == name)
    }

    pub fn find_model(&self, name: &str) -> Option<&AppModel> {
        self.models.iter().find(|d| d.name == name)
    }
}
