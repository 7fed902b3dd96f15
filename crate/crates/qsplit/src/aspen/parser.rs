//! Recursive-descent parser for the model language.

use std::fmt;

use thiserror::Error;

use super::ast::*;
use super::lexer::{LexError, Lexer, Token, TokenKind};

/// First syntax error, with location and an expected-token hint.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError {
            line: e.line,
            col: e.col,
            message: e.message,
        }
    }
}

pub fn parse(text: &str) -> Result<ModelAst, ParseError> {
    Parser::new(text)?.parse_file()
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Token,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(text);
        let lookahead = lexer.next_token()?;
        Ok(Parser { lexer, lookahead })
    }

    fn peek(&self) -> &TokenKind {
        &self.lookahead.kind
    }

    fn advance(&mut self) -> Result<Token, ParseError> {
        let next = self.lexer.next_token()?;
        Ok(std::mem::replace(&mut self.lookahead, next))
    }

    fn error_here(&self, message: impl fmt::Display) -> ParseError {
        ParseError {
            line: self.lookahead.line,
            col: self.lookahead.col,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, kind: TokenKind, context: &str) -> Result<Token, ParseError> {
        if self.lookahead.kind == kind {
            self.advance()
        } else {
            Err(self.error_here(format!(
                "expected {kind} {context}, found {}",
                self.lookahead.kind
            )))
        }
    }

    fn expect_ident(&mut self, context: &str) -> Result<String, ParseError> {
        match self.peek() {
            TokenKind::Ident(_) => {
                let token = self.advance()?;
                match token.kind {
                    TokenKind::Ident(name) => Ok(name),
                    _ => unreachable!(),
                }
            }
            other => Err(self.error_here(format!("expected identifier {context}, found {other}"))),
        }
    }

    fn expect_keyword(&mut self, word: &str, context: &str) -> Result<(), ParseError> {
        match self.peek() {
            TokenKind::Ident(name) if name == word => {
                self.advance()?;
                Ok(())
            }
            other => Err(self.error_here(format!("expected `{word}` {context}, found {other}"))),
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), TokenKind::Ident(name) if name == word)
    }

    fn parse_file(&mut self) -> Result<ModelAst, ParseError> {
        let mut ast = ModelAst::default();
        loop {
            match self.peek() {
                TokenKind::Eof => return Ok(ast),
                TokenKind::Ident(word) => match word.as_str() {
                    "include" => {
                        // the raw cursor sits right after the keyword, so the
                        // path is the remainder of the line; it must not go
                        // through the tokenizer
                        let (path, line, col) = self.lexer.take_rest_of_line();
                        if path.is_empty() {
                            return Err(ParseError {
                                line,
                                col,
                                message: "expected include path before end of line".into(),
                            });
                        }
                        ast.includes.push(path);
                        self.lookahead = self.lexer.next_token()?;
                    }
                    "machine" => {
                        let d = self.parse_machine()?;
                        ast.machines.push(d);
                    }
                    "node" => {
                        let d = self.parse_node()?;
                        ast.nodes.push(d);
                    }
                    "socket" => {
                        let d = self.parse_socket()?;
                        ast.sockets.push(d);
                    }
                    "core" => {
                        let d = self.parse_core()?;
                        ast.cores.push(d);
                    }
                    "memory" => {
                        let d = self.parse_memory()?;
                        ast.memories.push(d);
                    }
                    "link" => {
                        let d = self.parse_link()?;
                        ast.links.push(d);
                    }
                    "model" => {
                        let d = self.parse_model()?;
                        ast.models.push(d);
                    }
                    other => {
                        return Err(self.error_here(format!(
                            "expected a declaration keyword (include, machine, node, socket, \
                             core, memory, link, model), found `{other}`"
                        )))
                    }
                },
                other => {
                    return Err(
                        self.error_here(format!("expected a declaration keyword, found {other}"))
                    )
                }
            }
        }
    }

    fn parse_machine(&mut self) -> Result<MachineDecl, ParseError> {
        self.advance()?; // machine
        let name = self.expect_ident("after `machine`")?;
        self.expect(TokenKind::LBrace, "to open the machine body")?;
        let mut nodes = Vec::new();
        while self.peek() != &TokenKind::RBrace {
            nodes.push(self.parse_component_ref("nodes")?);
        }
        self.expect(TokenKind::RBrace, "to close the machine body")?;
        Ok(MachineDecl { name, nodes })
    }

    fn parse_node(&mut self) -> Result<NodeDecl, ParseError> {
        self.advance()?; // node
        let name = self.expect_ident("after `node`")?;
        self.expect(TokenKind::LBrace, "to open the node body")?;
        let mut sockets = Vec::new();
        while self.peek() != &TokenKind::RBrace {
            sockets.push(self.parse_component_ref("sockets")?);
        }
        self.expect(TokenKind::RBrace, "to close the node body")?;
        Ok(NodeDecl { name, sockets })
    }

    /// `[count] NAME trailer` where `trailer` is nodes/sockets/cores.
    fn parse_component_ref(&mut self, trailer: &str) -> Result<ComponentRef, ParseError> {
        self.expect(TokenKind::LBracket, "to open a component count")?;
        let count = self.parse_expr()?;
        self.expect(TokenKind::RBracket, "after the component count")?;
        let name = self.expect_ident("naming the component")?;
        self.expect_keyword(trailer, "after the component name")?;
        Ok(ComponentRef { count, name })
    }

    fn parse_socket(&mut self) -> Result<SocketDecl, ParseError> {
        self.advance()?; // socket
        let name = self.expect_ident("after `socket`")?;
        self.expect(TokenKind::LBrace, "to open the socket body")?;
        let mut decl = SocketDecl {
            name,
            cores: Vec::new(),
            memory: None,
            link: None,
        };
        loop {
            match self.peek() {
                TokenKind::RBrace => break,
                TokenKind::LBracket => decl.cores.push(self.parse_component_ref("cores")?),
                TokenKind::Ident(word) if word == "linked" => {
                    self.advance()?;
                    self.expect_keyword("with", "after `linked`")?;
                    decl.link = Some(self.expect_ident("naming the link")?);
                }
                TokenKind::Ident(_) => {
                    let mem = self.expect_ident("naming the memory")?;
                    self.expect_keyword("memory", "after the memory name")?;
                    decl.memory = Some(mem);
                }
                other => {
                    return Err(self.error_here(format!(
                        "expected a socket item ('[count] NAME cores', 'NAME memory' or \
                         'linked with NAME'), found {other}"
                    )))
                }
            }
        }
        self.expect(TokenKind::RBrace, "to close the socket body")?;
        Ok(decl)
    }

    fn parse_core(&mut self) -> Result<CoreDecl, ParseError> {
        self.advance()?; // core
        let name = self.expect_ident("after `core`")?;
        self.expect(TokenKind::LBrace, "to open the core body")?;
        let mut resources = Vec::new();
        while self.peek() != &TokenKind::RBrace {
            self.expect_keyword("resource", "to start a core item")?;
            let res_name = self.expect_ident("naming the resource")?;
            self.expect(TokenKind::LParen, "after the resource name")?;
            let param = self.expect_ident("naming the resource parameter")?;
            self.expect(TokenKind::RParen, "after the resource parameter")?;
            self.expect(TokenKind::LBracket, "to open the resource formula")?;
            let body = self.parse_expr()?;
            self.expect(TokenKind::RBracket, "to close the resource formula")?;
            let mut traits = Vec::new();
            if self.at_keyword("with") {
                self.advance()?;
                loop {
                    let trait_name = self.expect_ident("naming a trait")?;
                    self.expect(TokenKind::LBracket, "to open the trait factor")?;
                    let factor = self.parse_expr()?;
                    self.expect(TokenKind::RBracket, "to close the trait factor")?;
                    traits.push((trait_name, factor));
                    if self.peek() == &TokenKind::Comma {
                        self.advance()?;
                    } else {
                        break;
                    }
                }
            }
            resources.push(ResourceDecl {
                name: res_name,
                param,
                body,
                traits,
            });
        }
        self.expect(TokenKind::RBrace, "to close the core body")?;
        Ok(CoreDecl { name, resources })
    }

    fn parse_properties(&mut self, what: &str) -> Result<Vec<(String, Expr)>, ParseError> {
        let mut properties = Vec::new();
        while self.peek() != &TokenKind::RBrace {
            self.expect_keyword("property", &format!("to start a {what} item"))?;
            let name = self.expect_ident("naming the property")?;
            self.expect(TokenKind::LBracket, "to open the property value")?;
            let value = self.parse_expr()?;
            self.expect(TokenKind::RBracket, "to close the property value")?;
            properties.push((name, value));
        }
        Ok(properties)
    }

    fn parse_memory(&mut self) -> Result<MemoryDecl, ParseError> {
        self.advance()?; // memory
        let name = self.expect_ident("after `memory`")?;
        self.expect(TokenKind::LBrace, "to open the memory body")?;
        let properties = self.parse_properties("memory")?;
        self.expect(TokenKind::RBrace, "to close the memory body")?;
        Ok(MemoryDecl { name, properties })
    }

    fn parse_link(&mut self) -> Result<LinkDecl, ParseError> {
        self.advance()?; // link
        let name = self.expect_ident("after `link`")?;
        self.expect(TokenKind::LBrace, "to open the link body")?;
        let properties = self.parse_properties("link")?;
        self.expect(TokenKind::RBrace, "to close the link body")?;
        Ok(LinkDecl { name, properties })
    }

    fn parse_model(&mut self) -> Result<AppModel, ParseError> {
        self.advance()?; // model
        let name = self.expect_ident("after `model`")?;
        self.expect(TokenKind::LBrace, "to open the model body")?;
        let mut model = AppModel {
            name,
            params: Vec::new(),
            data: Vec::new(),
            kernels: Vec::new(),
        };
        loop {
            match self.peek() {
                TokenKind::RBrace => break,
                TokenKind::Ident(word) => match word.as_str() {
                    "param" => {
                        self.advance()?;
                        let pname = self.expect_ident("after `param`")?;
                        self.expect(TokenKind::Equals, "after the param name")?;
                        let value = self.parse_expr()?;
                        model.params.push((pname, value));
                    }
                    "data" => {
                        self.advance()?;
                        let dname = self.expect_ident("after `data`")?;
                        self.expect_keyword("as", "after the data name")?;
                        self.expect_keyword("Array", "declaring the data shape")?;
                        self.expect(TokenKind::LParen, "after `Array`")?;
                        let element_count = self.parse_expr()?;
                        self.expect(TokenKind::Comma, "between Array arguments")?;
                        let element_size = self.parse_expr()?;
                        self.expect(TokenKind::RParen, "to close `Array(...)`")?;
                        model.data.push(DataDecl {
                            name: dname,
                            element_count,
                            element_size,
                        });
                    }
                    "kernel" => {
                        let k = self.parse_kernel()?;
                        model.kernels.push(k);
                    }
                    other => {
                        return Err(self.error_here(format!(
                            "expected `param`, `data` or `kernel` in the model body, \
                             found `{other}`"
                        )))
                    }
                },
                other => {
                    return Err(self
                        .error_here(format!("expected a model item or '}}', found {other}")))
                }
            }
        }
        self.expect(TokenKind::RBrace, "to close the model body")?;
        Ok(model)
    }

    fn parse_kernel(&mut self) -> Result<Kernel, ParseError> {
        self.advance()?; // kernel
        let name = self.expect_ident("after `kernel`")?;
        self.expect(TokenKind::LBrace, "to open the kernel body")?;
        let mut body = Vec::new();
        loop {
            match self.peek() {
                TokenKind::RBrace => break,
                TokenKind::Ident(word) if word == "execute" => {
                    self.advance()?;
                    let label = match self.peek() {
                        TokenKind::Ident(_) => Some(self.expect_ident("as the block label")?),
                        _ => None,
                    };
                    self.expect(TokenKind::LBracket, "to open the execute count")?;
                    let count = self.parse_expr()?;
                    self.expect(TokenKind::RBracket, "after the execute count")?;
                    self.expect(TokenKind::LBrace, "to open the execute block")?;
                    let mut statements = Vec::new();
                    while self.peek() != &TokenKind::RBrace {
                        statements.push(self.parse_statement()?);
                    }
                    self.expect(TokenKind::RBrace, "to close the execute block")?;
                    body.push(KernelItem::Execute(ExecuteBlock {
                        label,
                        count,
                        statements,
                    }));
                }
                TokenKind::Ident(_) => {
                    let callee = self.expect_ident("as a kernel call")?;
                    body.push(KernelItem::Call(callee));
                }
                other => {
                    return Err(self.error_here(format!(
                        "expected a kernel call, `execute` or '}}', found {other}"
                    )))
                }
            }
        }
        self.expect(TokenKind::RBrace, "to close the kernel body")?;
        Ok(Kernel { name, body })
    }

    fn parse_statement(&mut self) -> Result<ResourceStatement, ParseError> {
        let kind_name = self.expect_ident("naming a resource kind")?;
        let kind = ResourceKind::from_name(&kind_name);
        self.expect(TokenKind::LBracket, "to open the resource amount")?;
        let amount = self.parse_expr()?;
        self.expect(TokenKind::RBracket, "to close the resource amount")?;
        let mut statement = ResourceStatement {
            kind,
            amount,
            traits: Vec::new(),
            to: None,
            from: None,
            size: None,
        };
        loop {
            match self.peek() {
                TokenKind::Ident(word) if word == "as" => {
                    self.advance()?;
                    loop {
                        statement.traits.push(self.expect_ident("naming a trait")?);
                        if self.peek() == &TokenKind::Comma {
                            self.advance()?;
                        } else {
                            break;
                        }
                    }
                }
                TokenKind::Ident(word) if word == "to" => {
                    self.advance()?;
                    statement.to = Some(self.expect_ident("naming the target data")?);
                }
                TokenKind::Ident(word) if word == "from" => {
                    self.advance()?;
                    statement.from = Some(self.expect_ident("naming the source data")?);
                }
                TokenKind::Ident(word) if word == "of" => {
                    self.advance()?;
                    self.expect_keyword("size", "after `of`")?;
                    self.expect(TokenKind::LBracket, "to open the size expression")?;
                    statement.size = Some(self.parse_expr()?);
                    self.expect(TokenKind::RBracket, "to close the size expression")?;
                }
                _ => break,
            }
        }
        Ok(statement)
    }

    // expression grammar, lowest to highest precedence:
    //   add := mul (('+' | '-') mul)*
    //   mul := unary (('*' | '/') unary)*
    //   unary := '-' unary | power
    //   power := atom ('^' unary)?      (right associative)
    //   atom := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
    pub(super) fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        self.parse_add()
    }

    fn parse_add(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_mul()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.parse_mul()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn parse_mul(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.parse_unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &TokenKind::Minus {
            self.advance()?;
            let inner = self.parse_unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_atom()?;
        if self.peek() == &TokenKind::Caret {
            self.advance()?;
            let exponent = self.parse_unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            TokenKind::Number(v) => {
                self.advance()?;
                Ok(Expr::Number(v))
            }
            TokenKind::Ident(name) => {
                self.advance()?;
                if self.peek() == &TokenKind::LParen {
                    self.advance()?;
                    let mut args = vec![self.parse_expr()?];
                    while self.peek() == &TokenKind::Comma {
                        self.advance()?;
                        args.push(self.parse_expr()?);
                    }
                    self.expect(TokenKind::RParen, "to close the call arguments")?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            TokenKind::LParen => {
                self.advance()?;
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen, "to close the parenthesized expression")?;
                Ok(inner)
            }
            other => Err(self.error_here(format!(
                "expected a number, identifier or '(' in the expression, found {other}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_model() {
        let ast = parse("model X { param A = 1 + 2*3 kernel main { execute [1] { microseconds [7] } } }")
            .unwrap();
        assert_eq!(ast.models.len(), 1);
        let m = &ast.models[0];
        assert_eq!(m.params.len(), 1);
        assert_eq!(m.kernels.len(), 1);
    }

    #[test]
    fn reports_error_position_and_hint() {
        let err = parse("model X { param =").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 17);
        assert!(err.message.contains("expected identifier"), "{}", err.message);
    }

    #[test]
    fn parses_statement_clauses() {
        let ast = parse(
            "model X {\n\
             data Input as Array((4*4), 4)\n\
             kernel main { execute embed [2] {\n\
               loads [16] from Input\n\
               flops [100] as sp, simd\n\
               stores [3] of size [4*5]\n\
               intracomm [8] as copyout\n\
             } }\n}",
        )
        .unwrap();
        let kernel = ast.models[0].kernel("main").unwrap();
        let block = match &kernel.body[0] {
            KernelItem::Execute(b) => b,
            _ => panic!("expected execute"),
        };
        assert_eq!(block.label.as_deref(), Some("embed"));
        assert_eq!(block.statements.len(), 4);
        assert_eq!(block.statements[0].from.as_deref(), Some("Input"));
        assert_eq!(block.statements[1].traits, vec!["sp", "simd"]);
        assert!(block.statements[2].size.is_some());
        assert_eq!(block.statements[3].kind, ResourceKind::Intracomm);
    }

    #[test]
    fn power_binds_tighter_than_mul() {
        let ast = parse("model X { param A = 2*3^2 kernel main { } }").unwrap();
        let (_, expr) = &ast.models[0].params[0];
        assert_eq!(
            expr,
            &Expr::binary(
                BinOp::Mul,
                Expr::Number(2.0),
                Expr::binary(BinOp::Pow, Expr::Number(3.0), Expr::Number(2.0)),
            )
        );
    }

    #[test]
    fn unknown_top_level_keyword_is_an_error() {
        let err = parse("widget X {}").unwrap_err();
        assert!(err.message.contains("declaration keyword"));
    }
}
