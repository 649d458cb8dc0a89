//! Scalar expressions over named coordinates.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?        // right-associative
//! atom  := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Evaluation runs on [`Jet`]s so derivatives flow through every node.

use std::fmt;

use thiserror::Error;

use crate::fieldcore::Jet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function \"{name}\" at byte {offset} (known: {known})")]
    UnknownFunction { name: String, offset: usize, known: String },
    #[error("function {name} takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("unknown identifier \"{name}\" (known: {known})")]
    UnknownVariable { name: String, known: String },
    #[error("expression is not finite at the evaluation point")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
    Pow,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sqrt,
        Func::Pow,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Pow => "pow",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn known() -> String {
        Func::ALL.map(|f| f.name()).join(", ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(&self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Expression tree. Numeric literals are nonnegative; negation is a node.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Var(String),
    Neg(Box<ExprAst>),
    Bin(BinOp, Box<ExprAst>, Box<ExprAst>),
    Call(Func, Vec<ExprAst>),
}

/// Fully parenthesised rendering that parses back to the same tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Num(v) => write!(f, "{v:?}"),
            ExprAst::Var(name) => write!(f, "{name}"),
            ExprAst::Neg(inner) => write!(f, "(-{inner})"),
            ExprAst::Bin(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            ExprAst::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("malformed number \"{lit}\""),
            })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(text[start..i].to_string())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                ',' => Token::Comma,
                _ => {
                    return Err(ExprError::Syntax {
                        offset: start,
                        message: format!("unexpected character '{c}'"),
                    })
                }
            };
            out.push((start, tok));
            i += c.len_utf8();
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ExprAst::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = ExprAst::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprAst, ExprError> {
        if let Some(Token::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(ExprAst::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(ExprAst::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ExprError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(ExprAst::Num(v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.peek() != Some(&Token::LParen) {
                    return Ok(ExprAst::Var(name));
                }
                let func = Func::from_name(&name).ok_or_else(|| ExprError::UnknownFunction {
                    name: name.clone(),
                    offset,
                    known: Func::known(),
                })?;
                self.pos += 1;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(&Token::Comma) {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                self.expect(Token::RParen, "')' after arguments")?;
                if args.len() != func.arity() {
                    return Err(ExprError::Arity {
                        name: func.name().to_string(),
                        expected: func.arity(),
                        got: args.len(),
                    });
                }
                Ok(ExprAst::Call(func, args))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(tok) => self.syntax(format!("unexpected token {tok:?}")),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parse `text` into an expression tree.
pub fn parse_expr(text: &str) -> Result<ExprAst, ExprError> {
    if text.trim().is_empty() {
        return Err(ExprError::Empty);
    }
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let ast = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.syntax("trailing input");
    }
    Ok(ast)
}

/// Identifiers every expression may use without declaring them.
pub const BUILTIN_CONSTANTS: [(&str, f64); 1] = [("pi", std::f64::consts::PI)];

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// An expression with variables resolved to positional inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledExpr {
    ast: ExprAst,
    root: Node,
    arity: usize,
}

impl ExprAst {
    /// Resolve variable names against `names` (positional inputs).
    pub fn compile(&self, names: &[String]) -> Result<CompiledExpr, ExprError> {
        fn walk(e: &ExprAst, names: &[String]) -> Result<Node, ExprError> {
            Ok(match e {
                ExprAst::Num(v) => Node::Num(*v),
                ExprAst::Var(name) => match names.iter().position(|n| n == name) {
                    Some(i) => Node::Var(i),
                    None => match BUILTIN_CONSTANTS.iter().find(|(c, _)| c == name) {
                        Some((_, v)) => Node::Num(*v),
                        None => {
                            let mut known: Vec<&str> = names.iter().map(String::as_str).collect();
                            known.extend(BUILTIN_CONSTANTS.iter().map(|(c, _)| *c));
                            return Err(ExprError::UnknownVariable {
                                name: name.clone(),
                                known: known.join(", "),
                            });
                        }
                    },
                },
                ExprAst::Neg(a) => Node::Neg(Box::new(walk(a, names)?)),
                ExprAst::Bin(op, a, b) => {
                    Node::Bin(*op, Box::new(walk(a, names)?), Box::new(walk(b, names)?))
                }
                ExprAst::Call(f, args) => Node::Call(
                    *f,
                    args.iter().map(|a| walk(a, names)).collect::<Result<_, _>>()?,
                ),
            })
        }
        Ok(CompiledExpr {
            ast: self.clone(),
            root: walk(self, names)?,
            arity: names.len(),
        })
    }
}

impl CompiledExpr {
    pub fn parse(text: &str, names: &[String]) -> Result<CompiledExpr, ExprError> {
        parse_expr(text)?.compile(names)
    }

    pub fn ast(&self) -> &ExprAst {
        &self.ast
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluate on jets; `inputs[i]` feeds the i-th declared name.
    pub fn eval(&self, inputs: &[Jet]) -> Result<Jet, ExprError> {
        fn go(n: &Node, x: &[Jet]) -> Jet {
            match n {
                Node::Num(v) => Jet::constant(*v),
                Node::Var(i) => x[*i],
                Node::Neg(a) => -go(a, x),
                Node::Bin(op, a, b) => {
                    let (a, b) = (go(a, x), go(b, x));
                    match op {
                        BinOp::Add => a + b,
                        BinOp::Sub => a - b,
                        BinOp::Mul => a * b,
                        BinOp::Div => a / b,
                        BinOp::Pow => a.pow(&b),
                    }
                }
                Node::Call(f, args) => {
                    let a = go(&args[0], x);
                    match f {
                        Func::Exp => a.exp(),
                        Func::Log => a.ln(),
                        Func::Sin => a.sin(),
                        Func::Cos => a.cos(),
                        Func::Sinh => a.sinh(),
                        Func::Cosh => a.cosh(),
                        Func::Tanh => a.tanh(),
                        Func::Sqrt => a.sqrt(),
                        Func::Pow => a.pow(&go(&args[1], x)),
                    }
                }
            }
        }
        assert_eq!(inputs.len(), self.arity, "expression arity mismatch");
        let out = go(&self.root, inputs);
        let finite = out.value.is_finite()
            && out.grad.iter().all(|g| g.is_finite())
            && out.hess.iter().flatten().all(|h| h.is_finite());
        if finite {
            Ok(out)
        } else {
            Err(ExprError::NonFinite)
        }
    }

    pub fn eval_f64(&self, inputs: &[f64]) -> Result<f64, ExprError> {
        let jets: Vec<Jet> = inputs.iter().map(|&v| Jet::constant(v)).collect();
        Ok(self.eval(&jets)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exp_call() {
        assert_eq!(
            parse_expr("exp(t)").unwrap(),
            ExprAst::Call(Func::Exp, vec![ExprAst::Var("t".into())])
        );
    }

    #[test]
    fn polynomial_jets() {
        let e = CompiledExpr::parse("2*t^2+1", &names(&["t"])).unwrap();
        let j = e.eval(&[Jet::variable(3.0, 0)]).unwrap();
        assert_eq!((j.value, j.grad[0], j.hess[0][0]), (19.0, 12.0, 4.0));
    }

    #[test]
    fn unknown_function_is_named() {
        match parse_expr("foo(t)") {
            Err(ExprError::UnknownFunction { name, offset, .. }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn precedence_rules() {
        let e = CompiledExpr::parse("-t^2", &names(&["t"])).unwrap();
        assert_eq!(e.eval_f64(&[3.0]).unwrap(), -9.0);
        let e = CompiledExpr::parse("2^3^2", &[]).unwrap();
        assert_eq!(e.eval_f64(&[]).unwrap(), 512.0);
        let e = CompiledExpr::parse("1-2-3", &[]).unwrap();
        assert_eq!(e.eval_f64(&[]).unwrap(), -4.0);
        let e = CompiledExpr::parse("8/4/2", &[]).unwrap();
        assert_eq!(e.eval_f64(&[]).unwrap(), 1.0);
        let e = CompiledExpr::parse("2*-3", &[]).unwrap();
        assert_eq!(e.eval_f64(&[]).unwrap(), -6.0);
    }

    #[test]
    fn errors_carry_offsets() {
        assert!(matches!(parse_expr("1 +"), Err(ExprError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_expr("(t"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("t $ 2"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("  "), Err(ExprError::Empty)));
        assert!(matches!(parse_expr("pow(t)"), Err(ExprError::Arity { expected: 2, got: 1, .. })));
    }

    #[test]
    fn unknown_variable_lists_known_names() {
        match CompiledExpr::parse("t + y", &names(&["t", "x1"])) {
            Err(ExprError::UnknownVariable { name, known }) => {
                assert_eq!(name, "y");
                assert!(known.contains("t") && known.contains("x1"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        for text in ["exp(t)*cosh(x1)^2 - 3/t", "-(-t)", "pow(t, 2.5e-3) + pi", "sqrt(t)^-1"] {
            let ast = parse_expr(text).unwrap();
            assert_eq!(parse_expr(&ast.to_string()).unwrap(), ast);
        }
    }

    #[test]
    fn non_finite_is_reported() {
        let e = CompiledExpr::parse("log(t)", &names(&["t"])).unwrap();
        assert_eq!(e.eval_f64(&[-1.0]), Err(ExprError::NonFinite));
    }
}
