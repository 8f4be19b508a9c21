//! Recursive-descent parser for the model text format.
//!
//! ```text
//! domain n : int 0..2;
//! domain wq : list int 0..1 maxlen 2;
//! actions rq, go, out;
//! automaton Gate {
//!   sync rq, go, out;
//!   location C { initial when wq == []; invariant n == 0;
//!     edge rq when wq' == wq ++ [id'] goto C; }
//! }
//! composition Main = sync {rq} (A || B) || Gate;
//! ```
//!
//! Identifiers inside predicates resolve to declared variables first and
//! to location names otherwise. Declarations may appear in any order.

use std::collections::{BTreeSet, HashSet};

use super::automaton::{Action, Automaton, Edge, Location, TAU};
use super::composition::Composition;
use super::domain::{Domain, DomainSpec};
use super::predicate::{Expr, Predicate, VarRef};
use super::value::Value;
use super::{Model, ModelError, ParseError, Pos};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String, bool),
    Int(i64),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
}

const SYMBOLS: [&str; 18] = [
    "==", "<=", "..", "++", "&&", "||", "{", "}", "(", ")", "[", "]", ";", ",", ":", "=", "+", "-",
];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for k in 0..n {
            if chars[*i + k] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        }
        *i += n;
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut n = 0;
            while start + n < chars.len()
                && (chars[start + n].is_ascii_alphanumeric() || chars[start + n] == '_')
            {
                n += 1;
            }
            let name: String = chars[start..start + n].iter().collect();
            let primed = chars.get(start + n) == Some(&'\'');
            advance(&mut i, &mut line, &mut col, n + usize::from(primed));
            out.push(Token {
                tok: Tok::Ident(name, primed),
                pos,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            let mut n = 0;
            while start + n < chars.len() && chars[start + n].is_ascii_digit() {
                n += 1;
            }
            let digits: String = chars[start..start + n].iter().collect();
            let value = digits
                .parse::<i64>()
                .map_err(|_| syntax(pos, format!("integer `{digits}` out of range")))?;
            advance(&mut i, &mut line, &mut col, n);
            out.push(Token {
                tok: Tok::Int(value),
                pos,
            });
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| syntax(pos, format!("unexpected character `{c}`")))?;
            advance(&mut i, &mut line, &mut col, sym.len());
            out.push(Token {
                tok: Tok::Sym(sym),
                pos,
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError {
        pos: Some(pos),
        error: ModelError::Syntax(msg.into()),
    }
}

fn at(pos: Pos, error: ModelError) -> ParseError {
    ParseError {
        pos: Some(pos),
        error,
    }
}

enum CompAst {
    Name(String, Pos),
    Par(Box<CompAst>, Box<CompAst>),
    Sync(BTreeSet<String>, Box<CompAst>),
}

struct Parser {
    toks: Vec<Token>,
    idx: usize,
    vars: HashSet<String>,
    locations: HashSet<String>,
    actions: HashSet<String>,
    automaton_names: HashSet<String>,
    // Predicates whose kinds are checked once all domains are known.
    pending: Vec<(Pos, Predicate)>,
}

/// Parses model text, resolving every cross-reference.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        vars: HashSet::new(),
        locations: HashSet::new(),
        actions: HashSet::new(),
        automaton_names: HashSet::new(),
        pending: Vec::new(),
        toks,
        idx: 0,
    };
    p.prescan();
    p.model()
}

impl Parser {
    /// Collects declared names so that declarations can follow their uses.
    fn prescan(&mut self) {
        let mut i = 0;
        while i + 1 < self.toks.len() {
            // Location domains name locations too, possibly ones no
            // automaton declares (pointer domains of linearized models).
            if self.toks[i].tok == Tok::Ident("loc".into(), false)
                && self.toks[i + 1].tok == Tok::Sym("{")
            {
                let mut j = i + 2;
                while let Tok::Ident(l, false) = &self.toks[j].tok {
                    self.locations.insert(l.clone());
                    if self.toks[j + 1].tok != Tok::Sym(",") {
                        break;
                    }
                    j += 2;
                }
            }
            if let (Tok::Ident(kw, false), Tok::Ident(name, _)) =
                (&self.toks[i].tok, &self.toks[i + 1].tok)
            {
                match kw.as_str() {
                    "domain" => {
                        self.vars.insert(name.clone());
                    }
                    "location" => {
                        self.locations.insert(name.clone());
                    }
                    "automaton" => {
                        self.automaton_names.insert(name.clone());
                    }
                    "actions" => {
                        let mut j = i + 1;
                        while let Tok::Ident(a, _) = &self.toks[j].tok {
                            self.actions.insert(a.clone());
                            if self.toks[j + 1].tok != Tok::Sym(",") {
                                break;
                            }
                            j += 2;
                        }
                    }
                    _ => {}
                }
            }
            i += 1;
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.idx].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.idx + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.idx].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x, false) if x == kw)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(syntax(
                self.pos(),
                format!("expected `{s}`, found {}", describe(self.peek())),
            ))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.pos(),
                format!("expected `{kw}`, found {}", describe(self.peek())),
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name, false) => {
                let pos = self.pos();
                self.bump();
                Ok((name, pos))
            }
            other => Err(syntax(
                self.pos(),
                format!("expected identifier, found {}", describe(&other)),
            )),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat_sym("-");
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(if neg { -i } else { i })
            }
            other => Err(syntax(
                self.pos(),
                format!("expected integer, found {}", describe(&other)),
            )),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.eat_sym(",") {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn model(&mut self) -> Result<Model, ParseError> {
        let mut actions: Vec<String> = Vec::new();
        let mut domains: Vec<(String, Domain)> = Vec::new();
        let mut automata: Vec<Automaton> = Vec::new();
        let mut composition: Option<(String, CompAst, Pos)> = None;
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(kw, false) if kw == "domain" => {
                    self.bump();
                    let (name, npos) = self.ident()?;
                    if domains.iter().any(|(n, _)| *n == name) {
                        return Err(at(
                            npos,
                            ModelError::Duplicate {
                                what: "variable",
                                name,
                            },
                        ));
                    }
                    self.expect_sym(":")?;
                    let d = self.domain()?;
                    self.expect_sym(";")?;
                    domains.push((name, d));
                }
                Tok::Ident(kw, false) if kw == "actions" => {
                    self.bump();
                    for (a, apos) in self.ident_list()? {
                        if a == TAU {
                            return Err(at(apos, ModelError::TauInSync));
                        }
                        if actions.contains(&a) {
                            return Err(at(
                                apos,
                                ModelError::Duplicate {
                                    what: "action",
                                    name: a,
                                },
                            ));
                        }
                        actions.push(a);
                    }
                    self.expect_sym(";")?;
                }
                Tok::Ident(kw, false) if kw == "automaton" => {
                    self.bump();
                    let a = self.automaton()?;
                    if automata.iter().any(|x| x.name == a.name) {
                        return Err(at(
                            pos,
                            ModelError::Duplicate {
                                what: "automaton",
                                name: a.name,
                            },
                        ));
                    }
                    automata.push(a);
                }
                Tok::Ident(kw, false) if kw == "composition" => {
                    self.bump();
                    if composition.is_some() {
                        return Err(syntax(pos, "only one composition may be declared"));
                    }
                    let (name, _) = self.ident()?;
                    self.expect_sym("=")?;
                    let ast = self.comp()?;
                    self.expect_sym(";")?;
                    composition = Some((name, ast, pos));
                }
                other => {
                    return Err(syntax(
                        pos,
                        format!(
                            "expected `domain`, `actions`, `automaton` or `composition`, found {}",
                            describe(&other)
                        ),
                    ))
                }
            }
        }

        let spec = DomainSpec::new(domains);
        let kind_of = |n: &str| spec.kind_of(n);
        for (pos, pred) in &self.pending {
            pred.check_kinds(&kind_of)
                .map_err(|m| at(*pos, ModelError::IllKinded(m)))?;
        }

        let composition = match composition {
            None => None,
            Some((name, ast, _)) => {
                let mut used = HashSet::new();
                Some((name, build_comp(&ast, &automata, &mut used)?))
            }
        };
        let model = Model {
            actions,
            domains: spec,
            automata,
            composition,
        };
        model.validate()?;
        Ok(model)
    }

    fn domain(&mut self) -> Result<Domain, ParseError> {
        let pos = self.pos();
        let (kw, _) = self.ident()?;
        match kw.as_str() {
            "int" => {
                let lo = self.int()?;
                self.expect_sym("..")?;
                let hi = self.int()?;
                if lo > hi {
                    return Err(at(
                        pos,
                        ModelError::InvalidDomain(format!("empty range {lo}..{hi}")),
                    ));
                }
                Ok(Domain::Int { lo, hi })
            }
            "bool" => Ok(Domain::Bool),
            "list" => {
                let elem = self.domain()?;
                self.expect_kw("maxlen")?;
                let n = self.int()?;
                if n < 0 {
                    return Err(at(
                        pos,
                        ModelError::InvalidDomain("negative maximum length".into()),
                    ));
                }
                Ok(Domain::List {
                    elem: Box::new(elem),
                    max_len: n as usize,
                })
            }
            "loc" => {
                self.expect_sym("{")?;
                let mut locs = Vec::new();
                if !self.is_sym("}") {
                    for (l, lpos) in self.ident_list()? {
                        if locs.contains(&l) {
                            return Err(at(
                                lpos,
                                ModelError::Duplicate {
                                    what: "location in domain",
                                    name: l,
                                },
                            ));
                        }
                        locs.push(l);
                    }
                }
                self.expect_sym("}")?;
                Ok(Domain::Loc(locs))
            }
            other => Err(syntax(pos, format!("unknown domain `{other}`"))),
        }
    }

    fn automaton(&mut self) -> Result<Automaton, ParseError> {
        let (name, _) = self.ident()?;
        self.expect_sym("{")?;
        let mut sync = BTreeSet::new();
        let mut locations: Vec<Location> = Vec::new();
        let mut edges: Vec<(Edge, Pos)> = Vec::new();
        while !self.eat_sym("}") {
            let pos = self.pos();
            if self.is_kw("sync") {
                self.bump();
                for (a, apos) in self.ident_list()? {
                    self.check_sync_action(&a, apos)?;
                    sync.insert(a);
                }
                self.expect_sym(";")?;
            } else if self.is_kw("location") {
                self.bump();
                let (loc, lpos) = self.ident()?;
                if locations.iter().any(|l| l.name == loc) {
                    return Err(at(
                        lpos,
                        ModelError::Duplicate {
                            what: "location",
                            name: loc,
                        },
                    ));
                }
                let (location, mut loc_edges) = self.location(loc)?;
                locations.push(location);
                edges.append(&mut loc_edges);
            } else {
                return Err(syntax(
                    pos,
                    format!(
                        "expected `sync` or `location`, found {}",
                        describe(self.peek())
                    ),
                ));
            }
        }
        for (e, pos) in &edges {
            if !locations.iter().any(|l| l.name == e.target) {
                return Err(at(
                    *pos,
                    ModelError::UnknownLocation {
                        automaton: name.clone(),
                        location: e.target.clone(),
                    },
                ));
            }
        }
        Automaton::new(
            name,
            locations,
            edges.into_iter().map(|(e, _)| e).collect(),
            sync,
        )
        .map_err(Into::into)
    }

    fn check_sync_action(&self, a: &str, pos: Pos) -> Result<(), ParseError> {
        if a == TAU {
            return Err(at(pos, ModelError::TauInSync));
        }
        if !self.actions.contains(a) {
            return Err(at(
                pos,
                ModelError::Undeclared {
                    what: "action",
                    name: a.to_string(),
                },
            ));
        }
        Ok(())
    }

    fn location(&mut self, name: String) -> Result<(Location, Vec<(Edge, Pos)>), ParseError> {
        self.expect_sym("{")?;
        let mut init: Option<Predicate> = None;
        let mut inv: Option<Predicate> = None;
        let mut edges = Vec::new();
        while !self.eat_sym("}") {
            let pos = self.pos();
            let (kw, _) = self.ident()?;
            match kw.as_str() {
                "initial" => {
                    if init.is_some() {
                        return Err(syntax(
                            pos,
                            format!("location `{name}` has two `initial` clauses"),
                        ));
                    }
                    init = Some(if self.is_kw("when") {
                        self.bump();
                        self.state_pred()?
                    } else {
                        Predicate::True
                    });
                }
                "invariant" => {
                    if inv.is_some() {
                        return Err(syntax(pos, format!("location `{name}` has two invariants")));
                    }
                    inv = Some(self.state_pred()?);
                }
                "edge" => {
                    let (act, apos) = match self.peek().clone() {
                        Tok::Ident(a, false) => {
                            let p = self.pos();
                            self.bump();
                            (a, p)
                        }
                        other => {
                            return Err(syntax(
                                self.pos(),
                                format!("expected action, found {}", describe(&other)),
                            ))
                        }
                    };
                    if act != TAU && !self.actions.contains(&act) {
                        return Err(at(
                            apos,
                            ModelError::Undeclared {
                                what: "action",
                                name: act,
                            },
                        ));
                    }
                    let reset = if self.is_kw("when") {
                        self.bump();
                        let rpos = self.pos();
                        let r = self.pred()?;
                        self.pending.push((rpos, r.clone()));
                        r
                    } else {
                        Predicate::True
                    };
                    self.expect_kw("goto")?;
                    let (target, tpos) = self.ident()?;
                    edges.push((
                        Edge {
                            source: name.clone(),
                            action: Action::named(act),
                            reset,
                            target,
                        },
                        tpos,
                    ));
                }
                other => {
                    return Err(syntax(
                        pos,
                        format!("expected `initial`, `invariant` or `edge`, found `{other}`"),
                    ))
                }
            }
            self.expect_sym(";")?;
        }
        let loc = Location {
            name,
            init: init.unwrap_or(Predicate::False),
            inv: inv.unwrap_or(Predicate::True),
        };
        Ok((loc, edges))
    }

    /// A predicate over current values only.
    fn state_pred(&mut self) -> Result<Predicate, ParseError> {
        let pos = self.pos();
        let p = self.pred()?;
        if let Some(v) = p.free_vars().into_iter().find(|v| v.primed) {
            return Err(at(pos, ModelError::PrimedOutsideReset(v.to_string())));
        }
        self.pending.push((pos, p.clone()));
        Ok(p)
    }

    fn pred(&mut self) -> Result<Predicate, ParseError> {
        let mut lhs = self.conj()?;
        while self.eat_sym("||") {
            lhs = lhs.or(self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Predicate, ParseError> {
        let mut lhs = self.pred_atom()?;
        while self.eat_sym("&&") {
            lhs = lhs.and(self.pred_atom()?);
        }
        Ok(lhs)
    }

    fn pred_atom(&mut self) -> Result<Predicate, ParseError> {
        if self.is_sym("(") {
            let save = self.idx;
            self.bump();
            if let Ok(p) = self.pred() {
                if self.eat_sym(")") && !self.at_expr_continuation() {
                    return Ok(p);
                }
            }
            // Not a parenthesized predicate: reparse as a comparison whose
            // left operand starts with a parenthesized expression.
            self.idx = save;
        }
        if let Tok::Ident(kw, false) = self.peek().clone() {
            if (kw == "true" || kw == "false") && !self.next_is_operator(1) {
                self.bump();
                return Ok(if kw == "true" {
                    Predicate::True
                } else {
                    Predicate::False
                });
            }
            if matches!(self.peek_at(1), Tok::Ident(x, false) if x == "in") {
                return self.membership();
            }
        }
        let lhs = self.expr()?;
        let pos = self.pos();
        if self.eat_sym("==") {
            Ok(lhs.eq(self.expr()?))
        } else if self.eat_sym("<=") {
            Ok(lhs.le(self.expr()?))
        } else {
            Err(syntax(
                pos,
                format!("expected `==` or `<=`, found {}", describe(self.peek())),
            ))
        }
    }

    fn at_expr_continuation(&self) -> bool {
        self.next_is_operator(0)
    }

    fn next_is_operator(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Sym("==" | "<=" | "+" | "-" | "++"))
    }

    fn membership(&mut self) -> Result<Predicate, ParseError> {
        let (name, pos) = match self.peek().clone() {
            Tok::Ident(n, _) => {
                let p = self.pos();
                self.bump();
                (n, p)
            }
            _ => unreachable!("membership starts with an identifier"),
        };
        if !self.vars.contains(&name) {
            return Err(at(
                pos,
                ModelError::Undeclared {
                    what: "variable",
                    name,
                },
            ));
        }
        self.expect_kw("in")?;
        self.expect_sym("{")?;
        let mut locs = Vec::new();
        if !self.is_sym("}") {
            for (l, lpos) in self.ident_list()? {
                if !self.locations.contains(&l) {
                    return Err(at(
                        lpos,
                        ModelError::Undeclared {
                            what: "location",
                            name: l,
                        },
                    ));
                }
                locs.push(l);
            }
        }
        self.expect_sym("}")?;
        Ok(Predicate::In(VarRef::plain(name), locs))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym("+") {
                lhs = lhs.add(self.term()?);
            } else if self.eat_sym("-") {
                lhs = lhs.sub(self.term()?);
            } else if self.eat_sym("++") {
                lhs = lhs.concat(self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(_) | Tok::Sym("-") => Ok(Expr::int(self.int()?)),
            Tok::Sym("[") => {
                self.bump();
                let mut items = Vec::new();
                if !self.is_sym("]") {
                    items.push(self.expr()?);
                    while self.eat_sym(",") {
                        items.push(self.expr()?);
                    }
                }
                self.expect_sym("]")?;
                Ok(Expr::List(items))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name, primed) => {
                self.bump();
                if !primed && (name == "true" || name == "false") {
                    return Ok(Expr::Lit(Value::Bool(name == "true")));
                }
                if self.vars.contains(&name) {
                    Ok(Expr::Var(VarRef { name, primed }))
                } else if !primed && self.locations.contains(&name) {
                    Ok(Expr::loc(name))
                } else {
                    Err(at(
                        pos,
                        ModelError::Undeclared {
                            what: "variable",
                            name,
                        },
                    ))
                }
            }
            other => Err(syntax(
                pos,
                format!("expected expression, found {}", describe(&other)),
            )),
        }
    }

    fn comp(&mut self) -> Result<CompAst, ParseError> {
        let mut lhs = self.comp_term()?;
        while self.eat_sym("||") {
            lhs = CompAst::Par(Box::new(lhs), Box::new(self.comp_term()?));
        }
        Ok(lhs)
    }

    fn comp_term(&mut self) -> Result<CompAst, ParseError> {
        if self.eat_sym("(") {
            let c = self.comp()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        if self.is_kw("sync") {
            self.bump();
            self.expect_sym("{")?;
            let mut set = BTreeSet::new();
            if !self.is_sym("}") {
                for (a, apos) in self.ident_list()? {
                    self.check_sync_action(&a, apos)?;
                    set.insert(a);
                }
            }
            self.expect_sym("}")?;
            let body = self.comp_term()?;
            return Ok(CompAst::Sync(set, Box::new(body)));
        }
        let (name, pos) = self.ident()?;
        if !self.automaton_names.contains(&name) {
            return Err(at(
                pos,
                ModelError::Undeclared {
                    what: "automaton",
                    name,
                },
            ));
        }
        Ok(CompAst::Name(name, pos))
    }
}

fn build_comp(
    ast: &CompAst,
    automata: &[Automaton],
    used: &mut HashSet<String>,
) -> Result<Composition, ParseError> {
    Ok(match ast {
        CompAst::Name(name, pos) => {
            let a = automata.iter().find(|a| a.name == *name).ok_or_else(|| {
                at(
                    *pos,
                    ModelError::Undeclared {
                        what: "automaton",
                        name: name.clone(),
                    },
                )
            })?;
            if !used.insert(name.clone()) {
                return Err(at(
                    *pos,
                    ModelError::Duplicate {
                        what: "automaton in composition",
                        name: name.clone(),
                    },
                ));
            }
            Composition::atom(a.clone())
        }
        CompAst::Par(l, r) => {
            let l = build_comp(l, automata, used)?;
            Composition::par(l, build_comp(r, automata, used)?)
        }
        CompAst::Sync(set, body) => {
            Composition::Sync(set.clone(), Box::new(build_comp(body, automata, used)?))
        }
    })
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(n, false) => format!("`{n}`"),
        Tok::Ident(n, true) => format!("`{n}'`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GATE: &str = "
        domain n : int 0..2;
        domain wq : list int 0..1 maxlen 2;
        domain id : int 0..1;
        domain p : int 0..1;
        actions rq, go, out, stop;
        automaton Gate {
          sync rq, go, out;
          location C { initial when wq == []; invariant n == 0;
            edge rq when wq' == wq ++ [id'] goto C;
            edge go when [p'] ++ wq' == wq goto O; }
          location O { invariant n <= 1;
            edge out goto C;
            edge rq when wq' == wq ++ [id'] goto O; }
        }";

    #[test]
    fn parses_gate() {
        let m = parse_model(GATE).unwrap();
        let gate = &m.automata[0];
        assert_eq!(gate.location_names(), ["C", "O"]);
        assert_eq!(gate.edges.len(), 4);
        let sync: Vec<_> = gate.sync.iter().cloned().collect();
        assert_eq!(sync, ["go", "out", "rq"]);
        assert_eq!(gate.locations[1].init, Predicate::False);
        assert_eq!(gate.locations[0].inv, Expr::var("n").eq(Expr::int(0)));
    }

    #[test]
    fn minimal_automaton() {
        let m = parse_model("automaton A { location L { initial; } }").unwrap();
        let a = &m.automata[0];
        assert_eq!(a.locations.len(), 1);
        assert_eq!(a.locations[0].init, Predicate::True);
        assert_eq!(a.locations[0].inv, Predicate::True);
        assert!(a.edges.is_empty());
        assert!(a.sync.is_empty());
    }

    #[test]
    fn duplicate_automata_rejected() {
        let err =
            parse_model("automaton A { location L { initial; } }\nautomaton A { location L { } }")
                .unwrap_err();
        assert_eq!(
            err.error,
            ModelError::Duplicate {
                what: "automaton",
                name: "A".into()
            }
        );
        assert_eq!(err.pos, Some(Pos { line: 2, col: 1 }));
    }

    #[test]
    fn tau_in_sync_rejected() {
        let err = parse_model("actions a; automaton A { sync tau; location L { } }").unwrap_err();
        assert_eq!(err.error, ModelError::TauInSync);
        let err =
            parse_model("actions a; automaton A { location L { } } composition M = sync {tau} A;")
                .unwrap_err();
        assert_eq!(err.error, ModelError::TauInSync);
    }

    #[test]
    fn undeclared_names_rejected_with_position() {
        let err = parse_model("automaton A { location L { initial when x == 0; } }").unwrap_err();
        assert_eq!(
            err.error,
            ModelError::Undeclared {
                what: "variable",
                name: "x".into()
            }
        );
        assert_eq!(err.pos, Some(Pos { line: 1, col: 41 }));
        let err = parse_model("automaton A { location L { edge go goto L; } }").unwrap_err();
        assert!(matches!(
            err.error,
            ModelError::Undeclared { what: "action", .. }
        ));
        let err =
            parse_model("automaton A { location L { } } composition M = A || B;").unwrap_err();
        assert!(matches!(
            err.error,
            ModelError::Undeclared {
                what: "automaton",
                ..
            }
        ));
        let err = parse_model("automaton A { location L { edge tau goto Z; } }").unwrap_err();
        assert!(matches!(err.error, ModelError::UnknownLocation { .. }));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_model("domain x : int 0..2\nautomaton A { }").unwrap_err();
        assert!(matches!(err.error, ModelError::Syntax(_)));
        assert_eq!(err.pos, Some(Pos { line: 2, col: 1 }));
    }

    #[test]
    fn ill_kinded_predicates_rejected() {
        let err =
            parse_model("domain b : bool; automaton A { location L { initial when b <= 1; } }")
                .unwrap_err();
        assert!(matches!(err.error, ModelError::IllKinded(_)));
        let err =
            parse_model("domain x : int 0..1; automaton A { location L { invariant x' == 0; } }")
                .unwrap_err();
        assert!(matches!(err.error, ModelError::PrimedOutsideReset(_)));
    }

    #[test]
    fn composition_precedence() {
        let src = "actions a; automaton A { location L { } } automaton B { location L { } } automaton C { location L { } }
                   composition M = sync {a} (A || B) || C;";
        let m = parse_model(src).unwrap();
        let (_, c) = m.composition.as_ref().unwrap();
        assert!(matches!(c, Composition::Par(l, _) if matches!(**l, Composition::Sync(..))));
    }

    #[test]
    fn locations_resolve_as_values() {
        let src = "domain l : loc {X, Y}; automaton A { location X { initial when l == Y && l in {X, Y}; } location Y { } }";
        let m = parse_model(src).unwrap();
        let init = &m.automata[0].locations[0].init;
        assert_eq!(
            *init,
            Expr::var("l").eq(Expr::loc("Y")).and(Predicate::In(
                VarRef::plain("l"),
                vec!["X".into(), "Y".into()]
            ))
        );
    }

    #[test]
    fn parenthesized_expression_on_the_left() {
        let src = "domain x : int 0..3; automaton A { location L { initial when (x + 1) == 2 && (x == 1 || true); } }";
        let m = parse_model(src).unwrap();
        let init = &m.automata[0].locations[0].init;
        let expected = Expr::var("x")
            .add(Expr::int(1))
            .eq(Expr::int(2))
            .and(Expr::var("x").eq(Expr::int(1)).or(Predicate::True));
        assert_eq!(*init, expected);
    }
}
