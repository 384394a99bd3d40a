//! Expression syntax for points, cylinders, clopen sets and bisections, and
//! the group-word scripts evaluated by `ugk eval`.
//!
//! ```text
//! fin(e1.e1; mie#0)          evp(e1; en[5].en[3].e1)
//! D(e1; mie#0; {en[3]})      D(; mie#0) + D(e2; r(e2))
//! Z(e1; e2; mie#0; {})
//!
//! v = pi_hat(Z(e1; e2; mie#0))
//! w = pi_hat(Z(e2; en[3]; mie#0))
//! l = [v, w]
//! order l
//! apply l fin(e1; mie#0)
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::constructions::{self, Witness};
use crate::cylinder::{self, Clopen, Cylinder};
use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::fullgroup::{self, FullGroupElement};
use crate::groupoid::Bisection;
use crate::path::{Path, Point};
use crate::syntax::{Parser, Tok};
use crate::ultragraph::{EdgeRef, Ultragraph};

/// Default cap for `order` queries.
pub const ORDER_CAP: usize = 64;

struct Expr<'g> {
    g: &'g Ultragraph,
    p: Parser,
}

impl<'g> Expr<'g> {
    fn new(g: &'g Ultragraph, text: &str, line: usize) -> Result<Self> {
        Ok(Expr {
            g,
            p: Parser::new(text, line)?,
        })
    }

    fn edge(&mut self) -> Result<EdgeRef> {
        let tok = self.p.advance();
        let Tok::Ident(name) = tok.tok else {
            return Err(UgkError::parse(tok.line, tok.col, "expected an edge name"));
        };
        let index = if self.p.eat_sym("[") {
            let k = self.p.expect_int()?;
            self.p.expect_sym("]")?;
            Some(k)
        } else {
            None
        };
        self.g
            .edge_by_name(&name, index)
            .map_err(|e| UgkError::parse(tok.line, tok.col, e.to_string()))
    }

    /// A possibly empty `.`-separated edge list.
    fn path(&mut self) -> Result<Path> {
        let mut out = Vec::new();
        if !matches!(self.p.peek(), Tok::Ident(_)) {
            return Ok(out);
        }
        out.push(self.edge()?);
        while self.p.eat_sym(".") {
            out.push(self.edge()?);
        }
        Ok(out)
    }

    fn comp_atom(&mut self) -> Result<EpSet> {
        match self.p.peek().clone() {
            Tok::Mie(k) => {
                let tok = self.p.advance();
                self.g
                    .mie(k)
                    .cloned()
                    .ok_or_else(|| UgkError::parse(tok.line, tok.col, format!("there is no mie#{k}")))
            }
            Tok::Ident(s) if s == "r" && self.p.peek_at(1) == &Tok::Sym("(") => {
                self.p.advance();
                self.p.advance();
                let e = self.edge()?;
                self.p.expect_sym(")")?;
                Ok(self.g.range(e))
            }
            _ => self.p.epset(),
        }
    }

    /// `mie#k`, `r(e)`, an EP literal, or a `|`-union of those.
    fn comp(&mut self) -> Result<EpSet> {
        let mut acc = self.comp_atom()?;
        while self.p.eat_sym("|") {
            acc = acc.union(&self.comp_atom()?);
        }
        Ok(acc)
    }

    fn edge_set(&mut self) -> Result<BTreeSet<EdgeRef>> {
        let mut out = BTreeSet::new();
        if !self.p.eat_sym(";") {
            return Ok(out);
        }
        self.p.expect_sym("{")?;
        if self.p.eat_sym("}") {
            return Ok(out);
        }
        loop {
            out.insert(self.edge()?);
            if self.p.eat_sym("}") {
                return Ok(out);
            }
            self.p.expect_sym(",")?;
        }
    }

    fn wrap<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            UgkError::Parse { .. } => e,
            other => self.p.error(other.to_string()),
        })
    }

    fn point(&mut self) -> Result<Point> {
        let tok = self.p.advance();
        match tok.tok {
            Tok::Ident(ref s) if s == "fin" => {
                self.p.expect_sym("(")?;
                let prefix = self.path()?;
                self.p.expect_sym(";")?;
                let k = match self.p.advance().tok {
                    Tok::Mie(k) => k,
                    _ => return Err(self.p.error("expected mie#k")),
                };
                self.p.expect_sym(")")?;
                let r = Point::fin(self.g, prefix, k);
                self.wrap(r)
            }
            Tok::Ident(ref s) if s == "evp" => {
                self.p.expect_sym("(")?;
                let head = self.path()?;
                self.p.expect_sym(";")?;
                let cycle = self.path()?;
                self.p.expect_sym(")")?;
                let r = Point::evper(self.g, head, cycle);
                self.wrap(r)
            }
            _ => Err(UgkError::parse(tok.line, tok.col, "expected fin(...) or evp(...)")),
        }
    }

    fn cylinder(&mut self) -> Result<Cylinder> {
        if !self.p.is_ident("D") {
            return Err(self.p.error("expected D(...)"));
        }
        self.p.advance();
        self.p.expect_sym("(")?;
        let prefix = self.path()?;
        self.p.expect_sym(";")?;
        let comp = self.comp()?;
        let excl = self.edge_set()?;
        self.p.expect_sym(")")?;
        let r = Cylinder::new(self.g, prefix, comp, excl);
        self.wrap(r)
    }

    fn clopen(&mut self) -> Result<Clopen> {
        let mut out = vec![self.cylinder()?];
        while self.p.eat_sym("+") {
            out.push(self.cylinder()?);
        }
        Ok(out)
    }

    fn bisection(&mut self) -> Result<Bisection> {
        if !self.p.is_ident("Z") {
            return Err(self.p.error("expected Z(...)"));
        }
        self.p.advance();
        self.p.expect_sym("(")?;
        let out = self.path()?;
        self.p.expect_sym(";")?;
        let inn = self.path()?;
        self.p.expect_sym(";")?;
        let comp = self.comp()?;
        let excl = self.edge_set()?;
        self.p.expect_sym(")")?;
        let r = Bisection::new(self.g, out, inn, comp, excl);
        self.wrap(r)
    }

    fn bisections(&mut self) -> Result<Vec<Bisection>> {
        let mut out = vec![self.bisection()?];
        while self.p.eat_sym(",") || self.p.eat_sym("+") {
            out.push(self.bisection()?);
        }
        Ok(out)
    }
}

/// Parses `fin(...)` or `evp(...)`.
pub fn parse_point(g: &Ultragraph, text: &str) -> Result<Point> {
    let mut e = Expr::new(g, text, 1)?;
    let p = e.point()?;
    e.p.expect_eof()?;
    Ok(p)
}

/// Parses a `+`-joined list of `D(...)` cylinders.
pub fn parse_clopen(g: &Ultragraph, text: &str) -> Result<Clopen> {
    let mut e = Expr::new(g, text, 1)?;
    let c = e.clopen()?;
    e.p.expect_eof()?;
    Ok(c)
}

pub fn parse_bisection(g: &Ultragraph, text: &str) -> Result<Bisection> {
    let mut e = Expr::new(g, text, 1)?;
    let b = e.bisection()?;
    e.p.expect_eof()?;
    Ok(b)
}

/// Group-word evaluator holding named elements.
pub struct Session<'g> {
    pub g: &'g Ultragraph,
    pub bound: usize,
    pub vars: BTreeMap<String, FullGroupElement>,
}

impl<'g> Session<'g> {
    pub fn new(g: &'g Ultragraph, bound: usize) -> Self {
        Session {
            g,
            bound,
            vars: BTreeMap::new(),
        }
    }

    /// Runs a script and returns one output line per query.
    pub fn run(&mut self, script: &str) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for (i, line) in script.lines().enumerate() {
            if let Some(s) = self.statement(line, i + 1)? {
                out.push(s);
            }
        }
        Ok(out)
    }

    fn statement(&mut self, line: &str, no: usize) -> Result<Option<String>> {
        let mut e = Expr::new(self.g, line, no)?;
        if e.p.at_eof() {
            return Ok(None);
        }
        let g = self.g;
        let head = match e.p.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(e.p.error("expected a statement")),
        };
        if e.p.peek_at(1) == &Tok::Sym("=") {
            e.p.advance();
            e.p.advance();
            let v = self.word(&mut e)?;
            e.p.expect_eof()?;
            self.vars.insert(head, v);
            return Ok(None);
        }
        let query = head.as_str();
        if !matches!(query, "order" | "support" | "apply" | "show" | "involution" | "equal") {
            return Err(e.p.error(format!("unknown statement '{query}'")));
        }
        e.p.advance();
        let a = self.word(&mut e)?;
        let r = match query {
            "order" => {
                let max = match e.p.peek() {
                    Tok::Int(_) => e.p.expect_int()? as usize,
                    _ => ORDER_CAP,
                };
                let r = fullgroup::order(g, &a, max);
                match e.wrap(r)? {
                    Some(k) => k.to_string(),
                    None => format!(">{max}"),
                }
            }
            "support" => {
                let r = a.support(g);
                cylinder::display_clopen(g, &e.wrap(r)?)
            }
            "apply" => {
                let x = e.point()?;
                a.apply(g, &x).display(g)
            }
            "show" => a.display(g),
            "involution" => {
                let r = fullgroup::is_involution(g, &a);
                e.wrap(r)?.to_string()
            }
            _ => {
                e.p.expect_sym(",")?;
                let b = self.word(&mut e)?;
                let r = fullgroup::equals(g, &a, &b);
                e.wrap(r)?.to_string()
            }
        };
        e.p.expect_eof()?;
        Ok(Some(r))
    }

    fn word(&self, e: &mut Expr) -> Result<FullGroupElement> {
        let mut acc = self.power(e)?;
        while e.p.eat_sym("*") {
            let rhs = self.power(e)?;
            let r = fullgroup::compose(self.g, &acc, &rhs);
            acc = e.wrap(r)?;
        }
        Ok(acc)
    }

    fn power(&self, e: &mut Expr) -> Result<FullGroupElement> {
        let mut a = self.atom(e)?;
        while e.p.eat_sym("^") {
            let neg = e.p.eat_sym("-");
            let k = e.p.expect_int()? as i64;
            let r = fullgroup::power(self.g, &a, if neg { -k } else { k });
            a = e.wrap(r)?;
        }
        Ok(a)
    }

    fn atom(&self, e: &mut Expr) -> Result<FullGroupElement> {
        let g = self.g;
        if e.p.eat_sym("(") {
            let a = self.word(e)?;
            e.p.expect_sym(")")?;
            return Ok(a);
        }
        if e.p.eat_sym("[") {
            let a = self.word(e)?;
            e.p.expect_sym(",")?;
            let b = self.word(e)?;
            e.p.expect_sym("]")?;
            let r = fullgroup::commutator(g, &a, &b);
            return e.wrap(r);
        }
        let tok = e.p.advance();
        let Tok::Ident(name) = tok.tok else {
            return Err(UgkError::parse(tok.line, tok.col, "expected a group element"));
        };
        let call = e.p.peek() == &Tok::Sym("(");
        let r = match name.as_str() {
            "id" if !call => Ok(FullGroupElement::identity()),
            "pi_hat" | "pi_tilde" | "rows" if call => {
                e.p.advance();
                let v = e.bisections()?;
                e.p.expect_sym(")")?;
                match name.as_str() {
                    "pi_hat" => fullgroup::pi_hat(g, &v),
                    "pi_tilde" => fullgroup::pi_tilde(g, &v),
                    _ => FullGroupElement::from_rows(g, v),
                }
            }
            "f3" if call => {
                e.p.advance();
                let a = e.clopen()?;
                e.p.expect_sym(")")?;
                constructions::f3_witness(g, &a, self.bound).map(|w| w.element)
            }
            "f1" if call => {
                e.p.advance();
                let x = e.point()?;
                e.p.expect_sym(",")?;
                let a = e.clopen()?;
                e.p.expect_sym(")")?;
                constructions::f1_witness(g, &x, &a, self.bound).map(|w| w.element)
            }
            "f2" if call => {
                e.p.advance();
                let tau = self.word(e)?;
                e.p.expect_sym(",")?;
                let a = e.clopen()?;
                e.p.expect_sym(")")?;
                constructions::f2_witness(g, &tau, &a, self.bound).map(|w| w.element)
            }
            _ if !call => {
                return self
                    .vars
                    .get(&name)
                    .cloned()
                    .ok_or_else(|| UgkError::parse(tok.line, tok.col, format!("unbound name '{name}'")))
            }
            _ => return Err(UgkError::parse(tok.line, tok.col, format!("unknown function '{name}'"))),
        };
        e.wrap(r)
    }
}

/// The witness as a script that rebuilds it from its bisections.
pub fn witness_script(g: &Ultragraph, w: &Witness) -> String {
    let rows = |v: &[Bisection]| v.iter().map(|b| b.display(g)).collect::<Vec<_>>().join(", ");
    let mut s = String::new();
    for n in &w.notes {
        s.push_str(&format!("# {n}\n"));
    }
    s.push_str(&format!("v = pi_hat({})\n", rows(&w.v)));
    s.push_str(&format!("w = pi_hat({})\n", rows(&w.w)));
    s.push_str("lambda = [v, w]\norder lambda\nsupport lambda\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Ultragraph {
        Ultragraph::parse(
            "universe ap(1,1)\nedge e1 : src 1 -> { all \\ {0,2} }\n\
             edge e2 : src 2 -> { all \\ {0,1} }\n\
             family en(n) for n in ap(3,1) : src n -> { n-2, n }",
        )
        .unwrap()
    }

    #[test]
    fn expressions_round_trip() {
        let g = example();
        for t in ["fin(e1.e1; mie#0)", "fin(; mie#0)", "evp(; e1.en[5].en[3])", "evp(e2; en[3])"] {
            assert_eq!(parse_point(&g, t).unwrap().display(&g), t);
        }
        let c = parse_clopen(&g, "D(e1; mie#0; {en[3]}) + D(e2; r(e2))").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(parse_clopen(&g, &c[0].display(&g)).unwrap()[0], c[0]);
        let z = parse_bisection(&g, "Z(e1; e2; mie#0)").unwrap();
        assert_eq!(parse_bisection(&g, &z.display(&g)).unwrap(), z);
    }

    #[test]
    fn bad_expressions_report_positions() {
        let g = example();
        assert!(matches!(parse_point(&g, "fin(zz; mie#0)"), Err(UgkError::Parse { col: 5, .. })));
        assert!(parse_point(&g, "fin(e1; mie#4)").is_err());
        assert!(parse_clopen(&g, "D(en; mie#0)").is_err());
    }

    #[test]
    fn script_queries() {
        let g = example();
        let mut s = Session::new(&g, 16);
        let out = s
            .run("v = pi_hat(Z(e1; e2; mie#0))\n# comment\norder v\ninvolution v\nequal v * v, id\norder v^-1 * v")
            .unwrap();
        assert_eq!(out, vec!["2", "true", "true", "1"]);
        assert!(s.run("order u").is_err());
    }

    #[test]
    fn f3_order_is_three() {
        let g = example();
        let out = Session::new(&g, 16).run("order f3(D(; mie#0))").unwrap();
        assert_eq!(out, vec!["3"]);
    }
}
