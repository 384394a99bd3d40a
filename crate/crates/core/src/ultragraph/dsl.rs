use std::fmt::Write;

use super::{Affine, EdgeSchema};
use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::syntax::Parser;

/// Parses the line-oriented presentation language. Constant range terms are
/// folded into the constant range part.
pub(super) fn parse(text: &str) -> Result<(EpSet, Vec<EdgeSchema>)> {
    let mut universe = None;
    let mut schemas = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut p = Parser::new(raw, line)?;
        if p.at_eof() {
            continue;
        }
        if p.is_ident("universe") {
            p.advance();
            if universe.is_some() {
                return Err(UgkError::parse(line, 1, "duplicate 'universe' declaration"));
            }
            universe = Some(p.epset()?);
        } else if p.is_ident("edge") {
            p.advance();
            let name = p.expect_ident()?;
            p.expect_sym(":")?;
            p.expect_keyword("src")?;
            let src = p.affine()?;
            if !src.is_constant() {
                return Err(p.error("a single edge needs a constant source"));
            }
            p.expect_sym("->")?;
            let (affine, konst) = range_list(&mut p)?;
            if affine.iter().any(|a| !a.is_constant()) {
                return Err(p.error("a single edge cannot use 'n' in its range"));
            }
            schemas.push(EdgeSchema {
                name,
                family: false,
                domain: EpSet::singleton(0),
                source: src,
                range_affine: Vec::new(),
                range_const: konst,
            });
        } else if p.is_ident("family") {
            p.advance();
            let name = p.expect_ident()?;
            p.expect_sym("(")?;
            p.expect_keyword("n")?;
            p.expect_sym(")")?;
            p.expect_keyword("for")?;
            p.expect_keyword("n")?;
            p.expect_keyword("in")?;
            let domain = p.epset()?;
            p.expect_sym(":")?;
            p.expect_keyword("src")?;
            let source = p.affine()?;
            p.expect_sym("->")?;
            let (range_affine, range_const) = range_list(&mut p)?;
            schemas.push(EdgeSchema {
                name,
                family: true,
                domain,
                source,
                range_affine,
                range_const,
            });
        } else {
            return Err(p.error("expected 'universe', 'edge' or 'family'"));
        }
        p.expect_eof()?;
    }
    Ok((universe.unwrap_or_else(EpSet::all), schemas))
}

fn range_list(p: &mut Parser) -> Result<(Vec<Affine>, EpSet)> {
    p.expect_sym("{")?;
    let mut affine = Vec::new();
    let mut konst = EpSet::empty();
    loop {
        if p.at_affine() {
            let a = p.affine()?;
            if a.is_constant() {
                if a.off < 0 {
                    return Err(p.error("negative vertex"));
                }
                konst = konst.union(&EpSet::singleton(a.off as u64));
            } else if !affine.contains(&a) {
                affine.push(a);
            }
        } else {
            konst = konst.union(&p.epset()?);
        }
        if p.eat_sym("}") {
            return Ok((affine, konst));
        }
        p.expect_sym(",")?;
    }
}

pub(super) fn pretty(universe: &EpSet, schemas: &[EdgeSchema]) -> String {
    let mut out = format!("universe {universe}\n");
    for s in schemas {
        let mut items: Vec<String> = s.range_affine.iter().map(Affine::to_string).collect();
        if !s.range_const.is_empty() {
            items.push(s.range_const.to_string());
        }
        let range = items.join(", ");
        if s.family {
            let _ = writeln!(
                out,
                "family {}(n) for n in {} : src {} -> {{ {range} }}",
                s.name, s.domain, s.source
            );
        } else {
            let _ = writeln!(out, "edge {} : src {} -> {{ {range} }}", s.name, s.source);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_fold_into_the_constant_part() {
        let (_, s) = parse("family f(n) for n in all : src n -> { n+1, 0, {4} }").unwrap();
        assert_eq!(s[0].range_affine, vec![Affine { coef: 1, off: 1 }]);
        assert_eq!(s[0].range_const, EpSet::finite([0, 4]));
    }

    #[test]
    fn errors_carry_positions() {
        match parse("universe all\nfamily f(n) for n in all : src 2n+ -> {n}") {
            Err(UgkError::Parse { line: 2, col, .. }) => assert_eq!(col, 33),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("edge e : src n -> {1}"),
            Err(UgkError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("vertex 3"),
            Err(UgkError::Parse { line: 1, col: 1, .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let (u, s) = parse("# header\n\nuniverse {0}  # only vertex\nedge e : src 0 -> {0}\n").unwrap();
        assert_eq!(u, EpSet::singleton(0));
        assert_eq!(s.len(), 1);
    }
}
