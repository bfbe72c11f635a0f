//! Rule-file text format (UTF-8, `#` comments):
//!
//!   tiling <name> n=<int>
//!   prototile <label> { vertices=[<expr>, ...] rotsym=<int>
//!                       mirror=<self|chiral> anchor=<int> edges=[<+|->, ...] }
//!   substitution <label> { child <label> rot=<expr> [refl] translate=<expr>; ... }
//!
//! Expressions range over rationals, `x` (= xi_2n) and `L` (= lambda),
//! with + - * / ^ and parentheses. Serialization is bit-exact.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::geometry::{ConvexPolygon, Isometry};
use crate::numberfield::{rat_string, CycNum, ExtScalar, Field, Rat};

use super::{ChildRule, Mirror, Prototile, RuleSet};

#[derive(Clone, Debug)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Lexed {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut it = text.chars().peekable();
    while let Some(&ch) = it.peek() {
        if ch == '\n' {
            it.next();
            line += 1;
            col = 1;
        } else if ch.is_whitespace() {
            it.next();
            col += 1;
        } else if ch == '#' {
            while let Some(&c2) = it.peek() {
                if c2 == '\n' {
                    break;
                }
                it.next();
                col += 1;
            }
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let (l0, c0) = (line, col);
            let mut s = String::new();
            while let Some(&c2) = it.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    s.push(c2);
                    it.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Lexed {
                tok: Tok::Ident(s),
                line: l0,
                col: c0,
            });
        } else if ch.is_ascii_digit() {
            let (l0, c0) = (line, col);
            let mut s = String::new();
            while let Some(&c2) = it.peek() {
                if c2.is_ascii_digit() {
                    s.push(c2);
                    it.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Lexed {
                tok: Tok::Int(BigInt::parse_bytes(s.as_bytes(), 10).unwrap()),
                line: l0,
                col: c0,
            });
        } else if "{}[]()=,;+-*/^".contains(ch) {
            out.push(Lexed {
                tok: Tok::Sym(ch),
                line,
                col,
            });
            it.next();
            col += 1;
        } else {
            return Err(ParseError {
                line,
                col,
                msg: format!("unexpected character {ch:?}"),
            });
        }
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct RawChild {
    label: String,
    line: u32,
    col: u32,
    rot: ExtScalar,
    rot_line: u32,
    rot_col: u32,
    refl: bool,
    tr: ExtScalar,
}

struct RawSub {
    label: String,
    line: u32,
    col: u32,
    kids: Vec<RawChild>,
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Lexed {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Lexed {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.advance();
                Ok(())
            }
            _ => self.err(format!("expected '{kw}'")),
        }
    }

    fn expect_ident(&mut self) -> Result<(String, u32, u32), ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                let t = self.advance();
                Ok((s, t.line, t.col))
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn expect_int(&mut self) -> Result<(BigInt, u32, u32), ParseError> {
        match self.peek().tok.clone() {
            Tok::Int(v) => {
                let t = self.advance();
                Ok((v, t.line, t.col))
            }
            _ => self.err("expected an integer"),
        }
    }

    // expression grammar: expr := term (('+'|'-') term)*
    fn parse_expr(&mut self, f: &Field) -> Result<ExtScalar, ParseError> {
        let mut acc = self.parse_term(f)?;
        loop {
            if self.eat_sym('+') {
                acc = &acc + &self.parse_term(f)?;
            } else if self.eat_sym('-') {
                acc = &acc - &self.parse_term(f)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_term(&mut self, f: &Field) -> Result<ExtScalar, ParseError> {
        let mut acc = self.parse_unary(f)?;
        loop {
            if self.eat_sym('*') {
                acc = &acc * &self.parse_unary(f)?;
            } else if self.peek().tok == Tok::Sym('/') {
                let t = self.advance();
                let rhs = self.parse_unary(f)?;
                match rhs.inv() {
                    Some(ri) => acc = &acc * &ri,
                    None => {
                        return Err(ParseError {
                            line: t.line,
                            col: t.col,
                            msg: "division by zero in scalar expression".into(),
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_unary(&mut self, f: &Field) -> Result<ExtScalar, ParseError> {
        if self.eat_sym('-') {
            Ok(-&self.parse_unary(f)?)
        } else {
            self.parse_power(f)
        }
    }

    fn parse_power(&mut self, f: &Field) -> Result<ExtScalar, ParseError> {
        let base = self.parse_atom(f)?;
        if self.eat_sym('^') {
            let neg = self.eat_sym('-');
            let t = self.peek().clone();
            let (e, ..) = self.expect_int()?;
            let k = e.to_i64().filter(|k| *k <= 64).ok_or(ParseError {
                line: t.line,
                col: t.col,
                msg: "exponent out of range".into(),
            })?;
            let k = if neg { -k } else { k };
            if k < 0 && base.is_zero() {
                return Err(ParseError {
                    line: t.line,
                    col: t.col,
                    msg: "negative power of zero".into(),
                });
            }
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self, f: &Field) -> Result<ExtScalar, ParseError> {
        match self.peek().tok.clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(ExtScalar::from_cyc(f.from_rat(&Rat::from_integer(v))))
            }
            Tok::Ident(s) if s == "x" => {
                self.advance();
                Ok(ExtScalar::from_cyc(f.xi(1)))
            }
            Tok::Ident(s) if s == "L" => {
                self.advance();
                Ok(ExtScalar::new(f.zero(), f.one()))
            }
            Tok::Sym('(') => {
                self.advance();
                let e = self.parse_expr(f)?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(s) => self.err(format!("unknown name '{s}' in expression (expected x or L)")),
            _ => self.err("expected a scalar expression"),
        }
    }

    fn parse_prototile(&mut self, f: &Field, existing: &[Prototile]) -> Result<Prototile, ParseError> {
        let (label, ll, lc) = self.expect_ident()?;
        if existing.iter().any(|p| p.label == label) {
            return Err(ParseError {
                line: ll,
                col: lc,
                msg: format!("duplicate prototile label '{label}'"),
            });
        }
        self.expect_sym('{')?;
        let mut vertices: Option<(Vec<ExtScalar>, u32, u32)> = None;
        let mut rotsym: Option<u32> = None;
        let mut mirror: Option<Mirror> = None;
        let mut anchor: Option<usize> = None;
        let mut edges: Option<(Vec<bool>, u32, u32)> = None;
        while !self.eat_sym('}') {
            let (key, kl, kc) = self.expect_ident()?;
            self.expect_sym('=')?;
            let dup = || ParseError {
                line: kl,
                col: kc,
                msg: format!("duplicate field '{key}'"),
            };
            match key.as_str() {
                "vertices" => {
                    if vertices.is_some() {
                        return Err(dup());
                    }
                    self.expect_sym('[')?;
                    let mut vs = Vec::new();
                    loop {
                        vs.push(self.parse_expr(f)?);
                        if self.eat_sym(']') {
                            break;
                        }
                        self.expect_sym(',')?;
                    }
                    vertices = Some((vs, kl, kc));
                }
                "rotsym" => {
                    if rotsym.is_some() {
                        return Err(dup());
                    }
                    let (v, vl, vc) = self.expect_int()?;
                    rotsym = Some(v.to_u32().filter(|r| *r >= 1).ok_or(ParseError {
                        line: vl,
                        col: vc,
                        msg: "rotsym must be a positive integer".into(),
                    })?);
                }
                "mirror" => {
                    if mirror.is_some() {
                        return Err(dup());
                    }
                    let (v, vl, vc) = self.expect_ident()?;
                    mirror = Some(match v.as_str() {
                        "self" => Mirror::SelfMirror,
                        "chiral" => Mirror::Chiral,
                        _ => {
                            return Err(ParseError {
                                line: vl,
                                col: vc,
                                msg: "mirror must be 'self' or 'chiral'".into(),
                            })
                        }
                    });
                }
                "anchor" => {
                    if anchor.is_some() {
                        return Err(dup());
                    }
                    let (v, vl, vc) = self.expect_int()?;
                    anchor = Some(v.to_usize().ok_or(ParseError {
                        line: vl,
                        col: vc,
                        msg: "anchor out of range".into(),
                    })?);
                }
                "edges" => {
                    if edges.is_some() {
                        return Err(dup());
                    }
                    self.expect_sym('[')?;
                    let mut marks = Vec::new();
                    loop {
                        if self.eat_sym('+') {
                            marks.push(true);
                        } else if self.eat_sym('-') {
                            marks.push(false);
                        } else {
                            return self.err("expected '+' or '-'");
                        }
                        if self.eat_sym(']') {
                            break;
                        }
                        self.expect_sym(',')?;
                    }
                    edges = Some((marks, kl, kc));
                }
                _ => {
                    return Err(ParseError {
                        line: kl,
                        col: kc,
                        msg: format!("unknown prototile field '{key}'"),
                    })
                }
            }
        }
        let at = |msg: String| ParseError {
            line: ll,
            col: lc,
            msg,
        };
        let (vs, vl, vc) = vertices.ok_or_else(|| at(format!("prototile '{label}' has no vertices")))?;
        let poly = ConvexPolygon::new(vs).map_err(|e| ParseError {
            line: vl,
            col: vc,
            msg: e.to_string(),
        })?;
        let m = poly.len();
        let rotsym = rotsym.ok_or_else(|| at(format!("prototile '{label}' has no rotsym")))?;
        let mirror = mirror.ok_or_else(|| at(format!("prototile '{label}' has no mirror")))?;
        let anchor = anchor.ok_or_else(|| at(format!("prototile '{label}' has no anchor")))?;
        if anchor >= m {
            return Err(at(format!("anchor {anchor} out of range for {m} edges")));
        }
        let edges = match edges {
            None => None,
            Some((marks, el, ec)) => {
                if marks.len() != m {
                    return Err(ParseError {
                        line: el,
                        col: ec,
                        msg: format!("{} edge marks for {} edges", marks.len(), m),
                    });
                }
                Some(marks)
            }
        };
        if m % (rotsym as usize) != 0 {
            return Err(at(format!("rotsym {rotsym} does not divide the vertex count {m}")));
        }
        let mut sym_rot = None;
        if rotsym > 1 {
            let s = m / rotsym as usize;
            let g = cycle_shift_map(&poly, s, false)
                .ok_or_else(|| at(format!("rotsym {rotsym} is not a symmetry of the polygon")))?;
            if let Some(ed) = &edges {
                if (0..m).any(|k| ed[(k + s) % m] != ed[k]) {
                    return Err(at("edge marks break the declared rotational symmetry".into()));
                }
            }
            sym_rot = Some(g);
        }
        let mut sym_mir = None;
        if mirror == Mirror::SelfMirror {
            let mut found = None;
            for s in 0..m {
                if let Some(g) = cycle_shift_map(&poly, s, true) {
                    let marks_ok = match &edges {
                        None => true,
                        Some(ed) => (0..m).all(|k| ed[(s + 2 * m - k - 1) % m] != ed[k]),
                    };
                    if marks_ok {
                        found = Some(g);
                        break;
                    }
                }
            }
            sym_mir = Some(found.ok_or_else(|| {
                at("mirror=self but no reflecting self-map matches the polygon and edge marks".into())
            })?);
        }
        Ok(Prototile {
            label,
            poly,
            rotsym,
            mirror,
            anchor,
            edges,
            sym_rot,
            sym_mir,
        })
    }

    fn parse_substitution(&mut self, f: &Field) -> Result<RawSub, ParseError> {
        let (label, line, col) = self.expect_ident()?;
        self.expect_sym('{')?;
        let mut kids = Vec::new();
        while !self.eat_sym('}') {
            self.expect_kw("child")?;
            let (clabel, cl, cc) = self.expect_ident()?;
            self.expect_kw("rot")?;
            self.expect_sym('=')?;
            let rt = self.peek().clone();
            let rot = self.parse_expr(f)?;
            let refl = match &self.peek().tok {
                Tok::Ident(s) if s == "refl" => {
                    self.advance();
                    true
                }
                _ => false,
            };
            self.expect_kw("translate")?;
            self.expect_sym('=')?;
            let tr = self.parse_expr(f)?;
            self.expect_sym(';')?;
            kids.push(RawChild {
                label: clabel,
                line: cl,
                col: cc,
                rot,
                rot_line: rt.line,
                rot_col: rt.col,
                refl,
                tr,
            });
        }
        Ok(RawSub {
            label,
            line,
            col,
            kids,
        })
    }
}

/// The self-congruence mapping vertex k to vertex s+k (direct) or
/// s-k (reflected), when the polygon admits it.
fn cycle_shift_map(poly: &ConvexPolygon, s: usize, refl: bool) -> Option<Isometry> {
    let vs = poly.vertices();
    let m = vs.len();
    let f = poly.field().clone();
    let w = |k: usize| -> &ExtScalar {
        if refl {
            &vs[(s + 2 * m - k) % m]
        } else {
            &vs[(s + k) % m]
        }
    };
    let src = |k: usize| -> ExtScalar {
        if refl {
            vs[k].conj()
        } else {
            vs[k].clone()
        }
    };
    let a = &(w(1) - w(0)) * &(&src(1) - &src(0)).inv()?;
    let unit = &a * &a.conj();
    if !(unit.is_cyc() && unit.u.is_one()) {
        return None;
    }
    let t = w(0) - &(&a * &src(0));
    let g = Isometry::new(a, refl, t);
    if (0..m).all(|k| &g.apply(&vs[k]) == w(k)) {
        let _ = f;
        Some(g)
    } else {
        None
    }
}

pub fn parse_rule_file(text: &str) -> Result<RuleSet, Vec<ParseError>> {
    parse_inner(text).map_err(|e| vec![e])
}

fn parse_inner(text: &str) -> Result<RuleSet, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    p.expect_kw("tiling")?;
    let (name, ..) = p.expect_ident()?;
    p.expect_kw("n")?;
    p.expect_sym('=')?;
    let (nv, nl, nc) = p.expect_int()?;
    let n = nv.to_u32().unwrap_or(0);
    let field = Field::new(n).map_err(|e| ParseError {
        line: nl,
        col: nc,
        msg: e.to_string(),
    })?;
    let mut protos: Vec<Prototile> = Vec::new();
    let mut subs: Vec<RawSub> = Vec::new();
    loop {
        match p.peek().tok.clone() {
            Tok::Ident(s) if s == "prototile" => {
                p.advance();
                let pt = p.parse_prototile(&field, &protos)?;
                protos.push(pt);
            }
            Tok::Ident(s) if s == "substitution" => {
                p.advance();
                subs.push(p.parse_substitution(&field)?);
            }
            Tok::Eof => break,
            _ => return p.err("expected 'prototile' or 'substitution'"),
        }
    }
    let eof = p.peek().clone();
    let mut children: Vec<Option<Vec<ChildRule>>> = vec![None; protos.len()];
    for sub in subs {
        let pi = protos
            .iter()
            .position(|q| q.label == sub.label)
            .ok_or(ParseError {
                line: sub.line,
                col: sub.col,
                msg: format!("unknown label '{}'", sub.label),
            })?;
        if children[pi].is_some() {
            return Err(ParseError {
                line: sub.line,
                col: sub.col,
                msg: format!("duplicate substitution for '{}'", sub.label),
            });
        }
        let mut list = Vec::new();
        for rc in sub.kids {
            let ci = protos
                .iter()
                .position(|q| q.label == rc.label)
                .ok_or(ParseError {
                    line: rc.line,
                    col: rc.col,
                    msg: format!("unknown label '{}'", rc.label),
                })?;
            let unit = &rc.rot * &rc.rot.conj();
            if !(unit.is_cyc() && unit.u.is_one()) {
                return Err(ParseError {
                    line: rc.rot_line,
                    col: rc.rot_col,
                    msg: "rotation scalar is not a unit".into(),
                });
            }
            list.push(ChildRule {
                child: ci,
                motion: Isometry::new(rc.rot, rc.refl, rc.tr),
            });
        }
        children[pi] = Some(list);
    }
    let mut out = Vec::with_capacity(children.len());
    for (i, c) in children.into_iter().enumerate() {
        match c {
            Some(list) => out.push(list),
            None => {
                return Err(ParseError {
                    line: eof.line,
                    col: eof.col,
                    msg: format!("no substitution for prototile '{}'", protos[i].label),
                })
            }
        }
    }
    Ok(RuleSet {
        name,
        field,
        prototiles: protos,
        children: out,
    })
}

pub fn serialize_rule(rule: &RuleSet) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "tiling {} n={}", rule.name, rule.field.n()).unwrap();
    for p in &rule.prototiles {
        writeln!(out).unwrap();
        writeln!(out, "prototile {} {{", p.label).unwrap();
        let vs: Vec<String> = p.poly.vertices().iter().map(ext_expr).collect();
        writeln!(out, "  vertices=[{}]", vs.join(", ")).unwrap();
        writeln!(out, "  rotsym={}", p.rotsym).unwrap();
        writeln!(
            out,
            "  mirror={}",
            match p.mirror {
                Mirror::SelfMirror => "self",
                Mirror::Chiral => "chiral",
            }
        )
        .unwrap();
        writeln!(out, "  anchor={}", p.anchor).unwrap();
        if let Some(ed) = &p.edges {
            let marks: Vec<&str> = ed.iter().map(|b| if *b { "+" } else { "-" }).collect();
            writeln!(out, "  edges=[{}]", marks.join(", ")).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    for (i, kids) in rule.children.iter().enumerate() {
        writeln!(out).unwrap();
        writeln!(out, "substitution {} {{", rule.prototiles[i].label).unwrap();
        for ch in kids {
            let refl = if ch.motion.r { " refl" } else { "" };
            writeln!(
                out,
                "  child {} rot={}{} translate={};",
                rule.prototiles[ch.child].label,
                ext_expr(&ch.motion.a),
                refl,
                ext_expr(&ch.motion.t)
            )
            .unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    out
}

fn ext_expr(e: &ExtScalar) -> String {
    match e.v() {
        None => cyc_expr(&e.u),
        Some(v) => {
            let lv = if v.is_one() {
                "L".to_string()
            } else {
                format!("L*({})", cyc_expr(v))
            };
            if e.u.is_zero() {
                lv
            } else {
                format!("{}+{}", cyc_expr(&e.u), lv)
            }
        }
    }
}

fn cyc_expr(c: &CycNum) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (j, q) in c.coeffs().iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let neg = q.is_negative();
        let mag = q.abs();
        let body = if j == 0 {
            rat_string(&mag)
        } else {
            let xp = if j == 1 {
                "x".to_string()
            } else {
                format!("x^{j}")
            };
            if mag == Rat::from_integer(BigInt::from(1)) {
                xp
            } else {
                format!("{}*{}", rat_string(&mag), xp)
            }
        };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push(if neg { '-' } else { '+' });
        }
        s.push_str(&body);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::super::{builtin_rule, Mirror};
    use super::*;

    #[test]
    fn degenerate_square_rule_parses() {
        let text = "\
tiling unitsquare n=4
prototile S { vertices=[0, 1, 1+x^2, x^2] rotsym=4 mirror=self anchor=0 }
substitution S {
  child S rot=1 translate=0;
  child S rot=1 translate=1;
  child S rot=1 translate=x^2;
  child S rot=1 translate=1+x^2;
}
";
        let rule = parse_rule_file(text).unwrap();
        assert_eq!(rule.prototiles.len(), 1);
        assert_eq!(rule.prototiles[0].rotsym, 4);
        assert_eq!(rule.prototiles[0].mirror, Mirror::SelfMirror);
        assert!(rule.prototiles[0].sym_rot.is_some());
        assert!(rule.prototiles[0].sym_mir.is_some());
        assert_eq!(rule.children[0].len(), 4);
    }

    #[test]
    fn expression_2_plus_x_is_zeta_for_odd_n() {
        let text = "\
tiling t n=5
prototile G { vertices=[0, 2, 2+x] rotsym=1 mirror=chiral anchor=0 }
substitution G { child G rot=1 translate=2+x; }
";
        let rule = parse_rule_file(text).unwrap();
        assert_eq!(
            rule.children[0][0].motion.t,
            ExtScalar::from_cyc(rule.field.zeta())
        );
    }

    #[test]
    fn unknown_child_label_is_located() {
        let text = "\
tiling t n=3
prototile T1 { vertices=[0, 1, x] rotsym=3 mirror=self anchor=0 }
substitution T1 { child T9 rot=1 translate=0; }
";
        let errs = parse_rule_file(text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].msg.contains("unknown label 'T9'"), "{}", errs[0]);
        assert_eq!(errs[0].line, 3);
        assert!(errs[0].col > 1);
    }

    #[test]
    fn non_unit_rotation_is_rejected() {
        let text = "\
tiling t n=3
prototile T1 { vertices=[0, 1, x] rotsym=3 mirror=self anchor=0 }
substitution T1 { child T1 rot=2 translate=0; }
";
        let errs = parse_rule_file(text).unwrap_err();
        assert!(errs[0].msg.contains("not a unit"), "{}", errs[0]);
    }

    #[test]
    fn unsupported_order_is_rejected() {
        let text = "tiling t n=7\n";
        let errs = parse_rule_file(text).unwrap_err();
        assert!(errs[0].msg.contains("unsupported"), "{}", errs[0]);
        assert_eq!(errs[0].line, 1);
    }

    #[test]
    fn bad_rotsym_claim_is_rejected() {
        let text = "\
tiling t n=3
prototile T2 { vertices=[0, 2, 2+x] rotsym=3 mirror=chiral anchor=0 }
substitution T2 { child T2 rot=1 translate=0; }
";
        let errs = parse_rule_file(text).unwrap_err();
        assert!(errs[0].msg.contains("not a symmetry"), "{}", errs[0]);
    }

    #[test]
    fn mark_count_must_match_edges() {
        let text = "\
tiling t n=3
prototile T1 { vertices=[0, 1, x] rotsym=1 mirror=chiral anchor=0 edges=[+, -] }
substitution T1 { child T1 rot=1 translate=0; }
";
        let errs = parse_rule_file(text).unwrap_err();
        assert!(errs[0].msg.contains("edge marks"), "{}", errs[0]);
    }

    #[test]
    fn roundtrip_builtins() {
        for name in ["sigma3", "sigma4"] {
            let rule = builtin_rule(name).unwrap();
            let text = serialize_rule(&rule);
            let again = parse_rule_file(&text).unwrap();
            assert_eq!(again.name, rule.name);
            assert_eq!(again.field, rule.field);
            assert_eq!(again.prototiles.len(), rule.prototiles.len());
            for (a, b) in again.prototiles.iter().zip(&rule.prototiles) {
                assert_eq!(a.label, b.label);
                assert_eq!(a.poly, b.poly);
                assert_eq!(a.rotsym, b.rotsym);
                assert_eq!(a.mirror, b.mirror);
                assert_eq!(a.anchor, b.anchor);
                assert_eq!(a.edges, b.edges);
            }
            for (a, b) in again.children.iter().zip(&rule.children) {
                assert_eq!(a, b);
            }
        }
    }
}
