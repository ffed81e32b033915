use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{ParseError, ParseErrorKind};
use crate::grammar::{CDSystem, Device, Grammar, GrammarKind, Mode};
use crate::production::{Condition, Production};
use crate::symbol::{Symbol, SymbolClass, TagItem};

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    line: usize,
    col: usize,
    s: &'a str,
}

/// Splits one line into tokens. Delimiters `( ) { } , =` stand alone;
/// `#` followed by digits is a generated-name token, any other `#`
/// starts a comment.
fn tokenize(line_no: usize, line: &str) -> Result<Vec<Tok<'_>>, ParseError> {
    let mut toks = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 {
                toks.push(Tok { line: line_no, col: i + 1, s: &line[i..j] });
                i = j;
                continue;
            }
            break; // comment to end of line
        }
        if "(){},=".contains(c) {
            toks.push(Tok { line: line_no, col: i + 1, s: &line[i..i + 1] });
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() || "(){},=#".contains(c) {
                break;
            }
            i += 1;
        }
        toks.push(Tok { line: line_no, col: start + 1, s: &line[start..i] });
    }
    Ok(toks)
}

fn err(tok: &Tok, kind: ParseErrorKind, msg: impl Into<String>) -> ParseError {
    ParseError::new(tok.line, tok.col, kind, msg)
}

/// Cursor over one line's tokens.
struct Cur<'t, 'a> {
    toks: &'t [Tok<'a>],
    pos: usize,
    line: usize,
}

impl<'t, 'a> Cur<'t, 'a> {
    fn new(toks: &'t [Tok<'a>]) -> Self {
        let line = toks.first().map(|t| t.line).unwrap_or(0);
        Cur { toks, pos: 0, line }
    }

    fn peek(&self) -> Option<&'t Tok<'a>> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'t Tok<'a>> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t.s == want => Ok(()),
            Some(t) => Err(err(t, ParseErrorKind::Syntax, format!("expected `{want}`, found `{}`", t.s))),
            None => Err(ParseError::new(
                self.line,
                self.end_col(),
                ParseErrorKind::Syntax,
                format!("expected `{want}` before end of line"),
            )),
        }
    }

    fn end_col(&self) -> usize {
        self.toks.last().map(|t| t.col + t.s.len()).unwrap_or(1)
    }

    fn need(&mut self, what: &str) -> Result<&'t Tok<'a>, ParseError> {
        let (line, col) = (self.line, self.end_col());
        match self.next() {
            Some(t) => Ok(t),
            None => Err(ParseError::new(line, col, ParseErrorKind::Syntax, format!("expected {what} before end of line"))),
        }
    }

    fn done(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(err(t, ParseErrorKind::Syntax, format!("unexpected `{}`", t.s))),
        }
    }
}

fn parse_u32(tok: &Tok) -> Result<u32, ParseError> {
    tok.s
        .parse::<u32>()
        .map_err(|_| err(tok, ParseErrorKind::Syntax, format!("expected a number, found `{}`", tok.s)))
}

/// Raw symtab description, resolved after all lines are read.
enum RawDesc<'a> {
    Prime(RawSymRef<'a>),
    Index(RawSymRef<'a>, u32),
    Stage(RawSymRef<'a>, u32, u32),
    Pack(Vec<RawSymRef<'a>>),
    Tag(RawSymRef<'a>, Vec<(RawTagItem<'a>, bool)>),
}

/// A symbol mention inside a symtab expression: a declared name, a `#k`
/// reference, or an inline atom. The inline forms `nt(X)`/`t(x)` exist
/// because a constructed symbol's base need not belong to the device's
/// alphabet, so it may have no declaration to fix its class.
enum RawSymRef<'a> {
    Name(Tok<'a>),
    Atom(Tok<'a>, SymbolClass),
}

impl<'a> RawSymRef<'a> {
    fn tok(&self) -> &Tok<'a> {
        match self {
            RawSymRef::Name(t) | RawSymRef::Atom(t, _) => t,
        }
    }
}

enum RawTagItem<'a> {
    Sym(RawSymRef<'a>),
    Label(u32),
}

fn parse_sym_ref<'a>(cur: &mut Cur<'_, 'a>) -> Result<RawSymRef<'a>, ParseError> {
    let t = *cur.need("a symbol")?;
    let class = match t.s {
        "nt" => SymbolClass::Nonterminal,
        "t" => SymbolClass::Terminal,
        _ => return Ok(RawSymRef::Name(t)),
    };
    // Only a constructor when followed by `(`; plain symbols named
    // `nt` or `t` still resolve as names.
    if cur.peek().map(|x| x.s) != Some("(") {
        return Ok(RawSymRef::Name(t));
    }
    cur.next();
    let name = *cur.need("a name")?;
    cur.expect(")")?;
    Ok(RawSymRef::Atom(name, class))
}

struct RawProduction<'a> {
    lhs: Tok<'a>,
    rhs: Vec<Tok<'a>>,
    per: Vec<Vec<Tok<'a>>>,
    forb: Vec<Vec<Tok<'a>>>,
}

struct RawDoc<'a> {
    kind: Option<(Tok<'a>, String)>,
    mode: Option<(Tok<'a>, Mode)>,
    degree: Option<(u32, u32)>,
    nonterminal_toks: Vec<Tok<'a>>,
    terminal_toks: Vec<Tok<'a>>,
    start: Option<Tok<'a>>,
    // (component index alive when the production appeared, production)
    productions: Vec<(usize, RawProduction<'a>)>,
    component_count: usize,
    symtab: BTreeMap<u32, (Tok<'a>, RawDesc<'a>)>,
}

fn parse_desc<'a>(cur: &mut Cur<'_, 'a>) -> Result<RawDesc<'a>, ParseError> {
    let head = *cur.need("a symbol description")?;
    match head.s {
        "prime" => {
            cur.expect("(")?;
            let s = parse_sym_ref(cur)?;
            cur.expect(")")?;
            Ok(RawDesc::Prime(s))
        }
        "index" => {
            cur.expect("(")?;
            let s = parse_sym_ref(cur)?;
            cur.expect(",")?;
            let i = parse_u32(cur.need("an index")?)?;
            cur.expect(")")?;
            Ok(RawDesc::Index(s, i))
        }
        "stage" => {
            cur.expect("(")?;
            let s = parse_sym_ref(cur)?;
            cur.expect(",")?;
            let i = parse_u32(cur.need("an index")?)?;
            cur.expect(",")?;
            let j = parse_u32(cur.need("a stage")?)?;
            cur.expect(")")?;
            Ok(RawDesc::Stage(s, i, j))
        }
        "pack" => {
            cur.expect("(")?;
            let mut items = Vec::new();
            while cur.peek().map(|t| t.s) != Some(")") {
                items.push(parse_sym_ref(cur)?);
            }
            cur.expect(")")?;
            if items.is_empty() {
                return Err(err(&head, ParseErrorKind::Syntax, "pack needs at least one symbol"));
            }
            Ok(RawDesc::Pack(items))
        }
        "tag" => {
            cur.expect("(")?;
            let base = parse_sym_ref(cur)?;
            cur.expect(",")?;
            cur.expect("{")?;
            let mut items = Vec::new();
            if cur.peek().map(|t| t.s) == Some("}") {
                cur.next();
            } else {
                loop {
                    let t = *cur.need("a tag item")?;
                    let (primed, is_label) = match t.s {
                        "sym" => (false, false),
                        "sym'" => (true, false),
                        "label" => (false, true),
                        "label'" => (true, true),
                        _ => return Err(err(&t, ParseErrorKind::Syntax, format!("expected sym/sym'/label/label', found `{}`", t.s))),
                    };
                    cur.expect("(")?;
                    let item = if is_label {
                        RawTagItem::Label(parse_u32(cur.need("a label")?)?)
                    } else {
                        RawTagItem::Sym(parse_sym_ref(cur)?)
                    };
                    cur.expect(")")?;
                    items.push((item, primed));
                    let sep = *cur.need("`,` or `}`")?;
                    match sep.s {
                        "," => continue,
                        "}" => break,
                        _ => return Err(err(&sep, ParseErrorKind::Syntax, format!("expected `,` or `}}`, found `{}`", sep.s))),
                    }
                }
            }
            cur.expect(")")?;
            Ok(RawDesc::Tag(base, items))
        }
        _ => Err(err(&head, ParseErrorKind::Syntax, format!("unknown symbol constructor `{}`", head.s))),
    }
}

fn parse_conds<'a>(cur: &mut Cur<'_, 'a>, out: &mut Vec<Vec<Tok<'a>>>, stop: &str) -> Result<(), ParseError> {
    while let Some(t) = cur.peek() {
        if t.s == stop {
            break;
        }
        let t = *cur.next().unwrap();
        if t.s == "(" {
            let mut cond = Vec::new();
            loop {
                let s = *cur.need("a symbol or `)`")?;
                if s.s == ")" {
                    break;
                }
                cond.push(s);
            }
            if cond.is_empty() {
                return Err(err(&t, ParseErrorKind::ConditionShape, "empty condition string"));
            }
            out.push(cond);
        } else if "){},=".contains(t.s) {
            return Err(err(&t, ParseErrorKind::Syntax, format!("unexpected `{}` in condition list", t.s)));
        } else {
            out.push(vec![t]);
        }
    }
    Ok(())
}

fn parse_production<'a>(toks: &[Tok<'a>]) -> Result<RawProduction<'a>, ParseError> {
    let mut cur = Cur::new(toks);
    let lhs = *cur.need("a left-hand side")?;
    cur.expect("->")?;
    let mut rhs = Vec::new();
    let mut per = Vec::new();
    let mut forb = Vec::new();
    // rhs until `per`/`for`/end
    while let Some(t) = cur.peek() {
        if t.s == "per" || t.s == "for" {
            break;
        }
        let t = *cur.next().unwrap();
        if "(){},=".contains(t.s) {
            return Err(err(&t, ParseErrorKind::Syntax, format!("unexpected `{}` in right-hand side", t.s)));
        }
        rhs.push(t);
    }
    if rhs.is_empty() {
        return Err(ParseError::new(lhs.line, lhs.col, ParseErrorKind::EmptyRhs, "production has an empty right-hand side"));
    }
    while let Some(t) = cur.peek() {
        match t.s {
            "per" => {
                cur.next();
                parse_conds(&mut cur, &mut per, "for")?;
            }
            "for" => {
                cur.next();
                parse_conds(&mut cur, &mut forb, "per")?;
            }
            _ => return Err(err(t, ParseErrorKind::Syntax, format!("unexpected `{}`", t.s))),
        }
    }
    Ok(RawProduction { lhs, rhs, per, forb })
}

fn collect<'a>(text: &'a str) -> Result<RawDoc<'a>, ParseError> {
    let mut doc = RawDoc {
        kind: None,
        mode: None,
        degree: None,
        nonterminal_toks: Vec::new(),
        terminal_toks: Vec::new(),
        start: None,
        productions: Vec::new(),
        component_count: 0,
        symtab: BTreeMap::new(),
    };
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize(line_no, raw_line)?;
        if toks.is_empty() {
            continue;
        }
        // A line whose second token is `->` is always a production, so
        // directive words stay usable as plain symbol names.
        if toks.len() >= 2 && toks[1].s == "->" {
            let current = doc.component_count;
            doc.productions.push((current, parse_production(&toks)?));
            continue;
        }
        let head = toks[0];
        let mut cur = Cur::new(&toks);
        cur.next();
        let dup = |name: &str, present: bool| -> Result<(), ParseError> {
            if present {
                Err(err(&head, ParseErrorKind::DuplicateDeclaration, format!("`{name}` declared twice")))
            } else {
                Ok(())
            }
        };
        match head.s {
            "kind" => {
                dup("kind", doc.kind.is_some())?;
                let k = cur.need("a kind")?;
                doc.kind = Some((*k, k.s.to_string()));
                cur.done()?;
            }
            "mode" => {
                dup("mode", doc.mode.is_some())?;
                let m = cur.need("a mode")?;
                let mode = match m.s {
                    "def1" => Mode::Def1,
                    "def2" => Mode::Def2,
                    other => return Err(err(m, ParseErrorKind::Syntax, format!("unknown mode `{other}`"))),
                };
                doc.mode = Some((*m, mode));
                cur.done()?;
            }
            "degree" => {
                dup("degree", doc.degree.is_some())?;
                let i = parse_u32(cur.need("the permitting degree")?)?;
                let j = parse_u32(cur.need("the forbidding degree")?)?;
                doc.degree = Some((i, j));
                cur.done()?;
            }
            "nonterminals" => {
                dup("nonterminals", !doc.nonterminal_toks.is_empty())?;
                while let Some(t) = cur.next() {
                    doc.nonterminal_toks.push(*t);
                }
            }
            "terminals" => {
                dup("terminals", !doc.terminal_toks.is_empty())?;
                while let Some(t) = cur.next() {
                    doc.terminal_toks.push(*t);
                }
            }
            "start" => {
                dup("start", doc.start.is_some())?;
                doc.start = Some(*cur.need("a symbol")?);
                cur.done()?;
            }
            "component" => {
                let k = parse_u32(cur.need("a component number")?)?;
                cur.done()?;
                if k as usize != doc.component_count + 1 {
                    return Err(err(
                        &head,
                        ParseErrorKind::Syntax,
                        format!("components must be numbered in order; expected {}", doc.component_count + 1),
                    ));
                }
                doc.component_count += 1;
            }
            "symtab" => {
                let name = *cur.need("a generated name")?;
                if !name.s.starts_with('#') {
                    return Err(err(&name, ParseErrorKind::Syntax, format!("expected `#k`, found `{}`", name.s)));
                }
                let k: u32 = name.s[1..]
                    .parse()
                    .map_err(|_| err(&name, ParseErrorKind::Syntax, format!("bad generated name `{}`", name.s)))?;
                cur.expect("=")?;
                let desc = parse_desc(&mut cur)?;
                cur.done()?;
                if doc.symtab.insert(k, (name, desc)).is_some() {
                    return Err(err(&name, ParseErrorKind::DuplicateSymtab, format!("`{}` defined twice", name.s)));
                }
            }
            other => {
                return Err(err(&head, ParseErrorKind::Syntax, format!("unknown directive `{other}`")));
            }
        }
    }
    Ok(doc)
}

struct Resolver<'a> {
    atoms: HashMap<&'a str, Symbol>,
    symtab_raw: BTreeMap<u32, (Tok<'a>, RawDesc<'a>)>,
    resolved: HashMap<u32, Symbol>,
    in_progress: BTreeSet<u32>,
}

impl<'a> Resolver<'a> {
    fn lookup(&mut self, tok: &Tok<'a>) -> Result<Symbol, ParseError> {
        if let Some(rest) = tok.s.strip_prefix('#') {
            let k: u32 = rest
                .parse()
                .map_err(|_| err(tok, ParseErrorKind::Syntax, format!("bad generated name `{}`", tok.s)))?;
            return self.resolve_generated(k, tok);
        }
        self.atoms
            .get(tok.s)
            .cloned()
            .ok_or_else(|| err(tok, ParseErrorKind::UnknownSymbol, format!("`{}` is not declared", tok.s)))
    }

    fn lookup_ref(&mut self, r: &RawSymRef<'a>) -> Result<Symbol, ParseError> {
        match r {
            RawSymRef::Name(t) => self.lookup(t),
            RawSymRef::Atom(t, class) => Symbol::atom(t.s, *class)
                .map_err(|e| err(t, ParseErrorKind::Syntax, e.to_string())),
        }
    }

    fn resolve_generated(&mut self, k: u32, at: &Tok<'a>) -> Result<Symbol, ParseError> {
        if let Some(s) = self.resolved.get(&k) {
            return Ok(s.clone());
        }
        if !self.in_progress.insert(k) {
            return Err(err(at, ParseErrorKind::CyclicSymtab, format!("`#{k}` is defined in terms of itself")));
        }
        let (_, desc) = self
            .symtab_raw
            .remove(&k)
            .ok_or_else(|| err(at, ParseErrorKind::UnknownName, format!("`#{k}` has no symtab entry")))?;
        let sym = match desc {
            RawDesc::Prime(b) => self.lookup_ref(&b)?.primed(),
            RawDesc::Index(b, i) => {
                let base = self.lookup_ref(&b)?;
                if i == 0 {
                    return Err(err(b.tok(), ParseErrorKind::Syntax, "index must be positive"));
                }
                base.indexed(i)
            }
            RawDesc::Stage(b, i, j) => {
                let base = self.lookup_ref(&b)?;
                if i == 0 || j == 0 {
                    return Err(err(b.tok(), ParseErrorKind::Syntax, "index and stage must be positive"));
                }
                base.staged(i, j)
            }
            RawDesc::Pack(items) => {
                let mut syms = Vec::with_capacity(items.len());
                for t in &items {
                    syms.push(self.lookup_ref(t)?);
                }
                Symbol::packed(syms)
            }
            RawDesc::Tag(base, items) => {
                let base = self.lookup_ref(&base)?;
                let mut set = BTreeSet::new();
                for (item, primed) in items {
                    let tag = match item {
                        RawTagItem::Sym(t) => TagItem::Sym { sym: self.lookup_ref(&t)?, primed },
                        RawTagItem::Label(l) => TagItem::Label { label: l, primed },
                    };
                    set.insert(tag);
                }
                Symbol::set_tagged(&base, set)
            }
        };
        self.in_progress.remove(&k);
        self.resolved.insert(k, sym.clone());
        Ok(sym)
    }
}

fn build_conds<'a>(
    res: &mut Resolver<'a>,
    raw_conds: &[Vec<Tok<'a>>],
    degree: Option<u32>,
    side: &str,
) -> Result<BTreeSet<Condition>, ParseError> {
    let mut out = BTreeSet::new();
    for cond in raw_conds {
        if let Some(d) = degree {
            if cond.len() as u32 > d {
                return Err(err(
                    &cond[0],
                    ParseErrorKind::ConditionShape,
                    format!("{side} condition of length {} exceeds what the declared kind allows ({d})", cond.len()),
                ));
            }
        }
        let mut syms = Vec::with_capacity(cond.len());
        for t in cond {
            syms.push(res.lookup(t)?);
        }
        out.insert(Condition::new(syms).expect("parser rejects empty conditions"));
    }
    Ok(out)
}

fn build_production<'a>(
    raw: &RawProduction<'a>,
    label: u32,
    res: &mut Resolver<'a>,
    shape: &KindShape,
) -> Result<Production, ParseError> {
    let lhs = res.lookup(&raw.lhs)?;
    let mut rhs = Vec::with_capacity(raw.rhs.len());
    for t in &raw.rhs {
        rhs.push(res.lookup(t)?);
    }
    let per = build_conds(res, &raw.per, shape.per_len, "permitting")?;
    let forb = build_conds(res, &raw.forb, shape.forb_len, "forbidding")?;
    if let Some(max) = shape.max_conds {
        if per.len() > max || forb.len() > max {
            return Err(err(
                &raw.lhs,
                ParseErrorKind::ConditionShape,
                "at most one permitting and one forbidding condition allowed for this kind".to_string(),
            ));
        }
    }
    if lhs.is_terminal() {
        return Err(err(&raw.lhs, ParseErrorKind::Syntax, format!("left-hand side `{}` is a terminal", raw.lhs.s)));
    }
    Ok(Production { label, lhs, rhs, per, forb })
}

/// Parse-time condition limits implied by the declared kind.
struct KindShape {
    per_len: Option<u32>,
    forb_len: Option<u32>,
    max_conds: Option<usize>,
}

fn declare_atoms<'a>(
    toks: &[Tok<'a>],
    class: SymbolClass,
    atoms: &mut HashMap<&'a str, Symbol>,
) -> Result<(), ParseError> {
    for t in toks {
        if t.s.starts_with('#') {
            if class == SymbolClass::Terminal {
                return Err(err(t, ParseErrorKind::Syntax, "constructed symbols cannot be terminals"));
            }
            continue;
        }
        let sym = Symbol::atom(t.s, class).map_err(|e| err(t, ParseErrorKind::Syntax, e.to_string()))?;
        if atoms.insert(t.s, sym).is_some() {
            return Err(err(t, ParseErrorKind::DuplicateDeclaration, format!("`{}` declared twice", t.s)));
        }
    }
    Ok(())
}

pub fn parse_device(text: &str) -> Result<Device, ParseError> {
    let doc = collect(text)?;
    let (kind_tok, kind_name) = doc
        .kind
        .as_ref()
        .ok_or_else(|| ParseError::new(1, 1, ParseErrorKind::MissingSection, "missing `kind` line"))?;

    let mut atoms: HashMap<&str, Symbol> = HashMap::new();
    declare_atoms(&doc.nonterminal_toks, SymbolClass::Nonterminal, &mut atoms)?;
    declare_atoms(&doc.terminal_toks, SymbolClass::Terminal, &mut atoms)?;

    let mut res = Resolver {
        atoms,
        symtab_raw: doc.symtab,
        resolved: HashMap::new(),
        in_progress: BTreeSet::new(),
    };

    let mut nonterminals = BTreeSet::new();
    for t in &doc.nonterminal_toks {
        let sym = res.lookup(t)?;
        if !nonterminals.insert(sym) {
            return Err(err(t, ParseErrorKind::DuplicateDeclaration, format!("`{}` declared twice", t.s)));
        }
    }
    let mut terminals = BTreeSet::new();
    for t in &doc.terminal_toks {
        let sym = res.lookup(t)?;
        if !terminals.insert(sym) {
            return Err(err(t, ParseErrorKind::DuplicateDeclaration, format!("`{}` declared twice", t.s)));
        }
    }

    let start_tok = doc
        .start
        .ok_or_else(|| ParseError::new(1, 1, ParseErrorKind::MissingSection, "missing `start` line"))?;
    let start = res.lookup(&start_tok)?;

    let shape = match kind_name.as_str() {
        "rc" | "permitting" | "forbidding" | "cd" => {
            KindShape { per_len: Some(1), forb_len: Some(1), max_conds: None }
        }
        "sc" => {
            let (i, j) = doc.degree.unwrap_or((1, 1));
            KindShape { per_len: Some(i), forb_len: Some(j), max_conds: Some(1) }
        }
        other => {
            return Err(err(kind_tok, ParseErrorKind::Syntax, format!("unknown kind `{other}`")));
        }
    };

    if kind_name == "cd" {
        if let Some((mode_tok, mode)) = &doc.mode {
            if *mode != Mode::Def1 {
                return Err(err(mode_tok, ParseErrorKind::WrongKind, "CD systems always rewrite under def1"));
            }
        }
        if doc.degree.is_some() {
            return Err(err(kind_tok, ParseErrorKind::WrongKind, "`degree` applies only to sc grammars"));
        }
        if doc.component_count == 0 {
            return Err(ParseError::new(1, 1, ParseErrorKind::MissingSection, "cd document has no `component` lines"));
        }
        let mut components: Vec<Vec<Production>> = vec![Vec::new(); doc.component_count];
        for (comp, raw) in &doc.productions {
            if *comp == 0 {
                return Err(err(&raw.lhs, ParseErrorKind::Syntax, "production appears before the first `component` line"));
            }
            let label = components[comp - 1].len() as u32 + 1;
            let p = build_production(raw, label, &mut res, &shape)?;
            components[comp - 1].push(p);
        }
        return Ok(Device::System(CDSystem { nonterminals, terminals, start, components }));
    }

    if doc.component_count > 0 {
        return Err(ParseError::new(1, 1, ParseErrorKind::WrongKind, "`component` lines are only valid in cd documents"));
    }
    let kind = match kind_name.as_str() {
        "rc" => GrammarKind::Rc,
        "permitting" => GrammarKind::Permitting,
        "forbidding" => GrammarKind::Forbidding,
        "sc" => {
            let (i, j) = doc.degree.unwrap_or((1, 1));
            GrammarKind::Sc { per_degree: i, forb_degree: j }
        }
        _ => unreachable!(),
    };
    if doc.degree.is_some() && kind_name != "sc" {
        return Err(err(kind_tok, ParseErrorKind::WrongKind, "`degree` applies only to sc grammars"));
    }
    let mode = doc.mode.map(|(_, m)| m).unwrap_or_else(|| kind.default_mode());
    let mut productions = Vec::with_capacity(doc.productions.len());
    for (i, (_, raw)) in doc.productions.iter().enumerate() {
        productions.push(build_production(raw, i as u32 + 1, &mut res, &shape)?);
    }
    Ok(Device::Grammar(Grammar { kind, mode, nonterminals, terminals, start, productions }))
}

pub fn parse_grammar(text: &str) -> Result<Grammar, ParseError> {
    match parse_device(text)? {
        Device::Grammar(g) => Ok(g),
        Device::System(_) => Err(ParseError::new(1, 1, ParseErrorKind::WrongKind, "expected a grammar, found a cd system")),
    }
}

pub fn parse_system(text: &str) -> Result<CDSystem, ParseError> {
    match parse_device(text)? {
        Device::System(s) => Ok(s),
        Device::Grammar(_) => Err(ParseError::new(1, 1, ParseErrorKind::WrongKind, "expected a cd system, found a grammar")),
    }
}
