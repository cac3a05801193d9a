use crate::store::{vocab, Comparison, Filter, Iri, Literal, PatternTerm, Term, TriplePattern};

use super::lexer::{lex, Tok, Token};
use super::{Rule, RuleError};

/// Parses one rule. The name comes from a `# rule: <name>` comment, falling
/// back to `"rule"`.
pub fn parse_rule(text: &str) -> Result<Rule, RuleError> {
    parse_with_default(text, "rule", 0)
}

/// Parses a file of rules separated by lines holding only `---`. Unnamed
/// rules are called `rule_<n>` (1-based).
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, RuleError> {
    let mut out = Vec::new();
    let mut chunk = String::new();
    let mut chunk_start = 0;
    let flush = |chunk: &mut String, start: usize, out: &mut Vec<Rule>| -> Result<(), RuleError> {
        if !chunk.trim().is_empty() {
            let default = format!("rule_{}", out.len() + 1);
            out.push(parse_with_default(chunk, &default, start)?);
        }
        chunk.clear();
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            flush(&mut chunk, chunk_start, &mut out)?;
            chunk_start = i + 1;
        } else {
            chunk.push_str(line);
            chunk.push('\n');
        }
    }
    flush(&mut chunk, chunk_start, &mut out)?;
    Ok(out)
}

pub(crate) fn parse_with_default(text: &str, default_name: &str, line_offset: usize) -> Result<Rule, RuleError> {
    let shift = |e: RuleError| match e {
        RuleError::Syntax { line, col, message } => RuleError::Syntax { line: line + line_offset, col, message },
        other => other,
    };
    let lexed = lex(text).map_err(shift)?;
    let end = text.lines().count().max(1);
    let mut p = Parser { tokens: &lexed.tokens, pos: 0, prefixes: Vec::new(), end_line: end };
    let (construct, where_patterns, filter) = p.rule().map_err(shift)?;
    let name = lexed.name.unwrap_or_else(|| default_name.to_string());
    Rule::new(name, p.prefixes, construct, where_patterns, filter)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    prefixes: Vec<(String, String)>,
    end_line: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Position {
    Subject,
    Predicate,
    Object,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn error_at(&self, tok: Option<&Token>, message: impl Into<String>) -> RuleError {
        let (line, col) = tok.map_or((self.end_line, 1), |t| (t.line, t.col));
        RuleError::Syntax { line, col, message: message.into() }
    }

    fn is_keyword(tok: Option<&Token>, kw: &str) -> bool {
        matches!(tok, Some(Token { tok: Tok::Word(w), .. }) if w.eq_ignore_ascii_case(kw))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), RuleError> {
        let t = self.next();
        if Self::is_keyword(t, kw) {
            Ok(())
        } else {
            Err(self.error_at(t, format!("expected {kw}")))
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), RuleError> {
        let t = self.next();
        if t.map(|t| &t.tok) == Some(&want) {
            Ok(())
        } else {
            Err(self.error_at(t, format!("expected {what}")))
        }
    }

    fn rule(&mut self) -> Result<(Vec<TriplePattern>, Vec<TriplePattern>, Filter), RuleError> {
        while Self::is_keyword(self.peek(), "prefix") {
            self.next();
            let t = self.next();
            let Some(Token { tok: Tok::PName { prefix, local }, .. }) = t else {
                return Err(self.error_at(t, "expected a prefix name such as `fwi:`"));
            };
            if !local.is_empty() {
                return Err(self.error_at(t, "prefix name must end with ':'"));
            }
            let t = self.next();
            let Some(Token { tok: Tok::IriRef(iri), .. }) = t else {
                return Err(self.error_at(t, "expected <iri>"));
            };
            self.prefixes.retain(|(p, _)| p != prefix);
            self.prefixes.push((prefix.clone(), iri.clone()));
        }
        self.expect_keyword("construct")?;
        self.expect(Tok::LBrace, "'{'")?;
        let (construct, _) = self.block(false)?;
        self.expect_keyword("where")?;
        self.expect(Tok::LBrace, "'{'")?;
        let (where_patterns, filter) = self.block(true)?;
        if let Some(t) = self.peek() {
            return Err(self.error_at(Some(t), "unexpected input after WHERE block"));
        }
        Ok((construct, where_patterns, filter))
    }

    /// Triples up to and including the closing brace.
    fn block(&mut self, allow_filter: bool) -> Result<(Vec<TriplePattern>, Filter), RuleError> {
        let mut triples = Vec::new();
        let mut filter = Filter::default();
        loop {
            match self.peek() {
                None => return Err(self.error_at(None, "expected '}'")),
                Some(Token { tok: Tok::RBrace, .. }) => {
                    self.next();
                    return Ok((triples, filter));
                }
                Some(Token { tok: Tok::Dot, .. }) => {
                    self.next();
                }
                t if Self::is_keyword(t, "filter") => {
                    if !allow_filter {
                        return Err(self.error_at(t, "FILTER is only allowed in WHERE"));
                    }
                    self.next();
                    filter.comparisons.extend(self.filter()?);
                }
                _ => {
                    let s = self.term(Position::Subject)?;
                    let p = self.term(Position::Predicate)?;
                    let o = self.term(Position::Object)?;
                    triples.push(TriplePattern { subject: s, predicate: p, object: o });
                }
            }
        }
    }

    fn filter(&mut self) -> Result<Vec<Comparison>, RuleError> {
        self.expect(Tok::LParen, "'(' after FILTER")?;
        let mut out = vec![self.comparison()?];
        loop {
            let t = self.next();
            match t.map(|t| &t.tok) {
                Some(Tok::And) => out.push(self.comparison()?),
                Some(Tok::RParen) => return Ok(out),
                _ => return Err(self.error_at(t, "expected '&&' or ')'")),
            }
        }
    }

    fn comparison(&mut self) -> Result<Comparison, RuleError> {
        let a = self.next();
        let op = self.next();
        let b = self.next();
        let Some(Token { tok: Tok::Cmp(op), .. }) = op else {
            return Err(self.error_at(op, "expected a comparison operator"));
        };
        match (a.map(|t| &t.tok), b.map(|t| &t.tok)) {
            (Some(Tok::Var(v)), Some(Tok::Number(n))) => Ok(Comparison::new(v.clone(), *op, *n)),
            (Some(Tok::Number(n)), Some(Tok::Var(v))) => Ok(Comparison::new(v.clone(), op.flipped(), *n)),
            _ => Err(self.error_at(a, "comparisons relate one variable and one number")),
        }
    }

    fn resolve(&self, tok: &Token, prefix: &str, local: &str) -> Result<Iri, RuleError> {
        let base = self
            .prefixes
            .iter()
            .rev()
            .find(|(p, _)| p == prefix)
            .map(|(_, b)| b.as_str())
            .or_else(|| vocab::standard_prefix(prefix))
            .ok_or_else(|| self.error_at(Some(tok), format!("undeclared prefix {prefix:?}")))?;
        Iri::new(format!("{base}{local}")).map_err(|e| self.error_at(Some(tok), e.to_string()))
    }

    fn term(&mut self, pos: Position) -> Result<PatternTerm, RuleError> {
        let t = self.next();
        let Some(tok) = t else {
            return Err(self.error_at(None, "unexpected end of input"));
        };
        let iri_term = |iri: Iri| PatternTerm::Const(Term::Iri(iri));
        match &tok.tok {
            Tok::Var(v) => Ok(PatternTerm::Var(v.clone())),
            Tok::IriRef(s) => Iri::new(s.clone()).map(iri_term).map_err(|e| self.error_at(t, e.to_string())),
            Tok::PName { prefix, local } => self.resolve(tok, prefix, local).map(iri_term),
            Tok::Word(w) if w == "a" && pos == Position::Predicate => Ok(iri_term(vocab::rdf_type())),
            Tok::Number(n) if pos == Position::Object => {
                let lit = Literal::decimal(*n).map_err(|e| self.error_at(t, e.to_string()))?;
                Ok(PatternTerm::Const(Term::Literal(lit)))
            }
            Tok::Str(s) if pos == Position::Object => self.typed_literal(tok, s),
            _ => Err(self.error_at(t, "expected a variable, IRI or literal")),
        }
    }

    fn typed_literal(&mut self, at: &Token, lexical: &str) -> Result<PatternTerm, RuleError> {
        if !matches!(self.peek(), Some(Token { tok: Tok::DoubleCaret, .. })) {
            return Ok(PatternTerm::Const(Term::Literal(Literal::String(lexical.into()))));
        }
        self.next();
        let t = self.next();
        let datatype = match t.map(|t| &t.tok) {
            Some(Tok::IriRef(s)) => s.clone(),
            Some(Tok::PName { prefix, local }) => self.resolve(t.expect("matched"), prefix, local)?.as_str().to_string(),
            _ => return Err(self.error_at(t, "expected a datatype IRI")),
        };
        let bad = || self.error_at(Some(at), format!("invalid {datatype} literal {lexical:?}"));
        let lit = match datatype.strip_prefix(vocab::XSD) {
            Some("decimal") | Some("double") | Some("float") | Some("integer") => {
                Literal::decimal(lexical.parse().map_err(|_| bad())?).map_err(|_| bad())?
            }
            Some("dateTime") => Literal::DateTime(lexical.parse().map_err(|_| bad())?),
            Some("string") => Literal::String(lexical.into()),
            _ => return Err(self.error_at(t, format!("unsupported datatype {datatype}"))),
        };
        Ok(PatternTerm::Const(Term::Literal(lit)))
    }
}
