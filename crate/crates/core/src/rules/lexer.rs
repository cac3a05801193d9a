use crate::store::CompareOp;

use super::RuleError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Bare word: keyword or `a`.
    Word(String),
    Var(String),
    IriRef(String),
    PName { prefix: String, local: String },
    Number(f64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    And,
    Cmp(CompareOp),
    DoubleCaret,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug)]
pub(crate) struct Lexed {
    pub tokens: Vec<Token>,
    /// Value of the first `# rule: <name>` comment.
    pub name: Option<String>,
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

pub(crate) fn lex(src: &str) -> Result<Lexed, RuleError> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    let mut tokens = Vec::new();
    let mut name = None;

    macro_rules! bump {
        () => {{
            let c = chars[i];
            i += 1;
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let err = |message: String| RuleError::Syntax { line: tl, col: tc, message };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            let start = i;
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            let comment: String = chars[start + 1..i].iter().collect();
            if name.is_none() {
                if let Some(rest) = comment.trim().strip_prefix("rule:") {
                    let n = rest.trim();
                    if !n.is_empty() {
                        name = Some(n.to_string());
                    }
                }
            }
            continue;
        }
        let push = |tokens: &mut Vec<Token>, tok| tokens.push(Token { tok, line: tl, col: tc });
        match c {
            '{' => {
                bump!();
                push(&mut tokens, Tok::LBrace);
            }
            '}' => {
                bump!();
                push(&mut tokens, Tok::RBrace);
            }
            '(' => {
                bump!();
                push(&mut tokens, Tok::LParen);
            }
            ')' => {
                bump!();
                push(&mut tokens, Tok::RParen);
            }
            '.' if !chars.get(i + 1).is_some_and(char::is_ascii_digit) => {
                bump!();
                push(&mut tokens, Tok::Dot);
            }
            '&' => {
                bump!();
                if chars.get(i) != Some(&'&') {
                    return Err(err("expected '&&'".into()));
                }
                bump!();
                push(&mut tokens, Tok::And);
            }
            '^' => {
                bump!();
                if chars.get(i) != Some(&'^') {
                    return Err(err("expected '^^'".into()));
                }
                bump!();
                push(&mut tokens, Tok::DoubleCaret);
            }
            '<' | '>' | '=' => {
                // `<` opens an IRI unless it is a comparison.
                if c == '<' {
                    let rest: String = chars[i + 1..].iter().take_while(|&&x| x != '>' && x != '\n').collect();
                    let closes = chars.get(i + 1 + rest.chars().count()) == Some(&'>');
                    if closes && !rest.is_empty() && !rest.contains(char::is_whitespace) && rest.contains(':') {
                        for _ in 0..rest.chars().count() + 2 {
                            bump!();
                        }
                        push(&mut tokens, Tok::IriRef(rest));
                        continue;
                    }
                }
                bump!();
                let eq = chars.get(i) == Some(&'=');
                if eq {
                    bump!();
                }
                let op = match (c, eq) {
                    ('<', false) => CompareOp::Lt,
                    ('<', true) => CompareOp::Le,
                    ('>', false) => CompareOp::Gt,
                    ('>', true) => CompareOp::Ge,
                    ('=', _) => CompareOp::Eq,
                    _ => unreachable!(),
                };
                push(&mut tokens, Tok::Cmp(op));
            }
            '?' | '$' => {
                bump!();
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    bump!();
                }
                if start == i {
                    return Err(err("expected a variable name".into()));
                }
                push(&mut tokens, Tok::Var(chars[start..i].iter().collect()));
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    let Some(&ch) = chars.get(i) else {
                        return Err(err("unterminated string".into()));
                    };
                    bump!();
                    match ch {
                        '"' => break,
                        '\n' => return Err(err("unterminated string".into())),
                        '\\' => {
                            let Some(&e) = chars.get(i) else {
                                return Err(err("unterminated string".into()));
                            };
                            bump!();
                            s.push(match e {
                                'n' => '\n',
                                't' => '\t',
                                'r' => '\r',
                                '"' => '"',
                                '\\' => '\\',
                                other => return Err(err(format!("unknown escape \\{other}"))),
                            });
                        }
                        other => s.push(other),
                    }
                }
                push(&mut tokens, Tok::Str(s));
            }
            c if c.is_ascii_digit() || ((c == '-' || c == '+' || c == '.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit() || *d == '.')) => {
                let start = i;
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
                if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                    bump!();
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        bump!();
                    }
                }
                if matches!(chars.get(i), Some('e' | 'E')) {
                    let save = (i, line, col);
                    bump!();
                    if matches!(chars.get(i), Some('+' | '-')) {
                        bump!();
                    }
                    if chars.get(i).is_some_and(char::is_ascii_digit) {
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            bump!();
                        }
                    } else {
                        (i, line, col) = save;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text.parse().map_err(|_| err(format!("invalid number {text:?}")))?;
                if !v.is_finite() {
                    return Err(err(format!("number {text:?} is not finite")));
                }
                push(&mut tokens, Tok::Number(v));
            }
            c if is_name_start(c) => {
                let start = i;
                while i < chars.len() && is_name_char(chars[i]) {
                    bump!();
                }
                let word: String = chars[start..i].iter().collect();
                if chars.get(i) == Some(&':') {
                    bump!();
                    let lstart = i;
                    while i < chars.len() && (is_name_char(chars[i]) || chars[i] == '.') {
                        bump!();
                    }
                    // A trailing dot terminates the triple rather than the name.
                    while i > lstart && chars[i - 1] == '.' {
                        i -= 1;
                        col -= 1;
                    }
                    let local: String = chars[lstart..i].iter().collect();
                    push(&mut tokens, Tok::PName { prefix: word, local });
                } else {
                    push(&mut tokens, Tok::Word(word));
                }
            }
            ':' => {
                // Empty prefix, e.g. `:local`.
                bump!();
                let lstart = i;
                while i < chars.len() && (is_name_char(chars[i]) || chars[i] == '.') {
                    bump!();
                }
                while i > lstart && chars[i - 1] == '.' {
                    i -= 1;
                    col -= 1;
                }
                push(&mut tokens, Tok::PName { prefix: String::new(), local: chars[lstart..i].iter().collect() });
            }
            other => return Err(err(format!("unexpected character {other:?}"))),
        }
    }
    Ok(Lexed { tokens, name })
}
