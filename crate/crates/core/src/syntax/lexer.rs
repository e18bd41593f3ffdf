use super::ast::Span;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    // keywords
    Let,
    DLet,
    In,
    Case,
    Of,
    Inl,
    Inr,
    Add,
    Sub,
    Mul,
    DMul,
    Div,
    Num,
    UnitTy,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Define,
    Eq,
    Arrow,
    Bar,
    Bang,
    Caret,
    Star,
    Plus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Let => "let",
            Tok::DLet => "dlet",
            Tok::In => "in",
            Tok::Case => "case",
            Tok::Of => "of",
            Tok::Inl => "inl",
            Tok::Inr => "inr",
            Tok::Add => "add",
            Tok::Sub => "sub",
            Tok::Mul => "mul",
            Tok::DMul => "dmul",
            Tok::Div => "div",
            Tok::Num => "num",
            Tok::UnitTy => "unit",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Define => ":=",
            Tok::Eq => "=",
            Tok::Arrow => "=>",
            Tok::Bar => "|",
            Tok::Bang => "!",
            Tok::Caret => "^",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "let" => Tok::Let,
        "dlet" => Tok::DLet,
        "in" => Tok::In,
        "case" => Tok::Case,
        "of" => Tok::Of,
        "inl" => Tok::Inl,
        "inr" => Tok::Inr,
        "add" => Tok::Add,
        "sub" => Tok::Sub,
        "mul" => Tok::Mul,
        "dmul" => Tok::DMul,
        "div" => Tok::Div,
        "num" => Tok::Num,
        "unit" => Tok::UnitTy,
        _ => return None,
    })
}

pub fn is_keyword(s: &str) -> bool {
    keyword(s).is_some()
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, SyntaxError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '/' && bytes.get(i + 1) == Some(&b'/') {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if is_ident_start(c) {
            let mut end = i;
            while let Some(&(j, c)) = chars.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                end = j + c.len_utf8();
                chars.next();
            }
            let word = &src[i..end];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            out.push((tok, Span::new(i, end)));
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, c)) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            let span = Span::new(i, end);
            let n = src[i..end]
                .parse()
                .map_err(|_| SyntaxError::lexical("integer literal too large", span))?;
            out.push((Tok::Int(n), span));
            continue;
        }
        chars.next();
        let two = |next: u8| bytes.get(i + 1) == Some(&next);
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            ':' if two(b'=') => (Tok::Define, 2),
            ':' => (Tok::Colon, 1),
            '=' if two(b'>') => (Tok::Arrow, 2),
            '=' => (Tok::Eq, 1),
            '|' => (Tok::Bar, 1),
            '!' => (Tok::Bang, 1),
            '^' => (Tok::Caret, 1),
            '*' => (Tok::Star, 1),
            '+' => (Tok::Plus, 1),
            other => {
                return Err(SyntaxError::lexical(
                    &format!("unexpected character `{other}`"),
                    Span::new(i, i + other.len_utf8()),
                ))
            }
        };
        if len == 2 {
            chars.next();
        }
        out.push((tok, Span::new(i, i + len)));
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    Ok(out)
}
