use std::fmt;

use super::{ParseError, ParseErrorKind};
use crate::lang::{SourceSpan, Uint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Contract,
    Transition,
    Continuation,
    If,
    Then,
    Else,
    Let,
    In,
    Send,
    Return,
    Not,
    True,
    False,
    Mt,
    OkMsg,
    NoMsg,
}

impl Keyword {
    pub const ALL: &'static [Keyword] = &[
        Keyword::Contract,
        Keyword::Transition,
        Keyword::Continuation,
        Keyword::If,
        Keyword::Then,
        Keyword::Else,
        Keyword::Let,
        Keyword::In,
        Keyword::Send,
        Keyword::Return,
        Keyword::Not,
        Keyword::True,
        Keyword::False,
        Keyword::Mt,
        Keyword::OkMsg,
        Keyword::NoMsg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Contract => "contract",
            Keyword::Transition => "transition",
            Keyword::Continuation => "continuation",
            Keyword::If => "if",
            Keyword::Then => "then",
            Keyword::Else => "else",
            Keyword::Let => "let",
            Keyword::In => "in",
            Keyword::Send => "send",
            Keyword::Return => "return",
            Keyword::Not => "not",
            Keyword::True => "true",
            Keyword::False => "false",
            Keyword::Mt => "MT",
            Keyword::OkMsg => "ok_msg",
            Keyword::NoMsg => "no_msg",
        }
    }

    pub fn lookup(word: &str) -> Option<Keyword> {
        Keyword::ALL.iter().copied().find(|k| k.as_str() == word)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    Int(Uint),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    /// `<`, also opens a message literal
    Lt,
    /// `>`, closes a message literal
    Gt,
    Comma,
    Semi,
    Colon,
    Assign,
    EqEq,
    Le,
    /// `<-`
    LArrow,
    /// `->`
    RArrow,
    /// `=>`
    FatArrow,
    /// `:=`
    ColonEq,
    Amp,
    AmpAmp,
    PipePipe,
    Plus,
    Minus,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident(s) => return write!(f, "identifier `{s}`"),
            TokenKind::Keyword(k) => return write!(f, "`{}`", k.as_str()),
            TokenKind::Int(n) => return write!(f, "integer `{n}`"),
            TokenKind::Str(s) => return write!(f, "string {s:?}"),
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Lt => "<",
            TokenKind::Gt => ">",
            TokenKind::Comma => ",",
            TokenKind::Semi => ";",
            TokenKind::Colon => ":",
            TokenKind::Assign => "=",
            TokenKind::EqEq => "==",
            TokenKind::Le => "<=",
            TokenKind::LArrow => "<-",
            TokenKind::RArrow => "->",
            TokenKind::FatArrow => "=>",
            TokenKind::ColonEq => ":=",
            TokenKind::Amp => "&",
            TokenKind::AmpAmp => "&&",
            TokenKind::PipePipe => "||",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> (usize, usize) {
        (self.line, self.column)
    }
}

/// Splits source text into tokens, dropping whitespace and (nestable)
/// `(* ... *)` comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor { chars: source.char_indices().peekable(), line: 1, column: 1 };
    let mut out = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = cur.pos();
        let start_span = |len| SourceSpan::new(line, column, len);

        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '(' && cur.peek2() == Some('*') {
            skip_comment(&mut cur, start_span(2))?;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                word.push(c);
                cur.bump();
            }
            let kind = match Keyword::lookup(&word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.clone()),
            };
            out.push(Token { kind, span: start_span(word.len()) });
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_digit()) {
                digits.push(c);
                cur.bump();
            }
            let n = Uint::parse_decimal(&digits).expect("digits parse");
            out.push(Token { kind: TokenKind::Int(n), span: start_span(digits.len()) });
            continue;
        }
        if c == '"' {
            let (text, len) = lex_string(&mut cur, start_span(1))?;
            out.push(Token { kind: TokenKind::Str(text), span: start_span(len) });
            continue;
        }

        let two = cur.peek2();
        let (kind, len) = match (c, two) {
            ('<', Some('-')) => (TokenKind::LArrow, 2),
            ('<', Some('=')) => (TokenKind::Le, 2),
            ('-', Some('>')) => (TokenKind::RArrow, 2),
            ('=', Some('>')) => (TokenKind::FatArrow, 2),
            ('=', Some('=')) => (TokenKind::EqEq, 2),
            (':', Some('=')) => (TokenKind::ColonEq, 2),
            ('&', Some('&')) => (TokenKind::AmpAmp, 2),
            ('|', Some('|')) => (TokenKind::PipePipe, 2),
            ('<', _) => (TokenKind::Lt, 1),
            ('>', _) => (TokenKind::Gt, 1),
            ('(', _) => (TokenKind::LParen, 1),
            (')', _) => (TokenKind::RParen, 1),
            ('{', _) => (TokenKind::LBrace, 1),
            ('}', _) => (TokenKind::RBrace, 1),
            ('[', _) => (TokenKind::LBracket, 1),
            (']', _) => (TokenKind::RBracket, 1),
            (',', _) => (TokenKind::Comma, 1),
            (';', _) => (TokenKind::Semi, 1),
            (':', _) => (TokenKind::Colon, 1),
            ('=', _) => (TokenKind::Assign, 1),
            ('&', _) => (TokenKind::Amp, 1),
            ('+', _) => (TokenKind::Plus, 1),
            ('-', _) => (TokenKind::Minus, 1),
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::IllegalCharacter,
                    span: start_span(1),
                    expected: "a token".into(),
                    found: c.to_string(),
                })
            }
        };
        for _ in 0..len {
            cur.bump();
        }
        out.push(Token { kind, span: start_span(len) });
    }
    Ok(out)
}

fn skip_comment(cur: &mut Cursor<'_>, open: SourceSpan) -> Result<(), ParseError> {
    cur.bump();
    cur.bump();
    let mut depth = 1usize;
    loop {
        match cur.bump() {
            None => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnterminatedComment,
                    span: open,
                    expected: "`*)`".into(),
                    found: "end of input".into(),
                })
            }
            Some('(') if cur.peek() == Some('*') => {
                cur.bump();
                depth += 1;
            }
            Some('*') if cur.peek() == Some(')') => {
                cur.bump();
                depth -= 1;
                if depth == 0 {
                    return Ok(());
                }
            }
            Some(_) => {}
        }
    }
}

fn lex_string(cur: &mut Cursor<'_>, open: SourceSpan) -> Result<(String, usize), ParseError> {
    let unterminated = || ParseError {
        kind: ParseErrorKind::UnterminatedString,
        span: open,
        expected: "closing `\"`".into(),
        found: "end of line".into(),
    };
    cur.bump();
    let mut text = String::new();
    let mut len = 1;
    loop {
        let c = cur.peek().ok_or_else(unterminated)?;
        if c == '\n' {
            return Err(unterminated());
        }
        cur.bump();
        len += 1;
        match c {
            '"' => return Ok((text, len)),
            '\\' => {
                let esc = cur.bump().ok_or_else(unterminated)?;
                len += 1;
                text.push(match esc {
                    'n' => '\n',
                    't' => '\t',
                    '\\' => '\\',
                    '"' => '"',
                    other => {
                        return Err(ParseError {
                            kind: ParseErrorKind::IllegalCharacter,
                            span: SourceSpan::new(open.line, open.column + len - 2, 2),
                            expected: "escape sequence".into(),
                            found: format!("\\{other}"),
                        })
                    }
                });
            }
            _ => text.push(c),
        }
    }
}
