//! Surface syntax: lexer, parser and pretty printer.

pub mod lexer;
pub mod parser;
pub mod pretty;

use thiserror::Error;

pub use crate::lang::SourceSpan;
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::{parse_contract, parse_expr};
pub use pretty::pretty_print;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnterminatedComment,
    UnterminatedString,
    IllegalCharacter,
    UnexpectedToken,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: expected {expected}, found {found}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}
