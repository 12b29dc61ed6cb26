//! Parser for the subset of CIF 1.1 used by crystal-structure exports.
//!
//! Supported: `data_` blocks, `_tag value` items, `loop_` tables, bare,
//! single- and double-quoted values, semicolon text fields and `#`
//! comments. Save frames are skipped. Loop rows must be line-aligned; a row
//! may only continue onto the next line through a semicolon text field.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct CifSyntaxError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CifLoop {
    pub tags: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CifLoop {
    pub fn column(&self, tag: &str) -> Option<usize> {
        self.tags.iter().position(|t| t.eq_ignore_ascii_case(tag))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CifBlock {
    pub name: String,
    /// Items in document order; unknown tags are kept verbatim.
    pub items: Vec<(String, String)>,
    pub loops: Vec<CifLoop>,
}

impl CifBlock {
    /// Item lookup; CIF tags are case-insensitive.
    pub fn item(&self, tag: &str) -> Option<&str> {
        self.items
            .iter()
            .find(|(t, _)| t.eq_ignore_ascii_case(tag))
            .map(|(_, v)| v.as_str())
    }

    /// The loop that has a column named `tag`.
    pub fn loop_with(&self, tag: &str) -> Option<&CifLoop> {
        self.loops.iter().find(|l| l.column(tag).is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CifDocument {
    pub blocks: Vec<CifBlock>,
    /// Physical lines consumed.
    pub lines: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    DataBlock(String),
    Loop,
    SaveFrame(String),
    Tag(String),
    Value(String),
    TextField(String),
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    /// Line the token starts on.
    line: usize,
}

fn syntax(line: usize, reason: impl Into<String>) -> CifSyntaxError {
    CifSyntaxError {
        line,
        reason: reason.into(),
    }
}

fn tokenize(text: &str) -> Result<(Vec<Token>, usize), CifSyntaxError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let normalized = text.replace("\r\n", "\n").replace('\r', "\n");
    let lines: Vec<&str> = normalized.split_terminator('\n').collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line_no = i + 1;
        let line = lines[i];
        if let Some(rest) = line.strip_prefix(';') {
            let mut body = vec![rest];
            let mut j = i + 1;
            loop {
                match lines.get(j) {
                    None => return Err(syntax(line_no, "unterminated semicolon text field")),
                    Some(l) if l.starts_with(';') => break,
                    Some(l) => body.push(l),
                }
                j += 1;
            }
            let mut value = body.join("\n");
            if body[0].trim().is_empty() {
                value = body[1..].join("\n");
            }
            tokens.push(Token {
                kind: TokenKind::TextField(value),
                line: line_no,
            });
            // Anything after the closing `;` on its line is ordinary content.
            let tail = &lines[j][1..];
            tokenize_line(tail, j + 1, &mut tokens)?;
            i = j + 1;
            continue;
        }
        tokenize_line(line, line_no, &mut tokens)?;
        i += 1;
    }
    Ok((tokens, lines.len()))
}

fn tokenize_line(line: &str, line_no: usize, out: &mut Vec<Token>) -> Result<(), CifSyntaxError> {
    let bytes = line.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if c == b'#' {
            break;
        }
        if c == b'\'' || c == b'"' {
            // A quote closes only when followed by whitespace or end of line.
            let mut end = pos + 1;
            let close = loop {
                if end >= bytes.len() {
                    return Err(syntax(line_no, "unterminated quoted value"));
                }
                if bytes[end] == c && (end + 1 == bytes.len() || bytes[end + 1].is_ascii_whitespace()) {
                    break end;
                }
                end += 1;
            };
            out.push(Token {
                kind: TokenKind::Value(line[pos + 1..close].to_owned()),
                line: line_no,
            });
            pos = close + 1;
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let word = &line[start..pos];
        let lower = word.to_ascii_lowercase();
        let kind = if lower.starts_with("data_") {
            TokenKind::DataBlock(word[5..].to_owned())
        } else if lower == "loop_" {
            TokenKind::Loop
        } else if lower.starts_with("save_") {
            TokenKind::SaveFrame(word[5..].to_owned())
        } else if lower == "global_" || lower == "stop_" {
            return Err(syntax(line_no, format!("reserved word `{word}` is not supported")));
        } else if word.starts_with('_') {
            TokenKind::Tag(word.to_owned())
        } else {
            TokenKind::Value(word.to_owned())
        };
        out.push(Token { kind, line: line_no });
    }
    Ok(())
}

fn value_text(kind: &TokenKind) -> Option<&str> {
    match kind {
        TokenKind::Value(v) | TokenKind::TextField(v) => Some(v),
        _ => None,
    }
}

/// Parses CIF text into its data blocks.
pub fn parse_cif(text: &str) -> Result<CifDocument, CifSyntaxError> {
    let (tokens, lines) = tokenize(text)?;
    let mut doc = CifDocument {
        blocks: Vec::new(),
        lines,
    };
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        match &tok.kind {
            TokenKind::DataBlock(name) => {
                if name.is_empty() {
                    return Err(syntax(tok.line, "data block without a name"));
                }
                doc.blocks.push(CifBlock {
                    name: name.clone(),
                    ..CifBlock::default()
                });
                i += 1;
            }
            TokenKind::SaveFrame(name) => {
                if name.is_empty() {
                    return Err(syntax(tok.line, "save frame terminator without a frame"));
                }
                let opened = tok.line;
                i += 1;
                while !matches!(tokens.get(i).map(|t| &t.kind), Some(TokenKind::SaveFrame(n)) if n.is_empty()) {
                    if i >= tokens.len() {
                        return Err(syntax(opened, "unterminated save frame"));
                    }
                    i += 1;
                }
                i += 1;
            }
            _ if doc.blocks.is_empty() => {
                return Err(syntax(tok.line, "content before any data block"));
            }
            TokenKind::Tag(tag) => {
                let value = tokens
                    .get(i + 1)
                    .and_then(|t| value_text(&t.kind))
                    .ok_or_else(|| syntax(tok.line, format!("tag `{tag}` has no value")))?;
                let block = doc.blocks.last_mut().expect("checked above");
                block.items.push((tag.clone(), value.to_owned()));
                i += 2;
            }
            TokenKind::Loop => {
                let (table, next) = parse_loop(&tokens, i)?;
                doc.blocks.last_mut().expect("checked above").loops.push(table);
                i = next;
            }
            TokenKind::Value(_) | TokenKind::TextField(_) => {
                return Err(syntax(tok.line, "value without a tag"));
            }
        }
    }
    Ok(doc)
}

fn parse_loop(tokens: &[Token], start: usize) -> Result<(CifLoop, usize), CifSyntaxError> {
    let loop_line = tokens[start].line;
    let mut i = start + 1;
    let mut table = CifLoop::default();
    while let Some(TokenKind::Tag(t)) = tokens.get(i).map(|t| &t.kind) {
        table.tags.push(t.clone());
        i += 1;
    }
    if table.tags.is_empty() {
        return Err(syntax(loop_line, "loop_ without column tags"));
    }
    let width = table.tags.len();
    let mut row: Vec<String> = Vec::with_capacity(width);
    let mut row_line = 0;
    let mut prev: Option<&Token> = None;
    while let Some(tok) = tokens.get(i) {
        let Some(v) = value_text(&tok.kind) else {
            break;
        };
        if !row.is_empty() {
            let prev = prev.expect("row has a previous token");
            let continues = matches!(tok.kind, TokenKind::TextField(_))
                || matches!(prev.kind, TokenKind::TextField(_))
                || tok.line == prev.line;
            if !continues {
                return Err(syntax(
                    row_line,
                    format!("loop row has {} values for {} columns", row.len(), width),
                ));
            }
        } else {
            row_line = tok.line;
        }
        row.push(v.to_owned());
        if row.len() == width {
            table.rows.push(std::mem::replace(&mut row, Vec::with_capacity(width)));
        }
        prev = Some(tok);
        i += 1;
    }
    if !row.is_empty() {
        return Err(syntax(
            row_line,
            format!("loop row has {} values for {} columns", row.len(), width),
        ));
    }
    Ok((table, i))
}
