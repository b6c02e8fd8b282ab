//! CoNLL-U reading and writing.
//!
//! Only syntactic words enter the token list. Multiword-token ranges (`1-2`)
//! and empty nodes (`5.1`) are kept verbatim in [`Sentence::extra_lines`] so
//! that a sentence can be written back out, but they take no part in the
//! tree or in any length computation.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// One syntactic word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based word index.
    pub position: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    /// 0 for the root, otherwise a 1-based position.
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    pub fn is_punct(&self) -> bool {
        self.upos == "PUNCT"
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub sent_id: String,
    pub tokens: Vec<Token>,
    /// Line of the first line of the block in its source, for diagnostics.
    pub source_line: usize,
    /// Comment lines without the leading `#`, in source order.
    pub comments: Vec<String>,
    /// Raw multiword-token and empty-node lines.
    pub extra_lines: Vec<String>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at a 1-based position.
    pub fn token(&self, position: usize) -> &Token {
        &self.tokens[position - 1]
    }
}

enum LineId {
    Word(usize),
    Range(usize),
    Empty(usize),
}

fn parse_id(field: &str) -> Option<LineId> {
    if let Some((a, b)) = field.split_once('-') {
        let a: usize = a.parse().ok()?;
        let _: usize = b.parse().ok()?;
        return Some(LineId::Range(a));
    }
    if let Some((a, b)) = field.split_once('.') {
        let a: usize = a.parse().ok()?;
        let _: usize = b.parse().ok()?;
        return Some(LineId::Empty(a));
    }
    match field.parse::<usize>() {
        Ok(0) | Err(_) => None,
        Ok(n) => Some(LineId::Word(n)),
    }
}

struct BlockBuilder {
    start_line: usize,
    comments: Vec<String>,
    extra_lines: Vec<String>,
    tokens: Vec<Token>,
}

impl BlockBuilder {
    fn new(start_line: usize) -> Self {
        BlockBuilder {
            start_line,
            comments: Vec::new(),
            extra_lines: Vec::new(),
            tokens: Vec::new(),
        }
    }

    fn is_empty(&self) -> bool {
        self.comments.is_empty() && self.extra_lines.is_empty() && self.tokens.is_empty()
    }

    fn finish(self, source_name: &str, block_index: usize) -> Result<Sentence> {
        for (i, tok) in self.tokens.iter().enumerate() {
            if tok.position != i + 1 {
                return Err(Error::Structure {
                    source_name: source_name.to_string(),
                    line: self.start_line,
                    msg: format!(
                        "word ids are not 1..n: expected {} but found {}",
                        i + 1,
                        tok.position
                    ),
                });
            }
        }
        if self.tokens.is_empty() {
            return Err(Error::Structure {
                source_name: source_name.to_string(),
                line: self.start_line,
                msg: "block has no word lines".into(),
            });
        }
        let sent_id = self
            .comments
            .iter()
            .find_map(|c| {
                let (key, value) = c.split_once('=')?;
                (key.trim() == "sent_id").then(|| value.trim().to_string())
            })
            .unwrap_or_else(|| format!("{source_name}:{block_index}"));
        Ok(Sentence {
            sent_id,
            tokens: self.tokens,
            source_line: self.start_line,
            comments: self.comments,
            extra_lines: self.extra_lines,
        })
    }
}

/// Parse CoNLL-U text. `source_name` is used in error messages and in
/// synthesized sentence ids (`source_name:block-index`, 1-based).
pub fn parse_conllu<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    let mut block: Option<BlockBuilder> = None;
    let mut block_index = 0;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let line = line.trim_end_matches('\r');

        if line.trim().is_empty() {
            if let Some(b) = block.take() {
                if !b.is_empty() {
                    block_index += 1;
                    sentences.push(b.finish(source_name, block_index)?);
                }
            }
            continue;
        }

        let b = block.get_or_insert_with(|| BlockBuilder::new(line_no));
        if let Some(comment) = line.strip_prefix('#') {
            b.comments.push(comment.trim_start().to_string());
            continue;
        }

        let parse_err = |msg: String| Error::Parse {
            source_name: source_name.to_string(),
            line: line_no,
            msg,
        };

        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 10 {
            return Err(parse_err(format!(
                "expected 10 tab-separated columns, found {}",
                fields.len()
            )));
        }
        let id = parse_id(fields[0])
            .ok_or_else(|| parse_err(format!("malformed ID field `{}`", fields[0])))?;
        match id {
            LineId::Range(_) | LineId::Empty(_) => {
                b.extra_lines.push(line.to_string());
            }
            LineId::Word(position) => {
                let head: usize = fields[6]
                    .parse()
                    .map_err(|_| parse_err(format!("malformed HEAD field `{}`", fields[6])))?;
                b.tokens.push(Token {
                    position,
                    form: fields[1].to_string(),
                    lemma: fields[2].to_string(),
                    upos: fields[3].to_string(),
                    xpos: fields[4].to_string(),
                    feats: fields[5].to_string(),
                    head,
                    deprel: fields[7].to_string(),
                    deps: fields[8].to_string(),
                    misc: fields[9].to_string(),
                });
            }
        }
    }
    if let Some(b) = block.take() {
        if !b.is_empty() {
            block_index += 1;
            sentences.push(b.finish(source_name, block_index)?);
        }
    }
    Ok(sentences)
}

pub fn parse_conllu_str(text: &str, source_name: &str) -> Result<Vec<Sentence>> {
    parse_conllu(text.as_bytes(), source_name)
}

fn extra_line_anchor(line: &str) -> (usize, bool) {
    let id = line.split('\t').next().unwrap_or("");
    match parse_id(id) {
        Some(LineId::Range(a)) => (a, false),
        Some(LineId::Empty(a)) => (a, true),
        _ => (0, true),
    }
}

/// Serialize one sentence as a CoNLL-U block, terminated by a blank line.
pub fn write_sentence(out: &mut String, sentence: &Sentence) {
    for c in &sentence.comments {
        let _ = writeln!(out, "# {c}");
    }
    // Empty nodes anchored at 0 come before the first word.
    for line in &sentence.extra_lines {
        if extra_line_anchor(line) == (0, true) {
            let _ = writeln!(out, "{line}");
        }
    }
    for tok in &sentence.tokens {
        for line in &sentence.extra_lines {
            if extra_line_anchor(line) == (tok.position, false) {
                let _ = writeln!(out, "{line}");
            }
        }
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            tok.position,
            tok.form,
            tok.lemma,
            tok.upos,
            tok.xpos,
            tok.feats,
            tok.head,
            tok.deprel,
            tok.deps,
            tok.misc
        );
        for line in &sentence.extra_lines {
            if extra_line_anchor(line) == (tok.position, true) {
                let _ = writeln!(out, "{line}");
            }
        }
    }
    out.push('\n');
}

pub fn to_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        write_sentence(&mut out, s);
    }
    out
}
