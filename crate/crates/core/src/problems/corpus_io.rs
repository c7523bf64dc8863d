//! Corpus files: UTF-8, line-oriented, diff-able.
//!
//! ```text
//! corpus v1 seed=<dec> version=<str> hash=<16 hex>
//!
//! problem <id> <toMove> <defender> <target x,y> <winning x,y|pass|-> <lives|dies> <level> <leaves>
//! <board rows>
//!
//! problem ...
//! ```
//!
//! The hash is FNV-1a 64 over the problem section bytes exactly as written,
//! so any edit to a problem record invalidates it.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use super::{bucket_difficulty, Corpus, Problem, Status};
use crate::goban::{Board, Color, Move};

#[derive(Debug)]
pub enum CorpusError {
    Io(io::Error),
    Parse { line: usize, msg: String },
    HashMismatch { expected: u64, actual: u64 },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::Io(e) => write!(f, "io error: {e}"),
            CorpusError::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            CorpusError::HashMismatch { expected, actual } => write!(
                f,
                "corpus hash mismatch: header says {expected:016x}, content hashes to {actual:016x}"
            ),
        }
    }
}

impl std::error::Error for CorpusError {}

impl From<io::Error> for CorpusError {
    fn from(e: io::Error) -> CorpusError {
        CorpusError::Io(e)
    }
}

pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub(crate) fn serialize_problem(problem: &Problem) -> String {
    let winning = match problem.unique_winning_move {
        Some(mv) => mv.to_string(),
        None => "-".to_string(),
    };
    format!(
        "problem {} {} {} {} {} {} {} {}\n{}\n",
        problem.id,
        problem.to_move.letter(),
        problem.defender.letter(),
        problem.target,
        winning,
        problem.oracle_status.token(),
        problem.difficulty,
        problem.oracle_leaves,
        problem.board.to_text(),
    )
}

pub(crate) fn serialize_problems(problems: &[Problem]) -> String {
    problems
        .iter()
        .map(serialize_problem)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let body = serialize_problems(&corpus.problems);
    let hash = fnv1a64(body.as_bytes());
    let text = format!(
        "corpus v1 seed={} version={} hash={:016x}\n\n{}",
        corpus.generator_seed, corpus.generator_version, hash, body
    );
    fs::write(path, text)?;
    Ok(())
}

pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let text = fs::read_to_string(path)?;
    parse_corpus(&text)
}

fn parse_err(line: usize, msg: impl Into<String>) -> CorpusError {
    CorpusError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_corpus(text: &str) -> Result<Corpus, CorpusError> {
    let (header, rest) = text
        .split_once('\n')
        .ok_or_else(|| parse_err(1, "missing corpus header"))?;
    let mut seed = None;
    let mut version = None;
    let mut hash = None;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("corpus") || fields.next() != Some("v1") {
        return Err(parse_err(1, "expected `corpus v1` header"));
    }
    for field in fields {
        let Some((key, value)) = field.split_once('=') else {
            return Err(parse_err(1, format!("malformed header field `{field}`")));
        };
        match key {
            "seed" => {
                seed = Some(
                    value
                        .parse::<u64>()
                        .map_err(|_| parse_err(1, "bad seed value"))?,
                )
            }
            "version" => version = Some(value.to_string()),
            "hash" => {
                hash = Some(
                    u64::from_str_radix(value, 16).map_err(|_| parse_err(1, "bad hash value"))?,
                )
            }
            _ => return Err(parse_err(1, format!("unknown header field `{key}`"))),
        }
    }
    let seed = seed.ok_or_else(|| parse_err(1, "header missing seed"))?;
    let version = version.ok_or_else(|| parse_err(1, "header missing version"))?;
    let expected = hash.ok_or_else(|| parse_err(1, "header missing hash"))?;

    let body = rest
        .strip_prefix('\n')
        .ok_or_else(|| parse_err(2, "expected blank line after header"))?;
    let actual = fnv1a64(body.as_bytes());
    if actual != expected {
        return Err(CorpusError::HashMismatch { expected, actual });
    }

    let mut problems = Vec::new();
    let mut lines = body.lines().enumerate().peekable();
    while let Some(&(n, line)) = lines.peek() {
        if line.is_empty() {
            lines.next();
            continue;
        }
        let line_no = n + 3; // header + blank line
        problems.push(parse_problem(&mut lines, line_no)?);
    }
    for (i, p) in problems.iter().enumerate() {
        if problems[..i].iter().any(|q| q.id == p.id) {
            return Err(parse_err(0, format!("duplicate problem id {}", p.id)));
        }
    }
    Ok(Corpus {
        problems,
        generator_seed: seed,
        generator_version: version,
        corpus_hash: actual,
    })
}

type Lines<'a> = std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>;

fn parse_problem(lines: &mut Lines, line_no: usize) -> Result<Problem, CorpusError> {
    let (_, header) = lines.next().expect("caller peeked a line");
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 9 || fields[0] != "problem" {
        return Err(parse_err(line_no, "malformed problem header"));
    }
    let id = fields[1].to_string();
    let to_move = parse_color(fields[2], line_no)?;
    let defender = parse_color(fields[3], line_no)?;
    let target = match Move::parse(fields[4]) {
        Some(Move::Play(p)) => p,
        _ => return Err(parse_err(line_no, "bad target point")),
    };
    let unique_winning_move = match fields[5] {
        "-" => None,
        s => Some(Move::parse(s).ok_or_else(|| parse_err(line_no, "bad winning move"))?),
    };
    let oracle_status = Status::from_token(fields[6])
        .ok_or_else(|| parse_err(line_no, "bad status, expected lives|dies"))?;
    let difficulty: u8 = fields[7]
        .parse()
        .map_err(|_| parse_err(line_no, "bad difficulty level"))?;
    let oracle_leaves: u64 = fields[8]
        .parse()
        .map_err(|_| parse_err(line_no, "bad leaf count"))?;

    let mut rows = Vec::new();
    let mut row_line = line_no;
    while let Some(&(_, line)) = lines.peek() {
        if line.is_empty() {
            break;
        }
        row_line += 1;
        rows.push(line);
        lines.next();
    }
    if rows.is_empty() {
        return Err(parse_err(line_no, "problem has no board rows"));
    }
    let board = Board::parse(&rows.join("\n"), to_move)
        .map_err(|e| parse_err(line_no + e.line, e.msg))?;

    if !board.in_bounds(target) || board.cell(target) != Some(defender) {
        return Err(parse_err(
            line_no,
            "target point does not hold a defender stone",
        ));
    }
    if let Some(mv) = unique_winning_move {
        if !board.is_legal(to_move, mv) {
            return Err(parse_err(line_no, "winning move is not legal"));
        }
    }
    if !(1..=14).contains(&difficulty) || oracle_leaves == 0 {
        return Err(parse_err(line_no, "difficulty or leaf count out of range"));
    }
    if bucket_difficulty(oracle_leaves) != difficulty {
        return Err(parse_err(
            line_no,
            "difficulty level inconsistent with leaf count",
        ));
    }
    let _ = row_line;
    Ok(Problem {
        id,
        board,
        to_move,
        target,
        defender,
        unique_winning_move,
        oracle_status,
        difficulty,
        oracle_leaves,
    })
}

fn parse_color(s: &str, line: usize) -> Result<Color, CorpusError> {
    let mut chars = s.chars();
    match (chars.next().and_then(Color::from_letter), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(parse_err(line, format!("bad color `{s}`, expected B or W"))),
    }
}
