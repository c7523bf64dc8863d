//! Line-oriented board text format: '.'=empty, 'X'=Black, 'O'=White,
//! 'x'=immortal Black, 'o'=immortal White. Rows top-to-bottom.

use std::fmt;

use super::{Board, BoardBuilder, Color, Point, MAX_BOARD_DIM};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TextError {
    pub line: usize,
    pub msg: String,
}

impl TextError {
    pub(crate) fn new(line: usize, msg: impl Into<String>) -> TextError {
        TextError {
            line,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for TextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for TextError {}

pub(super) fn parse(text: &str, to_move: Color) -> Result<Board, TextError> {
    let rows: Vec<&str> = text.lines().collect();
    if rows.is_empty() {
        return Err(TextError::new(1, "empty board text"));
    }
    if rows.len() > MAX_BOARD_DIM as usize {
        return Err(TextError::new(rows.len(), "board taller than 9 rows"));
    }
    let width = rows[0].chars().count();
    if width == 0 || width > MAX_BOARD_DIM as usize {
        return Err(TextError::new(1, "row width must be within 1..=9"));
    }
    let mut builder = BoardBuilder::new(width as u8, rows.len() as u8);
    for (y, row) in rows.iter().enumerate() {
        if row.chars().count() != width {
            return Err(TextError::new(y + 1, "ragged row"));
        }
        for (x, ch) in row.chars().enumerate() {
            let p = Point::new(x as u8, y as u8);
            match ch {
                '.' => {}
                'X' => {
                    builder.set(p, Color::Black, false);
                }
                'O' => {
                    builder.set(p, Color::White, false);
                }
                'x' => {
                    builder.set(p, Color::Black, true);
                }
                'o' => {
                    builder.set(p, Color::White, true);
                }
                _ => {
                    return Err(TextError::new(y + 1, format!("bad cell character '{ch}'")));
                }
            }
        }
    }
    builder
        .finish(to_move)
        .map_err(|msg| TextError::new(rows.len(), msg))
}

pub(super) fn format(board: &Board) -> String {
    let mut out = String::with_capacity(
        (board.width() as usize + 1) * board.height() as usize,
    );
    for y in 0..board.height() {
        if y > 0 {
            out.push('\n');
        }
        for x in 0..board.width() {
            let p = Point::new(x, y);
            let ch = match (board.cell(p), board.is_immortal(p)) {
                (None, _) => '.',
                (Some(Color::Black), false) => 'X',
                (Some(Color::White), false) => 'O',
                (Some(Color::Black), true) => 'x',
                (Some(Color::White), true) => 'o',
            };
            out.push(ch);
        }
    }
    out
}
