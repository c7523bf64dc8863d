//! Board representation and Go rules for small closed-boundary regions.
//!
//! Boards are immutable values: [`Board::play`] returns a new board. The
//! closed boundary is realized as *immortal* stones, which are never removed
//! by capture. Repetition is handled by positional superko over a per-line
//! history of position hashes (side to move included); passes are always
//! legal and are not recorded in the history, so a game always terminates.

mod benson;
mod text;
mod zobrist;

pub use text::TextError;

use std::fmt;
use std::sync::Arc;

/// Maximum board dimension on either axis.
pub const MAX_BOARD_DIM: u8 = 9;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Color::Black => 0,
            Color::White => 1,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Black => 'B',
            Color::White => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c {
            'B' => Some(Color::Black),
            'W' => Some(Color::White),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A board coordinate; `x` is the column, `y` the row, both 0-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Point {
    pub x: u8,
    pub y: u8,
}

impl Point {
    pub fn new(x: u8, y: u8) -> Point {
        Point { x, y }
    }

    /// Taxicab distance to another point.
    pub fn distance(self, other: Point) -> u32 {
        let dx = (self.x as i32 - other.x as i32).unsigned_abs();
        let dy = (self.y as i32 - other.y as i32).unsigned_abs();
        dx + dy
    }
}

// Row-major order: by row first, then column.
impl Ord for Point {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Move {
    Play(Point),
    Pass,
}

impl Move {
    pub fn point(self) -> Option<Point> {
        match self {
            Move::Play(p) => Some(p),
            Move::Pass => None,
        }
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Move::Pass)
    }

    pub fn parse(s: &str) -> Option<Move> {
        if s == "pass" {
            return Some(Move::Pass);
        }
        let (x, y) = s.split_once(',')?;
        Some(Move::Play(Point::new(x.parse().ok()?, y.parse().ok()?)))
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Play(p) => write!(f, "{p}"),
            Move::Pass => write!(f, "pass"),
        }
    }
}

/// Why a move was rejected. The board is left unchanged in every case.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PlayError {
    /// The point already holds a stone.
    Occupied,
    /// The move would leave a chain without liberties and captures nothing.
    Suicide,
    /// The resulting position already occurred in this game line.
    SuperkoViolation,
}

impl fmt::Display for PlayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            PlayError::Occupied => "point is occupied",
            PlayError::Suicide => "move is suicide",
            PlayError::SuperkoViolation => "move repeats a previous position",
        };
        write!(f, "{msg}")
    }
}

impl std::error::Error for PlayError {}

/// A maximal orthogonally-connected set of same-colored stones.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chain {
    pub color: Color,
    /// Member points, sorted row-major.
    pub points: Vec<Point>,
    /// Empty orthogonal neighbors, sorted row-major.
    pub liberties: Vec<Point>,
    /// True if any member stone is immortal (part of the boundary wall).
    pub immortal: bool,
}

/// An immutable board position.
///
/// The hash covers the stone layout and the side to move, and is maintained
/// incrementally. `history` holds the hashes of every position created by a
/// stone move on this game line, plus the starting position.
#[derive(Clone, PartialEq, Debug)]
pub struct Board {
    width: u8,
    height: u8,
    cells: Vec<Option<Color>>,
    immortal: Arc<[bool]>,
    to_move: Color,
    hash: u64,
    history: Vec<u64>,
}

/// Mutable staging area for setting up a position stone by stone.
pub struct BoardBuilder {
    width: u8,
    height: u8,
    cells: Vec<Option<Color>>,
    immortal: Vec<bool>,
}

impl BoardBuilder {
    pub fn new(width: u8, height: u8) -> BoardBuilder {
        assert!(
            (1..=MAX_BOARD_DIM).contains(&width) && (1..=MAX_BOARD_DIM).contains(&height),
            "board dimensions must be within 1..={MAX_BOARD_DIM}"
        );
        let n = width as usize * height as usize;
        BoardBuilder {
            width,
            height,
            cells: vec![None; n],
            immortal: vec![false; n],
        }
    }

    pub fn set(&mut self, p: Point, color: Color, immortal: bool) -> &mut Self {
        let i = p.y as usize * self.width as usize + p.x as usize;
        self.cells[i] = Some(color);
        self.immortal[i] = immortal;
        self
    }

    pub fn clear(&mut self, p: Point) -> &mut Self {
        let i = p.y as usize * self.width as usize + p.x as usize;
        self.cells[i] = None;
        self.immortal[i] = false;
        self
    }

    /// Finish construction. Fails if any chain would start without liberties.
    pub fn finish(&self, to_move: Color) -> Result<Board, String> {
        let board = Board {
            width: self.width,
            height: self.height,
            cells: self.cells.clone(),
            immortal: Arc::from(self.immortal.as_slice()),
            to_move,
            hash: 0,
            history: Vec::new(),
        };
        let mut board = board;
        board.hash = board.recompute_hash();
        board.history.push(board.hash);
        for chain in board.chains() {
            if chain.liberties.is_empty() {
                return Err(format!("chain at {} has no liberties", chain.points[0]));
            }
        }
        Ok(board)
    }
}

struct Simulated {
    captured: Vec<usize>,
    new_hash: u64,
}

impl Board {
    pub fn empty(width: u8, height: u8, to_move: Color) -> Board {
        BoardBuilder::new(width, height)
            .finish(to_move)
            .expect("empty board is always valid")
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    pub fn hash(&self) -> u64 {
        self.hash
    }

    /// Hash over the stone layout only, with the side-to-move component
    /// stripped.
    pub(crate) fn cells_hash(&self) -> u64 {
        if self.to_move == Color::White {
            self.hash ^ zobrist::tables().white_to_move
        } else {
            self.hash
        }
    }

    /// The same position at the start of a fresh game line: the superko
    /// history is reset to just this position.
    pub(crate) fn fresh_line(&self) -> Board {
        let mut board = self.clone();
        board.history.clear();
        board.history.push(board.hash);
        board
    }

    /// Number of positions recorded on this game line.
    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        p.x < self.width && p.y < self.height
    }

    fn idx(&self, p: Point) -> usize {
        debug_assert!(self.in_bounds(p));
        p.y as usize * self.width as usize + p.x as usize
    }

    fn point_at(&self, i: usize) -> Point {
        Point::new((i % self.width as usize) as u8, (i / self.width as usize) as u8)
    }

    pub fn cell(&self, p: Point) -> Option<Color> {
        self.cells[self.idx(p)]
    }

    pub fn is_immortal(&self, p: Point) -> bool {
        self.immortal[self.idx(p)]
    }

    pub fn stone_count(&self, color: Color) -> usize {
        self.cells.iter().filter(|c| **c == Some(color)).count()
    }

    /// All points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Point::new(x, y)))
    }

    pub(crate) fn neighbor_indices(&self, i: usize) -> NeighborIndices {
        let w = self.width as usize;
        let n = self.cells.len();
        let mut out = [0usize; 4];
        let mut len = 0;
        if i >= w {
            out[len] = i - w;
            len += 1;
        }
        if i % w > 0 {
            out[len] = i - 1;
            len += 1;
        }
        if i % w + 1 < w {
            out[len] = i + 1;
            len += 1;
        }
        if i + w < n {
            out[len] = i + w;
            len += 1;
        }
        NeighborIndices { out, len, pos: 0 }
    }

    pub fn neighbors(&self, p: Point) -> impl Iterator<Item = Point> + '_ {
        self.neighbor_indices(self.idx(p)).map(|i| self.point_at(i))
    }

    pub fn diagonals(&self, p: Point) -> impl Iterator<Item = Point> + '_ {
        let (x, y) = (p.x as i16, p.y as i16);
        [(x - 1, y - 1), (x + 1, y - 1), (x - 1, y + 1), (x + 1, y + 1)]
            .into_iter()
            .filter(|&(dx, dy)| {
                dx >= 0 && dy >= 0 && dx < self.width as i16 && dy < self.height as i16
            })
            .map(|(dx, dy)| Point::new(dx as u8, dy as u8))
    }

    /// Position hash computed from scratch over stones and side to move.
    pub fn recompute_hash(&self) -> u64 {
        let z = zobrist::tables();
        let mut h = 0;
        for (i, cell) in self.cells.iter().enumerate() {
            if let Some(color) = cell {
                h ^= z.stones[color.index()][self.zobrist_index(i)];
            }
        }
        if self.to_move == Color::White {
            h ^= z.white_to_move;
        }
        h
    }

    fn zobrist_index(&self, i: usize) -> usize {
        let p = self.point_at(i);
        p.y as usize * MAX_BOARD_DIM as usize + p.x as usize
    }

    /// Flood the chain containing `start` into `members`, reporting whether
    /// it holds an immortal stone and whether it has any liberty besides
    /// `played` (treated as occupied). Stack-allocated; this is the move
    /// legality hot path.
    fn flood_chain_check(
        &self,
        start: usize,
        played: usize,
        members: &mut Scratch,
    ) -> (bool, bool) {
        let color = self.cells[start].expect("flood from a stone");
        let mut visited = CellSet::new();
        visited.insert(start);
        members.clear();
        members.push(start);
        let mut cursor = 0;
        let mut has_immortal = false;
        let mut has_liberty = false;
        while cursor < members.len {
            let i = members.items[cursor] as usize;
            cursor += 1;
            if self.immortal[i] {
                has_immortal = true;
            }
            for n in self.neighbor_indices(i) {
                match self.cells[n] {
                    None => {
                        if n != played {
                            has_liberty = true;
                        }
                    }
                    Some(c) if c == color && !visited.contains(n) => {
                        visited.insert(n);
                        members.push(n);
                    }
                    _ => {}
                }
            }
        }
        (has_immortal, has_liberty)
    }

    /// Does the mover's chain through `placed` have a liberty once the
    /// captured stones are removed?
    fn own_chain_has_liberty(&self, mover: Color, placed: usize, captured: &CellSet) -> bool {
        let mut visited = CellSet::new();
        visited.insert(placed);
        let mut stack = Scratch::new();
        stack.push(placed);
        while let Some(i) = stack.pop() {
            for n in self.neighbor_indices(i) {
                if captured.contains(n) || (self.cells[n].is_none() && n != placed) {
                    return true;
                }
                if self.cells[n] == Some(mover) && !visited.contains(n) {
                    visited.insert(n);
                    stack.push(n);
                }
            }
        }
        false
    }

    fn simulate(&self, mover: Color, p: Point) -> Result<Simulated, PlayError> {
        assert!(self.in_bounds(p), "move out of bounds: {p}");
        let i = self.idx(p);
        if self.cells[i].is_some() {
            return Err(PlayError::Occupied);
        }
        let opp = mover.opponent();

        let mut captured = Scratch::new();
        let mut captured_set = CellSet::new();
        let mut processed = CellSet::new();
        let mut chain = Scratch::new();
        for n in self.neighbor_indices(i) {
            if self.cells[n] == Some(opp) && !processed.contains(n) {
                let (has_immortal, has_liberty) = self.flood_chain_check(n, i, &mut chain);
                for &m in chain.as_slice() {
                    processed.insert(m as usize);
                }
                if !has_liberty {
                    if has_immortal {
                        // Immortal chains are never removed; a move that
                        // would strangle one is illegal.
                        return Err(PlayError::Suicide);
                    }
                    for &m in chain.as_slice() {
                        captured.push(m as usize);
                        captured_set.insert(m as usize);
                    }
                }
            }
        }

        if !self.own_chain_has_liberty(mover, i, &captured_set) {
            return Err(PlayError::Suicide);
        }

        let z = zobrist::tables();
        let mut h = self.hash;
        if self.to_move == Color::White {
            h ^= z.white_to_move;
        }
        h ^= z.stones[mover.index()][self.zobrist_index(i)];
        for &c in captured.as_slice() {
            h ^= z.stones[opp.index()][self.zobrist_index(c as usize)];
        }
        if mover.opponent() == Color::White {
            h ^= z.white_to_move;
        }
        if self.history.contains(&h) {
            return Err(PlayError::SuperkoViolation);
        }
        Ok(Simulated {
            captured: captured.as_slice().iter().map(|&c| c as usize).collect(),
            new_hash: h,
        })
    }

    /// Play a move for `mover` and return the resulting board.
    ///
    /// A pass only changes the side to move; it is always legal and leaves
    /// the superko history untouched.
    pub fn play(&self, mover: Color, mv: Move) -> Result<Board, PlayError> {
        match mv {
            Move::Pass => {
                let z = zobrist::tables();
                let mut h = self.hash;
                if self.to_move == Color::White {
                    h ^= z.white_to_move;
                }
                if mover.opponent() == Color::White {
                    h ^= z.white_to_move;
                }
                Ok(Board {
                    to_move: mover.opponent(),
                    hash: h,
                    ..self.clone()
                })
            }
            Move::Play(p) => {
                let sim = self.simulate(mover, p)?;
                let mut cells = self.cells.clone();
                cells[self.idx(p)] = Some(mover);
                for &c in &sim.captured {
                    cells[c] = None;
                }
                let mut history = self.history.clone();
                history.push(sim.new_hash);
                Ok(Board {
                    width: self.width,
                    height: self.height,
                    cells,
                    immortal: Arc::clone(&self.immortal),
                    to_move: mover.opponent(),
                    hash: sim.new_hash,
                    history,
                })
            }
        }
    }

    pub fn is_legal(&self, mover: Color, mv: Move) -> bool {
        match mv {
            Move::Pass => true,
            Move::Play(p) => self.in_bounds(p) && self.simulate(mover, p).is_ok(),
        }
    }

    /// All moves `mover` may play: legal empty points in row-major order,
    /// then Pass.
    pub fn legal_moves(&self, mover: Color) -> Vec<Move> {
        let mut moves = Vec::with_capacity(self.cells.len() + 1);
        for p in self.points() {
            if self.cell(p).is_none() && self.simulate(mover, p).is_ok() {
                moves.push(Move::Play(p));
            }
        }
        moves.push(Move::Pass);
        moves
    }

    /// Partition of all stones into chains, ordered by smallest point.
    pub fn chains(&self) -> Vec<Chain> {
        let mut visited = vec![false; self.cells.len()];
        let mut chains = Vec::new();
        for i in 0..self.cells.len() {
            if visited[i] || self.cells[i].is_none() {
                continue;
            }
            chains.push(self.collect_chain(i, &mut visited));
        }
        chains
    }

    /// The chain containing `p`, if `p` holds a stone.
    pub fn chain_at(&self, p: Point) -> Option<Chain> {
        let i = self.idx(p);
        self.cells[i]?;
        let mut visited = vec![false; self.cells.len()];
        Some(self.collect_chain(i, &mut visited))
    }

    fn collect_chain(&self, start: usize, visited: &mut [bool]) -> Chain {
        let color = self.cells[start].expect("chain starts on a stone");
        let mut points = Vec::new();
        let mut liberties = Vec::new();
        let mut immortal = false;
        let mut lib_seen = vec![false; self.cells.len()];
        let mut stack = vec![start];
        visited[start] = true;
        while let Some(i) = stack.pop() {
            points.push(self.point_at(i));
            if self.immortal[i] {
                immortal = true;
            }
            for n in self.neighbor_indices(i) {
                match self.cells[n] {
                    None => {
                        if !lib_seen[n] {
                            lib_seen[n] = true;
                            liberties.push(self.point_at(n));
                        }
                    }
                    Some(c) if c == color && !visited[n] => {
                        visited[n] = true;
                        stack.push(n);
                    }
                    _ => {}
                }
            }
        }
        points.sort();
        liberties.sort();
        Chain {
            color,
            points,
            liberties,
            immortal,
        }
    }

    /// The maximal set of `color`'s chains that are unconditionally alive
    /// (pass-alive), via fixed-point elimination over chains and enclosed
    /// regions. Immortal chains are alive by fiat and anchor the fixed point.
    pub fn unconditionally_alive(&self, color: Color) -> Vec<Chain> {
        benson::unconditionally_alive(self, color)
    }

    /// Is the chain containing `p` (which must hold a stone) pass-alive?
    pub fn is_unconditionally_alive(&self, p: Point) -> bool {
        benson::is_unconditionally_alive(self, p)
    }

    pub fn parse(text: &str, to_move: Color) -> Result<Board, TextError> {
        text::parse(text, to_move)
    }

    /// Board text: one row per line, '.'/'X'/'O' plus 'x'/'o' for immortal
    /// stones, no trailing newline.
    pub fn to_text(&self) -> String {
        text::format(self)
    }
}

/// Bitmask set over cell indices; boards never exceed 81 cells.
#[derive(Clone, Copy, Default)]
pub(crate) struct CellSet(pub u128);

impl CellSet {
    pub fn new() -> CellSet {
        CellSet(0)
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1u128 << i) != 0
    }
}

/// Fixed-capacity index list used by the flood fills.
pub(crate) struct Scratch {
    items: [u8; 81],
    len: usize,
}

impl Scratch {
    pub fn new() -> Scratch {
        Scratch {
            items: [0; 81],
            len: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, i: usize) {
        self.items[self.len] = i as u8;
        self.len += 1;
    }

    #[inline]
    pub fn pop(&mut self) -> Option<usize> {
        if self.len == 0 {
            None
        } else {
            self.len -= 1;
            Some(self.items[self.len] as usize)
        }
    }

    pub fn clear(&mut self) {
        self.len = 0;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.items[..self.len]
    }
}

pub(crate) struct NeighborIndices {
    out: [usize; 4],
    len: usize,
    pos: usize,
}

impl Iterator for NeighborIndices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.pos < self.len {
            let v = self.out[self.pos];
            self.pos += 1;
            Some(v)
        } else {
            None
        }
    }
}
