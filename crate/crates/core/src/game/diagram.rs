//! Text diagrams: one character per cell, row-major, one line per row,
//! followed by a line holding the symbol of the player to move.

use super::{Game, GameError, GameState, Player, EMPTY};

pub fn print_diagram(game: &dyn Game, state: &GameState) -> String {
    let d = game.descriptor();
    let mut out = String::with_capacity((d.cols + 1) * (d.rows + 1));
    for r in 0..d.rows {
        for c in 0..d.cols {
            out.push(d.symbols[state.cells[r * d.cols + c] as usize]);
        }
        out.push('\n');
    }
    out.push(match state.to_move {
        Player::First => d.symbols[1],
        Player::Second => d.symbols[2],
    });
    out.push('\n');
    out
}

/// Parses a diagram produced by [`print_diagram`]. The move counter is not
/// recorded in diagrams; it is estimated from the number of pieces added
/// since the initial position.
pub fn parse_diagram(game: &dyn Game, text: &str) -> Result<GameState, GameError> {
    let d = game.descriptor();
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != d.rows + 1 {
        return Err(GameError::BadDiagram(format!(
            "expected {} lines, got {}",
            d.rows + 1,
            lines.len()
        )));
    }
    let mut state = GameState::empty(Player::First);
    for (r, line) in lines[..d.rows].iter().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != d.cols {
            return Err(GameError::BadDiagram(format!("row {r} has {} cells", chars.len())));
        }
        for (c, ch) in chars.into_iter().enumerate() {
            let content = d
                .symbols
                .iter()
                .position(|&s| s == ch)
                .ok_or_else(|| GameError::BadDiagram(format!("unknown symbol `{ch}`")))?;
            state.cells[r * d.cols + c] = content as u8;
        }
    }
    state.to_move = match lines[d.rows] {
        s if s == d.symbols[1].to_string() => Player::First,
        s if s == d.symbols[2].to_string() => Player::Second,
        other => return Err(GameError::BadDiagram(format!("bad side to move `{other}`"))),
    };
    let pieces = |s: &GameState| s.cells.iter().filter(|&&c| c != EMPTY).count();
    state.move_count = pieces(&state).saturating_sub(pieces(&game.initial_state())) as u16;
    Ok(state)
}
