//! The search graph: an arena of node records, optionally deduplicated
//! through a transposition table, and the per-node primitives of UBFM
//! (descent, expansion, recomputation, backpropagation).

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Backprop, SearchConfig, SearchError, TerminalEvalMode, TieBreak};
use crate::eval::{splitmix64, Evaluator};
use crate::game::{Game, GameState, Move};
use crate::transposition::{TranspositionTable, ZobristTables};
use crate::value::{completed_compare, CompletedValue, Resolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct NodeRecord {
    pub key: u64,
    pub state: GameState,
    /// Value for the player to move at this node.
    pub cv: CompletedValue,
    /// Stable game move order; never reordered.
    pub children: Vec<(Move, NodeId)>,
    pub expanded: bool,
    pub terminal: bool,
    /// Iteration of the last value update.
    pub generation: u64,
}

/// Nodes from a start node down to the end of a descent; `moves[i]` leads
/// from `nodes[i]` to `nodes[i + 1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub moves: Vec<Move>,
}

impl Path {
    pub fn single(node: NodeId) -> Path {
        Path {
            nodes: vec![node],
            moves: Vec::new(),
        }
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().expect("path is never empty")
    }

    /// Number of edges.
    pub fn depth(&self) -> usize {
        self.moves.len()
    }

    /// Appends `tail`, whose first node must be this path's last node.
    pub fn extend(&mut self, tail: Path) {
        debug_assert_eq!(tail.nodes.first(), self.nodes.last());
        self.nodes.extend_from_slice(&tail.nodes[1..]);
        self.moves.extend(tail.moves);
    }

    pub fn truncate_to(&mut self, index: usize) {
        self.nodes.truncate(index + 1);
        self.moves.truncate(index);
    }
}

/// Tie-breaking policy state. Random draws are only taken when two or more
/// candidates are exactly tied.
#[derive(Clone, Debug)]
pub enum TieBreaker {
    First,
    Random { rng: Box<ChaCha8Rng>, tied: Vec<usize> },
}

impl TieBreaker {
    pub fn new(config: &SearchConfig) -> TieBreaker {
        match config.tie_break {
            TieBreak::FirstChild => TieBreaker::First,
            TieBreak::SeededRandom(seed) => TieBreaker::Random {
                rng: Box::new(ChaCha8Rng::seed_from_u64(seed ^ splitmix64(config.rng_seed))),
                tied: Vec::new(),
            },
        }
    }
}

pub struct SearchGraph {
    game: &'static dyn Game,
    eval: Evaluator,
    config: SearchConfig,
    zobrist: ZobristTables,
    nodes: Vec<NodeRecord>,
    table: Option<TranspositionTable<NodeId>>,
    root: NodeId,
    moves: Vec<Move>,
}

impl SearchGraph {
    /// Builds a graph holding only the (unexpanded) root.
    pub fn new(
        game: &'static dyn Game,
        root_state: GameState,
        eval: Evaluator,
        config: SearchConfig,
    ) -> Result<SearchGraph, SearchError> {
        let table = if config.use_tt {
            Some(TranspositionTable::new(game, config.verify_keys)?)
        } else {
            None
        };
        let zobrist = ZobristTables::for_game(game);
        let key = zobrist.state_key(&root_state);
        let mut graph = SearchGraph {
            game,
            eval,
            config,
            zobrist,
            nodes: Vec::new(),
            table,
            root: NodeId(0),
            moves: Vec::new(),
        };
        graph.root = graph.child_node(key, root_state, 0)?;
        Ok(graph)
    }

    pub fn game(&self) -> &'static dyn Game {
        self.game
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &NodeRecord {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Looks up (with the table on) or allocates the node for `state`.
    fn child_node(&mut self, key: u64, state: GameState, generation: u64) -> Result<NodeId, SearchError> {
        let SearchGraph {
            game,
            eval,
            config,
            nodes,
            table,
            ..
        } = self;
        let mut make = || {
            nodes.push(new_node(*game, eval, config, key, state, generation));
            NodeId((nodes.len() - 1) as u32)
        };
        match table {
            Some(t) => Ok(t.lookup_or_create(key, &state, make)?.0),
            None => Ok(make()),
        }
    }

    /// Picks among `node`'s children the one maximising the negated child
    /// value under the completed order. With `skip_resolved`, resolved
    /// children are not candidates. Returns the child index.
    fn select(&self, node: NodeId, skip_resolved: bool, ties: &mut TieBreaker) -> Option<usize> {
        let children = &self.nodes[node.index()].children;
        let mut best: Option<(usize, CompletedValue)> = None;
        if let TieBreaker::Random { tied, .. } = ties {
            tied.clear();
        }
        for (i, &(_, child)) in children.iter().enumerate() {
            let cv = self.nodes[child.index()].cv;
            if skip_resolved && cv.resolved {
                continue;
            }
            let v = cv.negate();
            let order = match &best {
                None => Ordering::Greater,
                Some((_, b)) => completed_compare(&v, b),
            };
            match order {
                Ordering::Greater => {
                    best = Some((i, v));
                    if let TieBreaker::Random { tied, .. } = ties {
                        tied.clear();
                        tied.push(i);
                    }
                }
                Ordering::Equal => {
                    if let TieBreaker::Random { tied, .. } = ties {
                        tied.push(i);
                    }
                }
                Ordering::Less => {}
            }
        }
        match ties {
            TieBreaker::Random { rng, tied } if tied.len() > 1 => {
                Some(tied[rng.gen_range(0..tied.len())])
            }
            _ => best.map(|(i, _)| i),
        }
    }

    /// Follows best children from `start` until an unexpanded node.
    ///
    /// With completion on, resolved children are never entered; if every
    /// child of a node on the way is resolved the descent stops there with
    /// [`SearchError::AllChildrenResolved`], carrying the path so far.
    pub fn descend(&self, start: NodeId, ties: &mut TieBreaker) -> Result<Path, SearchError> {
        let completion = self.config.completion;
        if completion && self.node(start).cv.resolved {
            return Err(SearchError::StartResolved);
        }
        let mut path = Path::single(start);
        let mut current = start;
        while self.node(current).expanded {
            let Some(i) = self.select(current, completion, ties) else {
                return Err(SearchError::AllChildrenResolved { path });
            };
            let (mv, child) = self.node(current).children[i];
            debug_assert!(!(completion && self.node(child).cv.resolved));
            path.nodes.push(child);
            path.moves.push(mv);
            current = child;
        }
        Ok(path)
    }

    /// Generates and evaluates every child of an unexpanded, non-terminal
    /// node, then sets the node's value from its children.
    pub fn expand(&mut self, leaf: NodeId, generation: u64) -> Result<(), SearchError> {
        let node = &self.nodes[leaf.index()];
        if node.expanded {
            return Err(SearchError::AlreadyExpanded);
        }
        if node.terminal {
            return Err(SearchError::TerminalLeaf);
        }
        let (state, key) = (node.state, node.key);
        let mut moves = std::mem::take(&mut self.moves);
        moves.clear();
        self.game.generate_moves(&state, &mut moves);
        if moves.is_empty() {
            self.moves = moves;
            return Err(SearchError::NoLegalMoves);
        }
        let parent_progress = if self.config.verify_keys {
            self.game.progress_measure(&state)
        } else {
            None
        };
        let mut children = Vec::with_capacity(moves.len());
        for &mv in &moves {
            let next = self.game.play(&state, mv);
            if let Some(before) = parent_progress {
                let after = self.game.progress_measure(&next).unwrap_or(0);
                if after < before || (after == before && !mv.is_pass()) {
                    return Err(SearchError::ProgressViolation);
                }
            }
            let child_key = self.zobrist.update(key, &state, &next);
            children.push((mv, self.child_node(child_key, next, generation)?));
        }
        self.moves = moves;
        let node = &mut self.nodes[leaf.index()];
        node.children = children;
        node.expanded = true;
        let cv = self.recompute(leaf)?;
        let node = &mut self.nodes[leaf.index()];
        node.cv = cv;
        node.generation = generation;
        Ok(())
    }

    /// Negamax combination of the children's values under the completed
    /// order.
    ///
    /// With completion on, the node is resolved when some child is a proved
    /// loss for its mover, or when every child is resolved. With completion
    /// off the result is always `Open` and unresolved.
    pub fn recompute(&self, id: NodeId) -> Result<CompletedValue, SearchError> {
        let node = self.node(id);
        if !node.expanded {
            return Err(SearchError::NotExpanded);
        }
        let mut best: Option<CompletedValue> = None;
        let mut all_resolved = true;
        for &(_, child) in &node.children {
            let cv = self.nodes[child.index()].cv;
            all_resolved &= cv.resolved;
            let v = cv.negate();
            if best.is_none_or(|b| completed_compare(&v, &b) == Ordering::Greater) {
                best = Some(v);
            }
        }
        let best = best.ok_or(SearchError::NoLegalMoves)?;
        if !self.config.completion {
            return Ok(CompletedValue::open(best.value));
        }
        if best.resolution == Resolution::ProvedWin || all_resolved {
            return Ok(best);
        }
        Ok(CompletedValue::open(best.value))
    }

    fn update(&mut self, id: NodeId, generation: u64) -> Result<CompletedValue, SearchError> {
        let cv = self.recompute(id)?;
        let node = &mut self.nodes[id.index()];
        node.cv = cv;
        node.generation = generation;
        Ok(cv)
    }

    /// Recomputes every expanded node on the path, leaf to root.
    pub fn backpropagate_full(&mut self, path: &Path, generation: u64) -> Result<usize, SearchError> {
        let mut updated = 0;
        for &id in path.nodes.iter().rev() {
            if self.node(id).expanded {
                self.update(id, generation)?;
                updated += 1;
            }
        }
        Ok(updated)
    }

    /// Recomputes leaf to root until a node's value comes out unchanged and
    /// returns that node's index in the path (0 when every node changed).
    ///
    /// `leaf_before` is the value the path's last node held before this
    /// iteration touched it (its heuristic value when it was just expanded).
    pub fn backpropagate_kc(
        &mut self,
        path: &Path,
        leaf_before: CompletedValue,
        generation: u64,
    ) -> Result<usize, SearchError> {
        let last = path.nodes.len() - 1;
        for i in (0..=last).rev() {
            let id = path.nodes[i];
            if !self.node(id).expanded {
                continue;
            }
            let before = if i == last { leaf_before } else { self.node(id).cv };
            let after = self.update(id, generation)?;
            if after.same_as(&before) {
                return Ok(i);
            }
        }
        Ok(0)
    }

    pub(crate) fn backpropagate(
        &mut self,
        mode: Backprop,
        path: &Path,
        leaf_before: CompletedValue,
        generation: u64,
    ) -> Result<usize, SearchError> {
        match mode {
            Backprop::Full => self.backpropagate_full(path, generation).map(|_| 0),
            Backprop::KorfChickering => self.backpropagate_kc(path, leaf_before, generation),
        }
    }

    /// Final move choice: best child over all children, resolved or not.
    pub fn decide(&self, ties: &mut TieBreaker) -> Result<Move, SearchError> {
        let root = self.node(self.root);
        if !root.expanded {
            return Err(SearchError::RootNotExpanded);
        }
        let i = self.select(self.root, false, ties).ok_or(SearchError::NoLegalMoves)?;
        Ok(root.children[i].0)
    }
}

fn new_node(
    game: &dyn Game,
    eval: &Evaluator,
    config: &SearchConfig,
    key: u64,
    state: GameState,
    generation: u64,
) -> NodeRecord {
    let (cv, terminal) = match game.terminal_outcome(&state) {
        Some(outcome) => {
            let mover = state.to_move();
            let value = match config.terminal_eval {
                TerminalEvalMode::Exact => eval.terminal.evaluate(outcome, mover),
                TerminalEvalMode::Heuristic => eval.heuristic.evaluate_unchecked(&state),
            };
            let cv = if config.completion {
                let resolution = match outcome.score_for(mover) {
                    1 => Resolution::ProvedWin,
                    -1 => Resolution::ProvedLoss,
                    _ => Resolution::Open,
                };
                CompletedValue::resolved_with(resolution, value)
            } else {
                CompletedValue::open(value)
            };
            (cv, true)
        }
        None => (CompletedValue::open(eval.heuristic.evaluate_unchecked(&state)), false),
    };
    NodeRecord {
        key,
        state,
        cv,
        children: Vec::new(),
        expanded: false,
        terminal,
        generation,
    }
}

#[cfg(test)]
impl SearchGraph {
    /// Graph built from explicit nodes, for hand-constructed scenarios.
    pub(crate) fn from_parts(
        game: &'static dyn Game,
        config: SearchConfig,
        nodes: Vec<NodeRecord>,
    ) -> SearchGraph {
        SearchGraph {
            game,
            eval: Evaluator::new(crate::eval::HeuristicEval::uniform(game)),
            config,
            zobrist: ZobristTables::for_game(game),
            nodes,
            table: None,
            root: NodeId(0),
            moves: Vec::new(),
        }
    }

    pub(crate) fn set_cv(&mut self, id: NodeId, cv: CompletedValue) {
        self.nodes[id.index()].cv = cv;
    }
}
