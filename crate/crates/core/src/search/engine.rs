use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use super::graph::{NodeId, Path, SearchGraph, TieBreaker};
use super::{Backprop, Budget, SearchConfig, SearchError, SearchStats};
use crate::eval::Evaluator;
use crate::game::{Game, GameState, Move};
use crate::value::CompletedValue;

/// What one iteration did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Expanded an unexpanded node.
    Expand,
    /// Descent ended on a terminal leaf (possible only with completion
    /// off); nothing new was generated.
    Terminal,
    /// Descent met a node whose children are all resolved; the node was
    /// resolved in place.
    Resolve,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Expand => "expand",
            StepKind::Terminal => "terminal",
            StepKind::Resolve => "resolve",
        })
    }
}

/// One line of the expansion log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionRecord {
    pub iteration: u64,
    pub kind: StepKind,
    /// Key of the node at the end of the descent.
    pub key: u64,
    /// Edges from the root to that node.
    pub path_len: usize,
    pub root_cv: CompletedValue,
}

impl fmt::Display for ExpansionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{:016x}\t{}\t{}",
            self.iteration, self.kind, self.key, self.path_len, self.root_cv
        )
    }
}

/// Where the next descent starts: the root-to-start prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cursor {
    pub prefix: Path,
}

impl Cursor {
    pub fn at_root(root: NodeId) -> Cursor {
        Cursor {
            prefix: Path::single(root),
        }
    }

    pub fn start(&self) -> NodeId {
        self.prefix.last()
    }
}

/// A single search from one position: graph, cursor and counters.
pub struct Searcher {
    graph: SearchGraph,
    config: SearchConfig,
    ties: TieBreaker,
    cursor: Cursor,
    stats: SearchStats,
    expanded_keys: HashSet<u64>,
    last_path: Path,
    log: Option<Vec<ExpansionRecord>>,
}

impl Searcher {
    pub fn new(
        game: &'static dyn Game,
        state: GameState,
        eval: Evaluator,
        config: SearchConfig,
    ) -> Result<Searcher, SearchError> {
        config.validate()?;
        if game.is_terminal(&state) {
            return Err(SearchError::TerminalState);
        }
        let graph = SearchGraph::new(game, state, eval, config)?;
        let root = graph.root();
        Ok(Searcher {
            ties: TieBreaker::new(&config),
            cursor: Cursor::at_root(root),
            graph,
            config,
            stats: SearchStats::default(),
            expanded_keys: HashSet::new(),
            last_path: Path::single(root),
            log: None,
        })
    }

    /// Keeps an [`ExpansionRecord`] per iteration.
    pub fn with_log(mut self) -> Searcher {
        self.log = Some(Vec::new());
        self
    }

    pub fn graph(&self) -> &SearchGraph {
        &self.graph
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn cursor(&self) -> &Cursor {
        &self.cursor
    }

    /// Root-to-leaf path of the most recent iteration.
    pub fn last_path(&self) -> &Path {
        &self.last_path
    }

    pub fn log(&self) -> &[ExpansionRecord] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn root_value(&self) -> CompletedValue {
        self.graph.node(self.graph.root()).cv
    }

    pub fn root_resolved(&self) -> bool {
        self.config.completion && self.root_value().resolved
    }

    pub fn stats(&self) -> SearchStats {
        let mut stats = self.stats;
        stats.distinct_states_expanded = self.expanded_keys.len() as u64;
        stats.nodes_created = self.graph.len() as u64;
        stats.root_resolved = self.root_resolved();
        stats
    }

    /// One descent, expansion and backpropagation.
    pub fn iterate(&mut self) -> Result<StepKind, SearchError> {
        if self.root_resolved() {
            return Err(SearchError::RootResolved);
        }
        let root = self.graph.root();
        if self.config.completion && self.graph.node(self.cursor.start()).cv.resolved {
            self.cursor = Cursor::at_root(root);
        }
        let generation = self.stats.iterations + 1;
        let mut path = self.cursor.prefix.clone();
        let kind = match self.graph.descend(self.cursor.start(), &mut self.ties) {
            Ok(tail) => {
                path.extend(tail);
                if self.graph.node(path.last()).terminal {
                    StepKind::Terminal
                } else {
                    StepKind::Expand
                }
            }
            Err(SearchError::AllChildrenResolved { path: tail }) => {
                path.extend(tail);
                StepKind::Resolve
            }
            Err(e) => return Err(e),
        };
        let leaf = path.last();
        let leaf_before = self.graph.node(leaf).cv;
        if kind == StepKind::Expand {
            self.graph.expand(leaf, generation)?;
            self.stats.nodes_expanded += 1;
            self.expanded_keys.insert(self.graph.node(leaf).key);
        }
        let invariant = self
            .graph
            .backpropagate(self.config.backprop, &path, leaf_before, generation)?;

        self.stats.iterations = generation;
        self.stats.max_depth_reached = self.stats.max_depth_reached.max(path.depth() as u64);
        if let Some(log) = &mut self.log {
            log.push(ExpansionRecord {
                iteration: generation,
                kind,
                key: self.graph.node(leaf).key,
                path_len: path.depth(),
                root_cv: self.graph.node(root).cv,
            });
        }
        self.cursor = match self.config.backprop {
            Backprop::Full => Cursor::at_root(root),
            Backprop::KorfChickering => {
                let mut prefix = path.clone();
                prefix.truncate_to(invariant);
                Cursor { prefix }
            }
        };
        self.last_path = path;
        Ok(kind)
    }

    /// Iterates until the budget is spent or the root is resolved. At least
    /// one iteration always runs.
    pub fn run(&mut self) -> Result<SearchStats, SearchError> {
        let started = Instant::now();
        loop {
            match self.iterate() {
                Ok(_) => {}
                Err(SearchError::RootResolved) => break,
                Err(e) => return Err(e),
            }
            let done = match self.config.budget {
                Budget::Iterations(n) => self.stats.iterations >= n,
                Budget::WallClockMillis(ms) => started.elapsed().as_millis() >= ms as u128,
            };
            if done {
                break;
            }
        }
        self.stats.elapsed += started.elapsed();
        Ok(self.stats())
    }

    pub fn decide(&mut self) -> Result<Move, SearchError> {
        self.graph.decide(&mut self.ties)
    }
}

/// Runs a fresh search from `state` and returns the chosen move.
pub fn search(
    game: &'static dyn Game,
    state: &GameState,
    eval: &Evaluator,
    config: &SearchConfig,
) -> Result<(Move, SearchStats), SearchError> {
    let mut searcher = Searcher::new(game, *state, eval.clone(), *config)?;
    let stats = searcher.run()?;
    Ok((searcher.decide()?, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{costly_terminal_wrapper, HeuristicEval};
    use crate::game::{all_games, random_playout, HEX5, OTHELLO6, TICTACTOE};
    use crate::search::{Preset, TerminalEvalMode, TieBreak};
    use crate::value::Resolution;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform(game: &'static dyn Game) -> Evaluator {
        Evaluator::new(HeuristicEval::uniform(game))
    }

    fn all_configs() -> Vec<SearchConfig> {
        let mut out = Vec::new();
        for use_tt in [false, true] {
            for backprop in [Backprop::Full, Backprop::KorfChickering] {
                for completion in [false, true] {
                    for terminal_eval in [TerminalEvalMode::Exact, TerminalEvalMode::Heuristic] {
                        out.push(SearchConfig {
                            use_tt,
                            backprop,
                            completion,
                            terminal_eval,
                            ..SearchConfig::default()
                        });
                    }
                }
            }
        }
        out
    }

    #[test]
    fn first_iteration_expands_root() {
        for config in all_configs() {
            let mut s = Searcher::new(&TICTACTOE, TICTACTOE.initial_state(), uniform(&TICTACTOE), config).unwrap();
            assert_eq!(s.iterate(), Ok(StepKind::Expand));
            assert!(s.graph().node(s.graph().root()).expanded);
            assert_eq!(s.stats().nodes_expanded, 1);
            assert_eq!(s.stats().iterations, 1);
        }
    }

    #[test]
    fn tictactoe_root_expansion() {
        let eval = uniform(&TICTACTOE);
        let mut s = Searcher::new(&TICTACTOE, TICTACTOE.initial_state(), eval.clone(), SearchConfig::default()).unwrap();
        s.iterate().unwrap();
        let g = s.graph();
        let root = g.node(g.root());
        assert_eq!(root.children.len(), 9);
        let start = TICTACTOE.initial_state();
        let mut best = f64::NEG_INFINITY;
        for (i, &(mv, child)) in root.children.iter().enumerate() {
            assert_eq!(mv, Move(i as u16));
            let cv = g.node(child).cv;
            assert!(!cv.resolved);
            let expected = eval.heuristic.evaluate(&TICTACTOE.play(&start, mv)).unwrap();
            assert_eq!(cv.value, expected);
            best = best.max(-expected);
        }
        assert!(root.cv.same_as(&CompletedValue::open(best)));
    }

    #[test]
    fn tictactoe_resolves_to_draw_and_stops_early() {
        for preset in [Preset::UbfmRef, Preset::NoTt, Preset::KcBackprop] {
            let config = SearchConfig::preset(preset).with_iterations(1_000_000);
            let mut s = Searcher::new(&TICTACTOE, TICTACTOE.initial_state(), uniform(&TICTACTOE), config).unwrap();
            let stats = s.run().unwrap();
            assert!(stats.root_resolved, "{preset}");
            assert!(stats.iterations < 1_000_000);
            assert!(s.root_value().same_as(&CompletedValue::resolved_draw(0.0)), "{preset}");
            assert_eq!(s.iterate(), Err(SearchError::RootResolved));
        }
    }

    #[test]
    fn terminal_child_values() {
        // X to move wins at cell 2.
        let s = crate::game::parse_diagram(&TICTACTOE, "XX.\nOO.\n...\nX\n").unwrap();
        for (completion, terminal_eval) in [
            (true, TerminalEvalMode::Exact),
            (false, TerminalEvalMode::Exact),
            (false, TerminalEvalMode::Heuristic),
            (true, TerminalEvalMode::Heuristic),
        ] {
            let config = SearchConfig {
                completion,
                terminal_eval,
                ..SearchConfig::default()
            };
            let eval = uniform(&TICTACTOE);
            let mut searcher = Searcher::new(&TICTACTOE, s, eval.clone(), config).unwrap();
            searcher.iterate().unwrap();
            let g = searcher.graph();
            let (_, child) = *g.node(g.root()).children.iter().find(|c| c.0 == Move(2)).unwrap();
            let node = g.node(child);
            assert!(node.terminal);
            // The child's mover (O) has lost.
            let heuristic = eval.heuristic.evaluate_unchecked(&node.state);
            let expected = match (completion, terminal_eval) {
                (true, TerminalEvalMode::Exact) => CompletedValue::PROVED_LOSS,
                (false, TerminalEvalMode::Exact) => CompletedValue::open(-1.0),
                (false, TerminalEvalMode::Heuristic) => CompletedValue::open(heuristic),
                (true, TerminalEvalMode::Heuristic) => {
                    CompletedValue::resolved_with(Resolution::ProvedLoss, heuristic)
                }
            };
            assert!(node.cv.same_as(&expected), "{:?} vs {:?}", node.cv, expected);
            assert!(heuristic.abs() < 1.0);
            if completion {
                assert_eq!(searcher.root_value().resolution, Resolution::ProvedWin);
            }
        }
    }

    #[test]
    fn search_rejects_terminal_states_and_zero_budgets() {
        let s = crate::game::parse_diagram(&TICTACTOE, "XXX\nOO.\n...\nO\n").unwrap();
        let eval = uniform(&TICTACTOE);
        assert_eq!(
            search(&TICTACTOE, &s, &eval, &SearchConfig::default()).unwrap_err(),
            SearchError::TerminalState
        );
        let start = TICTACTOE.initial_state();
        assert_eq!(
            search(&TICTACTOE, &start, &eval, &SearchConfig::default().with_iterations(0)).unwrap_err(),
            SearchError::InvalidBudget
        );
    }

    #[test]
    fn one_iteration_gives_a_legal_move_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for game in all_games() {
            let eval = uniform(game);
            for plies in [0, 3, 8] {
                let s = random_playout(game, plies, &mut rng);
                if game.is_terminal(&s) {
                    continue;
                }
                for config in all_configs() {
                    let (mv, stats) = search(game, &s, &eval, &config.with_iterations(1)).unwrap();
                    assert!(game.legal_moves(&s).unwrap().contains(&mv));
                    assert_eq!(stats.iterations, 1);
                }
            }
        }
    }

    #[test]
    fn completion_off_can_loop_on_terminal_leaves() {
        // O to move must block at 2; X threatens a second line too, so the
        // position is lost and the search soon keeps landing on terminals.
        let s = crate::game::parse_diagram(&TICTACTOE, "XX.\nXO.\nO..\nO\n").unwrap();
        let config = SearchConfig::preset(Preset::NoCompletion).with_iterations(500);
        let mut searcher = Searcher::new(&TICTACTOE, s, uniform(&TICTACTOE), config).unwrap().with_log();
        let stats = searcher.run().unwrap();
        assert_eq!(stats.iterations, 500);
        assert!(!stats.root_resolved);
        assert!(searcher.log().iter().any(|r| r.kind == StepKind::Terminal));
        assert!(stats.nodes_expanded < stats.iterations);
    }

    #[test]
    fn tt_shares_nodes_and_expands_each_key_once() {
        let eval = uniform(&OTHELLO6);
        let config = SearchConfig::default().with_iterations(3000);
        let mut s = Searcher::new(&OTHELLO6, OTHELLO6.initial_state(), eval, config).unwrap();
        let stats = s.run().unwrap();
        assert_eq!(stats.distinct_states_expanded, stats.nodes_expanded);
        let keys: HashSet<u64> = s.graph().nodes().iter().map(|n| n.key).collect();
        assert_eq!(keys.len(), s.graph().len());
    }

    #[test]
    fn verify_mode_checks_keys_and_progress() {
        for game in all_games() {
            let config = SearchConfig {
                verify_keys: true,
                ..SearchConfig::default().with_iterations(2000)
            };
            search(game, &game.initial_state(), &uniform(game), &config).unwrap();
        }
    }

    #[test]
    fn kc_equals_full_without_ties_or_tt() {
        let eval = Evaluator::new(HeuristicEval::uniform(&HEX5).injective(11));
        let run = |backprop| {
            let config = SearchConfig {
                use_tt: false,
                backprop,
                ..SearchConfig::default().with_iterations(800)
            };
            let mut s = Searcher::new(&HEX5, HEX5.initial_state(), eval.clone(), config).unwrap().with_log();
            s.run().unwrap();
            (s.log().to_vec(), s.decide().unwrap())
        };
        assert_eq!(run(Backprop::Full), run(Backprop::KorfChickering));
    }

    // Along the principal line every change reaches the root unless a
    // resolved sibling holds the parent's value, so use a game that resolves
    // early.
    #[test]
    fn kc_cursor_restarts_below_root() {
        let eval = Evaluator::new(HeuristicEval::uniform(&TICTACTOE).injective(2));
        let config = SearchConfig::preset(Preset::KcBackprop);
        let mut s = Searcher::new(&TICTACTOE, TICTACTOE.initial_state(), eval, config).unwrap();
        let mut below_root = 0;
        while s.iterate().is_ok() {
            below_root += (s.cursor().prefix.depth() > 0) as u32;
            let prefix = &s.cursor().prefix;
            assert_eq!(prefix.nodes[..], s.last_path().nodes[..prefix.nodes.len()]);
        }
        assert!(below_root > 0);
    }

    #[test]
    fn wall_clock_budget_shrinks_with_terminal_cost() {
        // Resolves after about 9300 iterations without a TT.
        let s = crate::game::parse_diagram(&HEX5, "X....\n.XO..\n..XO.\n...X.\n...O.\nX\n").unwrap();
        let config = SearchConfig::preset(Preset::NoTt).with_budget(Budget::WallClockMillis(40));
        let mut counts = Vec::new();
        for units in [0, 1_000, 100_000] {
            let mut eval = uniform(&HEX5);
            eval.terminal = costly_terminal_wrapper(eval.terminal, units);
            let mut searcher = Searcher::new(&HEX5, s, eval, config).unwrap();
            let stats = searcher.run().unwrap();
            assert!(!stats.root_resolved);
            counts.push(stats.iterations);
        }
        assert!(counts[0] >= counts[1] && counts[1] > counts[2], "{counts:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn deterministic_under_iteration_budgets(
            seed in any::<u64>(),
            plies in 0usize..6,
            config_index in 0usize..16,
            random_ties in any::<bool>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let games = all_games();
            let game = games[(seed % games.len() as u64) as usize];
            let s = random_playout(game, plies, &mut rng);
            prop_assume!(!game.is_terminal(&s));
            let mut config = all_configs()[config_index].with_iterations(300);
            config.rng_seed = seed;
            if random_ties {
                config.tie_break = TieBreak::SeededRandom(seed.rotate_left(7));
            }
            let eval = uniform(game);
            let run = || {
                let mut searcher = Searcher::new(game, s, eval.clone(), config).unwrap().with_log();
                let mut stats = searcher.run().unwrap();
                stats.elapsed = Default::default();
                (searcher.decide().unwrap(), stats, searcher.log().to_vec())
            };
            prop_assert_eq!(run(), run());
        }

        #[test]
        fn updated_path_is_negamax_consistent(
            seed in any::<u64>(),
            config_index in 0usize..16,
        ) {
            let games = all_games();
            let game = games[(seed % games.len() as u64) as usize];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_playout(game, 2, &mut rng);
            prop_assume!(!game.is_terminal(&s));
            let config = all_configs()[config_index];
            let mut searcher = Searcher::new(game, s, uniform(game), config).unwrap();
            for _ in 0..200 {
                match searcher.iterate() {
                    Ok(_) => {}
                    Err(SearchError::RootResolved) => break,
                    Err(e) => panic!("{e}"),
                }
                let g = searcher.graph();
                let path = searcher.last_path();
                let from = match config.backprop {
                    Backprop::Full => 0,
                    Backprop::KorfChickering => searcher.cursor().prefix.depth(),
                };
                for &id in &path.nodes[from..] {
                    if g.node(id).expanded {
                        prop_assert!(g.node(id).cv.same_as(&g.recompute(id).unwrap()));
                    }
                }
            }
        }

        #[test]
        fn descent_never_enters_resolved_children(seed in any::<u64>()) {
            let games = all_games();
            let game = games[(seed % games.len() as u64) as usize];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_playout(game, 4, &mut rng);
            prop_assume!(!game.is_terminal(&s));
            let config = if seed % 2 == 0 {
                SearchConfig::default()
            } else {
                SearchConfig::preset(Preset::KcBackprop)
            };
            let mut searcher = Searcher::new(game, s, uniform(game), config).unwrap();
            for _ in 0..300 {
                let resolved: Vec<bool> = searcher.graph().nodes().iter().map(|n| n.cv.resolved).collect();
                let from = searcher.cursor().prefix.depth() + 1;
                if searcher.iterate().is_err() {
                    break;
                }
                for &id in &searcher.last_path().nodes[from..] {
                    prop_assert!(!resolved.get(id.index()).copied().unwrap_or(false));
                }
            }
        }
    }
}
