pub mod ordinal;

pub use ordinal::{Cofinality, Ordinal, OrdinalError};
pub mod ideal_lab;

pub use ideal_lab::{Count, IdealError, IdealReport, SearchConfig, SmallnessFamily, TVariant};
pub mod tagged_tree;

pub use tagged_tree::{
    compare_trees, contains_front, dp_rank, front_witness, FrontWitness, Node, RankMode,
    Relation, TaggedTree, Tree, TreeError, TreeRelation,
};
pub mod tree_games;
pub use tree_games::{
    bound_homogenize, cover_homogenize, homogenize, level_homogenize, solve_game, BranchColouring, GameError, GameOutcome,
    GameRules, Homogenization, LevelHomogenization, NodeValues, Player, Strategy,
};
pub mod order_term;
pub use order_term::{
    brute_dp, canonical_colouring, character_at, classify_cut, compare_points, dp, enumerate_points, finite_realize, is_scattered, Character, Cut, CutAt,
    CutCase, FiniteOrder, Local, OrderTerm, Point, TermError, split_at_cut, split_at_point,
};
pub mod colour_iso;
pub use colour_iso::{
    automorphism_over, back_and_forth, quite_closed_check, verify_partial_iso, FinitePresentation, IsoOptions, IsoRun,
    Obstruction, PartialIso, PresentedOrder, SeededShuffle, TermPresentation,
};
pub mod almost_disjoint;
pub use almost_disjoint::{ad_extend, disjointify, ADFamily, AdError, LazySet};
pub mod generate;
