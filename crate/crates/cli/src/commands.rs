use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use ordtree::almost_disjoint::verify_cuts;
use ordtree::colour_iso::Schedule;
use ordtree::ideal_lab::RawFamily;
use ordtree::order_term::{point_colour, DEFAULT_REALIZE_CAP};
use ordtree::tagged_tree::{is_prefix, RawTaggedTree};
use ordtree::tree_games::{self, verify, Cover, GameRules, GameSpec, LevelHomogenization};
use ordtree::{
    ad_extend, back_and_forth, bound_homogenize, brute_dp, canonical_colouring, character_at, classify_cut,
    compare_trees, contains_front, cover_homogenize, disjointify, dp, dp_rank, enumerate_points, finite_realize,
    front_witness, homogenize, is_scattered, level_homogenize, solve_game, verify_partial_iso, ADFamily, AdError,
    BranchColouring, Cut, GameError, Homogenization, IdealError, IsoOptions, Node, NodeValues, OrderTerm, Ordinal,
    PresentedOrder, RankMode, Relation, SearchConfig, SeededShuffle, SmallnessFamily, TVariant, TaggedTree,
    TermError, TermPresentation, Tree,
};
use serde_json::{json, Value};

use crate::report::{load, load_term, parse_arg, to_value, CliError, Verification};

pub struct Ctx {
    pub verify: bool,
    pub seed: Option<u64>,
    pub cap: Option<usize>,
    pub rounds: Option<usize>,
    pub budget: Option<String>,
}

pub type Answer = Result<(Value, Verification), CliError>;

fn check(ctx: &Ctx, f: impl FnOnce() -> Result<(), Value>) -> Verification {
    if !ctx.verify {
        return Verification::Skipped;
    }
    match f() {
        Ok(()) => Verification::Passed,
        Err(w) => Verification::Failed(w),
    }
}

fn term_error(e: TermError) -> CliError {
    match e {
        TermError::BudgetExceeded { .. } | TermError::CapExceeded { .. } | TermError::TooLarge { .. } => {
            CliError::budget(e)
        }
        _ => CliError::invalid(e),
    }
}

fn ideal_error(e: IdealError) -> CliError {
    match e {
        IdealError::BudgetExceeded { .. } => CliError::budget(e),
        _ => CliError::invalid(e),
    }
}

fn game_error(e: GameError) -> CliError {
    match e {
        GameError::NoBoundAchievable { .. } => CliError::budget(e),
        _ => CliError::invalid(e),
    }
}

fn tagged(path: &Path) -> Result<TaggedTree, CliError> {
    TaggedTree::try_from(load::<RawTaggedTree>(path)?).map_err(CliError::invalid)
}

fn family(path: &Path) -> Result<SmallnessFamily, CliError> {
    SmallnessFamily::try_from(load::<RawFamily>(path)?).map_err(CliError::invalid)
}

fn err_value(e: impl ToString) -> Value {
    json!({ "error": e.to_string() })
}

pub fn rank(ctx: &Ctx, term: &Path) -> Answer {
    let t = load_term(term)?;
    let budget: Option<Ordinal> = ctx.budget.as_deref().map(|b| parse_arg(b, "--budget")).transpose()?;
    let rank = dp(&t, budget.as_ref()).map_err(term_error)?;
    let verification = check(ctx, || {
        let n = ctx.cap.unwrap_or(64).min(ordtree::order_term::BRUTE_DP_MAX);
        let real = finite_realize(&t, n, DEFAULT_REALIZE_CAP).map_err(err_value)?;
        let brute = brute_dp(&real.order).map_err(err_value)?;
        let exact = t.finite_size().is_some_and(|s| s as usize <= n);
        let ok = if exact {
            Ordinal::from(brute) == rank
        } else {
            Ordinal::from(brute) <= rank
        };
        if ok {
            Ok(())
        } else {
            Err(json!({"points": real.order.len(), "brute_dp": brute, "exact": exact}))
        }
    });
    Ok((json!({ "dp": rank }), verification))
}

pub fn scattered(_ctx: &Ctx, term: &Path) -> Answer {
    let t = load_term(term)?;
    Ok((json!({ "scattered": is_scattered(&t) }), Verification::Skipped))
}

pub fn canon_colour(ctx: &Ctx, term: &Path) -> Answer {
    let t = load_term(term)?;
    let c = canonical_colouring(&t);
    let verification = check(ctx, || {
        for p in enumerate_points(&c, ctx.cap.unwrap_or(64)) {
            let want = character_at(&c, &p).map_err(err_value)?.index();
            let got = point_colour(&c, &p).map_err(err_value)?;
            if got != Some(want) {
                return Err(json!({"point": p, "colour": got, "character": want}));
            }
        }
        Ok(())
    });
    Ok((json!({ "term": c }), verification))
}

pub fn cut_classify(_ctx: &Ctx, term: &Path, cut: &Path) -> Answer {
    let t = load_term(term)?;
    let c: Cut = load(cut)?;
    let cases = classify_cut(&t, &c).map_err(term_error)?;
    Ok((json!({ "cases": cases }), Verification::Skipped))
}

fn presentation(ctx: &Ctx, t: OrderTerm, salt: u64) -> Box<dyn PresentedOrder> {
    match (&t, ctx.seed) {
        (OrderTerm::Shuffle(c), Some(seed)) => Box::new(SeededShuffle::new(
            c.clone(),
            seed.wrapping_mul(2).wrapping_add(salt),
            ctx.cap.unwrap_or(SeededShuffle::DEFAULT_WINDOW),
        )),
        _ => Box::new(TermPresentation::new(t, ctx.cap.unwrap_or(4095))),
    }
}

pub fn iso(ctx: &Ctx, a: &Path, b: &Path, trace: bool, square: bool) -> Answer {
    let (ta, tb) = (load_term(a)?, load_term(b)?);
    let (pa, pb) = (presentation(ctx, ta, 0), presentation(ctx, tb, 1));
    let mut opts = IsoOptions::rounds(ctx.rounds.unwrap_or(100));
    if square {
        opts.schedule = Schedule::Square;
    }
    let run = back_and_forth(pa.as_ref(), pb.as_ref(), &opts);
    let verification = check(ctx, || {
        verify_partial_iso(pa.as_ref(), pb.as_ref(), &run.iso).map_err(|e| json!({ "error": e }))
    });
    let mut verdict = json!({
        "pairs": run.iso.pairs,
        "obstruction": run.obstruction,
    });
    if trace {
        let lines: Vec<String> = run
            .trace
            .iter()
            .map(|t| {
                let side = match t.direction {
                    ordtree::colour_iso::Direction::Forward => "A",
                    ordtree::colour_iso::Direction::Backward => "B",
                };
                let placed = t.placed.map_or("none".to_string(), |p| p.to_string());
                format!("round {}: {side} {} -> {placed}", t.round, t.target)
            })
            .collect();
        verdict["trace"] = to_value(lines);
    }
    Ok((verdict, verification))
}

pub fn front(ctx: &Ctx, tree: &Path, nodes: &Path) -> Answer {
    let t: Tree = load(tree)?;
    let a: Vec<Node> = load(nodes)?;
    let holds = contains_front(&t, &a).map_err(CliError::invalid)?;
    let witness = front_witness(&t, &a);
    let verification = check(ctx, || {
        let meets = t
            .leaves()
            .into_iter()
            .all(|l| t.path_to(l).into_iter().any(|x| a.contains(t.node(x))));
        if meets != holds {
            return Err(json!({ "paths_meet": meets }));
        }
        if let Ok(w) = &witness {
            let df: BTreeMap<&Node, u64> = w.depth_fn.iter().map(|(n, d)| (n, *d)).collect();
            for (id, n) in t.nodes().iter().enumerate() {
                if a.iter().any(|f| is_prefix(f, n)) {
                    continue;
                }
                if let Some(&c) = t.children(id).iter().find(|&&c| df[t.node(c)] >= df[n]) {
                    return Err(json!({ "no_descent_at": n, "child": t.node(c) }));
                }
            }
        }
        Ok(())
    });
    let verdict = match witness {
        Ok(w) => json!({ "contains_front": holds, "witness": w }),
        Err(e) => json!({ "contains_front": holds, "witness": null, "no_witness": e }),
    };
    Ok((verdict, verification))
}

pub fn tree_rank(_ctx: &Ctx, tree: &Path, mode: RankMode) -> Answer {
    let t = tagged(tree)?;
    let ranks = dp_rank(&t, None, mode).map_err(CliError::invalid)?;
    let list: Vec<Value> = ranks
        .into_iter()
        .map(|(node, rank)| json!({ "node": node, "rank": rank }))
        .collect();
    Ok((json!({ "ranks": list }), Verification::Skipped))
}

pub fn tree_compare(_ctx: &Ctx, t1: &Path, t2: &Path, mu: Option<usize>) -> Answer {
    let (a, b) = (tagged(t1)?, tagged(t2)?);
    Ok((to_value(compare_trees(&a, &b, mu)), Verification::Skipped))
}

pub fn game(ctx: &Ctx, tree: &Path, target: &Path) -> Answer {
    let t = tagged(tree)?;
    let target: Vec<Node> = load(target)?;
    let out = solve_game(&t, &target).map_err(game_error)?;
    let verification = check(ctx, || {
        let mask = tree_games::target_mask(&t, &target).map_err(err_value)?;
        let spec = GameSpec::reach(GameRules::STANDARD, mask);
        let winner = verify::exhaustive_winner(&t, &spec);
        if winner != out.winner {
            return Err(json!({ "exhaustive_winner": winner }));
        }
        verify::check_strategy(&t, &spec, &out.strategy)
            .map(|_| ())
            .map_err(|e| json!({ "strategy": e }))
    });
    Ok((to_value(out), verification))
}

pub fn homogenize_cmd(ctx: &Ctx, tree: &Path, colouring: &Path) -> Answer {
    let t = tagged(tree)?;
    let c: BranchColouring = load(colouring)?;
    let h = homogenize(&t, &c).map_err(game_error)?;
    let verification = check(ctx, || {
        match &h {
            Homogenization::Homogeneous { colour, subtree, .. } => verify::check_homogeneous(&t, &c, *colour, subtree)
                .and_then(|_| verify::check_subtree(&t, subtree, Relation::LEStar)),
            Homogenization::Counterexample {
                branch,
                report,
                strategies,
            } => verify::check_counterexample(&t, &c, branch, report, strategies),
        }
        .map_err(|e| json!({ "error": e }))
    });
    Ok((to_value(h), verification))
}

pub fn level_homogenize_cmd(ctx: &Ctx, tree: &Path, values: &Path) -> Answer {
    let t = tagged(tree)?;
    let g: NodeValues = load(values)?;
    let h = level_homogenize(&t, &g).map_err(game_error)?;
    let verification = check(ctx, || {
        let LevelHomogenization::Homogeneous { subtree, levels } = &h else {
            return Ok(());
        };
        let labels = g.resolve(t.tree()).map_err(err_value)?;
        for n in subtree.nodes() {
            let id = t.tree().id(n).ok_or_else(|| json!({ "unknown_node": n }))?;
            if levels.get(n.len()) != Some(&labels[id]) {
                return Err(json!({ "node": n, "label": labels[id] }));
            }
        }
        verify::check_subtree(&t, subtree, Relation::LEStar).map_err(|e| json!({ "error": e }))
    });
    Ok((to_value(h), verification))
}

pub fn bound_homogenize_cmd(ctx: &Ctx, tree: &Path, values: &Path, mu: usize) -> Answer {
    let t = tagged(tree)?;
    let h: NodeValues = load(values)?;
    let cap = ctx.cap.map(|c| c as u64);
    let res = bound_homogenize(&t, &h, mu, cap).map_err(game_error)?;
    let verification = check(ctx, || {
        let labels = h.resolve(t.tree()).map_err(err_value)?;
        for n in res.subtree.nodes() {
            let id = t.tree().id(n).ok_or_else(|| json!({ "unknown_node": n }))?;
            if labels[id] >= res.alpha {
                return Err(json!({ "node": n, "value": labels[id] }));
            }
        }
        verify::check_subtree(&t, &res.subtree, Relation::LEStar).map_err(|e| json!({ "error": e }))
    });
    Ok((to_value(res), verification))
}

pub fn cover_homogenize_cmd(ctx: &Ctx, tree: &Path, cover: &Path) -> Answer {
    let t = tagged(tree)?;
    let cover: Cover = load(cover)?;
    match cover_homogenize(&t, &cover) {
        Ok(res) => {
            let verification = check(ctx, || {
                let set = &cover[res.i][res.epsilon];
                for l in res.subtree.leaves() {
                    let n = res.subtree.node(l);
                    if !set.contains(n) {
                        return Err(json!({ "leaf_outside_set": n }));
                    }
                }
                verify::check_subtree(&t, &res.subtree, Relation::LEStar).map_err(|e| json!({ "error": e }))
            });
            Ok((json!({ "Wins": res }), verification))
        }
        Err(GameError::NoIndexWins { failures }) => Ok((json!({ "NoIndexWins": failures }), Verification::Skipped)),
        Err(e) => Err(game_error(e)),
    }
}

pub fn ideal_check(_ctx: &Ctx, fam: &Path, lam: Option<u32>) -> Answer {
    let f = family(fam)?;
    let mut verdict = json!({ "report": f.report(), "maximal_members": f.maximal_members() });
    if let Some(lam) = lam {
        let config = SearchConfig::default();
        verdict["indecomposable"] = to_value(f.is_indecomposable(lam, &config).map_err(ideal_error)?);
        verdict["strongly_indecomposable"] = to_value(f.is_strongly_indecomposable(lam, &config).map_err(ideal_error)?);
    }
    Ok((verdict, Verification::Skipped))
}

pub fn t_invariant(ctx: &Ctx, fam: &Path, f: &Path, variant: TVariant) -> Answer {
    let family = family(fam)?;
    let f: BTreeMap<u32, u32> = load(f)?;
    let cap = ctx.cap.map_or(1 << 16, |c| c as u64);
    let t = family.t_invariant(&f, variant, cap).map_err(ideal_error)?;
    Ok((to_value(t), Verification::Skipped))
}

fn ad_family(path: &Path) -> Result<ADFamily, CliError> {
    let v: Value = load(path)?;
    ADFamily::from_json(&v).map_err(CliError::invalid)
}

fn ad_error(e: AdError) -> CliError {
    match e {
        AdError::InvalidFamily { .. } => CliError::invalid(e),
        _ => CliError::budget(e),
    }
}

pub fn ad_extend_cmd(ctx: &Ctx, fam: &Path, emit: usize, order: Option<Vec<usize>>) -> Answer {
    let f = ad_family(fam)?;
    let order = order.unwrap_or_else(|| (0..f.sets.len()).collect());
    let x = ad_extend(&f, &order, emit).map_err(ad_error)?;
    let verification = check(ctx, || {
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        for c in &x.choices {
            let members = f.members(c.index);
            let least = members.iter().copied().find(|e| !seen.contains(e));
            if least != Some(c.element) {
                return Err(json!({ "choice": c, "least_new_member": least }));
            }
            seen.extend(members);
        }
        for (&j, extra) in &x.overlaps {
            let members = f.members(j);
            let hits = x.elements.iter().filter(|e| members.contains(e)).count();
            let own = x.choices.iter().filter(|c| c.index == j).count();
            if hits > own + extra.len() {
                return Err(json!({ "set": j, "hits": hits }));
            }
        }
        Ok(())
    });
    Ok((to_value(x), verification))
}

pub fn ad_disjointify_cmd(ctx: &Ctx, fam: &Path) -> Answer {
    let f = ad_family(fam)?;
    let cuts = disjointify(&f).map_err(ad_error)?;
    let verification = check(ctx, || verify_cuts(&f, &cuts).map_err(|e| json!({ "error": e })));
    Ok((to_value(cuts), verification))
}
