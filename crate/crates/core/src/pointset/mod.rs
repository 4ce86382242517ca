//! Countable closed subsets of circular arcs with prescribed
//! Cantor–Bendixson structure.
//!
//! A set is described symbolically by a [`Node`] tree whose children are
//! produced on demand by a pure generator, together with a *cut* ordinal:
//! [`RankTree::Node`] with cut `β` denotes the derived set `E^(β)` of the set
//! `E` of leaves of the tree. Every point of the closure carries a
//! Cantor–Bendixson rank (leaves 0, a cluster apex its `rank` tag), and
//!
//! * `E^(0) = E` is the set of leaves (apexes are never members of `E`),
//! * `E^(β)` for `β ≥ 1` is the set of closure points of rank `≥ β`.
//!
//! Child placement: child `n ≥ 1` of a cluster on an arc of half-width `h`
//! sits on an arc of half-width `h/3^(n+2)` centred `h/2^n` below the apex.
//! Children of a successor-rank cluster all have rank `λ − 1`; children of a
//! limit-rank cluster take the ranks of [`crate::ordinal::enumerate_below`]
//! in order, so their ranks are cofinal in `λ`.

mod json;
pub mod oracle;

use std::fmt;
use std::ops::Add;

use rug::Rational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{circular_distance, normalize_turn, pow2, pow3, same_turn};
use crate::ordinal::{nth_below, Ordinal};

pub use json::ArcJson;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PointsetError {
    #[error("rank sets need alpha >= 1")]
    ZeroAlpha,
    #[error("nu must be at least 1")]
    ZeroNu,
    #[error("limit ordinal {alpha} only admits nu = 1 (got {nu})")]
    LimitWithNu { alpha: Ordinal, nu: u64 },
    #[error("invalid arc: {0}")]
    InvalidArc(String),
    #[error("arcs {0} and {1} are not strongly disjoint")]
    OverlappingArcs(usize, usize),
    #[error("member {0} does not lie inside its declared arc")]
    OutsideArc(usize),
    #[error("turn {target} is not a point of the derived set of order {alpha}")]
    TargetNotInDerived { target: String, alpha: Ordinal },
    #[error("set has only {available} points, {required} requested")]
    Insufficient { required: usize, available: usize },
    #[error("{required} points need materialization depth beyond {depth}")]
    DepthExceeded { required: usize, depth: usize },
    #[error("malformed rank tree: {0}")]
    Malformed(String),
}

/// A closed arc `{e^{2πiθ} : |θ − center| ≤ half_width}` of the unit circle,
/// angles in turns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ArcJson", into = "ArcJson")]
pub struct Arc {
    center: Rational,
    half_width: Rational,
}

impl Arc {
    pub fn new(center: Rational, half_width: Rational) -> Result<Self, PointsetError> {
        if half_width <= 0 {
            return Err(PointsetError::InvalidArc("half-width must be positive".into()));
        }
        if half_width >= (1, 4) {
            return Err(PointsetError::InvalidArc("half-width must be below 1/4 turn".into()));
        }
        Ok(Arc {
            center: normalize_turn(&center),
            half_width,
        })
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn half_width(&self) -> &Rational {
        &self.half_width
    }

    pub fn contains(&self, turn: &Rational) -> bool {
        circular_distance(&self.center, turn) <= self.half_width
    }

    pub fn contains_arc(&self, other: &Arc) -> bool {
        let d = circular_distance(&self.center, &other.center);
        d + &other.half_width <= self.half_width
    }

    /// Closed arcs with disjoint closures.
    pub fn strongly_disjoint(&self, other: &Arc) -> bool {
        let d = circular_distance(&self.center, &other.center);
        d > Rational::from(&self.half_width + &other.half_width)
    }

    /// Angular distance (turns) from `turn` to the arc, zero inside it.
    pub fn gap_to(&self, turn: &Rational) -> Rational {
        let d = circular_distance(&self.center, turn) - self.half_width.clone();
        if d < 0 {
            Rational::new()
        } else {
            d
        }
    }

    /// Signed offset of `turn` from the centre, in `[−1/2, 1/2)`.
    fn offset(&self, turn: &Rational) -> Rational {
        let half = Rational::from((1, 2));
        let shifted = normalize_turn(&(Rational::from(turn - &self.center) + &half));
        shifted - half
    }

    /// Arc of the `n`-th child (`n ≥ 1`).
    pub fn child_arc(&self, n: u32) -> Arc {
        let dist = Rational::from(&self.half_width / pow2(n));
        let hw = Rational::from(&self.half_width / pow3(n + 2));
        Arc {
            center: normalize_turn(&(self.center.clone() - dist)),
            half_width: hw,
        }
    }

    /// `j`-th of `nu` strongly disjoint sub-arcs (`0 ≤ j < nu`).
    pub fn sub_arc(&self, j: u64, nu: u64) -> Arc {
        let step = Rational::from(&self.half_width / nu);
        let center = self.center.clone() - self.half_width.clone() + step.clone() * (2 * j + 1);
        Arc {
            center: normalize_turn(&center),
            half_width: step / 3u32,
        }
    }
}

/// Symbolic descriptor of a countable closed set with exact rank data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// A single isolated point (turns).
    Leaf(Rational),
    /// The construction set on `arc` whose apex (the arc centre) has rank
    /// `rank ≥ 1`.
    Cluster { arc: Arc, rank: Ordinal },
    /// A subset of `source` whose apex has rank exactly `rank`, selected as in
    /// the singleton refinement.
    Refined { source: Box<Node>, rank: Ordinal },
}

impl Node {
    pub fn leaf(turn: Rational) -> Node {
        Node::Leaf(normalize_turn(&turn))
    }

    /// The construction set on `arc` with apex rank `rank` (a leaf at the
    /// centre when `rank = 0`).
    pub fn construction(arc: Arc, rank: Ordinal) -> Node {
        if rank.is_zero() {
            Node::Leaf(arc.center.clone())
        } else {
            Node::Cluster { arc, rank }
        }
    }

    pub fn rank(&self) -> Ordinal {
        match self {
            Node::Leaf(_) => Ordinal::zero(),
            Node::Cluster { rank, .. } | Node::Refined { rank, .. } => rank.clone(),
        }
    }

    /// Leaf angle or cluster apex.
    pub fn anchor(&self) -> &Rational {
        match self {
            Node::Leaf(t) => t,
            Node::Cluster { arc, .. } => &arc.center,
            Node::Refined { source, .. } => source.anchor(),
        }
    }

    pub fn arc(&self) -> Option<&Arc> {
        match self {
            Node::Leaf(_) => None,
            Node::Cluster { arc, .. } => Some(arc),
            Node::Refined { source, .. } => source.arc(),
        }
    }

    /// Children with their host arcs, in order of approach to the apex.
    /// Infinite for clusters, empty for leaves.
    pub fn children(&self) -> Box<dyn Iterator<Item = (Arc, Node)> + Send + '_> {
        match self {
            Node::Leaf(_) => Box::new(std::iter::empty()),
            Node::Cluster { arc, rank } => {
                let pred = rank.predecessor().expect("cluster rank is positive");
                Box::new((1u32..).map(move |n| {
                    let child_arc = arc.child_arc(n);
                    let child_rank = match &pred {
                        Some(p) => p.clone(),
                        None => nth_below(rank, (n - 1) as usize).expect("limit bound is infinite"),
                    };
                    (child_arc.clone(), Node::construction(child_arc, child_rank))
                }))
            }
            Node::Refined { source, rank } => match rank.predecessor().expect("refined rank is positive") {
                Some(gamma) => Box::new(source.children().filter(move |(_, c)| c.rank() >= gamma).map({
                    let gamma = rank.predecessor().unwrap().unwrap();
                    move |(a, c)| (a, refine_node(c, &gamma))
                })),
                None => {
                    let mut k = 1u64;
                    Box::new(source.children().filter_map(move |(a, c)| {
                        let target = rank.fundamental_sequence(k).expect("limit rank");
                        if c.rank() >= target {
                            k += 1;
                            Some((a, refine_node(c, &target)))
                        } else {
                            None
                        }
                    }))
                }
            },
        }
    }

    /// Children that meet `E^(cut)`.
    fn surviving_children(&self, cut: &Ordinal) -> impl Iterator<Item = (Arc, Node)> + '_ {
        let cut = cut.clone();
        self.children().filter(move |(_, c)| cut.is_zero() || c.rank() >= cut)
    }

    /// Leaf of the subtree reached by always taking the first child.
    fn first_leaf(&self) -> Node {
        let mut cur = self.clone();
        loop {
            let next = cur.children().next().map(|(_, c)| c);
            match next {
                Some(c) => cur = c,
                None => return cur,
            }
        }
    }

    /// Index-free lookup of the child whose region contains `turn`.
    fn child_containing(&self, turn: &Rational) -> Option<(Arc, Node)> {
        let arc = self.arc()?;
        let offset = arc.offset(turn);
        if offset >= 0 || -offset.clone() > *arc.half_width() {
            return None;
        }
        for (child_arc, child) in self.children() {
            if child_arc.contains(turn) {
                return Some((child_arc, child));
            }
            let child_low = child_arc.offset(turn);
            // children move upward toward the apex; once a child starts above
            // `turn` no later child can contain it
            let child_bottom = arc.offset(&child_arc.center) - child_arc.half_width.clone();
            if child_bottom > offset && child_low < 0 {
                return None;
            }
        }
        None
    }

    fn member(&self, cut: &Ordinal, turn: &Rational) -> bool {
        match self {
            Node::Leaf(a) => cut.is_zero() && same_turn(a, turn),
            _ => {
                if same_turn(self.anchor(), turn) {
                    return !cut.is_zero() && self.rank() >= *cut;
                }
                match self.child_containing(turn) {
                    Some((_, c)) if cut.is_zero() || c.rank() >= *cut => c.member(cut, turn),
                    _ => false,
                }
            }
        }
    }

    /// Locates the closure point `turn` and returns the node whose anchor it
    /// is.
    fn locate(&self, turn: &Rational) -> Option<Node> {
        if same_turn(self.anchor(), turn) {
            return Some(self.clone());
        }
        let (_, child) = self.child_containing(turn)?;
        child.locate(turn)
    }

    fn materialize_into(&self, cut: &Ordinal, depth: usize, per_level: usize, out: &mut Vec<Rational>) {
        if let Node::Leaf(a) = self {
            if cut.is_zero() {
                out.push(a.clone());
            }
            return;
        }
        let rank = self.rank();
        if !cut.is_zero() {
            if rank < *cut {
                return;
            }
            out.push(self.anchor().clone());
            if rank == *cut {
                return;
            }
        }
        if depth == 0 {
            return;
        }
        for (_, child) in self.surviving_children(cut).take(per_level) {
            child.materialize_into(cut, depth - 1, per_level, out);
        }
    }
}

/// Subset of `node` whose derived set of order `gamma` is exactly the anchor
/// of `node` (a leaf inside it when `gamma = 0`).
fn refine_node(node: Node, gamma: &Ordinal) -> Node {
    let rank = node.rank();
    if rank == *gamma {
        node
    } else if gamma.is_zero() {
        node.first_leaf()
    } else {
        Node::Refined {
            source: Box::new(node),
            rank: gamma.clone(),
        }
    }
}

/// Cardinality of a countable set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Card {
    Finite(u64),
    #[serde(with = "infinite_str")]
    Infinite,
}

mod infinite_str {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("infinite")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "infinite" {
            Ok(())
        } else {
            Err(serde::de::Error::custom("expected \"infinite\""))
        }
    }
}

impl Add for Card {
    type Output = Card;

    fn add(self, rhs: Card) -> Card {
        match (self, rhs) {
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a + b),
            _ => Card::Infinite,
        }
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Finite(n) => write!(f, "{n}"),
            Card::Infinite => write!(f, "infinite"),
        }
    }
}

/// `(β, |E^(β)|)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankProfile {
    pub entries: Vec<(Ordinal, Card)>,
}

impl RankProfile {
    pub fn get(&self, beta: &Ordinal) -> Option<Card> {
        self.entries.iter().find(|(b, _)| b == beta).map(|(_, c)| *c)
    }
}

/// A derived set `E^(cut)` of a construction tree, a finite union of such on
/// strongly disjoint arcs, or the empty set. Values are kept normalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "json::TreeJson", into = "json::TreeJson")]
pub enum RankTree {
    Empty,
    Node { node: Node, cut: Ordinal },
    Forest(Vec<RankTree>),
}

impl RankTree {
    pub fn from_node(node: Node) -> RankTree {
        RankTree::Node {
            node,
            cut: Ordinal::zero(),
        }
        .normalized()
    }

    pub fn leaf(turn: Rational) -> RankTree {
        RankTree::from_node(Node::leaf(turn))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, RankTree::Empty)
    }

    fn anchor(&self) -> Option<Rational> {
        match self {
            RankTree::Empty => None,
            RankTree::Node { node, .. } => Some(node.anchor().clone()),
            RankTree::Forest(ms) => ms.first().and_then(RankTree::anchor),
        }
    }

    /// Canonical form: degenerate cuts collapsed, forests flattened and
    /// sorted by anchor.
    pub fn normalized(self) -> RankTree {
        match self {
            RankTree::Empty => RankTree::Empty,
            RankTree::Node { node, cut } => {
                if cut.is_zero() {
                    return RankTree::Node { node, cut };
                }
                let rank = node.rank();
                if rank < cut {
                    RankTree::Empty
                } else if rank == cut {
                    RankTree::Node {
                        node: Node::Leaf(node.anchor().clone()),
                        cut: Ordinal::zero(),
                    }
                } else {
                    RankTree::Node { node, cut }
                }
            }
            RankTree::Forest(members) => {
                let mut flat = Vec::new();
                for m in members {
                    match m.normalized() {
                        RankTree::Empty => {}
                        RankTree::Forest(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                flat.sort_by_key(|a| a.anchor());
                match flat.len() {
                    0 => RankTree::Empty,
                    1 => flat.pop().expect("one member"),
                    _ => RankTree::Forest(flat),
                }
            }
        }
    }

    /// `E^(β)` of this set.
    pub fn derive(&self, beta: &Ordinal) -> RankTree {
        match self {
            RankTree::Empty => RankTree::Empty,
            RankTree::Node { node, cut } => RankTree::Node {
                node: node.clone(),
                cut: cut.add(beta),
            }
            .normalized(),
            RankTree::Forest(ms) => RankTree::Forest(ms.iter().map(|m| m.derive(beta)).collect()).normalized(),
        }
    }

    /// The set of accumulation points.
    pub fn derive_once(&self) -> RankTree {
        self.derive(&Ordinal::finite(1))
    }

    pub fn cardinality(&self) -> Card {
        match self {
            RankTree::Empty => Card::Finite(0),
            RankTree::Node { node, cut } => {
                if matches!(node, Node::Leaf(_)) {
                    Card::Finite(1)
                } else if cut.is_zero() || node.rank() > *cut {
                    Card::Infinite
                } else {
                    Card::Finite(1)
                }
            }
            RankTree::Forest(ms) => ms.iter().fold(Card::Finite(0), |acc, m| acc + m.cardinality()),
        }
    }

    pub fn rank_profile(&self, betas: &[Ordinal]) -> RankProfile {
        RankProfile {
            entries: betas
                .iter()
                .map(|b| (b.clone(), self.derive(b).cardinality()))
                .collect(),
        }
    }

    pub fn contains(&self, turn: &Rational) -> bool {
        match self {
            RankTree::Empty => false,
            RankTree::Node { node, cut } => node.member(cut, turn),
            RankTree::Forest(ms) => ms.iter().any(|m| m.contains(turn)),
        }
    }

    /// Deterministic finite prefix of the point set: every cluster expands
    /// its first `per_level` surviving children, `depth` levels deep.
    /// Sorted and duplicate-free; monotone in both parameters.
    pub fn materialize(&self, depth: usize, per_level: usize) -> Vec<Rational> {
        let mut out = Vec::new();
        self.materialize_into(depth, per_level, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn materialize_into(&self, depth: usize, per_level: usize, out: &mut Vec<Rational>) {
        match self {
            RankTree::Empty => {}
            RankTree::Node { node, cut } => node.materialize_into(cut, depth, per_level, out),
            RankTree::Forest(ms) => ms.iter().for_each(|m| m.materialize_into(depth, per_level, out)),
        }
    }

    /// An enumeration `c₁, c₂, …` of the set: stage `k` materializes with
    /// depth and width `k` and appends the new points in increasing order.
    /// Prefixes are stable as `count` grows.
    pub fn enumerate_points(&self, count: usize) -> Result<Vec<Rational>, PointsetError> {
        const MAX_STAGE: usize = 48;
        let mut seen: Vec<Rational> = Vec::new();
        for stage in 1..=MAX_STAGE {
            for p in self.materialize(stage, stage) {
                if !seen.contains(&p) {
                    seen.push(p);
                }
            }
            if seen.len() >= count {
                seen.truncate(count);
                return Ok(seen);
            }
            if let Card::Finite(n) = self.cardinality() {
                if seen.len() as u64 >= n {
                    return Err(PointsetError::Insufficient {
                        required: count,
                        available: seen.len(),
                    });
                }
            }
        }
        Err(PointsetError::DepthExceeded {
            required: count,
            depth: MAX_STAGE,
        })
    }

    /// Construction nodes of the set (one per forest member).
    pub fn nodes(&self) -> Vec<(&Node, &Ordinal)> {
        match self {
            RankTree::Empty => Vec::new(),
            RankTree::Node { node, cut } => vec![(node, cut)],
            RankTree::Forest(ms) => ms.iter().flat_map(RankTree::nodes).collect(),
        }
    }
}

/// `E(α, ν, Γ)`: a set on `host` with `E ∩ E^(1) = ∅` and
/// `|E^(α−1)| = ν` for successor `α`, `|E^(α)| = 1` for limit `α`.
pub fn build_rank_set(alpha: &Ordinal, nu: u64, host: &Arc) -> Result<RankTree, PointsetError> {
    if alpha.is_zero() {
        return Err(PointsetError::ZeroAlpha);
    }
    if nu == 0 {
        return Err(PointsetError::ZeroNu);
    }
    let apex_rank = match alpha.predecessor().expect("alpha is non-zero") {
        Some(p) => p,
        None if nu != 1 => {
            return Err(PointsetError::LimitWithNu {
                alpha: alpha.clone(),
                nu,
            })
        }
        None => alpha.clone(),
    };
    if nu == 1 {
        return Ok(RankTree::from_node(Node::construction(host.clone(), apex_rank)));
    }
    let copies = (0..nu)
        .map(|j| RankTree::from_node(Node::construction(host.sub_arc(j, nu), apex_rank.clone())))
        .collect();
    Ok(RankTree::Forest(copies).normalized())
}

/// Union of sets living on pairwise strongly disjoint arcs; derivation then
/// commutes with the union.
pub fn union_disjoint(sets: Vec<(RankTree, Arc)>) -> Result<RankTree, PointsetError> {
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            if !sets[i].1.strongly_disjoint(&sets[j].1) {
                return Err(PointsetError::OverlappingArcs(i, j));
            }
        }
        for (node, _) in sets[i].0.nodes() {
            let inside = match node.arc() {
                Some(a) => sets[i].1.contains_arc(a),
                None => sets[i].1.contains(node.anchor()),
            };
            if !inside {
                return Err(PointsetError::OutsideArc(i));
            }
        }
    }
    Ok(RankTree::Forest(sets.into_iter().map(|(t, _)| t).collect()).normalized())
}

/// `Ê ⊆ e` with `Ê^(α) = {target}`.
pub fn singleton_refine(e: &RankTree, alpha: &Ordinal, target: &Rational) -> Result<RankTree, PointsetError> {
    let not_in = || PointsetError::TargetNotInDerived {
        target: target.to_string(),
        alpha: alpha.clone(),
    };
    if !e.derive(alpha).contains(target) {
        return Err(not_in());
    }
    for (node, cut) in e.nodes() {
        let Some(found) = node.locate(target) else {
            continue;
        };
        let level = cut.add(alpha);
        let refined = refine_node(found, &level);
        return Ok(RankTree::Node {
            node: refined,
            cut: cut.clone(),
        }
        .normalized());
    }
    Err(not_in())
}
