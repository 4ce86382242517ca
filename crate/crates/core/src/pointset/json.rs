//! Descriptor form of rank trees. Only the descriptors are stored; the loader
//! rebuilds the child generators from them, so round-trips are exact.

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::{Arc, Node, PointsetError, RankTree};
use crate::exact::{de_rational, ser_rational};
use crate::ordinal::Ordinal;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcJson {
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub center: Rational,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub half_width: Rational,
}

impl From<Arc> for ArcJson {
    fn from(a: Arc) -> Self {
        ArcJson {
            center: a.center,
            half_width: a.half_width,
        }
    }
}

impl TryFrom<ArcJson> for Arc {
    type Error = PointsetError;

    fn try_from(j: ArcJson) -> Result<Self, Self::Error> {
        Arc::new(j.center, j.half_width)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TreeJson {
    Empty,
    Leaf {
        #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
        angle: Rational,
    },
    Cluster {
        #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
        limit: Rational,
        ordinal: Ordinal,
        arc: Arc,
        #[serde(default, skip_serializing_if = "Ordinal::is_zero")]
        cut: Ordinal,
    },
    Refined {
        #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
        limit: Rational,
        ordinal: Ordinal,
        source: Box<TreeJson>,
        #[serde(default, skip_serializing_if = "Ordinal::is_zero")]
        cut: Ordinal,
    },
    Forest {
        members: Vec<TreeJson>,
    },
}

fn node_json(node: Node, cut: Ordinal) -> TreeJson {
    match node {
        Node::Leaf(angle) => TreeJson::Leaf { angle },
        Node::Cluster { arc, rank } => TreeJson::Cluster {
            limit: arc.center.clone(),
            ordinal: rank,
            arc,
            cut,
        },
        Node::Refined { source, rank } => TreeJson::Refined {
            limit: source.anchor().clone(),
            ordinal: rank,
            source: Box::new(node_json(*source, Ordinal::zero())),
            cut,
        },
    }
}

fn bad(msg: impl Into<String>) -> PointsetError {
    PointsetError::Malformed(msg.into())
}

fn json_node(j: TreeJson) -> Result<(Node, Ordinal), PointsetError> {
    match j {
        TreeJson::Leaf { angle } => Ok((Node::leaf(angle), Ordinal::zero())),
        TreeJson::Cluster {
            limit,
            ordinal,
            arc,
            cut,
        } => {
            if ordinal.is_zero() {
                return Err(bad("cluster ordinal must be at least 1"));
            }
            if limit != *arc.center() {
                return Err(bad("cluster limit must be the arc centre"));
            }
            Ok((Node::Cluster { arc, rank: ordinal }, cut))
        }
        TreeJson::Refined {
            limit,
            ordinal,
            source,
            cut,
        } => {
            let (source, source_cut) = json_node(*source)?;
            if !source_cut.is_zero() {
                return Err(bad("refined source cannot carry a cut"));
            }
            if matches!(source, Node::Leaf(_)) {
                return Err(bad("refined source must be a cluster"));
            }
            if ordinal.is_zero() || ordinal >= source.rank() {
                return Err(bad("refined ordinal must lie strictly between 0 and the source rank"));
            }
            if limit != *source.anchor() {
                return Err(bad("refined limit must match its source"));
            }
            Ok((
                Node::Refined {
                    source: Box::new(source),
                    rank: ordinal,
                },
                cut,
            ))
        }
        TreeJson::Empty | TreeJson::Forest { .. } => Err(bad("expected a leaf, cluster or refined node")),
    }
}

impl From<RankTree> for TreeJson {
    fn from(t: RankTree) -> Self {
        match t {
            RankTree::Empty => TreeJson::Empty,
            RankTree::Node { node, cut } => node_json(node, cut),
            RankTree::Forest(ms) => TreeJson::Forest {
                members: ms.into_iter().map(TreeJson::from).collect(),
            },
        }
    }
}

impl TryFrom<TreeJson> for RankTree {
    type Error = PointsetError;

    fn try_from(j: TreeJson) -> Result<Self, Self::Error> {
        Ok(match j {
            TreeJson::Empty => RankTree::Empty,
            TreeJson::Forest { members } => {
                let members = members
                    .into_iter()
                    .map(RankTree::try_from)
                    .collect::<Result<Vec<_>, _>>()?;
                let arcs: Vec<Option<Arc>> = members
                    .iter()
                    .flat_map(|m| m.nodes().into_iter().map(|(n, _)| n.arc().cloned()))
                    .collect();
                for i in 0..arcs.len() {
                    for k in (i + 1)..arcs.len() {
                        if let (Some(a), Some(b)) = (&arcs[i], &arcs[k]) {
                            if !a.strongly_disjoint(b) {
                                return Err(PointsetError::OverlappingArcs(i, k));
                            }
                        }
                    }
                }
                RankTree::Forest(members).normalized()
            }
            other => {
                let (node, cut) = json_node(other)?;
                RankTree::Node { node, cut }.normalized()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::{build_rank_set, singleton_refine};

    fn host() -> Arc {
        Arc::new(Rational::from((1, 8)), Rational::from((1, 32))).unwrap()
    }

    #[test]
    fn round_trips() {
        let w1: Ordinal = "w+1".parse().unwrap();
        let sets = vec![
            build_rank_set(&Ordinal::finite(1), 1, &host()).unwrap(),
            build_rank_set(&Ordinal::finite(3), 2, &host()).unwrap(),
            build_rank_set(&w1, 1, &host()).unwrap().derive(&Ordinal::finite(2)),
            singleton_refine(
                &build_rank_set(&w1, 1, &host()).unwrap(),
                &Ordinal::finite(4),
                &Rational::from((1, 8)),
            )
            .unwrap(),
            RankTree::Empty,
        ];
        for s in sets {
            let text = serde_json::to_string(&s).unwrap();
            let back: RankTree = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s, "{text}");
        }
    }

    #[test]
    fn leaf_shape() {
        let t = RankTree::leaf(Rational::from((1, 8)));
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"kind":"leaf","angle":"1/8"}"#);
    }

    #[test]
    fn rejects_inconsistent_limit() {
        let text = r#"{"kind":"cluster","limit":"1/4","ordinal":"2","arc":{"center":"1/8","half_width":"1/32"}}"#;
        assert!(serde_json::from_str::<RankTree>(text).is_err());
    }
}
