use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use super::{RoutingEnv, StartDistribution};
use crate::error::{Error, Result};
use crate::mdp::{ActionSpec, TabularMdp};

/// Undirected edges `(u, v, weight)` of the six-node network, node 6 the destination.
pub const SIX_NODE_EDGES: [(i64, i64, f64); 9] = [
    (1, 5, 18.0),
    (5, 6, 8.0),
    (6, 4, 6.0),
    (4, 3, 11.0),
    (3, 1, 9.0),
    (3, 5, 2.0),
    (1, 2, 7.0),
    (3, 2, 10.0),
    (4, 2, 19.0),
];

#[derive(Debug, Clone, PartialEq)]
pub enum StartSpec {
    Node(i64),
    /// Uniform over every node except the destination.
    Uniform,
}

/// An undirected weighted graph with a destination node. Routing a packet
/// along an edge earns the negated edge weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub edges: Vec<(i64, i64, f64)>,
    pub destination: i64,
    pub start: StartSpec,
}

impl WeightedGraph {
    /// Builds the routing MDP. States are nodes in ascending id order; in each
    /// node, action `k` moves to the `k`-th neighbour in descending id order.
    pub fn to_env(&self, discount: f64) -> Result<RoutingEnv> {
        let mut adjacency: BTreeMap<i64, BTreeMap<i64, f64>> = BTreeMap::new();
        for &(u, v, w) in &self.edges {
            if u == v {
                return Err(Error::domain(format!("self-loop at node {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::domain(format!("edge ({u}, {v}) has non-positive weight {w}")));
            }
            adjacency.entry(u).or_default().insert(v, w);
            adjacency.entry(v).or_default().insert(u, w);
        }
        if !adjacency.contains_key(&self.destination) {
            return Err(Error::domain(format!(
                "destination {} is not on any edge",
                self.destination
            )));
        }
        let nodes: Vec<i64> = adjacency.keys().copied().collect();
        let index: BTreeMap<i64, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();

        // every node must reach the destination (connectedness, graph being undirected)
        let mut seen = BTreeSet::from([self.destination]);
        let mut queue = VecDeque::from([self.destination]);
        while let Some(u) = queue.pop_front() {
            for &v in adjacency[&u].keys() {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        if seen.len() != nodes.len() {
            let missing: Vec<_> = nodes.iter().filter(|n| !seen.contains(n)).collect();
            return Err(Error::domain(format!(
                "destination unreachable from nodes {missing:?}"
            )));
        }

        let mut actions = Vec::with_capacity(nodes.len());
        let mut labels = Vec::with_capacity(nodes.len());
        for &u in &nodes {
            if u == self.destination {
                actions.push(vec![]);
                labels.push(vec!["stay".to_string()]);
                continue;
            }
            let (specs, names): (Vec<_>, Vec<_>) = adjacency[&u]
                .iter()
                .rev()
                .map(|(&v, &w)| (ActionSpec::deterministic(-w, index[&v]), format!("->{v}")))
                .unzip();
            actions.push(specs);
            labels.push(names);
        }
        let terminal = index[&self.destination];
        let mdp = TabularMdp::new(actions, discount, &[terminal])?;
        let start = match self.start {
            StartSpec::Node(n) => StartDistribution::State(
                *index
                    .get(&n)
                    .ok_or_else(|| Error::domain(format!("start node {n} not in graph")))?,
            ),
            StartSpec::Uniform => {
                StartDistribution::Uniform((0..nodes.len()).filter(|&s| s != terminal).collect())
            }
        };
        Ok(RoutingEnv::new(mdp, start, nodes, labels))
    }

    /// Parses the edge-list format: one `u v weight` per line plus
    /// `destination=<id>` and optional `start=<id|uniform>` headers.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            message: format!("line {line}: {message}"),
        };
        let mut edges = Vec::new();
        let mut destination = None;
        let mut start = StartSpec::Uniform;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "destination" => {
                        destination = Some(
                            value
                                .parse::<i64>()
                                .map_err(|e| err(i + 1, format!("bad destination: {e}")))?,
                        )
                    }
                    "start" if value == "uniform" => start = StartSpec::Uniform,
                    "start" => {
                        start = StartSpec::Node(
                            value
                                .parse::<i64>()
                                .map_err(|e| err(i + 1, format!("bad start: {e}")))?,
                        )
                    }
                    other => return Err(err(i + 1, format!("unknown header `{other}`"))),
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err(i + 1, format!("expected `u v weight`, got `{line}`")));
            }
            let parse_id = |f: &str| f.parse::<i64>().map_err(|e| err(i + 1, format!("bad node id `{f}`: {e}")));
            let u = parse_id(fields[0])?;
            let v = parse_id(fields[1])?;
            let w = fields[2]
                .parse::<f64>()
                .map_err(|e| err(i + 1, format!("bad weight `{}`: {e}", fields[2])))?;
            edges.push((u, v, w));
        }
        let destination =
            destination.ok_or_else(|| err(0, "missing `destination=<id>` header".to_string()))?;
        Ok(WeightedGraph {
            edges,
            destination,
            start,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("destination={}\n", self.destination);
        match self.start {
            StartSpec::Node(n) => out.push_str(&format!("start={n}\n")),
            StartSpec::Uniform => out.push_str("start=uniform\n"),
        }
        for (u, v, w) in &self.edges {
            out.push_str(&format!("{u} {v} {w}\n"));
        }
        out
    }
}

/// The six-node network with destination 6, every episode starting at node 1,
/// discount 0.8.
pub fn six_node_env() -> RoutingEnv {
    WeightedGraph {
        edges: SIX_NODE_EDGES.to_vec(),
        destination: 6,
        start: StartSpec::Node(1),
    }
    .to_env(0.8)
    .expect("six-node graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_one_neighbours_descending() {
        let env = six_node_env();
        let s = env.state_of_node(1).unwrap();
        let mdp = env.mdp();
        let targets: Vec<i64> = mdp
            .actions(s)
            .iter()
            .map(|a| env.node_id(a.transitions[0].0))
            .collect();
        let rewards: Vec<f64> = mdp.actions(s).iter().map(|a| a.reward).collect();
        assert_eq!(targets, vec![5, 3, 2]);
        assert_eq!(rewards, vec![-18.0, -9.0, -7.0]);
    }

    #[test]
    fn destination_is_canonical_terminal() {
        let env = six_node_env();
        let t = env.state_of_node(6).unwrap();
        assert!(env.mdp().is_terminal(t));
        assert_eq!(env.mdp().actions(t), &[ActionSpec::deterministic(0.0, t)]);
        assert_eq!(env.mdp().discount(), 0.8);
    }

    #[test]
    fn node_three_has_four_actions() {
        let env = six_node_env();
        assert_eq!(env.mdp().num_actions(env.state_of_node(3).unwrap()), 4);
        assert_eq!(env.start(), &StartDistribution::State(0));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = WeightedGraph {
            edges: SIX_NODE_EDGES.to_vec(),
            destination: 6,
            start: StartSpec::Node(1),
        };
        assert_eq!(WeightedGraph::parse(&g.to_text(), "t").unwrap(), g);
        let text = "# tiny\ndestination = 3\nstart=uniform\n1 2 1\n2 3 2.5\n";
        let parsed = WeightedGraph::parse(text, "t").unwrap();
        let env = parsed.to_env(0.9).unwrap();
        assert_eq!(env.mdp().num_states(), 3);
        assert_eq!(env.start(), &StartDistribution::Uniform(vec![0, 1]));
    }

    #[test]
    fn bad_graphs_rejected() {
        assert!(WeightedGraph::parse("1 2 3\n", "t").is_err());
        assert!(WeightedGraph::parse("destination=2\n1 2\n", "t").is_err());
        let disconnected = WeightedGraph {
            edges: vec![(1, 2, 1.0), (3, 4, 1.0)],
            destination: 2,
            start: StartSpec::Uniform,
        };
        assert!(disconnected.to_env(0.9).is_err());
        let negative = WeightedGraph {
            edges: vec![(1, 2, -1.0)],
            destination: 2,
            start: StartSpec::Uniform,
        };
        assert!(negative.to_env(0.9).is_err());
    }
}
