//! Device coupling maps, heavy-hex generation, and path extraction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, PartialEq)]
pub enum DeviceError {
    #[error("invalid heavy-hex dimensions: rows and cols must be at least 1")]
    InvalidDimensions,
    #[error("malformed coupling map: {0}")]
    Malformed(String),
    #[error("edge endpoint {0} out of range for {1} qubits")]
    EndpointOutOfRange(u32, u32),
    #[error("self-loop on qubit {0}")]
    SelfLoop(u32),
    #[error("coupling map is empty")]
    Empty,
    #[error("coupling map is not connected")]
    Disconnected,
}

/// Undirected connectivity graph over physical qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMap {
    pub name: String,
    pub num_qubits: u32,
    edges: BTreeSet<(u32, u32)>,
    adjacency: BTreeMap<u32, Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct CouplingMapJson {
    #[serde(default)]
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    num_qubits: u32,
    edges: Vec<(u32, u32)>,
}

impl CouplingMap {
    pub fn new(
        name: impl Into<String>,
        num_qubits: u32,
        edge_list: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, DeviceError> {
        let mut edges = BTreeSet::new();
        let mut adjacency: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (a, b) in edge_list {
            if a == b {
                return Err(DeviceError::SelfLoop(a));
            }
            for q in [a, b] {
                if q >= num_qubits {
                    return Err(DeviceError::EndpointOutOfRange(q, num_qubits));
                }
            }
            if edges.insert((a.min(b), a.max(b))) {
                adjacency.entry(a).or_default().push(b);
                adjacency.entry(b).or_default().push(a);
            }
        }
        for neighbors in adjacency.values_mut() {
            neighbors.sort_unstable();
        }
        Ok(CouplingMap {
            name: name.into(),
            num_qubits,
            edges,
            adjacency,
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_edge(&self, a: u32, b: u32) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, q: u32) -> &[u32] {
        self.adjacency.get(&q).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, q: u32) -> usize {
        self.neighbors(q).len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_qubits).map(|q| self.degree(q)).max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.num_qubits == 0 {
            return false;
        }
        let mut seen = vec![false; self.num_qubits as usize];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(q) = queue.pop_front() {
            for &n in self.neighbors(q) {
                if !seen[n as usize] {
                    seen[n as usize] = true;
                    count += 1;
                    queue.push_back(n);
                }
            }
        }
        count == self.num_qubits
    }

    /// BFS shortest path between two qubits, inclusive of both endpoints.
    /// Neighbor iteration is index-sorted, so the result is deterministic.
    pub fn shortest_path(&self, from: u32, to: u32) -> Option<Vec<u32>> {
        if from == to {
            return Some(vec![from]);
        }
        let mut prev: BTreeMap<u32, u32> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            for &n in self.neighbors(q) {
                if n != from && !prev.contains_key(&n) {
                    prev.insert(n, q);
                    if n == to {
                        let mut path = vec![to];
                        let mut cur = to;
                        while cur != from {
                            cur = prev[&cur];
                            path.push(cur);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(n);
                }
            }
        }
        None
    }

    pub fn distance(&self, from: u32, to: u32) -> Option<usize> {
        self.shortest_path(from, to).map(|p| p.len() - 1)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, DeviceError> {
        let json: CouplingMapJson = serde_json::from_slice(bytes)
            .map_err(|e| DeviceError::Malformed(e.to_string()))?;
        CouplingMap::new(json.name, json.num_qubits, json.edges)
    }

    pub fn to_json(&self) -> String {
        let json = CouplingMapJson {
            name: self.name.clone(),
            description: None,
            num_qubits: self.num_qubits,
            edges: self.edges().collect(),
        };
        serde_json::to_string_pretty(&json).expect("coupling map serializes")
    }
}

/// Loads a coupling map from its JSON form, validating endpoints and
/// rejecting self-loops.
pub fn load_coupling_map(bytes: &[u8]) -> Result<CouplingMap, DeviceError> {
    CouplingMap::from_json(bytes)
}

/// Generates a heavy-hex lattice.
///
/// The lattice is built from `rows` blocks, each a row of `4*cols + 3`
/// linearly coupled qubits followed by `cols + 1` bridge qubits. Bridges
/// attach at columns `{0, 4, 8, ...}` on even rows and `{2, 6, 10, ...}` on
/// odd rows and couple to the row below when one exists. Indexing is
/// row-major, so each block occupies a contiguous index range.
pub fn heavy_hex(rows: u32, cols: u32) -> Result<CouplingMap, DeviceError> {
    if rows < 1 || cols < 1 {
        return Err(DeviceError::InvalidDimensions);
    }
    let width = 4 * cols + 3;
    let bridges = cols + 1;
    let block = width + bridges;
    let mut edges = Vec::new();
    for r in 0..rows {
        let base = r * block;
        for c in 0..width - 1 {
            edges.push((base + c, base + c + 1));
        }
        let bridge_base = base + width;
        for k in 0..bridges {
            let col = if r % 2 == 0 { 4 * k } else { 4 * k + 2 };
            edges.push((base + col, bridge_base + k));
            if r + 1 < rows {
                edges.push(((r + 1) * block + col, bridge_base + k));
            }
        }
    }
    CouplingMap::new(format!("heavy-hex:{rows},{cols}"), rows * block, edges)
}

/// The 133-qubit `ibm_torino` preset, checked in as an edge-list data file
/// derived from `heavy_hex(7, 3)`.
pub fn ibm_torino() -> CouplingMap {
    static DATA: &str = include_str!("../data/ibm_torino.json");
    load_coupling_map(DATA.as_bytes()).expect("bundled coupling map is valid")
}

/// A simple path of physically coupled qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardwarePath {
    pub qubits: Vec<u32>,
}

impl HardwarePath {
    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Checks adjacency and non-repetition against the source map.
    pub fn validate(&self, map: &CouplingMap) -> bool {
        let distinct: BTreeSet<u32> = self.qubits.iter().copied().collect();
        distinct.len() == self.qubits.len()
            && self.qubits.windows(2).all(|w| map.is_edge(w[0], w[1]))
    }
}

/// Greedy nearest-neighbor path extraction.
///
/// Starts at the lowest-index qubit with exactly one neighbor (falling back
/// to the lowest-index qubit of minimum degree) and repeatedly moves to the
/// unvisited neighbor with the closest index, preferring the smaller index
/// on ties. On the `ibm_torino` preset this yields a 112-qubit path
/// starting at qubit 14.
pub fn longest_nn_path(map: &CouplingMap) -> Result<HardwarePath, DeviceError> {
    if map.num_qubits == 0 {
        return Err(DeviceError::Empty);
    }
    if !map.is_connected() {
        return Err(DeviceError::Disconnected);
    }
    let start = (0..map.num_qubits)
        .find(|&q| map.degree(q) == 1)
        .unwrap_or_else(|| {
            (0..map.num_qubits)
                .min_by_key(|&q| (map.degree(q), q))
                .unwrap()
        });
    let mut visited = vec![false; map.num_qubits as usize];
    let mut path = vec![start];
    visited[start as usize] = true;
    let mut current = start;
    loop {
        let next = map
            .neighbors(current)
            .iter()
            .copied()
            .filter(|&n| !visited[n as usize])
            .min_by_key(|&n| (n.abs_diff(current), n));
        match next {
            Some(n) => {
                visited[n as usize] = true;
                path.push(n);
                current = n;
            }
            None => break,
        }
    }
    Ok(HardwarePath { qubits: path })
}
