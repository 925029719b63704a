//! Clustering results and the binary assignment-matrix view of them.

use serde::{Deserialize, Serialize};

use crate::matrix::Distances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// The search tree was exhausted; no cheaper medoid set exists.
    GlobalOptimal,
    LocalHeuristic,
}

impl Certificate {
    pub fn as_str(self) -> &'static str {
        match self {
            Certificate::GlobalOptimal => "global_optimal",
            Certificate::LocalHeuristic => "local_heuristic",
        }
    }
}

/// A partition of `p` series into `k` clusters, each represented by one of
/// its members (the medoid). Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Sorted ascending.
    pub medoids: Vec<usize>,
    /// `assignment[j]` is the medoid index that series `j` belongs to.
    pub assignment: Vec<usize>,
    pub total_cost: f64,
    pub certificate: Certificate,
    /// Branch-and-bound nodes visited; `None` for heuristic runs.
    pub nodes_explored: Option<u64>,
}

impl ClusterResult {
    pub fn k(&self) -> usize {
        self.medoids.len()
    }

    /// Members of each cluster, in medoid order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        self.medoids
            .iter()
            .map(|&m| {
                (0..self.assignment.len())
                    .filter(|&j| self.assignment[j] == m)
                    .collect()
            })
            .collect()
    }

    /// The implied `p × p` assignment matrix.
    pub fn assignment_matrix(&self) -> AssignmentMatrix {
        let p = self.assignment.len();
        let mut a = AssignmentMatrix::zeros(p);
        for (j, &i) in self.assignment.iter().enumerate() {
            a.set(i, j, true);
        }
        a
    }
}

/// Assign every series to its nearest medoid and return `(assignment, cost)`.
///
/// A medoid always belongs to its own cluster; other ties go to the lowest
/// medoid index. The cost is summed in ascending series order.
pub(crate) fn assign_nearest(d: &(impl Distances + ?Sized), medoids: &[usize]) -> (Vec<usize>, f64) {
    debug_assert!(medoids.windows(2).all(|w| w[0] < w[1]));
    let p = d.size();
    let mut assignment = Vec::with_capacity(p);
    let mut cost = 0.0;
    for j in 0..p {
        if medoids.binary_search(&j).is_ok() {
            assignment.push(j);
            continue;
        }
        let mut best = medoids[0];
        let mut best_d = d.distance(best, j);
        for &m in &medoids[1..] {
            let dm = d.distance(m, j);
            if dm < best_d {
                best = m;
                best_d = dm;
            }
        }
        assignment.push(best);
        cost += best_d;
    }
    (assignment, cost)
}

/// `Σⱼ d(j, assignment[j])`, summed in ascending `j`.
pub fn assignment_cost(d: &(impl Distances + ?Sized), assignment: &[usize]) -> f64 {
    assignment
        .iter()
        .enumerate()
        .map(|(j, &m)| if m == j { 0.0 } else { d.distance(m, j) })
        .sum()
}

/// Square binary matrix; `A[i][j] = 1` when series `j` belongs to the
/// cluster whose medoid is series `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentMatrix {
    p: usize,
    cells: Vec<bool>,
}

impl AssignmentMatrix {
    pub fn zeros(p: usize) -> Self {
        Self {
            p,
            cells: vec![false; p * p],
        }
    }

    /// From 0/1 rows. Returns `None` if the rows are ragged or not binary.
    pub fn from_rows(rows: &[Vec<u8>]) -> Option<Self> {
        let p = rows.len();
        let mut a = Self::zeros(p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return None;
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => a.set(i, j, true),
                    _ => return None,
                }
            }
        }
        Some(a)
    }

    pub fn size(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.p + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[i * self.p + j] = v;
    }
}

/// One violated constraint of the clustering integer program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintViolation {
    /// `Σᵢ A[i][i] = k` fails.
    CentroidCount { expected: usize, found: usize },
    /// Column `column` does not sum to exactly one.
    ColumnSum { column: usize, sum: usize },
    /// `A[row][column] = 1` while `A[row][row] = 0`.
    MemberWithoutCentroid { row: usize, column: usize },
}

impl ConstraintViolation {
    /// Equation number in the usual statement of the program (4, 5 or 6).
    pub fn equation(&self) -> u8 {
        match self {
            ConstraintViolation::CentroidCount { .. } => 4,
            ConstraintViolation::ColumnSum { .. } => 5,
            ConstraintViolation::MemberWithoutCentroid { .. } => 6,
        }
    }
}

impl std::fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintViolation::CentroidCount { expected, found } => {
                write!(f, "Eq. 4: {found} centroids on the diagonal, expected {expected}")
            }
            ConstraintViolation::ColumnSum { column, sum } => {
                write!(f, "Eq. 5: column {} sums to {sum}, expected 1", column + 1)
            }
            ConstraintViolation::MemberWithoutCentroid { row, column } => write!(
                f,
                "Eq. 6: A[{r}][{c}] = 1 but A[{r}][{r}] = 0",
                r = row + 1,
                c = column + 1
            ),
        }
    }
}

/// Check the three assignment constraints; an empty vector means the matrix passes.
pub fn validate_assignment(a: &AssignmentMatrix, k: usize) -> Vec<ConstraintViolation> {
    let p = a.size();
    let mut violations = Vec::new();

    let found = (0..p).filter(|&i| a.get(i, i)).count();
    if found != k {
        violations.push(ConstraintViolation::CentroidCount { expected: k, found });
    }
    for j in 0..p {
        let sum = (0..p).filter(|&i| a.get(i, j)).count();
        if sum != 1 {
            violations.push(ConstraintViolation::ColumnSum { column: j, sum });
        }
    }
    for i in 0..p {
        if a.get(i, i) {
            continue;
        }
        for j in 0..p {
            if a.get(i, j) {
                violations.push(ConstraintViolation::MemberWithoutCentroid { row: i, column: j });
            }
        }
    }
    violations
}
