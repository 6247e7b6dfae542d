/// Resource caps. Every cap can be raised or lowered through an environment
/// variable so batch jobs can bound memory without recompiling.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Maximum number of cells in any dense grid (`GNSLAB_MAX_CELLS`).
    pub max_cells: u64,
    /// Maximum number of points `enumerate_region` may produce (`GNSLAB_MAX_REGION_POINTS`).
    pub max_region_points: u64,
    /// Maximum residue classes for the group-coverage DP (`GNSLAB_MAX_RESIDUES`).
    pub max_residues: u64,
    /// Cap on collected gap point lists; counts stay exact (`GNSLAB_MAX_GAP_POINTS`).
    pub max_gap_points: u64,
    /// Largest partition-table index buildable on demand (`GNSLAB_MAX_PTN_BUDGET`).
    pub max_partition_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_cells: 1 << 31,
            max_region_points: 1 << 26,
            max_residues: 1 << 22,
            max_gap_points: 1_000_000,
            max_partition_budget: 20_000,
        }
    }
}

impl Limits {
    /// Defaults overridden by environment variables where present.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        let read = |name: &str| std::env::var(name).ok().and_then(|v| v.parse::<u64>().ok());
        if let Some(v) = read("GNSLAB_MAX_CELLS") {
            l.max_cells = v;
        }
        if let Some(v) = read("GNSLAB_MAX_REGION_POINTS") {
            l.max_region_points = v;
        }
        if let Some(v) = read("GNSLAB_MAX_RESIDUES") {
            l.max_residues = v;
        }
        if let Some(v) = read("GNSLAB_MAX_GAP_POINTS") {
            l.max_gap_points = v;
        }
        if let Some(v) = read("GNSLAB_MAX_PTN_BUDGET") {
            l.max_partition_budget = v;
        }
        l
    }
}
