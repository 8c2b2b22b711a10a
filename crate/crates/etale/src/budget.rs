//! Enumeration budgets.
//!
//! Several checks are exponential in the worst case (irredundant covers,
//! exhaustive sheaf mode, morphism enumeration for uniqueness certificates).
//! Exceeding a budget is always an explicit error or a skipped check with a
//! reason, never silent truncation.

#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    /// Irredundant-cover enumeration is allowed only on spaces with at most
    /// this many opens.
    pub max_opens_for_irredundant: usize,
    /// Cap on matching families enumerated per (open, cover) pair in sheaf
    /// checks.
    pub max_matching_families: usize,
    /// Cap on composable tuples visited by associativity checks; beyond it
    /// the check samples deterministically.
    pub max_assoc_tuples: usize,
    /// Morphism-enumeration cap for uniqueness certificates.
    pub max_morphism_candidates: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_opens_for_irredundant: 12,
            max_matching_families: 1 << 16,
            max_assoc_tuples: 200_000,
            max_morphism_candidates: 1 << 16,
        }
    }
}

impl Budgets {
    /// Reads overrides from the environment; unset or malformed variables
    /// leave the default in place.
    pub fn from_env() -> Self {
        let mut b = Budgets::default();
        let read = |name: &str| std::env::var(name).ok().and_then(|v| v.parse::<usize>().ok());
        if let Some(v) = read("ETALE_MAX_OPENS_IRREDUNDANT") {
            b.max_opens_for_irredundant = v;
        }
        if let Some(v) = read("ETALE_MAX_MATCHING_FAMILIES") {
            b.max_matching_families = v;
        }
        if let Some(v) = read("ETALE_MAX_ASSOC_TUPLES") {
            b.max_assoc_tuples = v;
        }
        if let Some(v) = read("ETALE_MAX_MORPHISM_CANDIDATES") {
            b.max_morphism_candidates = v;
        }
        b
    }
}
