//! Allen's interval relations over integer intervals `[s, e]`, `s < e`.

use crate::formula::RelationSymbol;

/// The twelve non-equality Allen relations. Equality of intervals is the
/// built-in `eq`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AllenRelation {
    Before,
    After,
    Meets,
    MetBy,
    Overlaps,
    OverlappedBy,
    During,
    Contains,
    Starts,
    StartedBy,
    Finishes,
    FinishedBy,
}

impl AllenRelation {
    pub const ALL: [AllenRelation; 12] = [
        AllenRelation::Before,
        AllenRelation::After,
        AllenRelation::Meets,
        AllenRelation::MetBy,
        AllenRelation::Overlaps,
        AllenRelation::OverlappedBy,
        AllenRelation::During,
        AllenRelation::Contains,
        AllenRelation::Starts,
        AllenRelation::StartedBy,
        AllenRelation::Finishes,
        AllenRelation::FinishedBy,
    ];

    /// Short canonical name (`b`, `a`, `m`, `mi`, `o`, `oi`, `d`, `di`,
    /// `s`, `si`, `f`, `fi`).
    pub fn short_name(self) -> &'static str {
        match self {
            AllenRelation::Before => "b",
            AllenRelation::After => "a",
            AllenRelation::Meets => "m",
            AllenRelation::MetBy => "mi",
            AllenRelation::Overlaps => "o",
            AllenRelation::OverlappedBy => "oi",
            AllenRelation::During => "d",
            AllenRelation::Contains => "di",
            AllenRelation::Starts => "s",
            AllenRelation::StartedBy => "si",
            AllenRelation::Finishes => "f",
            AllenRelation::FinishedBy => "fi",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            AllenRelation::Before => "before",
            AllenRelation::After => "after",
            AllenRelation::Meets => "meets",
            AllenRelation::MetBy => "metby",
            AllenRelation::Overlaps => "overlaps",
            AllenRelation::OverlappedBy => "overlappedby",
            AllenRelation::During => "during",
            AllenRelation::Contains => "contains",
            AllenRelation::Starts => "starts",
            AllenRelation::StartedBy => "startedby",
            AllenRelation::Finishes => "finishes",
            AllenRelation::FinishedBy => "finishedby",
        }
    }

    /// Accepts both the short and the long spelling.
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.short_name() == name || r.long_name() == name)
    }

    /// The relation symbol with the short name.
    pub fn symbol(self) -> RelationSymbol {
        RelationSymbol::named(self.short_name(), 2).expect("valid identifier")
    }

    pub fn holds(self, (s1, e1): (i64, i64), (s2, e2): (i64, i64)) -> bool {
        match self {
            AllenRelation::Before => e1 < s2,
            AllenRelation::After => e2 < s1,
            AllenRelation::Meets => e1 == s2,
            AllenRelation::MetBy => e2 == s1,
            AllenRelation::Overlaps => s1 < s2 && s2 < e1 && e1 < e2,
            AllenRelation::OverlappedBy => s2 < s1 && s1 < e2 && e2 < e1,
            AllenRelation::During => s2 < s1 && e1 < e2,
            AllenRelation::Contains => s1 < s2 && e2 < e1,
            AllenRelation::Starts => s1 == s2 && e1 < e2,
            AllenRelation::StartedBy => s1 == s2 && e2 < e1,
            AllenRelation::Finishes => e1 == e2 && s2 < s1,
            AllenRelation::FinishedBy => e1 == e2 && s1 < s2,
        }
    }
}
