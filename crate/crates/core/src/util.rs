//! Small shared helpers: three-valued truth, congruence solving, fresh names.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;

/// Kleene three-valued truth value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tri {
    False,
    Unknown,
    True,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        core::cmp::min(self, other)
    }

    pub fn or(self, other: Tri) -> Tri {
        core::cmp::max(self, other)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Tri {
        match self {
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
            Tri::True => Tri::False,
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }

    pub fn is_false(self) -> bool {
        self == Tri::False
    }

    /// Collapses an unknown value to `optimistic`.
    pub fn collapse(self, optimistic: bool) -> bool {
        match self {
            Tri::True => true,
            Tri::False => false,
            Tri::Unknown => optimistic,
        }
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Combines `x ≡ r1 (mod m1)` and `x ≡ r2 (mod m2)`.
///
/// Returns the combined congruence `(r, lcm(m1, m2))` with `0 ≤ r < lcm`, or
/// `None` when the two are incompatible or the modulus overflows `i64`.
pub fn merge_congruence(r1: i64, m1: i64, r2: i64, m2: i64) -> Option<(i64, i64)> {
    let (r1, m1, r2, m2) = (r1 as i128, m1 as i128, r2 as i128, m2 as i128);
    let (g, p, _) = ext_gcd(m1, m2);
    if (r2 - r1).rem_euclid(g) != 0 {
        return None;
    }
    let l = m1 / g * m2;
    if l > i64::MAX as i128 {
        return None;
    }
    let k = ((r2 - r1) / g).rem_euclid(m2 / g) * p.rem_euclid(m2 / g) % (m2 / g);
    let r = (r1 + m1 * k).rem_euclid(l);
    Some((r as i64, l as i64))
}

/// Least non-negative solution of a system of congruences, together with
/// the lcm of the moduli. The empty system yields `(0, 1)`.
pub fn solve_congruences<I: IntoIterator<Item = (i64, i64)>>(system: I) -> Option<(i64, i64)> {
    let mut acc = (0i64, 1i64);
    for (r, m) in system {
        acc = merge_congruence(acc.0, acc.1, r.rem_euclid(m), m)?;
    }
    Some(acc)
}

/// Two congruences `x ≡ a (mod b)` and `x ≡ c (mod d)` are compatible iff
/// `a ≡ c (mod gcd(b, d))`.
pub fn congruences_compatible(a: i64, b: i64, c: i64, d: i64) -> bool {
    let g = num_integer::gcd(b, d);
    (a - c).rem_euclid(g) == 0
}

/// Produces `prefix{n}` names that avoid everything in `taken`.
#[derive(Debug, Clone)]
pub struct FreshNames {
    prefix: String,
    next: usize,
}

impl FreshNames {
    pub fn new(prefix: &str) -> Self {
        FreshNames {
            prefix: String::from(prefix),
            next: 0,
        }
    }

    pub fn next(&mut self, taken: &BTreeSet<String>) -> String {
        loop {
            let name = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if !taken.contains(&name) {
                return name;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crt_matches_exhaustive_search() {
        for m1 in 1..8i64 {
            for m2 in 1..8i64 {
                for r1 in 0..m1 {
                    for r2 in 0..m2 {
                        let brute = (0..m1 * m2).find(|x| x % m1 == r1 && x % m2 == r2);
                        let got = merge_congruence(r1, m1, r2, m2).map(|(r, _)| r);
                        assert_eq!(brute, got, "{r1} mod {m1}, {r2} mod {m2}");
                        assert_eq!(brute.is_some(), congruences_compatible(r1, m1, r2, m2));
                    }
                }
            }
        }
    }

    #[test]
    fn empty_system_is_trivial() {
        assert_eq!(solve_congruences(core::iter::empty()), Some((0, 1)));
        assert_eq!(solve_congruences([(1, 2), (2, 3)]), Some((5, 6)));
    }

    #[test]
    fn tri_tables() {
        use Tri::*;
        assert_eq!(Unknown.and(False), False);
        assert_eq!(Unknown.or(True), True);
        assert_eq!(Unknown.not(), Unknown);
        assert!(Unknown.collapse(true));
        assert!(!Unknown.collapse(false));
    }
}
