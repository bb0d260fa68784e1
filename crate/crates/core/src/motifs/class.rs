use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Two-event revert motifs. With the first event written `A→B`, the
/// second event decides the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MotifClass {
    /// A→B, A→B
    SerialAttack,
    /// A→B, B→A
    Revenge,
    /// A→B, A→C
    AttackSpree,
    /// A→B, C→B
    PileOn,
    /// A→B, C→A
    ThirdPartyDefense,
    /// A→B, B→C
    DisplacedAggression,
}

impl MotifClass {
    pub const ALL: [MotifClass; 6] = [
        MotifClass::SerialAttack,
        MotifClass::Revenge,
        MotifClass::AttackSpree,
        MotifClass::PileOn,
        MotifClass::ThirdPartyDefense,
        MotifClass::DisplacedAggression,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MotifClass::SerialAttack => "SerialAttack",
            MotifClass::Revenge => "Revenge",
            MotifClass::AttackSpree => "AttackSpree",
            MotifClass::PileOn => "PileOn",
            MotifClass::ThirdPartyDefense => "ThirdPartyDefense",
            MotifClass::DisplacedAggression => "DisplacedAggression",
        }
    }

    /// Role indices (0 = A, 1 = B, 2 = C) of the second event's reverter
    /// and reverted.
    pub fn second_roles(self) -> (usize, usize) {
        match self {
            MotifClass::SerialAttack => (0, 1),
            MotifClass::Revenge => (1, 0),
            MotifClass::AttackSpree => (0, 2),
            MotifClass::PileOn => (2, 1),
            MotifClass::ThirdPartyDefense => (2, 0),
            MotifClass::DisplacedAggression => (1, 2),
        }
    }

    /// Classifies `(a→b, c→d)`. `None` when the events share no editor or
    /// either is a self-revert.
    pub fn classify<S: PartialEq + ?Sized>(a: &S, b: &S, c: &S, d: &S) -> Option<MotifClass> {
        if a == b || c == d {
            return None;
        }
        Some(match (c == a, c == b, d == a, d == b) {
            (true, _, _, true) => MotifClass::SerialAttack,
            (_, true, true, _) => MotifClass::Revenge,
            (true, _, _, false) => MotifClass::AttackSpree,
            (false, false, _, true) => MotifClass::PileOn,
            (false, false, true, _) => MotifClass::ThirdPartyDefense,
            (_, true, false, _) => MotifClass::DisplacedAggression,
            _ => return None,
        })
    }
}

impl fmt::Display for MotifClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MotifClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        MotifClass::ALL
            .into_iter()
            .find(|c| c.as_str().to_ascii_lowercase() == norm)
            .ok_or_else(|| Error::Parse {
                key: "motif class".into(),
                value: s.into(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_cases() {
        assert_eq!(MotifClass::classify("A", "B", "A", "B"), Some(MotifClass::SerialAttack));
        assert_eq!(MotifClass::classify("A", "B", "B", "A"), Some(MotifClass::Revenge));
        assert_eq!(MotifClass::classify("A", "B", "A", "C"), Some(MotifClass::AttackSpree));
        assert_eq!(MotifClass::classify("A", "B", "C", "B"), Some(MotifClass::PileOn));
        assert_eq!(MotifClass::classify("A", "B", "C", "A"), Some(MotifClass::ThirdPartyDefense));
        assert_eq!(MotifClass::classify("A", "B", "B", "C"), Some(MotifClass::DisplacedAggression));
        assert_eq!(MotifClass::classify("A", "B", "C", "D"), None);
        assert_eq!(MotifClass::classify("A", "A", "A", "B"), None);
    }

    #[test]
    fn roles_round_trip() {
        let ids = ["A", "B", "C"];
        for class in MotifClass::ALL {
            let (r, t) = class.second_roles();
            assert_eq!(MotifClass::classify("A", "B", ids[r], ids[t]), Some(class));
            assert_eq!(class.as_str().parse::<MotifClass>().unwrap(), class);
        }
        assert_eq!("third-party-defense".parse::<MotifClass>().unwrap(), MotifClass::ThirdPartyDefense);
        assert!("ABBA?".parse::<MotifClass>().is_err());
    }

    proptest! {
        /// Every pair of non-self events sharing an editor lands in exactly
        /// one class, and relabeling editors does not change it.
        #[test]
        fn exhaustive_and_label_invariant(a in 0u8..5, b in 0u8..5, c in 0u8..5, d in 0u8..5, shift in 1u8..5) {
            prop_assume!(a != b && c != d);
            let shares = c == a || c == b || d == a || d == b;
            let got = MotifClass::classify(&a, &b, &c, &d);
            prop_assert_eq!(got.is_some(), shares);
            if let Some(class) = got {
                let fits = |x: u8, role: usize| match role {
                    0 => x == a,
                    1 => x == b,
                    _ => x != a && x != b,
                };
                let matches = MotifClass::ALL
                    .iter()
                    .filter(|k| {
                        let (r, t) = k.second_roles();
                        fits(c, r) && fits(d, t)
                    })
                    .count();
                prop_assert_eq!(matches, 1);
                let p = |x: u8| (x + shift) % 5;
                prop_assert_eq!(MotifClass::classify(&p(a), &p(b), &p(c), &p(d)), Some(class));
            }
        }
    }
}
