use serde::{Deserialize, Serialize};

/// One edit in a revision log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisionRecord {
    pub article_id: String,
    pub rev_index: u64,
    /// Epoch seconds.
    pub timestamp: u64,
    pub editor_id: String,
    #[serde(with = "bool_as_int")]
    pub is_bot: bool,
    /// Lowercase hex content fingerprint.
    pub digest: String,
}

/// Directed negative interaction: `reverter` undid work of `reverted`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RevertEvent {
    pub article_id: String,
    pub time: u64,
    pub reverter: String,
    pub reverted: String,
    pub restored_rev: u64,
    pub reverting_rev: u64,
    /// Number of undone revisions.
    pub depth: u64,
    #[serde(with = "bool_as_int")]
    pub self_revert: bool,
}

pub(crate) mod bool_as_int {
    use serde::{de, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = bool;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("0, 1, true or false")
            }
            fn visit_bool<E: de::Error>(self, v: bool) -> Result<bool, E> {
                Ok(v)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<bool, E> {
                match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    _ => Err(E::custom(format!("expected 0 or 1, got {v}"))),
                }
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<bool, E> {
                self.visit_u64(u64::try_from(v).map_err(|_| E::custom("negative flag"))?)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<bool, E> {
                match v.trim() {
                    "0" | "false" => Ok(false),
                    "1" | "true" => Ok(true),
                    _ => Err(E::custom(format!("expected 0 or 1, got `{v}`"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}
