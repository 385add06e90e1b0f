//! Runtime values, message payloads and messages.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Non-negative, arbitrary-precision natural number.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uint(pub BigUint);

impl Uint {
    pub fn zero() -> Self {
        Uint(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Truncating subtraction: `max(self - other, 0)`.
    pub fn monus(&self, other: &Uint) -> Uint {
        uint_monus(self, other)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn parse_decimal(text: &str) -> Option<Uint> {
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        BigUint::parse_bytes(text.as_bytes(), 10).map(Uint)
    }
}

impl From<u64> for Uint {
    fn from(v: u64) -> Self {
        Uint(BigUint::from(v))
    }
}

impl std::ops::Add for &Uint {
    type Output = Uint;
    fn add(self, rhs: &Uint) -> Uint {
        Uint(&self.0 + &rhs.0)
    }
}

impl fmt::Display for Uint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Natural-number subtraction truncated at zero.
pub fn uint_monus(a: &Uint, b: &Uint) -> Uint {
    if a.0 >= b.0 {
        Uint(&a.0 - &b.0)
    } else {
        Uint::zero()
    }
}

/// Opaque account or contract identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(Arc<str>);

impl Address {
    pub fn new(id: &str) -> Self {
        Address(Arc::from(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Address {
    fn from(s: &str) -> Self {
        Address::new(s)
    }
}

/// Transition or continuation identifier carried in a message's `method`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(Arc<str>);

impl Tag {
    /// Returns `None` for the empty string: tags are never empty.
    pub fn new(text: &str) -> Option<Self> {
        if text.is_empty() {
            None
        } else {
            Some(Tag(Arc::from(text)))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Address-to-uint association sequence with unique keys.
///
/// New keys are consed onto the front, so iteration order is the reverse of
/// first insertion. Updating an existing key keeps its position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MapValue {
    entries: Vec<(Address, Uint)>,
}

impl MapValue {
    pub fn new() -> Self {
        MapValue::default()
    }

    /// Builds a map from entries in iteration order. Later duplicates are
    /// dropped so the unique-key invariant holds.
    pub fn from_entries(entries: impl IntoIterator<Item = (Address, Uint)>) -> Self {
        let mut out: Vec<(Address, Uint)> = Vec::new();
        for (k, v) in entries {
            if !out.iter().any(|(e, _)| *e == k) {
                out.push((k, v));
            }
        }
        MapValue { entries: out }
    }

    pub fn entries(&self) -> &[(Address, Uint)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, key: &Address) -> bool {
        self.entries.iter().any(|(k, _)| k == key)
    }

    pub fn get(&self, key: &Address) -> Option<&Uint> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn put(&self, key: Address, value: Uint) -> MapValue {
        let mut entries = self.entries.clone();
        match entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => entries.insert(0, (key, value)),
        }
        MapValue { entries }
    }

    pub fn remove(&self, key: &Address) -> MapValue {
        MapValue {
            entries: self.entries.iter().filter(|(k, _)| k != key).cloned().collect(),
        }
    }

    pub fn sum_values(&self) -> Uint {
        let mut total = BigUint::zero();
        for (_, v) in &self.entries {
            total += &v.0;
        }
        Uint(total)
    }
}

/// Surface-level value types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Address,
    Uint,
    Bool,
    Str,
    /// `address => uint`
    Map,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Address => "address",
            Type::Uint => "uint",
            Type::Bool => "boolean",
            Type::Str => "string",
            Type::Map => "address => uint",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Uint(Uint),
    Bool(bool),
    Address(Address),
    Str(String),
    Map(MapValue),
}

impl Value {
    pub fn ty(&self) -> Type {
        match self {
            Value::Uint(_) => Type::Uint,
            Value::Bool(_) => Type::Bool,
            Value::Address(_) => Type::Address,
            Value::Str(_) => Type::Str,
            Value::Map(_) => Type::Map,
        }
    }

    pub fn uint(v: u64) -> Value {
        Value::Uint(Uint::from(v))
    }

    pub fn address(id: &str) -> Value {
        Value::Address(Address::new(id))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Uint(u) => write!(f, "{u}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Address(a) => write!(f, "@{a}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Map(m) => {
                f.write_str("[")?;
                for (i, (k, v)) in m.entries().iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "({k}, {v})")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Application-specific message body.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Payload {
    OkMsg,
    NoMsg,
    Text(String),
    Amount(Uint),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message {
    /// Funds carried by the message.
    pub val: Uint,
    pub sender: Address,
    pub to: Address,
    pub method: Tag,
    pub body: Payload,
}

impl Message {
    pub fn new(val: Uint, sender: Address, to: Address, method: Tag, body: Payload) -> Self {
        Message { val, sender, to, method, body }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Msg(val {}, {} -> {}, tag {:?}, body {:?})",
            self.val, self.sender, self.to, self.method.as_str(), self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(s: &str) -> Address {
        Address::new(s)
    }

    #[test]
    fn monus_examples() {
        assert_eq!(uint_monus(&7.into(), &5.into()), Uint::from(2));
        assert_eq!(uint_monus(&5.into(), &7.into()), Uint::zero());
        assert_eq!(uint_monus(&0.into(), &0.into()), Uint::zero());
    }

    #[test]
    fn put_conses_new_keys_and_replaces_existing() {
        let m = MapValue::new().put(a("A1"), 5.into()).put(a("A2"), 7.into());
        assert_eq!(m.entries(), &[(a("A2"), 7.into()), (a("A1"), 5.into())]);
        let m = m.put(a("A1"), 9.into());
        assert_eq!(m.entries(), &[(a("A2"), 7.into()), (a("A1"), 9.into())]);
    }

    #[test]
    fn remove_filters_key() {
        let m = MapValue::from_entries([(a("A1"), 5.into()), (a("A2"), 7.into())]);
        assert_eq!(m.remove(&a("A1")).entries(), &[(a("A2"), 7.into())]);
        assert_eq!(m.sum_values(), Uint::from(12));
    }

    #[test]
    fn to_u64_roundtrip() {
        assert_eq!(Uint::zero().to_u64(), Some(0));
        assert_eq!(Uint::from(u64::MAX).to_u64(), Some(u64::MAX));
        let big = &Uint::from(u64::MAX) + &Uint::from(1);
        assert_eq!(big.to_u64(), None);
        assert_eq!(Uint::parse_decimal("18446744073709551616"), Some(big));
        assert_eq!(Uint::parse_decimal("-1"), None);
    }

    #[test]
    fn empty_tag_rejected() {
        assert!(Tag::new("").is_none());
        assert_eq!(Tag::new("donate").unwrap().as_str(), "donate");
    }

    fn arb_map() -> impl Strategy<Value = MapValue> {
        prop::collection::vec((0u8..6, 0u64..50), 0..6).prop_map(|es| {
            MapValue::from_entries(es.into_iter().map(|(k, v)| (a(&format!("A{k}")), v.into())))
        })
    }

    proptest! {
        #[test]
        fn map_laws(m in arb_map(), k in 0u8..8, v in 0u64..100) {
            let key = a(&format!("A{k}"));
            let put = m.put(key.clone(), v.into());
            prop_assert!(put.contains(&key));
            prop_assert_eq!(put.get(&key), Some(&Uint::from(v)));
            prop_assert!(!m.remove(&key).contains(&key));
            // keys stay unique
            let mut keys: Vec<_> = put.entries().iter().map(|(k, _)| k.clone()).collect();
            let n = keys.len();
            keys.sort();
            keys.dedup();
            prop_assert_eq!(keys.len(), n);
        }

        #[test]
        fn monus_law(x in any::<u64>(), y in any::<u64>()) {
            let r = uint_monus(&x.into(), &y.into());
            if x >= y {
                prop_assert_eq!(r, Uint::from(x - y));
            } else {
                prop_assert!(r.is_zero());
            }
        }
    }
}
