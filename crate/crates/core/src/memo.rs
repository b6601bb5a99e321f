use std::collections::HashMap;
use std::hash::Hash;
use std::sync::RwLock;

/// Thread-safe memo table. Concurrent fills of the same key must carry equal
/// values, so a lost race only wastes work.
pub(crate) struct Memo<K, V> {
    inner: RwLock<HashMap<K, V>>,
}

impl<K: Hash + Eq + Clone, V: Clone> Memo<K, V> {
    pub fn new() -> Self {
        Memo { inner: RwLock::new(HashMap::new()) }
    }

    pub fn get(&self, key: &K) -> Option<V> {
        self.inner.read().expect("memo lock poisoned").get(key).cloned()
    }

    pub fn insert(&self, key: K, value: V) {
        self.inner.write().expect("memo lock poisoned").insert(key, value);
    }

    pub fn get_or_insert_with(&self, key: &K, f: impl FnOnce() -> V) -> V {
        if let Some(v) = self.get(key) {
            return v;
        }
        let v = f();
        self.insert(key.clone(), v.clone());
        v
    }
}

impl<K: Hash + Eq + Clone, V: Clone> Default for Memo<K, V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Hash + Eq + Clone, V: Clone> Clone for Memo<K, V> {
    fn clone(&self) -> Self {
        Memo {
            inner: RwLock::new(self.inner.read().expect("memo lock poisoned").clone()),
        }
    }
}

impl<K, V> std::fmt::Debug for Memo<K, V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Memo")
    }
}
