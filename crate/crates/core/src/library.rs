//! The static object catalog.
//!
//! Entries live in `data/objects.txt`, one per line:
//! `name|kind|flags|canonical locations|folds`. Fixtures name the room kind
//! they furnish; ingredients and household objects name the containers they
//! canonically belong in.

use std::collections::HashMap;
use std::sync::LazyLock;

use crate::variation::Fold;
use crate::world::ObjectKind;

const CATALOG: &str = include_str!("../data/objects.txt");

/// Which folds an entry may appear in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FoldSet {
    pub train: bool,
    pub dev: bool,
    pub test: bool,
}

impl FoldSet {
    pub fn contains(self, fold: Fold) -> bool {
        match fold {
            Fold::Train => self.train,
            Fold::Dev => self.dev,
            Fold::Test => self.test,
        }
    }

    pub fn is_empty(self) -> bool {
        !(self.train || self.dev || self.test)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct EntryFlags {
    pub fixture: bool,
    /// Openable container that starts closed.
    pub closed: bool,
    /// Not-openable container; things sit "on" it.
    pub surface: bool,
    /// Rendered with a "raw" prefix while uncooked.
    pub raw_label: bool,
    pub cuttable: bool,
    pub cookable: bool,
    pub household: bool,
    pub tool: bool,
    pub edible: bool,
}

#[derive(Debug)]
pub struct LibraryEntry {
    pub name: &'static str,
    pub kind: ObjectKind,
    pub flags: EntryFlags,
    pub canonical_locations: Vec<&'static str>,
    pub folds: FoldSet,
}

#[derive(Debug)]
pub struct ObjectLibrary {
    entries: Vec<LibraryEntry>,
    by_name: HashMap<&'static str, usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("duplicate entry name {0:?}")]
    Duplicate(String),
}

static LIBRARY: LazyLock<ObjectLibrary> =
    LazyLock::new(|| ObjectLibrary::parse(CATALOG).expect("built-in object catalog is well-formed"));

/// The built-in catalog.
pub fn library() -> &'static ObjectLibrary {
    &LIBRARY
}

impl ObjectLibrary {
    pub fn parse(text: &'static str) -> Result<Self, CatalogError> {
        let mut entries = Vec::new();
        let mut by_name = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| CatalogError::Malformed { line: i + 1, reason: reason.to_string() };
            let fields: Vec<&'static str> = line.split('|').collect();
            if fields.len() != 5 {
                return Err(bad("expected 5 fields"));
            }
            let kind = ObjectKind::from_name(fields[1]).ok_or_else(|| bad("unknown kind"))?;
            let mut flags = EntryFlags::default();
            for f in fields[2].split(',').filter(|f| !f.is_empty()) {
                match f {
                    "fixture" => flags.fixture = true,
                    "closed" => flags.closed = true,
                    "surface" => flags.surface = true,
                    "raw" => flags.raw_label = true,
                    "cut" => flags.cuttable = true,
                    "cook" => flags.cookable = true,
                    "household" => flags.household = true,
                    "tool" => flags.tool = true,
                    "edible" => flags.edible = true,
                    _ => return Err(bad("unknown flag")),
                }
            }
            if kind == ObjectKind::Ingredient {
                flags.edible = true;
            }
            let mut folds = FoldSet::default();
            for f in fields[4].split(',') {
                match f {
                    "train" => folds.train = true,
                    "dev" => folds.dev = true,
                    "test" => folds.test = true,
                    _ => return Err(bad("unknown fold")),
                }
            }
            if folds.is_empty() {
                return Err(bad("entry has no fold tag"));
            }
            let name = fields[0];
            if by_name.insert(name, entries.len()).is_some() {
                return Err(CatalogError::Duplicate(name.to_string()));
            }
            entries.push(LibraryEntry {
                name,
                kind,
                flags,
                canonical_locations: fields[3].split(',').filter(|s| !s.is_empty()).collect(),
                folds,
            });
        }
        Ok(Self { entries, by_name })
    }

    pub fn entries(&self) -> &[LibraryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&LibraryEntry> {
        self.by_name.get(name).map(|&i| &self.entries[i])
    }

    /// Looks up an entry that must exist in the built-in catalog.
    pub fn expect(&self, name: &str) -> &LibraryEntry {
        self.get(name).unwrap_or_else(|| panic!("catalog has no entry {name:?}"))
    }

    /// Fixtures for a room kind, in placement order.
    pub fn fixtures_for<'a>(&'a self, room: &'a str) -> impl Iterator<Item = &'a LibraryEntry> + 'a {
        self.entries
            .iter()
            .filter(move |e| e.flags.fixture && e.canonical_locations.first() == Some(&room))
    }

    pub fn doors(&self) -> impl Iterator<Item = &LibraryEntry> {
        self.entries.iter().filter(|e| e.kind == ObjectKind::Door)
    }

    pub fn ingredients(&self, fold: Fold) -> impl Iterator<Item = &LibraryEntry> {
        self.entries
            .iter()
            .filter(move |e| e.kind == ObjectKind::Ingredient && e.folds.contains(fold))
    }

    pub fn household(&self, fold: Fold) -> impl Iterator<Item = &LibraryEntry> {
        self.entries
            .iter()
            .filter(move |e| e.flags.household && e.folds.contains(fold))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn catalog_has_about_five_hundred_unique_entries() {
        let lib = library();
        assert!((480..=560).contains(&lib.len()), "{}", lib.len());
        let names: HashSet<_> = lib.entries().iter().map(|e| e.name).collect();
        assert_eq!(names.len(), lib.len());
        assert!(lib.entries().iter().all(|e| !e.folds.is_empty()));
    }

    #[test]
    fn fold_pools_are_disjoint() {
        let lib = library();
        for pool in [
            |f| library().ingredients(f).map(|e| e.name).collect::<HashSet<_>>(),
            |f| library().household(f).map(|e| e.name).collect::<HashSet<_>>(),
        ] {
            let train = pool(Fold::Train);
            let dev = pool(Fold::Dev);
            let test = pool(Fold::Test);
            assert!(train.is_disjoint(&test));
            assert!(train.is_disjoint(&dev));
            assert!(dev.is_disjoint(&test));
            assert!(test.len() >= 15, "{}", test.len());
        }
        assert_eq!(lib.ingredients(Fold::Train).count(), 84);
    }

    #[test]
    fn household_destinations_are_fixtures() {
        let lib = library();
        for e in lib.entries().iter().filter(|e| e.flags.household) {
            assert!(!e.canonical_locations.is_empty());
            for loc in &e.canonical_locations {
                let dest = lib.get(loc).unwrap_or_else(|| panic!("{} -> {loc}", e.name));
                assert!(dest.flags.fixture && dest.kind == ObjectKind::Container, "{loc}");
            }
        }
    }

    #[test]
    fn kitchen_fixtures_follow_catalog_order() {
        let names: Vec<_> = library().fixtures_for("kitchen").map(|e| e.name).collect();
        assert_eq!(
            names,
            [
                "fridge",
                "dining chair",
                "dishwasher",
                "trash can",
                "oven",
                "cutlery drawer",
                "stove",
                "counter",
                "kitchen cupboard"
            ]
        );
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(
            ObjectLibrary::parse("fridge|container|closed|kitchen"),
            Err(CatalogError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            ObjectLibrary::parse("fridge|container||kitchen|train\nfridge|container||kitchen|dev"),
            Err(CatalogError::Duplicate(_))
        ));
        assert!(ObjectLibrary::parse("x|spaceship|||train").is_err());
    }
}
