//! Hierarchical data items and the per-program data dictionary.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::Literal;
use crate::{Error, Result};

/// Index of a data item in its unit's dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    WorkingStorage,
    Linkage,
}

impl Section {
    pub fn as_str(self) -> &'static str {
        match self {
            Section::WorkingStorage => "working_storage",
            Section::Linkage => "linkage",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Usage {
    Display,
    Binary,
    Packed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Picture {
    pub text: String,
    /// Number of character positions (or digits for numeric pictures).
    pub positions: u32,
    pub numeric: bool,
    pub signed: bool,
}

impl Picture {
    pub fn parse(text: &str, line: u32) -> Result<Picture> {
        let upper = text.to_ascii_uppercase();
        let chars: Vec<char> = upper.chars().collect();
        let mut positions = 0u32;
        let mut numeric = true;
        let mut signed = false;
        let mut last_counts = false;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                '(' => {
                    let close = chars[i..]
                        .iter()
                        .position(|&c| c == ')')
                        .ok_or_else(|| Error::syntax(line, "unbalanced picture repeat"))?;
                    let digits: String = chars[i + 1..i + close].iter().collect();
                    let n: u32 = digits
                        .parse()
                        .map_err(|_| Error::syntax(line, alloc::format!("bad picture repeat in {text}")))?;
                    if !last_counts || n == 0 {
                        return Err(Error::syntax(line, alloc::format!("bad picture {text}")));
                    }
                    positions += n - 1;
                    i += close + 1;
                    continue;
                }
                'S' => {
                    signed = true;
                    last_counts = false;
                }
                'V' | 'P' => last_counts = false,
                '9' | 'Z' => {
                    positions += 1;
                    last_counts = true;
                }
                'X' | 'A' | 'B' | '*' | ',' | '.' | '+' | '-' | '$' | '/' | '0' => {
                    positions += 1;
                    last_counts = true;
                    numeric = false;
                }
                _ => return Err(Error::syntax(line, alloc::format!("bad picture {text}"))),
            }
            i += 1;
        }
        if positions == 0 {
            return Err(Error::syntax(line, alloc::format!("empty picture {text}")));
        }
        Ok(Picture { text: upper, positions, numeric, signed })
    }

    pub fn byte_size(&self, usage: Usage) -> u32 {
        match usage {
            Usage::Display => self.positions,
            Usage::Packed => self.positions / 2 + 1,
            Usage::Binary => match self.positions {
                0..=4 => 2,
                5..=9 => 4,
                _ => 8,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataItem {
    pub name: String,
    pub level: u8,
    pub picture: Option<Picture>,
    pub usage: Usage,
    pub section: Section,
    pub parent: Option<ItemId>,
    /// Subordinate items, excluding level-88 condition names.
    pub children: Vec<ItemId>,
    /// Level-88 condition names attached to this item.
    pub conditions: Vec<ItemId>,
    pub occurs: Option<u32>,
    pub redefines: Option<ItemId>,
    /// `VALUE` clause; for level 88 the list of condition values.
    pub values: Vec<Literal>,
    /// Offset within the storage of `storage_root`.
    pub byte_offset: u32,
    pub byte_size: u32,
    /// Level-01/77 item that owns this item's storage (follows 01 REDEFINES).
    pub storage_root: ItemId,
}

impl DataItem {
    pub fn is_condition(&self) -> bool {
        self.level == 88
    }

    pub fn is_elementary(&self) -> bool {
        self.picture.is_some()
    }

    pub fn is_filler(&self) -> bool {
        self.name == "FILLER"
    }

    fn end(&self) -> u32 {
        self.byte_offset + self.byte_size
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DataDictionary {
    items: Vec<DataItem>,
}

impl DataDictionary {
    pub(crate) fn from_items(items: Vec<DataItem>) -> Self {
        DataDictionary { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, id: ItemId) -> &DataItem {
        &self.items[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.items.len() as u32).map(ItemId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, &DataItem)> + '_ {
        self.items.iter().enumerate().map(|(i, d)| (ItemId(i as u32), d))
    }

    /// Level 01 and 77 items in declaration order.
    pub fn roots(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.iter().filter(|(_, d)| d.parent.is_none()).map(|(id, _)| id)
    }

    pub fn by_name(&self, name: &str) -> impl Iterator<Item = ItemId> + '_ {
        let name = name.to_ascii_uppercase();
        self.iter().filter(move |(_, d)| d.name == name).map(|(id, _)| id)
    }

    /// Dotted path from the level-01 ancestor, e.g. `CA-AREA.CA-POLICY.CA-NUM`.
    pub fn qualified_name(&self, id: ItemId) -> String {
        let mut parts = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur {
            parts.push(self.get(c).name.as_str());
            cur = self.get(c).parent;
        }
        parts.reverse();
        parts.join(".")
    }

    pub fn ancestors(&self, id: ItemId) -> impl Iterator<Item = ItemId> + '_ {
        core::iter::successors(self.get(id).parent, move |p| self.get(*p).parent)
    }

    pub fn is_ancestor(&self, anc: ItemId, of: ItemId) -> bool {
        self.ancestors(of).any(|a| a == anc)
    }

    /// The item plus every non-condition descendant.
    pub fn closure(&self, id: ItemId) -> BTreeSet<ItemId> {
        let mut out = BTreeSet::new();
        let mut stack = alloc::vec![id];
        while let Some(n) = stack.pop() {
            if out.insert(n) {
                stack.extend(self.get(n).children.iter().copied());
            }
        }
        out
    }

    /// Items whose byte extent overlaps `id`'s in the same storage, excluding
    /// ancestors and condition names. Includes `id` and its descendants.
    pub fn overlapping(&self, id: ItemId) -> BTreeSet<ItemId> {
        let it = self.get(id);
        self.iter()
            .filter(|(other_id, o)| {
                !o.is_condition()
                    && o.storage_root == it.storage_root
                    && o.byte_offset < it.end()
                    && it.byte_offset < o.end()
                    && !self.is_ancestor(*other_id, id)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Whether two items share at least one byte of storage.
    pub fn overlaps(&self, a: ItemId, b: ItemId) -> bool {
        let (x, y) = (self.get(a), self.get(b));
        x.storage_root == y.storage_root && x.byte_offset < y.end() && y.byte_offset < x.end()
    }

    /// Read effect of referencing `id`: the item, its descendants and every
    /// REDEFINES alias overlapping its storage.
    pub fn read_closure(&self, id: ItemId) -> BTreeSet<ItemId> {
        let mut s = self.closure(id);
        s.extend(self.overlapping(id));
        s
    }

    /// Resolves `name OF q1 OF q2 ...`.
    pub fn resolve(&self, name: &str, qualifiers: &[String], line: u32) -> Result<ItemId> {
        let candidates: Vec<ItemId> = self
            .by_name(name)
            .filter(|&id| {
                let mut anc = self.ancestors(id);
                qualifiers.iter().all(|q| anc.any(|a| self.get(a).name == *q))
            })
            .collect();
        match candidates.len() {
            0 => Err(Error::UnresolvedName { name: name.into(), line }),
            1 => Ok(candidates[0]),
            _ => Err(Error::AmbiguousName { name: name.into(), line }),
        }
    }

    /// Storage-backed item a reference to `id` touches: condition names map
    /// to their parent.
    pub fn storage_item(&self, id: ItemId) -> ItemId {
        let it = self.get(id);
        if it.is_condition() {
            it.parent.expect("level-88 item has a parent")
        } else {
            id
        }
    }

    /// Offset of `id` relative to the start of `anc` (which must be an
    /// ancestor-or-self).
    pub fn relative_offset(&self, id: ItemId, anc: ItemId) -> u32 {
        self.get(id).byte_offset - self.get(anc).byte_offset
    }
}

/// Raw data entry as parsed, before layout.
#[derive(Debug, Clone)]
pub(crate) struct RawEntry {
    pub line: u32,
    pub level: u8,
    pub name: String,
    pub picture: Option<Picture>,
    pub usage: Usage,
    pub occurs: Option<u32>,
    pub redefines: Option<String>,
    pub values: Vec<Literal>,
    pub section: Section,
}

/// Builds the hierarchy, checks sibling uniqueness and assigns offsets.
pub(crate) fn layout(entries: Vec<RawEntry>) -> Result<DataDictionary> {
    let mut items: Vec<DataItem> = Vec::with_capacity(entries.len());
    let mut lines: Vec<u32> = Vec::with_capacity(entries.len());
    // stack of (level, id) for open groups
    let mut stack: Vec<(u8, ItemId)> = Vec::new();
    for e in entries {
        let id = ItemId(items.len() as u32);
        let parent = if e.level == 1 || e.level == 77 {
            stack.clear();
            None
        } else if e.level == 88 {
            let p = items.len().checked_sub(1).ok_or_else(|| Error::syntax(e.line, "level 88 without a parent"))?;
            let mut p = ItemId(p as u32);
            while items[p.index()].is_condition() {
                p = items[p.index()].parent.expect("condition has parent");
            }
            Some(p)
        } else {
            while let Some(&(lvl, _)) = stack.last() {
                if lvl >= e.level {
                    stack.pop();
                } else {
                    break;
                }
            }
            let Some(&(_, p)) = stack.last() else {
                return Err(Error::syntax(e.line, alloc::format!("level {} item {} has no parent group", e.level, e.name)));
            };
            if items[p.index()].picture.is_some() {
                return Err(Error::syntax(e.line, alloc::format!("{} is subordinate to elementary item {}", e.name, items[p.index()].name)));
            }
            Some(p)
        };
        if e.level == 88 && e.picture.is_some() {
            return Err(Error::syntax(e.line, "level 88 item cannot have a picture"));
        }
        if e.level == 77 && e.picture.is_none() {
            return Err(Error::syntax(e.line, "level 77 item needs a picture"));
        }
        let siblings: Vec<ItemId> = match parent {
            Some(p) if e.level == 88 => items[p.index()].conditions.clone(),
            Some(p) => items[p.index()].children.clone(),
            None => (0..items.len() as u32).map(ItemId).filter(|i| items[i.index()].parent.is_none()).collect(),
        };
        if e.name != "FILLER" && siblings.iter().any(|s| items[s.index()].name == e.name) {
            let path = match parent {
                Some(p) => DataDictionary::from_items(items.clone()).qualified_name(p),
                None => String::from("(root)"),
            };
            return Err(Error::DuplicateDataItem { name: e.name, path });
        }
        let redefines = match &e.redefines {
            None => None,
            Some(target) => {
                let found = siblings.iter().rev().copied().find(|s| items[s.index()].name == *target && !items[s.index()].is_condition());
                Some(found.ok_or_else(|| Error::syntax(e.line, alloc::format!("REDEFINES target {target} is not a preceding sibling")))?)
            }
        };
        if let Some(p) = parent {
            if e.level == 88 {
                items[p.index()].conditions.push(id);
            } else {
                items[p.index()].children.push(id);
            }
        }
        if e.level != 88 {
            stack.push((e.level, id));
        }
        items.push(DataItem {
            name: e.name,
            level: e.level,
            picture: e.picture,
            usage: e.usage,
            section: e.section,
            parent,
            children: Vec::new(),
            conditions: Vec::new(),
            occurs: e.occurs,
            redefines,
            values: e.values,
            byte_offset: 0,
            byte_size: 0,
            storage_root: id,
        });
        lines.push(e.line);
    }
    for (i, it) in items.iter().enumerate() {
        if !it.is_condition() && it.picture.is_none() && it.children.is_empty() {
            return Err(Error::syntax(lines[i], alloc::format!("group item {} has no subordinate items", it.name)));
        }
    }
    // sizes bottom-up: children always follow parents
    for i in (0..items.len()).rev() {
        if items[i].is_condition() {
            continue;
        }
        let unit = match &items[i].picture {
            Some(p) => p.byte_size(items[i].usage),
            None => {
                let mut cursor = 0u32;
                let mut extent = 0u32;
                for c in items[i].children.clone() {
                    let child = &items[c.index()];
                    let start = match child.redefines {
                        Some(r) => items[r.index()].byte_offset,
                        None => cursor,
                    };
                    let end = start + child.byte_size;
                    // temporarily store the relative offset
                    items[c.index()].byte_offset = start;
                    cursor = cursor.max(end);
                    extent = extent.max(end);
                }
                extent
            }
        };
        items[i].byte_size = unit * items[i].occurs.unwrap_or(1);
    }
    // absolute offsets top-down
    for i in 0..items.len() {
        let it = &items[i];
        let (offset, root) = match it.parent {
            None => match it.redefines {
                Some(r) => (0, items[r.index()].storage_root),
                None => (0, ItemId(i as u32)),
            },
            Some(p) if it.is_condition() => (items[p.index()].byte_offset, items[p.index()].storage_root),
            Some(p) => (items[p.index()].byte_offset + it.byte_offset, items[p.index()].storage_root),
        };
        items[i].byte_offset = offset;
        items[i].storage_root = root;
        if items[i].is_condition() {
            let p = items[i].parent.unwrap();
            items[i].byte_size = items[p.index()].byte_size;
        }
    }
    Ok(DataDictionary { items })
}
