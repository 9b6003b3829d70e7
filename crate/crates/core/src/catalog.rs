//! Small groups used for exhaustive checks.

use crate::error::Result;
use crate::formats::GroupSpecFile;
use crate::group::DicyclicGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub abelian: &'static [u64],
    /// In the coordinates of `abelian`.
    pub b_squared: &'static [i64],
}

impl CatalogEntry {
    pub fn spec_file(&self) -> GroupSpecFile {
        GroupSpecFile { abelian: self.abelian.to_vec(), b_squared: self.b_squared.to_vec() }
    }

    pub fn build(&self) -> Result<DicyclicGroup> {
        self.spec_file().build()
    }
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { name: "Q8", abelian: &[4], b_squared: &[2] },
    CatalogEntry { name: "Dic16", abelian: &[8], b_squared: &[4] },
    CatalogEntry { name: "Z2xZ4/b2=a2^2", abelian: &[2, 4], b_squared: &[0, 2] },
    CatalogEntry { name: "Z2xZ4/b2=a1", abelian: &[2, 4], b_squared: &[1, 0] },
    CatalogEntry { name: "Z12", abelian: &[12], b_squared: &[6] },
    CatalogEntry { name: "Z2^3", abelian: &[2, 2, 2], b_squared: &[1, 0, 0] },
    CatalogEntry { name: "Z4xZ4", abelian: &[4, 4], b_squared: &[2, 0] },
    CatalogEntry { name: "Z2xZ8", abelian: &[2, 8], b_squared: &[0, 4] },
];

pub fn catalog_groups() -> Vec<(&'static str, DicyclicGroup)> {
    CATALOG
        .iter()
        .map(|e| (e.name, e.build().expect("catalog entries are valid")))
        .collect()
}

pub fn by_name(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name.eq_ignore_ascii_case(name))
}
