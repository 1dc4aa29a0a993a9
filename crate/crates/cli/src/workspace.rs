use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use powerdomain::text;
use powerdomain::{Poset, RepresentationMap, SimpleValuation};

/// Loaded inputs, keyed by the path they came from.
#[derive(Default)]
pub struct Workspace {
    posets: BTreeMap<String, Arc<Poset>>,
    valuations: BTreeMap<String, SimpleValuation>,
    maps: BTreeMap<String, RepresentationMap>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn key(path: &Path) -> String {
    path.display().to_string()
}

impl Workspace {
    pub fn load_poset(&mut self, path: &Path) -> Result<Arc<Poset>> {
        if let Some(p) = self.posets.get(&key(path)) {
            return Ok(p.clone());
        }
        let p = Arc::new(text::parse_poset(&read(path)?).with_context(|| format!("in {}", path.display()))?);
        self.posets.insert(key(path), p.clone());
        Ok(p)
    }

    pub fn load_valuation(&mut self, path: &Path, base: &Arc<Poset>) -> Result<SimpleValuation> {
        if let Some(v) = self.valuations.get(&key(path)) {
            if !Arc::ptr_eq(v.base(), base) {
                return Err(anyhow!("{} was already loaded against another poset", path.display()));
            }
            return Ok(v.clone());
        }
        let v = text::parse_valuation(&read(path)?, base).with_context(|| format!("in {}", path.display()))?;
        self.valuations.insert(key(path), v.clone());
        Ok(v)
    }

    pub fn load_map(&mut self, path: &Path, base: &Arc<Poset>) -> Result<RepresentationMap> {
        if let Some(m) = self.maps.get(&key(path)) {
            return Ok(m.clone());
        }
        let m = text::parse_map(&read(path)?, base).with_context(|| format!("in {}", path.display()))?;
        self.maps.insert(key(path), m.clone());
        Ok(m)
    }

    pub fn load_sequence(&mut self, paths: &[std::path::PathBuf], base: &Arc<Poset>) -> Result<Vec<SimpleValuation>> {
        paths.iter().map(|p| self.load_valuation(p, base)).collect()
    }
}
