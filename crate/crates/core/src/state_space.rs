//! Supernode observations, proportion vectors and the distances used to
//! compare them.
//!
//! A proportion vector assigns to every tuple `u = (u_0, ..., u_k)` of queue
//! lengths the fraction of supernodes currently observing `u`. Vectors are
//! stored sparsely; an absent tuple means a zero fraction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum z_u == 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;
/// Tolerance on `N z_u` being an integer.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-9;

/// Queue lengths observed by one supernode: the node itself followed by its
/// `k` ring neighbours.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuperNodeVector(Vec<u32>);

impl SuperNodeVector {
    pub fn new(coords: Vec<u32>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Malformed("a supernode vector needs at least one coordinate".into()));
        }
        Ok(SuperNodeVector(coords))
    }

    pub fn zeros(k: usize) -> Self {
        SuperNodeVector(vec![0; k + 1])
    }

    /// Number of neighbours, i.e. `len - 1`.
    pub fn k(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// Last coordinate `u_k`, which scales the rho distance.
    pub fn last(&self) -> u32 {
        *self.0.last().expect("non-empty by construction")
    }

    pub fn min_coord(&self) -> u32 {
        *self.0.iter().min().expect("non-empty by construction")
    }

    pub fn max_coord(&self) -> u32 {
        *self.0.iter().max().expect("non-empty by construction")
    }

    /// Copy with coordinate `n` changed by `delta`; `None` when it would go negative.
    pub fn shifted(&self, n: usize, delta: i32) -> Option<Self> {
        let v = self.0[n].checked_add_signed(delta)?;
        let mut coords = self.0.clone();
        coords[n] = v;
        Some(SuperNodeVector(coords))
    }
}

impl From<&[u32]> for SuperNodeVector {
    /// Panics on an empty slice.
    fn from(coords: &[u32]) -> Self {
        assert!(!coords.is_empty(), "empty supernode vector");
        SuperNodeVector(coords.to_vec())
    }
}

impl<const L: usize> From<[u32; L]> for SuperNodeVector {
    fn from(coords: [u32; L]) -> Self {
        SuperNodeVector::from(&coords[..])
    }
}

impl fmt::Display for SuperNodeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for SuperNodeVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Malformed(format!("bad coordinate {part:?} in {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SuperNodeVector::new(coords)
    }
}

impl Serialize for SuperNodeVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SuperNodeVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Sparse map from supernode tuples to fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionVector {
    k: usize,
    entries: BTreeMap<SuperNodeVector, f64>,
}

impl ProportionVector {
    pub fn new(k: usize) -> Self {
        ProportionVector { k, entries: BTreeMap::new() }
    }

    pub fn from_entries<I>(k: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SuperNodeVector, f64)>,
    {
        let mut z = ProportionVector::new(k);
        for (u, v) in entries {
            z.insert(u, v)?;
        }
        Ok(z)
    }

    /// Point mass at `u`.
    pub fn dirac(u: SuperNodeVector) -> Self {
        let k = u.k();
        let mut entries = BTreeMap::new();
        entries.insert(u, 1.0);
        ProportionVector { k, entries }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Sets the value at `u`, replacing any previous one.
    pub fn insert(&mut self, u: SuperNodeVector, value: f64) -> Result<()> {
        if u.k() != self.k {
            return Err(Error::Dimension { left: self.k, right: u.k() });
        }
        self.entries.insert(u, value);
        Ok(())
    }

    /// Adds `value` to the entry at `u`.
    pub fn add(&mut self, u: &SuperNodeVector, value: f64) -> Result<()> {
        if u.k() != self.k {
            return Err(Error::Dimension { left: self.k, right: u.k() });
        }
        match self.entries.get_mut(u) {
            Some(v) => *v += value,
            None => {
                self.entries.insert(u.clone(), value);
            }
        }
        Ok(())
    }

    pub fn get(&self, u: &SuperNodeVector) -> f64 {
        self.entries.get(u).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SuperNodeVector, f64)> + '_ {
        self.entries.iter().map(|(u, &v)| (u, v))
    }

    /// Number of stored entries (including explicit zeros).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.entries.values_mut() {
            *v *= factor;
        }
    }

    /// Drops entries whose absolute value is at most `threshold`.
    pub fn prune(&mut self, threshold: f64) {
        self.entries.retain(|_, v| v.abs() > threshold);
    }

    /// Largest coordinate over the support.
    pub fn max_coordinate(&self) -> u32 {
        self.entries.keys().map(SuperNodeVector::max_coord).max().unwrap_or(0)
    }

    /// Dense copy over the box `{0..=cap}^{k+1}`; fails if the support leaves it.
    pub fn to_dense(&self, lattice: &BoxLattice) -> Result<Vec<f64>> {
        if lattice.dims() != self.k + 1 {
            return Err(Error::Dimension { left: self.k, right: lattice.dims() - 1 });
        }
        let mut dense = vec![0.0; lattice.len()];
        for (u, v) in self.iter() {
            let idx = lattice
                .index_of(u.coords())
                .ok_or_else(|| Error::Malformed(format!("tuple ({u}) lies outside the box with cap {}", lattice.cap())))?;
            dense[idx] = v;
        }
        Ok(dense)
    }

    /// Sparse view of a dense box array, keeping entries that are not exactly zero.
    pub fn from_dense(lattice: &BoxLattice, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), lattice.len(), "dense array does not match lattice");
        let mut z = ProportionVector::new(lattice.dims() - 1);
        let mut buf = vec![0; lattice.dims()];
        for (idx, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                lattice.decode_into(idx, &mut buf);
                z.entries.insert(SuperNodeVector(buf.clone()), v);
            }
        }
        z
    }

    /// Law of the coordinate `n` under this vector.
    pub fn coordinate_marginal(&self, n: usize) -> BTreeMap<u32, f64> {
        let mut law = BTreeMap::new();
        for (u, v) in self.iter() {
            *law.entry(u.coords()[n]).or_insert(0.0) += v;
        }
        law
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for ProportionVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (u, v) in &self.entries {
            map.serialize_entry(&u.to_string(), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ProportionVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ProportionVisitor;

        impl<'de> Visitor<'de> for ProportionVisitor {
            type Value = ProportionVector;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-empty map from \"u0,...,uk\" to fractions")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
                let mut z: Option<ProportionVector> = None;
                while let Some((key, value)) = access.next_entry::<String, f64>()? {
                    let u: SuperNodeVector = key.parse().map_err(de::Error::custom)?;
                    let z = z.get_or_insert_with(|| ProportionVector::new(u.k()));
                    z.insert(u, value).map_err(de::Error::custom)?;
                }
                z.ok_or_else(|| de::Error::custom("cannot infer k from an empty proportion vector"))
            }
        }

        deserializer.deserialize_map(ProportionVisitor)
    }
}

/// Membership in the mean-field state space, or in its `N`-lattice when
/// `n` is given: every entry in `[0, 1]`, entries summing to one, and
/// `n * z_u` integral.
pub fn validate_membership(z: &ProportionVector, n: Option<u64>) -> bool {
    if z.iter().any(|(_, v)| !(0.0..=1.0).contains(&v)) {
        return false;
    }
    if (z.sum() - 1.0).abs() > SUM_TOLERANCE {
        return false;
    }
    match n {
        None => true,
        Some(0) => false,
        Some(n) => {
            let n = n as f64;
            z.iter().all(|(_, v)| {
                let scaled = n * v;
                (scaled - scaled.round()).abs() <= INTEGRALITY_TOLERANCE
            })
        }
    }
}

fn check_same_k(z: &ProportionVector, w: &ProportionVector) -> Result<()> {
    if z.k() != w.k() {
        return Err(Error::Dimension { left: z.k(), right: w.k() });
    }
    Ok(())
}

/// Visits `(u, z_u - w_u)` over the union of both supports.
fn for_each_difference(z: &ProportionVector, w: &ProportionVector, mut f: impl FnMut(&SuperNodeVector, f64)) {
    for (u, v) in z.iter() {
        f(u, v - w.get(u));
    }
    for (u, v) in w.iter() {
        if !z.entries.contains_key(u) {
            f(u, -v);
        }
    }
}

/// `sup_u |z_u - w_u| / (u_k + 1)`, the supremum running over every
/// coordinate of `u` and the divisor using the last coordinate only.
pub fn rho_distance(z: &ProportionVector, w: &ProportionVector) -> Result<f64> {
    check_same_k(z, w)?;
    let mut sup = 0.0_f64;
    for_each_difference(z, w, |u, d| {
        sup = sup.max(d.abs() / (f64::from(u.last()) + 1.0));
    });
    Ok(sup)
}

/// Half the l1 distance.
pub fn total_variation(z: &ProportionVector, w: &ProportionVector) -> Result<f64> {
    check_same_k(z, w)?;
    let mut acc = 0.0;
    for_each_difference(z, w, |_, d| acc += d.abs());
    Ok(0.5 * acc)
}

/// Largest absolute coordinate difference.
pub fn sup_distance(z: &ProportionVector, w: &ProportionVector) -> Result<f64> {
    check_same_k(z, w)?;
    let mut sup = 0.0_f64;
    for_each_difference(z, w, |_, d| sup = sup.max(d.abs()));
    Ok(sup)
}

/// The box `{0..=cap}^dims` with lexicographic (row-major, first coordinate
/// most significant) indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxLattice {
    dims: usize,
    cap: u32,
    len: usize,
}

impl BoxLattice {
    pub fn new(dims: usize, cap: u32) -> Result<Self> {
        if dims == 0 {
            return Err(Error::config("box needs at least one dimension"));
        }
        let side = u128::from(cap) + 1;
        let len = (0..dims).try_fold(1u128, |acc, _| acc.checked_mul(side));
        match len {
            Some(len) if len <= u128::from(u32::MAX) => Ok(BoxLattice { dims, cap, len: len as usize }),
            _ => Err(Error::StateSpaceTooLarge { states: side.saturating_pow(dims as u32), limit: u128::from(u32::MAX) }),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn side(&self) -> usize {
        self.cap as usize + 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index offset of a unit step in coordinate `n`.
    pub fn stride(&self, n: usize) -> usize {
        self.side().pow((self.dims - 1 - n) as u32)
    }

    pub fn index_of(&self, coords: &[u32]) -> Option<usize> {
        if coords.len() != self.dims {
            return None;
        }
        let mut idx = 0usize;
        for &c in coords {
            if c > self.cap {
                return None;
            }
            idx = idx * self.side() + c as usize;
        }
        Some(idx)
    }

    pub fn decode_into(&self, mut idx: usize, out: &mut [u32]) {
        debug_assert_eq!(out.len(), self.dims);
        let side = self.side();
        for slot in out.iter_mut().rev() {
            *slot = (idx % side) as u32;
            idx /= side;
        }
    }

    pub fn decode(&self, idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.dims];
        self.decode_into(idx, &mut out);
        out
    }

    /// True when some coordinate sits at the cap.
    pub fn on_boundary(&self, coords: &[u32]) -> bool {
        coords.iter().any(|&c| c == self.cap)
    }

    /// Total mass of `dense` on boundary states.
    pub fn boundary_mass(&self, dense: &[f64]) -> f64 {
        let mut buf = vec![0; self.dims];
        dense
            .iter()
            .enumerate()
            .filter(|&(idx, _)| {
                self.decode_into(idx, &mut buf);
                self.on_boundary(&buf)
            })
            .map(|(_, &v)| v)
            .sum()
    }
}
