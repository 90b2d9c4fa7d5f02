//! Base categories: objects, morphisms, composition, identities, and
//! enumeration services.
//!
//! Three backends share one interface. The `Table` backend is an explicit
//! composition table for hand-written finite categories and is exhaustive:
//! every quantification ranges over all of it. The `FinSet` and `FinPreord`
//! backends are structural: objects and morphisms are materialized lazily as
//! constructions demand them, composition is function composition, and
//! predicates are decided by exact structural criteria. Identifiers are
//! backend-scoped indices with a stable total order, so canonical choices
//! made downstream are reproducible across runs.

use crate::budget::Budget;
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::RwLock;

/// Opaque object identifier, ordered by registration (table: declaration)
/// order. Only meaningful within the category that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjRef(pub(crate) u32);

/// Opaque morphism identifier; same scoping rules as [`ObjRef`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorRef(pub(crate) u32);

impl ObjRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl MorRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Table,
    FinSet,
    FinPreord,
}

/// Morphism predicates decidable per backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MorPredicate {
    Mono,
    Epi,
    Iso,
    SplitMono,
    SplitEpi,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum ObjData {
    Table { name: String },
    FinSet { size: usize },
    /// `leq` is a row-major `size * size` matrix; reflexive and transitive.
    FinPreord { size: usize, leq: Vec<bool> },
}

impl ObjData {
    pub(crate) fn size(&self) -> usize {
        match self {
            ObjData::Table { .. } => 0,
            ObjData::FinSet { size } | ObjData::FinPreord { size, .. } => *size,
        }
    }

    pub(crate) fn leq(&self, i: usize, j: usize) -> bool {
        match self {
            ObjData::FinPreord { size, leq } => leq[i * size + j],
            ObjData::FinSet { .. } => i == j,
            ObjData::Table { .. } => false,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct MorData {
    pub dom: ObjRef,
    pub cod: ObjRef,
    pub payload: MorPayload,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum MorPayload {
    Table { name: String },
    /// Element table: `map[i]` is the image of element `i` of the domain.
    Map(Vec<usize>),
}

pub(crate) struct Registry {
    pub backend: BackendKind,
    pub objs: Vec<ObjData>,
    pub mors: Vec<MorData>,
    obj_dedup: HashMap<ObjData, ObjRef>,
    mor_dedup: HashMap<(ObjRef, ObjRef, MorPayload), MorRef>,
    // Table backend only.
    table_compose: HashMap<(MorRef, MorRef), MorRef>,
    table_identity: HashMap<ObjRef, MorRef>,
    hom_cache: HashMap<(ObjRef, ObjRef), Vec<MorRef>>,
    pub budget: Budget,
}

impl Registry {
    fn new(backend: BackendKind, budget: Budget) -> Self {
        Registry {
            backend,
            objs: Vec::new(),
            mors: Vec::new(),
            obj_dedup: HashMap::new(),
            mor_dedup: HashMap::new(),
            table_compose: HashMap::new(),
            table_identity: HashMap::new(),
            hom_cache: HashMap::new(),
            budget,
        }
    }

    pub(crate) fn add_obj(&mut self, data: ObjData) -> ObjRef {
        if let Some(&o) = self.obj_dedup.get(&data) {
            return o;
        }
        let r = ObjRef(self.objs.len() as u32);
        self.obj_dedup.insert(data.clone(), r);
        self.objs.push(data);
        r
    }

    pub(crate) fn add_mor(&mut self, dom: ObjRef, cod: ObjRef, payload: MorPayload) -> MorRef {
        let key = (dom, cod, payload);
        if let Some(&m) = self.mor_dedup.get(&key) {
            return m;
        }
        let r = MorRef(self.mors.len() as u32);
        let (dom, cod, payload) = key;
        self.mor_dedup.insert((dom, cod, payload.clone()), r);
        self.mors.push(MorData { dom, cod, payload });
        r
    }

    pub(crate) fn obj(&self, o: ObjRef) -> &ObjData {
        &self.objs[o.index()]
    }

    pub(crate) fn mor(&self, m: MorRef) -> &MorData {
        &self.mors[m.index()]
    }

    pub(crate) fn map_of(&self, m: MorRef) -> &[usize] {
        match &self.mor(m).payload {
            MorPayload::Map(v) => v,
            MorPayload::Table { .. } => panic!("map_of on table morphism"),
        }
    }

    pub(crate) fn identity(&mut self, a: ObjRef) -> MorRef {
        match self.backend {
            BackendKind::Table => self.table_identity[&a],
            _ => {
                let n = self.obj(a).size();
                self.add_mor(a, a, MorPayload::Map((0..n).collect()))
            }
        }
    }

    pub(crate) fn compose(&mut self, f: MorRef, g: MorRef) -> Result<MorRef> {
        let (fd, gd) = (self.mor(f).clone(), self.mor(g).clone());
        if fd.cod != gd.dom {
            return Err(Error::IllFormed(format!(
                "compose: codomain of {} differs from domain of {}",
                self.mor_label(f),
                self.mor_label(g)
            )));
        }
        match self.backend {
            BackendKind::Table => {
                self.table_compose.get(&(f, g)).copied().ok_or_else(|| {
                    Error::Inconsistency(format!(
                        "composite of {} and {} missing from table",
                        self.mor_label(f),
                        self.mor_label(g)
                    ))
                })
            }
            _ => {
                let fm = self.map_of(f).to_vec();
                let gm = self.map_of(g);
                let hm: Vec<usize> = fm.iter().map(|&i| gm[i]).collect();
                Ok(self.add_mor(fd.dom, gd.cod, MorPayload::Map(hm)))
            }
        }
    }

    /// Monotonicity of an element table between two preorders.
    pub(crate) fn monotone(&self, dom: ObjRef, cod: ObjRef, map: &[usize]) -> bool {
        let (d, c) = (self.obj(dom), self.obj(cod));
        let n = d.size();
        for i in 0..n {
            for j in 0..n {
                if d.leq(i, j) && !c.leq(map[i], map[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// All morphisms `a -> b`, in canonical order.
    pub(crate) fn hom(&mut self, a: ObjRef, b: ObjRef) -> Result<Vec<MorRef>> {
        if let Some(cached) = self.hom_cache.get(&(a, b)) {
            return Ok(cached.clone());
        }
        let out = self.hom_uncached(a, b)?;
        self.hom_cache.insert((a, b), out.clone());
        Ok(out)
    }

    fn hom_uncached(&mut self, a: ObjRef, b: ObjRef) -> Result<Vec<MorRef>> {
        match self.backend {
            BackendKind::Table => {
                let out: Vec<MorRef> = (0..self.mors.len())
                    .map(|i| MorRef(i as u32))
                    .filter(|&m| self.mor(m).dom == a && self.mor(m).cod == b)
                    .collect();
                self.budget.check_hom("table hom", out.len() as u128)?;
                Ok(out)
            }
            BackendKind::FinSet | BackendKind::FinPreord => {
                let (na, nb) = (self.obj(a).size(), self.obj(b).size());
                if na == 0 {
                    return Ok(vec![self.add_mor(a, b, MorPayload::Map(Vec::new()))]);
                }
                if nb == 0 {
                    return Ok(Vec::new());
                }
                let raw = (nb as u128).pow(na as u32);
                self.budget.check_search("hom enumeration", raw)?;
                let monotone_needed = self.backend == BackendKind::FinPreord;
                let mut out = Vec::new();
                let mut tab = vec![0usize; na];
                loop {
                    if !monotone_needed || self.monotone(a, b, &tab) {
                        out.push(self.add_mor(a, b, MorPayload::Map(tab.clone())));
                    }
                    // next table in lexicographic order
                    let mut k = na;
                    loop {
                        if k == 0 {
                            self.budget.check_hom("hom enumeration", out.len() as u128)?;
                            return Ok(out);
                        }
                        k -= 1;
                        tab[k] += 1;
                        if tab[k] < nb {
                            break;
                        }
                        tab[k] = 0;
                    }
                }
            }
        }
    }

    pub(crate) fn mor_label(&self, m: MorRef) -> String {
        let d = self.mor(m);
        match &d.payload {
            MorPayload::Table { name } => name.clone(),
            MorPayload::Map(v) => format!(
                "{}->{} {:?}",
                self.obj_label(d.dom),
                self.obj_label(d.cod),
                v
            ),
        }
    }

    pub(crate) fn obj_label(&self, o: ObjRef) -> String {
        match self.obj(o) {
            ObjData::Table { name } => name.clone(),
            ObjData::FinSet { size } => format!("[{size}]"),
            ObjData::FinPreord { size, leq } => {
                let pairs: Vec<String> = (0..*size)
                    .flat_map(|i| (0..*size).map(move |j| (i, j)))
                    .filter(|&(i, j)| i != j && leq[i * size + j])
                    .map(|(i, j)| format!("{i}<={j}"))
                    .collect();
                format!("P{size}{{{}}}", pairs.join(","))
            }
        }
    }
}

/// A finite (or lazily-materialized finitely complete) category.
///
/// Immutable from the caller's point of view: every method takes `&self`.
/// Concrete backends grow an internal registry as limits and hom-sets are
/// demanded; registration is deduplicating and structural, so the artifacts
/// produced do not depend on the order in which they were first requested.
pub struct Category {
    inner: RwLock<Registry>,
}

impl Category {
    pub fn finset(budget: Budget) -> Self {
        Category {
            inner: RwLock::new(Registry::new(BackendKind::FinSet, budget)),
        }
    }

    pub fn finpreord(budget: Budget) -> Self {
        Category {
            inner: RwLock::new(Registry::new(BackendKind::FinPreord, budget)),
        }
    }

    pub(crate) fn write(&self) -> std::sync::RwLockWriteGuard<'_, Registry> {
        self.inner.write().expect("registry poisoned")
    }

    pub(crate) fn read(&self) -> std::sync::RwLockReadGuard<'_, Registry> {
        self.inner.read().expect("registry poisoned")
    }

    pub fn backend(&self) -> BackendKind {
        self.read().backend
    }

    /// Table backend quantifies exhaustively; concrete backends over probes.
    pub fn exhaustive(&self) -> bool {
        self.backend() == BackendKind::Table
    }

    pub fn budget(&self) -> Budget {
        self.read().budget
    }

    /// Snapshot of all objects materialized so far, in canonical order.
    pub fn objects(&self) -> Vec<ObjRef> {
        (0..self.read().objs.len()).map(|i| ObjRef(i as u32)).collect()
    }

    pub fn morphisms(&self) -> Vec<MorRef> {
        (0..self.read().mors.len()).map(|i| MorRef(i as u32)).collect()
    }

    pub fn dom(&self, m: MorRef) -> ObjRef {
        self.read().mor(m).dom
    }

    pub fn cod(&self, m: MorRef) -> ObjRef {
        self.read().mor(m).cod
    }

    pub fn identity(&self, a: ObjRef) -> MorRef {
        self.write().identity(a)
    }

    pub fn is_identity(&self, m: MorRef) -> bool {
        let mut reg = self.write();
        let dom = reg.mor(m).dom;
        reg.identity(dom) == m && reg.mor(m).cod == dom
    }

    /// Composite `f;g` in diagrammatic order (`f` first).
    pub fn compose(&self, f: MorRef, g: MorRef) -> Result<MorRef> {
        self.write().compose(f, g)
    }

    pub fn compose_path(&self, path: &[MorRef]) -> Result<MorRef> {
        let mut reg = self.write();
        let mut acc = path[0];
        for &m in &path[1..] {
            acc = reg.compose(acc, m)?;
        }
        Ok(acc)
    }

    pub fn hom(&self, a: ObjRef, b: ObjRef) -> Result<Vec<MorRef>> {
        self.write().hom(a, b)
    }

    pub fn obj_label(&self, o: ObjRef) -> String {
        self.read().obj_label(o)
    }

    pub fn mor_label(&self, m: MorRef) -> String {
        self.read().mor_label(m)
    }

    /// Underlying element table of a concrete morphism.
    pub fn map_of(&self, m: MorRef) -> Option<Vec<usize>> {
        match &self.read().mor(m).payload {
            MorPayload::Map(v) => Some(v.clone()),
            MorPayload::Table { .. } => None,
        }
    }

    pub fn obj_size(&self, o: ObjRef) -> usize {
        self.read().obj(o).size()
    }

    pub fn obj_leq(&self, o: ObjRef, i: usize, j: usize) -> bool {
        self.read().obj(o).leq(i, j)
    }

    // ---- predicates ----

    pub fn predicate(&self, m: MorRef, which: MorPredicate) -> Result<bool> {
        match self.backend() {
            BackendKind::Table => self.table_predicate(m, which),
            BackendKind::FinSet => Ok(self.finset_predicate(m, which)),
            BackendKind::FinPreord => self.finpreord_predicate(m, which),
        }
    }

    pub fn is_mono(&self, m: MorRef) -> Result<bool> {
        self.predicate(m, MorPredicate::Mono)
    }

    pub fn is_epi(&self, m: MorRef) -> Result<bool> {
        self.predicate(m, MorPredicate::Epi)
    }

    pub fn is_iso(&self, m: MorRef) -> Result<bool> {
        self.predicate(m, MorPredicate::Iso)
    }

    /// Two-sided inverse of an isomorphism.
    pub fn inverse(&self, m: MorRef) -> Result<MorRef> {
        let (dom, cod) = (self.dom(m), self.cod(m));
        match self.backend() {
            BackendKind::Table => {
                let id_d = self.identity(dom);
                let id_c = self.identity(cod);
                for g in self.hom(cod, dom)? {
                    if self.compose(m, g)? == id_d && self.compose(g, m)? == id_c {
                        return Ok(g);
                    }
                }
                Err(Error::IllFormed(format!(
                    "inverse: {} is not invertible",
                    self.mor_label(m)
                )))
            }
            _ => {
                let mut reg = self.write();
                let map = reg.map_of(m).to_vec();
                let (nd, nc) = (reg.obj(dom).size(), reg.obj(cod).size());
                if nd != nc {
                    return Err(Error::IllFormed("inverse: size mismatch".into()));
                }
                let mut inv = vec![usize::MAX; nc];
                for (i, &v) in map.iter().enumerate() {
                    if inv[v] != usize::MAX {
                        return Err(Error::IllFormed("inverse: not injective".into()));
                    }
                    inv[v] = i;
                }
                if reg.backend == BackendKind::FinPreord && !reg.monotone(cod, dom, &inv) {
                    return Err(Error::IllFormed("inverse: not order-reflecting".into()));
                }
                Ok(reg.add_mor(cod, dom, MorPayload::Map(inv)))
            }
        }
    }

    fn finset_predicate(&self, m: MorRef, which: MorPredicate) -> bool {
        let reg = self.read();
        let d = reg.mor(m);
        let map = reg.map_of(m);
        let (nd, nc) = (reg.obj(d.dom).size(), reg.obj(d.cod).size());
        let injective = {
            let mut seen = vec![false; nc];
            map.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        };
        let surjective = {
            let mut seen = vec![false; nc];
            for &v in map {
                seen[v] = true;
            }
            seen.iter().all(|&b| b)
        };
        match which {
            MorPredicate::Mono => injective,
            MorPredicate::Epi => surjective,
            MorPredicate::Iso => injective && surjective,
            // An injection out of the empty set splits only into the empty set.
            MorPredicate::SplitMono => injective && (nd > 0 || nc == 0),
            MorPredicate::SplitEpi => surjective,
        }
    }

    fn finpreord_predicate(&self, m: MorRef, which: MorPredicate) -> Result<bool> {
        let (dom, cod) = (self.dom(m), self.cod(m));
        let underlying = self.finset_predicate(m, MorPredicate::Mono);
        match which {
            // Epis are detected with codiscrete test objects, monos with
            // discrete ones, so both reduce to the underlying function.
            MorPredicate::Mono => Ok(underlying),
            MorPredicate::Epi => Ok(self.finset_predicate(m, MorPredicate::Epi)),
            MorPredicate::Iso => Ok(self.inverse(m).is_ok()),
            MorPredicate::SplitMono => {
                let id = self.identity(dom);
                for r in self.hom(cod, dom)? {
                    if self.compose(m, r)? == id {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            MorPredicate::SplitEpi => {
                let id = self.identity(cod);
                for s in self.hom(cod, dom)? {
                    if self.compose(s, m)? == id {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Table backend: the predicate *is* the defining quantification.
    fn table_predicate(&self, m: MorRef, which: MorPredicate) -> Result<bool> {
        let (dom, cod) = (self.dom(m), self.cod(m));
        match which {
            MorPredicate::Mono => {
                for x in self.objects() {
                    let hx = self.hom(x, dom)?;
                    for (i, &g) in hx.iter().enumerate() {
                        for &h in &hx[i + 1..] {
                            if self.compose(g, m)? == self.compose(h, m)? {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
            MorPredicate::Epi => {
                for x in self.objects() {
                    let hx = self.hom(cod, x)?;
                    for (i, &g) in hx.iter().enumerate() {
                        for &h in &hx[i + 1..] {
                            if self.compose(m, g)? == self.compose(m, h)? {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
            MorPredicate::Iso => Ok(self.inverse(m).is_ok()),
            MorPredicate::SplitMono => {
                let id = self.identity(dom);
                for r in self.hom(cod, dom)? {
                    if self.compose(m, r)? == id {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            MorPredicate::SplitEpi => {
                let id = self.identity(cod);
                for s in self.hom(cod, dom)? {
                    if self.compose(s, m)? == id {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

// ---- explicit table categories ----

/// Input form of a hand-written finite category. Identities are implicit:
/// every object receives `id_<obj>`, with the unit composition entries
/// filled in automatically.
#[derive(Debug, Clone, Default)]
pub struct TableCategorySpec {
    pub name: String,
    pub objects: Vec<String>,
    /// `(name, dom, cod)` for each non-identity arrow.
    pub homs: Vec<(String, String, String)>,
    /// `(f, g, h)` meaning `f;g = h` in diagrammatic order.
    pub compose: Vec<(String, String, String)>,
}

/// Outcome of checking the category axioms on a table.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub objects: usize,
    pub morphisms: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

struct TableBuild {
    obj_ix: HashMap<String, ObjRef>,
    mor_ix: HashMap<String, MorRef>,
    reg: Registry,
}

fn build_table(spec: &TableCategorySpec, budget: Budget) -> Result<TableBuild> {
    let mut reg = Registry::new(BackendKind::Table, budget);
    let mut obj_ix = HashMap::new();
    let mut mor_ix: HashMap<String, MorRef> = HashMap::new();
    for name in &spec.objects {
        if obj_ix.contains_key(name) {
            return Err(Error::IllFormed(format!("duplicate object '{name}'")));
        }
        let o = reg.add_obj(ObjData::Table { name: name.clone() });
        obj_ix.insert(name.clone(), o);
    }
    // Identities first so that declaration order stays intuitive, then the
    // declared arrows.
    for name in &spec.objects {
        let o = obj_ix[name];
        let m = reg.add_mor(
            o,
            o,
            MorPayload::Table {
                name: format!("id_{name}"),
            },
        );
        reg.table_identity.insert(o, m);
        mor_ix.insert(format!("id_{name}"), m);
    }
    for (name, d, c) in &spec.homs {
        let dom = *obj_ix
            .get(d)
            .ok_or_else(|| Error::Unresolved(format!("hom {name}: unknown object '{d}'")))?;
        let cod = *obj_ix
            .get(c)
            .ok_or_else(|| Error::Unresolved(format!("hom {name}: unknown object '{c}'")))?;
        if mor_ix.contains_key(name) {
            return Err(Error::IllFormed(format!("duplicate morphism '{name}'")));
        }
        let m = reg.add_mor(dom, cod, MorPayload::Table { name: name.clone() });
        mor_ix.insert(name.clone(), m);
    }
    // Declared composites take precedence; a declared entry that breaks a
    // unit law is kept as written so validation can report it.
    for (f, g, h) in &spec.compose {
        let fm = *mor_ix
            .get(f)
            .ok_or_else(|| Error::Unresolved(format!("compose: unknown morphism '{f}'")))?;
        let gm = *mor_ix
            .get(g)
            .ok_or_else(|| Error::Unresolved(format!("compose: unknown morphism '{g}'")))?;
        let hm = *mor_ix
            .get(h)
            .ok_or_else(|| Error::Unresolved(format!("compose: unknown morphism '{h}'")))?;
        if let Some(&prev) = reg.table_compose.get(&(fm, gm)) {
            if prev != hm {
                return Err(Error::IllFormed(format!(
                    "conflicting composites declared for {f};{g}"
                )));
            }
        }
        reg.table_compose.insert((fm, gm), hm);
    }
    // Implicit unit composites fill the remaining identity entries.
    for i in 0..reg.mors.len() {
        let m = MorRef(i as u32);
        let (dom, cod) = (reg.mor(m).dom, reg.mor(m).cod);
        let id_d = reg.table_identity[&dom];
        let id_c = reg.table_identity[&cod];
        reg.table_compose.entry((id_d, m)).or_insert(m);
        reg.table_compose.entry((m, id_c)).or_insert(m);
    }
    Ok(TableBuild {
        obj_ix,
        mor_ix,
        reg,
    })
}

/// Check every category axiom on an explicit table. Unresolved references
/// are hard errors; law violations are collected in the report.
pub fn validate_table_category(spec: &TableCategorySpec) -> Result<ValidationReport> {
    validate_table_with(spec, Budget::default())
}

pub fn validate_table_with(spec: &TableCategorySpec, budget: Budget) -> Result<ValidationReport> {
    let b = build_table(spec, budget)?;
    let reg = &b.reg;
    let mut violations = Vec::new();
    let n = reg.mors.len();
    let composable = |f: MorRef, g: MorRef| reg.mor(f).cod == reg.mor(g).dom;
    let label = |m: MorRef| reg.mor_label(m);

    // Totality and typing of the composition table.
    for i in 0..n {
        for j in 0..n {
            let (f, g) = (MorRef(i as u32), MorRef(j as u32));
            match reg.table_compose.get(&(f, g)) {
                None if composable(f, g) => {
                    violations.push(format!("missing composite {};{}", label(f), label(g)));
                }
                Some(_) if !composable(f, g) => {
                    violations.push(format!(
                        "composite declared for non-composable {};{}",
                        label(f),
                        label(g)
                    ));
                }
                Some(&h) => {
                    let ok = reg.mor(h).dom == reg.mor(f).dom && reg.mor(h).cod == reg.mor(g).cod;
                    if !ok {
                        violations.push(format!(
                            "composite {};{} = {} has wrong type",
                            label(f),
                            label(g),
                            label(h)
                        ));
                    }
                }
                None => {}
            }
        }
    }
    // Unit laws.
    for i in 0..n {
        let f = MorRef(i as u32);
        let id_d = reg.table_identity[&reg.mor(f).dom];
        let id_c = reg.table_identity[&reg.mor(f).cod];
        if reg.table_compose.get(&(id_d, f)) != Some(&f) {
            violations.push(format!("left unit law at {}", label(f)));
        }
        if reg.table_compose.get(&(f, id_c)) != Some(&f) {
            violations.push(format!("right unit law at {}", label(f)));
        }
    }
    // Associativity over all composable triples.
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (f, g, h) = (MorRef(i as u32), MorRef(j as u32), MorRef(k as u32));
                if !composable(f, g) || !composable(g, h) {
                    continue;
                }
                let fg = reg.table_compose.get(&(f, g));
                let gh = reg.table_compose.get(&(g, h));
                if let (Some(&fg), Some(&gh)) = (fg, gh) {
                    let left = reg.table_compose.get(&(fg, h));
                    let right = reg.table_compose.get(&(f, gh));
                    if let (Some(l), Some(r)) = (left, right) {
                        if l != r {
                            violations.push(format!(
                                "associativity fails at ({};{});{}",
                                label(f),
                                label(g),
                                label(h)
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(ValidationReport {
        violations,
        objects: reg.objs.len(),
        morphisms: n,
    })
}

impl Category {
    /// Build a table-backed category, requiring the axioms to hold.
    pub fn from_table(spec: &TableCategorySpec, budget: Budget) -> Result<Category> {
        let report = validate_table_with(spec, budget)?;
        if !report.is_valid() {
            return Err(Error::IllFormed(format!(
                "category '{}' violates axioms: {}",
                spec.name,
                report.violations.join("; ")
            )));
        }
        let b = build_table(spec, budget)?;
        Ok(Category {
            inner: RwLock::new(b.reg),
        })
    }

    pub fn table_obj(&self, name: &str) -> Option<ObjRef> {
        let reg = self.read();
        (0..reg.objs.len()).map(|i| ObjRef(i as u32)).find(|&o| {
            matches!(reg.obj(o), ObjData::Table { name: n } if n == name)
        })
    }

    pub fn table_mor(&self, name: &str) -> Option<MorRef> {
        let reg = self.read();
        (0..reg.mors.len()).map(|i| MorRef(i as u32)).find(|&m| {
            matches!(&reg.mor(m).payload, MorPayload::Table { name: n } if n == name)
        })
    }
}

/// Lookup table from names to refs for DSL-resolved categories.
pub struct TableNames {
    pub objects: HashMap<String, ObjRef>,
    pub morphisms: HashMap<String, MorRef>,
}

pub fn table_names(spec: &TableCategorySpec, budget: Budget) -> Result<TableNames> {
    let b = build_table(spec, budget)?;
    Ok(TableNames {
        objects: b.obj_ix,
        morphisms: b.mor_ix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The one-object one-morphism category.
    fn terminal_spec() -> TableCategorySpec {
        TableCategorySpec {
            name: "one".into(),
            objects: vec!["*".into()],
            homs: vec![],
            compose: vec![],
        }
    }

    /// Poset 0 <= 1 <= 2 as a table: three identities plus a, b, c=a;b.
    fn chain3_spec() -> TableCategorySpec {
        TableCategorySpec {
            name: "chain3".into(),
            objects: vec!["0".into(), "1".into(), "2".into()],
            homs: vec![
                ("a".into(), "0".into(), "1".into()),
                ("b".into(), "1".into(), "2".into()),
                ("c".into(), "0".into(), "2".into()),
            ],
            compose: vec![("a".into(), "b".into(), "c".into())],
        }
    }

    #[test]
    fn terminal_category_is_valid() {
        let r = validate_table_category(&terminal_spec()).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.morphisms, 1);
    }

    #[test]
    fn chain3_is_valid_against_independent_law_check() {
        let spec = chain3_spec();
        let r = validate_table_category(&spec).unwrap();
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(r.morphisms, 6);

        // Independent oracle: realize the poset as order pairs and check the
        // same laws by brute force on pairs (x<=y), composition being
        // transitivity.
        let le = |x: usize, y: usize| x <= y;
        let arrows: Vec<(usize, usize)> = (0..3)
            .flat_map(|x| (0..3).map(move |y| (x, y)))
            .filter(|&(x, y)| le(x, y))
            .collect();
        assert_eq!(arrows.len(), 6);
        for &(x, y) in &arrows {
            for &(y2, z) in &arrows {
                if y == y2 {
                    assert!(arrows.contains(&(x, z)));
                }
            }
        }
    }

    #[test]
    fn broken_left_unit_is_reported() {
        // id_A;f rebound to a different arrow of the same type.
        let spec = TableCategorySpec {
            name: "bad".into(),
            objects: vec!["A".into(), "B".into()],
            homs: vec![
                ("f".into(), "A".into(), "B".into()),
                ("g".into(), "A".into(), "B".into()),
            ],
            compose: vec![("id_A".into(), "f".into(), "g".into())],
        };
        let report = validate_table_category(&spec).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("left unit law at f")));
        assert!(Category::from_table(&spec, Budget::default()).is_err());
    }

    #[test]
    fn dangling_reference_is_hard_error() {
        let spec = TableCategorySpec {
            name: "dangling".into(),
            objects: vec!["A".into()],
            homs: vec![],
            compose: vec![("q".into(), "id_A".into(), "id_A".into())],
        };
        assert!(matches!(
            validate_table_category(&spec),
            Err(Error::Unresolved(_))
        ));
    }

    #[test]
    fn finset_hom_count_and_predicates() {
        let cat = Category::finset(Budget::default());
        let two = cat.write().add_obj(ObjData::FinSet { size: 2 });
        let one = cat.write().add_obj(ObjData::FinSet { size: 1 });
        assert_eq!(cat.hom(two, two).unwrap().len(), 4);
        let collapse = cat
            .write()
            .add_mor(two, one, MorPayload::Map(vec![0, 0]));
        assert!(cat.is_epi(collapse).unwrap());
        assert!(!cat.is_mono(collapse).unwrap());
        assert!(cat.predicate(collapse, MorPredicate::SplitEpi).unwrap());
        let id2 = cat.identity(two);
        for which in [
            MorPredicate::Mono,
            MorPredicate::Epi,
            MorPredicate::Iso,
            MorPredicate::SplitMono,
            MorPredicate::SplitEpi,
        ] {
            assert!(cat.predicate(id2, which).unwrap());
        }
    }

    #[test]
    fn finpreord_bijective_monotone_is_mono_epi_not_iso() {
        let cat = Category::finpreord(Budget::default());
        let disc = cat.write().add_obj(ObjData::FinPreord {
            size: 2,
            leq: vec![true, false, false, true],
        });
        let chain = cat.write().add_obj(ObjData::FinPreord {
            size: 2,
            leq: vec![true, true, false, true],
        });
        let m = cat
            .write()
            .add_mor(disc, chain, MorPayload::Map(vec![0, 1]));
        assert!(cat.is_mono(m).unwrap());
        assert!(cat.is_epi(m).unwrap());
        assert!(!cat.is_iso(m).unwrap());
        // Monotone maps from the chain to the discrete pair: the two constants.
        assert_eq!(cat.hom(chain, disc).unwrap().len(), 2);
    }

    #[test]
    fn iso_implies_all_other_predicates() {
        let cat = Category::finset(Budget::default());
        let three = cat.write().add_obj(ObjData::FinSet { size: 3 });
        let swap = cat
            .write()
            .add_mor(three, three, MorPayload::Map(vec![1, 0, 2]));
        assert!(cat.is_iso(swap).unwrap());
        for which in [
            MorPredicate::Mono,
            MorPredicate::Epi,
            MorPredicate::SplitMono,
            MorPredicate::SplitEpi,
        ] {
            assert!(cat.predicate(swap, which).unwrap());
        }
        let twice = cat.compose(swap, swap).unwrap();
        assert!(cat.is_identity(twice));
    }
}
