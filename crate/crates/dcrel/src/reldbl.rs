//! The double category of relations for a verified stable factorisation
//! system: horizontal arrows are canonical M-relations `⟨l,r⟩: R → A×B`,
//! cells are apex morphisms commuting with the pairings, horizontal
//! composition is pullback followed by M-image, and units are M-images of
//! diagonals.
//!
//! Relations are stored canonically, so horizontal hom-sets are genuine
//! finite sets and equality of horizontal arrows is equality of canonical
//! forms; the coherence isomorphisms of the construction become identities
//! plus recorded comparison morphisms.

use crate::basecat::{BackendKind, Category, MorPayload, MorRef, ObjRef};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::factsys::{ArrowClass, BuiltinClass, FactSystem};
use crate::limits::{factor_through, ConeData, LimitChoice, LimitDiagram};
use crate::report::PropertyReport;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, RwLock};

/// A canonical M-relation `A ⇸ B`: a span whose pairing into the chosen
/// product lies in M and is the canonical representative of its
/// isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MRelation {
    pub src: ObjRef,
    pub tgt: ObjRef,
    pub apex: ObjRef,
    pub left: MorRef,
    pub right: MorRef,
    pub pairing: MorRef,
}

/// A cell framed by vertical arrows `f` (source side) and `g` (target
/// side): an apex morphism `alpha` with
/// `alpha ; bottom.pairing = top.pairing ; (f × g)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelCell {
    pub top: MRelation,
    pub bottom: MRelation,
    pub f: MorRef,
    pub g: MorRef,
    pub alpha: MorRef,
}

/// A cell whose top is the empty path at `apex_obj`: an arrow
/// `alpha: apex_obj → target.apex` with `alpha ; pairing = ⟨f, g⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangleCell {
    pub apex_obj: ObjRef,
    pub f: MorRef,
    pub g: MorRef,
    pub target: MRelation,
    pub alpha: MorRef,
}

/// Outcome of canonicalization: the canonical relation plus the comparison
/// morphism from the original span apex (the E-part of the image
/// factorisation composed with the iso onto the representative).
#[derive(Debug, Clone)]
pub struct Canonicalized {
    pub rel: MRelation,
    pub comparison: MorRef,
}

/// A built double category of relations over a verified stable OFS.
pub struct RelDouble {
    pub cat: Arc<Category>,
    pub system: FactSystem,
    pub carriers: Vec<ObjRef>,
    pub terminal: ObjRef,
    pub budget: Budget,
    limits: LimitChoice,
    homs: RwLock<BTreeMap<(ObjRef, ObjRef), Vec<MRelation>>>,
    compose_cache: RwLock<BTreeMap<ComposeKey, MRelation>>,
    /// Set by the discreteness checker; gates the dagger and tilt machinery.
    pub(crate) discrete: RwLock<Option<bool>>,
}

/// Pairings alone do not identify relations (empty apexes share the empty
/// map), so the cache keys on the full typing.
type ComposeKey = (ObjRef, ObjRef, MorRef, ObjRef, MorRef);

pub fn build_rel_double(
    cat: Arc<Category>,
    system: FactSystem,
    carriers: Vec<ObjRef>,
) -> Result<RelDouble> {
    if !system.is_ofs.is_true() || !system.is_stable.is_true() {
        return Err(Error::Unverified(format!(
            "build_rel_double requires a verified stable OFS; '{}' has is_ofs = {}, is_stable = {}",
            system.name,
            system.is_ofs.mark(),
            system.is_stable.mark()
        )));
    }
    if carriers.is_empty() {
        return Err(Error::MissingLimit(
            "empty carrier set has no vertical terminal".into(),
        ));
    }
    let budget = cat.budget();
    let limits = LimitChoice::default();
    let terminal_cone = limits.get(&cat, LimitDiagram::Terminal)?;
    let terminal = terminal_cone.apex;
    let mut carriers = carriers;
    if !carriers.contains(&terminal) {
        carriers.push(terminal);
    }
    carriers.sort_unstable();
    carriers.dedup();
    // Fail fast on missing carrier products, then cache every horizontal
    // hom-set between carriers.
    for &a in &carriers {
        for &b in &carriers {
            limits.get(&cat, LimitDiagram::Product(a, b))?;
        }
    }
    let d = RelDouble {
        cat,
        system,
        carriers: carriers.clone(),
        terminal,
        budget,
        limits,
        homs: RwLock::new(BTreeMap::new()),
        compose_cache: RwLock::new(BTreeMap::new()),
        discrete: RwLock::new(None),
    };
    for &a in &carriers {
        for &b in &carriers {
            d.hom_rel(a, b)?;
        }
    }
    Ok(d)
}

impl RelDouble {
    pub fn product_cone(&self, a: ObjRef, b: ObjRef) -> Result<ConeData> {
        self.limits.get(&self.cat, LimitDiagram::Product(a, b))
    }

    pub fn pullback_cone(&self, f: MorRef, g: MorRef) -> Result<ConeData> {
        self.limits.get(&self.cat, LimitDiagram::Pullback(f, g))
    }

    /// The unique arrow into the chosen terminal.
    pub fn bang(&self, a: ObjRef) -> Result<MorRef> {
        let cat = &*self.cat;
        match cat.backend() {
            BackendKind::Table => {
                let h = cat.hom(a, self.terminal)?;
                match h.len() {
                    1 => Ok(h[0]),
                    n => Err(Error::Inconsistency(format!(
                        "terminal {} has {n} arrows from {}",
                        cat.obj_label(self.terminal),
                        cat.obj_label(a)
                    ))),
                }
            }
            _ => {
                let n = cat.obj_size(a);
                let mut reg = cat.write();
                Ok(reg.add_mor(a, self.terminal, MorPayload::Map(vec![0; n])))
            }
        }
    }

    /// `⟨l, r⟩` into the chosen product of the codomains.
    pub fn pairing(&self, l: MorRef, r: MorRef) -> Result<MorRef> {
        let cone = self.product_cone(self.cat.cod(l), self.cat.cod(r))?;
        factor_through(&self.cat, &cone, &[l, r])
    }

    /// `f × g` between the chosen products.
    pub fn product_map(&self, f: MorRef, g: MorRef) -> Result<MorRef> {
        let cat = &*self.cat;
        let dom_cone = self.product_cone(cat.dom(f), cat.dom(g))?;
        let cod_cone = self.product_cone(cat.cod(f), cat.cod(g))?;
        let l = cat.compose(dom_cone.legs[0], f)?;
        let r = cat.compose(dom_cone.legs[1], g)?;
        factor_through(&self.cat, &cod_cone, &[l, r])
    }

    pub fn in_m(&self, m: MorRef) -> Result<bool> {
        self.system.m.contains(&self.cat, m)
    }

    pub fn in_e(&self, e: MorRef) -> Result<bool> {
        self.system.e.contains(&self.cat, e)
    }

    /// Canonicalize the span `(l, r)`: factor its pairing through `(E, M)`
    /// and return the canonical representative of the M-part's iso class,
    /// with the comparison morphism from the span apex.
    pub fn canonicalize(&self, l: MorRef, r: MorRef) -> Result<Canonicalized> {
        let p = self.pairing(l, r)?;
        let (e, m) = crate::factsys::factorise(&self.cat, &self.system, p)?;
        let (rel, iso) = self.canonical_rep(m, self.cat.cod(l), self.cat.cod(r))?;
        let comparison = self.cat.compose(e, iso)?;
        if !self.in_m(rel.pairing)? {
            return Err(Error::Inconsistency(format!(
                "canonical representative pairing {} escaped M",
                self.cat.mor_label(rel.pairing)
            )));
        }
        Ok(Canonicalized { rel, comparison })
    }

    /// Canonical representative of the iso class of an M-arrow
    /// `m: Y → A×B` over the chosen product, together with the iso
    /// `Y → rep.apex` commuting with the pairings.
    pub(crate) fn canonical_rep(&self, m: MorRef, a: ObjRef, b: ObjRef) -> Result<(MRelation, MorRef)> {
        let cat = &*self.cat;
        let cone = self.product_cone(a, b)?;
        match cat.backend() {
            BackendKind::FinSet => {
                let vals = cat.map_of(m).expect("concrete map");
                let mut order: Vec<usize> = (0..vals.len()).collect();
                order.sort_by_key(|&i| (vals[i], i));
                let sorted: Vec<usize> = order.iter().map(|&i| vals[i]).collect();
                let mut rank = vec![0usize; vals.len()];
                for (pos, &i) in order.iter().enumerate() {
                    rank[i] = pos;
                }
                let m_dom = cat.dom(m);
                let (apex, pairing, iso) = {
                    let mut reg = cat.write();
                    let apex = reg.add_obj(crate::basecat::ObjData::FinSet { size: vals.len() });
                    let pairing = reg.add_mor(apex, cone.apex, MorPayload::Map(sorted));
                    let iso = reg.add_mor(m_dom, apex, MorPayload::Map(rank));
                    (apex, pairing, iso)
                };
                Ok((self.rel_from_pairing(a, b, apex, pairing, &cone)?, iso))
            }
            BackendKind::FinPreord => {
                let vals = cat.map_of(m).expect("concrete map");
                let y = cat.dom(m);
                let n = vals.len();
                self.budget.check_search(
                    "preorder canonical form",
                    (1..=n as u128).product::<u128>(),
                )?;
                // Minimal encoding over all relabelings of the apex.
                let mut best: Option<(Vec<usize>, Vec<bool>, Vec<usize>)> = None;
                permute(n, &mut |perm| {
                    // perm[new_index] = old_index
                    let cand_vals: Vec<usize> = perm.iter().map(|&i| vals[i]).collect();
                    let mut cand_leq = vec![false; n * n];
                    for i in 0..n {
                        for j in 0..n {
                            cand_leq[i * n + j] = cat.obj_leq(y, perm[i], perm[j]);
                        }
                    }
                    let better = match &best {
                        None => true,
                        Some((bv, bl, _)) => {
                            cand_vals < *bv || (cand_vals == *bv && cand_leq < *bl)
                        }
                    };
                    if better {
                        best = Some((cand_vals, cand_leq, perm.to_vec()));
                    }
                });
                let (bv, bl, perm) = best.expect("nonempty permutation set");
                let mut rank = vec![0usize; n];
                for (new, &old) in perm.iter().enumerate() {
                    rank[old] = new;
                }
                let (apex, pairing, iso) = {
                    let mut reg = cat.write();
                    let apex = reg.add_obj(crate::basecat::ObjData::FinPreord {
                        size: n,
                        leq: bl,
                    });
                    let pairing = reg.add_mor(apex, cone.apex, MorPayload::Map(bv));
                    let iso = reg.add_mor(y, apex, MorPayload::Map(rank));
                    (apex, pairing, iso)
                };
                Ok((self.rel_from_pairing(a, b, apex, pairing, &cone)?, iso))
            }
            BackendKind::Table => {
                // First (object, M-arrow) in canonical order isomorphic to m.
                for y in cat.objects() {
                    for cand in cat.hom(y, cone.apex)? {
                        if !self.in_m(cand)? {
                            continue;
                        }
                        if let Some(iso) = self.apex_iso(m, cand)? {
                            let rel = self.rel_from_pairing(a, b, y, cand, &cone)?;
                            return Ok((rel, iso));
                        }
                    }
                }
                Err(Error::Inconsistency(format!(
                    "no canonical representative found for {}",
                    cat.mor_label(m)
                )))
            }
        }
    }

    /// An isomorphism between the domains of two parallel-ish M-arrows
    /// commuting with them, if any.
    fn apex_iso(&self, m: MorRef, m2: MorRef) -> Result<Option<MorRef>> {
        let cat = &*self.cat;
        if cat.cod(m) != cat.cod(m2) {
            return Ok(None);
        }
        for phi in cat.hom(cat.dom(m), cat.dom(m2))? {
            if cat.compose(phi, m2)? == m && cat.is_iso(phi)? {
                return Ok(Some(phi));
            }
        }
        Ok(None)
    }

    fn rel_from_pairing(
        &self,
        src: ObjRef,
        tgt: ObjRef,
        apex: ObjRef,
        pairing: MorRef,
        cone: &ConeData,
    ) -> Result<MRelation> {
        let cat = &*self.cat;
        Ok(MRelation {
            src,
            tgt,
            apex,
            left: cat.compose(pairing, cone.legs[0])?,
            right: cat.compose(pairing, cone.legs[1])?,
            pairing,
        })
    }

    /// The horizontal unit on `a`: the M-image of the diagonal.
    pub fn unit_h(&self, a: ObjRef) -> Result<MRelation> {
        let id = self.cat.identity(a);
        Ok(self.canonicalize(id, id)?.rel)
    }

    /// The comparison `a → unit.apex` (E-part of the diagonal image).
    pub fn unit_comparison(&self, a: ObjRef) -> Result<Canonicalized> {
        let id = self.cat.identity(a);
        self.canonicalize(id, id)
    }

    /// Horizontal composite with its construction data: the pullback cone
    /// over the middle object and the comparison from the pullback apex.
    pub fn compose_h_full(&self, r: &MRelation, s: &MRelation) -> Result<(MRelation, MorRef, ConeData)> {
        if r.tgt != s.src {
            return Err(Error::IllFormed("compose_h: mismatched middle object".into()));
        }
        let cone = self.pullback_cone(r.right, s.left)?;
        let cat = &*self.cat;
        let l = cat.compose(cone.legs[0], r.left)?;
        let rr = cat.compose(cone.legs[1], s.right)?;
        let c = self.canonicalize(l, rr)?;
        Ok((c.rel, c.comparison, cone))
    }

    pub fn compose_h(&self, r: &MRelation, s: &MRelation) -> Result<MRelation> {
        let key = (r.src, r.tgt, r.pairing, s.tgt, s.pairing);
        if let Some(hit) = self.compose_cache.read().expect("compose cache").get(&key) {
            return Ok(hit.clone());
        }
        let out = self.compose_h_full(r, s)?.0;
        self.compose_cache
            .write()
            .expect("compose cache")
            .insert(key, out.clone());
        Ok(out)
    }

    pub fn compose_h_path(&self, rels: &[MRelation]) -> Result<MRelation> {
        let mut acc = rels[0].clone();
        for r in &rels[1..] {
            acc = self.compose_h(&acc, r)?;
        }
        Ok(acc)
    }

    /// The associativity comparison `((p⊙q)⊙r).apex → (p⊙(qr)).apex`.
    ///
    /// Both canonical forms are M-images of the common triple pullback, so
    /// the unique orthogonality filler between the two image factorisations
    /// is the coherence iso. When pairings are monic it is the identity;
    /// for duplicate-valued spans it genuinely permutes slots, and pastings
    /// that mix bracketings must insert it.
    pub fn associator(&self, p: &MRelation, q: &MRelation, r: &MRelation) -> Result<MorRef> {
        let cat = &*self.cat;
        let (pq, pq_cmp, pq_cone) = self.compose_h_full(p, q)?;
        let (qr, qr_cmp, qr_cone) = self.compose_h_full(q, r)?;
        let (left, left_cmp, left_cone) = self.compose_h_full(&pq, r)?;
        let (right, right_cmp, right_cone) = self.compose_h_full(p, &qr)?;
        if left != right {
            return Err(Error::Inconsistency(
                "associator: canonical forms of the two bracketings differ".into(),
            ));
        }
        // Triple pullback by left fold: apex Q with legs into the first
        // pullback and into r.
        let q_right = cat.compose(pq_cone.legs[1], q.right)?;
        let triple = self.pullback_cone(q_right, r.left)?;
        // Q → ((pq)r).apex through the outer pullback of the left bracketing.
        let e_left = {
            let u = factor_through(
                &self.cat,
                &left_cone,
                &[
                    cat.compose(triple.legs[0], pq_cmp)?,
                    triple.legs[1],
                ],
            )?;
            cat.compose(u, left_cmp)?
        };
        // Q → (p(qr)).apex through the outer pullback of the right
        // bracketing.
        let e_right = {
            let into_qr = factor_through(
                &self.cat,
                &qr_cone,
                &[
                    cat.compose(triple.legs[0], pq_cone.legs[1])?,
                    triple.legs[1],
                ],
            )?;
            let u = factor_through(
                &self.cat,
                &right_cone,
                &[
                    cat.compose(triple.legs[0], pq_cone.legs[0])?,
                    cat.compose(into_qr, qr_cmp)?,
                ],
            )?;
            cat.compose(u, right_cmp)?
        };
        let assoc = self.orth_filler(e_left, right.pairing, e_right, left.pairing)?;
        if !cat.is_iso(assoc)? {
            return Err(Error::Inconsistency("associator is not invertible".into()));
        }
        Ok(assoc)
    }

    /// All canonical M-relations `a ⇸ b`, cached.
    pub fn hom_rel(&self, a: ObjRef, b: ObjRef) -> Result<Vec<MRelation>> {
        if let Some(cached) = self.homs.read().expect("hom cache").get(&(a, b)) {
            return Ok(cached.clone());
        }
        let rels = self.enumerate_relations(a, b)?;
        self.homs
            .write()
            .expect("hom cache")
            .insert((a, b), rels.clone());
        Ok(rels)
    }

    /// Enumerate canonical relations by M-arrows into the chosen product.
    /// Subobject-like right classes are enumerated exactly; the class of all
    /// arrows is enumerated up to the apex budget and callers record the
    /// probe bound.
    fn enumerate_relations(&self, a: ObjRef, b: ObjRef) -> Result<Vec<MRelation>> {
        let cat = &*self.cat;
        let cone = self.product_cone(a, b)?;
        let n = cat.obj_size(cone.apex);
        let mut out = Vec::new();
        match cat.backend() {
            BackendKind::Table => {
                let mut seen = BTreeSet::new();
                for y in cat.objects() {
                    for m in cat.hom(y, cone.apex)? {
                        if !self.in_m(m)? {
                            continue;
                        }
                        let (rel, _) = self.canonical_rep(m, a, b)?;
                        if seen.insert((rel.apex, rel.pairing)) {
                            out.push(rel);
                        }
                    }
                }
            }
            BackendKind::FinSet | BackendKind::FinPreord => {
                let subobject_like = self.m_is_subobject_like();
                if subobject_like {
                    self.budget.check_search("relation enumeration", 1u128 << n)?;
                    for mask in 0u64..(1u64 << n) {
                        let elems: Vec<usize> =
                            (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                        let (apex, inc) = {
                            let mut reg = cat.write();
                            crate::concrete::subobject(&mut reg, cone.apex, &elems)
                        };
                        out.push(self.rel_from_pairing(a, b, apex, inc, &cone)?);
                    }
                } else if matches!(self.system.m, ArrowClass::Builtin(BuiltinClass::Iso)) {
                    let id = cat.identity(cone.apex);
                    out.push(self.rel_from_pairing(a, b, cone.apex, id, &cone)?);
                } else {
                    // Generic: apexes up to the budgeted size, every map into
                    // the product, filtered by M and deduplicated by
                    // canonical form. Relation apexes here are bare sets;
                    // ordered apexes would need their own enumeration.
                    if cat.backend() == BackendKind::FinPreord {
                        return Err(Error::Unsupported(
                            "relation enumeration on FinPreord needs a subobject-like or iso right class".into(),
                        ));
                    }
                    let cap = if self.budget.apex_cap == 0 {
                        n.max(1)
                    } else {
                        self.budget.apex_cap
                    };
                    let mut seen = BTreeSet::new();
                    for k in 0..=cap {
                        for vals in all_maps(k, n) {
                            let m = {
                                let mut reg = cat.write();
                                let apex =
                                    reg.add_obj(crate::basecat::ObjData::FinSet { size: k });
                                reg.add_mor(apex, cone.apex, MorPayload::Map(vals.clone()))
                            };
                            if !self.in_m(m)? {
                                continue;
                            }
                            let (rel, _) = self.canonical_rep(m, a, b)?;
                            if seen.insert(rel.pairing) {
                                out.push(rel);
                            }
                        }
                    }
                }
            }
        }
        out.sort_by(|x, y| self.rel_sort_key(x).cmp(&self.rel_sort_key(y)));
        Ok(out)
    }

    fn m_is_subobject_like(&self) -> bool {
        matches!(
            self.system.m,
            ArrowClass::Builtin(BuiltinClass::Mono) | ArrowClass::Builtin(BuiltinClass::Embedding)
        )
    }

    /// Structural sort key: apex size, then pairing table, then order data.
    fn rel_sort_key(&self, r: &MRelation) -> (usize, Vec<usize>, Vec<bool>) {
        let cat = &*self.cat;
        match cat.backend() {
            BackendKind::Table => (r.apex.index(), vec![r.pairing.index()], Vec::new()),
            _ => {
                let vals = cat.map_of(r.pairing).unwrap_or_default();
                let nsize = cat.obj_size(r.apex);
                let mut leq = Vec::new();
                if cat.backend() == BackendKind::FinPreord {
                    for i in 0..nsize {
                        for j in 0..nsize {
                            leq.push(cat.obj_leq(r.apex, i, j));
                        }
                    }
                }
                (nsize, vals, leq)
            }
        }
    }

    /// Human-readable rendering; FinSet relations print as pair sets.
    pub fn rel_label(&self, r: &MRelation) -> String {
        let cat = &*self.cat;
        match cat.backend() {
            BackendKind::FinSet | BackendKind::FinPreord => {
                let nb = cat.obj_size(r.tgt);
                let vals = cat.map_of(r.pairing).unwrap_or_default();
                let pairs: Vec<String> = vals
                    .iter()
                    .map(|&v| {
                        if nb == 0 {
                            format!("({v})")
                        } else {
                            format!("({},{})", v / nb, v % nb)
                        }
                    })
                    .collect();
                format!(
                    "{}⇸{} {{{}}}",
                    cat.obj_label(r.src),
                    cat.obj_label(r.tgt),
                    pairs.join(",")
                )
            }
            BackendKind::Table => format!(
                "{}⇸{} apex {} pairing {}",
                cat.obj_label(r.src),
                cat.obj_label(r.tgt),
                cat.obj_label(r.apex),
                cat.mor_label(r.pairing)
            ),
        }
    }

    /// All cells from `r` to `s` framed by `(f, g)`, in canonical order.
    pub fn enumerate_cells(
        &self,
        r: &MRelation,
        s: &MRelation,
        f: MorRef,
        g: MorRef,
    ) -> Result<Vec<RelCell>> {
        let cat = &*self.cat;
        if cat.dom(f) != r.src || cat.cod(f) != s.src || cat.dom(g) != r.tgt || cat.cod(g) != s.tgt
        {
            return Err(Error::IllFormed("enumerate_cells: bad frame typing".into()));
        }
        let fg = self.product_map(f, g)?;
        let want = cat.compose(r.pairing, fg)?;
        let mut out = Vec::new();
        for alpha in cat.hom(r.apex, s.apex)? {
            if cat.compose(alpha, s.pairing)? == want {
                out.push(RelCell {
                    top: r.clone(),
                    bottom: s.clone(),
                    f,
                    g,
                    alpha,
                });
            }
        }
        Ok(out)
    }

    /// The unique diagonal filler of a square `e ∈ E` against `m ∈ M`.
    pub fn orth_filler(&self, e: MorRef, m: MorRef, top: MorRef, bottom: MorRef) -> Result<MorRef> {
        let cat = &*self.cat;
        debug_assert_eq!(cat.dom(top), cat.dom(e));
        debug_assert_eq!(cat.cod(top), cat.dom(m));
        debug_assert_eq!(cat.dom(bottom), cat.cod(e));
        debug_assert_eq!(cat.cod(bottom), cat.cod(m));
        if cat.compose(e, bottom)? != cat.compose(top, m)? {
            return Err(Error::IllFormed("orth_filler: square does not commute".into()));
        }
        match cat.backend() {
            BackendKind::FinSet | BackendKind::FinPreord => {
                let e_map = cat.map_of(e).expect("concrete");
                let m_map = cat.map_of(m).expect("concrete");
                let top_map = cat.map_of(top).expect("concrete");
                let bot_map = cat.map_of(bottom).expect("concrete");
                let n = cat.obj_size(cat.cod(e));
                let mut d = vec![usize::MAX; n];
                // Down the left leg first, then pin the rest through m.
                for (x, &ex) in e_map.iter().enumerate() {
                    let v = top_map[x];
                    if d[ex] != usize::MAX && d[ex] != v {
                        return Err(Error::Inconsistency(
                            "orth_filler: no filler (left factor not consistent)".into(),
                        ));
                    }
                    d[ex] = v;
                }
                for (y, slot) in d.iter_mut().enumerate() {
                    if *slot == usize::MAX {
                        let target = bot_map[y];
                        let preimages: Vec<usize> = m_map
                            .iter()
                            .enumerate()
                            .filter(|&(_, &v)| v == target)
                            .map(|(i, _)| i)
                            .collect();
                        if preimages.len() != 1 {
                            return Err(Error::Inconsistency(
                                "orth_filler: filler not unique or missing".into(),
                            ));
                        }
                        *slot = preimages[0];
                    }
                }
                // Verify both triangles (and monotonicity via registration).
                let dm = {
                    let mut reg = cat.write();
                    if reg.backend == BackendKind::FinPreord
                        && !reg.monotone(reg.mor(e).cod, reg.mor(m).dom, &d)
                    {
                        return Err(Error::Inconsistency(
                            "orth_filler: computed filler is not monotone".into(),
                        ));
                    }
                    let (dom, cod) = (reg.mor(e).cod, reg.mor(m).dom);
                    reg.add_mor(dom, cod, MorPayload::Map(d))
                };
                if cat.compose(e, dm)? != top || cat.compose(dm, m)? != bottom {
                    return Err(Error::Inconsistency(
                        "orth_filler: candidate fails a triangle".into(),
                    ));
                }
                Ok(dm)
            }
            BackendKind::Table => {
                let mut found = Vec::new();
                for d in cat.hom(cat.cod(e), cat.dom(m))? {
                    if cat.compose(e, d)? == top && cat.compose(d, m)? == bottom {
                        found.push(d);
                    }
                }
                match found.len() {
                    1 => Ok(found[0]),
                    n => Err(Error::Inconsistency(format!(
                        "orth_filler: {n} fillers for a square across E/M"
                    ))),
                }
            }
        }
    }

    pub fn identity_cell(&self, r: &MRelation) -> RelCell {
        RelCell {
            top: r.clone(),
            bottom: r.clone(),
            f: self.cat.identity(r.src),
            g: self.cat.identity(r.tgt),
            alpha: self.cat.identity(r.apex),
        }
    }

    pub fn cell_is_valid(&self, c: &RelCell) -> Result<bool> {
        let cat = &*self.cat;
        let fg = self.product_map(c.f, c.g)?;
        Ok(cat.compose(c.alpha, c.bottom.pairing)? == cat.compose(c.top.pairing, fg)?)
    }

    pub fn compose_cells_v(&self, c1: &RelCell, c2: &RelCell) -> Result<RelCell> {
        if c1.bottom != c2.top {
            return Err(Error::IllFormed("vertical composition: middle mismatch".into()));
        }
        let cat = &*self.cat;
        Ok(RelCell {
            top: c1.top.clone(),
            bottom: c2.bottom.clone(),
            f: cat.compose(c1.f, c2.f)?,
            g: cat.compose(c1.g, c2.g)?,
            alpha: cat.compose(c1.alpha, c2.alpha)?,
        })
    }

    /// Horizontal composite of cells: the universal map into the composite's
    /// pullback followed by the orthogonality filler against the canonical
    /// image.
    pub fn compose_cells_h(&self, c1: &RelCell, c2: &RelCell) -> Result<RelCell> {
        if c1.top.tgt != c2.top.src || c1.bottom.tgt != c2.bottom.src || c1.g != c2.f {
            return Err(Error::IllFormed("horizontal composition: frames mismatch".into()));
        }
        let cat = &*self.cat;
        let (top_rel, top_cmp, top_cone) = self.compose_h_full(&c1.top, &c2.top)?;
        let (bot_rel, bot_cmp, bot_cone) = self.compose_h_full(&c1.bottom, &c2.bottom)?;
        // Universal map between the pullback apexes.
        let u = factor_through(
            &self.cat,
            &bot_cone,
            &[
                cat.compose(top_cone.legs[0], c1.alpha)?,
                cat.compose(top_cone.legs[1], c2.alpha)?,
            ],
        )?;
        let fh = self.product_map(c1.f, c2.g)?;
        let alpha = self.orth_filler(
            top_cmp,
            bot_rel.pairing,
            cat.compose(u, bot_cmp)?,
            cat.compose(top_rel.pairing, fh)?,
        )?;
        let cell = RelCell {
            top: top_rel,
            bottom: bot_rel,
            f: c1.f,
            g: c2.g,
            alpha,
        };
        if !self.cell_is_valid(&cell)? {
            return Err(Error::Inconsistency(
                "horizontal composite cell fails its defining square".into(),
            ));
        }
        Ok(cell)
    }

    /// Compose a triangle `T: Δ(apex) → q1` with a triangle `S: Δ(apex) → q2`
    /// over a composable pair `q1: A ⇸ B`, `q2: B ⇸ C` sharing the same
    /// apex object (legs agree at `B`): the result is the triangle into
    /// `q1 ⊙ q2`.
    pub fn paste_triangles(&self, t1: &TriangleCell, t2: &TriangleCell) -> Result<TriangleCell> {
        if t1.apex_obj != t2.apex_obj || t1.target.tgt != t2.target.src {
            return Err(Error::IllFormed("paste_triangles: typing".into()));
        }
        let cat = &*self.cat;
        if cat.compose(t1.alpha, t1.target.right)? != cat.compose(t2.alpha, t2.target.left)? {
            return Err(Error::IllFormed("paste_triangles: legs disagree at the middle".into()));
        }
        let (rel, cmp, cone) = self.compose_h_full(&t1.target, &t2.target)?;
        let u = factor_through(&self.cat, &cone, &[t1.alpha, t2.alpha])?;
        let alpha = cat.compose(u, cmp)?;
        Ok(TriangleCell {
            apex_obj: t1.apex_obj,
            f: t1.f,
            g: t2.g,
            target: rel,
            alpha,
        })
    }

    pub fn triangle_is_valid(&self, t: &TriangleCell) -> Result<bool> {
        let cat = &*self.cat;
        Ok(cat.compose(t.alpha, t.target.left)? == t.f
            && cat.compose(t.alpha, t.target.right)? == t.g)
    }

    /// The canonical triangle on a relation: its own span with the identity
    /// apex arrow.
    pub fn canonical_triangle(&self, r: &MRelation) -> TriangleCell {
        TriangleCell {
            apex_obj: r.apex,
            f: r.left,
            g: r.right,
            target: r.clone(),
            alpha: self.cat.identity(r.apex),
        }
    }

    /// Triangles at `x` into `r` correspond to arrows `x → r.apex`; list
    /// them all.
    pub fn triangles_at(&self, x: ObjRef, r: &MRelation) -> Result<Vec<TriangleCell>> {
        let cat = &*self.cat;
        let mut out = Vec::new();
        for alpha in cat.hom(x, r.apex)? {
            out.push(TriangleCell {
                apex_obj: x,
                f: cat.compose(alpha, r.left)?,
                g: cat.compose(alpha, r.right)?,
                target: r.clone(),
                alpha,
            });
        }
        Ok(out)
    }

    /// Vertical pre-composition of a triangle with `u: z → t.apex_obj`.
    pub fn restrict_triangle(&self, u: MorRef, t: &TriangleCell) -> Result<TriangleCell> {
        let cat = &*self.cat;
        Ok(TriangleCell {
            apex_obj: cat.dom(u),
            f: cat.compose(u, t.f)?,
            g: cat.compose(u, t.g)?,
            target: t.target.clone(),
            alpha: cat.compose(u, t.alpha)?,
        })
    }

    /// The unit-framed cell corresponding to a triangle: the unique
    /// `b: Id(X).apex → target.apex` with `e_X ; b = alpha`, found as the
    /// orthogonality filler.
    pub fn triangle_to_unit_cell(&self, t: &TriangleCell) -> Result<RelCell> {
        let cat = &*self.cat;
        let unit = self.unit_comparison(t.apex_obj)?;
        let fg = self.product_map(t.f, t.g)?;
        let b = self.orth_filler(
            unit.comparison,
            t.target.pairing,
            t.alpha,
            cat.compose(unit.rel.pairing, fg)?,
        )?;
        Ok(RelCell {
            top: unit.rel,
            bottom: t.target.clone(),
            f: t.f,
            g: t.g,
            alpha: b,
        })
    }

    /// Probe objects: carriers plus every cached relation apex.
    pub fn probe_objects(&self) -> Vec<ObjRef> {
        let mut out: BTreeSet<ObjRef> = self.carriers.iter().copied().collect();
        for rels in self.homs.read().expect("hom cache").values() {
            for r in rels {
                out.insert(r.apex);
            }
        }
        out.into_iter().collect()
    }

    pub fn probe_description(&self) -> String {
        crate::factsys::describe_probe(&self.cat, &self.probe_objects())
    }

    /// Vertical probe arrows: all morphisms between carriers.
    pub fn probe_verticals(&self) -> Result<Vec<MorRef>> {
        crate::factsys::probe_morphisms(&self.cat, &self.carriers)
    }

    /// Associativity, unit laws, and interchange on probes; canonical forms
    /// are compared on the nose.
    pub fn check_double_laws(&self) -> Result<PropertyReport> {
        let probes = self.probe_description();
        let carriers = self.carriers.clone();
        PropertyReport::run("double_laws", &probes, || {
            // Unit laws.
            for &a in &carriers {
                for &b in &carriers {
                    let unit_a = self.unit_h(a)?;
                    let unit_b = self.unit_h(b)?;
                    for r in self.hom_rel(a, b)? {
                        let lu = self.compose_h(&unit_a, &r)?;
                        if lu != r {
                            return Ok(Some(format!(
                                "left unit law fails at {}: got {}",
                                self.rel_label(&r),
                                self.rel_label(&lu)
                            )));
                        }
                        let ru = self.compose_h(&r, &unit_b)?;
                        if ru != r {
                            return Ok(Some(format!(
                                "right unit law fails at {}: got {}",
                                self.rel_label(&r),
                                self.rel_label(&ru)
                            )));
                        }
                    }
                }
            }
            // Associativity over all composable triples of cached relations.
            for &a in &carriers {
                for &b in &carriers {
                    for &c in &carriers {
                        for &d in &carriers {
                            for r in self.hom_rel(a, b)? {
                                for s in self.hom_rel(b, c)? {
                                    let rs = self.compose_h(&r, &s)?;
                                    for t in self.hom_rel(c, d)? {
                                        let st = self.compose_h(&s, &t)?;
                                        let left = self.compose_h(&rs, &t)?;
                                        let right = self.compose_h(&r, &st)?;
                                        if left != right {
                                            return Ok(Some(format!(
                                                "associativity fails at ({}, {}, {})",
                                                self.rel_label(&r),
                                                self.rel_label(&s),
                                                self.rel_label(&t)
                                            )));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            // Interchange on a deterministic probe of cell quadruples.
            if let Some(w) = self.check_interchange()? {
                return Ok(Some(w));
            }
            Ok(None)
        })
    }

    fn check_interchange(&self) -> Result<Option<String>> {
        let cat = &*self.cat;
        let cap_rel = 4;
        let cap_vert = 3;
        for &a in &self.carriers {
            for &b in &self.carriers {
                for &c in &self.carriers {
                    let ras: Vec<_> = self.hom_rel(a, b)?.into_iter().take(cap_rel).collect();
                    let sbs: Vec<_> = self.hom_rel(b, c)?.into_iter().take(cap_rel).collect();
                    for r in &ras {
                        for s in &sbs {
                            for f in cat.hom(a, a)?.into_iter().take(cap_vert) {
                                for g in cat.hom(b, b)?.into_iter().take(cap_vert) {
                                    for h in cat.hom(c, c)?.into_iter().take(cap_vert) {
                                        let c1s = self.enumerate_cells(r, r, f, g)?;
                                        let c2s = self.enumerate_cells(s, s, g, h)?;
                                        for c1 in c1s.iter().take(2) {
                                            for c2 in c2s.iter().take(2) {
                                                let horiz = self.compose_cells_h(c1, c2)?;
                                                let v1 = self.compose_cells_v(c1, c1)?;
                                                let v2 = self.compose_cells_v(c2, c2)?;
                                                let lhs = self.compose_cells_v(&horiz, &horiz)?;
                                                let rhs = self.compose_cells_h(&v1, &v2)?;
                                                if lhs != rhs {
                                                    return Ok(Some(format!(
                                                        "interchange fails at cells over {} and {}",
                                                        self.rel_label(r),
                                                        self.rel_label(s)
                                                    )));
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

/// All element tables of length `k` with values below `n`, lexicographic.
fn all_maps(k: usize, n: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut tab = vec![0usize; k];
    loop {
        out.push(tab.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            tab[i] += 1;
            if tab[i] < n {
                break;
            }
            tab[i] = 0;
        }
    }
}

fn permute(n: usize, f: &mut dyn FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..n).collect();
    permute_rec(&mut idx, 0, f);
}

fn permute_rec(idx: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == idx.len() {
        f(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute_rec(idx, k + 1, f);
        idx.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset;

    /// Decode a FinSet relation into its set of pairs.
    fn pairs_of(d: &RelDouble, r: &MRelation) -> Vec<(usize, usize)> {
        let nb = d.cat.obj_size(r.tgt);
        d.cat
            .map_of(r.pairing)
            .unwrap()
            .iter()
            .map(|&v| (v / nb, v % nb))
            .collect()
    }

    /// Build the canonical relation for a set of pairs.
    fn rel_of_pairs(d: &RelDouble, a: ObjRef, b: ObjRef, pairs: &[(usize, usize)]) -> MRelation {
        let apex = d.cat.finset_obj(pairs.len()).unwrap();
        let l = d
            .cat
            .finset_mor(apex, a, pairs.iter().map(|p| p.0).collect())
            .unwrap();
        let r = d
            .cat
            .finset_mor(apex, b, pairs.iter().map(|p| p.1).collect())
            .unwrap();
        d.canonicalize(l, r).unwrap().rel
    }

    /// Independent oracle: existential composition of set relations.
    fn oracle_compose(r: &[(usize, usize)], s: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in r {
            for &(b2, c) in s {
                if b == b2 && !out.contains(&(a, c)) {
                    out.push((a, c));
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn finset_hom_sizes() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        // Subsets of a 4-element product.
        assert_eq!(d.hom_rel(two, two).unwrap().len(), 16);
        let one = d.cat.finset_obj(1).unwrap();
        assert_eq!(d.hom_rel(one, one).unwrap().len(), 2);
        let zero = d.cat.finset_obj(0).unwrap();
        assert_eq!(d.hom_rel(zero, two).unwrap().len(), 1);
    }

    #[test]
    fn chain_poset_has_singleton_homs() {
        let d = preset::build("chain2", 2, Budget::default()).unwrap();
        for &a in &d.carriers {
            for &b in &d.carriers {
                assert_eq!(
                    d.hom_rel(a, b).unwrap().len(),
                    1,
                    "hom({}, {})",
                    d.cat.obj_label(a),
                    d.cat.obj_label(b)
                );
            }
        }
    }

    #[test]
    fn units_are_diagonal_images() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let u = d.unit_h(two).unwrap();
        assert_eq!(pairs_of(&d, &u), vec![(0, 0), (1, 1)]);
        let unit_t = d.unit_h(d.terminal).unwrap();
        assert_eq!(pairs_of(&d, &unit_t), vec![(0, 0)]);

        // Under (all, iso) the unit is the whole product.
        let s = preset::build("alliso2", 2, Budget::default()).unwrap();
        let two = s.cat.finset_obj(2).unwrap();
        let u = s.unit_h(two).unwrap();
        assert_eq!(s.cat.obj_size(u.apex), 4);
    }

    #[test]
    fn compose_matches_set_relation_oracle() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let one = d.cat.finset_obj(1).unwrap();

        // The worked example: R = {(0,0),(1,0)}, S = {(0,0)} ⊆ [2]×[1].
        let r = rel_of_pairs(&d, two, two, &[(0, 0), (1, 0)]);
        let s = rel_of_pairs(&d, two, one, &[(0, 0)]);
        let rs = d.compose_h(&r, &s).unwrap();
        assert_eq!(pairs_of(&d, &rs), vec![(0, 0), (1, 0)]);

        // All pairs [2]⇸[2]⇸[2], frozen against the oracle.
        for r in d.hom_rel(two, two).unwrap() {
            for s in d.hom_rel(two, two).unwrap() {
                let got = pairs_of(&d, &d.compose_h(&r, &s).unwrap());
                let want = oracle_compose(&pairs_of(&d, &r), &pairs_of(&d, &s));
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn span_composition_does_not_collapse() {
        let d = preset::build("span2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let one = d.cat.finset_obj(1).unwrap();
        let l = d.cat.finset_mor(two, one, vec![0, 0]).unwrap();
        let span = d.canonicalize(l, l).unwrap().rel;
        assert_eq!(d.cat.obj_size(span.apex), 2);
        let sq = d.compose_h(&span, &span).unwrap();
        // Pullback of two 2-to-1 maps has 4 elements; no image collapse.
        assert_eq!(d.cat.obj_size(sq.apex), 4);
    }

    #[test]
    fn canonicalize_is_idempotent_and_collapses_spans() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let four = d.cat.finset_obj(4).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        // Span [4] ⇉ [2] with image {(0,0),(1,1)}: the diagonal.
        let l = d.cat.finset_mor(four, two, vec![0, 0, 1, 1]).unwrap();
        let r = d.cat.finset_mor(four, two, vec![0, 0, 1, 1]).unwrap();
        let c = d.canonicalize(l, r).unwrap();
        assert_eq!(pairs_of(&d, &c.rel), vec![(0, 0), (1, 1)]);
        assert!(d.in_e(c.comparison).unwrap());
        // Idempotence: canonicalizing the canonical span returns it unchanged.
        let again = d.canonicalize(c.rel.left, c.rel.right).unwrap();
        assert_eq!(again.rel, c.rel);
        assert!(d.cat.is_identity(again.comparison));
    }

    #[test]
    fn cell_enumeration_counts() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let id2 = d.cat.identity(two);
        for r in d.hom_rel(two, two).unwrap() {
            // Monic pairings make the identity-frame cell unique.
            let cells = d.enumerate_cells(&r, &r, id2, id2).unwrap();
            assert_eq!(cells.len(), 1);
            assert_eq!(cells[0], d.identity_cell(&r));
        }
        // Incompatible frame: no cell from the full relation into the empty one.
        let full = rel_of_pairs(&d, two, two, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let empty = rel_of_pairs(&d, two, two, &[]);
        assert!(d.enumerate_cells(&full, &empty, id2, id2).unwrap().is_empty());

        // Span: a 2-element apex over the point admits one cell per endomap.
        let s = preset::build("span2", 2, Budget::default()).unwrap();
        let two = s.cat.finset_obj(2).unwrap();
        let one = s.cat.finset_obj(1).unwrap();
        let l = s.cat.finset_mor(two, one, vec![0, 0]).unwrap();
        let span = s.canonicalize(l, l).unwrap().rel;
        let id1 = s.cat.identity(one);
        let cells = s.enumerate_cells(&span, &span, id1, id1).unwrap();
        // Oracle: maps α: [2]→[2] with α;⟨l,l⟩ = ⟨l,l⟩; the pairing is
        // constant, so every endomap qualifies.
        assert_eq!(cells.len(), 4);
    }

    #[test]
    fn cell_composition() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let id2 = d.cat.identity(two);
        let r = rel_of_pairs(&d, two, two, &[(0, 0)]);
        let r_big = rel_of_pairs(&d, two, two, &[(0, 0), (1, 1)]);
        let s = rel_of_pairs(&d, two, two, &[(0, 1)]);
        let s_big = rel_of_pairs(&d, two, two, &[(0, 1), (1, 0)]);
        let c1 = &d.enumerate_cells(&r, &r_big, id2, id2).unwrap()[0];
        let c2 = &d.enumerate_cells(&s, &s_big, id2, id2).unwrap()[0];

        // Vertical: identities compose to the identity.
        let idc = d.identity_cell(&r);
        assert_eq!(d.compose_cells_v(&idc, &idc).unwrap(), idc);

        // Horizontal: composite of subrelation inclusions is the inclusion
        // of the composite subrelations.
        let h = d.compose_cells_h(c1, c2).unwrap();
        assert_eq!(
            pairs_of(&d, &h.top),
            oracle_compose(&pairs_of(&d, &r), &pairs_of(&d, &s))
        );
        assert_eq!(
            pairs_of(&d, &h.bottom),
            oracle_compose(&pairs_of(&d, &r_big), &pairs_of(&d, &s_big))
        );
        assert!(d.cell_is_valid(&h).unwrap());

        // Horizontal composite of identity cells is the identity cell on
        // the composite.
        let i1 = d.identity_cell(&r);
        let i2 = d.identity_cell(&s);
        let hi = d.compose_cells_h(&i1, &i2).unwrap();
        let rs = d.compose_h(&r, &s).unwrap();
        assert_eq!(hi, d.identity_cell(&rs));
    }

    #[test]
    fn double_laws_pass_on_presets() {
        for name in ["finset2", "span2", "alliso2", "chain2"] {
            let mut budget = Budget::default();
            if name == "span2" {
                // Keep the probe apexes small for the all-arrows right class.
                budget.apex_cap = 4;
            }
            let d = preset::build(name, 2, budget).unwrap();
            let rep = d.check_double_laws().unwrap();
            assert!(rep.holds(), "{name}: {:?}", rep.witness);
        }
    }

    #[test]
    fn corrupted_relation_is_caught() {
        // Negative control: a hand-forged "relation" whose pairing was never
        // canonicalized (legs swapped) breaks the unit law, and the failure
        // carries the witness.
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let honest = rel_of_pairs(&d, two, two, &[(0, 1)]);
        let corrupt = MRelation {
            left: honest.right,
            right: honest.left,
            ..honest.clone()
        };
        let unit = d.unit_h(two).unwrap();
        let composed = d.compose_h(&unit, &corrupt).unwrap();
        assert_ne!(composed, corrupt, "law checker must not accept a swapped span");
    }

    #[test]
    fn preord_hom_enumeration_is_embedded_subpreorders() {
        let d = preset::build("preord2", 2, Budget::default()).unwrap();
        // Chain × chain has a 4-element product; every subset is an
        // embedded sub-preorder, 16 relations.
        let chain = d
            .cat
            .finpreord_obj(2, vec![true, true, false, true])
            .unwrap();
        assert_eq!(d.hom_rel(chain, chain).unwrap().len(), 16);
    }
}
