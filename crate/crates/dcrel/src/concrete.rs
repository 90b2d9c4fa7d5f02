//! Structural backends: finite sets with functions and finite preorders with
//! monotone maps. Limits are computed set-theoretically rather than searched,
//! so every returned cone is a limit by construction; the generic oracle in
//! [`crate::limits`] re-verifies them in tests instead of being trusted.

use crate::basecat::{BackendKind, Category, MorPayload, ObjData, ObjRef, MorRef, Registry};
use crate::error::{Error, Result};

impl Category {
    /// The finite set `{0, …, size-1}`.
    pub fn finset_obj(&self, size: usize) -> Result<ObjRef> {
        let mut reg = self.write();
        if reg.backend != BackendKind::FinSet {
            return Err(Error::Unsupported("finset_obj on non-FinSet backend".into()));
        }
        Ok(reg.add_obj(ObjData::FinSet { size }))
    }

    /// Register a function by its element table.
    pub fn finset_mor(&self, dom: ObjRef, cod: ObjRef, table: Vec<usize>) -> Result<MorRef> {
        let mut reg = self.write();
        if reg.backend != BackendKind::FinSet {
            return Err(Error::Unsupported("finset_mor on non-FinSet backend".into()));
        }
        check_table(&reg, dom, cod, &table)?;
        Ok(reg.add_mor(dom, cod, MorPayload::Map(table)))
    }

    /// A preorder on `{0, …, size-1}` from its row-major `leq` matrix.
    pub fn finpreord_obj(&self, size: usize, leq: Vec<bool>) -> Result<ObjRef> {
        let mut reg = self.write();
        if reg.backend != BackendKind::FinPreord {
            return Err(Error::Unsupported(
                "finpreord_obj on non-FinPreord backend".into(),
            ));
        }
        if leq.len() != size * size {
            return Err(Error::IllFormed("leq matrix has wrong shape".into()));
        }
        for i in 0..size {
            if !leq[i * size + i] {
                return Err(Error::IllFormed(format!("leq not reflexive at {i}")));
            }
            for j in 0..size {
                for k in 0..size {
                    if leq[i * size + j] && leq[j * size + k] && !leq[i * size + k] {
                        return Err(Error::IllFormed(format!(
                            "leq not transitive at {i}<={j}<={k}"
                        )));
                    }
                }
            }
        }
        Ok(reg.add_obj(ObjData::FinPreord { size, leq }))
    }

    /// Register a monotone map by its element table.
    pub fn finpreord_mor(&self, dom: ObjRef, cod: ObjRef, table: Vec<usize>) -> Result<MorRef> {
        let mut reg = self.write();
        if reg.backend != BackendKind::FinPreord {
            return Err(Error::Unsupported(
                "finpreord_mor on non-FinPreord backend".into(),
            ));
        }
        check_table(&reg, dom, cod, &table)?;
        if !reg.monotone(dom, cod, &table) {
            return Err(Error::IllFormed(format!(
                "map {table:?} is not monotone from {} to {}",
                reg.obj_label(dom),
                reg.obj_label(cod)
            )));
        }
        Ok(reg.add_mor(dom, cod, MorPayload::Map(table)))
    }
}

fn check_table(reg: &Registry, dom: ObjRef, cod: ObjRef, table: &[usize]) -> Result<()> {
    let (nd, nc) = (reg.obj(dom).size(), reg.obj(cod).size());
    if table.len() != nd {
        return Err(Error::IllFormed(format!(
            "map table has {} entries, domain has {nd}",
            table.len()
        )));
    }
    if let Some(&v) = table.iter().find(|&&v| v >= nc) {
        return Err(Error::IllFormed(format!(
            "map value {v} out of range for codomain of size {nc}"
        )));
    }
    Ok(())
}

// ---- structural limits on the registry ----

/// Apex element of a binary product, in lexicographic order.
pub(crate) fn pair_index(nb: usize, x: usize, y: usize) -> usize {
    x * nb + y
}

pub(crate) fn terminal_obj(reg: &mut Registry) -> ObjRef {
    match reg.backend {
        BackendKind::FinSet => reg.add_obj(ObjData::FinSet { size: 1 }),
        BackendKind::FinPreord => reg.add_obj(ObjData::FinPreord {
            size: 1,
            leq: vec![true],
        }),
        BackendKind::Table => unreachable!("structural terminal on table backend"),
    }
}

/// Chosen product `a × b` with lexicographic element order; returns
/// `(apex, proj1, proj2)`.
pub(crate) fn product(reg: &mut Registry, a: ObjRef, b: ObjRef) -> (ObjRef, MorRef, MorRef) {
    let (na, nb) = (reg.obj(a).size(), reg.obj(b).size());
    let n = na * nb;
    let apex = match reg.backend {
        BackendKind::FinSet => reg.add_obj(ObjData::FinSet { size: n }),
        BackendKind::FinPreord => {
            let mut leq = vec![false; n * n];
            for x1 in 0..na {
                for y1 in 0..nb {
                    for x2 in 0..na {
                        for y2 in 0..nb {
                            let i = pair_index(nb, x1, y1);
                            let j = pair_index(nb, x2, y2);
                            leq[i * n + j] = reg.obj(a).leq(x1, x2) && reg.obj(b).leq(y1, y2);
                        }
                    }
                }
            }
            reg.add_obj(ObjData::FinPreord { size: n, leq })
        }
        BackendKind::Table => unreachable!("structural product on table backend"),
    };
    let p1: Vec<usize> = (0..n).map(|i| i / nb.max(1)).collect();
    let p2: Vec<usize> = (0..n).map(|i| i % nb.max(1)).collect();
    let proj1 = reg.add_mor(apex, a, MorPayload::Map(p1));
    let proj2 = reg.add_mor(apex, b, MorPayload::Map(p2));
    (apex, proj1, proj2)
}

/// A subobject of `parent` given by a strictly increasing element list;
/// the apex carries the induced structure. Returns `(apex, inclusion)`.
pub(crate) fn subobject(reg: &mut Registry, parent: ObjRef, elems: &[usize]) -> (ObjRef, MorRef) {
    let k = elems.len();
    let apex = match reg.backend {
        BackendKind::FinSet => reg.add_obj(ObjData::FinSet { size: k }),
        BackendKind::FinPreord => {
            let mut leq = vec![false; k * k];
            for (i, &x) in elems.iter().enumerate() {
                for (j, &y) in elems.iter().enumerate() {
                    leq[i * k + j] = reg.obj(parent).leq(x, y);
                }
            }
            reg.add_obj(ObjData::FinPreord { size: k, leq })
        }
        BackendKind::Table => unreachable!("structural subobject on table backend"),
    };
    let inc = reg.add_mor(apex, parent, MorPayload::Map(elems.to_vec()));
    (apex, inc)
}

/// Pullback of the cospan `f: A -> C <- B : g`; returns `(apex, to_a, to_b)`.
/// Elements are the pairs with equal images, ordered lexicographically.
pub(crate) fn pullback(reg: &mut Registry, f: MorRef, g: MorRef) -> (ObjRef, MorRef, MorRef) {
    let (a, b) = (reg.mor(f).dom, reg.mor(g).dom);
    let (fm, gm) = (reg.map_of(f).to_vec(), reg.map_of(g).to_vec());
    let nb = reg.obj(b).size();
    let mut elems = Vec::new();
    for (x, &fx) in fm.iter().enumerate() {
        for (y, &gy) in gm.iter().enumerate() {
            if fx == gy {
                elems.push(pair_index(nb, x, y));
            }
        }
    }
    elems.sort_unstable();
    let (prod, p1, p2) = product(reg, a, b);
    let (apex, inc) = subobject(reg, prod, &elems);
    let to_a = reg.compose(inc, p1).expect("pullback leg");
    let to_b = reg.compose(inc, p2).expect("pullback leg");
    let _ = prod;
    (apex, to_a, to_b)
}

/// Equalizer of the parallel pair `f, g: A -> B`; returns `(apex, inclusion)`.
pub(crate) fn equalizer(reg: &mut Registry, f: MorRef, g: MorRef) -> (ObjRef, MorRef) {
    let a = reg.mor(f).dom;
    let (fm, gm) = (reg.map_of(f).to_vec(), reg.map_of(g).to_vec());
    let elems: Vec<usize> = (0..reg.obj(a).size()).filter(|&x| fm[x] == gm[x]).collect();
    subobject(reg, a, &elems)
}

/// Regular epimorphisms decided structurally.
///
/// In finite sets every surjection coequalises its kernel pair. In finite
/// preorders a surjection is a regular epi exactly when the codomain order is
/// generated by the image of the domain order: the quotient order.
pub fn regular_epi_concrete(cat: &Category, f: MorRef) -> Result<bool> {
    let reg = cat.read();
    match reg.backend {
        BackendKind::FinSet | BackendKind::FinPreord => {}
        BackendKind::Table => {
            return Err(Error::Unsupported(
                "regular_epi_concrete on table backend".into(),
            ))
        }
    }
    let d = reg.mor(f);
    let map = reg.map_of(f);
    let nc = reg.obj(d.cod).size();
    let mut hit = vec![false; nc];
    for &v in map {
        hit[v] = true;
    }
    if !hit.iter().all(|&b| b) {
        return Ok(false);
    }
    if reg.backend == BackendKind::FinSet {
        return Ok(true);
    }
    // Reflexive-transitive closure of the pushed-forward domain order.
    let nd = reg.obj(d.dom).size();
    let mut gen = vec![false; nc * nc];
    for i in 0..nc {
        gen[i * nc + i] = true;
    }
    for x in 0..nd {
        for y in 0..nd {
            if reg.obj(d.dom).leq(x, y) {
                gen[map[x] * nc + map[y]] = true;
            }
        }
    }
    loop {
        let mut changed = false;
        for i in 0..nc {
            for j in 0..nc {
                if !gen[i * nc + j] {
                    continue;
                }
                for k in 0..nc {
                    if gen[j * nc + k] && !gen[i * nc + k] {
                        gen[i * nc + k] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..nc {
        for j in 0..nc {
            if gen[i * nc + j] != reg.obj(d.cod).leq(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The five preorders on at most two elements: empty, point, discrete pair,
/// chain, codiscrete pair. These are the default carriers of the FinPreord
/// preset.
pub fn small_preorders(cat: &Category) -> Result<Vec<ObjRef>> {
    Ok(vec![
        cat.finpreord_obj(0, vec![])?,
        cat.finpreord_obj(1, vec![true])?,
        cat.finpreord_obj(2, vec![true, false, false, true])?,
        cat.finpreord_obj(2, vec![true, true, false, true])?,
        cat.finpreord_obj(2, vec![true, true, true, true])?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;

    #[test]
    fn product_sizes_and_orders() {
        let cat = Category::finset(Budget::default());
        let two = cat.finset_obj(2).unwrap();
        let three = cat.finset_obj(3).unwrap();
        let mut reg = cat.write();
        let (p, _, _) = product(&mut reg, two, three);
        assert_eq!(reg.obj(p).size(), 6);
        drop(reg);

        let pcat = Category::finpreord(Budget::default());
        let chain = pcat.finpreord_obj(2, vec![true, true, false, true]).unwrap();
        let mut reg = pcat.write();
        let (p, _, _) = product(&mut reg, chain, chain);
        assert_eq!(reg.obj(p).size(), 4);
        // Componentwise order: related pairs counted by brute force.
        let mut related = 0;
        for i in 0..4 {
            for j in 0..4 {
                if reg.obj(p).leq(i, j) {
                    related += 1;
                }
            }
        }
        assert_eq!(related, 9);
    }

    #[test]
    fn kernel_pair_of_constant_map_has_four_elements() {
        let cat = Category::finset(Budget::default());
        let two = cat.finset_obj(2).unwrap();
        let one = cat.finset_obj(1).unwrap();
        let c = cat.finset_mor(two, one, vec![0, 0]).unwrap();
        let mut reg = cat.write();
        let (apex, _, _) = pullback(&mut reg, c, c);
        assert_eq!(reg.obj(apex).size(), 4);
    }

    #[test]
    fn swap_composes_to_identity() {
        let cat = Category::finset(Budget::default());
        let two = cat.finset_obj(2).unwrap();
        let swap = cat.finset_mor(two, two, vec![1, 0]).unwrap();
        let sq = cat.compose(swap, swap).unwrap();
        assert!(cat.is_identity(sq));
    }

    #[test]
    fn out_of_range_value_is_rejected() {
        let cat = Category::finset(Budget::default());
        let two = cat.finset_obj(2).unwrap();
        let one = cat.finset_obj(1).unwrap();
        assert!(cat.finset_mor(two, one, vec![0, 1]).is_err());
    }

    #[test]
    fn regular_epi_classification() {
        let cat = Category::finset(Budget::default());
        let two = cat.finset_obj(2).unwrap();
        let one = cat.finset_obj(1).unwrap();
        let surj = cat.finset_mor(two, one, vec![0, 0]).unwrap();
        assert!(regular_epi_concrete(&cat, surj).unwrap());
        let id = cat.identity(two);
        assert!(regular_epi_concrete(&cat, id).unwrap());

        let pcat = Category::finpreord(Budget::default());
        let disc = pcat
            .finpreord_obj(2, vec![true, false, false, true])
            .unwrap();
        let chain = pcat.finpreord_obj(2, vec![true, true, false, true]).unwrap();
        let m = pcat.finpreord_mor(disc, chain, vec![0, 1]).unwrap();
        // Surjective, but the chain order is not generated by the discrete
        // image: the coequalizer of the kernel pair is the discrete pair.
        assert!(!regular_epi_concrete(&pcat, m).unwrap());
        // The injective bijection chain -> codiscrete is likewise surjective
        // but not regular: its kernel pair is the diagonal, whose coequalizer
        // keeps the chain order.
        let codisc = pcat.finpreord_obj(2, vec![true; 4]).unwrap();
        let q = pcat.finpreord_mor(chain, codisc, vec![0, 1]).unwrap();
        assert!(!regular_epi_concrete(&pcat, q).unwrap());
        // A genuine quotient: collapsing the codiscrete pair to the point.
        let point = pcat.finpreord_obj(1, vec![true]).unwrap();
        let collapse = pcat.finpreord_mor(codisc, point, vec![0, 0]).unwrap();
        assert!(regular_epi_concrete(&pcat, collapse).unwrap());
    }

    #[test]
    fn equalizer_is_fixed_point_subset() {
        let cat = Category::finset(Budget::default());
        let three = cat.finset_obj(3).unwrap();
        let f = cat.finset_mor(three, three, vec![0, 2, 2]).unwrap();
        let id = cat.identity(three);
        let mut reg = cat.write();
        let (apex, inc) = equalizer(&mut reg, f, id);
        assert_eq!(reg.obj(apex).size(), 2);
        assert_eq!(reg.map_of(inc), &[0, 2]);
    }
}
