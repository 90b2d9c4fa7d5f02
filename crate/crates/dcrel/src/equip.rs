//! Equipment structure on a built instance: companions, conjoints,
//! restriction and extension with their (op)cartesian cells, recognition of
//! (op)cartesian cells by the structural criteria with an optional
//! brute-force universal-property oracle, tabulators, local products, the
//! self-dual data of discrete objects, the dagger, and cell tilting between
//! two-sided and left-sided presentations.

use crate::basecat::{MorRef, ObjRef};
use crate::error::{Error, Result};
use crate::limits::{factor_through, is_limit_cone_over, ConeData, LimitDiagram};
use crate::reldbl::{MRelation, RelCell, RelDouble, TriangleCell};

/// Structural verdict plus the optional oracle verdict. When both are
/// computed they must agree; disagreement is escalated, never averaged.
#[derive(Debug, Clone)]
pub struct RecognitionVerdict {
    pub structural: bool,
    pub oracle: Option<bool>,
    pub probes: String,
}

impl RecognitionVerdict {
    pub fn agree(&self) -> bool {
        self.oracle.map_or(true, |o| o == self.structural)
    }

    pub fn holds(&self) -> Result<bool> {
        if !self.agree() {
            return Err(Error::Inconsistency(format!(
                "structural verdict {} disagrees with oracle {:?} ({})",
                self.structural, self.oracle, self.probes
            )));
        }
        Ok(self.structural)
    }
}

/// The oracle is a cross-check; when its enumeration would bust the budget
/// it is skipped rather than failing the whole run. The structural verdict
/// always stands on its own.
fn soften_budget(r: Result<bool>) -> Result<Option<bool>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

impl RelDouble {
    // ---- companions and conjoints ----

    /// The companion `f_!`: the M-image of the graph `⟨id, f⟩`.
    pub fn companion(&self, f: MorRef) -> Result<MRelation> {
        let id = self.cat.identity(self.cat.dom(f));
        Ok(self.canonicalize(id, f)?.rel)
    }

    /// The conjoint `f^*`: the M-image of `⟨f, id⟩`.
    pub fn conjoint(&self, f: MorRef) -> Result<MRelation> {
        let id = self.cat.identity(self.cat.dom(f));
        Ok(self.canonicalize(f, id)?.rel)
    }

    /// Unit triangle of the companion: apex `X`, legs `(id, f)`.
    pub fn companion_unit(&self, f: MorRef) -> Result<TriangleCell> {
        let id = self.cat.identity(self.cat.dom(f));
        let c = self.canonicalize(id, f)?;
        Ok(TriangleCell {
            apex_obj: self.cat.dom(f),
            f: id,
            g: f,
            target: c.rel,
            alpha: c.comparison,
        })
    }

    /// Counit cell `f_! → Id_Y` framed by `(f, id)`.
    pub fn companion_counit(&self, f: MorRef) -> Result<RelCell> {
        let cat = &*self.cat;
        let y = cat.cod(f);
        let id_y = cat.identity(y);
        let comp = self.canonicalize(cat.identity(cat.dom(f)), f)?;
        let unit = self.unit_comparison(y)?;
        let fid = self.product_map(f, id_y)?;
        let alpha = self.orth_filler(
            comp.comparison,
            unit.rel.pairing,
            cat.compose(f, unit.comparison)?,
            cat.compose(comp.rel.pairing, fid)?,
        )?;
        Ok(RelCell {
            top: comp.rel,
            bottom: unit.rel,
            f,
            g: id_y,
            alpha,
        })
    }

    /// Unit triangle of the conjoint: apex `X`, legs `(f, id)`.
    pub fn conjoint_unit(&self, f: MorRef) -> Result<TriangleCell> {
        let id = self.cat.identity(self.cat.dom(f));
        let c = self.canonicalize(f, id)?;
        Ok(TriangleCell {
            apex_obj: self.cat.dom(f),
            f,
            g: id,
            target: c.rel,
            alpha: c.comparison,
        })
    }

    /// Counit cell `f^* → Id_Y` framed by `(id, f)`.
    pub fn conjoint_counit(&self, f: MorRef) -> Result<RelCell> {
        let cat = &*self.cat;
        let y = cat.cod(f);
        let id_y = cat.identity(y);
        let conj = self.canonicalize(f, cat.identity(cat.dom(f)))?;
        let unit = self.unit_comparison(y)?;
        let idf = self.product_map(id_y, f)?;
        let alpha = self.orth_filler(
            conj.comparison,
            unit.rel.pairing,
            cat.compose(f, unit.comparison)?,
            cat.compose(conj.rel.pairing, idf)?,
        )?;
        Ok(RelCell {
            top: conj.rel,
            bottom: unit.rel,
            f: id_y,
            g: f,
            alpha,
        })
    }

    /// Horizontal composite of a triangle (0-length top path) with a cell
    /// whose left frame matches the triangle's right leg: the result is an
    /// ordinary cell `c.top → t.target ⊙ c.bottom`.
    pub fn paste_triangle_cell(&self, t: &TriangleCell, c: &RelCell) -> Result<RelCell> {
        if c.top.src != t.apex_obj || c.f != t.g {
            return Err(Error::IllFormed("paste_triangle_cell: typing".into()));
        }
        let cat = &*self.cat;
        let (rel, cmp, cone) = self.compose_h_full(&t.target, &c.bottom)?;
        let u = factor_through(
            &self.cat,
            &cone,
            &[
                cat.compose(c.top.left, t.alpha)?,
                c.alpha,
            ],
        )?;
        let cell = RelCell {
            top: c.top.clone(),
            bottom: rel,
            f: t.f,
            g: c.g,
            alpha: cat.compose(u, cmp)?,
        };
        if !self.cell_is_valid(&cell)? {
            return Err(Error::Inconsistency(
                "paste_triangle_cell: composite fails its square".into(),
            ));
        }
        Ok(cell)
    }

    /// Vertical composite of a triangle with a cell under it.
    pub fn triangle_then_cell(&self, t: &TriangleCell, c: &RelCell) -> Result<TriangleCell> {
        if c.top != t.target {
            return Err(Error::IllFormed("triangle_then_cell: typing".into()));
        }
        let cat = &*self.cat;
        Ok(TriangleCell {
            apex_obj: t.apex_obj,
            f: cat.compose(t.f, c.f)?,
            g: cat.compose(t.g, c.g)?,
            target: c.bottom.clone(),
            alpha: cat.compose(t.alpha, c.alpha)?,
        })
    }

    /// The four defining equations of the companion/conjoint cells for `f`.
    pub fn check_companion_conjoint(&self, f: MorRef) -> Result<Option<String>> {
        let cat = &*self.cat;
        let (x, y) = (cat.dom(f), cat.cod(f));
        let p = self.companion(f)?;
        let label = cat.mor_label(f);

        // Companion: pasting the unit triangle beside the counit is the
        // identity cell on f_!; stacking them is the identity triangle of f.
        let beta = self.companion_unit(f)?;
        let alpha = self.companion_counit(f)?;
        let side = self.paste_triangle_cell(&beta, &alpha)?;
        if side != self.identity_cell(&p) {
            return Ok(Some(format!("companion horizontal equation fails at {label}")));
        }
        let beta_cell = self.triangle_to_unit_cell(&beta)?;
        let stacked = self.compose_cells_v(&beta_cell, &alpha)?;
        let expect = {
            let unit_y = self.unit_comparison(y)?;
            let unit_x = self.unit_comparison(x)?;
            RelCell {
                top: unit_x.rel.clone(),
                bottom: unit_y.rel.clone(),
                f,
                g: f,
                alpha: self.orth_filler(
                    unit_x.comparison,
                    unit_y.rel.pairing,
                    cat.compose(f, unit_y.comparison)?,
                    cat.compose(unit_x.rel.pairing, self.product_map(f, f)?)?,
                )?,
            }
        };
        if stacked != expect {
            return Ok(Some(format!("companion vertical equation fails at {label}")));
        }

        // Conjoint equations, mirrored.
        let q = self.conjoint(f)?;
        let delta = self.conjoint_unit(f)?;
        let gamma = self.conjoint_counit(f)?;
        let delta_cell = self.triangle_to_unit_cell(&delta)?;
        // Horizontal: the conjoint counit beside the unit triangle.
        let side = self.paste_cell_triangle(&gamma, &delta)?;
        if side != self.identity_cell(&q) {
            return Ok(Some(format!("conjoint horizontal equation fails at {label}")));
        }
        let stacked = self.compose_cells_v(&delta_cell, &gamma)?;
        if stacked != expect {
            return Ok(Some(format!("conjoint vertical equation fails at {label}")));
        }
        Ok(None)
    }

    /// Horizontal composite of a cell with a triangle on its right.
    pub fn paste_cell_triangle(&self, c: &RelCell, t: &TriangleCell) -> Result<RelCell> {
        if c.top.tgt != t.apex_obj || c.g != t.f {
            return Err(Error::IllFormed("paste_cell_triangle: typing".into()));
        }
        let cat = &*self.cat;
        let (rel, cmp, cone) = self.compose_h_full(&c.bottom, &t.target)?;
        let u = factor_through(
            &self.cat,
            &cone,
            &[c.alpha, cat.compose(c.top.right, t.alpha)?],
        )?;
        let cell = RelCell {
            top: c.top.clone(),
            bottom: rel,
            f: c.f,
            g: t.g,
            alpha: cat.compose(u, cmp)?,
        };
        if !self.cell_is_valid(&cell)? {
            return Err(Error::Inconsistency(
                "paste_cell_triangle: composite fails its square".into(),
            ));
        }
        Ok(cell)
    }

    /// Unit and counit of the representable adjunction `f_! ⊣ f^*`.
    pub fn representable_adjunction(&self, f: MorRef) -> Result<(RelCell, RelCell)> {
        let beta = self.triangle_to_unit_cell(&self.companion_unit(f)?)?;
        let delta = self.triangle_to_unit_cell(&self.conjoint_unit(f)?)?;
        let eta = self.compose_cells_h(&beta, &delta)?;
        let gamma = self.conjoint_counit(f)?;
        let alpha = self.companion_counit(f)?;
        let eps = self.compose_cells_h(&gamma, &alpha)?;
        Ok((eta, eps))
    }

    /// Both triangle identities for a candidate adjunction
    /// `eta: Id_A → p⊙q`, `eps: q⊙p → Id_B` (identity frames).
    pub fn check_adjunction(
        &self,
        p: &MRelation,
        q: &MRelation,
        eta: &RelCell,
        eps: &RelCell,
    ) -> Result<bool> {
        let pq = self.compose_h(p, q)?;
        let qp = self.compose_h(q, p)?;
        let unit_a = self.unit_h(p.src)?;
        let unit_b = self.unit_h(p.tgt)?;
        if eta.top != unit_a
            || eta.bottom != pq
            || eps.top != qp
            || eps.bottom != unit_b
            || !self.cell_is_valid(eta)?
            || !self.cell_is_valid(eps)?
        {
            return Ok(false);
        }
        let cat = &*self.cat;
        if !cat.is_identity(eta.f)
            || !cat.is_identity(eta.g)
            || !cat.is_identity(eps.f)
            || !cat.is_identity(eps.g)
        {
            return Ok(false);
        }
        // (η | 1_p) ; α ; (1_p | ε) = 1_p, with the associator
        // (p⊙q)⊙p → p⊙(q⊙p) inserted between the two pastings.
        let first = self.compose_cells_h(eta, &self.identity_cell(p))?;
        let second = self.compose_cells_h(&self.identity_cell(p), eps)?;
        if first.bottom != second.top {
            return Ok(false);
        }
        let mid = RelCell {
            top: first.bottom.clone(),
            bottom: second.top.clone(),
            f: cat.identity(p.src),
            g: cat.identity(p.tgt),
            alpha: self.associator(p, q, p)?,
        };
        let composite = self.compose_cells_v(&self.compose_cells_v(&first, &mid)?, &second)?;
        if composite != self.identity_cell(p) {
            return Ok(false);
        }
        // (1_q | η) ; α⁻¹ ; (ε | 1_q) = 1_q
        let first = self.compose_cells_h(&self.identity_cell(q), eta)?;
        let second = self.compose_cells_h(eps, &self.identity_cell(q))?;
        if first.bottom != second.top {
            return Ok(false);
        }
        let mid = RelCell {
            top: first.bottom.clone(),
            bottom: second.top.clone(),
            f: cat.identity(q.src),
            g: cat.identity(q.tgt),
            alpha: cat.inverse(self.associator(q, p, q)?)?,
        };
        let composite = self.compose_cells_v(&self.compose_cells_v(&first, &mid)?, &second)?;
        Ok(composite == self.identity_cell(q))
    }

    // ---- restriction, extension, recognition ----

    /// Restriction `p(f, g)`: pullback of the pairing along `f × g`,
    /// with its cartesian cell.
    pub fn restrict(&self, p: &MRelation, f: MorRef, g: MorRef) -> Result<(MRelation, RelCell)> {
        let cat = &*self.cat;
        if cat.cod(f) != p.src || cat.cod(g) != p.tgt {
            return Err(Error::IllFormed("restrict: typing".into()));
        }
        let fg = self.product_map(f, g)?;
        let cone = self.pullback_cone(fg, p.pairing)?;
        let pulled = cone.legs[0]; // into the chosen product of (dom f, dom g)
        if !self.in_m(pulled)? {
            return Err(Error::Inconsistency(
                "restrict: pulled-back pairing escaped M".into(),
            ));
        }
        let (rel, iso) = self.canonical_rep(pulled, cat.dom(f), cat.dom(g))?;
        let alpha = cat.compose(cat.inverse(iso)?, cone.legs[1])?;
        let cell = RelCell {
            top: rel.clone(),
            bottom: p.clone(),
            f,
            g,
            alpha,
        };
        if !self.cell_is_valid(&cell)? {
            return Err(Error::Inconsistency("restrict: cell fails its square".into()));
        }
        Ok((rel, cell))
    }

    /// Extension `Ext(q; f, g)`: M-image of `pairing ; (f × g)`, with its
    /// opcartesian cell (the E-part).
    pub fn extend(&self, q: &MRelation, f: MorRef, g: MorRef) -> Result<(MRelation, RelCell)> {
        let cat = &*self.cat;
        if cat.dom(f) != q.src || cat.dom(g) != q.tgt {
            return Err(Error::IllFormed("extend: typing".into()));
        }
        let c = self.canonicalize(cat.compose(q.left, f)?, cat.compose(q.right, g)?)?;
        let cell = RelCell {
            top: q.clone(),
            bottom: c.rel.clone(),
            f,
            g,
            alpha: c.comparison,
        };
        if !self.cell_is_valid(&cell)? {
            return Err(Error::Inconsistency("extend: cell fails its square".into()));
        }
        Ok((c.rel, cell))
    }

    /// Structural criterion: a cell is cartesian iff its defining square is
    /// a pullback of the bottom pairing along `f × g`.
    pub fn is_cartesian(&self, cell: &RelCell) -> Result<RecognitionVerdict> {
        let fg = self.product_map(cell.f, cell.g)?;
        let cone = ConeData {
            diagram: LimitDiagram::Pullback(cell.bottom.pairing, fg),
            apex: cell.top.apex,
            legs: vec![cell.alpha, cell.top.pairing],
        };
        let probes = self.probe_objects();
        let structural = is_limit_cone_over(&self.cat, &cone, &probes)?;
        let oracle = if self.budget.oracle {
            soften_budget(self.cartesian_oracle(cell))?
        } else {
            None
        };
        Ok(RecognitionVerdict {
            structural,
            oracle,
            probes: self.probe_description(),
        })
    }

    /// Structural criterion: a cell is opcartesian iff its apex morphism
    /// lies in E.
    pub fn is_opcartesian(&self, cell: &RelCell) -> Result<RecognitionVerdict> {
        let structural = self.in_e(cell.alpha)?;
        let oracle = if self.budget.oracle {
            soften_budget(self.opcartesian_oracle(cell))?
        } else {
            None
        };
        Ok(RecognitionVerdict {
            structural,
            oracle,
            probes: self.probe_description(),
        })
    }

    /// Brute-force universal property of a cartesian cell: every cell into
    /// the bottom whose frame factors through `(f, g)` factors uniquely
    /// through this cell. Quantified over carrier-framed probe cells.
    fn cartesian_oracle(&self, cell: &RelCell) -> Result<bool> {
        let cat = &*self.cat;
        for &a in &self.carriers {
            for &b in &self.carriers {
                for h in cat.hom(a, cell.top.src)? {
                    let hf = cat.compose(h, cell.f)?;
                    for k in cat.hom(b, cell.top.tgt)? {
                        let kg = cat.compose(k, cell.g)?;
                        for r in self.hom_rel(a, b)? {
                            for z in self.enumerate_cells(&r, &cell.bottom, hf, kg)? {
                                let mut count = 0;
                                for x in self.enumerate_cells(&r, &cell.top, h, k)? {
                                    if cat.compose(x.alpha, cell.alpha)? == z.alpha {
                                        count += 1;
                                    }
                                }
                                if count != 1 {
                                    return Ok(false);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Brute-force universal property of an opcartesian cell, dual to
    /// [`Self::cartesian_oracle`].
    fn opcartesian_oracle(&self, cell: &RelCell) -> Result<bool> {
        let cat = &*self.cat;
        for &a in &self.carriers {
            for &b in &self.carriers {
                for h in cat.hom(cell.bottom.src, a)? {
                    let fh = cat.compose(cell.f, h)?;
                    for k in cat.hom(cell.bottom.tgt, b)? {
                        let gk = cat.compose(cell.g, k)?;
                        for r in self.hom_rel(a, b)? {
                            for z in self.enumerate_cells(&cell.top, &r, fh, gk)? {
                                let mut count = 0;
                                for x in self.enumerate_cells(&cell.bottom, &r, h, k)? {
                                    if cat.compose(cell.alpha, x.alpha)? == z.alpha {
                                        count += 1;
                                    }
                                }
                                if count != 1 {
                                    return Ok(false);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    // ---- tabulators ----

    /// The tabulator of a relation is its own span; only universality is
    /// verified, the apex is never searched.
    pub fn tabulator(&self, p: &MRelation) -> (ObjRef, MorRef, MorRef, TriangleCell) {
        (p.apex, p.left, p.right, self.canonical_triangle(p))
    }

    /// One-dimensional universality of a triangle over the probe objects:
    /// every triangle into the target factors uniquely through it.
    pub fn is_tabulating(&self, t: &TriangleCell) -> Result<bool> {
        let cat = &*self.cat;
        for &z in &self.probe_objects() {
            let candidates = cat.hom(z, t.apex_obj)?;
            for beta in cat.hom(z, t.target.apex)? {
                let mut count = 0;
                for &u in &candidates {
                    if cat.compose(u, t.alpha)? == beta {
                        count += 1;
                    }
                }
                if count != 1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A tabulating triangle is strong when its unit-framed cell is
    /// opcartesian.
    pub fn is_strong_tabulator(&self, t: &TriangleCell) -> Result<RecognitionVerdict> {
        let cell = self.triangle_to_unit_cell(t)?;
        self.is_opcartesian(&cell)
    }

    // ---- cartesian structure ----

    /// External product of relations, living on the chosen products, with
    /// the iso from the structural product of the apexes.
    pub fn rel_product(&self, p: &MRelation, q: &MRelation) -> Result<(MRelation, MorRef)> {
        let cat = &*self.cat;
        let apex_cone = self.product_cone(p.apex, q.apex)?;
        let src_cone = self.product_cone(p.src, q.src)?;
        let tgt_cone = self.product_cone(p.tgt, q.tgt)?;
        let l = factor_through(
            &self.cat,
            &src_cone,
            &[
                cat.compose(apex_cone.legs[0], p.left)?,
                cat.compose(apex_cone.legs[1], q.left)?,
            ],
        )?;
        let r = factor_through(
            &self.cat,
            &tgt_cone,
            &[
                cat.compose(apex_cone.legs[0], p.right)?,
                cat.compose(apex_cone.legs[1], q.right)?,
            ],
        )?;
        let pairing = self.pairing(l, r)?;
        if !self.in_m(pairing)? {
            return Err(Error::Inconsistency(
                "rel_product: product pairing escaped M".into(),
            ));
        }
        let (rel, iso) = self.canonical_rep(pairing, cat.cod(l), cat.cod(r))?;
        Ok((rel, iso))
    }

    /// Local product `p ∧ q` of parallel relations: the restriction of
    /// `p × q` along the diagonals.
    pub fn local_product(&self, p: &MRelation, q: &MRelation) -> Result<MRelation> {
        if p.src != q.src || p.tgt != q.tgt {
            return Err(Error::IllFormed("local_product: not parallel".into()));
        }
        let cat = &*self.cat;
        let (prod, _) = self.rel_product(p, q)?;
        let delta_src = self.pairing(cat.identity(p.src), cat.identity(p.src))?;
        let delta_tgt = self.pairing(cat.identity(p.tgt), cat.identity(p.tgt))?;
        Ok(self.restrict(&prod, delta_src, delta_tgt)?.0)
    }

    /// Local terminal `⊤: A ⇸ B`: the restriction of `Id_1` along the
    /// unique arrows.
    pub fn local_terminal(&self, a: ObjRef, b: ObjRef) -> Result<MRelation> {
        let unit = self.unit_h(self.terminal)?;
        Ok(self.restrict(&unit, self.bang(a)?, self.bang(b)?)?.0)
    }

    // ---- self-duals, dagger, tilting ----

    pub fn require_discrete(&self) -> Result<()> {
        match *self.discrete.read().expect("discrete flag") {
            Some(true) => Ok(()),
            Some(false) => Err(Error::Unverified(
                "instance verified non-discrete; dagger/tilt unavailable".into(),
            )),
            None => Err(Error::Unverified(
                "discreteness unchecked; run the discreteness checker first".into(),
            )),
        }
    }

    pub(crate) fn set_discrete(&self, value: bool) {
        *self.discrete.write().expect("discrete flag") = Some(value);
    }

    /// `η_X: 1 ⇸ X×X`, the image of `⟨!, Δ⟩`, and its comparison from `X`.
    pub fn eta_rel(&self, x: ObjRef) -> Result<crate::reldbl::Canonicalized> {
        self.require_discrete()?;
        let cat = &*self.cat;
        let delta = self.pairing(cat.identity(x), cat.identity(x))?;
        self.canonicalize(self.bang(x)?, delta)
    }

    /// `ε_X: X×X ⇸ 1`, the image of `⟨Δ, !⟩`.
    pub fn epsilon_rel(&self, x: ObjRef) -> Result<crate::reldbl::Canonicalized> {
        self.require_discrete()?;
        let cat = &*self.cat;
        let delta = self.pairing(cat.identity(x), cat.identity(x))?;
        self.canonicalize(delta, self.bang(x)?)
    }

    /// Dagger by leg swap, the canonical transpose.
    pub fn dagger(&self, p: &MRelation) -> Result<MRelation> {
        self.require_discrete()?;
        Ok(self.canonicalize(p.right, p.left)?.rel)
    }

    /// Dagger through the self-dual data:
    /// `(Id_Y ⊗ η_X) ⊙ (Id_Y ⊗ p ⊗ Id_X) ⊙ (ε_Y ⊗ Id_X)`. Requires the
    /// chosen products to be associative on the nose, which holds on the
    /// structural backends and on poset tables.
    pub fn dagger_via_duality(&self, p: &MRelation) -> Result<MRelation> {
        self.require_discrete()?;
        let (x, y) = (p.src, p.tgt);
        let unit_y = self.unit_h(y)?;
        let unit_x = self.unit_h(x)?;
        let (s1, _) = self.rel_product(&unit_y, &self.eta_rel(x)?.rel)?;
        let (pid, _) = self.rel_product(p, &unit_x)?;
        let (s2, _) = self.rel_product(&unit_y, &pid)?;
        let (s3, _) = self.rel_product(&self.epsilon_rel(y)?.rel, &unit_x)?;
        if s1.src != y || s1.tgt != s2.src || s2.tgt != s3.src || s3.tgt != x {
            return Err(Error::Unsupported(
                "dagger_via_duality needs on-the-nose product coherence on this backend".into(),
            ));
        }
        self.compose_h_path(&[s1, s2, s3])
    }

    /// Tilt a triangle over `(f, g)` into `p: X ⇸ Y` to the corresponding
    /// left-sided triangle over `(⟨f,g⟩, !)` into
    /// `p̄ = (p ⊗ Id_Y) ⊙ ε_Y`.
    pub fn tilt(&self, t: &TriangleCell) -> Result<TriangleCell> {
        self.require_discrete()?;
        let cat = &*self.cat;
        let y = t.target.tgt;
        let unit_y = self.unit_comparison(y)?;
        let eps_y = self.epsilon_rel(y)?;

        let (pid, iso) = self.rel_product(&t.target, &unit_y.rel)?;
        let apex_cone = self.product_cone(t.target.apex, unit_y.rel.apex)?;
        let u = factor_through(
            &self.cat,
            &apex_cone,
            &[t.alpha, cat.compose(t.g, unit_y.comparison)?],
        )?;
        let t_a = TriangleCell {
            apex_obj: t.apex_obj,
            f: self.pairing(t.f, t.g)?,
            g: self.pairing(t.g, t.g)?,
            target: pid,
            alpha: cat.compose(u, iso)?,
        };
        let t_b = TriangleCell {
            apex_obj: t.apex_obj,
            f: self.pairing(t.g, t.g)?,
            g: self.bang(t.apex_obj)?,
            target: eps_y.rel,
            alpha: cat.compose(t.g, eps_y.comparison)?,
        };
        if !self.triangle_is_valid(&t_a)? || !self.triangle_is_valid(&t_b)? {
            return Err(Error::Inconsistency("tilt: malformed component triangle".into()));
        }
        self.paste_triangles(&t_a, &t_b)
    }

    /// The left-sided relation corresponding to `p`, as produced by
    /// [`Self::tilt`].
    pub fn tilt_rel(&self, p: &MRelation) -> Result<MRelation> {
        Ok(self.tilt(&self.canonical_triangle(p))?.target)
    }

    /// Inverse tilt: a left-sided triangle over `(h, !)` into `p̄` becomes a
    /// triangle over `(h;π1, h;π2)` into `(Id_X ⊗ η_Y) ⊙ (p̄ ⊗ Id_Y)`.
    pub fn untilt(&self, t: &TriangleCell, x: ObjRef, y: ObjRef) -> Result<TriangleCell> {
        self.require_discrete()?;
        let cat = &*self.cat;
        let src_cone = self.product_cone(x, y)?;
        let h = t.f;
        if cat.cod(h) != src_cone.apex {
            return Err(Error::IllFormed("untilt: triangle is not left-sided over X×Y".into()));
        }
        let h1 = cat.compose(h, src_cone.legs[0])?;
        let h2 = cat.compose(h, src_cone.legs[1])?;
        let unit_x = self.unit_comparison(x)?;
        let unit_y = self.unit_comparison(y)?;
        let eta_y = self.eta_rel(y)?;

        let (s1, iso1) = self.rel_product(&unit_x.rel, &eta_y.rel)?;
        let cone1 = self.product_cone(unit_x.rel.apex, eta_y.rel.apex)?;
        let u1 = factor_through(
            &self.cat,
            &cone1,
            &[
                cat.compose(h1, unit_x.comparison)?,
                cat.compose(h2, eta_y.comparison)?,
            ],
        )?;
        let t_1 = TriangleCell {
            apex_obj: t.apex_obj,
            f: self.pairing(h1, self.bang(t.apex_obj)?)?,
            g: self.pairing(h1, self.pairing(h2, h2)?)?,
            target: s1,
            alpha: cat.compose(u1, iso1)?,
        };

        let (s2, iso2) = self.rel_product(&t.target, &unit_y.rel)?;
        let cone2 = self.product_cone(t.target.apex, unit_y.rel.apex)?;
        let u2 = factor_through(
            &self.cat,
            &cone2,
            &[t.alpha, cat.compose(h2, unit_y.comparison)?],
        )?;
        let t_2 = TriangleCell {
            apex_obj: t.apex_obj,
            f: self.pairing(h, h2)?,
            g: self.pairing(t.g, h2)?,
            target: s2,
            alpha: cat.compose(u2, iso2)?,
        };
        if !self.triangle_is_valid(&t_1)? || !self.triangle_is_valid(&t_2)? {
            return Err(Error::Inconsistency("untilt: malformed component triangle".into()));
        }
        let pasted = self.paste_triangles(&t_1, &t_2)?;
        // Source legs must simplify: ⟨h1, !⟩ against X×1 = X.
        let cat = &*self.cat;
        Ok(TriangleCell {
            apex_obj: pasted.apex_obj,
            f: cat.compose(pasted.alpha, pasted.target.left)?,
            g: cat.compose(pasted.alpha, pasted.target.right)?,
            target: pasted.target.clone(),
            alpha: pasted.alpha,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::preset;
    use crate::reldbl::RelDouble;

    fn pairs_of(d: &RelDouble, r: &crate::reldbl::MRelation) -> Vec<(usize, usize)> {
        let nb = d.cat.obj_size(r.tgt);
        d.cat
            .map_of(r.pairing)
            .unwrap()
            .iter()
            .map(|&v| (v / nb, v % nb))
            .collect()
    }

    fn rel_of_pairs(
        d: &RelDouble,
        a: crate::basecat::ObjRef,
        b: crate::basecat::ObjRef,
        pairs: &[(usize, usize)],
    ) -> crate::reldbl::MRelation {
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

    #[test]
    fn companions_are_graphs() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let one = d.cat.finset_obj(1).unwrap();
        let f = d.cat.finset_mor(two, one, vec![0, 0]).unwrap();
        let comp = d.companion(f).unwrap();
        assert_eq!(pairs_of(&d, &comp), vec![(0, 0), (1, 0)]);
        let conj = d.conjoint(f).unwrap();
        assert_eq!(pairs_of(&d, &conj), vec![(0, 0), (0, 1)]);

        let id2 = d.cat.identity(two);
        assert_eq!(d.companion(id2).unwrap(), d.unit_h(two).unwrap());
        assert_eq!(d.conjoint(id2).unwrap(), d.unit_h(two).unwrap());
    }

    #[test]
    fn companion_functoriality_on_probes() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        for f in d.probe_verticals().unwrap() {
            for g in d.probe_verticals().unwrap() {
                if d.cat.cod(f) != d.cat.dom(g) {
                    continue;
                }
                let fg = d.cat.compose(f, g).unwrap();
                let lhs = d.companion(fg).unwrap();
                let rhs = d
                    .compose_h(&d.companion(f).unwrap(), &d.companion(g).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn companion_conjoint_equations_hold() {
        for name in ["finset2", "span2", "alliso2", "preord2", "chain2"] {
            let d = preset::build(name, 2, Budget::default()).unwrap();
            for f in d.probe_verticals().unwrap() {
                let w = d.check_companion_conjoint(f).unwrap();
                assert!(w.is_none(), "{name}: {:?}", w);
            }
        }
    }

    #[test]
    fn representable_adjunction_triangle_identities() {
        for name in ["finset2", "preord2"] {
            let d = preset::build(name, 2, Budget::default()).unwrap();
            for f in d.probe_verticals().unwrap() {
                let p = d.companion(f).unwrap();
                let q = d.conjoint(f).unwrap();
                let (eta, eps) = d.representable_adjunction(f).unwrap();
                assert!(
                    d.check_adjunction(&p, &q, &eta, &eps).unwrap(),
                    "{name}: triangle identities fail at {}",
                    d.cat.mor_label(f)
                );
            }
        }
    }

    #[test]
    fn restriction_examples() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let one = d.cat.finset_obj(1).unwrap();

        let full = rel_of_pairs(&d, two, two, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let id2 = d.cat.identity(two);
        let (same, cell) = d.restrict(&full, id2, id2).unwrap();
        assert_eq!(same, full);
        assert_eq!(cell, d.identity_cell(&full));

        // Restrict the full relation along two injections.
        let inj = d.cat.finset_mor(one, two, vec![1]).unwrap();
        let (r, cell) = d.restrict(&full, inj, inj).unwrap();
        assert_eq!(pairs_of(&d, &r), vec![(0, 0)]);
        assert!(d.is_cartesian(&cell).unwrap().holds().unwrap());

        // Restriction of the unit along (f, f) is the kernel-pair relation.
        let f = d.cat.finset_mor(two, one, vec![0, 0]).unwrap();
        let unit1 = d.unit_h(one).unwrap();
        let (kp, _) = d.restrict(&unit1, f, f).unwrap();
        assert_eq!(pairs_of(&d, &kp), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn extension_examples() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let diag = d.unit_h(two).unwrap();
        let id2 = d.cat.identity(two);
        let (same, cell) = d.extend(&diag, id2, id2).unwrap();
        assert_eq!(same, diag);
        assert_eq!(cell, d.identity_cell(&diag));

        // Extend the diagonal of [2] along (!, !): the full relation on 1,
        // with the surjection as opcartesian part.
        let bang = d.bang(two).unwrap();
        let (ext, cell) = d.extend(&diag, bang, bang).unwrap();
        assert_eq!(pairs_of(&d, &ext), vec![(0, 0)]);
        assert!(d.cat.is_epi(cell.alpha).unwrap());
        assert!(d.is_opcartesian(&cell).unwrap().holds().unwrap());

        // Cover condition: extension of the unit along (e, e) for epi e is
        // the codomain unit.
        let one = d.cat.finset_obj(1).unwrap();
        let e = d.cat.finset_mor(two, one, vec![0, 0]).unwrap();
        let (ext, _) = d.extend(&diag, e, e).unwrap();
        assert_eq!(ext, d.unit_h(one).unwrap());
        // And for a non-epi it is not.
        let m = d.cat.finset_mor(one, two, vec![0]).unwrap();
        let unit1 = d.unit_h(one).unwrap();
        let (ext, _) = d.extend(&unit1, m, m).unwrap();
        assert_ne!(ext, d.unit_h(two).unwrap());
    }

    #[test]
    fn recognition_structural_and_oracle() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let id2 = d.cat.identity(two);

        // Identity cells are cartesian and opcartesian.
        let diag = d.unit_h(two).unwrap();
        let idc = d.identity_cell(&diag);
        let cart = d.is_cartesian(&idc).unwrap();
        let opc = d.is_opcartesian(&idc).unwrap();
        assert!(cart.holds().unwrap() && opc.holds().unwrap());

        // A strict subrelation inclusion over the identity frame is neither.
        let small = rel_of_pairs(&d, two, two, &[(0, 0)]);
        let big = rel_of_pairs(&d, two, two, &[(0, 0), (1, 1)]);
        let inc = &d.enumerate_cells(&small, &big, id2, id2).unwrap()[0];
        assert!(!d.is_cartesian(inc).unwrap().holds().unwrap());
        assert!(!d.is_opcartesian(inc).unwrap().holds().unwrap());
    }

    #[test]
    fn tabulators_and_strength() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();

        let unit = d.unit_h(two).unwrap();
        let (apex, l, r, tri) = d.tabulator(&unit);
        assert_eq!(d.cat.obj_size(apex), 2);
        assert_eq!(l, r);
        assert!(d.is_tabulating(&tri).unwrap());
        assert!(d.is_strong_tabulator(&tri).unwrap().holds().unwrap());

        // Tabulator of !_! : A ⇸ 1 has apex A with legs (id-like, !).
        let bang = d.bang(two).unwrap();
        let comp = d.companion(bang).unwrap();
        let (apex, _, _, tri) = d.tabulator(&comp);
        assert_eq!(d.cat.obj_size(apex), 2);
        assert!(d.is_tabulating(&tri).unwrap());

        // Tabulator of the full relation is the whole product.
        let full = rel_of_pairs(&d, two, two, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let (apex, _, _, _) = d.tabulator(&full);
        assert_eq!(d.cat.obj_size(apex), 4);

        // A triangle that is not tabulating: the image triangle of a
        // non-injective arrow, which has two lifts.
        let one = d.cat.finset_obj(1).unwrap();
        let f = d.cat.finset_mor(two, one, vec![0, 0]).unwrap();
        let c = d.canonicalize(f, d.bang(two).unwrap()).unwrap();
        let tri = crate::reldbl::TriangleCell {
            apex_obj: two,
            f,
            g: d.bang(two).unwrap(),
            target: c.rel.clone(),
            alpha: c.comparison,
        };
        assert!(!d.is_tabulating(&tri).unwrap());
    }

    #[test]
    fn local_products_are_intersections() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        let p = rel_of_pairs(&d, two, two, &[(0, 0)]);
        let q = rel_of_pairs(&d, two, two, &[(0, 0), (1, 1)]);
        assert_eq!(d.local_product(&p, &p).unwrap(), p);
        assert_eq!(d.local_product(&p, &q).unwrap(), p);
        let top = d.local_terminal(two, two).unwrap();
        assert_eq!(pairs_of(&d, &top), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn dagger_both_ways_and_involution() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        d.set_discrete(true); // verified separately by the discreteness checker
        let two = d.cat.finset_obj(2).unwrap();

        let r = rel_of_pairs(&d, two, two, &[(0, 1)]);
        let rd = d.dagger(&r).unwrap();
        assert_eq!(pairs_of(&d, &rd), vec![(1, 0)]);

        let unit = d.unit_h(two).unwrap();
        assert_eq!(d.dagger(&unit).unwrap(), unit);

        for f in d.probe_verticals().unwrap() {
            let comp = d.companion(f).unwrap();
            assert_eq!(d.dagger(&comp).unwrap(), d.conjoint(f).unwrap());
        }

        // Both routes agree on every [2] ⇸ [2] relation, and dagger is an
        // involution; contravariance over composition.
        for p in d.hom_rel(two, two).unwrap() {
            let swap = d.dagger(&p).unwrap();
            let formula = d.dagger_via_duality(&p).unwrap();
            assert_eq!(swap, formula, "at {}", d.rel_label(&p));
            assert_eq!(d.dagger(&swap).unwrap(), p);
            for q in d.hom_rel(two, two).unwrap() {
                let lhs = d.dagger(&d.compose_h(&p, &q).unwrap()).unwrap();
                let rhs = d
                    .compose_h(&d.dagger(&q).unwrap(), &d.dagger(&p).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn tilt_round_trip_preserves_status() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        d.set_discrete(true);
        let two = d.cat.finset_obj(2).unwrap();
        for p in d.hom_rel(two, two).unwrap() {
            let tri = d.canonical_triangle(&p);
            let tilted = d.tilt(&tri).unwrap();
            assert!(d.triangle_is_valid(&tilted).unwrap());
            assert_eq!(tilted.target.tgt, d.terminal);
            // The tilted triangle of a tabulating triangle tabulates.
            assert_eq!(
                d.is_tabulating(&tri).unwrap(),
                d.is_tabulating(&tilted).unwrap(),
                "tabulating status at {}",
                d.rel_label(&p)
            );
            // Opcartesian status is preserved as well.
            let before = d
                .is_opcartesian(&d.triangle_to_unit_cell(&tri).unwrap())
                .unwrap()
                .structural;
            let after = d
                .is_opcartesian(&d.triangle_to_unit_cell(&tilted).unwrap())
                .unwrap()
                .structural;
            assert_eq!(before, after, "opcartesian status at {}", d.rel_label(&p));
            // Round trip.
            let back = d.untilt(&tilted, p.src, p.tgt).unwrap();
            assert_eq!(back.target, p, "untilt target at {}", d.rel_label(&p));
            assert_eq!(back.alpha, tri.alpha, "untilt alpha at {}", d.rel_label(&p));
            assert_eq!(back.f, tri.f);
            assert_eq!(back.g, tri.g);
        }
    }

    #[test]
    fn modular_law_on_probe_triples() {
        let d = preset::build("finset2", 2, Budget::default()).unwrap();
        let two = d.cat.finset_obj(2).unwrap();
        // f*R ∧ S ≅ f*(R ∧ f_!S) for all f: X→A and R: A⇸B, S: X⇸B.
        for f in d.cat.hom(two, two).unwrap() {
            let fstar = d.conjoint(f).unwrap();
            let fbang = d.companion(f).unwrap();
            for r in d.hom_rel(two, two).unwrap() {
                for s in d.hom_rel(two, two).unwrap() {
                    let lhs = d
                        .local_product(&d.compose_h(&fstar, &r).unwrap(), &s)
                        .unwrap();
                    let inner = d.local_product(&r, &d.compose_h(&fbang, &s).unwrap()).unwrap();
                    let rhs = d.compose_h(&fstar, &inner).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
