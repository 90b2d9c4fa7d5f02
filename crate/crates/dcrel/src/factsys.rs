//! Arrow classes and orthogonal factorisation systems: orthogonality,
//! OFS validation, factorisation, pullback-stability, the properness
//! taxonomy, synthesis of the left class from a stable system, and the
//! equivalence of anti-right-properness with regular-epi left classes.

use crate::basecat::{BackendKind, Category, MorPredicate, MorRef, ObjRef};
use crate::concrete;
use crate::error::{Error, Result};
use crate::limits::{self, LimitDiagram};
use crate::report::PropertyReport;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinClass {
    Mono,
    Epi,
    Iso,
    RegEpi,
    All,
    SplitMono,
    SplitEpi,
    /// Order-reflecting injections on FinPreord (full embeddings); on FinSet
    /// this coincides with Mono.
    Embedding,
}

impl BuiltinClass {
    pub fn parse(s: &str) -> Option<BuiltinClass> {
        Some(match s {
            "mono" => BuiltinClass::Mono,
            "epi" => BuiltinClass::Epi,
            "iso" => BuiltinClass::Iso,
            "regepi" => BuiltinClass::RegEpi,
            "all" => BuiltinClass::All,
            "split_mono" => BuiltinClass::SplitMono,
            "split_epi" => BuiltinClass::SplitEpi,
            "embedding" => BuiltinClass::Embedding,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinClass::Mono => "mono",
            BuiltinClass::Epi => "epi",
            BuiltinClass::Iso => "iso",
            BuiltinClass::RegEpi => "regepi",
            BuiltinClass::All => "all",
            BuiltinClass::SplitMono => "split_mono",
            BuiltinClass::SplitEpi => "split_epi",
            BuiltinClass::Embedding => "embedding",
        }
    }
}

/// A class of arrows, either listed explicitly or named and resolved lazily
/// against a category.
#[derive(Debug, Clone)]
pub enum ArrowClass {
    Explicit(BTreeSet<MorRef>),
    Builtin(BuiltinClass),
}

impl ArrowClass {
    pub fn contains(&self, cat: &Category, f: MorRef) -> Result<bool> {
        match self {
            ArrowClass::Explicit(set) => Ok(set.contains(&f)),
            ArrowClass::Builtin(b) => builtin_contains(cat, *b, f),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ArrowClass::Explicit(set) => format!("explicit({} arrows)", set.len()),
            ArrowClass::Builtin(b) => format!("builtin({})", b.name()),
        }
    }
}

fn builtin_contains(cat: &Category, b: BuiltinClass, f: MorRef) -> Result<bool> {
    match b {
        BuiltinClass::All => Ok(true),
        BuiltinClass::Mono => cat.predicate(f, MorPredicate::Mono),
        BuiltinClass::Epi => cat.predicate(f, MorPredicate::Epi),
        BuiltinClass::Iso => cat.predicate(f, MorPredicate::Iso),
        BuiltinClass::SplitMono => cat.predicate(f, MorPredicate::SplitMono),
        BuiltinClass::SplitEpi => cat.predicate(f, MorPredicate::SplitEpi),
        BuiltinClass::RegEpi => is_regular_epi(cat, f),
        BuiltinClass::Embedding => match cat.backend() {
            BackendKind::FinSet => cat.predicate(f, MorPredicate::Mono),
            BackendKind::FinPreord => {
                if !cat.predicate(f, MorPredicate::Mono)? {
                    return Ok(false);
                }
                let map = cat.map_of(f).expect("concrete map");
                let (dom, cod) = (cat.dom(f), cat.cod(f));
                let n = cat.obj_size(dom);
                for i in 0..n {
                    for j in 0..n {
                        if cat.obj_leq(cod, map[i], map[j]) && !cat.obj_leq(dom, i, j) {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            BackendKind::Table => Err(Error::Unsupported(
                "builtin(embedding) has no table-backend meaning".into(),
            )),
        },
    }
}

/// Regular epimorphisms. Concrete backends decide structurally
/// ([`concrete::regular_epi_concrete`]); the table backend checks the
/// couniversal property of the kernel pair, falling back to an exhaustive
/// search over parallel pairs when the kernel pair is absent.
pub fn is_regular_epi(cat: &Category, f: MorRef) -> Result<bool> {
    match cat.backend() {
        BackendKind::FinSet | BackendKind::FinPreord => concrete::regular_epi_concrete(cat, f),
        BackendKind::Table => {
            if let Some(kp) = limits::kernel_pair(cat, f)? {
                return limits::is_coequalizer_of(cat, f, kp.legs[0], kp.legs[1]);
            }
            for k in cat.objects() {
                let hk = cat.hom(k, cat.dom(f))?;
                for &k1 in &hk {
                    for &k2 in &hk {
                        if limits::is_coequalizer_of(cat, f, k1, k2)? {
                            return Ok(true);
                        }
                    }
                }
            }
            Ok(false)
        }
    }
}

/// Verification state of one named flag. `VerifiedFalse` always carries a
/// re-checkable witness.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Status {
    #[default]
    Unchecked,
    VerifiedTrue,
    VerifiedFalse(String),
}

impl Status {
    pub fn is_true(&self) -> bool {
        matches!(self, Status::VerifiedTrue)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Status::VerifiedFalse(_))
    }

    pub fn from_witness(w: Option<String>) -> Status {
        match w {
            None => Status::VerifiedTrue,
            Some(w) => Status::VerifiedFalse(w),
        }
    }

    pub fn mark(&self) -> String {
        match self {
            Status::Unchecked => "unchecked".into(),
            Status::VerifiedTrue => "true".into(),
            Status::VerifiedFalse(w) => format!("false ({w})"),
        }
    }
}

/// A factorisation-system candidate with verified status flags.
#[derive(Debug, Clone)]
pub struct FactSystem {
    pub name: String,
    pub e: ArrowClass,
    pub m: ArrowClass,
    pub is_ofs: Status,
    pub is_stable: Status,
    pub left_proper: Status,
    pub right_proper: Status,
    pub proper: Status,
    pub anti_right_proper: Status,
}

impl FactSystem {
    pub fn new(name: &str, e: ArrowClass, m: ArrowClass) -> FactSystem {
        FactSystem {
            name: name.to_string(),
            e,
            m,
            is_ofs: Status::Unchecked,
            is_stable: Status::Unchecked,
            left_proper: Status::Unchecked,
            right_proper: Status::Unchecked,
            proper: Status::Unchecked,
            anti_right_proper: Status::Unchecked,
        }
    }

    pub fn in_e(&self, cat: &Category, f: MorRef) -> Result<bool> {
        self.e.contains(cat, f)
    }

    pub fn in_m(&self, cat: &Category, f: MorRef) -> Result<bool> {
        self.m.contains(cat, f)
    }
}

/// All morphisms between the probe objects, in canonical order.
pub fn probe_morphisms(cat: &Category, probe_objs: &[ObjRef]) -> Result<Vec<MorRef>> {
    let mut out = Vec::new();
    for &a in probe_objs {
        for &b in probe_objs {
            out.extend(cat.hom(a, b)?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn describe_probe(cat: &Category, probe_objs: &[ObjRef]) -> String {
    let names: Vec<String> = probe_objs.iter().map(|&o| cat.obj_label(o)).collect();
    format!(
        "objects {{{}}}{}",
        names.join(", "),
        if cat.exhaustive() {
            " (exhaustive)"
        } else {
            ""
        }
    )
}

/// Does every commuting square from `e` to `m` have exactly one diagonal
/// filler? Both existence and uniqueness are enumerated.
pub fn orthogonal(cat: &Category, e: MorRef, m: MorRef) -> Result<bool> {
    Ok(orthogonality_witness(cat, e, m)?.is_none())
}

/// As [`orthogonal`], but reporting the offending square.
pub fn orthogonality_witness(cat: &Category, e: MorRef, m: MorRef) -> Result<Option<String>> {
    let fillers = cat.hom(cat.cod(e), cat.dom(m))?;
    for u in cat.hom(cat.dom(e), cat.dom(m))? {
        let um = cat.compose(u, m)?;
        for v in cat.hom(cat.cod(e), cat.cod(m))? {
            if cat.compose(e, v)? != um {
                continue;
            }
            let mut count = 0;
            for &d in &fillers {
                if cat.compose(e, d)? == u && cat.compose(d, m)? == v {
                    count += 1;
                }
            }
            if count != 1 {
                return Ok(Some(format!(
                    "square (top {}, bottom {}) across {} vs {} has {} fillers",
                    cat.mor_label(u),
                    cat.mor_label(v),
                    cat.mor_label(e),
                    cat.mor_label(m),
                    count
                )));
            }
        }
    }
    Ok(None)
}

/// Report of the full OFS axiom check over a probe set.
#[derive(Debug, Clone, Default)]
pub struct OfsReport {
    pub closure_violations: Vec<String>,
    pub orthogonality_violations: Vec<String>,
    pub factorisation_failures: Vec<String>,
    /// E strictly smaller than the orthogonal complement of M (or dually):
    /// a warning by default, an error in strict mode.
    pub determination_warnings: Vec<String>,
    pub probes: String,
}

impl OfsReport {
    pub fn is_valid(&self) -> bool {
        self.closure_violations.is_empty()
            && self.orthogonality_violations.is_empty()
            && self.factorisation_failures.is_empty()
    }

    pub fn all_violations(&self) -> Vec<String> {
        let mut v = self.closure_violations.clone();
        v.extend(self.orthogonality_violations.clone());
        v.extend(self.factorisation_failures.clone());
        v
    }
}

/// Verify the OFS axioms for `(E, M)` over the probe objects: closure under
/// composition and isomorphisms, pairwise orthogonality, factorisation of
/// every probe morphism, and mutual determination `E = ⊥M`, `M = E⊥`.
pub fn check_ofs(
    cat: &Category,
    sys: &mut FactSystem,
    probe_objs: &[ObjRef],
    strict: bool,
) -> Result<OfsReport> {
    let mors = probe_morphisms(cat, probe_objs)?;
    let mut report = OfsReport {
        probes: describe_probe(cat, probe_objs),
        ..OfsReport::default()
    };

    let mut e_set = Vec::new();
    let mut m_set = Vec::new();
    for &f in &mors {
        if sys.in_e(cat, f)? {
            e_set.push(f);
        }
        if sys.in_m(cat, f)? {
            m_set.push(f);
        }
    }

    // Closure: isomorphisms and composition.
    for &f in &mors {
        if cat.predicate(f, MorPredicate::Iso)? {
            if !sys.in_e(cat, f)? {
                report
                    .closure_violations
                    .push(format!("iso {} not in E", cat.mor_label(f)));
            }
            if !sys.in_m(cat, f)? {
                report
                    .closure_violations
                    .push(format!("iso {} not in M", cat.mor_label(f)));
            }
        }
    }
    for (class, set, tag) in [(&sys.e, &e_set, "E"), (&sys.m, &m_set, "M")] {
        for &f in set.iter() {
            for &g in set.iter() {
                if cat.cod(f) == cat.dom(g) {
                    let fg = cat.compose(f, g)?;
                    if !class.contains(cat, fg)? {
                        report.closure_violations.push(format!(
                            "{tag} not closed: {};{} escapes",
                            cat.mor_label(f),
                            cat.mor_label(g)
                        ));
                    }
                }
            }
        }
    }

    // Pairwise orthogonality.
    for &e in &e_set {
        for &m in &m_set {
            if let Some(w) = orthogonality_witness(cat, e, m)? {
                report.orthogonality_violations.push(w);
            }
        }
    }

    // Factorisation existence for every probe morphism.
    for &f in &mors {
        if factorise_unchecked(cat, sys, f, probe_objs)?.is_none() {
            report
                .factorisation_failures
                .push(format!("no (E,M) factorisation of {}", cat.mor_label(f)));
        }
    }

    // Mutual determination over the probes.
    for &f in &mors {
        let mut left_orth = true;
        for &m in &m_set {
            if !orthogonal(cat, f, m)? {
                left_orth = false;
                break;
            }
        }
        if left_orth != e_set.contains(&f) {
            report.determination_warnings.push(format!(
                "{} is {} ⊥M but {} E",
                cat.mor_label(f),
                if left_orth { "in" } else { "not in" },
                if e_set.contains(&f) { "in" } else { "not in" }
            ));
        }
        let mut right_orth = true;
        for &e in &e_set {
            if !orthogonal(cat, e, f)? {
                right_orth = false;
                break;
            }
        }
        if right_orth != m_set.contains(&f) {
            report.determination_warnings.push(format!(
                "{} is {} E⊥ but {} M",
                cat.mor_label(f),
                if right_orth { "in" } else { "not in" },
                if m_set.contains(&f) { "in" } else { "not in" }
            ));
        }
    }
    if strict && !report.determination_warnings.is_empty() {
        return Err(Error::IllFormed(format!(
            "classes not mutually determined: {}",
            report.determination_warnings.join("; ")
        )));
    }

    sys.is_ofs = if report.is_valid() {
        Status::VerifiedTrue
    } else {
        Status::VerifiedFalse(report.all_violations().join("; "))
    };
    Ok(report)
}

/// Structural factorisation where the backend and classes admit one;
/// otherwise a search through intermediate probe objects in canonical order.
/// Returns `None` when no factorisation exists over the probes.
fn factorise_unchecked(
    cat: &Category,
    sys: &FactSystem,
    f: MorRef,
    probe_objs: &[ObjRef],
) -> Result<Option<(MorRef, MorRef)>> {
    // Degenerate systems first: iso on one side makes the answer canonical.
    if let ArrowClass::Builtin(BuiltinClass::Iso) = sys.e {
        let e = cat.identity(cat.dom(f));
        if sys.in_m(cat, f)? {
            return Ok(Some((e, f)));
        }
    }
    if let ArrowClass::Builtin(BuiltinClass::Iso) = sys.m {
        let m = cat.identity(cat.cod(f));
        if sys.in_e(cat, f)? {
            return Ok(Some((f, m)));
        }
    }
    // Image factorisation on concrete backends when M is subobject-like.
    let subobject_like = matches!(
        sys.m,
        ArrowClass::Builtin(BuiltinClass::Mono) | ArrowClass::Builtin(BuiltinClass::Embedding)
    );
    if subobject_like && cat.backend() != BackendKind::Table {
        let map = cat.map_of(f).expect("concrete map");
        let (dom, cod) = (cat.dom(f), cat.cod(f));
        let mut elems: Vec<usize> = map.clone();
        elems.sort_unstable();
        elems.dedup();
        let e_map: Vec<usize> = map
            .iter()
            .map(|v| elems.binary_search(v).expect("image element"))
            .collect();
        let (e, inc) = {
            let mut reg = cat.write();
            let (apex, inc) = concrete::subobject(&mut reg, cod, &elems);
            let e = reg.add_mor(dom, apex, crate::basecat::MorPayload::Map(e_map));
            (e, inc)
        };
        if sys.in_e(cat, e)? && sys.in_m(cat, inc)? {
            return Ok(Some((e, inc)));
        }
        // classes reject the image: fall through to the search
    }
    for &y in probe_objs {
        for e in cat.hom(cat.dom(f), y)? {
            if !sys.in_e(cat, e)? {
                continue;
            }
            for m in cat.hom(y, cat.cod(f))? {
                if cat.compose(e, m)? == f && sys.in_m(cat, m)? {
                    return Ok(Some((e, m)));
                }
            }
        }
    }
    Ok(None)
}

/// Factor `f = e;m` under a system verified to be an OFS. The choice is
/// canonical: structural image where available, else the first intermediate
/// object and first `(e, m)` pair in canonical order.
pub fn factorise(cat: &Category, sys: &FactSystem, f: MorRef) -> Result<(MorRef, MorRef)> {
    if !sys.is_ofs.is_true() {
        return Err(Error::Unverified(format!(
            "factorise requires a verified OFS; '{}' has is_ofs = {}",
            sys.name,
            sys.is_ofs.mark()
        )));
    }
    let probe: Vec<ObjRef> = cat.objects();
    factorise_unchecked(cat, sys, f, &probe)?.ok_or_else(|| {
        Error::Inconsistency(format!(
            "verified OFS '{}' failed to factor {}",
            sys.name,
            cat.mor_label(f)
        ))
    })
}

/// Pullback-stability of the left class over the probes. A missing pullback
/// is an obstruction error, not a stability verdict.
pub fn check_stable(cat: &Category, sys: &mut FactSystem, probe_objs: &[ObjRef]) -> Result<Status> {
    if !sys.is_ofs.is_true() {
        return Err(Error::Unverified(
            "check_stable requires a verified OFS".into(),
        ));
    }
    let mors = probe_morphisms(cat, probe_objs)?;
    let mut status = Status::VerifiedTrue;
    'outer: for &e in &mors {
        if !sys.in_e(cat, e)? {
            continue;
        }
        for &g in &mors {
            if cat.cod(g) != cat.cod(e) {
                continue;
            }
            let cone = limits::find_limit(cat, LimitDiagram::Pullback(e, g))?
                .ok_or_else(|| {
                    Error::MissingLimit(format!(
                        "pullback of {} along {}",
                        cat.mor_label(e),
                        cat.mor_label(g)
                    ))
                })?;
            // Leg opposite e: the pulled-back copy of e over dom(g).
            let pulled = cone.legs[1];
            if !sys.in_e(cat, pulled)? {
                status = Status::VerifiedFalse(format!(
                    "pullback of {} along {} gives {} outside E",
                    cat.mor_label(e),
                    cat.mor_label(g),
                    cat.mor_label(pulled)
                ));
                break 'outer;
            }
        }
    }
    sys.is_stable = status.clone();
    Ok(status)
}

/// Left/right/anti-right properness with witnesses.
pub fn properness_taxonomy(
    cat: &Category,
    sys: &mut FactSystem,
    probe_objs: &[ObjRef],
) -> Result<()> {
    let mors = probe_morphisms(cat, probe_objs)?;
    let mut left = None;
    let mut right = None;
    let mut anti = None;
    for &f in &mors {
        if left.is_none() && sys.in_e(cat, f)? && !cat.predicate(f, MorPredicate::Epi)? {
            left = Some(format!("non-epi {} in E", cat.mor_label(f)));
        }
        if right.is_none() && sys.in_m(cat, f)? && !cat.predicate(f, MorPredicate::Mono)? {
            right = Some(format!("non-mono {} in M", cat.mor_label(f)));
        }
        if anti.is_none() && cat.predicate(f, MorPredicate::Mono)? && !sys.in_m(cat, f)? {
            anti = Some(format!("mono {} outside M", cat.mor_label(f)));
        }
    }
    sys.left_proper = Status::from_witness(left.clone());
    sys.right_proper = Status::from_witness(right.clone());
    sys.proper = Status::from_witness(left.or(right));
    sys.anti_right_proper = Status::from_witness(anti);
    Ok(())
}

/// Both sides of the anti-right-properness / regular-epi equivalence,
/// asserted to agree. Disagreement is reported as a failure with both
/// witnesses, never silently resolved.
pub fn check_regepi_equivalence(
    cat: &Category,
    sys: &mut FactSystem,
    probe_objs: &[ObjRef],
) -> Result<PropertyReport> {
    if !sys.is_stable.is_true() {
        return Err(Error::Unverified(
            "check_regepi_equivalence requires a verified stable OFS".into(),
        ));
    }
    if sys.anti_right_proper == Status::Unchecked {
        properness_taxonomy(cat, sys, probe_objs)?;
    }
    let anti = sys.anti_right_proper.clone();
    let mors = probe_morphisms(cat, probe_objs)?;
    let mut regepi_witness = None;
    for &f in &mors {
        if sys.in_e(cat, f)? && !is_regular_epi(cat, f)? {
            regepi_witness = Some(format!("{} in E is not a regular epi", cat.mor_label(f)));
            break;
        }
    }
    let probes = describe_probe(cat, probe_objs);
    PropertyReport::run("regepi_equivalence", &probes, || {
        let lhs = anti.is_true();
        let rhs = regepi_witness.is_none();
        if lhs == rhs {
            Ok(None)
        } else {
            Ok(Some(format!(
                "anti_right_proper = {} but E ⊆ regepi = {} ({}/{})",
                lhs,
                rhs,
                anti.mark(),
                regepi_witness.unwrap_or_else(|| "E ⊆ regepi".into())
            )))
        }
    })
}

/// Outcome of synthesising an OFS from a stable system `M`.
#[derive(Debug)]
pub enum OfsSynthesis {
    System(FactSystem),
    /// No factorisation of this morphism through `(⊥M, M)` over the probes.
    Absent { unfactored: MorRef },
}

/// Check that `M` is a stable system (isos, composition, pullbacks), compute
/// `E := ⊥M` over the probes, and validate `(E, M)` as an OFS.
pub fn ofs_from_stable_system(
    cat: &Category,
    m: ArrowClass,
    probe_objs: &[ObjRef],
) -> Result<OfsSynthesis> {
    let mors = probe_morphisms(cat, probe_objs)?;
    // Stable-system preconditions, each with a hard witness.
    for &f in &mors {
        if cat.predicate(f, MorPredicate::Iso)? && !m.contains(cat, f)? {
            return Err(Error::Unverified(format!(
                "not a stable system: iso {} outside M",
                cat.mor_label(f)
            )));
        }
    }
    for &f in &mors {
        if !m.contains(cat, f)? {
            continue;
        }
        for &g in &mors {
            if cat.cod(f) == cat.dom(g) && m.contains(cat, g)? {
                let fg = cat.compose(f, g)?;
                if !m.contains(cat, fg)? {
                    return Err(Error::Unverified(format!(
                        "not a stable system: {};{} escapes M",
                        cat.mor_label(f),
                        cat.mor_label(g)
                    )));
                }
            }
        }
        for &g in &mors {
            if cat.cod(g) != cat.cod(f) {
                continue;
            }
            if let Some(cone) = limits::find_limit(cat, LimitDiagram::Pullback(g, f))? {
                // Leg to dom(g): the pulled-back copy of f.
                if !m.contains(cat, cone.legs[0])? {
                    return Err(Error::Unverified(format!(
                        "not a stable system: pullback of {} along {} escapes M",
                        cat.mor_label(f),
                        cat.mor_label(g)
                    )));
                }
            }
        }
    }
    let mut e_set = BTreeSet::new();
    for &f in &mors {
        let mut ok = true;
        for &mm in &mors {
            if m.contains(cat, mm)? && !orthogonal(cat, f, mm)? {
                ok = false;
                break;
            }
        }
        if ok {
            e_set.insert(f);
        }
    }
    let mut sys = FactSystem::new("synthesized", ArrowClass::Explicit(e_set), m);
    let report = check_ofs(cat, &mut sys, probe_objs, false)?;
    if let Some(first) = report.factorisation_failures.first() {
        for &f in &mors {
            if first.contains(&cat.mor_label(f)) {
                return Ok(OfsSynthesis::Absent { unfactored: f });
            }
        }
        return Ok(OfsSynthesis::Absent { unfactored: mors[0] });
    }
    if !report.is_valid() {
        return Err(Error::Inconsistency(format!(
            "(⊥M, M) failed OFS validation: {}",
            report.all_violations().join("; ")
        )));
    }
    Ok(OfsSynthesis::System(sys))
}
